use rand::Rng;
use rand_distr::StandardNormal;

/// Scalar type of the numeric pipeline. Series, transforms, diagrams, and
/// generators are generic over this; `f64` is the default used by the CLI and
/// `f32` is available where memory matters more than tail precision.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::FloatConst
    + rustfft::FftNum
    + std::fmt::Display
    + std::fmt::LowerExp
{
    /// One standard normal draw. Kept on the trait so generators stay generic
    /// without rand distribution bounds leaking into every signature.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_f64_near(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts")
    }

    fn from_usize_near(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts")
    }
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(StandardNormal)
            }
        }
    )*};
}

impl_real!(f32, f64);
