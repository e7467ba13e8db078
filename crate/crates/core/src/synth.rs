//! Seeded generators for validation workloads.
//!
//! Everything here is deterministic given a seed. The fractional Gaussian
//! noise generator uses circulant embedding of the autocovariance, which is
//! exact: the output has the requested covariance to rounding error, so
//! estimator checks downstream are calibrated against the real thing.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord, Transport};
use crate::real::Real;
use crate::session::{SessionKey, Thresholds};

/// Autocovariance of fractional Gaussian noise at lag `k` for Hurst `h`,
/// unit variance: `0.5 (|k+1|^2H - 2|k|^2H + |k-1|^2H)`.
pub fn fgn_autocovariance(h: f64, k: usize) -> f64 {
    let two_h = 2.0 * h;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Exact fractional Gaussian noise by circulant embedding.
///
/// The covariance sequence is embedded in a circulant matrix of size `2m`
/// (`m >= n`) whose eigenvalues come from one FFT; a complex Gaussian vector
/// shaped by the square roots of those eigenvalues transforms back to a real
/// sample with exactly the fGn covariance. Negative eigenvalues mean the
/// embedding failed; the size doubles once before giving up.
pub fn gen_fgn<T: Real>(n: usize, hurst: f64, seed: u64) -> Result<Vec<T>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter {
            detail: format!("fGn length must be a power of two, got {n}"),
        });
    }
    if !(0.0..1.0).contains(&hurst) || hurst <= 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!("hurst must lie in (0, 1), got {hurst}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = n;
    for _ in 0..2 {
        match try_embedding::<T>(n, hurst, m, &mut rng) {
            Some(sample) => return Ok(sample),
            None => m *= 2,
        }
    }
    Err(Error::EmbeddingFailed {
        detail: format!("covariance embedding not nonnegative for h={hurst} n={n}"),
    })
}

fn try_embedding<T: Real>(n: usize, hurst: f64, m: usize, rng: &mut ChaCha8Rng) -> Option<Vec<T>> {
    let size = 2 * m;
    // First row of the circulant: gamma(0..m), then mirrored tail.
    let mut row: Vec<Complex<T>> = Vec::with_capacity(size);
    for k in 0..=m {
        row.push(Complex::new(
            T::from_f64_near(fgn_autocovariance(hurst, k)),
            T::zero(),
        ));
    }
    for k in (1..m).rev() {
        row.push(Complex::new(
            T::from_f64_near(fgn_autocovariance(hurst, k)),
            T::zero(),
        ));
    }
    debug_assert_eq!(row.len(), size);

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut row);

    // Eigenvalues are real by symmetry; tolerate rounding just below zero.
    let floor = T::from_f64_near(-1e-8) * T::from_usize_near(size);
    let mut lambda = Vec::with_capacity(size);
    for v in &row {
        if v.re < floor {
            return None;
        }
        lambda.push(v.re.max(T::zero()));
    }

    let scale = |l: T| (l / T::from_usize_near(size)).sqrt();
    let half = T::from_f64_near(0.5).sqrt();
    let mut spectrum = vec![Complex::new(T::zero(), T::zero()); size];
    spectrum[0] = Complex::new(scale(lambda[0]) * T::standard_normal(rng), T::zero());
    spectrum[m] = Complex::new(scale(lambda[m]) * T::standard_normal(rng), T::zero());
    for k in 1..m {
        let a = T::standard_normal(rng);
        let b = T::standard_normal(rng);
        let r = scale(lambda[k]) * half;
        spectrum[k] = Complex::new(r * a, r * b);
        spectrum[size - k] = spectrum[k].conj();
    }

    planner.plan_fft_forward(size).process(&mut spectrum);
    Some(spectrum.iter().take(n).map(|c| c.re).collect())
}

/// I.i.d. Poisson bin counts with the given mean, as a float series.
pub fn gen_poisson_counts<T: Real>(n: usize, mean: f64, seed: u64) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            detail: "series length must be positive".into(),
        });
    }
    if mean.is_nan() || mean <= 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!("poisson mean must be positive, got {mean}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = rand_distr::Poisson::new(mean).map_err(|e| Error::InvalidParameter {
        detail: format!("poisson mean {mean}: {e}"),
    })?;
    Ok((0..n).map(|_| T::from_f64_near(rng.sample(dist))).collect())
}

/// Poisson counts whose rate follows a square wave: `base_rate + amplitude`
/// for the first half of each period, `base_rate` for the second. One
/// characteristic time scale on top of memoryless noise; amplitude 0
/// degenerates to the homogeneous generator on the same draw path.
pub fn gen_periodic_counts<T: Real>(
    n: usize,
    period_bins: usize,
    base_rate: f64,
    amplitude: f64,
    seed: u64,
) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            detail: "series length must be positive".into(),
        });
    }
    if period_bins < 2 {
        return Err(Error::InvalidParameter {
            detail: format!("period must be at least 2 bins, got {period_bins}"),
        });
    }
    if base_rate.is_nan()
        || base_rate < 0.0
        || amplitude.is_nan()
        || amplitude < 0.0
        || base_rate + amplitude <= 0.0
    {
        return Err(Error::InvalidParameter {
            detail: format!(
                "rates must be nonnegative with a positive high phase, got base {base_rate} amplitude {amplitude}"
            ),
        });
    }
    let make = |rate: f64| {
        rand_distr::Poisson::new(rate).map_err(|e| Error::InvalidParameter {
            detail: format!("poisson rate {rate}: {e}"),
        })
    };
    let high = make(base_rate + amplitude)?;
    let low = (base_rate > 0.0).then(|| make(base_rate)).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|k| {
            let in_high = (k % period_bins) < period_bins / 2;
            match (in_high, low) {
                (true, _) => T::from_f64_near(rng.sample(high)),
                (false, Some(low)) => T::from_f64_near(rng.sample(low)),
                (false, None) => T::zero(),
            }
        })
        .collect())
}

/// Arrival pattern of one synthetic session.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Timing {
    /// Evenly spaced over the duration.
    Uniform,
    /// I.i.d. uniform arrival instants, sorted: a Poisson process
    /// conditioned on its count.
    Poisson,
    /// Arrival rate modulated by fractional Gaussian noise, producing
    /// long-range-dependent counts. `modulation` in (0, 1) sets how hard
    /// the rate swings around its mean.
    Fgn { hurst: f64, modulation: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Video,
    Signaling,
}

/// One synthetic session: a remote endpoint exchanging packets with the
/// monitored host. Sizes are IP total lengths on the wire; `large_size`
/// must reach the video threshold and `small_size` must stay below it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionBlueprint {
    pub role: Role,
    pub direction: Direction,
    pub transport: Transport,
    pub remote_addr: std::net::Ipv4Addr,
    pub remote_port: u16,
    pub local_port: u16,
    pub large_packets: usize,
    pub large_size: u32,
    pub small_packets: usize,
    pub small_size: u32,
    pub timing: Timing,
}

impl SessionBlueprint {
    fn validate(&self, thresholds: &Thresholds) -> Result<()> {
        let overhead = IPV4_HEADER + transport_header(self.transport);
        for (label, size, active) in [
            ("large_size", self.large_size, self.large_packets > 0),
            ("small_size", self.small_size, self.small_packets > 0),
        ] {
            if active && size < overhead {
                return Err(Error::InvalidParameter {
                    detail: format!("{label} {size} cannot hold {overhead} bytes of headers"),
                });
            }
        }
        let large_ok = self.large_size >= thresholds.large_packet_bytes;
        let small_ok = self.small_size < thresholds.large_packet_bytes;
        if self.large_packets > 0 && !large_ok {
            return Err(Error::InvalidParameter {
                detail: format!(
                    "large_size {} is below the large-packet threshold {}",
                    self.large_size, thresholds.large_packet_bytes
                ),
            });
        }
        if self.small_packets > 0 && !small_ok {
            return Err(Error::InvalidParameter {
                detail: format!(
                    "small_size {} reaches the large-packet threshold {}",
                    self.small_size, thresholds.large_packet_bytes
                ),
            });
        }
        let is_video = self.large_packets >= thresholds.min_large_packets as usize;
        match (self.role, is_video) {
            (Role::Video, false) => Err(Error::InvalidParameter {
                detail: format!(
                    "video blueprint has only {} large packets; needs {}",
                    self.large_packets, thresholds.min_large_packets
                ),
            }),
            (Role::Signaling, true) => Err(Error::InvalidParameter {
                detail: format!(
                    "signaling blueprint has {} large packets; must stay under {}",
                    self.large_packets, thresholds.min_large_packets
                ),
            }),
            _ => Ok(()),
        }
    }

    fn packet_count(&self) -> usize {
        self.large_packets + self.small_packets
    }
}

/// A whole synthetic trace: blueprints plus the shared clock.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionMixSpec {
    pub local_addr: std::net::Ipv4Addr,
    pub duration_s: f64,
    pub sessions: Vec<SessionBlueprint>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

/// Byte totals the generator promises; classification output must agree
/// with these exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub up_video_bytes: u64,
    pub up_signaling_bytes: u64,
    pub down_video_bytes: u64,
    pub down_signaling_bytes: u64,
    pub video_sessions: usize,
    pub signaling_sessions: usize,
}

const IPV4_HEADER: u32 = 20;

fn transport_header(t: Transport) -> u32 {
    match t {
        Transport::Tcp => 20,
        Transport::Udp => 8,
    }
}

/// Renders a session mix into a packet list sorted by timestamp, together
/// with the byte ledger implied by the blueprints.
pub fn gen_session_mix(
    spec: &SessionMixSpec,
    seed: u64,
) -> Result<(Vec<PacketRecord>, GroundTruth)> {
    if spec.duration_s.is_nan() || spec.duration_s <= 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!("duration must be positive, got {}", spec.duration_s),
        });
    }
    // An empty spec is a valid degenerate case: empty trace, zeroed ledger.
    let mut seen = std::collections::BTreeSet::new();
    let mut records = Vec::new();
    let mut truth = GroundTruth::default();
    for (idx, bp) in spec.sessions.iter().enumerate() {
        bp.validate(&spec.thresholds)?;
        if bp.packet_count() == 0 {
            return Err(Error::InvalidParameter {
                detail: format!("blueprint {idx} emits no packets"),
            });
        }
        let (src_addr, src_port, dst_addr, dst_port) = match bp.direction {
            Direction::Up => (
                spec.local_addr,
                bp.local_port,
                bp.remote_addr,
                bp.remote_port,
            ),
            Direction::Down => (
                bp.remote_addr,
                bp.remote_port,
                spec.local_addr,
                bp.local_port,
            ),
        };
        let key = SessionKey::from_endpoints(src_addr, src_port, dst_addr, dst_port, bp.transport);
        if !seen.insert(key) {
            return Err(Error::InvalidParameter {
                detail: format!("blueprint {idx} duplicates session {key}"),
            });
        }

        // Per-session stream, decorrelated across blueprints.
        let times = arrival_times(
            bp.timing,
            bp.packet_count(),
            spec.duration_s,
            seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(idx as u64 + 1)),
        )?;

        let overhead = IPV4_HEADER + transport_header(bp.transport);
        let mut sizes = Vec::with_capacity(bp.packet_count());
        sizes.resize(bp.large_packets, bp.large_size);
        sizes.resize(bp.packet_count(), bp.small_size);
        debug_assert!(sizes.iter().all(|&s| s >= overhead));
        // Interleave sizes deterministically so large packets spread over
        // the session instead of front-loading.
        let mut size_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d ^ idx as u64);
        for i in (1..sizes.len()).rev() {
            let j = size_rng.gen_range(0..=i);
            sizes.swap(i, j);
        }

        // Video traffic means large packets of video sessions; a video
        // session's small packets still count as signaling bytes.
        let mut large_bytes = 0u64;
        let mut small_bytes = 0u64;
        for (t, size) in times.into_iter().zip(sizes) {
            if size >= spec.thresholds.large_packet_bytes {
                large_bytes += u64::from(size);
            } else {
                small_bytes += u64::from(size);
            }
            records.push(PacketRecord {
                timestamp: t,
                src_addr,
                src_port,
                dst_addr,
                dst_port,
                transport: bp.transport,
                ip_total_len: size,
                payload_len: size - overhead,
                direction: bp.direction,
            });
        }
        let (video_bytes, signaling_bytes) = match bp.role {
            Role::Video => (large_bytes, small_bytes),
            Role::Signaling => (0, large_bytes + small_bytes),
        };
        match bp.direction {
            Direction::Up => {
                truth.up_video_bytes += video_bytes;
                truth.up_signaling_bytes += signaling_bytes;
            }
            Direction::Down => {
                truth.down_video_bytes += video_bytes;
                truth.down_signaling_bytes += signaling_bytes;
            }
        }
        match bp.role {
            Role::Video => truth.video_sessions += 1,
            Role::Signaling => truth.signaling_sessions += 1,
        }
    }
    records.sort_by(|a, b| {
        a.timestamp
            .partial_cmp(&b.timestamp)
            .expect("synthetic timestamps are finite")
            .then_with(|| a.src_port.cmp(&b.src_port))
            .then_with(|| a.dst_port.cmp(&b.dst_port))
    });
    Ok((records, truth))
}

/// Microsecond-quantized arrival instants in `[0, duration)`.
fn arrival_times(timing: Timing, count: usize, duration: f64, seed: u64) -> Result<Vec<f64>> {
    let quantize = |t: f64| (t * 1e6).floor() / 1e6;
    match timing {
        Timing::Uniform => Ok((0..count)
            .map(|i| quantize(duration * i as f64 / count as f64))
            .collect()),
        Timing::Poisson => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut times: Vec<f64> = (0..count)
                .map(|_| quantize(rng.gen_range(0.0..duration)))
                .collect();
            times.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            Ok(times)
        }
        Timing::Fgn { hurst, modulation } => {
            if !(0.0..1.0).contains(&modulation) {
                return Err(Error::InvalidParameter {
                    detail: format!("modulation must lie in [0, 1), got {modulation}"),
                });
            }
            // Rate-modulated arrivals: split the duration into slots whose
            // weights follow clipped fGn, then place each packet by drawing
            // a slot from those weights and a uniform offset inside it.
            let slots = (count.max(64)).next_power_of_two().min(1 << 14);
            let noise = gen_fgn::<f64>(slots, hurst, seed)?;
            let sd = (noise.iter().map(|v| v * v).sum::<f64>() / slots as f64).sqrt();
            let weights: Vec<f64> = noise
                .iter()
                .map(|v| (1.0 + modulation * v / sd.max(1e-12)).max(0.05))
                .collect();
            let total: f64 = weights.iter().sum();
            let mut cumulative = Vec::with_capacity(slots);
            let mut acc = 0.0;
            for w in &weights {
                acc += w / total;
                cumulative.push(acc);
            }
            let slot_width = duration / slots as f64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let mut times: Vec<f64> = (0..count)
                .map(|_| {
                    let u: f64 = rng.gen_range(0.0..1.0);
                    let slot = cumulative.partition_point(|c| *c < u).min(slots - 1);
                    let offset: f64 = rng.gen_range(0.0..1.0);
                    quantize((slot as f64 + offset) * slot_width)
                })
                .collect();
            times.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            Ok(times)
        }
    }
}
