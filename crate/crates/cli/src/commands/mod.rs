pub mod bitrate;
pub mod classify;
pub mod convert;
pub mod ldiag;
pub mod stationarity;
pub mod summary;
pub mod synth;
pub mod topflows;
