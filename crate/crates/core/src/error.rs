use thiserror::Error;

use crate::model::Region;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("energy {energy} lies outside the open band (-2, 2)")]
    OutOfBand { energy: f64 },

    #[error("state has {found} amplitudes but the system expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time {time} is not a multiple of the step {dt}")]
    Misaligned { time: f64, dt: f64 },

    #[error("norm drifted by {drift:e} at t = {time} (limit {limit:e})")]
    NormDrift { time: f64, drift: f64, limit: f64 },

    #[error("stationary system is singular at E = {energy} (smallest pivot {pivot:e})")]
    Singular { energy: f64, pivot: f64 },

    #[error("self-energy pole at E = {energy}, omega = {omega}")]
    Pole { energy: f64, omega: f64 },

    #[error("no window with stored population above {floor}")]
    NoPulse { floor: f64 },

    #[error("unexpected region {0:?}")]
    WrongRegion(Region),

    #[error("at E = {energy}: {source}")]
    AtEnergy {
        energy: f64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}
