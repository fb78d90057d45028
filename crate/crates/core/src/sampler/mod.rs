//! Exact and sampled BosonSampling statistics at desk scale.

pub mod check;
pub mod distribution;
pub mod fock;
pub mod permanent;
pub mod sampling;

pub use check::{end_to_end_check, EndToEndReport};
pub use distribution::{lossless_distribution, postselected_distribution, Distribution, MAX_MODES, MAX_PHOTONS};
pub use fock::{configurations, FockConfig};
pub use permanent::{permanent, permanent_brute_force, PERMANENT_CAP};
pub use sampling::{lossy_sample, LossySampler, SamplingResult, TrialSummary, CHUNK_TRIALS};
