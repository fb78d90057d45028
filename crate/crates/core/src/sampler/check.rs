//! Cross-check of the Fock-space loss model against the Gaussian channel
//! of the compiled schedule.

use serde::Serialize;

use crate::compiler::{compile, factorize_loss, schedule_channel};
use crate::error::{Error, Result};
use crate::linalg::{phase_aligned_distance, CMatrix};
use crate::resources::gamma_eff;

use super::distribution::{lossless_distribution, postselected_distribution};
use super::fock::FockConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndToEndReport {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    /// Closed form `(tanh r)^{4(k+1)}`.
    pub gamma_eff: f64,
    /// Per-mode efficiency read off the schedule channel.
    pub channel_efficiency: f64,
    pub efficiency_deviation: f64,
    /// Distance between the channel's interferometer and `U`, after phase alignment.
    pub unitary_deviation: f64,
    /// Distance between the channel and loss followed by its interferometer.
    pub factorization_deviation: f64,
    /// Largest difference between the postselected Fock distribution of `U`
    /// and the lossless distribution of the channel's interferometer.
    pub distribution_deviation: f64,
    /// `|success mass - channel_efficiency^n|`.
    pub success_mass_deviation: f64,
}

impl EndToEndReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.efficiency_deviation,
            self.unitary_deviation,
            self.factorization_deviation,
            self.distribution_deviation,
            self.success_mass_deviation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

const CHECK_MODES: usize = 4;
const CHECK_PHOTONS: usize = 2;
const CHECK_DEPTH: usize = 4;

fn cap(what: &'static str, cap: usize, got: usize) -> Result<()> {
    if got > cap {
        Err(Error::ScaleCap { what, cap, got })
    } else {
        Ok(())
    }
}

/// Compiles `u` at depth `k`, evaluates the schedule with squeezing `r`, and
/// compares the result with the Fock-space model that applies `gamma_eff`
/// loss in front of a lossless `u`.
pub fn end_to_end_check(u: &CMatrix, input: &FockConfig, r: f64, k: usize) -> Result<EndToEndReport> {
    let m = u.nrows();
    let n = input.total();
    cap("modes", CHECK_MODES, m)?;
    cap("photons", CHECK_PHOTONS, n)?;
    cap("depth", CHECK_DEPTH, k)?;
    let expected = gamma_eff(r, k)?;

    let schedule = compile(u, k)?;
    let channel = schedule_channel(&schedule, r)?;
    let factor = factorize_loss(&channel)?;
    let (unitary_deviation, _) = phase_aligned_distance(&factor.unitary, u);

    let fock = postselected_distribution(u, input, expected)?;
    let gaussian = lossless_distribution(&factor.unitary, input)?;
    Ok(EndToEndReport {
        m,
        n,
        k,
        r,
        gamma_eff: expected,
        channel_efficiency: factor.efficiency,
        efficiency_deviation: (factor.efficiency - expected).abs(),
        unitary_deviation,
        factorization_deviation: factor.deviation,
        distribution_deviation: fock.max_deviation(&gaussian),
        success_mass_deviation: (fock.success_mass() - factor.efficiency.powi(n as i32)).abs(),
    })
}
