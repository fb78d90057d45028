use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

use super::ops::SymplecticOp;
use super::state::GaussianState;

/// Variances below this are treated as zero when conditioning.
pub const PSEUDOINVERSE_CUTOFF: f64 = 1e-12;

/// Mean and variance of the quadrature `x cos(angle) + p sin(angle)` of `mode`.
pub fn quadrature_marginal(state: &GaussianState, mode: usize, angle: f64) -> Result<(f64, f64)> {
    let rotated = rotate_into_x(state, mode, angle)?;
    Ok((rotated.mean()[mode], rotated.cov()[(mode, mode)]))
}

/// Homodyne detection of `x cos(angle) + p sin(angle)` on `mode` with the
/// outcome drawn from its exact Gaussian marginal. The measured mode is
/// removed; the remaining modes keep their relative order.
pub fn homodyne<R: Rng + ?Sized>(
    state: &GaussianState,
    mode: usize,
    angle: f64,
    rng: &mut R,
) -> Result<(f64, GaussianState)> {
    let (mean, var) = quadrature_marginal(state, mode, angle)?;
    let z: f64 = rng.sample(StandardNormal);
    let outcome = mean + var.max(0.0).sqrt() * z;
    let post = homodyne_fixed(state, mode, angle, outcome)?;
    Ok((outcome, post))
}

/// Homodyne detection post-selected on a given outcome.
pub fn homodyne_fixed(
    state: &GaussianState,
    mode: usize,
    angle: f64,
    outcome: f64,
) -> Result<GaussianState> {
    let (mean, cov) = condition_on_x(state, mode, angle, outcome)?;
    Ok(GaussianState::from_parts(mean, cov))
}

pub(crate) fn condition_on_x(
    state: &GaussianState,
    mode: usize,
    angle: f64,
    outcome: f64,
) -> Result<(DVector<f64>, RMatrix)> {
    if state.n_modes() < 2 {
        // nothing left to condition
        return Err(Error::NoModes);
    }
    let rotated = rotate_into_x(state, mode, angle)?;
    let n = rotated.n_modes();
    let measured = mode;
    let rest: Vec<usize> = (0..n)
        .filter(|&m| m != mode)
        .map(|m| rotated.x_index(m))
        .chain((0..n).filter(|&m| m != mode).map(|m| rotated.p_index(m)))
        .collect();

    let mu = rotated.mean();
    let sigma = rotated.cov();
    let var = sigma[(measured, measured)];
    let inv = if var > PSEUDOINVERSE_CUTOFF { 1.0 / var } else { 0.0 };
    let shift = outcome - mu[measured];

    let dim = rest.len();
    let mean = DVector::from_fn(dim, |i, _| mu[rest[i]] + sigma[(rest[i], measured)] * inv * shift);
    let cov = RMatrix::from_fn(dim, dim, |i, j| {
        sigma[(rest[i], rest[j])] - sigma[(rest[i], measured)] * inv * sigma[(measured, rest[j])]
    });
    Ok((mean, cov))
}

fn rotate_into_x(state: &GaussianState, mode: usize, angle: f64) -> Result<GaussianState> {
    state.check_mode(mode)?;
    if angle == 0.0 {
        return Ok(state.clone());
    }
    // R(-angle) maps x cos(angle) + p sin(angle) onto x
    state.apply(&SymplecticOp::phase_delay(mode, -angle, state.n_modes())?)
}
