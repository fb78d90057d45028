//! Noisy evaluation of a schedule with finitely squeezed resource states.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{macronode_channel, GaussianChannel, SymplecticOp};
use crate::linalg::{unitary_from_symplectic, CMatrix};

use super::schedule::{MacronodeSchedule, RowWires};

/// Composes one outcome-averaged macronode channel per non-output
/// macronode, in measurement order, with gain `g = tanh r`.
pub fn schedule_channel(schedule: &MacronodeSchedule, r: f64) -> Result<GaussianChannel> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidSqueezing(r));
    }
    let m = schedule.m();
    if r == 0.0 {
        // zero gain: every teleporter discards its input
        return GaussianChannel::uniform_loss(m, 0.0);
    }
    let g = r.tanh();
    let mut cache: HashMap<(u64, u64), GaussianChannel> = HashMap::new();
    let mut total = GaussianChannel::identity(m);
    for spec in schedule.measurement_order() {
        let (theta, phi) = spec.kind.parameters();
        let key = (theta.to_bits(), phi.to_bits());
        let local = match cache.entry(key) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(macronode_channel(theta, phi, r, g)?),
        };
        let embedded = match schedule.row_wires(spec.row) {
            RowWires::Pair(a, b) => local.embed(m, &[a, b])?,
            RowWires::Lone { wire, slot } => local.restrict(&[slot])?.embed(m, &[wire])?,
        };
        total = total.then(&embedded)?;
    }
    Ok(total)
}

/// A channel written as uniform loss followed by a passive interferometer.
#[derive(Clone, Debug, Serialize)]
pub struct LossFactorization {
    /// Per-mode efficiency `tr(X X^T) / 2m`.
    pub efficiency: f64,
    #[serde(skip)]
    pub unitary: CMatrix,
    /// Largest Frobenius difference between the channel and
    /// `uniform_loss(efficiency)` followed by `unitary`.
    pub deviation: f64,
}

/// Reads off the efficiency and interferometer of a lossy passive channel.
pub fn factorize_loss(channel: &GaussianChannel) -> Result<LossFactorization> {
    let m = channel.n_modes();
    let x = channel.x();
    let efficiency = (x * x.transpose()).trace() / (2 * m) as f64;
    if !(efficiency > 0.0) {
        return Err(Error::InvalidEfficiency(efficiency));
    }
    let unitary = unitary_from_symplectic(&(x / efficiency.sqrt()));
    let reference = GaussianChannel::uniform_loss(m, efficiency.min(1.0))?
        .then(&GaussianChannel::from_symplectic(&SymplecticOp::passive(&unitary)?))?;
    Ok(LossFactorization {
        efficiency,
        deviation: channel.distance(&reference),
        unitary,
    })
}
