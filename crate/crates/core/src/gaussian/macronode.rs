//! One macronode measurement as an interferometer with teleporters in its
//! arms: `B(pi/4)`, a gain-tuned teleporter per arm, arm rotations, then
//! `B^dagger(pi/4)`.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;

use crate::compiler::gate::arm_phases;
use crate::error::{Error, Result};

use super::channel::{extract_channel, GaussianChannel};
use super::ops::SymplecticOp;
use super::state::GaussianState;
use super::teleport::{teleport, teleport_averaged, TeleportationRecord};

fn check_pair(state: &GaussianState, modes: (usize, usize)) -> Result<()> {
    state.check_mode(modes.0)?;
    state.check_mode(modes.1)?;
    if modes.0 == modes.1 {
        return Err(Error::SameMode(modes.0));
    }
    Ok(())
}

fn mix(state: &GaussianState, modes: (usize, usize), inverse: bool) -> Result<GaussianState> {
    let angle = if inverse { -FRAC_PI_4 } else { FRAC_PI_4 };
    state.apply(&SymplecticOp::beamsplitter(modes.0, modes.1, angle, state.n_modes())?)
}

fn rotate_arms(state: &GaussianState, modes: (usize, usize), theta: f64, phi: f64) -> Result<GaussianState> {
    let n = state.n_modes();
    let (upper, lower) = arm_phases(theta, phi);
    state
        .apply(&SymplecticOp::phase_delay(modes.0, upper, n)?)?
        .apply(&SymplecticOp::phase_delay(modes.1, lower, n)?)
}

/// Outcome-averaged macronode acting on `modes` of `state`.
pub fn macronode_circuit(
    state: &GaussianState,
    modes: (usize, usize),
    theta: f64,
    phi: f64,
    r: f64,
    g: f64,
) -> Result<GaussianState> {
    check_pair(state, modes)?;
    let s = mix(state, modes, false)?;
    let s = teleport_averaged(&s, modes.0, r, g)?;
    let s = teleport_averaged(&s, modes.1, r, g)?;
    let s = rotate_arms(&s, modes, theta, phi)?;
    mix(&s, modes, true)
}

/// A single macronode shot with sampled homodyne outcomes and per-teleporter
/// displacement corrections.
pub fn macronode_shot<R: Rng + ?Sized>(
    state: &GaussianState,
    modes: (usize, usize),
    theta: f64,
    phi: f64,
    r: f64,
    g: f64,
    rng: &mut R,
) -> Result<(GaussianState, [TeleportationRecord; 2])> {
    check_pair(state, modes)?;
    let s = mix(state, modes, false)?;
    let (s, first) = teleport(&s, modes.0, r, g, rng)?;
    let (s, second) = teleport(&s, modes.1, r, g, rng)?;
    let s = rotate_arms(&s, modes, theta, phi)?;
    Ok((mix(&s, modes, true)?, [first, second]))
}

/// Two-mode channel of one macronode programmed with `V(theta, phi)`.
///
/// The returned channel is the outcome average; with zero-mean feed-forward
/// its `d` vanishes.
pub fn macronode_channel(theta: f64, phi: f64, r: f64, g: f64) -> Result<GaussianChannel> {
    extract_channel(2, |s| macronode_circuit(s, (0, 1), theta, phi, r, g))
}
