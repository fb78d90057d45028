//! Gain-tuned continuous-variable teleportation.
//!
//! The input mode is mixed with the near arm of a two-mode squeezed pair on
//! a balanced beamsplitter; `x` is measured on the input port and `p` on the
//! near-arm port, and the far arm is displaced by `D(g alpha)` with
//! `alpha = m_x + i m_p`. For `g = 1` the output picks up `e^{-2r}` of added
//! noise per quadrature; for `g = tanh r` it is a pure-loss channel with
//! efficiency `tanh^2 r`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

use super::measure::{homodyne, homodyne_fixed};
use super::ops::SymplecticOp;
use super::state::{check_squeezing, GaussianState};

/// Outcomes and feed-forward of one teleporter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportationRecord {
    /// `x` outcome on the input port.
    pub input_outcome: f64,
    /// `p` outcome on the resource port.
    pub resource_outcome: f64,
    pub gain: f64,
    /// `alpha = i * resource_outcome + input_outcome`.
    pub alpha: Complex64,
    /// Amplitude of the displacement applied to the output, `gain * alpha`.
    pub applied: Complex64,
}

impl TeleportationRecord {
    fn new(input_outcome: f64, resource_outcome: f64, gain: f64) -> Self {
        let alpha = Complex64::new(input_outcome, resource_outcome);
        Self {
            input_outcome,
            resource_outcome,
            gain,
            alpha,
            applied: alpha * gain,
        }
    }

    pub fn outcomes(&self) -> [f64; 2] {
        [self.input_outcome, self.resource_outcome]
    }
}

fn check_gain(g: f64) -> Result<()> {
    if g.is_finite() && g > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGain(g))
    }
}

/// Appends the resource pair and mixes the input with its near arm.
/// Returns the joint state; the near arm is mode `n` and the far arm `n + 1`.
fn prepare(state: &GaussianState, input_mode: usize, r: f64, g: f64) -> Result<GaussianState> {
    state.check_mode(input_mode)?;
    check_squeezing(r)?;
    check_gain(g)?;
    let n = state.n_modes();
    let joint = state.tensor(&GaussianState::two_mode_squeezed(r)?);
    joint.apply(&SymplecticOp::beamsplitter(input_mode, n, FRAC_PI_4, n + 2)?)
}

/// Mode order that puts the far arm (currently last) into the input slot.
fn output_order(n_modes: usize, input_mode: usize) -> Vec<usize> {
    let far = n_modes - 1;
    (0..n_modes)
        .map(|slot| match slot.cmp(&input_mode) {
            std::cmp::Ordering::Less => slot,
            std::cmp::Ordering::Equal => far,
            std::cmp::Ordering::Greater => slot - 1,
        })
        .collect()
}

fn finish(
    prepared: &GaussianState,
    input_mode: usize,
    n: usize,
    g: f64,
    outcomes: [f64; 2],
) -> Result<(GaussianState, TeleportationRecord)> {
    // x on the input port, then p on the near arm (now at index n - 1)
    let after_x = homodyne_fixed(prepared, input_mode, 0.0, outcomes[0])?;
    let after_p = homodyne_fixed(&after_x, n - 1, FRAC_PI_2, outcomes[1])?;
    let record = TeleportationRecord::new(outcomes[0], outcomes[1], g);
    let corrected = after_p.apply(&SymplecticOp::displacement(n - 1, record.applied, n)?)?;
    let out = corrected.select_modes(&output_order(n, input_mode))?;
    Ok((out, record))
}

/// One teleportation shot with outcomes sampled from `rng`.
pub fn teleport<R: Rng + ?Sized>(
    state: &GaussianState,
    input_mode: usize,
    r: f64,
    g: f64,
    rng: &mut R,
) -> Result<(GaussianState, TeleportationRecord)> {
    let n = state.n_modes();
    let prepared = prepare(state, input_mode, r, g)?;
    let (m_x, after_x) = homodyne(&prepared, input_mode, 0.0, rng)?;
    let (m_p, _) = homodyne(&after_x, n - 1, FRAC_PI_2, rng)?;
    finish(&prepared, input_mode, n, g, [m_x, m_p])
}

/// One teleportation shot conditioned on the given `(m_x, m_p)` outcomes.
pub fn teleport_with_outcomes(
    state: &GaussianState,
    input_mode: usize,
    r: f64,
    g: f64,
    outcomes: [f64; 2],
) -> Result<(GaussianState, TeleportationRecord)> {
    let n = state.n_modes();
    let prepared = prepare(state, input_mode, r, g)?;
    finish(&prepared, input_mode, n, g, outcomes)
}

/// Output of the teleporter averaged over its measurement record.
///
/// Averaging the corrected conditional states is the same as pushing the
/// joint moments through `x_far += sqrt(2) g x_in`, `p_far += sqrt(2) g p_near`
/// and discarding the two measured modes.
pub fn teleport_averaged(
    state: &GaussianState,
    input_mode: usize,
    r: f64,
    g: f64,
) -> Result<GaussianState> {
    state.check_mode(input_mode)?;
    check_squeezing(r)?;
    check_gain(g)?;
    let n = state.n_modes();
    let total = n + 2;
    let (near, far) = (n, n + 1);
    let mut feed = RMatrix::identity(2 * total, 2 * total);
    feed[(far, input_mode)] += 2f64.sqrt() * g;
    feed[(total + far, total + near)] += 2f64.sqrt() * g;
    let map = feed * SymplecticOp::beamsplitter(input_mode, near, FRAC_PI_4, total)?.matrix();

    let keep: Vec<usize> = (0..n)
        .map(|slot| if slot == input_mode { far } else { slot })
        .collect();
    let rows: Vec<usize> = keep.iter().copied().chain(keep.iter().map(|m| total + m)).collect();
    let inputs: Vec<usize> = (0..n).chain(total..total + n).collect();
    let resource = [near, far, total + near, total + far];
    let on_input = RMatrix::from_fn(2 * n, 2 * n, |i, j| map[(rows[i], inputs[j])]);
    let on_resource = RMatrix::from_fn(2 * n, 4, |i, j| map[(rows[i], resource[j])]);

    // The resource enters through a square root of its covariance, so the
    // e^{2r} terms cancel at the level of e^{r} and large r stays accurate.
    let root = &on_resource * two_mode_squeezed_root(r);
    let mean = &on_input * state.mean();
    let cov = &on_input * state.cov() * on_input.transpose() + &root * root.transpose();
    Ok(GaussianState::from_parts(mean, cov))
}

/// `F` with `F F^T` the two-mode squeezed covariance.
fn two_mode_squeezed_root(r: f64) -> RMatrix {
    let (big, small) = ((r).exp() / 2.0, (-r).exp() / 2.0);
    #[rustfmt::skip]
    let f = RMatrix::from_row_slice(4, 4, &[
        big, small,  0.0,   0.0,
        big, -small, 0.0,   0.0,
        0.0, 0.0,    small, big,
        0.0, 0.0,    small, -big,
    ]);
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::measure::quadrature_marginal;
    use nalgebra::DVector;

    #[test]
    fn squeezed_root_factorises_covariance() {
        let r = 0.9;
        let f = two_mode_squeezed_root(r);
        let tmss = GaussianState::two_mode_squeezed(r).unwrap();
        assert!((&f * f.transpose() - tmss.cov()).norm() < 1e-14);
    }
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn probe_state() -> GaussianState {
        let sq = RMatrix::from_diagonal(&DVector::from_vec(vec![0.2, 0.5, 1.25, 0.5]));
        let base = GaussianState::new(DVector::from_vec(vec![0.3, -0.7, 1.1, 0.2]), sq).unwrap();
        base.apply(&SymplecticOp::beamsplitter(0, 1, 0.4, 2).unwrap())
            .unwrap()
    }

    #[test]
    fn output_order_places_far_arm() {
        assert_eq!(output_order(3, 0), vec![2, 0, 1]);
        assert_eq!(output_order(3, 1), vec![0, 2, 1]);
        assert_eq!(output_order(3, 2), vec![0, 1, 2]);
    }

    #[test]
    fn record_displacement_is_gain_times_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (_, rec) = teleport(&probe_state(), 1, 0.7, 0.6, &mut rng).unwrap();
        assert_eq!(rec.alpha, Complex64::new(rec.input_outcome, rec.resource_outcome));
        assert!((rec.applied - rec.alpha * 0.6).norm() <= 1e-12);
    }

    #[test]
    fn ideal_limit_reproduces_input() {
        let input = probe_state();
        let out = teleport_averaged(&input, 0, 10.0, 1.0).unwrap();
        assert!((out.cov() - input.cov()).norm() < 1e-7);
        assert!((out.mean() - input.mean()).norm() < 1e-12);
    }

    #[test]
    fn unit_gain_adds_noise() {
        let input = probe_state();
        let r = 0.65;
        let out = teleport_averaged(&input, 1, r, 1.0).unwrap();
        let mut expected = input.cov().clone();
        expected[(1, 1)] += (-2.0 * r).exp();
        expected[(3, 3)] += (-2.0 * r).exp();
        assert!((out.cov() - expected).norm() < 1e-12);
    }

    #[test]
    fn averaged_matches_shot_ensemble() {
        // Ensemble of corrected conditional states: fixed conditional
        // covariance plus the spread of the outcome-dependent means.
        let input = probe_state();
        let (r, g) = (0.8, 0.5);
        let shot = |m: [f64; 2]| teleport_with_outcomes(&input, 0, r, g, m).unwrap().0;
        let base = shot([0.0, 0.0]);
        let jx = shot([1.0, 0.0]).mean() - base.mean();
        let jp = shot([0.0, 1.0]).mean() - base.mean();

        let prepared = prepare(&input, 0, r, g).unwrap();
        let (mx, vx) = quadrature_marginal(&prepared, 0, 0.0).unwrap();
        let (mp, vp) = quadrature_marginal(&prepared, 2, FRAC_PI_2).unwrap();
        let cxp = {
            // x_in and p_near are independent only if this vanishes
            let n = prepared.n_modes();
            prepared.cov()[(0, n + 2)]
        };
        let mut ensemble_cov = base.cov().clone();
        ensemble_cov += &jx * jx.transpose() * vx;
        ensemble_cov += &jp * jp.transpose() * vp;
        ensemble_cov += (&jx * jp.transpose() + &jp * jx.transpose()) * cxp;
        let ensemble_mean = base.mean() + &jx * mx + &jp * mp;

        let averaged = teleport_averaged(&input, 0, r, g).unwrap();
        assert!((averaged.cov() - ensemble_cov).norm() < 1e-12);
        assert!((averaged.mean() - ensemble_mean).norm() < 1e-12);
    }

    #[test]
    fn sampled_shots_average_to_channel() {
        let input = probe_state();
        let (r, g) = (0.9, 0.9f64.tanh());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shots = 4000;
        let mut acc = DVector::zeros(4);
        for _ in 0..shots {
            acc += teleport(&input, 0, r, g, &mut rng).unwrap().0.mean();
        }
        acc /= f64::from(shots);
        let averaged = teleport_averaged(&input, 0, r, g).unwrap();
        assert!((acc - averaged.mean()).amax() < 0.05);
    }

    #[test]
    fn invalid_parameters() {
        let v = GaussianState::vacuum(1).unwrap();
        assert!(matches!(teleport_averaged(&v, 0, -1.0, 1.0), Err(Error::InvalidSqueezing(_))));
        assert!(matches!(teleport_averaged(&v, 0, 1.0, 0.0), Err(Error::InvalidGain(_))));
        assert!(teleport_averaged(&v, 1, 1.0, 1.0).is_err());
    }
}
