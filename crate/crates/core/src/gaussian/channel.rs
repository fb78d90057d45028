use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, min_eigenvalue_hermitian, omega, symmetrize, RMatrix};

use super::ops::SymplecticOp;
use super::state::{uncertainty_floor, GaussianState};

/// Held-out tolerance for accepting a probed procedure as affine.
pub const AFFINE_TOLERANCE: f64 = 1e-9;

/// Gaussian channel `cov -> X cov X^T + Y`, `mean -> X mean + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianChannel {
    x: RMatrix,
    y: RMatrix,
    d: DVector<f64>,
}

impl GaussianChannel {
    /// Checks dimensions and complete positivity,
    /// `Y + (i/2)(Omega - X Omega X^T) >= 0`.
    pub fn new(x: RMatrix, y: RMatrix, d: DVector<f64>) -> Result<Self> {
        let dim = x.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || x.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.max(2),
                found: x.ncols(),
            });
        }
        if y.nrows() != dim || y.ncols() != dim || d.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: y.nrows().min(d.len()),
            });
        }
        let channel = Self {
            x,
            y: symmetrize(&y),
            d,
        };
        let min = channel.complete_positivity_margin();
        if !(min >= uncertainty_floor(&channel.y)) {
            return Err(Error::NotCompletelyPositive(min));
        }
        Ok(channel)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            x: RMatrix::identity(2 * n_modes, 2 * n_modes),
            y: RMatrix::zeros(2 * n_modes, 2 * n_modes),
            d: DVector::zeros(2 * n_modes),
        }
    }

    /// The same pure-loss channel of efficiency `eta` on every mode.
    pub fn uniform_loss(n_modes: usize, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidEfficiency(eta));
        }
        let dim = 2 * n_modes;
        Ok(Self {
            x: RMatrix::identity(dim, dim) * eta.sqrt(),
            y: RMatrix::identity(dim, dim) * ((1.0 - eta) / 2.0),
            d: DVector::zeros(dim),
        })
    }

    pub fn from_symplectic(op: &SymplecticOp) -> Self {
        let dim = op.matrix().nrows();
        Self {
            x: op.matrix().clone(),
            y: RMatrix::zeros(dim, dim),
            d: op.displacement_vector().clone(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.x.nrows() / 2
    }

    pub fn x(&self) -> &RMatrix {
        &self.x
    }

    pub fn y(&self) -> &RMatrix {
        &self.y
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn complete_positivity_margin(&self) -> f64 {
        let w = omega(self.n_modes());
        let b = (&w - &self.x * &w * self.x.transpose()) * 0.5;
        min_eigenvalue_hermitian(&self.y, &b)
    }

    /// `next` applied after `self`.
    pub fn then(&self, next: &GaussianChannel) -> Result<Self> {
        if next.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: next.n_modes(),
            });
        }
        Ok(Self {
            x: &next.x * &self.x,
            y: symmetrize(&(&next.x * &self.y * next.x.transpose() + &next.y)),
            d: &next.x * &self.d + &next.d,
        })
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: state.n_modes(),
            });
        }
        let mean = &self.x * state.mean() + &self.d;
        let cov = &self.x * state.cov() * self.x.transpose() + &self.y;
        Ok(GaussianState::from_parts(mean, cov))
    }

    /// Lifts a channel on `modes.len()` modes into `n_total` modes, acting as
    /// the identity elsewhere. `modes[i]` receives local mode `i`.
    pub fn embed(&self, n_total: usize, modes: &[usize]) -> Result<Self> {
        let local = self.n_modes();
        if modes.len() != local {
            return Err(Error::DimensionMismatch {
                expected: local,
                found: modes.len(),
            });
        }
        for (i, &m) in modes.iter().enumerate() {
            if m >= n_total {
                return Err(Error::ModeOutOfRange {
                    index: m,
                    n_modes: n_total,
                });
            }
            if modes[..i].contains(&m) {
                return Err(Error::SameMode(m));
            }
        }
        let map: Vec<usize> = modes
            .iter()
            .copied()
            .chain(modes.iter().map(|m| n_total + m))
            .collect();
        let mut out = Self::identity(n_total);
        for &g in &map {
            out.x[(g, g)] = 0.0;
        }
        for (i, &gi) in map.iter().enumerate() {
            out.d[gi] = self.d[i];
            for (j, &gj) in map.iter().enumerate() {
                out.x[(gi, gj)] = self.x[(i, j)];
                out.y[(gi, gj)] = self.y[(i, j)];
            }
        }
        Ok(out)
    }

    /// Restriction to `modes`; only meaningful when the channel does not
    /// couple them to the rest.
    pub fn restrict(&self, modes: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        for &m in modes {
            if m >= n {
                return Err(Error::ModeOutOfRange {
                    index: m,
                    n_modes: n,
                });
            }
        }
        let idx: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|m| n + m)).collect();
        let k = idx.len();
        Ok(Self {
            x: RMatrix::from_fn(k, k, |i, j| self.x[(idx[i], idx[j])]),
            y: RMatrix::from_fn(k, k, |i, j| self.y[(idx[i], idx[j])]),
            d: DVector::from_fn(k, |i, _| self.d[idx[i]]),
        })
    }

    /// Largest of the Frobenius distances between the `X`, `Y` and `d` parts.
    pub fn distance(&self, other: &GaussianChannel) -> f64 {
        if self.n_modes() != other.n_modes() {
            return f64::INFINITY;
        }
        (&self.x - &other.x)
            .norm()
            .max((&self.y - &other.y).norm())
            .max((&self.d - &other.d).norm())
    }
}

/// Recovers `(X, Y, d)` of a Gaussian procedure on `n_modes` modes.
///
/// `d` and the columns of `X` come from `2N + 1` displaced-vacuum probes, `Y`
/// from the vacuum covariance probe. A correlated, displaced, squeezed
/// held-out probe must then be reproduced to [`AFFINE_TOLERANCE`].
pub fn extract_channel<F>(n_modes: usize, procedure: F) -> Result<GaussianChannel>
where
    F: Fn(&GaussianState) -> Result<GaussianState>,
{
    let dim = 2 * n_modes;
    let vacuum = GaussianState::vacuum(n_modes)?;
    let run = |probe: &GaussianState| -> Result<GaussianState> {
        let out = procedure(probe)?;
        if out.n_modes() != n_modes {
            return Err(Error::DimensionMismatch {
                expected: n_modes,
                found: out.n_modes(),
            });
        }
        Ok(out)
    };

    let base = run(&vacuum)?;
    let d = base.mean().clone();
    let mut x = RMatrix::zeros(dim, dim);
    let mut drift = 0.0f64;
    for i in 0..dim {
        let mut mean = DVector::zeros(dim);
        mean[i] = 1.0;
        let probe = GaussianState::from_parts(mean, vacuum.cov().clone());
        let out = run(&probe)?;
        x.set_column(i, &(out.mean() - &d));
        drift = drift.max((out.cov() - base.cov()).norm());
    }
    let y = base.cov() - &x * vacuum.cov() * x.transpose();

    let held_out = held_out_probe(n_modes)?;
    let predicted_mean = &x * held_out.mean() + &d;
    let predicted_cov = &x * held_out.cov() * x.transpose() + &y;
    let actual = run(&held_out)?;
    let scale = 1.0f64.max(actual.cov().norm());
    let deviation = drift
        .max((actual.mean() - predicted_mean).norm())
        .max((actual.cov() - predicted_cov).norm())
        / scale;
    if !(deviation <= AFFINE_TOLERANCE) {
        return Err(Error::NotAffine(deviation));
    }
    GaussianChannel::new(x, y, d)
}

/// Deterministic correlated probe: squeezed thermal modes through a fixed
/// Haar-random interferometer, then displaced.
fn held_out_probe(n_modes: usize) -> Result<GaussianState> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d62_6c6f);
    let dim = 2 * n_modes;
    let mut diag = DVector::zeros(dim);
    for i in 0..n_modes {
        let nu = 0.5 + 0.15 * i as f64;
        let s = (0.35 + 0.1 * i as f64).exp();
        diag[i] = nu * s;
        diag[n_modes + i] = nu / s;
    }
    let cov = RMatrix::from_diagonal(&diag);
    let mean = DVector::from_fn(dim, |i, _| 0.4 * (1.3 * i as f64 + 0.2).sin());
    let u = haar_unitary(n_modes, &mut rng);
    let thermal = GaussianState::from_parts(mean, cov);
    thermal.apply(&SymplecticOp::passive(&u)?)
}
