use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue_hermitian, omega, symmetrize, RMatrix};

use super::ops::SymplecticOp;

/// Eigenvalue floor for `cov + (i/2) Omega`, for covariances of order one.
pub const UNCERTAINTY_TOLERANCE: f64 = -1e-9;

/// [`UNCERTAINTY_TOLERANCE`] scaled by the covariance magnitude, so that
/// rounding in strongly squeezed states is not mistaken for a violation.
pub fn uncertainty_floor(cov: &RMatrix) -> f64 {
    UNCERTAINTY_TOLERANCE * cov.amax().max(1.0)
}

/// First and second moments of an `n_modes` Gaussian state.
///
/// Quadratures are blocked as `(x_1..x_N, p_1..p_N)` with `hbar = 1`, so the
/// vacuum has covariance `I / 2` and `x = (a + a^dagger) / sqrt(2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: RMatrix,
}

impl GaussianState {
    /// Validating constructor for caller-supplied moments.
    pub fn new(mean: DVector<f64>, cov: RMatrix) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 {
            return Err(Error::NoModes);
        }
        if !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: dim,
            });
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cov.nrows(),
            });
        }
        let state = Self {
            mean,
            cov: symmetrize(&cov),
        };
        let min = state.min_uncertainty_eigenvalue();
        if min < uncertainty_floor(&state.cov) || !min.is_finite() {
            return Err(Error::Unphysical(min));
        }
        Ok(state)
    }

    /// Moments produced by a physical operation; only symmetrized. Strong
    /// squeezing makes the uncertainty check meaningless at double precision
    /// after cancellations, so it is left to callers and tests.
    pub(crate) fn from_parts(mean: DVector<f64>, cov: RMatrix) -> Self {
        Self {
            mean,
            cov: symmetrize(&cov),
        }
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::NoModes);
        }
        Ok(Self {
            mean: DVector::zeros(2 * n_modes),
            cov: RMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        })
    }

    /// Two-mode squeezed vacuum with correlated `x` and anticorrelated `p`:
    /// `Var(x_1 - x_2) = Var(p_1 + p_2) = e^{-2r}`.
    pub fn two_mode_squeezed(r: f64) -> Result<Self> {
        check_squeezing(r)?;
        let c = (2.0 * r).cosh() / 2.0;
        let s = (2.0 * r).sinh() / 2.0;
        #[rustfmt::skip]
        let cov = RMatrix::from_row_slice(4, 4, &[
            c,   s,   0.0, 0.0,
            s,   c,   0.0, 0.0,
            0.0, 0.0, c,   -s,
            0.0, 0.0, -s,  c,
        ]);
        Ok(Self {
            mean: DVector::zeros(4),
            cov,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &RMatrix {
        &self.cov
    }

    pub fn into_parts(self) -> (DVector<f64>, RMatrix) {
        (self.mean, self.cov)
    }

    pub(crate) fn x_index(&self, mode: usize) -> usize {
        mode
    }

    pub(crate) fn p_index(&self, mode: usize) -> usize {
        self.n_modes() + mode
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                index: mode,
                n_modes: self.n_modes(),
            })
        }
    }

    /// Smallest eigenvalue of `cov + (i/2) Omega`; non-negative for states.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let w = omega(self.n_modes()) * 0.5;
        min_eigenvalue_hermitian(&self.cov, &w)
    }

    pub fn is_physical(&self) -> bool {
        self.min_uncertainty_eigenvalue() >= uncertainty_floor(&self.cov)
    }

    /// `cov -> S cov S^T`, `mean -> S mean + d`.
    pub fn apply(&self, op: &SymplecticOp) -> Result<Self> {
        let dim = self.mean.len();
        if op.matrix().nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.matrix().nrows(),
            });
        }
        let s = op.matrix();
        let mean = s * &self.mean + op.displacement_vector();
        let cov = s * &self.cov * s.transpose();
        Ok(Self::from_parts(mean, cov))
    }

    /// Direct sum: the modes of `other` are appended after the modes of `self`.
    pub fn tensor(&self, other: &GaussianState) -> Self {
        let (na, nb) = (self.n_modes(), other.n_modes());
        let n = na + nb;
        let a_idx: Vec<usize> = (0..na).chain(n..n + na).collect();
        let b_idx: Vec<usize> = (na..n).chain(n + na..2 * n).collect();
        let mut mean = DVector::zeros(2 * n);
        let mut cov = RMatrix::zeros(2 * n, 2 * n);
        for (src, &dst) in a_idx.iter().enumerate() {
            mean[dst] = self.mean[src];
            for (src2, &dst2) in a_idx.iter().enumerate() {
                cov[(dst, dst2)] = self.cov[(src, src2)];
            }
        }
        for (src, &dst) in b_idx.iter().enumerate() {
            mean[dst] = other.mean[src];
            for (src2, &dst2) in b_idx.iter().enumerate() {
                cov[(dst, dst2)] = other.cov[(src, src2)];
            }
        }
        Self { mean, cov }
    }

    /// Marginal over `modes`, in the given order.
    pub fn select_modes(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::NoModes);
        }
        for &m in modes {
            self.check_mode(m)?;
        }
        let idx: Vec<usize> = modes
            .iter()
            .map(|&m| self.x_index(m))
            .chain(modes.iter().map(|&m| self.p_index(m)))
            .collect();
        let mean = DVector::from_fn(idx.len(), |i, _| self.mean[idx[i]]);
        let cov = RMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(Self { mean, cov })
    }

    /// Pure loss of efficiency `eta` on `mode`: a beamsplitter with
    /// transmissivity `eta` against a vacuum ancilla that is then traced out.
    pub fn apply_loss(&self, mode: usize, eta: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidEfficiency(eta));
        }
        let n = self.n_modes();
        let extended = self.tensor(&GaussianState::vacuum(1)?);
        let angle = eta.sqrt().acos();
        let bs = SymplecticOp::beamsplitter(mode, n, angle, n + 1)?;
        let mixed = extended.apply(&bs)?;
        mixed.select_modes(&(0..n).collect::<Vec<_>>())
    }

    /// [`GaussianState::apply_loss`] on every mode.
    pub fn apply_uniform_loss(&self, eta: f64) -> Result<Self> {
        (0..self.n_modes()).try_fold(self.clone(), |s, m| s.apply_loss(m, eta))
    }
}

pub(crate) fn check_squeezing(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSqueezing(r))
    }
}

/// Free-function form of [`GaussianState::apply`].
pub fn apply_symplectic(state: &GaussianState, op: &SymplecticOp) -> Result<GaussianState> {
    state.apply(op)
}

/// Free-function form of [`GaussianState::apply_loss`].
pub fn apply_loss(state: &GaussianState, mode: usize, eta: f64) -> Result<GaussianState> {
    state.apply_loss(mode, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn vacuum_moments() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.mean().as_slice(), &[0.0, 0.0]);
        assert_eq!(v.cov(), &(RMatrix::identity(2, 2) * 0.5));
        let v3 = GaussianState::vacuum(3).unwrap();
        assert_eq!(v3.cov(), &(RMatrix::identity(6, 6) * 0.5));
        assert!(matches!(GaussianState::vacuum(0), Err(Error::NoModes)));
    }

    #[test]
    fn tmss_moments() {
        assert_eq!(
            GaussianState::two_mode_squeezed(0.0).unwrap(),
            GaussianState::vacuum(2).unwrap()
        );
        let s = GaussianState::two_mode_squeezed(1.0).unwrap();
        let c = s.cov();
        assert!(close(c[(0, 0)], 1.881_097_845_541_815_7, 1e-12));
        let var_diff = c[(0, 0)] + c[(1, 1)] - 2.0 * c[(0, 1)];
        assert!(close(var_diff, 0.135_335_283_236_612_7, 1e-12));
        let var_psum = c[(2, 2)] + c[(3, 3)] + 2.0 * c[(2, 3)];
        assert!(close(var_psum, 0.135_335_283_236_612_7, 1e-12));
        assert!(s.is_physical());
        assert!(GaussianState::two_mode_squeezed(-0.1).is_err());
    }

    #[test]
    fn tensor_then_select_round_trips() {
        let a = GaussianState::two_mode_squeezed(0.4).unwrap();
        let b = GaussianState::vacuum(1)
            .unwrap()
            .apply(&SymplecticOp::displacement(0, Complex64::new(0.3, -0.2), 1).unwrap())
            .unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.n_modes(), 3);
        assert_eq!(ab.select_modes(&[0, 1]).unwrap(), a);
        assert_eq!(ab.select_modes(&[2]).unwrap(), b);
        let swapped = ab.select_modes(&[1, 0]).unwrap();
        assert_eq!(swapped.cov()[(0, 1)], a.cov()[(1, 0)]);
        assert_eq!(swapped.cov()[(2, 3)], a.cov()[(3, 2)]);
    }

    #[test]
    fn loss_limits() {
        let coherent = GaussianState::vacuum(1)
            .unwrap()
            .apply(&SymplecticOp::displacement(0, Complex64::new(1.0, 0.0), 1).unwrap())
            .unwrap();
        assert_eq!(coherent.apply_loss(0, 1.0).unwrap().mean(), coherent.mean());
        let gone = coherent.apply_loss(0, 0.0).unwrap();
        assert!(gone.mean().norm() < 1e-15);
        assert!((gone.cov() - RMatrix::identity(2, 2) * 0.5).norm() < 1e-15);
        let partial = coherent.apply_loss(0, 0.58).unwrap();
        assert!(close(partial.mean()[0], (2.0f64 * 0.58).sqrt(), 1e-12));
        assert!(matches!(
            coherent.apply_loss(0, 1.2),
            Err(Error::InvalidEfficiency(_))
        ));
        assert!(coherent.apply_loss(1, 0.5).is_err());
    }

    #[test]
    fn loss_matches_closed_form() {
        let s = GaussianState::two_mode_squeezed(0.9).unwrap();
        let eta = 0.37;
        let lossy = s.apply_loss(1, eta).unwrap();
        let mut expected = s.cov().clone();
        for &i in &[1usize, 3] {
            for j in 0..4 {
                if j == 1 || j == 3 {
                    continue;
                }
                expected[(i, j)] *= eta.sqrt();
                expected[(j, i)] *= eta.sqrt();
            }
        }
        for &(i, j) in &[(1usize, 1usize), (3, 3), (1, 3), (3, 1)] {
            expected[(i, j)] = eta * s.cov()[(i, j)] + if i == j { (1.0 - eta) / 2.0 } else { 0.0 };
        }
        assert!((lossy.cov() - expected).norm() < 1e-14);
    }

    #[test]
    fn rejects_unphysical() {
        let cov = RMatrix::identity(2, 2) * 0.1;
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), cov),
            Err(Error::Unphysical(_))
        ));
        let squeezed = RMatrix::from_diagonal(&DVector::from_vec(vec![0.05, 5.0]));
        assert!(GaussianState::new(DVector::zeros(2), squeezed).is_ok());
    }

    #[test]
    fn rotation_leaves_vacuum_invariant() {
        let v = GaussianState::vacuum(2).unwrap();
        let r = SymplecticOp::phase_delay(1, PI / 2.0, 2).unwrap();
        assert!((v.apply(&r).unwrap().cov() - v.cov()).norm() < 1e-15);
    }
}
