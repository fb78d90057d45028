use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{omega, symplectic_from_unitary, CMatrix, RMatrix};

/// Frobenius tolerance on `S Omega S^T - Omega`.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-10;

/// Affine symplectic map `r -> S r + d` on quadrature vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticOp {
    matrix: RMatrix,
    displacement: DVector<f64>,
}

impl SymplecticOp {
    pub fn new(matrix: RMatrix, displacement: DVector<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.max(2),
                found: matrix.ncols(),
            });
        }
        if displacement.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: displacement.len(),
            });
        }
        let w = omega(dim / 2);
        let defect = (&matrix * &w * matrix.transpose() - &w).norm();
        if !(defect <= SYMPLECTIC_TOLERANCE) {
            return Err(Error::NotSymplectic(defect));
        }
        Ok(Self {
            matrix,
            displacement,
        })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: RMatrix::identity(2 * n_modes, 2 * n_modes),
            displacement: DVector::zeros(2 * n_modes),
        }
    }

    /// Passive interferometer acting as `a -> U a` on annihilation operators.
    pub fn passive(u: &CMatrix) -> Result<Self> {
        crate::linalg::ensure_unitary(u, 1e-10)?;
        let n = u.nrows();
        Ok(Self {
            matrix: symplectic_from_unitary(u),
            displacement: DVector::zeros(2 * n),
        })
    }

    /// `R(theta) = exp(i theta a^dagger a)`, i.e. `a -> e^{i theta} a`.
    pub fn phase_delay(mode: usize, theta: f64, n_modes: usize) -> Result<Self> {
        check_index(mode, n_modes)?;
        let mut u = CMatrix::identity(n_modes, n_modes);
        u[(mode, mode)] = Complex64::from_polar(1.0, theta);
        Ok(Self::from_unitary_unchecked(&u))
    }

    /// `B_ij(phi) = exp(-phi (a_i^dagger a_j - a_j^dagger a_i))`, acting on
    /// `(a_i, a_j)` as `[[cos phi, -sin phi], [sin phi, cos phi]]`.
    pub fn beamsplitter(i: usize, j: usize, phi: f64, n_modes: usize) -> Result<Self> {
        check_index(i, n_modes)?;
        check_index(j, n_modes)?;
        if i == j {
            return Err(Error::SameMode(i));
        }
        let (s, c) = phi.sin_cos();
        let mut u = CMatrix::identity(n_modes, n_modes);
        u[(i, i)] = Complex64::new(c, 0.0);
        u[(i, j)] = Complex64::new(-s, 0.0);
        u[(j, i)] = Complex64::new(s, 0.0);
        u[(j, j)] = Complex64::new(c, 0.0);
        Ok(Self::from_unitary_unchecked(&u))
    }

    /// `D(alpha) = exp(alpha a^dagger - alpha^* a)`: shifts `(x, p)` by
    /// `sqrt(2) (Re alpha, Im alpha)`.
    pub fn displacement(mode: usize, alpha: Complex64, n_modes: usize) -> Result<Self> {
        check_index(mode, n_modes)?;
        let mut d = DVector::zeros(2 * n_modes);
        d[mode] = 2f64.sqrt() * alpha.re;
        d[n_modes + mode] = 2f64.sqrt() * alpha.im;
        Ok(Self {
            matrix: RMatrix::identity(2 * n_modes, 2 * n_modes),
            displacement: d,
        })
    }

    fn from_unitary_unchecked(u: &CMatrix) -> Self {
        let n = u.nrows();
        Self {
            matrix: symplectic_from_unitary(u),
            displacement: DVector::zeros(2 * n),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn displacement_vector(&self) -> &DVector<f64> {
        &self.displacement
    }

    /// `next` applied after `self`.
    pub fn then(&self, next: &SymplecticOp) -> Result<Self> {
        if next.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: next.n_modes(),
            });
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
            displacement: &next.matrix * &self.displacement + &next.displacement,
        })
    }
}

fn check_index(mode: usize, n_modes: usize) -> Result<()> {
    if mode < n_modes {
        Ok(())
    } else {
        Err(Error::ModeOutOfRange {
            index: mode,
            n_modes,
        })
    }
}

/// Free-function constructors mirroring the operator names.
pub fn phase_delay(mode: usize, theta: f64, n_modes: usize) -> Result<SymplecticOp> {
    SymplecticOp::phase_delay(mode, theta, n_modes)
}

pub fn beamsplitter(i: usize, j: usize, phi: f64, n_modes: usize) -> Result<SymplecticOp> {
    SymplecticOp::beamsplitter(i, j, phi, n_modes)
}

pub fn displacement(mode: usize, alpha: Complex64, n_modes: usize) -> Result<SymplecticOp> {
    SymplecticOp::displacement(mode, alpha, n_modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianState;
    use std::f64::consts::PI;

    #[test]
    fn zero_angles_are_identity() {
        assert_eq!(
            SymplecticOp::phase_delay(1, 0.0, 3).unwrap(),
            SymplecticOp::identity(3)
        );
        assert_eq!(
            SymplecticOp::beamsplitter(0, 2, 0.0, 3).unwrap(),
            SymplecticOp::identity(3)
        );
    }

    #[test]
    fn bad_indices() {
        assert!(matches!(
            SymplecticOp::phase_delay(2, 0.1, 2),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            SymplecticOp::beamsplitter(1, 1, 0.1, 2),
            Err(Error::SameMode(1))
        ));
        assert!(SymplecticOp::displacement(3, Complex64::new(1.0, 0.0), 2).is_err());
    }

    #[test]
    fn phase_delay_rotates_quadratures() {
        let state = GaussianState::vacuum(1)
            .unwrap()
            .apply(&SymplecticOp::displacement(0, Complex64::new(1.0, 0.0), 1).unwrap())
            .unwrap();
        let rotated = state
            .apply(&SymplecticOp::phase_delay(0, PI / 2.0, 1).unwrap())
            .unwrap();
        // a -> i a moves amplitude from x into p
        assert!(rotated.mean()[0].abs() < 1e-15);
        assert!((rotated.mean()[1] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_quarter_beamsplitters_make_a_half() {
        let state = GaussianState::two_mode_squeezed(0.6)
            .unwrap()
            .apply(&SymplecticOp::displacement(0, Complex64::new(0.4, 0.9), 2).unwrap())
            .unwrap();
        let quarter = SymplecticOp::beamsplitter(0, 1, PI / 4.0, 2).unwrap();
        let half = SymplecticOp::beamsplitter(0, 1, PI / 2.0, 2).unwrap();
        let twice = state.apply(&quarter).unwrap().apply(&quarter).unwrap();
        let once = state.apply(&half).unwrap();
        assert!((twice.cov() - once.cov()).norm() < 1e-14);
        assert!((twice.mean() - once.mean()).norm() < 1e-14);
        assert!((quarter.then(&quarter).unwrap().matrix() - half.matrix()).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = RMatrix::identity(2, 2) * 2.0;
        assert!(matches!(
            SymplecticOp::new(m, DVector::zeros(2)),
            Err(Error::NotSymplectic(_))
        ));
    }
}
