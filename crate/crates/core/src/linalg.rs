//! Small dense helpers shared by the simulator, the compiler and the sampler.
//!
//! Quadrature vectors are ordered `(x_1..x_N, p_1..p_N)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// The symplectic form `[[0, I], [-I, 0]]` for `n_modes` modes.
pub fn omega(n_modes: usize) -> RMatrix {
    let mut w = RMatrix::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        w[(i, n_modes + i)] = 1.0;
        w[(n_modes + i, i)] = -1.0;
    }
    w
}

/// Real symplectic matrix of the passive transformation `a -> U a`.
pub fn symplectic_from_unitary(u: &CMatrix) -> RMatrix {
    let n = u.nrows();
    let mut s = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            s[(i, j)] = z.re;
            s[(i, n + j)] = -z.im;
            s[(n + i, j)] = z.im;
            s[(n + i, n + j)] = z.re;
        }
    }
    s
}

/// Inverse of [`symplectic_from_unitary`]; reads the `x`-row blocks only.
pub fn unitary_from_symplectic(s: &RMatrix) -> CMatrix {
    let n = s.nrows() / 2;
    CMatrix::from_fn(n, n, |i, j| Complex64::new(s[(i, j)], s[(n + i, j)]))
}

pub fn symmetrize(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of the Hermitian matrix `a + i b` (`a` symmetric,
/// `b` antisymmetric), computed through its real symmetric embedding.
pub fn min_eigenvalue_hermitian(a: &RMatrix, b: &RMatrix) -> f64 {
    let n = a.nrows();
    let mut big = RMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(a);
    big.view_mut((n, n), (n, n)).copy_from(a);
    big.view_mut((0, n), (n, n)).copy_from(&(-b));
    big.view_mut((n, 0), (n, n)).copy_from(b);
    let big = symmetrize(&big);
    SymmetricEigen::new(big).eigenvalues.min()
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

pub fn ensure_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let defect = unitarity_defect(u);
    if defect.is_finite() && defect <= tol {
        Ok(())
    } else {
        Err(Error::NotUnitary(defect))
    }
}

/// Minimises `||a - e^{i delta} b||_F` over `delta` and returns `(distance, delta)`.
pub fn phase_aligned_distance(a: &CMatrix, b: &CMatrix) -> (f64, f64) {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let delta = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
    let phase = Complex64::from_polar(1.0, delta);
    ((a - b * phase).norm(), delta)
}

/// Reduces an angle to `(-pi, pi]`.
pub fn canonical_angle(angle: f64) -> f64 {
    let mut x = angle.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the
/// diagonal phases of `R` divided out.
pub fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / 2f64.sqrt()
    });
    let qr = z.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            u[(i, j)] *= phase;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_angle_range() {
        assert_eq!(canonical_angle(-PI), PI);
        assert_eq!(canonical_angle(PI), PI);
        assert!((canonical_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(canonical_angle(0.0), 0.0);
        for k in -20..20 {
            let a = canonical_angle(0.3 + f64::from(k) * 2.0 * PI);
            assert!((a - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_is_unitary_and_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 1..7 {
            let u = haar_unitary(m, &mut rng);
            assert!(unitarity_defect(&u) < 1e-12);
            let s = symplectic_from_unitary(&u);
            let w = omega(m);
            assert!((&s * &w * s.transpose() - &w).norm() < 1e-12);
            assert!((unitary_from_symplectic(&s) - u).norm() == 0.0);
        }
    }

    #[test]
    fn phase_alignment_recovers_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(4, &mut rng);
        let v = &u * Complex64::from_polar(1.0, 0.8);
        let (dist, delta) = phase_aligned_distance(&v, &u);
        assert!(dist < 1e-12);
        assert!((delta - 0.8).abs() < 1e-12);
    }

    #[test]
    fn hermitian_embedding_eigenvalue() {
        // vacuum: sigma + i/2 Omega has eigenvalues 0 and 1
        let a = RMatrix::identity(2, 2) * 0.5;
        let b = omega(1) * 0.5;
        assert!(min_eigenvalue_hermitian(&a, &b).abs() < 1e-12);
    }
}
