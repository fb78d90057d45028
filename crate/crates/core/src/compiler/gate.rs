//! The two-mode gate `V(theta, phi)` that a single macronode applies.
//!
//! `V(theta, phi) = R_i(theta) R_j(theta) [R_i(pi/2) B_ij(phi) R_j(pi/2)]`,
//! which as a mode matrix is `e^{i theta} [[i cos phi, sin phi], [sin phi, i cos phi]]`.
//! Hence `V(-pi/2, 0) = I` and `V(theta - pi/2, 0) = e^{i theta} I`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;

/// `R(theta)` on one mode of a pair, as a 2x2 mode matrix.
pub fn phase_matrix(first: f64, second: f64) -> Mat2 {
    Mat2::new(
        Complex64::from_polar(1.0, first),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, second),
    )
}

/// `B(phi)` as `[[cos, -sin], [sin, cos]]` on `(a_i, a_j)`.
pub fn beamsplitter_matrix(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    Mat2::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    )
}

/// Product form: common phase, then `R(pi/2) ⊕ 1`, `B(phi)`, `1 ⊕ R(pi/2)`.
pub fn v_matrix(theta: f64, phi: f64) -> Mat2 {
    phase_matrix(theta, theta)
        * phase_matrix(FRAC_PI_2, 0.0)
        * beamsplitter_matrix(phi)
        * phase_matrix(0.0, FRAC_PI_2)
}

/// `xi_± = (theta ± phi - pi/2) / 2`.
pub fn xi_phases(theta: f64, phi: f64) -> (f64, f64) {
    (
        (theta + phi - FRAC_PI_2) / 2.0,
        (theta - phi - FRAC_PI_2) / 2.0,
    )
}

/// Mach-Zehnder form `B^dagger(pi/4) [R(2 xi_+) ⊕ R(2 xi_-)] B(pi/4)`,
/// evaluated literally. It equals `-V(theta, phi)`: the two forms differ by
/// `R(pi) ⊗ R(pi)`, i.e. the photon-number parity.
pub fn mach_zehnder_matrix(xi_plus: f64, xi_minus: f64) -> Mat2 {
    beamsplitter_matrix(FRAC_PI_4).adjoint()
        * phase_matrix(2.0 * xi_plus, 2.0 * xi_minus)
        * beamsplitter_matrix(FRAC_PI_4)
}

/// Arm rotations for the interferometric realisation of `V(theta, phi)`:
/// `2 xi_± + pi`, the extra `pi` removing the parity offset of the
/// Mach-Zehnder form.
pub fn arm_phases(theta: f64, phi: f64) -> (f64, f64) {
    let (xp, xm) = xi_phases(theta, phi);
    (2.0 * xp + std::f64::consts::PI, 2.0 * xm + std::f64::consts::PI)
}

/// A `V(theta, phi)` gate on nearest-neighbour wires `(wire, wire + 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MZGate {
    pub theta: f64,
    pub phi: f64,
    /// Upper wire of the pair; the gate acts on `(wire, wire + 1)`.
    pub wire: usize,
    pub xi_plus: f64,
    pub xi_minus: f64,
}

impl MZGate {
    pub fn new(theta: f64, phi: f64, wire: usize) -> Self {
        let (xi_plus, xi_minus) = xi_phases(theta, phi);
        Self {
            theta,
            phi,
            wire,
            xi_plus,
            xi_minus,
        }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.wire, self.wire + 1)
    }

    pub fn matrix(&self) -> Mat2 {
        v_matrix(self.theta, self.phi)
    }

    pub fn mach_zehnder_matrix(&self) -> Mat2 {
        mach_zehnder_matrix(self.xi_plus, self.xi_minus)
    }
}

/// `w = diag(e^{i output}) · V(-pi/2, phi) · diag(e^{i input})`, with
/// `phi` in `[0, pi/2]` and `input[1] = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSplit {
    pub output: [f64; 2],
    pub phi: f64,
    pub input: [f64; 2],
}

impl CellSplit {
    pub fn matrix(&self) -> Mat2 {
        phase_matrix(self.output[0], self.output[1])
            * v_matrix(-FRAC_PI_2, self.phi)
            * phase_matrix(self.input[0], self.input[1])
    }
}

/// Splits a 2x2 unitary into a symmetric beamsplitter `V(-pi/2, phi)`
/// between two phase pairs.
pub fn split_cell(w: &Mat2) -> CellSplit {
    // V(-pi/2, phi) = [[c, -i s], [-i s, c]]
    let c = (w[(0, 0)].norm() + w[(1, 1)].norm()) / 2.0;
    let s = (w[(0, 1)].norm() + w[(1, 0)].norm()) / 2.0;
    let phi = s.atan2(c);
    let (alpha1, alpha2, nu1);
    if c >= s {
        alpha2 = w[(1, 1)].arg();
        nu1 = if s < 1e-15 { 0.0 } else { w[(1, 0)].arg() + FRAC_PI_2 - alpha2 };
        alpha1 = w[(0, 0)].arg() - nu1;
    } else {
        alpha1 = w[(0, 1)].arg() + FRAC_PI_2;
        if c < 1e-15 {
            nu1 = 0.0;
            alpha2 = w[(1, 0)].arg() + FRAC_PI_2;
        } else {
            alpha2 = w[(1, 1)].arg();
            nu1 = w[(1, 0)].arg() + FRAC_PI_2 - alpha2;
        }
    }
    CellSplit {
        output: [alpha1, alpha2],
        phi,
        input: [nu1, 0.0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn white_and_blue_rules() {
        assert!((v_matrix(-FRAC_PI_2, 0.0) - Mat2::identity()).norm() < 1e-15);
        for &theta in &[0.3, -1.2, PI, 2.5] {
            let blue = v_matrix(theta - FRAC_PI_2, 0.0);
            let expected = Mat2::identity() * Complex64::from_polar(1.0, theta);
            assert!((blue - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn closed_form_entries() {
        // factors multiplied out by hand at theta = 0, phi = pi/4:
        // diag(i,1) B diag(1,i) = [[i c, s], [s, i c]]
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = v_matrix(0.0, PI / 4.0);
        let expected = Mat2::new(c(0.0, h), c(h, 0.0), c(h, 0.0), c(0.0, h));
        assert!((v - expected).norm() < 1e-15);
    }

    #[test]
    fn mz_form_differs_by_parity() {
        for &(theta, phi) in &[(0.37, 1.1), (-2.0, 0.2), (1.0, -0.7)] {
            let g = MZGate::new(theta, phi, 0);
            assert!((g.mach_zehnder_matrix() + g.matrix()).norm() < 1e-14);
            let (a, b) = arm_phases(theta, phi);
            let corrected = beamsplitter_matrix(FRAC_PI_4).adjoint()
                * phase_matrix(a, b)
                * beamsplitter_matrix(FRAC_PI_4);
            assert!((corrected - g.matrix()).norm() < 1e-14);
        }
    }

    #[test]
    fn split_cell_reconstructs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let u = crate::linalg::haar_unitary(2, &mut rng);
            let w = Mat2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
            let split = split_cell(&w);
            assert!((split.matrix() - w).norm() < 1e-13);
            assert!((0.0..=FRAC_PI_2).contains(&split.phi));
        }
        for w in [
            Mat2::identity(),
            phase_matrix(0.3, -1.0),
            Mat2::new(c(0.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.0)),
            beamsplitter_matrix(0.7),
        ] {
            assert!((split_cell(&w).matrix() - w).norm() < 1e-14);
        }
        let id = split_cell(&Mat2::identity());
        assert_eq!((id.output, id.phi, id.input), ([0.0, 0.0], 0.0, [0.0, 0.0]));
    }

    #[test]
    fn xi_stored_exactly() {
        let g = MZGate::new(0.9, -0.4, 2);
        assert_eq!((g.xi_plus, g.xi_minus), xi_phases(0.9, -0.4));
        assert_eq!(g.pair(), (2, 3));
    }
}
