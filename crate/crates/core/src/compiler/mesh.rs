//! Rectangular nearest-neighbour meshes of `V(theta, phi)` gates.
//!
//! A mesh evaluates to `D_L G_L ... D_1 G_1 D_0`, where `G_c` is layer `c`
//! of disjoint two-wire gates and each `D_c` is an independent phase delay
//! per wire. Layer `c` (1-based) only pairs `(w, w + 1)` with
//! `w ≡ c - 1 (mod 2)`, the brick pattern of the macronode lattice.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{canonical_angle, ensure_unitary, CMatrix};

use super::gate::{split_cell, Mat2, MZGate};

/// Input unitaries must satisfy `||U^dagger U - I||_F <= UNITARITY_TOLERANCE`.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

const ELIMINATION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MeshLayer {
    pub gates: Vec<MZGate>,
    /// Phase delay on every wire after the gates.
    pub phases: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    m: usize,
    input_phases: Vec<f64>,
    layers: Vec<MeshLayer>,
}

/// Wire parity of the gates allowed in 1-based layer `c`.
pub fn layer_parity(c: usize) -> usize {
    (c + 1) % 2
}

impl Mesh {
    pub fn new(m: usize, input_phases: Vec<f64>, layers: Vec<MeshLayer>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidMesh("no wires".into()));
        }
        if input_phases.len() != m {
            return Err(Error::InvalidMesh(format!(
                "{} input phases for {m} wires",
                input_phases.len()
            )));
        }
        for (idx, layer) in layers.iter().enumerate() {
            let c = idx + 1;
            if layer.phases.len() != m {
                return Err(Error::InvalidMesh(format!("layer {c} has {} phases", layer.phases.len())));
            }
            let mut used = vec![false; m];
            for g in &layer.gates {
                if g.wire + 1 >= m {
                    return Err(Error::InvalidMesh(format!("gate on wire {} out of range", g.wire)));
                }
                if g.wire % 2 != layer_parity(c) {
                    return Err(Error::InvalidMesh(format!(
                        "gate on ({}, {}) breaks the parity of layer {c}",
                        g.wire,
                        g.wire + 1
                    )));
                }
                if used[g.wire] || used[g.wire + 1] {
                    return Err(Error::InvalidMesh(format!("overlapping gates in layer {c}")));
                }
                used[g.wire] = true;
                used[g.wire + 1] = true;
            }
        }
        Ok(Self {
            m,
            input_phases,
            layers,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_phases(&self) -> &[f64] {
        &self.input_phases
    }

    pub fn layers(&self) -> &[MeshLayer] {
        &self.layers
    }

    /// Phases applied last: those of the final layer, or the input phases of
    /// a mesh without layers.
    pub fn output_phases(&self) -> &[f64] {
        self.layers
            .last()
            .map_or(&self.input_phases[..], |l| &l.phases[..])
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    /// Forward product of the mesh.
    pub fn evaluate(&self) -> CMatrix {
        let mut u = diagonal(&self.input_phases);
        for layer in &self.layers {
            for g in &layer.gates {
                apply_left(&mut u, g.wire, &g.matrix());
            }
            u = diagonal(&layer.phases) * u;
        }
        u
    }
}

fn diagonal(phases: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        phases.len(),
        phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
    ))
}

/// `u <- G u` with `G` acting on rows `(wire, wire + 1)`.
pub(crate) fn apply_left(u: &mut CMatrix, wire: usize, g: &Mat2) {
    for col in 0..u.ncols() {
        let a = u[(wire, col)];
        let b = u[(wire + 1, col)];
        u[(wire, col)] = g[(0, 0)] * a + g[(0, 1)] * b;
        u[(wire + 1, col)] = g[(1, 0)] * a + g[(1, 1)] * b;
    }
}

/// `u <- u G` with `G` acting on columns `(col, col + 1)`.
fn apply_right(u: &mut CMatrix, col: usize, g: &Mat2) {
    for row in 0..u.nrows() {
        let a = u[(row, col)];
        let b = u[(row, col + 1)];
        u[(row, col)] = a * g[(0, 0)] + b * g[(1, 0)];
        u[(row, col + 1)] = a * g[(0, 1)] + b * g[(1, 1)];
    }
}

/// Column rotation that zeroes the row entry `x` against its right
/// neighbour `y`.
fn null_from_right(x: Complex64, y: Complex64) -> Option<Mat2> {
    if x.norm() == 0.0 {
        return None;
    }
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    Some(Mat2::new(y / n, x.conj() / n, -x / n, y.conj() / n))
}

/// Row rotation that zeroes the lower column entry `y` against `x` above it.
fn null_from_left(x: Complex64, y: Complex64) -> Option<Mat2> {
    if y.norm() == 0.0 {
        return None;
    }
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    Some(Mat2::new(x.conj() / n, y.conj() / n, y / n, -x / n))
}

enum Step {
    Block { wire: usize, matrix: Mat2 },
    Diagonal(Vec<f64>),
}

/// Decomposes `u` into a rectangular mesh of depth at most `m`.
///
/// Entries are nulled along alternating anti-diagonals, from the right on
/// even passes and from the left on odd passes. The resulting two-wire
/// blocks are split into `V(-pi/2, phi)` and phase delays, and scheduled
/// as early as the layer parity allows.
pub fn decompose(u: &CMatrix) -> Result<Mesh> {
    ensure_unitary(u, UNITARITY_TOLERANCE)?;
    let m = u.nrows();
    if m == 0 {
        return Err(Error::InvalidMesh("empty unitary".into()));
    }
    let mut work = u.clone();
    let mut right: Vec<(usize, Mat2)> = Vec::new();
    let mut left: Vec<(usize, Mat2)> = Vec::new();
    for i in 0..m.saturating_sub(1) {
        if i % 2 == 0 {
            for j in 0..=i {
                let (row, col) = (m - 1 - j, i - j);
                if let Some(g) = null_from_right(work[(row, col)], work[(row, col + 1)]) {
                    apply_right(&mut work, col, &g);
                    right.push((col, g));
                }
            }
        } else {
            for j in 1..=i + 1 {
                let (row, col) = (m + j - i - 2, j - 1);
                if let Some(g) = null_from_left(work[(row - 1, col)], work[(row, col)]) {
                    apply_left(&mut work, row - 1, &g);
                    left.push((row - 1, g));
                }
            }
        }
    }
    let mut residual = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                residual = residual.max(work[(i, j)].norm());
            }
        }
    }
    if !(residual <= ELIMINATION_TOLERANCE) {
        return Err(Error::EliminationFailed(residual));
    }

    // u = L_1^† ... L_s^† D R_t^† ... R_1^†, listed in the order applied
    let mut steps: Vec<Step> = right
        .iter()
        .map(|(w, g)| Step::Block {
            wire: *w,
            matrix: g.adjoint(),
        })
        .collect();
    steps.push(Step::Diagonal((0..m).map(|i| work[(i, i)].arg()).collect()));
    steps.extend(left.iter().rev().map(|(w, g)| Step::Block {
        wire: *w,
        matrix: g.adjoint(),
    }));

    Ok(schedule_steps(m, &steps))
}

fn schedule_steps(m: usize, steps: &[Step]) -> Mesh {
    let mut pending = vec![0.0f64; m];
    let mut last = vec![0usize; m];
    // phases[c] sits after layer c; phases[0] are the input phases
    let mut phases: Vec<Vec<f64>> = vec![vec![0.0; m]];
    let mut gates: Vec<Vec<MZGate>> = vec![Vec::new()];

    for step in steps {
        match step {
            Step::Diagonal(d) => {
                for (p, v) in pending.iter_mut().zip(d) {
                    *p += v;
                }
            }
            Step::Block { wire, matrix } => {
                let w = *wire;
                let split = split_cell(matrix);
                if split.phi < 1e-14 {
                    // diagonal block: only phases
                    pending[w] += split.output[0] + split.input[0];
                    pending[w + 1] += split.output[1] + split.input[1];
                    continue;
                }
                let mut c = last[w].max(last[w + 1]) + 1;
                if w % 2 != layer_parity(c) {
                    c += 1;
                }
                while phases.len() <= c {
                    phases.push(vec![0.0; m]);
                    gates.push(Vec::new());
                }
                phases[c - 1][w] += pending[w] + split.input[0];
                phases[c - 1][w + 1] += pending[w + 1] + split.input[1];
                pending[w] = split.output[0];
                pending[w + 1] = split.output[1];
                last[w] = c;
                last[w + 1] = c;
                gates[c].push(MZGate::new(-FRAC_PI_2, split.phi, w));
            }
        }
    }
    let depth = phases.len() - 1;
    for (w, p) in pending.iter().enumerate() {
        phases[depth][w] += p;
    }

    let input_phases = phases[0].iter().map(|&p| canonical_angle(p)).collect();
    let layers = (1..=depth)
        .map(|c| {
            let mut layer_gates = gates[c].clone();
            layer_gates.sort_by_key(|g| g.wire);
            MeshLayer {
                gates: layer_gates,
                phases: phases[c].iter().map(|&p| canonical_angle(p)).collect(),
            }
        })
        .collect();
    Mesh {
        m,
        input_phases,
        layers,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, phase_aligned_distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_no_gates() {
        let mesh = decompose(&CMatrix::identity(4, 4)).unwrap();
        assert_eq!(mesh.gate_count(), 0);
        assert!(mesh.output_phases().iter().all(|&p| p == 0.0));
        assert!((mesh.evaluate() - CMatrix::identity(4, 4)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_goes_to_output_phases() {
        let phases = [0.3, -1.2, 2.0, 0.9, -0.4];
        let d = diagonal(&phases);
        let mesh = decompose(&d).unwrap();
        assert_eq!(mesh.depth(), 0);
        for (a, b) in mesh.output_phases().iter().zip(phases) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn haar_round_trip_within_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for m in 1..=9 {
            for _ in 0..5 {
                let u = haar_unitary(m, &mut rng);
                let mesh = decompose(&u).unwrap();
                assert!(mesh.depth() <= m, "m = {m}, depth = {}", mesh.depth());
                assert_eq!(mesh.gate_count(), m * (m - 1) / 2);
                let (dist, _) = phase_aligned_distance(&mesh.evaluate(), &u);
                assert!(dist < 1e-10, "m = {m}: {dist:e}");
                assert!((mesh.evaluate() - &u).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let mut u = CMatrix::identity(3, 3);
        u[(0, 1)] = Complex64::new(1e-6, 0.0);
        assert!(matches!(decompose(&u), Err(Error::NotUnitary(_))));
        assert!(matches!(
            decompose(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn mesh_validation() {
        let bad_parity = MeshLayer {
            gates: vec![MZGate::new(-FRAC_PI_2, 0.4, 1)],
            phases: vec![0.0; 3],
        };
        assert!(Mesh::new(3, vec![0.0; 3], vec![bad_parity]).is_err());
        let overlap = MeshLayer {
            gates: vec![MZGate::new(-FRAC_PI_2, 0.4, 0), MZGate::new(-FRAC_PI_2, 0.4, 0)],
            phases: vec![0.0; 3],
        };
        assert!(Mesh::new(3, vec![0.0; 3], vec![overlap]).is_err());
    }
}
