//! Macronode measurement schedules on an `(m + 1) x (k + 2)` lattice.
//!
//! Row `rho` of the grid carries wires `(rho - 1, rho)`; row `0` carries
//! wire `0` alone in its second slot and row `m` carries wire `m - 1` alone
//! in its first slot, so every wire passes through two macronodes per
//! column. Column `0` is the input column, columns `1..=k` the bulk and
//! column `k + 1` the output column, which performs no gate.
//!
//! Within column `c` the rows `rho ≡ c (mod 2)` are measured first and the
//! remaining rows second. Mach-Zehnder (green) macronodes may only sit in
//! that first half of a bulk column and only on rows `1..m`, which gives the
//! checkerboard of nearest-neighbour gates of a rectangular mesh.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_angle, phase_aligned_distance, CMatrix};

use super::gate::{split_cell, v_matrix, Mat2};
use super::mesh::{apply_left, decompose, Mesh};

/// Below this a rotation angle or beamsplitter angle is treated as zero.
const ANGLE_EPSILON: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MacronodeKind {
    /// White: `V(-pi/2, 0) = I`.
    Identity,
    /// Blue: `V(theta - pi/2, 0) = R(theta) ⊗ R(theta)`.
    Rotation(f64),
    /// Green: a general `V(theta, phi)`.
    Mz { theta: f64, phi: f64 },
}

impl MacronodeKind {
    /// `(theta, phi)` handed to the macronode.
    pub fn parameters(&self) -> (f64, f64) {
        match *self {
            MacronodeKind::Identity => (-FRAC_PI_2, 0.0),
            MacronodeKind::Rotation(theta) => (theta - FRAC_PI_2, 0.0),
            MacronodeKind::Mz { theta, phi } => (theta, phi),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        let (theta, phi) = self.parameters();
        v_matrix(theta, phi)
    }

    fn is_finite(&self) -> bool {
        let (theta, phi) = self.parameters();
        theta.is_finite() && phi.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacronodeSpec {
    pub kind: MacronodeKind,
    pub row: usize,
    pub col: usize,
}

/// Wires a grid row acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowWires {
    Pair(usize, usize),
    /// A boundary row holding one wire; `slot` is the macronode input it
    /// occupies (`1` on the top row, `0` on the bottom row).
    Lone { wire: usize, slot: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacronodeSchedule {
    m: usize,
    k: usize,
    /// `grid[row][col]`.
    grid: Vec<Vec<MacronodeKind>>,
    global_phase: f64,
}

impl MacronodeSchedule {
    pub fn new(m: usize, k: usize, grid: Vec<Vec<MacronodeKind>>, global_phase: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSchedule("no wires".into()));
        }
        if grid.len() != m + 1 || grid.iter().any(|row| row.len() != k + 2) {
            return Err(Error::InvalidSchedule(format!(
                "grid must be {} x {} for m = {m}, k = {k}",
                m + 1,
                k + 2
            )));
        }
        if !global_phase.is_finite() {
            return Err(Error::InvalidSchedule("non-finite global phase".into()));
        }
        for (row, cells) in grid.iter().enumerate() {
            for (col, kind) in cells.iter().enumerate() {
                if !kind.is_finite() {
                    return Err(Error::InvalidSchedule(format!("non-finite angle at ({row}, {col})")));
                }
                if col == k + 1 && *kind != MacronodeKind::Identity {
                    return Err(Error::InvalidSchedule(format!(
                        "output column macronode at row {row} is not identity"
                    )));
                }
                if matches!(kind, MacronodeKind::Mz { .. }) && !green_allowed(m, k, row, col) {
                    return Err(Error::InvalidSchedule(format!(
                        "mz macronode at ({row}, {col}) is off the checkerboard"
                    )));
                }
            }
        }
        Ok(Self {
            m,
            k,
            grid,
            global_phase,
        })
    }

    /// All-white schedule: a pure quantum wire.
    pub fn identity(m: usize, k: usize) -> Result<Self> {
        Self::new(m, k, vec![vec![MacronodeKind::Identity; k + 2]; m + 1], 0.0)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.m + 1
    }

    pub fn cols(&self) -> usize {
        self.k + 2
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn kind(&self, row: usize, col: usize) -> MacronodeKind {
        self.grid[row][col]
    }

    pub fn spec(&self, row: usize, col: usize) -> MacronodeSpec {
        MacronodeSpec {
            kind: self.grid[row][col],
            row,
            col,
        }
    }

    pub fn grid(&self) -> &[Vec<MacronodeKind>] {
        &self.grid
    }

    pub fn row_wires(&self, row: usize) -> RowWires {
        row_wires(self.m, row)
    }

    /// Non-output macronodes in the order they are measured.
    pub fn measurement_order(&self) -> Vec<MacronodeSpec> {
        let mut order = Vec::with_capacity(self.rows() * (self.k + 1));
        for col in 0..=self.k {
            for first in [true, false] {
                for row in 0..self.rows() {
                    if (row % 2 == col % 2) == first {
                        order.push(self.spec(row, col));
                    }
                }
            }
        }
        order
    }

    /// Number of non-output macronodes wire `wire` passes through.
    pub fn wire_crossings(&self, wire: usize) -> usize {
        self.measurement_order()
            .iter()
            .filter(|spec| match row_wires(self.m, spec.row) {
                RowWires::Pair(a, b) => a == wire || b == wire,
                RowWires::Lone { wire: w, .. } => w == wire,
            })
            .count()
    }

    pub fn count(&self, pred: impl Fn(&MacronodeKind) -> bool) -> usize {
        self.grid.iter().flatten().filter(|k| pred(k)).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ScheduleJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ScheduleJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

pub fn row_wires(m: usize, row: usize) -> RowWires {
    if row == 0 {
        RowWires::Lone { wire: 0, slot: 1 }
    } else if row == m {
        RowWires::Lone { wire: m - 1, slot: 0 }
    } else {
        RowWires::Pair(row - 1, row)
    }
}

fn green_allowed(m: usize, k: usize, row: usize, col: usize) -> bool {
    (1..=k).contains(&col) && (1..m).contains(&row) && row % 2 == col % 2
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindTag {
    Identity,
    Rotation,
    Mz,
}

#[derive(Serialize, Deserialize)]
struct MacronodeJson {
    kind: KindTag,
    theta: Option<f64>,
    phi: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    m: usize,
    k: usize,
    grid: Vec<Vec<MacronodeJson>>,
    global_phase: f64,
}

impl From<&MacronodeSchedule> for ScheduleJson {
    fn from(s: &MacronodeSchedule) -> Self {
        let grid = s
            .grid
            .iter()
            .map(|row| {
                row.iter()
                    .map(|kind| match *kind {
                        MacronodeKind::Identity => MacronodeJson {
                            kind: KindTag::Identity,
                            theta: None,
                            phi: None,
                        },
                        MacronodeKind::Rotation(theta) => MacronodeJson {
                            kind: KindTag::Rotation,
                            theta: Some(theta),
                            phi: None,
                        },
                        MacronodeKind::Mz { theta, phi } => MacronodeJson {
                            kind: KindTag::Mz,
                            theta: Some(theta),
                            phi: Some(phi),
                        },
                    })
                    .collect()
            })
            .collect();
        Self {
            m: s.m,
            k: s.k,
            grid,
            global_phase: s.global_phase,
        }
    }
}

impl TryFrom<ScheduleJson> for MacronodeSchedule {
    type Error = Error;

    fn try_from(raw: ScheduleJson) -> Result<Self> {
        let mut grid = Vec::with_capacity(raw.grid.len());
        for (row, cells) in raw.grid.into_iter().enumerate() {
            let mut kinds = Vec::with_capacity(cells.len());
            for (col, cell) in cells.into_iter().enumerate() {
                let missing = |what: &str| Error::InvalidSchedule(format!("{what} missing at ({row}, {col})"));
                let kind = match cell.kind {
                    KindTag::Identity => MacronodeKind::Identity,
                    KindTag::Rotation => MacronodeKind::Rotation(cell.theta.ok_or_else(|| missing("theta"))?),
                    KindTag::Mz => MacronodeKind::Mz {
                        theta: cell.theta.ok_or_else(|| missing("theta"))?,
                        phi: cell.phi.ok_or_else(|| missing("phi"))?,
                    },
                };
                kinds.push(kind);
            }
            grid.push(kinds);
        }
        MacronodeSchedule::new(raw.m, raw.k, grid, raw.global_phase)
    }
}

/// Per-row phases `a` with `a[w] + a[w + 1] = phases[w]` and `a[0] = 0`.
///
/// Each wire picks up the phases of the two macronodes it crosses in a
/// column; fixing the top row to zero removes the one redundant degree of
/// freedom.
fn row_phases(phases: &[f64]) -> Vec<f64> {
    let mut a = vec![0.0; phases.len() + 1];
    for (w, p) in phases.iter().enumerate() {
        a[w + 1] = p - a[w];
    }
    a
}

fn phase_kind(angle: f64) -> MacronodeKind {
    let angle = canonical_angle(angle);
    if angle.abs() < ANGLE_EPSILON {
        MacronodeKind::Identity
    } else {
        MacronodeKind::Rotation(angle)
    }
}

/// Places a mesh on the macronode lattice.
///
/// Mesh layer `c` goes to bulk column `c`. Each gate `V(theta, phi)` on
/// wires `(w, w + 1)` becomes a green macronode on row `w + 1`, and the
/// per-wire phases following the layer are absorbed into the rotation of
/// every macronode of that column (green ones included).
pub fn mesh_to_schedule(mesh: &Mesh, k: usize) -> Result<MacronodeSchedule> {
    let m = mesh.m();
    if mesh.depth() > k {
        return Err(Error::DepthOverflow {
            depth: mesh.depth(),
            k,
        });
    }
    let mut grid = vec![vec![MacronodeKind::Identity; k + 2]; m + 1];
    let input = row_phases(mesh.input_phases());
    for (row, &a) in input.iter().enumerate() {
        grid[row][0] = phase_kind(a);
    }
    for (idx, layer) in mesh.layers().iter().enumerate() {
        let col = idx + 1;
        let a = row_phases(&layer.phases);
        for (row, &angle) in a.iter().enumerate() {
            grid[row][col] = phase_kind(angle);
        }
        for gate in &layer.gates {
            let row = gate.wire + 1;
            let (s, c) = gate.phi.sin_cos();
            grid[row][col] = if s.abs() < ANGLE_EPSILON {
                // V(theta, 0 or pi) is a common phase
                let sign = if c < 0.0 { PI } else { 0.0 };
                phase_kind(gate.theta + FRAC_PI_2 + sign + a[row])
            } else {
                MacronodeKind::Mz {
                    theta: canonical_angle(gate.theta + a[row]),
                    phi: canonical_angle(gate.phi),
                }
            };
        }
    }
    MacronodeSchedule::new(m, k, grid, 0.0)
}

/// Lossless product of all macronode gates in measurement order, without
/// the global phase.
pub fn schedule_to_unitary(schedule: &MacronodeSchedule) -> CMatrix {
    let m = schedule.m();
    let mut u = CMatrix::identity(m, m);
    for spec in schedule.measurement_order() {
        if spec.kind == MacronodeKind::Identity {
            continue;
        }
        let v = spec.kind.matrix();
        match schedule.row_wires(spec.row) {
            RowWires::Pair(a, _) => apply_left(&mut u, a, &v),
            RowWires::Lone { wire, slot } => {
                let phase = v[(slot, slot)];
                for col in 0..m {
                    u[(wire, col)] *= phase;
                }
            }
        }
    }
    u
}

/// Decomposes `u` and places it on a lattice of depth `k`. The phase `delta`
/// with `u ≈ e^{i delta} schedule_to_unitary(s)` is stored as the global
/// phase.
pub fn compile(u: &CMatrix, k: usize) -> Result<MacronodeSchedule> {
    let mesh = decompose(u)?;
    let schedule = mesh_to_schedule(&mesh, k)?;
    let (_, delta) = phase_aligned_distance(u, &schedule_to_unitary(&schedule));
    MacronodeSchedule::new(schedule.m, schedule.k, schedule.grid, canonical_angle(delta))
}

/// Parameters realising a 2x2 target `diag(e^{i out}) V(theta, phi) diag(e^{i in})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSolution {
    pub theta: f64,
    pub phi: f64,
    /// Phases left on the wires before the macronode.
    pub input_phases: [f64; 2],
    /// Phases left on the wires after the macronode.
    pub output_phases: [f64; 2],
}

impl CellSolution {
    pub fn matrix(&self) -> Mat2 {
        let [o1, o2] = self.output_phases;
        let [i1, i2] = self.input_phases;
        super::gate::phase_matrix(o1, o2) * v_matrix(self.theta, self.phi) * super::gate::phase_matrix(i1, i2)
    }

    /// Whether no residual phases are needed around the macronode.
    pub fn is_exact(&self) -> bool {
        self.input_phases.iter().chain(&self.output_phases).all(|p| p.abs() < 1e-12)
    }
}

/// Solves macronode parameters for a two-wire target.
///
/// The common part of the output phases is absorbed into `theta`, so
/// targets of the form `e^{i t} I` and plain beamsplitters need no residual
/// phases. Whatever the single macronode cannot hold is returned as input
/// and output phases for neighbouring macronodes.
pub fn solve_macronode_params(target: &Mat2) -> Result<CellSolution> {
    let defect = (target.adjoint() * target - Mat2::identity()).norm();
    if !(defect <= super::mesh::UNITARITY_TOLERANCE) {
        return Err(Error::NotUnitary(defect));
    }
    let split = split_cell(target);
    let [o1, o2] = split.output;
    let [i1, i2] = split.input;
    let mut solution = if split.phi.sin().abs() < ANGLE_EPSILON {
        // diagonal target: fold everything into the outputs
        let (p1, p2) = (o1 + i1, o2 + i2);
        let common = (p1 + p2) / 2.0;
        CellSolution {
            theta: common - FRAC_PI_2,
            phi: 0.0,
            input_phases: [0.0, 0.0],
            output_phases: [p1 - common, p2 - common],
        }
    } else {
        let common = (o1 + o2) / 2.0;
        CellSolution {
            theta: common - FRAC_PI_2,
            phi: split.phi,
            input_phases: [i1, i2],
            output_phases: [o1 - common, o2 - common],
        }
    };
    solution.theta = canonical_angle(solution.theta);
    solution.phi = canonical_angle(solution.phi);
    for p in solution.input_phases.iter_mut().chain(solution.output_phases.iter_mut()) {
        *p = canonical_angle(*p);
        if p.abs() < 1e-15 {
            *p = 0.0;
        }
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::gate::{beamsplitter_matrix, phase_matrix, MZGate};
    use crate::compiler::mesh::MeshLayer;
    use num_complex::Complex64;
    use crate::linalg::haar_unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat_distance(a: &Mat2, b: &Mat2) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn grid_shape_matches_lattice() {
        let s = MacronodeSchedule::identity(6, 6).unwrap();
        assert_eq!((s.rows(), s.cols()), (7, 8));
        for w in 0..6 {
            assert_eq!(s.wire_crossings(w), 14);
        }
        assert!((schedule_to_unitary(&s) - CMatrix::identity(6, 6)).norm() == 0.0);
    }

    #[test]
    fn empty_mesh_is_all_white() {
        let mesh = Mesh::new(4, vec![0.0; 4], Vec::new()).unwrap();
        let s = mesh_to_schedule(&mesh, 4).unwrap();
        assert_eq!(s.count(|k| *k != MacronodeKind::Identity), 0);
    }

    #[test]
    fn single_beamsplitter_is_one_green() {
        // B(phi) on wires (1, 2) of three
        let phi = 0.7;
        let mut target = CMatrix::identity(3, 3);
        apply_left(&mut target, 1, &beamsplitter_matrix(phi));
        let s = compile(&target, 3).unwrap();
        assert_eq!(s.count(|k| matches!(k, MacronodeKind::Mz { .. })), 1);
        let u = schedule_to_unitary(&s);
        let (dist, _) = phase_aligned_distance(&target, &u);
        assert!(dist < 1e-12);
    }

    #[test]
    fn blue_column_gives_common_phase() {
        let (m, k) = (3, 2);
        let theta = PI / 3.0;
        let mut grid = vec![vec![MacronodeKind::Identity; k + 2]; m + 1];
        for row in grid.iter_mut() {
            row[1] = MacronodeKind::Rotation(theta);
        }
        let s = MacronodeSchedule::new(m, k, grid, 0.0).unwrap();
        // two blue crossings per wire
        let expected = CMatrix::identity(m, m) * Complex64::from_polar(1.0, 2.0 * theta);
        assert!((schedule_to_unitary(&s) - expected).norm() < 1e-14);
    }

    #[test]
    fn round_trip_and_crossings() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 1..=8 {
            let u = haar_unitary(m, &mut rng);
            let s = compile(&u, m).unwrap();
            for w in 0..m {
                assert_eq!(s.wire_crossings(w), 2 * (m + 1));
            }
            let recomposed = schedule_to_unitary(&s) * Complex64::from_polar(1.0, s.global_phase());
            assert!((recomposed - &u).norm() < 1e-9, "m = {m}");
            assert!(s.kind(0, 0) == MacronodeKind::Identity);
        }
    }

    #[test]
    fn depth_overflow_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(5, &mut rng);
        assert!(matches!(compile(&u, 2), Err(Error::DepthOverflow { k: 2, .. })));
    }

    #[test]
    fn layout_rules_are_enforced() {
        let mut grid = vec![vec![MacronodeKind::Identity; 4]; 4];
        grid[2][1] = MacronodeKind::Mz { theta: 0.1, phi: 0.2 };
        assert!(MacronodeSchedule::new(3, 2, grid.clone(), 0.0).is_err());
        grid[2][1] = MacronodeKind::Identity;
        grid[1][1] = MacronodeKind::Mz { theta: 0.1, phi: 0.2 };
        assert!(MacronodeSchedule::new(3, 2, grid.clone(), 0.0).is_ok());
        grid[0][3] = MacronodeKind::Rotation(0.3);
        assert!(MacronodeSchedule::new(3, 2, grid, 0.0).is_err());
        assert!(MacronodeSchedule::new(3, 1, vec![vec![MacronodeKind::Identity; 3]; 3], 0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_unitary(4, &mut rng);
        let s = compile(&u, 4).unwrap();
        let text = s.to_json().unwrap();
        assert_eq!(MacronodeSchedule::from_json(&text).unwrap(), s);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["grid"].as_array().unwrap().len(), 5);
        assert_eq!(value["grid"][0].as_array().unwrap().len(), 6);
        assert_eq!(value["grid"][0][5]["kind"], "identity");
        assert!(value["grid"][0][5]["theta"].is_null());
    }

    #[test]
    fn json_rejects_missing_angles() {
        let text = r#"{"m":1,"k":0,"grid":[[{"kind":"rotation","theta":null,"phi":null},{"kind":"identity","theta":null,"phi":null}],[{"kind":"identity","theta":null,"phi":null},{"kind":"identity","theta":null,"phi":null}]],"global_phase":0.0}"#;
        assert!(matches!(MacronodeSchedule::from_json(text), Err(Error::InvalidSchedule(_))));
    }

    #[test]
    fn solve_identity_and_common_phase() {
        let sol = solve_macronode_params(&Mat2::identity()).unwrap();
        assert!((sol.theta + FRAC_PI_2).abs() < 1e-15 && sol.phi == 0.0 && sol.is_exact());
        for &t in &[0.4, -2.2, PI] {
            let target = Mat2::identity() * Complex64::from_polar(1.0, t);
            let sol = solve_macronode_params(&target).unwrap();
            assert!(sol.is_exact());
            assert!((canonical_angle(sol.theta - (t - FRAC_PI_2))).abs() < 1e-12);
            assert_eq!(sol.phi, 0.0);
        }
    }

    #[test]
    fn solve_beamsplitter_with_phases() {
        let target = phase_matrix(0.3, -1.1) * beamsplitter_matrix(0.7);
        let sol = solve_macronode_params(&target).unwrap();
        assert!(mat_distance(&sol.matrix(), &target) < 1e-10);
        assert!(sol.theta > -PI && sol.theta <= PI);
    }

    #[test]
    fn solve_random_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let (t, p) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            let target = MZGate::new(t, p, 0).matrix();
            let sol = solve_macronode_params(&target).unwrap();
            assert!(mat_distance(&sol.matrix(), &target) < 1e-10);
        }
        let bad = Mat2::identity() * Complex64::new(1.1, 0.0);
        assert!(solve_macronode_params(&bad).is_err());
    }

    #[test]
    fn user_mesh_with_general_gates() {
        let layers = vec![
            MeshLayer {
                gates: vec![MZGate::new(0.4, 1.2, 0)],
                phases: vec![0.1, 0.2, 0.3],
            },
            MeshLayer {
                gates: vec![MZGate::new(-1.0, 0.0, 1)],
                phases: vec![0.0, -0.5, 0.9],
            },
        ];
        let mesh = Mesh::new(3, vec![0.5, -0.2, 1.0], layers).unwrap();
        let s = mesh_to_schedule(&mesh, 2).unwrap();
        assert!((schedule_to_unitary(&s) - mesh.evaluate()).norm() < 1e-12);
    }
}
