//! Compilation of linear-optical unitaries into macronode schedules.

pub mod channel;
pub mod gate;
pub mod mesh;
pub mod schedule;

pub use channel::{factorize_loss, schedule_channel, LossFactorization};
pub use gate::{v_matrix, MZGate};
pub use mesh::{decompose, Mesh, MeshLayer};
pub use schedule::{
    compile, mesh_to_schedule, schedule_to_unitary, solve_macronode_params, CellSolution, MacronodeKind,
    MacronodeSchedule, MacronodeSpec, RowWires,
};
