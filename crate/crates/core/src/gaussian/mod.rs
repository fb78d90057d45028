//! Gaussian states, symplectic operations, homodyne measurement and the
//! teleportation primitives a macronode is built from.

pub mod channel;
pub mod macronode;
pub mod measure;
pub mod ops;
pub mod state;
pub mod teleport;

pub use channel::{extract_channel, GaussianChannel};
pub use macronode::{macronode_channel, macronode_circuit, macronode_shot};
pub use measure::{homodyne, homodyne_fixed, quadrature_marginal};
pub use ops::{beamsplitter, displacement, phase_delay, SymplecticOp};
pub use state::{apply_loss, apply_symplectic, GaussianState};
pub use teleport::{teleport, teleport_averaged, teleport_with_outcomes, TeleportationRecord};
