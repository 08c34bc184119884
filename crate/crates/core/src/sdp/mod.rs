//! Bell functionals, SDP assembly over an equality partition, and a dense
//! interior-point solver.

mod functional;
mod problem;
mod solver;

pub use functional::{behavior_map, AffineForm, BehaviorIndex, BellFunctional};
pub use problem::{assemble_sdp, class_variables, CellEntry, Objective, SdpProblem};
pub use solver::{solve, SolveOptions, SolveReport, SolveStatus, MAX_MATRIX_SIZE, MAX_VARIABLES};
