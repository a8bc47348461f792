//! Exact assembly solver on the quarter-square lattice.

mod generate;
mod lattice;
mod search;

pub use generate::{generate_instances, GenerateConfig, Generated};
pub use lattice::{Atom, Frame, FrameKind};
pub use search::{
    decompose_target, enumerate_placements, solve, Placement, SearchStats, SolveError, SolveOutcome, SolverConfig, TargetCells,
    UnsatReason,
};
