//! Tangram geometry engine: exact Q(sqrt 2) coordinates, Tangram Construction
//! Expression (TCE) documents, the two-stage constraint verifier, the data
//! construction pipeline and an exact lattice solver.

pub mod exactnum;
pub mod geom;
pub mod pipeline;
pub mod solver;
pub mod tangram;
pub mod verify;
