//! Numerical toolkit for Morrey spaces on uniform grids: modulars and norms, vanishing
//! diagnostics, classical harmonic-analysis operators, brute-force oracles, and
//! report-producing inequality checks.

pub mod checks;
pub mod cli;
pub mod error;
pub mod grid;
pub mod modular;
pub mod operators;
pub mod oracle;
pub mod stencil;

pub use error::{MorreyError, Result};
pub use grid::{FamilyDescriptor, GridFunction, GridSpec};
pub use modular::{ModularProfile, MorreyParams, RadiusLadder, VStarSequence};
pub use operators::OperatorSpec;
