//! Fusion rings and the classical random walks they carry.
//!
//! * [`fusion`]: rings given by structure constants, fusion operators `Γ_U`,
//!   dimension functions and axiom checks.
//! * [`families`]: built-in rings (group rings, free-group balls, integer
//!   lattices, `SU(2)` representation rings and their Verlinde quotients).
//! * [`walk`]: convolution, transition kernels, harmonic functions and
//!   sampling.
//! * [`amenability`]: certified lower bounds on `‖Γ_U‖` and verdicts on
//!   amenability of a dimension function.
//! * [`entropy`]: relative entropy of multi-matrix inclusions and its block
//!   bounds.
//! * [`io`]: file formats and reports.

pub mod amenability;
pub mod entropy;
pub mod error;
pub mod families;
pub mod fusion;
pub mod io;
pub mod linalg;
pub mod walk;

pub use error::{Error, Result};
