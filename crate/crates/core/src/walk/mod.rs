//! The classical random walk on the basis of a fusion ring: measures and
//! their convolution, the transition kernel `p_μ`, harmonic functions and
//! the convergence diagnostics built on them.

mod diagnostics;
mod kernel;
mod measure;
mod sample;

pub use diagnostics::{
    cesaro_mean, harmonic_space, is_generating, stationary_check, zero_two_diagnostic,
    CesaroAverage, Generation, HarmonicBasis, NULL_SPACE_THRESHOLD,
};
pub use kernel::{apply_p, kernel, Applied, Kernel, ROW_SUM_TOL};
pub use measure::{convolve, is_symmetric, Measure, MASS_TOL};
pub use sample::{sample_endpoints, sample_path, sample_path_seeded};
