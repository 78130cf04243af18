//! Relative entropy for inclusions of finite-dimensional multi-matrix
//! algebras, the block bound on conditional entropy and its simplex
//! relaxation.

mod bounds;
mod simplex;
mod state;

pub use bounds::{
    decomposition_defect, entropy_gap_bounds, h_bound_blocks, GapBounds, DECOMPOSITION_TOL,
};
pub use simplex::{
    f_maximizer, f_simplex, inclusion_norm, two_log_norm_check, Maximizer, SimplexPoint,
    TwoLogNormCheck, NORM_TOL, TWO_LOG_NORM_TOL,
};
pub use state::{
    eta, rel_entropy, restrict_state, vn_entropy, BlockState, Inclusion, RelativeEntropy,
    EIGEN_FLOOR, PSD_TOL, STATE_MASS_TOL, SUPPORT_MASS_TOL,
};

use nalgebra::DMatrix;
use rand::Rng;

/// A random state with full-rank blocks: `Q_l = G_l G_lᵀ`, normalized.
pub fn random_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> BlockState {
    let blocks: Vec<DMatrix<f64>> = dims
        .iter()
        .map(|&m| {
            let g = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
            &g * g.transpose() + DMatrix::identity(m, m) * 1e-3
        })
        .collect();
    let total: f64 = blocks.iter().map(|b| b.trace()).sum();
    BlockState::state(blocks.into_iter().map(|b| b / total).collect())
        .expect("Gram matrices are positive")
}

/// A random decomposition `φ = Σ_i φ_i` into `parts` positive functionals:
/// `Q_i = Q^{1/2} T_i Q^{1/2}` where `T_i = S^{-1/2} G_i S^{-1/2}` for
/// random positive `G_i` with sum `S`.
pub fn random_decomposition<R: Rng + ?Sized>(
    phi: &BlockState,
    parts: usize,
    rng: &mut R,
) -> Vec<BlockState> {
    let per_block: Vec<Vec<DMatrix<f64>>> = phi
        .blocks()
        .iter()
        .map(|q| {
            let m = q.nrows();
            let gs: Vec<DMatrix<f64>> = (0..parts)
                .map(|_| {
                    let g = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
                    &g * g.transpose() + DMatrix::identity(m, m) * 1e-2
                })
                .collect();
            let s = gs.iter().fold(DMatrix::zeros(m, m), |acc, g| acc + g);
            let s_inv_half = psd_power(&s, -0.5);
            let q_half = psd_power(q, 0.5);
            gs.iter()
                .map(|g| {
                    let t = &s_inv_half * g * &s_inv_half;
                    let p = &q_half * t * &q_half;
                    (&p + p.transpose()) * 0.5
                })
                .collect()
        })
        .collect();
    (0..parts)
        .map(|i| {
            BlockState::positive(per_block.iter().map(|b| b[i].clone()).collect())
                .expect("congruence preserves positivity")
        })
        .collect()
}

fn psd_power(q: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
    let eig = nalgebra::SymmetricEigen::new((q + q.transpose()) * 0.5);
    let vals = eig
        .eigenvalues
        .map(|x| if x > EIGEN_FLOOR { x.powf(p) } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}
