use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{gram_power_iteration, ColumnOperator};

use super::bounds::h_bound_blocks;
use super::state::{Inclusion, STATE_MASS_TOL};

/// A probability distribution on `K × L` supported on `{a_kl ≠ 0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexPoint {
    values: Vec<Vec<f64>>,
}

impl SimplexPoint {
    pub fn new(a: &DMatrix<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != a.nrows() || values.iter().any(|r| r.len() != a.ncols()) {
            return Err(Error::ShapeMismatch(format!(
                "point must be {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let mut total = 0.0;
        for (k, row) in values.iter().enumerate() {
            for (l, &x) in row.iter().enumerate() {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(Error::Validation(format!(
                        "entry ({k}, {l}) = {x} is negative"
                    )));
                }
                if x > 0.0 && a[(k, l)] == 0.0 {
                    return Err(Error::SupportViolation { k, l });
                }
                total += x;
            }
        }
        if (total - 1.0).abs() > STATE_MASS_TOL {
            return Err(Error::Validation(format!("point sums to {total}, not 1")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k][l]
    }
}

/// `f(ξ) = Σ_{k,l} ξ_kl log[ξ¹_k ξ²_l a_kl² / ξ_kl²]` with `0·log = 0`.
pub fn f_simplex(a: &DMatrix<f64>, xi: &SimplexPoint) -> f64 {
    let rows: Vec<f64> = xi.values.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..a.ncols())
        .map(|l| xi.values.iter().map(|r| r[l]).sum())
        .collect();
    let mut total = 0.0;
    for (k, row) in xi.values.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            if x > 0.0 {
                let akl = a[(k, l)];
                total += x * (rows[k] * cols[l] * akl * akl / (x * x)).ln();
            }
        }
    }
    total
}

/// Power iteration tolerance for [`inclusion_norm`].
pub const NORM_TOL: f64 = 1e-12;

/// Operator norm `‖A‖` (largest singular value), by power iteration on
/// `AᵀA` from the all-ones vector.
pub fn inclusion_norm(a: &DMatrix<f64>) -> Result<f64> {
    if a.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let rows: Vec<Vec<f64>> = a.row_iter().map(|r| r.iter().copied().collect()).collect();
    let op = ColumnOperator::from_dense(&rows);
    let res = gram_power_iteration(&op, &vec![1.0; a.ncols()], NORM_TOL, 1_000_000);
    Ok(res.singular_value)
}

// bipartite components of the support graph of `a`; each is (rows, cols)
fn components(a: &DMatrix<f64>) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (kk, ll) = (a.nrows(), a.ncols());
    let mut row_seen = vec![false; kk];
    let mut col_seen = vec![false; ll];
    let mut out = Vec::new();
    for start in 0..kk {
        if row_seen[start] || (0..ll).all(|l| a[(start, l)] == 0.0) {
            continue;
        }
        let (mut rows, mut cols) = (vec![start], Vec::new());
        row_seen[start] = true;
        let mut stack = vec![(true, start)];
        while let Some((is_row, i)) = stack.pop() {
            if is_row {
                for l in 0..ll {
                    if a[(i, l)] != 0.0 && !col_seen[l] {
                        col_seen[l] = true;
                        cols.push(l);
                        stack.push((false, l));
                    }
                }
            } else {
                for k in 0..kk {
                    if a[(k, i)] != 0.0 && !row_seen[k] {
                        row_seen[k] = true;
                        rows.push(k);
                        stack.push((true, k));
                    }
                }
            }
        }
        rows.sort_unstable();
        cols.sort_unstable();
        out.push((rows, cols));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Maximizer {
    pub point: SimplexPoint,
    pub value: f64,
}

/// Maximizer of `f` over the simplex: `ξ_kl = ‖A‖⁻² a_kl (Aw)_k w_l` for
/// the Perron vector `w` of `AᵀA`, taken on the component of the support
/// graph with the largest norm.
pub fn f_maximizer(a: &DMatrix<f64>) -> Result<Maximizer> {
    if a.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for (rows, cols) in components(a) {
        let sub = DMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])]);
        let eig = SymmetricEigen::new(sub.transpose() * &sub);
        let top = eig.eigenvalues.imax();
        let lambda = eig.eigenvalues[top];
        if best.as_ref().is_some_and(|(b, _)| lambda <= *b) {
            continue;
        }
        let w = eig.eigenvectors.column(top).map(f64::abs);
        let aw = &sub * &w;
        let mut values = vec![vec![0.0; a.ncols()]; a.nrows()];
        for (i, &k) in rows.iter().enumerate() {
            for (j, &l) in cols.iter().enumerate() {
                values[k][l] = sub[(i, j)] * aw[i] * w[j] / lambda;
            }
        }
        let total: f64 = values.iter().flatten().sum();
        values.iter_mut().flatten().for_each(|x| *x /= total);
        best = Some((lambda, values));
    }
    let (_, values) = best.expect("nonzero matrix has a component");
    let point = SimplexPoint::new(a, values)?;
    let value = f_simplex(a, &point);
    Ok(Maximizer { point, value })
}

/// Tolerance for `f(ξ) ≤ 2 log ‖A‖`.
pub const TWO_LOG_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLogNormCheck {
    pub h_bound: f64,
    pub f_value: f64,
    pub two_log_norm: f64,
    pub ok: bool,
}

/// Evaluates the block bound and `f` at the joint masses and compares both
/// with `2 log ‖A‖`.
pub fn two_log_norm_check(inc: &Inclusion, masses: &[Vec<f64>]) -> Result<TwoLogNormCheck> {
    let h_bound = h_bound_blocks(inc, masses)?;
    let a = inc.matrix();
    let f_value = f_simplex(&a, &SimplexPoint::new(&a, masses.to_vec())?);
    let two_log_norm = 2.0 * inclusion_norm(&a)?.ln();
    let ok = f_value <= two_log_norm + TWO_LOG_NORM_TOL;
    Ok(TwoLogNormCheck {
        h_bound,
        f_value,
        two_log_norm,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        assert!(
            (inclusion_norm(&DMatrix::from_row_slice(1, 1, &[3.0])).unwrap() - 3.0).abs() < 1e-12
        );
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((inclusion_norm(&a).unwrap() - golden).abs() < 1e-10);
        assert!(matches!(
            inclusion_norm(&DMatrix::zeros(2, 2)),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn scalar_maximizer() {
        let a = DMatrix::from_row_slice(1, 1, &[3.0]);
        let m = f_maximizer(&a).unwrap();
        assert!((m.value - 9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn disconnected_support_picks_larger_block() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let m = f_maximizer(&a).unwrap();
        assert_eq!(m.point.get(1, 1), 1.0);
        assert!((m.value - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn maximizer_reaches_two_log_norm() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 1.0, 3.0, 0.0]);
        let m = f_maximizer(&a).unwrap();
        let bound = 2.0 * inclusion_norm(&a).unwrap().ln();
        assert!((m.value - bound).abs() < 1e-9);
    }

    #[test]
    fn check_on_scalar_inclusion() {
        let inc = Inclusion::new(vec![1], vec![3], vec![vec![3]]).unwrap();
        let c = two_log_norm_check(&inc, &[vec![1.0]]).unwrap();
        assert!(c.ok);
        assert!((c.h_bound - 3f64.ln()).abs() < 1e-12);
        assert!((c.two_log_norm - 9f64.ln()).abs() < 1e-12);
    }
}
