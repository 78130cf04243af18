//! Sparse column operators and power iteration on `AᵀA`.

use rayon::prelude::*;

// below this many stored entries a parallel pass costs more than it saves
const PARALLEL_MIN_ENTRIES: usize = 1 << 16;

/// One compressed orientation of a sparse matrix: the entries of line `i`
/// sit at `ptr[i]..ptr[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
struct Compressed {
    ptr: Vec<usize>,
    idx: Vec<u32>,
    /// `None` when every stored entry is 1.
    vals: Option<Vec<f64>>,
}

impl Compressed {
    fn lines(&self) -> usize {
        self.ptr.len() - 1
    }

    fn dot(&self, i: usize, x: &[f64]) -> f64 {
        let range = self.ptr[i]..self.ptr[i + 1];
        match &self.vals {
            None => self.idx[range].iter().map(|&j| x[j as usize]).sum(),
            Some(vals) => range.map(|k| vals[k] * x[self.idx[k] as usize]).sum(),
        }
    }

    fn gather(&self, x: &[f64], out: &mut [f64]) {
        if self.idx.len() < PARALLEL_MIN_ENTRIES {
            out.iter_mut()
                .enumerate()
                .for_each(|(i, slot)| *slot = self.dot(i, x));
        } else {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, slot)| *slot = self.dot(i, x));
        }
    }

    // the other orientation, with `n_out` lines
    fn transpose(&self, n_out: usize) -> Compressed {
        let mut ptr = vec![0usize; n_out + 1];
        for &j in &self.idx {
            ptr[j as usize + 1] += 1;
        }
        for i in 0..n_out {
            ptr[i + 1] += ptr[i];
        }
        let mut fill = ptr.clone();
        let mut idx = vec![0u32; self.idx.len()];
        let mut vals = self.vals.as_ref().map(|v| vec![0.0; v.len()]);
        for i in 0..self.lines() {
            for k in self.ptr[i]..self.ptr[i + 1] {
                let j = self.idx[k] as usize;
                idx[fill[j]] = i as u32;
                if let (Some(out), Some(src)) = (vals.as_mut(), self.vals.as_ref()) {
                    out[fill[j]] = src[k];
                }
                fill[j] += 1;
            }
        }
        Compressed { ptr, idx, vals }
    }
}

/// A real sparse matrix built column by column. Rows may range beyond the
/// number of columns: a truncated `Γ_U` keeps every row its window columns
/// reach.
///
/// For `AᵀA` products, rows with a single stored entry `(x, a)` only add
/// `a²` to the diagonal entry `x`; they are folded into a diagonal and the
/// remaining core rows are stored in both orientations.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnOperator {
    n_rows: usize,
    cols: Compressed,
    core_cols: Compressed,
    core_rows: Compressed,
    diag: Vec<f64>,
}

impl ColumnOperator {
    pub fn from_columns(n_rows: usize, columns: Vec<Vec<(usize, f64)>>) -> Self {
        assert!(n_rows <= u32::MAX as usize && columns.len() <= u32::MAX as usize);
        let mut ptr = Vec::with_capacity(columns.len() + 1);
        let mut idx = Vec::new();
        let mut vals = Vec::new();
        ptr.push(0);
        for col in columns {
            for (r, v) in col {
                assert!(r < n_rows, "row {r} out of range");
                idx.push(r as u32);
                vals.push(v);
            }
            ptr.push(idx.len());
        }
        let vals = (!vals.iter().all(|&v| v == 1.0)).then_some(vals);
        let cols = Compressed { ptr, idx, vals };

        let mut count = vec![0u32; n_rows];
        for &r in &cols.idx {
            count[r as usize] += 1;
        }
        let mut core_pos = vec![u32::MAX; n_rows];
        let mut n_core = 0u32;
        for (r, &c) in count.iter().enumerate() {
            if c > 1 {
                core_pos[r] = n_core;
                n_core += 1;
            }
        }
        let n_cols = cols.lines();
        let mut diag = vec![0.0; n_cols];
        let mut cptr = Vec::with_capacity(n_cols + 1);
        let mut cidx = Vec::new();
        let mut cvals = cols.vals.as_ref().map(|_| Vec::new());
        cptr.push(0);
        for (x, d) in diag.iter_mut().enumerate() {
            for k in cols.ptr[x]..cols.ptr[x + 1] {
                let a = cols.vals.as_ref().map_or(1.0, |v| v[k]);
                let pos = core_pos[cols.idx[k] as usize];
                if pos == u32::MAX {
                    *d += a * a;
                } else {
                    cidx.push(pos);
                    if let Some(cv) = cvals.as_mut() {
                        cv.push(a);
                    }
                }
            }
            cptr.push(cidx.len());
        }
        let core_cols = Compressed {
            ptr: cptr,
            idx: cidx,
            vals: cvals,
        };
        let core_rows = core_cols.transpose(n_core as usize);
        Self {
            n_rows,
            cols,
            core_cols,
            core_rows,
            diag,
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let columns = (0..n_cols)
            .map(|c| {
                (0..n_rows)
                    .filter(|&r| rows[r][c] != 0.0)
                    .map(|r| (r, rows[r][c]))
                    .collect()
            })
            .collect();
        Self::from_columns(n_rows, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.lines()
    }

    /// `out = A v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (c, &vc) in v.iter().enumerate() {
            if vc == 0.0 {
                continue;
            }
            for k in self.cols.ptr[c]..self.cols.ptr[c + 1] {
                let a = self.cols.vals.as_ref().map_or(1.0, |vals| vals[k]);
                out[self.cols.idx[k] as usize] += a * vc;
            }
        }
    }

    /// `out = Aᵀ u`.
    pub fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        self.cols.gather(u, out);
    }

    /// `out = AᵀA v`; returns `‖A v‖²`. `scratch` holds the core rows of
    /// `A v` and must have length [`ColumnOperator::core_len`].
    pub fn gram(&self, v: &[f64], scratch: &mut [f64], out: &mut [f64]) -> f64 {
        self.core_rows.gather(v, scratch);
        self.core_cols.gather(scratch, out);
        let mut sq: f64 = scratch.iter().map(|x| x * x).sum();
        for ((o, &d), &x) in out.iter_mut().zip(&self.diag).zip(v) {
            *o += d * x;
            sq += d * x * x;
        }
        sq
    }

    /// Number of rows with more than one stored entry.
    pub fn core_len(&self) -> usize {
        self.core_rows.lines()
    }

    /// `‖A v‖ / ‖v‖`.
    pub fn stretch(&self, v: &[f64]) -> f64 {
        let mut out = vec![0.0; self.n_rows];
        self.apply(v, &mut out);
        norm(&out) / norm(v)
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Result of power iteration on `AᵀA`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPower {
    /// `√(vᵀAᵀAv)` for the unit witness `v`.
    pub singular_value: f64,
    /// Relative change of the Rayleigh quotient in the last step.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub witness: Vec<f64>,
}

/// Power iteration on `AᵀA` from `start`, stopping once two successive
/// Rayleigh quotients differ by less than `tol` or after `max_iter` steps.
///
/// Every reported value is the exact stretch of the returned witness, so it
/// is a lower bound for `‖A‖` whether or not the iteration converged.
pub fn gram_power_iteration(
    op: &ColumnOperator,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> GramPower {
    let n = op.n_cols();
    assert_eq!(start.len(), n);
    let mut v = start.to_vec();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    let mut scratch = vec![0.0; op.core_len()];
    let mut w = vec![0.0; n];
    let mut rq = op.gram(&v, &mut scratch, &mut w);
    let mut next = vec![0.0; n];
    let mut w_next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let nw = norm(&w);
        if nw == 0.0 {
            break;
        }
        next.iter_mut().zip(&w).for_each(|(a, b)| *a = b / nw);
        let rq_next = op.gram(&next, &mut scratch, &mut w_next);
        iterations += 1;
        let diff = (rq_next - rq).abs();
        std::mem::swap(&mut v, &mut next);
        std::mem::swap(&mut w, &mut w_next);
        rq = rq_next;
        residual = if rq > 0.0 { diff / rq } else { 0.0 };
        if diff < tol {
            converged = true;
            break;
        }
    }
    if rq == 0.0 {
        residual = 0.0;
    }
    GramPower {
        singular_value: rq.sqrt(),
        residual,
        iterations,
        converged,
        witness: v,
    }
}
