use crate::error::{Error, Result};
use crate::fusion::{DimensionFunction, FusionRing};

use super::Measure;

/// Tolerance on row sums (plus leak) of a transition kernel.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Transition kernel `p_μ(s, t)` stored as sparse rows in basis order.
///
/// Rows whose fusion products leave the window are flagged incomplete and
/// carry the missing mass in `leak`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    leak: Vec<f64>,
    incomplete: Vec<bool>,
    finite: bool,
    dims: DimensionFunction,
}

/// `p_μ(s,t) = Σ_r μ(r) m^t_{rs} d(t) / (d(r) d(s))`.
pub fn kernel(ring: &FusionRing, d: &DimensionFunction, mu: &Measure) -> Result<Kernel> {
    d.ensure_covers(ring)?;
    let n = ring.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut leak = Vec::with_capacity(n);
    let mut incomplete = Vec::with_capacity(n);
    row_ptr.push(0);
    let mut acc: Vec<(usize, f64)> = Vec::new();
    for s in 0..n {
        acc.clear();
        let mut open = false;
        for (r, w) in mu.iter() {
            let p = ring.product(r, s);
            open |= !p.complete;
            let scale = w / (d.get(r) * d.get(s));
            for (t, m) in p.terms {
                acc.push((t, scale * m as f64 * d.get(t)));
            }
        }
        acc.sort_by_key(|&(t, _)| t);
        let start = cols.len();
        for &(t, v) in acc.iter() {
            if cols.len() > start && *cols.last().unwrap() == t {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(t);
                vals.push(v);
            }
        }
        let row_sum: f64 = vals[start..].iter().sum();
        leak.push(if open { (1.0 - row_sum).max(0.0) } else { 0.0 });
        incomplete.push(open);
        row_ptr.push(cols.len());
    }
    Ok(Kernel {
        row_ptr,
        cols,
        vals,
        leak,
        incomplete,
        finite: ring.is_finite(),
        dims: d.clone(),
    })
}

/// Result of `P_μ f`; values on unreliable rows miss mass outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub values: Vec<f64>,
    pub unreliable: Vec<bool>,
}

impl Kernel {
    pub fn len(&self) -> usize {
        self.leak.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leak.is_empty()
    }

    pub fn row(&self, s: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[s]..self.row_ptr[s + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn entry(&self, s: usize, t: usize) -> f64 {
        let (cols, vals) = self.row(s);
        cols.binary_search(&t).map(|p| vals[p]).unwrap_or(0.0)
    }

    pub fn row_sum(&self, s: usize) -> f64 {
        self.row(s).1.iter().sum()
    }

    pub fn leak(&self, s: usize) -> f64 {
        self.leak[s]
    }

    pub fn is_row_complete(&self, s: usize) -> bool {
        !self.incomplete[s]
    }

    pub fn is_leak_free(&self) -> bool {
        self.incomplete.iter().all(|&b| !b)
    }

    /// True when the kernel came from a finite ring.
    pub fn is_finite(&self) -> bool {
        self.finite
    }

    pub fn dims(&self) -> &DimensionFunction {
        &self.dims
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n)
            .map(|s| {
                let mut row = vec![0.0; n];
                let (cols, vals) = self.row(s);
                for (&t, &v) in cols.iter().zip(vals) {
                    row[t] = v;
                }
                row
            })
            .collect()
    }

    /// `(P f)(s) = Σ_t p(s,t) f(t)` without reliability tracking.
    pub(crate) fn apply_raw(&self, f: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|s| {
                let (cols, vals) = self.row(s);
                cols.iter().zip(vals).map(|(&t, &v)| v * f[t]).sum()
            })
            .collect()
    }

    /// Row vector times kernel: the distribution one step later.
    /// Errors if mass sits on an incomplete row.
    pub fn step_distribution(&self, dist: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        for (s, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            if self.incomplete[s] {
                return Err(Error::TruncationOverflow(format!(
                    "walk reaches row {s}, whose products leave the window"
                )));
            }
            let (cols, vals) = self.row(s);
            for (&t, &v) in cols.iter().zip(vals) {
                out[t] += w * v;
            }
        }
        Ok(out)
    }

    /// Rows from which the walk can meet an incomplete row within `steps`
    /// steps (the row visited at step `steps` itself is not used).
    pub fn unreliable_within(&self, steps: usize) -> Vec<bool> {
        let n = self.len();
        if steps == 0 {
            return vec![false; n];
        }
        let mut bad = self.incomplete.clone();
        for _ in 1..steps {
            let next: Vec<bool> = (0..n)
                .map(|s| self.incomplete[s] || self.row(s).0.iter().any(|&t| bad[t]))
                .collect();
            if next == bad {
                break;
            }
            bad = next;
        }
        bad
    }
}

/// `(P_μ f)(s) = Σ_t p_μ(s,t) f(t)`; incomplete rows are flagged.
pub fn apply_p(k: &Kernel, f: &[f64]) -> Result<Applied> {
    if f.len() != k.len() {
        return Err(Error::ShapeMismatch(format!(
            "function has {} values, kernel has {} rows",
            f.len(),
            k.len()
        )));
    }
    Ok(Applied {
        values: k.apply_raw(f),
        unreliable: k.incomplete.clone(),
    })
}
