use std::collections::{BTreeSet, HashSet};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::{DimensionFunction, FusionRing};

use super::{kernel, Kernel, Measure};

/// Singular values below this are treated as zero in `harmonic_space`.
pub const NULL_SPACE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Generation {
    /// The union of `supp μ^n`, `n ≤ depth`, covers the interior.
    Yes { depth: usize },
    /// Depth exhausted before coverage or a cycle was seen.
    NoWithinDepth,
    /// Finite ring: the supports cycle without ever covering the basis.
    No,
}

/// Breadth-first search over the supports of `μ, μ², …`.
pub fn is_generating(ring: &FusionRing, mu: &Measure, max_depth: usize) -> Generation {
    let target: BTreeSet<usize> = ring.interior_indices().into_iter().collect();
    let gens = mu.support();
    let mut current: BTreeSet<usize> = gens.iter().copied().collect();
    let mut union: BTreeSet<usize> = BTreeSet::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for depth in 1..=max_depth {
        union.extend(current.iter().copied());
        if target.is_subset(&union) {
            return Generation::Yes { depth };
        }
        if ring.is_finite() && !seen.insert(current.iter().copied().collect()) {
            return Generation::No;
        }
        let mut next = BTreeSet::new();
        for &s in &current {
            for &r in &gens {
                next.extend(ring.product(s, r).terms.into_iter().map(|(t, _)| t));
            }
        }
        current = next;
    }
    Generation::NoWithinDepth
}

/// `sup_t |Σ_s d(s)² p_μ(s,t) − d(t)²| / d(t)²` over the columns whose
/// contributing rows all lie in the window.
pub fn stationary_check(ring: &FusionRing, d: &DimensionFunction, mu: &Measure) -> Result<f64> {
    let k = kernel(ring, d, mu)?;
    let n = ring.len();
    let mut col = vec![0.0; n];
    for s in 0..n {
        let ds2 = d.get(s) * d.get(s);
        let (cols, vals) = k.row(s);
        for (&t, &v) in cols.iter().zip(vals) {
            col[t] += ds2 * v;
        }
    }
    let support = mu.support();
    let mut worst: f64 = 0.0;
    for t in 0..n {
        // rows s with p(s,t) > 0 satisfy s ∈ r̄·t
        let complete = support
            .iter()
            .all(|&r| ring.product(ring.dual(r), t).complete);
        if complete {
            let dt2 = d.get(t) * d.get(t);
            worst = worst.max((col[t] - dt2).abs() / dt2);
        }
    }
    Ok(worst)
}

/// An orthonormal basis of the bounded harmonic functions of a finite kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicBasis {
    pub vectors: Vec<Vec<f64>>,
}

impl HarmonicBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Null space of `K − I` from a singular value decomposition.
pub fn harmonic_space(k: &Kernel) -> Result<HarmonicBasis> {
    if !k.is_finite() {
        return Err(Error::NotFinite);
    }
    let n = k.len();
    let dense = k.to_dense();
    let m = DMatrix::from_fn(n, n, |i, j| dense[i][j] - if i == j { 1.0 } else { 0.0 });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut vectors: Vec<Vec<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &sv)| sv < NULL_SPACE_THRESHOLD)
        .map(|(i, _)| {
            let mut v: Vec<f64> = v_t.row(i).iter().copied().collect();
            let lead = v
                .iter()
                .copied()
                .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    vectors.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(HarmonicBasis { vectors })
}

/// One Cesàro average `A_n f = n⁻¹ Σ_{k<n} P^k f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroAverage {
    pub n: usize,
    pub values: Vec<f64>,
    /// Rows where some `P^k f`, `k < n`, used an incomplete row.
    pub unreliable: Vec<bool>,
}

/// Cesàro averages of `P^k f` for each requested `n ≥ 1`.
pub fn cesaro_mean(k: &Kernel, f: &[f64], ns: &[usize]) -> Result<Vec<CesaroAverage>> {
    if f.len() != k.len() {
        return Err(Error::ShapeMismatch(
            "function length differs from kernel size".into(),
        ));
    }
    let max_n = ns.iter().copied().max().unwrap_or(0);
    let mut sum = vec![0.0; k.len()];
    let mut power = f.to_vec();
    let mut out = Vec::new();
    for step in 1..=max_n {
        sum.iter_mut().zip(&power).for_each(|(a, b)| *a += b);
        if ns.contains(&step) {
            out.push(CesaroAverage {
                n: step,
                values: sum.iter().map(|x| x / step as f64).collect(),
                unreliable: k.unreliable_within(step - 1),
            });
        }
        power = k.apply_raw(&power);
    }
    out.sort_by_key(|a| ns.iter().position(|&n| n == a.n));
    Ok(out)
}

/// `δ_m = sup_s ‖p^m(s,·) − p^{m+k}(s,·)‖₁` over interior `s`, for
/// `m = 1..=m_max`. A total-variation proxy for the operator-norm decay in
/// the zero–two law.
pub fn zero_two_diagnostic(
    ring: &FusionRing,
    d: &DimensionFunction,
    mu: &Measure,
    m_max: usize,
    lag: usize,
) -> Result<Vec<f64>> {
    let kern = kernel(ring, d, mu)?;
    let horizon = m_max + lag;
    let n = ring.len();
    let per_state: Vec<Vec<f64>> = ring
        .interior_indices()
        .into_par_iter()
        .map(|s| {
            let mut dists = Vec::with_capacity(horizon + 1);
            let mut dist = vec![0.0; n];
            dist[s] = 1.0;
            dists.push(dist.clone());
            for _ in 0..horizon {
                dist = kern.step_distribution(&dist)?;
                dists.push(dist.clone());
            }
            Ok((1..=m_max)
                .map(|m| {
                    dists[m]
                        .iter()
                        .zip(&dists[m + lag])
                        .map(|(a, b)| (a - b).abs())
                        .sum()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..m_max)
        .map(|i| per_state.iter().map(|row| row[i]).fold(0.0, f64::max))
        .collect())
}
