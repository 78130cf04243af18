use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fusion::{DimensionFunction, FusionRing};

/// Tolerance on the total mass of a probability measure.
pub const MASS_TOL: f64 = 1e-12;

/// A finitely supported probability measure on the basis, stored sparsely
/// by basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    weights: BTreeMap<usize, f64>,
}

impl Measure {
    /// Validates nonnegativity and total mass; zero weights are dropped.
    pub fn new(ring: &FusionRing, weights: BTreeMap<usize, f64>) -> Result<Self> {
        let mut total = 0.0;
        for (&i, &w) in &weights {
            if i >= ring.len() {
                return Err(Error::Validation(format!(
                    "measure support index {i} outside the window"
                )));
            }
            if !(w.is_finite() && (0.0..=1.0 + MASS_TOL).contains(&w)) {
                return Err(Error::Validation(format!(
                    "weight {w} of `{}` is not in [0, 1]",
                    ring.label(i)
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!("weights sum to {total}, not 1")));
        }
        Ok(Self {
            weights: weights.into_iter().filter(|&(_, w)| w > 0.0).collect(),
        })
    }

    pub fn from_labels(ring: &FusionRing, weights: &BTreeMap<String, f64>) -> Result<Self> {
        let mut by_index = BTreeMap::new();
        for (l, &w) in weights {
            *by_index.entry(ring.index_of(l)?).or_insert(0.0) += w;
        }
        Self::new(ring, by_index)
    }

    /// The point mass `δ_s`.
    pub fn point(s: usize) -> Self {
        Self {
            weights: BTreeMap::from([(s, 1.0)]),
        }
    }

    /// Uniform measure on the given indices.
    pub fn uniform(support: &[usize]) -> Self {
        let w = 1.0 / support.len() as f64;
        let mut weights = BTreeMap::new();
        for &s in support {
            *weights.entry(s).or_insert(0.0) += w;
        }
        Self { weights }
    }

    pub fn get(&self, s: usize) -> f64 {
        self.weights.get(&s).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&i, &w)| (i, w))
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn to_labels(&self, ring: &FusionRing) -> BTreeMap<String, f64> {
        self.iter()
            .map(|(i, w)| (ring.label(i).to_string(), w))
            .collect()
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for (i, w) in self.iter() {
            v[i] = w;
        }
        v
    }
}

/// `μ(s) = μ(s̄)` for all `s`, compared exactly.
pub fn is_symmetric(mu: &Measure, ring: &FusionRing) -> bool {
    mu.iter().all(|(s, w)| mu.get(ring.dual(s)) == w)
}

/// `(ν*μ)(t) = Σ ν(s) μ(r) m^t_{sr} d(t) / (d(s) d(r))`.
pub fn convolve(
    ring: &FusionRing,
    d: &DimensionFunction,
    nu: &Measure,
    mu: &Measure,
) -> Result<Measure> {
    d.ensure_covers(ring)?;
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for (s, ws) in nu.iter() {
        for (r, wr) in mu.iter() {
            let p = ring.product(s, r);
            if !p.complete {
                return Err(Error::TruncationOverflow(format!(
                    "[{}]·[{}] leaves the window",
                    ring.label(s),
                    ring.label(r)
                )));
            }
            let scale = ws * wr / (d.get(s) * d.get(r));
            for (t, m) in p.terms {
                *out.entry(t).or_insert(0.0) += scale * m as f64 * d.get(t);
            }
        }
    }
    Ok(Measure {
        weights: out.into_iter().filter(|&(_, w)| w > 0.0).collect(),
    })
}
