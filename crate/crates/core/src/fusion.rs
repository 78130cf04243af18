//! Fusion rings: basis, unit, dual involution and nonnegative integer
//! structure constants `m^t_{rs}`, together with axiom validation,
//! dimension functions and the fusion operators `Γ_U`.
//!
//! A ring may be a finite window into an infinite ring. Such rings are
//! flagged `truncated` and carry an interior subset; axioms are only
//! checked on triples whose products are known to stay inside the window.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for dimension-function checks.
pub const DEFAULT_DIM_TOL: f64 = 1e-9;

/// The decomposition of a product `[r]·[s]` inside the window.
///
/// `terms` is sorted by basis index and never holds zero multiplicities.
/// `complete` is false when part of the product lies outside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub terms: Vec<(usize, u64)>,
    pub complete: bool,
}

impl Product {
    pub fn coefficient(&self, t: usize) -> u64 {
        self.terms
            .binary_search_by_key(&t, |&(i, _)| i)
            .map(|pos| self.terms[pos].1)
            .unwrap_or(0)
    }
}

/// Source of structure constants for a ring, indexed by basis position.
pub trait StructureConstants: Send + Sync + fmt::Debug {
    fn product(&self, r: usize, s: usize) -> Product;
}

#[derive(Debug)]
struct TableRule {
    entries: HashMap<(usize, usize), Vec<(usize, u64)>>,
    // None for finite rings; interior flags for truncated ones.
    interior: Option<Vec<bool>>,
}

impl StructureConstants for TableRule {
    fn product(&self, r: usize, s: usize) -> Product {
        let terms = self.entries.get(&(r, s)).cloned().unwrap_or_default();
        let complete = match &self.interior {
            None => true,
            Some(inner) => inner[r] && inner[s],
        };
        Product { terms, complete }
    }
}

/// A fusion ring with opaque string labels in declaration order.
#[derive(Clone)]
pub struct FusionRing {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    unit: usize,
    dual: Vec<usize>,
    interior: Vec<bool>,
    truncated: bool,
    rule: Arc<dyn StructureConstants>,
}

impl fmt::Debug for FusionRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FusionRing")
            .field("len", &self.labels.len())
            .field("unit", &self.labels[self.unit])
            .field("truncated", &self.truncated)
            .field("rule", &self.rule)
            .finish()
    }
}

/// One structure constant as it appears in the ring file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficient {
    pub r: String,
    pub s: String,
    pub t: String,
    pub m: u64,
}

impl FusionRing {
    /// Builds a ring from explicit structure constants. Triples not listed
    /// have multiplicity zero. Passing `interior` marks the ring truncated
    /// unless the interior is the whole basis.
    pub fn from_table(
        labels: Vec<String>,
        unit: &str,
        dual: &BTreeMap<String, String>,
        coeffs: &[Coefficient],
        interior: Option<&[String]>,
    ) -> Result<Self> {
        let index = build_index(&labels)?;
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownLabel(l.into()))
        };
        let unit = lookup(unit)?;
        let mut dual_vec = vec![usize::MAX; labels.len()];
        for (a, b) in dual {
            dual_vec[lookup(a)?] = lookup(b)?;
        }
        if let Some(pos) = dual_vec.iter().position(|&d| d == usize::MAX) {
            return Err(Error::Validation(format!(
                "dual of `{}` not given",
                labels[pos]
            )));
        }
        let (interior_flags, truncated) = match interior {
            None => (vec![true; labels.len()], false),
            Some(list) => {
                let mut flags = vec![false; labels.len()];
                for l in list {
                    flags[lookup(l)?] = true;
                }
                let all = flags.iter().all(|&f| f);
                (flags, !all)
            }
        };
        let mut entries: HashMap<(usize, usize), BTreeMap<usize, u64>> = HashMap::new();
        for c in coeffs {
            let key = (lookup(&c.r)?, lookup(&c.s)?);
            let t = lookup(&c.t)?;
            if c.m > 0 {
                let slot = entries.entry(key).or_default();
                if slot.insert(t, c.m).is_some() {
                    return Err(Error::Validation(format!(
                        "duplicate coefficient ({}, {}, {})",
                        c.r, c.s, c.t
                    )));
                }
            }
        }
        let entries = entries
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect();
        let rule = TableRule {
            entries,
            interior: truncated.then(|| interior_flags.clone()),
        };
        Ok(Self {
            labels,
            index,
            unit,
            dual: dual_vec,
            interior: interior_flags,
            truncated,
            rule: Arc::new(rule),
        })
    }

    /// Builds a ring backed by a rule that computes products on demand.
    pub fn from_rule(
        labels: Vec<String>,
        unit: usize,
        dual: Vec<usize>,
        interior: Vec<bool>,
        truncated: bool,
        rule: Arc<dyn StructureConstants>,
    ) -> Result<Self> {
        let index = build_index(&labels)?;
        if dual.len() != labels.len() || interior.len() != labels.len() || unit >= labels.len() {
            return Err(Error::ShapeMismatch(
                "ring rule arrays differ in length".into(),
            ));
        }
        Ok(Self {
            labels,
            index,
            unit,
            dual,
            interior,
            truncated,
            rule,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, s: usize) -> usize {
        self.dual[s]
    }

    pub fn is_interior(&self, s: usize) -> bool {
        self.interior[s]
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.interior[i]).collect()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_finite(&self) -> bool {
        !self.truncated
    }

    /// `[r]·[s]` restricted to the window.
    pub fn product(&self, r: usize, s: usize) -> Product {
        self.rule.product(r, s)
    }

    /// `m^t_{rs}`.
    pub fn coefficient(&self, r: usize, s: usize, t: usize) -> u64 {
        self.product(r, s).coefficient(t)
    }

    /// All nonzero coefficients with `r, s, t` in the window, ordered by
    /// `(r, s, t)` basis index.
    pub fn coefficients(&self) -> Vec<(usize, usize, usize, u64)> {
        let n = self.len();
        let mut out = Vec::new();
        for r in 0..n {
            for s in 0..n {
                for (t, m) in self.product(r, s).terms {
                    out.push((r, s, t, m));
                }
            }
        }
        out
    }
}

fn build_index(labels: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::Validation(format!("duplicate label `{l}`")));
        }
    }
    if labels.is_empty() {
        return Err(Error::Validation("empty basis".into()));
    }
    Ok(index)
}

/// A formal nonnegative integer combination of basis elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Combination(BTreeMap<usize, u64>);

impl Combination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut c = Self::new();
        c.add(i, 1);
        c
    }

    pub fn from_labels(ring: &FusionRing, terms: &[(&str, u64)]) -> Result<Self> {
        let mut c = Self::new();
        for &(l, m) in terms {
            c.add(ring.index_of(l)?, m);
        }
        Ok(c)
    }

    pub fn add(&mut self, i: usize, m: u64) {
        if m > 0 {
            *self.0.entry(i).or_insert(0) += m;
        }
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().map(|(&i, &m)| (i, m))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, k: u64) -> Self {
        let mut c = Self::new();
        for (i, m) in self.iter() {
            c.add(i, m * k);
        }
        c
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut c = self.clone();
        for (i, m) in other.iter() {
            c.add(i, m);
        }
        c
    }

    /// Human-readable form such as `2[1] + [3]`.
    pub fn describe(&self, ring: &FusionRing) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.iter()
            .map(|(i, m)| {
                if m == 1 {
                    format!("[{}]", ring.label(i))
                } else {
                    format!("{m}[{}]", ring.label(i))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Bilinear extension of the ring product.
pub fn multiply(ring: &FusionRing, a: &Combination, b: &Combination) -> Result<Combination> {
    let mut out = Combination::new();
    for (r, ma) in a.iter() {
        for (s, mb) in b.iter() {
            let p = ring.product(r, s);
            if !p.complete {
                return Err(Error::TruncationOverflow(format!(
                    "[{}]·[{}] leaves the window",
                    ring.label(r),
                    ring.label(s)
                )));
            }
            for (t, m) in p.terms {
                out.add(t, ma * mb * m);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DualInvolution,
    InteriorNotDualClosed,
    UnitLaw,
    Duality,
    DualSymmetry,
    Associativity,
    DimensionMissing,
    DimensionPositivity,
    DimensionUnit,
    DimensionDual,
    DimensionMultiplicativity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub labels: Vec<String>,
    pub detail: String,
}

/// Violated invariants, one entry per offending tuple. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, ring: &FusionRing, idx: &[usize], detail: String) {
        self.violations.push(Violation {
            kind,
            labels: idx.iter().map(|&i| ring.label(i).to_string()).collect(),
            detail,
        });
    }
}

fn terms_to_map(terms: &[(usize, u64)]) -> BTreeMap<usize, u64> {
    terms.iter().copied().collect()
}

/// Checks the fusion-ring axioms on the interior of the window.
pub fn validate_ring(ring: &FusionRing) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = ring.len();
    let e = ring.unit();

    for s in 0..n {
        let sb = ring.dual(s);
        if sb >= n || ring.dual(sb) != s {
            report.push(
                ViolationKind::DualInvolution,
                ring,
                &[s],
                "dual is not an involution".into(),
            );
        } else if ring.is_interior(s) && !ring.is_interior(sb) {
            report.push(
                ViolationKind::InteriorNotDualClosed,
                ring,
                &[s, sb],
                "dual of an interior label lies outside the interior".into(),
            );
        }
    }
    if ring.dual(e) != e {
        report.push(
            ViolationKind::DualInvolution,
            ring,
            &[e],
            "unit is not self-dual".into(),
        );
    }
    if !report.is_empty() {
        return report;
    }

    let interior = ring.interior_indices();

    for &s in &interior {
        for (p, side) in [(ring.product(e, s), "e·s"), (ring.product(s, e), "s·e")] {
            if p.complete && p.terms != vec![(s, 1)] {
                report.push(
                    ViolationKind::UnitLaw,
                    ring,
                    &[s],
                    format!("{side} is not s"),
                );
            }
        }
    }

    for &r in &interior {
        for &s in &interior {
            let rs = ring.product(r, s);
            if !rs.complete {
                continue;
            }
            let expect = u64::from(r == ring.dual(s));
            let got = rs.coefficient(e);
            if got != expect {
                report.push(
                    ViolationKind::Duality,
                    ring,
                    &[r, s],
                    format!("m^e_rs = {got}, expected {expect}"),
                );
            }
            let sr_dual = ring.product(ring.dual(s), ring.dual(r));
            if sr_dual.complete {
                let lhs = terms_to_map(&rs.terms);
                let rhs: BTreeMap<usize, u64> = sr_dual
                    .terms
                    .iter()
                    .map(|&(t, m)| (ring.dual(t), m))
                    .collect();
                if lhs != rhs {
                    report.push(
                        ViolationKind::DualSymmetry,
                        ring,
                        &[r, s],
                        "m^t_rs differs from m^(t̄)_(s̄ r̄)".into(),
                    );
                }
            }
        }
    }

    for &r in &interior {
        for &s in &interior {
            let rs = ring.product(r, s);
            if !rs.complete {
                continue;
            }
            for &t in &interior {
                let st = ring.product(s, t);
                if !st.complete {
                    continue;
                }
                let Some(left) = expand(&rs.terms, |u| ring.product(u, t)) else {
                    continue;
                };
                let Some(right) = expand(&st.terms, |u| ring.product(r, u)) else {
                    continue;
                };
                if left != right {
                    report.push(
                        ViolationKind::Associativity,
                        ring,
                        &[r, s, t],
                        "(r·s)·t differs from r·(s·t)".into(),
                    );
                }
            }
        }
    }
    report
}

// Σ_u m_u · f(u), or None if some product is incomplete.
fn expand(terms: &[(usize, u64)], f: impl Fn(usize) -> Product) -> Option<BTreeMap<usize, u64>> {
    let mut out = BTreeMap::new();
    for &(u, mu) in terms {
        let p = f(u);
        if !p.complete {
            return None;
        }
        for (v, m) in p.terms {
            *out.entry(v).or_insert(0) += mu * m;
        }
    }
    Some(out)
}

/// Strictly positive values on the basis, indexed by basis position.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionFunction {
    values: Vec<f64>,
}

impl DimensionFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(ring: &FusionRing, c: f64) -> Self {
        Self::new(vec![c; ring.len()])
    }

    /// Reads values keyed by label; every basis label must be present.
    pub fn from_labels(ring: &FusionRing, values: &BTreeMap<String, f64>) -> Result<Self> {
        let mut out = vec![f64::NAN; ring.len()];
        for (l, &v) in values {
            out[ring.index_of(l)?] = v;
        }
        if let Some(i) = out.iter().position(|v| v.is_nan()) {
            return Err(Error::DimensionMismatch(format!(
                "no value for label `{}`",
                ring.label(i)
            )));
        }
        Ok(Self::new(out))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `d(U) = Σ mult_U(s) d(s)`.
    pub fn of(&self, object: &Combination) -> f64 {
        object.iter().map(|(i, m)| m as f64 * self.values[i]).sum()
    }

    pub fn ensure_covers(&self, ring: &FusionRing) -> Result<()> {
        if self.values.len() != ring.len() {
            return Err(Error::DimensionMismatch(format!(
                "dimension function has {} values, ring has {} labels",
                self.values.len(),
                ring.len()
            )));
        }
        Ok(())
    }
}

/// Checks positivity, `d(e) = 1`, dual invariance and multiplicativity on
/// interior pairs with complete products.
///
/// Differences are compared against `tol · max(1, d(r)d(s))`, which is the
/// absolute tolerance for dimensions of order one.
pub fn check_dimension_function(
    ring: &FusionRing,
    d: &DimensionFunction,
    tol: f64,
) -> ValidationReport {
    let mut report = check_dimension_function_pointwise(ring, d, tol);
    if d.len() == ring.len() {
        let interior = ring.interior_indices();
        check_multiplicativity(ring, d, tol, &interior, &interior, &mut report);
    }
    report
}

fn check_dimension_function_pointwise(
    ring: &FusionRing,
    d: &DimensionFunction,
    tol: f64,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if d.len() != ring.len() {
        report.violations.push(Violation {
            kind: ViolationKind::DimensionMissing,
            labels: vec![],
            detail: format!("{} values for {} labels", d.len(), ring.len()),
        });
        return report;
    }
    for s in 0..ring.len() {
        let v = d.get(s);
        if !(v.is_finite() && v > 0.0) {
            report.push(
                ViolationKind::DimensionPositivity,
                ring,
                &[s],
                format!("d = {v}"),
            );
        }
    }
    let e = ring.unit();
    if (d.get(e) - 1.0).abs() > tol {
        report.push(
            ViolationKind::DimensionUnit,
            ring,
            &[e],
            format!("d(e) = {}", d.get(e)),
        );
    }
    for s in 0..ring.len() {
        let sb = ring.dual(s);
        if s < sb && (d.get(s) - d.get(sb)).abs() > tol * d.get(s).abs().max(1.0) {
            report.push(
                ViolationKind::DimensionDual,
                ring,
                &[s, sb],
                format!("d(s) = {}, d(s̄) = {}", d.get(s), d.get(sb)),
            );
        }
    }
    report
}

/// Like [`check_dimension_function`], but checks multiplicativity only on
/// the products `r·s` with `r ∈ left`, `s ∈ right`. Positivity, the unit and
/// duality are still checked on the whole basis.
pub fn check_dimension_function_on(
    ring: &FusionRing,
    d: &DimensionFunction,
    tol: f64,
    left: &[usize],
    right: &[usize],
) -> ValidationReport {
    let mut report = check_dimension_function_pointwise(ring, d, tol);
    if report.is_empty() {
        check_multiplicativity(ring, d, tol, left, right, &mut report);
    }
    report
}

fn check_multiplicativity(
    ring: &FusionRing,
    d: &DimensionFunction,
    tol: f64,
    left: &[usize],
    right: &[usize],
    report: &mut ValidationReport,
) {
    for &r in left {
        for &s in right {
            let p = ring.product(r, s);
            if !p.complete {
                continue;
            }
            let lhs = d.get(r) * d.get(s);
            let rhs: f64 = p.terms.iter().map(|&(t, m)| m as f64 * d.get(t)).sum();
            if (lhs - rhs).abs() > tol * lhs.abs().max(1.0) {
                report.push(
                    ViolationKind::DimensionMultiplicativity,
                    ring,
                    &[r, s],
                    format!("d(r)d(s) = {lhs}, Σ m d(t) = {rhs}"),
                );
            }
        }
    }
}

/// A fusion operator `Γ_U`, stored column by column: column `x` holds the
/// expansion of `[x]·[U]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionOperator {
    pub object: Combination,
    columns: Vec<Vec<(usize, u64)>>,
    complete: Vec<bool>,
}

impl FusionOperator {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, x: usize) -> &[(usize, u64)] {
        &self.columns[x]
    }

    pub fn is_column_complete(&self, x: usize) -> bool {
        self.complete[x]
    }

    /// Entry `(y, x) = Σ_s mult_U(s) m^y_{xs}`.
    pub fn entry(&self, y: usize, x: usize) -> u64 {
        self.columns[x]
            .binary_search_by_key(&y, |&(i, _)| i)
            .map(|p| self.columns[x][p].1)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let n = self.dim();
        let mut out = vec![vec![0; n]; n];
        for (x, col) in self.columns.iter().enumerate() {
            for &(y, m) in col {
                out[y][x] = m;
            }
        }
        out
    }

    /// Errors if any of the first `n` columns needs labels outside the window.
    pub fn ensure_complete(&self, ring: &FusionRing, n: usize) -> Result<()> {
        match (0..n.min(self.dim())).find(|&x| !self.complete[x]) {
            Some(x) => Err(Error::TruncationOverflow(format!(
                "column [{}] of Γ needs labels outside the window",
                ring.label(x)
            ))),
            None => Ok(()),
        }
    }
}

/// `Γ_U` on the whole window; incomplete columns are flagged, not zeroed.
pub fn gamma_matrix(ring: &FusionRing, object: &Combination) -> FusionOperator {
    let n = ring.len();
    let mut columns = Vec::with_capacity(n);
    let mut complete = Vec::with_capacity(n);
    for x in 0..n {
        let mut col: BTreeMap<usize, u64> = BTreeMap::new();
        let mut ok = true;
        for (s, mult) in object.iter() {
            let p = ring.product(x, s);
            ok &= p.complete;
            for (y, m) in p.terms {
                *col.entry(y).or_insert(0) += mult * m;
            }
        }
        columns.push(col.into_iter().collect());
        complete.push(ok);
    }
    FusionOperator {
        object: object.clone(),
        columns,
        complete,
    }
}

/// Frobenius–Perron dimensions of a finite ring: the Perron eigenvector of
/// `Γ_{Σ s}` normalized so that `d(e) = 1`.
pub fn fp_dimensions(ring: &FusionRing) -> Result<DimensionFunction> {
    if ring.is_truncated() {
        return Err(Error::NotFinite);
    }
    let n = ring.len();
    let all = {
        let mut c = Combination::new();
        for i in 0..n {
            c.add(i, 1);
        }
        c
    };
    let gamma = gamma_matrix(ring, &all);

    // connectivity of the fusion graph x -> y
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([ring.unit()]);
    seen[ring.unit()] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, _) in gamma.column(x) {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::NotConnected);
    }

    // d is the left Perron vector: Σ_y d(y) Γ_{yx} = (Σ_s d(s)) d(x).
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for _ in 0..200_000 {
        for (x, slot) in next.iter_mut().enumerate() {
            *slot = gamma.column(x).iter().map(|&(y, m)| m as f64 * v[y]).sum();
        }
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        next.iter_mut().for_each(|a| *a /= norm);
        let change = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if change < 1e-15 {
            break;
        }
    }
    let de = v[ring.unit()];
    Ok(DimensionFunction::new(v.iter().map(|a| a / de).collect()))
}
