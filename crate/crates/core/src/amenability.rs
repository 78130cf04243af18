//! Lower-bound certificates for `‖Γ_U‖` from truncated windows, and
//! evidence-graded amenability verdicts for dimension functions.
//!
//! A window is a prefix of the basis in declaration order. The truncated
//! operator keeps the window's columns of `Γ_U` in full, so its norm is a
//! lower bound for `‖Γ_U‖` and increases with the window.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::free_word_label;
use crate::fusion::{
    check_dimension_function_on, Combination, DimensionFunction, FusionRing, DEFAULT_DIM_TOL,
};
use crate::linalg::{gram_power_iteration, ColumnOperator};
use crate::walk::{kernel, Measure};

/// Stopping rule for power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Stop once successive Rayleigh quotients differ by less than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormCertificate {
    pub object: String,
    pub window_id: String,
    /// Number of basis elements (columns) in the window.
    pub window: usize,
    pub lower_bound: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Unit vector on the window with `‖Γ' w‖ = lower_bound`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<f64>,
}

/// Columns `0..window` of `Γ_U`, keeping every row they reach.
pub fn truncated_gamma(
    ring: &FusionRing,
    object: &Combination,
    window: usize,
) -> Result<ColumnOperator> {
    if window == 0 {
        return Err(Error::EmptyWindow);
    }
    if window > ring.len() {
        return Err(Error::ShapeMismatch(format!(
            "window {window} exceeds the ring's {} labels",
            ring.len()
        )));
    }
    let mut columns = Vec::with_capacity(window);
    for x in 0..window {
        let mut col: Vec<(usize, f64)> = Vec::new();
        for (s, mult) in object.iter() {
            let p = ring.product(x, s);
            if !p.complete {
                return Err(Error::TruncationOverflow(format!(
                    "column [{}] of Γ needs labels outside the window",
                    ring.label(x)
                )));
            }
            col.extend(p.terms.into_iter().map(|(y, m)| (y, (mult * m) as f64)));
        }
        columns.push(col);
    }
    Ok(ColumnOperator::from_columns(ring.len(), columns))
}

fn certify(
    op: &ColumnOperator,
    start: &[f64],
    opts: IterationOptions,
    object: String,
    window_id: String,
) -> NormCertificate {
    let gp = gram_power_iteration(op, start, opts.tol, opts.max_iter);
    NormCertificate {
        object,
        window_id,
        window: op.n_cols(),
        lower_bound: gp.singular_value,
        residual: gp.residual,
        iterations: gp.iterations,
        converged: gp.converged,
        witness: gp.witness,
    }
}

/// Power iteration on `Γ'ᵀΓ'` from the all-ones vector.
pub fn gamma_norm_lower(
    ring: &FusionRing,
    object: &Combination,
    window: usize,
    opts: IterationOptions,
) -> Result<NormCertificate> {
    let op = truncated_gamma(ring, object, window)?;
    Ok(certify(
        &op,
        &vec![1.0; window],
        opts,
        object.describe(ring),
        format!("prefix:{window}/{}", ring.len()),
    ))
}

/// Window sizes `2, 4, 8, …` below `max`, followed by `max`.
pub fn default_schedule(max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut w = 2;
    while w < max {
        out.push(w);
        w *= 2;
    }
    out.push(max);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    pub gap_tol: f64,
    /// Gap movement between consecutive windows below which the gap counts
    /// as stable.
    pub movement_tol: f64,
    pub dim_tol: f64,
    pub iteration: IterationOptions,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-3,
            movement_tol: 1e-4,
            dim_tol: DEFAULT_DIM_TOL,
            iteration: IterationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VerdictKind {
    /// Some window reached `d(U) − gap_tol`.
    AmenableEvidence,
    /// The gap `d(U) − lower_bound` stayed above `gap_tol` and stopped
    /// moving. Evidence, not proof: windows only bound the norm from below.
    NonamenableCertificate {
        gap: f64,
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleStep {
    pub window: usize,
    pub lower_bound: f64,
    pub gap: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub object: String,
    pub dimension: f64,
    pub steps: Vec<ScheduleStep>,
    pub certificate: NormCertificate,
}

/// Compares `d(U)` with lower bounds for `‖Γ_U‖` over a growing schedule of
/// windows. `d` must be a dimension function on the products `[x]·[U]` the
/// schedule reaches, which is what makes `d(U)` an upper bound. Each window starts from the better of the all-ones vector and
/// the previous witness padded with zeros, so bounds never decrease.
pub fn amenability_verdict(
    ring: &FusionRing,
    d: &DimensionFunction,
    object: &Combination,
    schedule: &[usize],
    opts: VerdictOptions,
) -> Result<Verdict> {
    let mut windows: Vec<usize> = schedule.iter().map(|&w| w.min(ring.len())).collect();
    windows.sort_unstable();
    windows.dedup();
    if windows.is_empty() || windows[0] == 0 {
        return Err(Error::EmptyWindow);
    }
    let reach: Vec<usize> = (0..*windows.last().expect("nonempty")).collect();
    let support: Vec<usize> = object.iter().map(|(u, _)| u).collect();
    let report = check_dimension_function_on(ring, d, opts.dim_tol, &reach, &support);
    if !report.is_empty() {
        let first = &report.violations[0];
        return Err(Error::Validation(format!(
            "not a dimension function ({} violations, first {:?} at {:?}: {})",
            report.violations.len(),
            first.kind,
            first.labels,
            first.detail
        )));
    }
    let dim = d.of(object);
    let name = object.describe(ring);
    let mut steps: Vec<ScheduleStep> = Vec::new();
    let mut last: Option<NormCertificate> = None;
    for &w in &windows {
        let op = truncated_gamma(ring, object, w)?;
        let ones = vec![1.0; w];
        let start = match &last {
            Some(prev) => {
                let mut padded = prev.witness.clone();
                padded.resize(w, 0.0);
                if op.stretch(&padded) > op.stretch(&ones) {
                    padded
                } else {
                    ones
                }
            }
            None => ones,
        };
        let cert = certify(
            &op,
            &start,
            opts.iteration,
            name.clone(),
            format!("prefix:{w}/{}", ring.len()),
        );
        let gap = dim - cert.lower_bound;
        let prev_gap = steps.last().map(|s| s.gap);
        steps.push(ScheduleStep {
            window: w,
            lower_bound: cert.lower_bound,
            gap,
            residual: cert.residual,
            iterations: cert.iterations,
            converged: cert.converged,
        });
        if cert.lower_bound >= dim - opts.gap_tol {
            return Ok(Verdict {
                kind: VerdictKind::AmenableEvidence,
                object: name,
                dimension: dim,
                steps,
                certificate: cert,
            });
        }
        if let Some(pg) = prev_gap {
            if gap > opts.gap_tol && (pg - gap).abs() < opts.movement_tol && cert.converged {
                return Ok(Verdict {
                    kind: VerdictKind::NonamenableCertificate { gap },
                    object: name,
                    dimension: dim,
                    steps,
                    certificate: cert,
                });
            }
        }
        last = Some(cert);
    }
    Ok(Verdict {
        kind: VerdictKind::Inconclusive,
        object: name,
        dimension: dim,
        steps,
        certificate: last.expect("schedule is nonempty"),
    })
}

/// `Γ_S` on the ball of the given radius in the free group of rank `rank`,
/// `S` the sum of the generators and their inverses (`d(S) = 2·rank`).
///
/// The ball is enumerated compactly instead of through a labelled ring:
/// radius 12 in rank 2 already has over a million words.
pub fn free_group_benchmark(
    rank: usize,
    radius: usize,
    opts: IterationOptions,
) -> Result<NormCertificate> {
    if rank < 1 || radius < 1 {
        return Err(Error::InvalidSpec(
            "benchmark needs rank ≥ 1 and radius ≥ 1".into(),
        ));
    }
    let letters: Vec<i8> = (1..=rank as i8).flat_map(|g| [g, -g]).collect();
    // BFS over reduced words; children of node i are contiguous from first_child[i]
    let mut parent: Vec<u32> = vec![0];
    let mut last: Vec<i8> = vec![0];
    let mut depth: Vec<u16> = vec![0];
    let mut first_child: Vec<u64> = Vec::new();
    let mut next_index: u64 = 1;
    let mut i = 0;
    while i < parent.len() {
        first_child.push(next_index);
        for &g in &letters {
            if last[i] == -g {
                continue;
            }
            if (depth[i] as usize) < radius {
                parent.push(i as u32);
                last.push(g);
                depth.push(depth[i] + 1);
            }
            next_index += 1;
        }
        i += 1;
    }
    let n_rows = next_index as usize;
    let columns = (0..parent.len())
        .map(|x| {
            let mut slot = 0u64;
            letters
                .iter()
                .map(|&g| {
                    if last[x] == -g {
                        (parent[x] as usize, 1.0)
                    } else {
                        let row = first_child[x] + slot;
                        slot += 1;
                        (row as usize, 1.0)
                    }
                })
                .collect()
        })
        .collect();
    let op = ColumnOperator::from_columns(n_rows, columns);
    let object = letters
        .iter()
        .map(|&g| format!("[{}]", free_word_label(&[g])))
        .collect::<Vec<_>>()
        .join(" + ");
    Ok(certify(
        &op,
        &vec![1.0; op.n_cols()],
        opts,
        object,
        format!("free_group(rank={rank}):ball({radius})"),
    ))
}

/// A test function `f` and a generator `s` for the invariant-mean probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTest {
    pub generator: usize,
    pub f: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub test: usize,
    pub generator: String,
    pub horizon: usize,
    /// `|A_n(P_s f)(e) − A_n(f)(e)|`.
    pub abs_diff: f64,
    /// `abs_diff` divided by `max(A_n(|f|)(e), A_n(P_s|f|)(e))`.
    pub rel_diff: f64,
}

/// Følner-style diagnostic for invariant means: compares the Cesàro
/// averages of `f` and of `P_s f` seen from the unit. Non-decisive.
pub fn weak_amenability_probe(
    ring: &FusionRing,
    d: &DimensionFunction,
    mu: &Measure,
    tests: &[ProbeTest],
    horizons: &[usize],
) -> Result<Vec<ProbeRow>> {
    let walk = kernel(ring, d, mu)?;
    let n = ring.len();
    let max_h = horizons.iter().copied().max().unwrap_or(0);
    let shifted: Vec<_> = tests
        .iter()
        .map(|t| {
            if t.f.len() != n {
                return Err(Error::ShapeMismatch(
                    "probe function length differs from the ring".into(),
                ));
            }
            let ks = kernel(ring, d, &Measure::point(t.generator))?;
            let abs_f: Vec<f64> = t.f.iter().map(|x| x.abs()).collect();
            let psf = ks.apply_raw(&t.f);
            let ps_abs = ks.apply_raw(&abs_f);
            Ok((ks, psf, ps_abs, abs_f))
        })
        .collect::<Result<_>>()?;

    let mut dist = vec![0.0; n];
    dist[ring.unit()] = 1.0;
    let mut avg_sum = vec![0.0; n];
    let mut rows = Vec::new();
    for step in 1..=max_h {
        avg_sum.iter_mut().zip(&dist).for_each(|(a, b)| *a += b);
        if horizons.contains(&step) {
            let nu: Vec<f64> = avg_sum.iter().map(|x| x / step as f64).collect();
            for (ti, (t, (ks, psf, ps_abs, abs_f))) in tests.iter().zip(&shifted).enumerate() {
                if let Some(bad) = (0..n).find(|&x| nu[x] > 0.0 && !ks.is_row_complete(x)) {
                    return Err(Error::TruncationOverflow(format!(
                        "probe horizon {step} reaches `{}`, where P_s leaves the window",
                        ring.label(bad)
                    )));
                }
                let dot = |g: &[f64]| nu.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
                let abs_diff = (dot(psf) - dot(&t.f)).abs();
                let scale = dot(abs_f).max(dot(ps_abs));
                rows.push(ProbeRow {
                    test: ti,
                    generator: ring.label(t.generator).to_string(),
                    horizon: step,
                    abs_diff,
                    rel_diff: if scale > 0.0 { abs_diff / scale } else { 0.0 },
                });
            }
        }
        if step < max_h {
            dist = walk.step_distribution(&dist)?;
        }
    }
    Ok(rows)
}
