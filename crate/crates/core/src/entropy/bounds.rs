use serde::Serialize;

use crate::error::{Error, Result};

use super::state::{
    check_mass_shape, rel_entropy, restrict_state, vn_entropy, BlockState, Inclusion,
    RelativeEntropy,
};

/// Tolerance for a decomposition to sum to the state it decomposes.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

struct Marginals {
    sub: Vec<f64>,
    amb: Vec<f64>,
}

fn marginals(masses: &[Vec<f64>]) -> Marginals {
    let ll = masses.first().map_or(0, Vec::len);
    Marginals {
        sub: masses.iter().map(|row| row.iter().sum()).collect(),
        amb: (0..ll)
            .map(|l| masses.iter().map(|row| row[l]).sum())
            .collect(),
    }
}

fn check_masses(inc: &Inclusion, masses: &[Vec<f64>]) -> Result<()> {
    check_mass_shape(inc, masses)?;
    let mut total = 0.0;
    for (k, row) in masses.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::Validation(format!(
                    "mass ({k}, {l}) = {x} is negative"
                )));
            }
            if x > 0.0 && inc.mult(k, l) == 0 {
                return Err(Error::SupportViolation { k, l });
            }
            total += x;
        }
    }
    if (total - 1.0).abs() > super::state::STATE_MASS_TOL {
        return Err(Error::Validation(format!("masses sum to {total}, not 1")));
    }
    Ok(())
}

/// `Σ_{k,l} φ(z_k w_l) log[φ(z_k) φ(w_l) a_kl min{a_kl, n_k} / φ(z_k w_l)²]`,
/// the upper bound for `H_φ(M|N)`, attained by tracial states.
pub fn h_bound_blocks(inc: &Inclusion, masses: &[Vec<f64>]) -> Result<f64> {
    check_masses(inc, masses)?;
    let mg = marginals(masses);
    let mut total = 0.0;
    for (k, row) in masses.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            if x > 0.0 {
                let a = inc.mult(k, l) as f64;
                let amin = a.min(inc.sub_dims()[k] as f64);
                total += x * (mg.sub[k] * mg.amb[l] * a * amin / (x * x)).ln();
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBounds {
    pub lower: f64,
    /// `S(ψ) − S(ψ|_N)`, computed from the spectra.
    pub gap: f64,
    pub upper: f64,
}

/// Two-sided mass bounds on `S(ψ) − S(ψ|_N)` alongside the gap itself.
pub fn entropy_gap_bounds(inc: &Inclusion, psi: &BlockState) -> Result<GapBounds> {
    let masses = inc.joint_masses(psi)?;
    let mg = marginals(&masses);
    let (mut lower, mut upper) = (0.0, 0.0);
    for (k, row) in masses.iter().enumerate() {
        for (l, &x) in row.iter().enumerate() {
            if x > 0.0 {
                let a = inc.mult(k, l) as f64;
                let amin = a.min(inc.sub_dims()[k] as f64);
                lower -= x * (mg.amb[l] * amin / x).ln();
                upper += x * (mg.sub[k] * a / x).ln();
            }
        }
    }
    let gap = vn_entropy(psi) - vn_entropy(&restrict_state(inc, psi)?);
    Ok(GapBounds { lower, gap, upper })
}

fn finite(r: RelativeEntropy, what: &str) -> Result<f64> {
    match r {
        RelativeEntropy::Finite(x) => Ok(x),
        RelativeEntropy::Infinite => Err(Error::InfiniteEntropy(what.into())),
    }
}

/// `h_bound_blocks(φ) − Σ_i (S(φ_i, φ) − S(φ_i|_N, φ|_N))` for a finite
/// decomposition `φ = Σ_i φ_i`. Nonnegative up to rounding, since the
/// bound dominates every decomposition.
pub fn decomposition_defect(
    inc: &Inclusion,
    phi: &BlockState,
    parts: &[BlockState],
) -> Result<f64> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Validation("decomposition has no parts".into()))?;
    let mut sum = first.clone();
    for p in &parts[1..] {
        sum = sum.sum(p)?;
    }
    if sum.dims() != phi.dims() {
        return Err(Error::ShapeMismatch(
            "parts live on a different algebra".into(),
        ));
    }
    let err = sum
        .blocks()
        .iter()
        .zip(phi.blocks())
        .map(|(a, b)| (a - b).abs().max())
        .fold(0.0, f64::max);
    if err > DECOMPOSITION_TOL {
        return Err(Error::Validation(format!(
            "parts do not sum to the state (error {err:e})"
        )));
    }
    let bound = h_bound_blocks(inc, &inc.joint_masses(phi)?)?;
    let phi_n = restrict_state(inc, phi)?;
    let mut achieved = 0.0;
    for (i, p) in parts.iter().enumerate() {
        let s_m = finite(rel_entropy(p, phi)?, &format!("S(φ_{i}, φ)"))?;
        let s_n = finite(
            rel_entropy(&restrict_state(inc, p)?, &phi_n)?,
            &format!("S(φ_{i}|N, φ|N)"),
        )?;
        achieved += s_m - s_n;
    }
    Ok(bound - achieved)
}
