//! JSON file formats and the report envelope.
//!
//! Rings, measures, dimension functions and inclusions are read from
//! hand-editable JSON. Parse failures carry the line and column reported by
//! the JSON reader; semantic failures surface as validation errors.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::entropy::{BlockState, Inclusion};
use crate::error::{Error, Result};
use crate::fusion::{validate_ring, Coefficient, DimensionFunction, FusionRing};
use crate::walk::Measure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingFile {
    pub basis: Vec<String>,
    pub unit: String,
    pub dual: BTreeMap<String, String>,
    pub coeffs: Vec<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub weights: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsFile {
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFile {
    Densities(Vec<Vec<Vec<f64>>>),
    Masses(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionFile {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateFile>,
    /// Block density matrices of a decomposition of the state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<Vec<Vec<Vec<f64>>>>>,
}

/// A parsed inclusion with its optional state and decomposition.
#[derive(Debug, Clone)]
pub struct LoadedInclusion {
    pub inclusion: Inclusion,
    /// Densities if given, else the block-scalar state with the given masses.
    pub state: Option<BlockState>,
    pub masses: Option<Vec<Vec<f64>>>,
    pub parts: Vec<BlockState>,
}

fn parse_json<T: DeserializeOwned>(path: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Builds the ring described by a file without checking the ring axioms.
pub fn ring_from_file(file: &RingFile) -> Result<FusionRing> {
    FusionRing::from_table(
        file.basis.clone(),
        &file.unit,
        &file.dual,
        &file.coeffs,
        file.interior.as_deref(),
    )
}

/// Parses ring JSON text; the ring axioms are not checked.
pub fn ring_from_str_unchecked(text: &str, origin: &str) -> Result<FusionRing> {
    ring_from_file(&parse_json(origin, text)?)
}

/// Parses ring JSON text and rejects rings that violate an axiom.
pub fn ring_from_str(text: &str, origin: &str) -> Result<FusionRing> {
    let ring = ring_from_str_unchecked(text, origin)?;
    let report = validate_ring(&ring);
    if let Some(v) = report.violations.first() {
        return Err(Error::Validation(format!(
            "{} violation(s), first: {:?} at {:?}: {}",
            report.violations.len(),
            v.kind,
            v.labels,
            v.detail
        )));
    }
    Ok(ring)
}

pub fn parse_ring(path: &Path) -> Result<FusionRing> {
    ring_from_str(&read(path)?, &path.display().to_string())
}

pub fn parse_ring_unchecked(path: &Path) -> Result<FusionRing> {
    ring_from_str_unchecked(&read(path)?, &path.display().to_string())
}

/// The file form of a ring: every nonzero structure constant, in basis
/// order.
pub fn ring_to_file(ring: &FusionRing) -> RingFile {
    let labels = ring.labels();
    RingFile {
        basis: labels.to_vec(),
        unit: labels[ring.unit()].clone(),
        dual: (0..ring.len())
            .map(|i| (labels[i].clone(), labels[ring.dual(i)].clone()))
            .collect(),
        coeffs: ring
            .coefficients()
            .into_iter()
            .map(|(r, s, t, m)| Coefficient {
                r: labels[r].clone(),
                s: labels[s].clone(),
                t: labels[t].clone(),
                m,
            })
            .collect(),
        interior: ring.is_truncated().then(|| {
            ring.interior_indices()
                .into_iter()
                .map(|i| labels[i].clone())
                .collect()
        }),
    }
}

pub fn ring_to_json(ring: &FusionRing) -> String {
    serde_json::to_string_pretty(&ring_to_file(ring)).expect("ring file serializes")
}

pub fn measure_from_str(ring: &FusionRing, text: &str, origin: &str) -> Result<Measure> {
    let file: MeasureFile = parse_json(origin, text)?;
    Measure::from_labels(ring, &file.weights)
}

pub fn parse_measure(ring: &FusionRing, path: &Path) -> Result<Measure> {
    measure_from_str(ring, &read(path)?, &path.display().to_string())
}

pub fn dims_from_str(ring: &FusionRing, text: &str, origin: &str) -> Result<DimensionFunction> {
    let file: DimsFile = parse_json(origin, text)?;
    let d = DimensionFunction::from_labels(ring, &file.values)?;
    d.ensure_covers(ring)?;
    Ok(d)
}

pub fn parse_dims(ring: &FusionRing, path: &Path) -> Result<DimensionFunction> {
    dims_from_str(ring, &read(path)?, &path.display().to_string())
}

fn densities(blocks: &[Vec<Vec<f64>>]) -> Result<Vec<DMatrix<f64>>> {
    blocks
        .iter()
        .enumerate()
        .map(|(l, rows)| {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::ShapeMismatch(format!("density {l} is not square")));
            }
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        })
        .collect()
}

pub fn inclusion_from_str(text: &str, origin: &str) -> Result<LoadedInclusion> {
    let file: InclusionFile = parse_json(origin, text)?;
    let inclusion = Inclusion::new(file.n, file.m, file.a)?;
    let (state, masses) = match &file.state {
        None => (None, None),
        Some(StateFile::Densities(d)) => {
            let s = BlockState::state(densities(d)?)?;
            let masses = inclusion.joint_masses(&s)?;
            (Some(s), Some(masses))
        }
        Some(StateFile::Masses(m)) => (
            Some(BlockState::from_masses(&inclusion, m)?),
            Some(m.clone()),
        ),
    };
    let parts = file
        .parts
        .iter()
        .flatten()
        .map(|p| BlockState::positive(densities(p)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(LoadedInclusion {
        inclusion,
        state,
        masses,
        parts,
    })
}

pub fn parse_inclusion(path: &Path) -> Result<LoadedInclusion> {
    inclusion_from_str(&read(path)?, &path.display().to_string())
}

/// Hex SHA-256 over the given inputs, each preceded by its length.
pub fn inputs_digest<'a>(inputs: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// The envelope written by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub results: serde_json::Value,
    pub warnings: Vec<String>,
    pub version: String,
}

/// Dense matrix as CSV, one row per line.
pub fn matrix_csv<T: std::fmt::Display>(rows: &[Vec<T>]) -> String {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
