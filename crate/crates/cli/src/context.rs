use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use clap::Args;
use fusionwalk::families::{build, su2_quantum_dims, FamilySpec};
use fusionwalk::fusion::{
    check_dimension_function, fp_dimensions, Combination, DimensionFunction, FusionRing,
};
use fusionwalk::io::{dims_from_str, inputs_digest, measure_from_str, ring_from_str};
use fusionwalk::walk::{Kernel, Measure};
use fusionwalk::Error;
use serde_json::{Map, Value};

const MAX_WINDOW_VAR: &str = "FUSIONWALK_MAX_WINDOW";
const DEFAULT_MAX_WINDOW: usize = 1 << 22;

/// What a command hands back to the dispatcher.
pub struct Outcome {
    pub results: Value,
    pub csv: Option<String>,
    /// Printed verbatim instead of a report envelope.
    pub raw: Option<String>,
    pub status: u8,
}

impl Outcome {
    pub fn report(results: Value) -> Self {
        Self {
            results,
            csv: None,
            raw: None,
            status: 0,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

pub struct Ctx {
    inputs: Vec<Vec<u8>>,
    pub warnings: Vec<String>,
    pub max_window: usize,
}

impl Ctx {
    pub fn from_env() -> Result<Self> {
        let max_window = match std::env::var(MAX_WINDOW_VAR) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Error::Validation(format!("{MAX_WINDOW_VAR}={v} is not a positive integer"))
            })?,
            Err(_) => DEFAULT_MAX_WINDOW,
        };
        Ok(Self {
            inputs: Vec::new(),
            warnings: Vec::new(),
            max_window,
        })
    }

    pub fn warn(&mut self, w: String) {
        self.warnings.push(w);
    }

    pub fn note(&mut self, bytes: impl Into<Vec<u8>>) {
        self.inputs.push(bytes.into());
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path)
            .map_err(Error::from)
            .with_context(|| format!("reading {}", path.display()))?;
        self.note(text.clone());
        Ok(text)
    }

    pub fn digest(&self) -> String {
        inputs_digest(self.inputs.iter().map(Vec::as_slice))
    }

    pub fn check_size(&self, size: usize, what: &str) -> Result<()> {
        if size > self.max_window {
            return Err(Error::TruncationOverflow(format!(
                "{what} has {size} labels, above {MAX_WINDOW_VAR}={}",
                self.max_window
            ))
            .into());
        }
        Ok(())
    }

    pub fn warn_leaks(&mut self, ring: &FusionRing, k: &Kernel) {
        let leaking: Vec<usize> = (0..k.len()).filter(|&s| !k.is_row_complete(s)).collect();
        if let Some(&first) = leaking.first() {
            self.warn(format!(
                "{} kernel rows leak mass outside the window (first `{}` loses {:.3e})",
                leaking.len(),
                ring.label(first),
                k.leak(first)
            ));
        }
    }
}

/// Either a ring file or a built-in family.
#[derive(Args, Debug, Clone)]
pub struct RingArgs {
    /// Fusion-ring JSON file.
    #[arg(long, conflicts_with = "family")]
    pub ring: Option<PathBuf>,

    /// Built-in family: verlinde_su2, su2_rep, free_group, integer_lattice,
    /// cyclic, symmetric3, group_table or product.
    #[arg(long)]
    pub family: Option<String>,

    /// Family parameters as a JSON object, e.g. '{"level": 4}'.
    #[arg(long, requires = "family")]
    pub params: Option<String>,
}

fn spec_from_value(v: &Value) -> Result<FamilySpec, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidSpec("family parameters must be a JSON object".into()))?;
    let family = obj
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidSpec("missing `family`".into()))?;
    let field = |name: &str| {
        obj.get(name)
            .ok_or_else(|| Error::InvalidSpec(format!("{family} needs `{name}`")))
    };
    match family {
        "cyclic" => {
            let n = field("n")?
                .as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::InvalidSpec("`n` must be a positive integer".into()))?;
            Ok(FamilySpec::cyclic(n as usize))
        }
        "symmetric3" => Ok(FamilySpec::symmetric3()),
        "product" => Ok(FamilySpec::product(
            spec_from_value(field("left")?)?,
            spec_from_value(field("right")?)?,
        )),
        _ => serde_json::from_value(v.clone()).map_err(|e| Error::InvalidSpec(e.to_string())),
    }
}

/// Parses `--family` and `--params` into a family spec.
pub fn family_spec(family: &str, params: Option<&str>) -> Result<FamilySpec> {
    let mut obj = match params {
        None => Map::new(),
        Some(text) => match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(m)) => m,
            Ok(_) => return Err(Error::InvalidSpec("--params must be a JSON object".into()).into()),
            Err(e) => {
                return Err(Error::Parse {
                    path: "--params".into(),
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                }
                .into())
            }
        },
    };
    obj.insert("family".into(), Value::String(family.into()));
    Ok(spec_from_value(&Value::Object(obj))?)
}

impl Ctx {
    pub fn load_ring(&mut self, args: &RingArgs) -> Result<FusionRing> {
        match (&args.ring, &args.family) {
            (Some(path), _) => {
                let text = self.read(path)?;
                let ring = ring_from_str(&text, &path.display().to_string())?;
                self.check_size(ring.len(), "ring")?;
                Ok(ring)
            }
            (None, Some(family)) => {
                let spec = family_spec(family, args.params.as_deref())?;
                self.check_size(spec.basis_size(), "family")?;
                self.note(serde_json::to_vec(&spec)?);
                Ok(build(&spec)?)
            }
            (None, None) => Err(Error::Validation("give --ring or --family".into()).into()),
        }
    }

    /// `fp`, `one`, `classical`, `q=X` or a dimension file.
    pub fn load_dims(
        &mut self,
        ring: &FusionRing,
        spec: Option<&str>,
    ) -> Result<DimensionFunction> {
        let spec = spec.unwrap_or("fp");
        self.note(format!("dims:{spec}"));
        let d = match spec {
            "fp" => {
                if !ring.is_finite() {
                    return Err(Error::Validation(
                        "Perron-Frobenius dimensions need a finite ring; pass --dims classical, one, q=X or a file".into(),
                    )
                    .into());
                }
                fp_dimensions(ring)?
            }
            "one" => DimensionFunction::constant(ring, 1.0),
            "classical" => su2_quantum_dims(ring, 1.0)?,
            _ => match spec.strip_prefix("q=") {
                Some(q) => {
                    let q: f64 = q
                        .parse()
                        .ok()
                        .filter(|q: &f64| q.is_finite() && *q > 0.0)
                        .ok_or_else(|| {
                            Error::Validation(format!("`{spec}`: q must be a positive number"))
                        })?;
                    su2_quantum_dims(ring, q)?
                }
                None => {
                    let path = Path::new(spec);
                    let text = self.read(path)?;
                    dims_from_str(ring, &text, spec)?
                }
            },
        };
        Ok(d)
    }

    /// Dimensions that must pass the full check before a walk is built.
    pub fn load_checked_dims(
        &mut self,
        ring: &FusionRing,
        spec: Option<&str>,
        tol: f64,
    ) -> Result<DimensionFunction> {
        let d = self.load_dims(ring, spec)?;
        let report = check_dimension_function(ring, &d, tol);
        if let Some(v) = report.violations.first() {
            return Err(Error::Validation(format!(
                "not a dimension function ({} violations, first {:?} at {:?}: {})",
                report.violations.len(),
                v.kind,
                v.labels,
                v.detail
            ))
            .into());
        }
        Ok(d)
    }

    pub fn load_measure(&mut self, ring: &FusionRing, path: &Path) -> Result<Measure> {
        let text = self.read(path)?;
        Ok(measure_from_str(ring, &text, &path.display().to_string())?)
    }
}

/// `LABEL` or `LABEL*M`, summed over repeats.
pub fn parse_object(ring: &FusionRing, terms: &[String]) -> Result<Combination> {
    let mut c = Combination::new();
    for term in terms {
        let (label, mult) = match ring.index_of(term) {
            Ok(i) => (i, 1),
            Err(_) => match term.rsplit_once('*') {
                Some((l, m)) => {
                    let m: u64 = m
                        .parse()
                        .map_err(|_| Error::Validation(format!("bad multiplicity in `{term}`")))?;
                    (ring.index_of(l)?, m)
                }
                None => return Err(Error::UnknownLabel(term.clone()).into()),
            },
        };
        c.add(label, mult);
    }
    if c.is_zero() {
        return Err(Error::Validation("object is zero".into()).into());
    }
    Ok(c)
}

pub fn label_index(ring: &FusionRing, label: Option<&str>) -> Result<usize> {
    match label {
        None => Ok(ring.unit()),
        Some(l) => Ok(ring.index_of(l)?),
    }
}

pub fn labelled<T: Clone + Into<Value>>(ring: &FusionRing, values: &[T]) -> Value {
    Value::Object(
        ring.labels()
            .iter()
            .zip(values)
            .map(|(l, v)| (l.clone(), v.clone().into()))
            .collect(),
    )
}
