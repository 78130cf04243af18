use anyhow::Result;
use clap::Subcommand;
use fusionwalk::fusion::{fp_dimensions, gamma_matrix, validate_ring};
use fusionwalk::io::{matrix_csv, ring_from_str_unchecked, ring_to_json};
use serde_json::json;

use crate::context::{family_spec, labelled, parse_object, Ctx, Outcome, RingArgs};

#[derive(Subcommand)]
pub enum Command {
    /// Emit the fusion-ring JSON of a built-in family.
    Build {
        #[arg(long)]
        family: String,
        #[arg(long)]
        params: Option<String>,
    },
    /// Check the ring axioms on the interior. Exits 2 on a violation.
    Validate {
        #[arg(long)]
        ring: std::path::PathBuf,
    },
    /// Summarize a ring, optionally with the fusion matrix of `--object`.
    Info {
        #[command(flatten)]
        ring: RingArgs,
        /// `LABEL` or `LABEL*M`, repeatable.
        #[arg(long)]
        object: Vec<String>,
    },
}

pub fn run(cmd: Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Build { family, params } => {
            let spec = family_spec(&family, params.as_deref())?;
            ctx.check_size(spec.basis_size(), "family")?;
            let ring = fusionwalk::families::build(&spec)?;
            let mut out = Outcome::report(json!(null));
            out.raw = Some(ring_to_json(&ring) + "\n");
            Ok(out)
        }
        Command::Validate { ring } => {
            let text = ctx.read(&ring)?;
            let r = ring_from_str_unchecked(&text, &ring.display().to_string())?;
            ctx.check_size(r.len(), "ring")?;
            let report = validate_ring(&r);
            let mut out = Outcome::report(json!({
                "valid": report.is_empty(),
                "size": r.len(),
                "violations": report.violations,
            }));
            if !report.is_empty() {
                out.status = 2;
            }
            Ok(out)
        }
        Command::Info { ring, object } => {
            let r = ctx.load_ring(&ring)?;
            let mut results = json!({
                "size": r.len(),
                "labels": r.labels(),
                "unit": r.label(r.unit()),
                "self_dual": r.labels().iter().enumerate().filter(|&(i, _)| r.dual(i) == i).count(),
                "finite": r.is_finite(),
                "interior": r.interior_indices().len(),
            });
            if r.is_finite() {
                results["fp_dimensions"] = labelled(&r, fp_dimensions(&r)?.values());
            }
            let mut out = Outcome::report(results);
            if !object.is_empty() {
                let c = parse_object(&r, &object)?;
                let g = gamma_matrix(&r, &c);
                let complete = (0..r.len()).filter(|&x| g.is_column_complete(x)).count();
                if complete < r.len() {
                    ctx.warn(format!(
                        "{} of {} columns of Γ leave the window",
                        r.len() - complete,
                        r.len()
                    ));
                }
                out.results["object"] = json!(c.describe(&r));
                out.results["gamma_complete_columns"] = json!(complete);
                out = out.with_csv(matrix_csv(&g.to_dense()));
            }
            Ok(out)
        }
    }
}
