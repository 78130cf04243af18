use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Subcommand};
use fusionwalk::entropy::{
    decomposition_defect, entropy_gap_bounds, f_maximizer, h_bound_blocks, inclusion_norm,
    random_decomposition, two_log_norm_check, BlockState,
};
use fusionwalk::io::{inclusion_from_str, matrix_csv, LoadedInclusion};
use fusionwalk::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::context::{Ctx, Outcome};

#[derive(Args)]
pub struct InclusionArgs {
    /// Inclusion JSON file with `n`, `m`, `A` and optionally a state.
    #[arg(long)]
    inclusion: PathBuf,
}

#[derive(Subcommand)]
pub enum Command {
    /// Block upper bound on the conditional entropy at the file's state.
    Bound(InclusionArgs),
    /// `S(ψ) − S(ψ|_N)` with its two-sided mass bounds.
    Gap(InclusionArgs),
    /// Maximizer of the simplex relaxation and `2 log ‖A‖`.
    Maximize(InclusionArgs),
    /// Checks the relaxation at the file's masses against `2 log ‖A‖`.
    Check(InclusionArgs),
    /// How far a decomposition of the state falls short of the block bound.
    Defect {
        #[command(flatten)]
        inclusion: InclusionArgs,
        /// Draw this many random parts instead of reading `parts` from the file.
        #[arg(long)]
        parts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(ctx: &mut Ctx, path: &Path) -> Result<LoadedInclusion> {
    let text = ctx.read(path)?;
    Ok(inclusion_from_str(&text, &path.display().to_string())?)
}

fn state(inc: &LoadedInclusion) -> Result<&BlockState> {
    inc.state.as_ref().ok_or_else(|| {
        Error::Validation("this command needs a `state` in the inclusion file".into()).into()
    })
}

fn masses(inc: &LoadedInclusion) -> Result<&[Vec<f64>]> {
    inc.masses.as_deref().ok_or_else(|| {
        Error::Validation("this command needs a `state` in the inclusion file".into()).into()
    })
}

pub fn run(cmd: Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Bound(args) => {
            let inc = load(ctx, &args.inclusion)?;
            let m = masses(&inc)?;
            let bound = h_bound_blocks(&inc.inclusion, m)?;
            Ok(Outcome::report(json!({ "h_bound": bound, "masses": m })))
        }
        Command::Gap(args) => {
            let inc = load(ctx, &args.inclusion)?;
            let b = entropy_gap_bounds(&inc.inclusion, state(&inc)?)?;
            Ok(Outcome::report(serde_json::to_value(b)?))
        }
        Command::Maximize(args) => {
            let inc = load(ctx, &args.inclusion)?;
            let a = inc.inclusion.matrix();
            let best = f_maximizer(&a)?;
            let norm = inclusion_norm(&a)?;
            Ok(Outcome::report(json!({
                "value": best.value,
                "point": best.point.values(),
                "norm": norm,
                "two_log_norm": 2.0 * norm.ln(),
            }))
            .with_csv(matrix_csv(best.point.values())))
        }
        Command::Check(args) => {
            let inc = load(ctx, &args.inclusion)?;
            let check = two_log_norm_check(&inc.inclusion, masses(&inc)?)?;
            let mut out = Outcome::report(serde_json::to_value(check)?);
            if !check.ok {
                ctx.warn(format!(
                    "f = {} exceeds 2 log ‖A‖ = {}",
                    check.f_value, check.two_log_norm
                ));
            }
            out.results["masses"] = json!(masses(&inc)?);
            Ok(out)
        }
        Command::Defect {
            inclusion,
            parts,
            seed,
        } => {
            let inc = load(ctx, &inclusion.inclusion)?;
            let phi = state(&inc)?;
            let pieces = match parts {
                Some(0) => return Err(Error::Validation("--parts must be positive".into()).into()),
                Some(p) => {
                    ctx.note(format!("parts:{p}:{seed}"));
                    random_decomposition(phi, p, &mut ChaCha8Rng::seed_from_u64(seed))
                }
                None if inc.parts.is_empty() => {
                    return Err(
                        Error::Validation("no `parts` in the file; pass --parts N".into()).into(),
                    )
                }
                None => inc.parts.clone(),
            };
            let defect = decomposition_defect(&inc.inclusion, phi, &pieces)?;
            Ok(Outcome::report(json!({
                "defect": defect,
                "parts": pieces.len(),
                "h_bound": h_bound_blocks(&inc.inclusion, &inc.inclusion.joint_masses(phi)?)?,
            })))
        }
    }
}
