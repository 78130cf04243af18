use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};
use fusionwalk::fusion::{DimensionFunction, FusionRing, DEFAULT_DIM_TOL};
use fusionwalk::io::matrix_csv;
use fusionwalk::walk::{
    convolve, harmonic_space, is_generating, is_symmetric, kernel, sample_endpoints,
    sample_path_seeded, stationary_check, zero_two_diagnostic, Generation, Measure,
};
use fusionwalk::Error;
use serde_json::{json, Value};

use crate::context::{label_index, labelled, Ctx, Outcome, RingArgs};

#[derive(Args)]
pub struct WalkArgs {
    #[command(flatten)]
    ring: RingArgs,

    /// `fp`, `one`, `classical`, `q=X` or a dimension file.
    #[arg(long)]
    dims: Option<String>,

    /// Measure file, repeatable.
    #[arg(long, required = true)]
    measure: Vec<PathBuf>,

    /// Tolerance for the dimension-function check.
    #[arg(long, default_value_t = DEFAULT_DIM_TOL)]
    tol: f64,
}

#[derive(Subcommand)]
pub enum Command {
    /// Transition kernel of the first measure.
    Kernel(WalkArgs),
    /// Convolution of the measures in the order given.
    Convolve(WalkArgs),
    /// Bounded harmonic functions of a finite ring.
    Harmonic(WalkArgs),
    /// Symmetry, generation, stationarity and the zero-two decay.
    Diagnose {
        #[command(flatten)]
        walk: WalkArgs,
        /// Compute `δ_m` for `m = 1..=M`.
        #[arg(long, value_name = "M")]
        zero_two: Option<usize>,
        #[arg(long, default_value_t = 1)]
        lag: usize,
        /// Search depth for generation.
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Sample walks with a fixed seed.
    Sample {
        #[command(flatten)]
        walk: WalkArgs,
        /// Starting label; the unit by default.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Loaded {
    ring: FusionRing,
    d: DimensionFunction,
    measures: Vec<Measure>,
}

fn load(args: &WalkArgs, ctx: &mut Ctx) -> Result<Loaded> {
    let ring = ctx.load_ring(&args.ring)?;
    let d = ctx.load_checked_dims(&ring, args.dims.as_deref(), args.tol)?;
    let measures = args
        .measure
        .iter()
        .map(|p| ctx.load_measure(&ring, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Loaded { ring, d, measures })
}

fn generation(g: Generation) -> Value {
    serde_json::to_value(g).expect("plain enum")
}

pub fn run(cmd: Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Kernel(args) => {
            let Loaded { ring, d, measures } = load(&args, ctx)?;
            let k = kernel(&ring, &d, &measures[0])?;
            ctx.warn_leaks(&ring, &k);
            let rows: BTreeMap<&str, BTreeMap<&str, f64>> = (0..k.len())
                .map(|s| {
                    let (cols, vals) = k.row(s);
                    let row = cols
                        .iter()
                        .zip(vals)
                        .map(|(&t, &p)| (ring.label(t), p))
                        .collect();
                    (ring.label(s), row)
                })
                .collect();
            let leaks: BTreeMap<&str, f64> = (0..k.len())
                .filter(|&s| !k.is_row_complete(s))
                .map(|s| (ring.label(s), k.leak(s)))
                .collect();
            Ok(Outcome::report(json!({
                "size": k.len(),
                "finite": k.is_finite(),
                "leak_free": k.is_leak_free(),
                "rows": rows,
                "leaks": leaks,
            }))
            .with_csv(matrix_csv(&k.to_dense())))
        }
        Command::Convolve(args) => {
            let Loaded { ring, d, measures } = load(&args, ctx)?;
            let mut acc = measures[0].clone();
            for mu in &measures[1..] {
                acc = convolve(&ring, &d, &acc, mu)?;
            }
            for mu in &measures {
                ctx.warn_leaks(&ring, &kernel(&ring, &d, mu)?);
            }
            Ok(Outcome::report(json!({
                "factors": measures.len(),
                "weights": acc.to_labels(&ring),
                "total": acc.total(),
            })))
        }
        Command::Harmonic(args) => {
            let Loaded { ring, d, measures } = load(&args, ctx)?;
            let mu = &measures[0];
            let k = kernel(&ring, &d, mu)?;
            let basis = harmonic_space(&k)?;
            let cols: Vec<Vec<f64>> = (0..ring.len())
                .map(|s| basis.vectors.iter().map(|v| v[s]).collect())
                .collect();
            Ok(Outcome::report(json!({
                "dimension": basis.dimension(),
                "symmetric": is_symmetric(mu, &ring),
                "generating": generation(is_generating(&ring, mu, ring.len() + 1)),
                "basis": basis.vectors.iter().map(|v| labelled(&ring, v)).collect::<Vec<_>>(),
            }))
            .with_csv(matrix_csv(&cols)))
        }
        Command::Diagnose {
            walk,
            zero_two,
            lag,
            depth,
        } => {
            let Loaded { ring, d, measures } = load(&walk, ctx)?;
            let mu = &measures[0];
            let k = kernel(&ring, &d, mu)?;
            ctx.warn_leaks(&ring, &k);
            let mut results = json!({
                "symmetric": is_symmetric(mu, &ring),
                "generating": generation(is_generating(&ring, mu, depth)),
                "stationary_residual": stationary_check(&ring, &d, mu)?,
            });
            if let Some(m) = zero_two {
                let deltas = zero_two_diagnostic(&ring, &d, mu, m, lag)?;
                results["zero_two"] = json!({ "lag": lag, "deltas": deltas });
            }
            Ok(Outcome::report(results))
        }
        Command::Sample {
            walk,
            start,
            steps,
            paths,
            seed,
        } => {
            if paths == 0 {
                return Err(Error::Validation("--paths must be positive".into()).into());
            }
            let Loaded { ring, d, measures } = load(&walk, ctx)?;
            let k = kernel(&ring, &d, &measures[0])?;
            ctx.warn_leaks(&ring, &k);
            let s0 = label_index(&ring, start.as_deref())?;
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for e in sample_endpoints(&k, s0, steps, paths, seed)? {
                *counts.entry(ring.label(e)).or_default() += 1;
            }
            let path: Vec<&str> = sample_path_seeded(&k, s0, steps, seed)?
                .into_iter()
                .map(|s| ring.label(s))
                .collect();
            Ok(Outcome::report(json!({
                "start": ring.label(s0),
                "steps": steps,
                "paths": paths,
                "seed": seed,
                "endpoints": counts,
                "first_path": path,
            })))
        }
    }
}
