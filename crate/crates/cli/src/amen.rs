use anyhow::Result;
use clap::Subcommand;
use fusionwalk::amenability::{
    amenability_verdict, default_schedule, free_group_benchmark, IterationOptions, VerdictKind,
    VerdictOptions,
};
use fusionwalk::fusion::{Combination, FusionRing, DEFAULT_DIM_TOL};
use fusionwalk::Error;
use serde_json::json;

use crate::context::{parse_object, Ctx, Outcome, RingArgs};

#[derive(Subcommand)]
pub enum Command {
    /// Compare `d(U)` with lower bounds on `‖Γ_U‖` over a window schedule.
    Check {
        #[command(flatten)]
        ring: RingArgs,
        /// `fp`, `one`, `classical`, `q=X` or a dimension file.
        #[arg(long)]
        dims: Option<String>,
        /// `LABEL` or `LABEL*M`, repeatable.
        #[arg(long, required = true)]
        object: Vec<String>,
        /// Comma-separated window sizes; doubling up to `--window` otherwise.
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
        /// Largest window; every column it covers must stay in the ring.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = VerdictOptions::default().gap_tol)]
        gap_tol: f64,
        /// Convergence tolerance of the power iteration.
        #[arg(long, default_value_t = IterationOptions::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = IterationOptions::default().max_iter)]
        max_iter: usize,
        /// Keep the optimizing vector in the report.
        #[arg(long)]
        witness: bool,
    },
    /// Norm lower bound for the generator sum on a free-group ball.
    Benchmark {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 12)]
        radius: usize,
        #[arg(long, default_value_t = IterationOptions::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = IterationOptions::default().max_iter)]
        max_iter: usize,
    },
}

/// Length of the longest prefix whose products with `object` stay inside
/// the ring.
fn complete_prefix(ring: &FusionRing, object: &Combination) -> usize {
    (0..ring.len())
        .take_while(|&x| object.iter().all(|(s, _)| ring.product(x, s).complete))
        .count()
}

fn ball_size(rank: usize, radius: usize) -> usize {
    let (k, mut sphere, mut total) = (2 * rank, 2 * rank, 1usize);
    for _ in 0..radius {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(k - 1);
    }
    total
}

pub fn run(cmd: Command, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Command::Check {
            ring,
            dims,
            object,
            schedule,
            window,
            gap_tol,
            tol,
            max_iter,
            witness,
        } => {
            let r = ctx.load_ring(&ring)?;
            let d = ctx.load_dims(&r, dims.as_deref())?;
            let c = parse_object(&r, &object)?;
            let reach = complete_prefix(&r, &c);
            let max = match window {
                Some(w) if w > reach => return Err(Error::TruncationOverflow(format!(
                    "window {w} needs labels outside the ring; at most {reach} columns stay inside"
                ))
                .into()),
                Some(w) => w,
                None => reach,
            };
            ctx.check_size(max, "window")?;
            let windows = if schedule.is_empty() {
                default_schedule(max)
            } else {
                schedule
            };
            if let Some(&w) = windows.iter().find(|&&w| w > max) {
                return Err(Error::TruncationOverflow(format!(
                    "schedule window {w} exceeds {max}"
                ))
                .into());
            }
            let opts = VerdictOptions {
                gap_tol,
                dim_tol: DEFAULT_DIM_TOL,
                iteration: IterationOptions { tol, max_iter },
                ..VerdictOptions::default()
            };
            let mut verdict = amenability_verdict(&r, &d, &c, &windows, opts)?;
            if verdict.kind == VerdictKind::Inconclusive {
                ctx.warn(format!(
                    "verdict inconclusive after window {}: gap {:.6e} still moving or above tolerance",
                    verdict.certificate.window,
                    verdict.steps.last().map_or(f64::NAN, |s| s.gap)
                ));
            }
            if !witness {
                verdict.certificate.witness.clear();
            }
            Ok(Outcome::report(serde_json::to_value(&verdict)?))
        }
        Command::Benchmark {
            rank,
            radius,
            tol,
            max_iter,
        } => {
            ctx.note(format!("benchmark:{rank}:{radius}"));
            if rank >= 1 {
                ctx.check_size(ball_size(rank, radius), "ball")?;
            }
            let mut cert = free_group_benchmark(rank, radius, IterationOptions { tol, max_iter })?;
            cert.witness.clear();
            let spectral = 2.0 * ((2 * rank - 1) as f64).sqrt();
            if !cert.converged {
                ctx.warn(format!(
                    "power iteration stopped after {} steps without converging",
                    cert.iterations
                ));
            }
            Ok(Outcome::report(json!({
                "rank": rank,
                "radius": radius,
                "dimension": 2 * rank,
                "spectral_radius": spectral,
                "gap_to_dimension": (2 * rank) as f64 - cert.lower_bound,
                "certificate": cert,
            })))
        }
    }
}
