mod amen;
mod context;
mod entropy;
mod ring;
mod walk;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fusionwalk::io::Report;
use fusionwalk::Error;

use context::{Ctx, Outcome};

#[derive(Parser)]
#[command(
    name = "fusionwalk",
    version,
    about = "Random walks on fusion rings, norm certificates and multi-matrix entropy bounds"
)]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,

    #[command(subcommand)]
    group: Group,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write the command's dense matrix, if it has one, as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Group {
    /// Build, validate and describe fusion rings.
    #[command(subcommand)]
    Ring(ring::Command),
    /// Transition kernels, convolution, harmonic functions and sampling.
    #[command(subcommand)]
    Walk(walk::Command),
    /// Norm lower bounds and amenability verdicts.
    #[command(subcommand)]
    Amen(amen::Command),
    /// Entropy bounds for inclusions of multi-matrix algebras.
    #[command(subcommand)]
    Entropy(entropy::Command),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::TruncationOverflow(_) | Error::NotFinite) => 3,
        Some(Error::Io(_)) | None => 1,
        Some(_) => 2,
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let mut ctx = Ctx::from_env()?;
    let outcome = match cli.group {
        Group::Ring(c) => ring::run(c, &mut ctx)?,
        Group::Walk(c) => walk::run(c, &mut ctx)?,
        Group::Amen(c) => amen::run(c, &mut ctx)?,
        Group::Entropy(c) => entropy::run(c, &mut ctx)?,
    };
    let Outcome {
        results,
        csv,
        raw,
        status,
    } = outcome;
    match (&cli.output.csv, csv) {
        (Some(path), Some(text)) => std::fs::write(path, text)?,
        (Some(_), None) => ctx.warn("--csv ignored: this command has no matrix output".into()),
        _ => {}
    }
    let text = match raw {
        Some(text) => text,
        None => {
            let report = Report {
                command: std::env::args().skip(1).collect(),
                inputs_digest: ctx.digest(),
                results,
                warnings: ctx.warnings,
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            serde_json::to_string_pretty(&report)? + "\n"
        }
    };
    emit(cli.output.out.as_ref(), &text)?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
