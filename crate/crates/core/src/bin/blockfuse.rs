use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockfuse::bench::{
    emit_outputs, run_mse_sweep, run_reconstruction, BenchError, ExperimentSpec, Overrides, RunResults,
};

/// Block-sparse signal recovery with sparse-group and latent-group fused LASSO.
#[derive(Parser)]
#[command(name = "blockfuse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct one realisation at the configured compression ratio.
    Reconstruct(CommonArgs),
    /// Mean MSE of every variant over the compression-ratio grid.
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML experiment file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated variant names or kinds (sgf, lgf, g_lasso, ...).
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    /// Trials per compression ratio, overriding the file.
    #[arg(long)]
    trials: Option<usize>,
}

impl CommonArgs {
    fn spec(&self) -> Result<ExperimentSpec, BenchError> {
        let overrides = Overrides {
            seed: self.seed,
            trials: self.trials,
            variants: self.variants.clone(),
        };
        ExperimentSpec::load(self.config.as_deref(), &overrides)
    }
}

fn reconstruct(args: &CommonArgs) -> Result<(), BenchError> {
    let spec = args.spec()?;
    let rec = run_reconstruction(&spec)?;
    println!("reconstruction at mu = {} (n = {}, m = {})", rec.mu, spec.sensing.n, spec.sensing.m());
    println!("{:<16} {:>14} {:>6} {:>10}", "variant", "mse", "iters", "converged");
    for r in rec.runs.iter().map(|r| &r.result) {
        println!("{:<16} {:>14.6} {:>6} {:>10}", r.variant, r.mse, r.iterations, r.converged);
    }
    report_files(&emit_outputs(&RunResults::Reconstruction(&rec), &spec, &args.out)?);
    Ok(())
}

fn sweep(args: &CommonArgs) -> Result<(), BenchError> {
    let spec = args.spec()?;
    let sweep = run_mse_sweep(&spec)?;
    println!("mse sweep: {} trials per ratio", spec.trials);
    print!("{:<16}", "variant");
    for mu in &spec.mu_grid {
        print!(" {:>9}", format!("mu={mu}"));
    }
    println!();
    for v in &spec.variants {
        print!("{:<16}", v.name);
        for &mu in &spec.mu_grid {
            match sweep.cell(&v.name, mu) {
                Some(c) => print!(" {:>9.4}", c.mean_mse),
                None => print!(" {:>9}", "-"),
            }
        }
        println!();
    }
    let unconverged = sweep.trials.iter().filter(|t| !t.converged).count();
    if unconverged > 0 {
        println!("{unconverged} of {} solves hit the iteration cap", sweep.trials.len());
    }
    report_files(&emit_outputs(&RunResults::Sweep(&sweep), &spec, &args.out)?);
    Ok(())
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Reconstruct(a) => reconstruct(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
