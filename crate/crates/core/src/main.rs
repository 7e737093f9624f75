use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use zeno_chain::harness::{
    format_sig, parse_list, run_bound, run_classify, run_effective, run_fluctuate, run_simulate,
    run_sweep, write_fluctuation_csv, write_sweep_csv, write_trace_csv, RunConfig,
};
use zeno_chain::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "zeno-chain",
    version,
    about = "Coherent Zeno dynamics on tight-binding chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve |1> under the full Hamiltonian; trace CSV to --out, summary JSON to stdout
    Simulate(Flags),
    /// Classify the order of the Zeno dynamics (JSON)
    Classify(Flags),
    /// Print the order-0 and order-1 effective Hamiltonians (JSON)
    Effective(Flags),
    /// Print the lower bound on lambda_inv that keeps the leakage below --delta0
    Bound(Flags),
    /// Leakage sweep over G and N; CSV to --out, fit JSON to stdout
    Sweep(Flags),
    /// Monte Carlo over fluctuating interior couplings; CSV to --out or stdout
    Fluctuate(Flags),
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Number of sites N
    #[arg(long)]
    n: Option<usize>,
    /// Bond strength k [default: 1]
    #[arg(long)]
    k: Option<f64>,
    /// Strong/weak ratio lambda^-1 [fluctuate default: 20]
    #[arg(long)]
    lambda_inv: Option<f64>,
    /// On-site shift on site 2 (scaled with lambda^-1 like the watch)
    #[arg(long, allow_hyphen_values = true)]
    delta_omega: Option<f64>,
    /// Leakage threshold [default: 0.1]
    #[arg(long)]
    delta0: Option<f64>,
    /// End of the time window [default: one effective cycle]
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of time steps [default: 4000]
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated G values [default: 0.05,0.1,0.15,0.2]
    #[arg(long)]
    g_list: Option<String>,
    /// Comma-separated chain lengths [default: 4,6,...,30]
    #[arg(long)]
    n_list: Option<String>,
    /// Relative coupling fluctuation, at most 0.2
    #[arg(long)]
    amplitude: Option<f64>,
    /// Monte Carlo trials [default: 100]
    #[arg(long)]
    trials: Option<usize>,
    /// Base RNG seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of key=value lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn resolve(self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            n: self.n,
            k: self.k,
            lambda_inv: self.lambda_inv,
            delta_omega: self.delta_omega,
            delta0: self.delta0,
            t_max: self.t_max,
            steps: self.steps,
            g_list: self
                .g_list
                .as_deref()
                .map(|s| parse_list("g_list", s))
                .transpose()?,
            n_list: self
                .n_list
                .as_deref()
                .map(|s| parse_list("n_list", s))
                .transpose()?,
            amplitude: self.amplitude,
            trials: self.trials,
            seed: self.seed,
            out: self.out,
        };
        Ok(file.merged_with(flags))
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value).map_err(io::Error::other)?;
    writeln!(stdout)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(flags) => {
            let cfg = flags.resolve()?;
            let outcome = run_simulate(&cfg)?;
            if let Some(path) = &cfg.out {
                write_trace_csv(&outcome.trace, create(path)?)?;
            }
            print_json(&outcome.summary)
        }
        Command::Classify(flags) => print_json(&run_classify(&flags.resolve()?)?),
        Command::Effective(flags) => print_json(&run_effective(&flags.resolve()?)?),
        Command::Bound(flags) => {
            let report = run_bound(&flags.resolve()?)?;
            println!("{}", format_sig(report.lambda_inv_bound));
            Ok(())
        }
        Command::Sweep(flags) => {
            let cfg = flags.resolve()?;
            let result = run_sweep(&cfg)?;
            if let Some(path) = &cfg.out {
                write_sweep_csv(&result, create(path)?)?;
            }
            print_json(&serde_json::json!({
                "slope": result.slope,
                "fit_points": result.fit_points,
                "means": result.means,
            }))
        }
        Command::Fluctuate(flags) => {
            let cfg = flags.resolve()?;
            let rows = run_fluctuate(&cfg)?;
            match &cfg.out {
                Some(path) => write_fluctuation_csv(&rows, create(path)?),
                None => write_fluctuation_csv(&rows, io::stdout().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Invalid { .. } | Error::OutOfValidity { .. }) {
                eprintln!("run with --help for usage");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
