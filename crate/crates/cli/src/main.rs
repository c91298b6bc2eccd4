//! `nla`: sweeps and checks for the heralded noiseless linear amplifier.

mod commands;
mod config;
mod table;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use config::{parse_complex, parse_sweep, CliError, CliResult, Sweep};
use table::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "nla", version, about = "Noiseless linear amplifier simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: Args,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Amplify a coherent or number-state input with the finite-N operator.
    Amplify,
    /// Fidelity versus target gain for coherent inputs.
    Fig3,
    /// Purity versus success probability for distillation through loss.
    Fig4,
    /// Amplify Bob's arm of a lossy EPR state.
    Distill,
    /// Amplify then split a coherent state into two clones.
    Clone,
    /// Run the oracle-equivalence and analytic-identity checks.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Amplify => "amplify",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Distill => "distill",
            Command::Clone => "clone",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Number of amplifier arms N.
    #[arg(long, global = true)]
    pub arms: Option<usize>,
    /// Scissor beamsplitter transmissivity.
    #[arg(long, global = true, allow_negative_numbers = true, conflicts_with = "gain")]
    pub eta: Option<f64>,
    /// Amplitude gain g = sqrt((1 - eta) / eta).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gain: Option<f64>,
    /// Coherent amplitude as re,im.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    /// Fock number-state input (amplify only).
    #[arg(long, global = true, conflicts_with = "alpha")]
    pub photons: Option<usize>,
    /// EPR parameter chi.
    #[arg(long, global = true, allow_negative_numbers = true, conflicts_with = "squeeze_r")]
    pub chi: Option<f64>,
    /// Squeezing r; chi = tanh(r). For fig4 this is the target squeezing.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub squeeze_r: Option<f64>,
    /// Channel transmission epsilon (1 = lossless).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub loss: Option<f64>,
    /// Single-photon source misfire probability.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Fock cutoff for the input state.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Sweep one variable: name=start:stop:steps.
    #[arg(long, global = true, value_parser = parse_sweep)]
    pub sweep: Option<Sweep>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Use the large-N amplifier (distill, clone).
    #[arg(long, global = true)]
    pub asymptotic: bool,
    /// Also report fidelity with an EPR state of this squeezing (distill).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub target_r: Option<f64>,
    /// Emit one row per output Fock level (amplify).
    #[arg(long, global = true)]
    pub levels: bool,
    /// Drop the feedforward phase in the circuit oracle (verify).
    #[arg(long, global = true)]
    pub inject_fault: bool,
}

fn emit(table: &Table, args: &Args) -> CliResult<()> {
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    table.write(args.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let args = &cli.args;
    let (mut table, failures) = match cli.command {
        Command::Amplify => (commands::amplify(args)?, 0),
        Command::Fig3 => (commands::fig3(args)?, 0),
        Command::Fig4 => (commands::fig4(args)?, 0),
        Command::Distill => (commands::distill(args)?, 0),
        Command::Clone => (commands::clone(args)?, 0),
        Command::Verify => verify::run(args)?,
    };
    let mut header = commands::preamble(cli.command, args);
    header.append(&mut table.header);
    table.header = header;
    emit(&table, args)?;
    if failures > 0 {
        return Err(CliError::Invariant(format!("{failures} check(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nla: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
