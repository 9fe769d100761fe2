//! `hamwave`: solitary waves, their spectra, stability maps and time evolution.

mod commands;
mod config;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Flags, RunConfig};
use failure::Failure;
use output::Outputs;

#[derive(Parser)]
#[command(name = "hamwave", version, about = "Solitary-wave stability for fractional KdV and point-vortex water waves")]
struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default hamwave-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground state of Q + |D|^α Q = Q^p.
    GroundState(Flags),
    /// Sign of d''(c) over a grid of (α, p).
    StabilityMap(Flags),
    /// Spectrum of the linearized operator at speed c.
    Spectrum(Flags),
    /// Perturb a solitary wave and track its orbital distance.
    Evolve(Flags),
    /// Traveling capillary-gravity wave with a point vortex.
    PvSolve(Flags),
    /// d''(c) along the vortex branch, compared with 4πa².
    PvD2(Flags),
    /// Spectral configuration of the augmented Hessian.
    PvSpectrum(Flags),
    /// Evolve a perturbed vortex wave.
    PvEvolve(Flags),
    /// Fast self-test of core invariants.
    Check(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::GroundState(f) => ("ground-state", f),
            Command::StabilityMap(f) => ("stability-map", f),
            Command::Spectrum(f) => ("spectrum", f),
            Command::Evolve(f) => ("evolve", f),
            Command::PvSolve(f) => ("pv-solve", f),
            Command::PvD2(f) => ("pv-d2", f),
            Command::PvSpectrum(f) => ("pv-spectrum", f),
            Command::PvEvolve(f) => ("pv-evolve", f),
            Command::Check(f) => ("check", f),
        }
    }
}

fn threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HAMWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Failure::invalid(format!("HAMWAVE_THREADS must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(Failure::invalid("HAMWAVE_THREADS must be at least 1"));
    }
    hamwave_core::par::init_thread_pool(n);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    threads()?;
    let (name, flags) = cli.command.parts();
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = file.with_flags(name, flags, cli.out.clone())?.resolve()?;
    if cli.dump_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }
    let mut out = Outputs::create(&cfg)?;
    out.json("config.json", &cfg)?;
    match name {
        "ground-state" => commands::ground_state(&cfg, &mut out)?,
        "stability-map" => commands::stability_map(&cfg, &mut out)?,
        "spectrum" => commands::spectrum(&cfg, &mut out)?,
        "evolve" => commands::evolve_cmd(&cfg, &mut out)?,
        "pv-solve" => commands::pv_solve(&cfg, &mut out)?,
        "pv-d2" => commands::pv_d2(&cfg, &mut out)?,
        "pv-spectrum" => commands::pv_spectrum(&cfg, &mut out)?,
        "pv-evolve" => commands::pv_evolve_cmd(&cfg, &mut out)?,
        _ => commands::check(&cfg, &mut out)?,
    }
    for p in &out.written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.code as u8)
        }
    }
}
