//! `satd`: pulse export, gate runs and sweeps from a JSON config.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 divergence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use satd_holonomy::config::RunConfig;
use satd_holonomy::gates::{run_gate, sweep_decay, sweep_operation_time, write_sweep_csv};
use satd_holonomy::pulse::{sample_pulses, DressingMode};
use satd_holonomy::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Superadiabatic holonomic gates in cavity QED")]
struct Cli {
    /// JSON run configuration; published defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Dressing mode (overrides `mode`).
    #[arg(long, global = true)]
    mode: Option<DressingMode>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the uncorrected, SATD and MSA pulse tables.
    Pulses,
    /// Run the configured gate with dissipation.
    Gate,
    /// Fidelity against protocol duration for all three modes.
    SweepTime,
    /// Fidelity against atomic decay rate for SATD and MSA.
    SweepDecay,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Diverged { .. } => 3,
                Error::Io(_) | Error::Csv(_) => 1,
                _ => 2,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    let protocol = cfg.protocol()?;
    fs::create_dir_all(&out)?;

    match cli.command {
        Command::Pulses => {
            for mode in DressingMode::ALL {
                let corrected = protocol.clone().with_mode(mode).corrected()?;
                let table = sample_pulses(&corrected, cfg.pulse_samples)?;
                let path = out.join(format!("pulses_{mode}.csv"));
                table.save(&path)?;
                let [a, b, c] = table.column_peaks();
                println!("{}: peaks {a:.4e} {b:.4e} {c:.4e} rad/s", path.display());
            }
        }
        Command::Gate => {
            let result = run_gate(&protocol, true)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            let summary = out.join("gate_summary.json");
            fs::write(&summary, serde_json::to_string_pretty(&result.summary())?)?;
            let trajectory = out.join("gate_trajectory.csv");
            result.write_trajectory_csv(fs::File::create(&trajectory)?)?;
            println!(
                "{} {}: fidelity {:.5}, gate fidelity {:.6}, peak excited population {:.4}",
                cfg_label(&cfg),
                result.mode,
                result.fidelity,
                result.gate_fidelity,
                result.peak_excited_population
            );
            println!("wrote {} and {}", summary.display(), trajectory.display());
        }
        Command::SweepTime => {
            let rows = sweep_operation_time(&protocol, &cfg.time_multipliers, workers)?;
            save_sweep(&out.join("sweep_time.csv"), &rows)?;
        }
        Command::SweepDecay => {
            let rows = sweep_decay(&protocol, &cfg.decay_multipliers, workers)?;
            save_sweep(&out.join("sweep_decay.csv"), &rows)?;
        }
    }
    Ok(())
}

fn cfg_label(cfg: &RunConfig) -> String {
    serde_json::to_value(cfg.gate).map_or_else(
        |_| "gate".into(),
        |v| v.as_str().unwrap_or("gate").to_string(),
    )
}

fn save_sweep(path: &Path, rows: &[satd_holonomy::gates::SweepRow]) -> Result<()> {
    write_sweep_csv(rows, fs::File::create(path)?)?;
    for r in rows {
        println!("{:>4} x{:<5} F = {:.5}", r.mode, r.multiplier, r.fidelity);
    }
    println!("wrote {}", path.display());
    Ok(())
}
