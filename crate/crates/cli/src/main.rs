use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sge_core::config::interferometer_segments;
use sge_core::harness::{self, Output, Report, Scenario};
use sge_core::observables::{entanglement_entropy, spin_rdm};
use sge_core::{tolerances, SgeError, SpinQN};

/// Stern-Gerlach wavepacket simulator.
#[derive(Parser)]
#[command(name = "sge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write density_z.csv and report.json.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Closed form against the split-step integrator.
    Compare { config: PathBuf },
    /// Entanglement entropy at evenly spaced times, as CSV on stdout.
    Entropy {
        config: PathBuf,
        #[arg(long)]
        samples: usize,
    },
    /// Run the (β,T), (−β,2T), (β,T) gradient sequence.
    Interfere {
        config: PathBuf,
        #[arg(long = "T", value_name = "SECONDS")]
        t: f64,
    },
    /// Dense factorized propagator against the matrix exponential.
    BchCheck {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value = "1/2")]
        spin: SpinQN,
        #[arg(long, default_value_t = tolerances::BCH_MAX_ENTRY)]
        tol: f64,
        /// Judge on Gaussian probes away from the periodic seam instead of
        /// every matrix entry.
        #[arg(long)]
        resolved: bool,
    },
}

enum Outcome {
    Pass,
    Fail(Vec<String>),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(reasons)) => {
            for r in reasons {
                eprintln!("FAIL: {r}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn outcome(failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail(failures)
    }
}

fn dispatch(command: Command) -> sge_core::Result<Outcome> {
    match command {
        Command::Run { config, out } => {
            let sc = Scenario::load(&config)?;
            let report = harness::run(&sc)?;
            write_outputs(&report, &out)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(outcome(report.failures()))
        }
        Command::Compare { config } => {
            let sc = Scenario::load(&config)?;
            let coarse = harness::compare_with_oracle(&sc, sc.oracle_steps)?;
            let fine = harness::compare_with_oracle(&sc, 2 * sc.oracle_steps)?;
            println!("steps,density_rel_l2,wavefunction_rel_l2");
            for c in [coarse, fine] {
                println!("{},{:.6e},{:.6e}", c.steps, c.density_rel_l2, c.wavefunction_rel_l2);
            }
            println!(
                "splitting error ratio: {:.4}",
                coarse.wavefunction_rel_l2 / fine.wavefunction_rel_l2
            );
            let mut failures = Vec::new();
            if coarse.density_rel_l2 > tolerances::ORACLE_DENSITY_REL_L2 {
                failures.push(format!(
                    "density error {:.3e} > {:.0e}",
                    coarse.density_rel_l2,
                    tolerances::ORACLE_DENSITY_REL_L2
                ));
            }
            Ok(outcome(failures))
        }
        Command::Entropy { config, samples } => {
            let sc = Scenario::load(&config)?;
            println!("t_s,entropy_nats");
            for (t, s) in harness::entropy_timeline(&sc, samples)? {
                println!("{t:.14e},{s:.14e}");
            }
            Ok(Outcome::Pass)
        }
        Command::Interfere { config, t } => {
            let mut sc = Scenario::load(&config)?;
            sc.segments = interferometer_segments(sc.cfg.beta, t)?;
            if !sc.outputs.contains(&Output::CompareTable) {
                sc.outputs.push(Output::CompareTable);
            }
            let report = harness::run(&sc)?;
            let fin = sc.final_state()?;
            let entropy = entanglement_entropy(&spin_rdm(&fin)?)?;
            let mut failures = report.failures();
            println!("m,net_momentum_kick,net_deflection_m");
            for (i, m) in report.m_values.iter().enumerate() {
                let arm = (sc.cfg.hbar * m * sc.cfg.gamma() * sc.cfg.beta * t).abs();
                let kick = report.momentum_kick[i];
                println!("{m},{kick:.6e},{:.6e}", report.deflection_m[i]);
                if arm > 0.0 && kick.abs() > tolerances::INTERFEROMETER_KICK_REL * arm {
                    failures.push(format!("m = {m}: net kick {kick:.3e} does not vanish"));
                }
            }
            println!("entropy_nats: {entropy:.6e}");
            if let Some(err) = report.oracle_l2_error {
                println!("oracle_l2_error: {err:.6e}");
            }
            if entropy > tolerances::ENTROPY_RECOMBINED {
                failures.push(format!("entropy {entropy:.3e} > {:.0e}", tolerances::ENTROPY_RECOMBINED));
            }
            Ok(outcome(failures))
        }
        Command::BchCheck { n, spin, tol, resolved } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(SgeError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
            }
            let (grid, cfg, t) = harness::default_bch_setup(n)?;
            let b = harness::bch_check(&grid, spin, t, &cfg)?;
            println!("{}", serde_json::to_string_pretty(&b)?);
            let (name, value) = if resolved {
                ("resolved-probe", b.resolved_max_error)
            } else {
                ("full-matrix", b.full_max_error)
            };
            let mut failures = Vec::new();
            if value > tol {
                failures.push(format!("{name} error {value:.3e} > {tol:.0e}"));
            }
            Ok(outcome(failures))
        }
    }
}

fn write_outputs(report: &Report, out: &Path) -> sge_core::Result<()> {
    std::fs::create_dir_all(out)?;
    harness::write_density_csv(out.join("density_z.csv"), &report.density)?;
    report.write_json(out.join("report.json"))
}
