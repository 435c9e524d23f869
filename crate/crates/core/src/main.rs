use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cavity_cphase::dynamics::PropagationSettings;
use cavity_cphase::gate::DEFAULT_G_HZ;
use cavity_cphase::runner::{
    parse_config, parse_tasks, run_scenario, sweep, Scenario, ScenarioName,
};

const OUTPUTS: &str = "\
Outputs (CSV with header row, six significant digits):
  couplings.csv       j, zeta_prime, xi_prime, lambda_prime
  conditions.csv      name, ratio, threshold, pass
  design_report.csv   j, solved_delta, mismatch_residual, min_separation_achieved, rejected_roots
  gate_report.txt     key = value blocks (scenario, couplings, gate-*, budget)
  checks.txt          PASS/FAIL line per reference check
Sweep columns per task:
  couplings       omega_1..omega_N, lambda_prime_12..lambda_prime_1N, lambda_spread
  conditions      adiabatic_cavity, adiabatic_ctrl, adiabatic_tgt, dispersive_ctrl,
                  dispersive_tgt, cross_ratio, target_ratio, conditions_pass
  design          solved_delta_3..solved_delta_N
  gate-effective  gate_time, fidelity_effective
  gate-full       fidelity_full, max_leakage
  budget          p_e, p_c, fidelity_estimate
Exit status: 0 all checks pass, 1 a check failed, 2 an error occurred.";

/// Controlled-phase gate in a ring of coupled cavities: couplings, design,
/// gate simulation and error budget.
#[derive(Parser, Debug)]
#[command(version, after_help = OUTPUTS, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario (same as passing the flags without a subcommand).
    Run(RunArgs),
    /// Vary one parameter and tabulate task outputs.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Configuration file (required for the custom scenario).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated tasks: couplings, conditions, design, gate-effective, gate-full, budget.
    #[arg(long)]
    tasks: Option<String>,
    /// Per-mode photon cutoff for the full simulation.
    #[arg(long)]
    nmax: Option<usize>,
    /// Integrator step in units of 1/g.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// paper-n3, paper-n4, paper-n200 or custom.
    #[arg(long, default_value = "paper-n3")]
    scenario: String,
    #[command(flatten)]
    common: Common,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Reference coupling g as an angular frequency in rad/s.
    #[arg(long = "g-hz", default_value_t = DEFAULT_G_HZ)]
    g_hz: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Base scenario when no --config is given.
    #[arg(long, default_value = "paper-n3")]
    scenario: String,
    #[command(flatten)]
    common: Common,
    /// Parameter path, e.g. hop, gamma, pair[3], delta_tgt[2].
    #[arg(long)]
    path: String,
    /// Comma-separated values, or start:stop:step (inclusive).
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    values: String,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(scenario: &str, common: &Common) -> Result<Scenario> {
    let name: ScenarioName = scenario.parse()?;
    let mut s = match (&common.config, name) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            Scenario::new(name, parse_config(&text)?)
        }
        (None, ScenarioName::Custom) => bail!("--scenario custom requires --config"),
        (None, _) => Scenario::builtin(name)?,
    };
    if let Some(t) = &common.tasks {
        s.tasks = parse_tasks(t)?;
    }
    if let Some(n) = common.nmax {
        s.config.n_max = n;
    }
    s.settings = PropagationSettings {
        dt: common.dt.unwrap_or(s.settings.dt),
        ..s.settings
    };
    Ok(s)
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let [a, b, step] = text.split(':').collect::<Vec<_>>()[..] {
        let (a, b, step): (f64, f64, f64) =
            (a.trim().parse()?, b.trim().parse()?, step.trim().parse()?);
        if !(step > 0.0) || b < a {
            bail!("range {text:?} needs start ≤ stop and a positive step");
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=count).map(|i| a + i as f64 * step).collect());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("bad value {v:?}"))
        })
        .collect()
}

fn run(args: RunArgs) -> Result<bool> {
    let mut s = load(&args.scenario, &args.common)?;
    s.g_hz = args.g_hz;
    let outcome = run_scenario(&s, &args.out)?;
    for c in &outcome.checks {
        println!("{c}");
    }
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(outcome.passed())
}

fn run_sweep(args: SweepArgs) -> Result<bool> {
    let s = load(&args.scenario, &args.common)?;
    let values = parse_values(&args.values)?;
    let csv = sweep(&s.config, &args.path, &values, &s.tasks, &s.settings)?;
    match args.out {
        Some(path) => std::fs::write(&path, csv)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Run(args)) => run(args),
        Some(Command::Sweep(args)) => run_sweep(args),
        None => run(cli.run),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
