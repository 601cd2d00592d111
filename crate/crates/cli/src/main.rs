use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcb::linucb::ambient::check_equivalence;
use qcb::runner::{
    parse_settings, run_experiment, write_outputs, ExperimentConfig, FamilyKind, Settings,
};
use qcb::QcbError;

/// Quantum contextual bandit experiments.
#[derive(Parser, Debug)]
#[command(name = "qcb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transverse-field Ising contexts, three stabilizer actions.
    Ising(ExperimentArgs),
    /// Cluster-Ising contexts, five stabilizer actions.
    Cluster(ExperimentArgs),
    /// Hard instance: perturbed maximally mixed actions, Pauli contexts.
    LowerBound(ExperimentArgs),
    /// Compare compressed LinUCB with the full-basis reference.
    EquivalenceCheck(EquivalenceArgs),
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// `key = value` settings file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `auto` or `fixed:<value>`.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    alpha_m: Option<f64>,
    #[arg(long)]
    alpha_l: Option<f64>,
    #[arg(long)]
    alpha_delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    j1_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    j1_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    j2_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    j2_max: Option<f64>,
    #[arg(long)]
    actions: Option<usize>,
    #[arg(long)]
    contexts: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    phase_log_start: Option<usize>,
}

#[derive(Args, Debug)]
struct EquivalenceArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    qubits: usize,
    #[arg(long, default_value_t = 3)]
    actions: usize,
    #[arg(long, default_value_t = 500)]
    rounds: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Largest accepted score difference.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

impl ExperimentArgs {
    fn settings(&self) -> Result<Settings, QcbError> {
        let mut s = match &self.config {
            Some(path) => parse_settings(&fs::read_to_string(path)?)?,
            None => Settings::new(),
        };
        let flags: [(&str, Option<String>); 19] = [
            ("qubits", self.qubits.map(|v| v.to_string())),
            ("rounds", self.rounds.map(|v| v.to_string())),
            ("reps", self.reps.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|v| v.display().to_string())),
            ("alpha", self.alpha.clone()),
            ("alpha-m", self.alpha_m.map(|v| v.to_string())),
            ("alpha-l", self.alpha_l.map(|v| v.to_string())),
            ("alpha-delta", self.alpha_delta.map(|v| v.to_string())),
            ("h-min", self.h_min.map(|v| v.to_string())),
            ("h-max", self.h_max.map(|v| v.to_string())),
            ("j1-min", self.j1_min.map(|v| v.to_string())),
            ("j1-max", self.j1_max.map(|v| v.to_string())),
            ("j2-min", self.j2_min.map(|v| v.to_string())),
            ("j2-max", self.j2_max.map(|v| v.to_string())),
            ("actions", self.actions.map(|v| v.to_string())),
            ("contexts", self.contexts.map(|v| v.to_string())),
            ("delta", self.delta.map(|v| v.to_string())),
            (
                "phase-log-start",
                self.phase_log_start.map(|v| v.to_string()),
            ),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        }
        Ok(s)
    }
}

fn run_family(family: FamilyKind, args: &ExperimentArgs) -> Result<(), QcbError> {
    let config = ExperimentConfig::from_settings(family, &args.settings()?)?;
    let result = run_experiment(&config)?;
    write_outputs(&config, &result)?;
    let last = result.curve.mean_regret.len() - 1;
    println!(
        "{family}: {} reps x {} rounds, mean regret {:.3} ± {:.3}, mean misclassifications {:.1}; wrote {}",
        config.reps,
        last + 1,
        result.curve.mean_regret[last],
        result.curve.stderr_regret[last],
        result.curve.mean_classifier[last],
        config.out.display()
    );
    Ok(())
}

fn run_equivalence(args: &EquivalenceArgs) -> Result<bool, QcbError> {
    let r = check_equivalence(
        args.qubits,
        args.actions,
        args.rounds,
        args.alpha,
        args.seed,
    )?;
    let ok = r.passed(args.tolerance);
    println!(
        "seed {}: {}/{} rounds agree, max score difference {:.3e}, effective dimension {} -> {}",
        args.seed,
        r.agreements,
        r.rounds,
        r.max_score_diff,
        r.final_dimension,
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(ok)
}

fn exit_code(e: &QcbError) -> ExitCode {
    if e.is_numerical() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Ising(a) => run_family(FamilyKind::Ising, a).map(|_| true),
        Command::Cluster(a) => run_family(FamilyKind::Cluster, a).map(|_| true),
        Command::LowerBound(a) => run_family(FamilyKind::LowerBound, a).map(|_| true),
        Command::EquivalenceCheck(a) => run_equivalence(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
