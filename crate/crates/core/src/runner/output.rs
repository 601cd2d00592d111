use std::fs;
use std::path::Path;

use super::config::ExperimentConfig;
use super::run::ExperimentResult;
use crate::error::Result;

pub const REGRET_FILE: &str = "regret.csv";
pub const PHASE_FILE: &str = "phase.csv";
pub const CONFIG_FILE: &str = "config_echo";

pub const REGRET_HEADER: [&str; 5] = [
    "round",
    "mean_regret",
    "stderr_regret",
    "mean_classifier_regret",
    "stderr_classifier_regret",
];
pub const PHASE_HEADER: [&str; 7] = [
    "rep",
    "round",
    "param1",
    "param2",
    "chosen_action",
    "optimal_action",
    "gap",
];

/// The resolved configuration followed by derived quantities, one
/// `key = value` per line. Feeding it back through the settings parser
/// reproduces the run.
pub fn config_echo(config: &ExperimentConfig, result: &ExperimentResult) -> String {
    config
        .to_settings()
        .iter()
        .chain(result.derived.iter())
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

fn write_regret(path: &Path, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(REGRET_HEADER)?;
    let c = &result.curve;
    for t in 0..c.mean_regret.len() {
        w.write_record([
            t.to_string(),
            c.mean_regret[t].to_string(),
            c.stderr_regret[t].to_string(),
            c.mean_classifier[t].to_string(),
            c.stderr_classifier[t].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_phase(path: &Path, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(PHASE_HEADER)?;
    for p in &result.phase_points {
        let (p1, p2) = match p.params.map(|c| c.columns()) {
            Some((a, b)) => (a.to_string(), b.map(|b| b.to_string()).unwrap_or_default()),
            None => (String::new(), String::new()),
        };
        w.write_record([
            p.rep.to_string(),
            p.round.to_string(),
            p1,
            p2,
            p.chosen.to_string(),
            p.optimal.to_string(),
            p.gap.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `regret.csv`, `phase.csv` and `config_echo` into `config.out`.
pub fn write_outputs(config: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    write_regret(&dir.join(REGRET_FILE), result)?;
    write_phase(&dir.join(PHASE_FILE), result)?;
    fs::write(dir.join(CONFIG_FILE), config_echo(config, result))?;
    Ok(())
}
