//! Experiment configuration, the round loop, and CSV output.

mod config;
mod output;
mod run;

pub use config::{
    parse_settings, AlphaSetting, ExperimentConfig, FamilyKind, FamilySetup, Settings,
    DEFAULT_LB_ACTIONS, DEFAULT_LB_CONTEXTS, DEFAULT_LB_QUBITS, DEFAULT_QUBITS, DEFAULT_REPS,
    DEFAULT_ROUNDS,
};
pub use output::{
    config_echo, write_outputs, CONFIG_FILE, PHASE_FILE, PHASE_HEADER, REGRET_FILE, REGRET_HEADER,
};
pub use run::{
    aggregate, derive_seed, rep_seed, run_experiment, run_single, Experiment, ExperimentResult,
    PhasePoint, RegretCurve, RoundRecord, RunTrace,
};
