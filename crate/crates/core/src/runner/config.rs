//! Experiment configuration.
//!
//! Settings are flat `key = value` pairs. Keys match the CLI flag names
//! without the leading dashes (`qubits`, `h-min`, `phase-log-start`, ...), so
//! a settings file and a command line can be merged before validation. Keys
//! starting with `derived.` are informational output and ignored on input.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{QcbError, Result};
use crate::hamiltonians::{ContextDistribution, Family, Interval, DEFAULT_RANGE};
use crate::linucb::{AlphaSchedule, ParamBound, DEFAULT_DELTA};

pub type Settings = BTreeMap<String, String>;

pub const DEFAULT_QUBITS: usize = 10;
pub const DEFAULT_ROUNDS: usize = 2000;
pub const DEFAULT_REPS: usize = 20;
pub const DEFAULT_LB_QUBITS: usize = 1;
pub const DEFAULT_LB_ACTIONS: usize = 4;
pub const DEFAULT_LB_CONTEXTS: usize = 3;

const KNOWN_KEYS: &[&str] = &[
    "family",
    "qubits",
    "rounds",
    "reps",
    "seed",
    "out",
    "alpha",
    "alpha-m",
    "alpha-l",
    "alpha-delta",
    "h-min",
    "h-max",
    "j1-min",
    "j1-max",
    "j2-min",
    "j2-max",
    "actions",
    "contexts",
    "delta",
    "phase-log-start",
];

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Ising,
    Cluster,
    LowerBound,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Ising => "ising",
            FamilyKind::Cluster => "cluster",
            FamilyKind::LowerBound => "lower_bound",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = QcbError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ising" => Ok(FamilyKind::Ising),
            "cluster" => Ok(FamilyKind::Cluster),
            "lower_bound" | "lower-bound" => Ok(FamilyKind::LowerBound),
            other => Err(QcbError::config(format!("unknown family {other:?}"))),
        }
    }
}

/// Family-specific part of a configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySetup {
    Hamiltonian(ContextDistribution),
    LowerBound {
        actions: usize,
        contexts: usize,
        delta: Option<f64>,
    },
}

/// How α is chosen; `None` bounds are derived from the family.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSetting {
    Auto {
        m: Option<f64>,
        l: Option<f64>,
        delta: f64,
    },
    Fixed(f64),
}

impl AlphaSetting {
    fn describe(&self) -> String {
        match self {
            AlphaSetting::Auto { .. } => "auto".into(),
            AlphaSetting::Fixed(v) => format!("fixed:{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub family: FamilyKind,
    pub setup: FamilySetup,
    pub qubits: usize,
    pub rounds: usize,
    pub reps: usize,
    pub seed: u64,
    pub alpha: AlphaSetting,
    pub out: PathBuf,
    pub phase_log_start: usize,
}

/// Parses `key = value` lines. `#` starts a comment; later keys override
/// earlier ones.
pub fn parse_settings(text: &str) -> Result<Settings> {
    let mut out = Settings::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            QcbError::config(format!(
                "line {}: expected `key = value`, got {raw:?}",
                lineno + 1
            ))
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(QcbError::config(format!("line {}: empty key", lineno + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn get<T: FromStr>(s: &Settings, key: &str) -> Result<Option<T>> {
    match s.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| QcbError::config(format!("invalid value {v:?} for {key}"))),
    }
}

fn get_or<T: FromStr>(s: &Settings, key: &str, default: T) -> Result<T> {
    Ok(get(s, key)?.unwrap_or(default))
}

fn interval(s: &Settings, name: &str) -> Result<Interval> {
    let min = get_or(s, &format!("{name}-min"), DEFAULT_RANGE.0)?;
    let max = get_or(s, &format!("{name}-max"), DEFAULT_RANGE.1)?;
    Interval::new(min, max)
        .map_err(|_| QcbError::config(format!("{name} range [{min}, {max}] is invalid")))
}

fn parse_alpha(s: &Settings) -> Result<AlphaSetting> {
    let mode = s.get("alpha").map(String::as_str).unwrap_or("auto");
    let m: Option<f64> = get(s, "alpha-m")?;
    let l: Option<f64> = get(s, "alpha-l")?;
    let delta = get_or(s, "alpha-delta", DEFAULT_DELTA)?;
    if mode == "auto" {
        return Ok(AlphaSetting::Auto { m, l, delta });
    }
    let v = mode
        .strip_prefix("fixed:")
        .and_then(|v| v.parse::<f64>().ok())
        .ok_or_else(|| {
            QcbError::config(format!(
                "alpha must be `auto` or `fixed:<value>`, got {mode:?}"
            ))
        })?;
    Ok(AlphaSetting::Fixed(v))
}

impl ExperimentConfig {
    /// Resolves defaults and validates. `family` comes from the subcommand; a
    /// `family` key in the settings must agree with it.
    pub fn from_settings(family: FamilyKind, s: &Settings) -> Result<Self> {
        for key in s.keys() {
            if !key.starts_with("derived.") && !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(QcbError::config(format!("unknown setting {key:?}")));
            }
        }
        if let Some(f) = s.get("family") {
            let f: FamilyKind = f.parse()?;
            if f != family {
                return Err(QcbError::config(format!(
                    "settings are for family {f}, not {family}"
                )));
            }
        }

        let setup = match family {
            FamilyKind::Ising => FamilySetup::Hamiltonian(ContextDistribution::Ising {
                h: interval(s, "h")?,
            }),
            FamilyKind::Cluster => FamilySetup::Hamiltonian(ContextDistribution::Cluster {
                j1: interval(s, "j1")?,
                j2: interval(s, "j2")?,
            }),
            FamilyKind::LowerBound => FamilySetup::LowerBound {
                actions: get_or(s, "actions", DEFAULT_LB_ACTIONS)?,
                contexts: get_or(s, "contexts", DEFAULT_LB_CONTEXTS)?,
                delta: get(s, "delta")?,
            },
        };
        let default_qubits = if family == FamilyKind::LowerBound {
            DEFAULT_LB_QUBITS
        } else {
            DEFAULT_QUBITS
        };
        let rounds = get_or(s, "rounds", DEFAULT_ROUNDS)?;
        let config = ExperimentConfig {
            family,
            setup,
            qubits: get_or(s, "qubits", default_qubits)?,
            rounds,
            reps: get_or(s, "reps", DEFAULT_REPS)?,
            seed: get_or(s, "seed", 0u64)?,
            alpha: parse_alpha(s)?,
            out: get_or(s, "out", PathBuf::from("results"))?,
            phase_log_start: get_or(s, "phase-log-start", rounds / 10)?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn defaults(family: FamilyKind) -> Self {
        ExperimentConfig::from_settings(family, &Settings::new()).expect("defaults are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(QcbError::config("rounds must be at least 1"));
        }
        if self.reps == 0 {
            return Err(QcbError::config("reps must be at least 1"));
        }
        if self.phase_log_start >= self.rounds {
            return Err(QcbError::config(format!(
                "phase-log-start {} must be below rounds {}",
                self.phase_log_start, self.rounds
            )));
        }
        match &self.setup {
            FamilySetup::Hamiltonian(_) => {
                if self.qubits < 4 || !self.qubits.is_multiple_of(2) {
                    return Err(QcbError::config(format!(
                        "{} family needs an even qubit count of at least 4, got {}",
                        self.family, self.qubits
                    )));
                }
            }
            FamilySetup::LowerBound {
                actions,
                contexts,
                delta,
            } => {
                if self.qubits == 0 {
                    return Err(QcbError::config(
                        "lower-bound family needs at least one qubit",
                    ));
                }
                if *actions < 2 {
                    return Err(QcbError::config(
                        "lower-bound family needs at least 2 actions",
                    ));
                }
                if *contexts == 0 {
                    return Err(QcbError::config(
                        "lower-bound family needs at least one context",
                    ));
                }
                if let Some(d) = delta {
                    if !(d.is_finite() && *d >= 0.0) {
                        return Err(QcbError::config(format!(
                            "delta must be non-negative, got {d}"
                        )));
                    }
                }
            }
        }
        match &self.alpha {
            AlphaSetting::Fixed(v) => AlphaSchedule::Fixed(*v).validate(),
            AlphaSetting::Auto { m, l, delta } => AlphaSchedule::Auto {
                m: ParamBound::Value(m.unwrap_or(1.0)),
                l: l.unwrap_or(1.0),
                delta: *delta,
            }
            .validate(),
        }
    }

    /// Resolved `key = value` pairs in the settings vocabulary.
    pub fn to_settings(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![
            ("family".into(), self.family.to_string()),
            ("qubits".into(), self.qubits.to_string()),
            ("rounds".into(), self.rounds.to_string()),
            ("reps".into(), self.reps.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("out".into(), self.out.display().to_string()),
            ("alpha".into(), self.alpha.describe()),
        ];
        if let AlphaSetting::Auto { m, l, delta } = &self.alpha {
            if let Some(m) = m {
                out.push(("alpha-m".into(), m.to_string()));
            }
            if let Some(l) = l {
                out.push(("alpha-l".into(), l.to_string()));
            }
            out.push(("alpha-delta".into(), delta.to_string()));
        }
        match &self.setup {
            FamilySetup::Hamiltonian(ContextDistribution::Ising { h }) => {
                out.push(("h-min".into(), h.min.to_string()));
                out.push(("h-max".into(), h.max.to_string()));
            }
            FamilySetup::Hamiltonian(ContextDistribution::Cluster { j1, j2 }) => {
                out.push(("j1-min".into(), j1.min.to_string()));
                out.push(("j1-max".into(), j1.max.to_string()));
                out.push(("j2-min".into(), j2.min.to_string()));
                out.push(("j2-max".into(), j2.max.to_string()));
            }
            FamilySetup::LowerBound {
                actions,
                contexts,
                delta,
            } => {
                out.push(("actions".into(), actions.to_string()));
                out.push(("contexts".into(), contexts.to_string()));
                if let Some(d) = delta {
                    out.push(("delta".into(), d.to_string()));
                }
            }
        }
        out.push(("phase-log-start".into(), self.phase_log_start.to_string()));
        out
    }

    pub fn hamiltonian_family(&self) -> Option<Family> {
        match self.family {
            FamilyKind::Ising => Some(Family::Ising),
            FamilyKind::Cluster => Some(Family::Cluster),
            FamilyKind::LowerBound => None,
        }
    }
}
