use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{AlphaSetting, ExperimentConfig, FamilySetup};
use crate::env::{Arm, ContextEval, Environment};
use crate::error::{QcbError, Result};
use crate::hamiltonians::{actions, sample_context, ContextDistribution, ContextParams};
use crate::linucb::{AlphaSchedule, ParamBound, PolicyState, DEFAULT_TOLERANCE};
use crate::lower_bound::{build_hard_instance, HardInstance};
use crate::pauli::{Observable, PauliString};

/// Deterministic 64-bit seed for a named stream: the first eight bytes of
/// `SHA-256(tag ‖ master ‖ index)`, little-endian.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn rep_seed(master: u64, rep: usize) -> u64 {
    derive_seed(master, "rep", rep as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub params: Option<ContextParams>,
    pub chosen: usize,
    pub optimal: usize,
    pub gap: f64,
    pub realized_reward: f64,
}

/// One repetition's log.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub rep: usize,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
    pub final_dimension: usize,
    pub final_alpha: f64,
}

impl RunTrace {
    pub fn cumulative_regret(&self) -> Vec<f64> {
        self.records
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r.gap;
                Some(*acc)
            })
            .collect()
    }

    pub fn cumulative_classifier_regret(&self) -> Vec<f64> {
        self.records
            .iter()
            .scan(0.0, |acc, r| {
                *acc += (r.chosen != r.optimal) as u8 as f64;
                Some(*acc)
            })
            .collect()
    }
}

/// Across-repetition mean and standard error of the cumulative curves.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretCurve {
    pub mean_regret: Vec<f64>,
    pub stderr_regret: Vec<f64>,
    pub mean_classifier: Vec<f64>,
    pub stderr_classifier: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub rep: usize,
    pub round: usize,
    pub params: Option<ContextParams>,
    pub chosen: usize,
    pub optimal: usize,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub curve: RegretCurve,
    pub phase_points: Vec<PhasePoint>,
    pub traces: Vec<RunTrace>,
    pub derived: Vec<(String, String)>,
}

fn mean_and_stderr(columns: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let reps = columns.len();
    let len = columns.first().map_or(0, Vec::len);
    let mut mean = Vec::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    for t in 0..len {
        let m = columns.iter().map(|c| c[t]).sum::<f64>() / reps as f64;
        let se = if reps > 1 {
            let var = columns.iter().map(|c| (c[t] - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
            (var / reps as f64).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        stderr.push(se);
    }
    (mean, stderr)
}

pub fn aggregate(traces: &[RunTrace]) -> RegretCurve {
    let regret: Vec<Vec<f64>> = traces.iter().map(RunTrace::cumulative_regret).collect();
    let classifier: Vec<Vec<f64>> = traces
        .iter()
        .map(RunTrace::cumulative_classifier_regret)
        .collect();
    let (mean_regret, stderr_regret) = mean_and_stderr(&regret);
    let (mean_classifier, stderr_classifier) = mean_and_stderr(&classifier);
    RegretCurve {
        mean_regret,
        stderr_regret,
        mean_classifier,
        stderr_classifier,
    }
}

enum Contexts {
    Sampled(ContextDistribution),
    Scheduled(HardInstance),
}

/// Per-run memo of `Tr(ρ_a P)`; contexts of a family reuse the same strings.
struct MeanCache {
    per_arm: Vec<HashMap<PauliString, f64>>,
}

impl MeanCache {
    fn new(k: usize) -> Self {
        MeanCache {
            per_arm: vec![HashMap::new(); k],
        }
    }

    fn evaluate(&mut self, env: &Environment, o: &Observable) -> Result<ContextEval> {
        let mut terms = Vec::with_capacity(env.num_actions());
        let mut means = Vec::with_capacity(env.num_actions());
        for (a, cache) in self.per_arm.iter_mut().enumerate() {
            let arm = env.arm(a)?;
            let mut t = Vec::with_capacity(o.len());
            for (p, w) in o.terms() {
                let mu = match cache.get(p) {
                    Some(&mu) => mu,
                    None => {
                        let mu = arm.pauli_mean(p)?;
                        cache.insert(p.clone(), mu);
                        mu
                    }
                };
                t.push((w, mu));
            }
            means.push(t.iter().map(|(w, mu)| w * mu).sum());
            terms.push(t);
        }
        Ok(ContextEval { terms, means })
    }
}

/// A configured experiment with its environment built once and shared by
/// all repetitions.
pub struct Experiment {
    config: ExperimentConfig,
    env: Environment,
    contexts: Contexts,
    schedule: AlphaSchedule,
    rounds: usize,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let n = config.qubits;
        let (env, contexts, default_l) = match &config.setup {
            FamilySetup::Hamiltonian(dist) => {
                let env = Environment::from_states(actions(dist.family(), n)?)?;
                (env, Contexts::Sampled(*dist), dist.max_context_norm(n))
            }
            FamilySetup::LowerBound {
                actions,
                contexts,
                delta,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "instance", 0));
                let inst =
                    build_hard_instance(n, *actions, *contexts, config.rounds, *delta, &mut rng)?;
                let arms = inst
                    .arms()
                    .into_iter()
                    .map(|a| Arc::new(a) as Arc<dyn Arm>)
                    .collect();
                (Environment::new(arms)?, Contexts::Scheduled(inst), 1.0)
            }
        };
        let schedule = match config.alpha {
            AlphaSetting::Fixed(v) => AlphaSchedule::Fixed(v),
            AlphaSetting::Auto { m, l, delta } => AlphaSchedule::Auto {
                m: m.map_or(ParamBound::QubitsSqrtDim { qubits: n }, ParamBound::Value),
                l: l.unwrap_or(default_l),
                delta,
            },
        };
        schedule.validate()?;
        let rounds = match &contexts {
            Contexts::Sampled(_) => config.rounds,
            Contexts::Scheduled(inst) => inst.schedule_len(),
        };
        if config.phase_log_start >= rounds {
            return Err(QcbError::config(format!(
                "phase-log-start {} must be below the {rounds} scheduled rounds",
                config.phase_log_start
            )));
        }
        Ok(Experiment {
            config,
            env,
            contexts,
            schedule,
            rounds,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn schedule(&self) -> &AlphaSchedule {
        &self.schedule
    }

    /// Rounds actually played; the lower-bound schedule truncates to whole
    /// context groups.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn hard_instance(&self) -> Option<&HardInstance> {
        match &self.contexts {
            Contexts::Scheduled(inst) => Some(inst),
            Contexts::Sampled(_) => None,
        }
    }

    pub fn run_single(&self, rep: usize) -> Result<RunTrace> {
        let seed = rep_seed(self.config.seed, rep);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut policy =
            PolicyState::new(self.env.num_actions(), self.schedule, DEFAULT_TOLERANCE)?;
        let mut cache = MeanCache::new(self.env.num_actions());
        let mut records = Vec::with_capacity(self.rounds);

        for t in 0..self.rounds {
            let (params, context) = match &self.contexts {
                Contexts::Sampled(dist) => {
                    let (p, o) = sample_context(dist, self.config.qubits, &mut rng)?;
                    (Some(p), o)
                }
                Contexts::Scheduled(inst) => (None, inst.context_observable(inst.context_at(t)?)?),
            };
            let coords = policy.gram_update(&context)?;
            let selection = policy.select_action(&coords)?;
            let eval = cache.evaluate(&self.env, &context)?;
            let reward = eval.sample(selection.action, &mut rng)?;
            policy.update(selection.action, &coords, reward)?;
            records.push(RoundRecord {
                t,
                params,
                chosen: selection.action,
                optimal: eval.optimal(),
                gap: eval.gap(selection.action)?,
                realized_reward: reward,
            });
        }
        Ok(RunTrace {
            rep,
            seed,
            records,
            final_dimension: policy.effective_dimension(),
            final_alpha: policy.alpha(),
        })
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        let traces: Vec<RunTrace> = (0..self.config.reps)
            .into_par_iter()
            .map(|rep| self.run_single(rep))
            .collect::<Result<_>>()?;
        let curve = aggregate(&traces);
        let phase_points = traces
            .iter()
            .flat_map(|tr| {
                tr.records[self.config.phase_log_start..]
                    .iter()
                    .map(move |r| PhasePoint {
                        rep: tr.rep,
                        round: r.t,
                        params: r.params,
                        chosen: r.chosen,
                        optimal: r.optimal,
                        gap: r.gap,
                    })
            })
            .collect();
        let derived = self.derived(&traces);
        Ok(ExperimentResult {
            curve,
            phase_points,
            traces,
            derived,
        })
    }

    fn derived(&self, traces: &[RunTrace]) -> Vec<(String, String)> {
        let d_eff = traces.iter().map(|t| t.final_dimension).max().unwrap_or(0);
        let mut out = vec![
            ("derived.d_eff".to_string(), d_eff.to_string()),
            (
                "derived.effective_rounds".to_string(),
                self.rounds.to_string(),
            ),
            ("derived.actions".to_string(), self.env.labels().join(",")),
        ];
        match self.schedule {
            AlphaSchedule::Fixed(v) => out.push(("derived.alpha".into(), v.to_string())),
            AlphaSchedule::Auto { m, l, delta } => {
                out.push(("derived.m".into(), m.resolve(d_eff).to_string()));
                out.push(("derived.L".into(), l.to_string()));
                out.push(("derived.delta".into(), delta.to_string()));
                let final_alpha = traces.iter().map(|t| t.final_alpha).fold(0.0, f64::max);
                out.push(("derived.final_alpha".into(), final_alpha.to_string()));
            }
        }
        if let Contexts::Scheduled(inst) = &self.contexts {
            out.push(("derived.c_prime".into(), inst.c_prime.to_string()));
            out.push(("derived.group_length".into(), inst.group_length.to_string()));
            out.push(("derived.instance_delta".into(), inst.delta.to_string()));
            let ctx: Vec<String> = inst.contexts.iter().map(|p| p.to_string()).collect();
            out.push(("derived.contexts".into(), ctx.join(",")));
            let assign: Vec<String> = inst.assignment.iter().map(|a| a.to_string()).collect();
            out.push(("derived.assignment".into(), assign.join(",")));
        }
        for t in traces {
            out.push((format!("derived.rep_seed.{}", t.rep), t.seed.to_string()));
        }
        out
    }
}

pub fn run_single(config: &ExperimentConfig, rep: usize) -> Result<RunTrace> {
    Experiment::new(config.clone())?.run_single(rep)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    Experiment::new(config.clone())?.run()
}
