//! The environment the learner plays against.
//!
//! A reward for context `O = Σ w_P P` on action `ρ` is assembled from one
//! independent ±1 measurement per Pauli term, `R = Σ w_P r_P` with
//! `P(r_P = +1) = (Tr(ρP) + 1)/2`. Its mean is `Tr(ρO)`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{QcbError, Result};
use crate::pauli::{Observable, PauliString};
use crate::stabilizer::StabilizerState;

/// An action state, seen only through its Pauli expectations.
pub trait Arm: Send + Sync {
    fn num_qubits(&self) -> usize;

    fn label(&self) -> &str;

    /// `Tr(ρ P)`.
    fn pauli_mean(&self, p: &PauliString) -> Result<f64>;

    /// `Tr(ρ O)`.
    fn mean(&self, o: &Observable) -> Result<f64> {
        QcbError::check_dim(self.num_qubits(), o.num_qubits())?;
        let mut total = 0.0;
        for (p, w) in o.terms() {
            total += w * self.pauli_mean(p)?;
        }
        Ok(total)
    }
}

impl Arm for StabilizerState {
    fn num_qubits(&self) -> usize {
        StabilizerState::num_qubits(self)
    }

    fn label(&self) -> &str {
        StabilizerState::label(self)
    }

    fn pauli_mean(&self, p: &PauliString) -> Result<f64> {
        self.expectation(p)
    }
}

/// One ±1 outcome with mean `mean`. Expectations of exactly ±1 are returned
/// without touching the generator.
pub fn sample_pm1<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    if mean >= 1.0 {
        return 1.0;
    }
    if mean <= -1.0 {
        return -1.0;
    }
    if rng.random_bool((mean + 1.0) / 2.0) {
        1.0
    } else {
        -1.0
    }
}

/// Single-shot measurement of one Pauli string: `2·Bern((Tr(ρP)+1)/2) − 1`.
pub fn sample_pauli_reward<A: Arm + ?Sized, R: Rng + ?Sized>(
    arm: &A,
    p: &PauliString,
    rng: &mut R,
) -> Result<f64> {
    QcbError::check_dim(arm.num_qubits(), p.num_qubits())?;
    Ok(sample_pm1(arm.pauli_mean(p)?, rng))
}

/// `(weight, Tr(ρP))` for every term of the context, in term order.
pub fn term_means<A: Arm + ?Sized>(arm: &A, o: &Observable) -> Result<Vec<(f64, f64)>> {
    QcbError::check_dim(arm.num_qubits(), o.num_qubits())?;
    o.terms()
        .map(|(p, w)| Ok((w, arm.pauli_mean(p)?)))
        .collect()
}

/// Reward drawn from precomputed term means; one draw per non-deterministic
/// term.
pub fn sample_from_terms<R: Rng + ?Sized>(terms: &[(f64, f64)], rng: &mut R) -> f64 {
    terms.iter().map(|&(w, mu)| w * sample_pm1(mu, rng)).sum()
}

pub fn sample_observable_reward<A: Arm + ?Sized, R: Rng + ?Sized>(
    arm: &A,
    o: &Observable,
    rng: &mut R,
) -> Result<f64> {
    Ok(sample_from_terms(&term_means(arm, o)?, rng))
}

/// Variance of a single per-term reward, `Σ w²(1 − μ²)`.
pub fn reward_variance(terms: &[(f64, f64)]) -> f64 {
    terms.iter().map(|&(w, mu)| w * w * (1.0 - mu * mu)).sum()
}

/// A finite set of at least two actions on a common qubit count.
#[derive(Clone)]
pub struct Environment {
    n: usize,
    arms: Vec<Arc<dyn Arm>>,
}

/// Everything the runner needs about one context: exact means of every
/// action and the per-term data to sample any of them.
#[derive(Clone, Debug)]
pub struct ContextEval {
    pub terms: Vec<Vec<(f64, f64)>>,
    pub means: Vec<f64>,
}

impl ContextEval {
    pub fn best_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn optimal(&self) -> usize {
        crate::hamiltonians::argmax(&self.means)
    }

    pub fn gap(&self, a: usize) -> Result<f64> {
        let m = self.means.get(a).ok_or(QcbError::Index {
            index: a,
            len: self.means.len(),
        })?;
        Ok(self.best_mean() - m)
    }

    pub fn sample<R: Rng + ?Sized>(&self, a: usize, rng: &mut R) -> Result<f64> {
        let t = self.terms.get(a).ok_or(QcbError::Index {
            index: a,
            len: self.terms.len(),
        })?;
        Ok(sample_from_terms(t, rng))
    }
}

impl Environment {
    pub fn new(arms: Vec<Arc<dyn Arm>>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(QcbError::config(format!(
                "an environment needs at least 2 actions, got {}",
                arms.len()
            )));
        }
        let n = arms[0].num_qubits();
        for a in &arms {
            QcbError::check_dim(n, a.num_qubits())?;
        }
        Ok(Environment { n, arms })
    }

    pub fn from_states(states: Vec<StabilizerState>) -> Result<Self> {
        Environment::new(
            states
                .into_iter()
                .map(|s| Arc::new(s) as Arc<dyn Arm>)
                .collect(),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_actions(&self) -> usize {
        self.arms.len()
    }

    pub fn arm(&self, a: usize) -> Result<&dyn Arm> {
        self.arms.get(a).map(|a| a.as_ref()).ok_or(QcbError::Index {
            index: a,
            len: self.arms.len(),
        })
    }

    pub fn labels(&self) -> Vec<String> {
        self.arms.iter().map(|a| a.label().to_string()).collect()
    }

    pub fn means(&self, o: &Observable) -> Result<Vec<f64>> {
        self.arms.iter().map(|a| a.mean(o)).collect()
    }

    /// `max_i Tr(ρ_i O) − Tr(ρ_a O)`.
    pub fn suboptimality_gap(&self, a: usize, o: &Observable) -> Result<f64> {
        if a >= self.arms.len() {
            return Err(QcbError::Index {
                index: a,
                len: self.arms.len(),
            });
        }
        let means = self.means(o)?;
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(best - means[a])
    }

    pub fn evaluate(&self, o: &Observable) -> Result<ContextEval> {
        let terms: Vec<Vec<(f64, f64)>> = self
            .arms
            .iter()
            .map(|a| term_means(a.as_ref(), o))
            .collect::<Result<_>>()?;
        let means = terms
            .iter()
            .map(|t| t.iter().map(|(w, mu)| w * mu).sum())
            .collect();
        Ok(ContextEval { terms, means })
    }
}
