//! Hard instances for regret lower-bound studies.
//!
//! Action `a` is `ρ_a = I/d + Σ_j (Δ/d) σ_{a,j}` over the Pauli contexts
//! assigned to it. Contexts arrive in consecutive groups of `⌊T/c'⌋` rounds.
//! Because distinct Pauli strings are trace-orthogonal, `Tr(ρ_a σ_s)` is `Δ`
//! when `σ_s` is assigned to `a` and `0` otherwise, so nothing is ever
//! materialised as a matrix.

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;

use crate::dense::{pauli_matrix, MAX_DENSE_QUBITS};
use crate::env::{sample_pm1, Arm};
use crate::error::{QcbError, Result};
use crate::pauli::{Observable, PauliString};

pub const DEFAULT_EPSILON: f64 = 0.1;

/// Enumerate-and-sample below this many candidate strings, rejection-sample
/// above it.
const ENUMERATION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Debug)]
pub struct HardInstance {
    pub n: usize,
    pub k: usize,
    pub c_prime: usize,
    pub delta: f64,
    pub group_length: usize,
    pub contexts: Vec<PauliString>,
    pub assignment: Vec<usize>,
}

/// Number of non-identity strings, `4^n − 1`, saturating.
pub fn non_identity_count(n: usize) -> u128 {
    if n >= 64 {
        u128::MAX
    } else {
        (1u128 << (2 * n)) - 1
    }
}

fn sample_contexts<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<PauliString> {
    let available = non_identity_count(n);
    if available <= ENUMERATION_LIMIT {
        return index::sample(rng, available as usize, count)
            .into_iter()
            .map(|i| PauliString::from_index(n, i + 1))
            .collect();
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = PauliString::random(n, rng);
        if !p.is_identity() && seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

/// Builds an instance with `min(c, 4^n − 1)` contexts for a horizon of `t`
/// rounds. With `delta = None` the gap is `ε sqrt(k/T')`, clamped so every
/// action stays a valid density matrix; an explicit `delta` that breaks
/// positivity is rejected.
pub fn build_hard_instance<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    c: usize,
    t: usize,
    delta: Option<f64>,
    rng: &mut R,
) -> Result<HardInstance> {
    if n == 0 {
        return Err(QcbError::config("hard instance needs at least one qubit"));
    }
    if k < 2 {
        return Err(QcbError::config(format!(
            "hard instance needs at least 2 actions, got {k}"
        )));
    }
    if c == 0 {
        return Err(QcbError::config("hard instance needs at least one context"));
    }
    let c_prime = (c as u128).min(non_identity_count(n)) as usize;
    if (t as u128) < c_prime as u128 * k as u128 {
        return Err(QcbError::config(format!(
            "horizon {t} is shorter than c'·k = {}",
            c_prime * k
        )));
    }
    let group_length = t / c_prime;

    let contexts = sample_contexts(n, c_prime, rng);
    let assignment: Vec<usize> = (0..c_prime).map(|_| rng.random_range(0..k)).collect();

    let mut per_action = vec![0usize; k];
    for &a in &assignment {
        per_action[a] += 1;
    }
    let max_load = *per_action.iter().max().expect("k >= 2") as f64;

    let delta = match delta {
        Some(d) => {
            if !(d.is_finite() && d >= 0.0) {
                return Err(QcbError::config(format!(
                    "delta must be finite and non-negative, got {d}"
                )));
            }
            if d * max_load > 1.0 {
                return Err(QcbError::config(format!(
                    "delta {d} with {max_load} contexts on one action breaks positivity (need delta <= {})",
                    1.0 / max_load
                )));
            }
            d
        }
        None => (DEFAULT_EPSILON * (k as f64 / group_length as f64).sqrt()).min(1.0 / max_load),
    };

    Ok(HardInstance {
        n,
        k,
        c_prime,
        delta,
        group_length,
        contexts,
        assignment,
    })
}

impl HardInstance {
    /// Rounds covered by the group schedule, `c' · T'`.
    pub fn schedule_len(&self) -> usize {
        self.c_prime * self.group_length
    }

    pub fn context_at(&self, t: usize) -> Result<usize> {
        if t >= self.schedule_len() {
            return Err(QcbError::Range {
                round: t,
                len: self.schedule_len(),
            });
        }
        Ok(t / self.group_length)
    }

    pub fn context_observable(&self, ctx: usize) -> Result<Observable> {
        let p = self.contexts.get(ctx).ok_or(QcbError::Index {
            index: ctx,
            len: self.c_prime,
        })?;
        Ok(Observable::single(p.clone(), 1.0))
    }

    pub fn optimal_action(&self, ctx: usize) -> Result<usize> {
        self.assignment.get(ctx).copied().ok_or(QcbError::Index {
            index: ctx,
            len: self.c_prime,
        })
    }

    pub fn mean(&self, a: usize, ctx: usize) -> Result<f64> {
        if a >= self.k {
            return Err(QcbError::Index {
                index: a,
                len: self.k,
            });
        }
        Ok(if self.optimal_action(ctx)? == a {
            self.delta
        } else {
            0.0
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, a: usize, ctx: usize, rng: &mut R) -> Result<f64> {
        Ok(sample_pm1(self.mean(a, ctx)?, rng))
    }

    /// Number of contexts assigned to each action.
    pub fn loads(&self) -> Vec<usize> {
        let mut loads = vec![0; self.k];
        for &a in &self.assignment {
            loads[a] += 1;
        }
        loads
    }

    /// The action states as environment arms.
    pub fn arms(&self) -> Vec<PauliMixture> {
        (0..self.k)
            .map(|a| PauliMixture {
                n: self.n,
                delta: self.delta,
                label: format!("mixed_{a}"),
                directions: self
                    .contexts
                    .iter()
                    .zip(&self.assignment)
                    .filter(|(_, &owner)| owner == a)
                    .map(|(p, _)| p.clone())
                    .collect(),
            })
            .collect()
    }
}

/// `I/d + Σ (Δ/d) σ` over a set of Pauli directions.
#[derive(Clone, Debug)]
pub struct PauliMixture {
    n: usize,
    delta: f64,
    label: String,
    directions: HashSet<PauliString>,
}

impl PauliMixture {
    /// Explicit density matrix; small `n` only.
    pub fn density_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(QcbError::Capability(format!(
                "density matrix for {} qubits",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let scale = Complex64::new(1.0 / dim as f64, 0.0);
        let mut rho = DMatrix::<Complex64>::identity(dim, dim) * scale;
        for p in &self.directions {
            rho += pauli_matrix(p)? * (scale * self.delta);
        }
        Ok(rho)
    }
}

impl Arm for PauliMixture {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn pauli_mean(&self, p: &PauliString) -> Result<f64> {
        QcbError::check_dim(self.n, p.num_qubits())?;
        Ok(if p.is_identity() {
            1.0
        } else if self.directions.contains(p) {
            self.delta
        } else {
            0.0
        })
    }
}

/// Regret of a policy that picks actions uniformly at random over the whole
/// schedule: `(pseudo-regret, realised regret)`.
pub fn uniform_policy_regret<R: Rng + ?Sized>(
    inst: &HardInstance,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let mut pseudo = 0.0;
    let mut realised = 0.0;
    for t in 0..inst.schedule_len() {
        let ctx = inst.context_at(t)?;
        let a = rng.random_range(0..inst.k);
        let best = inst.mean(inst.optimal_action(ctx)?, ctx)?;
        pseudo += best - inst.mean(a, ctx)?;
        realised += best - inst.sample(a, ctx, rng)?;
    }
    Ok((pseudo, realised))
}
