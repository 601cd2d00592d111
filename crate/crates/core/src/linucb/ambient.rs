//! Reference LinUCB over the full `4^n`-dimensional Pauli coefficient space,
//! and the check that Gram compression does not change any decision.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alpha::AlphaSchedule;
use super::gram::DEFAULT_TOLERANCE;
use super::policy::{argmax_with_ties, PolicyState};
use crate::env::{sample_observable_reward, Arm};
use crate::error::{QcbError, Result};
use crate::pauli::{Observable, PauliString};
use crate::stabilizer::StabilizerState;

/// Largest qubit count for which the ambient model is built.
pub const MAX_AMBIENT_QUBITS: usize = 3;

/// Uncompressed LinUCB: contexts are their full Pauli coefficient vectors and
/// every `V_a` starts as the `4^n` identity. Scores use an explicit inverse,
/// not the Cholesky route of [`PolicyState`].
#[derive(Clone, Debug)]
pub struct AmbientLinUcb {
    n: usize,
    v: Vec<DMatrix<f64>>,
    b: Vec<DVector<f64>>,
    alpha: f64,
}

impl AmbientLinUcb {
    pub fn new(n: usize, actions: usize, alpha: f64) -> Result<Self> {
        if n == 0 || n > MAX_AMBIENT_QUBITS {
            return Err(QcbError::Capability(format!(
                "ambient model supports 1..={MAX_AMBIENT_QUBITS} qubits, got {n}"
            )));
        }
        let dim = 4usize.pow(n as u32);
        Ok(AmbientLinUcb {
            n,
            v: vec![DMatrix::identity(dim, dim); actions],
            b: vec![DVector::zeros(dim); actions],
            alpha,
        })
    }

    pub fn coordinates(&self, o: &Observable) -> Result<DVector<f64>> {
        QcbError::check_dim(self.n, o.num_qubits())?;
        let mut c = DVector::zeros(4usize.pow(self.n as u32));
        for (p, w) in o.terms() {
            c[p.index()] = w;
        }
        Ok(c)
    }

    pub fn scores(&self, c: &DVector<f64>) -> Result<Vec<f64>> {
        self.v
            .iter()
            .zip(&self.b)
            .map(|(v, b)| {
                let inv = v.clone().try_inverse().ok_or_else(|| {
                    QcbError::Numerical("ambient design matrix is singular".into())
                })?;
                let theta = &inv * b;
                let width = c.dot(&(&inv * c)).max(0.0).sqrt();
                Ok(theta.dot(c) + self.alpha * width)
            })
            .collect()
    }

    pub fn update(&mut self, a: usize, c: &DVector<f64>, reward: f64) -> Result<()> {
        let len = self.v.len();
        let v = self.v.get_mut(a).ok_or(QcbError::Index { index: a, len })?;
        v.ger(1.0, c, c, 1.0);
        self.b[a].axpy(reward, c, 1.0);
        Ok(())
    }
}

/// Summary of a compressed-vs-ambient comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub rounds: usize,
    pub agreements: usize,
    pub max_score_diff: f64,
    pub final_dimension: usize,
}

impl EquivalenceReport {
    pub fn passed(&self, score_tol: f64) -> bool {
        self.agreements == self.rounds && self.max_score_diff <= score_tol
    }
}

fn random_context<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Observable> {
    let terms = rng.random_range(1..=4);
    Observable::from_terms(
        n,
        (0..terms).map(|_| (PauliString::random(n, rng), rng.random_range(-1.0..1.0))),
    )
}

/// Runs both learners on `k` random stabilizer actions and random contexts
/// for `rounds` rounds. Rewards for every action are drawn up front each
/// round, so both learners see the same stream whatever they choose.
pub fn check_equivalence(
    n: usize,
    k: usize,
    rounds: usize,
    alpha: f64,
    seed: u64,
) -> Result<EquivalenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arms: Vec<StabilizerState> = (0..k)
        .map(|_| StabilizerState::random(n, &mut rng))
        .collect::<Result<_>>()?;

    let mut gram = PolicyState::new(k, AlphaSchedule::Fixed(alpha), DEFAULT_TOLERANCE)?;
    let mut ambient = AmbientLinUcb::new(n, k, alpha)?;
    let mut agreements = 0;
    let mut max_score_diff = 0.0f64;

    for _ in 0..rounds {
        let context = random_context(n, &mut rng)?;
        let rewards: Vec<f64> = arms
            .iter()
            .map(|a| sample_observable_reward(a as &dyn Arm, &context, &mut rng))
            .collect::<Result<_>>()?;

        let coords = gram.gram_update(&context)?;
        let sel = gram.select_action(&coords)?;

        let full = ambient.coordinates(&context)?;
        let full_scores = ambient.scores(&full)?;
        let full_choice = argmax_with_ties(&full_scores);

        for (a, b) in sel.scores.iter().zip(&full_scores) {
            max_score_diff = max_score_diff.max((a - b).abs());
        }
        if sel.action == full_choice {
            agreements += 1;
        }
        gram.update(sel.action, &coords, rewards[sel.action])?;
        ambient.update(full_choice, &full, rewards[full_choice])?;
    }
    Ok(EquivalenceReport {
        rounds,
        agreements,
        max_score_diff,
        final_dimension: gram.effective_dimension(),
    })
}
