use nalgebra::{DMatrix, DVector};

use super::alpha::AlphaSchedule;
use super::gram::GramBasis;
use crate::error::{QcbError, Result};
use crate::pauli::Observable;

/// Ridge-regression statistics of one action: `V = I + Σ c cᵀ`, `b = Σ R c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionStat {
    pub v: DMatrix<f64>,
    pub b: DVector<f64>,
    pub plays: usize,
}

/// Scores and the estimate they came from, for one action.
#[derive(Clone, Debug)]
struct Evaluation {
    theta: DVector<f64>,
    width_sq: f64,
}

impl ActionStat {
    pub fn new(d: usize) -> Self {
        ActionStat {
            v: DMatrix::identity(d, d),
            b: DVector::zeros(d),
            plays: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `V ⊕ 1`, `b ⊕ 0`.
    pub fn pad(&mut self) {
        let d = self.dim();
        let v = std::mem::replace(&mut self.v, DMatrix::zeros(0, 0));
        self.v = v.resize(d + 1, d + 1, 0.0);
        self.v[(d, d)] = 1.0;
        let b = std::mem::replace(&mut self.b, DVector::zeros(0));
        self.b = b.resize_vertically(d + 1, 0.0);
    }

    fn evaluate(&self, coords: &DVector<f64>) -> Result<Evaluation> {
        let chol = self.v.clone().cholesky().ok_or_else(|| {
            QcbError::Numerical("design matrix lost positive definiteness".into())
        })?;
        let theta = chol.solve(&self.b);
        let width_sq = coords.dot(&chol.solve(coords));
        Ok(Evaluation { theta, width_sq })
    }

    /// `V⁻¹ b`.
    pub fn theta(&self) -> Result<DVector<f64>> {
        Ok(self.evaluate(&DVector::zeros(self.dim()))?.theta)
    }

    /// `θᵀc + α sqrt(cᵀ V⁻¹ c)`.
    pub fn score(&self, coords: &DVector<f64>, alpha: f64) -> Result<f64> {
        let e = self.evaluate(coords)?;
        Ok(e.theta.dot(coords) + alpha * e.width_sq.max(0.0).sqrt())
    }

    pub fn record(&mut self, coords: &DVector<f64>, reward: f64) {
        self.v.ger(1.0, coords, coords, 1.0);
        self.b.axpy(reward, coords, 1.0);
        self.plays += 1;
    }
}

/// Scores closer than this to the maximum count as tied. Exactly tied
/// actions (identical statistics along the context) otherwise get separated
/// by rounding noise.
pub const SCORE_TIE_TOLERANCE: f64 = 1e-10;

/// Index of the largest score, treating anything within
/// [`SCORE_TIE_TOLERANCE`] (relative to the score scale) as a tie broken
/// towards the smallest index.
pub fn argmax_with_ties(scores: &[f64]) -> usize {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = SCORE_TIE_TOLERANCE * best.abs().max(1.0);
    scores.iter().position(|&s| s >= best - tol).unwrap_or(0)
}

/// Outcome of one selection step.
#[derive(Clone, Debug)]
pub struct Selection {
    pub action: usize,
    pub scores: Vec<f64>,
    pub alpha: f64,
}

/// LinUCB over Gram-compressed context coordinates, one independent
/// parameter vector per action.
#[derive(Clone, Debug)]
pub struct PolicyState {
    basis: GramBasis,
    stats: Vec<ActionStat>,
    round: usize,
    schedule: AlphaSchedule,
}

impl PolicyState {
    pub fn new(actions: usize, schedule: AlphaSchedule, tol: f64) -> Result<Self> {
        if actions == 0 {
            return Err(QcbError::config("policy needs at least one action"));
        }
        schedule.validate()?;
        Ok(PolicyState {
            basis: GramBasis::new(tol)?,
            stats: vec![ActionStat::new(0); actions],
            round: 0,
            schedule,
        })
    }

    pub fn basis(&self) -> &GramBasis {
        &self.basis
    }

    pub fn effective_dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn stats(&self) -> &[ActionStat] {
        &self.stats
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn schedule(&self) -> &AlphaSchedule {
        &self.schedule
    }

    pub fn alpha(&self) -> f64 {
        self.schedule.value(self.round, self.basis.len())
    }

    /// Compresses a context into basis coordinates, growing the basis and
    /// padding every action's statistics when the context adds a direction.
    pub fn gram_update(&mut self, c: &Observable) -> Result<Vec<f64>> {
        let (coords, grew) = self.basis.update(c)?;
        if grew {
            for s in &mut self.stats {
                s.pad();
            }
        }
        Ok(coords)
    }

    fn check_coords(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.basis.len() {
            return Err(QcbError::Numerical(format!(
                "coordinate vector has length {}, basis has {}",
                coords.len(),
                self.basis.len()
            )));
        }
        Ok(())
    }

    /// Highest optimistic score, ties to the smallest index.
    pub fn select_action(&self, coords: &[f64]) -> Result<Selection> {
        self.check_coords(coords)?;
        let alpha = self.alpha();
        let c = DVector::from_column_slice(coords);
        let scores = self
            .stats
            .iter()
            .map(|s| s.score(&c, alpha))
            .collect::<Result<Vec<f64>>>()?;
        if let Some((a, s)) = scores.iter().enumerate().find(|(_, s)| !s.is_finite()) {
            return Err(QcbError::Numerical(format!(
                "score {s} for action {a} at round {}",
                self.round
            )));
        }
        let action = argmax_with_ties(&scores);
        Ok(Selection {
            action,
            scores,
            alpha,
        })
    }

    pub fn update(&mut self, action: usize, coords: &[f64], reward: f64) -> Result<()> {
        let len = self.stats.len();
        self.check_coords(coords)?;
        let stat = self
            .stats
            .get_mut(action)
            .ok_or(QcbError::Index { index: action, len })?;
        stat.record(&DVector::from_column_slice(coords), reward);
        self.round += 1;
        Ok(())
    }
}
