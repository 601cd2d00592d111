use crate::error::{QcbError, Result};

/// Upper bound on the norm of an action's parameter vector.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ParamBound {
    Value(f64),
    /// `qubits · sqrt(d_eff)`, re-evaluated as the basis grows.
    QubitsSqrtDim {
        qubits: usize,
    },
}

impl ParamBound {
    pub fn resolve(&self, d: usize) -> f64 {
        match *self {
            ParamBound::Value(m) => m,
            ParamBound::QubitsSqrtDim { qubits } => qubits as f64 * (d as f64).sqrt(),
        }
    }
}

/// Confidence-width schedule for the optimistic score.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum AlphaSchedule {
    Fixed(f64),
    /// `α_t = m + sqrt(2 ln(1/δ) + d ln(1 + t L²/d))` with `d` the current
    /// effective dimension.
    Auto {
        m: ParamBound,
        l: f64,
        delta: f64,
    },
}

pub const DEFAULT_DELTA: f64 = 0.01;

impl AlphaSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AlphaSchedule::Fixed(a) if !(a.is_finite() && a >= 0.0) => Err(QcbError::config(
                format!("fixed alpha must be finite and non-negative, got {a}"),
            )),
            AlphaSchedule::Auto { m, l, delta } => {
                if let ParamBound::Value(m) = m {
                    if !(m.is_finite() && m > 0.0) {
                        return Err(QcbError::config(format!("m must be positive, got {m}")));
                    }
                }
                if !(l.is_finite() && l > 0.0) {
                    return Err(QcbError::config(format!("L must be positive, got {l}")));
                }
                // δ = 1 is accepted: it zeroes the confidence term.
                if !(delta > 0.0 && delta <= 1.0) {
                    return Err(QcbError::config(format!(
                        "delta must lie in (0, 1], got {delta}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Width at round `t` (0-based) with effective dimension `d`.
    pub fn value(&self, t: usize, d: usize) -> f64 {
        match *self {
            AlphaSchedule::Fixed(a) => a,
            AlphaSchedule::Auto { m, l, delta } => {
                let growth = if d == 0 {
                    0.0
                } else {
                    let d = d as f64;
                    d * (t as f64 * l * l / d).ln_1p()
                };
                m.resolve(d) + (2.0 * (1.0 / delta).ln() + growth).sqrt()
            }
        }
    }
}
