use crate::error::{QcbError, Result};
use crate::pauli::{hs_inner, Observable};

/// Residual norms at or below this fraction of the incoming context's norm
/// are treated as already spanned.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Orthonormal (under the normalised Hilbert-Schmidt product) basis of the
/// span of every context seen so far. Its size is the effective dimension.
#[derive(Clone, Debug)]
pub struct GramBasis {
    basis: Vec<Observable>,
    tol: f64,
}

/// Result of projecting a context onto the current basis.
#[derive(Clone, Debug)]
pub struct Projection {
    pub coords: Vec<f64>,
    pub residual: Observable,
    pub residual_norm: f64,
    pub input_norm: f64,
}

impl GramBasis {
    pub fn new(tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(QcbError::config(format!(
                "Gram tolerance must be positive, got {tol}"
            )));
        }
        Ok(GramBasis {
            basis: Vec::new(),
            tol,
        })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn vectors(&self) -> &[Observable] {
        &self.basis
    }

    /// Modified Gram-Schmidt with one re-orthogonalisation pass.
    pub fn project(&self, c: &Observable) -> Result<Projection> {
        if let Some(first) = self.basis.first() {
            QcbError::check_dim(first.num_qubits(), c.num_qubits())?;
        }
        let mut residual = c.clone();
        let mut coords = vec![0.0; self.basis.len()];
        for _ in 0..2 {
            for (v, coord) in self.basis.iter().zip(coords.iter_mut()) {
                let proj = hs_inner(v, &residual)?;
                residual.add_scaled(v, -proj)?;
                *coord += proj;
            }
        }
        Ok(Projection {
            coords,
            residual_norm: residual.norm(),
            residual,
            input_norm: c.norm(),
        })
    }

    /// Whether a projection leaves enough residual to add a new direction.
    pub fn grows(&self, p: &Projection) -> bool {
        p.input_norm > 0.0 && p.residual_norm > self.tol * p.input_norm
    }

    /// Projects `c`, appending its normalised residual as a new basis vector
    /// when it is not spanned. The returned coordinates reproduce `hs_inner`
    /// on the span. The second value reports growth.
    pub fn update(&mut self, c: &Observable) -> Result<(Vec<f64>, bool)> {
        let p = self.project(c)?;
        if !self.grows(&p) {
            return Ok((p.coords, false));
        }
        let mut coords = p.coords;
        coords.push(p.residual_norm);
        self.basis.push(p.residual.scaled(1.0 / p.residual_norm));
        Ok((coords, true))
    }
}
