//! Dense-matrix reference computations for small qubit counts.
//!
//! Everything here builds explicit `2^n × 2^n` complex matrices and exists to
//! cross-check the symbolic routines. Site 0 is the most significant tensor
//! factor, matching the textual order of a Pauli string.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QcbError, Result};
use crate::pauli::{Observable, PauliLetter, PauliString};
use crate::stabilizer::StabilizerState;

/// Largest qubit count the dense routines accept.
pub const MAX_DENSE_QUBITS: usize = 5;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(QcbError::Capability(format!(
            "dense oracle limited to {MAX_DENSE_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

fn letter_matrix(l: PauliLetter) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match l {
        PauliLetter::I => DMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        PauliLetter::X => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        PauliLetter::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        PauliLetter::Z => DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

pub fn pauli_matrix(p: &PauliString) -> Result<DMatrix<Complex64>> {
    check_capacity(p.num_qubits())?;
    Ok(p.letters()
        .fold(DMatrix::identity(1, 1), |acc: DMatrix<Complex64>, l| {
            acc.kronecker(&letter_matrix(l))
        }))
}

pub fn observable_matrix(o: &Observable) -> Result<DMatrix<Complex64>> {
    let n = o.num_qubits();
    check_capacity(n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for (p, w) in o.terms() {
        m += pauli_matrix(p)? * c(w, 0.0);
    }
    Ok(m)
}

/// Explicit state vector of a stabilizer state: the image of the product of
/// `(I + g)/2` projectors over all generators, which must have rank one.
pub fn state_vector(s: &StabilizerState) -> Result<DVector<Complex64>> {
    let n = s.num_qubits();
    check_capacity(n)?;
    let dim = 1usize << n;
    let mut proj = DMatrix::<Complex64>::identity(dim, dim);
    for g in s.generators() {
        let sign = g
            .phase
            .as_real()
            .expect("stabilizer generators are Hermitian");
        let gm = pauli_matrix(&g.string)? * c(sign, 0.0);
        proj = (DMatrix::identity(dim, dim) + gm) * c(0.5, 0.0) * proj;
    }
    let trace = proj.trace();
    if (trace - c(1.0, 0.0)).norm() > 1e-9 {
        return Err(QcbError::Invariant(format!(
            "stabilizer projector has trace {trace}, expected rank one"
        )));
    }
    let best = (0..dim)
        .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))
        .expect("dimension is positive");
    let col = proj.column(best).into_owned();
    let norm = col.norm();
    Ok(col / c(norm, 0.0))
}

/// `⟨ψ|O|ψ⟩` computed from explicit matrices. Test oracle for
/// [`StabilizerState::expectation_observable`].
pub fn dense_expectation(s: &StabilizerState, o: &Observable) -> Result<f64> {
    QcbError::check_dim(s.num_qubits(), o.num_qubits())?;
    let psi = state_vector(s)?;
    let m = observable_matrix(o)?;
    let value = psi.dotc(&(m * &psi));
    Ok(value.re)
}

/// `Tr(AB)/2^n` from explicit matrices.
pub fn dense_hs_inner(a: &Observable, b: &Observable) -> Result<f64> {
    QcbError::check_dim(a.num_qubits(), b.num_qubits())?;
    let dim = (1usize << a.num_qubits()) as f64;
    let prod = observable_matrix(a)? * observable_matrix(b)?;
    Ok(prod.trace().re / dim)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
