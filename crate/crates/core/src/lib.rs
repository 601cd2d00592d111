//! Quantum contextual bandits.
//!
//! Contexts are real Pauli-sum observables, actions are stabilizer states (or,
//! for the lower-bound family, perturbed maximally mixed states), and rewards
//! are per-term single-shot measurements. The learner is LinUCB running on a
//! Gram-Schmidt basis of the contexts seen so far.

pub mod dense;
pub mod env;
pub mod error;
pub mod hamiltonians;
pub mod linucb;
pub mod lower_bound;
pub mod pauli;
pub mod runner;
pub mod stabilizer;

pub use error::{QcbError, Result};
pub use pauli::{
    commutes, hs_inner, pauli_product, Observable, PauliLetter, PauliString, Phase, PhasedPauli,
};
pub use stabilizer::StabilizerState;
