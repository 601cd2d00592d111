//! LinUCB with incremental Gram-Schmidt context compression.
//!
//! Contexts arrive as Pauli-sum observables. [`GramBasis`] keeps an
//! orthonormal basis of their span and turns each context into a short
//! coordinate vector; [`PolicyState`] runs disjoint-parameter LinUCB on those
//! coordinates, padding each action's statistics whenever the basis grows.

mod alpha;
pub mod ambient;
mod gram;
mod policy;

pub use alpha::{AlphaSchedule, ParamBound, DEFAULT_DELTA};
pub use gram::{GramBasis, Projection, DEFAULT_TOLERANCE};
pub use policy::{argmax_with_ties, ActionStat, PolicyState, Selection, SCORE_TIE_TOLERANCE};
