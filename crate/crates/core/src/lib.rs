//! Lexicographic epistemic models for finite two-player games.
//!
//! The crate covers both the complete-information models (types carry a
//! lexicographic belief over opponent choice-type pairs) and the
//! incomplete-information models (types additionally carry their own utility
//! function), the predicate suites defined on them, the transformations
//! between the two, and an exact iterated-admissibility solver that decides
//! the quantifiers ranging over types outside a given model.
//!
//! Everything is computed in exact rational arithmetic. The crate is
//! `no_std` (it needs `alloc`); the `std` feature only forwards to the
//! dependencies.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod belief;
pub mod complete;
mod error;
pub mod fold;
pub mod game;
pub mod incomplete;
pub mod lp;
pub mod rational;
pub mod solver;
pub mod theorem;
pub mod transform;

pub use belief::{BeliefLevel, LexBelief, Pair, TypeId};
pub use complete::{CompleteModel, CompleteType};
pub use error::Error;
pub use fold::{FoldReport, Verdict, Violation};
pub use game::{Game, GameForm, Player, UtilityFn};
pub use incomplete::{IncompleteModel, IncompleteType};
pub use rational::{LexVector, Rational};
pub use solver::IARounds;

pub type Result<T, E = Error> = core::result::Result<T, E>;
