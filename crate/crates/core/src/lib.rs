//! Proof kernel and exact evaluator for the algebra of iterative constructions.
//!
//! Terms over the signature `⊥ ⊤ ⋎ ⋏ ⊖ ⊚ ◇ □ F F*` are evaluated exactly on
//! eventually periodic sequences over finite lattices ([`lasso`],
//! [`semantics`]), derivations are checked against the rule database
//! ([`rules`], [`kernel`]), and random finite models are searched for
//! counterexamples ([`search`]). [`discrete`] decides provability for the
//! head/shift fragment.

pub mod corpus;
pub mod discrete;
pub mod kernel;
pub mod lasso;
pub mod lattice;
pub mod rules;
pub mod search;
pub mod semantics;
pub mod term;
