//! Exact and finite-horizon computation of the proximal, distal, almost
//! periodic, strongly proximal and weakly distal relations of flows.
//!
//! The finite side ([`finflow`], [`relations`], [`proxsets`]) works with a
//! finite state set acted on by a generated transformation monoid. For a
//! finite phase space the generated monoid is already closed in the product
//! topology, so it *is* the enveloping semigroup and every statement about
//! minimal ideals and idempotents can be checked exhaustively.
//!
//! The symbolic side ([`subshift`], [`ternary`], [`circles`]) models concrete
//! infinite systems by finitely described points and produces evidence with
//! explicit horizons rather than proofs.

pub mod check;
pub mod circles;
pub mod finflow;
pub mod fuzz;
pub mod proxsets;
pub mod relations;
pub mod report;
pub mod seeds;
pub mod subshift;
pub mod ternary;

pub use check::{CheckList, TheoremCheck};
pub use finflow::{ElemId, FactorMap, FiniteFlow, FlowError, MinimalStructure, TransMonoid};
pub use relations::{PairRelation, RelationKind, RelationTable};
