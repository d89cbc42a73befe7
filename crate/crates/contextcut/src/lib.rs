//! Exact tooling for extended noncontextuality: compatibility scenarios
//! and behaviors, maximal couplings, extended scenarios with one copy per
//! context, cut-polytope membership with certificates, and derivation of
//! valid inequalities by triangular elimination, vertex splitting, edge
//! contraction and extension.
//!
//! All probabilities and coefficients are arbitrary-precision rationals;
//! nothing here rounds.

pub mod catalog;
pub mod certify;
pub mod coupling;
pub mod cutgeom;
pub mod extension;
pub mod ineq;
pub mod json;
pub mod lp;
pub mod rat;
pub mod scenario;

pub use certify::{decide_extended_noncontextual, necessary_condition_test, Status, Verdict};
pub use coupling::{max_coupling, Coupling, MarginalFamily};
pub use cutgeom::{cut_membership, Convention, CorrelationVector, MembershipVerdict};
pub use extension::{extend_behavior, extend_hypergraph, ExtendedScenario};
pub use ineq::{extend_inequality, LinearInequality};
pub use rat::Rat;
pub use scenario::{Behavior, Scenario};
