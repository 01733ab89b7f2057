//! Gate expressions evaluated symbolically in presented cohomology rings,
//! for manifold families too large to triangulate.
//!
//! A flat connection assigns each field a combination of ring monomials
//! weighted by logical variables. Every assignment of the variables is
//! evaluated exactly; `PONT` is the plain power of an integrally closed lift
//! and `SQ` follows the Cartan formula from per-generator rules.

mod eval;
mod ring;
mod scenarios;

pub use eval::{ring_evaluate, ring_sq, ConnectionTerm, FieldAssignment, FlatConnection};
pub use ring::{CohomologyRing, Generator, LiftRule, NamedMonomial, RingElement};
pub use scenarios::{shipped_scenarios, ExpectedTerm, RingScenario, ScenarioOutcome, SimpleField};
