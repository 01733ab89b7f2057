//! Group cohomology of finite abelian groups on the inhomogeneous bar
//! complex, and the boundary operation that trivializes a bulk cocycle on
//! an unbroken subgroup.

mod cochain;
mod group;
mod scripts;
mod solve;

pub use cochain::{GroupCochain, GroupCochainDoc, TABLE_CAP};
pub use group::{FiniteAbelianGroup, Subgroup, SubgroupDoc};
pub use scripts::{shipped_boundary_scripts, BoundaryScript, CupMonomial, ExpectedStage, ScriptOutcome, ScriptStep, SlotTerm};
pub use solve::{
    cohomology_counts, iterate_boundary, solve_coboundary, trivialization_solve, u1_cohomology_orders, BoundaryChain,
    BoundaryChoice, BoundaryStep, CohomologyCount, Trivialization, SYSTEM_CAP,
};
