//! Finite-level one-parameter subgroups over `𝔽_{p^u}((θ))`: the multiplicative ball groups,
//! level homomorphisms `η` into permutations of residue sets and their lifts, and the
//! additive obstruction `g^p ≠ id` with the linear-independence condition behind it.

mod eta;
mod group;
mod obstruction;

pub use eta::{eta_construct, eta_lift, eta_tower, lift_check, EtaConditions, LiftReport, LocalSubgroupLevel};
pub use group::{ball_group, BallGroupSummary, MultiplicativeBallGroup, MAX_GROUP_ORDER};
pub use obstruction::{
    additive_obstruction, condition_i_check, iterate_symbolic, monomial_perturbation, shift_subgroup, ConditionIReport, ObstructionReport,
    DEGREE_BOUND, THETA_PRECISION,
};
