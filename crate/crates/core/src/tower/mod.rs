//! Level permutations induced by ball-preserving isometries, compatible threads of them,
//! the flat-polynomial witness, the left-invariant group metric, support decomposition and
//! commutator decompositions of even level permutations.

mod commutator;
mod diff;
mod metric;
mod perm;
mod thread;
mod witness;

pub use commutator::{commutator_decompose, commutator_decompose_even, commutator_product, three_cycle_commutator, three_cycles};
pub use diff::{functoriality_check, level_project, DiffRepr, FunctorialityReport, LevelPermutation, Sampling};
pub use metric::{ball_decompose, default_sampler, group_metric, METRIC_ORDER};
pub use perm::Perm;
pub use thread::{check_pair, conjugation_thread, thread_check, thread_extend, thread_of, ConjugationReport, PermThread};
pub use witness::{witness_flat_polynomial, WitnessProof, WitnessSpec};
