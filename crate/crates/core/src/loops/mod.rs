//! Loop monoids of finite pointed sets: classes of pinned maps under basepoint-fixing
//! permutations, the wedge product, the Grothendieck completion, the Baire metric and
//! compatible threads of group elements.

mod group;
mod monoid;
mod thread;

pub use group::{grothendieck, group_rank, LoopGroupElement, RankReport};
pub use monoid::{all_classes, class_of, monoid_law_check, orbits, wedge, wedge_slots, ChiSpec, LawReport, LoopClass, PinnedMap};
pub use thread::{baire_distance, loop_thread_check, padic_digits, project_family, push_forward, reduction_map, LoopThreadReport};

#[cfg(test)]
mod tests;
