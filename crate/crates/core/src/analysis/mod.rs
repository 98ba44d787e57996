//! Repetitiveness, memorizing normalization, satisfiability, and
//! equivalence of statements under the valuation classes.

mod equiv;
mod repetition;

pub use equiv::{
    equiv_class, equiv_class_capped, equiv_free, equiv_free_bounded, equiv_static, first_difference, Bounds,
    Counterexample, EquivStatus, EquivVerdict, DEFAULT_FUEL, DEFAULT_MAX_STATES,
};
pub use repetition::{
    assignments, evaluate_assignment, find_repetition, is_repetitive, mem_normalize, mem_normalize_basic, mem_sat,
    repetitiveness_of, RepetitivenessReport,
};
