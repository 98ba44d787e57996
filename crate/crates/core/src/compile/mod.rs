//! Elimination of non-atomic steering instructions and exhaustive
//! size-minimization of instruction sequences.

mod eliminate;
mod minimize;

pub use eliminate::eliminate_nonatomic;
pub use minimize::{
    enumerate_bodies, minimize, MinimizeOptions, MinimizeOutcome, DEFAULT_BODY_BUDGET, DEFAULT_CANDIDATE_CAP,
};
