//! Proposition algebra with sequential connectives, reactive valuations,
//! and steering-point analysis for forward-jump instruction sequences.

pub mod analysis;
pub mod atom;
pub mod classify;
pub mod compile;
pub mod error;
pub mod pga;
pub mod prop;
pub mod valuation;

pub use atom::{atom, Atom};
pub use error::{Error, Result, SyntaxError};
pub use prop::{parse_prop, render_prop, to_basic_form, BasicForm, BinOp, Prop};
