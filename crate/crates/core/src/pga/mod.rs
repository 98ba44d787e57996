//! Instruction sequences with forward jumps: syntax, size, thread
//! extraction, execution against machines, and equivalence.

mod equiv;
mod exec;
mod instr;
mod thread;

pub use equiv::{equiv_iseq, equiv_iseq_capped};
pub use exec::{exec, exec_from, walk_thread, Outcome, RunRecord, RunStep};
pub use instr::{iseq_size, parse_iseq, render_iseq, InstrSeq, Instruction};
pub use thread::{thread_difference, thread_extract, Thread};

pub(crate) use exec::{Op, Prepared};
pub(crate) use thread::graft;
