//! Finite-state reactive valuations: evaluation with traces, the valuation
//! classes, and machine enumeration.

mod class;
mod eval;
mod generate;
mod machine;

pub use class::{check_class, check_class_with_work, ClassCheck, ClassViolation, ValuationClass};
pub use eval::{
    evaluate, evaluate_basic_from, evaluate_from, evaluate_with_retry, CompiledForm, EvalStep, EvalTrace,
    RetryOutcome,
};
pub use generate::{canonical_tables, generate_machines, MachineSpace, MachineStream, MAX_TABLE_CELLS};
pub use machine::{StateId, ValuationMachine};

pub(crate) use machine::parse_machine_lines;
