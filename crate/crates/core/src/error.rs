use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::atom::Atom;
use crate::valuation::EvalTrace;

/// Parse failure with the byte offset and the set of tokens that would have
/// been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: found {found}, expected {}", ExpectedList(.expected))]
pub struct SyntaxError {
    pub position: usize,
    pub found: String,
    pub expected: BTreeSet<String>,
}

impl SyntaxError {
    pub fn new(position: usize, found: impl Into<String>, expected: &[&str]) -> SyntaxError {
        SyntaxError {
            position,
            found: found.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

struct ExpectedList<'a>(&'a BTreeSet<String>);

impl fmt::Display for ExpectedList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<&str> = self.0.iter().map(String::as_str).collect();
        if items.is_empty() {
            f.write_str("nothing")
        } else {
            f.write_str(&items.join(" | "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("atom `{0}` is not declared by the machine")]
    UndeclaredAtom(Atom),
    #[error("machine file, line {line}: {message}")]
    MachineFormat { line: usize, message: String },
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("search budget of {cap} candidates exceeded")]
    BudgetExceeded { cap: u64 },
    #[error("no equivalent sequence of size <= {max_size}")]
    NoneWithinBudget { max_size: usize },
    #[error("evaluation still not reply stable after {} attempts", .0.len())]
    RetriesExhausted(Vec<EvalTrace>),
    #[error("input basic form is repetitive")]
    RepetitiveInput,
}

pub type Result<T> = std::result::Result<T, Error>;
