use serde::Serialize;

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::prop::{to_basic_form, BasicForm, Prop};

use super::machine::{StateId, ValuationMachine};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EvalStep {
    pub atom: Atom,
    /// State in which the atom was evaluated.
    pub state: StateId,
    pub reply: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EvalTrace {
    pub steps: Vec<EvalStep>,
    pub result: bool,
    /// No atom was answered with two different replies.
    pub reply_stable: bool,
    pub final_state: StateId,
}

impl EvalTrace {
    pub fn atom_sequence(&self) -> Vec<Atom> {
        self.steps.iter().map(|s| s.atom.clone()).collect()
    }

    /// `(atom, reply)` pairs, ignoring states.
    pub fn observations(&self) -> Vec<(Atom, bool)> {
        self.steps.iter().map(|s| (s.atom.clone(), s.reply)).collect()
    }
}

fn reply_stable(steps: &[EvalStep]) -> bool {
    steps.iter().enumerate().all(|(i, s)| {
        steps[..i]
            .iter()
            .all(|earlier| earlier.atom != s.atom || earlier.reply == s.reply)
    })
}

/// A basic form with atoms resolved to a machine's atom indices, laid out as
/// a flat node array for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledForm {
    atoms: Vec<Atom>,
    nodes: Vec<Node>,
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Leaf(bool),
    Test { atom: u32, then: u32, els: u32 },
}

impl CompiledForm {
    /// Resolves `bf` against the sorted atom list `atoms`.
    pub fn new(bf: &BasicForm, atoms: &[Atom]) -> Result<CompiledForm> {
        let mut nodes = Vec::new();
        Self::push(bf, atoms, &mut nodes)?;
        Ok(CompiledForm { atoms: atoms.to_vec(), nodes })
    }

    fn push(bf: &BasicForm, atoms: &[Atom], nodes: &mut Vec<Node>) -> Result<u32> {
        let id = nodes.len() as u32;
        match bf {
            BasicForm::Leaf(v) => nodes.push(Node::Leaf(*v)),
            BasicForm::Node(a, t, e) => {
                let atom = atoms
                    .binary_search(a)
                    .map_err(|_| Error::UndeclaredAtom(a.clone()))? as u32;
                nodes.push(Node::Test { atom, then: 0, els: 0 });
                let then = Self::push(t, atoms, nodes)?;
                let els = Self::push(e, atoms, nodes)?;
                nodes[id as usize] = Node::Test { atom, then, els };
            }
        }
        Ok(id)
    }

    /// Result and final state without building a trace.
    #[inline]
    pub fn run(&self, m: &ValuationMachine, start: StateId) -> (bool, StateId) {
        let mut state = start;
        let mut i = 0usize;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return (v, state),
                Node::Test { atom, then, els } => {
                    let r = m.reply(atom as usize, state);
                    state = m.next(atom as usize, state);
                    i = if r { then } else { els } as usize;
                }
            }
        }
    }

    /// Calls `visit(atom index, reply)` for every evaluation step, then
    /// returns the result and the final state.
    #[inline]
    pub fn run_with(
        &self,
        m: &ValuationMachine,
        start: StateId,
        mut visit: impl FnMut(usize, bool),
    ) -> (bool, StateId) {
        let mut state = start;
        let mut i = 0usize;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return (v, state),
                Node::Test { atom, then, els } => {
                    let r = m.reply(atom as usize, state);
                    visit(atom as usize, r);
                    state = m.next(atom as usize, state);
                    i = if r { then } else { els } as usize;
                }
            }
        }
    }

    /// Full trace. `m` must have been built over the same atom list.
    pub fn trace(&self, m: &ValuationMachine, start: StateId) -> EvalTrace {
        debug_assert_eq!(m.atoms(), &self.atoms[..]);
        let mut steps = Vec::new();
        let mut state = start;
        let mut i = 0usize;
        let result = loop {
            match self.nodes[i] {
                Node::Leaf(v) => break v,
                Node::Test { atom, then, els } => {
                    let a = atom as usize;
                    let r = m.reply(a, state);
                    steps.push(EvalStep { atom: self.atoms[a].clone(), state, reply: r });
                    state = m.next(a, state);
                    i = if r { then } else { els } as usize;
                }
            }
        };
        EvalTrace { reply_stable: reply_stable(&steps), steps, result, final_state: state }
    }
}

/// Short-circuit evaluation of `p` from the machine's initial state.
pub fn evaluate(p: &Prop, m: &ValuationMachine) -> Result<EvalTrace> {
    evaluate_from(p, m, m.init())
}

pub fn evaluate_from(p: &Prop, m: &ValuationMachine, start: StateId) -> Result<EvalTrace> {
    evaluate_basic_from(&to_basic_form(p), m, start)
}

pub fn evaluate_basic_from(bf: &BasicForm, m: &ValuationMachine, start: StateId) -> Result<EvalTrace> {
    Ok(CompiledForm::new(bf, m.atoms())?.trace(m, start))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RetryOutcome {
    pub result: bool,
    pub attempts: usize,
    pub traces: Vec<EvalTrace>,
}

/// Evaluates `p`; while the evaluation is not reply stable, evaluates it
/// again from the state the previous attempt left the machine in, at most
/// `max_retries` times.
pub fn evaluate_with_retry(p: &Prop, m: &ValuationMachine, max_retries: usize) -> Result<RetryOutcome> {
    let form = CompiledForm::new(&to_basic_form(p), m.atoms())?;
    let mut traces = Vec::new();
    let mut state = m.init();
    for _ in 0..=max_retries {
        let trace = form.trace(m, state);
        state = trace.final_state;
        let stable = trace.reply_stable;
        let result = trace.result;
        traces.push(trace);
        if stable {
            return Ok(RetryOutcome { result, attempts: traces.len(), traces });
        }
    }
    Err(Error::RetriesExhausted(traces))
}
