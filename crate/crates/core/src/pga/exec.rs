use std::sync::Arc;

use serde::Serialize;

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::prop::to_basic_form;
use crate::valuation::{CompiledForm, StateId, ValuationMachine};

use super::instr::{InstrSeq, Instruction};
use super::thread::Thread;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Terminated,
    Deadlocked,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RunStep {
    pub atom: Atom,
    pub state: StateId,
    pub reply: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RunRecord {
    /// Every action performed, steering and work alike, with the machine's
    /// reply.
    pub trace: Vec<RunStep>,
    pub outcome: Outcome,
    pub final_state: StateId,
}

impl RunRecord {
    /// Outcome and `(action, reply)` sequence, the part compared by
    /// run-equivalence.
    pub fn observable(&self) -> (Outcome, Vec<(&Atom, bool)>) {
        (self.outcome, self.trace.iter().map(|s| (&s.atom, s.reply)).collect())
    }
}

/// Instruction sequence prepared for repeated execution against machines
/// over one atom list.
pub(crate) struct Prepared {
    code: Vec<Op>,
}

#[derive(Clone)]
pub(crate) enum Op {
    Work(usize),
    Test { form: Arc<CompiledForm>, positive: bool },
    Jump(usize),
    Halt,
}

impl Prepared {
    pub(crate) fn new(s: &InstrSeq, atoms: &[Atom]) -> Result<Prepared> {
        let index = |a: &Atom| atoms.binary_search(a).map_err(|_| Error::UndeclaredAtom(a.clone()));
        let code = s
            .instructions()
            .iter()
            .map(|ins| {
                Ok(match ins {
                    Instruction::Basic(a) => Op::Work(index(a)?),
                    Instruction::PosTest(p) => {
                        Op::Test { form: Arc::new(CompiledForm::new(&to_basic_form(p), atoms)?), positive: true }
                    }
                    Instruction::NegTest(p) => {
                        Op::Test { form: Arc::new(CompiledForm::new(&to_basic_form(p), atoms)?), positive: false }
                    }
                    Instruction::Jump(k) => Op::Jump(*k),
                    Instruction::Halt => Op::Halt,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Prepared { code })
    }

    pub(crate) fn from_ops(code: Vec<Op>) -> Prepared {
        Prepared { code }
    }

    /// Outcome and `(atom index, reply)` trace only, without allocating
    /// steps.
    pub(crate) fn observe(&self, m: &ValuationMachine, out: &mut Vec<(usize, bool)>) -> Outcome {
        out.clear();
        let mut state = m.init();
        let mut pc = 0usize;
        loop {
            let Some(op) = self.code.get(pc) else {
                return Outcome::Deadlocked;
            };
            match op {
                Op::Halt => return Outcome::Terminated,
                Op::Jump(0) => return Outcome::Deadlocked,
                Op::Jump(k) => pc = pc.saturating_add(*k),
                Op::Work(a) => {
                    out.push((*a, m.reply(*a, state)));
                    state = m.next(*a, state);
                    pc += 1;
                }
                Op::Test { form, positive } => {
                    let (result, end) = form.run_with(m, state, |a, r| out.push((a, r)));
                    state = end;
                    pc += if result == *positive { 1 } else { 2 };
                }
            }
        }
    }

    pub(crate) fn run(&self, m: &ValuationMachine, start: StateId) -> RunRecord {
        let atoms = m.atoms();
        let mut trace = Vec::new();
        let mut state = start;
        let mut pc = 0usize;
        let outcome = loop {
            let Some(op) = self.code.get(pc) else {
                break Outcome::Deadlocked;
            };
            match op {
                Op::Halt => break Outcome::Terminated,
                Op::Jump(0) => break Outcome::Deadlocked,
                Op::Jump(k) => pc = pc.saturating_add(*k),
                Op::Work(a) => {
                    trace.push(RunStep { atom: atoms[*a].clone(), state, reply: m.reply(*a, state) });
                    state = m.next(*a, state);
                    pc += 1;
                }
                Op::Test { form, positive } => {
                    let t = form.trace(m, state);
                    trace.extend(
                        t.steps
                            .into_iter()
                            .map(|s| RunStep { atom: s.atom, state: s.state, reply: s.reply }),
                    );
                    state = t.final_state;
                    pc += if t.result == *positive { 1 } else { 2 };
                }
            }
        };
        RunRecord { trace, outcome, final_state: state }
    }
}

/// Runs `s` against `m` from its initial state.
pub fn exec(s: &InstrSeq, m: &ValuationMachine) -> Result<RunRecord> {
    Ok(Prepared::new(s, m.atoms())?.run(m, m.init()))
}

pub fn exec_from(s: &InstrSeq, m: &ValuationMachine, start: StateId) -> Result<RunRecord> {
    Ok(Prepared::new(s, m.atoms())?.run(m, start))
}

/// Interprets a thread against a machine.
pub fn walk_thread(t: &Thread, m: &ValuationMachine, start: StateId) -> Result<RunRecord> {
    let mut trace = Vec::new();
    let mut state = start;
    let mut cur = t;
    let outcome = loop {
        match cur {
            Thread::Stop => break Outcome::Terminated,
            Thread::Dead => break Outcome::Deadlocked,
            Thread::Branch(a, p, n) => {
                let ai = m.atom_index(a).ok_or_else(|| Error::UndeclaredAtom(a.clone()))?;
                let reply = m.reply(ai, state);
                trace.push(RunStep { atom: a.clone(), state, reply });
                state = m.next(ai, state);
                cur = if reply { p } else { n };
            }
        }
    };
    Ok(RunRecord { trace, outcome, final_state: state })
}
