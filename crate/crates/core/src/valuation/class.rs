use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::atom::Atom;

use super::eval::EvalStep;
use super::machine::{StateId, ValuationMachine};

/// Constraint families on reactive valuations, from least to most
/// restrictive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValuationClass {
    Free,
    RepetitionProof,
    Contractive,
    WeakPosMemorizing,
    WeakNegMemorizing,
    Memorizing,
    Static,
}

impl ValuationClass {
    pub const ALL: [ValuationClass; 7] = [
        ValuationClass::Free,
        ValuationClass::RepetitionProof,
        ValuationClass::Contractive,
        ValuationClass::WeakPosMemorizing,
        ValuationClass::WeakNegMemorizing,
        ValuationClass::Memorizing,
        ValuationClass::Static,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValuationClass::Free => "free",
            ValuationClass::RepetitionProof => "repetition-proof",
            ValuationClass::Contractive => "contractive",
            ValuationClass::WeakPosMemorizing => "weak-pos-memorizing",
            ValuationClass::WeakNegMemorizing => "weak-neg-memorizing",
            ValuationClass::Memorizing => "memorizing",
            ValuationClass::Static => "static",
        }
    }

    /// Classes whose membership depends on evaluation histories and is
    /// therefore checked up to a fuel bound.
    pub fn is_history_based(self) -> bool {
        matches!(
            self,
            ValuationClass::Memorizing
                | ValuationClass::WeakPosMemorizing
                | ValuationClass::WeakNegMemorizing
        )
    }
}

impl fmt::Display for ValuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ValuationClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ValuationClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ValuationClass::ALL.iter().map(|c| c.name()).collect();
                format!("unknown semantics `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassViolation {
    pub class: ValuationClass,
    /// Evaluation sequence from the initial state ending in the offending
    /// step(s).
    pub trace: Vec<EvalStep>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ClassCheck {
    Ok,
    Violation(ClassViolation),
}

impl ClassCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, ClassCheck::Ok)
    }
}

/// Checks membership of `m` in class `c`. History-based classes examine all
/// evaluation sequences of length at most `fuel`.
pub fn check_class(m: &ValuationMachine, c: ValuationClass, fuel: usize) -> ClassCheck {
    check_class_with_work(m, c, fuel, &BTreeSet::new())
}

/// Like [`check_class`], but occurrences of atoms in `work` are work
/// actions: they reset the history of the memorizing classes and are not
/// themselves constrained by it.
pub fn check_class_with_work(
    m: &ValuationMachine,
    c: ValuationClass,
    fuel: usize,
    work: &BTreeSet<Atom>,
) -> ClassCheck {
    let mask = work_mask(m, work);
    match check(m, c, fuel, mask, Part::Full) {
        None => ClassCheck::Ok,
        Some(v) => ClassCheck::Violation(v),
    }
}

pub(crate) fn work_mask(m: &ValuationMachine, work: &BTreeSet<Atom>) -> u64 {
    work.iter()
        .filter_map(|a| m.atom_index(a))
        .fold(0u64, |acc, i| acc | (1 << i))
}

/// Which constraints to check. `Structure` ignores replies, so a machine
/// failing it fails for every reply table.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Part {
    Full,
    Structure,
}

fn step(m: &ValuationMachine, a: usize, s: StateId) -> EvalStep {
    EvalStep { atom: m.atoms()[a].clone(), state: s, reply: m.reply(a, s) }
}

fn prefix(m: &ValuationMachine, s: StateId) -> Vec<EvalStep> {
    m.path_to(s)
        .expect("reachable")
        .into_iter()
        .map(|(a, st, _)| step(m, a, st))
        .collect()
}

pub(crate) fn check(
    m: &ValuationMachine,
    c: ValuationClass,
    fuel: usize,
    work: u64,
    part: Part,
) -> Option<ClassViolation> {
    let k = m.atoms().len();
    let violation = |trace: Vec<EvalStep>, reason: String| {
        Some(ClassViolation { class: c, trace, reason })
    };
    match c {
        ValuationClass::Free => None,
        ValuationClass::Static => {
            for s in m.reachable_states() {
                for a in 0..k {
                    if m.next(a, s) != s {
                        let mut trace = prefix(m, s);
                        trace.push(step(m, a, s));
                        let reason = format!(
                            "`{}` changes state {} to {}",
                            m.atoms()[a],
                            m.state_name(s),
                            m.state_name(m.next(a, s))
                        );
                        return violation(trace, reason);
                    }
                }
            }
            None
        }
        ValuationClass::Contractive | ValuationClass::RepetitionProof => {
            for s in m.reachable_states() {
                for a in 0..k {
                    let t = m.next(a, s);
                    let same_reply = part == Part::Structure || m.reply(a, t) == m.reply(a, s);
                    let contracts = c == ValuationClass::RepetitionProof || m.next(a, t) == t;
                    if !(same_reply && contracts) {
                        let mut trace = prefix(m, s);
                        trace.push(step(m, a, s));
                        trace.push(step(m, a, t));
                        let reason = if same_reply {
                            format!("repeated `{}` changes state {}", m.atoms()[a], m.state_name(t))
                        } else {
                            format!("repeated `{}` changes its reply", m.atoms()[a])
                        };
                        return violation(trace, reason);
                    }
                }
            }
            None
        }
        ValuationClass::Memorizing
        | ValuationClass::WeakPosMemorizing
        | ValuationClass::WeakNegMemorizing => history_check(m, c, fuel, work, part),
    }
}

/// Breadth-first exploration of (state, memo) pairs up to depth `fuel`.
/// For `Memorizing`, `known` holds atoms evaluated since the last work
/// occurrence and `value` their replies. For the weak classes `known` holds
/// the atoms of the current all-positive (all-negative) run.
fn history_check(
    m: &ValuationMachine,
    c: ValuationClass,
    fuel: usize,
    work: u64,
    part: Part,
) -> Option<ClassViolation> {
    if part == Part::Structure && c != ValuationClass::Memorizing {
        return None;
    }
    let k = m.atoms().len();
    assert!(k <= 20, "history checks support at most 20 atoms");
    let encode = |s: StateId, known: u64, value: u64| ((s as u64) << (2 * k)) | (known << k) | value;
    let dense_len = m.state_count() << (2 * k);
    let mut dense = if dense_len <= 1 << 16 { vec![false; dense_len] } else { Vec::new() };
    let mut sparse = HashSet::new();
    let mut visit = |key: u64| -> bool {
        if dense.is_empty() {
            sparse.insert(key)
        } else {
            !std::mem::replace(&mut dense[key as usize], true)
        }
    };

    // arena of explored nodes: (state, known, value, parent, atom, depth)
    struct Explored {
        state: StateId,
        known: u64,
        value: u64,
        parent: usize,
        atom: usize,
        depth: usize,
    }
    let mut arena = vec![Explored { state: m.init(), known: 0, value: 0, parent: usize::MAX, atom: 0, depth: 0 }];
    visit(encode(m.init(), 0, 0));
    let mut head = 0;
    while head < arena.len() {
        let (s, known, value, depth) = {
            let n = &arena[head];
            (n.state, n.known, n.value, n.depth)
        };
        if depth < fuel {
            for a in 0..k {
                let bit = 1u64 << a;
                let r = m.reply(a, s);
                let t = m.next(a, s);
                let (nk, nv) = if work & bit != 0 {
                    (0, 0)
                } else {
                    let fault = match c {
                        ValuationClass::Memorizing if known & bit != 0 => {
                            let reply_changed = part == Part::Full && ((value & bit != 0) != r);
                            if reply_changed {
                                Some(format!("memorized `{}` changes its reply", m.atoms()[a]))
                            } else if t != s {
                                Some(format!("memorized `{}` changes state", m.atoms()[a]))
                            } else {
                                None
                            }
                        }
                        ValuationClass::WeakPosMemorizing if known & bit != 0 && !r => Some(format!(
                            "`{}` turns negative within an all-positive run",
                            m.atoms()[a]
                        )),
                        ValuationClass::WeakNegMemorizing if known & bit != 0 && r => Some(format!(
                            "`{}` turns positive within an all-negative run",
                            m.atoms()[a]
                        )),
                        _ => None,
                    };
                    if let Some(reason) = fault {
                        let mut trace = vec![step(m, a, s)];
                        let mut cur = head;
                        while arena[cur].parent != usize::MAX {
                            let p = &arena[arena[cur].parent];
                            trace.push(step(m, arena[cur].atom, p.state));
                            cur = arena[cur].parent;
                        }
                        trace.reverse();
                        return Some(ClassViolation { class: c, trace, reason });
                    }
                    match c {
                        ValuationClass::Memorizing => {
                            let nv = if part == Part::Full && r { value | bit } else { value & !bit };
                            (known | bit, nv)
                        }
                        ValuationClass::WeakPosMemorizing => (if r { known | bit } else { 0 }, 0),
                        _ => (if r { 0 } else { known | bit }, 0),
                    }
                };
                if visit(encode(t, nk, nv)) {
                    arena.push(Explored { state: t, known: nk, value: nv, parent: head, atom: a, depth: depth + 1 });
                }
            }
        }
        head += 1;
    }
    None
}
