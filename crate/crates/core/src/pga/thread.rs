use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::atom::Atom;
use crate::prop::{to_basic_form, BasicForm};

use super::instr::{InstrSeq, Instruction};

/// Finite behaviour tree of an instruction sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Thread {
    /// `S`: successful termination.
    Stop,
    /// `D`: deadlock or divergence.
    Dead,
    /// Perform the action, continue with the first thread on reply `T`,
    /// with the second on `F`.
    Branch(Atom, Arc<Thread>, Arc<Thread>),
}

impl Thread {
    /// Action prefix: both replies lead to `next`.
    pub fn act(action: Atom, next: Arc<Thread>) -> Thread {
        Thread::Branch(action, next.clone(), next)
    }

    /// Number of action nodes, counting shared subtrees once per occurrence.
    pub fn action_count(&self) -> usize {
        match self {
            Thread::Stop | Thread::Dead => 0,
            Thread::Branch(_, p, n) => 1 + p.action_count() + n.action_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Thread::Stop | Thread::Dead => 0,
            Thread::Branch(_, p, n) => 1 + p.depth().max(n.depth()),
        }
    }
}

impl fmt::Display for Thread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Thread::Stop => f.write_str("S"),
            Thread::Dead => f.write_str("D"),
            Thread::Branch(a, p, n) if p == n => write!(f, "{a} o {p}"),
            Thread::Branch(a, p, n) => write!(f, "({p} <| {a} |> {n})"),
        }
    }
}

impl Serialize for Thread {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Thread extraction. Position `i` denotes: `D` past the end; `S` for `!`;
/// `a o |i+1|` for a work instruction; `|i+k|` for `#k` with `k >= 1`; `D`
/// for `#0`; for `+φ` the basic form of `φ` with `T` leaves continuing at
/// `i+1` and `F` leaves at `i+2` (swapped for `-φ`).
pub fn thread_extract(s: &InstrSeq) -> Thread {
    let at = positions(s);
    (*at[0]).clone()
}

/// Threads of every position, shared. Index `len` (and beyond) is `D`.
fn positions(s: &InstrSeq) -> Vec<Arc<Thread>> {
    let ins = s.instructions();
    let n = ins.len();
    let dead = Arc::new(Thread::Dead);
    let mut at: Vec<Arc<Thread>> = vec![dead.clone(); n + 1];
    let target = |at: &Vec<Arc<Thread>>, j: usize| at.get(j).cloned().unwrap_or_else(|| dead.clone());
    for i in (0..n).rev() {
        at[i] = match &ins[i] {
            Instruction::Halt => Arc::new(Thread::Stop),
            Instruction::Basic(a) => Arc::new(Thread::act(a.clone(), target(&at, i + 1))),
            Instruction::Jump(0) => dead.clone(),
            Instruction::Jump(k) => target(&at, i.saturating_add(*k)),
            Instruction::PosTest(p) => graft(&to_basic_form(p), &target(&at, i + 1), &target(&at, i + 2)),
            Instruction::NegTest(p) => graft(&to_basic_form(p), &target(&at, i + 2), &target(&at, i + 1)),
        };
    }
    at
}

pub(crate) fn graft(bf: &BasicForm, on_true: &Arc<Thread>, on_false: &Arc<Thread>) -> Arc<Thread> {
    match bf {
        BasicForm::Leaf(true) => on_true.clone(),
        BasicForm::Leaf(false) => on_false.clone(),
        BasicForm::Node(a, t, e) => Arc::new(Thread::Branch(
            a.clone(),
            graft(t, on_true, on_false),
            graft(e, on_true, on_false),
        )),
    }
}

/// First point where two threads differ, as the `(action, reply)` path
/// leading there.
pub fn thread_difference(x: &Thread, y: &Thread) -> Option<Vec<(Atom, bool)>> {
    fn walk(x: &Thread, y: &Thread, path: &mut Vec<(Atom, bool)>) -> bool {
        match (x, y) {
            (Thread::Branch(a, xp, xn), Thread::Branch(b, yp, yn)) if a == b => {
                for (reply, xs, ys) in [(true, xp, yp), (false, xn, yn)] {
                    path.push((a.clone(), reply));
                    if walk(xs, ys, path) {
                        return true;
                    }
                    path.pop();
                }
                false
            }
            _ => x != y,
        }
    }
    let mut path = Vec::new();
    walk(x, y, &mut path).then_some(path)
}
