//! Reference implementations shared by the integration tests. Nothing here
//! goes through the basic form: statements are interpreted on their syntax.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use steerlab::prop::BasicForm;
use steerlab::valuation::{StateId, ValuationMachine};
use steerlab::{atom, Atom, BinOp, Prop};

pub type Step = (Atom, StateId, bool);

/// Direct short-circuit interpretation of the connectives.
pub fn interpret(p: &Prop, m: &ValuationMachine, state: StateId) -> (bool, StateId, Vec<Step>) {
    let mut steps = Vec::new();
    let (r, s) = go(p, m, state, &mut steps);
    (r, s, steps)
}

fn go(p: &Prop, m: &ValuationMachine, s: StateId, steps: &mut Vec<Step>) -> (bool, StateId) {
    match p {
        Prop::Truth => (true, s),
        Prop::Falsity => (false, s),
        Prop::Atom(a) => {
            let i = m.atom_index(a).expect("declared");
            let r = m.reply(i, s);
            steps.push((a.clone(), s, r));
            (r, m.next(i, s))
        }
        Prop::Neg(x) => {
            let (r, s) = go(x, m, s, steps);
            (!r, s)
        }
        Prop::Cond(x, y, z) => {
            let (c, s) = go(y, m, s, steps);
            go(if c { x } else { z }, m, s, steps)
        }
        Prop::Bin(op, x, y) => {
            let (first, second) = match op {
                BinOp::LeftAnd | BinOp::LeftOr | BinOp::LeftImp | BinOp::LeftBiimp => (x, y),
                _ => (y, x),
            };
            let (c, s) = go(first, m, s, steps);
            match (op, c) {
                (BinOp::LeftAnd | BinOp::RightAnd, false) => (false, s),
                (BinOp::LeftOr | BinOp::RightOr, true) => (true, s),
                (BinOp::LeftImp, false) | (BinOp::RightImp, true) => (true, s),
                (BinOp::RightImp, false) | (BinOp::LeftBiimp | BinOp::RightBiimp, false) => {
                    let (r, s) = go(second, m, s, steps);
                    (!r, s)
                }
                _ => go(second, m, s, steps),
            }
        }
    }
}

pub fn atoms(names: &[&str]) -> BTreeSet<Atom> {
    names.iter().map(|n| atom(n)).collect()
}

/// Terms built from `leaves` with the conditional only, of depth at most
/// `depth` (leaves have depth 1).
pub fn cond_terms(leaves: &[Prop], depth: usize) -> Vec<Prop> {
    let mut level = leaves.to_vec();
    for _ in 1..depth {
        let mut next = leaves.to_vec();
        for x in &level {
            for y in &level {
                for z in &level {
                    next.push(Prop::cond(x.clone(), y.clone(), z.clone()));
                }
            }
        }
        level = next;
    }
    level
}

/// Leaves `T`, `F` and the atoms.
pub fn leaves(names: &[&str]) -> Vec<Prop> {
    let mut out = vec![Prop::Truth, Prop::Falsity];
    out.extend(names.iter().map(|n| Prop::atom(n)));
    out
}

/// Every basic form over `names` of depth at most `depth`.
pub fn basic_forms(names: &[&str], depth: usize) -> Vec<BasicForm> {
    let mut level = vec![BasicForm::Leaf(true), BasicForm::Leaf(false)];
    for _ in 1..depth {
        let mut next = vec![BasicForm::Leaf(true), BasicForm::Leaf(false)];
        for a in names {
            for t in &level {
                for e in &level {
                    next.push(BasicForm::node(atom(a), t.clone(), e.clone()));
                }
            }
        }
        level = next;
    }
    level
}

/// Every machine over `names` with exactly `n` states and initial state
/// `s0`, without any symmetry reduction.
pub fn all_machines(names: &[&str], n: usize) -> Vec<ValuationMachine> {
    let list: Vec<Atom> = atoms(names).into_iter().collect();
    let cells = n * list.len();
    let mut out = Vec::new();
    let tables = n.pow(cells as u32);
    for t in 0..tables {
        let mut next = Vec::with_capacity(cells);
        let mut x = t;
        for _ in 0..cells {
            next.push(x % n);
            x /= n;
        }
        for mask in 0u64..(1 << cells) {
            let reply = (0..cells).map(|i| mask >> i & 1 == 1).collect();
            out.push(ValuationMachine::with_default_names(list.clone(), n, reply, next.clone()).unwrap());
        }
    }
    out
}

/// Machines over `names` with up to `max_states` states whose states are
/// all reachable, one per renaming class, found by canonicalizing every
/// machine.
pub fn free_machines(names: &[&str], max_states: usize) -> Vec<ValuationMachine> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_states {
        for m in all_machines(names, n) {
            let c = canonical(&m);
            if c.state_count() == n && seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    out
}

/// Random statements over `names` with the full connective set.
pub fn arb_prop(names: &'static [&'static str], depth: u32) -> impl Strategy<Value = Prop> {
    let leaf = prop_oneof![
        1 => Just(Prop::Truth),
        1 => Just(Prop::Falsity),
        6 => proptest::sample::select(names).prop_map(Prop::atom),
    ];
    leaf.prop_recursive(depth, 64, 3, |inner| {
        prop_oneof![
            1 => inner.clone().prop_map(Prop::neg),
            4 => (proptest::sample::select(BinOp::ALL.to_vec()), inner.clone(), inner.clone())
                .prop_map(|(op, x, y)| Prop::bin(op, x, y)),
            2 => (inner.clone(), inner.clone(), inner).prop_map(|(x, y, z)| Prop::cond(x, y, z)),
        ]
    })
}

/// Random machine over `names` with up to `max_states` states.
pub fn arb_machine(names: &'static [&'static str], max_states: usize) -> impl Strategy<Value = ValuationMachine> {
    (1..=max_states).prop_flat_map(move |n| {
        let cells = n * names.len();
        (proptest::collection::vec(any::<bool>(), cells), proptest::collection::vec(0..n, cells)).prop_map(
            move |(reply, next)| {
                let list: Vec<Atom> = atoms(names).into_iter().collect();
                ValuationMachine::with_default_names(list, n, reply, next).unwrap()
            },
        )
    })
}

/// Restriction of `m` to the states reachable from its initial state,
/// renumbered in the enumerator's discovery order.
pub fn canonical(m: &ValuationMachine) -> ValuationMachine {
    let k = m.atoms().len();
    let mut order = vec![m.init()];
    let mut index = vec![usize::MAX; m.state_count()];
    index[m.init()] = 0;
    let mut i = 0;
    while i < order.len() {
        for a in 0..k {
            let t = m.next(a, order[i]);
            if index[t] == usize::MAX {
                index[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }
    let mut reply = Vec::new();
    let mut next = Vec::new();
    for &s in &order {
        for a in 0..k {
            reply.push(m.reply(a, s));
            next.push(index[m.next(a, s)]);
        }
    }
    ValuationMachine::with_default_names(m.atoms().to_vec(), order.len(), reply, next).unwrap()
}
