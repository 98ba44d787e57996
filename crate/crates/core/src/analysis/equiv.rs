use std::collections::BTreeSet;

use serde::Serialize;

use crate::atom::Atom;
use crate::error::Result;
use crate::prop::{to_basic_form, BasicForm, Prop};
use crate::valuation::{CompiledForm, EvalTrace, MachineSpace, ValuationClass, ValuationMachine};

use super::repetition::{assignments, evaluate_assignment};

/// Default enumeration bounds.
pub const DEFAULT_MAX_STATES: usize = 3;
pub const DEFAULT_FUEL: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivStatus {
    Equivalent,
    EquivalentUpToBounds,
    Inequivalent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_states: usize,
    pub fuel: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample<T> {
    pub machine: ValuationMachine,
    pub left: T,
    pub right: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivVerdict<T = EvalTrace> {
    pub status: EquivStatus,
    /// Present for `EquivalentUpToBounds`.
    pub bounds: Option<Bounds>,
    /// Present exactly for `Inequivalent`.
    pub counterexample: Option<Counterexample<T>>,
}

impl<T> EquivVerdict<T> {
    pub fn equivalent() -> Self {
        EquivVerdict { status: EquivStatus::Equivalent, bounds: None, counterexample: None }
    }

    pub fn up_to(bounds: Bounds) -> Self {
        EquivVerdict { status: EquivStatus::EquivalentUpToBounds, bounds: Some(bounds), counterexample: None }
    }

    pub fn inequivalent(machine: ValuationMachine, left: T, right: T) -> Self {
        EquivVerdict {
            status: EquivStatus::Inequivalent,
            bounds: None,
            counterexample: Some(Counterexample { machine, left, right }),
        }
    }

    pub fn holds(&self) -> bool {
        self.status != EquivStatus::Inequivalent
    }
}

fn union_atoms(p: &BasicForm, q: &BasicForm) -> BTreeSet<Atom> {
    let mut atoms = p.atoms();
    atoms.extend(q.atoms());
    atoms
}

/// First point where two basic forms differ, as the path leading there.
pub fn first_difference(p: &BasicForm, q: &BasicForm) -> Option<Vec<(Atom, bool)>> {
    fn walk(p: &BasicForm, q: &BasicForm, path: &mut Vec<(Atom, bool)>) -> bool {
        match (p, q) {
            (BasicForm::Node(a, pt, pe), BasicForm::Node(b, qt, qe)) if a == b => {
                path.push((a.clone(), true));
                if walk(pt, qt, path) {
                    return true;
                }
                path.pop();
                path.push((a.clone(), false));
                if walk(pe, qe, path) {
                    return true;
                }
                path.pop();
                false
            }
            _ => p != q,
        }
    }
    let mut path = Vec::new();
    walk(p, q, &mut path).then_some(path)
}

/// Equivalence under free valuations: identity of basic forms. A
/// distinguishing machine is searched with up to
/// [`DEFAULT_MAX_STATES`] states.
pub fn equiv_free(p: &Prop, q: &Prop) -> EquivVerdict {
    equiv_free_bounded(p, q, DEFAULT_MAX_STATES)
}

pub fn equiv_free_bounded(p: &Prop, q: &Prop, max_states: usize) -> EquivVerdict {
    let bp = to_basic_form(p);
    let bq = to_basic_form(q);
    if bp == bq {
        return EquivVerdict::equivalent();
    }
    let atoms = union_atoms(&bp, &bq);
    let fp = CompiledForm::new(&bp, &atoms.iter().cloned().collect::<Vec<_>>()).expect("atoms in union");
    let fq = CompiledForm::new(&bq, &atoms.iter().cloned().collect::<Vec<_>>()).expect("atoms in union");
    let space = MachineSpace::new(&atoms, max_states, ValuationClass::Free, 0);
    for m in space.iter() {
        let m = m.expect("no cap set");
        let (tp, tq) = (fp.trace(&m, m.init()), fq.trace(&m, m.init()));
        if tp.result != tq.result || tp.observations() != tq.observations() {
            return EquivVerdict::inequivalent(m, tp, tq);
        }
    }
    // enumeration bound too small: drive both along their first difference
    let path = first_difference(&bp, &bq).expect("forms differ");
    let m = ValuationMachine::realizing_path(&atoms, &path).expect("atoms in union");
    let (tp, tq) = (fp.trace(&m, m.init()), fq.trace(&m, m.init()));
    EquivVerdict::inequivalent(m, tp, tq)
}

/// Equivalence under static valuations, i.e. ordinary propositional
/// equivalence, decided over all total assignments.
pub fn equiv_static(p: &Prop, q: &Prop) -> EquivVerdict {
    let bp = to_basic_form(p);
    let bq = to_basic_form(q);
    let atoms = union_atoms(&bp, &bq);
    for assignment in assignments(&atoms) {
        if evaluate_assignment(&bp, &assignment) != evaluate_assignment(&bq, &assignment) {
            let m = ValuationMachine::assignment(&assignment);
            let left = CompiledForm::new(&bp, m.atoms()).expect("declared").trace(&m, 0);
            let right = CompiledForm::new(&bq, m.atoms()).expect("declared").trace(&m, 0);
            return EquivVerdict::inequivalent(m, left, right);
        }
    }
    EquivVerdict::equivalent()
}

/// Equivalence relative to a valuation class: results are compared on every
/// enumerated machine of the class. Static and free semantics are decided
/// exactly.
pub fn equiv_class(
    p: &Prop,
    q: &Prop,
    c: ValuationClass,
    max_states: usize,
    fuel: usize,
) -> Result<EquivVerdict> {
    equiv_class_capped(p, q, c, max_states, fuel, None)
}

pub fn equiv_class_capped(
    p: &Prop,
    q: &Prop,
    c: ValuationClass,
    max_states: usize,
    fuel: usize,
    cap: Option<u64>,
) -> Result<EquivVerdict> {
    match c {
        ValuationClass::Static => return Ok(equiv_static(p, q)),
        ValuationClass::Free => return Ok(equiv_free_bounded(p, q, max_states)),
        _ => {}
    }
    let bp = to_basic_form(p);
    let bq = to_basic_form(q);
    let atoms = union_atoms(&bp, &bq);
    let list: Vec<Atom> = atoms.iter().cloned().collect();
    let fp = CompiledForm::new(&bp, &list)?;
    let fq = CompiledForm::new(&bq, &list)?;
    let space = MachineSpace::new(&atoms, max_states, c, fuel).with_cap(cap);
    for m in space.iter() {
        let m = m?;
        if fp.run(&m, m.init()).0 != fq.run(&m, m.init()).0 {
            let (tp, tq) = (fp.trace(&m, m.init()), fq.trace(&m, m.init()));
            return Ok(EquivVerdict::inequivalent(m, tp, tq));
        }
    }
    Ok(EquivVerdict::up_to(Bounds { max_states, fuel }))
}
