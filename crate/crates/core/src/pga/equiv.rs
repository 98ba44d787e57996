use std::collections::BTreeSet;

use crate::analysis::{assignments, Bounds, EquivVerdict};
use crate::atom::Atom;
use crate::error::Result;
use crate::valuation::{MachineSpace, ValuationClass, ValuationMachine};

use super::exec::{Prepared, RunRecord};
use super::instr::InstrSeq;
use super::thread::{thread_difference, thread_extract};

fn same_run(x: &RunRecord, y: &RunRecord) -> bool {
    x.observable() == y.observable()
}

/// Equivalence of instruction sequences. Under free valuations the
/// extracted threads are compared structurally; under every other class the
/// runs (outcome and `(action, reply)` trace) are compared on each machine
/// of the class, with work instructions resetting memorization. Static is
/// decided over all assignments; the remaining classes are bounded.
pub fn equiv_iseq(x: &InstrSeq, y: &InstrSeq, c: ValuationClass, bounds: Bounds) -> Result<EquivVerdict<RunRecord>> {
    equiv_iseq_capped(x, y, c, bounds, None)
}

pub fn equiv_iseq_capped(
    x: &InstrSeq,
    y: &InstrSeq,
    c: ValuationClass,
    bounds: Bounds,
    cap: Option<u64>,
) -> Result<EquivVerdict<RunRecord>> {
    let mut atoms = x.atoms();
    atoms.extend(y.atoms());
    let list: Vec<Atom> = atoms.iter().cloned().collect();
    let px = Prepared::new(x, &list)?;
    let py = Prepared::new(y, &list)?;
    let compare = |m: ValuationMachine| -> Option<EquivVerdict<RunRecord>> {
        let (rx, ry) = (px.run(&m, m.init()), py.run(&m, m.init()));
        (!same_run(&rx, &ry)).then(|| EquivVerdict::inequivalent(m, rx, ry))
    };
    match c {
        ValuationClass::Free => {
            let (tx, ty) = (thread_extract(x), thread_extract(y));
            let Some(path) = thread_difference(&tx, &ty) else {
                return Ok(EquivVerdict::equivalent());
            };
            let space = MachineSpace::new(&atoms, bounds.max_states, c, 0).with_cap(cap);
            for m in space.iter() {
                if let Some(v) = compare(m?) {
                    return Ok(v);
                }
            }
            let m = ValuationMachine::realizing_path(&atoms, &path)?;
            Ok(compare(m).expect("threads differ along the path"))
        }
        ValuationClass::Static => {
            for a in assignments(&atoms) {
                if let Some(v) = compare(ValuationMachine::assignment(&a)) {
                    return Ok(v);
                }
            }
            Ok(EquivVerdict::equivalent())
        }
        _ => {
            let mut work: BTreeSet<Atom> = x.work_atoms();
            work.extend(y.work_atoms());
            let space = MachineSpace::new(&atoms, bounds.max_states, c, bounds.fuel).with_work(work).with_cap(cap);
            for m in space.iter() {
                if let Some(v) = compare(m?) {
                    return Ok(v);
                }
            }
            Ok(EquivVerdict::up_to(bounds))
        }
    }
}
