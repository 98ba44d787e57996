mod common;

use proptest::prelude::*;
use steerlab::analysis::{Bounds, EquivStatus};
use steerlab::pga::{
    equiv_iseq, exec, exec_from, iseq_size, parse_iseq, render_iseq, thread_extract, walk_thread, InstrSeq,
    Instruction, Outcome,
};
use steerlab::valuation::{StateId, ValuationClass, ValuationMachine};
use steerlab::{atom, Atom, Prop};

use common::{arb_machine, arb_prop, free_machines, interpret};

const NAMES: &[&str] = &["a", "b"];

/// Straightforward program-counter interpreter.
fn reference_run(s: &InstrSeq, m: &ValuationMachine, start: StateId) -> (Outcome, Vec<(Atom, bool)>, StateId) {
    let ins = s.instructions();
    let mut pc = 0;
    let mut state = start;
    let mut seen = Vec::new();
    loop {
        let Some(i) = ins.get(pc) else {
            return (Outcome::Deadlocked, seen, state);
        };
        match i {
            Instruction::Halt => return (Outcome::Terminated, seen, state),
            Instruction::Jump(0) => return (Outcome::Deadlocked, seen, state),
            Instruction::Jump(k) => pc += k,
            Instruction::Basic(a) => {
                let (_, next, steps) = interpret(&Prop::Atom(a.clone()), m, state);
                seen.extend(steps.into_iter().map(|(a, _, r)| (a, r)));
                state = next;
                pc += 1;
            }
            Instruction::PosTest(p) | Instruction::NegTest(p) => {
                let (r, next, steps) = interpret(p, m, state);
                seen.extend(steps.into_iter().map(|(a, _, r)| (a, r)));
                state = next;
                let go_on = r == matches!(i, Instruction::PosTest(_));
                pc += if go_on { 1 } else { 2 };
            }
        }
    }
}

fn observed(r: &steerlab::pga::RunRecord) -> (Outcome, Vec<(Atom, bool)>, StateId) {
    (r.outcome, r.trace.iter().map(|s| (s.atom.clone(), s.reply)).collect(), r.final_state)
}

fn alphabet() -> Vec<Instruction> {
    vec![
        Instruction::Basic(atom("a")),
        Instruction::Basic(atom("b")),
        Instruction::PosTest(Prop::atom("a")),
        Instruction::NegTest(Prop::atom("b")),
        Instruction::Jump(0),
        Instruction::Jump(1),
        Instruction::Jump(2),
        Instruction::Halt,
    ]
}

#[test]
fn exhaustive_exec_and_thread_agreement() {
    let machines = free_machines(NAMES, 2);
    let letters = alphabet();
    let mut seqs: Vec<Vec<Instruction>> = vec![Vec::new()];
    let mut checked = 0u64;
    for _ in 0..5 {
        let mut longer = Vec::new();
        for s in &seqs {
            for l in &letters {
                let mut t = s.clone();
                t.push(l.clone());
                longer.push(t);
            }
        }
        for body in &longer {
            let s = InstrSeq::new(body.clone()).unwrap();
            let thread = thread_extract(&s);
            for m in &machines {
                let run = exec(&s, m).unwrap();
                assert_eq!(observed(&run), reference_run(&s, m, 0), "{s}");
                assert_eq!(walk_thread(&thread, m, 0).unwrap(), run, "{s}");
                checked += 1;
            }
        }
        seqs = longer;
    }
    assert_eq!(checked, (8 + 64 + 512 + 4096 + 32768) * machines.len() as u64);
}

fn arb_instruction() -> impl Strategy<Value = Instruction> {
    prop_oneof![
        proptest::sample::select(NAMES).prop_map(|n| Instruction::Basic(atom(n))),
        arb_prop(NAMES, 3).prop_map(Instruction::PosTest),
        arb_prop(NAMES, 3).prop_map(Instruction::NegTest),
        (0usize..4).prop_map(Instruction::Jump),
        Just(Instruction::Halt),
    ]
}

fn arb_seq() -> impl Strategy<Value = InstrSeq> {
    proptest::collection::vec(arb_instruction(), 1..8).prop_map(|v| InstrSeq::new(v).unwrap())
}

proptest! {
    #[test]
    fn render_parse_round_trip(s in arb_seq()) {
        prop_assert_eq!(parse_iseq(&render_iseq(&s)).unwrap(), s);
    }

    #[test]
    fn size_is_additive(x in arb_seq(), y in arb_seq()) {
        prop_assert_eq!(iseq_size(&x.concat(&y)), iseq_size(&x) + iseq_size(&y) + 1);
    }

    #[test]
    fn exec_matches_reference(s in arb_seq(), m in arb_machine(NAMES, 3)) {
        for start in 0..m.state_count() {
            let run = exec_from(&s, &m, start).unwrap();
            prop_assert_eq!(observed(&run), reference_run(&s, &m, start));
            prop_assert_eq!(walk_thread(&thread_extract(&s), &m, start).unwrap(), run);
        }
    }

    #[test]
    fn free_equivalence_is_thread_equality(x in arb_seq(), y in arb_seq()) {
        let bounds = Bounds { max_states: 2, fuel: 8 };
        let v = equiv_iseq(&x, &y, ValuationClass::Free, bounds).unwrap();
        prop_assert_eq!(v.holds(), thread_extract(&x) == thread_extract(&y));
        if let Some(cx) = v.counterexample {
            prop_assert_ne!(cx.left.observable(), cx.right.observable());
            prop_assert_eq!(exec(&x, &cx.machine).unwrap(), cx.left);
        }
    }

    #[test]
    fn free_equivalence_implies_static(x in arb_seq(), y in arb_seq()) {
        let bounds = Bounds { max_states: 2, fuel: 8 };
        if equiv_iseq(&x, &y, ValuationClass::Free, bounds).unwrap().holds() {
            let v = equiv_iseq(&x, &y, ValuationClass::Static, bounds).unwrap();
            prop_assert_eq!(v.status, EquivStatus::Equivalent);
        }
    }
}

#[test]
fn instruction_sizes() {
    let size = |t: &str| iseq_size(&parse_iseq(t).unwrap());
    assert_eq!(size("a"), 1);
    assert_eq!(size("+a"), 2);
    assert_eq!(size("-(a && b)"), 6);
    assert_eq!(size("+(b <| a |> c)"), 7);
    assert_eq!(size("#12;!"), 3);
}
