mod common;

use proptest::prelude::*;
use steerlab::analysis::{find_repetition, EquivStatus};
use steerlab::compile::{eliminate_nonatomic, minimize, MinimizeOptions};
use steerlab::pga::{
    equiv_iseq, exec, iseq_size, parse_iseq, thread_extract, InstrSeq, Instruction, Outcome, RunRecord,
};
use steerlab::valuation::{ValuationClass, ValuationMachine};
use steerlab::{atom, to_basic_form, Error, Prop};

use common::{arb_prop, atoms};

const NAMES: &[&str] = &["a", "b", "c"];

fn seq(s: &str) -> InstrSeq {
    parse_iseq(s).unwrap()
}

fn arb_instruction() -> impl Strategy<Value = Instruction> {
    prop_oneof![
        proptest::sample::select(NAMES).prop_map(|n| Instruction::Basic(atom(n))),
        arb_prop(NAMES, 3).prop_map(Instruction::PosTest),
        arb_prop(NAMES, 3).prop_map(Instruction::NegTest),
        (0usize..5).prop_map(Instruction::Jump),
        Just(Instruction::Halt),
    ]
}

fn arb_seq() -> impl Strategy<Value = InstrSeq> {
    proptest::collection::vec(arb_instruction(), 1..7).prop_map(|v| InstrSeq::new(v).unwrap())
}

proptest! {
    #[test]
    fn elimination_preserves_threads(s in arb_seq()) {
        let out = eliminate_nonatomic(&s);
        prop_assert!(out.is_atomic());
        prop_assert_eq!(thread_extract(&out), thread_extract(&s));
    }

    #[test]
    fn elimination_is_idempotent(s in arb_seq()) {
        let once = eliminate_nonatomic(&s);
        prop_assert_eq!(eliminate_nonatomic(&once), once);
    }
}

#[test]
fn elimination_layouts() {
    let cases = [
        ("+(~a && (b || c));u;!", "+a;#5;+b;#2;+c;u;!"),
        ("+(a && b);c;!", "-a;#3;+b;c;!"),
        ("-a;!;-b;c;!", "-a;!;-b;c;!"),
    ];
    for (input, expected) in cases {
        assert_eq!(eliminate_nonatomic(&seq(input)).to_string(), expected);
    }
}

/// Observable runs on every total assignment of {a,b}.
fn static_runs(s: &InstrSeq, machines: &[ValuationMachine]) -> Vec<(Outcome, Vec<(steerlab::Atom, bool)>)> {
    machines
        .iter()
        .map(|m| {
            let r: RunRecord = exec(s, m).unwrap();
            (r.outcome, r.trace.iter().map(|s| (s.atom.clone(), s.reply)).collect())
        })
        .collect()
}

/// Smallest size of a sequence over {a,b} with single-token test bodies
/// that is run-equivalent to `target` on every assignment, scanning every
/// sequence of at most `max_size`.
fn brute_force_minimum(target: &InstrSeq, max_size: usize) -> Option<usize> {
    let all = atoms(&["a", "b"]);
    let machines: Vec<ValuationMachine> =
        steerlab::analysis::assignments(&all).map(|a| ValuationMachine::assignment(&a)).collect();
    let wanted = static_runs(target, &machines);
    let mut letters = vec![Instruction::Halt];
    for body in [Prop::Truth, Prop::Falsity, Prop::atom("a"), Prop::atom("b")] {
        letters.push(Instruction::PosTest(body.clone()));
        letters.push(Instruction::NegTest(body));
    }
    letters.push(Instruction::Basic(atom("a")));
    letters.push(Instruction::Basic(atom("b")));
    let max_len = max_size.div_ceil(2);
    letters.extend((0..=max_len).map(Instruction::Jump));
    let mut best: Option<usize> = None;
    let mut frontier: Vec<Vec<Instruction>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for l in &letters {
                let mut t = s.clone();
                t.push(l.clone());
                let cand = InstrSeq::new(t.clone()).unwrap();
                let size = iseq_size(&cand);
                if size > max_size {
                    continue;
                }
                if best.is_none_or(|b| size < b) && static_runs(&cand, &machines) == wanted {
                    best = Some(size);
                }
                next.push(t);
            }
        }
        frontier = next;
    }
    best
}

#[test]
fn minimizer_agrees_with_brute_force() {
    let options = MinimizeOptions { body_budget: 1, ..MinimizeOptions::default() };
    let alphabet = atoms(&["a", "b"]);
    for target in ["+(a && b);!", "+(a || b);b;!", "-(~a);!;b;!", "a;+(a .&& b);!", "+(b <| a |> F);#0;!"] {
        let t = seq(target);
        let expected = brute_force_minimum(&t, 9);
        match minimize(&t, ValuationClass::Static, &alphabet, 9, &options) {
            Ok(out) => {
                assert_eq!(Some(out.size), expected, "{target} minimized to {}", out.result);
                assert_eq!(iseq_size(&out.result), out.size);
                let v = equiv_iseq(&out.result, &t, ValuationClass::Static, options.bounds).unwrap();
                assert_eq!(v.status, EquivStatus::Equivalent, "{target}");
            }
            Err(Error::NoneWithinBudget { .. }) => assert_eq!(expected, None, "{target}"),
            Err(e) => panic!("{target}: {e}"),
        }
    }
}

#[test]
fn non_repetitive_bodies_only() {
    let options = MinimizeOptions { non_repetitive_only: true, body_budget: 5, ..MinimizeOptions::default() };
    let target = seq("+(b <| a |> c);u;!");
    let out = minimize(&target, ValuationClass::Static, &atoms(&["a", "b", "c", "u"]), 11, &options).unwrap();
    for i in out.result.instructions() {
        if let Some(body) = i.body() {
            assert!(find_repetition(&to_basic_form(body)).is_none(), "{}", out.result);
        }
    }
    let v = equiv_iseq(&out.result, &target, ValuationClass::Static, options.bounds).unwrap();
    assert_eq!(v.status, EquivStatus::Equivalent);
    assert!(out.size <= iseq_size(&target));
}

#[test]
fn free_minimization_keeps_the_thread() {
    let target = seq("#2;a;+(a || b);!;!");
    let out = minimize(&target, ValuationClass::Free, &atoms(&["a", "b"]), 9, &MinimizeOptions::default()).unwrap();
    assert_eq!(thread_extract(&out.result), thread_extract(&target));
    assert_eq!(out.status, EquivStatus::Equivalent);
}

#[test]
fn elimination_is_idempotent_on_short_sequences() {
    let letters = [
        Instruction::Basic(atom("a")),
        Instruction::PosTest(Prop::atom("a")),
        Instruction::NegTest(Prop::atom("b")),
        Instruction::PosTest(Prop::and(Prop::atom("a"), Prop::atom("b"))),
        Instruction::Jump(0),
        Instruction::Jump(1),
        Instruction::Jump(2),
        Instruction::Halt,
    ];
    let mut frontier: Vec<Vec<Instruction>> = vec![Vec::new()];
    for _ in 0..5 {
        let mut next = Vec::new();
        for s in &frontier {
            for l in &letters {
                let mut t = s.clone();
                t.push(l.clone());
                let input = InstrSeq::new(t.clone()).unwrap();
                let once = eliminate_nonatomic(&input);
                assert_eq!(thread_extract(&once), thread_extract(&input), "{input}");
                assert_eq!(eliminate_nonatomic(&once), once, "{input}");
                next.push(t);
            }
        }
        frontier = next;
    }
}
