mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use steerlab::valuation::{
    check_class, evaluate, evaluate_with_retry, generate_machines, CompiledForm, ValuationClass, ValuationMachine,
};
use steerlab::{atom, parse_prop, to_basic_form, Atom, BasicForm, Error};

use common::{all_machines, arb_machine, arb_prop, atoms, canonical};

const NAMES: &[&str] = &["a", "b", "c"];
const FUEL: usize = 12;

fn small_machines() -> Vec<ValuationMachine> {
    let mut out = Vec::new();
    for n in 1..=2 {
        out.extend(all_machines(&["a", "b"], n));
    }
    out.extend(all_machines(&["a"], 3));
    out
}

#[test]
fn class_hierarchy() {
    use ValuationClass::*;
    let implied = [
        (Static, Memorizing),
        (Memorizing, WeakPosMemorizing),
        (Memorizing, WeakNegMemorizing),
        (Memorizing, Contractive),
        (Contractive, RepetitionProof),
        (RepetitionProof, Free),
    ];
    for m in small_machines() {
        for (stronger, weaker) in implied {
            if check_class(&m, stronger, FUEL).is_ok() {
                assert!(check_class(&m, weaker, FUEL).is_ok(), "{stronger} but not {weaker}:\n{}", m.to_file_text());
            }
        }
        assert!(check_class(&m, Free, FUEL).is_ok());
    }
}

#[test]
fn enumeration_matches_brute_force() {
    let names = ["a", "b"];
    for c in ValuationClass::ALL {
        let generated: Vec<ValuationMachine> =
            generate_machines(&atoms(&names), 2, c, FUEL).map(|m| m.unwrap()).collect();
        let unique: HashSet<&ValuationMachine> = generated.iter().collect();
        assert_eq!(unique.len(), generated.len(), "{c}: duplicates");
        let mut expected = HashSet::new();
        for n in 1..=2 {
            for m in all_machines(&names, n) {
                let m = canonical(&m);
                if m.state_count() == n && check_class(&m, c, FUEL).is_ok() {
                    expected.insert(m);
                }
            }
        }
        assert_eq!(unique, expected.iter().collect(), "{c}");
    }
}

#[test]
fn violations_carry_a_trace() {
    let flip = ValuationMachine::parse("atoms a\nstates s0 s1\ninit s0\nstep a s0 T s1\nstep a s1 F s0\n").unwrap();
    let steerlab::valuation::ClassCheck::Violation(v) = check_class(&flip, ValuationClass::RepetitionProof, FUEL)
    else {
        panic!("flip machine is not repetition-proof");
    };
    assert_eq!(v.trace.iter().map(|s| s.reply).collect::<Vec<_>>(), vec![true, false]);
}

#[test]
fn retry_until_stable() {
    // a answers T, then F forever
    let m = ValuationMachine::parse("atoms a\nstates s0 s1\ninit s0\nstep a s0 T s1\nstep a s1 F s1\n").unwrap();
    let out = evaluate_with_retry(&parse_prop("a && a").unwrap(), &m, 2).unwrap();
    assert_eq!(out.attempts, 2);
    assert!(!out.result);
    let flip = ValuationMachine::parse("atoms a\nstates s0 s1\ninit s0\nstep a s0 T s1\nstep a s1 F s0\n").unwrap();
    let err = evaluate_with_retry(&parse_prop("a && a").unwrap(), &flip, 3).unwrap_err();
    assert!(matches!(err, Error::RetriesExhausted(ref t) if t.len() == 4));
}

#[test]
fn machine_file_round_trip() {
    for m in all_machines(&["a", "b"], 2).into_iter().step_by(17) {
        assert_eq!(ValuationMachine::parse(&m.to_file_text()).unwrap(), m);
    }
}

proptest! {
    #[test]
    fn every_path_is_realizable(p in arb_prop(NAMES, 4)) {
        let bf = to_basic_form(&p);
        let all = atoms(NAMES);
        for (path, leaf) in bf.paths() {
            let m = ValuationMachine::realizing_path(&all, &path).unwrap();
            let trace = steerlab::valuation::evaluate_basic_from(&bf, &m, m.init()).unwrap();
            prop_assert_eq!(trace.observations(), path);
            prop_assert_eq!(trace.result, leaf);
        }
    }

    #[test]
    fn traces_follow_paths(p in arb_prop(NAMES, 4), m in arb_machine(NAMES, 3)) {
        let bf = to_basic_form(&p);
        let trace = evaluate(&p, &m).unwrap();
        let paths = bf.paths();
        prop_assert!(paths.contains(&(trace.observations(), trace.result)));
    }

    #[test]
    fn compiled_run_matches_trace(p in arb_prop(NAMES, 4), m in arb_machine(NAMES, 3)) {
        let list: Vec<Atom> = atoms(NAMES).into_iter().collect();
        let form = CompiledForm::new(&to_basic_form(&p), &list).unwrap();
        let trace = form.trace(&m, 0);
        prop_assert_eq!(form.run(&m, 0), (trace.result, trace.final_state));
    }
}

#[test]
fn undeclared_atoms_are_rejected() {
    let m = ValuationMachine::parse("atoms a\nstates s0\ninit s0\nstep a s0 T s0\n").unwrap();
    let err = evaluate(&parse_prop("a && b").unwrap(), &m).unwrap_err();
    assert_eq!(err, Error::UndeclaredAtom(atom("b")));
    assert!(CompiledForm::new(&BasicForm::of_atom(atom("z")), m.atoms()).is_err());
}
