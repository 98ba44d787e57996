mod common;

use proptest::prelude::*;
use steerlab::prop::{cp_rewrite, expand, render_prop_with, rewrite_step_bound, RenderMode};
use steerlab::valuation::evaluate_from;
use steerlab::{parse_prop, render_prop, to_basic_form, BinOp, Prop};

use common::{arb_machine, arb_prop, cond_terms, free_machines, interpret, leaves};

const NAMES: &[&str] = &["a", "b", "c"];

fn has_biimp(p: &Prop) -> bool {
    match p {
        Prop::Truth | Prop::Falsity | Prop::Atom(_) => false,
        Prop::Neg(x) => has_biimp(x),
        Prop::Cond(x, y, z) => has_biimp(x) || has_biimp(y) || has_biimp(z),
        Prop::Bin(op, x, y) => {
            matches!(op, BinOp::LeftBiimp | BinOp::RightBiimp) || has_biimp(x) || has_biimp(y)
        }
    }
}

proptest! {
    #[test]
    fn render_parse_round_trip(p in arb_prop(NAMES, 5)) {
        prop_assert_eq!(parse_prop(&render_prop(&p)).unwrap(), p.clone());
        let full = render_prop_with(&p, RenderMode::Full);
        prop_assert_eq!(parse_prop(&full).unwrap(), p);
    }

    #[test]
    fn basic_form_is_idempotent(p in arb_prop(NAMES, 5)) {
        let bf = to_basic_form(&p);
        prop_assert_eq!(to_basic_form(&bf.to_prop()), bf);
    }

    #[test]
    fn basic_form_preserves_evaluation(p in arb_prop(NAMES, 4), m in arb_machine(NAMES, 3)) {
        for start in 0..m.state_count() {
            let (result, end, steps) = interpret(&p, &m, start);
            let trace = evaluate_from(&p, &m, start).unwrap();
            prop_assert_eq!(trace.result, result);
            prop_assert_eq!(trace.final_state, end);
            let got: Vec<_> = trace.steps.iter().map(|s| (s.atom.clone(), s.state, s.reply)).collect();
            prop_assert_eq!(got, steps);
        }
    }

    #[test]
    fn expansion_is_linear_without_biimplication(p in arb_prop(NAMES, 5)) {
        prop_assume!(!has_biimp(&p));
        prop_assert!(expand(&p).node_count() <= 4 * p.node_count());
    }

    #[test]
    fn rewriting_reaches_the_basic_form(p in arb_prop(NAMES, 4)) {
        let out = cp_rewrite(&p);
        prop_assert_eq!(&out.basic, &to_basic_form(&p));
        prop_assert_eq!(out.steps, rewrite_step_bound(&p));
    }
}

#[test]
fn conditional_terms_agree_with_their_basic_form() {
    let names = ["a", "b"];
    let machines = free_machines(&names, 2);
    for t in cond_terms(&leaves(&names), 3).iter().step_by(7) {
        for m in &machines {
            let trace = evaluate_from(t, m, 0).unwrap();
            let (result, end, _) = interpret(t, m, 0);
            assert_eq!((trace.result, trace.final_state), (result, end), "{}", render_prop(t));
        }
    }
}

#[test]
fn binary_connectives_on_atoms() {
    let machines = free_machines(&["a", "b"], 3);
    for op in BinOp::ALL {
        let p = Prop::bin(op, Prop::atom("a"), Prop::atom("b"));
        for m in &machines {
            let trace = evaluate_from(&p, m, 0).unwrap();
            let (result, end, steps) = interpret(&p, m, 0);
            assert_eq!((trace.result, trace.final_state, trace.steps.len()), (result, end, steps.len()));
        }
    }
}
