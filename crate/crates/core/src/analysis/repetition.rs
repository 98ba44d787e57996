use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::prop::{to_basic_form, BasicForm, Prop};
use crate::valuation::ValuationMachine;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepetitivenessReport {
    pub repetitive: bool,
    /// Decisions taken before the repeated evaluation.
    pub witness_path: Option<Vec<(Atom, bool)>>,
    /// Atom evaluated a second time at the end of the witness path.
    pub repeated_atom: Option<Atom>,
    /// Machine whose evaluation of the statement follows the witness path
    /// and then evaluates the repeated atom again.
    pub witness_machine: Option<ValuationMachine>,
}

/// First root-to-node path (then-branches first) on which an atom occurs
/// twice: returns the decisions before the second occurrence and the atom.
pub fn find_repetition(bf: &BasicForm) -> Option<(Vec<(Atom, bool)>, Atom)> {
    fn walk(bf: &BasicForm, path: &mut Vec<(Atom, bool)>) -> Option<Atom> {
        let BasicForm::Node(a, t, e) = bf else {
            return None;
        };
        if path.iter().any(|(b, _)| b == a) {
            return Some(a.clone());
        }
        path.push((a.clone(), true));
        if let Some(hit) = walk(t, path) {
            return Some(hit);
        }
        path.pop();
        path.push((a.clone(), false));
        if let Some(hit) = walk(e, path) {
            return Some(hit);
        }
        path.pop();
        None
    }
    let mut path = Vec::new();
    walk(bf, &mut path).map(|a| (path, a))
}

/// A statement is repetitive when some evaluation path of its basic form
/// evaluates an atom twice.
pub fn is_repetitive(p: &Prop) -> RepetitivenessReport {
    repetitiveness_of(&to_basic_form(p))
}

pub fn repetitiveness_of(bf: &BasicForm) -> RepetitivenessReport {
    match find_repetition(bf) {
        None => RepetitivenessReport {
            repetitive: false,
            witness_path: None,
            repeated_atom: None,
            witness_machine: None,
        },
        Some((path, atom)) => {
            let mut full = path.clone();
            full.push((atom.clone(), true));
            let machine =
                ValuationMachine::realizing_path(&bf.atoms(), &full).expect("path atoms occur in the form");
            RepetitivenessReport {
                repetitive: true,
                witness_path: Some(path),
                repeated_atom: Some(atom),
                witness_machine: Some(machine),
            }
        }
    }
}

/// Non-repeating form equivalent under memorizing semantics: every atom
/// already decided on the current path is replaced by the branch its
/// earlier reply selected. Nodes with equal branches are kept.
pub fn mem_normalize(p: &Prop) -> BasicForm {
    mem_normalize_basic(&to_basic_form(p))
}

pub fn mem_normalize_basic(bf: &BasicForm) -> BasicForm {
    fn walk(bf: &BasicForm, memo: &mut BTreeMap<Atom, bool>) -> BasicForm {
        match bf {
            BasicForm::Leaf(v) => BasicForm::Leaf(*v),
            BasicForm::Node(a, t, e) => match memo.get(a) {
                Some(true) => walk(t, memo),
                Some(false) => walk(e, memo),
                None => {
                    memo.insert(a.clone(), true);
                    let then = walk(t, memo);
                    memo.insert(a.clone(), false);
                    let els = walk(e, memo);
                    memo.remove(a);
                    BasicForm::node(a.clone(), then, els)
                }
            },
        }
    }
    walk(bf, &mut BTreeMap::new())
}

/// Satisfiability of a non-repetitive basic form: it is satisfiable exactly
/// when a `T` leaf occurs.
pub fn mem_sat(bf: &BasicForm) -> Result<bool> {
    if find_repetition(bf).is_some() {
        return Err(Error::RepetitiveInput);
    }
    Ok(bf.contains_true())
}

/// Value of `bf` when every atom answers according to `assignment`
/// (missing atoms answer `F`).
pub fn evaluate_assignment(bf: &BasicForm, assignment: &BTreeMap<Atom, bool>) -> bool {
    let mut cur = bf;
    loop {
        match cur {
            BasicForm::Leaf(v) => return *v,
            BasicForm::Node(a, t, e) => {
                cur = if assignment.get(a).copied().unwrap_or(false) { t } else { e };
            }
        }
    }
}

/// All total assignments of `atoms`, starting from all-`T`.
pub fn assignments(atoms: &BTreeSet<Atom>) -> impl Iterator<Item = BTreeMap<Atom, bool>> + '_ {
    let n = atoms.len();
    (0..1u64 << n).map(move |mask| {
        atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), mask >> (n - 1 - i) & 1 == 0))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::atom;
    use crate::prop::parse_prop;
    use crate::valuation::evaluate;

    fn p(s: &str) -> Prop {
        parse_prop(s).unwrap()
    }

    #[test]
    fn repetitive_example() {
        let r = is_repetitive(&p("a && (b || a)"));
        assert!(r.repetitive);
        assert_eq!(r.witness_path, Some(vec![(atom("a"), true), (atom("b"), false)]));
        assert_eq!(r.repeated_atom, Some(atom("a")));
        let trace = evaluate(&p("a && (b || a)"), r.witness_machine.as_ref().unwrap()).unwrap();
        assert_eq!(trace.atom_sequence(), vec![atom("a"), atom("b"), atom("a")]);
    }

    #[test]
    fn non_repetitive_examples() {
        for s in ["a && (b || T)", "b <| a |> c", "a && b", "a || b", "a .&& b", "a .|| b", "~(a && b)"] {
            let r = is_repetitive(&p(s));
            assert!(!r.repetitive, "{s}");
            assert!(r.witness_path.is_none() && r.witness_machine.is_none());
        }
    }

    #[test]
    fn two_place_definition_of_conditional_is_repetitive() {
        assert!(is_repetitive(&p("(a && b) || (~a && c)")).repetitive);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(mem_normalize(&Prop::Truth), BasicForm::Leaf(true));
        assert_eq!(mem_normalize(&p("a && a")), BasicForm::of_atom(atom("a")));
        let lifted = |n: &str| BasicForm::of_atom(atom(n));
        assert_eq!(
            mem_normalize(&p("(a && b) || (~a && c)")),
            BasicForm::node(atom("a"), lifted("b"), lifted("c"))
        );
        let contradiction = mem_normalize(&p("a && ~a"));
        assert_eq!(
            contradiction,
            BasicForm::node(atom("a"), BasicForm::Leaf(false), BasicForm::Leaf(false))
        );
        assert!(!mem_sat(&contradiction).unwrap());
    }

    #[test]
    fn sat_examples() {
        assert!(!mem_sat(&BasicForm::Leaf(false)).unwrap());
        assert!(mem_sat(&BasicForm::of_atom(atom("a"))).unwrap());
        assert_eq!(mem_sat(&to_basic_form(&p("a && a"))), Err(Error::RepetitiveInput));
    }

    #[test]
    fn assignment_order_starts_all_true() {
        let atoms: BTreeSet<Atom> = [atom("a"), atom("b")].into();
        let all: Vec<_> = assignments(&atoms).collect();
        assert_eq!(all.len(), 4);
        assert!(all[0].values().all(|v| *v));
        assert!(all[3].values().all(|v| !*v));
        assert!(all[1][&atom("a")] && !all[1][&atom("b")]);
    }
}
