use std::collections::BTreeSet;
use std::fmt;

use crate::atom::Atom;

use super::{expand, render_prop, Prop};

/// Conditional-only normal form: atoms only in condition position,
/// boolean leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicForm {
    Leaf(bool),
    /// Evaluate `atom`; continue with `then` on `T`, with `els` on `F`.
    Node(Atom, Box<BasicForm>, Box<BasicForm>),
}

impl BasicForm {
    pub fn node(atom: Atom, then: BasicForm, els: BasicForm) -> BasicForm {
        BasicForm::Node(atom, Box::new(then), Box::new(els))
    }

    /// `T <| a |> F`
    pub fn of_atom(atom: Atom) -> BasicForm {
        BasicForm::node(atom, BasicForm::Leaf(true), BasicForm::Leaf(false))
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            BasicForm::Leaf(_) => 1,
            BasicForm::Node(_, t, e) => 1 + t.depth().max(e.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            BasicForm::Leaf(_) => 0,
            BasicForm::Node(_, t, e) => 1 + t.node_count() + e.node_count(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BasicForm::Leaf(_) => 1,
            BasicForm::Node(_, t, e) => t.leaf_count() + e.leaf_count(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(bf) = stack.pop() {
            if let BasicForm::Node(a, t, e) = bf {
                out.insert(a.clone());
                stack.push(t);
                stack.push(e);
            }
        }
        out
    }

    /// Whether a `Leaf(true)` occurs anywhere.
    pub fn contains_true(&self) -> bool {
        match self {
            BasicForm::Leaf(v) => *v,
            BasicForm::Node(_, t, e) => t.contains_true() || e.contains_true(),
        }
    }

    /// Replaces every `Leaf(true)` by `on_true` and every `Leaf(false)` by
    /// `on_false`.
    pub fn graft(&self, on_true: &BasicForm, on_false: &BasicForm) -> BasicForm {
        match self {
            BasicForm::Leaf(true) => on_true.clone(),
            BasicForm::Leaf(false) => on_false.clone(),
            BasicForm::Node(a, t, e) => {
                BasicForm::node(a.clone(), t.graft(on_true, on_false), e.graft(on_true, on_false))
            }
        }
    }

    /// All root-to-leaf paths as `(atom, branch taken)` sequences, together
    /// with the leaf value. Enumerated then-branch first.
    pub fn paths(&self) -> Vec<(Vec<(Atom, bool)>, bool)> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_paths(&mut prefix, &mut out);
        out
    }

    fn collect_paths(&self, prefix: &mut Vec<(Atom, bool)>, out: &mut Vec<(Vec<(Atom, bool)>, bool)>) {
        match self {
            BasicForm::Leaf(v) => out.push((prefix.clone(), *v)),
            BasicForm::Node(a, t, e) => {
                prefix.push((a.clone(), true));
                t.collect_paths(prefix, out);
                prefix.pop();
                prefix.push((a.clone(), false));
                e.collect_paths(prefix, out);
                prefix.pop();
            }
        }
    }

    /// The statement `then <| a |> else` this form denotes.
    pub fn to_prop(&self) -> Prop {
        match self {
            BasicForm::Leaf(true) => Prop::Truth,
            BasicForm::Leaf(false) => Prop::Falsity,
            BasicForm::Node(a, t, e) => Prop::cond(t.to_prop(), Prop::Atom(a.clone()), e.to_prop()),
        }
    }
}

impl fmt::Display for BasicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_prop(&self.to_prop()))
    }
}

/// Normalizes a statement to basic form: derived connectives are expanded,
/// constant conditions are folded, nested conditions are flattened by
/// distributing the branches over the inner conditional, and atoms outside
/// condition position are lifted to `T <| a |> F`.
pub fn to_basic_form(p: &Prop) -> BasicForm {
    if p.is_primitive() {
        primitive_to_basic(p)
    } else {
        primitive_to_basic(&expand(p))
    }
}

fn primitive_to_basic(p: &Prop) -> BasicForm {
    match p {
        Prop::Truth => BasicForm::Leaf(true),
        Prop::Falsity => BasicForm::Leaf(false),
        Prop::Atom(a) => BasicForm::of_atom(a.clone()),
        Prop::Cond(x, y, z) => {
            let cond = primitive_to_basic(y);
            cond.graft(&primitive_to_basic(x), &primitive_to_basic(z))
        }
        Prop::Neg(_) | Prop::Bin(..) => unreachable!("input is expanded"),
    }
}
