//! Literal CP term rewriting, used as an independent route to basic form.
//!
//! Oriented rules, applied leftmost-innermost:
//!
//! ```text
//! x <| T |> y            ->  x
//! x <| F |> y            ->  y
//! x <| (y <| z |> u) |> v ->  (x <| y |> v) <| z |> (x <| u |> v)
//! a                      ->  T <| a |> F      (a an atom outside condition position)
//! ```

use super::{expand, to_basic_form, BasicForm, Prop};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteOutcome {
    pub term: Prop,
    pub steps: usize,
    /// `term` read back as a basic form.
    pub basic: BasicForm,
}

/// Rewrites `p` (after expansion) to a CP normal form.
///
/// Panics if the rewrite sequence exceeds [`rewrite_step_bound`], which would
/// mean the rule system failed to terminate as argued.
pub fn cp_rewrite(p: &Prop) -> RewriteOutcome {
    let mut term = expand(p);
    let bound = bound(&term, false);
    let mut steps = 0;
    while step(&mut term, false) {
        steps += 1;
        assert!(steps <= bound, "CP rewriting exceeded its step bound {bound}");
    }
    let basic = read_basic(&term).expect("normal form is a basic form");
    RewriteOutcome { term, steps, basic }
}

/// Exact number of leftmost-innermost steps needed to normalize `expand(p)`.
pub fn rewrite_step_bound(p: &Prop) -> usize {
    bound(&expand(p), false)
}

fn bound(p: &Prop, in_condition: bool) -> usize {
    match p {
        Prop::Truth | Prop::Falsity => 0,
        Prop::Atom(_) => usize::from(!in_condition),
        Prop::Cond(x, y, z) => {
            let children = bound(x, false) + bound(y, true) + bound(z, false);
            let root = match **y {
                Prop::Atom(_) => 0,
                _ => {
                    let inner = to_basic_form(y);
                    inner.node_count() + inner.leaf_count()
                }
            };
            children + root
        }
        Prop::Neg(_) | Prop::Bin(..) => unreachable!("expanded"),
    }
}

/// Performs one leftmost-innermost rewrite inside `t`. Returns false when
/// `t` is in normal form.
fn step(t: &mut Prop, in_condition: bool) -> bool {
    if let Prop::Cond(x, y, z) = t {
        if step(x, false) || step(y, true) || step(z, false) {
            return true;
        }
    }
    let rewritten = match t {
        Prop::Atom(_) if !in_condition => {
            let a = std::mem::replace(t, Prop::Truth);
            Some(Prop::cond(Prop::Truth, a, Prop::Falsity))
        }
        Prop::Cond(x, y, z) => match y.as_mut() {
            Prop::Truth => Some(std::mem::replace(x.as_mut(), Prop::Truth)),
            Prop::Falsity => Some(std::mem::replace(z.as_mut(), Prop::Truth)),
            Prop::Cond(iy, iz, iu) => {
                let x = std::mem::replace(x.as_mut(), Prop::Truth);
                let v = std::mem::replace(z.as_mut(), Prop::Truth);
                let iy = std::mem::replace(iy.as_mut(), Prop::Truth);
                let iz = std::mem::replace(iz.as_mut(), Prop::Truth);
                let iu = std::mem::replace(iu.as_mut(), Prop::Truth);
                Some(Prop::cond(
                    Prop::cond(x.clone(), iy, v.clone()),
                    iz,
                    Prop::cond(x, iu, v),
                ))
            }
            _ => None,
        },
        _ => None,
    };
    match rewritten {
        Some(new) => {
            *t = new;
            true
        }
        None => false,
    }
}

fn read_basic(p: &Prop) -> Option<BasicForm> {
    match p {
        Prop::Truth => Some(BasicForm::Leaf(true)),
        Prop::Falsity => Some(BasicForm::Leaf(false)),
        Prop::Cond(x, y, z) => match y.as_ref() {
            Prop::Atom(a) => Some(BasicForm::node(a.clone(), read_basic(x)?, read_basic(z)?)),
            _ => None,
        },
        _ => None,
    }
}
