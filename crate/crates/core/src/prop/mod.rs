//! Propositional statements with sequential connectives and the ternary
//! conditional `x <| y |> z` (condition in the middle).

mod basic;
pub(crate) mod parse;
mod render;
mod rewrite;

use std::collections::BTreeSet;

pub use basic::{to_basic_form, BasicForm};
pub use parse::parse_prop;
pub use render::{render_prop, render_prop_with, PropTokens, RenderMode};
pub use rewrite::{cp_rewrite, rewrite_step_bound, RewriteOutcome};

use crate::atom::Atom;

/// Binary sequential connectives. `Left*` evaluate the left operand first,
/// `Right*` (the inverse-order variants) evaluate the right operand first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    LeftAnd,
    LeftOr,
    LeftImp,
    LeftBiimp,
    RightAnd,
    RightOr,
    RightImp,
    RightBiimp,
}

impl BinOp {
    pub const ALL: [BinOp; 8] = [
        BinOp::LeftAnd,
        BinOp::LeftOr,
        BinOp::LeftImp,
        BinOp::LeftBiimp,
        BinOp::RightAnd,
        BinOp::RightOr,
        BinOp::RightImp,
        BinOp::RightBiimp,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::LeftAnd => "&&",
            BinOp::LeftOr => "||",
            BinOp::LeftImp => "=>",
            BinOp::LeftBiimp => "<=>",
            BinOp::RightAnd => ".&&",
            BinOp::RightOr => ".||",
            BinOp::RightImp => ".=>",
            BinOp::RightBiimp => ".<=>",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    Truth,
    Falsity,
    Atom(Atom),
    /// `then <| cond |> else`
    Cond(Box<Prop>, Box<Prop>, Box<Prop>),
    Neg(Box<Prop>),
    Bin(BinOp, Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn atom(name: &str) -> Prop {
        Prop::Atom(crate::atom::atom(name))
    }

    pub fn cond(then: Prop, cond: Prop, els: Prop) -> Prop {
        Prop::Cond(Box::new(then), Box::new(cond), Box::new(els))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(p: Prop) -> Prop {
        Prop::Neg(Box::new(p))
    }

    pub fn bin(op: BinOp, p: Prop, q: Prop) -> Prop {
        Prop::Bin(op, Box::new(p), Box::new(q))
    }

    pub fn and(p: Prop, q: Prop) -> Prop {
        Prop::bin(BinOp::LeftAnd, p, q)
    }

    pub fn or(p: Prop, q: Prop) -> Prop {
        Prop::bin(BinOp::LeftOr, p, q)
    }

    /// Set of atoms occurring anywhere in the statement.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Prop::Truth | Prop::Falsity => {}
            Prop::Atom(a) => {
                out.insert(a.clone());
            }
            Prop::Cond(x, y, z) => {
                x.collect_atoms(out);
                y.collect_atoms(out);
                z.collect_atoms(out);
            }
            Prop::Neg(x) => x.collect_atoms(out),
            Prop::Bin(_, x, y) => {
                x.collect_atoms(out);
                y.collect_atoms(out);
            }
        }
    }

    /// Number of AST nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Prop::Truth | Prop::Falsity | Prop::Atom(_) => 1,
            Prop::Cond(x, y, z) => 1 + x.node_count() + y.node_count() + z.node_count(),
            Prop::Neg(x) => 1 + x.node_count(),
            Prop::Bin(_, x, y) => 1 + x.node_count() + y.node_count(),
        }
    }

    /// Height of the AST; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Prop::Truth | Prop::Falsity | Prop::Atom(_) => 1,
            Prop::Cond(x, y, z) => 1 + x.depth().max(y.depth()).max(z.depth()),
            Prop::Neg(x) => 1 + x.depth(),
            Prop::Bin(_, x, y) => 1 + x.depth().max(y.depth()),
        }
    }

    /// True when only `T`, `F`, atoms and conditionals occur.
    pub fn is_primitive(&self) -> bool {
        match self {
            Prop::Truth | Prop::Falsity | Prop::Atom(_) => true,
            Prop::Cond(x, y, z) => x.is_primitive() && y.is_primitive() && z.is_primitive(),
            Prop::Neg(_) | Prop::Bin(..) => false,
        }
    }
}

/// Replaces every derived connective by its defining conditional.
pub fn expand(p: &Prop) -> Prop {
    fn not(x: Prop) -> Prop {
        Prop::cond(Prop::Falsity, x, Prop::Truth)
    }
    match p {
        Prop::Truth | Prop::Falsity | Prop::Atom(_) => p.clone(),
        Prop::Cond(x, y, z) => Prop::cond(expand(x), expand(y), expand(z)),
        Prop::Neg(x) => not(expand(x)),
        Prop::Bin(op, x, y) => {
            let x = expand(x);
            let y = expand(y);
            match op {
                BinOp::LeftAnd => Prop::cond(y, x, Prop::Falsity),
                BinOp::LeftOr => Prop::cond(Prop::Truth, x, y),
                BinOp::LeftImp => Prop::cond(Prop::Truth, not(x), y),
                BinOp::LeftBiimp => Prop::cond(y.clone(), x, not(y)),
                BinOp::RightAnd => Prop::cond(x, y, Prop::Falsity),
                BinOp::RightOr => Prop::cond(Prop::Truth, y, x),
                BinOp::RightImp => Prop::cond(Prop::Truth, y, not(x)),
                BinOp::RightBiimp => Prop::cond(x.clone(), y, not(x)),
            }
        }
    }
}
