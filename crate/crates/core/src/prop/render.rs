use super::{BinOp, Prop};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RenderMode {
    /// Parentheses only where precedence requires them.
    #[default]
    Minimal,
    /// Every compound operand is parenthesized.
    Full,
}

fn level(p: &Prop) -> u8 {
    match p {
        Prop::Cond(..) => 0,
        Prop::Bin(op, ..) => match op {
            BinOp::LeftBiimp | BinOp::RightBiimp => 1,
            BinOp::LeftImp | BinOp::RightImp => 2,
            BinOp::LeftOr | BinOp::RightOr => 3,
            BinOp::LeftAnd | BinOp::RightAnd => 4,
        },
        Prop::Neg(_) => 5,
        Prop::Truth | Prop::Falsity | Prop::Atom(_) => 6,
    }
}

/// Writes `p` as a token stream. Returns nothing; tokens are pushed to `out`.
fn tokens<'a>(p: &'a Prop, mode: RenderMode, min_level: u8, out: &mut Vec<Token<'a>>) {
    let wrap = match mode {
        RenderMode::Minimal => level(p) < min_level,
        RenderMode::Full => min_level > 0 && level(p) < 6,
    };
    if wrap {
        out.push(Token::LParen);
    }
    match p {
        Prop::Truth => out.push(Token::Word("T")),
        Prop::Falsity => out.push(Token::Word("F")),
        Prop::Atom(a) => out.push(Token::Word(a.as_str())),
        Prop::Neg(x) => {
            out.push(Token::Not);
            tokens(x, mode, 5, out);
        }
        Prop::Cond(x, y, z) => {
            tokens(x, mode, 1, out);
            out.push(Token::CondOpen);
            tokens(y, mode, 1, out);
            out.push(Token::CondClose);
            tokens(z, mode, 1, out);
        }
        Prop::Bin(op, x, y) => {
            let l = level(p);
            let (left_min, right_min) = match op {
                BinOp::LeftImp | BinOp::RightImp => (l + 1, l),
                _ => (l, l + 1),
            };
            tokens(x, mode, left_min, out);
            out.push(Token::Op(*op));
            tokens(y, mode, right_min, out);
        }
    }
    if wrap {
        out.push(Token::RParen);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token<'a> {
    Word(&'a str),
    Not,
    Op(BinOp),
    CondOpen,
    CondClose,
    LParen,
    RParen,
}

pub fn render_prop(p: &Prop) -> String {
    render_prop_with(p, RenderMode::Minimal)
}

pub fn render_prop_with(p: &Prop, mode: RenderMode) -> String {
    let mut toks = Vec::new();
    tokens(p, mode, 0, &mut toks);
    let mut s = String::new();
    for t in toks {
        match t {
            Token::Word(w) => s.push_str(w),
            Token::Not => s.push('~'),
            Token::Op(op) => {
                s.push(' ');
                s.push_str(op.symbol());
                s.push(' ');
            }
            Token::CondOpen => s.push_str(" <| "),
            Token::CondClose => s.push_str(" |> "),
            Token::LParen => s.push('('),
            Token::RParen => s.push(')'),
        }
    }
    s
}

/// Size-metric view of a statement: unit cost per atom, constant,
/// connective, conditional occurrence and parenthesis of the minimal
/// rendering.
pub trait PropTokens {
    fn token_count(&self) -> usize;
}

impl PropTokens for Prop {
    fn token_count(&self) -> usize {
        let mut toks = Vec::new();
        tokens(self, RenderMode::Minimal, 0, &mut toks);
        // `<|` and `|>` together are one conditional occurrence
        toks.len() - toks.iter().filter(|t| **t == Token::CondClose).count()
    }
}
