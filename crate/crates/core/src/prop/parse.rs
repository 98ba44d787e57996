use crate::atom::{is_identifier, Atom};
use crate::error::SyntaxError;

use super::{BinOp, Prop};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    True,
    False,
    Ident(Atom),
    Not,
    Op(BinOp),
    CondOpen,
    CondClose,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::True => "`T`".into(),
            Tok::False => "`F`".into(),
            Tok::Ident(a) => format!("identifier `{a}`"),
            Tok::Not => "`~`".into(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::CondOpen => "`<|`".into(),
            Tok::CondClose => "`|>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn lex(text: &str, base: usize) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let start = base + i;
        let symbols: [(&str, Tok); 15] = [
            (".<=>", Tok::Op(BinOp::RightBiimp)),
            (".&&", Tok::Op(BinOp::RightAnd)),
            (".||", Tok::Op(BinOp::RightOr)),
            (".=>", Tok::Op(BinOp::RightImp)),
            ("<=>", Tok::Op(BinOp::LeftBiimp)),
            ("&&", Tok::Op(BinOp::LeftAnd)),
            ("||", Tok::Op(BinOp::LeftOr)),
            ("=>", Tok::Op(BinOp::LeftImp)),
            ("<|", Tok::CondOpen),
            ("|>", Tok::CondClose),
            ("~", Tok::Not),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("T", Tok::True),
            ("F", Tok::False),
        ];
        if let Some((sym, tok)) = symbols.iter().find(|(sym, _)| rest.starts_with(sym)) {
            // `T`/`F` must not be glued to identifier characters.
            let keyword = matches!(tok, Tok::True | Tok::False);
            let glued = keyword
                && rest[1..]
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
            if !glued {
                out.push((start, tok.clone()));
                i += sym.len();
                continue;
            }
        }
        if c.is_ascii_alphabetic() || c == b'_' || c.is_ascii_digit() {
            let len = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            let word = &rest[..len];
            if !is_identifier(word) {
                return Err(SyntaxError::new(
                    start,
                    format!("`{word}`"),
                    &["identifier", "`T`", "`F`"],
                ));
            }
            out.push((start, Tok::Ident(Atom::new(word).expect("checked identifier"))));
            i += len;
            continue;
        }
        let ch = rest.chars().next().expect("nonempty");
        return Err(SyntaxError::new(
            start,
            format!("`{ch}`"),
            &[
                "identifier", "`T`", "`F`", "`~`", "`(`", "`)`", "`&&`", "`||`", "`=>`", "`<=>`",
                "`.&&`", "`.||`", "`.=>`", "`.<=>`", "`<|`", "`|>`",
            ],
        ));
    }
    out.push((base + text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const OPERAND_START: &[&str] = &["identifier", "`T`", "`F`", "`~`", "`(`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        SyntaxError::new(self.offset(), self.peek().describe(), expected)
    }

    fn conditional(&mut self) -> Result<Prop, SyntaxError> {
        let then = self.biimp()?;
        if *self.peek() != Tok::CondOpen {
            return Ok(then);
        }
        self.bump();
        let cond = self.biimp()?;
        if *self.peek() != Tok::CondClose {
            return Err(self.error(&["`|>`", "`<=>`", "`.<=>`", "`=>`", "`.=>`", "`||`", "`.||`", "`&&`", "`.&&`"]));
        }
        self.bump();
        let els = self.biimp()?;
        Ok(Prop::cond(then, cond, els))
    }

    fn biimp(&mut self) -> Result<Prop, SyntaxError> {
        let mut lhs = self.implication()?;
        while let Tok::Op(op @ (BinOp::LeftBiimp | BinOp::RightBiimp)) = *self.peek() {
            self.bump();
            let rhs = self.implication()?;
            lhs = Prop::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Prop, SyntaxError> {
        let lhs = self.disjunction()?;
        if let Tok::Op(op @ (BinOp::LeftImp | BinOp::RightImp)) = *self.peek() {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Prop::bin(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Prop, SyntaxError> {
        let mut lhs = self.conjunction()?;
        while let Tok::Op(op @ (BinOp::LeftOr | BinOp::RightOr)) = *self.peek() {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Prop::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Prop, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(op @ (BinOp::LeftAnd | BinOp::RightAnd)) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            lhs = Prop::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Prop, SyntaxError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Prop::neg(self.unary()?))
            }
            Tok::True => {
                self.bump();
                Ok(Prop::Truth)
            }
            Tok::False => {
                self.bump();
                Ok(Prop::Falsity)
            }
            Tok::Ident(a) => {
                self.bump();
                Ok(Prop::Atom(a))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.conditional()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`<|`"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(OPERAND_START)),
        }
    }
}

/// Parses a statement in the ASCII grammar:
/// `~` binds tightest, then `&&`/`.&&`, `||`/`.||`, `=>`/`.=>` (right
/// associative), `<=>`/`.<=>`, and finally the non-associative conditional
/// `p <| q |> r`.
pub fn parse_prop(text: &str) -> Result<Prop, SyntaxError> {
    parse_prop_at(text, 0)
}

pub(crate) fn parse_prop_at(text: &str, base: usize) -> Result<Prop, SyntaxError> {
    let toks = lex(text, base)?;
    let mut parser = Parser { toks, pos: 0 };
    let p = parser.conditional()?;
    if *parser.peek() != Tok::Eof {
        let expected: &[&str] = if *parser.peek() == Tok::CondOpen {
            // conditional is non-associative
            &["end of input", "`)`"]
        } else {
            &["end of input", "binary connective", "`<|`"]
        };
        return Err(parser.error(expected));
    }
    Ok(p)
}
