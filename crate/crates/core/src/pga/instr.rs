use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::atom::{is_identifier, Atom};
use crate::error::SyntaxError;
use crate::prop::{render_prop, Prop, PropTokens};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Instruction {
    /// Work instruction: perform the action, ignore its reply.
    Basic(Atom),
    /// `+a` / `+(φ)`: continue on `T`, skip one instruction on `F`.
    PosTest(Prop),
    /// `-a` / `-(φ)`: continue on `F`, skip one instruction on `T`.
    NegTest(Prop),
    /// `#k`: relative forward jump; `#0` diverges.
    Jump(usize),
    /// `!`
    Halt,
}

impl Instruction {
    pub fn is_test(&self) -> bool {
        matches!(self, Instruction::PosTest(_) | Instruction::NegTest(_))
    }

    /// A test whose body is not a single atom.
    pub fn is_nonatomic_test(&self) -> bool {
        match self {
            Instruction::PosTest(p) | Instruction::NegTest(p) => !matches!(p, Prop::Atom(_)),
            _ => false,
        }
    }

    pub fn body(&self) -> Option<&Prop> {
        match self {
            Instruction::PosTest(p) | Instruction::NegTest(p) => Some(p),
            _ => None,
        }
    }

    /// Unit-cost token count.
    pub fn size(&self) -> usize {
        match self {
            Instruction::Basic(_) | Instruction::Jump(_) | Instruction::Halt => 1,
            Instruction::PosTest(Prop::Atom(_)) | Instruction::NegTest(Prop::Atom(_)) => 2,
            Instruction::PosTest(p) | Instruction::NegTest(p) => 3 + p.token_count(),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sign, body) = match self {
            Instruction::Basic(a) => return write!(f, "{a}"),
            Instruction::Jump(k) => return write!(f, "#{k}"),
            Instruction::Halt => return f.write_str("!"),
            Instruction::PosTest(p) => ('+', p),
            Instruction::NegTest(p) => ('-', p),
        };
        match body {
            Prop::Atom(a) => write!(f, "{sign}{a}"),
            p => write!(f, "{sign}({})", render_prop(p)),
        }
    }
}

/// A nonempty finite instruction sequence with forward jumps only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstrSeq(Vec<Instruction>);

impl InstrSeq {
    /// Returns `None` for an empty list.
    pub fn new(instructions: Vec<Instruction>) -> Option<InstrSeq> {
        if instructions.is_empty() {
            None
        } else {
            Some(InstrSeq(instructions))
        }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `self ; other`
    pub fn concat(&self, other: &InstrSeq) -> InstrSeq {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        InstrSeq(v)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for i in &self.0 {
            match i {
                Instruction::Basic(a) => {
                    out.insert(a.clone());
                }
                Instruction::PosTest(p) | Instruction::NegTest(p) => out.extend(p.atoms()),
                _ => {}
            }
        }
        out
    }

    /// Atoms occurring as work instructions.
    pub fn work_atoms(&self) -> BTreeSet<Atom> {
        self.0
            .iter()
            .filter_map(|i| match i {
                Instruction::Basic(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn is_atomic(&self) -> bool {
        !self.0.iter().any(Instruction::is_nonatomic_test)
    }
}

impl fmt::Display for InstrSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}

impl Serialize for InstrSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub fn render_iseq(s: &InstrSeq) -> String {
    s.to_string()
}

/// Size metric: unit cost for every atom, connective, conditional, constant,
/// `+`, `-`, `;`, `!`, `(`, `)` and `#k`.
pub fn iseq_size(s: &InstrSeq) -> usize {
    s.0.iter().map(Instruction::size).sum::<usize>() + s.0.len() - 1
}

const INSTRUCTION_START: &[&str] = &["`!`", "`#`", "`+`", "`-`", "identifier"];

/// Parses `;`-separated instructions: `!`, `#k`, `+a`, `-a`, `+(φ)`,
/// `-(φ)` and bare atoms for work instructions.
pub fn parse_iseq(text: &str) -> Result<InstrSeq, SyntaxError> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in text.split(';') {
        out.push(parse_instruction(piece, start)?);
        start += piece.len() + 1;
    }
    Ok(InstrSeq(out))
}

fn parse_instruction(piece: &str, base: usize) -> Result<Instruction, SyntaxError> {
    let lead = piece.len() - piece.trim_start().len();
    let body = piece.trim();
    let at = base + lead;
    let Some(first) = body.chars().next() else {
        return Err(SyntaxError::new(at, "empty instruction", INSTRUCTION_START));
    };
    match first {
        '!' if body.len() == 1 => Ok(Instruction::Halt),
        '!' => Err(SyntaxError::new(at + 1, format!("`{}`", &body[1..]), &["`;`", "end of input"])),
        '#' => {
            let digits = &body[1..];
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(SyntaxError::new(at + 1, format!("`{digits}`"), &["jump distance"]));
            }
            digits
                .parse()
                .map(Instruction::Jump)
                .map_err(|_| SyntaxError::new(at + 1, format!("`{digits}`"), &["jump distance"]))
        }
        '+' | '-' => {
            let rest = &body[1..];
            let prop = if let Some(inner) = rest.strip_prefix('(') {
                let close = matching_paren(inner).ok_or_else(|| {
                    SyntaxError::new(at + body.len(), "end of instruction", &["`)`"])
                })?;
                if close + 1 != inner.len() {
                    return Err(SyntaxError::new(
                        at + 2 + close + 1,
                        format!("`{}`", &inner[close + 1..]),
                        &["`;`", "end of input"],
                    ));
                }
                crate::prop::parse::parse_prop_at(&inner[..close], at + 2)?
            } else if is_identifier(rest) {
                Prop::Atom(Atom::new(rest).expect("checked identifier"))
            } else {
                return Err(SyntaxError::new(
                    at + 1,
                    format!("`{rest}`"),
                    &["identifier", "`(`"],
                ));
            };
            Ok(if first == '+' { Instruction::PosTest(prop) } else { Instruction::NegTest(prop) })
        }
        _ if is_identifier(body) => Ok(Instruction::Basic(Atom::new(body).expect("checked identifier"))),
        _ => Err(SyntaxError::new(at, format!("`{body}`"), INSTRUCTION_START)),
    }
}

/// Byte index in `s` of the `)` closing an already-consumed `(`.
fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 1usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}
