use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// Name of a propositional atom / basic action. Matches `[a-z][a-zA-Z0-9_]*`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    /// Builds an atom, returning `None` if `name` is not a valid identifier.
    pub fn new(name: &str) -> Option<Atom> {
        if is_identifier(name) {
            Some(Atom(Arc::from(name)))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Panicking constructor for literals in code and tests.
pub fn atom(name: &str) -> Atom {
    Atom::new(name).unwrap_or_else(|| panic!("invalid atom name {name:?}"))
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers() {
        assert!(is_identifier("a"));
        assert!(is_identifier("a0_Bc"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("T"));
        assert!(!is_identifier("0a"));
        assert!(!is_identifier("a-b"));
    }
}
