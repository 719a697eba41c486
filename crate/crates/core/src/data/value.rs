use std::collections::BTreeSet;
use std::fmt;

use super::universe::Universe;

/// An element of an enumerated sort. Ordered by sort, then declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub sort: u32,
    pub index: u32,
}

/// Runtime values of the data layer.
///
/// Relations and partial functions are sets of pairs; single-valuedness of
/// function-typed variables is enforced by their declared type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Atom(Atom),
    Pair(Box<Value>, Box<Value>),
    Set(BTreeSet<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn empty_set() -> Value {
        Value::Set(BTreeSet::new())
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<Atom> {
        match self {
            Value::Atom(a) => Some(*a),
            _ => None,
        }
    }

    /// Images of `arg` when `self` is read as a relation.
    pub fn images<'a>(&'a self, arg: &'a Value) -> impl Iterator<Item = &'a Value> + 'a {
        self.as_set().into_iter().flatten().filter_map(move |p| match p {
            Value::Pair(a, b) if **a == *arg => Some(&**b),
            _ => None,
        })
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> ValueDisplay<'a> {
        ValueDisplay {
            value: self,
            universe,
        }
    }
}

pub struct ValueDisplay<'a> {
    value: &'a Value,
    universe: &'a Universe,
}

impl fmt::Display for ValueDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
            Value::Atom(a) => f.write_str(self.universe.atom_name(*a)),
            Value::Pair(a, b) => {
                write!(f, "{} |-> ", a.display(self.universe))?;
                if matches!(**b, Value::Pair(..)) {
                    write!(f, "({})", b.display(self.universe))
                } else {
                    write!(f, "{}", b.display(self.universe))
                }
            }
            Value::Set(s) => {
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", v.display(self.universe))?;
                }
                f.write_str("}")
            }
        }
    }
}
