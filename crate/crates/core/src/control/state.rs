use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::AstdNode;

/// Runtime state of an ASTD, shaped like its [`AstdNode`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControlState {
    Elem,
    /// Current state (index into the automaton's states) and its substate.
    Aut { current: usize, sub: Box<ControlState> },
    Kleene { started: bool, sub: Box<ControlState> },
    /// One state per element of the quantification domain, in sort order.
    Quant(Vec<ControlState>),
}

impl ControlState {
    pub fn aut(current: usize, sub: ControlState) -> Self {
        ControlState::Aut {
            current,
            sub: Box::new(sub),
        }
    }

    pub fn kleene(started: bool, sub: ControlState) -> Self {
        ControlState::Kleene {
            started,
            sub: Box::new(sub),
        }
    }

    /// True when the state has the structure `node` prescribes.
    pub fn matches_shape(&self, node: &AstdNode, domain_len: &dyn Fn(&str) -> usize) -> bool {
        match (node, self) {
            (AstdNode::Elem, ControlState::Elem) => true,
            (AstdNode::Automaton(a), ControlState::Aut { current, sub }) => a
                .states
                .get(*current)
                .is_some_and(|(_, n)| sub.matches_shape(n, domain_len)),
            (AstdNode::Kleene(b), ControlState::Kleene { sub, .. }) => {
                sub.matches_shape(b, domain_len)
            }
            (AstdNode::Quant(q), ControlState::Quant(f)) => {
                f.len() == domain_len(&q.domain)
                    && f.iter().all(|s| s.matches_shape(&q.body, domain_len))
            }
            _ => false,
        }
    }

    /// Compact rendering such as `S1@1.2[*S2@2.2]`.
    pub fn describe(&self, node: &AstdNode, domain: &dyn Fn(&str) -> Vec<String>) -> String {
        match (node, self) {
            (AstdNode::Elem, _) => String::new(),
            (AstdNode::Automaton(a), ControlState::Aut { current, sub }) => {
                let (name, n) = &a.states[*current];
                let inner = sub.describe(n, domain);
                if inner.is_empty() {
                    format!("{}@{}", a.name, name)
                } else {
                    format!("{}@{}[{}]", a.name, name, inner)
                }
            }
            (AstdNode::Kleene(b), ControlState::Kleene { started, sub }) => {
                format!("{}{}", if *started { "*" } else { "*0 " }, sub.describe(b, domain))
            }
            (AstdNode::Quant(q), ControlState::Quant(f)) => {
                let names = domain(&q.domain);
                let parts: Vec<String> = f
                    .iter()
                    .zip(names)
                    .map(|(s, n)| format!("{n}: {}", s.describe(&q.body, domain)))
                    .collect();
                format!("{{{}}}", parts.join(", "))
            }
            _ => "<shape mismatch>".to_string(),
        }
    }
}

/// A ground event: a label applied to atom names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    pub label: String,
    pub args: Vec<String>,
}

impl Event {
    pub fn new(label: impl Into<String>, args: &[&str]) -> Self {
        Event {
            label: label.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Parses `label`, `label()` or `label(a, b)`.
    pub fn parse(text: &str) -> Result<Event, String> {
        let text = text.trim();
        let (label, rest) = match text.find('(') {
            Some(i) => (&text[..i], Some(&text[i + 1..])),
            None => (text, None),
        };
        let label = label.trim();
        let valid = |s: &str| {
            !s.is_empty()
                && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !s.starts_with(|c: char| c.is_ascii_digit())
        };
        if !valid(label) {
            return Err(format!("malformed event `{text}`"));
        }
        let args = match rest {
            None => Vec::new(),
            Some(rest) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| format!("malformed event `{text}`: missing `)`"))?;
                if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
                    if !args.iter().all(|a| valid(a)) {
                        return Err(format!("malformed event `{text}`"));
                    }
                    args
                }
            }
        };
        Ok(Event {
            label: label.to_string(),
            args,
        })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.label)
        } else {
            write!(f, "{}({})", self.label, self.args.join(", "))
        }
    }
}
