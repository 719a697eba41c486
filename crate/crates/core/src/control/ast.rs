use std::collections::BTreeSet;

use crate::data::Pred;
use crate::diag::Span;

/// An ASTD: automata and the process-algebra operators used to compose them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AstdNode {
    Elem,
    Automaton(Automaton),
    Kleene(Box<AstdNode>),
    Quant(Quant),
}

impl AstdNode {
    pub fn is_elem(&self) -> bool {
        matches!(self, AstdNode::Elem)
    }

    /// Every automaton in the tree, outermost first.
    pub fn automata(&self) -> Vec<&Automaton> {
        let mut out = Vec::new();
        self.collect_automata(&mut out);
        out
    }

    fn collect_automata<'a>(&'a self, out: &mut Vec<&'a Automaton>) {
        match self {
            AstdNode::Elem => {}
            AstdNode::Automaton(a) => {
                out.push(a);
                for (_, n) in &a.states {
                    n.collect_automata(out);
                }
            }
            AstdNode::Kleene(b) => b.collect_automata(out),
            AstdNode::Quant(q) => q.body.collect_automata(out),
        }
    }

    /// Labels appearing on some transition of the tree.
    pub fn labels(&self) -> BTreeSet<String> {
        self.automata()
            .into_iter()
            .flat_map(|a| a.transitions.iter().map(|t| t.event.label.clone()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automaton {
    pub name: String,
    /// States in declaration order; each state is itself an ASTD.
    pub states: Vec<(String, AstdNode)>,
    pub init: String,
    pub finals: BTreeSet<String>,
    pub transitions: Vec<Transition>,
    pub span: Span,
}

impl Automaton {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|(n, _)| n == name)
    }

    pub fn state_node(&self, name: &str) -> Option<&AstdNode> {
        self.states.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn init_index(&self) -> Option<usize> {
        self.state_index(&self.init)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Arrow {
    /// Between two states of the same automaton.
    Loc { from: String, to: String },
    /// From a state into a substate of the automaton held by `to`.
    ToSub {
        from: String,
        to: String,
        to_sub: String,
    },
    /// From a substate of the automaton held by `from` to a state.
    FromSub {
        from: String,
        from_sub: String,
        to: String,
    },
}

impl Arrow {
    pub fn source(&self) -> &str {
        match self {
            Arrow::Loc { from, .. } | Arrow::ToSub { from, .. } | Arrow::FromSub { from, .. } => from,
        }
    }

    pub fn target(&self) -> &str {
        match self {
            Arrow::Loc { to, .. } | Arrow::ToSub { to, .. } | Arrow::FromSub { to, .. } => to,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArgPattern {
    /// A quantification variable in scope.
    Var(String),
    /// A literal atom.
    Atom(String),
}

impl ArgPattern {
    pub fn name(&self) -> &str {
        match self {
            ArgPattern::Var(n) | ArgPattern::Atom(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventPattern {
    pub label: String,
    pub args: Vec<ArgPattern>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub arrow: Arrow,
    pub event: EventPattern,
    pub guard: Pred,
    pub final_flag: bool,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantKind {
    Interleave,
    Sync,
    WeakSync,
}

/// Quantified interleaving, synchronisation or weak synchronisation over a
/// finite sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quant {
    pub kind: QuantKind,
    pub var: String,
    pub domain: String,
    pub sync_labels: BTreeSet<String>,
    /// Instances for which this holds must take part in synchronised events.
    pub sync_pred: Pred,
    pub body: Box<AstdNode>,
    pub span: Span,
}
