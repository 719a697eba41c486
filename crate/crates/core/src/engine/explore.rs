use std::collections::HashMap;

use rayon::prelude::*;

use super::{CombinedState, EngineError, Refusal, System};
use crate::control::Event;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_depth: usize,
    /// Expand each BFS layer on the rayon pool. The result is the same
    /// either way.
    pub parallel: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_states: 1_000_000,
            max_depth: usize::MAX,
            parallel: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    /// Index into [`Lts::alphabet`].
    pub event: usize,
    pub to: usize,
}

/// An explored state space. State indices follow BFS discovery order, with
/// events tried in alphabet order and successors in sorted order.
#[derive(Clone, Debug)]
pub struct Lts {
    pub states: Vec<CombinedState>,
    pub initial: usize,
    pub alphabet: Vec<Event>,
    pub edges: Vec<Edge>,
    /// Events accepted by the control layer but refused by the data layer.
    pub refusals: Vec<(usize, usize, Refusal)>,
    /// BFS tree: the edge by which each state was first reached.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Set when a bound stopped the exploration early.
    pub truncated: bool,
}

impl Lts {
    /// Shortest event sequence from the initial state to `state`.
    pub fn trace_to(&self, mut state: usize) -> Vec<Event> {
        let mut out = Vec::new();
        while let Some((p, e)) = self.parent[state] {
            out.push(self.alphabet[e].clone());
            state = p;
        }
        out.reverse();
        out
    }

    pub fn outgoing(&self) -> Vec<Vec<&Edge>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for e in &self.edges {
            out[e.from].push(e);
        }
        out
    }

    pub fn index_of(&self, state: &CombinedState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }
}

type Expansion = Vec<(usize, Result<super::StepResult, EngineError>)>;

/// Breadth-first closure of the initial state over the ground alphabet.
pub fn explore(sys: &System, bounds: Bounds) -> Result<Lts, EngineError> {
    let init = sys.initial()?;
    let alphabet = sys.alphabet().to_vec();
    let mut lts = Lts {
        states: vec![init.clone()],
        initial: 0,
        alphabet,
        edges: Vec::new(),
        refusals: Vec::new(),
        parent: vec![None],
        truncated: false,
    };
    let mut index: HashMap<CombinedState, usize> = HashMap::from([(init, 0)]);
    let mut frontier = vec![0usize];
    let mut depth = 0usize;
    while !frontier.is_empty() {
        let expand = |&s: &usize| -> Expansion {
            lts.alphabet
                .iter()
                .enumerate()
                .map(|(ei, e)| (ei, sys.combined_step(&lts.states[s], e)))
                .collect()
        };
        let layer: Vec<Expansion> = if bounds.parallel {
            frontier.par_iter().map(expand).collect()
        } else {
            frontier.iter().map(expand).collect()
        };
        let mut next = Vec::new();
        for (&s, results) in frontier.iter().zip(layer) {
            for (ei, r) in results {
                let r = r?;
                if let Some(refusal) = r.refusal {
                    if refusal != Refusal::Control {
                        lts.refusals.push((s, ei, refusal));
                    }
                    continue;
                }
                if depth >= bounds.max_depth {
                    lts.truncated = true;
                    continue;
                }
                for succ in r.successors {
                    let to = match index.get(&succ) {
                        Some(&i) => i,
                        None => {
                            if lts.states.len() >= bounds.max_states {
                                lts.truncated = true;
                                continue;
                            }
                            let i = lts.states.len();
                            index.insert(succ.clone(), i);
                            lts.states.push(succ);
                            lts.parent.push(Some((s, ei)));
                            next.push(i);
                            i
                        }
                    };
                    lts.edges.push(Edge { from: s, event: ei, to });
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(lts)
}
