use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::control::Event;
use crate::engine::Lts;

/// A labelled graph where `None` marks an internal step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub states: usize,
    pub initial: usize,
    pub edges: Vec<(usize, Option<Event>, usize)>,
}

impl Graph {
    pub fn from_lts(lts: &Lts) -> Graph {
        Graph {
            states: lts.states.len(),
            initial: lts.initial,
            edges: lts
                .edges
                .iter()
                .map(|e| (e.from, Some(lts.alphabet[e.event].clone()), e.to))
                .collect(),
        }
    }

    /// Turns every edge whose label is in `labels` into an internal step.
    pub fn hide(&self, labels: &BTreeSet<String>) -> Graph {
        self.relabel(|e| if labels.contains(&e.label) { None } else { Some(e.clone()) })
    }

    pub fn relabel(&self, f: impl Fn(&Event) -> Option<Event>) -> Graph {
        Graph {
            edges: self
                .edges
                .iter()
                .map(|(a, l, b)| (*a, l.as_ref().and_then(&f), *b))
                .collect(),
            ..self.clone()
        }
    }

    /// Visible events occurring anywhere in the graph.
    pub fn visible_alphabet(&self) -> BTreeSet<Event> {
        self.edges.iter().filter_map(|(_, l, _)| l.clone()).collect()
    }
}

/// Adjacency with interned labels; label 0 is the internal step.
struct Indexed {
    initial: usize,
    succ: Vec<Vec<(u32, usize)>>,
}

fn index(g: &Graph, labels: &mut HashMap<Event, u32>, names: &mut Vec<Event>) -> Indexed {
    let mut succ = vec![Vec::new(); g.states];
    for (a, l, b) in &g.edges {
        let id = match l {
            None => 0,
            Some(e) => *labels.entry(e.clone()).or_insert_with(|| {
                names.push(e.clone());
                names.len() as u32
            }),
        };
        succ[*a].push((id, *b));
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }
    Indexed {
        initial: g.initial,
        succ,
    }
}

impl Indexed {
    fn closure(&self, seed: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut stack: Vec<usize> = Vec::new();
        for s in seed {
            if seen.insert(s) {
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for &(l, t) in &self.succ[s] {
                if l == 0 && seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Visible moves of a closed set, grouped by label, each target set closed.
    fn moves(&self, set: &[usize]) -> BTreeMap<u32, Vec<usize>> {
        let mut raw: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
        for &s in set {
            for &(l, t) in &self.succ[s] {
                if l != 0 {
                    raw.entry(l).or_default().insert(t);
                }
            }
        }
        raw.into_iter()
            .map(|(l, ts)| (l, self.closure(ts)))
            .collect()
    }
}

/// Shortest visible trace of `small` that `big` cannot perform, or `None`
/// when the visible language of `small` is included in that of `big`.
///
/// Both graphs are determinized on the fly, so the answer is exact.
pub fn find_unmatched_trace(small: &Graph, big: &Graph) -> Option<Vec<Event>> {
    let mut labels = HashMap::new();
    let mut names = Vec::new();
    let a = index(small, &mut labels, &mut names);
    let b = index(big, &mut labels, &mut names);
    let start = (a.closure([a.initial]), b.closure([b.initial]));
    let mut seen: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    // Per discovered pair: how it was reached (parent pair, label).
    let mut back: Vec<Option<(usize, u32)>> = vec![None];
    seen.insert(start.clone(), 0);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let path = |mut i: usize, last: u32, back: &[Option<(usize, u32)>]| {
        let mut out = vec![names[last as usize - 1].clone()];
        while let Some((p, l)) = back[i] {
            out.push(names[l as usize - 1].clone());
            i = p;
        }
        out.reverse();
        out
    };
    while let Some(((sa, sb), i)) = queue.pop_front() {
        let mb = b.moves(&sb);
        for (l, ta) in a.moves(&sa) {
            let Some(tb) = mb.get(&l) else {
                return Some(path(i, l, &back));
            };
            let key = (ta, tb.clone());
            if !seen.contains_key(&key) {
                let j = back.len();
                back.push(Some((i, l)));
                seen.insert(key.clone(), j);
                queue.push_back((key, j));
            }
        }
    }
    None
}

/// Every visible trace of length at most `depth`, for bounded comparisons
/// and tests.
pub fn traces_up_to(g: &Graph, depth: usize) -> BTreeSet<Vec<Event>> {
    let mut labels = HashMap::new();
    let mut names = Vec::new();
    let ix = index(g, &mut labels, &mut names);
    let mut out = BTreeSet::from([Vec::new()]);
    let mut layer = vec![(ix.closure([ix.initial]), Vec::new())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (set, trace) in &layer {
            for (l, t) in ix.moves(set) {
                let mut tr: Vec<Event> = trace.clone();
                tr.push(names[l as usize - 1].clone());
                if out.insert(tr.clone()) {
                    next.push((t, tr));
                }
            }
        }
        layer = next;
    }
    out
}
