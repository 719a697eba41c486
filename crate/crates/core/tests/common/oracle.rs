//! Hand-written models of levels 1 and 2 for two trains on four tracks,
//! explored without the engine. Tracks are 0..4 in line order.

use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

const TRACKS: u8 = 4;

/// Per-train control of level 1: idle, running before the first movement,
/// running after a movement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum C1 {
    Idle,
    Fresh,
    Moved,
}

type S1 = [(C1, Option<u8>); 2];

fn l1_successors(s: &S1) -> Vec<(String, S1)> {
    let mut out = Vec::new();
    for t in 0..2 {
        let o = 1 - t;
        let (c, pos) = s[t];
        let other = s[o].1;
        let name = |l: &str| format!("{l}(t{})", t + 1);
        match (c, pos) {
            (C1::Idle, None) => {
                for pp in 0..TRACKS {
                    if other != Some(pp) {
                        let mut n = *s;
                        n[t] = (C1::Fresh, Some(pp));
                        out.push((name("start"), n));
                    }
                }
            }
            (C1::Fresh | C1::Moved, Some(p)) => {
                for pp in p..TRACKS {
                    let clear = match other {
                        Some(q) => pp != q && (p >= q || pp < q),
                        None => true,
                    };
                    if clear {
                        let mut n = *s;
                        n[t] = (C1::Moved, Some(pp));
                        out.push((name("movement"), n));
                    }
                }
                let mut n = *s;
                n[t] = (C1::Idle, None);
                out.push((name("stop"), n));
            }
            _ => unreachable!("control and position disagree"),
        }
    }
    out
}

/// Per-train control of level 2: idle, started without a limit, then the
/// closure of movement/limit pairs (fresh, moved, limit computed).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum C2 {
    Idle,
    Started,
    Fresh,
    Moved,
    Limited,
}

type S2 = [(C2, Option<u8>, Option<u8>); 2];

fn l2_successors(s: &S2) -> Vec<(String, S2)> {
    let mut out = Vec::new();
    for t in 0..2 {
        let o = 1 - t;
        let (c, pos, mal) = s[t];
        let (opos, omal) = (s[o].1, s[o].2);
        let name = |l: &str| format!("{l}(t{})", t + 1);
        // compute_l: any limit ahead of the train and behind the one in front.
        let limits = |p: u8| (p..TRACKS).filter(move |&mm| opos.is_none_or(|q| p >= q || mm < q));
        match c {
            C2::Idle => {
                for pp in 0..TRACKS {
                    let free = opos != Some(pp);
                    let covered = match (opos, omal) {
                        (Some(q), Some(m)) => q < pp && m >= pp,
                        _ => false,
                    };
                    if pos.is_none() && free && !covered {
                        let mut n = *s;
                        n[t] = (C2::Started, Some(pp), mal);
                        out.push((name("start"), n));
                    }
                }
            }
            C2::Started | C2::Moved => {
                let p = pos.expect("started");
                for mm in limits(p) {
                    let mut n = *s;
                    n[t] = (if c == C2::Started { C2::Fresh } else { C2::Limited }, pos, Some(mm));
                    out.push((name("compute_l"), n));
                }
            }
            _ => {}
        }
        if matches!(c, C2::Fresh | C2::Limited) {
            let (p, m) = (pos.expect("started"), mal.expect("limited"));
            for pp in p..=m {
                let mut n = *s;
                n[t] = (C2::Moved, Some(pp), mal);
                out.push((name("movement"), n));
            }
            let mut n = *s;
            n[t] = (C2::Idle, None, None);
            out.push((name("stop"), n));
        }
    }
    out
}

fn bfs<S: Clone + Eq + Hash>(init: S, succ: impl Fn(&S) -> Vec<(String, S)>) -> (usize, usize) {
    let mut seen: HashSet<S> = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([init]);
    let mut edges = 0;
    while let Some(s) = queue.pop_front() {
        let mut here: HashSet<(String, S)> = HashSet::new();
        for (l, n) in succ(&s) {
            if seen.insert(n.clone()) {
                queue.push_back(n.clone());
            }
            here.insert((l, n));
        }
        edges += here.len();
    }
    (seen.len(), edges)
}

/// Reachable states and distinct transitions of level 1.
pub fn l1_counts() -> (usize, usize) {
    bfs([(C1::Idle, None); 2], l1_successors)
}

/// Reachable states and distinct transitions of level 2.
pub fn l2_counts() -> (usize, usize) {
    bfs([(C2::Idle, None, None); 2], l2_successors)
}
