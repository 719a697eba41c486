use std::collections::BTreeSet;

use super::ast::Type;
use super::universe::Universe;
use super::value::Value;
use super::EvalError;

/// Largest candidate space `:|` is allowed to enumerate.
pub const MAX_CANDIDATES: u128 = 1 << 18;

impl Type {
    /// Number of values inhabiting the type, saturating.
    pub fn cardinality(&self, universe: &Universe) -> Result<u128, EvalError> {
        let card = match self {
            Type::Bool => 2,
            Type::Sort(s) => universe
                .atoms_of(s)
                .ok_or_else(|| EvalError::Unbound(s.clone()))?
                .len() as u128,
            Type::Prod(a, b) => a.cardinality(universe)?.saturating_mul(b.cardinality(universe)?),
            Type::Pow(t) => pow2(t.cardinality(universe)?),
            Type::Rel(a, b) => pow2(a.cardinality(universe)?.saturating_mul(b.cardinality(universe)?)),
            Type::PFun(a, b) => saturating_pow(b.cardinality(universe)? + 1, a.cardinality(universe)?),
            Type::TFun(a, b) => saturating_pow(b.cardinality(universe)?, a.cardinality(universe)?),
        };
        Ok(card)
    }

    pub fn contains(&self, v: &Value, universe: &Universe) -> bool {
        match (self, v) {
            (Type::Bool, Value::Bool(_)) => true,
            (Type::Sort(s), Value::Atom(a)) => universe.sort_id(s) == Some(a.sort),
            (Type::Prod(ta, tb), Value::Pair(a, b)) => {
                ta.contains(a, universe) && tb.contains(b, universe)
            }
            (Type::Pow(t), Value::Set(s)) => s.iter().all(|e| t.contains(e, universe)),
            (Type::Rel(ta, tb), Value::Set(s)) => s.iter().all(|e| pair_in(e, ta, tb, universe)),
            (Type::PFun(ta, tb), Value::Set(s)) => {
                s.iter().all(|e| pair_in(e, ta, tb, universe)) && is_functional(s)
            }
            (Type::TFun(ta, tb), Value::Set(s)) => {
                if !(s.iter().all(|e| pair_in(e, ta, tb, universe)) && is_functional(s)) {
                    return false;
                }
                match ta.cardinality(universe) {
                    Ok(n) => s.len() as u128 == n,
                    Err(_) => false,
                }
            }
            _ => false,
        }
    }

    /// All inhabitants in a deterministic order.
    pub fn enumerate(&self, universe: &Universe) -> Result<Vec<Value>, EvalError> {
        let card = self.cardinality(universe)?;
        if card > MAX_CANDIDATES {
            return Err(EvalError::TooLarge(format!("{card} values")));
        }
        Ok(self.enumerate_unchecked(universe))
    }

    fn enumerate_unchecked(&self, universe: &Universe) -> Vec<Value> {
        match self {
            Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Type::Sort(s) => universe
                .atoms_of(s)
                .unwrap_or_default()
                .into_iter()
                .map(Value::Atom)
                .collect(),
            Type::Prod(a, b) => {
                let bs = b.enumerate_unchecked(universe);
                a.enumerate_unchecked(universe)
                    .into_iter()
                    .flat_map(|x| bs.iter().map(move |y| Value::pair(x.clone(), y.clone())))
                    .collect()
            }
            Type::Pow(t) => subsets(&t.enumerate_unchecked(universe)),
            Type::Rel(a, b) => {
                subsets(&Type::Prod(a.clone(), b.clone()).enumerate_unchecked(universe))
            }
            Type::PFun(a, b) | Type::TFun(a, b) => {
                let total = matches!(self, Type::TFun(..));
                let dom = a.enumerate_unchecked(universe);
                let ran = b.enumerate_unchecked(universe);
                let mut out = vec![BTreeSet::new()];
                for x in &dom {
                    let mut next = Vec::new();
                    for partial in &out {
                        if !total {
                            next.push(partial.clone());
                        }
                        for y in &ran {
                            let mut p = partial.clone();
                            p.insert(Value::pair(x.clone(), y.clone()));
                            next.push(p);
                        }
                    }
                    out = next;
                }
                out.into_iter().map(Value::Set).collect()
            }
        }
    }
}

fn pair_in(v: &Value, ta: &Type, tb: &Type, universe: &Universe) -> bool {
    match v {
        Value::Pair(a, b) => ta.contains(a, universe) && tb.contains(b, universe),
        _ => false,
    }
}

pub(crate) fn is_functional(s: &BTreeSet<Value>) -> bool {
    let mut prev: Option<&Value> = None;
    for e in s {
        if let Value::Pair(a, _) = e {
            if prev == Some(&**a) {
                return false;
            }
            prev = Some(a);
        }
    }
    true
}

fn subsets(elems: &[Value]) -> Vec<Value> {
    let mut out = vec![BTreeSet::new()];
    for e in elems {
        let with: Vec<_> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.insert(e.clone());
                s
            })
            .collect();
        out.extend(with);
    }
    out.into_iter().map(Value::Set).collect()
}

fn pow2(n: u128) -> u128 {
    if n >= 127 {
        u128::MAX
    } else {
        1 << n
    }
}

fn saturating_pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp.min(128) {
        acc = acc.saturating_mul(base);
    }
    acc
}
