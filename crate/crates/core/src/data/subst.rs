use std::collections::BTreeSet;

use super::ast::{EventDef, Pred, Subst};
use super::eval::{DataState, Env, EvalCtx};
use super::value::Value;
use super::EvalError;

/// A location written by a substitution: a whole variable or one point of
/// a function-valued variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Loc {
    Var(usize),
    Point(usize, Value),
}

impl Loc {
    fn var(&self) -> usize {
        match self {
            Loc::Var(v) | Loc::Point(v, _) => *v,
        }
    }

    fn clashes(&self, other: &Loc) -> bool {
        match (self, other) {
            (Loc::Point(a, p), Loc::Point(b, q)) => a == b && p == q,
            _ => self.var() == other.var(),
        }
    }
}

/// One outcome of a substitution as the set of locations it assigns.
pub(crate) type Writes = Vec<(Loc, Value)>;

/// Cartesian combination of the outcomes of parallel branches.
pub(crate) fn merge_parallel(
    ctx: &EvalCtx<'_>,
    branches: Vec<Vec<Writes>>,
) -> Result<Vec<Writes>, EvalError> {
    let mut acc: Vec<Writes> = vec![Vec::new()];
    for branch in branches {
        let mut next = Vec::with_capacity(acc.len() * branch.len());
        for left in &acc {
            for right in &branch {
                if let Some((l, _)) = right
                    .iter()
                    .find(|(r, _)| left.iter().any(|(l, _)| l.clashes(r)))
                {
                    return Err(EvalError::WriteConflict(ctx.schema.name(l.var()).to_string()));
                }
                let mut w = left.clone();
                w.extend(right.iter().cloned());
                next.push(w);
            }
        }
        acc = next;
    }
    Ok(acc)
}

impl EvalCtx<'_> {
    /// All after-states of `s` from `pre`. An empty result means the
    /// substitution is infeasible from `pre`.
    pub fn apply_subst(
        &self,
        s: &Subst,
        pre: &DataState,
        env: &mut Env,
    ) -> Result<BTreeSet<DataState>, EvalError> {
        self.subst_writes(s, pre, env)?
            .into_iter()
            .map(|w| self.commit(pre, w))
            .collect()
    }

    pub(crate) fn subst_writes(
        &self,
        s: &Subst,
        pre: &DataState,
        env: &mut Env,
    ) -> Result<Vec<Writes>, EvalError> {
        match s {
            Subst::Skip => Ok(vec![Vec::new()]),
            Subst::Assign(x, e) => {
                let i = self.var_index(x)?;
                let v = self.eval_expr(e, pre, None, env)?;
                Ok(vec![vec![(Loc::Var(i), v)]])
            }
            Subst::AssignAt(f, at, e) => {
                let i = self.var_index(f)?;
                let at = self.eval_expr(at, pre, None, env)?;
                let v = self.eval_expr(e, pre, None, env)?;
                Ok(vec![vec![(Loc::Point(i, at), v)]])
            }
            Subst::Such(x, p) => self.such_writes(x, p, pre, env),
            Subst::Parallel(ss) => {
                let mut branches = Vec::with_capacity(ss.len());
                for b in ss {
                    branches.push(self.subst_writes(b, pre, env)?);
                }
                merge_parallel(self, branches)
            }
            Subst::Select(branches) => {
                let mut out = Vec::new();
                for (g, b) in branches {
                    if self.eval_pred(g, pre, None, env)? {
                        out.extend(self.subst_writes(b, pre, env)?);
                    }
                }
                Ok(out)
            }
        }
    }

    /// `x :| (P)`: every well-typed candidate for `x` making `P` true.
    pub(crate) fn such_writes(
        &self,
        x: &str,
        p: &Pred,
        pre: &DataState,
        env: &mut Env,
    ) -> Result<Vec<Writes>, EvalError> {
        let i = self.var_index(x)?;
        let candidates = self.schema.ty(i).enumerate(self.universe)?;
        let mut post = pre.clone();
        let mut out = Vec::new();
        for w in candidates {
            post.0[i] = w;
            if self.eval_pred(p, pre, Some(&post), env)? {
                out.push(vec![(Loc::Var(i), post.0[i].clone())]);
            }
        }
        Ok(out)
    }

    pub(crate) fn commit(&self, pre: &DataState, mut writes: Writes) -> Result<DataState, EvalError> {
        writes.sort_by(|a, b| {
            let rank = |l: &Loc| matches!(l, Loc::Point(..));
            rank(&a.0).cmp(&rank(&b.0))
        });
        let mut post = pre.clone();
        let mut touched = BTreeSet::new();
        for (loc, v) in writes {
            touched.insert(loc.var());
            match loc {
                Loc::Var(i) => post.0[i] = v,
                Loc::Point(i, at) => match &mut post.0[i] {
                    Value::Set(s) => {
                        s.retain(|p| !matches!(p, Value::Pair(a, _) if **a == at));
                        s.insert(Value::pair(at, v));
                    }
                    other => {
                        return Err(EvalError::Type(format!(
                            "pointwise assignment to non-function `{}` = {}",
                            self.schema.name(i),
                            self.show(other)
                        )))
                    }
                },
            }
        }
        for i in touched {
            if !self.schema.ty(i).contains(&post.0[i], self.universe) {
                return Err(EvalError::Typing {
                    var: self.schema.name(i).to_string(),
                    value: self.show(&post.0[i]),
                });
            }
        }
        Ok(post)
    }

    fn var_index(&self, x: &str) -> Result<usize, EvalError> {
        self.schema
            .index_of(x)
            .ok_or_else(|| EvalError::Unbound(x.to_string()))
    }

    fn event_env(&self, e: &EventDef, args: &[Value]) -> Result<Env, EvalError> {
        if args.len() != e.params.len() {
            return Err(EvalError::Arity {
                label: e.label.clone(),
                expected: e.params.len(),
                got: args.len(),
            });
        }
        let mut env = Env::new();
        for (p, a) in e.params.iter().zip(args) {
            env.bind(p.name.clone(), a.clone());
        }
        Ok(env)
    }

    pub fn event_enabled(
        &self,
        e: &EventDef,
        args: &[Value],
        pre: &DataState,
    ) -> Result<bool, EvalError> {
        let mut env = self.event_env(e, args)?;
        self.eval_pred(&e.guard, pre, None, &mut env)
    }

    /// Fires an enabled event; firing a disabled event is an error.
    pub fn event_fire(
        &self,
        e: &EventDef,
        args: &[Value],
        pre: &DataState,
    ) -> Result<BTreeSet<DataState>, EvalError> {
        let mut env = self.event_env(e, args)?;
        if !self.eval_pred(&e.guard, pre, None, &mut env)? {
            return Err(EvalError::Disabled(e.label.clone()));
        }
        self.apply_subst(&e.action, pre, &mut env)
    }
}
