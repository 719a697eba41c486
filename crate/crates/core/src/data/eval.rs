use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};

use super::ast::{CmpOp, Expr, Pred, SetOp, Type};
use super::universe::Universe;
use super::value::Value;
use super::EvalError;

/// Declared state variables, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Schema {
    vars: Vec<(String, Type)>,
    index: HashMap<String, usize>,
}

impl Schema {
    pub fn new(vars: Vec<(String, Type)>) -> Self {
        let index = vars
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect();
        Schema { vars, index }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].0
    }

    pub fn ty(&self, i: usize) -> &Type {
        &self.vars[i].1
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Type)> {
        self.vars.iter().map(|(n, t)| (n.as_str(), t))
    }
}

/// Valuation of the state variables, indexed like the [`Schema`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataState(pub Vec<Value>);

impl DataState {
    pub fn get(&self, i: usize) -> &Value {
        &self.0[i]
    }
}

/// Name bindings for quantifiers, event parameters and ASTD quantification
/// variables. Later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Env {
    binds: Vec<(String, Value)>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) {
        self.binds.push((name.into(), value));
    }

    pub fn with(&self, name: impl Into<String>, value: Value) -> Env {
        let mut e = self.clone();
        e.bind(name, value);
        e
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.binds.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.binds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.binds.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.binds.truncate(len);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.binds.iter().map(|(n, v)| (n.as_str(), v))
    }
}

/// Evaluation context: carrier sets, variable layout and constant values.
#[derive(Clone, Copy)]
pub struct EvalCtx<'a> {
    pub universe: &'a Universe,
    pub schema: &'a Schema,
    pub constants: &'a HashMap<String, Value>,
}

#[derive(Clone, Copy)]
struct Frame<'s> {
    pre: &'s DataState,
    post: Option<&'s DataState>,
}

impl<'a> EvalCtx<'a> {
    pub fn new(
        universe: &'a Universe,
        schema: &'a Schema,
        constants: &'a HashMap<String, Value>,
    ) -> Self {
        EvalCtx {
            universe,
            schema,
            constants,
        }
    }

    /// Evaluates a predicate. `post` must be supplied when `p` mentions
    /// primed variables.
    pub fn eval_pred(
        &self,
        p: &Pred,
        pre: &DataState,
        post: Option<&DataState>,
        env: &mut Env,
    ) -> Result<bool, EvalError> {
        self.pred(p, Frame { pre, post }, env)
    }

    pub fn eval_expr(
        &self,
        e: &Expr,
        pre: &DataState,
        post: Option<&DataState>,
        env: &Env,
    ) -> Result<Value, EvalError> {
        self.expr(e, Frame { pre, post }, env).map(Cow::into_owned)
    }

    pub fn show(&self, v: &Value) -> String {
        v.display(self.universe).to_string()
    }

    fn pred(&self, p: &Pred, fr: Frame<'_>, env: &mut Env) -> Result<bool, EvalError> {
        match p {
            Pred::True => Ok(true),
            Pred::False => Ok(false),
            Pred::Not(q) => Ok(!self.pred(q, fr, env)?),
            Pred::And(a, b) => Ok(self.pred(a, fr, env)? && self.pred(b, fr, env)?),
            Pred::Or(a, b) => Ok(self.pred(a, fr, env)? || self.pred(b, fr, env)?),
            Pred::Implies(a, b) => Ok(!self.pred(a, fr, env)? || self.pred(b, fr, env)?),
            Pred::Cmp(op, a, b) => self.compare(*op, a, b, fr, env),
            Pred::Forall(x, bound, body) | Pred::Exists(x, bound, body) => {
                let universal = matches!(p, Pred::Forall(..));
                let elems = match self.expr(bound, fr, env)?.into_owned() {
                    Value::Set(s) => s,
                    other => {
                        return Err(EvalError::Type(format!(
                            "quantifier bound for `{x}` is not a set: {}",
                            self.show(&other)
                        )))
                    }
                };
                let mark = env.len();
                for v in elems {
                    env.bind(x.clone(), v);
                    let r = self.pred(body, fr, env);
                    env.truncate(mark);
                    let holds = r?;
                    if universal && !holds {
                        return Ok(false);
                    }
                    if !universal && holds {
                        return Ok(true);
                    }
                }
                Ok(universal)
            }
        }
    }

    fn compare(
        &self,
        op: CmpOp,
        a: &Expr,
        b: &Expr,
        fr: Frame<'_>,
        env: &Env,
    ) -> Result<bool, EvalError> {
        let va = self.expr(a, fr, env)?;
        let vb = self.expr(b, fr, env)?;
        match op {
            CmpOp::Eq => Ok(va == vb),
            CmpOp::Neq => Ok(va != vb),
            CmpOp::In | CmpOp::NotIn => {
                let set = self.set_of(&vb, "right operand of membership")?;
                let member = set.contains(&*va);
                Ok(if op == CmpOp::In { member } else { !member })
            }
            CmpOp::Subset => {
                let sa = self.set_of(&va, "left operand of `<:`")?;
                let sb = self.set_of(&vb, "right operand of `<:`")?;
                Ok(sa.is_subset(sb))
            }
        }
    }

    fn set_of<'v>(&self, v: &'v Value, what: &str) -> Result<&'v BTreeSet<Value>, EvalError> {
        v.as_set()
            .ok_or_else(|| EvalError::Type(format!("{what} is not a set: {}", self.show(v))))
    }

    fn expr<'s>(
        &'s self,
        e: &Expr,
        fr: Frame<'s>,
        env: &'s Env,
    ) -> Result<Cow<'s, Value>, EvalError> {
        match e {
            Expr::Ident(n) => self.lookup(n, fr, env),
            Expr::Primed(n) => {
                let post = fr
                    .post
                    .ok_or_else(|| EvalError::PrimedOutsideTwoState(n.clone()))?;
                let i = self
                    .schema
                    .index_of(n)
                    .ok_or_else(|| EvalError::Unbound(format!("{n}'")))?;
                Ok(Cow::Borrowed(&post.0[i]))
            }
            Expr::Bool(b) => Ok(Cow::Owned(Value::Bool(*b))),
            Expr::Pair(a, b) => {
                let va = self.expr(a, fr, env)?.into_owned();
                let vb = self.expr(b, fr, env)?.into_owned();
                Ok(Cow::Owned(Value::pair(va, vb)))
            }
            Expr::App(f, a) => {
                let vf = self.expr(f, fr, env)?;
                let va = self.expr(a, fr, env)?;
                let mut images = vf.images(&va);
                let func = || match &**f {
                    Expr::Ident(n) => n.clone(),
                    Expr::Primed(n) => format!("{n}'"),
                    _ => "function".to_string(),
                };
                if vf.as_set().is_none() {
                    return Err(EvalError::Type(format!("`{}` is not a relation", func())));
                }
                match (images.next(), images.next()) {
                    (Some(v), None) => Ok(Cow::Owned(v.clone())),
                    (None, _) => Err(EvalError::OutsideDomain {
                        func: func(),
                        arg: self.show(&va),
                    }),
                    (Some(_), Some(_)) => Err(EvalError::NotFunctional(func())),
                }
            }
            Expr::Dom(r) | Expr::Ran(r) => {
                let vr = self.expr(r, fr, env)?;
                let set = self.set_of(&vr, "argument of dom/ran")?;
                let first = matches!(e, Expr::Dom(_));
                let mut out = BTreeSet::new();
                for p in set {
                    match p {
                        Value::Pair(a, b) => {
                            out.insert(if first { (**a).clone() } else { (**b).clone() });
                        }
                        other => {
                            return Err(EvalError::Type(format!(
                                "dom/ran of a set containing non-pair {}",
                                self.show(other)
                            )))
                        }
                    }
                }
                Ok(Cow::Owned(Value::Set(out)))
            }
            Expr::SetLit(es) => {
                let mut out = BTreeSet::new();
                for x in es {
                    out.insert(self.expr(x, fr, env)?.into_owned());
                }
                Ok(Cow::Owned(Value::Set(out)))
            }
            Expr::Bin(op, a, b) => {
                let va = self.expr(a, fr, env)?;
                let vb = self.expr(b, fr, env)?;
                let sa = self.set_of(&va, "left operand")?;
                let sb = self.set_of(&vb, "right operand")?;
                let out: BTreeSet<Value> = match op {
                    SetOp::Union => sa.union(sb).cloned().collect(),
                    SetOp::Inter => sa.intersection(sb).cloned().collect(),
                    SetOp::Diff => sa.difference(sb).cloned().collect(),
                    SetOp::Override => {
                        let dom_b = firsts(sb);
                        sa.iter()
                            .filter(|p| !matches!(p, Value::Pair(x, _) if dom_b.contains(&**x)))
                            .chain(sb.iter())
                            .cloned()
                            .collect()
                    }
                    SetOp::DomSub => sb
                        .iter()
                        .filter(|p| !matches!(p, Value::Pair(x, _) if sa.contains(&**x)))
                        .cloned()
                        .collect(),
                    SetOp::Product => sa
                        .iter()
                        .flat_map(|x| sb.iter().map(move |y| Value::pair(x.clone(), y.clone())))
                        .collect(),
                };
                Ok(Cow::Owned(Value::Set(out)))
            }
        }
    }

    fn lookup<'s>(
        &'s self,
        n: &str,
        fr: Frame<'s>,
        env: &'s Env,
    ) -> Result<Cow<'s, Value>, EvalError> {
        if let Some(v) = env.get(n) {
            return Ok(Cow::Borrowed(v));
        }
        if let Some(i) = self.schema.index_of(n) {
            return Ok(Cow::Borrowed(&fr.pre.0[i]));
        }
        if let Some(v) = self.constants.get(n) {
            return Ok(Cow::Borrowed(v));
        }
        if let Some(v) = self.universe.sort_set(n) {
            return Ok(Cow::Borrowed(v));
        }
        match n {
            "TRUE" => return Ok(Cow::Owned(Value::Bool(true))),
            "FALSE" => return Ok(Cow::Owned(Value::Bool(false))),
            "BOOL" => {
                return Ok(Cow::Owned(Value::Set(
                    [Value::Bool(false), Value::Bool(true)].into_iter().collect(),
                )))
            }
            _ => {}
        }
        if let Some(a) = self.universe.atom(n) {
            return Ok(Cow::Owned(Value::Atom(a)));
        }
        Err(EvalError::Unbound(n.to_string()))
    }
}

fn firsts(s: &BTreeSet<Value>) -> BTreeSet<&Value> {
    s.iter()
        .filter_map(|p| match p {
            Value::Pair(a, _) => Some(&**a),
            _ => None,
        })
        .collect()
}
