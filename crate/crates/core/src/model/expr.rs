//! Expressions used for structural equations and constraint predicates.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::signature::{Assignment, ExtendedState, Signature};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Integer division truncating toward zero.
    Div,
    /// Remainder with the sign of the dividend.
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicOp {
    And,
    Or,
    Implies,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    Bool(bool),
    Var(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Logic(LogicOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Val(Value),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("kind mismatch in `{0}`")]
    KindMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no value for `{var}` in its lookup table")]
    TableMiss { var: String },
}

/// Read access to variable values during evaluation.
pub trait Env {
    fn lookup(&self, name: &str) -> Option<&Value>;
}

impl Env for ExtendedState {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.get(name)
    }
}

impl Env for Assignment {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.get(name)
    }
}

/// Static kind of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Int,
    Sym,
    /// A value that may be either an integer or a symbol.
    Mixed,
    Bool,
}

impl Ty {
    fn is_value(self) -> bool {
        self != Ty::Bool
    }

    fn join(self, other: Ty) -> Option<Ty> {
        match (self, other) {
            (a, b) if a == b => Some(a),
            (Ty::Bool, _) | (_, Ty::Bool) => None,
            _ => Some(Ty::Mixed),
        }
    }
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    pub fn int(n: i64) -> Self {
        Expr::Lit(Value::int(n))
    }

    pub fn arith(op: ArithOp, l: Expr, r: Expr) -> Self {
        Expr::Arith(op, Box::new(l), Box::new(r))
    }

    pub fn cmp(op: CmpOp, l: Expr, r: Expr) -> Self {
        Expr::Cmp(op, Box::new(l), Box::new(r))
    }

    pub fn logic(op: LogicOp, l: Expr, r: Expr) -> Self {
        Expr::Logic(op, Box::new(l), Box::new(r))
    }

    pub fn ite(c: Expr, t: Expr, e: Expr) -> Self {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    /// Names of all referenced variables.
    pub fn free_vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Lit(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Neg(e) | Expr::Not(e) => e.collect_vars(out),
            Expr::Arith(_, l, r) | Expr::Cmp(_, l, r) | Expr::Logic(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::If(c, t, e) => {
                c.collect_vars(out);
                t.collect_vars(out);
                e.collect_vars(out);
            }
        }
    }

    /// True if evaluation could divide by something other than a non-zero literal.
    pub fn may_fail(&self) -> bool {
        match self {
            Expr::Lit(_) | Expr::Bool(_) | Expr::Var(_) => false,
            Expr::Neg(e) | Expr::Not(e) => e.may_fail(),
            Expr::Arith(op, l, r) => {
                let risky_divisor = matches!(op, ArithOp::Div | ArithOp::Mod)
                    && !matches!(&**r, Expr::Lit(Value::Int(n)) if !n.is_zero());
                risky_divisor || l.may_fail() || r.may_fail()
            }
            Expr::Cmp(_, l, r) | Expr::Logic(_, l, r) => l.may_fail() || r.may_fail(),
            Expr::If(c, t, e) => c.may_fail() || t.may_fail() || e.may_fail(),
        }
    }

    pub fn eval(&self, env: &dyn Env) -> Result<Scalar, EvalError> {
        match self {
            Expr::Lit(v) => Ok(Scalar::Val(v.clone())),
            Expr::Bool(b) => Ok(Scalar::Bool(*b)),
            Expr::Var(name) => env
                .lookup(name)
                .map(|v| Scalar::Val(v.clone()))
                .ok_or_else(|| EvalError::UnknownVariable(name.clone())),
            Expr::Neg(e) => Ok(Scalar::Val(Value::Int(-self.int_of(e, env)?))),
            Expr::Not(e) => Ok(Scalar::Bool(!self.bool_of(e, env)?)),
            Expr::Arith(op, l, r) => {
                let a = self.int_of(l, env)?;
                let b = self.int_of(r, env)?;
                let n = match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mul => a * b,
                    ArithOp::Div | ArithOp::Mod if b.is_zero() => {
                        return Err(EvalError::DivisionByZero(self.to_string()))
                    }
                    ArithOp::Div => a / b,
                    ArithOp::Mod => a % b,
                };
                Ok(Scalar::Val(Value::Int(n)))
            }
            Expr::Cmp(op, l, r) => {
                let (a, b) = (l.eval(env)?, r.eval(env)?);
                let res = match (op, a, b) {
                    (CmpOp::Eq, x, y) if same_kind(&x, &y) => x == y,
                    (CmpOp::Ne, x, y) if same_kind(&x, &y) => x != y,
                    (op, Scalar::Val(Value::Int(x)), Scalar::Val(Value::Int(y))) => match op {
                        CmpOp::Lt => x < y,
                        CmpOp::Le => x <= y,
                        CmpOp::Gt => x > y,
                        CmpOp::Ge => x >= y,
                        CmpOp::Eq | CmpOp::Ne => unreachable!("integers share a kind"),
                    },
                    _ => return Err(EvalError::KindMismatch(self.to_string())),
                };
                Ok(Scalar::Bool(res))
            }
            Expr::Logic(op, l, r) => {
                let a = self.bool_of(l, env)?;
                let res = match op {
                    LogicOp::And => a && self.bool_of(r, env)?,
                    LogicOp::Or => a || self.bool_of(r, env)?,
                    LogicOp::Implies => !a || self.bool_of(r, env)?,
                };
                Ok(Scalar::Bool(res))
            }
            Expr::If(c, t, e) => {
                if self.bool_of(c, env)? {
                    t.eval(env)
                } else {
                    e.eval(env)
                }
            }
        }
    }

    /// Evaluates an expression that must produce a range value.
    pub fn eval_value(&self, env: &dyn Env) -> Result<Value, EvalError> {
        match self.eval(env)? {
            Scalar::Val(v) => Ok(v),
            Scalar::Bool(_) => Err(EvalError::KindMismatch(self.to_string())),
        }
    }

    /// Evaluates an expression that must produce a truth value.
    pub fn eval_bool(&self, env: &dyn Env) -> Result<bool, EvalError> {
        self.bool_of(self, env)
    }

    fn int_of(&self, e: &Expr, env: &dyn Env) -> Result<BigInt, EvalError> {
        match e.eval(env)? {
            Scalar::Val(Value::Int(n)) => Ok(n),
            _ => Err(EvalError::KindMismatch(self.to_string())),
        }
    }

    fn bool_of(&self, e: &Expr, env: &dyn Env) -> Result<bool, EvalError> {
        match e.eval(env)? {
            Scalar::Bool(b) => Ok(b),
            _ => Err(EvalError::KindMismatch(self.to_string())),
        }
    }

    /// Infers the static kind, pushing a message per problem found.
    ///
    /// Returns `None` when the kind cannot be determined.
    pub fn infer(&self, sig: &Signature, problems: &mut Vec<TypeProblem>) -> Option<Ty> {
        match self {
            Expr::Lit(Value::Int(_)) => Some(Ty::Int),
            Expr::Lit(Value::Sym(_)) => Some(Ty::Sym),
            Expr::Bool(_) => Some(Ty::Bool),
            Expr::Var(name) => match sig.range(name) {
                None => {
                    problems.push(TypeProblem::UnknownVariable(name.clone()));
                    None
                }
                Some(r) if r.all_int() => Some(Ty::Int),
                Some(r) if r.all_sym() => Some(Ty::Sym),
                Some(_) => Some(Ty::Mixed),
            },
            Expr::Neg(e) => {
                self.expect(e, sig, problems, |t| t == Ty::Int);
                Some(Ty::Int)
            }
            Expr::Not(e) => {
                self.expect(e, sig, problems, |t| t == Ty::Bool);
                Some(Ty::Bool)
            }
            Expr::Arith(_, l, r) => {
                self.expect(l, sig, problems, |t| t == Ty::Int);
                self.expect(r, sig, problems, |t| t == Ty::Int);
                Some(Ty::Int)
            }
            Expr::Cmp(CmpOp::Eq | CmpOp::Ne, l, r) => {
                let (a, b) = (l.infer(sig, problems), r.infer(sig, problems));
                if let (Some(a), Some(b)) = (a, b) {
                    if a.is_value() != b.is_value() {
                        problems.push(TypeProblem::KindMismatch(self.to_string()));
                    }
                }
                Some(Ty::Bool)
            }
            Expr::Cmp(_, l, r) => {
                self.expect(l, sig, problems, |t| t == Ty::Int);
                self.expect(r, sig, problems, |t| t == Ty::Int);
                Some(Ty::Bool)
            }
            Expr::Logic(_, l, r) => {
                self.expect(l, sig, problems, |t| t == Ty::Bool);
                self.expect(r, sig, problems, |t| t == Ty::Bool);
                Some(Ty::Bool)
            }
            Expr::If(c, t, e) => {
                self.expect(c, sig, problems, |t| t == Ty::Bool);
                let (a, b) = (t.infer(sig, problems)?, e.infer(sig, problems)?);
                let joined = a.join(b);
                if joined.is_none() {
                    problems.push(TypeProblem::KindMismatch(self.to_string()));
                }
                joined
            }
        }
    }

    fn expect(
        &self,
        e: &Expr,
        sig: &Signature,
        problems: &mut Vec<TypeProblem>,
        ok: impl Fn(Ty) -> bool,
    ) {
        if let Some(t) = e.infer(sig, problems) {
            if !ok(t) {
                problems.push(TypeProblem::KindMismatch(self.to_string()));
            }
        }
    }
}

fn same_kind(a: &Scalar, b: &Scalar) -> bool {
    matches!((a, b), (Scalar::Val(_), Scalar::Val(_)) | (Scalar::Bool(_), Scalar::Bool(_)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeProblem {
    UnknownVariable(String),
    KindMismatch(String),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_expr(self))
    }
}
