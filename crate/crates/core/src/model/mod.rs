//! Signatures, structural equations, constraints and constrained models.

mod combine;
mod expr;
mod signature;
mod validate;

use indexmap::IndexMap;

pub use combine::{combine, CombineError};
pub use expr::{ArithOp, CmpOp, Env, EvalError, Expr, LogicOp, Scalar, Ty, TypeProblem};
pub(crate) use signature::Odometer;
pub use signature::{
    Assignment, AssignmentError, Context, ExtendedState, Signature, SignatureError, State,
    VarDecl, VarKind, VarRef,
};
pub use validate::{validate_model, Location, ValidationReport, Violation, ViolationKind};

use crate::value::Value;

/// An explicit function table: one output per combination of input values.
///
/// Outputs are listed in lexicographic order of the input ranges, the first
/// input being the most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LookupTable {
    pub inputs: Vec<String>,
    pub outputs: Vec<Value>,
}

impl LookupTable {
    pub fn new(inputs: Vec<String>, outputs: Vec<Value>) -> Self {
        LookupTable { inputs, outputs }
    }

    /// Number of rows the table needs over `sig`, if all inputs are declared.
    pub fn expected_rows(&self, sig: &Signature) -> Option<usize> {
        self.inputs
            .iter()
            .try_fold(1usize, |acc, name| acc.checked_mul(sig.range(name)?.len()))
    }

    pub fn lookup(&self, owner: &str, sig: &Signature, env: &dyn Env) -> Result<Value, EvalError> {
        let miss = || EvalError::TableMiss { var: owner.to_string() };
        let mut row = 0usize;
        for name in &self.inputs {
            let range = sig.range(name).ok_or_else(|| EvalError::UnknownVariable(name.clone()))?;
            let v = env.lookup(name).ok_or_else(|| EvalError::UnknownVariable(name.clone()))?;
            row = row * range.len() + range.index_of(v).ok_or_else(miss)?;
        }
        self.outputs.get(row).cloned().ok_or_else(miss)
    }
}

/// The right-hand side of a structural equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Equation {
    Expr(Expr),
    Table(LookupTable),
}

impl Equation {
    pub fn inputs(&self) -> Vec<&str> {
        match self {
            Equation::Expr(e) => e.free_vars().into_iter().collect(),
            Equation::Table(t) => t.inputs.iter().map(String::as_str).collect(),
        }
    }

    pub fn eval(&self, owner: &str, sig: &Signature, env: &dyn Env) -> Result<Value, EvalError> {
        match self {
            Equation::Expr(e) => e.eval_value(env),
            Equation::Table(t) => t.lookup(owner, sig, env),
        }
    }

    pub fn may_fail(&self) -> bool {
        match self {
            Equation::Expr(e) => e.may_fail(),
            Equation::Table(_) => false,
        }
    }
}

impl From<Expr> for Equation {
    fn from(e: Expr) -> Self {
        Equation::Expr(e)
    }
}

/// A partial map from endogenous variables to their equations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquationSet(IndexMap<String, Equation>);

impl EquationSet {
    pub fn new() -> Self {
        EquationSet(IndexMap::new())
    }

    pub fn insert(&mut self, var: impl Into<String>, eq: impl Into<Equation>) -> Option<Equation> {
        self.0.insert(var.into(), eq.into())
    }

    pub fn get(&self, var: &str) -> Option<&Equation> {
        self.0.get(var)
    }

    pub fn remove(&mut self, var: &str) -> Option<Equation> {
        self.0.shift_remove(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Equation)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, Equation)> for EquationSet {
    fn from_iter<I: IntoIterator<Item = (S, Equation)>>(iter: I) -> Self {
        EquationSet(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// The admissible extended states.
///
/// When `extensional` is present it is exactly the set and `predicates` are
/// ignored; otherwise the set is every extended state satisfying all predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub predicates: Vec<Expr>,
    pub extensional: Option<Vec<ExtendedState>>,
}

impl ConstraintSet {
    pub fn none() -> Self {
        ConstraintSet::default()
    }

    pub fn predicates(predicates: Vec<Expr>) -> Self {
        ConstraintSet { predicates, extensional: None }
    }

    pub fn extensional(states: Vec<ExtendedState>) -> Self {
        ConstraintSet { predicates: vec![], extensional: Some(states) }
    }

    /// True when the set admits every extended state syntactically.
    pub fn is_unconstrained(&self) -> bool {
        self.extensional.is_none() && self.predicates.is_empty()
    }
}

/// How constraint predicates that fail to evaluate are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strictness {
    /// Evaluation errors are reported.
    #[default]
    Strict,
    /// An extended state whose predicate fails to evaluate is outside the constraints.
    Lenient,
}

/// A causal model with constraints: signature, partial equations, constraint set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrainedModel {
    pub name: String,
    pub signature: Signature,
    pub equations: EquationSet,
    pub constraints: ConstraintSet,
}

impl ConstrainedModel {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        equations: EquationSet,
        constraints: ConstraintSet,
    ) -> Self {
        ConstrainedModel { name: name.into(), signature, equations, constraints }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_model(self)
    }

    /// True if some predicate or equation could fail at evaluation time.
    pub fn may_fail(&self) -> bool {
        self.equations.iter().any(|(_, e)| e.may_fail())
            || (self.constraints.extensional.is_none()
                && self.constraints.predicates.iter().any(Expr::may_fail))
    }
}

pub fn in_constraints(model: &ConstrainedModel, es: &ExtendedState) -> Result<bool, EvalError> {
    in_constraints_with(model, es, Strictness::Strict)
}

pub fn in_constraints_with(
    model: &ConstrainedModel,
    es: &ExtendedState,
    strictness: Strictness,
) -> Result<bool, EvalError> {
    if let Some(states) = &model.constraints.extensional {
        return Ok(states.iter().any(|s| s == es));
    }
    for p in &model.constraints.predicates {
        match p.eval_bool(es) {
            Ok(true) => {}
            Ok(false) => return Ok(false),
            Err(_) if strictness == Strictness::Lenient => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// True iff every equation in `equations` holds at `es`.
pub fn satisfies_equations(
    equations: &EquationSet,
    sig: &Signature,
    es: &ExtendedState,
) -> Result<bool, EvalError> {
    for (var, eq) in equations.iter() {
        let actual = es.get(var).ok_or_else(|| EvalError::UnknownVariable(var.to_string()))?;
        if eq.eval(var, sig, es)? != *actual {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every state paired with `context`, in lexicographic canonical order.
pub fn enumerate_extended_states<'m>(
    model: &'m ConstrainedModel,
    context: &Context,
) -> impl Iterator<Item = ExtendedState> + 'm {
    let context = model.signature.ordered(context, VarKind::Exogenous);
    model
        .signature
        .states()
        .map(move |state| ExtendedState::new(context.clone(), state))
}
