//! The causal formula language: primitive events, state formulas, and
//! Boolean combinations of `[disc(X), Y <- y]φ` / `<disc(X), Y <- y>φ`.
//!
//! Box bodies are [`StateFormula`]s, so modalities cannot nest.

use std::collections::HashSet;
use std::fmt;

use crate::model::{Location, Signature, ValidationReport, VarKind, ViolationKind};
use crate::value::Value;

/// `X = x` for an endogenous `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimitiveEvent {
    pub var: String,
    pub value: Value,
}

/// A Boolean combination of primitive events.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StateFormula {
    True,
    False,
    Event(PrimitiveEvent),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
    Implies(Box<StateFormula>, Box<StateFormula>),
}

impl StateFormula {
    pub fn event(var: &str, value: impl Into<Value>) -> Self {
        StateFormula::Event(PrimitiveEvent { var: var.to_string(), value: value.into() })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        StateFormula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        StateFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        StateFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        StateFormula::Implies(Box::new(self), Box::new(other))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn all(parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().reduce(Self::and).unwrap_or(StateFormula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn any(parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().reduce(Self::or).unwrap_or(StateFormula::False)
    }

    /// Truth value given the value of each primitive event.
    pub fn eval_with(&self, event: &mut impl FnMut(&PrimitiveEvent) -> bool) -> bool {
        match self {
            StateFormula::True => true,
            StateFormula::False => false,
            StateFormula::Event(e) => event(e),
            StateFormula::Not(f) => !f.eval_with(event),
            StateFormula::And(a, b) => a.eval_with(event) && b.eval_with(event),
            StateFormula::Or(a, b) => a.eval_with(event) || b.eval_with(event),
            StateFormula::Implies(a, b) => !a.eval_with(event) || b.eval_with(event),
        }
    }

    pub fn events(&self) -> Vec<&PrimitiveEvent> {
        let mut out = vec![];
        self.collect_events(&mut out);
        out
    }

    fn collect_events<'a>(&'a self, out: &mut Vec<&'a PrimitiveEvent>) {
        match self {
            StateFormula::True | StateFormula::False => {}
            StateFormula::Event(e) => out.push(e),
            StateFormula::Not(f) => f.collect_events(out),
            StateFormula::And(a, b) | StateFormula::Or(a, b) | StateFormula::Implies(a, b) => {
                a.collect_events(out);
                b.collect_events(out);
            }
        }
    }
}

/// Disconnected variables plus an ordered list of assignments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct InterventionSpec {
    pub disconnect: Vec<String>,
    pub assignments: Vec<(String, Value)>,
}

impl InterventionSpec {
    pub fn empty() -> Self {
        InterventionSpec::default()
    }

    pub fn set(assignments: impl IntoIterator<Item = (impl Into<String>, Value)>) -> Self {
        InterventionSpec {
            disconnect: vec![],
            assignments: assignments.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn with_disconnect(mut self, vars: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.disconnect.extend(vars.into_iter().map(Into::into));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.disconnect.is_empty() && self.assignments.is_empty()
    }

    pub fn assigned(&self, var: &str) -> Option<&Value> {
        self.assignments.iter().find(|(v, _)| v == var).map(|(_, x)| x)
    }

    /// Canonical form: assignments in canonical variable order, disconnect
    /// set deduplicated, sorted, and disjoint from the assigned variables.
    pub fn normalize(&self, sig: &Signature) -> InterventionSpec {
        let order = |name: &str| sig.endogenous_index(name).unwrap_or(usize::MAX);
        let mut assignments = self.assignments.clone();
        assignments.sort_by_key(|(v, _)| order(v));
        let mut disconnect: Vec<String> = self
            .disconnect
            .iter()
            .filter(|d| self.assigned(d).is_none())
            .cloned()
            .collect();
        disconnect.sort_by_key(|d| order(d));
        disconnect.dedup();
        InterventionSpec { disconnect, assignments }
    }

    pub fn is_normalized(&self, sig: &Signature) -> bool {
        *self == self.normalize(sig)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    /// `[spec]φ`: φ holds in every solution.
    Box,
    /// `<spec>φ`: φ holds in some solution.
    Diamond,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasicFormula {
    pub modality: Modality,
    pub spec: InterventionSpec,
    pub body: StateFormula,
}

/// A Boolean combination of basic causal formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CausalFormula {
    True,
    False,
    Basic(BasicFormula),
    Not(Box<CausalFormula>),
    And(Box<CausalFormula>, Box<CausalFormula>),
    Or(Box<CausalFormula>, Box<CausalFormula>),
    Implies(Box<CausalFormula>, Box<CausalFormula>),
}

impl CausalFormula {
    pub fn boxed(spec: InterventionSpec, body: StateFormula) -> Self {
        CausalFormula::Basic(BasicFormula { modality: Modality::Box, spec, body })
    }

    pub fn diamond(spec: InterventionSpec, body: StateFormula) -> Self {
        CausalFormula::Basic(BasicFormula { modality: Modality::Diamond, spec, body })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        CausalFormula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        CausalFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        CausalFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        CausalFormula::Implies(Box::new(self), Box::new(other))
    }

    /// `a <-> b`, written as `(a -> b) & (b -> a)`.
    pub fn iff(self, other: Self) -> Self {
        self.clone().implies(other.clone()).and(other.implies(self))
    }

    pub fn all(parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().reduce(Self::and).unwrap_or(CausalFormula::True)
    }

    pub fn any(parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().reduce(Self::or).unwrap_or(CausalFormula::False)
    }

    /// Rebuilds the formula with every basic subformula replaced by `f(basic)`.
    pub fn map_basics(&self, f: &mut impl FnMut(&BasicFormula) -> CausalFormula) -> CausalFormula {
        self.try_map_basics::<std::convert::Infallible>(&mut |b| Ok(f(b)))
            .unwrap_or_else(|never| match never {})
    }

    pub fn try_map_basics<E>(
        &self,
        f: &mut impl FnMut(&BasicFormula) -> Result<CausalFormula, E>,
    ) -> Result<CausalFormula, E> {
        Ok(match self {
            CausalFormula::True => CausalFormula::True,
            CausalFormula::False => CausalFormula::False,
            CausalFormula::Basic(b) => f(b)?,
            CausalFormula::Not(a) => a.try_map_basics(f)?.not(),
            CausalFormula::And(a, b) => a.try_map_basics(f)?.and(b.try_map_basics(f)?),
            CausalFormula::Or(a, b) => a.try_map_basics(f)?.or(b.try_map_basics(f)?),
            CausalFormula::Implies(a, b) => a.try_map_basics(f)?.implies(b.try_map_basics(f)?),
        })
    }

    /// Truth value given the value of each basic subformula.
    pub fn eval_with<E>(&self, basic: &mut impl FnMut(&BasicFormula) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            CausalFormula::True => true,
            CausalFormula::False => false,
            CausalFormula::Basic(b) => basic(b)?,
            CausalFormula::Not(a) => !a.eval_with(basic)?,
            CausalFormula::And(a, b) => a.eval_with(basic)? && b.eval_with(basic)?,
            CausalFormula::Or(a, b) => a.eval_with(basic)? || b.eval_with(basic)?,
            CausalFormula::Implies(a, b) => !a.eval_with(basic)? || b.eval_with(basic)?,
        })
    }
}

/// Basic causal formula occurrences, left to right.
pub fn subformulas(f: &CausalFormula) -> Vec<&BasicFormula> {
    fn walk<'a>(f: &'a CausalFormula, out: &mut Vec<&'a BasicFormula>) {
        match f {
            CausalFormula::True | CausalFormula::False => {}
            CausalFormula::Basic(b) => out.push(b),
            CausalFormula::Not(a) => walk(a, out),
            CausalFormula::And(a, b) | CausalFormula::Or(a, b) | CausalFormula::Implies(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = vec![];
    walk(f, &mut out);
    out
}

/// Sorts every intervention into canonical order and removes assigned
/// variables from disconnect sets. Diamonds are kept.
pub fn normalize(f: &CausalFormula, sig: &Signature) -> CausalFormula {
    f.map_basics(&mut |b| {
        CausalFormula::Basic(BasicFormula {
            modality: b.modality,
            spec: b.spec.normalize(sig),
            body: b.body.clone(),
        })
    })
}

pub fn well_formed(f: &CausalFormula, sig: &Signature) -> ValidationReport {
    let mut report = ValidationReport::default();
    for b in subformulas(f) {
        let loc = Location::Formula(crate::syntax::render_basic(b));
        check_spec(&b.spec, sig, &loc, &mut report);
        check_events(&b.body, sig, &loc, &mut report);
    }
    report
}

pub fn well_formed_state(f: &StateFormula, sig: &Signature) -> ValidationReport {
    let mut report = ValidationReport::default();
    let loc = Location::Formula(crate::syntax::render_state_formula(f));
    check_events(f, sig, &loc, &mut report);
    report
}

fn check_var(name: &str, sig: &Signature, loc: &Location, report: &mut ValidationReport) -> bool {
    match sig.lookup(name) {
        None => report.push(loc.clone(), ViolationKind::UnknownVariable(name.to_string())),
        Some(r) if r.kind != VarKind::Endogenous => {
            report.push(loc.clone(), ViolationKind::NotEndogenous(name.to_string()))
        }
        Some(_) => return true,
    }
    false
}

fn check_value(name: &str, value: &Value, sig: &Signature, loc: &Location, report: &mut ValidationReport) {
    if check_var(name, sig, loc, report) && !sig.range(name).is_some_and(|r| r.contains(value)) {
        report.push(
            loc.clone(),
            ViolationKind::ValueOutOfRange { var: name.to_string(), value: value.clone() },
        );
    }
}

fn check_spec(spec: &InterventionSpec, sig: &Signature, loc: &Location, report: &mut ValidationReport) {
    for d in &spec.disconnect {
        check_var(d, sig, loc, report);
    }
    let mut seen = HashSet::new();
    for (var, value) in &spec.assignments {
        if !seen.insert(var.as_str()) {
            report.push(loc.clone(), ViolationKind::DuplicateAssignment(var.clone()));
        }
        check_value(var, value, sig, loc, report);
    }
}

fn check_events(f: &StateFormula, sig: &Signature, loc: &Location, report: &mut ValidationReport) {
    for e in f.events() {
        check_value(&e.var, &e.value, sig, loc, report);
    }
}

impl fmt::Display for CausalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_formula(self))
    }
}

impl fmt::Display for BasicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_basic(self))
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_state_formula(self))
    }
}

impl fmt::Display for InterventionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render_spec(self))
    }
}
