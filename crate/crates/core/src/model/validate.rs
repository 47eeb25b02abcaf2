use std::fmt;

use super::expr::{Ty, TypeProblem};
use super::signature::{assignment_from_indices, Odometer, VarDecl, VarKind};
use super::{ConstrainedModel, Equation};
use crate::value::Value;

/// Equations whose inputs span more assignments than this are not range-checked.
pub const RANGE_CHECK_LIMIT: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Equation(String),
    /// Index into the predicate list.
    Constraint(usize),
    /// Index into the extensional state list.
    ExtensionalState(usize),
    /// A formula, rendered.
    Formula(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Equation(v) => write!(f, "equation for {v}"),
            Location::Constraint(i) => write!(f, "constraint #{}", i + 1),
            Location::ExtensionalState(i) => write!(f, "listed state #{}", i + 1),
            Location::Formula(s) => write!(f, "formula `{s}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    UnknownVariable(String),
    /// An equation defines a variable that is not endogenous.
    NotEndogenous(String),
    SelfReference,
    KindMismatch(String),
    NotBoolean,
    /// An equation yields a value outside the range of its variable.
    OutOfRange { inputs: String, value: Value },
    EvaluationError { inputs: String, message: String },
    MalformedTable(String),
    BadAssignment(String),
    ValueOutOfRange { var: String, value: Value },
    DuplicateAssignment(String),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ViolationKind::NotEndogenous(v) => write!(f, "`{v}` is not an endogenous variable"),
            ViolationKind::SelfReference => f.write_str("equation refers to its own variable"),
            ViolationKind::KindMismatch(e) => write!(f, "kind mismatch in `{e}`"),
            ViolationKind::NotBoolean => f.write_str("predicate is not boolean"),
            ViolationKind::OutOfRange { inputs, value } => {
                write!(f, "yields {value}, outside the range, when {inputs}")
            }
            ViolationKind::EvaluationError { inputs, message } => {
                write!(f, "fails to evaluate when {inputs}: {message}")
            }
            ViolationKind::MalformedTable(why) => write!(f, "malformed table: {why}"),
            ViolationKind::BadAssignment(why) => f.write_str(why),
            ViolationKind::ValueOutOfRange { var, value } => {
                write!(f, "value {value} is outside the range of `{var}`")
            }
            ViolationKind::DuplicateAssignment(v) => write!(f, "`{v}` is assigned more than once"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

/// Problems found in a model or formula; empty means well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Checks that were skipped, e.g. range checks over huge input spaces.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, location: Location, kind: ViolationKind) {
        self.violations.push(Violation { location, kind });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_model(model: &ConstrainedModel) -> ValidationReport {
    let sig = &model.signature;
    let mut report = ValidationReport::default();

    for (var, eq) in model.equations.iter() {
        let loc = || Location::Equation(var.to_string());
        let Some(range) = sig.lookup(var).filter(|r| r.kind == VarKind::Endogenous).map(|r| &sig.decl(r).range) else {
            report.push(loc(), ViolationKind::NotEndogenous(var.to_string()));
            continue;
        };
        let inputs = eq.inputs();
        if inputs.contains(&var) {
            report.push(loc(), ViolationKind::SelfReference);
        }
        let before = report.violations.len();
        match eq {
            Equation::Expr(e) => {
                let mut problems = vec![];
                let ty = e.infer(sig, &mut problems);
                push_type_problems(&mut report, loc(), problems);
                if ty == Some(Ty::Bool) {
                    report.push(loc(), ViolationKind::KindMismatch(e.to_string()));
                }
            }
            Equation::Table(t) => check_table(&mut report, loc(), var, t, model),
        }
        if report.violations.len() > before || inputs.contains(&var) {
            continue;
        }
        // Range closure: evaluate over every assignment of the equation's inputs.
        let decls: Vec<VarDecl> = inputs.iter().filter_map(|n| sig.lookup(n).map(|r| sig.decl(r).clone())).collect();
        let count = decls.iter().try_fold(1u128, |acc, d| acc.checked_mul(d.range.len() as u128));
        if count.is_none_or(|c| c > RANGE_CHECK_LIMIT) {
            report.notes.push(format!("range of the equation for {var} not checked: too many input combinations"));
            continue;
        }
        for idx in Odometer::new(decls.iter().map(|d| d.range.len()).collect()) {
            let env = assignment_from_indices(&decls, &idx);
            match eq.eval(var, sig, &env) {
                Ok(v) if range.contains(&v) => {}
                Ok(value) => {
                    report.push(loc(), ViolationKind::OutOfRange { inputs: env.to_string(), value });
                    break;
                }
                Err(e) => {
                    report.push(
                        loc(),
                        ViolationKind::EvaluationError { inputs: env.to_string(), message: e.to_string() },
                    );
                    break;
                }
            }
        }
    }

    for (i, p) in model.constraints.predicates.iter().enumerate() {
        let mut problems = vec![];
        let ty = p.infer(sig, &mut problems);
        push_type_problems(&mut report, Location::Constraint(i), problems);
        if matches!(ty, Some(t) if t != Ty::Bool) {
            report.push(Location::Constraint(i), ViolationKind::NotBoolean);
        }
    }

    if let Some(states) = &model.constraints.extensional {
        for (i, es) in states.iter().enumerate() {
            let check = sig
                .check_assignment(&es.context, VarKind::Exogenous)
                .and_then(|_| sig.check_assignment(&es.state, VarKind::Endogenous));
            if let Err(e) = check {
                report.push(Location::ExtensionalState(i), ViolationKind::BadAssignment(e.to_string()));
            }
        }
    }
    report
}

fn push_type_problems(report: &mut ValidationReport, loc: Location, problems: Vec<TypeProblem>) {
    for p in problems {
        let kind = match p {
            TypeProblem::UnknownVariable(v) => ViolationKind::UnknownVariable(v),
            TypeProblem::KindMismatch(e) => ViolationKind::KindMismatch(e),
        };
        report.push(loc.clone(), kind);
    }
}

fn check_table(
    report: &mut ValidationReport,
    loc: Location,
    var: &str,
    t: &super::LookupTable,
    model: &ConstrainedModel,
) {
    let sig = &model.signature;
    for (i, name) in t.inputs.iter().enumerate() {
        if sig.lookup(name).is_none() {
            report.push(loc.clone(), ViolationKind::UnknownVariable(name.clone()));
        } else if t.inputs[..i].contains(name) {
            report.push(loc.clone(), ViolationKind::MalformedTable(format!("input `{name}` repeated")));
        }
    }
    match t.expected_rows(sig) {
        Some(n) if n == t.outputs.len() => {}
        Some(n) => report.push(
            loc.clone(),
            ViolationKind::MalformedTable(format!("expected {n} rows, found {}", t.outputs.len())),
        ),
        None => return,
    }
    let range = sig.range(var).expect("caller checked the variable");
    if let Some(bad) = t.outputs.iter().find(|v| !range.contains(v)) {
        report.push(
            loc,
            ViolationKind::OutOfRange { inputs: "some row".to_string(), value: bad.clone() },
        );
    }
}
