use thiserror::Error;

use super::signature::{ExtendedState, Signature, SignatureError};
use super::{validate_model, CmpOp, ConstrainedModel, ConstraintSet, Expr, LogicOp, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombineError {
    #[error("both models declare endogenous variable `{0}`")]
    EndogenousClash(String),
    #[error("shared exogenous variable `{0}` has different ranges")]
    RangeMismatch(String),
    #[error("`{0}` is exogenous in one model and endogenous in the other")]
    KindClash(String),
    #[error("links refer to unknown variable `{0}`")]
    UnknownLinkVariable(String),
    #[error("combined model is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Merges two models into one, joined by `links`.
///
/// Exogenous variables with equal names are shared; endogenous names must be
/// disjoint. The constraint set of the result is the conjunction of both
/// models' constraints and the links. Explicitly listed constraint states are
/// turned into equivalent predicates so the three parts can be conjoined.
pub fn combine(
    a: &ConstrainedModel,
    b: &ConstrainedModel,
    links: &ConstraintSet,
) -> Result<ConstrainedModel, CombineError> {
    let (sa, sb) = (&a.signature, &b.signature);
    let mut exogenous: Vec<_> = sa.exogenous().iter().map(|d| (d.name.clone(), d.range.clone())).collect();
    for d in sb.exogenous() {
        match sa.lookup(&d.name) {
            None => exogenous.push((d.name.clone(), d.range.clone())),
            Some(r) if sa.decl(r).range != d.range => return Err(CombineError::RangeMismatch(d.name.clone())),
            Some(r) if r.kind != super::VarKind::Exogenous => return Err(CombineError::KindClash(d.name.clone())),
            Some(_) => {}
        }
    }
    let mut endogenous: Vec<_> = sa.endogenous().iter().map(|d| (d.name.clone(), d.range.clone())).collect();
    for d in sb.endogenous() {
        match sa.lookup(&d.name) {
            None => endogenous.push((d.name.clone(), d.range.clone())),
            Some(r) if r.kind == super::VarKind::Endogenous => {
                return Err(CombineError::EndogenousClash(d.name.clone()))
            }
            Some(_) => return Err(CombineError::KindClash(d.name.clone())),
        }
    }
    let signature = Signature::new(exogenous, endogenous)?;

    let mut predicates = vec![];
    for part in [&a.constraints, &b.constraints, links] {
        predicates.extend(as_predicates(part));
    }
    for p in as_predicates(links) {
        if let Some(v) = p.free_vars().into_iter().find(|v| signature.lookup(v).is_none()) {
            return Err(CombineError::UnknownLinkVariable(v.to_string()));
        }
    }

    let mut equations = a.equations.clone();
    for (var, eq) in b.equations.iter() {
        equations.insert(var, eq.clone());
    }
    let model = ConstrainedModel::new(
        format!("{}_{}", a.name, b.name),
        signature,
        equations,
        ConstraintSet::predicates(predicates),
    );
    let report = validate_model(&model);
    if !report.is_valid() {
        return Err(CombineError::Invalid(report));
    }
    Ok(model)
}

fn as_predicates(c: &ConstraintSet) -> Vec<Expr> {
    match &c.extensional {
        None => c.predicates.clone(),
        Some(states) => vec![listed_states_predicate(states)],
    }
}

/// A predicate true exactly at the listed extended states.
fn listed_states_predicate(states: &[ExtendedState]) -> Expr {
    let conj = |es: &ExtendedState| {
        es.context
            .iter()
            .chain(es.state.iter())
            .map(|(n, v)| Expr::cmp(CmpOp::Eq, Expr::var(n), Expr::Lit(v.clone())))
            .reduce(|l, r| Expr::logic(LogicOp::And, l, r))
            .unwrap_or(Expr::Bool(true))
    };
    states
        .iter()
        .map(conj)
        .reduce(|l, r| Expr::logic(LogicOp::Or, l, r))
        .unwrap_or(Expr::Bool(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_links, parse_model};

    const CELSIUS: &str = "model Celsius
exogenous U : 30..45
endogenous TC : 30..45
endogenous HS : {0, 1}
eq TC = U
eq HS = if TC >= 40 then 1 else 0
";
    const FAHRENHEIT: &str = "model Fahrenheit
endogenous TF : 86..113
";

    #[test]
    fn endogenous_clash() {
        let a = parse_model(CELSIUS).unwrap();
        assert_eq!(combine(&a, &a, &ConstraintSet::none()).unwrap_err(), CombineError::EndogenousClash("TC".into()));
    }

    #[test]
    fn shared_exogenous_range_mismatch() {
        let a = parse_model(CELSIUS).unwrap();
        let b = parse_model("model B\nexogenous U : 0..1\nendogenous Z : 0..1\n").unwrap();
        assert_eq!(combine(&a, &b, &ConstraintSet::none()).unwrap_err(), CombineError::RangeMismatch("U".into()));
    }

    #[test]
    fn links_must_use_known_variables() {
        let a = parse_model(CELSIUS).unwrap();
        let b = parse_model(FAHRENHEIT).unwrap();
        let links = ConstraintSet::predicates(parse_links("constraint TK == TC + 273").unwrap());
        assert_eq!(combine(&a, &b, &links).unwrap_err(), CombineError::UnknownLinkVariable("TK".into()));
    }

    #[test]
    fn celsius_and_fahrenheit_give_the_temperature_model() {
        let a = parse_model(CELSIUS).unwrap();
        let b = parse_model(FAHRENHEIT).unwrap();
        let links = ConstraintSet::predicates(parse_links("constraint 5*TF == 9*TC + 160").unwrap());
        let m = combine(&a, &b, &links).unwrap();
        let reference = parse_model(crate::fixtures::TEMPERATURE).unwrap();
        let names = |s: &Signature| {
            let mut v: Vec<_> = s.endogenous().iter().map(|d| (d.name.clone(), d.range.clone())).collect();
            v.sort_by(|x, y| x.0.cmp(&y.0));
            v
        };
        assert_eq!(names(&m.signature), names(&reference.signature));
        assert_eq!(m.signature.exogenous(), reference.signature.exogenous());
        for (var, eq) in reference.equations.iter() {
            assert_eq!(m.equations.get(var), Some(eq));
        }
        assert_eq!(m.equations.len(), 2);
        assert_eq!(m.constraints.predicates, reference.constraints.predicates);
    }

    #[test]
    fn listed_states_become_an_equivalent_predicate() {
        let a = parse_model("model A\nexogenous U : 0..1\nendogenous X : 0..1\nstates { (U = 0, X = 1), (U = 1, X = 0) }\n").unwrap();
        let b = parse_model("model B\nexogenous U : 0..1\nendogenous Y : 0..1\n").unwrap();
        let m = combine(&a, &b, &ConstraintSet::none()).unwrap();
        for u in m.signature.contexts() {
            for es in crate::model::enumerate_extended_states(&m, &u) {
                let expected = es.get("X") != es.get("U");
                assert_eq!(crate::model::in_constraints(&m, &es), Ok(expected));
            }
        }
    }
}
