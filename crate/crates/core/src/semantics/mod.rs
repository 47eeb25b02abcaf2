//! Solutions of intervened models and truth of causal formulas.

mod engine;
mod naive;
mod submodel;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

pub use submodel::{submodel, Submodel};

use crate::formula::{
    normalize, subformulas, well_formed, BasicFormula, CausalFormula, InterventionSpec, Modality, StateFormula,
};
use crate::model::{
    satisfies_equations, AssignmentError, ConstrainedModel, Context, EvalError, ExtendedState, State,
    ValidationReport, VarKind,
};
use engine::Engine;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("bad context: {0}")]
    BadContext(#[from] AssignmentError),
    #[error("ill-formed formula:\n{0}")]
    IllFormed(ValidationReport),
    #[error("intervention `{0}` is not in normal form")]
    SpecNotNormalized(String),
    #[error("{source} at {state}")]
    Eval { source: EvalError, state: Box<ExtendedState> },
}

/// The solutions of one intervention at one context, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub context: Context,
    #[serde(skip)]
    pub spec: InterventionSpec,
    pub states: Vec<State>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &State> {
        self.states.iter()
    }
}

fn check_inputs(m: &ConstrainedModel, u: &Context, spec: &InterventionSpec) -> Result<Context, SemanticsError> {
    m.signature.check_assignment(u, VarKind::Exogenous)?;
    let report = well_formed(&CausalFormula::boxed(spec.clone(), StateFormula::True), &m.signature);
    if !report.is_valid() {
        return Err(SemanticsError::IllFormed(report));
    }
    if !spec.is_normalized(&m.signature) {
        return Err(SemanticsError::SpecNotNormalized(spec.to_string()));
    }
    Ok(engine::ordered_context(m, u))
}

/// Solutions by direct enumeration of every extended state.
pub fn solutions(m: &ConstrainedModel, u: &Context, spec: &InterventionSpec) -> Result<SolutionSet, SemanticsError> {
    let u = check_inputs(m, u, spec)?;
    let states = naive::solve(m, &u, spec)?;
    Ok(SolutionSet { context: u, spec: spec.clone(), states })
}

/// Same result as [`solutions`], found by pruned search.
pub fn solutions_fast(m: &ConstrainedModel, u: &Context, spec: &InterventionSpec) -> Result<SolutionSet, SemanticsError> {
    Evaluator::new(m).solutions(u, spec)
}

/// Truth of a Boolean combination of primitive events in a state.
pub fn holds_state(f: &StateFormula, v: &State) -> bool {
    f.eval_with(&mut |e| v.get(&e.var) == Some(&e.value))
}

/// `(M, u) |= f`.
pub fn evaluate(m: &ConstrainedModel, u: &Context, f: &CausalFormula) -> Result<bool, SemanticsError> {
    Evaluator::new(m).evaluate(u, f)
}

/// `(M, u, v) |= f`: a primitive event holds iff `(u, v)` satisfies every
/// equation and `v` gives the variable that value. Membership in C is not
/// required.
pub fn evaluate_extended(
    m: &ConstrainedModel,
    u: &Context,
    v: &State,
    f: &StateFormula,
) -> Result<bool, SemanticsError> {
    m.signature.check_assignment(u, VarKind::Exogenous)?;
    m.signature.check_assignment(v, VarKind::Endogenous)?;
    let es = ExtendedState::new(u.clone(), v.clone());
    let sat = satisfies_equations(&m.equations, &m.signature, &es)
        .map_err(|source| SemanticsError::Eval { source, state: Box::new(es.clone()) })?;
    Ok(f.eval_with(&mut |e| sat && v.get(&e.var) == Some(&e.value)))
}

/// Evaluates many formulas and contexts against one model.
pub struct Evaluator<'m> {
    engine: Engine<'m>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m ConstrainedModel) -> Self {
        Evaluator { engine: Engine::new(model) }
    }

    pub fn model(&self) -> &'m ConstrainedModel {
        self.engine.model()
    }

    /// Solutions for a normalized, well-formed spec.
    pub fn solutions(&self, u: &Context, spec: &InterventionSpec) -> Result<SolutionSet, SemanticsError> {
        let u = check_inputs(self.model(), u, spec)?;
        let states = self.engine.solve(&u, spec)?;
        Ok(SolutionSet { context: u, spec: spec.clone(), states })
    }

    pub fn evaluate(&self, u: &Context, f: &CausalFormula) -> Result<bool, SemanticsError> {
        Ok(self.evaluate_traced(u, f)?.0)
    }

    /// The truth value plus the solution set of every basic subformula, in
    /// order of occurrence. Specs are normalized first; each distinct spec is
    /// solved once, whether or not the result
    /// decides the value.
    pub fn evaluate_traced(
        &self,
        u: &Context,
        f: &CausalFormula,
    ) -> Result<(bool, Vec<(BasicFormula, SolutionSet)>), SemanticsError> {
        let m = self.model();
        m.signature.check_assignment(u, VarKind::Exogenous)?;
        let report = well_formed(f, &m.signature);
        if !report.is_valid() {
            return Err(SemanticsError::IllFormed(report));
        }
        let f = normalize(f, &m.signature);
        let u = engine::ordered_context(m, u);
        let mut cache: HashMap<InterventionSpec, SolutionSet> = HashMap::new();
        let mut trace = vec![];
        for b in subformulas(&f) {
            if !cache.contains_key(&b.spec) {
                let states = self.engine.solve(&u, &b.spec)?;
                cache.insert(b.spec.clone(), SolutionSet { context: u.clone(), spec: b.spec.clone(), states });
            }
            trace.push((b.clone(), cache[&b.spec].clone()));
        }
        let value = f
            .eval_with(&mut |b: &BasicFormula| Ok::<_, std::convert::Infallible>(basic_truth(b, &cache[&b.spec])))
            .unwrap_or_else(|never| match never {});
        Ok((value, trace))
    }
}

fn basic_truth(b: &BasicFormula, set: &SolutionSet) -> bool {
    match b.modality {
        Modality::Box => set.iter().all(|v| holds_state(&b.body, v)),
        Modality::Diamond => set.iter().any(|v| holds_state(&b.body, v)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_context, parse_formula, parse_model, parse_spec};
    use crate::value::Value;

    fn temperature() -> ConstrainedModel {
        parse_model(crate::fixtures::TEMPERATURE).unwrap()
    }

    fn state(pairs: &[(&str, i64)]) -> State {
        pairs.iter().map(|&(k, v)| (k, Value::int(v))).collect()
    }

    #[test]
    fn temperature_solutions() {
        let m = temperature();
        let u = parse_context("U=35").unwrap();
        let spec = parse_spec("TC <- 40", &m.signature).unwrap();
        assert_eq!(solutions(&m, &u, &spec).unwrap().states, vec![state(&[("TC", 40), ("TF", 104), ("HS", 1)])]);
        let spec = parse_spec("TF <- 104", &m.signature).unwrap();
        assert!(solutions(&m, &u, &spec).unwrap().is_empty());
        let spec = parse_spec("disc(TC), TF <- 104", &m.signature).unwrap();
        assert_eq!(solutions_fast(&m, &u, &spec).unwrap().states, vec![state(&[("TC", 40), ("TF", 104), ("HS", 1)])]);
    }

    #[test]
    fn temperature_formulas() {
        let m = temperature();
        let u = parse_context("U=35").unwrap();
        for (text, expected) in [
            ("<TC <- 40>(HS = 1)", true),
            ("[TF <- 104](HS = 0)", true),
            ("<TF <- 104>(HS = 1)", false),
            ("<disc(TC), TF <- 104>(HS = 1)", true),
            ("[ ](TC = 35 & TF = 95 & HS = 0)", true),
        ] {
            let f = parse_formula(text, &m.signature).unwrap();
            assert_eq!(evaluate(&m, &u, &f), Ok(expected), "{text}");
        }
    }

    #[test]
    fn context_errors() {
        let m = temperature();
        let f = parse_formula("[ ]true", &m.signature).unwrap();
        let bad = parse_context("U=99").unwrap();
        assert!(matches!(evaluate(&m, &bad, &f), Err(SemanticsError::BadContext(AssignmentError::OutOfRange { .. }))));
        assert!(matches!(evaluate(&m, &Context::new(), &f), Err(SemanticsError::BadContext(AssignmentError::Missing(_)))));
    }

    #[test]
    fn state_formulas() {
        let v = state(&[("TC", 40), ("TF", 104), ("HS", 1)]);
        assert!(holds_state(&StateFormula::event("HS", 1), &v));
        assert!(!holds_state(&StateFormula::event("TC", 40).not(), &v));
        assert!(holds_state(&StateFormula::True, &v));
    }

    #[test]
    fn extended_states() {
        let m = temperature();
        let u = parse_context("U=35").unwrap();
        let good = state(&[("TC", 35), ("TF", 95), ("HS", 0)]);
        assert_eq!(evaluate_extended(&m, &u, &good, &StateFormula::event("HS", 0)), Ok(true));
        let bad = state(&[("TC", 40), ("TF", 104), ("HS", 1)]);
        assert_eq!(evaluate_extended(&m, &u, &bad, &StateFormula::event("TC", 40)), Ok(false));
        assert_eq!(evaluate_extended(&m, &u, &bad, &StateFormula::event("TC", 40).not()), Ok(true));
        assert_eq!(evaluate_extended(&m, &u, &bad, &StateFormula::True), Ok(true));
    }

    #[test]
    fn division_errors_carry_the_state() {
        let m = crate::syntax::parse_model_unchecked(
            "model M\nexogenous U : 0..1\nendogenous A : 0..1\nendogenous B : 0..1\neq A = U\nconstraint B / A == 0\n",
        )
        .unwrap();
        let u = parse_context("U=0").unwrap();
        let err = solutions_fast(&m, &u, &InterventionSpec::empty()).unwrap_err();
        let SemanticsError::Eval { source, state } = err else { panic!() };
        assert!(matches!(source, EvalError::DivisionByZero(_)));
        assert_eq!(state.state, state_ab(0, 0));
        assert_eq!(solutions(&m, &u, &InterventionSpec::empty()).unwrap_err(), solutions_fast(&m, &u, &InterventionSpec::empty()).unwrap_err());
    }

    fn state_ab(a: i64, b: i64) -> State {
        state(&[("A", a), ("B", b)])
    }
}
