use std::collections::BTreeMap;

use crate::formula::InterventionSpec;
use crate::model::{ConstrainedModel, Equation, EquationSet, Expr};
use crate::value::Value;

use super::SemanticsError;

/// A model with some equations removed and some replaced by constants.
/// The constraint set is the base model's.
#[derive(Debug, Clone)]
pub struct Submodel<'a> {
    pub base: &'a ConstrainedModel,
    pub removed: Vec<String>,
    pub pinned: BTreeMap<String, Value>,
}

impl Submodel<'_> {
    /// The base equations minus `removed`, with each pinned variable's equation
    /// replaced by its constant.
    pub fn effective_equations(&self) -> EquationSet {
        let mut out = EquationSet::new();
        for d in self.base.signature.endogenous() {
            if self.removed.contains(&d.name) {
                continue;
            }
            if let Some(v) = self.pinned.get(&d.name) {
                out.insert(d.name.clone(), Equation::Expr(Expr::Lit(v.clone())));
            } else if let Some(eq) = self.base.equations.get(&d.name) {
                out.insert(d.name.clone(), eq.clone());
            }
        }
        out
    }
}

pub fn submodel<'a>(m: &'a ConstrainedModel, spec: &InterventionSpec) -> Result<Submodel<'a>, SemanticsError> {
    if !spec.is_normalized(&m.signature) {
        return Err(SemanticsError::SpecNotNormalized(spec.to_string()));
    }
    Ok(Submodel {
        base: m,
        removed: spec.disconnect.clone(),
        pinned: spec.assignments.iter().cloned().collect(),
    })
}
