use crate::formula::InterventionSpec;
use crate::model::{enumerate_extended_states, in_constraints, satisfies_equations, ConstrainedModel, Context, State};

use super::{submodel, SemanticsError};

/// Every state, in canonical order, that is in C at `u` and satisfies the
/// effective equations. Membership in C is checked before the equations.
pub(crate) fn solve(m: &ConstrainedModel, u: &Context, spec: &InterventionSpec) -> Result<Vec<State>, SemanticsError> {
    let equations = submodel(m, spec)?.effective_equations();
    let mut out = vec![];
    for es in enumerate_extended_states(m, u) {
        let fail = |source| SemanticsError::Eval { source, state: Box::new(es.clone()) };
        if !in_constraints(m, &es).map_err(fail)? {
            continue;
        }
        if satisfies_equations(&equations, &m.signature, &es).map_err(fail)? {
            out.push(es.state);
        }
    }
    Ok(out)
}
