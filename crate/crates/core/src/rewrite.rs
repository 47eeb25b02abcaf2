//! Formula rewrites that preserve truth at every model and context.

use thiserror::Error;

use crate::formula::{normalize, BasicFormula, CausalFormula, InterventionSpec, Modality, StateFormula};
use crate::model::{Odometer, Signature};

pub const DEFAULT_EXPANSION_CAP: u128 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("disconnecting {vars} needs {count} conjuncts, more than the cap of {cap}")]
    Blowup { vars: String, count: u128, cap: u128 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Removes every `disc(..)` by assigning the disconnected variables each
/// combination of values: boxes become conjunctions, diamonds disjunctions.
/// Combinations are listed in canonical order.
pub fn eliminate_disc(f: &CausalFormula, sig: &Signature) -> Result<CausalFormula, RewriteError> {
    eliminate_disc_with_cap(f, sig, DEFAULT_EXPANSION_CAP)
}

pub fn eliminate_disc_with_cap(f: &CausalFormula, sig: &Signature, cap: u128) -> Result<CausalFormula, RewriteError> {
    normalize(f, sig).try_map_basics(&mut |b| expand(b, sig, cap))
}

fn expand(b: &BasicFormula, sig: &Signature, cap: u128) -> Result<CausalFormula, RewriteError> {
    if b.spec.disconnect.is_empty() {
        return Ok(CausalFormula::Basic(b.clone()));
    }
    let ranges = b
        .spec
        .disconnect
        .iter()
        .map(|x| sig.range(x).ok_or_else(|| RewriteError::UnknownVariable(x.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let count = ranges.iter().try_fold(1u128, |acc, r| acc.checked_mul(r.len() as u128));
    match count {
        Some(c) if c <= cap => {}
        _ => {
            return Err(RewriteError::Blowup {
                vars: b.spec.disconnect.join(", "),
                count: count.unwrap_or(u128::MAX),
                cap,
            })
        }
    }
    let parts: Vec<CausalFormula> = Odometer::new(ranges.iter().map(|r| r.len()).collect())
        .map(|idx| {
            let mut assignments: Vec<_> =
                b.spec.disconnect.iter().zip(&idx).zip(&ranges).map(|((x, &i), r)| (x.clone(), r.get(i).clone())).collect();
            assignments.extend(b.spec.assignments.iter().cloned());
            let spec = InterventionSpec { disconnect: vec![], assignments }.normalize(sig);
            CausalFormula::Basic(BasicFormula { modality: b.modality, spec, body: b.body.clone() })
        })
        .collect();
    debug_assert_eq!(Some(parts.len() as u128), count);
    Ok(match b.modality {
        Modality::Box => CausalFormula::all(parts),
        Modality::Diamond => CausalFormula::any(parts),
    })
}

/// Replaces `<spec>φ` with `![spec]!φ`.
pub fn desugar_diamonds(f: &CausalFormula) -> CausalFormula {
    f.map_basics(&mut |b| match b.modality {
        Modality::Box => CausalFormula::Basic(b.clone()),
        Modality::Diamond => CausalFormula::boxed(b.spec.clone(), negate(&b.body)).not(),
    })
}

fn negate(body: &StateFormula) -> StateFormula {
    body.clone().not()
}

/// True if some basic subformula disconnects a variable.
pub fn has_disc(f: &CausalFormula) -> bool {
    crate::formula::subformulas(f).iter().any(|b| !b.spec.disconnect.is_empty())
}
