use rayon::prelude::*;

use super::{instantiate, AxiomSchema, InstantiationBounds};
use crate::formula::CausalFormula;
use crate::model::{ConstrainedModel, Context, Signature};
use crate::semantics::Evaluator;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaStats {
    pub schema: AxiomSchema,
    /// Instances per signature, summed over distinct signatures.
    pub instances: usize,
    /// Instance-context-model evaluations.
    pub evaluations: u64,
    pub violations: usize,
    /// Why the schema was skipped for some signature.
    pub skipped: Vec<String>,
}

/// An instance that was false, or failed to evaluate, at some model and context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabViolation {
    pub model_index: usize,
    pub context: Context,
    pub schema: AxiomSchema,
    pub formula: CausalFormula,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessReport {
    pub models: usize,
    pub schemas: Vec<SchemaStats>,
    /// Sorted by model, then context, then schema and instance order.
    pub violations: Vec<LabViolation>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

type Instances = Vec<(AxiomSchema, Result<Vec<CausalFormula>, String>)>;

/// Evaluates every instance of every schema at every context of every model.
pub fn check_soundness(
    models: &[ConstrainedModel],
    schemas: &[AxiomSchema],
    bounds: &InstantiationBounds,
) -> SoundnessReport {
    let mut by_signature: Vec<(Signature, Instances)> = vec![];
    for m in models {
        if by_signature.iter().any(|(s, _)| *s == m.signature) {
            continue;
        }
        let inst = schemas
            .iter()
            .map(|&s| (s, instantiate(s, &m.signature, bounds).map_err(|e| e.to_string())))
            .collect();
        by_signature.push((m.signature.clone(), inst));
    }

    let per_model: Vec<(Vec<u64>, Vec<LabViolation>)> = models
        .par_iter()
        .enumerate()
        .map(|(model_index, m)| {
            let (_, instances) = by_signature.iter().find(|(s, _)| *s == m.signature).expect("collected above");
            let ev = Evaluator::new(m);
            let mut counts = vec![0u64; schemas.len()];
            let mut violations = vec![];
            for u in m.signature.contexts() {
                for (k, (schema, list)) in instances.iter().enumerate() {
                    let Ok(list) = list else { continue };
                    for f in list {
                        counts[k] += 1;
                        let error = match ev.evaluate(&u, f) {
                            Ok(true) => continue,
                            Ok(false) => None,
                            Err(e) => Some(e.to_string()),
                        };
                        violations.push(LabViolation {
                            model_index,
                            context: u.clone(),
                            schema: *schema,
                            formula: f.clone(),
                            error,
                        });
                    }
                }
            }
            (counts, violations)
        })
        .collect();

    let mut stats: Vec<SchemaStats> = schemas
        .iter()
        .map(|&schema| SchemaStats { schema, instances: 0, evaluations: 0, violations: 0, skipped: vec![] })
        .collect();
    for (_, inst) in &by_signature {
        for (k, (_, list)) in inst.iter().enumerate() {
            match list {
                Ok(l) => stats[k].instances += l.len(),
                Err(why) => stats[k].skipped.push(why.clone()),
            }
        }
    }
    let mut violations = vec![];
    for (counts, v) in per_model {
        for (k, c) in counts.into_iter().enumerate() {
            stats[k].evaluations += c;
        }
        violations.extend(v);
    }
    for v in &violations {
        if let Some(k) = schemas.iter().position(|&s| s == v.schema) {
            stats[k].violations += 1;
        }
    }
    SoundnessReport { models: models.len(), schemas: stats, violations }
}
