//! Pruned depth-first solution search.
//!
//! Endogenous variables are placed in canonical order, each trying its values
//! in range order, so solutions come out in canonical enumeration order.
//! A variable whose equation only reads earlier variables is computed instead
//! of enumerated; every other equation and predicate is checked as soon as
//! its last variable is placed.

use std::collections::HashSet;

use crate::formula::InterventionSpec;
use crate::model::{
    validate_model, Assignment, ConstrainedModel, Context, Env, EvalError, Equation, State, VarDecl,
};
use crate::value::Value;

/// Values of the variables placed so far, by slot.
struct PointEnv<'m> {
    model: &'m ConstrainedModel,
    vals: Vec<Option<&'m Value>>,
}

impl Env for PointEnv<'_> {
    fn lookup(&self, name: &str) -> Option<&Value> {
        self.vals[self.model.signature.slot_of(name)?]
    }
}

pub(crate) struct Engine<'m> {
    model: &'m ConstrainedModel,
    /// False when some evaluation might fail; errors must then surface in
    /// canonical order, so the naive enumeration is used.
    fast: bool,
    /// Free-variable slots of each predicate.
    pred_slots: Vec<Vec<usize>>,
    /// Input slots of each endogenous variable's equation.
    eq_slots: Vec<Option<Vec<usize>>>,
}

enum Step<'m> {
    Pinned(usize),
    Computed(&'m str, &'m Equation),
    Free,
}

struct Plan<'m> {
    steps: Vec<Step<'m>>,
    /// Equations checked once the endogenous variable at this position is placed.
    eq_checks: Vec<Vec<(&'m str, &'m Equation, usize)>>,
    pred_checks: Vec<Vec<usize>>,
    pred_at_start: Vec<usize>,
}

impl<'m> Engine<'m> {
    pub(crate) fn new(model: &'m ConstrainedModel) -> Self {
        let sig = &model.signature;
        let slots = |names: Vec<&str>| -> Option<Vec<usize>> { names.into_iter().map(|n| sig.slot_of(n)).collect() };
        let pred_slots: Option<Vec<Vec<usize>>> =
            model.constraints.predicates.iter().map(|p| slots(p.free_vars().into_iter().collect())).collect();
        let eq_slots: Vec<Option<Vec<usize>>> = sig
            .endogenous()
            .iter()
            .map(|d| model.equations.get(&d.name).and_then(|e| slots(e.inputs())))
            .collect();
        let fast = !model.may_fail() && pred_slots.is_some() && validate_model(model).is_valid();
        Engine { model, fast, pred_slots: pred_slots.unwrap_or_default(), eq_slots }
    }

    pub(crate) fn model(&self) -> &'m ConstrainedModel {
        self.model
    }

    /// Solutions at `u` (ordered by the signature) under a normalized, well-formed spec.
    pub(crate) fn solve(&self, u: &Context, spec: &InterventionSpec) -> Result<Vec<State>, super::SemanticsError> {
        if self.fast {
            if let Ok(states) = self.search(u, spec) {
                return Ok(states);
            }
        }
        super::naive::solve(self.model, u, spec)
    }

    fn plan(&self, spec: &InterventionSpec) -> Plan<'m> {
        let sig = &self.model.signature;
        let ne = sig.exogenous().len();
        let nn = sig.endogenous().len();
        let mut plan = Plan {
            steps: Vec::with_capacity(nn),
            eq_checks: vec![vec![]; nn],
            pred_checks: vec![vec![]; nn],
            pred_at_start: vec![],
        };
        for (i, d) in sig.endogenous().iter().enumerate() {
            let slot = ne + i;
            if let Some(v) = spec.assigned(&d.name) {
                plan.steps.push(Step::Pinned(d.range.index_of(v).expect("spec is well-formed")));
                continue;
            }
            let eq = match self.model.equations.get(&d.name) {
                Some(eq) if !spec.disconnect.contains(&d.name) => eq,
                _ => {
                    plan.steps.push(Step::Free);
                    continue;
                }
            };
            let name = d.name.as_str();
            let inputs = self.eq_slots[i].as_ref().expect("valid models only");
            if inputs.iter().all(|&s| s < slot) {
                plan.steps.push(Step::Computed(name, eq));
            } else {
                plan.steps.push(Step::Free);
                let last = inputs.iter().copied().chain([slot]).max().expect("non-empty") - ne;
                plan.eq_checks[last].push((name, eq, slot));
            }
        }
        for (p, slots) in self.pred_slots.iter().enumerate() {
            match slots.iter().copied().filter(|&s| s >= ne).max() {
                Some(s) => plan.pred_checks[s - ne].push(p),
                None => plan.pred_at_start.push(p),
            }
        }
        plan
    }

    fn search(&self, u: &Context, spec: &InterventionSpec) -> Result<Vec<State>, EvalError> {
        let m = self.model;
        let sig = &m.signature;
        let ne = sig.exogenous().len();
        let mut env = PointEnv { model: m, vals: vec![None; sig.slot_count()] };
        for (i, d) in sig.exogenous().iter().enumerate() {
            let v = u.get(&d.name).expect("context is total");
            env.vals[i] = Some(&d.range.values()[d.range.index_of(v).expect("context in range")]);
        }

        if let Some(listed) = &m.constraints.extensional {
            return self.filter_listed(listed, u, spec, &mut env);
        }

        let plan = self.plan(spec);
        let preds = &m.constraints.predicates;
        for &p in &plan.pred_at_start {
            if !preds[p].eval_bool(&env)? {
                return Ok(vec![]);
            }
        }
        let decls = sig.endogenous();
        let mut out = vec![];
        let mut idx = vec![0usize; decls.len()];
        self.dfs(0, &plan, decls, ne, &mut env, &mut idx, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        depth: usize,
        plan: &Plan<'m>,
        decls: &'m [VarDecl],
        ne: usize,
        env: &mut PointEnv<'m>,
        idx: &mut Vec<usize>,
        out: &mut Vec<State>,
    ) -> Result<(), EvalError> {
        if depth == decls.len() {
            out.push(decls.iter().zip(idx.iter()).map(|(d, &i)| (d.name.clone(), d.range.get(i).clone())).collect());
            return Ok(());
        }
        let range = &decls[depth].range;
        let candidates = match &plan.steps[depth] {
            Step::Pinned(i) => *i..*i + 1,
            Step::Computed(name, eq) => {
                let v = eq.eval(name, &self.model.signature, env)?;
                match range.index_of(&v) {
                    Some(i) => i..i + 1,
                    None => return Ok(()),
                }
            }
            Step::Free => 0..range.len(),
        };
        'values: for i in candidates {
            env.vals[ne + depth] = Some(&range.values()[i]);
            idx[depth] = i;
            for &(name, eq, slot) in &plan.eq_checks[depth] {
                if Some(&eq.eval(name, &self.model.signature, env)?) != env.vals[slot] {
                    continue 'values;
                }
            }
            for &p in &plan.pred_checks[depth] {
                if !self.model.constraints.predicates[p].eval_bool(env)? {
                    continue 'values;
                }
            }
            self.dfs(depth + 1, plan, decls, ne, env, idx, out)?;
        }
        env.vals[ne + depth] = None;
        Ok(())
    }

    fn filter_listed(
        &self,
        listed: &'m [crate::model::ExtendedState],
        u: &Context,
        spec: &InterventionSpec,
        env: &mut PointEnv<'m>,
    ) -> Result<Vec<State>, EvalError> {
        let m = self.model;
        let sig = &m.signature;
        let ne = sig.exogenous().len();
        let mut keyed = vec![];
        let mut seen = HashSet::new();
        for es in listed {
            if es.context != *u {
                continue;
            }
            let mut key = Vec::with_capacity(sig.endogenous().len());
            for (i, d) in sig.endogenous().iter().enumerate() {
                let v = es.state.get(&d.name).expect("listed states are total");
                let k = d.range.index_of(v).expect("listed states are in range");
                env.vals[ne + i] = Some(&d.range.values()[k]);
                key.push(k);
            }
            if !seen.insert(key.clone()) {
                continue;
            }
            let mut ok = true;
            for (i, d) in sig.endogenous().iter().enumerate() {
                let expected = if let Some(v) = spec.assigned(&d.name) {
                    v.clone()
                } else if spec.disconnect.contains(&d.name) {
                    continue;
                } else if let Some(eq) = m.equations.get(&d.name) {
                    eq.eval(&d.name, sig, env)?
                } else {
                    continue;
                };
                if env.vals[ne + i] != Some(&expected) {
                    ok = false;
                    break;
                }
            }
            if ok {
                keyed.push((key, sig.ordered(&es.state, crate::model::VarKind::Endogenous)));
            }
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(keyed.into_iter().map(|(_, s)| s).collect())
    }
}

/// Orders a context by the signature; callers check totality and ranges first.
pub(crate) fn ordered_context(model: &ConstrainedModel, u: &Context) -> Assignment {
    model.signature.ordered(u, crate::model::VarKind::Exogenous)
}
