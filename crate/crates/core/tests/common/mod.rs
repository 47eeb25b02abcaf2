#![allow(dead_code)]

use ccm_core::formula::{BasicFormula, CausalFormula, InterventionSpec, Modality, StateFormula};
use ccm_core::model::{Assignment, ConstrainedModel, Context, Equation, Signature, State};
use ccm_core::value::Value;

/// Classic semantics for total acyclic table models: every variable not
/// assigned by `spec` is computed from its table, in declaration order.
pub fn forward_eval(m: &ConstrainedModel, u: &Context, spec: &InterventionSpec) -> State {
    let sig = &m.signature;
    let mut env: Vec<(String, Value)> = u.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    for d in sig.endogenous() {
        let value = match spec.assigned(&d.name) {
            Some(v) => v.clone(),
            None => {
                let Some(Equation::Table(t)) = m.equations.get(&d.name) else { panic!("table models only") };
                let mut row = 0;
                for input in &t.inputs {
                    let r = sig.range(input).unwrap();
                    let v = &env.iter().find(|(n, _)| n == input).expect("input computed earlier").1;
                    row = row * r.len() + r.values().iter().position(|x| x == v).unwrap();
                }
                t.outputs[row].clone()
            }
        };
        env.push((d.name.clone(), value));
    }
    sig.endogenous().iter().map(|d| (d.name.clone(), env.iter().find(|(n, _)| *n == d.name).unwrap().1.clone())).collect()
}

/// Every spec that assigns some endogenous variables and disconnects none.
pub fn all_plain_specs(sig: &Signature) -> Vec<InterventionSpec> {
    let mut specs = vec![InterventionSpec::empty()];
    for d in sig.endogenous() {
        let mut next = vec![];
        for s in &specs {
            next.push(s.clone());
            for v in d.range.values() {
                let mut t = s.clone();
                t.assignments.push((d.name.clone(), v.clone()));
                next.push(t);
            }
        }
        specs = next;
    }
    specs
}

pub fn holds(f: &StateFormula, v: &Assignment) -> bool {
    match f {
        StateFormula::True => true,
        StateFormula::False => false,
        StateFormula::Event(e) => v.get(&e.var) == Some(&e.value),
        StateFormula::Not(a) => !holds(a, v),
        StateFormula::And(a, b) => holds(a, v) && holds(b, v),
        StateFormula::Or(a, b) => holds(a, v) || holds(b, v),
        StateFormula::Implies(a, b) => !holds(a, v) || holds(b, v),
    }
}

/// Truth of `f` given a function producing the solutions of each basic formula.
pub fn eval_with_solutions(f: &CausalFormula, sols: &mut impl FnMut(&BasicFormula) -> Vec<State>) -> bool {
    match f {
        CausalFormula::True => true,
        CausalFormula::False => false,
        CausalFormula::Basic(b) => {
            let s = sols(b);
            match b.modality {
                Modality::Box => s.iter().all(|v| holds(&b.body, v)),
                Modality::Diamond => s.iter().any(|v| holds(&b.body, v)),
            }
        }
        CausalFormula::Not(a) => !eval_with_solutions(a, sols),
        CausalFormula::And(a, b) => eval_with_solutions(a, sols) && eval_with_solutions(b, sols),
        CausalFormula::Or(a, b) => eval_with_solutions(a, sols) || eval_with_solutions(b, sols),
        CausalFormula::Implies(a, b) => !eval_with_solutions(a, sols) || eval_with_solutions(b, sols),
    }
}

pub fn int(v: &Value) -> i64 {
    v.as_i64().unwrap()
}

/// Smallest r with x^2 + y^2 <= r^2.
pub fn ceil_radius(x: i64, y: i64) -> i64 {
    (0..).find(|r| r * r >= x * x + y * y).unwrap()
}

/// Number of the lines y = x/3, x/2, x, 2x, 3x strictly below (x, y).
pub fn angle_class(x: i64, y: i64) -> i64 {
    [(1, 3), (1, 2), (1, 1), (2, 1), (3, 1)].iter().filter(|&&(p, q)| q * y > p * x).count() as i64
}
