use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::gen::{random_basic, random_state_formula, rng};
use super::AxiomSchema;
use crate::formula::{BasicFormula, CausalFormula, InterventionSpec, StateFormula};
use crate::model::{Odometer, Signature, VarDecl};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstantiationBounds {
    /// Largest number of variables an instance intervenes on.
    pub max_set_size: usize,
    /// Connective depth of the state formulas substituted for φ and ψ.
    pub max_depth: usize,
    pub max_instances: usize,
    pub seed: u64,
}

impl Default for InstantiationBounds {
    fn default() -> Self {
        InstantiationBounds { max_set_size: 2, max_depth: 2, max_instances: 40, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("{schema} needs {needed} endogenous variables, the signature has {found}")]
    SignatureTooSmall { schema: AxiomSchema, needed: usize, found: usize },
    #[error("{schema} needs a variable with at least two values")]
    RangesTooSmall { schema: AxiomSchema },
    #[error("bounds must be positive")]
    BadBounds,
}

/// Distinct instances of `schema` over `sig`, drawn at random under `bounds`.
/// Equal seeds give equal lists.
pub fn instantiate(
    schema: AxiomSchema,
    sig: &Signature,
    bounds: &InstantiationBounds,
) -> Result<Vec<CausalFormula>, InstantiateError> {
    if bounds.max_set_size == 0 || bounds.max_depth == 0 || bounds.max_instances == 0 {
        return Err(InstantiateError::BadBounds);
    }
    let endo = sig.endogenous();
    let needed = match schema {
        AxiomSchema::D0 | AxiomSchema::D8 => 0,
        AxiomSchema::D5 => 2,
        _ => 1,
    };
    if endo.len() < needed {
        return Err(InstantiateError::SignatureTooSmall { schema, needed, found: endo.len() });
    }
    if matches!(schema, AxiomSchema::D1 | AxiomSchema::D9p) && endo.iter().all(|d| d.range.len() < 2) {
        return Err(InstantiateError::RangesTooSmall { schema });
    }
    let mut rng = rng(bounds.seed ^ (schema as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut seen = HashSet::new();
    let mut out = vec![];
    let mut attempts = 0;
    while out.len() < bounds.max_instances && attempts < bounds.max_instances * 20 {
        attempts += 1;
        let f = one(schema, sig, bounds, &mut rng);
        if seen.insert(f.clone()) {
            out.push(f);
        }
    }
    Ok(out)
}

fn value(rng: &mut impl Rng, d: &VarDecl) -> Value {
    d.range.get(rng.gen_range(0..d.range.len())).clone()
}

/// Random assignments to up to `max` of `vars`, normalized.
fn assign(rng: &mut impl Rng, sig: &Signature, vars: &[&VarDecl], min: usize, max: usize) -> InterventionSpec {
    let mut vars = vars.to_vec();
    vars.shuffle(rng);
    let n = rng.gen_range(min.min(vars.len())..=max.min(vars.len()));
    InterventionSpec::set(vars[..n].iter().map(|d| (d.name.clone(), value(rng, d)))).normalize(sig)
}

fn with(spec: &InterventionSpec, sig: &Signature, var: &str, v: Value) -> InterventionSpec {
    let mut s = spec.clone();
    s.assignments.push((var.to_string(), v));
    s.normalize(sig)
}

fn boxed(spec: &InterventionSpec, body: StateFormula) -> CausalFormula {
    CausalFormula::boxed(spec.clone(), body)
}

fn diamond(spec: &InterventionSpec, body: StateFormula) -> CausalFormula {
    CausalFormula::diamond(spec.clone(), body)
}

/// `Y = V - {X}` with random values, plus `X`.
fn all_but_one<'s>(rng: &mut impl Rng, sig: &'s Signature, need_two: bool) -> (&'s VarDecl, InterventionSpec) {
    let endo = sig.endogenous();
    let candidates: Vec<&VarDecl> = endo.iter().filter(|d| !need_two || d.range.len() >= 2).collect();
    let x = *candidates.choose(rng).expect("checked by caller");
    let others: Vec<&VarDecl> = endo.iter().filter(|d| d.name != x.name).collect();
    let n = others.len();
    (x, assign(rng, sig, &others, n, n))
}

fn one(schema: AxiomSchema, sig: &Signature, b: &InstantiationBounds, rng: &mut impl Rng) -> CausalFormula {
    let endo: Vec<&VarDecl> = sig.endogenous().iter().collect();
    let k = b.max_set_size;
    let phi = |rng: &mut _| random_state_formula(rng, sig, b.max_depth);
    match schema {
        AxiomSchema::D0 => tautology_instance(rng, sig, b),
        AxiomSchema::D1 => {
            let x = *endo.iter().filter(|d| d.range.len() >= 2).collect::<Vec<_>>().choose(rng).expect("checked");
            let i = rng.gen_range(0..x.range.len());
            let j = (i + rng.gen_range(1..x.range.len())) % x.range.len();
            let y = assign(rng, sig, &endo, 0, k);
            let e = |i| StateFormula::event(&x.name, x.range.get(i).clone());
            boxed(&y, e(i).implies(e(j).not()))
        }
        AxiomSchema::D2 => {
            let x = *endo.choose(rng).expect("checked");
            let y = assign(rng, sig, &endo, 0, k);
            boxed(&y, StateFormula::any(x.range.values().iter().map(|v| StateFormula::event(&x.name, v.clone()))))
        }
        AxiomSchema::D3 => {
            let w = *endo.choose(rng).expect("checked");
            let rest: Vec<&VarDecl> = endo.iter().copied().filter(|d| d.name != w.name).collect();
            let x = assign(rng, sig, &rest, 0, k);
            let wv = value(rng, w);
            let p = phi(rng);
            diamond(&x, StateFormula::event(&w.name, wv.clone()).and(p.clone())).implies(diamond(&with(&x, sig, &w.name, wv), p))
        }
        AxiomSchema::D4 => {
            let x = assign(rng, sig, &endo, 1, k);
            let body = StateFormula::all(x.assignments.iter().map(|(n, v)| StateFormula::event(n, v.clone())));
            boxed(&x, body)
        }
        AxiomSchema::D5 => {
            let mut pick = endo.clone();
            pick.shuffle(rng);
            let (w, y) = (pick[0], pick[1]);
            let rest: Vec<&VarDecl> = pick[2..].to_vec();
            let x = assign(rng, sig, &rest, 0, k);
            let (wv, yv) = (value(rng, w), value(rng, y));
            let z: Vec<(String, Value)> = rest
                .iter()
                .filter(|d| x.assigned(&d.name).is_none())
                .map(|d| (d.name.clone(), value(rng, d)))
                .collect();
            let zf = StateFormula::all(z.iter().map(|(n, v)| StateFormula::event(n, v.clone())));
            let (we, ye) = (StateFormula::event(&w.name, wv.clone()), StateFormula::event(&y.name, yv.clone()));
            let left = diamond(&with(&x, sig, &y.name, yv), we.clone().and(zf.clone()))
                .and(diamond(&with(&x, sig, &w.name, wv), ye.clone().and(zf.clone())));
            left.implies(diamond(&x, we.and(ye).and(zf)))
        }
        AxiomSchema::D7 => {
            let x = assign(rng, sig, &endo, 0, k);
            let (p, q) = (phi(rng), phi(rng));
            boxed(&x, p.clone()).and(boxed(&x, p.implies(q.clone()))).implies(boxed(&x, q))
        }
        AxiomSchema::D8 => {
            let x = assign(rng, sig, &endo, 0, k);
            boxed(&x, state_tautology(rng, sig, b))
        }
        AxiomSchema::D9 => {
            let y = if rng.gen_bool(0.5) {
                let n = endo.len();
                assign(rng, sig, &endo, n, n)
            } else {
                all_but_one(rng, sig, false).1
            };
            let p = phi(rng);
            diamond(&y, StateFormula::True).and(diamond(&y, p.clone()).implies(boxed(&y, p)))
        }
        AxiomSchema::D9p => {
            let (x, y) = all_but_one(rng, sig, true);
            let n = x.range.len();
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            let others: Vec<&VarDecl> = endo.iter().copied().filter(|d| d.name != x.name).collect();
            let m = others.len();
            let ystar = assign(rng, sig, &others, m, m);
            let x2 = value(rng, x);
            let e = |v: Value| StateFormula::event(&x.name, v);
            diamond(&y, e(x.range.get(i).clone()))
                .and(diamond(&y, e(x.range.get(j).clone())))
                .and(diamond(&with(&ystar, sig, &x.name, x2.clone()), StateFormula::True))
                .implies(diamond(&ystar, e(x2)))
        }
        AxiomSchema::D9pp => {
            let (x, y) = all_but_one(rng, sig, false);
            let premises = x.range.values().iter().map(|v| diamond(&with(&y, sig, &x.name, v.clone()), StateFormula::True));
            CausalFormula::all(premises).implies(diamond(&y, StateFormula::True))
        }
        AxiomSchema::Dsc => {
            let mut vars = endo.clone();
            vars.shuffle(rng);
            let n = rng.gen_range(1..=k.min(vars.len()));
            let (disc, rest) = vars.split_at(n);
            let y = assign(rng, sig, rest, 0, k);
            let spec = InterventionSpec { disconnect: disc.iter().map(|d| d.name.clone()).collect(), assignments: y.assignments.clone() }
                .normalize(sig);
            let p = phi(rng);
            let ranges: Vec<&VarDecl> = spec.disconnect.iter().map(|n| *endo.iter().find(|d| d.name == *n).expect("endogenous")).collect();
            let parts = Odometer::new(ranges.iter().map(|d| d.range.len()).collect()).map(|idx| {
                let mut s = y.clone();
                for (d, &i) in ranges.iter().zip(&idx) {
                    s.assignments.push((d.name.clone(), d.range.get(i).clone()));
                }
                boxed(&s.normalize(sig), p.clone())
            });
            boxed(&spec, p.clone()).iff(CausalFormula::all(parts))
        }
    }
}

/// Propositional tautology templates over atoms `p`, `q`, `r`.
const TEMPLATES: usize = 8;

#[allow(clippy::too_many_arguments)]
fn template<T: Clone>(
    i: usize,
    p: T,
    q: T,
    r: T,
    not: impl Fn(T) -> T,
    and: impl Fn(T, T) -> T,
    or: impl Fn(T, T) -> T,
    imp: impl Fn(T, T) -> T,
) -> T {
    match i {
        0 => or(p.clone(), not(p)),
        1 => imp(p.clone(), imp(q, p)),
        2 => imp(
            imp(p.clone(), imp(q.clone(), r.clone())),
            imp(imp(p.clone(), q), imp(p, r)),
        ),
        3 => imp(imp(not(p.clone()), not(q.clone())), imp(q, p)),
        4 => imp(and(p.clone(), q), p),
        5 => imp(p.clone(), or(p, q)),
        6 => {
            let lhs = not(and(p.clone(), q.clone()));
            let rhs = or(not(p), not(q));
            and(imp(lhs.clone(), rhs.clone()), imp(rhs, lhs))
        }
        _ => imp(not(not(p.clone())), p),
    }
}

fn tautology_instance(rng: &mut impl Rng, sig: &Signature, b: &InstantiationBounds) -> CausalFormula {
    let atom = |rng: &mut _| -> CausalFormula {
        let basic: BasicFormula = random_basic(rng, sig, b.max_depth, b.max_set_size, true);
        CausalFormula::Basic(basic)
    };
    let (p, q, r) = (atom(rng), atom(rng), atom(rng));
    let f = template(
        rng.gen_range(0..TEMPLATES),
        p,
        q,
        r,
        CausalFormula::not,
        CausalFormula::and,
        CausalFormula::or,
        CausalFormula::implies,
    );
    debug_assert!(is_tautology(&f));
    f
}

fn state_tautology(rng: &mut impl Rng, sig: &Signature, b: &InstantiationBounds) -> StateFormula {
    let sub = |rng: &mut _| random_state_formula(rng, sig, b.max_depth.saturating_sub(1));
    let (p, q, r) = (sub(rng), sub(rng), sub(rng));
    template(
        rng.gen_range(0..TEMPLATES),
        p,
        q,
        r,
        StateFormula::not,
        StateFormula::and,
        StateFormula::or,
        StateFormula::implies,
    )
}

/// True if `f` is true under every valuation of its basic subformulas,
/// treated as independent propositional atoms.
pub fn is_tautology(f: &CausalFormula) -> bool {
    let mut atoms: Vec<&BasicFormula> = vec![];
    for b in crate::formula::subformulas(f) {
        if !atoms.contains(&b) {
            atoms.push(b);
        }
    }
    if atoms.len() > 16 {
        return false;
    }
    (0u32..1 << atoms.len()).all(|bits| {
        f.eval_with(&mut |b| {
            let i = atoms.iter().position(|a| *a == b).expect("collected above");
            Ok::<_, ()>(bits >> i & 1 == 1)
        })
        .expect("infallible")
    })
}
