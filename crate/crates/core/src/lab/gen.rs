//! Seeded random signatures, models, contexts and formulas.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{BasicFormula, CausalFormula, InterventionSpec, Modality, StateFormula};
use crate::model::{
    ArithOp, CmpOp, ConstrainedModel, ConstraintSet, Context, Equation, EquationSet, Expr, ExtendedState,
    LogicOp, LookupTable, Signature, VarDecl,
};
use crate::value::{Range, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn endo_name(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("V{i}")
    }
}

/// `exogenous` variables `U1, U2, ..` and `endogenous` variables `A, B, ..`,
/// each ranging over `0..k-1` for a random `k` in `1..=max_range`.
pub fn random_signature(rng: &mut impl Rng, exogenous: usize, endogenous: usize, max_range: usize) -> Signature {
    let mut range = || Range::interval(0, rng.gen_range(1..=max_range.max(1)) as i64 - 1).expect("small");
    let exo = (0..exogenous).map(|i| (format!("U{}", i + 1), range())).collect();
    let endo = (0..endogenous).map(|i| (endo_name(i), range())).collect();
    Signature::new(exo, endo).expect("generated names are distinct")
}

/// One binary exogenous variable `U1` and two binary endogenous variables `A`, `B`.
pub fn tiny_signature() -> Signature {
    let bin = || Range::interval(0, 1).expect("small");
    Signature::new(vec![("U1".into(), bin())], vec![("A".into(), bin()), ("B".into(), bin())]).expect("valid")
}

/// Every variable except `var`, in slot order: the inputs of a generated table.
pub fn table_inputs(sig: &Signature, var: &str) -> Vec<String> {
    sig.exogenous()
        .iter()
        .chain(sig.endogenous())
        .filter(|d| d.name != var)
        .map(|d| d.name.clone())
        .collect()
}

fn random_table(rng: &mut impl Rng, sig: &Signature, decl: &VarDecl, inputs: Vec<String>) -> LookupTable {
    let rows: usize = inputs.iter().map(|n| sig.range(n).expect("declared").len()).product();
    let outputs = (0..rows).map(|_| decl.range.get(rng.gen_range(0..decl.range.len())).clone()).collect();
    LookupTable::new(inputs, outputs)
}

/// Each endogenous variable is undefined with probability `p_undefined`,
/// otherwise a uniform random table over all other variables. Each extended
/// state is in C with probability `p_state_in_c`; at 1 the model is
/// unconstrained.
pub fn random_model(sig: &Signature, seed: u64, p_undefined: f64, p_state_in_c: f64) -> ConstrainedModel {
    let mut rng = rng(seed);
    let mut equations = EquationSet::new();
    for d in sig.endogenous() {
        if rng.gen_bool(p_undefined.clamp(0.0, 1.0)) {
            continue;
        }
        let t = random_table(&mut rng, sig, d, table_inputs(sig, &d.name));
        equations.insert(d.name.clone(), Equation::Table(t));
    }
    let constraints = if p_state_in_c >= 1.0 {
        ConstraintSet::none()
    } else {
        let mut listed = vec![];
        for u in sig.contexts() {
            for v in sig.states() {
                if rng.gen_bool(p_state_in_c.max(0.0)) {
                    listed.push(ExtendedState::new(u.clone(), v));
                }
            }
        }
        ConstraintSet::extensional(listed)
    };
    ConstrainedModel::new(format!("random_{seed}"), sig.clone(), equations, constraints)
}

/// A total, acyclic, unconstrained model: each endogenous variable gets a
/// table over a random subset of the exogenous and earlier endogenous variables.
pub fn random_acyclic_model(sig: &Signature, seed: u64) -> ConstrainedModel {
    let mut rng = rng(seed);
    let mut equations = EquationSet::new();
    for (i, d) in sig.endogenous().iter().enumerate() {
        let inputs: Vec<String> = sig
            .exogenous()
            .iter()
            .chain(&sig.endogenous()[..i])
            .filter(|_| rng.gen_bool(0.6))
            .map(|d| d.name.clone())
            .collect();
        let t = random_table(&mut rng, sig, d, inputs);
        equations.insert(d.name.clone(), Equation::Table(t));
    }
    ConstrainedModel::new(format!("acyclic_{seed}"), sig.clone(), equations, ConstraintSet::none())
}

pub fn random_context(rng: &mut impl Rng, sig: &Signature) -> Context {
    sig.exogenous()
        .iter()
        .map(|d| (d.name.clone(), d.range.get(rng.gen_range(0..d.range.len())).clone()))
        .collect()
}

fn random_value(rng: &mut impl Rng, range: &Range) -> Value {
    range.get(rng.gen_range(0..range.len())).clone()
}

pub fn random_event(rng: &mut impl Rng, sig: &Signature) -> StateFormula {
    let Some(d) = sig.endogenous().choose(rng) else {
        return if rng.gen_bool(0.5) { StateFormula::True } else { StateFormula::False };
    };
    StateFormula::event(&d.name, random_value(rng, &d.range))
}

/// A state formula of connective depth at most `depth`.
pub fn random_state_formula(rng: &mut impl Rng, sig: &Signature, depth: usize) -> StateFormula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => StateFormula::True,
            1 => StateFormula::False,
            _ => random_event(rng, sig),
        };
    }
    let sub = |rng: &mut _| random_state_formula(rng, sig, depth - 1);
    match rng.gen_range(0..4) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        _ => sub(rng).implies(sub(rng)),
    }
}

/// A normalized intervention assigning up to `max_size` variables, and, with
/// `allow_disc`, disconnecting some of the others.
pub fn random_spec(rng: &mut impl Rng, sig: &Signature, max_size: usize, allow_disc: bool) -> InterventionSpec {
    let mut vars: Vec<&VarDecl> = sig.endogenous().iter().collect();
    vars.shuffle(rng);
    let n = rng.gen_range(0..=max_size.min(vars.len()));
    let (assigned, rest) = vars.split_at(n);
    let assignments = assigned.iter().map(|d| (d.name.clone(), random_value(rng, &d.range))).collect();
    let disconnect = if allow_disc {
        rest.iter().filter(|_| rng.gen_bool(0.4)).map(|d| d.name.clone()).collect()
    } else {
        vec![]
    };
    InterventionSpec { disconnect, assignments }.normalize(sig)
}

pub fn random_basic(rng: &mut impl Rng, sig: &Signature, body_depth: usize, max_size: usize, allow_disc: bool) -> BasicFormula {
    BasicFormula {
        modality: if rng.gen_bool(0.5) { Modality::Box } else { Modality::Diamond },
        spec: random_spec(rng, sig, max_size, allow_disc),
        body: random_state_formula(rng, sig, body_depth),
    }
}

/// A Boolean combination, of depth at most `depth`, of random basic formulas.
pub fn random_causal_formula(
    rng: &mut impl Rng,
    sig: &Signature,
    depth: usize,
    body_depth: usize,
    max_size: usize,
    allow_disc: bool,
) -> CausalFormula {
    if depth == 0 || rng.gen_bool(0.35) {
        return CausalFormula::Basic(random_basic(rng, sig, body_depth, max_size, allow_disc));
    }
    let sub = |rng: &mut _| random_causal_formula(rng, sig, depth - 1, body_depth, max_size, allow_disc);
    match rng.gen_range(0..4) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        _ => sub(rng).implies(sub(rng)),
    }
}

/// A random integer or symbolic signature for syntax tests.
pub fn random_mixed_signature(rng: &mut impl Rng, exogenous: usize, endogenous: usize) -> Signature {
    let symbols = ["red", "green", "blue", "low", "high"];
    let range = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.25) {
            let mut s = symbols.to_vec();
            s.shuffle(rng);
            let k = rng.gen_range(1..=s.len());
            Range::new(s[..k].iter().map(|n| Value::sym(n)).collect()).expect("distinct")
        } else {
            let lo = rng.gen_range(-5..5i64);
            Range::interval(lo, lo + rng.gen_range(0..6)).expect("small")
        }
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
    let exo = (0..exogenous).map(|i| (format!("U{}", i + 1), range(&mut r))).collect();
    let endo = (0..endogenous).map(|i| (endo_name(i), range(&mut r))).collect();
    Signature::new(exo, endo).expect("distinct names")
}

fn random_expr(rng: &mut impl Rng, sig: &Signature, depth: usize) -> Expr {
    let vars: Vec<&VarDecl> = sig.exogenous().iter().chain(sig.endogenous()).collect();
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Expr::int(rng.gen_range(-20..20)),
            1 => Expr::Bool(rng.gen_bool(0.5)),
            2 => {
                let d = vars.choose(rng).expect("non-empty signature");
                Expr::Lit(random_value(rng, &d.range))
            }
            _ => match vars.choose(rng) {
                Some(d) => Expr::var(&d.name),
                None => Expr::int(0),
            },
        };
    }
    let sub = |rng: &mut _| random_expr(rng, sig, depth - 1);
    match rng.gen_range(0..7) {
        0 => Expr::Neg(Box::new(sub(rng))),
        1 => Expr::Not(Box::new(sub(rng))),
        2 => {
            let op = *[ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div, ArithOp::Mod].choose(rng).expect("non-empty");
            Expr::arith(op, sub(rng), sub(rng))
        }
        3 => {
            let op = *[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge].choose(rng).expect("non-empty");
            Expr::cmp(op, sub(rng), sub(rng))
        }
        4 => {
            let op = *[LogicOp::And, LogicOp::Or, LogicOp::Implies].choose(rng).expect("non-empty");
            Expr::logic(op, sub(rng), sub(rng))
        }
        5 => Expr::ite(sub(rng), sub(rng), sub(rng)),
        _ => Expr::var(&vars.choose(rng).map(|d| d.name.clone()).unwrap_or_else(|| "A".into())),
    }
}

/// A model with random expression and table equations, predicates, or listed
/// states. It need not be well-formed; it exercises the concrete syntax.
pub fn random_syntax_model(seed: u64) -> ConstrainedModel {
    let mut rng = rng(seed);
    let n_exo = rng.gen_range(0..3);
    let n_endo = rng.gen_range(1..4);
    let sig = random_mixed_signature(&mut rng, n_exo, n_endo);
    let mut equations = EquationSet::new();
    for d in sig.endogenous() {
        match rng.gen_range(0..3) {
            0 => {}
            1 => {
                equations.insert(d.name.clone(), Equation::Expr(random_expr(&mut rng, &sig, 3)));
            }
            _ => {
                let mut inputs = table_inputs(&sig, &d.name);
                inputs.retain(|_| rng.gen_bool(0.5));
                let t = random_table(&mut rng, &sig, d, inputs);
                equations.insert(d.name.clone(), Equation::Table(t));
            }
        }
    }
    let constraints = if rng.gen_bool(0.3) {
        let n = rng.gen_range(0..4);
        let listed: Vec<ExtendedState> = (0..n)
            .map(|_| {
                let u = random_context(&mut rng, &sig);
                let v = sig
                    .endogenous()
                    .iter()
                    .map(|d| (d.name.clone(), random_value(&mut rng, &d.range)))
                    .collect();
                ExtendedState::new(u, v)
            })
            .collect();
        ConstraintSet::extensional(listed)
    } else {
        ConstraintSet::predicates((0..rng.gen_range(0..3)).map(|_| random_expr(&mut rng, &sig, 3)).collect())
    };
    ConstrainedModel::new(format!("Syntax{seed}"), sig, equations, constraints)
}
