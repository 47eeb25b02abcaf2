use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::gen::table_inputs;
use crate::formula::{normalize, subformulas, well_formed, BasicFormula, CausalFormula, Modality, StateFormula};
use crate::model::{
    ConstrainedModel, ConstraintSet, Context, Equation, EquationSet, ExtendedState, LookupTable, Signature,
    ValidationReport, VarDecl,
};

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    Exhaustive,
    /// Checks `ceil(fraction * total)` points drawn uniformly with replacement.
    Fraction { fraction: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelEnumerationConfig {
    /// Most (model, context) points that may be checked.
    pub budget: u128,
    pub sampling: Sampling,
}

impl Default for ModelEnumerationConfig {
    fn default() -> Self {
        ModelEnumerationConfig { budget: DEFAULT_BUDGET, sampling: Sampling::Exhaustive }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidityError {
    #[error("{count} model-context pairs exceed the budget of {budget}")]
    OverBudget { count: String, budget: u128 },
    #[error("{0} extended states is too many to enumerate constraint sets (at most 63)")]
    TooManyStates(String),
    #[error("formula is not well formed: {0}")]
    IllFormed(ValidationReport),
    #[error("sampling fraction must be in (0, 1], got {0}")]
    BadFraction(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub model: ConstrainedModel,
    pub context: Context,
    /// Position in the enumeration.
    pub index: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidityOutcome {
    /// True at every model and context over the signature.
    Valid { checked: u128 },
    /// No counterexample among the sampled points.
    NoneFound { checked: u128, total: u128 },
    Invalid(Box<Counterexample>),
}

/// Number of (equations, C, context) points over `sig`: every endogenous
/// variable is undefined or one of the tables over all other variables.
pub fn enumeration_count(sig: &Signature) -> Option<u128> {
    let ext = u32::try_from(sig.extended_state_count()?).ok()?;
    let mut count = 2u128.checked_pow(ext)?.checked_mul(sig.context_count()?)?;
    for d in sig.endogenous() {
        count = count.checked_mul(table_count(sig, d)?.checked_add(1)?)?;
    }
    Some(count)
}

fn table_rows(sig: &Signature, d: &VarDecl) -> Option<u128> {
    table_inputs(sig, &d.name)
        .iter()
        .try_fold(1u128, |acc, n| acc.checked_mul(sig.range(n).expect("declared").len() as u128))
}

fn table_count(sig: &Signature, d: &VarDecl) -> Option<u128> {
    (d.range.len() as u128).checked_pow(u32::try_from(table_rows(sig, d)?).ok()?)
}

enum Node {
    True,
    False,
    Basic(usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, basics: &[bool]) -> bool {
        match self {
            Node::True => true,
            Node::False => false,
            Node::Basic(i) => basics[*i],
            Node::Not(a) => !a.eval(basics),
            Node::And(a, b) => a.eval(basics) && b.eval(basics),
            Node::Or(a, b) => a.eval(basics) || b.eval(basics),
            Node::Implies(a, b) => !a.eval(basics) || b.eval(basics),
        }
    }
}

fn compile(f: &CausalFormula, basics: &[&BasicFormula]) -> Node {
    let bx = |g: &CausalFormula| Box::new(compile(g, basics));
    match f {
        CausalFormula::True => Node::True,
        CausalFormula::False => Node::False,
        CausalFormula::Basic(b) => Node::Basic(basics.iter().position(|c| *c == b).expect("collected")),
        CausalFormula::Not(a) => Node::Not(bx(a)),
        CausalFormula::And(a, b) => Node::And(bx(a), bx(b)),
        CausalFormula::Or(a, b) => Node::Or(bx(a), bx(b)),
        CausalFormula::Implies(a, b) => Node::Implies(bx(a), bx(b)),
    }
}

/// How a basic formula treats one endogenous variable.
#[derive(Clone, Copy)]
enum Role {
    Equation,
    Removed,
    Pinned(u64),
}

struct Compiled {
    modality: Modality,
    roles: Vec<Role>,
    body: u64,
}

struct Space {
    ext: usize,
    nctx: usize,
    /// Per endogenous variable: its slot, range size, table rows, and the
    /// table row each extended state falls in.
    vars: Vec<(usize, usize, u128, Vec<u128>)>,
    radices: Vec<u128>,
    ctxmask: Vec<u64>,
    digits: Vec<Vec<usize>>,
}

impl Space {
    fn new(sig: &Signature) -> Self {
        let sizes: Vec<usize> = (0..sig.slot_count()).map(|s| sig.decl_at_slot(s).range.len()).collect();
        let ext: usize = sizes.iter().product();
        let nexo = sig.exogenous().len();
        let nctx: usize = sizes[..nexo].iter().product();
        let digits: Vec<Vec<usize>> = (0..ext)
            .map(|mut i| {
                let mut d = vec![0; sizes.len()];
                for s in (0..sizes.len()).rev() {
                    d[s] = i % sizes[s];
                    i /= sizes[s];
                }
                d
            })
            .collect();
        let per_ctx = ext / nctx;
        let ctxmask = (0..nctx).map(|c| ((1u64 << per_ctx) - 1) << (c * per_ctx)).collect();
        let mut vars = vec![];
        let mut radices = vec![];
        for (k, d) in sig.endogenous().iter().enumerate() {
            let slot = nexo + k;
            let rows = table_rows(sig, d).expect("bounded by ext");
            let row_of = digits
                .iter()
                .map(|dg| (0..sizes.len()).filter(|&s| s != slot).fold(0u128, |r, s| r * sizes[s] as u128 + dg[s] as u128))
                .collect();
            vars.push((slot, sizes[slot], rows, row_of));
            radices.push(table_count(sig, d).expect("bounded by count") + 1);
        }
        Space { ext, nctx, vars, radices, ctxmask, digits }
    }

    fn table_indices(&self, mut eqidx: u128) -> Vec<u128> {
        let mut t = vec![0; self.radices.len()];
        for k in (0..self.radices.len()).rev() {
            t[k] = eqidx % self.radices[k];
            eqidx /= self.radices[k];
        }
        t
    }

    fn outputs(&self, k: usize, t: u128) -> Vec<usize> {
        let (_, size, rows, _) = &self.vars[k];
        let mut n = t - 1;
        let mut out = vec![0; *rows as usize];
        for r in (0..*rows as usize).rev() {
            out[r] = (n % *size as u128) as usize;
            n /= *size as u128;
        }
        out
    }

    fn defmask(&self, k: usize, t: u128) -> u64 {
        if t == 0 {
            return u64::MAX;
        }
        let (slot, _, _, row_of) = &self.vars[k];
        let out = self.outputs(k, t);
        (0..self.ext).filter(|&i| self.digits[i][*slot] == out[row_of[i] as usize]).fold(0, |m, i| m | 1 << i)
    }

    fn pinmask(&self, k: usize, v: usize) -> u64 {
        let slot = self.vars[k].0;
        (0..self.ext).filter(|&i| self.digits[i][slot] == v).fold(0, |m, i| m | 1 << i)
    }

    fn body_mask(&self, sig: &Signature, body: &StateFormula) -> u64 {
        (0..self.ext)
            .filter(|&i| {
                body.eval_with(&mut |e| {
                    let slot = sig.slot_of(&e.var).expect("well formed");
                    sig.decl_at_slot(slot).range.index_of(&e.value) == Some(self.digits[i][slot])
                })
            })
            .fold(0, |m, i| m | 1 << i)
    }
}

struct Checker {
    space: Space,
    basics: Vec<Compiled>,
    root: Node,
}

impl Checker {
    fn eqmasks(&self, eqidx: u128) -> Vec<u64> {
        let tables = self.space.table_indices(eqidx);
        let defs: Vec<u64> = tables.iter().enumerate().map(|(k, &t)| self.space.defmask(k, t)).collect();
        self.basics
            .iter()
            .map(|b| {
                b.roles.iter().enumerate().fold(u64::MAX, |m, (k, role)| match role {
                    Role::Equation => m & defs[k],
                    Role::Removed => m,
                    Role::Pinned(p) => m & p,
                })
            })
            .collect()
    }

    fn holds(&self, eqm: &[u64], c_set: u64, ctx: usize, truth: &mut [bool]) -> bool {
        let cm = c_set & self.space.ctxmask[ctx];
        for (i, b) in self.basics.iter().enumerate() {
            let sol = eqm[i] & cm;
            truth[i] = match b.modality {
                Modality::Box => sol & !b.body == 0,
                Modality::Diamond => sol & b.body != 0,
            };
        }
        self.root.eval(truth)
    }

    fn split(&self, index: u128) -> (u128, u64, usize) {
        let nctx = self.space.nctx as u128;
        let per_eq = (1u128 << self.space.ext) * nctx;
        let eqidx = index / per_eq;
        let rest = index % per_eq;
        (eqidx, (rest / nctx) as u64, (rest % nctx) as usize)
    }

    fn materialize(&self, sig: &Signature, index: u128) -> Counterexample {
        let (eqidx, c_set, ctx) = self.split(index);
        let mut equations = EquationSet::new();
        for (k, (d, t)) in sig.endogenous().iter().zip(self.space.table_indices(eqidx)).enumerate() {
            if t == 0 {
                continue;
            }
            let outputs = self.space.outputs(k, t).into_iter().map(|o| d.range.get(o).clone()).collect();
            equations.insert(d.name.clone(), Equation::Table(LookupTable::new(table_inputs(sig, &d.name), outputs)));
        }
        let decode = |i: usize| {
            let dg = &self.space.digits[i];
            let nexo = sig.exogenous().len();
            let context: Context =
                sig.exogenous().iter().zip(dg).map(|(x, &v)| (x.name.clone(), x.range.get(v).clone())).collect();
            let state =
                sig.endogenous().iter().zip(&dg[nexo..]).map(|(x, &v)| (x.name.clone(), x.range.get(v).clone())).collect();
            ExtendedState::new(context, state)
        };
        let listed = (0..self.space.ext).filter(|&i| c_set >> i & 1 == 1).map(decode).collect();
        let context = decode(ctx * (self.space.ext / self.space.nctx)).context;
        Counterexample {
            model: ConstrainedModel::new(format!("counterexample_{index}"), sig.clone(), equations, ConstraintSet::extensional(listed)),
            context,
            index,
        }
    }
}

/// Decides whether `f` holds at every constrained model over `sig` whose
/// equations are partial tables, at every context, by enumerating all of them.
pub fn check_validity(
    f: &CausalFormula,
    sig: &Signature,
    config: &ModelEnumerationConfig,
) -> Result<ValidityOutcome, ValidityError> {
    let report = well_formed(f, sig);
    if !report.is_valid() {
        return Err(ValidityError::IllFormed(report));
    }
    let ext = sig.extended_state_count();
    if ext.is_none_or(|e| e > 63) {
        return Err(ValidityError::TooManyStates(ext.map_or_else(|| "an overflowing number of".into(), |e| e.to_string())));
    }
    let total = enumeration_count(sig)
        .ok_or_else(|| ValidityError::OverBudget { count: "more than 2^128".into(), budget: config.budget })?;
    let checked = match config.sampling {
        Sampling::Exhaustive => total,
        Sampling::Fraction { fraction, .. } => {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(ValidityError::BadFraction(fraction.to_string()));
            }
            ((total as f64 * fraction).ceil() as u128).clamp(1, total)
        }
    };
    if checked > config.budget {
        return Err(ValidityError::OverBudget { count: checked.to_string(), budget: config.budget });
    }

    let f = normalize(f, sig);
    let space = Space::new(sig);
    let basic_refs = subformulas(&f);
    let mut distinct: Vec<&BasicFormula> = vec![];
    for b in basic_refs {
        if !distinct.contains(&b) {
            distinct.push(b);
        }
    }
    let basics = distinct
        .iter()
        .map(|b| Compiled {
            modality: b.modality,
            roles: sig
                .endogenous()
                .iter()
                .enumerate()
                .map(|(k, d)| match b.spec.assigned(&d.name) {
                    Some(v) => Role::Pinned(space.pinmask(k, d.range.index_of(v).expect("well formed"))),
                    None if b.spec.disconnect.contains(&d.name) => Role::Removed,
                    None => Role::Equation,
                })
                .collect(),
            body: space.body_mask(sig, &b.body),
        })
        .collect();
    let checker = Checker { root: compile(&f, &distinct), space, basics };

    let found = match config.sampling {
        Sampling::Exhaustive => {
            let visited = AtomicU64::new(0);
            let eq_count: u128 = checker.space.radices.iter().product();
            let subsets = 1u64 << checker.space.ext;
            let nctx = checker.space.nctx;
            let found = (0..eq_count as u64).into_par_iter().find_map_first(|eqidx| {
                let eqm = checker.eqmasks(eqidx as u128);
                let mut truth = vec![false; checker.basics.len()];
                let mut n = 0u64;
                for c_set in 0..subsets {
                    for ctx in 0..nctx {
                        n += 1;
                        if !checker.holds(&eqm, c_set, ctx, &mut truth) {
                            visited.fetch_add(n, Ordering::Relaxed);
                            return Some((eqidx as u128 * subsets as u128 + c_set as u128) * nctx as u128 + ctx as u128);
                        }
                    }
                }
                visited.fetch_add(n, Ordering::Relaxed);
                None
            });
            if found.is_none() {
                assert_eq!(visited.into_inner() as u128, total, "enumeration missed points");
            }
            found
        }
        Sampling::Fraction { seed, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut points: Vec<u128> = (0..checked).map(|_| rng.gen_range(0..total)).collect();
            points.sort_unstable();
            points.par_iter().find_map_first(|&index| {
                let (eqidx, c_set, ctx) = checker.split(index);
                let mut truth = vec![false; checker.basics.len()];
                (!checker.holds(&checker.eqmasks(eqidx), c_set, ctx, &mut truth)).then_some(index)
            })
        }
    };
    Ok(match (found, config.sampling) {
        (Some(index), _) => ValidityOutcome::Invalid(Box::new(checker.materialize(sig, index))),
        (None, Sampling::Exhaustive) => ValidityOutcome::Valid { checked },
        (None, Sampling::Fraction { .. }) => ValidityOutcome::NoneFound { checked, total },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::gen::tiny_signature;
    use crate::semantics::evaluate;
    use crate::syntax::parse_formula;

    fn check(text: &str) -> ValidityOutcome {
        let sig = tiny_signature();
        check_validity(&parse_formula(text, &sig).unwrap(), &sig, &ModelEnumerationConfig::default()).unwrap()
    }

    #[test]
    fn tiny_count() {
        assert_eq!(enumeration_count(&tiny_signature()), Some(147_968));
    }

    #[test]
    fn box_true_is_valid() {
        assert_eq!(check("[A <- 0]true"), ValidityOutcome::Valid { checked: 147_968 });
    }

    #[test]
    fn diamond_true_fails_with_empty_c() {
        let ValidityOutcome::Invalid(cx) = check("<A <- 0>true") else { panic!() };
        assert_eq!(cx.index, 0);
        assert!(cx.model.equations.is_empty());
        assert_eq!(cx.model.constraints.extensional.as_deref(), Some(&[][..]));
    }

    #[test]
    fn counterexamples_are_real() {
        let sig = tiny_signature();
        let f = parse_formula("(<B <- 0>true) & (<B <- 0>(A = 0) -> [B <- 0](A = 0))", &sig).unwrap();
        let g = parse_formula("[B <- 0](A = 0) | [B <- 0](A = 1)", &sig).unwrap();
        for f in [f, g] {
            let ValidityOutcome::Invalid(cx) = check_validity(&f, &sig, &Default::default()).unwrap() else { panic!() };
            assert_eq!(evaluate(&cx.model, &cx.context, &f), Ok(false));
        }
    }

    #[test]
    fn sampling_and_budget() {
        let sig = tiny_signature();
        let f = parse_formula("[A <- 0]true", &sig).unwrap();
        let cfg = ModelEnumerationConfig { budget: 1000, sampling: Sampling::Fraction { fraction: 0.005, seed: 3 } };
        assert_eq!(check_validity(&f, &sig, &cfg), Ok(ValidityOutcome::NoneFound { checked: 740, total: 147_968 }));
        let tight = ModelEnumerationConfig { budget: 1000, sampling: Sampling::Exhaustive };
        assert!(matches!(check_validity(&f, &sig, &tight), Err(ValidityError::OverBudget { .. })));
    }
}
