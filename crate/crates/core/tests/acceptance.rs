mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ccm_core::fixtures;
use ccm_core::formula::{CausalFormula, InterventionSpec, StateFormula};
use ccm_core::lab::{check_soundness, check_validity, gen, instantiate, AxiomSchema, InstantiationBounds, ValidityOutcome};
use ccm_core::model::ConstrainedModel;
use ccm_core::rewrite::eliminate_disc;
use ccm_core::semantics::{evaluate, Evaluator};
use ccm_core::syntax::{
    parse_context, parse_formula, parse_model, parse_model_unchecked, parse_spec, render_formula, render_model,
};
use ccm_core::value::Value;
use common::{angle_class, ceil_radius, int};
use rand::Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn temperature() -> Result<String, String> {
    let m = parse_model(fixtures::TEMPERATURE).map_err(|e| e.to_string())?;
    let ev = Evaluator::new(&m);
    let u = parse_context("U=35").unwrap();
    let q = |text: &str| {
        let f = parse_formula(text, &m.signature).unwrap();
        ev.evaluate_traced(&u, &f).unwrap()
    };
    ensure(q("<TC <- 40>(HS=1)").0, || "<TC <- 40>(HS=1) is false".into())?;
    let (v, trace) = q("[TF <- 104](HS=0)");
    ensure(v && trace[0].1.is_empty(), || "[TF <- 104](HS=0) is not vacuously true".into())?;
    ensure(!q("<TF <- 104>(HS=1)").0, || "<TF <- 104>(HS=1) is true".into())?;
    let (v, trace) = q("<disc(TC), TF <- 104>(HS=1)");
    let sols: Vec<String> = trace[0].1.iter().map(ToString::to_string).collect();
    ensure(v && sols == ["TC=40, TF=104, HS=1"], || format!("disc(TC) gave {v} with {sols:?}"))?;
    Ok("4 queries".into())
}

fn cholesterol() -> Result<String, String> {
    let m = parse_model(fixtures::CHOLESTEROL).map_err(|e| e.to_string())?;
    let ev = Evaluator::new(&m);
    let sig = &m.signature;
    let vals = |n: &str| sig.range(n).unwrap().values().iter().map(int).collect::<Vec<_>>();
    let bodies = ["false", "AS = 0", "AS = 2 & TRI = 1", "!(LDL = 2)"];
    let mut vacuous = 0;
    for u in sig.contexts() {
        for &h in &vals("HDL") {
            for &l in &vals("LDL") {
                for &v in &vals("VLDL") {
                    for &t in &vals("TOT") {
                        if t == h + l + v {
                            continue;
                        }
                        for body in bodies {
                            let f = parse_formula(&format!("[HDL <- {h}, LDL <- {l}, VLDL <- {v}, TOT <- {t}]({body})"), sig).unwrap();
                            ensure(ev.evaluate(&u, &f) == Ok(true), || format!("{f} false at {u}"))?;
                            vacuous += 1;
                        }
                    }
                }
            }
        }
    }
    let mut unique = 0;
    let mut ambiguous = 0;
    for u in sig.contexts() {
        let d = int(u.get("U").unwrap());
        let (hdl, ldl, vldl) = (5 - d, 3 + d, 2 + d);
        for tot in vals("TOT") {
            let spec = parse_spec(&format!("disc(LDL), TOT <- {tot}"), sig).unwrap().normalize(sig);
            let got: Vec<(i64, i64, i64)> = ev
                .solutions(&u, &spec)
                .unwrap()
                .iter()
                .map(|s| (int(s.get("HDL").unwrap()), int(s.get("LDL").unwrap()), int(s.get("VLDL").unwrap())))
                .collect();
            let want: Vec<_> = [(hdl, tot - hdl - vldl, vldl)].into_iter().filter(|t| (2..=7).contains(&t.1)).collect();
            ensure(got == want, || format!("disc(LDL), TOT <- {tot} at {u}: {got:?}"))?;
            if tot > hdl + ldl + vldl {
                ensure(got.len() == 1, || format!("no unique solution for tot' = {tot} at {u}"))?;
                ensure(ev.solutions(&u, &InterventionSpec::set([("TOT", Value::int(tot))])).unwrap().is_empty(), || {
                    format!("TOT <- {tot} without disc is consistent at {u}")
                })?;
                unique += 1;
            }

            let spec = parse_spec(&format!("disc(LDL, HDL, VLDL), TOT <- {tot}"), sig).unwrap().normalize(sig);
            let got: BTreeSet<(i64, i64, i64)> = ev
                .solutions(&u, &spec)
                .unwrap()
                .iter()
                .map(|s| (int(s.get("HDL").unwrap()), int(s.get("LDL").unwrap()), int(s.get("VLDL").unwrap())))
                .collect();
            let mut brute = BTreeSet::new();
            for h in 2..=6 {
                for l in 2..=7 {
                    for v in 1..=5 {
                        if h + l + v == tot {
                            brute.insert((h, l, v));
                        }
                    }
                }
            }
            ensure(got == brute, || format!("ambiguous intervention TOT <- {tot} at {u}: {} vs {}", got.len(), brute.len()))?;
            ambiguous += got.len();
        }
    }
    Ok(format!("{vacuous} vacuous boxes, {unique} unique, {ambiguous} ambiguous solutions"))
}

/// Solutions of `disc(a, b), X <- x` at (ux, uy) from first principles: the
/// variables not disconnected keep their causal values, the rest are whatever
/// the constraints allow.
fn geometry_oracle(ux: i64, uy: i64, x: i64, disc: [&str; 2]) -> BTreeSet<[i64; 4]> {
    let mut out = BTreeSet::new();
    for y in 1..=12 {
        for r in 1..=17 {
            for t in 0..=5 {
                let causal = [("Y", y == uy), ("R", r == ceil_radius(ux, uy)), ("THETA", t == angle_class(ux, uy))];
                let eqs = causal.iter().all(|(n, ok)| disc.contains(n) || *ok);
                let c = (r - 1) * (r - 1) < x * x + y * y && x * x + y * y <= r * r && t == angle_class(x, y);
                if eqs && c {
                    out.insert([x, y, r, t]);
                }
            }
        }
    }
    out
}

fn geometry() -> Result<String, String> {
    let m = parse_model(fixtures::GEOMETRY).map_err(|e| e.to_string())?;
    let ev = Evaluator::new(&m);
    let sig = &m.signature;
    let styles = [["R", "THETA"], ["Y", "R"], ["Y", "THETA"]];
    let mut distinct = 0;
    let mut checked = 0;
    for u in sig.contexts() {
        let (ux, uy) = (int(u.get("UX").unwrap()), int(u.get("UY").unwrap()));
        for x in 1..=12 {
            let f = parse_formula(&format!("<disc(Y, THETA), X <- {x}>true"), sig).unwrap();
            let v = ev.evaluate(&u, &f).unwrap();
            ensure(v == (x * x < ux * ux + uy * uy), || format!("{f} is {v} at {u}"))?;
            let mut sets = vec![];
            for style in styles {
                let spec = parse_spec(&format!("disc({}, {}), X <- {x}", style[0], style[1]), sig).unwrap().normalize(sig);
                let got: BTreeSet<[i64; 4]> = ev
                    .solutions(&u, &spec)
                    .unwrap()
                    .iter()
                    .map(|s| ["X", "Y", "R", "THETA"].map(|n| int(s.get(n).unwrap())))
                    .collect();
                let want = geometry_oracle(ux, uy, x, style);
                ensure(got == want, || format!("{spec} at {u}: {got:?} vs {want:?}"))?;
                sets.push(got);
                checked += 1;
            }
            if sets[0] != sets[1] && sets[1] != sets[2] && sets[0] != sets[2] {
                distinct += 1;
            }
        }
    }
    let u = parse_context("UX=3, UY=4").unwrap();
    let at = |style: [&str; 2]| {
        let spec = parse_spec(&format!("disc({}, {}), X <- 6", style[0], style[1]), sig).unwrap().normalize(sig);
        ev.solutions(&u, &spec).unwrap().states
    };
    let (a, b, c) = (at(styles[0]), at(styles[1]), at(styles[2]));
    ensure(a != b && b != c && a != c, || "the three styles agree at UX=3, UY=4, X <- 6".into())?;
    ensure(distinct > 0, || "styles never pairwise distinct".into())?;
    Ok(format!("{checked} solution sets, {distinct} points with three distinct sets"))
}

fn dsc_metamorphic() -> Result<String, String> {
    let mut rng = gen::rng(2024);
    let mut with_disc = 0;
    for i in 0..1000 {
        let exo = rng.gen_range(0..=2);
        let endo = rng.gen_range(1..=3);
        let sig = gen::random_signature(&mut rng, exo, endo, 3);
        let p_c = if rng.gen_bool(0.2) { 1.0 } else { rng.gen_range(0.2..0.9) };
        let m = gen::random_model(&sig, rng.gen(), rng.gen_range(0.0..0.6), p_c);
        let u = gen::random_context(&mut rng, &sig);
        let f = gen::random_causal_formula(&mut rng, &sig, 2, 2, 2, true);
        with_disc += usize::from(ccm_core::rewrite::has_disc(&f));
        let g = eliminate_disc(&f, &sig).map_err(|e| e.to_string())?;
        let (a, b) = (evaluate(&m, &u, &f), evaluate(&m, &u, &g));
        ensure(a == b && a.is_ok(), || format!("case {i}: {f} gave {a:?}, rewritten {b:?}"))?;
    }
    Ok(format!("1000 triples, {with_disc} with disc"))
}

fn soundness_sweep() -> Result<String, String> {
    let sig = gen::tiny_signature();
    let models: Vec<ConstrainedModel> = (0..200).map(|i| gen::random_model(&sig, 7 + i, 0.3, 0.5)).collect();
    let bounds = InstantiationBounds { seed: 7, ..Default::default() };
    let r = check_soundness(&models, &AxiomSchema::SOUND, &bounds);
    let skipped: Vec<_> = r.schemas.iter().filter(|s| !s.skipped.is_empty() || s.instances == 0).map(|s| s.schema).collect();
    ensure(skipped.is_empty(), || format!("schemas without instances: {skipped:?}"))?;
    ensure(r.is_sound(), || format!("{} violations, first {:?}", r.violations.len(), r.violations.first()))?;
    let evals: u64 = r.schemas.iter().map(|s| s.evaluations).sum();
    Ok(format!("{evals} evaluations over 11 schemas, 0 violations"))
}

fn d9_witness() -> Result<String, String> {
    let sig = gen::tiny_signature();
    let cfg = Default::default();
    let old = parse_formula(fixtures::OLD_D9_INSTANCE.trim(), &sig).unwrap();
    let ValidityOutcome::Invalid(cx) = check_validity(&old, &sig, &cfg).map_err(|e| e.to_string())? else {
        return Err("no counterexample to the old D9 instance".into());
    };
    let reparsed = parse_model(&render_model(&cx.model)).map_err(|e| e.to_string())?;
    ensure(evaluate(&reparsed, &cx.context, &old) == Ok(false), || "counterexample does not reproduce".into())?;

    let mut valid = 0;
    let bounds = InstantiationBounds { max_instances: 6, seed: 7, ..Default::default() };
    for schema in [AxiomSchema::D9p, AxiomSchema::D9pp, AxiomSchema::Dsc] {
        for f in instantiate(schema, &sig, &bounds).map_err(|e| e.to_string())? {
            match check_validity(&f, &sig, &cfg).map_err(|e| e.to_string())? {
                ValidityOutcome::Valid { checked: 147_968 } => valid += 1,
                other => return Err(format!("{schema} instance {f}: {other:?}")),
            }
        }
    }
    // D9', D9'' and DSC over the same interventions as the old instance.
    let d9p = "(<B <- 0>(A = 0) & <B <- 0>(A = 1) & <A <- 1, B <- 0>true) -> <B <- 0>(A = 1)".to_string();
    let d9pp = "(<A <- 0, B <- 0>true & <A <- 1, B <- 0>true) -> <B <- 0>true".to_string();
    for text in [d9p, d9pp, "[disc(A), B <- 0](A = 0) <-> ([A <- 0, B <- 0](A = 0) & [A <- 1, B <- 0](A = 0))".into()] {
        let f = parse_formula(&text, &sig).map_err(|e| e.to_string())?;
        match check_validity(&f, &sig, &cfg).map_err(|e| e.to_string())? {
            ValidityOutcome::Valid { .. } => valid += 1,
            other => return Err(format!("{text}: {other:?}")),
        }
    }
    Ok(format!("counterexample #{} at {}; {valid} sound instances valid", cx.index, cx.context))
}

fn classic_agreement() -> Result<String, String> {
    let mut checked = 0;
    for seed in 0..100 {
        let mut rng = gen::rng(1000 + seed);
        let exo = rng.gen_range(1..=2);
        let endo = rng.gen_range(1..=3);
        let sig = gen::random_signature(&mut rng, exo, endo, 3);
        let m = gen::random_acyclic_model(&sig, seed);
        let ev = Evaluator::new(&m);
        for u in sig.contexts() {
            for spec in common::all_plain_specs(&sig) {
                let spec = spec.normalize(&sig);
                let got = ev.solutions(&u, &spec).map_err(|e| e.to_string())?.states;
                let want = common::forward_eval(&m, &u, &spec);
                ensure(got == [want.clone()], || format!("model {seed} at {u} under {spec}: {got:?} vs {want}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} interventions on 100 models"))
}

fn round_trip() -> Result<String, String> {
    for (name, text) in [
        ("temperature", fixtures::TEMPERATURE),
        ("cholesterol", fixtures::CHOLESTEROL),
        ("geometry", fixtures::GEOMETRY),
        ("tiny", fixtures::TINY),
    ] {
        let m = parse_model(text).map_err(|e| e.to_string())?;
        ensure(parse_model(&render_model(&m)).ok() == Some(m), || format!("{name} does not round-trip"))?;
    }
    for seed in 0..500 {
        let m = gen::random_syntax_model(seed);
        let back = parse_model_unchecked(&render_model(&m)).map_err(|e| format!("model {seed}: {e}"))?;
        ensure(back == m, || format!("model {seed} does not round-trip"))?;

        let mut rng = gen::rng(seed);
        let f: CausalFormula = gen::random_causal_formula(&mut rng, &m.signature, 3, 2, 2, true);
        let back = parse_formula(&render_formula(&f), &m.signature).map_err(|e| format!("formula {seed}: {e}"))?;
        ensure(back == f, || format!("formula {seed} does not round-trip: {f}"))?;
        let s: StateFormula = gen::random_state_formula(&mut rng, &m.signature, 3);
        let back = ccm_core::syntax::parse_state_formula(&s.to_string(), &m.signature).map_err(|e| e.to_string())?;
        ensure(back == s, || format!("state formula {seed} does not round-trip: {s}"))?;
    }
    Ok("4 fixtures, 500 models, 1000 formulas".into())
}

fn main() {
    let criteria: [(&str, Check, u64); 8] = [
        ("temperature golden suite", temperature, 1),
        ("cholesterol golden suite", cholesterol, 5),
        ("geometry suite", geometry, 5),
        ("disc elimination metamorphic", dsc_metamorphic, 60),
        ("soundness sweep", soundness_sweep, 120),
        ("old D9 witness", d9_witness, 300),
        ("classic semantics agreement", classic_agreement, 30),
        ("parser round trip", round_trip, 30),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let verdict = match &result {
            Ok(_) if took <= Duration::from_secs(limit) => "PASS",
            _ => "FAIL",
        };
        let detail = match result {
            Ok(s) => s,
            Err(e) => e,
        };
        println!("{verdict} criterion {}: {name} ({:.2}s, limit {limit}s) {detail}", i + 1, took.as_secs_f64());
        failed += usize::from(verdict == "FAIL");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
