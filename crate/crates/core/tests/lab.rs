use ccm_core::lab::{
    check_soundness, check_validity, enumeration_count, gen, instantiate, is_tautology, AxiomSchema,
    InstantiationBounds, ModelEnumerationConfig, Sampling, ValidityError, ValidityOutcome,
};
use ccm_core::semantics::evaluate;
use ccm_core::syntax::{parse_formula, parse_model, render_model};

fn bounds(n: usize, seed: u64) -> InstantiationBounds {
    InstantiationBounds { max_instances: n, seed, ..Default::default() }
}

#[test]
fn sound_schemas_are_valid_on_the_tiny_signature() {
    let sig = gen::tiny_signature();
    for schema in AxiomSchema::SOUND {
        for f in instantiate(schema, &sig, &bounds(3, 1)).unwrap() {
            let out = check_validity(&f, &sig, &ModelEnumerationConfig::default()).unwrap();
            assert_eq!(out, ValidityOutcome::Valid { checked: 147_968 }, "{schema}: {f}");
        }
    }
}

#[test]
fn some_legacy_d9_instance_is_invalid() {
    let sig = gen::tiny_signature();
    let invalid = instantiate(AxiomSchema::D9, &sig, &bounds(10, 3))
        .unwrap()
        .into_iter()
        .filter(|f| matches!(check_validity(f, &sig, &Default::default()), Ok(ValidityOutcome::Invalid(_))))
        .count();
    assert!(invalid > 0);
}

#[test]
fn validity_agrees_with_the_evaluator() {
    use rand::Rng;
    let sig = gen::tiny_signature();
    let mut rng = gen::rng(99);
    let models: Vec<_> = (0..30).map(|s| gen::random_model(&sig, s, rng.gen_range(0.0..0.7), rng.gen_range(0.2..1.0))).collect();
    let mut invalid = 0;
    for _ in 0..60 {
        let f = gen::random_causal_formula(&mut rng, &sig, 2, 1, 2, true);
        let cfg = ModelEnumerationConfig { sampling: Sampling::Fraction { fraction: 0.02, seed: rng.gen() }, ..Default::default() };
        match check_validity(&f, &sig, &cfg).unwrap() {
            ValidityOutcome::Invalid(cx) => {
                invalid += 1;
                let back = parse_model(&render_model(&cx.model)).unwrap();
                assert_eq!(evaluate(&back, &cx.context, &f), Ok(false), "{f}");
            }
            ValidityOutcome::NoneFound { .. } => {}
            ValidityOutcome::Valid { .. } => unreachable!(),
        }
        if let ValidityOutcome::Valid { .. } = check_validity(&f, &sig, &Default::default()).unwrap() {
            for m in &models {
                for u in sig.contexts() {
                    assert_eq!(evaluate(m, &u, &f), Ok(true), "{f} valid but false in {}", m.name);
                }
            }
        }
    }
    assert!(invalid > 10);
}

#[test]
fn enumeration_refuses_large_signatures() {
    let m = parse_model("model M\nexogenous U : 0..1\nendogenous A : 0..2\nendogenous B : 0..2\n").unwrap();
    let f = parse_formula("[A <- 0](A = 0)", &m.signature).unwrap();
    assert_eq!(enumeration_count(&m.signature), Some(730 * 730 * (1 << 18) * 2));
    assert!(matches!(check_validity(&f, &m.signature, &Default::default()), Err(ValidityError::OverBudget { .. })));
    let one = parse_model("model M\nendogenous A : 0..2\n").unwrap();
    assert_eq!(enumeration_count(&one.signature), Some(4 * 8));
}

#[test]
fn soundness_reports_are_deterministic() {
    let sig = gen::tiny_signature();
    let models: Vec<_> = (0..15).map(|s| gen::random_model(&sig, s, 0.4, 0.5)).collect();
    let a = check_soundness(&models, &[AxiomSchema::D9, AxiomSchema::D4], &bounds(10, 5));
    let b = check_soundness(&models, &[AxiomSchema::D9, AxiomSchema::D4], &bounds(10, 5));
    assert_eq!(a, b);
    assert!(!a.violations.is_empty());
    assert!(a.violations.iter().all(|v| v.schema == AxiomSchema::D9));
    let keys: Vec<_> = a.violations.iter().map(|v| v.model_index).collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn tautologies_hold_everywhere() {
    let m = parse_model(ccm_core::fixtures::TEMPERATURE).unwrap();
    let fs = instantiate(AxiomSchema::D0, &m.signature, &bounds(30, 2)).unwrap();
    assert!(fs.iter().all(is_tautology));
    let r = check_soundness(&[m], &[AxiomSchema::D0], &bounds(30, 2));
    assert!(r.is_sound());
}

#[test]
fn random_models_are_reproducible() {
    let sig = gen::tiny_signature();
    assert_eq!(gen::random_model(&sig, 42, 0.3, 0.5), gen::random_model(&sig, 42, 0.3, 0.5));
    assert_ne!(gen::random_model(&sig, 42, 0.3, 0.5), gen::random_model(&sig, 43, 0.3, 0.5));
}
