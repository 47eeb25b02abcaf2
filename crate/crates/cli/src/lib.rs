//! The `ccm` command line: argument types, command dispatch and output.

mod repl;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ccm_core::formula::{subformulas, CausalFormula, InterventionSpec};
use ccm_core::lab::{
    self, check_soundness, check_validity, AxiomSchema, InstantiationBounds, ModelEnumerationConfig, Sampling,
    ValidityOutcome, DEFAULT_BUDGET,
};
use ccm_core::model::{combine, ConstrainedModel, ConstraintSet, Context, VarKind};
use ccm_core::rewrite::{eliminate_disc_with_cap, DEFAULT_EXPANSION_CAP};
use ccm_core::semantics::{Evaluator, SemanticsError};
use ccm_core::syntax::{
    parse_context, parse_formula, parse_links, parse_model, parse_spec, render_model, LoadError, ParseError,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};
use thiserror::Error;

pub use repl::run_repl;

#[derive(Debug, Parser)]
#[command(name = "ccm", version, about = "Causal models with non-causal constraints")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Most model-context pairs `validity` may check.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula at a context.
    Eval {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        context: String,
        /// Formula text, or `@path` to read it from a file.
        #[arg(short, long)]
        formula: String,
        /// List the solutions of every basic subformula.
        #[arg(long)]
        show_solutions: bool,
        /// Exit with status 1 if the formula is false.
        #[arg(long)]
        assert_true: bool,
    },
    /// List the solutions of an intervention, e.g. `disc(LDL), TOT <- 12`.
    Solutions {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        context: String,
        #[arg(short, long, default_value = "")]
        spec: String,
        #[arg(long)]
        count: bool,
    },
    /// Rewrite away every `disc(..)`.
    Rewrite {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        formula: String,
        #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
        cap: u128,
    },
    /// Check axiom schemas on random constrained models.
    Axioms {
        /// Model file whose signature is used.
        #[arg(long)]
        sig: PathBuf,
        /// `all`, or a comma list such as `D1,D9,DSC`.
        #[arg(long, default_value = "all")]
        schemas: String,
        #[arg(long, default_value_t = 200)]
        models: u64,
        /// Instances per schema.
        #[arg(long, default_value_t = 40)]
        instances: usize,
        #[arg(long, default_value_t = 0.3)]
        p_undefined: f64,
        #[arg(long, default_value_t = 0.5)]
        p_in_c: f64,
    },
    /// Check a formula on every constrained model over a signature.
    Validity {
        #[arg(long)]
        sig: PathBuf,
        #[arg(short, long)]
        formula: String,
        /// Enumerate every model (the default).
        #[arg(long, conflicts_with = "sample")]
        exhaustive: bool,
        /// Check this fraction of the models, drawn with `--seed`.
        #[arg(long)]
        sample: Option<f64>,
        /// Write a counterexample model here.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Exit with status 1 if a counterexample is found.
        #[arg(long)]
        assert_valid: bool,
    },
    /// Join two models with linking constraints.
    Combine {
        a: PathBuf,
        b: PathBuf,
        /// File of `constraint <expr>` lines.
        #[arg(long)]
        links: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Evaluate formulas interactively.
    Repl {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        context: String,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }

    fn parse_in(path: &Path, e: ParseError) -> Self {
        CliError::Parse(format!("{}:{e}", path.display()))
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<SemanticsError> for CliError {
    fn from(e: SemanticsError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Runs one command, printing to `out`, and returns the exit status.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let g = cli.global;
    match cli.command {
        Command::Eval { model, context, formula, show_solutions, assert_true } => {
            let m = load_model(&model)?;
            let u = read_context(&context)?;
            let f = parse_formula(&read_arg(&formula)?, &m.signature)?;
            let r = eval_query(&Evaluator::new(&m), &u, &f)?;
            write_query(out, &r, g.json, show_solutions)?;
            if assert_true && !r.value {
                return Err(CliError::Assertion(format!("{} is false", r.formula)));
            }
        }
        Command::Solutions { model, context, spec, count } => {
            let m = load_model(&model)?;
            let u = read_context(&context)?;
            let spec = parse_spec(&spec, &m.signature)?;
            write_solutions(out, &Evaluator::new(&m), &u, &spec, g.json, count)?;
        }
        Command::Rewrite { model, formula, cap } => {
            let m = load_model(&model)?;
            let f = parse_formula(&read_arg(&formula)?, &m.signature)?;
            write_rewrite(out, &m, &f, cap, g.json)?;
        }
        Command::Axioms { sig, schemas, models, instances, p_undefined, p_in_c } => {
            let m = load_model(&sig)?;
            let schemas = parse_schemas(&schemas)?;
            if !(0.0..=1.0).contains(&p_undefined) || !(0.0..=1.0).contains(&p_in_c) {
                return Err(CliError::Invalid("probabilities must be in [0, 1]".into()));
            }
            let models: Vec<ConstrainedModel> = (0..models)
                .map(|i| lab::gen::random_model(&m.signature, g.seed.wrapping_add(i), p_undefined, p_in_c))
                .collect();
            let bounds = InstantiationBounds { max_instances: instances, seed: g.seed, ..Default::default() };
            let report = check_soundness(&models, &schemas, &bounds);
            if g.json {
                let stats: Vec<Json> = report
                    .schemas
                    .iter()
                    .map(|s| {
                        json!({"schema": s.schema.name(), "instances": s.instances, "evaluations": s.evaluations,
                               "violations": s.violations, "skipped": s.skipped})
                    })
                    .collect();
                let violations: Vec<Json> = report
                    .violations
                    .iter()
                    .map(|v| {
                        json!({"model": models[v.model_index].name, "context": v.context, "schema": v.schema.name(),
                               "formula": v.formula.to_string(), "error": v.error})
                    })
                    .collect();
                print_json(out, &json!({"schema": 1, "models": report.models, "schemas": stats, "violations": violations}))?;
            } else {
                for s in &report.schemas {
                    write!(out, "{:<5} {:>4} instances {:>9} checks {:>5} violations", s.schema.name(), s.instances, s.evaluations, s.violations)?;
                    for why in &s.skipped {
                        write!(out, "  (skipped: {why})")?;
                    }
                    writeln!(out)?;
                }
                for v in report.violations.iter().take(10) {
                    let what = v.error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default();
                    writeln!(out, "violation: {} at {} in {}: {}{what}", v.schema, v.context, models[v.model_index].name, v.formula)?;
                }
                writeln!(out, "{} violations over {} models", report.violations.len(), report.models)?;
            }
            if !report.is_sound() {
                return Err(CliError::Assertion(format!("{} violations", report.violations.len())));
            }
        }
        Command::Validity { sig, formula, exhaustive: _, sample, out: path, assert_valid } => {
            let m = load_model(&sig)?;
            let f = parse_formula(&read_arg(&formula)?, &m.signature)?;
            let sampling = match sample {
                Some(fraction) => Sampling::Fraction { fraction, seed: g.seed },
                None => Sampling::Exhaustive,
            };
            let config = ModelEnumerationConfig { budget: g.budget, sampling };
            let outcome = check_validity(&f, &m.signature, &config).map_err(|e| CliError::Invalid(e.to_string()))?;
            write_validity(out, &f, &outcome, g.json)?;
            if let (ValidityOutcome::Invalid(cx), Some(path)) = (&outcome, path) {
                fs::write(path, render_model(&cx.model))?;
            }
            if assert_valid && matches!(outcome, ValidityOutcome::Invalid(_)) {
                return Err(CliError::Assertion(format!("{f} is not valid")));
            }
        }
        Command::Combine { a, b, links, out: path } => {
            let ma = load_model(&a)?;
            let mb = load_model(&b)?;
            let links = match links {
                Some(p) => ConstraintSet::predicates(parse_links(&read_file(&p)?).map_err(|e| CliError::parse_in(&p, e))?),
                None => ConstraintSet::none(),
            };
            let c = combine(&ma, &mb, &links).map_err(|e| CliError::Invalid(e.to_string()))?;
            let text = render_model(&c);
            match path {
                Some(p) => {
                    fs::write(&p, &text)?;
                    if g.json {
                        print_json(out, &json!({"schema": 1, "model": c.name, "path": p.display().to_string()}))?;
                    } else {
                        writeln!(out, "wrote {}", p.display())?;
                    }
                }
                None if g.json => print_json(out, &json!({"schema": 1, "model": c.name, "text": text}))?,
                None => write!(out, "{text}")?,
            }
        }
        Command::Repl { model, context } => {
            let m = load_model(&model)?;
            let u = read_context(&context)?;
            m.signature.check_assignment(&u, VarKind::Exogenous).map_err(|e| CliError::Invalid(e.to_string()))?;
            let stdin = std::io::stdin();
            let prompt = std::io::IsTerminal::is_terminal(&stdin);
            run_repl(&m, u, stdin.lock(), out, g.json, prompt)?;
        }
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Inline text, or the contents of the file after `@`.
pub fn read_arg(arg: &str) -> Result<String, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(read_file(Path::new(path))?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

pub fn load_model(path: &Path) -> Result<ConstrainedModel, CliError> {
    match parse_model(&read_file(path)?) {
        Ok(m) => Ok(m),
        Err(LoadError::Syntax(e)) => Err(CliError::parse_in(path, e)),
        Err(LoadError::Invalid(r)) => Err(CliError::Invalid(format!("{}: invalid model:\n{r}", path.display()))),
    }
}

fn read_context(text: &str) -> Result<Context, CliError> {
    parse_context(text).map_err(|e| CliError::Parse(format!("context: {e}")))
}

fn parse_schemas(text: &str) -> Result<Vec<AxiomSchema>, CliError> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(AxiomSchema::SOUND.to_vec());
    }
    text.split(',').map(|s| s.trim().parse().map_err(CliError::Parse)).collect()
}

/// One evaluated query: the answer plus the solutions behind it.
#[derive(Debug, Clone)]
pub struct QueryResult {
    pub model: String,
    pub context: Context,
    pub formula: CausalFormula,
    pub value: bool,
    pub subformulas: Vec<(String, Vec<Context>)>,
    pub elapsed_ms: f64,
}

pub fn eval_query(ev: &Evaluator<'_>, u: &Context, f: &CausalFormula) -> Result<QueryResult, CliError> {
    let start = Instant::now();
    let (value, trace) = ev.evaluate_traced(u, f)?;
    let m = ev.model();
    Ok(QueryResult {
        model: m.name.clone(),
        context: m.signature.ordered(u, VarKind::Exogenous),
        formula: ccm_core::formula::normalize(f, &m.signature),
        value,
        subformulas: trace.into_iter().map(|(b, s)| (b.to_string(), s.states)).collect(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

pub fn query_json(r: &QueryResult) -> Json {
    let solutions = match r.subformulas.as_slice() {
        [(_, states)] => json!(states),
        _ => Json::Null,
    };
    let subs: Vec<Json> = r.subformulas.iter().map(|(f, s)| json!({"formula": f, "solutions": s})).collect();
    json!({
        "schema": 1,
        "model": r.model,
        "context": r.context,
        "formula": r.formula.to_string(),
        "value": r.value,
        "solutions": solutions,
        "subformulas": subs,
        "elapsed_ms": r.elapsed_ms,
    })
}

fn print_json(out: &mut dyn Write, v: &Json) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"))?;
    Ok(())
}

pub fn write_query(out: &mut dyn Write, r: &QueryResult, json: bool, show_solutions: bool) -> Result<(), CliError> {
    if json {
        return print_json(out, &query_json(r));
    }
    writeln!(out, "{}", r.value)?;
    if show_solutions {
        for (f, states) in &r.subformulas {
            writeln!(out, "  {f}: {} solution{}", states.len(), if states.len() == 1 { "" } else { "s" })?;
            for s in states {
                writeln!(out, "    {s}")?;
            }
        }
    }
    Ok(())
}

pub fn write_solutions(
    out: &mut dyn Write,
    ev: &Evaluator<'_>,
    u: &Context,
    spec: &InterventionSpec,
    json: bool,
    count_only: bool,
) -> Result<(), CliError> {
    let spec = spec.normalize(&ev.model().signature);
    let set = ev.solutions(u, &spec)?;
    if json {
        let mut v = json!({"schema": 1, "model": ev.model().name, "context": set.context,
                           "spec": spec.to_string(), "count": set.len()});
        if !count_only {
            v["solutions"] = json!(set.states);
        }
        print_json(out, &v)
    } else if count_only {
        writeln!(out, "{}", set.len())?;
        Ok(())
    } else {
        for s in set.iter() {
            writeln!(out, "{s}")?;
        }
        Ok(())
    }
}

pub fn write_rewrite(
    out: &mut dyn Write,
    m: &ConstrainedModel,
    f: &CausalFormula,
    cap: u128,
    json: bool,
) -> Result<(), CliError> {
    let g = eliminate_disc_with_cap(f, &m.signature, cap).map_err(|e| CliError::Invalid(e.to_string()))?;
    if json {
        print_json(out, &json!({"schema": 1, "formula": f.to_string(), "rewritten": g.to_string(),
                                "basics": subformulas(&g).len()}))
    } else {
        writeln!(out, "{g}")?;
        Ok(())
    }
}

fn write_validity(out: &mut dyn Write, f: &CausalFormula, outcome: &ValidityOutcome, json: bool) -> Result<(), CliError> {
    if json {
        let v = match outcome {
            ValidityOutcome::Valid { checked } => {
                json!({"schema": 1, "formula": f.to_string(), "outcome": "valid", "checked": checked})
            }
            ValidityOutcome::NoneFound { checked, total } => json!({"schema": 1, "formula": f.to_string(),
                "outcome": "none-found", "checked": checked, "total": total}),
            ValidityOutcome::Invalid(cx) => json!({"schema": 1, "formula": f.to_string(), "outcome": "counterexample",
                "counterexample": {"index": cx.index, "context": cx.context, "model": render_model(&cx.model)}}),
        };
        return print_json(out, &v);
    }
    match outcome {
        ValidityOutcome::Valid { checked } => writeln!(out, "valid: true at all {checked} model-context pairs")?,
        ValidityOutcome::NoneFound { checked, total } => {
            writeln!(out, "no counterexample among {checked} of {total} model-context pairs")?
        }
        ValidityOutcome::Invalid(cx) => {
            writeln!(out, "counterexample at context {} (pair #{}):", cx.context, cx.index)?;
            write!(out, "{}", render_model(&cx.model))?;
        }
    }
    Ok(())
}
