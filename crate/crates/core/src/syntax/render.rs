use std::fmt::Write;

use crate::formula::{BasicFormula, CausalFormula, InterventionSpec, Modality, StateFormula};
use crate::model::{ArithOp, Assignment, CmpOp, ConstrainedModel, Equation, Expr, LogicOp};
use crate::value::{Range, Value};

pub fn render_value(v: &Value) -> String {
    v.to_string()
}

pub fn render_range(r: &Range) -> String {
    match r.as_interval() {
        Some((lo, hi)) => format!("{lo}..{hi}"),
        None => format!("{{{}}}", join(r.values().iter().map(render_value))),
    }
}

pub fn render_assignment(a: &Assignment) -> String {
    join(a.iter().map(|(k, v)| format!("{k}={v}")))
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}

// Binding strength, loosest first. Operands below the required level get parentheses.
const IF: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const CMP: u8 = 5;
const SUM: u8 = 6;
const PROD: u8 = 7;
const NEG: u8 = 8;
const ATOM: u8 = 9;

pub fn render_expr(e: &Expr) -> String {
    expr(e, IF)
}

fn paren(s: String, level: u8, min: u8) -> String {
    if level < min {
        format!("({s})")
    } else {
        s
    }
}

fn expr(e: &Expr, min: u8) -> String {
    let (s, level) = match e {
        Expr::Lit(v) => (render_value(v), ATOM),
        Expr::Bool(b) => (b.to_string(), ATOM),
        Expr::Var(v) => (v.clone(), ATOM),
        Expr::Neg(a) => match **a {
            Expr::Lit(Value::Int(_)) => (format!("-({})", expr(a, IF)), NEG),
            _ => (format!("-{}", expr(a, NEG)), NEG),
        },
        Expr::Not(a) => (format!("!{}", expr(a, ATOM)), NOT),
        Expr::Arith(op, a, b) => {
            let (sym, level) = match op {
                ArithOp::Add => ("+", SUM),
                ArithOp::Sub => ("-", SUM),
                ArithOp::Mul => ("*", PROD),
                ArithOp::Div => ("/", PROD),
                ArithOp::Mod => ("%", PROD),
            };
            (format!("{} {sym} {}", expr(a, level), expr(b, level + 1)), level)
        }
        Expr::Cmp(op, a, b) => {
            let sym = match op {
                CmpOp::Eq => "==",
                CmpOp::Ne => "!=",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            (format!("{} {sym} {}", expr(a, SUM), expr(b, SUM)), CMP)
        }
        Expr::Logic(LogicOp::Implies, a, b) => (format!("{} -> {}", expr(a, OR), expr(b, IMPLIES)), IMPLIES),
        Expr::Logic(LogicOp::Or, a, b) => (format!("{} | {}", expr(a, OR), expr(b, AND)), OR),
        Expr::Logic(LogicOp::And, a, b) => (format!("{} & {}", expr(a, AND), expr(b, NOT)), AND),
        Expr::If(c, t, f) => (format!("if {} then {} else {}", expr(c, IF), expr(t, IF), expr(f, IF)), IF),
    };
    paren(s, level, min)
}

pub fn render_state_formula(f: &StateFormula) -> String {
    state(f, IF)
}

fn state(f: &StateFormula, min: u8) -> String {
    let (s, level) = match f {
        StateFormula::True => ("true".to_string(), ATOM),
        StateFormula::False => ("false".to_string(), ATOM),
        StateFormula::Event(e) => (format!("{} = {}", e.var, render_value(&e.value)), CMP),
        StateFormula::Not(a) => (format!("!{}", state(a, ATOM)), NOT),
        StateFormula::And(a, b) => (format!("{} & {}", state(a, AND), state(b, NOT)), AND),
        StateFormula::Or(a, b) => (format!("{} | {}", state(a, OR), state(b, AND)), OR),
        StateFormula::Implies(a, b) => (format!("{} -> {}", state(a, OR), state(b, IMPLIES)), IMPLIES),
    };
    paren(s, level, min)
}

/// The inside of the brackets: `disc(A, B), C <- 1`.
pub fn render_spec(spec: &InterventionSpec) -> String {
    let mut parts = vec![];
    if !spec.disconnect.is_empty() {
        parts.push(format!("disc({})", spec.disconnect.join(", ")));
    }
    parts.extend(spec.assignments.iter().map(|(k, v)| format!("{k} <- {}", render_value(v))));
    parts.join(", ")
}

pub fn render_basic(b: &BasicFormula) -> String {
    let spec = render_spec(&b.spec);
    let spec = if spec.is_empty() { " ".to_string() } else { spec };
    let body = match &b.body {
        StateFormula::True | StateFormula::False => render_state_formula(&b.body),
        other => format!("({})", render_state_formula(other)),
    };
    match b.modality {
        Modality::Box => format!("[{spec}]{body}"),
        Modality::Diamond => format!("<{spec}>{body}"),
    }
}

pub fn render_formula(f: &CausalFormula) -> String {
    causal(f, IF)
}

fn causal(f: &CausalFormula, min: u8) -> String {
    let (s, level) = match f {
        CausalFormula::True => ("true".to_string(), ATOM),
        CausalFormula::False => ("false".to_string(), ATOM),
        CausalFormula::Basic(b) => (render_basic(b), ATOM),
        CausalFormula::Not(a) => (format!("!{}", causal(a, ATOM)), NOT),
        CausalFormula::And(a, b) => (format!("{} & {}", causal(a, AND), causal(b, NOT)), AND),
        CausalFormula::Or(a, b) => (format!("{} | {}", causal(a, OR), causal(b, AND)), OR),
        CausalFormula::Implies(a, b) => (format!("{} -> {}", causal(a, OR), causal(b, IMPLIES)), IMPLIES),
    };
    paren(s, level, min)
}

fn model_name(name: &str) -> String {
    let cleaned: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if super::is_identifier(&cleaned) {
        cleaned
    } else {
        format!("m_{cleaned}")
    }
}

pub fn render_model(m: &ConstrainedModel) -> String {
    let mut out = format!("model {}\n", model_name(&m.name));
    for d in m.signature.exogenous() {
        let _ = writeln!(out, "exogenous {} : {}", d.name, render_range(&d.range));
    }
    for d in m.signature.endogenous() {
        let _ = writeln!(out, "endogenous {} : {}", d.name, render_range(&d.range));
    }
    for (var, eq) in m.equations.iter() {
        match eq {
            Equation::Expr(e) => {
                let _ = writeln!(out, "eq {var} = {}", render_expr(e));
            }
            Equation::Table(t) => {
                let _ = write!(out, "eq {var} = table({}) {{", t.inputs.join(", "));
                let ranges: Option<Vec<&Range>> = t.inputs.iter().map(|n| m.signature.range(n)).collect();
                let keys = crate::model::Odometer::new(
                    ranges.as_ref().map(|r| r.iter().map(|r| r.len()).collect()).unwrap_or_default(),
                );
                let rows: Vec<String> = keys
                    .zip(&t.outputs)
                    .map(|(idx, out)| {
                        let key = match &ranges {
                            Some(r) => join(idx.iter().zip(r).map(|(&i, r)| render_value(r.get(i)))),
                            None => String::new(),
                        };
                        format!("({key}): {}", render_value(out))
                    })
                    .collect();
                if rows.is_empty() {
                    out.push_str(" }\n");
                } else {
                    let _ = writeln!(out, " {} }}", rows.join(", "));
                }
            }
        }
    }
    for p in &m.constraints.predicates {
        let _ = writeln!(out, "constraint {}", render_expr(p));
    }
    if let Some(states) = &m.constraints.extensional {
        if states.is_empty() {
            out.push_str("states { }\n");
        } else {
            out.push_str("states {\n");
            for (i, es) in states.iter().enumerate() {
                let entries = join(es.context.iter().chain(es.state.iter()).map(|(k, v)| format!("{k} = {v}")));
                let sep = if i + 1 < states.len() { "," } else { "" };
                let _ = writeln!(out, "  ({entries}){sep}");
            }
            out.push_str("}\n");
        }
    }
    out
}
