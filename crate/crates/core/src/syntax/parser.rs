use std::collections::HashSet;

use num_bigint::BigInt;

use super::lexer::{tokenize, Tok, Token};
use super::{LoadError, ParseError, SourceSpan};
use crate::formula::{BasicFormula, CausalFormula, InterventionSpec, Modality, PrimitiveEvent, StateFormula};
use crate::model::{
    validate_model, ArithOp, Assignment, CmpOp, ConstrainedModel, ConstraintSet, Equation, EquationSet,
    Expr, ExtendedState, LogicOp, LookupTable, Odometer, Signature, VarKind,
};
use crate::value::{Range, Value};

/// Where a variable name occurred in a formula, kept for signature checks.
#[derive(Debug, Clone)]
struct VarUse {
    span: SourceSpan,
    var: String,
    value: Option<Value>,
    /// Index of the intervention for assignments, `None` for events and `disc`.
    spec: Option<usize>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    uses: Vec<VarUse>,
    specs: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, uses: vec![], specs: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::new(
            self.span(),
            format!("unexpected {}", self.peek().describe()),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&format!("`{}`", tok.symbol())]))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    fn expect_end(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if super::is_identifier(&s) => {
                let t = self.bump();
                Ok((s, t.span))
            }
            Tok::Ident(s) => Err(ParseError::new(
                self.span(),
                format!("`{s}` is a reserved word"),
                vec!["identifier".into()],
            )),
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn integer(&mut self) -> PResult<BigInt> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn value(&mut self) -> PResult<Value> {
        match self.peek() {
            Tok::Ident(_) => Ok(Value::sym(&self.ident()?.0)),
            Tok::Int(_) | Tok::Minus => Ok(Value::Int(self.integer()?)),
            _ => Err(self.unexpected(&["value"])),
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        if self.is_kw("if") {
            self.bump();
            let c = self.expr()?;
            self.expect_kw("then")?;
            let t = self.expr()?;
            self.expect_kw("else")?;
            let e = self.expr()?;
            return Ok(Expr::ite(c, t, e));
        }
        let l = self.expr_or()?;
        if self.eat(&Tok::Arrow) {
            let r = self.expr()?;
            return Ok(Expr::logic(LogicOp::Implies, l, r));
        }
        Ok(l)
    }

    fn expr_or(&mut self) -> PResult<Expr> {
        let mut l = self.expr_and()?;
        while self.eat(&Tok::Pipe) {
            let r = self.expr_and()?;
            l = Expr::logic(LogicOp::Or, l, r);
        }
        Ok(l)
    }

    fn expr_and(&mut self) -> PResult<Expr> {
        let mut l = self.expr_not()?;
        while self.eat(&Tok::Amp) {
            let r = self.expr_not()?;
            l = Expr::logic(LogicOp::And, l, r);
        }
        Ok(l)
    }

    fn expr_not(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Bang) {
            return Ok(Expr::Not(Box::new(self.expr_not()?)));
        }
        self.expr_cmp()
    }

    fn expr_cmp(&mut self) -> PResult<Expr> {
        let l = self.expr_sum()?;
        if *self.peek() == Tok::LArrow {
            // `X<-1` in an expression means `X < -1`.
            let span = self.span();
            self.toks[self.pos] = Token { tok: Tok::Lt, span: SourceSpan { len: 1, ..span } };
            let minus = SourceSpan { column: span.column + 1, offset: span.offset + 1, len: 1, ..span };
            self.toks.insert(self.pos + 1, Token { tok: Tok::Minus, span: minus });
        }
        let op = match self.peek() {
            Tok::EqEq | Tok::Assign => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return Ok(l),
        };
        self.bump();
        let r = self.expr_sum()?;
        Ok(Expr::cmp(op, l, r))
    }

    fn expr_sum(&mut self) -> PResult<Expr> {
        let mut l = self.expr_prod()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.expr_prod()?;
            l = Expr::arith(op, l, r);
        }
    }

    fn expr_prod(&mut self) -> PResult<Expr> {
        let mut l = self.expr_unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                Tok::Percent => ArithOp::Mod,
                _ => return Ok(l),
            };
            self.bump();
            let r = self.expr_unary()?;
            l = Expr::arith(op, l, r);
        }
    }

    fn expr_unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            if let Tok::Int(_) = self.peek_at(1) {
                return Ok(Expr::Lit(Value::Int(self.integer()?)));
            }
            self.bump();
            return Ok(Expr::Neg(Box::new(self.expr_unary()?)));
        }
        self.expr_atom()
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Lit(Value::Int(n)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Bool(s == "true"))
            }
            Tok::Ident(s) if s == "if" => self.expr(),
            Tok::Ident(_) => Ok(Expr::Var(self.ident()?.0)),
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    // ---- formulas ----

    fn cform(&mut self) -> PResult<CausalFormula> {
        let mut l = self.cform_imp()?;
        while self.eat(&Tok::Iff) {
            let r = self.cform_imp()?;
            l = l.iff(r);
        }
        Ok(l)
    }

    fn cform_imp(&mut self) -> PResult<CausalFormula> {
        let l = self.cform_or()?;
        if self.eat(&Tok::Arrow) {
            let r = self.cform_imp()?;
            return Ok(l.implies(r));
        }
        Ok(l)
    }

    fn cform_or(&mut self) -> PResult<CausalFormula> {
        let mut l = self.cform_and()?;
        while self.eat(&Tok::Pipe) {
            let r = self.cform_and()?;
            l = l.or(r);
        }
        Ok(l)
    }

    fn cform_and(&mut self) -> PResult<CausalFormula> {
        let mut l = self.cform_not()?;
        while self.eat(&Tok::Amp) {
            let r = self.cform_not()?;
            l = l.and(r);
        }
        Ok(l)
    }

    fn cform_not(&mut self) -> PResult<CausalFormula> {
        if self.eat(&Tok::Bang) {
            return Ok(self.cform_not()?.not());
        }
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let f = self.cform()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBracket => {
                self.bump();
                let spec = self.spec()?;
                self.expect(Tok::RBracket)?;
                let body = self.sbody()?;
                Ok(CausalFormula::Basic(BasicFormula { modality: Modality::Box, spec, body }))
            }
            Tok::Lt => {
                self.bump();
                let spec = self.spec()?;
                self.expect(Tok::Gt)?;
                let body = self.sbody()?;
                Ok(CausalFormula::Basic(BasicFormula { modality: Modality::Diamond, spec, body }))
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(CausalFormula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(CausalFormula::False)
            }
            _ => Err(self.unexpected(&["`[`", "`<`", "`!`", "`(`", "`true`", "`false`"])),
        }
    }

    fn spec(&mut self) -> PResult<InterventionSpec> {
        let id = self.specs;
        self.specs += 1;
        let mut spec = InterventionSpec::empty();
        let mut need_assign = false;
        if self.eat_kw("disc") {
            self.expect(Tok::LParen)?;
            if *self.peek() != Tok::RParen {
                loop {
                    let (var, span) = self.ident()?;
                    self.uses.push(VarUse { span, var: var.clone(), value: None, spec: None });
                    spec.disconnect.push(var);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            need_assign = self.eat(&Tok::Comma);
        }
        if !need_assign && !matches!(self.peek(), Tok::Ident(_)) {
            return Ok(spec);
        }
        loop {
            let (var, span) = self.ident()?;
            self.expect(Tok::LArrow)?;
            let value = self.value()?;
            self.uses.push(VarUse { span, var: var.clone(), value: Some(value.clone()), spec: Some(id) });
            spec.assignments.push((var, value));
            if !self.eat(&Tok::Comma) {
                return Ok(spec);
            }
        }
    }

    /// The body of a basic formula: a constant, event, negation, or parenthesised state formula.
    fn sbody(&mut self) -> PResult<StateFormula> {
        if self.eat(&Tok::Bang) {
            return Ok(self.sbody()?.not());
        }
        if self.eat_kw("true") {
            return Ok(StateFormula::True);
        }
        if self.eat_kw("false") {
            return Ok(StateFormula::False);
        }
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let f = self.sform()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => self.event(),
            _ => Err(self.unexpected(&["`(`", "`true`", "`false`", "`!`", "event"])),
        }
    }

    fn event(&mut self) -> PResult<StateFormula> {
        let (var, span) = self.ident()?;
        self.expect(Tok::Assign)?;
        let value = self.value()?;
        self.uses.push(VarUse { span, var: var.clone(), value: Some(value.clone()), spec: None });
        Ok(StateFormula::Event(PrimitiveEvent { var, value }))
    }

    fn sform(&mut self) -> PResult<StateFormula> {
        let mut l = self.sform_imp()?;
        while self.eat(&Tok::Iff) {
            let r = self.sform_imp()?;
            l = l.clone().implies(r.clone()).and(r.implies(l));
        }
        Ok(l)
    }

    fn sform_imp(&mut self) -> PResult<StateFormula> {
        let l = self.sform_or()?;
        if self.eat(&Tok::Arrow) {
            let r = self.sform_imp()?;
            return Ok(l.implies(r));
        }
        Ok(l)
    }

    fn sform_or(&mut self) -> PResult<StateFormula> {
        let mut l = self.sform_and()?;
        while self.eat(&Tok::Pipe) {
            let r = self.sform_and()?;
            l = l.or(r);
        }
        Ok(l)
    }

    fn sform_and(&mut self) -> PResult<StateFormula> {
        let mut l = self.sbody()?;
        while self.eat(&Tok::Amp) {
            let r = self.sbody()?;
            l = l.and(r);
        }
        Ok(l)
    }

    fn check_uses(&self, sig: &Signature) -> PResult<()> {
        let mut assigned = HashSet::new();
        for u in &self.uses {
            let err = |msg: String| Err(ParseError::new(u.span, msg, vec![]));
            match sig.lookup(&u.var) {
                None => return err(format!("unknown variable `{}`", u.var)),
                Some(r) if r.kind != VarKind::Endogenous => {
                    return err(format!("`{}` is not an endogenous variable", u.var))
                }
                Some(_) => {}
            }
            if let Some(v) = &u.value {
                if !sig.range(&u.var).is_some_and(|r| r.contains(v)) {
                    return err(format!("value {v} is outside the range of `{}`", u.var));
                }
            }
            if let Some(id) = u.spec {
                if !assigned.insert((id, u.var.as_str())) {
                    return err(format!("`{}` is assigned more than once", u.var));
                }
            }
        }
        Ok(())
    }

    // ---- models ----

    fn range(&mut self) -> PResult<Range> {
        let span = self.span();
        let result = if self.eat(&Tok::LBrace) {
            let mut values = vec![self.value()?];
            while self.eat(&Tok::Comma) {
                values.push(self.value()?);
            }
            self.expect(Tok::RBrace)?;
            Range::new(values)
        } else {
            let lo = self.integer()?;
            self.expect(Tok::DotDot)?;
            let hi = self.integer()?;
            Range::interval(lo, hi)
        };
        result.map_err(|e| ParseError::new(span, e.to_string(), vec![]))
    }

    fn table(&mut self) -> PResult<RawTable> {
        self.expect(Tok::LParen)?;
        let mut inputs = vec![];
        if *self.peek() != Tok::RParen {
            loop {
                inputs.push(self.ident()?.0);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut rows = vec![];
        while *self.peek() != Tok::RBrace {
            let span = self.span();
            self.expect(Tok::LParen)?;
            let mut key = vec![];
            if *self.peek() != Tok::RParen {
                loop {
                    key.push(self.value()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            self.expect(Tok::Colon)?;
            let out = self.value()?;
            rows.push((key, out, span));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(RawTable { inputs, rows })
    }

    fn listed_states(&mut self) -> PResult<Vec<Vec<(String, Value, SourceSpan)>>> {
        self.expect(Tok::LBrace)?;
        let mut states = vec![];
        while *self.peek() != Tok::RBrace {
            self.expect(Tok::LParen)?;
            let mut entries = vec![];
            if *self.peek() != Tok::RParen {
                loop {
                    let (var, span) = self.ident()?;
                    self.expect(Tok::Assign)?;
                    entries.push((var, self.value()?, span));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            states.push(entries);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(states)
    }

    fn model(&mut self) -> PResult<ConstrainedModel> {
        self.expect_kw("model")?;
        let (name, _) = self.ident()?;
        let mut decls: Vec<(VarKind, String, Range, SourceSpan)> = vec![];
        let mut equations: Vec<(String, SourceSpan, RawEquation)> = vec![];
        let mut predicates = vec![];
        let mut listed: Option<Vec<Vec<(String, Value, SourceSpan)>>> = None;
        loop {
            let kw_span = self.span();
            if self.eat_kw("exogenous") || self.is_kw("endogenous") {
                let kind = if self.eat_kw("endogenous") { VarKind::Endogenous } else { VarKind::Exogenous };
                let (var, span) = self.ident()?;
                self.expect(Tok::Colon)?;
                let range = self.range()?;
                decls.push((kind, var, range, span));
            } else if self.eat_kw("eq") {
                let (var, span) = self.ident()?;
                self.expect(Tok::Assign)?;
                let rhs = if self.eat_kw("table") {
                    RawEquation::Table(self.table()?)
                } else {
                    RawEquation::Expr(self.expr()?)
                };
                equations.push((var, span, rhs));
            } else if self.eat_kw("constraint") {
                predicates.push(self.expr()?);
            } else if self.eat_kw("states") {
                if listed.is_some() {
                    return Err(ParseError::new(kw_span, "constraint states are listed twice", vec![]));
                }
                listed = Some(self.listed_states()?);
            } else if *self.peek() == Tok::Eof {
                break;
            } else {
                return Err(self.unexpected(&[
                    "`exogenous`",
                    "`endogenous`",
                    "`eq`",
                    "`constraint`",
                    "`states`",
                ]));
            }
        }
        build_model(name, decls, equations, predicates, listed)
    }
}

struct RawTable {
    inputs: Vec<String>,
    rows: Vec<(Vec<Value>, Value, SourceSpan)>,
}

enum RawEquation {
    Expr(Expr),
    Table(RawTable),
}

fn build_model(
    name: String,
    decls: Vec<(VarKind, String, Range, SourceSpan)>,
    equations: Vec<(String, SourceSpan, RawEquation)>,
    predicates: Vec<Expr>,
    listed: Option<Vec<Vec<(String, Value, SourceSpan)>>>,
) -> PResult<ConstrainedModel> {
    let mut seen = HashSet::new();
    for (_, var, _, span) in &decls {
        if !seen.insert(var.as_str()) {
            return Err(ParseError::new(*span, format!("variable `{var}` is declared more than once"), vec![]));
        }
    }
    let pick = |kind: VarKind| -> Vec<(String, Range)> {
        decls.iter().filter(|d| d.0 == kind).map(|d| (d.1.clone(), d.2.clone())).collect()
    };
    let signature = Signature::new(pick(VarKind::Exogenous), pick(VarKind::Endogenous))
        .map_err(|e| ParseError::new(SourceSpan::default(), e.to_string(), vec![]))?;
    let symbols: HashSet<Value> = decls
        .iter()
        .flat_map(|d| d.2.values().iter().filter(|v| v.as_int().is_none()).cloned())
        .collect();

    let mut eqs = EquationSet::new();
    for (var, span, rhs) in equations {
        if eqs.contains(&var) {
            return Err(ParseError::new(span, format!("`{var}` has more than one equation"), vec![]));
        }
        let eq = match rhs {
            RawEquation::Expr(e) => Equation::Expr(resolve_symbols(e, &signature, &symbols)),
            RawEquation::Table(t) => Equation::Table(build_table(t, &signature)?),
        };
        eqs.insert(var, eq);
    }
    let predicates: Vec<Expr> = predicates.into_iter().map(|p| resolve_symbols(p, &signature, &symbols)).collect();

    let constraints = match listed {
        None => ConstraintSet::predicates(predicates),
        Some(states) => {
            if !predicates.is_empty() {
                return Err(ParseError::new(
                    states.first().and_then(|s| s.first()).map(|e| e.2).unwrap_or_default(),
                    "a model cannot have both constraint predicates and listed states",
                    vec![],
                ));
            }
            let mut out = Vec::with_capacity(states.len());
            for entries in states {
                let (mut context, mut state) = (Assignment::new(), Assignment::new());
                for (var, value, span) in entries {
                    let target = match signature.lookup(&var) {
                        Some(r) if r.kind == VarKind::Exogenous => &mut context,
                        Some(_) => &mut state,
                        None => return Err(ParseError::new(span, format!("unknown variable `{var}`"), vec![])),
                    };
                    if target.insert(var.clone(), value).is_some() {
                        return Err(ParseError::new(span, format!("`{var}` is listed twice"), vec![]));
                    }
                }
                out.push(ExtendedState::new(
                    signature.ordered(&context, VarKind::Exogenous),
                    signature.ordered(&state, VarKind::Endogenous),
                ));
            }
            ConstraintSet::extensional(out)
        }
    };
    Ok(ConstrainedModel::new(name, signature, eqs, constraints))
}

/// Identifiers that name no variable but are symbolic range values become literals.
fn resolve_symbols(e: Expr, sig: &Signature, symbols: &HashSet<Value>) -> Expr {
    let go = |e: Box<Expr>| Box::new(resolve_symbols(*e, sig, symbols));
    match e {
        Expr::Var(name) if sig.lookup(&name).is_none() && symbols.contains(&Value::sym(&name)) => {
            Expr::Lit(Value::sym(&name))
        }
        Expr::Neg(a) => Expr::Neg(go(a)),
        Expr::Not(a) => Expr::Not(go(a)),
        Expr::Arith(op, a, b) => Expr::Arith(op, go(a), go(b)),
        Expr::Cmp(op, a, b) => Expr::Cmp(op, go(a), go(b)),
        Expr::Logic(op, a, b) => Expr::Logic(op, go(a), go(b)),
        Expr::If(c, a, b) => Expr::If(go(c), go(a), go(b)),
        other => other,
    }
}

fn build_table(t: RawTable, sig: &Signature) -> PResult<LookupTable> {
    let ranges: Option<Vec<&Range>> = t.inputs.iter().map(|n| sig.range(n)).collect();
    let outputs = match ranges {
        None => t.rows.into_iter().map(|r| r.1).collect(),
        Some(ranges) => {
            let mut keys = Odometer::new(ranges.iter().map(|r| r.len()).collect());
            let mut outputs = Vec::with_capacity(t.rows.len());
            for (key, out, span) in t.rows {
                let expected: Vec<Value> = match keys.next() {
                    Some(idx) => idx.iter().zip(&ranges).map(|(&i, r)| r.get(i).clone()).collect(),
                    None => return Err(ParseError::new(span, "table has too many rows", vec![])),
                };
                if key != expected {
                    let shown: Vec<String> = expected.iter().map(|v| v.to_string()).collect();
                    return Err(ParseError::new(
                        span,
                        "table rows must cover the inputs in order",
                        vec![format!("({})", shown.join(", "))],
                    ));
                }
                outputs.push(out);
            }
            outputs
        }
    };
    Ok(LookupTable::new(t.inputs, outputs))
}

/// Parses a model without checking that it is well-formed.
pub fn parse_model_unchecked(text: &str) -> Result<ConstrainedModel, ParseError> {
    let mut p = Parser::new(text)?;
    p.model()
}

/// Parses and validates a model.
pub fn parse_model(text: &str) -> Result<ConstrainedModel, LoadError> {
    let model = parse_model_unchecked(text)?;
    let report = validate_model(&model);
    if report.is_valid() {
        Ok(model)
    } else {
        Err(LoadError::Invalid(report))
    }
}

pub fn parse_formula_unchecked(text: &str) -> Result<CausalFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.cform()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a formula and checks its variables and values against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<CausalFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.cform()?;
    p.expect_end()?;
    p.check_uses(sig)?;
    Ok(f)
}

pub fn parse_state_formula(text: &str, sig: &Signature) -> Result<StateFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.sform()?;
    p.expect_end()?;
    p.check_uses(sig)?;
    Ok(f)
}

/// Parses an intervention written without brackets, e.g. `disc(A), B <- 1`.
pub fn parse_spec_unchecked(text: &str) -> Result<InterventionSpec, ParseError> {
    let mut p = Parser::new(text)?;
    let spec = p.spec()?;
    p.expect_end()?;
    Ok(spec)
}

pub fn parse_spec(text: &str, sig: &Signature) -> Result<InterventionSpec, ParseError> {
    let mut p = Parser::new(text)?;
    let spec = p.spec()?;
    p.expect_end()?;
    p.check_uses(sig)?;
    Ok(spec)
}

/// Parses `U=35, V=1`. Names and ranges are not checked.
pub fn parse_context(text: &str) -> Result<Assignment, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Assignment::new();
    if *p.peek() != Tok::Eof {
        loop {
            let (var, span) = p.ident()?;
            p.expect(Tok::Assign)?;
            let value = p.value()?;
            if out.insert(var.clone(), value).is_some() {
                return Err(ParseError::new(span, format!("`{var}` is given twice"), vec![]));
            }
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
    }
    p.expect_end()?;
    Ok(out)
}

/// Parses a list of `constraint <expr>` lines.
pub fn parse_links(text: &str) -> Result<Vec<Expr>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = vec![];
    while *p.peek() != Tok::Eof {
        p.expect_kw("constraint")?;
        out.push(p.expr()?);
    }
    Ok(out)
}
