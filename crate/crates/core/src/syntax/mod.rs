//! Text syntax for models, formulas, interventions and contexts.
//!
//! Every renderer produces text its parser reads back to an equal value.

mod lexer;
mod parser;
mod render;

use std::fmt;

use thiserror::Error;

use crate::model::ValidationReport;

pub use parser::{
    parse_context, parse_formula, parse_formula_unchecked, parse_links, parse_model,
    parse_model_unchecked, parse_spec, parse_spec_unchecked, parse_state_formula,
};
pub use render::{
    render_assignment, render_basic, render_expr, render_formula, render_model, render_range,
    render_spec, render_state_formula, render_value,
};

pub const KEYWORDS: &[&str] = &[
    "model", "exogenous", "endogenous", "eq", "constraint", "states", "if", "then", "else", "disc",
    "true", "false", "table",
];

/// Identifier syntax that is not a reserved word.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else { return false };
    (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !KEYWORDS.contains(&s)
}

/// Position in the source text. Lines and columns count from 1, the byte
/// offset from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>, expected: Vec<String>) -> Self {
        ParseError { span, message: message.into(), expected }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

/// Failure to load a model: either bad syntax or an ill-formed model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("invalid model:\n{0}")]
    Invalid(ValidationReport),
}
