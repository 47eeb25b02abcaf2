use std::io::{BufRead, Write};

use ccm_core::model::{ConstrainedModel, Context, VarKind};
use ccm_core::rewrite::DEFAULT_EXPANSION_CAP;
use ccm_core::semantics::Evaluator;
use ccm_core::syntax::{parse_context, parse_formula, parse_spec};

use crate::{eval_query, write_query, write_rewrite, write_solutions, CliError};

const HELP: &str = "\
<formula>            evaluate at the current context
:context U=40, ..    switch context
:solutions <spec>    list solutions, e.g. :solutions disc(TC), TF <- 104
:show <formula>      evaluate and list the solutions of each basic subformula
:rewrite <formula>   rewrite away disc(..)
:help
:quit
";

/// Reads commands line by line until `:quit` or end of input. Errors are
/// printed as `error: ...` lines and do not end the session.
pub fn run_repl(
    model: &ConstrainedModel,
    mut context: Context,
    input: impl BufRead,
    out: &mut dyn Write,
    json: bool,
    prompt: bool,
) -> Result<(), CliError> {
    let ev = Evaluator::new(model);
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(out, "ccm> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (cmd, rest) = match line.strip_prefix(':') {
            Some(c) => c.split_once(char::is_whitespace).map_or((c, ""), |(a, b)| (a, b.trim())),
            None => ("", line),
        };
        let result = match cmd {
            "quit" | "q" | "exit" => break,
            "help" => write!(out, "{HELP}").map_err(CliError::from),
            "context" => switch_context(model, rest).map(|u| context = u),
            "solutions" => parse_spec(rest, &model.signature)
                .map_err(CliError::from)
                .and_then(|s| write_solutions(out, &ev, &context, &s, json, false)),
            "show" | "" => parse_formula(rest, &model.signature)
                .map_err(CliError::from)
                .and_then(|f| eval_query(&ev, &context, &f))
                .and_then(|r| write_query(out, &r, json, cmd == "show")),
            "rewrite" => parse_formula(rest, &model.signature)
                .map_err(CliError::from)
                .and_then(|f| write_rewrite(out, model, &f, DEFAULT_EXPANSION_CAP, json)),
            other => Err(CliError::Parse(format!("unknown command `:{other}`, try :help"))),
        };
        if let Err(e) = result {
            writeln!(out, "error: {e}")?;
        }
    }
    Ok(())
}

fn switch_context(model: &ConstrainedModel, text: &str) -> Result<Context, CliError> {
    let u = parse_context(text)?;
    model.signature.check_assignment(&u, VarKind::Exogenous).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(u)
}
