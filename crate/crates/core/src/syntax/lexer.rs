use num_bigint::BigInt;

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    Assign,
    LArrow,
    Arrow,
    Iff,
    Amp,
    Pipe,
    Bang,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Comma,
    Colon,
    DotDot,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub(crate) fn symbol(&self) -> &'static str {
        match self {
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Assign => "=",
            Tok::LArrow => "<-",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Bang => "!",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::DotDot => "..",
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let span = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        line,
        column: text[line_start..start].chars().count() + 1,
        offset: start,
        len: end - start,
    };
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Int(text[start..i].parse().expect("ascii digits"))
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else {
            let rest = &bytes[i..];
            let (tok, n) = if rest.starts_with(b"<->") {
                (Tok::Iff, 3)
            } else if rest.starts_with(b"<-") {
                (Tok::LArrow, 2)
            } else if rest.starts_with(b"->") {
                (Tok::Arrow, 2)
            } else if rest.starts_with(b"<=") {
                (Tok::Le, 2)
            } else if rest.starts_with(b">=") {
                (Tok::Ge, 2)
            } else if rest.starts_with(b"==") {
                (Tok::EqEq, 2)
            } else if rest.starts_with(b"!=") {
                (Tok::Ne, 2)
            } else if rest.starts_with(b"..") {
                (Tok::DotDot, 2)
            } else {
                let t = match c {
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b'<' => Tok::Lt,
                    b'>' => Tok::Gt,
                    b'=' => Tok::Assign,
                    b'&' => Tok::Amp,
                    b'|' => Tok::Pipe,
                    b'!' => Tok::Bang,
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'/' => Tok::Slash,
                    b'%' => Tok::Percent,
                    b',' => Tok::Comma,
                    b':' => Tok::Colon,
                    _ => {
                        let ch = text[i..].chars().next().expect("in bounds");
                        return Err(ParseError::new(
                            span(start, start + ch.len_utf8(), line, line_start),
                            format!("unexpected character `{ch}`"),
                            vec![],
                        ));
                    }
                };
                (t, 1)
            };
            i += n;
            tok
        };
        out.push(Token { tok, span: span(start, i, line, line_start) });
    }
    out.push(Token { tok: Tok::Eof, span: span(bytes.len(), bytes.len(), line, line_start) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_are_greedy() {
        assert_eq!(
            toks("<A<-0>"),
            vec![Tok::Lt, Tok::Ident("A".into()), Tok::LArrow, Tok::Int(0.into()), Tok::Gt, Tok::Eof]
        );
        assert_eq!(toks("a <-> b")[1], Tok::Iff);
        assert_eq!(toks("30..45")[1], Tok::DotDot);
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let t = tokenize("model M # comment\n  eq").unwrap();
        assert_eq!(t[2].span.line, 2);
        assert_eq!(t[2].span.column, 3);
        assert_eq!(t[2].span.offset, 20);
        assert_eq!(t[2].span.len, 2);
    }

    #[test]
    fn bad_character_has_a_span() {
        let err = tokenize("a $ b").unwrap_err();
        assert_eq!(err.span.offset, 2);
    }
}
