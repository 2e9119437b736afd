//! Textual interchange: `.euc` problem files and `.trace` solution files.
//!
//! Both formats are line oriented, UTF-8, `#` starts a comment. Every parse
//! error carries a [`Span`] pointing into the offending token.

mod problem;
mod trace;

use std::fmt;

use thiserror::Error;

pub use problem::{parse_problem, parse_problem_with, serialize_problem, ParseOptions, ProblemDocument};
pub use trace::{parse_trace, serialize_trace};

/// 1-based line and column (in characters), with a length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub len: usize,
}

impl Span {
    pub fn new(line: usize, col: usize, len: usize) -> Span {
        Span { line, col, len }
    }

    /// The spanned text of `source`, if the span lies inside it.
    pub fn slice<'s>(&self, source: &'s str) -> Option<&'s str> {
        let line = source.lines().nth(self.line.checked_sub(1)?)?;
        let start = line.char_indices().nth(self.col.checked_sub(1)?)?.0;
        let end = line
            .char_indices()
            .nth(self.col - 1 + self.len)
            .map_or(line.len(), |(i, _)| i);
        Some(&line[start..end])
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    DuplicateLabel,
    UnknownReference,
    DegenerateDefinition,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::DuplicateLabel => "duplicate label",
            ParseErrorKind::UnknownReference => "unknown reference",
            ParseErrorKind::DegenerateDefinition => "degenerate definition",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, span: Span, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            span,
            message: message.into(),
        }
    }

    pub(crate) fn syntax(span: Span, message: impl Into<String>) -> Self {
        Self::new(ParseErrorKind::Syntax, span, message)
    }

    /// Error message followed by the offending source line and a caret
    /// marker under the span.
    pub fn render(&self, source: &str) -> String {
        let mut out = self.to_string();
        if let Some(line) = source.lines().nth(self.span.line.saturating_sub(1)) {
            out.push('\n');
            out.push_str(line);
            out.push('\n');
            out.push_str(&" ".repeat(self.span.col.saturating_sub(1)));
            out.push_str(&"^".repeat(self.span.len.max(1)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'s> {
    pub text: &'s str,
    pub span: Span,
}

/// Splits one line into whitespace-separated tokens, dropping any `#`
/// comment.
pub(crate) fn tokenize(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let code = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in code.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &code[b..byte],
                    span: Span::new(line_no, c + 1, col - c),
                });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        let n = code[b..].chars().count();
        tokens.push(Token {
            text: &code[b..],
            span: Span::new(line_no, c + 1, n),
        });
    }
    tokens
}

/// Decimal real with optional sign, fraction and exponent. No `inf`/`nan`.
pub(crate) fn parse_real(tok: &Token<'_>) -> Result<f64, ParseError> {
    let t = tok.text;
    let digits_ok = t.bytes().any(|b| b.is_ascii_digit())
        && t
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E'));
    match t.parse::<f64>() {
        Ok(v) if digits_ok && v.is_finite() => Ok(v),
        _ => Err(ParseError::syntax(tok.span, format!("expected a real number, found `{t}`"))),
    }
}

pub(crate) fn is_identifier(t: &str) -> bool {
    let mut chars = t.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_columns() {
        let toks = tokenize(3, "  point A  1.5 -2 # trailing");
        let got: Vec<(&str, usize, usize)> = toks.iter().map(|t| (t.text, t.span.col, t.span.len)).collect();
        assert_eq!(got, vec![("point", 3, 5), ("A", 9, 1), ("1.5", 12, 3), ("-2", 16, 2)]);
        assert!(toks.iter().all(|t| t.span.line == 3));
    }

    #[test]
    fn span_slices_source() {
        let src = "maxdepth 3\n[initial]\npoint Ä 0 0\n";
        let toks = tokenize(3, src.lines().nth(2).unwrap());
        assert_eq!(toks[1].span.slice(src), Some("Ä"));
        assert_eq!(toks[3].span.slice(src), Some("0"));
    }

    #[test]
    fn reals() {
        let tok = |t: &'static str| Token {
            text: t,
            span: Span::new(1, 1, t.len()),
        };
        assert_eq!(parse_real(&tok("1e-3")).unwrap(), 1e-3);
        assert_eq!(parse_real(&tok("-.5")).unwrap(), -0.5);
        assert!(parse_real(&tok("inf")).is_err());
        assert!(parse_real(&tok("NaN")).is_err());
        assert!(parse_real(&tok("1e999")).is_err());
        assert!(parse_real(&tok("abc")).is_err());
    }
}
