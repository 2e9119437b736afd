//! `.trace` solution files.
//!
//! ```text
//! trace
//! signature 3f1c0e9a5b7d2468     (optional)
//! circle A B
//! circle B A
//! => P1 2 -3.4641016151377544
//! => P2 2 3.4641016151377544
//! line P1 P2
//! ```
//!
//! Each `=>` line records one point born from the preceding move.

use std::fmt::Write as _;

use super::{is_identifier, parse_real, tokenize, ParseError, Span};
use crate::geometry::Point;
use crate::moves::{Move, MoveKind};
use crate::scene::SceneSignature;
use crate::search::{Birth, SolutionTrace};

pub fn serialize_trace(trace: &SolutionTrace) -> String {
    let mut out = String::from("trace\n");
    if let Some(sig) = trace.final_signature {
        let _ = writeln!(out, "signature {sig}");
    }
    for (i, mv) in trace.moves.iter().enumerate() {
        let _ = writeln!(out, "{} {} {}", mv.kind.keyword(), mv.first, mv.second);
        for b in trace.births.get(i).into_iter().flatten() {
            let _ = writeln!(out, "=> {} {:?} {:?}", b.label, b.pos.x + 0.0, b.pos.y + 0.0);
        }
    }
    out
}

pub fn parse_trace(text: &str) -> Result<SolutionTrace, ParseError> {
    let mut trace = SolutionTrace::default();
    let mut header = false;
    let mut last = Span::new(1, 1, 1);
    for (i, line) in text.split('\n').enumerate() {
        let toks = tokenize(i + 1, line);
        let Some(first) = toks.first() else { continue };
        last = first.span;
        let arity = |n: usize| -> Result<(), ParseError> {
            if let Some(extra) = toks.get(n) {
                return Err(ParseError::syntax(extra.span, format!("unexpected `{}`", extra.text)));
            }
            if toks.len() < n {
                let l = toks.last().expect("non-empty");
                return Err(ParseError::syntax(l.span, format!("`{}` expects {} operand(s)", first.text, n - 1)));
            }
            Ok(())
        };
        let label = |k: usize| -> Result<String, ParseError> {
            let t = toks[k];
            if is_identifier(t.text) {
                Ok(t.text.to_string())
            } else {
                Err(ParseError::syntax(t.span, format!("expected a point label, found `{}`", t.text)))
            }
        };
        if !header {
            if first.text != "trace" {
                return Err(ParseError::syntax(first.span, format!("expected `trace` header, found `{}`", first.text)));
            }
            arity(1)?;
            header = true;
            continue;
        }
        match first.text {
            "signature" => {
                arity(2)?;
                if !trace.moves.is_empty() || trace.final_signature.is_some() {
                    return Err(ParseError::syntax(first.span, "`signature` must directly follow the header"));
                }
                let t = toks[1];
                let v = u64::from_str_radix(t.text, 16)
                    .ok()
                    .filter(|_| t.text.len() == 16)
                    .ok_or_else(|| ParseError::syntax(t.span, format!("expected 16 hex digits, found `{}`", t.text)))?;
                trace.final_signature = Some(SceneSignature(v));
            }
            "line" | "circle" => {
                arity(3)?;
                let (a, b) = (label(1)?, label(2)?);
                let mv = if first.text == "line" {
                    Move {
                        kind: MoveKind::LineThrough,
                        first: a,
                        second: b,
                    }
                } else {
                    Move::circle(&a, &b)
                };
                trace.moves.push(mv);
                trace.births.push(Vec::new());
            }
            "=>" => {
                arity(4)?;
                let l = label(1)?;
                let x = parse_real(&toks[2])?;
                let y = parse_real(&toks[3])?;
                let slot = trace
                    .births
                    .last_mut()
                    .ok_or_else(|| ParseError::syntax(first.span, "birth annotation before any move"))?;
                slot.push(Birth {
                    label: l,
                    pos: Point::new(x, y),
                });
            }
            other => {
                return Err(ParseError::syntax(
                    first.span,
                    format!("expected `line`, `circle` or `=>`, found `{other}`"),
                ))
            }
        }
    }
    if !header {
        return Err(ParseError::syntax(last, "missing `trace` header"));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::ParseErrorKind;

    #[test]
    fn empty_trace_is_header_only() {
        let t = SolutionTrace::default();
        let s = serialize_trace(&t);
        assert_eq!(s, "trace\n");
        assert_eq!(parse_trace(&s).unwrap(), t);
    }

    #[test]
    fn line_moves_keep_written_order() {
        // `Move::line` sorts its labels; a parsed trace keeps them verbatim.
        let t = parse_trace("trace\nline P2 P1\n").unwrap();
        assert_eq!(t.moves[0].first, "P2");
    }

    #[test]
    fn births_attach_to_preceding_move() {
        let text = "trace\nsignature 00000000000000ff\ncircle A B\ncircle B A\n=> P1 2 -3.5\n=> P2 2 3.5\nline P1 P2\n";
        let t = parse_trace(text).unwrap();
        assert_eq!(t.moves.len(), 3);
        assert_eq!(t.births.iter().map(Vec::len).collect::<Vec<_>>(), vec![0, 2, 0]);
        assert_eq!(t.final_signature, Some(SceneSignature(255)));
        assert_eq!(parse_trace(&serialize_trace(&t)).unwrap(), t);
    }

    #[test]
    fn malformed() {
        let e = parse_trace("trace\narc A B\n").unwrap_err();
        assert_eq!((e.kind, e.span), (ParseErrorKind::Syntax, Span::new(2, 1, 3)));
        let e = parse_trace("trace\n=> P1 0 0\n").unwrap_err();
        assert_eq!(e.span.line, 2);
        let e = parse_trace("line A B\n").unwrap_err();
        assert_eq!(e.span, Span::new(1, 1, 4));
        let e = parse_trace("trace\nline A\n").unwrap_err();
        assert_eq!(e.span, Span::new(2, 6, 1));
        let e = parse_trace("trace\ncircle A B\n=> P1 x 0\n").unwrap_err();
        assert_eq!(e.span, Span::new(3, 7, 1));
        assert!(parse_trace("").is_err());
    }
}
