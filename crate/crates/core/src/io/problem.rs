//! `.euc` problem files.
//!
//! ```text
//! problem := header stmt*
//! header  := "maxdepth" INT
//! stmt    := "[initial]" | "[goal]" | item
//! item    := "point" ID REAL REAL
//!          | "line" ID "through" ID ID | "line" ID "coeffs" REAL REAL REAL
//!          | "circle" ID "center" ID "through" ID
//!          | "circle" ID "params" REAL REAL REAL
//! ```
//!
//! Items belong to the most recent section. Labels share one namespace.
//! References name points declared earlier in the same section; goal items
//! may also reference initial points.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{is_identifier, parse_real, tokenize, ParseError, ParseErrorKind, Span, Token};
use crate::geometry::{circle_from, line_through, Circle, Line, Point, Primitive, Tolerance};
use crate::problem::Problem;
use crate::scene::{PointOrigin, Scene, SceneError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseOptions {
    pub epsilon_abs: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            epsilon_abs: Tolerance::DEFAULT_EPSILON,
        }
    }
}

/// A parsed problem together with its source and the span of every label
/// declaration.
#[derive(Debug, Clone)]
pub struct ProblemDocument {
    pub source: String,
    pub problem: Problem,
    pub spans: HashMap<String, Span>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Channel {
    Initial,
    Goal,
}

#[derive(Debug, Clone, Copy)]
struct Ref {
    span: Span,
    index: usize,
}

#[derive(Debug, Clone, Copy)]
enum PrimDef {
    LineThrough(Ref, Ref),
    LineCoeffs([f64; 3], Span),
    CircleThrough(Ref, Ref),
    CircleParams([f64; 3], Span),
}

#[derive(Debug, Clone)]
enum Item {
    Point { label: String, span: Span, pos: Point },
    Prim { label: String, span: Span, def: PrimDef },
}

pub fn parse_problem(text: &str) -> Result<ProblemDocument, ParseError> {
    parse_problem_with(text, &ParseOptions::default())
}

pub fn parse_problem_with(text: &str, options: &ParseOptions) -> Result<ProblemDocument, ParseError> {
    let mut max_depth: Option<u32> = None;
    let mut channel: Option<Channel> = None;
    let mut items: Vec<(Channel, Item)> = Vec::new();
    // label -> (channel, index into `items`, is_point)
    let mut labels: HashMap<String, (Channel, usize, bool)> = HashMap::new();
    let mut spans = HashMap::new();
    let mut last_line = (1, 1);

    for (i, line) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let toks = tokenize(line_no, line);
        let Some(first) = toks.first() else { continue };
        last_line = (line_no, line.chars().count() + 1);

        if max_depth.is_none() {
            if first.text != "maxdepth" {
                return Err(ParseError::syntax(
                    first.span,
                    format!("expected `maxdepth` header, found `{}`", first.text),
                ));
            }
            let value = toks
                .get(1)
                .ok_or_else(|| ParseError::syntax(first.span, "`maxdepth` needs an integer"))?;
            let depth = value.text.parse::<u32>().map_err(|_| {
                ParseError::syntax(
                    value.span,
                    format!("expected a non-negative integer, found `{}`", value.text),
                )
            })?;
            expect_end(&toks, 2)?;
            max_depth = Some(depth);
            continue;
        }

        match first.text {
            "[initial]" | "[goal]" => {
                expect_end(&toks, 1)?;
                channel = Some(if first.text == "[initial]" {
                    Channel::Initial
                } else {
                    Channel::Goal
                });
                continue;
            }
            t if t.starts_with('[') => {
                return Err(ParseError::syntax(first.span, format!("unknown section `{t}`")));
            }
            _ => {}
        }
        let ch = channel.ok_or_else(|| {
            ParseError::syntax(first.span, "item before any `[initial]` or `[goal]` section")
        })?;
        let item = parse_item(&toks, ch, &labels)?;
        let (label, span, is_point) = match &item {
            Item::Point { label, span, .. } => (label.clone(), *span, true),
            Item::Prim { label, span, .. } => (label.clone(), *span, false),
        };
        if labels.contains_key(&label) {
            return Err(ParseError::new(
                ParseErrorKind::DuplicateLabel,
                span,
                format!("label `{label}` is already declared"),
            ));
        }
        labels.insert(label.clone(), (ch, items.len(), is_point));
        spans.insert(label, span);
        items.push((ch, item));
    }

    let max_depth = max_depth.ok_or_else(|| {
        ParseError::syntax(Span::new(last_line.0, 1, 1), "missing `maxdepth` header")
    })?;
    let tol = Tolerance::new(options.epsilon_abs, scene_diameter(&items))
        .map_err(|e| ParseError::syntax(Span::new(1, 1, 1), e.to_string()))?;
    let initial = build_scene(&items, Channel::Initial, tol)?;
    let goal = build_scene(&items, Channel::Goal, tol)?;
    let problem = Problem::new(initial, goal, max_depth).expect("scenes share one tolerance");
    Ok(ProblemDocument {
        source: text.to_string(),
        problem,
        spans,
    })
}

fn expect_end(toks: &[Token<'_>], n: usize) -> Result<(), ParseError> {
    match toks.get(n) {
        Some(extra) => Err(ParseError::syntax(
            extra.span,
            format!("unexpected `{}` at end of statement", extra.text),
        )),
        None => Ok(()),
    }
}

fn parse_item(
    toks: &[Token<'_>],
    ch: Channel,
    labels: &HashMap<String, (Channel, usize, bool)>,
) -> Result<Item, ParseError> {
    let kw = toks[0];
    let need = |i: usize, what: &str| -> Result<Token<'_>, ParseError> {
        toks.get(i).copied().ok_or_else(|| {
            let last = toks.last().expect("non-empty");
            ParseError::syntax(last.span, format!("expected {what} after `{}`", last.text))
        })
    };
    let ident = |i: usize| -> Result<Token<'_>, ParseError> {
        let t = need(i, "an identifier")?;
        if is_identifier(t.text) {
            Ok(t)
        } else {
            Err(ParseError::syntax(t.span, format!("expected an identifier, found `{}`", t.text)))
        }
    };
    let keyword = |i: usize, want: &str| -> Result<(), ParseError> {
        let t = need(i, &format!("`{want}`"))?;
        if t.text == want {
            Ok(())
        } else {
            Err(ParseError::syntax(t.span, format!("expected `{want}`, found `{}`", t.text)))
        }
    };
    let reference = |i: usize| -> Result<Ref, ParseError> {
        let t = ident(i)?;
        match labels.get(t.text) {
            Some(&(c, index, true)) if c == ch || c == Channel::Initial => Ok(Ref { span: t.span, index }),
            Some(&(_, _, true)) => Err(ParseError::new(
                ParseErrorKind::UnknownReference,
                t.span,
                format!("point `{}` belongs to the goal and cannot be referenced here", t.text),
            )),
            Some(_) => Err(ParseError::new(
                ParseErrorKind::UnknownReference,
                t.span,
                format!("`{}` is not a point", t.text),
            )),
            None => Err(ParseError::new(
                ParseErrorKind::UnknownReference,
                t.span,
                format!("undeclared point `{}`", t.text),
            )),
        }
    };
    let reals = |from: usize| -> Result<([f64; 3], Span), ParseError> {
        let mut v = [0.0; 3];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = parse_real(&need(from + k, "a real number")?)?;
        }
        let (s, e) = (toks[from].span, toks[from + 2].span);
        Ok((v, Span::new(s.line, s.col, e.col + e.len - s.col)))
    };

    match kw.text {
        "point" => {
            let label = ident(1)?;
            let x = parse_real(&need(2, "an x coordinate")?)?;
            let y = parse_real(&need(3, "a y coordinate")?)?;
            expect_end(toks, 4)?;
            Ok(Item::Point {
                label: label.text.to_string(),
                span: label.span,
                pos: Point::new(x, y),
            })
        }
        "line" => {
            let label = ident(1)?;
            let form = need(2, "`through` or `coeffs`")?;
            let def = match form.text {
                "through" => {
                    let a = reference(3)?;
                    let b = reference(4)?;
                    expect_end(toks, 5)?;
                    PrimDef::LineThrough(a, b)
                }
                "coeffs" => {
                    let (v, span) = reals(3)?;
                    expect_end(toks, 6)?;
                    PrimDef::LineCoeffs(v, span)
                }
                other => {
                    return Err(ParseError::syntax(
                        form.span,
                        format!("expected `through` or `coeffs`, found `{other}`"),
                    ))
                }
            };
            Ok(Item::Prim {
                label: label.text.to_string(),
                span: label.span,
                def,
            })
        }
        "circle" => {
            let label = ident(1)?;
            let form = need(2, "`center` or `params`")?;
            let def = match form.text {
                "center" => {
                    let c = reference(3)?;
                    keyword(4, "through")?;
                    let t = reference(5)?;
                    expect_end(toks, 6)?;
                    PrimDef::CircleThrough(c, t)
                }
                "params" => {
                    let (v, span) = reals(3)?;
                    expect_end(toks, 6)?;
                    PrimDef::CircleParams(v, span)
                }
                other => {
                    return Err(ParseError::syntax(
                        form.span,
                        format!("expected `center` or `params`, found `{other}`"),
                    ))
                }
            };
            Ok(Item::Prim {
                label: label.text.to_string(),
                span: label.span,
                def,
            })
        }
        other => Err(ParseError::syntax(
            kw.span,
            format!("expected `point`, `line`, `circle` or a section, found `{other}`"),
        )),
    }
}

/// Diagonal of the bounding box of all declared points and circles.
fn scene_diameter(items: &[(Channel, Item)]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut grow = |x: f64, y: f64| {
        lo = [lo[0].min(x), lo[1].min(y)];
        hi = [hi[0].max(x), hi[1].max(y)];
    };
    for (_, item) in items {
        match item {
            Item::Point { pos, .. } => grow(pos.x, pos.y),
            Item::Prim {
                def: PrimDef::CircleParams([cx, cy, r], _),
                ..
            } => {
                let r = r.abs();
                grow(cx - r, cy - r);
                grow(cx + r, cy + r);
            }
            Item::Prim {
                def: PrimDef::CircleThrough(center, through),
                ..
            } => {
                let pos = |i: usize| match &items[i].1 {
                    Item::Point { pos, .. } => *pos,
                    Item::Prim { .. } => unreachable!("references resolve to points"),
                };
                let (c, t) = (pos(center.index), pos(through.index));
                let r = c.distance(&t);
                grow(c.x - r, c.y - r);
                grow(c.x + r, c.y + r);
            }
            Item::Prim { .. } => {}
        }
    }
    if lo[0] > hi[0] {
        return 0.0;
    }
    let d = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    if d.is_finite() {
        d
    } else {
        0.0
    }
}

fn build_scene(items: &[(Channel, Item)], ch: Channel, tol: Tolerance) -> Result<Scene, ParseError> {
    let mut scene = Scene::new(tol);
    let degenerate = |span: Span, msg: String| ParseError::new(ParseErrorKind::DegenerateDefinition, span, msg);
    for (c, item) in items {
        if let (true, Item::Point { label, span, pos }) = (*c == ch, item) {
            scene = scene.add_point(label, *pos).map_err(|e| match e {
                SceneError::CoincidentPoint { existing, .. } => degenerate(
                    *span,
                    format!("point `{label}` coincides with point `{existing}`"),
                ),
                other => degenerate(*span, other.to_string()),
            })?;
        }
    }
    let pos_of = |r: &Ref| match &items[r.index].1 {
        Item::Point { pos, .. } => *pos,
        Item::Prim { .. } => unreachable!("references resolve to points"),
    };
    for (c, item) in items {
        let Item::Prim { label, span, def } = item else { continue };
        if *c != ch {
            continue;
        }
        let prim: Primitive = match def {
            PrimDef::LineThrough(a, b) => line_through(pos_of(a), pos_of(b), &tol)
                .map_err(|_| degenerate(b.span, format!("line `{label}` through coincident points")))?
                .into(),
            PrimDef::CircleThrough(center, through) => circle_from(pos_of(center), pos_of(through), &tol)
                .map_err(|_| degenerate(through.span, format!("circle `{label}` has zero radius")))?
                .into(),
            PrimDef::LineCoeffs([a, b, cc], s) => Line::from_coeffs(*a, *b, *cc)
                .map_err(|_| degenerate(*s, format!("line `{label}` has a = b = 0")))?
                .into(),
            PrimDef::CircleParams([x, y, r], s) => {
                if *r <= tol.eps() {
                    return Err(degenerate(*s, format!("circle `{label}` needs a positive radius")));
                }
                Circle::new(Point::new(*x, *y), *r)
                    .map_err(|e| degenerate(*s, e.to_string()))?
                    .into()
            }
        };
        scene = scene.add_labeled_primitive(label, prim).map_err(|e| match e {
            SceneError::DuplicatePrimitive { existing } => {
                degenerate(*span, format!("`{label}` duplicates primitive `{existing}`"))
            }
            other => degenerate(*span, other.to_string()),
        })?;
    }
    Ok(scene)
}

/// Writes a problem back as text. Primitives are written in parameter form;
/// generated intersection points are omitted since parsing recreates them.
pub fn serialize_problem(problem: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "maxdepth {}", problem.max_depth());
    for (name, scene) in [("[initial]", problem.initial()), ("[goal]", problem.goal())] {
        let _ = writeln!(out, "{name}");
        for p in scene.points().iter().filter(|p| p.origin == PointOrigin::Given) {
            let _ = writeln!(out, "point {} {:?} {:?}", p.label, p.pos.x + 0.0, p.pos.y + 0.0);
        }
        for sp in scene.primitives() {
            match &sp.prim {
                Primitive::Line(l) => {
                    let _ = writeln!(out, "line {} coeffs {:?} {:?} {:?}", sp.label, l.a() + 0.0, l.b() + 0.0, l.c() + 0.0);
                }
                Primitive::Circle(c) => {
                    let _ = writeln!(
                        out,
                        "circle {} params {:?} {:?} {:?}",
                        sp.label,
                        c.center().x,
                        c.center().y,
                        c.radius()
                    );
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const BISECTOR: &str = "maxdepth 3\n[initial]\npoint A 0 0\npoint B 4 0\n[goal]\nline pb coeffs 1 0 -2";

    fn err(text: &str) -> ParseError {
        parse_problem(text).expect_err("should fail")
    }

    #[test]
    fn bisector_instance() {
        let doc = parse_problem(BISECTOR).unwrap();
        let p = &doc.problem;
        assert_eq!(p.max_depth(), 3);
        assert_eq!(p.initial().points().len(), 2);
        assert_eq!(p.goal().primitives().len(), 1);
        match p.goal().primitives()[0].prim {
            Primitive::Line(l) => assert_eq!(l.coeffs(), [1.0, 0.0, -2.0]),
            _ => panic!("expected a line"),
        }
        assert_eq!(doc.spans["B"], Span::new(4, 7, 1));
    }

    #[test]
    fn unknown_reference() {
        let text = "maxdepth 1\n[initial]\npoint A 0 0\nline l through A Z\n";
        let e = err(text);
        assert_eq!(e.kind, ParseErrorKind::UnknownReference);
        assert_eq!(e.span.slice(text), Some("Z"));
    }

    #[test]
    fn degenerate_circle() {
        let text = "maxdepth 1\n[initial]\npoint A 0 0\ncircle k center A through A\n";
        let e = err(text);
        assert_eq!(e.kind, ParseErrorKind::DegenerateDefinition);
        assert_eq!(e.span, Span::new(4, 27, 1));
    }

    #[test]
    fn duplicate_label_across_kinds() {
        let text = "maxdepth 1\n[initial]\npoint A 0 0\npoint B 1 0\nline A through A B\n";
        let e = err(text);
        assert_eq!(e.kind, ParseErrorKind::DuplicateLabel);
        assert_eq!(e.span, Span::new(5, 6, 1));
    }

    #[test]
    fn goal_may_reference_initial_but_not_reverse() {
        let ok = "maxdepth 1\n[initial]\npoint A 0 0\n[goal]\npoint G 1 1\nline g through A G\n";
        assert!(parse_problem(ok).is_ok());
        let bad = "maxdepth 1\n[goal]\npoint G 1 1\n[initial]\npoint A 0 0\nline l through A G\n";
        assert_eq!(err(bad).kind, ParseErrorKind::UnknownReference);
    }

    #[test]
    fn forward_reference_is_unknown() {
        let text = "maxdepth 1\n[initial]\nline l through A B\npoint A 0 0\npoint B 1 0\n";
        assert_eq!(err(text).kind, ParseErrorKind::UnknownReference);
    }

    #[test]
    fn syntax_errors() {
        let e = err("point A 0 0\n");
        assert_eq!((e.kind, e.span), (ParseErrorKind::Syntax, Span::new(1, 1, 5)));
        let e = err("maxdepth -1\n");
        assert_eq!(e.span, Span::new(1, 10, 2));
        let e = err("maxdepth 2\npoint A 0 0\n");
        assert_eq!(e.span, Span::new(2, 1, 5));
        let e = err("maxdepth 2\n[initial]\npoint A 0 zero\n");
        assert_eq!(e.span, Span::new(3, 11, 4));
        let e = err("maxdepth 2\n[initial]\npoint A 0 0 7\n");
        assert_eq!(e.span, Span::new(3, 13, 1));
        let e = err("maxdepth 2\n[initial]\nray r 0 0\n");
        assert_eq!(e.span, Span::new(3, 1, 3));
        let e = err("maxdepth 2\n[middle]\n");
        assert_eq!(e.span, Span::new(2, 1, 8));
        let e = err("# only a comment\n");
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn comments_and_crlf() {
        let text = "# header comment\r\nmaxdepth 2 # depth\r\n[initial]\r\npoint A 0 0\r\npoint B 1 0\r\n";
        let doc = parse_problem(text).unwrap();
        assert_eq!(doc.problem.initial().points().len(), 2);
    }

    #[test]
    fn round_trip() {
        let text = "maxdepth 4\n[initial]\npoint A 0 0\npoint B 4 0\nline ab through A B\ncircle k center A through B\n[goal]\npoint G 2 1\nline g through A G\ncircle h params 1 2 0.5\n";
        let p1 = parse_problem(text).unwrap().problem;
        let s = serialize_problem(&p1);
        let p2 = parse_problem(&s).unwrap().problem;
        assert!(p1.structurally_eq(&p2), "{s}");
        assert_eq!(serialize_problem(&p2), s);
    }

    #[test]
    fn epsilon_override() {
        let doc = parse_problem_with(BISECTOR, &ParseOptions { epsilon_abs: 1e-9 }).unwrap();
        assert_eq!(doc.problem.tolerance().epsilon_abs(), 1e-9);
        assert_eq!(doc.problem.tolerance().scene_diameter(), 4.0);
    }
}
