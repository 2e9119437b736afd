//! SVG rendering of scenes and an anti-aliased rasterizer for the subset of
//! SVG that [`render_scene`] emits.
//!
//! Existing primitives are black, goal primitives blue, and the newest move
//! of a step panel orange. Numbers are printed with three decimals so that
//! identical inputs give byte-identical documents.

use std::fmt::Write as _;

use euclid_core::{
    replay_scenes, Circle, Line, Point, PointOrigin, Primitive, Problem, Scene, SolutionTrace, VerifyError,
};
use image::{GrayImage, Luma};
use thiserror::Error;

pub const EXISTING: &str = "#000000";
pub const GOAL: &str = "#0000FF";
pub const HIGHLIGHT: &str = "#FF8800";
const BACKGROUND: &str = "#FFFFFF";
const STROKE_WIDTH: f64 = 2.0;
const MARKER: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("empty viewport: {0}")]
    EmptyViewport(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("malformed svg: {0}")]
    MalformedSvg(String),
    #[error("raster resolution must be positive")]
    ZeroResolution,
}

/// A scene-space window mapped onto a `resolution`-pixel-wide canvas, with
/// y pointing up in the scene and down on the canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub min_x: f64,
    pub min_y: f64,
    pub width: f64,
    pub height: f64,
    pub resolution: u32,
}

impl Viewport {
    pub const MIN_RESOLUTION: u32 = 64;

    pub fn new(min_x: f64, min_y: f64, width: f64, height: f64, resolution: u32) -> Result<Viewport, RenderError> {
        let vp = Viewport {
            min_x,
            min_y,
            width,
            height,
            resolution,
        };
        vp.check()?;
        Ok(vp)
    }

    fn check(&self) -> Result<(), RenderError> {
        let finite = [self.min_x, self.min_y, self.width, self.height].iter().all(|v| v.is_finite());
        if !finite || self.width <= 0.0 || self.height <= 0.0 {
            return Err(RenderError::EmptyViewport(format!(
                "{} x {} window",
                self.width, self.height
            )));
        }
        if self.resolution < Self::MIN_RESOLUTION {
            return Err(RenderError::EmptyViewport(format!(
                "resolution {} below {}",
                self.resolution,
                Self::MIN_RESOLUTION
            )));
        }
        Ok(())
    }

    /// Square window around every point and circle of `scenes`, with a 15%
    /// margin. Falls back to a unit window around the origin.
    pub fn fit(scenes: &[&Scene], resolution: u32) -> Result<Viewport, RenderError> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut grow = |x: f64, y: f64| {
            lo = [lo[0].min(x), lo[1].min(y)];
            hi = [hi[0].max(x), hi[1].max(y)];
        };
        for s in scenes {
            for p in s.points() {
                grow(p.pos.x, p.pos.y);
            }
            for p in s.primitives() {
                if let Primitive::Circle(c) = p.prim {
                    let (o, r) = (c.center(), c.radius());
                    grow(o.x - r, o.y - r);
                    grow(o.x + r, o.y + r);
                }
            }
        }
        if lo[0] > hi[0] {
            lo = [-1.0, -1.0];
            hi = [1.0, 1.0];
        }
        let side = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-6) * 1.3;
        let cx = 0.5 * (lo[0] + hi[0]);
        let cy = 0.5 * (lo[1] + hi[1]);
        Viewport::new(cx - side / 2.0, cy - side / 2.0, side, side, resolution)
    }

    pub fn scale(&self) -> f64 {
        self.resolution as f64 / self.width
    }

    pub fn pixel_size(&self) -> (u32, u32) {
        let h = (self.height * self.scale()).round().max(1.0) as u32;
        (self.resolution, h)
    }

    pub fn to_pixel(&self, p: &Point) -> Point {
        let s = self.scale();
        Point::new((p.x - self.min_x) * s, (self.min_y + self.height - p.y) * s)
    }

    pub fn to_scene(&self, p: &Point) -> Point {
        let s = self.scale();
        Point::new(self.min_x + p.x / s, self.min_y + self.height - p.y / s)
    }

    /// The primitive in canvas pixel coordinates.
    pub fn primitive_to_pixel(&self, prim: &Primitive) -> Primitive {
        map_primitive(prim, |p| self.to_pixel(p), self.scale())
    }

    pub fn primitive_to_scene(&self, prim: &Primitive) -> Primitive {
        map_primitive(prim, |p| self.to_scene(p), 1.0 / self.scale())
    }
}

fn map_primitive(prim: &Primitive, f: impl Fn(&Point) -> Point, scale: f64) -> Primitive {
    match prim {
        Primitive::Line(l) => {
            let o = l.project(&Point::new(0.0, 0.0));
            let (dx, dy) = l.direction();
            let (p, q) = (f(&o), f(&Point::new(o.x + dx, o.y + dy)));
            // Unit direction in, unit direction out: the map is a similarity.
            let (ux, uy) = (q.x - p.x, q.y - p.y);
            Line::from_coeffs(-uy, ux, uy * p.x - ux * p.y)
                .expect("similarity keeps lines non-degenerate")
                .into()
        }
        Primitive::Circle(c) => Circle::new(f(&c.center()), c.radius() * scale)
            .expect("similarity keeps radii positive")
            .into(),
    }
}

/// Which decorations to draw besides primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Style {
    pub points: bool,
    pub labels: bool,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            points: true,
            labels: true,
        }
    }
}

pub fn render_scene(existing: &Scene, goal: &Scene, vp: &Viewport) -> Result<String, RenderError> {
    render_with(existing, goal, None, vp, &Style::default())
}

/// Like [`render_scene`], optionally stroking the primitive at `highlight`
/// (an index into `existing.primitives()`) orange.
pub fn render_with(
    existing: &Scene,
    goal: &Scene,
    highlight: Option<usize>,
    vp: &Viewport,
    style: &Style,
) -> Result<String, RenderError> {
    vp.check()?;
    let (w, h) = vp.pixel_size();
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="{BACKGROUND}"/>"#);

    // Goal underneath, so that drawn goal primitives show as black.
    for p in goal.primitives() {
        emit_primitive(&mut out, &p.prim, GOAL, vp);
    }
    for (i, p) in existing.primitives().iter().enumerate() {
        let color = if Some(i) == highlight { HIGHLIGHT } else { EXISTING };
        emit_primitive(&mut out, &p.prim, color, vp);
    }
    if style.points {
        let given = goal.points().iter().filter(|p| p.origin == PointOrigin::Given);
        for (p, color) in given.map(|p| (p, GOAL)).chain(existing.points().iter().map(|p| (p, EXISTING))) {
            let q = vp.to_pixel(&p.pos);
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}"/>"#,
                num(q.x - MARKER / 2.0),
                num(q.y - MARKER / 2.0),
                num(MARKER),
                num(MARKER)
            );
            if style.labels {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
                    num(q.x + 5.0),
                    num(q.y - 5.0),
                    escape(&p.label)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One document per trace prefix, the initial state first; each panel
/// highlights the primitive its move added.
pub fn render_steps(problem: &Problem, trace: &SolutionTrace, vp: &Viewport) -> Result<Vec<String>, RenderError> {
    vp.check()?;
    let scenes = replay_scenes(problem, trace)?;
    scenes
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let hl = (k > 0).then(|| s.primitives().len() - 1);
            render_with(s, problem.goal(), hl, vp, &Style::default())
        })
        .collect()
}

fn emit_primitive(out: &mut String, prim: &Primitive, color: &str, vp: &Viewport) {
    match vp.primitive_to_pixel(prim) {
        Primitive::Line(l) => {
            let (w, h) = vp.pixel_size();
            if let Some((p, q)) = clip_line(&l, w as f64, h as f64) {
                let _ = writeln!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="{}"/>"#,
                    num(p.x),
                    num(p.y),
                    num(q.x),
                    num(q.y),
                    num(STROKE_WIDTH)
                );
            }
        }
        Primitive::Circle(c) => {
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
                num(c.center().x),
                num(c.center().y),
                num(c.radius()),
                num(STROKE_WIDTH)
            );
        }
    }
}

/// The part of `l` inside `[0, w] x [0, h]`, endpoints on the boundary.
pub fn clip_line(l: &Line, w: f64, h: f64) -> Option<(Point, Point)> {
    let o = l.project(&Point::new(w / 2.0, h / 2.0));
    let (dx, dy) = l.direction();
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, d, lo, hi) in [(o.x, dx, 0.0, w), (o.y, dy, 0.0, h)] {
        if d.abs() < 1e-12 {
            if p < lo || p > hi {
                return None;
            }
            continue;
        }
        let (a, b) = ((lo - p) / d, (hi - p) / d);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t1 > t0).then(|| (Point::new(o.x + t0 * dx, o.y + t0 * dy), Point::new(o.x + t1 * dx, o.y + t1 * dy)))
}

fn num(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// ---------------------------------------------------------------------------
// Rasterizer

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Segment { a: Point, b: Point, width: f64 },
    Ring { c: Point, r: f64, width: f64 },
    Disc { c: Point, r: f64 },
}

#[derive(Debug)]
struct Element<'s> {
    name: &'s str,
    attrs: Vec<(&'s str, &'s str)>,
}

impl Element<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn num(&self, key: &str) -> Result<f64, RenderError> {
        let v = self
            .get(key)
            .ok_or_else(|| RenderError::MalformedSvg(format!("<{}> lacks `{key}`", self.name)))?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| RenderError::MalformedSvg(format!("<{}> {key}=\"{v}\" is not a number", self.name)))
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64, RenderError> {
        if self.get(key).is_some() { self.num(key) } else { Ok(default) }
    }
}

/// Splits the document into start tags; text content and closing tags are
/// skipped.
fn elements(svg: &str) -> Result<Vec<Element<'_>>, RenderError> {
    let mut out = Vec::new();
    let mut rest = svg;
    while let Some(start) = rest.find('<') {
        rest = &rest[start + 1..];
        if let Some(r) = rest.strip_prefix("!--") {
            let end = r.find("-->").ok_or_else(|| RenderError::MalformedSvg("unterminated comment".into()))?;
            rest = &r[end + 3..];
            continue;
        }
        let end = rest.find('>').ok_or_else(|| RenderError::MalformedSvg("unterminated tag".into()))?;
        let body = &rest[..end];
        rest = &rest[end + 1..];
        if body.starts_with('/') || body.starts_with('?') || body.starts_with('!') {
            continue;
        }
        let body = body.strip_suffix('/').unwrap_or(body);
        let name_end = body.find(char::is_whitespace).unwrap_or(body.len());
        let name = &body[..name_end];
        if name.is_empty() {
            return Err(RenderError::MalformedSvg("empty tag name".into()));
        }
        let mut attrs = Vec::new();
        let mut a = body[name_end..].trim_start();
        while !a.is_empty() {
            let eq = a
                .find('=')
                .ok_or_else(|| RenderError::MalformedSvg(format!("attribute without value in <{name}>")))?;
            let key = a[..eq].trim();
            let after = a[eq + 1..].trim_start();
            let quote = after
                .chars()
                .next()
                .filter(|c| *c == '"' || *c == '\'')
                .ok_or_else(|| RenderError::MalformedSvg(format!("unquoted `{key}` in <{name}>")))?;
            let close = after[1..]
                .find(quote)
                .ok_or_else(|| RenderError::MalformedSvg(format!("unterminated `{key}` in <{name}>")))?;
            attrs.push((key, &after[1..1 + close]));
            a = after[close + 2..].trim_start();
        }
        out.push(Element { name, attrs });
    }
    Ok(out)
}

fn gray(color: &str) -> Result<Option<f64>, RenderError> {
    let hex = match color {
        "none" => return Ok(None),
        "black" => "#000000",
        "white" => "#FFFFFF",
        c => c,
    };
    let bad = || RenderError::MalformedSvg(format!("unsupported color `{color}`"));
    let h = hex.strip_prefix('#').filter(|h| h.len() == 6).ok_or_else(bad)?;
    let c = |i: usize| u8::from_str_radix(&h[i..i + 2], 16).map(f64::from).map_err(|_| bad());
    Ok(Some(0.299 * c(0)? + 0.587 * c(2)? + 0.114 * c(4)?))
}

/// Grayscale raster `resolution` pixels wide, height by the document's
/// aspect ratio. `<text>` is not drawn.
pub fn rasterize(svg: &str, resolution: u32) -> Result<GrayImage, RenderError> {
    if resolution == 0 {
        return Err(RenderError::ZeroResolution);
    }
    let els = elements(svg)?;
    let root = els
        .first()
        .filter(|e| e.name == "svg")
        .ok_or_else(|| RenderError::MalformedSvg("missing <svg> root".into()))?;
    let (sw, sh) = (root.num("width")?, root.num("height")?);
    if sw <= 0.0 || sh <= 0.0 {
        return Err(RenderError::MalformedSvg("non-positive canvas size".into()));
    }
    let s = resolution as f64 / sw;
    let (w, h) = (resolution, ((sh * s).round() as u32).max(1));
    let mut buf = vec![255.0f64; (w * h) as usize];

    for e in &els[1..] {
        let (shape, fill) = match e.name {
            "rect" => {
                let r = Shape::Rect {
                    x: e.num_or("x", 0.0)? * s,
                    y: e.num_or("y", 0.0)? * s,
                    w: e.num("width")? * s,
                    h: e.num("height")? * s,
                };
                let Some(g) = gray(e.get("fill").unwrap_or("black"))? else { continue };
                (r, g)
            }
            "line" => {
                let seg = Shape::Segment {
                    a: Point::new(e.num("x1")? * s, e.num("y1")? * s),
                    b: Point::new(e.num("x2")? * s, e.num("y2")? * s),
                    width: e.num_or("stroke-width", 1.0)? * s,
                };
                let Some(g) = gray(e.get("stroke").unwrap_or("none"))? else { continue };
                (seg, g)
            }
            "circle" => {
                let c = Point::new(e.num("cx")? * s, e.num("cy")? * s);
                let r = e.num("r")? * s;
                if let Some(g) = gray(e.get("fill").unwrap_or("black"))? {
                    draw(&mut buf, w, h, &Shape::Disc { c, r }, g);
                }
                let width = e.num_or("stroke-width", 1.0)? * s;
                let Some(g) = gray(e.get("stroke").unwrap_or("none"))? else { continue };
                (Shape::Ring { c, r, width }, g)
            }
            "text" | "svg" | "g" | "title" | "desc" => continue,
            other => return Err(RenderError::MalformedSvg(format!("unsupported element <{other}>"))),
        };
        draw(&mut buf, w, h, &shape, fill);
    }
    Ok(GrayImage::from_fn(w, h, |x, y| {
        Luma([buf[(y * w + x) as usize].round().clamp(0.0, 255.0) as u8])
    }))
}

fn draw(buf: &mut [f64], w: u32, h: u32, shape: &Shape, value: f64) {
    let (x0, y0, x1, y1) = match *shape {
        Shape::Rect { x, y, w, h } => (x, y, x + w, y + h),
        Shape::Segment { a, b, width } => {
            let m = width / 2.0 + 1.0;
            (a.x.min(b.x) - m, a.y.min(b.y) - m, a.x.max(b.x) + m, a.y.max(b.y) + m)
        }
        Shape::Ring { c, r, width } => {
            let m = r + width / 2.0 + 1.0;
            (c.x - m, c.y - m, c.x + m, c.y + m)
        }
        Shape::Disc { c, r } => (c.x - r - 1.0, c.y - r - 1.0, c.x + r + 1.0, c.y + r + 1.0),
    };
    let clamp = |v: f64, hi: u32| (v.floor().max(0.0) as u32).min(hi);
    let (px0, px1) = (clamp(x0, w), clamp(x1 + 1.0, w));
    let (py0, py1) = (clamp(y0, h), clamp(y1 + 1.0, h));
    for py in py0..py1 {
        for px in px0..px1 {
            let (cx, cy) = (px as f64 + 0.5, py as f64 + 0.5);
            let cov = match *shape {
                Shape::Rect { x, y, w, h } => {
                    let ox = ((px as f64 + 1.0).min(x + w) - (px as f64).max(x)).max(0.0);
                    let oy = ((py as f64 + 1.0).min(y + h) - (py as f64).max(y)).max(0.0);
                    ox * oy
                }
                Shape::Segment { a, b, width } => width / 2.0 + 0.5 - segment_distance(cx, cy, &a, &b),
                Shape::Ring { c, r, width } => width / 2.0 + 0.5 - ((cx - c.x).hypot(cy - c.y) - r).abs(),
                Shape::Disc { c, r } => r + 0.5 - (cx - c.x).hypot(cy - c.y),
            }
            .clamp(0.0, 1.0);
            if cov > 0.0 {
                let v = &mut buf[(py * w + px) as usize];
                *v = *v * (1.0 - cov) + value * cov;
            }
        }
    }
}

fn segment_distance(x: f64, y: f64, a: &Point, b: &Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((x - a.x) * dx + (y - a.y) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (x - a.x - t * dx).hypot(y - a.y - t * dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use euclid_core::{parse_problem, parse_trace, Tolerance};

    fn unit_vp() -> Viewport {
        Viewport::new(-2.0, -2.0, 4.0, 4.0, 256).unwrap()
    }

    fn count(svg: &str, tag: &str) -> usize {
        svg.matches(&format!("<{tag} ")).count()
    }

    #[test]
    fn empty_scene_is_background_only() {
        let s = Scene::new(Tolerance::default());
        let svg = render_scene(&s, &s, &unit_vp()).unwrap();
        assert_eq!(count(&svg, "rect"), 1);
        assert_eq!(count(&svg, "line") + count(&svg, "circle") + count(&svg, "text"), 0);
        let img = rasterize(&svg, 256).unwrap();
        assert!(img.pixels().all(|p| p.0[0] == 255));
    }

    #[test]
    fn unit_circle_and_axis() {
        let s = Scene::new(Tolerance::default())
            .add_primitive(Circle::new(Point::new(0.0, 0.0), 1.0).unwrap().into())
            .unwrap()
            .add_primitive(Line::from_coeffs(0.0, 1.0, 0.0).unwrap().into())
            .unwrap();
        let svg = render_scene(&s, &Scene::new(Tolerance::default()), &unit_vp()).unwrap();
        assert_eq!(count(&svg, "circle"), 1);
        assert_eq!(count(&svg, "line"), 1);
        assert!(svg.contains(r#"<line x1="0" y1="128" x2="256" y2="128""#), "{svg}");
        assert!(svg.contains(r#"<circle cx="128" cy="128" r="64""#));
    }

    #[test]
    fn viewport_rejects_degenerate() {
        assert!(Viewport::new(0.0, 0.0, 0.0, 1.0, 128).is_err());
        assert!(Viewport::new(0.0, 0.0, 1.0, 1.0, 63).is_err());
        assert!(Viewport::new(0.0, 0.0, 1.0, -1.0, 128).is_err());
    }

    #[test]
    fn pixel_round_trip() {
        let vp = Viewport::new(-3.0, 1.0, 10.0, 5.0, 200).unwrap();
        assert_eq!(vp.pixel_size(), (200, 100));
        let p = Point::new(2.5, 4.25);
        let q = vp.to_scene(&vp.to_pixel(&p));
        assert!(p.distance(&q) < 1e-12);
        let l: Primitive = Line::from_coeffs(1.0, 2.0, -3.0).unwrap().into();
        let back = vp.primitive_to_scene(&vp.primitive_to_pixel(&l));
        assert!(l.approx_eq(&back, 1e-9));
    }

    #[test]
    fn clipping_puts_endpoints_on_boundary() {
        for (a, b, c) in [(1.0, 1.0, -100.0), (0.3, -1.0, 20.0), (1.0, 0.0, -5.0)] {
            let l = Line::from_coeffs(a, b, c).unwrap();
            let (p, q) = clip_line(&l, 100.0, 80.0).unwrap();
            for e in [p, q] {
                assert!(l.distance(&e) < 1e-9);
                let on_edge = [e.x.abs(), (e.x - 100.0).abs(), e.y.abs(), (e.y - 80.0).abs()]
                    .iter()
                    .any(|d| *d < 1e-9);
                assert!(on_edge, "{e}");
            }
        }
        assert!(clip_line(&Line::from_coeffs(1.0, 0.0, 10.0).unwrap(), 100.0, 80.0).is_none());
    }

    #[test]
    fn bisector_styling() {
        let p = parse_problem(include_str!("../../../corpus/problems/bisector_segment.euc")).unwrap().problem;
        let t = parse_trace(include_str!("../../../corpus/solutions/bisector_segment.trace")).unwrap();
        let vp = Viewport::fit(&[p.initial(), p.goal()], 256).unwrap();
        let docs = render_steps(&p, &t, &vp).unwrap();
        assert_eq!(docs.len(), 4);
        // The drawn segment is black, the bisector goal blue.
        assert!(docs[0].lines().any(|l| l.starts_with("<line") && l.contains(EXISTING)));
        assert!(docs[0].lines().any(|l| l.starts_with("<line") && l.contains(GOAL)));
        assert!(!docs[0].contains(HIGHLIGHT));
        assert_eq!(docs[3].lines().filter(|l| l.contains(&format!("stroke=\"{HIGHLIGHT}\""))).count(), 1);
        assert!(render_steps(&p, &SolutionTrace::default(), &vp).unwrap().len() == 1);
    }

    #[test]
    fn raster_errors() {
        assert_eq!(rasterize("<svg width=\"10\" height=\"10\"/>", 0), Err(RenderError::ZeroResolution));
        assert!(matches!(rasterize("<rect x=\"0\"/>", 64), Err(RenderError::MalformedSvg(_))));
        assert!(matches!(rasterize("<svg width=\"10\" height=\"10\"><line x1=\"a\"/>", 64), Err(RenderError::MalformedSvg(_))));
        assert!(matches!(rasterize("<svg width=\"10\" height=\"10\"><path d=\"\"/>", 64), Err(RenderError::MalformedSvg(_))));
        assert!(matches!(rasterize("<svg width=\"10\"", 64), Err(RenderError::MalformedSvg(_))));
    }

    #[test]
    fn ring_is_dark_at_radius() {
        let svg = "<svg width=\"100\" height=\"100\"><circle cx=\"50\" cy=\"50\" r=\"30\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/></svg>";
        let img = rasterize(svg, 200).unwrap();
        assert_eq!(img.dimensions(), (200, 200));
        assert!(img.get_pixel(160, 100).0[0] < 50);
        assert!(img.get_pixel(159, 100).0[0] < 50 || img.get_pixel(161, 100).0[0] < 50);
        assert_eq!(img.get_pixel(100, 100).0[0], 255);
    }
}
