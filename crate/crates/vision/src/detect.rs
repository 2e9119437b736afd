//! Classical line and circle detection on rendered diagrams.
//!
//! Lines vote in an angle/offset accumulator (1 degree by 1 pixel), circle
//! centers in a pixel accumulator fed along each edge pixel's gradient, and
//! the radius comes from a distance histogram around the best center. The
//! strongest candidate that survives refinement is accepted, its pixels are
//! removed from both accumulators, and the loop repeats.
//!
//! Coordinates are canvas pixels: x right, y down, pixel `(i, j)` centered
//! at `(i + 0.5, j + 0.5)`, which is also what the rasterizer uses.

use std::cmp::Ordering;
use std::f64::consts::PI;

use euclid_core::{intersect, Circle, Line, Point, Primitive, PrimitiveKind, Scene, Tolerance};
use image::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::render::{clip_line, rasterize, render_with, Style, Viewport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("image is {0}x{1}, detection needs at least 64x64")]
    ImageTooSmall(u32, u32),
    #[error("invalid dataset config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// In canvas pixel coordinates.
    pub primitive: Primitive,
    /// Fraction of the visible extent backed by ink.
    pub score: f64,
    /// Ink pixels explained by the primitive.
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectParams {
    /// Minimum coverage for a detection to be kept.
    pub threshold: f64,
    pub min_radius: f64,
    /// `None` means half the larger image side.
    pub max_radius: Option<f64>,
    /// Rejected candidates tolerated before giving up.
    pub max_failures: usize,
    pub max_detections: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            threshold: 0.4,
            min_radius: 8.0,
            max_radius: None,
            max_failures: 24,
            max_detections: 32,
        }
    }
}

const INK: f32 = 0.35;
const MIN_VISIBLE: f64 = 24.0;

pub fn detect_primitives(image: &GrayImage) -> Result<Vec<Detection>, DetectError> {
    detect_primitives_with(image, &DetectParams::default())
}

struct Canvas {
    w: usize,
    h: usize,
    dark: Vec<f32>,
    alive: Vec<bool>,
    /// Indices of ink pixels, in raster order.
    ink: Vec<usize>,
    /// Unit gradient per pixel for center voting, `None` on flat pixels.
    normal: Vec<Option<(f64, f64)>>,
}

impl Canvas {
    fn new(img: &GrayImage) -> Canvas {
        let (w, h) = (img.width() as usize, img.height() as usize);
        let dark: Vec<f32> = img.pixels().map(|p| 1.0 - p.0[0] as f32 / 255.0).collect();
        let ink: Vec<usize> = (0..w * h).filter(|&i| dark[i] >= INK).collect();
        let mut alive = vec![false; w * h];
        for &i in &ink {
            alive[i] = true;
        }
        let mut normal = vec![None; w * h];
        for y in 1..h.saturating_sub(1) {
            for x in 1..w - 1 {
                let d = |dx: isize, dy: isize| dark[(y as isize + dy) as usize * w + (x as isize + dx) as usize] as f64;
                let gx = d(1, -1) + 2.0 * d(1, 0) + d(1, 1) - d(-1, -1) - 2.0 * d(-1, 0) - d(-1, 1);
                let gy = d(-1, 1) + 2.0 * d(0, 1) + d(1, 1) - d(-1, -1) - 2.0 * d(0, -1) - d(1, -1);
                let m = gx.hypot(gy);
                if m > 0.6 && dark[y * w + x] > 0.1 {
                    normal[y * w + x] = Some((gx / m, gy / m));
                }
            }
        }
        Canvas {
            w,
            h,
            dark,
            alive,
            ink,
            normal,
        }
    }

    fn center(&self, i: usize) -> (f64, f64) {
        ((i % self.w) as f64 + 0.5, (i / self.w) as f64 + 0.5)
    }

    /// Any live ink pixel within one pixel of `(x, y)`.
    fn inked_near(&self, x: f64, y: f64) -> bool {
        let (cx, cy) = (x.floor() as isize, y.floor() as isize);
        (-1..=1).any(|dy| {
            (-1..=1).any(|dx| {
                let (px, py) = (cx + dx, cy + dy);
                px >= 0
                    && py >= 0
                    && (px as usize) < self.w
                    && (py as usize) < self.h
                    && self.alive[py as usize * self.w + px as usize]
            })
        })
    }

    fn live_ink(&self) -> impl Iterator<Item = usize> + '_ {
        self.ink.iter().copied().filter(|&i| self.alive[i])
    }
}

struct LineAccumulator {
    cos: Vec<f64>,
    sin: Vec<f64>,
    diag: usize,
    votes: Vec<i32>,
}

impl LineAccumulator {
    const ANGLES: usize = 180;

    fn new(c: &Canvas) -> Self {
        let diag = ((c.w as f64).hypot(c.h as f64)).ceil() as usize + 1;
        let (cos, sin) = (0..Self::ANGLES)
            .map(|a| {
                let t = (a as f64).to_radians();
                (t.cos(), t.sin())
            })
            .unzip();
        let mut acc = LineAccumulator {
            cos,
            sin,
            diag,
            votes: vec![0; Self::ANGLES * (2 * diag + 1)],
        };
        for i in c.live_ink() {
            acc.vote(c.center(i), 1);
        }
        acc
    }

    fn vote(&mut self, (x, y): (f64, f64), v: i32) {
        let stride = 2 * self.diag + 1;
        for a in 0..Self::ANGLES {
            let rho = x * self.cos[a] + y * self.sin[a];
            let r = (rho.round() as isize + self.diag as isize) as usize;
            self.votes[a * stride + r] += v;
        }
    }

    fn peak(&self) -> (usize, usize, i32) {
        let stride = 2 * self.diag + 1;
        let (i, v) = self
            .votes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, v)| (i, *v))
            .unwrap_or((0, 0));
        (i / stride, i % stride, v)
    }

    fn line(&self, a: usize, r: usize) -> Line {
        let rho = r as f64 - self.diag as f64;
        Line::from_coeffs(self.cos[a], self.sin[a], -rho).expect("unit normal")
    }

    fn suppress(&mut self, a: usize, r: usize) {
        let stride = 2 * self.diag + 1;
        for da in -1isize..=1 {
            let aa = (a as isize + da).rem_euclid(Self::ANGLES as isize) as usize;
            for dr in -2isize..=2 {
                let rr = r as isize + dr;
                if rr >= 0 && (rr as usize) < stride {
                    self.votes[aa * stride + rr as usize] = i32::MIN / 2;
                }
            }
        }
    }
}

struct CenterAccumulator {
    w: usize,
    h: usize,
    rmin: f64,
    rmax: f64,
    votes: Vec<i32>,
    banned: Vec<bool>,
}

impl CenterAccumulator {
    fn new(c: &Canvas, rmin: f64, rmax: f64) -> Self {
        let mut acc = CenterAccumulator {
            w: c.w,
            h: c.h,
            rmin,
            rmax,
            votes: vec![0; c.w * c.h],
            banned: vec![false; c.w * c.h],
        };
        for i in 0..c.w * c.h {
            if c.alive[i] || c.normal[i].is_some() && c.dark[i] > 0.1 {
                acc.vote(c, i, 1);
            }
        }
        acc
    }

    fn vote(&mut self, c: &Canvas, i: usize, v: i32) {
        let Some((nx, ny)) = c.normal[i] else { return };
        let (x, y) = c.center(i);
        let mut t = self.rmin;
        while t <= self.rmax {
            for s in [-1.0, 1.0] {
                let (px, py) = (x + s * t * nx, y + s * t * ny);
                if px >= 0.0 && py >= 0.0 && (px as usize) < self.w && (py as usize) < self.h {
                    self.votes[py as usize * self.w + px as usize] += v;
                }
            }
            t += 1.0;
        }
    }

    /// Best 5x5 window sum and its center cell.
    fn peak(&self) -> Option<(f64, f64, i64)> {
        let (w, h) = (self.w, self.h);
        let mut sat = vec![0i64; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0i64;
            for x in 0..w {
                row += self.votes[y * w + x].max(0) as i64;
                sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
            }
        }
        let mut best: Option<(usize, usize, i64)> = None;
        for y in 2..h.saturating_sub(2) {
            for x in 2..w.saturating_sub(2) {
                if self.banned[y * w + x] {
                    continue;
                }
                let (x0, y0, x1, y1) = (x - 2, y - 2, x + 3, y + 3);
                let s = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] - sat[y1 * (w + 1) + x0]
                    + sat[y0 * (w + 1) + x0];
                if best.is_none_or(|b| s > b.2) {
                    best = Some((x, y, s));
                }
            }
        }
        let (bx, by, s) = best?;
        // Vote-weighted centroid of the window for sub-pixel accuracy.
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for y in by - 2..=by + 2 {
            for x in bx - 2..=bx + 2 {
                let v = self.votes[y * w + x].max(0) as f64;
                sx += v * (x as f64 + 0.5);
                sy += v * (y as f64 + 0.5);
                sw += v;
            }
        }
        (sw > 0.0).then(|| (sx / sw, sy / sw, s))
    }

    fn suppress(&mut self, x: f64, y: f64) {
        let (cx, cy) = (x as isize, y as isize);
        for dy in -3..=3 {
            for dx in -3..=3 {
                let (px, py) = (cx + dx, cy + dy);
                if px >= 0 && py >= 0 && (px as usize) < self.w && (py as usize) < self.h {
                    self.banned[py as usize * self.w + px as usize] = true;
                }
            }
        }
    }
}

fn distance(prim: &Primitive, x: f64, y: f64) -> f64 {
    prim.residual(&Point::new(x, y))
}

/// Points along the visible part of `prim`, one pixel apart.
fn samples(prim: &Primitive, w: f64, h: f64) -> Vec<(f64, f64)> {
    match prim {
        Primitive::Line(l) => {
            let Some((p, q)) = clip_line(l, w, h) else { return Vec::new() };
            let len = p.distance(&q);
            let n = len.floor() as usize;
            (0..n)
                .map(|k| {
                    let t = (k as f64 + 0.5) / len;
                    (p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
                })
                .collect()
        }
        Primitive::Circle(c) => {
            let (o, r) = (c.center(), c.radius());
            let n = (2.0 * PI * r).ceil() as usize;
            (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    (o.x + r * t.cos(), o.y + r * t.sin())
                })
                .filter(|&(x, y)| x >= 0.0 && y >= 0.0 && x < w && y < h)
                .collect()
        }
    }
}

fn coverage(c: &Canvas, prim: &Primitive) -> Option<f64> {
    let s = samples(prim, c.w as f64, c.h as f64);
    if (s.len() as f64) < MIN_VISIBLE {
        return None;
    }
    let hits = s.iter().filter(|&&(x, y)| c.inked_near(x, y)).count();
    Some(hits as f64 / s.len() as f64)
}

fn support(c: &Canvas, prim: &Primitive, band: f64) -> Vec<usize> {
    c.live_ink()
        .filter(|&i| {
            let (x, y) = c.center(i);
            distance(prim, x, y) <= band
        })
        .collect()
}

fn fit_line(c: &Canvas, px: &[usize]) -> Option<Line> {
    let (mut sw, mut mx, mut my) = (0.0, 0.0, 0.0);
    for &i in px {
        let (x, y) = c.center(i);
        let wt = c.dark[i] as f64;
        sw += wt;
        mx += wt * x;
        my += wt * y;
    }
    if sw <= 0.0 {
        return None;
    }
    let (mx, my) = (mx / sw, my / sw);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &i in px {
        let (x, y) = c.center(i);
        let wt = c.dark[i] as f64;
        sxx += wt * (x - mx) * (x - mx);
        sxy += wt * (x - mx) * (y - my);
        syy += wt * (y - my) * (y - my);
    }
    // Direction of largest spread; the normal is perpendicular to it.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (nx, ny) = (-theta.sin(), theta.cos());
    Line::from_coeffs(nx, ny, -(nx * mx + ny * my)).ok()
}

fn fit_circle(c: &Canvas, px: &[usize], start: &Circle) -> Option<Circle> {
    let (mut cx, mut cy, mut r) = (start.center().x, start.center().y, start.radius());
    for _ in 0..12 {
        // Gauss-Newton on sum of w * (|p - c| - r)^2.
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &i in px {
            let (x, y) = c.center(i);
            let wt = c.dark[i] as f64;
            let d = (x - cx).hypot(y - cy);
            if d < 1e-9 {
                continue;
            }
            let j = [-(x - cx) / d, -(y - cy) / d, -1.0];
            let res = d - r;
            for a in 0..3 {
                jtr[a] += wt * j[a] * res;
                for b in 0..3 {
                    jtj[a][b] += wt * j[a] * j[b];
                }
            }
        }
        let step = solve3(jtj, jtr)?;
        cx -= step[0];
        cy -= step[1];
        r -= step[2];
        if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-6 {
            break;
        }
    }
    Circle::new(Point::new(cx, cy), r).ok()
}

fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = m;
        for row in 0..3 {
            mk[row][k] = v[row];
        }
        *o = det(mk) / d;
    }
    Some(out)
}

/// Refit on pixels in a shrinking band around the candidate.
fn refine(c: &Canvas, prim: Primitive) -> Option<Primitive> {
    let mut cur = prim;
    for band in [4.0, 2.5, 1.75] {
        let px = support(c, &cur, band);
        if px.len() < 8 {
            return None;
        }
        cur = match cur {
            Primitive::Line(_) => fit_line(c, &px)?.into(),
            Primitive::Circle(circle) => fit_circle(c, &px, &circle)?.into(),
        };
    }
    Some(cur)
}

fn evaluate(c: &Canvas, prim: Primitive, threshold: f64, rmax: f64) -> Option<Detection> {
    let prim = refine(c, prim)?;
    // A fit that ran off to a huge radius is a line in disguise.
    if matches!(prim, Primitive::Circle(ci) if ci.radius() > 1.25 * rmax) {
        return None;
    }
    let score = coverage(c, &prim)?;
    (score >= threshold).then(|| Detection {
        primitive: prim,
        score,
        support: support(c, &prim, 1.75).len(),
    })
}

fn best_radius(c: &Canvas, cx: f64, cy: f64, rmin: f64, rmax: f64) -> Option<f64> {
    let n = rmax.ceil() as usize + 2;
    let mut hist = vec![0u32; n];
    for i in c.live_ink() {
        let (x, y) = c.center(i);
        let d = (x - cx).hypot(y - cy).round() as usize;
        if d < n {
            hist[d] += 1;
        }
    }
    let lo = rmin.ceil().max(1.0) as usize;
    (lo..n - 1)
        .map(|r| {
            let count = (hist[r - 1] + hist[r] + hist[r + 1]) as f64;
            (r, count / (2.0 * PI * r as f64))
        })
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(r, _)| r as f64)
}

pub fn detect_primitives_with(image: &GrayImage, params: &DetectParams) -> Result<Vec<Detection>, DetectError> {
    let (w, h) = image.dimensions();
    if w < 64 || h < 64 {
        return Err(DetectError::ImageTooSmall(w, h));
    }
    let mut c = Canvas::new(image);
    let rmax = params.max_radius.unwrap_or(0.5 * w.max(h) as f64);
    let mut lines = LineAccumulator::new(&c);
    let mut centers = CenterAccumulator::new(&c, params.min_radius, rmax);
    let mut out: Vec<Detection> = Vec::new();
    let mut failures = 0;

    while out.len() < params.max_detections && failures < params.max_failures {
        let (a, r, line_votes) = lines.peak();
        let center = centers.peak();
        if line_votes < MIN_VISIBLE as i32 && center.is_none_or(|(_, _, v)| v < 2 * MIN_VISIBLE as i64) {
            break;
        }
        let line_cand = (line_votes >= MIN_VISIBLE as i32)
            .then(|| evaluate(&c, lines.line(a, r).into(), params.threshold, rmax))
            .flatten();
        let circle_cand = center
            .and_then(|(x, y, _)| {
                let r = best_radius(&c, x, y, params.min_radius, rmax)?;
                evaluate(&c, Circle::new(Point::new(x, y), r).ok()?.into(), params.threshold, rmax)
            })
            // A circle whose arc is nearly straight here is better read as a line.
            .filter(|d| match (&d.primitive, &line_cand) {
                (Primitive::Circle(_), Some(l)) => d.support as f64 > 0.5 * l.support as f64 || d.score > l.score,
                _ => true,
            });
        let pick = match (line_cand, circle_cand) {
            (Some(l), Some(ci)) => Some(if ci.support >= l.support { ci } else { l }),
            (l, ci) => l.or(ci),
        };
        let Some(det) = pick.filter(|d| !out.iter().any(|o| same_primitive(&o.primitive, &d.primitive))) else {
            failures += 1;
            lines.suppress(a, r);
            if let Some((x, y, _)) = center {
                centers.suppress(x, y);
            }
            continue;
        };
        for i in support(&c, &det.primitive, 2.5) {
            c.alive[i] = false;
            lines.vote(c.center(i), -1);
            centers.vote(&c, i, -1);
        }
        out.push(det);
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| cmp_primitive(&a.primitive, &b.primitive)));
    Ok(out)
}

fn same_primitive(a: &Primitive, b: &Primitive) -> bool {
    a.kind() == b.kind() && a.approx_eq(b, 2.0)
}

fn cmp_primitive(a: &Primitive, b: &Primitive) -> Ordering {
    let k = |p: &Primitive| matches!(p.kind(), PrimitiveKind::Circle) as u8;
    k(a).cmp(&k(b)).then_with(|| {
        a.params()
            .iter()
            .zip(b.params().iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Analytic intersections of the detected primitives that fall on the
/// canvas and sit on inked pixels.
pub fn detect_intersections(image: &GrayImage, prims: &[Detection]) -> Vec<Point> {
    let (w, h) = image.dimensions();
    let tol = Tolerance::with_diameter((w as f64).hypot(h as f64)).expect("finite image size");
    let dark = |x: i64, y: i64| {
        x >= 0
            && y >= 0
            && x < w as i64
            && y < h as i64
            && 1.0 - image.get_pixel(x as u32, y as u32).0[0] as f32 / 255.0 >= INK
    };
    let mut pts: Vec<Point> = Vec::new();
    for (i, a) in prims.iter().enumerate() {
        for b in &prims[i + 1..] {
            let Ok(xs) = intersect(&a.primitive, &b.primitive, &tol) else { continue };
            for p in xs {
                if p.x < 0.0 || p.y < 0.0 || p.x >= w as f64 || p.y >= h as f64 {
                    continue;
                }
                let (cx, cy) = (p.x.floor() as i64, p.y.floor() as i64);
                let inked = (-2..=2)
                    .flat_map(|dy| (-2..=2).map(move |dx| (dx, dy)))
                    .filter(|&(dx, dy)| dark(cx + dx, cy + dy))
                    .count();
                if inked >= 3 && !pts.iter().any(|q| q.distance(&p) < 2.0) {
                    pts.push(p);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts
}

// ---------------------------------------------------------------------------
// Synthetic data

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetConfig {
    pub resolution: u32,
    pub min_primitives: usize,
    pub max_primitives: usize,
    /// Circle radius range in pixels, `min < max`.
    pub radius: (f64, f64),
    /// Probability that a primitive is a line.
    pub line_fraction: f64,
    /// Minimum gap, in pixels, between near-tangencies and between
    /// intersection points.
    pub separation: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            resolution: 512,
            min_primitives: 1,
            max_primitives: 4,
            radius: (24.0, 180.0),
            line_fraction: 0.5,
            separation: 12.0,
        }
    }
}

impl DatasetConfig {
    fn check(&self) -> Result<(), DetectError> {
        let bad = |m: String| Err(DetectError::InvalidConfig(m));
        if self.resolution < 64 {
            return bad(format!("resolution {} below 64", self.resolution));
        }
        if self.min_primitives < 1 || self.max_primitives > 8 || self.min_primitives > self.max_primitives {
            return bad(format!(
                "primitive count range {}..={} outside 1..=8",
                self.min_primitives, self.max_primitives
            ));
        }
        let (lo, hi) = self.radius;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return bad(format!("radius range {lo}..{hi} is empty"));
        }
        if 2.0 * (lo + 10.0) > self.resolution as f64 {
            return bad(format!("radius {lo} does not fit a {} canvas", self.resolution));
        }
        if !(0.0..=1.0).contains(&self.line_fraction) {
            return bad(format!("line fraction {} outside [0, 1]", self.line_fraction));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return bad(format!("separation {}", self.separation));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSample {
    pub seed: u64,
    pub svg: String,
    pub bitmap: GrayImage,
    /// Ground truth in canvas pixel coordinates.
    pub primitives: Vec<Primitive>,
    pub intersections: Vec<Point>,
}

pub fn sample_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gen_dataset(count: usize, seed: u64, config: &DatasetConfig) -> Result<Vec<DatasetSample>, DetectError> {
    config.check()?;
    if count == 0 {
        return Err(DetectError::InvalidConfig("count must be at least 1".into()));
    }
    (0..count).map(|i| gen_sample(sample_seed(seed, i), config)).collect()
}

pub fn gen_sample(seed: u64, config: &DatasetConfig) -> Result<DatasetSample, DetectError> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = config.resolution as f64;
    let tol = Tolerance::with_diameter(res * std::f64::consts::SQRT_2).expect("finite");
    for _ in 0..200 {
        let n = rng.gen_range(config.min_primitives..=config.max_primitives);
        let mut prims: Vec<Primitive> = Vec::new();
        let mut tries = 0;
        while prims.len() < n && tries < 500 {
            tries += 1;
            let cand = random_primitive(&mut rng, config);
            if prims.iter().all(|p| well_separated(p, &cand, config.separation, &tol))
                && intersections_apart(&prims, &cand, res, config.separation, &tol)
            {
                prims.push(cand);
            }
        }
        if prims.len() == n {
            return render_sample(seed, prims, config, &tol);
        }
    }
    Err(DetectError::InvalidConfig(format!(
        "cannot place {}..={} separated primitives",
        config.min_primitives, config.max_primitives
    )))
}

fn random_primitive(rng: &mut impl Rng, config: &DatasetConfig) -> Primitive {
    let res = config.resolution as f64;
    if rng.gen_bool(config.line_fraction) {
        let t = rng.gen_range(0.0..PI);
        let (x, y) = (rng.gen_range(0.2 * res..0.8 * res), rng.gen_range(0.2 * res..0.8 * res));
        let (nx, ny) = (t.cos(), t.sin());
        Line::from_coeffs(nx, ny, -(nx * x + ny * y)).expect("unit normal").into()
    } else {
        let hi = config.radius.1.min(res / 2.0 - 10.0);
        let r = rng.gen_range(config.radius.0..hi.max(config.radius.0 + 1e-9));
        let (x, y) = (rng.gen_range(r + 10.0..res - r - 10.0 + 1e-9), rng.gen_range(r + 10.0..res - r - 10.0 + 1e-9));
        Circle::new(Point::new(x, y), r).expect("positive radius").into()
    }
}

fn well_separated(a: &Primitive, b: &Primitive, sep: f64, tol: &Tolerance) -> bool {
    match (a, b) {
        (Primitive::Line(p), Primitive::Line(q)) => {
            let cross = (p.a() * q.b() - p.b() * q.a()).abs();
            cross >= (8.0f64).to_radians().sin()
        }
        (Primitive::Line(l), Primitive::Circle(c)) | (Primitive::Circle(c), Primitive::Line(l)) => {
            (l.distance(&c.center()) - c.radius()).abs() >= sep
        }
        (Primitive::Circle(p), Primitive::Circle(q)) => {
            let d = p.center().distance(&q.center());
            (d - (p.radius() + q.radius())).abs() >= sep
                && (d - (p.radius() - q.radius()).abs()).abs() >= sep
                && intersect(a, b, tol).is_ok()
        }
    }
}

fn intersections_apart(prims: &[Primitive], cand: &Primitive, res: f64, sep: f64, tol: &Tolerance) -> bool {
    let mut all: Vec<Point> = Vec::new();
    let with: Vec<&Primitive> = prims.iter().chain(std::iter::once(cand)).collect();
    for (i, a) in with.iter().enumerate() {
        for b in &with[i + 1..] {
            let Ok(xs) = intersect(a, b, tol) else { return false };
            all.extend(xs.into_iter().filter(|p| p.x >= -sep && p.y >= -sep && p.x < res + sep && p.y < res + sep));
        }
    }
    all.iter().enumerate().all(|(i, p)| {
        let inside = p.x >= 0.0 && p.y >= 0.0 && p.x < res && p.y < res;
        let near_edge = inside && (p.x < sep || p.y < sep || p.x > res - sep || p.y > res - sep);
        !near_edge && all[i + 1..].iter().all(|q| p.distance(q) >= sep)
    })
}

fn render_sample(seed: u64, prims: Vec<Primitive>, config: &DatasetConfig, tol: &Tolerance) -> Result<DatasetSample, DetectError> {
    let res = config.resolution as f64;
    let vp = Viewport::new(0.0, 0.0, res, res, config.resolution).expect("checked resolution");
    let mut scene = Scene::new(*tol);
    for p in &prims {
        scene = scene
            .add_primitive(vp.primitive_to_scene(p))
            .map_err(|e| DetectError::InvalidConfig(e.to_string()))?;
    }
    let style = Style {
        points: false,
        labels: false,
    };
    let empty = Scene::new(*tol);
    let svg = render_with(&scene, &empty, None, &vp, &style).expect("valid viewport");
    let bitmap = rasterize(&svg, config.resolution).expect("own svg");
    let primitives: Vec<Primitive> = scene.primitives().iter().map(|p| vp.primitive_to_pixel(&p.prim)).collect();
    let mut intersections = Vec::new();
    for (i, a) in primitives.iter().enumerate() {
        for b in &primitives[i + 1..] {
            for p in intersect(a, b, tol).unwrap_or_default() {
                if p.x >= 0.0 && p.y >= 0.0 && p.x < res && p.y < res {
                    intersections.push(p);
                }
            }
        }
    }
    intersections.sort_by(|a, b| a.lex_cmp(b));
    Ok(DatasetSample {
        seed,
        svg,
        bitmap,
        primitives,
        intersections,
    })
}

// ---------------------------------------------------------------------------
// Scoring

pub const AP_THRESHOLDS: [f64; 3] = [0.5, 0.75, 0.9];

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub precision: f64,
    pub recall: f64,
    pub true_positives: usize,
    /// AP at each of [`AP_THRESHOLDS`], averaged over classes with truth.
    pub ap: [f64; 3],
    pub map: f64,
}

/// Parameter distance in pixels. Circles: the larger of center offset and
/// radius difference. Lines: the larger distance from `pred` to the two
/// ends of `truth`'s visible segment in a `frame` (width, height) canvas.
pub fn parameter_distance(pred: &Primitive, truth: &Primitive, frame: (f64, f64)) -> f64 {
    match (pred, truth) {
        (Primitive::Circle(p), Primitive::Circle(t)) => {
            p.center().distance(&t.center()).max((p.radius() - t.radius()).abs())
        }
        (Primitive::Line(p), Primitive::Line(t)) => {
            let (a, b) = clip_line(t, frame.0, frame.1).unwrap_or_else(|| {
                let o = t.project(&Point::new(frame.0 / 2.0, frame.1 / 2.0));
                let (dx, dy) = t.direction();
                let half = 0.5 * frame.0.hypot(frame.1);
                (Point::new(o.x - half * dx, o.y - half * dy), Point::new(o.x + half * dx, o.y + half * dy))
            });
            p.distance(&a).max(p.distance(&b))
        }
        _ => f64::INFINITY,
    }
}

/// Greedy one-to-one matching in score order; returns a true-positive flag
/// per prediction (in the given order).
fn greedy_match(pred: &[&Detection], truth: &[&Primitive], tol: f64, frame: (f64, f64)) -> Vec<bool> {
    let mut used = vec![false; truth.len()];
    pred.iter()
        .map(|p| {
            let best = truth
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, t)| (j, parameter_distance(&p.primitive, t, frame)))
                .filter(|(_, d)| *d <= tol)
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            if let Some((j, _)) = best {
                used[j] = true;
            }
            best.is_some()
        })
        .collect()
}

fn average_precision(flags: &[bool], n_truth: usize) -> f64 {
    let mut tp = 0usize;
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(flags.len());
    for (k, &f) in flags.iter().enumerate() {
        tp += f as usize;
        curve.push((tp as f64 / n_truth as f64, tp as f64 / (k + 1) as f64));
    }
    // All-point interpolation: precision envelope from the right.
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for k in 0..curve.len() {
        let (r, _) = curve[k];
        if r > prev_recall {
            let p = curve[k..].iter().map(|c| c.1).fold(0.0, f64::max);
            ap += (r - prev_recall) * p;
            prev_recall = r;
        }
    }
    ap
}

/// Similarity of a match at distance `d` is `1 - d / (2 * match_tol)`, so
/// AP at 0.5 accepts matches within `match_tol`, at 0.9 within a fifth of it.
pub fn evaluate_detection(pred: &[Detection], truth: &[Primitive], match_tol: f64, frame: (f64, f64)) -> Evaluation {
    let mut pred: Vec<&Detection> = pred.iter().collect();
    pred.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| cmp_primitive(&a.primitive, &b.primitive)));
    let mut truth: Vec<&Primitive> = truth.iter().collect();
    truth.sort_by(|a, b| cmp_primitive(a, b));

    let flags = greedy_match(&pred, &truth, match_tol, frame);
    let tp = flags.iter().filter(|f| **f).count();
    let precision = if pred.is_empty() {
        if truth.is_empty() { 1.0 } else { 0.0 }
    } else {
        tp as f64 / pred.len() as f64
    };
    let recall = if truth.is_empty() { 1.0 } else { tp as f64 / truth.len() as f64 };

    let mut ap = [0.0; 3];
    for (slot, s) in ap.iter_mut().zip(AP_THRESHOLDS) {
        let tol = 2.0 * match_tol * (1.0 - s);
        let mut per_class = Vec::new();
        for kind in [PrimitiveKind::Line, PrimitiveKind::Circle] {
            let t: Vec<&Primitive> = truth.iter().copied().filter(|p| p.kind() == kind).collect();
            if t.is_empty() {
                continue;
            }
            let p: Vec<&Detection> = pred.iter().copied().filter(|d| d.primitive.kind() == kind).collect();
            per_class.push(average_precision(&greedy_match(&p, &t, tol, frame), t.len()));
        }
        *slot = if per_class.is_empty() {
            if pred.is_empty() { 1.0 } else { 0.0 }
        } else {
            per_class.iter().sum::<f64>() / per_class.len() as f64
        };
    }
    Evaluation {
        precision,
        recall,
        true_positives: tp,
        ap,
        map: ap.iter().sum::<f64>() / ap.len() as f64,
    }
}
