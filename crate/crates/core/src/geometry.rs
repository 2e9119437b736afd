//! Floating-point plane geometry: points, canonical lines and circles, the
//! two construction tools, every intersection case and the quantized keys
//! used for primitive identity.
//!
//! Lines are infinite and stored in unit normal form `a·x + b·y + c = 0`
//! with a fixed sign convention, so one geometric line has one
//! representation. All operations are pure.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Below this magnitude the `a` coefficient of a line counts as zero when
/// choosing the sign convention.
pub const SIGN_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("line through coincident points")]
    DegenerateLine,
    #[error("circle with radius within tolerance of zero")]
    DegenerateCircle,
    #[error("identical circles have no discrete intersection")]
    IdenticalCircles,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

/// Identity tolerance. The effective epsilon is `epsilon_abs` scaled by the
/// scene diameter (never below `epsilon_abs` itself).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    epsilon_abs: f64,
    scene_diameter: f64,
}

impl Tolerance {
    pub const DEFAULT_EPSILON: f64 = 1e-7;

    pub fn new(epsilon_abs: f64, scene_diameter: f64) -> Result<Self, GeometryError> {
        if !(epsilon_abs.is_finite() && epsilon_abs > 0.0) {
            return Err(GeometryError::InvalidTolerance(format!(
                "epsilon must be positive and finite, got {epsilon_abs}"
            )));
        }
        if !(scene_diameter.is_finite() && scene_diameter >= 0.0) {
            return Err(GeometryError::InvalidTolerance(format!(
                "scene diameter must be non-negative and finite, got {scene_diameter}"
            )));
        }
        Ok(Tolerance {
            epsilon_abs,
            scene_diameter,
        })
    }

    pub fn with_diameter(scene_diameter: f64) -> Result<Self, GeometryError> {
        Self::new(Self::DEFAULT_EPSILON, scene_diameter)
    }

    pub fn epsilon_abs(&self) -> f64 {
        self.epsilon_abs
    }

    pub fn scene_diameter(&self) -> f64 {
        self.scene_diameter
    }

    /// Effective epsilon in scene units.
    pub fn eps(&self) -> f64 {
        self.epsilon_abs * self.scene_diameter.max(1.0)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            epsilon_abs: Self::DEFAULT_EPSILON,
            scene_diameter: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Total lexicographic order on (x, y).
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An infinite line `a·x + b·y + c = 0` with `a² + b² = 1` and the sign
/// chosen so that `a > 0`, or `a ≈ 0` and `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    a: f64,
    b: f64,
    c: f64,
}

impl Line {
    /// Normalizes arbitrary coefficients. Fails when `(a, b)` is (near) zero.
    pub fn from_coeffs(a: f64, b: f64, c: f64) -> Result<Line, GeometryError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let n = a.hypot(b);
        if n <= f64::MIN_POSITIVE.sqrt() {
            return Err(GeometryError::DegenerateLine);
        }
        Ok(Self::canonical(a / n, b / n, c / n))
    }

    fn canonical(a: f64, b: f64, c: f64) -> Line {
        let flip = a < -SIGN_EPSILON || (a.abs() <= SIGN_EPSILON && b < 0.0);
        let (a, b, c) = if flip { (-a, -b, -c) } else { (a, b, c) };
        // `+ 0.0` folds negative zero so equal lines are bitwise equal.
        Line {
            a: a + 0.0,
            b: b + 0.0,
            c: c + 0.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn coeffs(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Slope `m` of `y = m·x + k`; `None` for vertical lines.
    pub fn slope(&self) -> Option<f64> {
        (self.b.abs() > SIGN_EPSILON).then(|| -self.a / self.b)
    }

    /// Y-intercept `k` of `y = m·x + k`; `None` for vertical lines.
    pub fn intercept(&self) -> Option<f64> {
        (self.b.abs() > SIGN_EPSILON).then(|| -self.c / self.b)
    }

    pub fn signed_distance(&self, p: &Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    pub fn distance(&self, p: &Point) -> f64 {
        self.signed_distance(p).abs()
    }

    /// Unit direction vector along the line.
    pub fn direction(&self) -> (f64, f64) {
        (self.b, -self.a)
    }

    /// Foot of the perpendicular from `p`.
    pub fn project(&self, p: &Point) -> Point {
        let d = self.signed_distance(p);
        Point::new(p.x - d * self.a, p.y - d * self.b)
    }

    /// Angle of the unit normal in `[0, π)`.
    pub fn normal_angle(&self) -> f64 {
        let t = self.b.atan2(self.a);
        if t < 0.0 {
            t + std::f64::consts::PI
        } else {
            t
        }
    }

    fn lex_cmp(&self, other: &Line) -> Ordering {
        self.a
            .total_cmp(&other.a)
            .then_with(|| self.b.total_cmp(&other.b))
            .then_with(|| self.c.total_cmp(&other.c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    center: Point,
    radius: f64,
}

impl Circle {
    /// Radius must be strictly positive and finite.
    pub fn new(center: Point, radius: f64) -> Result<Circle, GeometryError> {
        if !(center.x.is_finite() && center.y.is_finite() && radius.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if radius <= 0.0 {
            return Err(GeometryError::DegenerateCircle);
        }
        Ok(Circle { center, radius })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn lex_cmp(&self, other: &Circle) -> Ordering {
        self.center
            .lex_cmp(&other.center)
            .then_with(|| self.radius.total_cmp(&other.radius))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Line(Line),
    Circle(Circle),
}

impl Primitive {
    pub fn kind(&self) -> PrimitiveKind {
        match self {
            Primitive::Line(_) => PrimitiveKind::Line,
            Primitive::Circle(_) => PrimitiveKind::Circle,
        }
    }

    /// The three defining parameters: `(a, b, c)` or `(cx, cy, r)`.
    pub fn params(&self) -> [f64; 3] {
        match self {
            Primitive::Line(l) => l.coeffs(),
            Primitive::Circle(c) => [c.center.x, c.center.y, c.radius],
        }
    }

    /// Incidence residual of `p`.
    pub fn residual(&self, p: &Point) -> f64 {
        match self {
            Primitive::Line(l) => l.distance(p),
            Primitive::Circle(c) => (c.center.distance(p) - c.radius).abs(),
        }
    }

    /// Parameter-wise equality within `eps`. Lines also compare against the
    /// sign-flipped representation, which only differs for near-horizontal
    /// lines straddling the sign threshold.
    pub fn approx_eq(&self, other: &Primitive, eps: f64) -> bool {
        let close = |x: [f64; 3], y: [f64; 3]| x.iter().zip(y.iter()).all(|(u, v)| (u - v).abs() <= eps);
        match (self, other) {
            (Primitive::Line(l1), Primitive::Line(l2)) => {
                let p = l1.coeffs();
                let q = l2.coeffs();
                close(p, q) || close(p, [-q[0], -q[1], -q[2]])
            }
            (Primitive::Circle(_), Primitive::Circle(_)) => close(self.params(), other.params()),
            _ => false,
        }
    }
}

impl From<Line> for Primitive {
    fn from(l: Line) -> Self {
        Primitive::Line(l)
    }
}

impl From<Circle> for Primitive {
    fn from(c: Circle) -> Self {
        Primitive::Circle(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveKind {
    Line,
    Circle,
}

/// The straightedge: the unique line through two distinct points.
pub fn line_through(p: Point, q: Point, tol: &Tolerance) -> Result<Line, GeometryError> {
    if !(p.x.is_finite() && p.y.is_finite() && q.x.is_finite() && q.y.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    if p.distance(&q) <= tol.eps() {
        return Err(GeometryError::DegenerateLine);
    }
    // Fixed argument order makes the result independent of call order.
    let (p, q) = if p.lex_cmp(&q) == Ordering::Greater {
        (q, p)
    } else {
        (p, q)
    };
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let len = dx.hypot(dy);
    let (a, b) = (-dy / len, dx / len);
    let c = -0.5 * ((a * p.x + b * p.y) + (a * q.x + b * q.y));
    Ok(Line::canonical(a, b, c))
}

/// The compass: the circle centred at `center` passing through `through`.
pub fn circle_from(center: Point, through: Point, tol: &Tolerance) -> Result<Circle, GeometryError> {
    let r = center.distance(&through);
    if !r.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    if r <= tol.eps() {
        return Err(GeometryError::DegenerateCircle);
    }
    Circle::new(center, r)
}

fn sorted(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(Point::lex_cmp);
    pts
}

pub fn intersect_line_line(l1: &Line, l2: &Line, tol: &Tolerance) -> Vec<Point> {
    let (l1, l2) = if l1.lex_cmp(l2) == Ordering::Greater {
        (l2, l1)
    } else {
        (l1, l2)
    };
    let cross = l1.a * l2.b - l2.a * l1.b;
    if cross.abs() <= tol.eps() {
        return Vec::new();
    }
    let x = (l1.b * l2.c - l2.b * l1.c) / cross;
    let y = (l2.a * l1.c - l1.a * l2.c) / cross;
    if x.is_finite() && y.is_finite() {
        vec![Point::new(x, y)]
    } else {
        Vec::new()
    }
}

pub fn intersect_line_circle(l: &Line, c: &Circle, tol: &Tolerance) -> Vec<Point> {
    let eps = tol.eps();
    let d = l.signed_distance(&c.center);
    let foot = Point::new(c.center.x - d * l.a, c.center.y - d * l.b);
    let gap = d.abs() - c.radius;
    if gap.abs() <= eps {
        return vec![foot];
    }
    if gap > 0.0 {
        return Vec::new();
    }
    // (r - |d|)(r + |d|) avoids cancellation near tangency.
    let h = ((c.radius - d.abs()) * (c.radius + d.abs())).sqrt();
    let (ux, uy) = l.direction();
    sorted(vec![
        Point::new(foot.x + h * ux, foot.y + h * uy),
        Point::new(foot.x - h * ux, foot.y - h * uy),
    ])
}

pub fn intersect_circle_circle(c1: &Circle, c2: &Circle, tol: &Tolerance) -> Result<Vec<Point>, GeometryError> {
    let eps = tol.eps();
    let (c1, c2) = if c1.lex_cmp(c2) == Ordering::Greater {
        (c2, c1)
    } else {
        (c1, c2)
    };
    let (dx, dy) = (c2.center.x - c1.center.x, c2.center.y - c1.center.y);
    let d = dx.hypot(dy);
    if d <= eps {
        if (c1.radius - c2.radius).abs() <= eps {
            return Err(GeometryError::IdenticalCircles);
        }
        return Ok(Vec::new());
    }
    let (r1, r2) = (c1.radius, c2.radius);
    let (ux, uy) = (dx / d, dy / d);
    // Distance from c1 along the centre line to the chord.
    let along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let foot = Point::new(c1.center.x + along * ux, c1.center.y + along * uy);
    let external = d - (r1 + r2);
    let internal = d - (r1 - r2).abs();
    if external.abs() <= eps || internal.abs() <= eps {
        return Ok(vec![foot]);
    }
    if external > 0.0 || internal < 0.0 {
        return Ok(Vec::new());
    }
    let h2 = (r1 - along) * (r1 + along);
    if h2 <= 0.0 {
        return Ok(vec![foot]);
    }
    let h = h2.sqrt();
    Ok(sorted(vec![
        Point::new(foot.x - h * uy, foot.y + h * ux),
        Point::new(foot.x + h * uy, foot.y - h * ux),
    ]))
}

/// All intersection points of two primitives, sorted lexicographically.
/// Identical circles yield an error; identical lines yield nothing.
pub fn intersect(p: &Primitive, q: &Primitive, tol: &Tolerance) -> Result<Vec<Point>, GeometryError> {
    match (p, q) {
        (Primitive::Line(l1), Primitive::Line(l2)) => Ok(intersect_line_line(l1, l2, tol)),
        (Primitive::Line(l), Primitive::Circle(c)) | (Primitive::Circle(c), Primitive::Line(l)) => {
            Ok(intersect_line_circle(l, c, tol))
        }
        (Primitive::Circle(c1), Primitive::Circle(c2)) => intersect_circle_circle(c1, c2, tol),
    }
}

pub fn point_on(prim: &Primitive, p: &Point, tol: &Tolerance) -> bool {
    prim.residual(p) <= tol.eps()
}

/// Quantized primitive identity: each parameter rounded to the nearest
/// multiple of the effective epsilon. Parameters within epsilon of each
/// other land in the same or an adjacent bucket, so lookups must also
/// accept neighbouring keys (see [`PrimitiveKey::is_adjacent`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveKey {
    pub kind: PrimitiveKind,
    pub buckets: [i64; 3],
}

impl PrimitiveKey {
    /// True when every bucket differs by at most one.
    pub fn is_adjacent(&self, other: &PrimitiveKey) -> bool {
        self.kind == other.kind
            && self
                .buckets
                .iter()
                .zip(other.buckets.iter())
                .all(|(a, b)| a.abs_diff(*b) <= 1)
    }

    /// Adjacency against the sign-flipped line representation.
    pub fn is_adjacent_flipped(&self, other: &PrimitiveKey) -> bool {
        self.kind == PrimitiveKind::Line
            && other.kind == PrimitiveKind::Line
            && self
                .buckets
                .iter()
                .zip(other.buckets.iter())
                .all(|(a, b)| a.abs_diff(b.saturating_neg()) <= 1)
    }

    /// The key itself and its 26 neighbours.
    pub fn neighborhood(&self) -> impl Iterator<Item = PrimitiveKey> + '_ {
        (0..27).map(move |i| {
            let off = [i % 3 - 1, (i / 3) % 3 - 1, i / 9 - 1];
            let mut buckets = self.buckets;
            for (b, o) in buckets.iter_mut().zip(off) {
                *b = b.saturating_add(o);
            }
            PrimitiveKey {
                kind: self.kind,
                buckets,
            }
        })
    }
}

pub fn canonical_key(prim: &Primitive, tol: &Tolerance) -> PrimitiveKey {
    let eps = tol.eps();
    let p = prim.params();
    PrimitiveKey {
        kind: prim.kind(),
        // `as` saturates on overflow, which is fine for keys.
        buckets: [
            (p[0] / eps).round() as i64,
            (p[1] / eps).round() as i64,
            (p[2] / eps).round() as i64,
        ],
    }
}

/// Rotation about the origin followed by a translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    cos: f64,
    sin: f64,
    dx: f64,
    dy: f64,
}

impl RigidMotion {
    pub fn new(angle: f64, dx: f64, dy: f64) -> Self {
        RigidMotion {
            cos: angle.cos(),
            sin: angle.sin(),
            dx,
            dy,
        }
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            self.cos * p.x - self.sin * p.y + self.dx,
            self.sin * p.x + self.cos * p.y + self.dy,
        )
    }

    pub fn apply_primitive(&self, prim: &Primitive) -> Primitive {
        match prim {
            Primitive::Line(l) => {
                let a = self.cos * l.a - self.sin * l.b;
                let b = self.sin * l.a + self.cos * l.b;
                let c = l.c - a * self.dx - b * self.dy;
                Primitive::Line(Line::canonical(a, b, c))
            }
            Primitive::Circle(c) => Primitive::Circle(Circle {
                center: self.apply(&c.center),
                radius: c.radius,
            }),
        }
    }
}
