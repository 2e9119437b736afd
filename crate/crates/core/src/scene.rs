//! Construction state: a registry of labeled points and primitives.
//!
//! Adding a primitive discovers every intersection with the primitives
//! already present and registers the new points ("births") under generated
//! labels `P1`, `P2`, ... in discovery order. Scenes are values: every
//! mutation returns a new scene and leaves the original untouched.

use std::ops::Range;

use thiserror::Error;

use crate::geometry::{canonical_key, intersect, GeometryError, Point, Primitive, PrimitiveKey, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("primitive already present as `{existing}`")]
    DuplicatePrimitive { existing: String },
    #[error("label `{0}` already in use")]
    DuplicateLabel(String),
    #[error("point `{label}` coincides with existing point `{existing}`")]
    CoincidentPoint { label: String, existing: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointOrigin {
    /// Declared as part of the problem.
    Given,
    /// Discovered as an intersection.
    Birth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenePoint {
    pub label: String,
    pub pos: Point,
    pub origin: PointOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenePrimitive {
    pub label: String,
    pub prim: Primitive,
    pub key: PrimitiveKey,
}

/// Order-insensitive hash of a scene's primitive keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SceneSignature(pub u64);

impl std::fmt::Display for SceneSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    tol: Tolerance,
    points: Vec<ScenePoint>,
    prims: Vec<ScenePrimitive>,
    // Running sum of per-primitive hashes; the signature finalizes it.
    key_hash_sum: u64,
}

impl Scene {
    pub fn new(tol: Tolerance) -> Self {
        Scene {
            tol,
            points: Vec::new(),
            prims: Vec::new(),
            key_hash_sum: 0,
        }
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn points(&self) -> &[ScenePoint] {
        &self.points
    }

    pub fn primitives(&self) -> &[ScenePrimitive] {
        &self.prims
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.prims.is_empty()
    }

    pub fn point(&self, label: &str) -> Option<&ScenePoint> {
        self.points.iter().find(|p| p.label == label)
    }

    pub fn point_index(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p.label == label)
    }

    pub fn primitive(&self, label: &str) -> Option<&ScenePrimitive> {
        self.prims.iter().find(|p| p.label == label)
    }

    /// Nearest registered point within epsilon of `p`.
    pub fn find_point(&self, p: &Point) -> Option<usize> {
        let eps = self.tol.eps();
        let mut best: Option<(usize, f64)> = None;
        for (i, q) in self.points.iter().enumerate() {
            let d = q.pos.distance(p);
            if d <= eps && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Index of a registered primitive identical to `prim`: an adjacent
    /// canonical key and parameters within epsilon.
    pub fn find_primitive(&self, prim: &Primitive) -> Option<usize> {
        let key = canonical_key(prim, &self.tol);
        self.find_primitive_keyed(prim, &key)
    }

    pub(crate) fn find_primitive_keyed(&self, prim: &Primitive, key: &PrimitiveKey) -> Option<usize> {
        let eps = self.tol.eps();
        self.prims.iter().position(|sp| {
            (sp.key.is_adjacent(key) || sp.key.is_adjacent_flipped(key)) && sp.prim.approx_eq(prim, eps)
        })
    }

    pub fn contains_primitive(&self, prim: &Primitive) -> bool {
        self.find_primitive(prim).is_some()
    }

    /// Registers a given (input) point.
    pub fn add_point(&self, label: &str, pos: Point) -> Result<Scene, SceneError> {
        let pos = Point::try_new(pos.x, pos.y)?;
        if self.point(label).is_some() {
            return Err(SceneError::DuplicateLabel(label.to_string()));
        }
        if let Some(i) = self.find_point(&pos) {
            return Err(SceneError::CoincidentPoint {
                label: label.to_string(),
                existing: self.points[i].label.clone(),
            });
        }
        let mut next = self.clone();
        next.points.push(ScenePoint {
            label: label.to_string(),
            pos,
            origin: PointOrigin::Given,
        });
        Ok(next)
    }

    /// Adds a primitive under a generated label, registering its births.
    pub fn add_primitive(&self, prim: Primitive) -> Result<Scene, SceneError> {
        self.add_primitive_traced(None, prim).map(|(s, _)| s)
    }

    pub fn add_labeled_primitive(&self, label: &str, prim: Primitive) -> Result<Scene, SceneError> {
        self.add_primitive_traced(Some(label), prim).map(|(s, _)| s)
    }

    /// Like [`Scene::add_primitive`], also returning the index range of the
    /// points born from the insertion.
    pub fn add_primitive_traced(
        &self,
        label: Option<&str>,
        prim: Primitive,
    ) -> Result<(Scene, Range<usize>), SceneError> {
        let key = canonical_key(&prim, &self.tol);
        if let Some(i) = self.find_primitive_keyed(&prim, &key) {
            return Err(SceneError::DuplicatePrimitive {
                existing: self.prims[i].label.clone(),
            });
        }
        let label = match label {
            Some(l) if self.primitive(l).is_some() => return Err(SceneError::DuplicateLabel(l.to_string())),
            Some(l) => l.to_string(),
            None => self.fresh_primitive_label(&prim),
        };

        let mut next = self.clone();
        let first_birth = next.points.len();
        for other in &self.prims {
            for pos in intersect(&prim, &other.prim, &self.tol)? {
                if next.find_point(&pos).is_none() {
                    let label = next.fresh_point_label();
                    next.points.push(ScenePoint {
                        label,
                        pos,
                        origin: PointOrigin::Birth,
                    });
                }
            }
        }
        let births = first_birth..next.points.len();
        next.key_hash_sum = next.key_hash_sum.wrapping_add(key_hash(&key));
        next.prims.push(ScenePrimitive { label, prim, key });
        Ok((next, births))
    }

    fn fresh_point_label(&self) -> String {
        let births = self.points.iter().filter(|p| p.origin == PointOrigin::Birth).count();
        (births + 1..)
            .map(|n| format!("P{n}"))
            .find(|l| self.point(l).is_none())
            .expect("unbounded label space")
    }

    fn fresh_primitive_label(&self, prim: &Primitive) -> String {
        let stem = match prim {
            Primitive::Line(_) => "line",
            Primitive::Circle(_) => "circle",
        };
        (self.prims.len() + 1..)
            .map(|n| format!("{stem}{n}"))
            .find(|l| self.primitive(l).is_none())
            .expect("unbounded label space")
    }

    /// Order-insensitive over primitives; labels and points do not enter.
    pub fn signature(&self) -> SceneSignature {
        SceneSignature(splitmix64(self.key_hash_sum ^ splitmix64(self.prims.len() as u64)))
    }
}

/// Every goal primitive has an identical primitive in `scene` and every goal
/// point has a registered scene point within epsilon. The scene may hold
/// more than the goal.
pub fn goal_satisfied(scene: &Scene, goal: &Scene) -> bool {
    goal.prims
        .iter()
        .all(|gp| scene.find_primitive_keyed(&gp.prim, &canonical_key(&gp.prim, &scene.tol)).is_some())
        && goal.points.iter().all(|gp| scene.find_point(&gp.pos).is_some())
}

pub fn scene_signature(scene: &Scene) -> SceneSignature {
    scene.signature()
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_hash(key: &PrimitiveKey) -> u64 {
    let kind = match key.kind {
        crate::geometry::PrimitiveKind::Line => 1u64,
        crate::geometry::PrimitiveKind::Circle => 2u64,
    };
    key.buckets
        .iter()
        .fold(splitmix64(kind), |h, &b| splitmix64(h ^ b as u64))
}
