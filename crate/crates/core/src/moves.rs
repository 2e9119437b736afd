//! Legal construction moves and their goal-first ordering.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::geometry::{canonical_key, circle_from, line_through, GeometryError, Primitive, PrimitiveKey};
use crate::scene::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    LineThrough,
    CircleFrom,
}

impl MoveKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            MoveKind::LineThrough => "line",
            MoveKind::CircleFrom => "circle",
        }
    }
}

/// One tool application. `LineThrough` is unordered and stored with
/// `first < second`; `CircleFrom` is `(center, through)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub first: String,
    pub second: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoveError {
    #[error("unknown point label `{0}`")]
    UnknownLabel(String),
    #[error("degenerate move: {0}")]
    Degenerate(#[from] GeometryError),
}

impl Move {
    pub fn line(a: &str, b: &str) -> Move {
        let (first, second) = if a <= b { (a, b) } else { (b, a) };
        Move {
            kind: MoveKind::LineThrough,
            first: first.to_string(),
            second: second.to_string(),
        }
    }

    pub fn circle(center: &str, through: &str) -> Move {
        Move {
            kind: MoveKind::CircleFrom,
            first: center.to_string(),
            second: through.to_string(),
        }
    }

    /// The primitive this move draws in `scene`.
    pub fn primitive(&self, scene: &Scene) -> Result<Primitive, MoveError> {
        let lookup = |l: &str| {
            scene
                .point(l)
                .map(|p| p.pos)
                .ok_or_else(|| MoveError::UnknownLabel(l.to_string()))
        };
        let (p, q) = (lookup(&self.first)?, lookup(&self.second)?);
        let tol = scene.tolerance();
        Ok(match self.kind {
            MoveKind::LineThrough => line_through(p, q, tol)?.into(),
            MoveKind::CircleFrom => circle_from(p, q, tol)?.into(),
        })
    }
}

impl Ord for Move {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.kind, &self.first, &self.second).cmp(&(other.kind, &other.first, &other.second))
    }
}

impl PartialOrd for Move {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.kind.keyword(), self.first, self.second)
    }
}

/// A move resolved against a scene: point indices plus the primitive.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub kind: MoveKind,
    pub first: usize,
    pub second: usize,
    pub prim: Primitive,
    pub key: PrimitiveKey,
}

impl Candidate {
    pub fn to_move(&self, scene: &Scene) -> Move {
        let pts = scene.points();
        Move {
            kind: self.kind,
            first: pts[self.first].label.clone(),
            second: pts[self.second].label.clone(),
        }
    }
}

/// All non-degenerate moves whose primitive is not already in the scene,
/// sorted by `(kind, first label, second label)`.
pub(crate) fn candidates(scene: &Scene) -> Vec<Candidate> {
    let pts = scene.points();
    let tol = scene.tolerance();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i].label.cmp(&pts[j].label));

    let mut out = Vec::with_capacity(pts.len() * pts.len().saturating_sub(1) * 3 / 2);
    let mut push = |kind: MoveKind, i: usize, j: usize, prim: Result<Primitive, GeometryError>| {
        // Coincident pairs cannot occur in a deduplicated registry.
        let Ok(prim) = prim else { return };
        let key = canonical_key(&prim, tol);
        if scene.find_primitive_keyed(&prim, &key).is_none() {
            out.push(Candidate {
                kind,
                first: i,
                second: j,
                prim,
                key,
            });
        }
    };
    for (n, &i) in order.iter().enumerate() {
        for &j in &order[n + 1..] {
            push(
                MoveKind::LineThrough,
                i,
                j,
                line_through(pts[i].pos, pts[j].pos, tol).map(Primitive::from),
            );
        }
    }
    for &i in &order {
        for &j in &order {
            if i != j {
                push(
                    MoveKind::CircleFrom,
                    i,
                    j,
                    circle_from(pts[i].pos, pts[j].pos, tol).map(Primitive::from),
                );
            }
        }
    }
    out
}

/// Stable partition: candidates that draw a goal primitive come first.
pub(crate) fn order_candidates(mut cands: Vec<Candidate>, goal: &Scene) -> Vec<Candidate> {
    if goal.primitives().is_empty() {
        return cands;
    }
    // sort_by_key is stable, so the lexicographic order survives within
    // each partition.
    cands.sort_by_key(|c| goal.find_primitive_keyed(&c.prim, &c.key).is_none());
    cands
}

pub fn enumerate_moves(scene: &Scene) -> Vec<Move> {
    candidates(scene).iter().map(|c| c.to_move(scene)).collect()
}

/// Goal-matching moves first, lexicographic within each group. A move
/// that cannot be resolved in `scene` sorts with the non-matching group.
pub fn order_moves(moves: Vec<Move>, scene: &Scene, goal: &Scene) -> Vec<Move> {
    let mut keyed: Vec<(bool, Move)> = moves
        .into_iter()
        .map(|m| {
            let hits = m
                .primitive(scene)
                .map(|p| goal.contains_primitive(&p))
                .unwrap_or(false);
            (!hits, m)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, m)| m).collect()
}
