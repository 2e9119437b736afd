use thiserror::Error;

use crate::geometry::{canonical_key, RigidMotion, Tolerance};
use crate::scene::{PointOrigin, Scene, SceneError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("initial and goal scenes use different tolerances")]
    ToleranceMismatch,
}

/// A construction problem: the existing (black) scene, the goal (blue)
/// scene and the depth limit. Goal points are targets only and never
/// serve as construction inputs.
#[derive(Debug, Clone)]
pub struct Problem {
    initial: Scene,
    goal: Scene,
    max_depth: u32,
}

impl Problem {
    pub fn new(initial: Scene, goal: Scene, max_depth: u32) -> Result<Problem, ProblemError> {
        if initial.tolerance() != goal.tolerance() {
            return Err(ProblemError::ToleranceMismatch);
        }
        Ok(Problem {
            initial,
            goal,
            max_depth,
        })
    }

    pub fn initial(&self) -> &Scene {
        &self.initial
    }

    pub fn goal(&self) -> &Scene {
        &self.goal
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn tolerance(&self) -> &Tolerance {
        self.initial.tolerance()
    }

    pub fn with_max_depth(&self, max_depth: u32) -> Problem {
        Problem {
            max_depth,
            ..self.clone()
        }
    }

    /// The same problem moved by a rigid motion. Scenes are rebuilt from
    /// their given points and primitives so births are rediscovered.
    pub fn transformed(&self, motion: &RigidMotion) -> Result<Problem, SceneError> {
        let map = |scene: &Scene| -> Result<Scene, SceneError> {
            let mut out = Scene::new(*scene.tolerance());
            for p in scene.points().iter().filter(|p| p.origin == PointOrigin::Given) {
                out = out.add_point(&p.label, motion.apply(&p.pos))?;
            }
            for sp in scene.primitives() {
                out = out.add_labeled_primitive(&sp.label, motion.apply_primitive(&sp.prim))?;
            }
            Ok(out)
        };
        Ok(Problem {
            initial: map(&self.initial)?,
            goal: map(&self.goal)?,
            max_depth: self.max_depth,
        })
    }

    /// Equality of depth, tolerance, labels, given point coordinates
    /// (bitwise) and primitive identities (canonical keys).
    pub fn structurally_eq(&self, other: &Problem) -> bool {
        self.max_depth == other.max_depth
            && self.tolerance() == other.tolerance()
            && scenes_structurally_eq(&self.initial, &other.initial)
            && scenes_structurally_eq(&self.goal, &other.goal)
    }
}

fn scenes_structurally_eq(a: &Scene, b: &Scene) -> bool {
    let tol = a.tolerance();
    a.points().len() == b.points().len()
        && a.primitives().len() == b.primitives().len()
        && a.points()
            .iter()
            .zip(b.points())
            .all(|(p, q)| {
                let same_pos = match p.origin {
                    PointOrigin::Given => p.pos == q.pos,
                    // Births are recomputed from primitives that may differ in the last ulp.
                    PointOrigin::Birth => p.pos.distance(&q.pos) <= tol.eps(),
                };
                p.label == q.label && p.origin == q.origin && same_pos
            })
        && a.primitives().iter().zip(b.primitives()).all(|(p, q)| {
            p.label == q.label
                && canonical_key(&p.prim, tol).is_adjacent(&canonical_key(&q.prim, tol))
                && p.prim.approx_eq(&q.prim, tol.eps())
        })
}
