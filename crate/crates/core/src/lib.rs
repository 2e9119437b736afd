//! Straightedge-and-compass construction solver.
//!
//! A [`Problem`] pairs an existing scene with a goal scene. The solver
//! enumerates the two primitive moves (line through two known points,
//! circle about a known point through another), discovers the
//! intersections each move creates and searches depth first, with
//! backtracking, for a move sequence whose scene contains the goal.
//! Solutions are plain-text traces that [`verify`] replays independently.

pub mod geometry;
pub mod io;
pub mod moves;
pub mod problem;
pub mod scene;
pub mod search;

pub use geometry::{
    canonical_key, circle_from, intersect, intersect_circle_circle, intersect_line_circle, intersect_line_line,
    line_through, point_on, Circle, GeometryError, Line, Point, Primitive, PrimitiveKey, PrimitiveKind, RigidMotion,
    Tolerance,
};
pub use io::{
    parse_problem, parse_problem_with, parse_trace, serialize_problem, serialize_trace, ParseError, ParseErrorKind,
    ParseOptions, ProblemDocument, Span,
};
pub use moves::{enumerate_moves, order_moves, Move, MoveError, MoveKind};
pub use problem::{Problem, ProblemError};
pub use scene::{goal_satisfied, scene_signature, PointOrigin, Scene, SceneError, SceneSignature};
pub use search::{
    reachable_scenes, replay, replay_scenes, solve, solve_all, verify, Birth, SearchBudget, SearchOptions,
    SearchOutcome, SearchReport, SolutionTrace, StepReport, VerifyError, VerifyReport,
};
