//! Depth-limited backtracking over construction moves.
//!
//! The search walks moves depth first in goal-first order, backtracks at
//! the depth limit and stops at the first scene that contains the goal.
//! A transposition table keyed by [`SceneSignature`] skips scenes already
//! expanded with at least as much remaining depth, and a goal bound skips
//! nodes that are missing more goal primitives than they have moves left.
//! Neither prune removes a solution, so the first trace found is the first
//! solution of the unpruned tree in move order.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Point, Primitive, PrimitiveKey};
use crate::moves::{candidates, order_candidates, Candidate, Move, MoveError};
use crate::problem::Problem;
use crate::scene::{goal_satisfied, Scene, SceneError, SceneSignature};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub wall_clock_limit: Duration,
}

impl SearchBudget {
    pub const DEFAULT_MAX_NODES: u64 = 10_000_000;
    pub const DEFAULT_WALL_CLOCK: Duration = Duration::from_secs(300);

    pub fn new(max_nodes: u64, wall_clock_limit: Duration) -> Option<SearchBudget> {
        (max_nodes >= 1).then_some(SearchBudget {
            max_nodes,
            wall_clock_limit,
        })
    }

    pub fn nodes(max_nodes: u64) -> Option<SearchBudget> {
        Self::new(max_nodes, Self::DEFAULT_WALL_CLOCK)
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: Self::DEFAULT_MAX_NODES,
            wall_clock_limit: Self::DEFAULT_WALL_CLOCK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Skip scenes already expanded at equal or lesser depth.
    pub transpositions: bool,
    /// Skip nodes missing more goal primitives than remaining moves.
    pub goal_bound: bool,
    /// Run depth limits 0, 1, ..., max_depth and stop at the first success.
    pub iterative_deepening: bool,
    /// Worker threads for the root split; 1 runs sequentially.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            transpositions: true,
            goal_bound: true,
            iterative_deepening: false,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Birth {
    pub label: String,
    pub pos: Point,
}

/// A replayable solution: the moves, the points each move gave birth to
/// and, optionally, the signature of the final scene.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionTrace {
    pub moves: Vec<Move>,
    pub births: Vec<Vec<Birth>>,
    pub final_signature: Option<SceneSignature>,
}

impl SolutionTrace {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Solved(SolutionTrace),
    NoSolution,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes_expanded: u64,
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn trace(&self) -> Option<&SolutionTrace> {
        match &self.outcome {
            SearchOutcome::Solved(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Found,
    Exhausted,
    Aborted,
}

struct Shared<'a> {
    goal: &'a Scene,
    options: SearchOptions,
    max_nodes: u64,
    deadline: Instant,
    nodes: &'a AtomicU64,
    /// Lowest root index that found a solution (parallel mode).
    best_root: &'a AtomicUsize,
}

/// Depth-first state: the move path realizing the current scene, the
/// transposition table and the node counter live here.
struct Searcher<'a> {
    shared: &'a Shared<'a>,
    max_depth: u32,
    root_index: usize,
    table: HashMap<SceneSignature, u32>,
    path: Vec<Move>,
    local_nodes: u64,
    collect_all: bool,
    solutions: Vec<Vec<Move>>,
}

impl<'a> Searcher<'a> {
    fn new(shared: &'a Shared<'a>, max_depth: u32, root_index: usize) -> Self {
        Searcher {
            shared,
            max_depth,
            root_index,
            table: HashMap::new(),
            path: Vec::new(),
            local_nodes: 0,
            collect_all: false,
            solutions: Vec::new(),
        }
    }

    fn missing_goal(&self, scene: &Scene) -> Vec<(Primitive, PrimitiveKey)> {
        self.shared
            .goal
            .primitives()
            .iter()
            .filter(|gp| scene.find_primitive_keyed(&gp.prim, &gp.key).is_none())
            .map(|gp| (gp.prim, gp.key))
            .collect()
    }

    fn over_budget(&mut self) -> Option<Flow> {
        if self.shared.best_root.load(Ordering::Relaxed) < self.root_index {
            return Some(Flow::Aborted);
        }
        let total = self.shared.nodes.load(Ordering::Relaxed);
        if total >= self.shared.max_nodes {
            return Some(Flow::Exhausted);
        }
        if self.local_nodes.is_multiple_of(256) && Instant::now() >= self.shared.deadline {
            return Some(Flow::Exhausted);
        }
        None
    }

    /// Transposition check; records the scene when it is new or reached
    /// with more remaining depth than before.
    fn seen(&mut self, scene: &Scene, depth: u32) -> bool {
        if !self.shared.options.transpositions {
            return false;
        }
        let sig = scene.signature();
        match self.table.get(&sig) {
            Some(&d) if d <= depth => true,
            _ => {
                self.table.insert(sig, depth);
                false
            }
        }
    }

    fn dfs(&mut self, scene: &Scene, depth: u32) -> Flow {
        if self.collect_all {
            if self.seen(scene, depth) {
                return Flow::Continue;
            }
            if goal_satisfied(scene, self.shared.goal) {
                self.solutions.push(self.path.clone());
                return Flow::Continue;
            }
        } else if goal_satisfied(scene, self.shared.goal) {
            return Flow::Found;
        }
        if depth >= self.max_depth {
            return Flow::Continue;
        }
        if let Some(flow) = self.over_budget() {
            return flow;
        }
        if !self.collect_all && self.seen(scene, depth) {
            return Flow::Continue;
        }
        let remaining = (self.max_depth - depth) as usize;
        let missing = self.missing_goal(scene);
        if self.shared.options.goal_bound && missing.len() > remaining {
            return Flow::Continue;
        }
        self.local_nodes += 1;
        self.shared.nodes.fetch_add(1, Ordering::Relaxed);

        let cands = order_candidates(candidates(scene), self.shared.goal);
        let must_hit_goal = self.shared.options.goal_bound && missing.len() == remaining;
        let eps = scene.tolerance().eps();
        for cand in cands {
            if must_hit_goal && !hits_any(&cand, &missing, eps) {
                continue;
            }
            let Ok(child) = scene.add_primitive(cand.prim) else {
                continue;
            };
            self.path.push(cand.to_move(scene));
            match self.dfs(&child, depth + 1) {
                Flow::Continue => {}
                flow => return flow,
            }
            self.path.pop();
        }
        Flow::Continue
    }
}

fn hits_any(cand: &Candidate, goal: &[(Primitive, PrimitiveKey)], eps: f64) -> bool {
    goal.iter().any(|(prim, key)| {
        (key.is_adjacent(&cand.key) || key.is_adjacent_flipped(&cand.key)) && prim.approx_eq(&cand.prim, eps)
    })
}

/// Result of one fixed-depth pass.
enum Pass {
    Found(Vec<Move>),
    NotFound,
    Exhausted,
}

fn fixed_depth_pass(problem: &Problem, shared: &Shared<'_>, max_depth: u32) -> Pass {
    let initial = problem.initial();
    if goal_satisfied(initial, shared.goal) {
        return Pass::Found(Vec::new());
    }
    if shared.options.workers <= 1 || max_depth == 0 {
        let mut s = Searcher::new(shared, max_depth, 0);
        return match s.dfs(initial, 0) {
            Flow::Found => Pass::Found(s.path),
            Flow::Exhausted | Flow::Aborted => Pass::Exhausted,
            Flow::Continue => Pass::NotFound,
        };
    }

    // Root split: each worker owns one root move's subtree. The reported
    // solution is the one under the lowest root index, as sequentially.
    let mut root = Searcher::new(shared, max_depth, 0);
    if let Some(Flow::Exhausted) = root.over_budget() {
        return Pass::Exhausted;
    }
    let missing = root.missing_goal(initial);
    let remaining = max_depth as usize;
    if shared.options.goal_bound && missing.len() > remaining {
        return Pass::NotFound;
    }
    shared.nodes.fetch_add(1, Ordering::Relaxed);
    let eps = initial.tolerance().eps();
    let must_hit_goal = shared.options.goal_bound && missing.len() == remaining;
    let roots: Vec<Candidate> = order_candidates(candidates(initial), shared.goal)
        .into_iter()
        .filter(|c| !must_hit_goal || hits_any(c, &missing, eps))
        .collect();

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(shared.options.workers).build() {
        Ok(p) => p,
        Err(_) => {
            let mut s = Searcher::new(shared, max_depth, 0);
            return match s.dfs(initial, 0) {
                Flow::Found => Pass::Found(s.path),
                Flow::Exhausted | Flow::Aborted => Pass::Exhausted,
                Flow::Continue => Pass::NotFound,
            };
        }
    };
    let results: Vec<Option<Result<Vec<Move>, ()>>> = pool.install(|| {
        roots
            .par_iter()
            .enumerate()
            .map(|(i, cand)| {
                let Ok(child) = initial.add_primitive(cand.prim) else {
                    return None;
                };
                let mut s = Searcher::new(shared, max_depth, i);
                s.path.push(cand.to_move(initial));
                match s.dfs(&child, 1) {
                    Flow::Found => {
                        shared.best_root.fetch_min(i, Ordering::Relaxed);
                        Some(Ok(s.path))
                    }
                    Flow::Exhausted => Some(Err(())),
                    Flow::Aborted | Flow::Continue => None,
                }
            })
            .collect()
    });
    // A lower subtree that ran out of budget could still have held the
    // sequential answer, so exhaustion before the first hit wins.
    match results.into_iter().flatten().next() {
        Some(Ok(path)) => Pass::Found(path),
        Some(Err(())) => Pass::Exhausted,
        None => Pass::NotFound,
    }
}

/// Searches for the first move sequence of length at most the problem's
/// depth limit whose final scene contains the goal.
pub fn solve(problem: &Problem, budget: &SearchBudget, options: &SearchOptions) -> SearchReport {
    let start = Instant::now();
    let nodes = AtomicU64::new(0);
    let best_root = AtomicUsize::new(usize::MAX);
    let shared = Shared {
        goal: problem.goal(),
        options: *options,
        max_nodes: budget.max_nodes,
        deadline: start + budget.wall_clock_limit,
        nodes: &nodes,
        best_root: &best_root,
    };
    let depths: Vec<u32> = if options.iterative_deepening {
        (0..=problem.max_depth()).collect()
    } else {
        vec![problem.max_depth()]
    };
    let mut outcome = SearchOutcome::NoSolution;
    for d in depths {
        best_root.store(usize::MAX, Ordering::Relaxed);
        match fixed_depth_pass(problem, &shared, d) {
            Pass::Found(path) => {
                let trace = replay(problem, &path).expect("solver paths replay by construction");
                outcome = SearchOutcome::Solved(trace);
                break;
            }
            Pass::Exhausted => {
                outcome = SearchOutcome::BudgetExhausted;
                break;
            }
            Pass::NotFound => {}
        }
    }
    SearchReport {
        outcome,
        nodes_expanded: nodes.load(Ordering::Relaxed),
        elapsed: start.elapsed(),
    }
}

/// Every solution of minimal length: one trace per distinct solved scene,
/// in move order. Returns the minimal-depth report alongside.
pub fn solve_all(
    problem: &Problem,
    budget: &SearchBudget,
    options: &SearchOptions,
) -> (Vec<SolutionTrace>, SearchReport) {
    let first = solve(
        problem,
        budget,
        &SearchOptions {
            iterative_deepening: true,
            ..*options
        },
    );
    let depth = match &first.outcome {
        SearchOutcome::Solved(t) => t.len() as u32,
        _ => return (Vec::new(), first),
    };
    let start = Instant::now();
    let nodes = AtomicU64::new(0);
    let best_root = AtomicUsize::new(usize::MAX);
    let shared = Shared {
        goal: problem.goal(),
        options: SearchOptions {
            goal_bound: options.goal_bound,
            transpositions: true,
            ..*options
        },
        max_nodes: budget.max_nodes,
        deadline: start + budget.wall_clock_limit,
        nodes: &nodes,
        best_root: &best_root,
    };
    let mut s = Searcher::new(&shared, depth, 0);
    s.collect_all = true;
    let flow = s.dfs(problem.initial(), 0);
    let traces = s
        .solutions
        .iter()
        .map(|p| replay(problem, p).expect("solver paths replay by construction"))
        .collect();
    let report = SearchReport {
        outcome: if flow == Flow::Exhausted {
            SearchOutcome::BudgetExhausted
        } else {
            first.outcome
        },
        nodes_expanded: first.nodes_expanded + nodes.load(Ordering::Relaxed),
        elapsed: first.elapsed + start.elapsed(),
    };
    (traces, report)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("step {step}: unknown point label `{label}`")]
    InvalidLabel { step: usize, label: String },
    #[error("step {step}: degenerate move: {reason}")]
    DegenerateMove { step: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// 1-based step number.
    pub step: usize,
    pub mv: Move,
    pub births: Vec<Birth>,
    pub births_match: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub steps: Vec<StepReport>,
    pub goal_satisfied: bool,
    /// `None` when the trace carries no signature.
    pub signature_match: Option<bool>,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.goal_satisfied && self.steps.iter().all(|s| s.births_match) && self.signature_match != Some(false)
    }
}

/// Replays a trace through the scene model, independently of the solver.
///
/// Birth labels in the trace may differ from the generated ones; they are
/// matched by position and then usable as aliases in later moves.
pub fn verify(problem: &Problem, trace: &SolutionTrace) -> Result<VerifyReport, VerifyError> {
    let mut scene = problem.initial().clone();
    let eps = scene.tolerance().eps();
    let mut alias: HashMap<String, String> = HashMap::new();
    let mut steps = Vec::with_capacity(trace.moves.len());
    for (i, mv) in trace.moves.iter().enumerate() {
        let step = i + 1;
        let resolve = |label: &str| -> Result<String, VerifyError> {
            if let Some(l) = alias.get(label) {
                return Ok(l.clone());
            }
            if scene.point(label).is_some() {
                return Ok(label.to_string());
            }
            Err(VerifyError::InvalidLabel {
                step,
                label: label.to_string(),
            })
        };
        let resolved = Move {
            kind: mv.kind,
            first: resolve(&mv.first)?,
            second: resolve(&mv.second)?,
        };
        let prim = resolved.primitive(&scene).map_err(|e| match e {
            MoveError::UnknownLabel(label) => VerifyError::InvalidLabel { step, label },
            MoveError::Degenerate(g) => VerifyError::DegenerateMove {
                step,
                reason: g.to_string(),
            },
        })?;
        let (next, range) = scene.add_primitive_traced(None, prim).map_err(|e| VerifyError::DegenerateMove {
            step,
            reason: match e {
                SceneError::DuplicatePrimitive { existing } => format!("draws existing primitive `{existing}`"),
                other => other.to_string(),
            },
        })?;
        let born: Vec<Birth> = next.points()[range]
            .iter()
            .map(|p| Birth {
                label: p.label.clone(),
                pos: p.pos,
            })
            .collect();
        let expected = trace.births.get(i).map(Vec::as_slice).unwrap_or(&[]);
        let births_match = expected.len() == born.len()
            && expected.iter().zip(&born).all(|(e, b)| e.pos.distance(&b.pos) <= eps);
        for (e, b) in expected.iter().zip(&born) {
            if e.label != b.label {
                alias.insert(e.label.clone(), b.label.clone());
            }
        }
        let note = (!births_match).then(|| {
            format!(
                "expected {} birth(s) {}, replay produced {} {}",
                expected.len(),
                fmt_births(expected),
                born.len(),
                fmt_births(&born)
            )
        });
        steps.push(StepReport {
            step,
            mv: mv.clone(),
            births: born,
            births_match,
            note,
        });
        scene = next;
    }
    Ok(VerifyReport {
        steps,
        goal_satisfied: goal_satisfied(&scene, problem.goal()),
        signature_match: trace.final_signature.map(|s| s == scene.signature()),
    })
}

fn fmt_births(b: &[Birth]) -> String {
    let parts: Vec<String> = b.iter().map(|b| format!("{}={}", b.label, b.pos)).collect();
    format!("[{}]", parts.join(", "))
}

/// Applies `moves` from the initial scene and records births and the final
/// signature under generated labels.
pub fn replay(problem: &Problem, moves: &[Move]) -> Result<SolutionTrace, VerifyError> {
    let mut scene = problem.initial().clone();
    let mut births = Vec::with_capacity(moves.len());
    for (i, mv) in moves.iter().enumerate() {
        let step = i + 1;
        let prim = mv.primitive(&scene).map_err(|e| match e {
            MoveError::UnknownLabel(label) => VerifyError::InvalidLabel { step, label },
            MoveError::Degenerate(g) => VerifyError::DegenerateMove {
                step,
                reason: g.to_string(),
            },
        })?;
        let (next, range) = scene
            .add_primitive_traced(None, prim)
            .map_err(|e| VerifyError::DegenerateMove {
                step,
                reason: e.to_string(),
            })?;
        births.push(
            next.points()[range]
                .iter()
                .map(|p| Birth {
                    label: p.label.clone(),
                    pos: p.pos,
                })
                .collect(),
        );
        scene = next;
    }
    Ok(SolutionTrace {
        moves: moves.to_vec(),
        births,
        final_signature: Some(scene.signature()),
    })
}

/// Every intermediate scene of a trace, initial scene first, resolving
/// birth labels like [`verify`].
pub fn replay_scenes(problem: &Problem, trace: &SolutionTrace) -> Result<Vec<Scene>, VerifyError> {
    let mut scenes = vec![problem.initial().clone()];
    let mut alias: HashMap<String, String> = HashMap::new();
    for (i, mv) in trace.moves.iter().enumerate() {
        let step = i + 1;
        let scene = scenes.last().expect("non-empty");
        let res = |l: &str| alias.get(l).cloned().unwrap_or_else(|| l.to_string());
        let resolved = Move {
            kind: mv.kind,
            first: res(&mv.first),
            second: res(&mv.second),
        };
        let prim = resolved.primitive(scene).map_err(|e| match e {
            MoveError::UnknownLabel(label) => VerifyError::InvalidLabel { step, label },
            MoveError::Degenerate(g) => VerifyError::DegenerateMove {
                step,
                reason: g.to_string(),
            },
        })?;
        let (next, range) = scene
            .add_primitive_traced(None, prim)
            .map_err(|e| VerifyError::DegenerateMove {
                step,
                reason: e.to_string(),
            })?;
        if let Some(expected) = trace.births.get(i) {
            for (e, b) in expected.iter().zip(&next.points()[range]) {
                if e.label != b.label {
                    alias.insert(e.label.clone(), b.label.clone());
                }
            }
        }
        scenes.push(next);
    }
    Ok(scenes)
}

/// Every distinct scene reachable in at most `depth` moves, by naive
/// enumeration of all move sequences with no pruning. Test oracle; the
/// cost grows factorially with depth.
pub fn reachable_scenes(problem: &Problem, depth: u32) -> HashMap<SceneSignature, Scene> {
    fn walk(scene: &Scene, depth: u32, out: &mut HashMap<SceneSignature, Scene>) {
        out.entry(scene.signature()).or_insert_with(|| scene.clone());
        if depth == 0 {
            return;
        }
        for m in crate::moves::enumerate_moves(scene) {
            let Ok(prim) = m.primitive(scene) else { continue };
            if let Ok(child) = scene.add_primitive(prim) {
                walk(&child, depth - 1, out);
            }
        }
    }
    let mut out = HashMap::new();
    walk(problem.initial(), depth, &mut out);
    out
}
