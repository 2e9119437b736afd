//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use euclid_core::{
    goal_satisfied, intersect, parse_problem, parse_trace, reachable_scenes, serialize_problem, solve,
    verify, Circle, Line, ParseErrorKind, Point, Primitive, Problem, Scene, SearchBudget, SearchOptions,
    SearchOutcome, Tolerance,
};
use euclid_vision::{
    detect_intersections, detect_primitives, evaluate_detection, gen_dataset, render_steps, DatasetConfig, Detection,
    Viewport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type CheckFn = fn() -> Check;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(name: &str) -> Problem {
    let text = std::fs::read_to_string(corpus().join(format!("problems/{name}.euc"))).unwrap();
    parse_problem(&text).unwrap().problem
}

fn load_trace(name: &str) -> euclid_core::SolutionTrace {
    parse_trace(&std::fs::read_to_string(corpus().join(format!("solutions/{name}.trace"))).unwrap()).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn oracle_solvable(problem: &Problem) -> bool {
    reachable_scenes(problem, problem.max_depth())
        .values()
        .any(|s| goal_satisfied(s, problem.goal()))
}

fn unpruned() -> SearchOptions {
    SearchOptions {
        transpositions: false,
        goal_bound: false,
        ..Default::default()
    }
}

fn ac1_kernel() -> Check {
    const SPAN: f64 = 100.0;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tol = Tolerance::with_diameter(8.0 * SPAN * std::f64::consts::SQRT_2).unwrap();
    let bound = 1e-9 * tol.scene_diameter();
    let prim = |rng: &mut ChaCha8Rng| -> Primitive {
        if rng.gen_bool(0.5) {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Line::from_coeffs(t.cos(), t.sin(), rng.gen_range(-SPAN..SPAN)).unwrap().into()
        } else {
            let c = Point::new(rng.gen_range(-SPAN..SPAN), rng.gen_range(-SPAN..SPAN));
            Circle::new(c, rng.gen_range(1.0..SPAN)).unwrap().into()
        }
    };
    let (mut pairs, mut points, mut worst) = (0, 0, 0.0f64);
    while pairs < 10_000 {
        let (p, q) = (prim(&mut rng), prim(&mut rng));
        let Ok(pq) = intersect(&p, &q, &tol) else { continue };
        let qp = intersect(&q, &p, &tol).map_err(|e| format!("asymmetric error: {e}"))?;
        ensure(pq == qp, format!("asymmetric intersection of {p:?} and {q:?}"))?;
        for x in &pq {
            worst = worst.max(p.residual(x)).max(q.residual(x));
        }
        points += pq.len();
        pairs += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= bound, format!("residual {worst:e} exceeds {bound:e}"))?;
    ensure(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!("{pairs} pairs, {points} points, worst residual {worst:.1e} (bound {bound:.1e}), {secs:.2} s"))
}

fn ac2_bisector() -> Check {
    let p = load("bisector");
    let r = solve(&p, &SearchBudget::default(), &SearchOptions::default());
    let t = r.trace().ok_or("bisector not solved")?;
    ensure(t.len() == 3, format!("{} moves", t.len()))?;
    ensure(r.nodes_expanded < 100_000, format!("{} nodes", r.nodes_expanded))?;
    ensure(r.elapsed.as_secs_f64() < 10.0, "over 10 s")?;
    ensure(verify(&p, t).map_err(|e| e.to_string())?.is_valid(), "verify rejected the solution")?;
    let shallow = p.with_max_depth(2);
    let r2 = solve(&shallow, &SearchBudget::default(), &SearchOptions::default());
    ensure(r2.outcome == SearchOutcome::NoSolution, "depth 2 was not NoSolution")?;
    ensure(!oracle_solvable(&shallow), "oracle finds a depth-2 solution")?;
    Ok(format!(
        "3 moves, {} nodes, {:.3} s; depth 2 NoSolution, oracle agrees",
        r.nodes_expanded,
        r.elapsed.as_secs_f64()
    ))
}

fn ac3_inscribed_square() -> Check {
    let p = load("inscribed_square");
    let t = load_trace("inscribed_square");
    ensure(t.len() == 9, format!("{} steps", t.len()))?;
    let rep = verify(&p, &t).map_err(|e| e.to_string())?;
    let expected: [(usize, &[&str]); 5] = [(1, &["C", "D"]), (2, &["E"]), (3, &["F"]), (4, &["G"]), (6, &["H"])];
    for (step, labels) in expected {
        for l in labels {
            ensure(
                t.births[step - 1].iter().any(|b| b.label == *l),
                format!("{l} is not born at step {step}"),
            )?;
        }
        ensure(rep.steps[step - 1].births_match, format!("step {step} births differ"))?;
    }
    ensure(rep.goal_satisfied, "goal not satisfied")?;
    ensure(rep.is_valid(), "trace invalid")?;
    Ok("9 steps replay; C, D @1, E @2, F @3, G @4, H @6 within eps; goal satisfied".into())
}

fn ac4_deep_problems() -> Check {
    let mut summary = Vec::new();
    for name in ["alpha4", "gamma5", "gothic_cupola", "versines"] {
        let p = load(name);
        let t = load_trace(name);
        let rep = verify(&p, &t).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.is_valid(), format!("{name}: trace does not verify"))?;
        summary.push(format!("{name} {}/{}", t.len(), p.max_depth()));
    }
    // Informational: blind search on Gamma-5.
    let p = load("gamma5");
    let opts = SearchOptions {
        iterative_deepening: true,
        ..Default::default()
    };
    let r = solve(&p, &SearchBudget::default(), &opts);
    let info = match &r.outcome {
        SearchOutcome::Solved(t) => format!("re-discovered at depth {}", t.len()),
        SearchOutcome::NoSolution => "no solution found".into(),
        SearchOutcome::BudgetExhausted => "budget exhausted".into(),
    };
    Ok(format!(
        "replayed (moves/max depth): {}; gamma5 search: {info}, {} nodes, {:.1} s",
        summary.join(", "),
        r.nodes_expanded,
        r.elapsed.as_secs_f64()
    ))
}

fn random_problem(rng: &mut impl Rng) -> Problem {
    let tol = Tolerance::with_diameter(8.0).unwrap();
    let mut initial = Scene::new(tol);
    let n = rng.gen_range(2..=3);
    let mut placed = 0;
    while placed < n {
        let p = Point::new(rng.gen_range(-2..=2) as f64, rng.gen_range(-2..=2) as f64);
        if let Ok(s) = initial.add_point(&format!("{}", (b'A' + placed as u8) as char), p) {
            initial = s;
            placed += 1;
        }
    }
    let goal_prim = if rng.gen_bool(0.5) {
        let mut reach: Vec<Scene> = reachable_scenes(&Problem::new(initial.clone(), Scene::new(tol), 2).unwrap(), 2)
            .into_values()
            .filter(|s| !s.primitives().is_empty())
            .collect();
        reach.sort_by_key(|s| s.signature());
        let s = &reach[rng.gen_range(0..reach.len())];
        s.primitives()[rng.gen_range(0..s.primitives().len())].prim
    } else {
        let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        Line::from_coeffs(t.cos(), t.sin(), rng.gen_range(-2..=2) as f64).unwrap().into()
    };
    let goal = Scene::new(tol).add_primitive(goal_prim).unwrap();
    Problem::new(initial, goal, rng.gen_range(0..=2)).unwrap()
}

fn ac5_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let (mut agree, mut solvable) = (0, 0);
    for i in 0..50 {
        let p = random_problem(&mut rng);
        let expect = oracle_solvable(&p);
        solvable += expect as usize;
        let got = solve(&p, &SearchBudget::default(), &SearchOptions::default());
        let solved = match &got.outcome {
            SearchOutcome::Solved(_) => true,
            SearchOutcome::NoSolution => false,
            SearchOutcome::BudgetExhausted => return Err(format!("problem {i}: budget exhausted")),
        };
        ensure(solved == expect, format!("problem {i}: solver {solved}, oracle {expect}"))?;
        agree += 1;
    }
    let mut compared = 0;
    for name in ["bisector", "bisector_segment"] {
        let p = load(name);
        for d in 0..=3 {
            let p = p.with_max_depth(d);
            let a = solve(&p, &SearchBudget::default(), &SearchOptions::default()).outcome;
            let b = solve(&p, &SearchBudget::default(), &unpruned()).outcome;
            ensure(a == b, format!("{name} at depth {d}: pruning changes the verdict"))?;
            compared += 1;
        }
    }
    Ok(format!(
        "{agree}/50 verdicts match the oracle ({solvable} solvable); pruning on/off agree on {compared} corpus runs"
    ))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_euclid")
}

fn run_cli(args: &[&str]) -> Result<i32, String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    Ok(out.status.code().unwrap_or(-1))
}

/// Every file under `dir`, sorted, with contents.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn ac6_determinism() -> Check {
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get()).max(2);
    for (name, depth) in [("bisector", 3), ("bisector_segment", 3), ("alpha4", 6), ("versines", 4)] {
        let p = load(name).with_max_depth(depth);
        let base = solve(&p, &SearchBudget::default(), &SearchOptions::default()).outcome;
        for w in [1, 1, workers] {
            let o = SearchOptions {
                workers: w,
                ..Default::default()
            };
            ensure(solve(&p, &SearchBudget::default(), &o).outcome == base, format!("{name}: differs with {w} workers"))?;
        }
    }

    let p = load("inscribed_square");
    let t = load_trace("inscribed_square");
    let vp = Viewport::fit(&[p.initial(), p.goal()], 512).map_err(|e| e.to_string())?;
    let first = render_steps(&p, &t, &vp).map_err(|e| e.to_string())?;
    for _ in 0..2 {
        ensure(render_steps(&p, &t, &vp).map_err(|e| e.to_string())? == first, "render_steps differs")?;
    }

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let problem = corpus().join("problems/alpha4.euc");
    let mut solves = Vec::new();
    let mut sets = Vec::new();
    for run in 0..3 {
        let w = if run == 2 { workers.to_string() } else { "1".into() };
        let out = tmp.path().join(format!("solve{run}"));
        let code = run_cli(&["solve", problem.to_str().unwrap(), "--workers", &w, "--out", out.to_str().unwrap()])?;
        ensure(code == 0, format!("solve exit {code}"))?;
        solves.push(snapshot(&out));
        let ds = tmp.path().join(format!("ds{run}"));
        let code = run_cli(&["gen-dataset", "--count", "5", "--seed", "9", "--out", ds.to_str().unwrap()])?;
        ensure(code == 0, format!("gen-dataset exit {code}"))?;
        sets.push(snapshot(&ds));
    }
    ensure(solves.windows(2).all(|w| w[0] == w[1]), "solve artifacts differ")?;
    ensure(sets.windows(2).all(|w| w[0] == w[1]), "gen-dataset artifacts differ")?;
    Ok(format!(
        "solve outcomes equal across runs and 1 vs {workers} workers; {} step SVGs, {} solve artifacts, {} dataset files byte-identical x3",
        first.len(),
        solves[0].len(),
        sets[0].len()
    ))
}

fn ac7_detector() -> Check {
    let samples = gen_dataset(200, 2024, &DatasetConfig::default()).map_err(|e| e.to_string())?;
    let (mut truth, mut found, mut xs_truth, mut xs_found) = (0, 0, 0, 0);
    for s in &samples {
        let dets = detect_primitives(&s.bitmap).map_err(|e| e.to_string())?;
        truth += s.primitives.len();
        found += evaluate_detection(&dets, &s.primitives, 2.0, (512.0, 512.0)).true_positives;
        let pts = detect_intersections(&s.bitmap, &dets);
        xs_truth += s.intersections.len();
        xs_found += s.intersections.iter().filter(|t| pts.iter().any(|p| p.distance(t) < 2.0)).count();
    }
    let recovery = found as f64 / truth as f64;
    let xs_recall = xs_found as f64 / xs_truth.max(1) as f64;

    let line: Primitive = Line::from_coeffs(0.0, 1.0, -10.0).unwrap().into();
    let circle: Primitive = Circle::new(Point::new(50.0, 50.0), 20.0).unwrap().into();
    let det = |p: Primitive, score: f64| Detection {
        primitive: p,
        score,
        support: 0,
    };
    let tiny = evaluate_detection(&[det(line, 0.9), det(circle, 0.8)], &[line], 2.0, (100.0, 100.0));

    ensure(recovery >= 0.95, format!("recovery {recovery:.4}"))?;
    ensure(xs_recall >= 0.9, format!("intersection recall {xs_recall:.4}"))?;
    ensure(
        tiny.precision == 0.5 && tiny.recall == 1.0,
        format!("tiny case precision {} recall {}", tiny.precision, tiny.recall),
    )?;
    Ok(format!(
        "recovered {found}/{truth} ({:.1}%) within 2 px, intersection recall {xs_found}/{xs_truth} ({:.1}%), tiny case 0.5/1.0",
        100.0 * recovery,
        100.0 * xs_recall
    ))
}

fn real(rng: &mut impl Rng) -> f64 {
    rng.gen_range(-50_000..=50_000) as f64 / 1000.0
}

fn generate(rng: &mut impl Rng) -> String {
    let mut doc = String::new();
    let _ = writeln!(doc, "maxdepth {}", rng.gen_range(0..12));
    let mut labels: Vec<String> = Vec::new();
    let mut next = 0;
    for section in ["[initial]", "[goal]"] {
        let _ = writeln!(doc, "{section}");
        for _ in 0..rng.gen_range(0..4) {
            let l = format!("p{next}");
            next += 1;
            let _ = writeln!(doc, "point {l} {} {}", real(rng), real(rng));
            labels.push(l);
        }
        for _ in 0..rng.gen_range(0..4) {
            let l = format!("k{next}");
            next += 1;
            let form = rng.gen_range(0..4);
            if form < 2 && labels.len() >= 2 {
                let i = rng.gen_range(0..labels.len());
                let j = (i + rng.gen_range(1..labels.len())) % labels.len();
                let (a, b) = (&labels[i], &labels[j]);
                let _ = match form {
                    0 => writeln!(doc, "line {l} through {a} {b}"),
                    _ => writeln!(doc, "circle {l} center {a} through {b}"),
                };
            } else if form == 2 {
                let _ = writeln!(doc, "line {l} coeffs {} {} {}", real(rng), real(rng) + 0.5, real(rng));
            } else if form == 3 {
                let r = rng.gen_range(1..40_000) as f64 / 1000.0;
                let _ = writeln!(doc, "circle {l} params {} {} {r}", real(rng), real(rng));
            }
        }
    }
    doc
}

fn ac8_parser() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let (mut checked, mut skipped) = (0, 0);
    while checked < 1_000 {
        let doc = generate(&mut rng);
        let p1 = match parse_problem(&doc) {
            Ok(d) => d.problem,
            Err(e) if e.kind == ParseErrorKind::DegenerateDefinition => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.render(&doc)),
        };
        let text = serialize_problem(&p1);
        let p2 = parse_problem(&text).map_err(|e| e.render(&text))?.problem;
        ensure(p1.structurally_eq(&p2), format!("round trip differs:\n{doc}"))?;
        checked += 1;
    }

    let dir = corpus().join("malformed");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        let expect = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# expect "))
            .ok_or_else(|| format!("{}: no expectation line", f.display()))?;
        let e = match parse_problem(&text) {
            Ok(_) => return Err(format!("{} parsed", f.display())),
            Err(e) => e,
        };
        let got = format!("{:?} {} {} {}", e.kind, e.span.line, e.span.col, e.span.len);
        ensure(got == expect, format!("{}: expected {expect}, got {got}", f.display()))?;
    }
    Ok(format!(
        "{checked} generated documents round trip ({skipped} degenerate draws skipped); {} malformed documents report the expected span",
        files.len()
    ))
}

fn main() {
    let checks: [(&str, CheckFn); 8] = [
        ("AC1 kernel properties", ac1_kernel),
        ("AC2 perpendicular bisector", ac2_bisector),
        ("AC3 inscribed square replay", ac3_inscribed_square),
        ("AC4 deep corpus replay", ac4_deep_problems),
        ("AC5 search oracle equivalence", ac5_oracle),
        ("AC6 determinism", ac6_determinism),
        ("AC7 detector round trip", ac7_detector),
        ("AC8 parser round trip", ac8_parser),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {name}: {detail} [{:.1} s]", start.elapsed().as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{:.1} s]", start.elapsed().as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
