//! The `euclid` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0  | success (solved, valid, written) |
//! | 1  | `verify`: the trace does not check out |
//! | 2  | `solve`: no solution within the depth limit |
//! | 3  | `solve`: node or time budget exhausted |
//! | 64 | usage error |
//! | 65 | malformed input document or image |
//! | 74 | I/O error |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use euclid_core::{
    parse_problem_with, parse_trace, replay_scenes, serialize_problem, serialize_trace, solve, solve_all, verify,
    ParseOptions, Primitive, Problem, Scene, SearchBudget, SearchOptions, SearchOutcome, SearchReport, SolutionTrace,
    Tolerance,
};
use euclid_vision::{
    detect_intersections, detect_primitives_with, gen_dataset, render_scene, render_steps, DatasetConfig, DetectParams,
    Detection, Viewport,
};

pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "euclid", version, about = "Straightedge-and-compass construction solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for a construction and write its trace and step diagrams.
    Solve(SolveArgs),
    /// Replay a trace against a problem.
    Verify {
        problem: PathBuf,
        trace: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Draw a problem, or every step of a trace, as SVG.
    Render {
        problem: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        res: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Find lines, circles and intersections in a PNG or PGM diagram.
    Detect {
        image: PathBuf,
        /// Print the detections as a problem document in pixel units.
        #[arg(long)]
        emit_euc: bool,
        /// Minimum fraction of a primitive's visible extent that must be inked.
        #[arg(long, default_value_t = 0.4)]
        threshold: f64,
    },
    /// Write seeded synthetic diagrams with ground truth.
    GenDataset {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        res: u32,
        #[arg(long, default_value_t = 4)]
        max_primitives: usize,
    },
    /// Solve every problem of a corpus directory and tabulate the effort.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Iterative deepening.
    #[arg(long)]
    ids: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Disable the transposition table and goal-bound pruning.
    #[arg(long)]
    no_prune: bool,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    problem: PathBuf,
    #[arg(long)]
    max_depth: Option<u32>,
    /// Collect every distinct solution at the minimal depth.
    #[arg(long)]
    all: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 512)]
    res: u32,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    corpus: PathBuf,
    /// Also write the table to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Only problems whose file stem is listed.
    #[arg(long = "only", value_delimiter = ',')]
    only: Vec<String>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Io(m) => m,
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify {
            problem,
            trace,
            epsilon,
        } => cmd_verify(&problem, &trace, epsilon),
        Command::Render {
            problem,
            trace,
            res,
            out,
            epsilon,
        } => cmd_render(&problem, trace.as_deref(), res, &out, epsilon),
        Command::Detect {
            image,
            emit_euc,
            threshold,
        } => cmd_detect(&image, emit_euc, threshold),
        Command::GenDataset {
            count,
            seed,
            out,
            res,
            max_primitives,
        } => cmd_gen_dataset(count, seed, &out, res, max_primitives),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn make_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned())
}

fn load_problem(path: &Path, epsilon: Option<f64>) -> Result<Problem, Failure> {
    let mut options = ParseOptions::default();
    if let Some(e) = epsilon {
        if !(1e-12..=1e-3).contains(&e) {
            return Err(Failure::Usage(format!("--epsilon {e} outside [1e-12, 1e-3]")));
        }
        options.epsilon_abs = e;
    }
    let text = read(path)?;
    parse_problem_with(&text, &options)
        .map(|d| d.problem)
        .map_err(|e| Failure::Data(format!("{}:{}", path.display(), e.render(&text))))
}

fn load_trace(path: &Path) -> Result<SolutionTrace, Failure> {
    let text = read(path)?;
    parse_trace(&text).map_err(|e| Failure::Data(format!("{}:{}", path.display(), e.render(&text))))
}

impl SearchArgs {
    fn budget(&self) -> Result<SearchBudget, Failure> {
        let d = SearchBudget::default();
        let nodes = self.budget_nodes.unwrap_or(d.max_nodes);
        let time = match self.time_limit {
            Some(s) if s.is_finite() && s > 0.0 => Duration::from_secs_f64(s),
            Some(s) => return Err(Failure::Usage(format!("--time-limit {s} must be positive"))),
            None => d.wall_clock_limit,
        };
        SearchBudget::new(nodes, time).ok_or_else(|| Failure::Usage("budget must be positive".into()))
    }

    fn options(&self) -> Result<SearchOptions, Failure> {
        if self.workers == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        Ok(SearchOptions {
            transpositions: !self.no_prune,
            goal_bound: !self.no_prune,
            iterative_deepening: self.ids,
            workers: self.workers,
        })
    }
}

fn step_viewport(problem: &Problem, trace: &SolutionTrace, res: u32) -> Result<Viewport, Failure> {
    let scenes = replay_scenes(problem, trace).map_err(|e| Failure::Data(e.to_string()))?;
    let last = scenes.last().unwrap_or(problem.initial());
    Viewport::fit(&[last, problem.goal()], res).map_err(|e| Failure::Usage(e.to_string()))
}

fn write_steps(problem: &Problem, trace: &SolutionTrace, res: u32, out: &Path, name: &str) -> Result<usize, Failure> {
    let vp = step_viewport(problem, trace, res)?;
    let svgs = render_steps(problem, trace, &vp).map_err(|e| Failure::Data(e.to_string()))?;
    for (k, svg) in svgs.iter().enumerate() {
        write(&out.join(format!("{name}_step{k:02}.svg")), svg)?;
    }
    Ok(svgs.len())
}

fn outcome_word(o: &SearchOutcome) -> &'static str {
    match o {
        SearchOutcome::Solved(_) => "solved",
        SearchOutcome::NoSolution => "no solution",
        SearchOutcome::BudgetExhausted => "budget exhausted",
    }
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    let mut problem = load_problem(&a.problem, a.search.epsilon)?;
    if let Some(d) = a.max_depth {
        problem = problem.with_max_depth(d);
    }
    let budget = a.search.budget()?;
    let options = a.search.options()?;
    if a.res == 0 {
        return Err(Failure::Usage("--res must be positive".into()));
    }
    let name = stem(&a.problem);
    let (report, all) = if a.all {
        let (all, report) = solve_all(&problem, &budget, &options);
        (report, all)
    } else {
        (solve(&problem, &budget, &options), Vec::new())
    };
    println!(
        "{}: {} after {} nodes in {:.3} s",
        name,
        outcome_word(&report.outcome),
        report.nodes_expanded,
        report.elapsed.as_secs_f64()
    );
    let Some(trace) = report.trace() else {
        return Ok(match report.outcome {
            SearchOutcome::BudgetExhausted => EXIT_BUDGET,
            _ => EXIT_NOT_FOUND,
        });
    };
    make_dir(&a.out)?;
    let path = a.out.join(format!("{name}.trace"));
    write(&path, serialize_trace(trace))?;
    print!("{}", serialize_trace(trace));
    let panels = write_steps(&problem, trace, a.res, &a.out, &name)?;
    println!("wrote {} and {panels} step diagrams", path.display());
    for (k, t) in all.iter().enumerate() {
        write(&a.out.join(format!("{name}.all{:02}.trace", k + 1)), serialize_trace(t))?;
    }
    if a.all {
        println!("{} distinct solutions at depth {}", all.len(), trace.len());
    }
    Ok(0)
}

fn cmd_verify(problem: &Path, trace: &Path, epsilon: Option<f64>) -> Outcome {
    let p = load_problem(problem, epsilon)?;
    let t = load_trace(trace)?;
    let report = match verify(&p, &t) {
        Ok(r) => r,
        Err(e) => {
            println!("INVALID: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    for s in &report.steps {
        let births: Vec<String> = s
            .births
            .iter()
            .map(|b| format!("{} ({}, {})", b.label, fmt_num(b.pos.x), fmt_num(b.pos.y)))
            .collect();
        let status = if s.births_match { "ok" } else { "MISMATCH" };
        let mut line = format!("step {}: {} -> [{}] {status}", s.step, s.mv, births.join(", "));
        if let Some(n) = &s.note {
            let _ = write!(line, " ({n})");
        }
        println!("{line}");
    }
    println!("goal satisfied: {}", if report.goal_satisfied { "yes" } else { "no" });
    match report.signature_match {
        Some(true) => println!("signature: match"),
        Some(false) => println!("signature: MISMATCH"),
        None => {}
    }
    if report.is_valid() {
        println!("VALID");
        Ok(0)
    } else {
        println!("INVALID");
        Ok(EXIT_INVALID)
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{:.6}", x + 0.0);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn cmd_render(problem: &Path, trace: Option<&Path>, res: u32, out: &Path, epsilon: Option<f64>) -> Outcome {
    if res == 0 {
        return Err(Failure::Usage("--res must be positive".into()));
    }
    let p = load_problem(problem, epsilon)?;
    let name = stem(problem);
    make_dir(out)?;
    match trace {
        Some(t) => {
            let t = load_trace(t)?;
            let n = write_steps(&p, &t, res, out, &name)?;
            println!("wrote {n} step diagrams to {}", out.display());
        }
        None => {
            let vp = Viewport::fit(&[p.initial(), p.goal()], res).map_err(|e| Failure::Usage(e.to_string()))?;
            let svg = render_scene(p.initial(), p.goal(), &vp).map_err(|e| Failure::Data(e.to_string()))?;
            let path = out.join(format!("{name}.svg"));
            write(&path, svg)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(0)
}

/// A problem document holding `prims` in pixel units, with a header that
/// says so.
fn pixel_document(prims: &[Primitive], w: u32, h: u32) -> Result<String, Failure> {
    let tol = Tolerance::with_diameter((w as f64).hypot(h as f64)).map_err(|e| Failure::Data(e.to_string()))?;
    let mut scene = Scene::new(tol);
    for p in prims {
        scene = scene.add_primitive(*p).map_err(|e| Failure::Data(e.to_string()))?;
    }
    let problem = Problem::new(scene, Scene::new(tol), 0).map_err(|e| Failure::Data(e.to_string()))?;
    Ok(format!("# pixel-units {w} {h}\n{}", serialize_problem(&problem)))
}

fn cmd_detect(image: &Path, emit_euc: bool, threshold: f64) -> Outcome {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Failure::Usage(format!("--threshold {threshold} outside (0, 1]")));
    }
    let bytes = fs::read(image).map_err(|e| Failure::Io(format!("{}: {e}", image.display())))?;
    let img = image::load_from_memory(&bytes)
        .map_err(|e| Failure::Data(format!("{}: {e}", image.display())))?
        .to_luma8();
    let params = DetectParams {
        threshold,
        ..DetectParams::default()
    };
    let dets = detect_primitives_with(&img, &params).map_err(|e| Failure::Data(e.to_string()))?;
    let xs = detect_intersections(&img, &dets);
    if emit_euc {
        let prims: Vec<Primitive> = dets.iter().map(|d| d.primitive).collect();
        print!("{}", pixel_document(&prims, img.width(), img.height())?);
        return Ok(0);
    }
    for d in &dets {
        println!("{}", describe(d));
    }
    for p in &xs {
        println!("intersection {} {}", fmt_num(p.x), fmt_num(p.y));
    }
    Ok(0)
}

fn describe(d: &Detection) -> String {
    let what = match d.primitive {
        Primitive::Line(l) => format!("line coeffs {} {} {}", fmt_num(l.a()), fmt_num(l.b()), fmt_num(l.c())),
        Primitive::Circle(c) => format!(
            "circle params {} {} {}",
            fmt_num(c.center().x),
            fmt_num(c.center().y),
            fmt_num(c.radius())
        ),
    };
    format!("{what} score {:.3} support {}", d.score, d.support)
}

fn cmd_gen_dataset(count: usize, seed: u64, out: &Path, res: u32, max_primitives: usize) -> Outcome {
    let config = DatasetConfig {
        resolution: res,
        max_primitives,
        ..DatasetConfig::default()
    };
    let samples = gen_dataset(count, seed, &config).map_err(|e| Failure::Usage(e.to_string()))?;
    make_dir(out)?;
    for (i, s) in samples.iter().enumerate() {
        let base = out.join(format!("sample_{i:04}"));
        write(&base.with_extension("svg"), &s.svg)?;
        s.bitmap
            .save_with_format(base.with_extension("png"), image::ImageFormat::Png)
            .map_err(|e| Failure::Io(format!("{}: {e}", base.with_extension("png").display())))?;
        let mut doc = pixel_document(&s.primitives, res, res)?;
        let _ = writeln!(doc, "# seed {}", s.seed);
        for p in &s.intersections {
            let _ = writeln!(doc, "# intersection {} {}", fmt_num(p.x), fmt_num(p.y));
        }
        write(&base.with_extension("euc"), doc)?;
    }
    println!("wrote {count} samples to {}", out.display());
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Outcome {
    let budget = a.search.budget()?;
    let options = a.search.options()?;
    let dir = a.corpus.join("problems");
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "euc"))
        .filter(|p| a.only.is_empty() || a.only.contains(&stem(p)))
        .collect();
    paths.sort();
    let mut table = String::from(
        "| problem | max depth | solved | depth | nodes | time (s) | replay |\n|---|---|---|---|---|---|---|\n",
    );
    for path in &paths {
        let problem = load_problem(path, a.search.epsilon)?;
        let name = stem(path);
        let report: SearchReport = solve(&problem, &budget, &options);
        let depth = report.trace().map_or("-".into(), |t| t.len().to_string());
        let solved = match report.outcome {
            SearchOutcome::Solved(_) => "yes",
            SearchOutcome::NoSolution => "no",
            SearchOutcome::BudgetExhausted => "budget",
        };
        let known = a.corpus.join("solutions").join(format!("{name}.trace"));
        let replay = if known.exists() {
            let t = load_trace(&known)?;
            match verify(&problem, &t) {
                Ok(r) if r.is_valid() => format!("valid ({} moves)", t.len()),
                _ => "INVALID".into(),
            }
        } else {
            "-".into()
        };
        let row = format!(
            "| {name} | {} | {solved} | {depth} | {} | {:.3} | {replay} |\n",
            problem.max_depth(),
            report.nodes_expanded,
            report.elapsed.as_secs_f64()
        );
        print!("{row}");
        table.push_str(&row);
    }
    if let Some(r) = a.report {
        write(&r, &table)?;
    }
    Ok(0)
}
