//! Command-line front end. `run` returns the exit code and the text for stdout and stderr so
//! the binary stays a thin shell.

use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arrangement::Arrangement;
use crate::bwb::complex_terms;
use crate::cy::CYModel;
use crate::error::{Error, Result};
use crate::groupoid::{format_word, is_minimal, is_positive, mutation_transcript, parse_path, rank1_word};
use crate::json::qvec;
use crate::linalg::{parse_qvec, parse_weight, q, QVec, Rat, Weight};
use crate::mutation::{module_of_window, mutate, mutation_word, Direction, ToricWall};
use crate::rep::{QSRep, RepSpec};
use crate::svg;
use crate::verify;
use crate::windows::{dagger, dual, face_of, wall_crossing, window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "wallcross", version, about = "Windows, wall crossings and mutations of quasi-symmetric representations")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Representation as JSON: {"root_datum": {...}, "weights": [[...], ...]}.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Bundled representation: torus-1111, torus-111111 or gl2-sym3.
    #[arg(long, global = true)]
    pub example: Option<String>,
    /// Side of the bounding box, centred at 0, in periods.
    #[arg(long = "box", global = true, default_value_t = 2)]
    pub box_periods: i64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for the random suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output directory for SVG files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Pair {
    #[arg(long, alias = "from", value_parser = parse_qvec)]
    pub delta: QVec,
    #[arg(long, alias = "to", value_parser = parse_qvec)]
    pub delta2: QVec,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weights, Σ, ∇ and the genericity flags.
    Rep,
    /// Wall families and the walls inside the box.
    Arrangement {
        #[arg(long, value_parser = parse_qvec)]
        delta: Option<QVec>,
    },
    /// Dominant characters of δ+∇.
    Window {
        #[arg(long, value_parser = parse_qvec)]
        delta: QVec,
    },
    /// The partition of a window across a wall and the bijection μ.
    Wallcross(Pair),
    /// Faces of the crossing with their duals and daggers.
    Faces {
        #[command(flatten)]
        pair: Pair,
        /// Report the face through a single character instead.
        #[arg(long, value_parser = parse_weight)]
        chi: Option<Weight>,
    },
    /// Terms of the complex attached to face characters.
    Complex {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        face: Option<usize>,
        #[arg(long, value_parser = parse_weight)]
        chi: Option<Weight>,
    },
    /// Iterated mutation of the window module at a toric wall.
    Mutate {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value = "left", value_parser = parse_direction)]
        direction: Direction,
    },
    /// Paths in the fundamental groupoid.
    Groupoid {
        #[command(subcommand)]
        action: GroupoidAction,
    },
    /// Calabi–Yau complete-intersection model.
    Cy {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<i64>,
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<i64>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        twist: i64,
    },
    /// Invariant suites; exits 1 if any check fails.
    Verify {
        /// Suites to run: bundled, input.
        #[arg(long, value_delimiter = ',', default_value = "bundled")]
        suite: Vec<String>,
        /// Number of random torus representations to add.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 200)]
        paths: usize,
    },
    /// Writes the window, face and μ pictures of a crossing.
    ExportSvg(Pair),
}

#[derive(Debug, Subcommand)]
pub enum GroupoidAction {
    /// Rank-one normal form of a path such as "x(1,+);t(1);x(2,-)".
    Reduce {
        path: String,
        /// A point of the start chamber; defaults to the chamber right of the origin.
        #[arg(long, value_parser = parse_qvec)]
        start: Option<QVec>,
    },
}

fn parse_direction(s: &str) -> std::result::Result<Direction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Output {
    Json(Value),
    Text(String),
    Verify(Value, bool),
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return input_error(&Error::InvalidInput(e.to_string())),
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| pool.install(|| dispatch(&cli))));
    match result {
        Ok(Ok(Output::Json(v))) => Outcome { code: 0, stdout: pretty(&v), stderr: String::new() },
        Ok(Ok(Output::Text(s))) => Outcome { code: 0, stdout: s, stderr: String::new() },
        Ok(Ok(Output::Verify(v, passed))) => {
            let mut stderr = String::new();
            for w in v["warnings"].as_array().into_iter().flatten() {
                stderr.push_str(&format!("warning: {}\n", w.as_str().unwrap_or_default()));
            }
            Outcome { code: if passed { 0 } else { 1 }, stdout: pretty(&v), stderr }
        }
        Ok(Err(e)) => input_error(&e),
        Err(_) => Outcome { code: 2, stdout: String::new(), stderr: pretty(&json!({"error": {"kind": "Panic", "message": "internal panic"}})) },
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

fn input_error(e: &Error) -> Outcome {
    Outcome { code: 2, stdout: String::new(), stderr: pretty(&json!({"error": {"kind": kind(e), "message": e.to_string()}})) }
}

pub fn example(name: &str) -> Result<QSRep> {
    match name {
        "torus-1111" => crate::catalog::torus1(&[1, 1, -1, -1]),
        "torus-111111" => crate::catalog::torus1(&[1, 1, 1, -1, -1, -1]),
        "gl2-sym3" => Ok(crate::catalog::gl2_sym3()),
        _ => Err(Error::InvalidInput(format!("unknown example {name:?}"))),
    }
}

pub fn load_rep(g: &Global) -> Result<QSRep> {
    match (&g.input, &g.example) {
        (Some(_), Some(_)) => Err(Error::InvalidInput("--input and --example are exclusive".into())),
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            let spec: RepSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            spec.build()
        }
        (None, Some(n)) => example(n),
        (None, None) => Err(Error::InvalidInput("one of --input or --example is required".into())),
    }
}

fn loaded(g: &Global) -> Result<(QSRep, Arrangement)> {
    let rep = load_rep(g)?;
    let arr = Arrangement::build(&rep)?;
    Ok((rep, arr))
}

fn check_dim(rep: &QSRep, v: &[Rat], flag: &str) -> Result<()> {
    if v.len() != rep.rank() {
        return Err(Error::InvalidInput(format!("--{flag} has {} coordinates, expected {}", v.len(), rep.rank())));
    }
    Ok(())
}

fn check_pair(rep: &QSRep, p: &Pair) -> Result<()> {
    check_dim(rep, &p.delta, "delta")?;
    check_dim(rep, &p.delta2, "delta2")
}

fn svg_or_json(g: &Global, json: Value, svgs: &[(&str, &dyn Fn() -> Result<String>)]) -> Result<Output> {
    match g.format {
        Format::Json => Ok(Output::Json(json)),
        Format::Svg if g.out.is_none() && svgs.len() == 1 => Ok(Output::Text(svgs[0].1()?)),
        Format::Svg | Format::Both => {
            let dir = g.out.as_deref().ok_or_else(|| Error::InvalidInput("--out is required to write files".into()))?;
            let mut files = vec![];
            for (name, f) in svgs {
                files.push(write(dir, &format!("{name}.svg"), &f()?)?);
            }
            if g.format == Format::Both {
                files.push(write(dir, "data.json", &pretty(&json))?);
            }
            files.sort();
            Ok(Output::Json(json!({"files": files})))
        }
    }
}

fn write(dir: &FsPath, name: &str, text: &str) -> Result<String> {
    std::fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    std::fs::write(&p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
    Ok(p.display().to_string())
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::Rep => {
            let rep = load_rep(g)?;
            Ok(Output::Json(json!({
                "weights": rep.weights,
                "rank": rep.rank(),
                "d": rep.d(),
                "weyl_order": rep.root_datum.weyl_order(),
                "quasi_symmetric": rep.quasi_symmetric,
                "spans": rep.spans,
                "generic": rep.generic,
                "symplectic": rep.symplectic,
                "sigma": rep.sigma.to_json(),
                "nabla": rep.nabla.to_json(),
            })))
        }
        Command::Arrangement { delta } => {
            let (rep, arr) = loaded(g)?;
            let (lo, hi) = arr.default_box(g.box_periods);
            let walls: Vec<Value> = arr.walls_in_box(&lo, &hi).iter().map(|w| json!({"normal": w.normal, "value": w.value.to_string()})).collect();
            let chambers = arr.chambers_in_box(&lo, &hi).len();
            let out = json!({
                "families": arr.to_json(),
                "basis": arr.basis,
                "box": {"lo": qvec(&lo), "hi": qvec(&hi)},
                "walls": walls,
                "chambers": chambers,
            });
            let at = match delta {
                Some(d) => {
                    check_dim(&rep, d, "delta")?;
                    d.clone()
                }
                None => arr.point(&arr.chamber_of(&vec![Rat::new(1, 7); rep.rank()]).map(|c| c.sample).unwrap_or_else(|_| vec![q(0); arr.dim()])),
            };
            svg_or_json(g, out, &[("arrangement", &|| svg::window_svg(&rep, &arr, &at))])
        }
        Command::Window { delta } => {
            let (rep, arr) = loaded(g)?;
            check_dim(&rep, delta, "delta")?;
            let w = window(&rep, &arr, delta)?;
            let out = json!({"delta": qvec(&w.delta), "chars": w.chars});
            svg_or_json(g, out, &[("window", &|| svg::window_svg(&rep, &arr, delta))])
        }
        Command::Wallcross(p) => {
            let (rep, arr) = loaded(g)?;
            check_pair(&rep, p)?;
            let c = wall_crossing(&rep, &arr, &p.delta, &p.delta2)?;
            svg_or_json(g, c.to_json(), &[("mu", &|| svg::mu_svg(&rep, &arr, &p.delta, &p.delta2))])
        }
        Command::Faces { pair, chi } => {
            let (rep, arr) = loaded(g)?;
            check_pair(&rep, pair)?;
            let c = wall_crossing(&rep, &arr, &pair.delta, &pair.delta2)?;
            let out = if let Some(chi) = chi {
                check_dim(&rep, &crate::linalg::qv(chi), "chi")?;
                face_of(&rep, chi, &c.delta0)?.to_json()
            } else {
                let faces = c
                    .faces
                    .iter()
                    .map(|fc| {
                        let mut v = fc.face.to_json();
                        v["dual"] = json!(dual(&rep, &fc.face)?.id());
                        v["dagger"] = json!(dagger(&rep, &fc.face)?.id());
                        v["chars"] = json!(fc.chars);
                        Ok(v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                json!({"delta0": qvec(&c.delta0), "faces": faces})
            };
            svg_or_json(g, out, &[("faces", &|| svg::faces_svg(&rep, &arr, &pair.delta, &pair.delta2))])
        }
        Command::Complex { pair, face, chi } => {
            let (rep, arr) = loaded(g)?;
            check_pair(&rep, pair)?;
            let c = wall_crossing(&rep, &arr, &pair.delta, &pair.delta2)?;
            let classes: Vec<_> = match face {
                Some(i) => vec![c.faces.get(*i).ok_or_else(|| Error::InvalidInput(format!("--face {i}: only {} faces", c.faces.len())))?],
                None => c.faces.iter().collect(),
            };
            let mut out = vec![];
            for fc in classes {
                let chars: Vec<&Weight> = match chi {
                    Some(x) => {
                        if !fc.chars.contains(x) {
                            return Err(Error::NotInWindow(format!("{x:?}")));
                        }
                        vec![x]
                    }
                    None => fc.chars.iter().collect(),
                };
                for x in chars {
                    let t = complex_terms(&rep, &fc.face, x)?;
                    let mut v = t.to_json();
                    v["face"] = json!(fc.face.id());
                    v["violations"] = json!(t.violations(&rep, &fc.face));
                    out.push(v);
                }
            }
            if let (Some(x), None) = (chi, face) {
                if out.is_empty() {
                    return Err(Error::NotInWindow(format!("{x:?}")));
                }
            }
            Ok(Output::Json(json!(out)))
        }
        Command::Mutate { pair, steps, direction } => {
            let (rep, arr) = loaded(g)?;
            check_pair(&rep, pair)?;
            let wall = ToricWall::new(&rep, &arr, &pair.delta, &pair.delta2)?;
            let start = module_of_window(&rep, &arr, &pair.delta)?;
            let trace = mutate(&rep, &start, &wall, *direction, *steps)?;
            let word = mutation_word(&rep, &arr, &pair.delta, &pair.delta2)?;
            Ok(Output::Json(json!({
                "delta": qvec(&pair.delta),
                "delta_prime": qvec(&pair.delta2),
                "direction": direction,
                "steps": steps,
                "period": wall.period(),
                "pivot": wall.pivot,
                "word": word.to_json(),
                "trace": trace.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
            })))
        }
        Command::Groupoid { action: GroupoidAction::Reduce { path, start } } => {
            let (rep, arr) = loaded(g)?;
            let start = match start {
                Some(s) => {
                    check_dim(&rep, s, "start")?;
                    s.clone()
                }
                None => default_start(&rep, &arr)?,
            };
            let p = parse_path(&arr, &start, path)?;
            let word = rank1_word(&arr, &p)?;
            let transcript = mutation_transcript(&rep, &arr, &p)?;
            let positive = is_positive(&arr, &p)?;
            Ok(Output::Json(json!({
                "input": path,
                "start": qvec(&start),
                "normal_form": format_word(&word),
                "word": word,
                "positive": positive,
                "minimal": if positive { Some(is_minimal(&arr, &p)?) } else { None },
                "transcript": transcript.to_json(),
            })))
        }
        Command::Cy { a, d, twist } => {
            let model = CYModel::build(a, d)?;
            Ok(Output::Json(model.report(*twist)?.to_json()))
        }
        Command::Verify { suite, random, paths } => {
            let opts = verify::Options { periods: g.box_periods, paths_per_arrangement: *paths, seed: g.seed };
            let mut report = verify::Report::default();
            let suites: Vec<&str> = suite.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
            for s in &suites {
                match *s {
                    "bundled" => report.checks.extend(verify::bundled(&opts).checks),
                    "input" => match load_rep(g) {
                        Ok(rep) => report.checks.extend(verify::rep_suite("input", &rep, &opts)),
                        Err(e @ Error::InvalidInput(_)) => return Err(e),
                        Err(e) => report.checks.push(verify::Check {
                            suite: "rep".into(),
                            subject: "input".into(),
                            name: kind(&e),
                            passed: false,
                            detail: e.to_string(),
                        }),
                    },
                    other => return Err(Error::InvalidInput(format!("unknown suite {other:?}"))),
                }
            }
            if *random > 0 {
                report.checks.extend(verify::random(g.seed, *random, &opts).checks);
            }
            if report.checks.is_empty() {
                report.warnings.push("no suites selected".into());
            }
            Ok(Output::Verify(report.to_json(), report.passed()))
        }
        Command::ExportSvg(p) => {
            let (rep, arr) = loaded(g)?;
            check_pair(&rep, p)?;
            let dir = g.out.as_deref().ok_or_else(|| Error::InvalidInput("--out is required".into()))?;
            let mut files = vec![
                write(dir, "window.svg", &svg::window_svg(&rep, &arr, &p.delta)?)?,
                write(dir, "faces.svg", &svg::faces_svg(&rep, &arr, &p.delta, &p.delta2)?)?,
                write(dir, "mu.svg", &svg::mu_svg(&rep, &arr, &p.delta, &p.delta2)?)?,
            ];
            if g.format != Format::Svg {
                let c = wall_crossing(&rep, &arr, &p.delta, &p.delta2)?;
                files.push(write(dir, "crossing.json", &pretty(&c.to_json()))?);
            }
            files.sort();
            Ok(Output::Json(json!({"files": files})))
        }
    }
}

/// A point of the chamber containing small positive multiples of the first basis vector of `M^W`.
fn default_start(rep: &QSRep, arr: &Arrangement) -> Result<QVec> {
    let _ = rep;
    for k in 2..64 {
        let p = arr.point(&[Rat::new(1, k)]);
        if arr.dim() == 1 && !arr.is_on_wall(&p)? {
            return Ok(arr.point(&arr.chamber_of(&p)?.sample));
        }
    }
    Err(Error::Path("word reduction needs a rank-one arrangement".into()))
}
