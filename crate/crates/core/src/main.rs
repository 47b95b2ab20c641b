use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use graphstory::embedding::Embedding;
use graphstory::generators::{self, SunflowerInstance};
use graphstory::render::{self, parse_points, random_points, render_story, verify_drawings, write_frames, Pt};
use graphstory::solver::{self, Certificate, SolveError, SolverConfig};
use graphstory::special::{one_reroute_realize, RerouteError};
use graphstory::story::{parse_story, GraphStory};

#[derive(Parser)]
#[command(name = "story", version, about = "Realizability of graph stories on fixed point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for the solver (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Abort when a solver layer grows past this many nodes.
    #[arg(long, global = true)]
    max_layer: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a story is realizable on ω+k points.
    Check { story: PathBuf },
    /// Emit a certificate for a realizable story.
    Solve {
        story: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest k up to --k-max for which the story is realizable.
    MinK {
        story: PathBuf,
        #[arg(long = "k-max", visible_alias = "max", default_value_t = 3)]
        k_max: u32,
    },
    /// Re-check a certificate file.
    Verify { certificate: PathBuf },
    /// Draw a certificate as SVG frames.
    Render {
        certificate: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Window-5 realization allowing one edge reroute per step.
    Reroute1 {
        story: PathBuf,
        /// Certificate output path.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Also render frames into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for one embedding of the whole graph whose restrictions realize the story.
    Supporting { story: PathBuf },
    /// Print an instance of a generator family as story JSON.
    Generate {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        n: u32,
        #[arg(long, default_value_t = 5)]
        omega: u32,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Nesting depth for nested triangles.
        #[arg(long, default_value_t = 3)]
        h: u32,
        /// Edge probability for random families.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// SunflowerInstance JSON for the sunflower family (random if absent).
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Solve path stories of growing length and print CSV timings.
    Bench {
        #[arg(long, default_value_t = 5)]
        omega: u32,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [20, 40, 80, 160])]
        sizes: Vec<u32>,
        #[arg(long, value_enum, default_value_t = BenchFamily::Path)]
        family: BenchFamily,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Cycle,
    Random,
    NestedTriangles,
    SpUnrealizable,
    Flags,
    NoSupporting,
    Cubic,
    Sunflower,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFamily {
    Path,
    Random,
}

/// Failure carrying its exit code.
struct Exit(u8, String);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        Exit(2, format!("{e:#}"))
    }
}

fn solve_exit(e: SolveError) -> Exit {
    match e {
        SolveError::BoundExceeded(_) | SolveError::CapsExceeded(_) => Exit(3, e.to_string()),
        other => Exit(2, other.to_string()),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        return std::io::read_to_string(std::io::stdin()).context("reading stdin");
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_story(path: &Path) -> anyhow::Result<GraphStory> {
    Ok(parse_story(&read(path)?).with_context(|| format!("parsing {}", path.display()))?.story)
}

fn load_cert(path: &Path) -> anyhow::Result<Certificate> {
    Certificate::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn config(cli: &Cli) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(m) = cli.max_layer {
        cfg.max_layer = m;
    }
    cfg
}

fn points_for(story: &GraphStory, path: Option<&Path>, seed: u64) -> anyhow::Result<Vec<Pt>> {
    match path {
        Some(p) => Ok(parse_points(&read(p)?).with_context(|| format!("parsing {}", p.display()))?),
        None => Ok(random_points((story.omega().min(story.n()) + story.k()) as usize, seed)),
    }
}

fn render_to(story: &GraphStory, cert: &Certificate, points: &[Pt], out: &Path) -> Result<usize, Exit> {
    let frames = render_story(story, cert, points).map_err(|e| match e {
        render::RenderError::PointCount { .. } | render::RenderError::CoincidentPoints(_) => Exit(2, e.to_string()),
        other => Exit(1, other.to_string()),
    })?;
    verify_drawings(story, &frames, &cert.reroutes).map_err(|e| Exit(1, e.to_string()))?;
    write_frames(out, &frames, story).map_err(|e| Exit(2, e.to_string()))?;
    Ok(frames.len())
}

fn run(cli: &Cli) -> Result<u8, Exit> {
    let json = cli.format == Format::Json;
    let cfg = config(cli);
    match &cli.command {
        Command::Check { story } => {
            let s = load_story(story)?;
            let start = Instant::now();
            let (cert, stats) = match solver::realize_with(&s, &cfg) {
                Ok(r) => r,
                Err(SolveError::WindowNonPlanar(i)) => {
                    print_verdict(json, false, &format!("window {i} is not planar"), &[]);
                    return Ok(1);
                }
                Err(e) => return Err(solve_exit(e)),
            };
            let ok = cert.is_some();
            let note = format!("{:.3}s", start.elapsed().as_secs_f64());
            print_verdict(json, ok, &note, &stats.layer_sizes);
            Ok(if ok { 0 } else { 1 })
        }
        Command::Solve { story, out } => {
            let s = load_story(story)?;
            match solver::realize_with(&s, &cfg) {
                Ok((Some(c), _)) => {
                    write_or_print(out.as_deref(), &c.to_json())?;
                    Ok(0)
                }
                Ok((None, _)) | Err(SolveError::WindowNonPlanar(_)) => {
                    eprintln!("unrealizable");
                    Ok(1)
                }
                Err(e) => Err(solve_exit(e)),
            }
        }
        Command::MinK { story, k_max } => {
            let s = load_story(story)?;
            match solver::min_k_with(&s, *k_max, &cfg) {
                Ok(Some((k, _))) => {
                    if json {
                        println!("{}", json!({ "min_k": k }));
                    } else {
                        println!("{k}");
                    }
                    Ok(0)
                }
                Ok(None) | Err(SolveError::WindowNonPlanar(_)) => {
                    if json {
                        println!("{}", json!({ "min_k": null }));
                    } else {
                        println!("none");
                    }
                    Ok(1)
                }
                Err(e) => Err(solve_exit(e)),
            }
        }
        Command::Verify { certificate } => {
            let c = load_cert(certificate)?;
            let report = solver::verify_certificate(&c.story, &c);
            match (&report.failure, json) {
                (None, false) => println!("ok"),
                (Some(f), false) => println!("invalid: {f}"),
                (f, true) => println!("{}", json!({ "ok": report.ok, "failure": f })),
            }
            Ok(if report.ok { 0 } else { 1 })
        }
        Command::Render { certificate, out, points, seed } => {
            let c = load_cert(certificate)?;
            let report = solver::verify_certificate(&c.story, &c);
            if let Some(f) = report.failure {
                return Err(Exit(1, format!("invalid certificate: {f}")));
            }
            let pts = points_for(&c.story, points.as_deref(), *seed)?;
            let n = render_to(&c.story, &c, &pts, out)?;
            println!("wrote {n} frames to {}", out.display());
            Ok(0)
        }
        Command::Reroute1 { story, cert, out, seed } => {
            let s = load_story(story)?;
            let real = match one_reroute_realize(&s) {
                Ok(r) => r,
                Err(e @ RerouteError::ContainsK5(_)) => {
                    println!("{e}");
                    return Ok(1);
                }
                Err(e) => return Err(Exit(2, e.to_string())),
            };
            let c = real.certificate();
            for r in &c.reroutes {
                println!("step {}: reroute edge {}-{}", r.step, r.edge[0], r.edge[1]);
            }
            if let Some(p) = cert {
                write_or_print(Some(p), &c.to_json())?;
            }
            if let Some(dir) = out {
                let pts = points_for(&s, None, *seed)?;
                render_to(&s, &c, &pts, dir)?;
            }
            Ok(0)
        }
        Command::Supporting { story } => {
            let s = load_story(story)?;
            match solver::find_supporting_with(&s, &cfg) {
                Ok(Some(e)) => {
                    println!("{}", embedding_json(&e));
                    Ok(0)
                }
                Ok(None) | Err(SolveError::WindowNonPlanar(_)) => {
                    println!("none");
                    Ok(1)
                }
                Err(e) => Err(solve_exit(e)),
            }
        }
        Command::Generate { family, n, omega, k, h, p, seed, instance } => {
            let story = generate(*family, *n, *omega, *k, *h, *p, *seed, instance.as_deref())?;
            println!("{}", story.to_json());
            Ok(0)
        }
        Command::Bench { omega, k, sizes, family, seed } => {
            println!("n,omega,k,realizable,max_layer,seconds");
            for &n in sizes {
                let s = match family {
                    BenchFamily::Path => generators::gen_path_story(n, *omega),
                    BenchFamily::Random => generators::gen_random_story(n, *omega, 0.5, *seed),
                }
                .map_err(|e| Exit(2, e.to_string()))?
                .with_k(*k);
                let start = Instant::now();
                let (cert, stats) = match solver::realize_with(&s, &cfg) {
                    Ok(r) => r,
                    Err(SolveError::WindowNonPlanar(_)) => (None, Default::default()),
                    Err(e) => return Err(solve_exit(e)),
                };
                let secs = start.elapsed().as_secs_f64();
                let widest = stats.layer_sizes.iter().max().copied().unwrap_or(0);
                println!("{n},{omega},{k},{},{widest},{secs:.6}", cert.is_some());
            }
            Ok(0)
        }
    }
}

fn print_verdict(json: bool, ok: bool, note: &str, layers: &[usize]) {
    if json {
        println!("{}", json!({ "realizable": ok, "note": note, "layer_sizes": layers }));
    } else {
        println!("{} ({note}; layer sizes {layers:?})", if ok { "realizable" } else { "unrealizable" });
    }
}

fn embedding_json(e: &Embedding) -> String {
    serde_json::to_string(&e.to_doc()).expect("embedding serializes")
}

#[allow(clippy::too_many_arguments)]
fn generate(
    family: Family,
    n: u32,
    omega: u32,
    k: u32,
    h: u32,
    p: f64,
    seed: u64,
    instance: Option<&Path>,
) -> Result<GraphStory, Exit> {
    let gen = |r: Result<GraphStory, generators::GenError>| r.map_err(|e| Exit(2, e.to_string()));
    let story = match family {
        Family::Path => gen(generators::gen_path_story(n, omega))?,
        Family::Cycle => gen(generators::gen_cycle_story(n, omega).map(|(s, _)| s))?,
        Family::Random => gen(generators::gen_random_story(n, omega, p, seed))?,
        Family::NestedTriangles => gen(generators::gen_nested_triangles(h))?,
        Family::SpUnrealizable => gen(generators::gen_sp_unrealizable(omega))?,
        Family::Flags => gen(generators::gen_flags(omega))?,
        Family::NoSupporting => generators::no_supporting_fixture(),
        Family::Cubic => generators::cubic_fixture(),
        Family::Sunflower => {
            let inst = match instance {
                Some(path) => SunflowerInstance::from_json(&read(path)?).map_err(|e| Exit(2, e.to_string()))?,
                None => SunflowerInstance::random(n.max(3), p, seed),
            };
            gen(generators::gen_sunflower_reduction(&inst, k).map(|r| r.story))?
        }
    };
    Ok(if k > 0 && !matches!(family, Family::Sunflower) { story.with_k(k) } else { story })
}

fn main() -> ExitCode {
    // Exit quietly when stdout is closed early, as in `story generate ... | head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
