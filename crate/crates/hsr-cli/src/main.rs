//! Command-line front end: scene generation, the sweep itself,
//! oracle verification, SVG rendering and counter-based scaling tables.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hsr::gen::{generate, Kind};
use hsr::io;
use hsr::oracle::{verify, Verdict};
use hsr::scene::{canonicalize, validate, Scene};
use hsr::sweep::{self, Counters, SweepOptions};

#[derive(Parser)]
#[command(
    name = "hsr",
    version,
    about = "Visible surfaces of stacked axis-aligned rectangles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic scene file.
    Gen(GenArgs),
    /// Sweep a scene and write the visible regions as CSV.
    Run(RunArgs),
    /// Check a regions CSV against the brute-force oracle.
    Verify(VerifyArgs),
    /// Render a regions CSV as SVG.
    Render(RenderArgs),
    /// Sweep doubling scene sizes and print normalized counters.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of rectangles.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// uniform | nested | grid-stress
    #[arg(long, default_value = "uniform")]
    kind: Kind,
    /// Output scene file (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Scene file.
    #[arg(short, long)]
    input: PathBuf,
    /// Regions CSV (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also emit background pieces (owner_id -1), clipped to the bounding box.
    #[arg(long)]
    report_background: bool,
    /// Merge x-adjacent regions of the same owner and strip before writing.
    #[arg(long)]
    coalesce: bool,
    /// Force the number of events per slab.
    #[arg(long)]
    slab_size_override: Option<usize>,
    /// Write the run's counters as JSON.
    #[arg(long)]
    counters: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scene file.
    #[arg(short, long)]
    input: PathBuf,
    /// Regions CSV produced by `run`.
    #[arg(short, long)]
    regions: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Regions CSV.
    #[arg(short, long)]
    regions: PathBuf,
    /// Output SVG file (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Smallest scene size, as a power of two exponent.
    #[arg(long, default_value_t = 10)]
    min_exp: u32,
    /// Largest scene size, as a power of two exponent.
    #[arg(long, default_value_t = 16)]
    max_exp: u32,
    #[arg(long, default_value = "uniform")]
    kind: Kind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    slab_size_override: Option<usize>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Render(a) => render_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    }
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_scene(path: &Path) -> Result<Scene> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let records = io::parse_scene(&text).with_context(|| format!("parsing {}", path.display()))?;
    let report = validate(&records);
    if !report.is_ok() {
        eprintln!("note: input scene has coordinate ties; canonical ranks break them:");
        eprintln!("{report}");
    }
    canonicalize(&records).context("canonicalizing scene")
}

fn debug_checks_enabled() -> bool {
    std::env::var("HSR_DEBUG_CHECKS")
        .map(|v| v == "1")
        .unwrap_or(false)
}

fn gen_cmd(a: GenArgs) -> Result<()> {
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    let records = generate(a.kind, a.n, a.seed);
    write_out(&a.output, &io::write_scene(&records))
}

fn run_cmd(a: RunArgs) -> Result<()> {
    let scene = load_scene(&a.input)?;
    let opts = SweepOptions {
        report_background: a.report_background,
        slab_override: a.slab_size_override,
        debug_checks: debug_checks_enabled() && scene.len() <= 64,
        fault: None,
    };
    let (mut regions, counters) = sweep::run(&scene, &opts);
    if a.coalesce {
        sweep::coalesce(&mut regions);
    }
    write_out(&a.output, &io::write_regions_csv(&regions))?;
    eprintln!(
        "n={} k={} regions_written={} slabs={} node_visits={} cursor_advances={} region_ops={} aux_peak={}",
        scene.len(),
        counters.regions,
        regions.len(),
        counters.slabs,
        counters.node_visits,
        counters.cursor_advances,
        counters.region_ops,
        counters.aux_peak,
    );
    if let Some(path) = &a.counters {
        let json = serde_json::to_string_pretty(&counters)?;
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn verify_cmd(a: VerifyArgs) -> Result<()> {
    let scene = load_scene(&a.input)?;
    let text = fs::read_to_string(&a.regions)
        .with_context(|| format!("reading {}", a.regions.display()))?;
    let regions = io::parse_regions_csv(&text)?;
    match verify(&scene, &regions) {
        Verdict::Pass => {
            println!(
                "PASS: {} regions cover the oracle ownership exactly",
                regions.len()
            );
            Ok(())
        }
        Verdict::Fail(failure) => {
            println!("FAIL: {failure}");
            std::process::exit(1);
        }
    }
}

fn render_cmd(a: RenderArgs) -> Result<()> {
    let text = fs::read_to_string(&a.regions)
        .with_context(|| format!("reading {}", a.regions.display()))?;
    let regions = io::parse_regions_csv(&text)?;
    write_out(&a.output, &hsr::svg::render(&regions))
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    if a.min_exp > a.max_exp {
        bail!("--min-exp must not exceed --max-exp");
    }
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12} {:>10} {:>10} {:>10}",
        "n", "k", "sweep_ops", "ops_norm", "aux_peak", "aux/n", "slabs", "fill_ops"
    );
    for exp in a.min_exp..=a.max_exp {
        let n = 1usize << exp;
        let scene = canonicalize(&generate(a.kind, n, a.seed)).context("generated scene")?;
        let opts = SweepOptions {
            slab_override: a.slab_size_override,
            ..SweepOptions::default()
        };
        let counters = sweep::run_counting(&scene, &opts);
        let (ops_norm, aux_per_n) = normalized(n, &counters);
        println!(
            "{:>8} {:>12} {:>12} {:>12.3} {:>12} {:>10.2} {:>10} {:>10}",
            n,
            counters.regions,
            counters.sweep_ops(),
            ops_norm,
            counters.aux_peak,
            aux_per_n,
            counters.slabs,
            counters.precompute_fill_ops,
        );
    }
    Ok(())
}

fn normalized(n: usize, c: &Counters) -> (f64, f64) {
    let k = c.regions as f64;
    let log_n = (n.max(2) as f64).log2();
    let ops = c.sweep_ops() as f64 / ((n as f64 + k) * log_n);
    let aux = c.aux_peak as f64 / n as f64;
    (ops, aux)
}
