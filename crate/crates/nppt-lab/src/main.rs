//! Command-line front end: parameter scans over the Werner family and the
//! invariant family, batch comparison runs, CSV/JSON report emission, and a
//! minimal SVG plot emitter.
//!
//! Exit codes: 0 success / no flag, 2 bad arguments, 3 I/O, 4 sampler
//! exhaustion, 5 plot input, 10 flagged gap.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use nppt_lab::states::{
    classify_werner, werner_pt, ConstraintSet, DiagonalInvariantPT, WernerParams,
};
use nppt_lab::witness::{compare, SeesawConfig};
use nppt_lab::Error;

const EXIT_ARGS: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_SAMPLER: i32 = 4;
const EXIT_PLOT: i32 = 5;
const EXIT_FLAGGED: i32 = 10;

#[derive(Parser)]
#[command(name = "nppt-lab", version, about = "Numerical toolkit for NPPT bound entanglement")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a Werner-family state by its distillability region
    Classify(ClassifyArgs),
    /// Scan an alpha grid of Werner states and emit a CSV report
    WernerScan(WernerScanArgs),
    /// Sample the invariant family and emit a JSON report
    FamilyScan(FamilyScanArgs),
    /// Compare extremal-set and seesaw minima on one Werner state
    Compare(CompareArgs),
    /// Render CSV columns as an SVG line plot
    Plot(PlotArgs),
}

/// Values accepted from a `--config` JSON file; explicit flags override.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d: Option<usize>,
    n: Option<usize>,
    alpha: Option<f64>,
    alpha_start: Option<f64>,
    alpha_stop: Option<f64>,
    alpha_step: Option<f64>,
    samples: Option<usize>,
    constraints: Option<Vec<String>>,
    zero_z: Option<bool>,
    restarts: Option<usize>,
    max_iterations: Option<usize>,
    tolerance: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeesawFlags {
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct WernerScanArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha_start: Option<f64>,
    #[arg(long)]
    alpha_stop: Option<f64>,
    #[arg(long)]
    alpha_step: Option<f64>,
    #[command(flatten)]
    seesaw: SeesawFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyScanArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// comma-separated subset of {valid, nppt, two_positive}
    #[arg(long, value_delimiter = ',')]
    constraints: Option<Vec<String>>,
    /// force all correlated-block off-diagonal entries z to zero
    #[arg(long)]
    zero_z: bool,
    #[command(flatten)]
    seesaw: SeesawFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    seesaw: SeesawFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    x: String,
    /// comma-separated y column names
    #[arg(long, value_delimiter = ',')]
    y: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SamplerExhausted(_) => EXIT_SAMPLER,
            _ => EXIT_ARGS,
        };
        Failure::new(code, e.to_string())
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("{}: {e}", path.display()))
}

fn main() {
    if let Ok(var) = std::env::var("NPPT_LAB_THREADS") {
        if let Ok(threads) = var.trim().parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::WernerScan(a) => cmd_werner_scan(a),
        Cmd::FamilyScan(a) => cmd_family_scan(a),
        Cmd::Compare(a) => cmd_compare(a),
        Cmd::Plot(a) => cmd_plot(a),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig, Failure> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_fail(p, e))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::new(EXIT_ARGS, format!("bad config {}: {e}", p.display())))
        }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, Failure> {
    flag.or(file)
        .ok_or_else(|| Failure::new(EXIT_ARGS, format!("missing required option --{name}")))
}

fn seesaw_config(flags: &SeesawFlags, file: &FileConfig) -> SeesawConfig {
    let defaults = SeesawConfig::default();
    SeesawConfig {
        restarts: pick(flags.restarts, file.restarts, defaults.restarts),
        max_iterations: pick(flags.max_iterations, file.max_iterations, defaults.max_iterations),
        tolerance: pick(flags.tolerance, file.tolerance, defaults.tolerance),
        seed: pick(flags.seed, file.seed, defaults.seed),
    }
}

/// Shortest decimal that parses back to the same binary64 value.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io_fail(path, e))
}

fn cmd_classify(args: ClassifyArgs) -> Result<i32, Failure> {
    let cfg = load_config(&args.config)?;
    let d = pick(args.d, cfg.d, 3);
    let alpha = require(args.alpha, cfg.alpha, "alpha")?;
    let params = WernerParams::new(d, alpha)?;
    let region = classify_werner(&params);
    println!("{region} (1/d={:.4}, 1/2=0.5)", 1.0 / d as f64);
    Ok(0)
}

fn alpha_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if step <= 0.0 {
        return Err(Failure::new(EXIT_ARGS, "alpha step must be positive"));
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let alpha = start + k as f64 * step;
        if alpha > stop + step * 1e-9 {
            break;
        }
        grid.push(alpha);
        k += 1;
    }
    Ok(grid)
}

const CSV_HEADER: &str =
    "d,n,alpha,seed,restarts,seesaw_min,extremal_min,analytic_ref,gap,flag,converged_restarts,wall_ms";

fn cmd_werner_scan(args: WernerScanArgs) -> Result<i32, Failure> {
    let cfg = load_config(&args.config)?;
    let d = pick(args.d, cfg.d, 3);
    let n = pick(args.n, cfg.n, 1);
    let start = require(args.alpha_start, cfg.alpha_start, "alpha-start")?;
    let stop = require(args.alpha_stop, cfg.alpha_stop, "alpha-stop")?;
    let step = require(args.alpha_step, cfg.alpha_step, "alpha-step")?;
    let scfg = seesaw_config(&args.seesaw, &cfg);
    let out = require(args.out, cfg.out, "out")?;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for alpha in alpha_grid(start, stop, step)? {
        let t0 = Instant::now();
        let w = werner_pt(&WernerParams::new(d, alpha)?);
        let report = compare(&w, n, &scfg, json!(alpha))?;
        let wall_ms = t0.elapsed().as_millis();
        let analytic_ref = if n == 1 {
            fmt_f64(1.0 - 2.0 * alpha)
        } else {
            String::new()
        };
        csv.push_str(&format!(
            "{d},{n},{},{},{},{},{},{analytic_ref},{},{},{},{wall_ms}\n",
            fmt_f64(alpha),
            scfg.seed,
            scfg.restarts,
            fmt_f64(report.seesaw_min),
            fmt_f64(report.extremal_min),
            fmt_f64(report.gap),
            report.flag,
            report.converged_restarts,
        ));
    }
    write_text(&out, &csv)?;
    Ok(0)
}

fn sample_family(
    d: usize,
    rng: &mut ChaCha8Rng,
    constraints: ConstraintSet,
    zero_z: bool,
) -> Result<DiagonalInvariantPT, Error> {
    if !zero_z {
        return DiagonalInvariantPT::sample_with_rng(d, rng, constraints);
    }
    const BUDGET: usize = 100_000;
    for _ in 0..BUDGET {
        let draw = DiagonalInvariantPT::sample_with_rng(d, rng, ConstraintSet::default())?;
        let rho: Vec<f64> = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| draw.rho(i, j))
            .collect();
        let zeros = vec![Complex64::new(0.0, 0.0); d * (d - 1) / 2];
        let fp = DiagonalInvariantPT::new(d, rho, zeros)?.normalized();
        if constraints.valid && !fp.is_valid_state().0 {
            continue;
        }
        if constraints.nppt && !fp.is_nppt() {
            continue;
        }
        if constraints.two_positive && !fp.two_positive() {
            continue;
        }
        return Ok(fp);
    }
    Err(Error::SamplerExhausted(BUDGET))
}

fn cmd_family_scan(args: FamilyScanArgs) -> Result<i32, Failure> {
    let cfg = load_config(&args.config)?;
    let scfg = seesaw_config(&args.seesaw, &cfg);
    let d = pick(args.d, cfg.d, 3);
    let samples = pick(args.samples, cfg.samples, 100);
    let names = pick(
        args.constraints,
        cfg.constraints,
        vec!["valid".to_string()],
    );
    let zero_z = args.zero_z || cfg.zero_z.unwrap_or(false);
    let out = require(args.out, cfg.out, "out")?;
    let constraints = ConstraintSet::parse(&names)?;

    let t0 = Instant::now();
    let mut entries = Vec::with_capacity(samples);
    let mut valid_count = 0usize;
    let mut nppt_count = 0usize;
    let mut two_positive_count = 0usize;
    let mut flagged_count = 0usize;
    let mut most_negative_gap = f64::INFINITY;
    for index in 0..samples {
        // one stream per sample keeps draws independent of batch size
        let mut rng = ChaCha8Rng::seed_from_u64(scfg.seed);
        rng.set_stream(index as u64 + 1);
        let fp = sample_family(d, &mut rng, constraints, zero_z)?;
        let (valid, _) = fp.is_valid_state();
        let nppt = fp.is_nppt();
        let two_positive = fp.two_positive();
        let report = compare(&fp.family_pt(), 1, &scfg, serde_json::to_value(&fp).unwrap())?;
        valid_count += valid as usize;
        nppt_count += nppt as usize;
        two_positive_count += two_positive as usize;
        flagged_count += report.flag as usize;
        most_negative_gap = most_negative_gap.min(report.gap);
        entries.push(json!({
            "index": index,
            "family": serde_json::to_value(&fp).unwrap(),
            "valid": valid,
            "nppt": nppt,
            "two_positive": two_positive,
            "seesaw_min": report.seesaw_min,
            "extremal_min": report.extremal_min,
            "gap": report.gap,
            "flag": report.flag,
        }));
    }
    let report = json!({
        "schema": 1,
        "d": d,
        "constraints": names,
        "zero_z": zero_z,
        "seed": scfg.seed,
        "restarts": scfg.restarts,
        "samples": entries,
        "summary": {
            "count": samples,
            "valid": valid_count,
            "nppt": nppt_count,
            "two_positive": two_positive_count,
            "flagged": flagged_count,
            "most_negative_gap": if samples > 0 { json!(most_negative_gap) } else { json!(null) },
        },
        "wall_ms": t0.elapsed().as_millis() as u64,
    });
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    text.push('\n');
    write_text(&out, &text)?;
    Ok(if flagged_count > 0 { EXIT_FLAGGED } else { 0 })
}

fn cmd_compare(args: CompareArgs) -> Result<i32, Failure> {
    let cfg = load_config(&args.config)?;
    let d = pick(args.d, cfg.d, 3);
    let alpha = require(args.alpha, cfg.alpha, "alpha")?;
    let n = pick(args.n, cfg.n, 1);
    let scfg = seesaw_config(&args.seesaw, &cfg);
    let out = require(args.out, cfg.out, "out")?;

    let w = werner_pt(&WernerParams::new(d, alpha)?);
    let report = compare(&w, n, &scfg, json!(alpha))?;
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    text.push('\n');
    write_text(&out, &text)?;
    println!(
        "d={d} alpha={} n={n} seesaw_min={} extremal_min={} gap={} flag={}",
        fmt_f64(alpha),
        fmt_f64(report.seesaw_min),
        fmt_f64(report.extremal_min),
        fmt_f64(report.gap),
        report.flag,
    );
    if report.seesaw_min < -1e-6 {
        println!("distillable witness found: <psi|W^(n)|psi> = {}", fmt_f64(report.seesaw_min));
    }
    Ok(if report.flag { EXIT_FLAGGED } else { 0 })
}

struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse_csv(text: &str) -> Result<CsvTable, Failure> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Failure::new(EXIT_PLOT, "empty CSV"))?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        if row.len() != header.len() {
            return Err(Failure::new(EXIT_PLOT, "ragged CSV row"));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

fn numeric_column(table: &CsvTable, name: &str) -> Result<Vec<f64>, Failure> {
    let idx = table
        .header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Failure::new(EXIT_PLOT, format!("missing column {name:?}")))?;
    table
        .rows
        .iter()
        .map(|row| {
            row[idx]
                .parse::<f64>()
                .map_err(|_| Failure::new(EXIT_PLOT, format!("non-numeric value in column {name:?}")))
        })
        .collect()
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.05 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn render_svg(xs: &[f64], series: &[(String, Vec<f64>)], x_label: &str) -> String {
    let (x_lo, x_hi) = axis_range(xs.iter().copied());
    let (y_lo, y_hi) = axis_range(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (PLOT_W - MARGIN_L - MARGIN_R);
    let sy = |y: f64| PLOT_H - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (PLOT_H - MARGIN_T - MARGIN_B);
    let mut body = String::new();
    // frame and ticks
    body.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        PLOT_W - MARGIN_L - MARGIN_R,
        PLOT_H - MARGIN_T - MARGIN_B,
    ));
    for k in 0..=4 {
        let fx = x_lo + (x_hi - x_lo) * k as f64 / 4.0;
        let fy = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        body.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"black\"/>\n<text x=\"{0:.2}\" y=\"{3:.2}\" font-size=\"11\" text-anchor=\"middle\">{4:.4}</text>\n",
            sx(fx),
            PLOT_H - MARGIN_B,
            PLOT_H - MARGIN_B + 5.0,
            PLOT_H - MARGIN_B + 18.0,
            fx,
        ));
        body.push_str(&format!(
            "<line x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\" stroke=\"black\"/>\n<text x=\"{3:.2}\" y=\"{0:.2}\" font-size=\"11\" text-anchor=\"end\" dominant-baseline=\"middle\">{4:.4}</text>\n",
            sy(fy),
            MARGIN_L - 5.0,
            MARGIN_L,
            MARGIN_L - 8.0,
            fy,
        ));
    }
    body.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + PLOT_W - MARGIN_R) / 2.0,
        PLOT_H - 10.0,
        x_label,
    ));
    for (s, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        if xs.len() == 1 {
            body.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\"/>\n",
                sx(xs[0]),
                sy(ys[0]),
            ));
        } else {
            let points: Vec<String> = xs
                .iter()
                .zip(ys)
                .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            body.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                points.join(" "),
            ));
        }
        // legend entry
        let ly = MARGIN_T + 16.0 * (s as f64 + 1.0);
        body.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{ly:.2}\" x2=\"{1:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n<text x=\"{2:.2}\" y=\"{3:.2}\" font-size=\"12\">{name}</text>\n",
            MARGIN_L + 10.0,
            MARGIN_L + 34.0,
            MARGIN_L + 40.0,
            ly + 4.0,
        ));
    }
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n{body}</svg>\n"
    )
}

fn cmd_plot(args: PlotArgs) -> Result<i32, Failure> {
    if args.y.is_empty() {
        return Err(Failure::new(EXIT_ARGS, "at least one --y column required"));
    }
    let text = std::fs::read_to_string(&args.csv).map_err(|e| io_fail(&args.csv, e))?;
    let table = parse_csv(&text)?;
    if table.rows.is_empty() {
        return Err(Failure::new(EXIT_PLOT, "CSV has no data rows"));
    }
    let xs = numeric_column(&table, &args.x)?;
    let mut series = Vec::new();
    for name in &args.y {
        series.push((name.clone(), numeric_column(&table, name)?));
    }
    let svg = render_svg(&xs, &series, &args.x);
    write_text(&args.out, &svg)?;
    Ok(0)
}
