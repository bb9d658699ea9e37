//! Command-line experiment runner.
//!
//! Every subcommand resolves its configuration from defaults, an optional
//! JSON file (`--config`) and flags, in increasing priority, and writes the
//! resolved configuration next to its outputs.

mod output;
mod sweep;
mod verify;

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    embedding_series, rademacher_estimate, RademacherConfig, SeriesTable, ShellConstruction, ShellSpectrum,
};
use crate::constructor::{build, BuildConfig};
use crate::error::{Error, Result};
use crate::metrics::{slope_fit, QuadratureSpec};
use crate::network::{ReluNetwork, Variant};
use crate::rng;
use crate::spectral::SpectralTarget;

pub use output::{fmt_g, loglog_svg, Series};
pub use sweep::{median, run_sweep, SlopeRow, SweepConfig, SweepResult, SweepRow, SWEEP_HEADER};
pub use verify::{run_checks, CheckResult, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "barronforge", version, about = "Deep narrow ReLU approximation of log-Barron targets")]
pub struct Cli {
    /// JSON file with configuration values; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exactness checks for the network primitives and the cosine representation.
    Verify {
        #[arg(long)]
        cos_points: Option<usize>,
        #[arg(long, hide = true, default_value_t = 0.0)]
        inject_gamma_fault: f64,
    },
    /// Build networks over a grid of (d, m, seed) and fit convergence slopes.
    Sweep {
        #[arg(long, ignore_case = true)]
        variant: Option<Variant>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        ms: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        quad_points: Option<usize>,
        #[arg(long)]
        max_retries: Option<usize>,
        #[arg(long)]
        svg: bool,
    },
    /// Empirical Rademacher complexity against the sample count.
    Rademacher {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        sigma_draws: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        svg: bool,
    },
    /// Partial sums of the embedding counterexample series.
    Embedding {
        /// `prop42` or `prop43`.
        #[arg(long)]
        construction: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Single build: writes the network and its report.
    Build {
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, ignore_case = true)]
        variant: Option<Variant>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quad_points: Option<usize>,
        #[arg(long)]
        max_retries: Option<usize>,
    },
    /// Evaluate a saved network at points read from stdin, one per line.
    Eval {
        #[arg(long)]
        network: PathBuf,
    },
}

impl clap::ValueEnum for Variant {
    fn value_variants<'a>() -> &'a [Self] {
        &[Variant::L2, Variant::H1]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Variant::L2 => "L2",
            Variant::H1 => "H1",
        }))
    }
}

/// Failure modes mapped to exit codes.
enum Failure {
    /// Exit code 1.
    Check(String),
    /// Exit code 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Check(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Reads the config file, preferring a section named after the subcommand.
fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>, section: &str) -> Result<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path)?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(sub) = value.get_mut(section) {
        value = sub.take();
    }
    Ok(serde_json::from_value(value)?)
}

fn out_dir(cli_out: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = cli_out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::write(dir.join(name), body)?;
    Ok(())
}

#[derive(Serialize)]
struct Meta<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    unix_time: u64,
    config: &'a T,
}

/// Resolved config plus a timestamp; kept apart from the deterministic outputs.
fn write_meta<T: Serialize>(dir: &Path, command: &str, config: &T) -> Result<()> {
    let unix_time = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = Meta { command, version: env!("CARGO_PKG_VERSION"), unix_time, config };
    write(dir, &format!("{command}_meta.json"), &serde_json::to_string_pretty(&meta)?)
}

fn run(cli: Cli) -> Outcome {
    let cfg_path = cli.config.as_deref();
    match cli.command {
        Command::Verify { cos_points, inject_gamma_fault } => {
            let mut opts: VerifyConfig = load_config(cfg_path, "verify")?;
            if let Some(c) = cos_points {
                opts.cos_points = c;
            }
            cmd_verify(&opts, inject_gamma_fault)
        }
        Command::Sweep { variant, dims, ms, seeds, quad_points, max_retries, svg } => {
            let mut cfg: SweepConfig = load_config(cfg_path, "sweep")?;
            if let Some(v) = variant {
                cfg.variant = v;
            }
            if let Some(v) = dims {
                cfg.dims = v;
            }
            if let Some(v) = ms {
                cfg.ms = v;
            }
            if let Some(v) = seeds {
                cfg.seeds = v;
            }
            if let Some(v) = quad_points {
                cfg.quad_points = v;
            }
            if let Some(v) = max_retries {
                cfg.max_retries = v;
            }
            cfg.svg |= svg;
            cmd_sweep(&cfg, &out_dir(&cli.out)?)
        }
        Command::Rademacher { dims, ns, q, sigma_draws, seed, svg } => {
            let mut cfg: RademacherSweep = load_config(cfg_path, "rademacher")?;
            if let Some(v) = dims {
                cfg.dims = v;
            }
            if let Some(v) = ns {
                cfg.ns = v;
            }
            if let Some(v) = q {
                cfg.q = v;
            }
            if let Some(v) = sigma_draws {
                cfg.sigma_draws = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            cfg.svg |= svg;
            cmd_rademacher(&cfg, &out_dir(&cli.out)?)
        }
        Command::Embedding { construction, d, s, p, k_max } => {
            let mut cfg: EmbeddingConfig = load_config(cfg_path, "embedding")?;
            if let Some(v) = construction {
                cfg.construction = v;
            }
            if let Some(v) = d {
                cfg.d = v;
            }
            if let Some(v) = s {
                cfg.s = v;
            }
            if let Some(v) = p {
                cfg.p = v;
            }
            if let Some(v) = k_max {
                cfg.k_max = v;
            }
            cmd_embedding(&cfg, &out_dir(&cli.out)?)
        }
        Command::Build { target, m, variant, seed, quad_points, max_retries } => {
            let mut cfg: BuildCommand = load_config(cfg_path, "build")?;
            if let Some(v) = target {
                cfg.target = Some(v);
            }
            if let Some(v) = m {
                cfg.m = v;
            }
            if let Some(v) = variant {
                cfg.variant = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(v) = quad_points {
                cfg.quad_points = v;
            }
            if let Some(v) = max_retries {
                cfg.max_retries = v;
            }
            cmd_build(&cfg, &out_dir(&cli.out)?)
        }
        Command::Eval { network } => cmd_eval(&network),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct VerifyConfig {
    cos_points: usize,
    seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let d = VerifyOptions::default();
        VerifyConfig { cos_points: d.cos_points, seed: d.seed }
    }
}

fn cmd_verify(cfg: &VerifyConfig, fault: f64) -> Outcome {
    let opts = VerifyOptions { gamma_fault: fault, cos_points: cfg.cos_points, seed: cfg.seed };
    let checks = run_checks(&opts)?;
    println!("{:<32} {:>12} {:>10} {:>8}  result", "check", "max_dev", "tol", "secs");
    for c in &checks {
        println!(
            "{:<32} {:>12.3e} {:>10.1e} {:>8.2}  {}",
            c.name,
            c.max_deviation,
            c.tolerance,
            c.seconds,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn cmd_sweep(cfg: &SweepConfig, dir: &Path) -> Outcome {
    let res = run_sweep(cfg)?;
    write(dir, "sweep.csv", &res.csv())?;
    write(dir, "sweep_summary.csv", &res.summary_csv())?;
    if cfg.svg {
        write(dir, "sweep.svg", &res.svg())?;
    }
    write_meta(dir, "sweep", cfg)?;
    let rejected = res.rows.iter().filter(|r| !r.accepted).count();
    for s in &res.slopes {
        match s.fit {
            Some(f) => println!("d={:<3} {} slope {:+.4} (r2 {:.4})", s.d, s.variant, f.slope, f.r2),
            None => println!("d={:<3} {} slope n/a", s.d, s.variant),
        }
    }
    println!("{} builds, {} not accepted; wrote {}", res.rows.len(), rejected, dir.display());
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RademacherSweep {
    dims: Vec<usize>,
    ns: Vec<usize>,
    q: f64,
    sigma_draws: usize,
    shells: i32,
    candidates_per_shell: usize,
    seed: u64,
    svg: bool,
}

impl Default for RademacherSweep {
    fn default() -> Self {
        let base = RademacherConfig::new(1, 4, 1.0, rng::default_seed());
        RademacherSweep {
            dims: vec![4],
            ns: vec![64, 256, 1024, 4096],
            q: 1.0,
            sigma_draws: base.sigma_draws,
            shells: base.shells,
            candidates_per_shell: base.candidates_per_shell,
            seed: base.seed,
            svg: false,
        }
    }
}

fn cmd_rademacher(cfg: &RademacherSweep, dir: &Path) -> Outcome {
    let mut csv = String::from("d,n,Q,estimate,bound\n");
    let mut summary = String::from("d,slope,intercept,r2\n");
    let mut series = Vec::new();
    for &d in &cfg.dims {
        let mut pts = Vec::new();
        for &n in &cfg.ns {
            let rc = RademacherConfig {
                n,
                d,
                q: cfg.q,
                sigma_draws: cfg.sigma_draws,
                shells: cfg.shells,
                candidates_per_shell: cfg.candidates_per_shell,
                seed: cfg.seed,
            };
            let est = rademacher_estimate(&rc)?;
            csv.push_str(&format!("{d},{n},{},{},{}\n", fmt_g(cfg.q, 12), fmt_g(est.estimate, 12), fmt_g(est.bound, 12)));
            pts.push((n as f64, est.estimate));
        }
        let fit = slope_fit(&pts).ok();
        let (a, b, c) = fit.map_or((f64::NAN, f64::NAN, f64::NAN), |f| (f.slope, f.intercept, f.r2));
        summary.push_str(&format!("{d},{},{},{}\n", fmt_g(a, 12), fmt_g(b, 12), fmt_g(c, 12)));
        match fit {
            Some(f) => println!("d={d:<3} exponent {:+.4} (r2 {:.4})", f.slope, f.r2),
            None => println!("d={d:<3} exponent n/a"),
        }
        series.push(Series { label: format!("d={d}"), points: pts });
    }
    write(dir, "rademacher.csv", &csv)?;
    write(dir, "rademacher_summary.csv", &summary)?;
    if cfg.svg {
        write(dir, "rademacher.svg", &loglog_svg("empirical Rademacher complexity", "n", "estimate", &series))?;
    }
    write_meta(dir, "rademacher", cfg)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EmbeddingConfig {
    construction: String,
    d: usize,
    s: f64,
    p: f64,
    k_max: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig { construction: "prop42".into(), d: 4, s: 3.0, p: 3.0, k_max: 60 }
    }
}

fn embedding_csv(t: &SeriesTable) -> String {
    let mut s = String::from("k,log2_hs_increment,log2_hs_partial,log2_blog_increment,log2_blog_partial\n");
    for r in &t.rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            fmt_g(r.log2_hs_increment, 12),
            fmt_g(r.log2_hs_partial, 12),
            fmt_g(r.log2_blog_increment, 12),
            fmt_g(r.log2_blog_partial, 12)
        ));
    }
    s
}

fn cmd_embedding(cfg: &EmbeddingConfig, dir: &Path) -> Outcome {
    let construction = match cfg.construction.to_ascii_lowercase().as_str() {
        "prop42" => ShellConstruction::Prop42,
        "prop43" => ShellConstruction::Prop43 { p: cfg.p },
        other => return Err(Failure::Usage(format!("unknown construction '{other}' (expected prop42 or prop43)"))),
    };
    let spec = ShellSpectrum { d: cfg.d, s: cfg.s, construction, k_max: cfg.k_max };
    let table = embedding_series(&spec)?;
    write(dir, "embedding.csv", &embedding_csv(&table))?;
    let mut summary = String::from("series,strict_cauchy,convergent,geometric_growth,last_ratio,tail_exponent\n");
    for (name, b) in [("hs", table.hs), ("blog", table.blog)] {
        summary.push_str(&format!(
            "{name},{},{},{},{},{}\n",
            b.strict_cauchy,
            b.convergent,
            b.geometric_growth,
            fmt_g(b.last_ratio, 12),
            fmt_g(b.tail_exponent, 12)
        ));
        println!(
            "{name:<5} convergent={:<5} strict_cauchy={:<5} geometric_growth={:<5} ratio={:.6} exponent={:.4}",
            b.convergent, b.strict_cauchy, b.geometric_growth, b.last_ratio, b.tail_exponent
        );
    }
    write(dir, "embedding_summary.csv", &summary)?;
    write_meta(dir, "embedding", cfg)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BuildCommand {
    target: Option<PathBuf>,
    m: usize,
    variant: Variant,
    seed: u64,
    quad_points: usize,
    max_retries: usize,
    error_slack: f64,
}

impl Default for BuildCommand {
    fn default() -> Self {
        BuildCommand {
            target: None,
            m: 64,
            variant: Variant::L2,
            seed: rng::default_seed(),
            quad_points: 4096,
            max_retries: 16,
            error_slack: 1.0,
        }
    }
}

fn cmd_build(cfg: &BuildCommand, dir: &Path) -> Outcome {
    let path = cfg.target.as_ref().ok_or_else(|| Failure::Usage("build needs --target <path>".into()))?;
    let target = SpectralTarget::load(path)?;
    let bc = BuildConfig {
        m: cfg.m,
        variant: cfg.variant,
        seed: cfg.seed,
        max_retries: cfg.max_retries,
        quad: QuadratureSpec::monte_carlo(cfg.quad_points, cfg.seed),
        error_slack: cfg.error_slack,
    };
    let (net, report) = build(&target, &bc)?;
    net.save(dir.join("network.json"))?;
    write(dir, "report.json", &report.to_json_string()?)?;
    write_meta(dir, "build", cfg)?;
    println!(
        "{} m={} error {:.6e} (bound {:.6e}) depth {} (bound {:.1}) width {} retries {} accepted {}",
        report.variant,
        report.m,
        report.error_estimate,
        report.error_bound,
        report.total_depth,
        report.depth_bound,
        report.width,
        report.retries_used,
        report.accepted
    );
    Ok(())
}

fn parse_point(line: &str) -> std::result::Result<Vec<f64>, String> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("bad number '{t}': {e}")))
        .collect()
}

fn cmd_eval(path: &Path) -> Outcome {
    let net = ReluNetwork::load(path)?;
    let stdin = io::stdin();
    let mut out = io::BufWriter::new(io::stdout().lock());
    for (i, line) in stdin.lock().lines().enumerate() {
        let line = line.map_err(Error::from)?;
        if line.trim().is_empty() {
            continue;
        }
        let x = parse_point(&line).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?;
        let y = net.eval(&x).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?;
        let cols: Vec<String> = y.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cols.join(",")).map_err(Error::from)?;
    }
    out.flush().map_err(Error::from)?;
    Ok(())
}
