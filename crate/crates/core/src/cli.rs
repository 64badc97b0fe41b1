//! Command-line front end: `synth`, `add-noise`, `denoise`, `metrics`.
//!
//! Exit status is 0 on success, 2 for usage errors and invalid
//! parameters, 3 for I/O, format and dimension problems, 4 when the solver
//! produces non-finite values.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_kv, RunConfig};
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::io::{read_field, write_field};
use crate::metrics::{lp_errors, psnr, ssim, SsimParams};
use crate::noise::{add_gaussian_noise, NoiseSpec};
use crate::splitting::{run_with, SolveResult, SolveState, Status};
use crate::synth::{synth, Geometry, SynthKind};

#[derive(Debug, Parser)]
#[command(
    name = "gcsplit",
    version,
    about = "Gaussian-curvature + TV regularization of 2-D fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an analytic test field.
    Synth(SynthArgs),
    /// Add reproducible Gaussian noise to a field.
    AddNoise(NoiseArgs),
    /// Run the splitting solver.
    Denoise(Box<DenoiseArgs>),
    /// Compare two fields.
    Metrics(MetricsArgs),
}

fn parse_kind(s: &str) -> std::result::Result<SynthKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SynthArgs {
    /// cone, pyramid, plateau, stripes or steps
    #[arg(value_parser = parse_kind)]
    kind: SynthKind,
    #[arg(long, default_value_t = 64)]
    rows: usize,
    #[arg(long, default_value_t = 64)]
    cols: usize,
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    slope: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    edge: Option<f64>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    gap: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct NoiseArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Noise variance.
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct DenoiseArgs {
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// `key = value` settings file, applied after the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// surface, image or developable
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    /// Newton step length.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    rho1: Option<f64>,
    #[arg(long)]
    rho2: Option<f64>,
    #[arg(long)]
    xi1: Option<f64>,
    #[arg(long)]
    xi2: Option<f64>,
    #[arg(long)]
    max_inner: Option<usize>,
    /// fixed or newton
    #[arg(long)]
    p_solver: Option<String>,
    /// grad or smooth
    #[arg(long)]
    init: Option<String>,
    /// backward or forward
    #[arg(long)]
    rhs_div: Option<String>,
    /// Drop the curvature step and solve the TV model only.
    #[arg(long)]
    tv_baseline: bool,
    /// Add noise of this variance to the input first.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Clean field for quality metrics.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Skip quality metrics.
    #[arg(long)]
    no_metrics: bool,
    #[arg(long)]
    peak: Option<f64>,
    /// Per-iteration CSV output.
    #[arg(long)]
    history: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    a: PathBuf,
    /// Reference field.
    b: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    peak: f64,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::AddNoise(a) => cmd_add_noise(&a),
        Command::Denoise(a) => cmd_denoise(&a),
        Command::Metrics(a) => cmd_metrics(&a),
    };
    match outcome {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<String> {
    let d = Geometry::default();
    let geom = Geometry {
        r0: a.r0.unwrap_or(d.r0),
        slope: a.slope.unwrap_or(d.slope),
        height: a.height.unwrap_or(d.height),
        edge: a.edge.unwrap_or(d.edge),
        width: a.width.unwrap_or(d.width),
        gap: a.gap.unwrap_or(d.gap),
        levels: a.levels.unwrap_or(d.levels),
    };
    let f = synth(a.kind, a.rows, a.cols, a.h, &geom)?;
    write_field(&a.out, &f)?;
    Ok(format!(
        "wrote {} {}x{} to {}\n",
        a.kind,
        a.rows,
        a.cols,
        a.out.display()
    ))
}

fn cmd_add_noise(a: &NoiseArgs) -> Result<String> {
    let f = read_field(&a.input, a.h)?;
    let g = add_gaussian_noise(&f, NoiseSpec::new(a.sigma, a.seed))?;
    write_field(&a.out, &g)?;
    let d = g.sub(&f);
    let mean = d.mean();
    let var =
        d.data().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (d.len().max(2) - 1) as f64;
    Ok(format!("sample_std: {:.6e}\n", var.sqrt()))
}

fn cmd_metrics(a: &MetricsArgs) -> Result<String> {
    let u = read_field(&a.a, 1.0)?;
    let r = read_field(&a.b, 1.0)?;
    if u.dims() != r.dims() {
        return Err(Error::DimensionMismatch {
            expected: r.dims(),
            got: u.dims(),
        });
    }
    Ok(quality_report(&u, &r, a.peak, ""))
}

fn quality_report(u: &ScalarField, reference: &ScalarField, peak: f64, prefix: &str) -> String {
    let mut s = String::new();
    if let Ok(p) = psnr(u, reference, peak) {
        let _ = writeln!(s, "{prefix}psnr: {p:.4}");
    }
    let prm = SsimParams {
        peak,
        ..Default::default()
    };
    if let Ok(v) = ssim(u, reference, &prm) {
        let _ = writeln!(s, "{prefix}ssim: {v:.6}");
    }
    if let Ok(e) = lp_errors(u, reference) {
        let _ = writeln!(
            s,
            "{prefix}l1: {:.6e}\n{prefix}l2: {:.6e}\n{prefix}linf: {:.6e}",
            e.l1, e.l2, e.linf
        );
    }
    s
}

fn denoise_pairs(a: &DenoiseArgs) -> Result<Vec<(String, String)>> {
    let mut pairs = match &a.config {
        Some(path) => parse_kv(&fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            pairs.push((k.to_string(), v));
        }
    };
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    push("preset", a.preset.clone());
    push("input", path(&a.input));
    push("output", path(&a.out));
    push("reference", path(&a.reference));
    push("history", path(&a.history));
    push("alpha", a.alpha.map(|x| x.to_string()));
    push("beta", a.beta.map(|x| x.to_string()));
    push("gamma", a.gamma.map(|x| x.to_string()));
    push("tau", a.tau.map(|x| x.to_string()));
    push("epsilon", a.epsilon.map(|x| x.to_string()));
    push("tol", a.tol.map(|x| x.to_string()));
    push("max-iter", a.max_iter.map(|x| x.to_string()));
    push("h", a.h.map(|x| x.to_string()));
    push("rho", a.rho.map(|x| x.to_string()));
    push("rho1", a.rho1.map(|x| x.to_string()));
    push("rho2", a.rho2.map(|x| x.to_string()));
    push("xi1", a.xi1.map(|x| x.to_string()));
    push("xi2", a.xi2.map(|x| x.to_string()));
    push("max-inner", a.max_inner.map(|x| x.to_string()));
    push("p-solver", a.p_solver.clone());
    push("init", a.init.clone());
    push("rhs-div", a.rhs_div.clone());
    push("tv-baseline", a.tv_baseline.then(|| "true".to_string()));
    push("sigma", a.sigma.map(|x| x.to_string()));
    push("seed", a.seed.map(|x| x.to_string()));
    push("metrics", a.no_metrics.then(|| "false".to_string()));
    push("peak", a.peak.map(|x| x.to_string()));
    push("threads", a.threads.map(|x| x.to_string()));
    Ok(pairs)
}

fn required<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::InvalidParameter(format!("missing {what} path")))
}

fn cmd_denoise(a: &DenoiseArgs) -> Result<String> {
    let cfg = RunConfig::from_pairs(&denoise_pairs(a)?)?;
    let input_path = required(&cfg.input, "input")?;
    let output_path = required(&cfg.output, "output")?;
    let h = cfg.params.h;
    let clean = read_field(input_path, h)?;
    let (f, mut reference) = match cfg.noise {
        Some(spec) => (add_gaussian_noise(&clean, spec)?, Some(clean)),
        None => (clean, None),
    };
    if let Some(path) = &cfg.reference {
        let r = read_field(path, h)?;
        if r.dims() != f.dims() {
            return Err(Error::DimensionMismatch {
                expected: f.dims(),
                got: r.dims(),
            });
        }
        reference = Some(r);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let result = pool.install(|| run_with(&f, &cfg.params, |_: &SolveState| {}))?;
    let wall = start.elapsed().as_secs_f64();

    write_field(output_path, &result.u_star)?;
    if let Some(path) = &cfg.history {
        fs::write(path, history_csv(&result))?;
    }

    let mut s = String::new();
    let status = match result.status {
        Status::Converged => "converged",
        Status::MaxIterations => "max-iterations",
    };
    let _ = writeln!(s, "status: {status}");
    let _ = writeln!(s, "iterations: {}", result.iterations());
    let _ = writeln!(s, "wall_time_s: {wall:.3}");
    if let Some(e) = result.state.last_relerr() {
        let _ = writeln!(s, "relative_error: {e:.3e}");
    }
    let _ = writeln!(s, "initial_energy: {:.6e}", result.state.initial_energy);
    if let Some(e) = result.state.energy_history.last() {
        let _ = writeln!(s, "final_energy: {e:.6e}");
    }
    if let (true, Some(r)) = (cfg.metrics, &reference) {
        s.push_str(&quality_report(&f, r, cfg.peak, "input_"));
        s.push_str(&quality_report(&result.u_star, r, cfg.peak, ""));
    }
    Ok(s)
}

/// One line per outer iteration:
/// `n,energy,relative_error,p_inner_iters,H_inner_iters`.
pub fn history_csv(result: &SolveResult) -> String {
    let st = &result.state;
    let mut s = String::from("n,energy,relative_error,p_inner_iters,H_inner_iters\n");
    for (k, ((e, r), (ip, ih))) in st
        .energy_history
        .iter()
        .zip(&st.relerr_history)
        .zip(st.inner_iters_history())
        .enumerate()
    {
        let _ = writeln!(s, "{},{e:e},{r:e},{ip},{ih}", k + 1);
    }
    s
}
