//! Run configuration for the command-line front end.
//!
//! Settings come from three layers, later ones winning: a named preset,
//! a `key = value` config file, and command-line flags. Keys are the long
//! flag names without dashes (`alpha`, `max-iter`, `p-solver`, ...);
//! underscores are accepted in place of hyphens. Lines starting with `#`
//! are comments.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Scheme;
use crate::noise::NoiseSpec;
use crate::splitting::{InitMode, PSolver, SplitParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `α = 1, β = 0.1, τ = 0.01`
    Surface,
    /// `α = 0.2, β = 0.6, τ = 0.05`
    Image,
    /// `α = 5e-5, β = 1e3, τ = 0.01`
    Developable,
}

impl Preset {
    pub fn params(self) -> SplitParams {
        match self {
            Preset::Surface => SplitParams::surface(),
            Preset::Image => SplitParams::image(),
            Preset::Developable => SplitParams::developable(),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "surface" => Ok(Preset::Surface),
            "image" => Ok(Preset::Image),
            "developable" => Ok(Preset::Developable),
            _ => Err(Error::InvalidParameter(format!(
                "unknown preset {s:?} (expected surface, image or developable)"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Surface => "surface",
            Preset::Image => "image",
            Preset::Developable => "developable",
        })
    }
}

/// Everything the `denoise` command needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SplitParams,
    pub preset: Option<Preset>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Clean field for quality metrics.
    pub reference: Option<PathBuf>,
    /// Per-iteration CSV destination.
    pub history: Option<PathBuf>,
    /// Noise to synthesise onto the input before solving.
    pub noise: Option<NoiseSpec>,
    pub metrics: bool,
    pub peak: f64,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SplitParams::default(),
            preset: None,
            input: None,
            output: None,
            reference: None,
            history: None,
            noise: None,
            metrics: true,
            peak: 1.0,
            threads: 1,
        }
    }
}

/// Parses `key = value` lines.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("config line {}: expected key=value", k + 1))
        })?;
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn normalize(key: &str) -> String {
    key.trim()
        .trim_start_matches("--")
        .replace('_', "-")
        .to_ascii_lowercase()
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse {value:?}")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidParameter(format!(
            "{key}: expected a boolean, got {value:?}"
        ))),
    }
}

impl RunConfig {
    /// Layers `preset < pairs` where `pairs` are applied in order. The
    /// preset is the last `preset` key among `pairs`, if any.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let preset = pairs.iter().rev().find(|(k, _)| normalize(k) == "preset");
        if let Some((_, name)) = preset {
            let p: Preset = name.parse()?;
            cfg.preset = Some(p);
            cfg.params = p.params();
        }
        let mut sigma = None;
        let mut seed = 0u64;
        for (key, value) in pairs {
            match normalize(key).as_str() {
                "preset" => {}
                "sigma" => sigma = Some(num::<f64>(key, value)?),
                "seed" => seed = num(key, value)?,
                other => cfg.apply(other, value)?,
            }
        }
        cfg.noise = sigma.map(|s| NoiseSpec::new(s, seed));
        cfg.params.validate()?;
        if cfg.threads == 0 {
            return Err(Error::InvalidParameter("threads must be ≥ 1".into()));
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let p = &mut self.params;
        match key {
            "alpha" => p.alpha = num(key, value)?,
            "beta" => p.beta = num(key, value)?,
            "gamma" => p.gamma = num(key, value)?,
            "tau" => p.tau = num(key, value)?,
            "tol" => p.tol = num(key, value)?,
            "max-iter" => p.max_outer = num(key, value)?,
            "epsilon" => p.epsilon = num(key, value)?,
            "h" => p.h = num(key, value)?,
            "rho" | "newton-step" => p.inner.newton_step = num(key, value)?,
            "rho1" => p.inner.rho1 = num(key, value)?,
            "rho2" => p.inner.rho2 = num(key, value)?,
            "xi1" => p.inner.xi1 = num(key, value)?,
            "xi2" => p.inner.xi2 = num(key, value)?,
            "max-inner" => p.inner.max_inner = num(key, value)?,
            "s-floor" => p.inner.s_floor = num(key, value)?,
            "p-solver" => {
                p.p_solver = match value.to_ascii_lowercase().as_str() {
                    "fixed" | "fixed-point" => PSolver::FixedPoint,
                    "newton" => PSolver::Newton,
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "p-solver: expected fixed or newton, got {value:?}"
                        )))
                    }
                }
            }
            "init" => {
                p.init_mode = match value.to_ascii_lowercase().as_str() {
                    "grad" => InitMode::GradF,
                    "smooth" => InitMode::SmoothGrad,
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "init: expected grad or smooth, got {value:?}"
                        )))
                    }
                }
            }
            "rhs-div" => {
                p.rhs_scheme = match value.to_ascii_lowercase().as_str() {
                    "backward" => Scheme::Backward,
                    "forward" => Scheme::Forward,
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "rhs-div: expected backward or forward, got {value:?}"
                        )))
                    }
                }
            }
            "tv-baseline" => p.skip_gc = flag(key, value)?,
            "input" => self.input = Some(PathBuf::from(value)),
            "output" | "out" => self.output = Some(PathBuf::from(value)),
            "reference" => self.reference = Some(PathBuf::from(value)),
            "history" => self.history = Some(PathBuf::from(value)),
            "metrics" => self.metrics = flag(key, value)?,
            "peak" => self.peak = num(key, value)?,
            "threads" => self.threads = num(key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }
}
