//! Outer Marchuk–Yanenko loop.
//!
//! The unknowns are the gradient-like field `p` and the Hessian-like field
//! `H`. One outer iteration runs four fractional steps:
//!
//! 1. curvature: `p` pixelwise against `det Hⁿ`, then `H` pixelwise against
//!    the weight `(1+|p|²)^{-3/2}`;
//! 2. total variation: vector shrinkage of `p` with threshold `τα/γ`;
//! 3. projection: screened-Poisson solve for `p`, then `H = ∇⁻p`;
//! 4. fidelity: screened-Poisson solve for `u`, then `p = ∇⁺u`.
//!
//! The loop stops on the relative change of the step-4 iterate `u`. The
//! returned `u_star` is the scalar field reconstructed from the final `p`
//! with its mean pinned to the mean of the input.

use crate::error::{ensure, Error, Result};
use crate::grid::{det, gradient, jacobian, MatrixField, ScalarField, Scheme, VectorField};
use crate::local::{fixed_point_p, newton_p, shrink_p, solve_h, InnerReport, InnerSolverParams};
use crate::spectral::SpectralSymbols;

/// Solver for the curvature-weighted `p` update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PSolver {
    #[default]
    FixedPoint,
    Newton,
}

/// How `(p⁰, H⁰)` are derived from the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// `p⁰ = ∇⁺f`, `H⁰ = ∇⁻p⁰`.
    #[default]
    GradF,
    /// Same, applied to `u⁰` solving `u⁰ − ε∇²u⁰ = f`.
    SmoothGrad,
}

/// Model weights and solver controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitParams {
    /// TV weight, `≥ 0`.
    pub alpha: f64,
    /// Fidelity weight (the fidelity term is `(1/2β)|f − u|²`), `> 0`.
    pub beta: f64,
    /// Evolution rate of `p`, `> 0`.
    pub gamma: f64,
    /// Artificial time step, `> 0`.
    pub tau: f64,
    /// Smoothing weight for [`InitMode::SmoothGrad`], `≥ 0`.
    pub epsilon: f64,
    /// Outer stopping threshold on `‖uⁿ⁺¹ − uⁿ‖₂ / ‖uⁿ⁺¹‖₂`.
    pub tol: f64,
    pub max_outer: usize,
    pub inner: InnerSolverParams,
    pub p_solver: PSolver,
    pub init_mode: InitMode,
    /// Divergence applied to `H` rows in the projection step.
    pub rhs_scheme: Scheme,
    /// Skip the curvature step, leaving a TV-L2 model.
    pub skip_gc: bool,
    pub h: f64,
}

impl Default for SplitParams {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            beta: 0.6,
            gamma: 1.0,
            tau: 0.05,
            epsilon: 0.0,
            tol: 1e-5,
            max_outer: 5000,
            inner: InnerSolverParams::default(),
            p_solver: PSolver::FixedPoint,
            init_mode: InitMode::GradF,
            rhs_scheme: Scheme::Forward,
            skip_gc: false,
            h: 1.0,
        }
    }
}

impl SplitParams {
    /// Height-field smoothing: `α = 1`, `β = 0.1`, `τ = 0.01`.
    pub fn surface() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.1,
            tau: 0.01,
            ..Self::default()
        }
    }

    /// Image denoising: `α = 0.2`, `β = 0.6`, `τ = 0.05`.
    pub fn image() -> Self {
        Self {
            alpha: 0.2,
            beta: 0.6,
            tau: 0.05,
            ..Self::default()
        }
    }

    /// Curvature-dominated smoothing of developable surfaces:
    /// `α = 5e-5`, `β = 1e3`, `τ = 0.01`.
    pub fn developable() -> Self {
        Self {
            alpha: 5e-5,
            beta: 1e3,
            tau: 0.01,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        ensure(self.alpha.is_finite() && self.alpha >= 0.0, || {
            format!("alpha must be ≥ 0, got {}", self.alpha)
        })?;
        ensure(pos(self.beta), || {
            format!("beta must be > 0, got {}", self.beta)
        })?;
        ensure(pos(self.gamma), || {
            format!("gamma must be > 0, got {}", self.gamma)
        })?;
        ensure(pos(self.tau), || {
            format!("tau must be > 0, got {}", self.tau)
        })?;
        ensure(self.epsilon.is_finite() && self.epsilon >= 0.0, || {
            format!("epsilon must be ≥ 0, got {}", self.epsilon)
        })?;
        ensure(self.tol > 0.0 && !self.tol.is_nan(), || {
            format!("tol must be > 0, got {}", self.tol)
        })?;
        ensure(self.max_outer > 0, || "max_outer must be positive".into())?;
        ensure(pos(self.h), || format!("h must be > 0, got {}", self.h))?;
        ensure(!self.skip_gc || self.alpha > 0.0, || {
            "the TV baseline needs alpha > 0".into()
        })?;
        self.inner.validate()
    }

    pub fn symbols(&self, rows: usize, cols: usize) -> Result<SpectralSymbols> {
        SpectralSymbols::new(
            rows,
            cols,
            self.h,
            self.gamma,
            self.tau,
            self.beta,
            self.epsilon,
        )
    }
}

/// Inner-solver reports for one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InnerStats {
    pub p: InnerReport,
    pub h: InnerReport,
}

/// Iterate bundle of the outer loop.
#[derive(Debug, Clone)]
pub struct SolveState {
    /// Completed outer iterations.
    pub n: usize,
    pub p: VectorField,
    pub hm: MatrixField,
    /// Most recent step-4 iterate (the input before the first step).
    pub u: ScalarField,
    pub u_prev: ScalarField,
    /// Energy of the input itself, before any step.
    pub initial_energy: f64,
    pub energy_history: Vec<f64>,
    pub relerr_history: Vec<f64>,
    pub inner_history: Vec<InnerStats>,
}

impl SolveState {
    /// `(p-step sweeps, H-step sweeps)` for each outer iteration.
    pub fn inner_iters_history(&self) -> Vec<(usize, usize)> {
        self.inner_history
            .iter()
            .map(|s| (s.p.iterations, s.h.iterations))
            .collect()
    }

    pub fn last_relerr(&self) -> Option<f64> {
        self.relerr_history.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Field reconstructed from the final `p`.
    pub u_star: ScalarField,
    /// Last step-4 iterate.
    pub u_last: ScalarField,
    pub state: SolveState,
    pub status: Status,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.state.n
    }
}

fn check_input(f: &ScalarField, prm: &SplitParams) -> Result<()> {
    prm.validate()?;
    ensure(f.spacing() == prm.h, || {
        format!(
            "input spacing {} differs from configured h = {}",
            f.spacing(),
            prm.h
        )
    })?;
    ensure(f.all_finite(), || {
        "input field contains non-finite values".into()
    })
}

/// Builds `(p⁰, H⁰)` and sets `u⁰ = f`.
pub fn init_state(f: &ScalarField, prm: &SplitParams, sym: &SpectralSymbols) -> Result<SolveState> {
    check_input(f, prm)?;
    let base = match prm.init_mode {
        InitMode::GradF => f.clone(),
        InitMode::SmoothGrad => sym.smooth_init(f)?,
    };
    let p = gradient(&base, Scheme::Forward);
    let hm = jacobian(&p, Scheme::Backward);
    Ok(SolveState {
        n: 0,
        p,
        hm,
        u: f.clone(),
        u_prev: f.clone(),
        initial_energy: discrete_energy(f, f, prm.alpha, prm.beta),
        energy_history: Vec::new(),
        relerr_history: Vec::new(),
        inner_history: Vec::new(),
    })
}

/// `‖u − prev‖₂ / ‖u‖₂`, with `0/0` read as zero.
pub fn relative_change(u: &ScalarField, prev: &ScalarField) -> f64 {
    let num = u.sub(prev).norm_l2();
    let den = u.norm_l2();
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Advances `state` by one outer iteration.
pub fn step(
    state: &mut SolveState,
    f: &ScalarField,
    prm: &SplitParams,
    sym: &SpectralSymbols,
) -> Result<()> {
    let iteration = state.n + 1;
    let finite = |ok: bool, step: &'static str| {
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite { step, iteration })
        }
    };

    // Step 1: curvature.
    let mut stats = InnerStats::default();
    let (p14, h14) = if prm.skip_gc {
        (state.p.clone(), state.hm.clone())
    } else {
        let delta1 = det(&state.hm);
        let (p14, p_report) = match prm.p_solver {
            PSolver::FixedPoint => {
                fixed_point_p(&state.p, &delta1, prm.gamma, prm.tau, &prm.inner)?
            }
            PSolver::Newton => newton_p(&state.p, &delta1, prm.gamma, prm.tau, &prm.inner)?,
        };
        finite(p14.all_finite(), "curvature p-step")?;
        let delta2 = p14
            .c1
            .zip_map(&p14.c2, |a, b| (1.0 + a * a + b * b).powf(-1.5));
        let (h14, h_report) = solve_h(&state.hm, &delta2, prm.tau, &prm.inner)?;
        finite(h14.all_finite(), "curvature H-step")?;
        stats = InnerStats {
            p: p_report,
            h: h_report,
        };
        (p14, h14)
    };

    // Step 2: total variation.
    let p24 = shrink_p(&p14, prm.tau * prm.alpha / prm.gamma);
    finite(p24.all_finite(), "shrinkage step")?;

    // Step 3: projection onto gradients.
    let p34 = sym.solve_p34(&p24, &h14, prm.rhs_scheme)?;
    finite(p34.all_finite(), "projection step")?;
    let h34 = jacobian(&p34, Scheme::Backward);

    // Step 4: fidelity.
    let u = sym.solve_u(&p34, f)?;
    finite(u.all_finite(), "fidelity step")?;
    let energy = discrete_energy(&u, f, prm.alpha, prm.beta);
    finite(energy.is_finite(), "energy evaluation")?;

    state.p = gradient(&u, Scheme::Forward);
    state.hm = h34;
    state.u_prev = std::mem::replace(&mut state.u, u);
    state
        .relerr_history
        .push(relative_change(&state.u, &state.u_prev));
    state.energy_history.push(energy);
    state.inner_history.push(stats);
    state.n = iteration;
    Ok(())
}

/// Runs the outer loop to `tol` or `max_outer` and reconstructs `u*`.
pub fn run(f: &ScalarField, prm: &SplitParams) -> Result<SolveResult> {
    run_with(f, prm, |_| {})
}

/// Like [`run`], calling `observe` after every outer iteration.
pub fn run_with(
    f: &ScalarField,
    prm: &SplitParams,
    mut observe: impl FnMut(&SolveState),
) -> Result<SolveResult> {
    check_input(f, prm)?;
    let sym = prm.symbols(f.rows(), f.cols())?;
    let mut state = init_state(f, prm, &sym)?;
    let mut status = Status::MaxIterations;
    while state.n < prm.max_outer {
        step(&mut state, f, prm, &sym)?;
        observe(&state);
        if state.last_relerr().is_some_and(|e| e <= prm.tol) {
            status = Status::Converged;
            break;
        }
    }
    let u_star = sym.reconstruct_v(&state.p, f)?;
    if !u_star.all_finite() {
        return Err(Error::NonFinite {
            step: "reconstruction",
            iteration: state.n,
        });
    }
    Ok(SolveResult {
        u_star,
        u_last: state.u.clone(),
        state,
        status,
    })
}

/// Discrete objective
/// `h² Σ [ |det D²u| / (1+|∇⁺u|²)^{3/2} + α|∇⁺u| + (f−u)²/(2β) ]`
/// with `D²u = ∇⁻∇⁺u`, the composite operators the scheme itself uses.
pub fn discrete_energy(u: &ScalarField, f: &ScalarField, alpha: f64, beta: f64) -> f64 {
    u.assert_same_shape(f);
    let g = gradient(u, Scheme::Forward);
    let curvature = det(&jacobian(&g, Scheme::Backward));
    let (g1, g2, c) = (g.c1.data(), g.c2.data(), curvature.data());
    let (ud, fd) = (u.data(), f.data());
    let h = u.spacing();
    let mut sum = 0.0;
    for k in 0..ud.len() {
        let sq = g1[k] * g1[k] + g2[k] * g2[k];
        let r = fd[k] - ud[k];
        sum += c[k].abs() / (1.0 + sq).powf(1.5) + alpha * sq.sqrt() + r * r / (2.0 * beta);
    }
    h * h * sum
}
