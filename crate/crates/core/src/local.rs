//! Pixelwise subproblem solvers.
//!
//! Three kinds of local problems appear in the curvature step and the TV
//! step, and none of them couple neighbouring pixels:
//!
//! * the curvature-weighted `p` update, a 2-D nonlinear equation per pixel
//!   solved by relaxed fixed-point iteration or damped Newton;
//! * the `H` update, minimised by alternating two closed-form proximal
//!   problems of the form `½|w − b|² + c|a1 w1 − a2 w2|` ([`prox_2x2`]);
//! * the TV update, plain vector shrinkage.
//!
//! Pixels iterate independently with their own early exit, which is the
//! same as synchronous sweeps in which converged pixels stop moving. The
//! work is spread over the rayon pool; results do not depend on the
//! number of threads.

use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::grid::{MatrixField, ScalarField, VectorField};

/// Controls for the inner iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolverParams {
    /// Newton step fraction `ρ` in (0, 1].
    pub newton_step: f64,
    /// Fixed-point relaxation `ρ1` in (0, 1].
    pub rho1: f64,
    /// `H` relaxation `ρ2` in (0, 1].
    pub rho2: f64,
    /// Stopping threshold on `‖q^{k+1} − q^k‖∞` for the `p` update.
    pub xi1: f64,
    /// Stopping threshold on the largest entry change for the `H` update.
    pub xi2: f64,
    pub max_inner: usize,
    /// Pixels whose fixed-point denominator `s^k` falls to this value or
    /// below are frozen (the equation has lost coercivity there).
    pub s_floor: f64,
}

impl Default for InnerSolverParams {
    fn default() -> Self {
        Self {
            newton_step: 1.0,
            rho1: 0.8,
            rho2: 0.8,
            xi1: 1e-5,
            xi2: 1e-5,
            max_inner: 200,
            s_floor: 1e-8,
        }
    }
}

impl InnerSolverParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        ensure(unit(self.newton_step), || {
            format!("newton step must lie in (0,1], got {}", self.newton_step)
        })?;
        ensure(unit(self.rho1), || {
            format!("rho1 must lie in (0,1], got {}", self.rho1)
        })?;
        ensure(unit(self.rho2), || {
            format!("rho2 must lie in (0,1], got {}", self.rho2)
        })?;
        ensure(self.xi1 > 0.0 && self.xi1.is_finite(), || {
            format!("xi1 must be positive, got {}", self.xi1)
        })?;
        ensure(self.xi2 > 0.0 && self.xi2.is_finite(), || {
            format!("xi2 must be positive, got {}", self.xi2)
        })?;
        ensure(self.max_inner > 0, || "max_inner must be positive".into())?;
        ensure(self.s_floor > 0.0 && self.s_floor.is_finite(), || {
            format!("s_floor must be positive, got {}", self.s_floor)
        })
    }
}

/// Summary of one field-wide inner solve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InnerReport {
    /// Sweeps performed: the largest per-pixel iteration count.
    pub iterations: usize,
    /// Per-pixel iteration count averaged over the field.
    pub mean_iterations: f64,
    /// Every pixel met its tolerance.
    pub converged: bool,
    /// Largest final iterate change over all pixels.
    pub max_residual: f64,
    /// Pixels that could not be updated (vanishing fixed-point denominator
    /// or singular Newton Jacobian).
    pub frozen_pixels: usize,
}

/// Outcome of a single-pixel iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelOutcome {
    pub q: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
    pub frozen: bool,
    /// `‖q^{k+1} − q^k‖∞` at the last update.
    pub last_step: f64,
}

/// Residual of the curvature-weighted `p` equation at one pixel:
/// `F(q) = γq − 3τ|Δ1| q / (1+|q|²)^{5/2} − γb`.
pub fn p_residual(q: [f64; 2], b: [f64; 2], delta1: f64, gamma: f64, tau: f64) -> [f64; 2] {
    let w = 3.0 * tau * delta1.abs() / (1.0 + q[0] * q[0] + q[1] * q[1]).powf(2.5);
    [
        gamma * q[0] - w * q[0] - gamma * b[0],
        gamma * q[1] - w * q[1] - gamma * b[1],
    ]
}

/// Relaxed fixed-point iteration at one pixel, started from `q⁰ = b`.
pub fn fixed_point_pixel(
    b: [f64; 2],
    delta1: f64,
    gamma: f64,
    tau: f64,
    prm: &InnerSolverParams,
) -> PixelOutcome {
    let weight = 3.0 * tau * delta1.abs();
    let rho = prm.rho1;
    let mut q = b;
    let mut last_step = 0.0;
    for k in 1..=prm.max_inner {
        let s = gamma - weight / (1.0 + q[0] * q[0] + q[1] * q[1]).powf(2.5);
        if s <= prm.s_floor {
            // The state cannot change any more, so the pixel stays put
            // until the cap.
            return PixelOutcome {
                q,
                iterations: prm.max_inner,
                converged: false,
                frozen: true,
                last_step,
            };
        }
        let target = [gamma * b[0] / s, gamma * b[1] / s];
        let next = [
            (1.0 - rho) * q[0] + rho * target[0],
            (1.0 - rho) * q[1] + rho * target[1],
        ];
        last_step = (next[0] - q[0]).abs().max((next[1] - q[1]).abs());
        q = next;
        if last_step <= prm.xi1 {
            return PixelOutcome {
                q,
                iterations: k,
                converged: true,
                frozen: false,
                last_step,
            };
        }
    }
    PixelOutcome {
        q,
        iterations: prm.max_inner,
        converged: false,
        frozen: false,
        last_step,
    }
}

/// Damped Newton iteration at one pixel, started from `q⁰ = b`.
pub fn newton_pixel(
    b: [f64; 2],
    delta1: f64,
    gamma: f64,
    tau: f64,
    prm: &InnerSolverParams,
) -> PixelOutcome {
    let weight = 3.0 * tau * delta1.abs();
    let mut q = b;
    let mut last_step = 0.0;
    for k in 1..=prm.max_inner {
        let r = 1.0 + q[0] * q[0] + q[1] * q[1];
        let f = p_residual(q, b, delta1, gamma, tau);
        let w = weight / r.powf(3.5);
        let j11 = gamma + w * (4.0 * q[0] * q[0] - q[1] * q[1] - 1.0);
        let j12 = w * 5.0 * q[0] * q[1];
        let j22 = gamma + w * (4.0 * q[1] * q[1] - q[0] * q[0] - 1.0);
        let det = j11 * j22 - j12 * j12;
        if !det.is_finite() || det.abs() <= f64::EPSILON * gamma * gamma {
            return PixelOutcome {
                q,
                iterations: prm.max_inner,
                converged: false,
                frozen: true,
                last_step,
            };
        }
        let dx = (j22 * f[0] - j12 * f[1]) / det;
        let dy = (j11 * f[1] - j12 * f[0]) / det;
        let next = [q[0] - prm.newton_step * dx, q[1] - prm.newton_step * dy];
        last_step = (next[0] - q[0]).abs().max((next[1] - q[1]).abs());
        q = next;
        if last_step <= prm.xi1 {
            return PixelOutcome {
                q,
                iterations: k,
                converged: true,
                frozen: false,
                last_step,
            };
        }
    }
    PixelOutcome {
        q,
        iterations: prm.max_inner,
        converged: false,
        frozen: false,
        last_step,
    }
}

fn check_p_args(
    b: &VectorField,
    delta1: &ScalarField,
    gamma: f64,
    tau: f64,
    prm: &InnerSolverParams,
) -> Result<()> {
    prm.validate()?;
    ensure(gamma > 0.0 && gamma.is_finite(), || {
        format!("gamma must be positive, got {gamma}")
    })?;
    ensure(tau > 0.0 && tau.is_finite(), || {
        format!("tau must be positive, got {tau}")
    })?;
    if b.dims() != delta1.dims() {
        return Err(Error::DimensionMismatch {
            expected: b.dims(),
            got: delta1.dims(),
        });
    }
    Ok(())
}

fn p_field(
    b: &VectorField,
    delta1: &ScalarField,
    solve: impl Fn([f64; 2], f64) -> PixelOutcome + Sync,
) -> (VectorField, InnerReport) {
    let (b1, b2, d) = (b.c1.data(), b.c2.data(), delta1.data());
    let outcomes: Vec<PixelOutcome> = (0..d.len())
        .into_par_iter()
        .map(|k| solve([b1[k], b2[k]], d[k]))
        .collect();
    let report = summarize(
        outcomes
            .iter()
            .map(|o| (o.iterations, o.converged, o.frozen, o.last_step)),
    );
    let q1 = outcomes.iter().map(|o| o.q[0]).collect();
    let q2 = outcomes.iter().map(|o| o.q[1]).collect();
    (
        VectorField::new(b.c1.with_data(q1), b.c2.with_data(q2)),
        report,
    )
}

fn summarize(items: impl Iterator<Item = (usize, bool, bool, f64)>) -> InnerReport {
    let mut report = InnerReport {
        converged: true,
        ..Default::default()
    };
    let mut total = 0usize;
    let mut count = 0usize;
    for (iters, converged, frozen, step) in items {
        report.iterations = report.iterations.max(iters);
        report.converged &= converged;
        report.frozen_pixels += frozen as usize;
        report.max_residual = report.max_residual.max(step);
        total += iters;
        count += 1;
    }
    report.mean_iterations = if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    };
    report
}

/// Solves the curvature-weighted `p` equation at every pixel by the relaxed
/// fixed-point iteration `q ← (1−ρ1) q + ρ1 γ b / s(q)`.
pub fn fixed_point_p(
    b: &VectorField,
    delta1: &ScalarField,
    gamma: f64,
    tau: f64,
    prm: &InnerSolverParams,
) -> Result<(VectorField, InnerReport)> {
    check_p_args(b, delta1, gamma, tau, prm)?;
    Ok(p_field(b, delta1, |bb, d| {
        fixed_point_pixel(bb, d, gamma, tau, prm)
    }))
}

/// Same equation as [`fixed_point_p`], solved by damped Newton.
pub fn newton_p(
    b: &VectorField,
    delta1: &ScalarField,
    gamma: f64,
    tau: f64,
    prm: &InnerSolverParams,
) -> Result<(VectorField, InnerReport)> {
    check_p_args(b, delta1, gamma, tau, prm)?;
    Ok(p_field(b, delta1, |bb, d| {
        newton_pixel(bb, d, gamma, tau, prm)
    }))
}

/// Which branch of the closed form produced a [`prox_2x2`] result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxCase {
    /// `a1 = 0`: shrink the second coordinate.
    FirstZero,
    /// `a2 = 0`: shrink the first coordinate.
    SecondZero,
    /// Solution with `a1 v1 − a2 v2 > 0`.
    Positive,
    /// Solution with `a1 v1 − a2 v2 < 0`.
    Negative,
    /// Projection onto the line `a1 v1 = a2 v2`.
    OnLine,
}

#[inline]
fn shrink_scalar(b: f64, t: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        (1.0 - t / b.abs()).max(0.0) * b
    }
}

/// Closed-form minimiser of `½[(w1−b1)² + (w2−b2)²] + c|a1 w1 − a2 w2|`,
/// with the branch taken. Ties at the branch boundaries fall through to
/// [`ProxCase::OnLine`].
pub fn prox_2x2_with_case(a1: f64, a2: f64, b1: f64, b2: f64, c: f64) -> ((f64, f64), ProxCase) {
    if a1 == 0.0 {
        return ((b1, shrink_scalar(b2, c * a2.abs())), ProxCase::FirstZero);
    }
    if a2 == 0.0 {
        return ((shrink_scalar(b1, c * a1.abs()), b2), ProxCase::SecondZero);
    }
    let lin = a1 * b1 - a2 * b2;
    let norm2 = a1 * a1 + a2 * a2;
    if lin - norm2 * c > 0.0 {
        ((b1 - c * a1, b2 + c * a2), ProxCase::Positive)
    } else if lin + norm2 * c < 0.0 {
        ((b1 + c * a1, b2 - c * a2), ProxCase::Negative)
    } else {
        let v1 = (a2 * a2 * b1 + a1 * a2 * b2) / norm2;
        let v2 = (a1 * a2 * b1 + a1 * a1 * b2) / norm2;
        ((v1, v2), ProxCase::OnLine)
    }
}

/// Closed-form minimiser of `½[(w1−b1)² + (w2−b2)²] + c|a1 w1 − a2 w2|`.
pub fn prox_2x2(a1: f64, a2: f64, b1: f64, b2: f64, c: f64) -> Result<(f64, f64)> {
    ensure(c > 0.0, || format!("prox weight must be positive, got {c}"))?;
    ensure([a1, a2, b1, b2, c].iter().all(|x| x.is_finite()), || {
        "prox inputs must be finite".into()
    })?;
    Ok(prox_2x2_with_case(a1, a2, b1, b2, c).0)
}

/// `½|M − B|² + c|det M|` at one pixel, `M` and `B` as `[m11, m12, m21, m22]`.
pub fn h_objective(m: [f64; 4], b: [f64; 4], c: f64) -> f64 {
    let sq: f64 = m.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    0.5 * sq + c * (m[0] * m[3] - m[1] * m[2]).abs()
}

/// Block relaxation for `min ½|M − B|² + c|det M|` at one pixel. Entries are
/// ordered `[m11, m12, m21, m22]`.
pub fn solve_h_pixel(b: [f64; 4], c: f64, prm: &InnerSolverParams) -> ([f64; 4], usize, bool, f64) {
    let rho = prm.rho2;
    let blend = |old: f64, new: f64| (1.0 - rho) * old + rho * new;
    let [b11, b12, b21, b22] = b;
    let mut m = b;
    let mut last = 0.0;
    for k in 1..=prm.max_inner {
        let [m11, m12, m21, m22] = m;
        let ((t11, t12), _) = prox_2x2_with_case(m22, m21, b11, b12, c);
        let n11 = blend(m11, t11);
        let n12 = blend(m12, t12);
        let ((t22, t21), _) = prox_2x2_with_case(n11, n12, b22, b21, c);
        let n22 = blend(m22, t22);
        let n21 = blend(m21, t21);
        last = (n11 - m11)
            .abs()
            .max((n12 - m12).abs())
            .max((n21 - m21).abs())
            .max((n22 - m22).abs());
        m = [n11, n12, n21, n22];
        if last <= prm.xi2 {
            return (m, k, true, last);
        }
    }
    (m, prm.max_inner, false, last)
}

/// Minimises `½|M − B|² + τ Δ2 |det M|` pixelwise by alternating exact
/// minimisation over the rows `(M11, M12)` and `(M22, M21)`, each relaxed
/// with rate `ρ2`.
pub fn solve_h(
    b: &MatrixField,
    delta2: &ScalarField,
    tau: f64,
    prm: &InnerSolverParams,
) -> Result<(MatrixField, InnerReport)> {
    prm.validate()?;
    ensure(tau > 0.0 && tau.is_finite(), || {
        format!("tau must be positive, got {tau}")
    })?;
    if b.dims() != delta2.dims() {
        return Err(Error::DimensionMismatch {
            expected: b.dims(),
            got: delta2.dims(),
        });
    }
    ensure(
        delta2.data().iter().all(|&d| d > 0.0 && d.is_finite()),
        || "curvature weight must be strictly positive".into(),
    )?;
    let (d11, d12, d21, d22) = (b.m11.data(), b.m12.data(), b.m21.data(), b.m22.data());
    let w = delta2.data();
    let out: Vec<([f64; 4], usize, bool, f64)> = (0..w.len())
        .into_par_iter()
        .map(|k| solve_h_pixel([d11[k], d12[k], d21[k], d22[k]], tau * w[k], prm))
        .collect();
    let report = summarize(
        out.iter()
            .map(|&(_, it, conv, step)| (it, conv, false, step)),
    );
    let col = |e: usize| b.m11.with_data(out.iter().map(|o| o.0[e]).collect());
    Ok((MatrixField::new(col(0), col(1), col(2), col(3)), report))
}

/// Vector shrinkage `max{0, 1 − κ/|p|} p`, zero where `p = 0`.
pub fn shrink_p(p: &VectorField, kappa: f64) -> VectorField {
    assert!(
        kappa >= 0.0,
        "shrinkage threshold must be non-negative, got {kappa}"
    );
    let (p1, p2) = (p.c1.data(), p.c2.data());
    let factor: Vec<f64> = p1
        .iter()
        .zip(p2)
        .map(|(&x, &y)| {
            let mag = x.hypot(y);
            if mag == 0.0 {
                0.0
            } else {
                (1.0 - kappa / mag).max(0.0)
            }
        })
        .collect();
    VectorField::new(
        p.c1.with_data(p1.iter().zip(&factor).map(|(x, s)| x * s).collect()),
        p.c2.with_data(p2.iter().zip(&factor).map(|(x, s)| x * s).collect()),
    )
}
