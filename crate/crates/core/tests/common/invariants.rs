//! Randomised invariants, each run through a proptest `TestRunner` with a
//! caller-chosen case count.

use gcsplit::grid::{
    diff, divergence, gradient, jacobian, matrix_divergence, Axis, MatrixField, ScalarField,
    Scheme, VectorField,
};
use gcsplit::local::{
    fixed_point_p, fixed_point_pixel, h_objective, newton_pixel, p_residual, prox_2x2_with_case,
    shrink_p, solve_h, solve_h_pixel, InnerSolverParams, ProxCase,
};
use gcsplit::metrics::{psnr, ssim, SsimParams};
use gcsplit::noise::{add_gaussian_noise, standard_normal, NoiseSpec};
use gcsplit::spectral::{SpectralSymbols, SymbolKind};
use gcsplit::splitting::{relative_change, run_with, SplitParams};
use gcsplit::PSolver;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use super::{random_field, rng};

pub type Check = fn(u32) -> Result<(), String>;

/// Every invariant, by name.
pub const ALL: &[(&str, Check)] = &[
    ("gradient/divergence adjoint", gradient_divergence_adjoint),
    (
        "jacobian/matrix-divergence adjoint",
        jacobian_divergence_adjoint,
    ),
    ("difference shift-equivariance", diff_shift_equivariance),
    ("difference of constant", diff_of_constant),
    ("laplacian Fourier symbol", laplacian_symbol),
    ("spectral solves", spectral_solves),
    ("prox optimality and cases", prox_optimality),
    ("p-step residual", p_step_residual),
    ("shrinkage", shrinkage),
    ("H-step monotone", h_step_monotone),
    ("parallel determinism", parallel_determinism),
    ("metric symmetry", metric_symmetry),
    ("psnr monotone", psnr_monotone),
    ("noise determinism", noise_determinism),
    ("driver invariants", driver_invariants),
];

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new(config)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn field_args() -> impl Strategy<Value = (usize, usize, f64, u64)> {
    (2usize..12, 2usize..12, 0.1f64..3.0, any::<u64>())
}

fn vnorm(q: &VectorField) -> f64 {
    q.dot(q).sqrt()
}

fn mnorm(m: &MatrixField) -> f64 {
    m.dot(m).sqrt()
}

fn random_vector(r: &mut rand::rngs::StdRng, rows: usize, cols: usize, h: f64) -> VectorField {
    VectorField::new(
        random_field(r, rows, cols, h),
        random_field(r, rows, cols, h),
    )
}

fn random_matrix(r: &mut rand::rngs::StdRng, rows: usize, cols: usize, h: f64) -> MatrixField {
    MatrixField::new(
        random_field(r, rows, cols, h),
        random_field(r, rows, cols, h),
        random_field(r, rows, cols, h),
        random_field(r, rows, cols, h),
    )
}

pub fn gradient_divergence_adjoint(cases: u32) -> Result<(), String> {
    run(cases, field_args(), |(m, n, h, seed)| {
        let mut r = rng(seed);
        let u = random_field(&mut r, m, n, h);
        let q = random_vector(&mut r, m, n, h);
        for s in [Scheme::Forward, Scheme::Backward] {
            let g = gradient(&u, s);
            let d = divergence(&q, s.adjoint());
            let lhs = g.dot(&q);
            let rhs = -u.dot(&d);
            let scale = vnorm(&g) * vnorm(&q) + u.norm_l2() * d.norm_l2();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{s:?}: {lhs} vs {rhs}");
        }
        Ok(())
    })
}

pub fn jacobian_divergence_adjoint(cases: u32) -> Result<(), String> {
    run(cases, field_args(), |(m, n, h, seed)| {
        let mut r = rng(seed);
        let q = random_vector(&mut r, m, n, h);
        let hm = random_matrix(&mut r, m, n, h);
        for s in [Scheme::Forward, Scheme::Backward] {
            let j = jacobian(&q, s);
            let d = matrix_divergence(&hm, s.adjoint());
            let lhs = j.dot(&hm);
            let rhs = -q.dot(&d);
            let scale = mnorm(&j) * mnorm(&hm) + vnorm(&q) * vnorm(&d);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{s:?}: {lhs} vs {rhs}");
        }
        Ok(())
    })
}

pub fn diff_shift_equivariance(cases: u32) -> Result<(), String> {
    run(
        cases,
        (field_args(), -20isize..20, -20isize..20),
        |((m, n, h, seed), di, dj)| {
            let v = random_field(&mut rng(seed), m, n, h);
            for axis in [Axis::One, Axis::Two] {
                for s in [Scheme::Forward, Scheme::Backward] {
                    prop_assert_eq!(
                        diff(&v.roll(di, dj), axis, s),
                        diff(&v, axis, s).roll(di, dj)
                    );
                }
            }
            Ok(())
        },
    )
}

pub fn diff_of_constant(cases: u32) -> Result<(), String> {
    run(cases, (field_args(), -1e6f64..1e6), |((m, n, h, _), c)| {
        let v = ScalarField::filled(m, n, h, c);
        for axis in [Axis::One, Axis::Two] {
            for s in [Scheme::Forward, Scheme::Backward] {
                prop_assert!(diff(&v, axis, s).data().iter().all(|&x| x == 0.0));
            }
        }
        Ok(())
    })
}

pub fn laplacian_symbol(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            2usize..16,
            2usize..16,
            0.1f64..3.0,
            0.0f64..1.0,
            0.0f64..1.0,
        ),
        |(m, n, h, fi, fj)| {
            let (ki, kj) = ((fi * m as f64) as usize % m, (fj * n as f64) as usize % n);
            let zi = std::f64::consts::TAU * ki as f64 / m as f64;
            let zj = std::f64::consts::TAU * kj as f64 / n as f64;
            let mode = ScalarField::from_fn(m, n, h, |i, j| (zi * i as f64 + zj * j as f64).cos());
            let lam = 4.0 - 2.0 * zi.cos() - 2.0 * zj.cos();
            let got = divergence(&gradient(&mode, Scheme::Backward), Scheme::Forward).scale(h * h);
            let err = got.add(&mode.scale(lam)).max_abs();
            prop_assert!(err <= 1e-12 * (1.0 + lam), "mode ({ki},{kj}) error {err}");
            Ok(())
        },
    )
}

fn residual_ok(a: &ScalarField, b: &ScalarField, tol: f64) -> Result<(), TestCaseError> {
    let r = a.sub(b).max_abs();
    prop_assert!(r <= tol, "residual {r}");
    Ok(())
}

pub fn spectral_solves(cases: u32) -> Result<(), String> {
    let params = (
        0.2f64..3.0,
        0.001f64..0.2,
        0.05f64..5.0,
        0.01f64..2.0,
        -3.0f64..3.0,
        -3.0f64..3.0,
    );
    run(
        cases,
        (2usize..12, 2usize..12, 0.2f64..2.0, any::<u64>(), params),
        |(m, n, h, seed, prm)| {
            let (gamma, tau, beta, eps, ca, cb) = prm;
            let sym = SpectralSymbols::new(m, n, h, gamma, tau, beta, eps).unwrap();
            let mut r = rng(seed);
            let f = random_field(&mut r, m, n, h);
            let g = random_field(&mut r, m, n, h);
            let (p, q) = (
                random_vector(&mut r, m, n, h),
                random_vector(&mut r, m, n, h),
            );
            let (hp, hq) = (
                random_matrix(&mut r, m, n, h),
                random_matrix(&mut r, m, n, h),
            );
            let lin = |x: &ScalarField, y: &ScalarField| x.scale(ca).add(&y.scale(cb));
            let vlin = |x: &VectorField, y: &VectorField| {
                VectorField::new(lin(&x.c1, &y.c1), lin(&x.c2, &y.c2))
            };
            let mlin = |x: &MatrixField, y: &MatrixField| {
                MatrixField::new(
                    lin(&x.m11, &y.m11),
                    lin(&x.m12, &y.m12),
                    lin(&x.m21, &y.m21),
                    lin(&x.m22, &y.m22),
                )
            };
            let tol = 1e-10 * (1.0 + ca.abs() + cb.abs());

            // imaginary residue
            for kind in [SymbolKind::PStep, SymbolKind::UStep, SymbolKind::Smoother] {
                let s = sym.apply_inverse(&f, kind).unwrap();
                prop_assert!(
                    s.max_imag < 1e-12,
                    "{kind:?} imaginary residue {}",
                    s.max_imag
                );
            }

            // linearity
            for scheme in [Scheme::Forward, Scheme::Backward] {
                let a = sym
                    .solve_p34(&vlin(&p, &q), &mlin(&hp, &hq), scheme)
                    .unwrap();
                let b = vlin(
                    &sym.solve_p34(&p, &hp, scheme).unwrap(),
                    &sym.solve_p34(&q, &hq, scheme).unwrap(),
                );
                residual_ok(&a.c1, &b.c1, tol)?;
                residual_ok(&a.c2, &b.c2, tol)?;
            }
            let a = sym.solve_u(&vlin(&p, &q), &lin(&f, &g)).unwrap();
            residual_ok(
                &a,
                &lin(&sym.solve_u(&p, &f).unwrap(), &sym.solve_u(&q, &g).unwrap()),
                tol,
            )?;
            let a = sym.smooth_init(&lin(&f, &g)).unwrap();
            residual_ok(
                &a,
                &lin(&sym.smooth_init(&f).unwrap(), &sym.smooth_init(&g).unwrap()),
                tol,
            )?;
            let a = sym.reconstruct_v(&vlin(&p, &q), &lin(&f, &g)).unwrap();
            let b = lin(
                &sym.reconstruct_v(&p, &f).unwrap(),
                &sym.reconstruct_v(&q, &g).unwrap(),
            );
            residual_ok(&a, &b, tol * 10.0)?;

            // discrete-equation residuals
            let lap_fb =
                |v: &ScalarField| divergence(&gradient(v, Scheme::Backward), Scheme::Forward);
            let lap_bf =
                |v: &ScalarField| divergence(&gradient(v, Scheme::Forward), Scheme::Backward);
            let scale = 1.0 / (h * h);
            let p34 = sym.solve_p34(&p, &hp, Scheme::Forward).unwrap();
            for k in 1..=2 {
                let lhs = p34.component(k).scale(gamma).sub(&lap_fb(p34.component(k)));
                let rhs = p
                    .component(k)
                    .scale(gamma)
                    .sub(&divergence(&hp.row(k), Scheme::Forward));
                residual_ok(&lhs, &rhs, 1e-8 * scale)?;
            }
            let u = sym.solve_u(&p, &f).unwrap();
            let lhs = u.scale(tau / beta).sub(&lap_bf(&u).scale(gamma));
            let rhs = f
                .scale(tau / beta)
                .sub(&divergence(&p, Scheme::Backward).scale(gamma));
            residual_ok(&lhs, &rhs, 1e-8 * scale)?;
            let u0 = sym.smooth_init(&f).unwrap();
            residual_ok(&u0.sub(&lap_bf(&u0).scale(eps)), &f, 1e-8 * scale)?;
            let v = sym.reconstruct_v(&p, &f).unwrap();
            residual_ok(&lap_bf(&v), &divergence(&p, Scheme::Backward), 1e-8 * scale)?;
            prop_assert!((v.mean() - f.mean()).abs() < 1e-12);
            Ok(())
        },
    )
}

pub fn prox_optimality(cases: u32) -> Result<(), String> {
    let coef = -2.0f64..2.0;
    let draw = (
        coef.clone(),
        coef.clone(),
        coef.clone(),
        coef,
        0.01f64..2.0,
        0u8..20,
    );
    run(cases, draw, |(a1, a2, b1, b2, c, zero)| {
        let (a1, a2) = match zero {
            0 => (0.0, a2),
            1 => (a1, 0.0),
            _ => (a1, a2),
        };
        let obj = |v1: f64, v2: f64| {
            0.5 * ((v1 - b1).powi(2) + (v2 - b2).powi(2)) + c * (a1 * v1 - a2 * v2).abs()
        };
        let ((v1, v2), case) = prox_2x2_with_case(a1, a2, b1, b2, c);
        let radius = (2.0 * (b1.hypot(b2) + c * (a1.abs() + a2.abs()))).max(1e-3);
        let steps = 400;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            let z1 = b1 + radius * (2.0 * i as f64 / steps as f64 - 1.0);
            for j in 0..=steps {
                let z2 = b2 + radius * (2.0 * j as f64 / steps as f64 - 1.0);
                best = best.min(obj(z1, z2));
            }
        }
        let got = obj(v1, v2);
        prop_assert!(
            got <= best + 1e-12 * (1.0 + best),
            "prox objective {got} above grid minimum {best}"
        );
        let line = a1 * v1 - a2 * v2;
        match case {
            ProxCase::Positive => prop_assert!(line > 0.0, "positive case with a·v = {line}"),
            ProxCase::Negative => prop_assert!(line < 0.0, "negative case with a·v = {line}"),
            ProxCase::OnLine => {
                let scale = (a1.abs() + a2.abs()) * (v1.abs() + v2.abs()) + f64::MIN_POSITIVE;
                prop_assert!(
                    line.abs() <= 1e-14 * scale.max(1.0),
                    "on-line case with a·v = {line}"
                )
            }
            ProxCase::FirstZero => prop_assert_eq!(a1, 0.0),
            ProxCase::SecondZero => prop_assert_eq!(a2, 0.0),
        }
        Ok(())
    })
}

pub fn p_step_residual(cases: u32) -> Result<(), String> {
    let draw = (
        -2.0f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
        0.001f64..0.1,
        0.5f64..2.0,
        any::<bool>(),
    );
    let prm = InnerSolverParams::default();
    run(cases, draw, |(b1, b2, d1, tau, gamma, newton)| {
        let out = if newton {
            newton_pixel([b1, b2], d1, gamma, tau, &prm)
        } else {
            fixed_point_pixel([b1, b2], d1, gamma, tau, &prm)
        };
        if out.converged {
            let f = p_residual(out.q, [b1, b2], d1, gamma, tau);
            let r = f[0].abs().max(f[1].abs());
            prop_assert!(r <= 10.0 * prm.xi1 * gamma, "residual {r}");
        }
        Ok(())
    })
}

pub fn shrinkage(cases: u32) -> Result<(), String> {
    run(
        cases,
        (field_args(), 0.0f64..2.0),
        |((m, n, h, seed), kappa)| {
            let p = random_vector(&mut rng(seed), m, n, h);
            let out = shrink_p(&p, kappa);
            for k in 0..p.c1.len() {
                let (x1, x2) = (p.c1.data()[k], p.c2.data()[k]);
                let (y1, y2) = (out.c1.data()[k], out.c2.data()[k]);
                prop_assert!(y1.hypot(y2) <= x1.hypot(x2));
                prop_assert!((y1 * x2 - y2 * x1).abs() <= 1e-15 * (x1 * x1 + x2 * x2));
                prop_assert!(y1 * x1 + y2 * x2 >= 0.0);
            }
            Ok(())
        },
    )
}

pub fn h_step_monotone(cases: u32) -> Result<(), String> {
    let e = -2.0f64..2.0;
    run(
        cases,
        ((e.clone(), e.clone(), e.clone(), e), 0.01f64..2.0),
        |((b11, b12, b21, b22), c)| {
            let b = [b11, b12, b21, b22];
            let mut prev = h_objective(b, b, c);
            for sweeps in 1..=8 {
                let prm = InnerSolverParams {
                    rho2: 1.0,
                    max_inner: sweeps,
                    ..Default::default()
                };
                let (m, ..) = solve_h_pixel(b, c, &prm);
                let now = h_objective(m, b, c);
                prop_assert!(
                    now <= prev + 1e-12 * (1.0 + prev),
                    "sweep {sweeps}: {now} > {prev}"
                );
                prev = now;
            }
            Ok(())
        },
    )
}

pub fn parallel_determinism(cases: u32) -> Result<(), String> {
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    run(
        cases,
        (2usize..10, 2usize..10, any::<u64>()),
        |(m, n, seed)| {
            let mut r = rng(seed);
            let b = random_vector(&mut r, m, n, 1.0);
            let d1 = random_field(&mut r, m, n, 1.0);
            let hm = random_matrix(&mut r, m, n, 1.0);
            let d2 = random_field(&mut r, m, n, 1.0).map(|x| 0.5 + 0.4 * x);
            let prm = InnerSolverParams::default();
            let go = || {
                let (p, _) = fixed_point_p(&b, &d1, 1.0, 0.05, &prm).unwrap();
                let (h, _) = solve_h(&hm, &d2, 0.05, &prm).unwrap();
                (p, h)
            };
            let (p1, h1) = one.install(go);
            let (p2, h2) = many.install(go);
            let bits = |f: &ScalarField| f.data().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&p1.c1), bits(&p2.c1));
            prop_assert_eq!(bits(&p1.c2), bits(&p2.c2));
            for (a, b) in [
                (&h1.m11, &h2.m11),
                (&h1.m12, &h2.m12),
                (&h1.m21, &h2.m21),
                (&h1.m22, &h2.m22),
            ] {
                prop_assert_eq!(bits(a), bits(b));
            }
            Ok(())
        },
    )
}

pub fn metric_symmetry(cases: u32) -> Result<(), String> {
    run(
        cases,
        (11usize..20, 11usize..20, any::<u64>()),
        |(m, n, seed)| {
            let mut r = rng(seed);
            let u = random_field(&mut r, m, n, 1.0).map(|x| 0.5 + 0.5 * x);
            let v = random_field(&mut r, m, n, 1.0).map(|x| 0.5 + 0.5 * x);
            prop_assert_eq!(psnr(&u, &v, 1.0).unwrap(), psnr(&v, &u, 1.0).unwrap());
            let prm = SsimParams::default();
            let (a, b) = (ssim(&u, &v, &prm).unwrap(), ssim(&v, &u, &prm).unwrap());
            prop_assert!((a - b).abs() <= 1e-14, "{a} vs {b}");
            Ok(())
        },
    )
}

pub fn psnr_monotone(cases: u32) -> Result<(), String> {
    run(
        cases,
        (field_args(), 0.01f64..1.0, 1.001f64..3.0),
        |((m, n, h, seed), t1, ratio)| {
            let mut r = rng(seed);
            let reference = random_field(&mut r, m, n, h);
            let d = random_field(&mut r, m, n, h);
            prop_assume!(d.max_abs() > 0.0);
            let near = reference.add(&d.scale(t1));
            let far = reference.add(&d.scale(t1 * ratio));
            prop_assert!(
                psnr(&near, &reference, 1.0).unwrap() > psnr(&far, &reference, 1.0).unwrap()
            );
            Ok(())
        },
    )
}

pub fn noise_determinism(cases: u32) -> Result<(), String> {
    run(
        cases,
        (field_args(), 0.0f64..0.1, 1usize..12),
        |((m, n, h, seed), var, keep)| {
            let f = ScalarField::zeros(m, n, h);
            let spec = NoiseSpec::new(var, seed);
            let a = add_gaussian_noise(&f, spec).unwrap();
            let b = add_gaussian_noise(&f, spec).unwrap();
            let bits = |x: &ScalarField| x.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&a), bits(&b));
            let keep = keep.min(m);
            let full = standard_normal(m, n, seed);
            let head = standard_normal(keep, n, seed);
            prop_assert_eq!(&full[..keep * n], &head[..]);
            Ok(())
        },
    )
}

pub fn driver_invariants(cases: u32) -> Result<(), String> {
    run(
        cases,
        (2usize..9, 2usize..9, any::<u64>(), -2.0f64..2.0, 0u8..4),
        |(m, n, seed, c, variant)| {
            let base = match variant {
                0 => SplitParams::image(),
                1 => SplitParams::surface(),
                2 => SplitParams {
                    p_solver: PSolver::Newton,
                    ..SplitParams::image()
                },
                _ => SplitParams {
                    skip_gc: true,
                    ..SplitParams::surface()
                },
            };
            let prm = SplitParams {
                max_outer: 4,
                ..base
            };

            let constant = ScalarField::filled(m, n, 1.0, c);
            let res = run_with(&constant, &prm, |_| {}).unwrap();
            prop_assert!(res.u_star.sub(&constant).max_abs() <= 1e-10);
            prop_assert!(res.state.p.max_abs() <= 1e-10);

            let f = random_field(&mut rng(seed), m, n, 1.0);
            let mut mismatch = None;
            let res = run_with(&f, &prm, |st| {
                let d: f64 =
                    st.u.data()
                        .iter()
                        .zip(st.u_prev.data())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                let norm: f64 = st.u.data().iter().map(|a| a * a).sum();
                let independent = if d == 0.0 {
                    0.0
                } else {
                    d.sqrt() / norm.sqrt()
                };
                let logged = *st.relerr_history.last().unwrap();
                if (logged - independent).abs() > 1e-14 * (1.0 + independent)
                    || logged != relative_change(&st.u, &st.u_prev)
                {
                    mismatch = Some((st.n, logged, independent));
                }
            })
            .unwrap();
            prop_assert!(
                mismatch.is_none(),
                "relative error log mismatch {mismatch:?}"
            );
            prop_assert!((res.u_star.mean() - f.mean()).abs() <= 1e-10);
            Ok(())
        },
    )
}
