//! Acceptance suite: every criterion below runs at its stated tolerance
//! and prints one pass/fail line (run with `--nocapture` to see them).

use std::panic::AssertUnwindSafe;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use movestab_core::analysis::{
    default_extinction_threshold, detect_extinction, equivalence_ratio, fit_exponential_rate,
    fit_power_exponent,
};
use movestab_core::circlemap::{
    birkhoff_conjugacy, boundary_map, conjugacy_residual, derivative_bounds, example1_conjugacy,
    example1_rho_alternative, example1_rho_formula, rotation_number, BirkhoffOptions, CircleLift,
    ConjugacyMap, RotationOptions,
};
use movestab_core::control::{decay_rate_predictions, extinction_time};
use movestab_core::dalembert::fd::{fd_boundary_damped_run, FdConfig};
use movestab_core::dalembert::{
    moving_boundary_run, scattering_coefficients, static_boundary_run, static_pointwise_run,
    CharacteristicRun, InitialData, PointwiseConfig, RunConfig,
};
use movestab_core::geometry::{
    dalembertian_factor, domain_width_b, example1_lambda_inv_one, phi_forward,
    pointwise_coefficients,
};
use movestab_core::numeric::invert_monotone;
use movestab_core::profiles::MotionProfile;

const ALPHA: f64 = 0.5;
const BETA: f64 = -1.0 / 3.0;

fn criterion(id: &str, label: &str, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    match outcome {
        Ok(()) => println!("{id} {label}: PASS ({elapsed:.2?})"),
        Err(e) => {
            println!("{id} {label}: FAIL ({elapsed:.2?})");
            std::panic::resume_unwind(e);
        }
    }
}

struct Example1Fixture {
    profile: MotionProfile,
    lift: CircleLift,
    rho: f64,
    /// Birkhoff conjugacy, normalized so that `H(-a(0)) = -ρ/2` (pins the
    /// additive constant that the extinction-time formula depends on).
    h: ConjugacyMap,
}

fn fixture() -> &'static Example1Fixture {
    static FIX: OnceLock<Example1Fixture> = OnceLock::new();
    FIX.get_or_init(|| {
        let profile = MotionProfile::example1(ALPHA, BETA).unwrap();
        let lift = boundary_map(&profile).unwrap();
        let est = rotation_number(&lift, &RotationOptions::default()).unwrap();
        let h = birkhoff_conjugacy(&lift, est.rho, &BirkhoffOptions::default()).unwrap();
        let a0 = profile.eval(0.0).0;
        let shift = -0.5 * est.rho - h.eval(-a0).unwrap();
        let h = h.shifted(shift).unwrap();
        Example1Fixture {
            profile,
            lift,
            rho: est.rho,
            h,
        }
    })
}

#[test]
fn ac1_rotation_number() {
    criterion("AC-1", "rotation number", || {
        // (a) exact on rigid rotations, 100 random c, under a second.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let start = Instant::now();
        for _ in 0..100 {
            let c: f64 = rng.gen_range(0.0..1.0);
            let est = rotation_number(&CircleLift::rotation(c), &RotationOptions::default())
                .unwrap();
            assert!(
                (est.rho - c).abs() <= 1e-10,
                "c = {c}: err = {:e}",
                (est.rho - c).abs()
            );
        }
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 1.0, "rigid rotations took {elapsed:?}");

        // (b) synthetic conjugated rotation, ρ* = √2 - 1, N ≤ 1e5.
        let rho_star = 2.0_f64.sqrt() - 1.0;
        let g = |x: f64| x + 0.1 * (2.0 * std::f64::consts::PI * x).sin();
        let f = CircleLift::from_fn(move |x| {
            let y = g(x) + rho_star;
            let k = y.floor();
            invert_monotone(g, y - k, (-0.2, 1.2), 1e-14).unwrap() + k
        })
        .unwrap();
        let est = rotation_number(
            &f,
            &RotationOptions {
                n_max: 100_000,
                tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(est.n_iterations <= 100_000);
        assert!(
            (est.rho - rho_star).abs() <= 1e-8,
            "synthetic err = {:e}",
            (est.rho - rho_star).abs()
        );

        // (c) Example 1: distances to both closed-form candidates.
        let fx = fixture();
        let d_formula = (fx.rho - example1_rho_formula(ALPHA, BETA)).abs();
        let d_alt = (fx.rho - example1_rho_alternative(ALPHA, BETA)).abs();
        println!(
            "  AC-1c: |rho - ln3/ln6| = {d_formula:.3e}, |rho - ln2/ln6| = {d_alt:.3e}"
        );
        if d_formula > 1e-6 {
            println!("  AC-1c: paper-discrepancy note: ln l1/ln(l1/l2) NOT matched");
        }
        if d_alt > 1e-6 {
            println!("  AC-1c: paper-discrepancy note: ln(1/l2)/ln(l1/l2) NOT matched");
        }
        assert!(
            d_formula.min(d_alt) <= 1e-6,
            "estimate {} matches neither candidate",
            fx.rho
        );
    });
}

#[test]
fn ac2_conjugacy() {
    criterion("AC-2", "conjugacy residuals", || {
        let fx = fixture();
        // Birkhoff route, residual gauged on a worst-offset 2048-point
        // grid, under ten seconds. The knot count is the binding term for
        // this map (its conjugacy has derivative jumps), so the sampling
        // grid is one step finer than the gauge.
        let start = Instant::now();
        let h = birkhoff_conjugacy(
            &fx.lift,
            fx.rho,
            &BirkhoffOptions {
                grid: 1 << 12,
                ..Default::default()
            },
        )
        .unwrap();
        let gauge: Vec<f64> = (0..2048).map(|j| (j as f64 + 0.5) / 2048.0).collect();
        let res = conjugacy_residual(&h, &fx.lift, fx.rho, &gauge).unwrap();
        let elapsed = start.elapsed();
        assert!(
            res.sup <= 1e-4,
            "Birkhoff residual {:e} on the 2048 gauge",
            res.sup
        );
        assert!(elapsed.as_secs_f64() < 10.0, "construction took {elapsed:?}");

        // Closed form: exact on the first branch, measured on the second.
        let hc = example1_conjugacy(ALPHA, BETA).unwrap();
        let rho_formula = example1_rho_formula(ALPHA, BETA);
        let x0 = fx.lift.example1_form().unwrap().x0;
        let first: Vec<f64> = (0..=512).map(|i| x0 * i as f64 / 512.0).collect();
        let r1 = conjugacy_residual(&hc, &fx.lift, rho_formula, &first).unwrap();
        assert!(r1.sup <= 1e-12, "first-branch residual {:e}", r1.sup);
        let second: Vec<f64> = (1..512)
            .map(|i| x0 + (1.0 - x0) * i as f64 / 512.0)
            .collect();
        let r2 = conjugacy_residual(&hc, &fx.lift, rho_formula, &second).unwrap();
        println!(
            "  AC-2: closed-form residual on [x0, 1] = {:.4} (paper-discrepancy diagnostic)",
            r2.sup
        );
        assert!(r2.sup > 0.2);
    });
}

#[test]
fn ac3_dalembertian_preservation() {
    criterion("AC-3", "d'Alembertian conformal factor", || {
        // V(ξ,τ) = sin(3ξ) cos(2τ): (∂²τ - ∂²ξ)V = 5V.
        let h = example1_conjugacy(ALPHA, BETA).unwrap();
        let p = MotionProfile::example1(ALPHA, BETA).unwrap();
        let v = |xi: f64, tau: f64| (3.0 * xi).sin() * (2.0 * tau).cos();
        let w = |x: f64, t: f64| {
            let pt = phi_forward(&h, x, t).unwrap();
            v(pt.xi, pt.tau)
        };
        let step = 1e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let t: f64 = rng.gen_range(0.5..3.0);
            let (a, _) = p.eval(t);
            let x: f64 = rng.gen_range(0.02..a - 0.02);
            let pt = phi_forward(&h, x, t).unwrap();
            // Skip near-zeros of the target: a relative comparison needs
            // a nondegenerate reference value.
            if v(pt.xi, pt.tau).abs() < 0.05 {
                continue;
            }
            let lhs_tt = (w(x, t + step) - 2.0 * w(x, t) + w(x, t - step)) / (step * step);
            let lhs_xx = (w(x + step, t) - 2.0 * w(x, t) + w(x - step, t)) / (step * step);
            let k = dalembertian_factor(&h, pt.xi, pt.tau).unwrap();
            let rhs = k * 5.0 * v(pt.xi, pt.tau);
            let rel = ((lhs_tt - lhs_xx) - rhs).abs() / rhs.abs();
            assert!(
                rel <= 1e-3,
                "(x, t) = ({x}, {t}): relative residual {rel:e}"
            );
            checked += 1;
        }
    });
}

#[test]
fn ac4_static_string_decay() {
    criterion("AC-4", "static string decay", || {
        let length = 0.3;
        let data = InitialData::mode(1, length);
        let cfg = RunConfig {
            ds: Some(length / 1024.0),
            dt_out: Some(length / 64.0),
            horizon: 6.0,
        };
        // μ = 0.5: exact round-trip energy factor 1/9.
        let run = static_boundary_run(&data, length, 0.5, &cfg).unwrap();
        for (t, e) in run.trace.iter() {
            if t < 2.0 * length || t + 2.0 * length > cfg.horizon {
                continue;
            }
            let later = run.trace.at(t + 2.0 * length).unwrap();
            let ratio = later / e;
            assert!(
                (ratio - 1.0 / 9.0).abs() <= 1e-6,
                "ratio at τ = {t}: {ratio}"
            );
        }
        // μ = 1: extinct from τ = 2L on.
        let run = static_boundary_run(&data, length, 1.0, &cfg).unwrap();
        let e0 = run.trace.e0();
        for (t, e) in run.trace.iter() {
            if t >= 2.0 * length {
                assert!(e <= 1e-12 * e0, "E({t}) = {e:e} after extinction");
            }
        }
        // μ = 0: conserved over horizon 20.
        let cfg = RunConfig {
            ds: Some(length / 1024.0),
            dt_out: Some(length / 64.0),
            horizon: 20.0,
        };
        let run = static_boundary_run(&data, length, 0.0, &cfg).unwrap();
        for (t, e) in run.trace.iter() {
            assert!((e - e0).abs() <= 1e-8 * e0, "drift at τ = {t}");
        }
    });
}

fn moving_example1(mu: f64, horizon: f64) -> CharacteristicRun {
    let fx = fixture();
    let a0 = fx.profile.eval(0.0).0;
    let data = InitialData::mode(1, a0);
    moving_boundary_run(
        &fx.profile,
        &fx.h,
        mu,
        &data,
        &RunConfig::with_horizon(horizon),
    )
    .unwrap()
}

#[test]
fn ac5_moving_boundary_decay() {
    criterion("AC-5", "moving-boundary exponential decay", || {
        // (a) constant profile degenerate check: rate (1/a0)·ln 2.
        let a0 = 0.5;
        let mu = 1.0 / 3.0;
        let run = static_boundary_run(
            &InitialData::mode(1, a0),
            a0,
            mu,
            &RunConfig::with_horizon(20.0),
        )
        .unwrap();
        let fit = fit_exponential_rate(&run.trace, (2.0, 17.0)).unwrap();
        let expect = 2.0_f64.ln() / a0;
        assert!(
            (fit.rate - expect).abs() <= 0.02 * expect,
            "constant-profile rate {} vs {expect}",
            fit.rate
        );

        // (b) Example 1 with the Birkhoff conjugacy.
        let fx = fixture();
        let run = moving_example1(mu, 50.0);
        let rates = decay_rate_predictions(mu, fx.rho).unwrap();
        let fit = fit_exponential_rate(&run.trace, (5.0, 48.0)).unwrap();
        println!(
            "  AC-5b: fitted = {:.4}, omega_roundtrip = {:.4}, omega_paper = {:.4}",
            fit.rate, rates.omega_roundtrip, rates.omega_paper
        );
        assert!(
            (fit.rate - rates.omega_roundtrip).abs() <= 0.10 * rates.omega_roundtrip,
            "fitted {} vs roundtrip prediction {}",
            fit.rate,
            rates.omega_roundtrip
        );
        // Envelope constant against the paper's unnormalized rate.
        let e0 = run.trace.e0();
        let mut c_paper = 0.0f64;
        for (t, e) in run.trace.iter() {
            if t >= 5.0 && e > 1e3 * f64::EPSILON * e0 {
                c_paper = c_paper.max(e / (e0 * (-rates.omega_paper * t).exp()));
            }
        }
        println!(
            "  AC-5b: E(t) <= C e^(-omega_paper t) E(0) holds on the window with C = {c_paper:.3e}"
        );

        // (c) sandwich constants from the energy equivalence.
        let (l1, l2) = derivative_bounds(&fx.h, (0.0, 1.0), 4096).unwrap();
        let horizon = 20.0;
        let run = moving_example1(mu, horizon);
        let a_end = fx.profile.eval(horizon).0;
        let tau_end = fx.h.eval(horizon + a_end).unwrap() - 0.5 * fx.rho;
        let m = 800;
        let mut taus = Vec::with_capacity(m + 1);
        let mut evs = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let tau = tau_end * i as f64 / m as f64;
            taus.push(tau);
            evs.push(
                run.field
                    .transformed_energy(&fx.h, fx.rho, tau)
                    .unwrap()
                    .max(f64::MIN_POSITIVE),
            );
        }
        let trace_v = movestab_core::dalembert::EnergyTrace::new(
            taus,
            evs,
            movestab_core::dalembert::Clock::Transformed,
            Default::default(),
        )
        .unwrap();
        let h = &fx.h;
        let p = &fx.profile;
        let clock = |t: f64| h.eval(t + p.eval(t).0).unwrap() - 0.5 * fx.rho;
        // Near t = 0 the clock sits within the conjugacy residual of the
        // initial strip edge; start the comparison after the first bounce.
        let trace_u = run.trace.restricted(0.5, horizon).unwrap();
        let (c1, c2) = equivalence_ratio(&trace_u, &trace_v, clock).unwrap();
        let bound = (l2 / l1).powi(2) * 1.05;
        println!("  AC-5c: c2/c1 = {:.3} vs (λ2/λ1)²·1.05 = {:.3}", c2 / c1, bound);
        assert!(c2 / c1 <= bound, "sandwich spread {} > {}", c2 / c1, bound);
    });
}

#[test]
fn ac6_extinction() {
    criterion("AC-6", "finite-time extinction", || {
        // Constant profile: detected extinction at 1.0 ± 2ds and an exact
        // T0 from the closed formula.
        let a0 = 0.5;
        let ds = a0 / 2048.0;
        let cfg = RunConfig {
            ds: Some(ds),
            dt_out: Some(2.0 * ds),
            horizon: 2.0,
        };
        let run = static_boundary_run(&InitialData::mode(1, a0), a0, 1.0, &cfg).unwrap();
        let detected = detect_extinction(&run.trace, default_extinction_threshold(&run.trace))
            .expect("perfect absorber must extinguish");
        assert!(
            (detected - 1.0).abs() <= 2.0 * ds,
            "detected extinction at {detected}"
        );
        let t0 = extinction_time(
            &ConjugacyMap::identity(),
            &MotionProfile::constant(a0).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(t0, 1.0, "T0 formula must be exact here");

        // Example 1 with the Birkhoff conjugacy.
        let fx = fixture();
        let a0 = fx.profile.eval(0.0).0;
        let ds = a0 / 2048.0;
        let cfg = RunConfig {
            ds: Some(ds),
            dt_out: Some(2.0 * ds),
            horizon: 2.0,
        };
        let run = moving_boundary_run(
            &fx.profile,
            &fx.h,
            1.0,
            &InitialData::mode(1, a0),
            &cfg,
        )
        .unwrap();
        let detected = detect_extinction(&run.trace, default_extinction_threshold(&run.trace))
            .expect("perfect absorber must extinguish");
        let t0 = extinction_time(&fx.h, &fx.profile, fx.rho).unwrap();
        let tol = (5.0 * ds).max(10.0 * fx.h.residual.unwrap().sup);
        println!("  AC-6: detected = {detected:.6}, T0 = {t0:.6}, tol = {tol:.2e}");
        assert!(
            (detected - t0).abs() <= tol,
            "detected {detected} vs T0 {t0} (tol {tol})"
        );
    });
}

#[test]
fn ac7_moving_point_geometry() {
    criterion("AC-7", "moving-point geometry consistency", || {
        let hc = example1_conjugacy(ALPHA, BETA).unwrap();
        let p = MotionProfile::example1(ALPHA, BETA).unwrap();
        let (h0, h1, h2) = match hc.kind() {
            movestab_core::circlemap::ConjugacyKind::ClosedFormExample1 { h0, h1, h2 } => {
                (*h0, *h1, *h2)
            }
            _ => unreachable!(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // Λ_t⁻¹(1) against the algebraically derived (t + h1)·tanh(1/h0).
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.05..3.0);
            let w = domain_width_b(&hc, t).unwrap();
            let closed = example1_lambda_inv_one(h0, h1, t);
            assert!(
                (w.lambda_inv_one - closed).abs() <= 1e-8,
                "t = {t}: {} vs {closed}",
                w.lambda_inv_one
            );
        }
        // The printed Remark carries a spurious e^{h2/h0}; surface it.
        println!(
            "  AC-7: printed-form factor e^(h2/h0) = {:.4} (literal Remark value / derived value)",
            (h2 / h0).exp()
        );
        // Pointwise coefficients proportional to the Remark's bracket.
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.25..4.0);
            let (f1, f2) = pointwise_coefficients(&hc, &p, t).unwrap();
            let (a, _) = p.eval(t);
            let cross = f1 * (t + h1) - f2 * a;
            assert!(
                cross.abs() <= 1e-9 * (f1.abs() * (t + h1) + f2.abs() * a),
                "t = {t}: cross = {cross:e}"
            );
        }
    });
}

#[test]
fn ac8_pointwise_damping() {
    criterion("AC-8", "pointwise damping phenomenology", || {
        // (a) rational damper location + node mode: no decay.
        let run = static_pointwise_run(
            &InitialData::mode(2, 1.0),
            0.5,
            &PointwiseConfig {
                cells: 2048,
                horizon: 100.0,
                ..Default::default()
            },
        )
        .unwrap();
        let e0 = run.trace.e0();
        for (t, e) in run.trace.iter() {
            assert!((e - e0).abs() <= 1e-6 * e0, "drift at τ = {t}");
        }

        // (b) golden-ratio damper: power-law band on t ∈ [10, 200].
        // Finite-energy step-velocity data saturate the C/t class; smooth
        // bumps decay faster than any power here and sit above the band.
        let xi0 = (5.0_f64.sqrt() - 1.0) / 2.0;
        let run = static_pointwise_run(
            &InitialData::step_velocity(1.0),
            xi0,
            &PointwiseConfig {
                cells: 2048,
                horizon: 200.0,
                ..Default::default()
            },
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for (_, e) in run.trace.iter() {
            assert!(e <= prev * (1.0 + 1e-12), "energy must not increase");
            prev = e;
        }
        let fit = fit_power_exponent(&run.trace, (10.0, 200.0)).unwrap();
        println!(
            "  AC-8b: xi0 -> {:.6}, fitted power exponent = {:.3}",
            run.xi0_effective, fit.rate
        );
        assert!(
            (0.7..=1.3).contains(&fit.rate),
            "power exponent {} outside [0.7, 1.3]",
            fit.rate
        );

        // (c) scattering amplitudes and energy balance.
        let (r, t) = scattering_coefficients(1.0);
        assert!((r + 1.0 / 3.0).abs() <= 1e-10);
        assert!((t - 2.0 / 3.0).abs() <= 1e-10);
        assert!((r * r + t * t + 4.0 / 9.0 - 1.0).abs() <= 1e-10);
    });
}

/// Smooth profile pulse supported strictly inside (-L, L): the damped
/// solution stays C^∞ through every reflection, making the convergence
/// rate of the oracle well-defined.
fn smooth_pulse(length: f64) -> InitialData {
    let w = 0.45 * length;
    let hb = move |s: f64| {
        let z = s / w;
        if z.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - z * z)).exp()
        } else {
            0.0
        }
    };
    let dhb = move |s: f64| {
        let z = s / w;
        if z.abs() < 1.0 {
            let q = 1.0 - z * z;
            hb(s) * (-2.0 * z / (q * q)) / w
        } else {
            0.0
        }
    };
    InitialData::custom(
        move |x| hb(x) - hb(-x),
        move |x| dhb(x) + dhb(-x),
        move |x| dhb(x) - dhb(-x),
        "smooth_pulse",
    )
}

#[test]
fn ac9_oracle_equivalence() {
    criterion("AC-9", "characteristic vs finite-difference oracle", || {
        let length = 0.3;
        let mu = 0.5;
        let l2_vs_characteristics = |data: &InitialData, cells: usize, stride: usize| -> f64 {
            let chr = static_boundary_run(
                data,
                length,
                mu,
                &RunConfig {
                    ds: Some(length / 8192.0),
                    dt_out: Some(1.0),
                    horizon: 5.5 + length,
                },
            )
            .unwrap();
            let fd = fd_boundary_damped_run(
                data,
                length,
                mu,
                &FdConfig {
                    cells,
                    cfl: 0.8,
                    horizon: 5.0,
                    record_stride: stride,
                },
            )
            .unwrap();
            let dx = length / cells as f64;
            let dt_frame = fd.dt * stride as f64;
            let mut acc = 0.0;
            for (frame, &t) in fd.frames.iter().zip(&fd.times) {
                for (i, &x) in fd.xs.iter().enumerate() {
                    let (u, _, _) = chr.field.eval_state(|_| length, x, t).unwrap();
                    acc += (frame[i] - u).powi(2) * dx * dt_frame;
                }
            }
            acc.sqrt()
        };

        // Sine data: spacetime agreement of the two solvers.
        let sine = InitialData::mode(1, length);
        let sine_coarse = l2_vs_characteristics(&sine, 1024, 8);
        let sine_fine = l2_vs_characteristics(&sine, 2048, 16);
        assert!(sine_coarse <= 2e-2, "L2 at 1024 cells = {sine_coarse:e}");

        // Convergence rate measured where it is well-defined: (sin, 0)
        // violates the damped-end compatibility, so that solution carries
        // a propagating derivative kink which caps the observable rate
        // near one regardless of the scheme. A smooth compatible pulse
        // isolates the scheme order.
        let pulse = smooth_pulse(length);
        let coarse = l2_vs_characteristics(&pulse, 1024, 8);
        let fine = l2_vs_characteristics(&pulse, 2048, 16);
        let rate = (coarse / fine).log2();
        println!(
            "  AC-9: sine L2(1024) = {sine_coarse:.3e} (kink-limited rate {:.2}); smooth-pulse L2 = {coarse:.3e} -> {fine:.3e}, rate = {rate:.2}",
            (sine_coarse / sine_fine).log2()
        );
        assert!(coarse <= 2e-2);
        assert!(rate >= 1.8, "convergence rate {rate}");
    });
}
