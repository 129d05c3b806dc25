// Scratch study for the marginal acceptance knobs: AC-2 gauge, AC-8b
// data roughness, AC-9 compatibility and convergence rate.

use movestab_core::analysis::fit_power_exponent;
use movestab_core::circlemap::{
    birkhoff_conjugacy, boundary_map, conjugacy_residual, rotation_number, BirkhoffOptions,
    RotationOptions,
};
use movestab_core::dalembert::fd::{fd_boundary_damped_run, FdConfig};
use movestab_core::dalembert::{
    static_boundary_run, static_pointwise_run, InitialData, PointwiseConfig, RunConfig,
};
use movestab_core::profiles::MotionProfile;
use std::time::Instant;

fn main() {
    // AC-2: worst-offset 2048 gauge for several construction grids.
    let p = MotionProfile::example1(0.5, -1.0 / 3.0).unwrap();
    let f = boundary_map(&p).unwrap();
    let est = rotation_number(&f, &RotationOptions::default()).unwrap();
    for grid in [1 << 11, 1 << 12] {
        for n in [1 << 14, 1 << 15] {
            let t0 = Instant::now();
            let h = birkhoff_conjugacy(
                &f,
                est.rho,
                &BirkhoffOptions {
                    n,
                    grid,
                    ..Default::default()
                },
            )
            .unwrap();
            let gauge: Vec<f64> = (0..2048).map(|j| (j as f64 + 0.5) / 2048.0).collect();
            let r = conjugacy_residual(&h, &f, est.rho, &gauge).unwrap();
            println!(
                "AC2 n=2^{} grid=2^{}: gauge sup = {:.3e}, declared = {:.3e} ({:.2?})",
                n.trailing_zeros(),
                grid.trailing_zeros(),
                r.sup,
                h.residual.unwrap().sup,
                t0.elapsed()
            );
        }
    }

    // AC-8b: exponent by data roughness.
    let xi0 = (5.0f64.sqrt() - 1.0) / 2.0;
    for (label, data) in [
        ("bump", InitialData::bump(0.3, 0.25, 1.0)),
        ("rough p=2.5", InitialData::rough_modes(2.5, 256, 1.0, 9)),
        ("rough p=3.0", InitialData::rough_modes(3.0, 256, 1.0, 9)),
        ("step", InitialData::step_velocity(1.0)),
    ] {
        let t0 = Instant::now();
        let run = static_pointwise_run(
            &data,
            xi0,
            &PointwiseConfig {
                cells: 2048,
                horizon: 200.0,
                ..Default::default()
            },
        )
        .unwrap();
        let fit = fit_power_exponent(&run.trace, (10.0, 200.0)).unwrap();
        println!(
            "AC8b {label}: exponent = {:.3}, E(200)/E(0) = {:.2e} ({:.2?})",
            fit.rate,
            run.trace.energies().last().unwrap() / run.trace.e0(),
            t0.elapsed()
        );
    }

    // AC-9: rate with incompatible vs compatible data, cfl 0.8 and 1.0.
    let length = 0.3;
    let mu = 0.5;
    let incompatible = InitialData::mode(1, length);
    let compatible = {
        let w = std::f64::consts::PI / length;
        let c = mu * w; // ψ(L) = -μ φ'(L) = μ π/L at x = L
        InitialData::custom(
            move |x| (w * x).sin(),
            move |x| w * (w * x).cos(),
            move |x| c * (x / length) * (x / length),
            "compat sine",
        )
    };
    for (label, data) in [("incompat", &incompatible), ("compat", &compatible)] {
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
        for cfl in [0.8, 1.0] {
            let mut l2s = Vec::new();
            for (cells, stride) in [(1024usize, 8usize), (2048, 16)] {
                let fd = fd_boundary_damped_run(
                    data,
                    length,
                    mu,
                    &FdConfig {
                        cells,
                        cfl,
                        horizon: 5.0,
                        record_stride: stride,
                    },
                )
                .unwrap();
                let dx = length / cells as f64;
                let dtf = fd.dt * stride as f64;
                let mut acc = 0.0;
                for (frame, &t) in fd.frames.iter().zip(&fd.times) {
                    for (i, &x) in fd.xs.iter().enumerate() {
                        let (u, _, _) = chr.field.eval_state(|_| length, x, t).unwrap();
                        acc += (frame[i] - u).powi(2) * dx * dtf;
                    }
                }
                l2s.push(acc.sqrt());
            }
            println!(
                "AC9 {label} cfl={cfl}: L2 = {:.3e} -> {:.3e}, rate = {:.2}",
                l2s[0],
                l2s[1],
                (l2s[0] / l2s[1]).log2()
            );
        }
    }
}

// Appended isolation probes (run as second pass).
#[allow(dead_code)]
fn isolation() {}
