// Scratch study: rotation-number candidates and Birkhoff residual scaling.

use movestab_core::circlemap::{
    birkhoff_conjugacy, boundary_map, conjugacy_residual, example1_rho_alternative,
    example1_rho_formula, rotation_number, BirkhoffOptions, RotationOptions, Weighting,
};
use movestab_core::profiles::MotionProfile;
use std::time::Instant;

fn main() {
    let p = MotionProfile::example1(0.5, -1.0 / 3.0).unwrap();
    let f = boundary_map(&p).unwrap();

    let t0 = Instant::now();
    let est = rotation_number(
        &f,
        &RotationOptions {
            n_max: 1 << 23,
            ..Default::default()
        },
    )
    .unwrap();
    println!(
        "rho_plain = {:.12}  rho_weighted = {:.12}  bound = {:.3e}  n = {}  ({:.2?})",
        est.rho_plain,
        est.rho_weighted,
        est.error_bound,
        est.n_iterations,
        t0.elapsed()
    );
    let formula = example1_rho_formula(0.5, -1.0 / 3.0);
    let alt = example1_rho_alternative(0.5, -1.0 / 3.0);
    println!(
        "ln3/ln6 = {:.12}  |d| = {:.3e}\nln2/ln6 = {:.12}  |d| = {:.3e}",
        formula,
        (est.rho - formula).abs(),
        alt,
        (est.rho - alt).abs()
    );

    for (n, grid, w) in [
        (1 << 14, 1 << 11, Weighting::Cesaro),
        (1 << 15, 1 << 11, Weighting::Cesaro),
        (1 << 16, 1 << 12, Weighting::Cesaro),
        (1 << 16, 1 << 13, Weighting::Cesaro),
        (1 << 17, 1 << 13, Weighting::Cesaro),
        (1 << 15, 1 << 11, Weighting::Exponential),
        (1 << 16, 1 << 12, Weighting::Exponential),
        (1 << 16, 1 << 13, Weighting::Exponential),
    ] {
        let t0 = Instant::now();
        match birkhoff_conjugacy(
            &f,
            est.rho,
            &BirkhoffOptions {
                n,
                grid,
                weighting: w,
                ..Default::default()
            },
        ) {
            Ok(h) => {
                let t_build = t0.elapsed();
                // Residual specifically on a 2048-point grid (the AC-2 gauge).
                let g2048: Vec<f64> = (0..2048).map(|j| (j as f64 + 0.831) / 2048.0).collect();
                let r = conjugacy_residual(&h, &f, est.rho, &g2048).unwrap();
                println!(
                    "n = 2^{:2}  grid = 2^{:2}  {:?}: stored sup = {:.3e}  2048-grid sup = {:.3e}  lam = ({:.3}, {:.3})  ({:.2?})",
                    n.trailing_zeros(),
                    grid.trailing_zeros(),
                    w,
                    h.residual.unwrap().sup,
                    r.sup,
                    h.lambda1,
                    h.lambda2,
                    t_build
                );
            }
            Err(e) => println!("n = {n} grid = {grid} {w:?}: ERROR {e}"),
        }
    }
}
