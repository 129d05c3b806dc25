// Isolation probes for the FD oracle's convergence order.

use movestab_core::dalembert::fd::{fd_boundary_damped_run, FdConfig};
use movestab_core::dalembert::{static_boundary_run, InitialData, RunConfig};

/// Smooth compactly supported profile pulse: h'(s) = bump((s - c)/w).
/// With support strictly inside (-L, L) the damped solution stays C^∞
/// through every reflection, so only the scheme order is measured.
fn smooth_pulse(length: f64) -> InitialData {
    let c = 0.0;
    let w = 0.45 * length;
    let hb = move |s: f64| {
        let z = (s - c) / w;
        if z.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - z * z)).exp()
        } else {
            0.0
        }
    };
    let dhb = move |s: f64| {
        let z = (s - c) / w;
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
        "smooth pulse",
    )
}

fn main() {
    let length = 0.3f64;
    let mu = 0.5;
    let data = smooth_pulse(length);
    let chr = static_boundary_run(
        &data,
        length,
        mu,
        &RunConfig {
            ds: Some(length / 16384.0),
            dt_out: Some(1.0),
            horizon: 5.5 + length,
        },
    )
    .unwrap();
    let mut prev = None;
    for (cells, stride) in [(512usize, 4usize), (1024, 8), (2048, 16), (4096, 32)] {
        let fd = fd_boundary_damped_run(
            &data,
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
        let dtf = fd.dt * stride as f64;
        let mut acc = 0.0;
        for (frame, &t) in fd.frames.iter().zip(&fd.times) {
            for (i, &x) in fd.xs.iter().enumerate() {
                let (u, _, _) = chr.field.eval_state(|_| length, x, t).unwrap();
                acc += (frame[i] - u).powi(2) * dx * dtf;
            }
        }
        let l2 = acc.sqrt();
        let rate = prev.map(|p: f64| (p / l2).log2());
        println!(
            "smooth pulse cells={cells}: L2 = {l2:.3e}{}",
            rate.map_or(String::new(), |r| format!(", rate = {r:.2}"))
        );
        prev = Some(l2);
    }
}
