//! Leapfrog finite-difference oracle for the static damped string.
//!
//! Second-order interior stencil with a ghost-point treatment of the
//! damped end `u_t + μ u_x = 0`; independent of the characteristic
//! representation, which is the point of keeping it.

use super::{Clock, EnergyTrace, InitialData, SolverError, TraceMeta};

#[derive(Clone, Copy, Debug)]
pub struct FdConfig {
    pub cells: usize,
    /// Courant number `dt/dx`, must lie in `(0, 1]`.
    pub cfl: f64,
    pub horizon: f64,
    /// Keep every `record_stride`-th frame.
    pub record_stride: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            cells: 1024,
            cfl: 0.8,
            horizon: 5.0,
            record_stride: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FdRun {
    pub xs: Vec<f64>,
    pub times: Vec<f64>,
    /// `u` on the spatial grid at the recorded times.
    pub frames: Vec<Vec<f64>>,
    pub trace: EnergyTrace,
    pub dt: f64,
}

/// Leapfrog run of the boundary-damped string on `(0, length)`.
pub fn fd_boundary_damped_run(
    data: &InitialData,
    length: f64,
    mu: f64,
    cfg: &FdConfig,
) -> Result<FdRun, SolverError> {
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(SolverError::Config(format!(
            "CFL = {} outside (0, 1]",
            cfg.cfl
        )));
    }
    if cfg.cells < 8 || cfg.record_stride == 0 {
        return Err(SolverError::Config("cells >= 8 and a positive stride required".into()));
    }
    if mu < 0.0 {
        return Err(SolverError::Config("mu must be nonnegative".into()));
    }
    if data.phi(0.0).abs() > 1e-12 {
        return Err(SolverError::InadmissibleData("phi(0) must vanish"));
    }
    let n = cfg.cells;
    let dx = length / n as f64;
    let dt = cfg.cfl * dx;
    let lam2 = cfg.cfl * cfg.cfl;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * dx).collect();

    let mut u_prev: Vec<f64> = xs.iter().map(|&x| data.phi(x)).collect();
    u_prev[0] = 0.0;

    // Taylor start: u¹ = u⁰ + dt ψ + (dt²/2) u⁰_xx.
    let mut u_curr = u_prev.clone();
    for i in 1..n {
        u_curr[i] = u_prev[i]
            + dt * data.psi(xs[i])
            + 0.5 * lam2 * (u_prev[i - 1] - 2.0 * u_prev[i] + u_prev[i + 1]);
    }
    u_curr[0] = 0.0;
    if mu == 0.0 {
        // u_t(L) = 0: the end value is frozen.
        u_curr[n] = u_prev[n];
    } else {
        // Ghost from the boundary relation at t = 0: u_x(L, 0) = -ψ(L)/μ.
        let ghost = u_prev[n - 1] - 2.0 * dx * (-data.psi(length) / mu);
        u_curr[n] = u_prev[n]
            + dt * data.psi(length)
            + 0.5 * lam2 * (u_prev[n - 1] - 2.0 * u_prev[n] + ghost);
    }

    let steps = (cfg.horizon / dt).ceil() as usize;
    let mut u_next = vec![0.0f64; n + 1];

    let mut times = Vec::new();
    let mut frames = Vec::new();
    let mut e_times = Vec::new();
    let mut e_vals = Vec::new();

    for step in 1..=steps {
        for i in 1..n {
            u_next[i] =
                2.0 * u_curr[i] - u_prev[i] + lam2 * (u_curr[i - 1] - 2.0 * u_curr[i] + u_curr[i + 1]);
        }
        u_next[0] = 0.0;
        if mu == 0.0 {
            u_next[n] = u_curr[n];
        } else {
            let c = cfg.cfl / mu;
            u_next[n] = (2.0 * u_curr[n] - u_prev[n]
                + 2.0 * lam2 * (u_curr[n - 1] - u_curr[n])
                + c * u_prev[n])
                / (1.0 + c);
        }

        if step % cfg.record_stride == 0 || step == steps {
            // u_curr holds u^step here (u_next is u^{step+1}).
            let t_curr = step as f64 * dt;
            // Centered energy at the middle level.
            let mut e = 0.0;
            for i in 0..=n {
                let ut = (u_next[i] - u_prev[i]) / (2.0 * dt);
                let ux = if i == 0 {
                    (u_curr[1] - u_curr[0]) / dx
                } else if i == n {
                    (u_curr[n] - u_curr[n - 1]) / dx
                } else {
                    (u_curr[i + 1] - u_curr[i - 1]) / (2.0 * dx)
                };
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                e += w * 0.5 * (ut * ut + ux * ux) * dx;
            }
            times.push(t_curr);
            frames.push(u_curr.clone());
            e_times.push(t_curr);
            e_vals.push(e);
        }

        std::mem::swap(&mut u_prev, &mut u_curr);
        std::mem::swap(&mut u_curr, &mut u_next);
    }

    let trace = EnergyTrace::new(
        e_times,
        e_vals,
        Clock::Transformed,
        TraceMeta {
            system: "fd_boundary_damped".into(),
            parameter: Some(("mu".into(), mu)),
            profile: None,
        },
    )?;
    Ok(FdRun {
        xs,
        times,
        frames,
        trace,
        dt,
    })
}
