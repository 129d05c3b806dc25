//! Fixed string on `(0, 1)` with Dirichlet ends and an interior pointwise
//! damper `v_τ δ_{ξ0}`.
//!
//! Solved by exact lattice transport of the Riemann invariants
//! `l = v_τ - v_ξ` (right-moving) and `r = v_τ + v_ξ` (left-moving) at
//! unit CFL; the damper contributes the scattering
//! `l⁺ = (2 l⁻ - k r⁺)/(2 + k)`, `r⁻ = (2 r⁺ - k l⁻)/(2 + k)` obtained
//! from continuity of `v` and the jump `[v_ξ] = k v_τ(ξ0)`.

use super::{Clock, EnergyTrace, InitialData, SolverError, TraceMeta};

/// Amplitude reflection and transmission of the interior damper with
/// coefficient `k`: `(-k/(2+k), 2/(2+k))`.
pub fn scattering_coefficients(k: f64) -> (f64, f64) {
    (-k / (2.0 + k), 2.0 / (2.0 + k))
}

#[derive(Clone, Copy, Debug)]
pub struct PointwiseConfig {
    /// Spatial cells on `(0, 1)`; the time step is `1/cells`.
    pub cells: usize,
    pub horizon: f64,
    /// Energy output step; `None` records ~2048 samples.
    pub dt_out: Option<f64>,
    /// Damper coefficient (1 in the transformed system).
    pub damping: f64,
}

impl Default for PointwiseConfig {
    fn default() -> Self {
        Self {
            cells: 2048,
            horizon: 100.0,
            dt_out: None,
            damping: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PointwiseRun {
    pub trace: EnergyTrace,
    pub xi0_requested: f64,
    /// Damper location after snapping to the lattice.
    pub xi0_effective: f64,
}

/// Run the pointwise-damped string with the damper at `xi0` (snapped to
/// the nearest lattice node; snapping onto an endpoint is an error).
pub fn static_pointwise_run(
    data: &InitialData,
    xi0: f64,
    cfg: &PointwiseConfig,
) -> Result<PointwiseRun, SolverError> {
    if !(xi0 > 0.0 && xi0 < 1.0) {
        return Err(SolverError::Config(format!("xi0 = {xi0} must lie in (0, 1)")));
    }
    if cfg.cells < 64 {
        return Err(SolverError::Config("at least 64 cells required".into()));
    }
    if cfg.horizon <= 0.0 {
        return Err(SolverError::Config("horizon must be positive".into()));
    }
    if data.phi(0.0).abs() > 1e-12 || data.phi(1.0).abs() > 1e-12 {
        return Err(SolverError::InadmissibleData(
            "phi must vanish at both Dirichlet ends",
        ));
    }
    let n = cfg.cells;
    let dxi = 1.0 / n as f64;
    let j0 = (xi0 * n as f64).round() as usize;
    if j0 == 0 || j0 == n {
        return Err(SolverError::Config(format!(
            "xi0 = {xi0} snaps to a boundary node at {n} cells; refine the grid"
        )));
    }
    let xi0_effective = j0 as f64 * dxi;
    let k = cfg.damping;
    let (refl, trans) = scattering_coefficients(k);

    let mut l = vec![0.0f64; n + 1];
    let mut r = vec![0.0f64; n + 1];
    for i in 0..=n {
        let x = i as f64 * dxi;
        let d = data.dphi(x);
        let v = data.psi(x);
        l[i] = v - d;
        r[i] = v + d;
    }
    let mut l_new = l.clone();
    let mut r_new = r.clone();

    let energy = |l: &[f64], r: &[f64]| -> f64 {
        // E = ½∫(v_τ² + v_ξ²) = ¼∫(l² + r²), trapezoid in ξ.
        let mut sum = 0.5 * (l[0] * l[0] + r[0] * r[0] + l[n] * l[n] + r[n] * r[n]);
        for i in 1..n {
            sum += l[i] * l[i] + r[i] * r[i];
        }
        0.25 * sum * dxi
    };

    let dt = dxi;
    let steps = (cfg.horizon / dt).ceil() as usize;
    let dt_out = cfg.dt_out.unwrap_or(cfg.horizon / 2048.0);
    let stride = ((dt_out / dt).round() as usize).max(1);

    let mut times = vec![0.0];
    let mut energies = vec![energy(&l, &r)];
    for step in 1..=steps {
        for i in 1..=n {
            l_new[i] = l[i - 1];
        }
        for i in 0..n {
            r_new[i] = r[i + 1];
        }
        // Interior damper: the node value holds the outgoing invariants.
        l_new[j0] = trans * l[j0 - 1] + refl * r[j0 + 1];
        r_new[j0] = trans * r[j0 + 1] + refl * l[j0 - 1];
        // Dirichlet ends: v_τ = 0.
        l_new[0] = -r_new[0];
        r_new[n] = -l_new[n];
        std::mem::swap(&mut l, &mut l_new);
        std::mem::swap(&mut r, &mut r_new);
        if step % stride == 0 {
            times.push(step as f64 * dt);
            energies.push(energy(&l, &r));
        }
    }

    let trace = EnergyTrace::new(
        times,
        energies,
        Clock::Transformed,
        TraceMeta {
            system: "static_pointwise".into(),
            parameter: Some(("xi0".into(), xi0_effective)),
            profile: None,
        },
    )?;
    Ok(PointwiseRun {
        trace,
        xi0_requested: xi0,
        xi0_effective,
    })
}
