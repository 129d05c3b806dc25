//! Exact characteristics solvers.
//!
//! Everything lives in the single profile density `h'`: the solution is
//! `u(x, t) = h(t + x) - h(t - x)`, the left Dirichlet condition holds
//! identically, and the damped boundary turns into the recursion
//! `h'(t + a(t)) = r(t) · h'(t - a(t))` along the bounce orbit. Energies
//! reduce to `∫ h'² ds` over the light-cone window of `t`.

pub mod fd;
mod pointwise;

pub use pointwise::{scattering_coefficients, static_pointwise_run, PointwiseConfig, PointwiseRun};

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::circlemap::{ConjugacyMap, MapError};
use crate::control::{self, ControlError};
use crate::numeric::fc_tangent_uniform;
use crate::profiles::MotionProfile;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("inadmissible initial data: {0}")]
    InadmissibleData(&'static str),
    #[error("query at s = {s} beyond the field frontier {frontier}")]
    FrontierExceeded { s: f64, frontier: f64 },
    #[error("query (x, t) = ({x}, {t}) outside the domain")]
    OutOfDomain { x: f64, t: f64 },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("energy trace: {0}")]
    Trace(&'static str),
}

/// Initial displacement/velocity pair with the displacement derivative
/// available analytically (the gluing formulas need `φ'`, not `φ`).
#[derive(Clone)]
pub struct InitialData {
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    dphi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "InitialData({})", self.label)
    }
}

impl InitialData {
    pub fn zero() -> Self {
        Self {
            phi: Arc::new(|_| 0.0),
            dphi: Arc::new(|_| 0.0),
            psi: Arc::new(|_| 0.0),
            label: "zero".into(),
        }
    }

    /// `φ(x) = sin(kπx/length)`, `ψ = 0`.
    pub fn mode(k: u32, length: f64) -> Self {
        let w = k as f64 * std::f64::consts::PI / length;
        Self {
            phi: Arc::new(move |x| (w * x).sin()),
            dphi: Arc::new(move |x| w * (w * x).cos()),
            psi: Arc::new(|_| 0.0),
            label: format!("mode(k={k}, L={length})"),
        }
    }

    /// Smooth compactly supported bump centered at `center` with
    /// half-width `width`; vanishes to all orders at the support ends.
    pub fn bump(center: f64, width: f64, amplitude: f64) -> Self {
        let phi = move |x: f64| {
            let z = (x - center) / width;
            if z.abs() < 1.0 {
                amplitude * (1.0 - 1.0 / (1.0 - z * z)).exp()
            } else {
                0.0
            }
        };
        let dphi = move |x: f64| {
            let z = (x - center) / width;
            if z.abs() < 1.0 {
                let q = 1.0 - z * z;
                phi(x) * (-2.0 * z / (q * q)) / width
            } else {
                0.0
            }
        };
        Self {
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            psi: Arc::new(|_| 0.0),
            label: format!("bump(c={center}, w={width}, A={amplitude})"),
        }
    }

    /// Superposition `Σ_k ±k^{-p} sin(kπx/length)` with deterministic
    /// pseudo-random signs. At `p = 2.5` the modal energies decay like
    /// `k^{-3}` (borderline H²), rough enough to saturate power-law
    /// damping bounds that smooth bumps undershoot.
    pub fn rough_modes(p: f64, k_max: usize, length: f64, seed: u64) -> Self {
        let mut state = seed | 1;
        let mut signs = Vec::with_capacity(k_max);
        for _ in 0..k_max {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            signs.push(if state >> 63 == 0 { 1.0 } else { -1.0 });
        }
        let signs2 = signs.clone();
        let w = std::f64::consts::PI / length;
        let phi = move |x: f64| {
            let mut acc = 0.0;
            for (k, s) in signs.iter().enumerate() {
                let k1 = (k + 1) as f64;
                acc += s * k1.powf(-p) * (k1 * w * x).sin();
            }
            acc
        };
        let dphi = move |x: f64| {
            let mut acc = 0.0;
            for (k, s) in signs2.iter().enumerate() {
                let k1 = (k + 1) as f64;
                acc += s * k1.powf(-p) * k1 * w * (k1 * w * x).cos();
            }
            acc
        };
        Self {
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            psi: Arc::new(|_| 0.0),
            label: format!("rough_modes(p={p}, k_max={k_max}, L={length}, seed={seed})"),
        }
    }

    /// `φ = 0`, `ψ ≡ v` (a velocity step over the whole domain).
    pub fn step_velocity(v: f64) -> Self {
        Self {
            phi: Arc::new(|_| 0.0),
            dphi: Arc::new(|_| 0.0),
            psi: Arc::new(move |_| v),
            label: format!("step_velocity({v})"),
        }
    }

    pub fn custom(
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: &str,
    ) -> Self {
        Self {
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            psi: Arc::new(psi),
            label: label.to_string(),
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn dphi(&self, x: f64) -> f64 {
        (self.dphi)(x)
    }

    pub fn psi(&self, x: f64) -> f64 {
        (self.psi)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Which clock an energy trace is recorded against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clock {
    Physical,
    Transformed,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TraceMeta {
    pub system: String,
    pub parameter: Option<(String, f64)>,
    pub profile: Option<String>,
}

/// Time series of energies with strictly increasing times.
#[derive(Clone, Debug)]
pub struct EnergyTrace {
    times: Vec<f64>,
    energies: Vec<f64>,
    pub clock: Clock,
    pub meta: TraceMeta,
}

impl EnergyTrace {
    pub fn new(
        times: Vec<f64>,
        energies: Vec<f64>,
        clock: Clock,
        meta: TraceMeta,
    ) -> Result<Self, SolverError> {
        if times.len() != energies.len() || times.is_empty() {
            return Err(SolverError::Trace("times/energies length mismatch or empty"));
        }
        for i in 1..times.len() {
            if times[i] <= times[i - 1] {
                return Err(SolverError::Trace("times must be strictly increasing"));
            }
        }
        if energies.iter().any(|e| *e < 0.0) {
            return Err(SolverError::Trace("energies must be nonnegative"));
        }
        Ok(Self {
            times,
            energies,
            clock,
            meta,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn e0(&self) -> f64 {
        self.energies[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().cloned().zip(self.energies.iter().cloned())
    }

    /// Samples with times inside `[lo, hi]`.
    pub fn restricted(&self, lo: f64, hi: f64) -> Result<Self, SolverError> {
        let pairs: Vec<(f64, f64)> = self.iter().filter(|(t, _)| *t >= lo && *t <= hi).collect();
        Self::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
            self.clock,
            self.meta.clone(),
        )
    }

    /// Energy at `t` by linear interpolation (times are increasing).
    pub fn at(&self, t: f64) -> Option<f64> {
        let ts = &self.times;
        if t < ts[0] - 1e-12 || t > ts[ts.len() - 1] + 1e-12 {
            return None;
        }
        let i = match ts.partition_point(|v| *v <= t) {
            0 => 0,
            p => (p - 1).min(ts.len() - 2),
        };
        let w = ((t - ts[i]) / (ts[i + 1] - ts[i])).clamp(0.0, 1.0);
        Some(self.energies[i] + w * (self.energies[i + 1] - self.energies[i]))
    }
}

/// Sampled d'Alembert profile density `h'` on a uniform grid over
/// `[-a(0), s_max]`, extended on demand by the boundary recursion.
#[derive(Clone, Debug)]
pub struct CharacteristicField {
    hp: Vec<f64>,
    /// Cached `h'` at cell midpoints; energies use the midpoint rule so
    /// that an isolated nonzero boundary sample (extinction runs) cannot
    /// leak a spurious O(ds) tail into the window quadrature.
    mid: Vec<f64>,
    /// `h` at the grid nodes (trapezoid prefix sums, `h(-a0) = 0`).
    hcum: Vec<f64>,
    s0: f64,
    ds: f64,
    a0: f64,
    /// h' jumps at s = a(0) whenever the data violate the absorbing
    /// compatibility: the node there stores the left limit, this stores
    /// the recursion-side right limit. Interpolation never crosses it.
    seam: Option<(usize, f64)>,
}

impl CharacteristicField {
    /// Sample `h'` on `[-a0, a0]` from the odd-gluing formulas:
    /// `h'(s) = (φ'(s) + ψ(s))/2` for `s > 0` and
    /// `h'(s) = (φ'(-s) - ψ(-s))/2` for `s < 0`.
    pub fn init_field(data: &InitialData, a0: f64, ds: f64) -> Result<Self, SolverError> {
        if !(a0 > 0.0) {
            return Err(SolverError::Config(format!("a0 = {a0} must be positive")));
        }
        if !(ds > 0.0) || 2.0 * a0 / ds < 64.0 {
            return Err(SolverError::Config(format!(
                "ds = {ds} gives fewer than 64 samples across [-a0, a0]"
            )));
        }
        if data.phi(0.0).abs() > 1e-12 {
            return Err(SolverError::InadmissibleData("phi(0) must vanish"));
        }
        let n = (2.0 * a0 / ds).round() as usize;
        let ds = 2.0 * a0 / n as f64;
        let mut hp = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let s = -a0 + i as f64 * ds;
            let v = if s >= 0.0 {
                0.5 * (data.dphi(s) + data.psi(s))
            } else {
                0.5 * (data.dphi(-s) - data.psi(-s))
            };
            hp.push(v);
        }
        let mut hcum = Vec::with_capacity(n + 1);
        hcum.push(0.0);
        for i in 1..=n {
            hcum.push(hcum[i - 1] + 0.5 * ds * (hp[i - 1] + hp[i]));
        }
        let mut field = Self {
            hp,
            mid: Vec::with_capacity(n),
            hcum,
            s0: -a0,
            ds,
            a0,
            seam: None,
        };
        for i in 0..n {
            field
                .mid
                .push(field.hp_at(field.s0 + (i as f64 + 0.5) * ds));
        }
        Ok(field)
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn s_min(&self) -> f64 {
        self.s0
    }

    pub fn frontier(&self) -> f64 {
        self.s0 + (self.hp.len() - 1) as f64 * self.ds
    }

    fn check_inside(&self, s: f64) -> Result<(), SolverError> {
        if s < self.s0 - 1e-9 || s > self.frontier() + 1e-9 {
            return Err(SolverError::FrontierExceeded {
                s,
                frontier: self.frontier(),
            });
        }
        Ok(())
    }

    /// Node value for interpolation in cell `i`: one-sided at the seam.
    #[inline]
    fn node(&self, cell: usize, j: isize) -> f64 {
        let n = self.hp.len() as isize - 1;
        let j = j.clamp(0, n) as usize;
        match self.seam {
            Some((sb, right)) if cell >= sb && j == sb => right,
            // Left-side cells never reach past the seam node: the stencil
            // clamp below keeps j <= sb there.
            _ => self.hp[j],
        }
    }

    /// `h'(s)` by local shape-preserving cubic interpolation, one-sided
    /// across the seam.
    pub fn hp_at(&self, s: f64) -> f64 {
        let n = self.hp.len() - 1;
        let pos = (s - self.s0) / self.ds;
        let i = (pos.floor() as isize).clamp(0, n as isize - 1) as usize;
        let t = (pos - i as f64).clamp(0.0, 1.0);
        // Stencil bounds: never interpolate across the seam node.
        let (j_lo, j_hi) = match self.seam {
            Some((sb, _)) if i + 1 <= sb => (0isize, sb as isize),
            Some((sb, _)) if i >= sb => (sb as isize, n as isize),
            _ => (0isize, n as isize),
        };
        let at = |j: isize| self.node(i, j.clamp(j_lo, j_hi));
        let y0 = at(i as isize);
        let y1 = at(i as isize + 1);
        let delta = y1 - y0;
        let dm = if (i as isize - 1) >= j_lo {
            y0 - at(i as isize - 1)
        } else {
            delta
        };
        let dp = if (i as isize + 2) <= j_hi {
            at(i as isize + 2) - y1
        } else {
            delta
        };
        let d0 = fc_tangent_uniform(dm, delta);
        let d1 = fc_tangent_uniform(delta, dp);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    }

    /// `h(s)` from the cumulative profile (`h(-a0) = 0` normalization).
    pub fn h_at(&self, s: f64) -> f64 {
        let n = self.hp.len() - 1;
        let pos = (s - self.s0) / self.ds;
        let i = (pos.floor() as isize).clamp(0, n as isize - 1) as usize;
        let sl = self.s0 + i as f64 * self.ds;
        let w = s - sl;
        if w.abs() < 1e-300 {
            return self.hcum[i];
        }
        // Simpson over the partial cell.
        let fm = self.hp_at(sl + 0.5 * w);
        let f1 = self.hp_at(s);
        self.hcum[i] + w / 6.0 * (self.hp[i] + 4.0 * fm + f1)
    }

    /// Grow the field to `target_s` through the boundary recursion
    /// `h'(s) = r(t(s)) · h'(s - 2a(t(s)))` with `t(s) = (I + a)⁻¹(s)`.
    pub fn extend(
        &mut self,
        profile: &MotionProfile,
        reflect: &dyn Fn(f64) -> Result<f64, SolverError>,
        target_s: f64,
    ) -> Result<(), SolverError> {
        if self.ds > 2.0 * profile.min_a() {
            return Err(SolverError::Config(format!(
                "ds = {} exceeds 2·min a = {}; the recursion would outrun the known field",
                self.ds,
                2.0 * profile.min_a()
            )));
        }
        let ip = profile.i_plus_a();
        if self.seam.is_none() {
            // Right limit of h' at the seam s = a(0): the recursion value
            // r(0)·h'(-a(0)).
            let idx = self.hp.len() - 1;
            let t0 = ip.invert(self.frontier());
            let right = reflect(t0)? * self.hp[0];
            self.seam = Some((idx, right));
        }
        while self.frontier() < target_s {
            let s_new = self.s0 + self.hp.len() as f64 * self.ds;
            let t = ip.invert(s_new);
            let (a, _) = profile.eval(t);
            let sigma = s_new - 2.0 * a;
            let r = reflect(t)?;
            let v = if r == 0.0 { 0.0 } else { r * self.hp_at(sigma) };
            let last = match self.seam {
                Some((sb, right)) if self.hp.len() - 1 == sb => right,
                _ => *self.hp.last().unwrap(),
            };
            self.hp.push(v);
            let hlast = *self.hcum.last().unwrap();
            self.hcum.push(hlast + 0.5 * self.ds * (last + v));
            self.mid.push(self.hp_at(s_new - 0.5 * self.ds));
            // The previous cell's stencil was one-sided until this push;
            // refresh its cached midpoint now that it is interior.
            let m = self.mid.len();
            if m >= 2 {
                self.mid[m - 2] = self.hp_at(s_new - 1.5 * self.ds);
            }
        }
        Ok(())
    }

    /// `(u, u_t, u_x)` at a spacetime point inside the light cone.
    pub fn eval_state(
        &self,
        a_of_t: impl Fn(f64) -> f64,
        x: f64,
        t: f64,
    ) -> Result<(f64, f64, f64), SolverError> {
        if x < -1e-12 || x > a_of_t(t) + 1e-9 {
            return Err(SolverError::OutOfDomain { x, t });
        }
        self.check_inside(t + x)?;
        self.check_inside(t - x)?;
        let u = self.h_at(t + x) - self.h_at(t - x);
        let ut = self.hp_at(t + x) - self.hp_at(t - x);
        let ux = self.hp_at(t + x) + self.hp_at(t - x);
        Ok((u, ut, ux))
    }

    /// `∫ w(s) h'(s)² ds` over `[lo, hi]` by the midpoint rule on whole
    /// cells plus midpoint-sampled partial end cells.
    fn energy_window_weighted(
        &self,
        lo: f64,
        hi: f64,
        w: &dyn Fn(f64) -> f64,
    ) -> Result<f64, SolverError> {
        self.check_inside(lo)?;
        self.check_inside(hi)?;
        if hi <= lo {
            return Ok(0.0);
        }
        let f = |s: f64| {
            let v = self.hp_at(s);
            w(s) * v * v
        };
        // First and last whole cells inside the window (with a small snap
        // so node-aligned endpoints do not leave degenerate slivers).
        let eps = 1e-9 * self.ds;
        let i_first = ((lo - self.s0 - eps) / self.ds).ceil() as usize;
        let i_end = (((hi - self.s0 + eps) / self.ds).floor() as usize).min(self.mid.len());
        if i_first >= i_end {
            let mid = 0.5 * (lo + hi);
            return Ok((hi - lo) * f(mid));
        }
        let mut sum = 0.0;
        for (i, m) in self.mid[i_first..i_end].iter().enumerate() {
            let s = self.s0 + ((i_first + i) as f64 + 0.5) * self.ds;
            sum += w(s) * m * m * self.ds;
        }
        let s_first = self.s0 + i_first as f64 * self.ds;
        if s_first - lo > eps {
            sum += (s_first - lo) * f(0.5 * (lo + s_first));
        }
        let s_end = self.s0 + i_end as f64 * self.ds;
        if hi - s_end > eps {
            sum += (hi - s_end) * f(0.5 * (s_end + hi));
        }
        Ok(sum)
    }

    /// `E_u(t) = ∫_{t-a(t)}^{t+a(t)} h'(s)² ds`, equal to the energy
    /// display `½∫ (u_t² + u_x²) dx` by the characteristic identity.
    pub fn moving_energy(&self, profile: &MotionProfile, t: f64) -> Result<f64, SolverError> {
        let (a, _) = profile.eval(t);
        self.energy_window_weighted(t - a, t + a, &|_| 1.0)
    }

    /// Energy of the transformed field `V(ξ, τ)` on the static strip:
    /// substituting `σ = H(s)` turns `∫ ĥ'(σ)² dσ` into
    /// `∫ h'(s)²/H'(s) ds` over `[H⁻¹(τ - ρ/2), H⁻¹(τ + ρ/2)]`.
    pub fn transformed_energy(
        &self,
        h: &ConjugacyMap,
        rho: f64,
        tau: f64,
    ) -> Result<f64, SolverError> {
        let lo = h.inverse(tau - 0.5 * rho)?;
        let hi = h.inverse(tau + 0.5 * rho)?;
        let weight = |s: f64| match h.derivative(s) {
            Ok(d) if d > 0.0 => 1.0 / d,
            _ => f64::NAN,
        };
        let e = self.energy_window_weighted(lo, hi, &weight)?;
        if e.is_nan() {
            return Err(SolverError::Map(MapError::Domain {
                x: lo,
                reason: "H' not positive inside the transformed window",
            }));
        }
        Ok(e)
    }
}

/// Grid and output configuration for the characteristic runs.
#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    /// Target grid step; `None` puts 2¹² samples on `[-a0, a0]`.
    pub ds: Option<f64>,
    /// Energy output step; `None` uses 16 grid steps.
    pub dt_out: Option<f64>,
    pub horizon: f64,
}

impl RunConfig {
    pub fn with_horizon(horizon: f64) -> Self {
        Self {
            ds: None,
            dt_out: None,
            horizon,
        }
    }

    fn resolve(&self, a0: f64) -> (f64, f64) {
        let ds = self.ds.unwrap_or(a0 / 2048.0);
        let dt_out = self.dt_out.unwrap_or(16.0 * ds);
        (ds, dt_out)
    }
}

/// A finished characteristic run: the field plus its energy trace.
#[derive(Clone, Debug)]
pub struct CharacteristicRun {
    pub field: CharacteristicField,
    pub trace: EnergyTrace,
    pub profile: MotionProfile,
}

/// Solve the moving-boundary damped system by characteristics.
pub fn moving_boundary_run(
    profile: &MotionProfile,
    h: &ConjugacyMap,
    mu: f64,
    data: &InitialData,
    cfg: &RunConfig,
) -> Result<CharacteristicRun, SolverError> {
    if !profile.is_valid() {
        return Err(SolverError::Config(
            "profile fails its hypotheses (a > 0, L(a) < 1, periodic)".into(),
        ));
    }
    if cfg.horizon <= 0.0 {
        return Err(SolverError::Config("horizon must be positive".into()));
    }
    let a0 = profile.eval(0.0).0;
    let (ds, dt_out) = cfg.resolve(a0);
    let mut field = CharacteristicField::init_field(data, a0, ds)?;
    let reflect = |t: f64| -> Result<f64, SolverError> {
        control::reflection_coefficient(h, profile, mu, t).map_err(SolverError::from)
    };
    field.extend(
        profile,
        &reflect,
        cfg.horizon + profile.max_a() + 2.0 * field.ds(),
    )?;

    let mut times = Vec::new();
    let mut energies = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * dt_out;
        if t > cfg.horizon {
            break;
        }
        times.push(t);
        energies.push(field.moving_energy(profile, t)?.max(0.0));
        k += 1;
    }
    let trace = EnergyTrace::new(
        times,
        energies,
        Clock::Physical,
        TraceMeta {
            system: "moving_boundary".into(),
            parameter: Some(("mu".into(), mu)),
            profile: Some(profile.describe()),
        },
    )?;
    Ok(CharacteristicRun {
        field,
        trace,
        profile: profile.clone(),
    })
}

/// Damped string of fixed length `length`: the constant-profile,
/// identity-conjugacy specialization of the moving solver (`F` shifts by
/// `2·length`, `r = (1-μ)/(1+μ)`), recorded on the transformed clock.
pub fn static_boundary_run(
    data: &InitialData,
    length: f64,
    mu: f64,
    cfg: &RunConfig,
) -> Result<CharacteristicRun, SolverError> {
    let profile = MotionProfile::constant(length)
        .map_err(|e| SolverError::Config(format!("bad length: {e}")))?;
    let h = ConjugacyMap::identity();
    let mut run = moving_boundary_run(&profile, &h, mu, data, cfg)?;
    run.trace.clock = Clock::Transformed;
    run.trace.meta.system = "static_boundary".into();
    Ok(run)
}
