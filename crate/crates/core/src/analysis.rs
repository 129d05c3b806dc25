//! Post-processing of energy traces: decay-rate fits, the energy
//! equivalence across the spacetime transformation, and extinction
//! detection.

use serde::Serialize;
use thiserror::Error;

use crate::dalembert::EnergyTrace;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("window [{lo}, {hi}] selects no usable samples")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("nonpositive energy {e} at t = {t} in the fit window (extinction branch?)")]
    NonPositiveEnergy { t: f64, e: f64 },
    #[error("nonpositive time {t} in a power-law window")]
    NonPositiveTime { t: f64 },
    #[error("clock maps t = {t} to {tau}, outside the second trace")]
    ClockRange { t: f64, tau: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    Exponential,
    PowerLaw,
}

/// Least-squares decay fit over a window of an energy trace.
#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub model: FitModel,
    /// Exponential rate `ω` in `E ~ C e^{-ωt}`, or the power exponent `p`
    /// in `E ~ C t^{-p}`.
    pub rate: f64,
    /// Smallest `C` with `E(t) <= C·e^{-rate·t}·E(0)` on the window
    /// (exponential model only; relative to `E(0)` of the whole trace).
    pub envelope_c: f64,
    pub window: (f64, f64),
    pub residual_rms: f64,
    pub n_points: usize,
}

fn window_samples(
    trace: &EnergyTrace,
    window: (f64, f64),
    require_positive_time: bool,
) -> Result<Vec<(f64, f64)>, FitError> {
    let (lo, hi) = window;
    let mut out = Vec::new();
    // Log fits exclude samples at the floating-point floor.
    let floor = 1e3 * f64::EPSILON * trace.e0();
    for (t, e) in trace.iter() {
        if t < lo || t > hi {
            continue;
        }
        if e <= 0.0 {
            return Err(FitError::NonPositiveEnergy { t, e });
        }
        if require_positive_time && t <= 0.0 {
            return Err(FitError::NonPositiveTime { t });
        }
        if e < floor {
            continue;
        }
        out.push((t, e));
    }
    if out.len() < 3 {
        return Err(FitError::EmptyWindow { lo, hi });
    }
    Ok(out)
}

fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Fit `ln E = b - ω t` on the window; also the smallest envelope
/// constant for the fitted rate.
pub fn fit_exponential_rate(trace: &EnergyTrace, window: (f64, f64)) -> Result<DecayFit, FitError> {
    let pts = window_samples(trace, window, false)?;
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(t, e)| (t, e.ln())).collect();
    let (slope, _, rms) = least_squares_slope(&logs);
    let rate = -slope;
    let e0 = trace.e0();
    let envelope_c = pts
        .iter()
        .map(|&(t, e)| e / (e0 * (-rate * t).exp()))
        .fold(0.0f64, f64::max);
    Ok(DecayFit {
        model: FitModel::Exponential,
        rate,
        envelope_c,
        window,
        residual_rms: rms,
        n_points: pts.len(),
    })
}

/// Fit `ln E = b - p ln t` on the window.
pub fn fit_power_exponent(trace: &EnergyTrace, window: (f64, f64)) -> Result<DecayFit, FitError> {
    let pts = window_samples(trace, window, true)?;
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(t, e)| (t.ln(), e.ln())).collect();
    let (slope, _, rms) = least_squares_slope(&logs);
    let rate = -slope;
    let e0 = trace.e0();
    let envelope_c = pts
        .iter()
        .map(|&(t, e)| e * t.powf(rate) / e0)
        .fold(0.0f64, f64::max);
    Ok(DecayFit {
        model: FitModel::PowerLaw,
        rate,
        envelope_c,
        window,
        residual_rms: rms,
        n_points: pts.len(),
    })
}

/// Two-sided comparability constants between a moving-domain trace and a
/// transformed static trace: `c1 = min E_u(t)/E_V(clock(t))`, `c2 = max`.
pub fn equivalence_ratio(
    trace_u: &EnergyTrace,
    trace_v: &EnergyTrace,
    clock: impl Fn(f64) -> f64,
) -> Result<(f64, f64), FitError> {
    let mut c1 = f64::INFINITY;
    let mut c2 = f64::NEG_INFINITY;
    let mut used = 0usize;
    for (t, eu) in trace_u.iter() {
        if eu <= 0.0 {
            return Err(FitError::NonPositiveEnergy { t, e: eu });
        }
        let tau = clock(t);
        let ev = trace_v
            .at(tau)
            .ok_or(FitError::ClockRange { t, tau })?;
        if ev <= 0.0 {
            return Err(FitError::NonPositiveEnergy { t: tau, e: ev });
        }
        let ratio = eu / ev;
        c1 = c1.min(ratio);
        c2 = c2.max(ratio);
        used += 1;
    }
    if used == 0 {
        return Err(FitError::EmptyWindow { lo: 0.0, hi: 0.0 });
    }
    Ok((c1, c2))
}

/// First time after which every later sample stays below `threshold`;
/// `None` if the trace never settles below it.
pub fn detect_extinction(trace: &EnergyTrace, threshold: f64) -> Option<f64> {
    let energies = trace.energies();
    let times = trace.times();
    let mut last_above: Option<usize> = None;
    for (i, &e) in energies.iter().enumerate() {
        if e > threshold {
            last_above = Some(i);
        }
    }
    match last_above {
        None => Some(times[0]),
        Some(i) if i + 1 < times.len() => Some(times[i + 1]),
        Some(_) => None,
    }
}

/// Default extinction threshold, `1e-12 · E(0)`.
pub fn default_extinction_threshold(trace: &EnergyTrace) -> f64 {
    1e-12 * trace.e0()
}
