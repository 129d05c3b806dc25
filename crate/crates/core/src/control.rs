//! Feedback synthesis: the stabilizing gain `f(t)`, the induced
//! characteristic reflection coefficient, the extinction time of the
//! perfectly absorbing branch, and decay-rate predictions.

use serde::Serialize;
use thiserror::Error;

use crate::circlemap::{ConjugacyMap, MapError};
use crate::profiles::MotionProfile;

#[derive(Debug, Error)]
pub enum ControlError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("feedback denominator vanishes at t = {t} (mu = {mu})")]
    SingularFeedback { t: f64, mu: f64 },
    #[error("reflection coefficient diverges at t = {t} (H'(t - a(t)) <= 0)")]
    InfiniteReflection { t: f64 },
    #[error("mu must be nonnegative, got {mu}")]
    NegativeMu { mu: f64 },
    #[error("mu = 1 is the extinction branch; no finite decay rate")]
    ExtinctionBranch,
    #[error("rotation number must be positive, got {rho}")]
    NonPositiveRho { rho: f64 },
}

/// Gain of the boundary condition `u_t(a(t), t) + f(t) u_x(a(t), t) = 0`:
///
/// `f(t) = [(μ-1) H'(a+t) + (μ+1) H'(-a+t)] / [(1-μ) H'(a+t) + (μ+1) H'(-a+t)]`.
///
/// `f ≡ 1` when `μ = 1`, and `f ≡ μ` when `H` is the identity.
pub fn feedback_gain(
    h: &ConjugacyMap,
    p: &MotionProfile,
    mu: f64,
    t: f64,
) -> Result<f64, ControlError> {
    if mu < 0.0 {
        return Err(ControlError::NegativeMu { mu });
    }
    let (a, _) = p.eval(t);
    let dp = h.derivative(a + t)?;
    let dm = h.derivative(-a + t)?;
    let num = (mu - 1.0) * dp + (mu + 1.0) * dm;
    let den = (1.0 - mu) * dp + (mu + 1.0) * dm;
    if den.abs() <= 1e-14 * (dp.abs() + dm.abs()) {
        return Err(ControlError::SingularFeedback { t, mu });
    }
    Ok(num / den)
}

/// Gain of the Example 1 family in its published closed form,
/// `f(t) = (2a(t) + 2μt + 2μh1) / (2μa(t) + 2t + 2h1)`.
pub fn example1_feedback_closed_form(p: &MotionProfile, h1: f64, mu: f64, t: f64) -> f64 {
    let (a, _) = p.eval(t);
    (2.0 * a + 2.0 * mu * t + 2.0 * mu * h1) / (2.0 * mu * a + 2.0 * t + 2.0 * h1)
}

/// Factor relating outgoing to incoming characteristic amplitude at the
/// damped end: `r = (1 - f)/(1 + f)`, equal algebraically to
/// `((1-μ)/(1+μ)) · H'(t + a(t))/H'(t - a(t))`.
///
/// The algebraic form is evaluated (it has no `f = -1` blow-up); the two
/// forms are cross-checked in the test suite.
pub fn reflection_coefficient(
    h: &ConjugacyMap,
    p: &MotionProfile,
    mu: f64,
    t: f64,
) -> Result<f64, ControlError> {
    if mu < 0.0 {
        return Err(ControlError::NegativeMu { mu });
    }
    if mu == 1.0 {
        // f ≡ 1 here with no H' reference, so r ≡ 0 on any conjugacy.
        return Ok(0.0);
    }
    let (a, _) = p.eval(t);
    let dp = h.derivative(t + a)?;
    let dm = h.derivative(t - a)?;
    if dm <= 0.0 {
        return Err(ControlError::InfiniteReflection { t });
    }
    Ok((1.0 - mu) / (1.0 + mu) * dp / dm)
}

/// Extinction time of the `μ = 1` branch,
/// `T0 = (I + a)⁻¹ ∘ H⁻¹(3ρ/2)`.
pub fn extinction_time(
    h: &ConjugacyMap,
    p: &MotionProfile,
    rho: f64,
) -> Result<f64, ControlError> {
    let s = h.inverse(1.5 * rho)?;
    Ok(p.i_plus_a().invert(s))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayRates {
    /// `ln|(1+μ)/(1-μ)|`, the rate as printed (no length normalization).
    pub omega_paper: f64,
    /// `(2/ρ)·ln|(1+μ)/(1-μ)|`: the sharp bounce rate of a string of
    /// length `ρ/2` (energy factor `((1-μ)/(1+μ))²` per round trip `ρ`).
    pub omega_roundtrip: f64,
}

/// Both decay-rate predictions; reports always print both.
pub fn decay_rate_predictions(mu: f64, rho: f64) -> Result<DecayRates, ControlError> {
    if mu < 0.0 {
        return Err(ControlError::NegativeMu { mu });
    }
    if mu == 1.0 {
        return Err(ControlError::ExtinctionBranch);
    }
    if rho <= 0.0 {
        return Err(ControlError::NonPositiveRho { rho });
    }
    let omega = ((1.0 + mu) / (1.0 - mu)).abs().ln();
    Ok(DecayRates {
        omega_paper: omega,
        omega_roundtrip: 2.0 * omega / rho,
    })
}

/// Synthesized law summary for run reports.
#[derive(Clone, Debug, Serialize)]
pub struct FeedbackLaw {
    pub mu: f64,
    pub omega_paper: Option<f64>,
    pub omega_roundtrip: Option<f64>,
    /// Finite only on the `μ = 1` branch.
    pub t0: Option<f64>,
}

impl FeedbackLaw {
    pub fn synthesize(
        h: &ConjugacyMap,
        p: &MotionProfile,
        mu: f64,
        rho: f64,
    ) -> Result<Self, ControlError> {
        if mu < 0.0 {
            return Err(ControlError::NegativeMu { mu });
        }
        if mu == 1.0 {
            Ok(Self {
                mu,
                omega_paper: None,
                omega_roundtrip: None,
                t0: Some(extinction_time(h, p, rho)?),
            })
        } else {
            let rates = decay_rate_predictions(mu, rho)?;
            Ok(Self {
                mu,
                omega_paper: Some(rates.omega_paper),
                omega_roundtrip: Some(rates.omega_roundtrip),
                t0: None,
            })
        }
    }
}
