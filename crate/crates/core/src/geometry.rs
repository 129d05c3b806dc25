//! The spacetime transformation `Φ : (x, t) ↦ (ξ, τ)` built from a
//! conjugacy `H`, its inverse, the d'Alembertian conformal factor `K`,
//! and the moving-point geometry (`Λ_t`, `b(t)`, pointwise damping
//! coefficients).

use crate::circlemap::{ConjugacyKind, ConjugacyMap, MapError};
use crate::numeric::invert_monotone_expanding;
use crate::profiles::MotionProfile;

/// Image of a spacetime point under `Φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformedPoint {
    pub xi: f64,
    pub tau: f64,
}

/// `ξ = (H(x + t) - H(-x + t))/2`, `τ = (H(x + t) + H(-x + t))/2`.
///
/// `ξ(0, t) = 0` holds identically since both arguments coincide.
pub fn phi_forward(h: &ConjugacyMap, x: f64, t: f64) -> Result<TransformedPoint, MapError> {
    let plus = h.eval(x + t)?;
    let minus = h.eval(-x + t)?;
    Ok(TransformedPoint {
        xi: 0.5 * (plus - minus),
        tau: 0.5 * (plus + minus),
    })
}

/// `x = (H⁻¹(τ + ξ) - H⁻¹(τ - ξ))/2`, `t = (H⁻¹(τ + ξ) + H⁻¹(τ - ξ))/2`.
pub fn phi_inverse(h: &ConjugacyMap, xi: f64, tau: f64) -> Result<(f64, f64), MapError> {
    let plus = h.inverse(tau + xi)?;
    let minus = h.inverse(tau - xi)?;
    Ok((0.5 * (plus - minus), 0.5 * (plus + minus)))
}

/// Conformal factor of the d'Alembertian under `Φ`:
/// `K(ξ, τ) = H'(H⁻¹(τ + ξ)) · H'(H⁻¹(τ - ξ))`.
///
/// Pulled back this is `K ∘ Φ(x, t) = H'(x + t) H'(t - x) = ξ_x² - ξ_t²`,
/// the unique candidate consistent with the chain rule; validated against
/// finite differences in the acceptance suite.
pub fn dalembertian_factor(h: &ConjugacyMap, xi: f64, tau: f64) -> Result<f64, MapError> {
    let plus = h.inverse(tau + xi)?;
    let minus = h.inverse(tau - xi)?;
    Ok(h.derivative(plus)? * h.derivative(minus)?)
}

/// `Λ_t(y) = (H(y + t) - H(-y + t))/2`.
pub fn lambda_t(h: &ConjugacyMap, t: f64, y: f64) -> Result<f64, MapError> {
    Ok(0.5 * (h.eval(y + t)? - h.eval(-y + t)?))
}

/// Both readings of the moving-point domain width.
#[derive(Clone, Copy, Debug)]
pub struct DomainWidth {
    /// `Λ_t⁻¹(1) - t`, the literal formula (non-periodic, eventually
    /// negative; surfaced as printed).
    pub b_literal: f64,
    /// `Λ_t⁻¹(1)` itself, the reading under which the transformed strip
    /// is `0 < ξ < 1` for all time.
    pub lambda_inv_one: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct DomainWidthOptions {
    /// Cap on the bracket expansion in `y` (a constructed failure knob;
    /// the default never binds for increasing conjugacies).
    pub y_max: f64,
    pub tol: f64,
}

impl Default for DomainWidthOptions {
    fn default() -> Self {
        Self {
            y_max: 1e9,
            tol: 1e-12,
        }
    }
}

/// Solve `Λ_t(y*) = 1` by monotone inversion and report both `y* - t`
/// (the literal formula) and `y*`.
pub fn domain_width_b(h: &ConjugacyMap, t: f64) -> Result<DomainWidth, MapError> {
    domain_width_b_with(h, t, &DomainWidthOptions::default())
}

pub fn domain_width_b_with(
    h: &ConjugacyMap,
    t: f64,
    opts: &DomainWidthOptions,
) -> Result<DomainWidth, MapError> {
    // For the closed form, Λ_t's domain ends at the pole y = t + h1.
    let hi_cap = match h.kind() {
        ConjugacyKind::ClosedFormExample1 { h1, .. } => Some((t + h1).min(opts.y_max)),
        _ => Some(opts.y_max),
    };
    let f = |y: f64| match lambda_t(h, t, y) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    };
    let y_star = invert_monotone_expanding(f, 1.0, (0.0, 0.5), hi_cap, opts.tol)?;
    Ok(DomainWidth {
        b_literal: y_star - t,
        lambda_inv_one: y_star,
    })
}

/// Closed-form `Λ_t⁻¹(1)` for the Example 1 conjugacy, derived from the
/// logarithmic form: `(t + h1)·tanh(1/h0)`.
pub fn example1_lambda_inv_one(h0: f64, h1: f64, t: f64) -> f64 {
    (t + h1) * (1.0 / h0).tanh()
}

/// The domain-width expression as printed in the source material,
/// `(t + h1)·e^{h2/h0}·tanh(1/h0)`. Inconsistent with `Λ_t` itself (the
/// `e^{h2/h0}` factor does not cancel); kept for the diagnostic report.
pub fn example1_domain_width_printed(h0: f64, h1: f64, h2: f64, t: f64) -> f64 {
    (t + h1) * (h2 / h0).exp() * (1.0 / h0).tanh()
}

/// Coefficients of the transformed pointwise damper:
/// `f1 = 1/H'(a(t) + t) - 1/H'(-a(t) + t)`,
/// `f2 = 1/H'(a(t) + t) + 1/H'(-a(t) + t)`.
pub fn pointwise_coefficients(
    h: &ConjugacyMap,
    p: &MotionProfile,
    t: f64,
) -> Result<(f64, f64), MapError> {
    let (a, _) = p.eval(t);
    let dp = h.derivative(a + t)?;
    let dm = h.derivative(-a + t)?;
    if dp <= 0.0 || dm <= 0.0 {
        return Err(MapError::Domain {
            x: t,
            reason: "H' must be positive at both damper arguments",
        });
    }
    Ok((1.0 / dp - 1.0 / dm, 1.0 / dp + 1.0 / dm))
}
