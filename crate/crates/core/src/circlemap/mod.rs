//! Degree-one circle lifts and rotation numbers.
//!
//! The boundary map `F = (I + a) ∘ (I - a)⁻¹` of a valid motion profile
//! is an increasing lift with `F(x + 1) = F(x) + 1`. For piecewise-linear
//! profiles `F` is itself piecewise linear and is stored exactly; synthetic
//! lifts for testing are wrapped closures over one base period.

mod conjugacy;

pub use conjugacy::{
    birkhoff_conjugacy, conjugacy_residual, derivative_bounds, example1_conjugacy,
    nearest_rational, BirkhoffOptions, ConjugacyKind, ConjugacyMap, ResidualStats, Weighting,
};

use std::sync::Arc;

use thiserror::Error;

use crate::numeric::{invert_monotone, InterpError, InvertError, PwlDegreeOne};
use crate::profiles::MotionProfile;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("profile fails its hypotheses (a > 0, L(a) < 1, periodic)")]
    InvalidProfile,
    #[error(transparent)]
    Invert(#[from] InvertError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("sampled map is not strictly increasing near x = {x}; {hint}")]
    NotIncreasing { x: f64, hint: String },
    #[error("domain error at x = {x}: {reason}")]
    Domain { x: f64, reason: &'static str },
    #[error("additive shift of {shift} unsupported for this conjugacy kind")]
    ShiftUnsupported { shift: f64 },
    #[error("invalid option: {0}")]
    BadOptions(&'static str),
}

/// Closed-form constants of the Example 1 boundary map.
#[derive(Clone, Copy, Debug)]
pub struct Example1Form {
    pub l1: f64,
    pub l2: f64,
    pub f0: f64,
    pub x0: f64,
}

impl Example1Form {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let l1 = (1.0 + alpha) / (1.0 - alpha);
        let l2 = (1.0 + beta) / (1.0 - beta);
        let f0 = l2 * (l1 - 1.0) / (l1 - l2);
        let x0 = (1.0 - l2) / (l1 - l2);
        Self { l1, l2, f0, x0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = x.floor();
        let xb = x - k;
        let v = if xb <= self.x0 {
            self.l1 * xb + self.f0
        } else {
            self.l2 * xb + self.f0 + 1.0 - self.l2
        };
        v + k
    }
}

enum LiftRule {
    Pwl(PwlDegreeOne),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Clone for LiftRule {
    fn clone(&self) -> Self {
        match self {
            LiftRule::Pwl(p) => LiftRule::Pwl(p.clone()),
            LiftRule::Custom(f) => LiftRule::Custom(f.clone()),
        }
    }
}

impl std::fmt::Debug for LiftRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LiftRule::Pwl(p) => f.debug_tuple("Pwl").field(p).finish(),
            LiftRule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A degree-one increasing lift of a circle homeomorphism.
#[derive(Clone, Debug)]
pub struct CircleLift {
    rule: LiftRule,
    example1: Option<Example1Form>,
    profile: Option<MotionProfile>,
}

/// Build the boundary map `F = (I + a) ∘ (I - a)⁻¹`.
///
/// Knots of `t - a(t)` map to knots of `t + a(t)`, so for the piecewise
/// linear profile kinds the composition is assembled exactly. For an
/// Example 1 profile the closed-form slopes are attached and checked
/// against the assembled rule.
pub fn boundary_map(p: &MotionProfile) -> Result<CircleLift, MapError> {
    if !p.is_valid() {
        return Err(MapError::InvalidProfile);
    }
    let bps = p.breakpoints();
    let mut xs = Vec::with_capacity(bps.len() + 1);
    let mut ys = Vec::with_capacity(bps.len() + 1);
    for &t in &bps {
        let (a, _) = p.eval(t);
        xs.push(t - a);
        ys.push(t + a);
    }
    xs.push(xs[0] + 1.0);
    ys.push(ys[0] + 1.0);
    let pwl = PwlDegreeOne::new(xs, ys)?;

    let example1 = if p.is_example1() {
        match p.spec() {
            crate::profiles::ProfileSpec::Example1 { alpha, beta } => {
                let form = Example1Form::new(alpha, beta);
                for i in 0..=64 {
                    let x = i as f64 / 64.0;
                    let diff = (form.eval(x) - pwl.eval(x)).abs();
                    assert!(
                        diff <= 1e-10,
                        "closed form deviates from assembled map at x = {x}: {diff}"
                    );
                }
                Some(form)
            }
            _ => unreachable!(),
        }
    } else {
        None
    };

    Ok(CircleLift {
        rule: LiftRule::Pwl(pwl),
        example1,
        profile: Some(p.clone()),
    })
}

impl CircleLift {
    /// Wrap a base-period rule `x ∈ [0, 1) ↦ F(x)`; the degree-one
    /// extension is applied on evaluation. Intended for synthetic maps
    /// (conjugated rotations) in tests and experiments.
    pub fn from_fn(
        rule: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, MapError> {
        let lift = CircleLift {
            rule: LiftRule::Custom(Arc::new(rule)),
            example1: None,
            profile: None,
        };
        let m = 1024;
        let mut prev = lift.eval(0.0);
        for i in 1..=2 * m {
            let x = i as f64 / m as f64;
            let v = lift.eval(x);
            if v <= prev {
                return Err(MapError::NotIncreasing {
                    x,
                    hint: format!("F({x}) = {v} after {prev}"),
                });
            }
            prev = v;
        }
        Ok(lift)
    }

    /// Rigid rotation `x + c`.
    pub fn rotation(c: f64) -> Self {
        CircleLift {
            rule: LiftRule::Custom(Arc::new(move |x| x + c)),
            example1: None,
            profile: None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.rule {
            LiftRule::Pwl(p) => p.eval(x),
            LiftRule::Custom(f) => {
                let k = x.floor();
                f(x - k) + k
            }
        }
    }

    /// The generic route through monotone inversion of `I - a`, kept
    /// independent of the assembled piecewise-linear rule so the two can
    /// be cross-checked.
    pub fn eval_by_inversion(&self, x: f64) -> Result<f64, MapError> {
        let p = self.profile.as_ref().ok_or(MapError::Domain {
            x,
            reason: "no source profile attached",
        })?;
        let g = |t: f64| t - p.eval(t).0;
        let bracket = (x + p.min_a() - 1e-9, x + p.max_a() + 1e-9);
        let t = invert_monotone(g, x, bracket, 1e-13)?;
        Ok(t + p.eval(t).0)
    }

    pub fn example1_form(&self) -> Option<&Example1Form> {
        self.example1.as_ref()
    }

    pub fn profile(&self) -> Option<&MotionProfile> {
        self.profile.as_ref()
    }
}

/// How the returned rotation number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationMethod {
    /// `(Fⁿ(x) - x)/n`, carrying the deterministic `1/n` bound.
    PlainOrbit,
    /// Exponential-bump weighted Birkhoff average; fast on smooth
    /// conjugacies, reported with an empirical spread.
    WeightedBirkhoff,
}

#[derive(Clone, Debug)]
pub struct RotationOptions {
    pub seeds: Vec<f64>,
    pub n_max: usize,
    pub tol: f64,
}

impl Default for RotationOptions {
    fn default() -> Self {
        Self {
            seeds: vec![0.0, 0.355, 0.71],
            n_max: 1 << 23,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RotationEstimate {
    /// Best estimate (see `method`).
    pub rho: f64,
    /// Rigorous bound on `|rho - ρ(F)|`.
    pub error_bound: f64,
    pub n_iterations: usize,
    pub method: RotationMethod,
    pub rho_plain: f64,
    pub rho_weighted: f64,
    /// Disagreement of the weighted estimates across seeds.
    pub weighted_spread: f64,
    /// False when `n_max` was exhausted before the tolerance was met.
    pub converged: bool,
}

struct SeedState {
    y: f64,
    sum: f64,
    comp: f64,
    wsum: f64,
    wcomp: f64,
}

#[inline]
pub(crate) fn kahan_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// Estimate `ρ(F) = lim (Fⁿ(x) - x)/n`.
///
/// Runs a plain orbit average (deterministic bound `1/n`) and a weighted
/// average side by side over doubling orbit lengths, from every seed.
/// Exhausting `n_max` is not an error: the best estimate is returned with
/// `error_bound = 1/n_max` and `converged = false`.
pub fn rotation_number(lift: &CircleLift, opts: &RotationOptions) -> Result<RotationEstimate, MapError> {
    if opts.seeds.is_empty() {
        return Err(MapError::BadOptions("at least one seed required"));
    }
    if opts.n_max < 64 {
        return Err(MapError::BadOptions("n_max too small"));
    }
    let mut n = 512usize.min(opts.n_max);
    let mut prev_weighted: Option<f64> = None;
    loop {
        let mut states: Vec<SeedState> = opts
            .seeds
            .iter()
            .map(|s| SeedState {
                y: s - s.floor(),
                sum: 0.0,
                comp: 0.0,
                wsum: 0.0,
                wcomp: 0.0,
            })
            .collect();
        let mut wtot = 0.0;
        let mut wtot_c = 0.0;
        for k in 0..n {
            let s = (k + 1) as f64 / (n + 1) as f64;
            let w = (-1.0 / (s * (1.0 - s))).exp();
            kahan_add(&mut wtot, &mut wtot_c, w);
            for st in &mut states {
                let fy = lift.eval(st.y);
                let g = fy - st.y;
                kahan_add(&mut st.sum, &mut st.comp, g);
                kahan_add(&mut st.wsum, &mut st.wcomp, w * g);
                st.y = fy - fy.floor();
            }
        }
        let wtot = wtot + wtot_c;
        let plain: Vec<f64> = states.iter().map(|st| (st.sum + st.comp) / n as f64).collect();
        let weighted: Vec<f64> = states.iter().map(|st| (st.wsum + st.wcomp) / wtot).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let rho_plain = mean(&plain);
        let rho_weighted = mean(&weighted);
        let spread = weighted.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - weighted.iter().cloned().fold(f64::INFINITY, f64::min);
        let delta = prev_weighted.map_or(f64::INFINITY, |p| (rho_weighted - p).abs());
        let plain_bound = 1.0 / n as f64;

        let weighted_stable = spread <= opts.tol && delta <= opts.tol;
        let weighted_consistent = (rho_weighted - rho_plain).abs() <= plain_bound;
        let done = weighted_stable || plain_bound <= opts.tol;
        let exhausted = n >= opts.n_max;
        if done || exhausted {
            let (rho, method, error_bound) = if weighted_consistent {
                (
                    rho_weighted,
                    RotationMethod::WeightedBirkhoff,
                    (rho_weighted - rho_plain).abs() + plain_bound,
                )
            } else {
                (rho_plain, RotationMethod::PlainOrbit, plain_bound)
            };
            return Ok(RotationEstimate {
                rho,
                error_bound,
                n_iterations: n,
                method,
                rho_plain,
                rho_weighted,
                weighted_spread: spread.max(0.0),
                converged: done,
            });
        }
        prev_weighted = Some(rho_weighted);
        n = (n * 2).min(opts.n_max);
    }
}

/// Paper's closed-form rotation number for the Example 1 map,
/// `ln l1 / ln(l1 / l2)`.
pub fn example1_rho_formula(alpha: f64, beta: f64) -> f64 {
    let f = Example1Form::new(alpha, beta);
    f.l1.ln() / (f.l1 / f.l2).ln()
}

/// The competing candidate `ln(1/l2) / ln(l1/l2)` from the standard
/// invariant-measure argument; the two candidates sum to 1.
pub fn example1_rho_alternative(alpha: f64, beta: f64) -> f64 {
    let f = Example1Form::new(alpha, beta);
    (1.0 / f.l2).ln() / (f.l1 / f.l2).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p_ref() -> MotionProfile {
        MotionProfile::example1(0.5, -1.0 / 3.0).unwrap()
    }

    #[test]
    fn constant_profile_is_a_shift() {
        let p = MotionProfile::constant(0.5).unwrap();
        let f = boundary_map(&p).unwrap();
        for x in [-2.0, -0.3, 0.0, 0.7, 5.1] {
            assert_abs_diff_eq!(f.eval(x), x + 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn example1_closed_form_constants() {
        let f = boundary_map(&p_ref()).unwrap();
        let form = f.example1_form().unwrap();
        assert_abs_diff_eq!(form.l1, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(form.l2, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(form.f0, 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(form.x0, 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(f.eval(0.0), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(f.eval(1.0), 1.4, epsilon = 1e-12);
        // Degree-one consistency of the slopes.
        assert_abs_diff_eq!(form.l1 * form.x0 + form.l2 * (1.0 - form.x0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn assembled_rule_matches_inversion_route() {
        let f = boundary_map(&p_ref()).unwrap();
        for i in 0..200 {
            let x = -1.0 + 3.0 * i as f64 / 199.0;
            let via_inv = f.eval_by_inversion(x).unwrap();
            assert_abs_diff_eq!(f.eval(x), via_inv, epsilon = 1e-10);
        }
    }

    #[test]
    fn rotation_number_of_rigid_rotation() {
        let f = CircleLift::rotation(0.3);
        let est = rotation_number(&f, &RotationOptions::default()).unwrap();
        assert_abs_diff_eq!(est.rho, 0.3, epsilon = 1e-13);
        assert!(est.converged);
    }

    #[test]
    fn rotation_number_synthetic_conjugated() {
        // F = G⁻¹ ∘ (· + ρ*) ∘ G with G(x) = x + 0.1 sin(2πx).
        let rho_star = 2.0_f64.sqrt() - 1.0;
        let g = |x: f64| x + 0.1 * (2.0 * std::f64::consts::PI * x).sin();
        let f = CircleLift::from_fn(move |x| {
            let y = g(x) + rho_star;
            let k = y.floor();
            invert_monotone(g, y - k, (-0.2, 1.2), 1e-14).unwrap() + k
        })
        .unwrap();
        let opts = RotationOptions {
            n_max: 100_000,
            tol: 1e-10,
            ..Default::default()
        };
        let est = rotation_number(&f, &opts).unwrap();
        assert!(est.n_iterations <= 100_000);
        assert!(
            (est.rho - rho_star).abs() <= 1e-8,
            "rho = {}, err = {:e}",
            est.rho,
            (est.rho - rho_star).abs()
        );
    }

    #[test]
    fn rotation_number_translation_invariant() {
        let base = boundary_map(&p_ref()).unwrap();
        let opts = RotationOptions {
            n_max: 1 << 14,
            ..Default::default()
        };
        let est0 = rotation_number(&base, &opts).unwrap();
        for k in [-3i64, 2, 9] {
            let b = base.clone();
            let shifted = CircleLift::from_fn(move |x| b.eval(x + k as f64) - k as f64).unwrap();
            let est = rotation_number(&shifted, &opts).unwrap();
            assert_abs_diff_eq!(est.rho, est0.rho, epsilon = 1e-12);
        }
    }

    #[test]
    fn sanity_window_contains_rho() {
        let f = boundary_map(&p_ref()).unwrap();
        let est = rotation_number(
            &f,
            &RotationOptions {
                n_max: 1 << 16,
                ..Default::default()
            },
        )
        .unwrap();
        let f0 = f.eval(0.0);
        assert!(est.rho > f0 - 1.0 && est.rho < f0 + 1.0);
    }
}
