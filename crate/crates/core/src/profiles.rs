//! 1-periodic boundary motion profiles `a(t)`.
//!
//! All supported kinds are piecewise linear, so the shifted maps
//! `t - a(t)` and `t + a(t)` invert exactly segment by segment. The
//! period is fixed at 1; rescale other periods before constructing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::PwlDegreeOne;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("invalid profile: {name} = {value} violates {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("tabulated profile needs at least two samples")]
    TooFewSamples,
    #[error("tabulated sample times must be strictly increasing within one period (index {index})")]
    BadSampleTimes { index: usize },
}

/// Serializable profile descriptor as it appears in scenario files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Example1 { alpha: f64, beta: f64 },
    Constant { a0: f64 },
    Tabulated { samples: Vec<(f64, f64)> },
}

#[derive(Clone, Debug)]
enum Kind {
    /// Two affine pieces: slope `alpha` on `[t1, t2]`, slope `beta` on
    /// `[t2, t1 + 1]`, extended 1-periodically.
    Example1 {
        alpha: f64,
        beta: f64,
        t1: f64,
        t2: f64,
        a1: f64,
        a2: f64,
    },
    Constant { a0: f64 },
    /// Piecewise-linear through the sample knots; the last segment wraps
    /// back to the first knot one period later.
    Tabulated { ts: Vec<f64>, vals: Vec<f64> },
}

/// A 1-periodic boundary trajectory with Lipschitz metadata.
#[derive(Clone, Debug)]
pub struct MotionProfile {
    kind: Kind,
    lipschitz: f64,
    min_a: f64,
    max_a: f64,
    periodicity_defect: f64,
}

/// Hypothesis report for a profile; failures are carried, not thrown.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileDiagnostics {
    pub min_a: f64,
    pub max_a: f64,
    pub lipschitz: f64,
    pub periodicity_defect: f64,
    pub positive: bool,
    pub lipschitz_ok: bool,
    pub periodic: bool,
    pub pass: bool,
}

impl MotionProfile {
    /// The two-piece sawtooth family with `-1 < beta < 0 < alpha < 1`.
    pub fn example1(alpha: f64, beta: f64) -> Result<Self, ProfileError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ProfileError::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "0 < alpha < 1",
            });
        }
        if !(beta > -1.0 && beta < 0.0) {
            return Err(ProfileError::InvalidParameter {
                name: "beta",
                value: beta,
                constraint: "-1 < beta < 0",
            });
        }
        let den = 2.0 * (alpha - beta);
        let t1 = alpha * (1.0 + beta) / den;
        let t2 = (alpha * (1.0 + beta) - 2.0 * beta) / den;
        let a1 = alpha * t1 + alpha * (1.0 - alpha) * (1.0 + beta) / den;
        let a2 = alpha * t2 + alpha * (1.0 - alpha) * (1.0 + beta) / den;
        let lipschitz = alpha.max(beta.abs());
        Ok(Self {
            kind: Kind::Example1 { alpha, beta, t1, t2, a1, a2 },
            lipschitz,
            min_a: a1,
            max_a: a2,
            periodicity_defect: 0.0,
        })
    }

    pub fn constant(a0: f64) -> Result<Self, ProfileError> {
        if !(a0 > 0.0) {
            return Err(ProfileError::InvalidParameter {
                name: "a0",
                value: a0,
                constraint: "a0 > 0",
            });
        }
        Ok(Self {
            kind: Kind::Constant { a0 },
            lipschitz: 0.0,
            min_a: a0,
            max_a: a0,
            periodicity_defect: 0.0,
        })
    }

    /// Piecewise-linear profile through `(t, a)` samples covering one
    /// period. A mismatch between the first and a final `t0 + 1` sample
    /// is tolerated and reported as the periodicity defect.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self, ProfileError> {
        if samples.len() < 2 {
            return Err(ProfileError::TooFewSamples);
        }
        let t0 = samples[0].0;
        let mut ts = Vec::with_capacity(samples.len());
        let mut vals = Vec::with_capacity(samples.len());
        let mut defect = 0.0;
        for (i, &(t, a)) in samples.iter().enumerate() {
            if i > 0 && t <= ts[i - 1] {
                return Err(ProfileError::BadSampleTimes { index: i });
            }
            if t > t0 + 1.0 + 1e-9 {
                return Err(ProfileError::BadSampleTimes { index: i });
            }
            if (t - (t0 + 1.0)).abs() <= 1e-9 {
                // Closing sample: keep it as the wrap value.
                defect = (a - samples[0].1).abs();
                ts.push(t0 + 1.0);
                vals.push(a);
                break;
            }
            ts.push(t);
            vals.push(a);
        }
        if (ts[ts.len() - 1] - (t0 + 1.0)).abs() > 1e-9 {
            // No closing sample given: wrap linearly back to the start.
            ts.push(t0 + 1.0);
            vals.push(samples[0].1);
        }
        let mut lipschitz: f64 = 0.0;
        for i in 1..ts.len() {
            lipschitz = lipschitz.max(((vals[i] - vals[i - 1]) / (ts[i] - ts[i - 1])).abs());
        }
        let min_a = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_a = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            kind: Kind::Tabulated { ts, vals },
            lipschitz,
            min_a,
            max_a,
            periodicity_defect: defect,
        })
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<Self, ProfileError> {
        match spec {
            ProfileSpec::Example1 { alpha, beta } => Self::example1(*alpha, *beta),
            ProfileSpec::Constant { a0 } => Self::constant(*a0),
            ProfileSpec::Tabulated { samples } => Self::tabulated(samples),
        }
    }

    pub fn spec(&self) -> ProfileSpec {
        match &self.kind {
            Kind::Example1 { alpha, beta, .. } => ProfileSpec::Example1 { alpha: *alpha, beta: *beta },
            Kind::Constant { a0 } => ProfileSpec::Constant { a0: *a0 },
            Kind::Tabulated { ts, vals } => ProfileSpec::Tabulated {
                samples: ts.iter().cloned().zip(vals.iter().cloned()).collect(),
            },
        }
    }

    /// `a(t)` and the right-continuous slope `a'(t)`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match &self.kind {
            Kind::Constant { a0 } => (*a0, 0.0),
            Kind::Example1 { alpha, beta, t1, t2, a1, a2 } => {
                // Snap within 1e-12 of a breakpoint onto its right piece
                // (right-continuous slope convention, robust to the float
                // representation of the breakpoints).
                let mut s = t1 + (t - t1).rem_euclid(1.0);
                if s >= t1 + 1.0 - 1e-12 {
                    s = *t1;
                }
                if s < t2 - 1e-12 {
                    (a1 + alpha * (s - t1), *alpha)
                } else {
                    (a2 + beta * (s - t2), *beta)
                }
            }
            Kind::Tabulated { ts, vals } => {
                let mut s = ts[0] + (t - ts[0]).rem_euclid(1.0);
                if s >= ts[0] + 1.0 - 1e-12 {
                    s = ts[0];
                }
                let i = match ts.partition_point(|g| *g <= s) {
                    0 => 0,
                    p => (p - 1).min(ts.len() - 2),
                };
                let slope = (vals[i + 1] - vals[i]) / (ts[i + 1] - ts[i]);
                (vals[i] + slope * (s - ts[i]), slope)
            }
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn min_a(&self) -> f64 {
        self.min_a
    }

    pub fn max_a(&self) -> f64 {
        self.max_a
    }

    pub fn period(&self) -> f64 {
        1.0
    }

    /// Piece boundaries within one base period (empty for constants).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Constant { .. } => vec![0.0],
            Kind::Example1 { t1, t2, .. } => vec![*t1, *t2],
            Kind::Tabulated { ts, .. } => ts[..ts.len() - 1].to_vec(),
        }
    }

    /// The increasing map `t - a(t)` as an exact piecewise-linear object.
    pub fn i_minus_a(&self) -> PwlDegreeOne {
        self.shifted_map(-1.0)
    }

    /// The increasing map `t + a(t)` as an exact piecewise-linear object.
    pub fn i_plus_a(&self) -> PwlDegreeOne {
        self.shifted_map(1.0)
    }

    fn shifted_map(&self, sign: f64) -> PwlDegreeOne {
        let bps = self.breakpoints();
        let mut xs = Vec::with_capacity(bps.len() + 1);
        let mut ys = Vec::with_capacity(bps.len() + 1);
        for &t in &bps {
            let (a, _) = self.eval(t);
            xs.push(t);
            ys.push(t + sign * a);
        }
        xs.push(bps[0] + 1.0);
        ys.push(ys[0] + 1.0);
        // Increasing because L(a) < 1.
        PwlDegreeOne::new(xs, ys).expect("|a'| < 1 keeps t ± a(t) increasing")
    }

    /// Hypothesis checks: positivity, Lipschitz bound, periodicity.
    pub fn validate(&self) -> ProfileDiagnostics {
        // Knot extrema are exact for piecewise-linear profiles; the dense
        // grid guards a defective table all the same.
        let mut min_a = self.min_a;
        let mut max_a = self.max_a;
        for i in 0..=1024 {
            let (a, _) = self.eval(i as f64 / 1024.0);
            min_a = min_a.min(a);
            max_a = max_a.max(a);
        }
        let positive = min_a > 0.0;
        let lipschitz_ok = self.lipschitz < 1.0;
        let periodic = self.periodicity_defect <= 1e-12;
        ProfileDiagnostics {
            min_a,
            max_a,
            lipschitz: self.lipschitz,
            periodicity_defect: self.periodicity_defect,
            positive,
            lipschitz_ok,
            periodic,
            pass: positive && lipschitz_ok && periodic,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().pass
    }

    pub fn is_example1(&self) -> bool {
        matches!(self.kind, Kind::Example1 { .. })
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Example1 { alpha, beta, .. } => format!("example1(alpha={alpha}, beta={beta})"),
            Kind::Constant { a0 } => format!("constant(a0={a0})"),
            Kind::Tabulated { ts, .. } => format!("tabulated({} knots)", ts.len() - 1),
        }
    }
}
