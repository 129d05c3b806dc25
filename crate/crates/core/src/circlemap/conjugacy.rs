//! Conjugacies `H` transporting a lift `F` to the rigid rotation, in the
//! convention `H ∘ F = H + ρ`.
//!
//! Two constructive routes: the closed-form logarithmic map attached to
//! the Example 1 family (valid on its first branch only; the residual on
//! the second branch is measured, not hidden), and a sampled Birkhoff
//! average `G(x) = avg_n (Fⁿ(x) - nρ)`, which satisfies `G ∘ F = G + ρ`
//! in the limit and carries a measured residual at finite order.

use serde::{Deserialize, Serialize};

use super::{CircleLift, MapError};
use crate::numeric::{invert_monotone, MonotoneCubic};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ResidualStats {
    pub sup: f64,
    pub mean: f64,
}

#[derive(Clone, Debug)]
pub enum ConjugacyKind {
    Identity,
    /// `H(x) = h0 ln|x + h1| + h2`; increasing only for `x > -h1`.
    ClosedFormExample1 { h0: f64, h1: f64, h2: f64 },
    /// Sampled on one period with the extension `H(x + 1) = H(x) + 1`.
    BirkhoffSampled { interp: MonotoneCubic },
}

/// An increasing map `H` with `H ∘ F = H + ρ` up to a recorded residual.
#[derive(Clone, Debug)]
pub struct ConjugacyMap {
    kind: ConjugacyKind,
    /// Rotation number the map conjugates to, when known.
    pub rho: Option<f64>,
    /// Derivative bounds over `[0, 1]`.
    pub lambda1: f64,
    pub lambda2: f64,
    pub residual: Option<ResidualStats>,
    pub warnings: Vec<String>,
}

impl ConjugacyMap {
    pub fn identity() -> Self {
        Self {
            kind: ConjugacyKind::Identity,
            rho: None,
            lambda1: 1.0,
            lambda2: 1.0,
            residual: Some(ResidualStats { sup: 0.0, mean: 0.0 }),
            warnings: Vec::new(),
        }
    }

    pub fn kind(&self) -> &ConjugacyKind {
        &self.kind
    }

    /// Interval on which the map is guaranteed increasing.
    pub fn monotone_domain(&self) -> (f64, f64) {
        match &self.kind {
            ConjugacyKind::ClosedFormExample1 { h1, .. } => (-h1, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, MapError> {
        match &self.kind {
            ConjugacyKind::Identity => Ok(x),
            ConjugacyKind::ClosedFormExample1 { h0, h1, h2 } => {
                // Literal form with the absolute value; past the pole at
                // x = -h1 the map is decreasing and only diagnostic uses
                // make sense there.
                let s = x + h1;
                if s == 0.0 {
                    return Err(MapError::Domain {
                        x,
                        reason: "logarithmic pole at x = -h1",
                    });
                }
                Ok(h0 * s.abs().ln() + h2)
            }
            ConjugacyKind::BirkhoffSampled { interp } => {
                let k = x.floor();
                Ok(interp.eval(x - k) + k)
            }
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64, MapError> {
        match &self.kind {
            ConjugacyKind::Identity => Ok(1.0),
            ConjugacyKind::ClosedFormExample1 { h0, h1, .. } => {
                let s = x + h1;
                if s <= 0.0 {
                    return Err(MapError::Domain {
                        x,
                        reason: "H' defined for x + h1 > 0 only",
                    });
                }
                Ok(h0 / s)
            }
            ConjugacyKind::BirkhoffSampled { interp } => {
                let k = x.floor();
                Ok(interp.derivative(x - k))
            }
        }
    }

    pub fn inverse(&self, y: f64) -> Result<f64, MapError> {
        match &self.kind {
            ConjugacyKind::Identity => Ok(y),
            ConjugacyKind::ClosedFormExample1 { h0, h1, h2 } => {
                Ok(((y - h2) / h0).exp() - h1)
            }
            ConjugacyKind::BirkhoffSampled { interp } => {
                let y0 = interp.eval(0.0);
                let k = (y - y0).floor();
                let yb = y - k;
                let x = invert_monotone(|x| interp.eval(x), yb, (0.0, 1.0), 1e-13)?;
                Ok(x + k)
            }
        }
    }

    /// Same map shifted by an additive constant (used to pin the free
    /// constant of a sampled conjugacy, e.g. `H(-a(0)) = -ρ/2`).
    pub fn shifted(&self, c: f64) -> Result<Self, MapError> {
        let kind = match &self.kind {
            ConjugacyKind::Identity => {
                if c.abs() <= 1e-12 {
                    ConjugacyKind::Identity
                } else {
                    return Err(MapError::ShiftUnsupported { shift: c });
                }
            }
            ConjugacyKind::ClosedFormExample1 { h0, h1, h2 } => ConjugacyKind::ClosedFormExample1 {
                h0: *h0,
                h1: *h1,
                h2: h2 + c,
            },
            ConjugacyKind::BirkhoffSampled { interp } => {
                let (xs, ys) = interp.knots();
                let shifted: Vec<f64> = ys.iter().map(|y| y + c).collect();
                ConjugacyKind::BirkhoffSampled {
                    interp: MonotoneCubic::new_periodic(xs.to_vec(), shifted)?,
                }
            }
        };
        Ok(Self {
            kind,
            rho: self.rho,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            residual: self.residual,
            warnings: self.warnings.clone(),
        })
    }

    pub fn describe(&self) -> &'static str {
        match &self.kind {
            ConjugacyKind::Identity => "identity",
            ConjugacyKind::ClosedFormExample1 { .. } => "closed_form_example1",
            ConjugacyKind::BirkhoffSampled { .. } => "birkhoff_sampled",
        }
    }

    pub fn to_json(&self) -> String {
        let export = ConjugacyExport::from(self);
        serde_json::to_string_pretty(&export).expect("conjugacy export serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let export: ConjugacyExport =
            serde_json::from_str(text).map_err(|_| MapError::BadOptions("unparseable conjugacy JSON"))?;
        export.build()
    }
}

/// Wire format for conjugacy reuse across runs.
#[derive(Serialize, Deserialize)]
struct ConjugacyExport {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_mean: Option<f64>,
    lambda1: f64,
    lambda2: f64,
}

impl From<&ConjugacyMap> for ConjugacyExport {
    fn from(map: &ConjugacyMap) -> Self {
        let (kind, grid, h0, h1, h2) = match &map.kind {
            ConjugacyKind::Identity => ("identity", None, None, None, None),
            ConjugacyKind::ClosedFormExample1 { h0, h1, h2 } => {
                ("closed_form_example1", None, Some(*h0), Some(*h1), Some(*h2))
            }
            ConjugacyKind::BirkhoffSampled { interp } => {
                let (xs, ys) = interp.knots();
                let grid: Vec<(f64, f64)> =
                    xs.iter().cloned().zip(ys.iter().cloned()).collect();
                ("birkhoff_sampled", Some(grid), None, None, None)
            }
        };
        Self {
            kind: kind.to_string(),
            rho: map.rho,
            grid,
            h0,
            h1,
            h2,
            residual_sup: map.residual.map(|r| r.sup),
            residual_mean: map.residual.map(|r| r.mean),
            lambda1: map.lambda1,
            lambda2: map.lambda2,
        }
    }
}

impl ConjugacyExport {
    fn build(self) -> Result<ConjugacyMap, MapError> {
        let kind = match self.kind.as_str() {
            "identity" => ConjugacyKind::Identity,
            "closed_form_example1" => ConjugacyKind::ClosedFormExample1 {
                h0: self.h0.ok_or(MapError::BadOptions("missing h0"))?,
                h1: self.h1.ok_or(MapError::BadOptions("missing h1"))?,
                h2: self.h2.ok_or(MapError::BadOptions("missing h2"))?,
            },
            "birkhoff_sampled" => {
                let grid = self.grid.ok_or(MapError::BadOptions("missing grid"))?;
                let (xs, ys): (Vec<f64>, Vec<f64>) = grid.into_iter().unzip();
                ConjugacyKind::BirkhoffSampled {
                    interp: MonotoneCubic::new_periodic(xs, ys)?,
                }
            }
            _ => return Err(MapError::BadOptions("unknown conjugacy kind")),
        };
        Ok(ConjugacyMap {
            kind,
            rho: self.rho,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            residual: match (self.residual_sup, self.residual_mean) {
                (Some(sup), Some(mean)) => Some(ResidualStats { sup, mean }),
                (Some(sup), None) => Some(ResidualStats { sup, mean: sup }),
                _ => None,
            },
            warnings: Vec::new(),
        })
    }
}

/// Closed-form Example 1 conjugacy: `H(x) = h0 ln|x + h1| + h2` with
/// `h0 = 1/ln(l1/l2)`, `h1 = l2/(l1 - l2)`, `h2 = -ln(h1)`.
pub fn example1_conjugacy(alpha: f64, beta: f64) -> Result<ConjugacyMap, MapError> {
    crate::profiles::MotionProfile::example1(alpha, beta).map_err(|_| MapError::InvalidProfile)?;
    let form = super::Example1Form::new(alpha, beta);
    let h0 = 1.0 / (form.l1 / form.l2).ln();
    let h1 = form.l2 / (form.l1 - form.l2);
    let h2 = -h1.ln();
    // H' = h0/(x + h1) is decreasing, so the bounds on [0, 1] sit at the
    // endpoints; these equal h0 (l1 - l2)/l1 and h0 (l1 - l2)/l2.
    let lambda1 = h0 / (1.0 + h1);
    let lambda2 = h0 / h1;
    Ok(ConjugacyMap {
        kind: ConjugacyKind::ClosedFormExample1 { h0, h1, h2 },
        rho: Some(super::example1_rho_formula(alpha, beta)),
        lambda1,
        lambda2,
        residual: None,
        warnings: vec![
            "closed-form H conjugates on the first branch only; check conjugacy_residual on [x0, 1]"
                .to_string(),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Plain Cesàro mean; residual obeys the deterministic bound `2/N`.
    Cesaro,
    /// Exponential-bump weights; faster on smooth conjugacies.
    Exponential,
}

#[derive(Clone, Debug)]
pub struct BirkhoffOptions {
    pub n: usize,
    pub grid: usize,
    pub weighting: Weighting,
    /// Denominator limit and distance for the near-rational guard.
    pub rational_max_den: u64,
    pub rational_tol: f64,
}

impl Default for BirkhoffOptions {
    fn default() -> Self {
        Self {
            n: 1 << 14,
            grid: 1 << 11,
            weighting: Weighting::Cesaro,
            rational_max_den: 64,
            rational_tol: 1e-9,
        }
    }
}

/// Closest fraction `p/q` with `q <= max_den`; returns `(p, q, |rho - p/q|)`.
pub fn nearest_rational(rho: f64, max_den: u64) -> (i64, u64, f64) {
    let mut best = (0i64, 1u64, f64::INFINITY);
    for q in 1..=max_den {
        let p = (rho * q as f64).round();
        let d = (rho - p / q as f64).abs();
        if d < best.2 {
            best = (p as i64, q, d);
        }
    }
    best
}

/// Sampled conjugacy via averaging of `Fⁿ(x) - nρ` over one period.
///
/// Non-monotone output is an error, never repaired: it indicates a
/// near-rational `ρ` or too low an averaging order, both worth surfacing.
pub fn birkhoff_conjugacy(
    lift: &CircleLift,
    rho: f64,
    opts: &BirkhoffOptions,
) -> Result<ConjugacyMap, MapError> {
    if opts.n < 16 || opts.grid < 16 {
        return Err(MapError::BadOptions("birkhoff n and grid must be at least 16"));
    }
    let mut warnings = Vec::new();
    let (p, q, dist) = nearest_rational(rho, opts.rational_max_den);
    if dist < opts.rational_tol {
        warnings.push(format!(
            "rho = {rho} is within {dist:e} of {p}/{q}; the Birkhoff average may fail to be monotone"
        ));
    }

    let m = opts.grid;
    let n = opts.n;
    let mut g = vec![0.0f64; m];
    let mut weights: Option<Vec<f64>> = None;
    if opts.weighting == Weighting::Exponential {
        let w: Vec<f64> = (0..n)
            .map(|k| {
                let s = (k + 1) as f64 / (n + 1) as f64;
                (-1.0 / (s * (1.0 - s))).exp()
            })
            .collect();
        weights = Some(w);
    }
    for (j, slot) in g.iter_mut().enumerate() {
        let x = j as f64 / m as f64;
        let mut z = x; // Fⁿ(x) - nρ, kept O(1)
        let mut y = x;
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut wtot = 0.0;
        match &weights {
            None => {
                for _ in 0..n {
                    super::kahan_add(&mut sum, &mut comp, z);
                    let fy = lift.eval(y);
                    z += fy - y - rho;
                    y = fy - fy.floor();
                }
                *slot = (sum + comp) / n as f64;
            }
            Some(w) => {
                for wk in w {
                    super::kahan_add(&mut sum, &mut comp, wk * z);
                    wtot += wk;
                    let fy = lift.eval(y);
                    z += fy - y - rho;
                    y = fy - fy.floor();
                }
                *slot = (sum + comp) / wtot;
            }
        }
    }

    // Strict monotonicity including the wrap segment.
    for j in 1..m {
        if g[j] <= g[j - 1] {
            return Err(MapError::NotIncreasing {
                x: j as f64 / m as f64,
                hint: format!(
                    "G({}) = {} <= G({}) = {}; rho near {p}/{q} (dist {dist:e})?",
                    j as f64 / m as f64,
                    g[j],
                    (j - 1) as f64 / m as f64,
                    g[j - 1]
                ),
            });
        }
    }
    if g[0] + 1.0 <= g[m - 1] {
        return Err(MapError::NotIncreasing {
            x: 1.0,
            hint: "wrap segment not increasing".to_string(),
        });
    }

    let mut xs: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
    xs.push(1.0);
    let mut ys = g;
    let y0 = ys[0];
    ys.push(y0 + 1.0);
    let interp = MonotoneCubic::new_periodic(xs, ys)?;

    let mut map = ConjugacyMap {
        kind: ConjugacyKind::BirkhoffSampled { interp },
        rho: Some(rho),
        lambda1: 0.0,
        lambda2: 0.0,
        residual: None,
        warnings,
    };
    let (l1, l2) = derivative_bounds(&map, (0.0, 1.0), 4 * m)?;
    map.lambda1 = l1;
    map.lambda2 = l2;
    // Declared residual from an offset validation grid well finer than
    // the construction grid (off-knot points see the interpolation error
    // near the conjugacy's derivative jumps, which on-knot checks miss).
    let val_grid: Vec<f64> = (0..4 * m).map(|j| (j as f64 + 0.371) / (4 * m) as f64).collect();
    let stats = conjugacy_residual(&map, lift, rho, &val_grid)?;
    map.residual = Some(stats);
    Ok(map)
}

/// `sup` and `mean` of `|H(F(x)) - H(x) - ρ|` over the grid.
pub fn conjugacy_residual(
    h: &ConjugacyMap,
    f: &CircleLift,
    rho: f64,
    grid: &[f64],
) -> Result<ResidualStats, MapError> {
    if grid.is_empty() {
        return Err(MapError::BadOptions("empty residual grid"));
    }
    let mut sup = 0.0f64;
    let mut acc = 0.0f64;
    for &x in grid {
        let r = (h.eval(f.eval(x))? - h.eval(x)? - rho).abs();
        sup = sup.max(r);
        acc += r;
    }
    Ok(ResidualStats {
        sup,
        mean: acc / grid.len() as f64,
    })
}

/// Min/max of `H'` sampled on `n + 1` points of the interval.
pub fn derivative_bounds(
    h: &ConjugacyMap,
    interval: (f64, f64),
    n: usize,
) -> Result<(f64, f64), MapError> {
    let (lo, hi) = interval;
    if !(hi > lo) || n == 0 {
        return Err(MapError::BadOptions("empty interval for derivative bounds"));
    }
    let mut lambda1 = f64::INFINITY;
    let mut lambda2 = f64::NEG_INFINITY;
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let d = h.derivative(x)?;
        lambda1 = lambda1.min(d);
        lambda2 = lambda2.max(d);
    }
    Ok((lambda1, lambda2))
}
