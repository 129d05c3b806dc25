//! Shared numerical kernels: bracketed inversion of increasing maps,
//! degree-one piecewise-linear maps, and monotone (Fritsch–Carlson)
//! cubic interpolation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum InvertError {
    #[error("target {target} outside bracket image [{f_lo}, {f_hi}]")]
    OutOfRange { target: f64, f_lo: f64, f_hi: f64 },
    #[error("map is not increasing on bracket: f({lo}) = {f_lo} > f({hi}) = {f_hi}")]
    NotMonotone { lo: f64, f_lo: f64, hi: f64, f_hi: f64 },
    #[error("bracket expansion exhausted while chasing target {target}")]
    BracketExhausted { target: f64 },
    #[error("bisection stalled above tolerance at x = {x} (|f(x) - y| = {err}); map may jump")]
    Stalled { x: f64, err: f64 },
}

/// Solve `f(x) = y` for an increasing `f` on `[lo, hi]`.
///
/// A secant step is tried first and a bisection step is taken whenever the
/// secant leaves the bracket, so termination is guaranteed for continuous
/// increasing maps. Returns `x` with `|f(x) - y| <= tol`.
pub fn invert_monotone(
    f: impl Fn(f64) -> f64,
    y: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64, InvertError> {
    let (mut lo, mut hi) = bracket;
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if f_lo > f_hi {
        return Err(InvertError::NotMonotone { lo, f_lo, hi, f_hi });
    }
    if y < f_lo - tol || y > f_hi + tol {
        return Err(InvertError::OutOfRange { target: y, f_lo, f_hi });
    }
    if (f_lo - y).abs() <= tol {
        return Ok(lo);
    }
    if (f_hi - y).abs() <= tol {
        return Ok(hi);
    }
    for _ in 0..256 {
        // Secant proposal, clipped away from the bracket ends; fall back to
        // the midpoint when the slope degenerates.
        let mid = 0.5 * (lo + hi);
        let x = if f_hi > f_lo {
            let s = lo + (y - f_lo) * (hi - lo) / (f_hi - f_lo);
            if s.is_finite() && s > lo && s < hi {
                0.5 * (s + mid)
            } else {
                mid
            }
        } else {
            mid
        };
        let fx = f(x);
        if (fx - y).abs() <= tol {
            return Ok(x);
        }
        if fx < y {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            let best = 0.5 * (lo + hi);
            let err = (f(best) - y).abs();
            if err <= tol {
                return Ok(best);
            }
            return Err(InvertError::Stalled { x: best, err });
        }
    }
    let best = 0.5 * (lo + hi);
    let err = (f(best) - y).abs();
    if err <= tol {
        Ok(best)
    } else {
        Err(InvertError::Stalled { x: best, err })
    }
}

/// Expand `[lo, hi]` geometrically until the image of an increasing `f`
/// contains `y`, then invert. `hi_cap` (when finite) bounds the expansion,
/// e.g. at a domain asymptote.
pub fn invert_monotone_expanding(
    f: impl Fn(f64) -> f64,
    y: f64,
    seed: (f64, f64),
    hi_cap: Option<f64>,
    tol: f64,
) -> Result<f64, InvertError> {
    let (mut lo, mut hi) = seed;
    let mut width = hi - lo;
    for _ in 0..96 {
        let capped_hi = match hi_cap {
            // Approach an asymptote geometrically instead of stepping past it.
            Some(cap) => cap - (cap - hi).max(0.0) * 0.5,
            None => hi,
        };
        let f_lo = f(lo);
        let f_hi = f(capped_hi);
        if y >= f_lo && y <= f_hi {
            return invert_monotone(f, y, (lo, capped_hi), tol);
        }
        if y < f_lo {
            lo -= width;
        } else {
            hi = match hi_cap {
                Some(_) => capped_hi,
                None => hi + width,
            };
        }
        width *= 2.0;
        if width > 1e18 {
            break;
        }
    }
    Err(InvertError::BracketExhausted { target: y })
}

/// An increasing piecewise-linear map with the degree-one extension
/// `F(x + 1) = F(x) + 1`, stored as knots over one period (the closing
/// knot is kept explicitly).
#[derive(Clone, Debug)]
pub struct PwlDegreeOne {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PwlDegreeOne {
    /// Knots over one base period in `x`; the last knot must repeat the
    /// first one shifted by (1, 1).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, InvertError> {
        assert_eq!(xs.len(), ys.len());
        assert!(xs.len() >= 2);
        debug_assert!((xs[xs.len() - 1] - xs[0] - 1.0).abs() < 1e-9);
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] || ys[i] <= ys[i - 1] {
                return Err(InvertError::NotMonotone {
                    lo: xs[i - 1],
                    f_lo: ys[i - 1],
                    hi: xs[i],
                    f_hi: ys[i],
                });
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    fn segment(&self, grid: &[f64], v: f64) -> usize {
        // Largest i with grid[i] <= v, clamped to a valid segment index.
        match grid.partition_point(|g| *g <= v) {
            0 => 0,
            p => (p - 1).min(grid.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = (x - self.xs[0]).floor();
        let xb = x - k;
        let i = self.segment(&self.xs, xb);
        let w = (xb - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + w * (self.ys[i + 1] - self.ys[i]) + k
    }

    /// Exact inverse (the map is linear on each segment).
    pub fn invert(&self, y: f64) -> f64 {
        let k = (y - self.ys[0]).floor();
        let yb = y - k;
        let i = self.segment(&self.ys, yb);
        let w = (yb - self.ys[i]) / (self.ys[i + 1] - self.ys[i]);
        self.xs[i] + w * (self.xs[i + 1] - self.xs[i]) + k
    }
}

#[derive(Debug, Error)]
#[error("interpolation abscissae must be strictly increasing (index {index})")]
pub struct InterpError {
    pub index: usize,
}

/// Shape-preserving piecewise-cubic interpolant (PCHIP tangents).
///
/// For increasing data the interpolant is increasing and its derivative is
/// available in closed form, which is what the conjugacy maps need.
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, InterpError> {
        let d = pchip_tangents(&xs, &ys, false)?;
        Ok(Self { xs, ys, d })
    }

    /// Tangents computed with wrap-around neighbours for data satisfying
    /// `y(x + P) = y(x) + Q`; avoids flat one-sided endpoint estimates.
    pub fn new_periodic(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, InterpError> {
        let d = pchip_tangents(&xs, &ys, true)?;
        Ok(Self { xs, ys, d })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.partition_point(|g| *g <= x) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (d0, d1) = (self.d[i] * h, self.d[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (d0, d1) = (self.d[i], self.d[i + 1]);
        let t2 = t * t;
        (y0 * (6.0 * t2 - 6.0 * t) / h)
            + d0 * (3.0 * t2 - 4.0 * t + 1.0)
            + (y1 * (-6.0 * t2 + 6.0 * t) / h)
            + d1 * (3.0 * t2 - 2.0 * t)
    }
}

fn pchip_tangents(xs: &[f64], ys: &[f64], periodic: bool) -> Result<Vec<f64>, InterpError> {
    let n = xs.len();
    assert!(n >= 2 && ys.len() == n);
    for i in 1..n {
        if xs[i] <= xs[i - 1] {
            return Err(InterpError { index: i });
        }
    }
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    let interior = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        if d0 * d1 <= 0.0 {
            0.0
        } else {
            let w0 = 2.0 * h1 + h0;
            let w1 = h1 + 2.0 * h0;
            (w0 + w1) / (w0 / d0 + w1 / d1)
        }
    };

    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = interior(h[i - 1], h[i], delta[i - 1], delta[i]);
    }
    if periodic {
        // Wrap: the segment before the first knot is the last segment.
        d[0] = interior(h[n - 2], h[0], delta[n - 2], delta[0]);
        d[n - 1] = d[0];
    } else {
        d[0] = endpoint_tangent(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
        d[n - 1] = endpoint_tangent(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            delta[n - 2],
            if n >= 3 { delta[n - 3] } else { delta[n - 2] },
        );
    }
    Ok(d)
}

fn endpoint_tangent(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // Three-point one-sided estimate with the usual monotonicity clamps.
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d1 * d0 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Fritsch–Carlson tangent for a uniform grid from the two neighbouring
/// secants: harmonic mean when they agree in sign, zero otherwise.
#[inline]
pub fn fc_tangent_uniform(delta_minus: f64, delta_plus: f64) -> f64 {
    if delta_minus * delta_plus <= 0.0 {
        0.0
    } else {
        2.0 * delta_minus * delta_plus / (delta_minus + delta_plus)
    }
}
