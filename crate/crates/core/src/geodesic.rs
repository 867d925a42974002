//! Brute-force geodesic distance in the warped metric `T^2(t) dx^2 + dt^2`.
//!
//! For endpoints on the base horosphere `t = 0` at horizontal separation `D`,
//! the geodesic conserves the Clairaut integral `c = T(t)^2 dx/ds`, climbs to
//! the apex height where `T = |c|`, and comes back down. Horizontal span and
//! arclength reduce to one-dimensional integrals in `t`; the apex square-root
//! singularity is removed by the substitution `t = t_max - tau^2`.
//!
//! This module is the independent oracle against which the model distance
//! `2 * height(D)` is checked: it never looks at `height`, only at the raw
//! metric coefficient.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::CuspMetric;
use crate::quadrature::integrate_seeded;
use crate::real::{lit, Real};

/// A solved horosphere-to-horosphere geodesic.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GeodesicSolution<T> {
    /// Horizontal separation at `t = 0`.
    pub d: T,
    /// Clairaut constant `T(t)^2 dx/ds` along the path.
    pub clairaut_c: T,
    /// Turning height, where `T(apex_t) = clairaut_c`.
    pub apex_t: T,
    /// Geodesic length.
    pub length: T,
}

/// `-ln T(t)`: exact in the constant-curvature stripe, one profile inversion
/// above it.
fn neg_log_t<T: Real>(metric: &CuspMetric<T>, t: T) -> Result<T> {
    if t <= metric.a {
        Ok(t)
    } else {
        Ok(metric.a + metric.profile.invert_sigma(t - metric.a)?)
    }
}

/// `d/dt (-ln T(t)) = 1/U'(sigma)`, used to expand the apex difference where
/// subtracting two inversions would round below the noise floor.
fn neg_log_t_slope<T: Real>(metric: &CuspMetric<T>, t: T) -> Result<T> {
    if t <= metric.a {
        Ok(T::one())
    } else {
        let sigma = metric.profile.invert_sigma(t - metric.a)?;
        Ok(T::one() / metric.profile.eval_sigma(sigma)?.du)
    }
}

/// Integrate one half of the geodesic (base to apex) after the apex
/// substitution. `kind` selects the horizontal-span or arclength integrand.
fn half_integral<T: Real>(
    metric: &CuspMetric<T>,
    c: T,
    t_max: T,
    g_max: T,
    arclength: bool,
    abs_tol: T,
) -> Result<T> {
    let tau_max = t_max.sqrt();
    // seed a panel boundary at the branch junction t = a
    let mut breaks = vec![T::zero()];
    if metric.a > T::zero() && metric.a < t_max {
        breaks.push((t_max - metric.a).sqrt());
    }
    breaks.push(tau_max);
    // dg = -ln T(t) + ln T(t_max) >= 0; T^2 - c^2 = c^2 expm1(dg)(e^dg + 1).
    // Near the apex the difference of two profile inversions rounds below
    // the noise floor (and can even come out at -1e-16), so it is replaced
    // by its first-order expansion slope * tau^2 there.
    let slope_apex = neg_log_t_slope(metric, t_max)?;
    let tau_switch_sq = lit::<T>(1e-8) * T::one().max(t_max);
    let f = |tau: T| {
        let tt = tau * tau;
        let dg = if tt <= tau_switch_sq {
            slope_apex * tt
        } else {
            let t = t_max - tt;
            (g_max - neg_log_t(metric, t).unwrap_or(T::nan())).max(T::zero())
        };
        let e = dg.exp();
        let em1 = dg.exp_m1();
        let root = (em1 * (e + T::one())).sqrt();
        let two_tau = tau + tau;
        if arclength {
            // T / sqrt(T^2 - c^2) = e^dg / (c * root) * c  -> e^dg / root
            two_tau * e / root
        } else {
            // c / (T sqrt(T^2 - c^2)) = 1 / (c e^dg root)
            two_tau / (c * e * root)
        }
    };
    // progressively relax if the apex noise floor blocks the tight target
    let mut tol = abs_tol;
    for _ in 0..3 {
        match integrate_seeded(f, &breaks, tol, 10_000) {
            Ok(r) => return Ok(r.value),
            Err(Error::AccuracyError { .. }) => tol *= lit(10.0),
            Err(e) => return Err(e),
        }
    }
    integrate_seeded(f, &breaks, tol, 10_000).map(|r| r.value)
}

/// Horizontal span of the geodesic with Clairaut constant `c`.
fn span<T: Real>(metric: &CuspMetric<T>, c: T, abs_tol: T) -> Result<T> {
    let t_max = metric.height_log(-c.ln())?;
    let g_max = neg_log_t(metric, t_max)?;
    let half = half_integral(metric, c, t_max, g_max, false, abs_tol)?;
    Ok(half + half)
}

/// Solve the boundary-value problem: find the geodesic with horizontal
/// separation `D`, then measure its length.
///
/// The span is strictly decreasing in `c` on `(0, T(0)) = (0, 1)`, so plain
/// bisection (geometric while the bracket is wide) is safe.
pub fn clairaut_distance<T: Real>(metric: &CuspMetric<T>, d: T) -> Result<GeodesicSolution<T>> {
    if d <= T::zero() || !d.is_finite() {
        return Err(Error::NonFinite { what: "D" });
    }
    let scale = T::one().max(d);
    let quad_tol = lit::<T>(1e-12) * scale;
    let root_tol = lit::<T>(1e-10) * scale;

    let mut hi = T::one() - lit::<T>(1e-14); // span -> 0
    let mut lo = lit::<T>(0.5);
    let mut span_lo = span(metric, lo, quad_tol)?;
    let mut halvings = 0usize;
    while span_lo <= d {
        lo *= lit(0.5);
        halvings += 1;
        if halvings > 900 {
            return Err(Error::GeometryError {
                d: d.to_f64().unwrap_or(f64::NAN),
            });
        }
        span_lo = span(metric, lo, quad_tol)?;
    }
    let _ = span_lo;

    let mut c = lo;
    let mut ok = false;
    for _ in 0..200 {
        c = if hi / lo > lit(10.0) {
            (lo * hi).sqrt()
        } else {
            (lo + hi) * lit(0.5)
        };
        let s = span(metric, c, quad_tol)?;
        if (s - d).abs() <= root_tol {
            ok = true;
            break;
        }
        if s > d {
            lo = c;
        } else {
            hi = c;
        }
        if hi - lo <= lit::<T>(1e-16) * c {
            ok = true;
            break;
        }
    }
    if !ok {
        return Err(Error::GeometryError {
            d: d.to_f64().unwrap_or(f64::NAN),
        });
    }

    let t_max = metric.height_log(-c.ln())?;
    let g_max = neg_log_t(metric, t_max)?;
    let len_scale = T::one().max(t_max + t_max);
    let half = half_integral(metric, c, t_max, g_max, true, lit::<T>(1e-12) * len_scale)?;
    Ok(GeodesicSolution {
        d,
        clairaut_c: c,
        apex_t: t_max,
        length: half + half,
    })
}

/// One row of the oracle-vs-model scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeviationRow<T> {
    pub d: T,
    pub length: T,
    pub model: T,
    pub deviation: T,
}

/// Scan summary: worst deviation and the ratio of worst deviations over the
/// geometric upper vs lower half of the grid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeviationSummary<T> {
    pub max_dev: T,
    pub growth_ratio: T,
    pub bounded: bool,
}

pub struct DeviationScan<T> {
    pub rows: Vec<DeviationRow<T>>,
    pub summary: DeviationSummary<T>,
}

impl<T: Real> DeviationScan<T> {
    /// Largest `|deviation|` among rows with `lo <= D <= hi`.
    pub fn window_max(&self, lo: T, hi: T) -> T {
        self.rows
            .iter()
            .filter(|r| r.d >= lo && r.d <= hi)
            .fold(T::zero(), |acc, r| acc.max(r.deviation.abs()))
    }
}

/// Compare the geodesic oracle against the model distance `2 height(D)` on an
/// increasing grid of separations.
pub fn deviation_scan<T: Real>(metric: &CuspMetric<T>, d_grid: &[T]) -> Result<DeviationScan<T>> {
    let lengths = d_grid
        .iter()
        .map(|&d| clairaut_distance(metric, d).map(|s| s.length))
        .collect::<Result<Vec<T>>>()?;
    deviation_scan_from(metric, d_grid, &lengths)
}

/// [`deviation_scan`] over lengths already solved (e.g. in parallel).
pub fn deviation_scan_from<T: Real>(
    metric: &CuspMetric<T>,
    d_grid: &[T],
    lengths: &[T],
) -> Result<DeviationScan<T>> {
    if d_grid.is_empty() || d_grid.windows(2).any(|w| w[1] <= w[0]) || lengths.len() != d_grid.len()
    {
        return Err(Error::NonFinite { what: "D grid" });
    }
    let mut rows = Vec::with_capacity(d_grid.len());
    for (&d, &length) in d_grid.iter().zip(lengths) {
        let model = (T::one() + T::one()) * metric.height(d)?;
        rows.push(DeviationRow {
            d,
            length,
            model,
            deviation: length - model,
        });
    }
    let lo = d_grid[0];
    let hi = d_grid[d_grid.len() - 1];
    let split = (lo * hi).sqrt();
    let lower = rows
        .iter()
        .filter(|r| r.d <= split)
        .fold(T::zero(), |acc, r| acc.max(r.deviation.abs()));
    let upper = rows
        .iter()
        .filter(|r| r.d > split)
        .fold(T::zero(), |acc, r| acc.max(r.deviation.abs()));
    let growth_ratio = if lower > T::zero() {
        upper / lower
    } else if upper > T::zero() {
        T::infinity()
    } else {
        T::one()
    };
    let max_dev = lower.max(upper);
    Ok(DeviationScan {
        rows,
        summary: DeviationSummary {
            max_dev,
            growth_ratio,
            bounded: growth_ratio <= lit(1.1),
        },
    })
}

/// Log-spaced grid helper.
pub fn log_grid<T: Real>(lo: T, hi: T, points: usize) -> Vec<T> {
    assert!(points >= 2 && hi > lo && lo > T::zero());
    let llo = lo.ln();
    let lhi = hi.ln();
    (0..points)
        .map(|i| {
            let f = lit::<T>(i as f64 / (points - 1) as f64);
            (llo + (lhi - llo) * f).exp()
        })
        .collect()
}
