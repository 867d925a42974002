//! Cusp height profiles and the warped metric coefficient they induce.
//!
//! A profile is a non-decreasing C² function `u` on (0, ∞) with `u(s) = ln s`
//! near 0; it determines the metric coefficient
//!
//! ```text
//! T_{a,u}(t) = e^{-t}              for t <= a
//!            = e^{-a} / u^{-1}(t-a)  for t >= a
//! ```
//!
//! so the space carries constant curvature -1 in the stripe of depth `a` and a
//! slower-opening cusp above it. All evaluation happens in log coordinates
//! `sigma = ln s`: the interesting regimes sit at `s` up to `e^400`, far past
//! what a linear representation tolerates.
//!
//! Radial curvature is `K = -(2u' + s u'')/(s^2 (u')^3)`, which in sigma
//! coordinates collapses to `-(U' + U'')/(U')^3` for `U(sigma) = u(e^sigma)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{lit, two, Real};

/// Which height profile the cusp uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileVariant {
    /// `u(s) = ln s` everywhere: the constant-curvature model.
    PureLog,
    /// `u(s) = ln s` for `s <= e`, `ln s + alpha ln ln s` past the ramp.
    Lemma22,
    /// `u` determined by `u^{-1}(t) = e^{t/2 - sqrt(t)}` past the ramp.
    Remark24,
}

/// Value and first two derivatives of `U(sigma) = u(e^sigma)` with respect to
/// `sigma`.
#[derive(Clone, Copy, Debug)]
pub struct SigmaJet<T> {
    pub u: T,
    pub du: T,
    pub d2u: T,
}

/// Quintic smoothstep: C² ramp from (0,0) to (1,1) with vanishing first and
/// second derivatives at both ends.
fn smoothstep5<T: Real>(x: T) -> (T, T, T) {
    if x <= T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    if x >= T::one() {
        return (T::one(), T::zero(), T::zero());
    }
    let x2 = x * x;
    let x3 = x2 * x;
    let v = ((lit::<T>(6.0) * x - lit(15.0)) * x + lit(10.0)) * x3;
    let d = lit::<T>(30.0) * x2 * (x - T::one()) * (x - T::one());
    let d2 = lit::<T>(60.0) * x * (two::<T>() * x - T::one()) * (x - T::one());
    (v, d, d2)
}

/// A cusp height profile.
///
/// Immutable after construction; all evaluation is pure.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UProfile<T> {
    pub variant: ProfileVariant,
    /// Log-log coefficient (`Lemma22` only; zero otherwise).
    pub alpha: T,
    /// Ramp rate: the ramp occupies `sigma in [1, e^{1/epsilon0}]`.
    pub epsilon0: T,
    /// Target pinching constant in (0,1); curvature should stay `<= -kappa^2`.
    pub kappa: T,
}

impl<T: Real> UProfile<T> {
    pub fn pure_log() -> Self {
        Self {
            variant: ProfileVariant::PureLog,
            alpha: T::zero(),
            epsilon0: T::one(),
            kappa: lit(0.99),
        }
    }

    pub fn lemma22(alpha: T, epsilon0: T, kappa: T) -> Self {
        Self {
            variant: ProfileVariant::Lemma22,
            alpha,
            epsilon0,
            kappa,
        }
    }

    /// Lemma22 profile with the ramp rate chosen by [`calibrate_epsilon`].
    pub fn lemma22_calibrated(alpha: T, kappa: T) -> Result<Self> {
        let report = calibrate_epsilon(alpha, kappa)?;
        Ok(Self::lemma22(alpha, report.epsilon, kappa))
    }

    pub fn remark24() -> Self {
        Self {
            variant: ProfileVariant::Remark24,
            alpha: T::zero(),
            epsilon0: T::one(),
            // empirical pinching of this profile on the verification grid
            kappa: lit(0.29),
        }
    }

    /// `sigma` above which the asymptotic closed form holds exactly.
    ///
    /// For `Lemma22` this is `e^{1/epsilon0}` (`s_alpha = exp(exp(1/eps))` in
    /// linear scale); for `Remark24` the ramp ends at `sigma = 1`; the pure
    /// log profile is exact everywhere.
    pub fn sigma_exact(&self) -> T {
        match self.variant {
            ProfileVariant::PureLog => T::zero(),
            ProfileVariant::Lemma22 => (T::one() / self.epsilon0).exp(),
            ProfileVariant::Remark24 => T::one(),
        }
    }

    /// Evaluate `U(sigma)` together with its first two sigma-derivatives.
    pub fn eval_sigma(&self, sigma: T) -> Result<SigmaJet<T>> {
        if !sigma.is_finite() {
            return Err(Error::NonFinite { what: "sigma" });
        }
        let jet = match self.variant {
            ProfileVariant::PureLog => SigmaJet {
                u: sigma,
                du: T::one(),
                d2u: T::zero(),
            },
            ProfileVariant::Lemma22 => {
                if sigma <= T::one() {
                    SigmaJet {
                        u: sigma,
                        du: T::one(),
                        d2u: T::zero(),
                    }
                } else {
                    let eps = self.epsilon0;
                    let l = sigma.ln();
                    let w = eps * l;
                    let (s, ds, d2s) = smoothstep5(w);
                    let phi = self.alpha * s;
                    let dphi = self.alpha * ds;
                    let d2phi = self.alpha * d2s;
                    let u = sigma + phi * l;
                    let du = T::one() + (eps * l * dphi + phi) / sigma;
                    let d2u = (two::<T>() * eps * dphi + eps * eps * l * d2phi
                        - eps * l * dphi
                        - phi)
                        / (sigma * sigma);
                    SigmaJet { u, du, d2u }
                }
            }
            ProfileVariant::Remark24 => {
                if sigma <= T::zero() {
                    SigmaJet {
                        u: sigma,
                        du: T::one(),
                        d2u: T::zero(),
                    }
                } else {
                    // F(sigma) = (1 + sqrt(1+2 sigma))^2, the increasing branch
                    // of t/2 - sqrt(t) = sigma; ramped in from ln s on (0,1).
                    let root = (T::one() + two::<T>() * sigma).sqrt();
                    let f = two::<T>() * sigma + two() + two::<T>() * root;
                    let df = two::<T>() + two::<T>() / root;
                    let d2f = -two::<T>() / (root * root * root);
                    if sigma >= T::one() {
                        SigmaJet {
                            u: f,
                            du: df,
                            d2u: d2f,
                        }
                    } else {
                        let (psi, dpsi, d2psi) = smoothstep5(sigma);
                        let g = f - sigma;
                        let dg = df - T::one();
                        SigmaJet {
                            u: sigma + psi * g,
                            du: T::one() + dpsi * g + psi * dg,
                            d2u: d2psi * g + two::<T>() * dpsi * dg + psi * d2f,
                        }
                    }
                }
            }
        };
        Ok(jet)
    }

    /// `u(s)` and its first two derivatives with respect to `s`, for
    /// `sigma = ln s`. The s-derivatives underflow for very large sigma; the
    /// sigma-jet from [`eval_sigma`] is the stable representation.
    pub fn eval_u(&self, sigma: T) -> Result<(T, T, T)> {
        let jet = self.eval_sigma(sigma)?;
        let inv_s = (-sigma).exp();
        Ok((jet.u, jet.du * inv_s, (jet.d2u - jet.du) * inv_s * inv_s))
    }

    /// Radial curvature `K(u(s))` at `sigma = ln s`.
    pub fn curvature(&self, sigma: T) -> Result<T> {
        let jet = self.eval_sigma(sigma)?;
        if jet.du <= T::zero() {
            return Err(Error::DegenerateProfile {
                sigma: sigma.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(-(jet.du + jet.d2u) / (jet.du * jet.du * jet.du))
    }

    /// Solve `U(sigma) = t` for sigma by safeguarded Newton iteration.
    ///
    /// `U >= sigma` with `U(sigma) = sigma` for sigma <= 0, so the root is
    /// bracketed by `[min(t,0), t]`.
    pub fn invert_sigma(&self, t: T) -> Result<T> {
        if !t.is_finite() {
            return Err(Error::NonFinite { what: "t" });
        }
        if t <= T::zero() {
            return Ok(t); // exact log branch
        }
        // drive to machine precision; the contract only promises 1e-12
        let tol = T::epsilon() * lit::<T>(4.0) * T::one().max(t.abs());
        let mut lo = T::zero();
        let mut hi = t;
        let mut x = t; // start from the log-branch guess
        let mut best = (x, T::infinity());
        // Newton can crawl along one bracket endpoint on the steep ramp, so
        // force a bisection whenever two steps fail to halve the bracket
        let mut checkpoint_width = hi - lo;
        for i in 0..160 {
            let jet = self.eval_sigma(x)?;
            let err = jet.u - t;
            if err.abs() < best.1 {
                best = (x, err.abs());
            }
            if err.abs() <= tol {
                return Ok(x);
            }
            if err > T::zero() {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - err / jet.du;
            if i % 2 == 1 {
                if hi - lo > checkpoint_width * lit(0.5) {
                    next = (lo + hi) / two();
                }
                checkpoint_width = hi - lo;
            }
            if !(next > lo && next < hi) {
                next = (lo + hi) / two();
            }
            if next == x {
                break; // bracket at machine width
            }
            x = next;
        }
        if best.1 <= lit::<T>(1e-12) * T::one().max(t.abs()) {
            Ok(best.0)
        } else {
            Err(Error::RangeError {
                t: t.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// `u^{-1}(t)` in linear scale; overflows to infinity for very large `t`.
    pub fn invert_u(&self, t: T) -> Result<T> {
        Ok(self.invert_sigma(t)?.exp())
    }
}

/// Outcome of the pinching calibration sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CalibrationReport<T> {
    /// Largest ramp rate in the halving sequence that certifies pinching.
    pub epsilon: T,
    /// `ln s_alpha = e^{1/epsilon}`: where the asymptotic form becomes exact.
    pub sigma_alpha: T,
    /// Grid maximum of K (closest to zero); certified `<= -kappa^2`.
    pub k_max: T,
    /// Grid minimum of K; `B^2 = |k_min|` is the empirical lower pinching bound.
    pub k_min: T,
}

/// Number of points in the verification grid.
pub const GRID_POINTS: usize = 4000;
/// Verification grid range in sigma (log-spaced).
pub const GRID_SIGMA: (f64, f64) = (1.0, 400.0);

/// Log-spaced verification grid `sigma in [1, 400]`.
pub fn verification_grid<T: Real>() -> Vec<T> {
    let (lo, hi) = GRID_SIGMA;
    let llo = lo.ln();
    let lhi = hi.ln();
    (0..GRID_POINTS)
        .map(|i| {
            let f = i as f64 / (GRID_POINTS - 1) as f64;
            lit((llo + (lhi - llo) * f).exp())
        })
        .collect()
}

/// Check `K <= -kappa^2` on the verification grid; returns `(k_max, k_min)`
/// on success.
fn certify_pinching<T: Real>(profile: &UProfile<T>, kappa: T) -> Result<Option<(T, T)>> {
    let bound = -kappa * kappa;
    let mut k_max = T::neg_infinity();
    let mut k_min = T::infinity();
    for &sigma in &verification_grid::<T>() {
        let k = profile.curvature(sigma)?;
        k_max = k_max.max(k);
        k_min = k_min.min(k);
        if k > bound {
            return Ok(None);
        }
    }
    Ok(Some((k_max, k_min)))
}

/// Pick the largest `epsilon` in the halving sequence `1, 1/2, 1/4, ...` whose
/// ramp keeps the grid curvature below `-kappa^2`. Purely empirical: the grid
/// is the certificate, not a proof.
pub fn calibrate_epsilon<T: Real>(alpha: T, kappa: T) -> Result<CalibrationReport<T>> {
    if !(kappa > T::zero() && kappa < T::one()) || alpha < T::zero() {
        return Err(Error::CalibrationFailed {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            kappa: kappa.to_f64().unwrap_or(f64::NAN),
        });
    }
    let floor = lit::<T>(2f64.powi(-20));
    let mut eps = T::one();
    while eps >= floor {
        let profile = UProfile::lemma22(alpha, eps, kappa);
        if let Some((k_max, k_min)) = certify_pinching(&profile, kappa)? {
            return Ok(CalibrationReport {
                epsilon: eps,
                sigma_alpha: (T::one() / eps).exp(),
                k_max,
                k_min,
            });
        }
        eps /= two::<T>();
    }
    Err(Error::CalibrationFailed {
        alpha: alpha.to_f64().unwrap_or(f64::NAN),
        kappa: kappa.to_f64().unwrap_or(f64::NAN),
    })
}

/// The warped metric `T_{a,u}^2 dx^2 + dt^2`: constant curvature -1 in the
/// stripe `t <= a`, profile-governed above it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CuspMetric<T> {
    /// Depth of the constant-curvature stripe (non-negative).
    pub a: T,
    pub profile: UProfile<T>,
}

impl<T: Real> CuspMetric<T> {
    pub fn new(a: T, profile: UProfile<T>) -> Self {
        Self { a, profile }
    }

    /// Constant-curvature model regardless of `a`.
    pub fn hyperbolic() -> Self {
        Self::new(T::zero(), UProfile::pure_log())
    }

    pub fn with_a(&self, a: T) -> Self {
        Self { a, ..*self }
    }

    /// Metric coefficient `T_{a,u}(t)`.
    pub fn t_profile(&self, t: T) -> Result<T> {
        if !t.is_finite() {
            return Err(Error::NonFinite { what: "t" });
        }
        if t <= self.a {
            Ok((-t).exp())
        } else {
            // e^{-a} / u^{-1}(t - a), evaluated entirely in log scale
            let sigma = self.profile.invert_sigma(t - self.a)?;
            Ok((-self.a - sigma).exp())
        }
    }

    /// Horospherical height: the solution `t` of `T_{a,u}(t) * D = 1`,
    /// i.e. `ln D` for `D <= e^a` and `a + u(D e^{-a})` above.
    pub fn height_log(&self, sigma_d: T) -> Result<T> {
        if !sigma_d.is_finite() {
            return Err(Error::NonFinite { what: "ln D" });
        }
        if sigma_d <= self.a {
            Ok(sigma_d)
        } else {
            Ok(self.a + self.profile.eval_sigma(sigma_d - self.a)?.u)
        }
    }

    /// `height` for a linear-scale separation `D > 0`.
    pub fn height(&self, d: T) -> Result<T> {
        if d <= T::zero() || d.is_nan() {
            return Err(Error::NonFinite { what: "D" });
        }
        self.height_log(d.ln())
    }

    /// d(height)/d(sigma_D); always >= 1, which is what makes the height
    /// non-increasing in `a`.
    pub fn height_slope_log(&self, sigma_d: T) -> Result<T> {
        if sigma_d <= self.a {
            Ok(T::one())
        } else {
            Ok(self.profile.eval_sigma(sigma_d - self.a)?.du)
        }
    }
}
