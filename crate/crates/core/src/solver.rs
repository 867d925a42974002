//! Parameter continuation: generator calibration, the critical exponent as a
//! function of the stripe depth, the critical depth `a*` where the leading
//! eigenvalue crosses 1, the level-0 monotonicity certificate, and regime
//! classification.

use std::cell::{Cell, RefCell};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SchottkyModel;
use crate::real::{lit, Real};
use crate::series::{hyperbolic_letter_sum, parabolic_letter_sum, ps_finiteness, Verdict};
use crate::transfer::{build_level0, build_level1, divergence_diagnostic, level0_rho, power_iterate, RhoValue};

/// `|delta - 1/2|` band inside which the gap condition counts as failed.
pub const PGC_BAND: f64 = 5e-3;
/// Bisection tolerance on the critical exponent.
pub const DELTA_TOL: f64 = 1e-4;
/// Target `|rho(a*, 1/2) - 1|`.
pub const ASTAR_RHO_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeType {
    Convergent,
    Divergent,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PgcStatus {
    Holds,
    Fails,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureStatus {
    Finite,
    Infinite,
    NotApplicable,
    Undecided,
}

/// Classification of the group at one stripe depth.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegimeReport<T> {
    pub a: T,
    pub alpha: T,
    pub delta: T,
    pub rho_at_half: T,
    pub regime_type: RegimeType,
    pub pgc: PgcStatus,
    pub ps_measure: MeasureStatus,
}

impl<T: Real> RegimeReport<T> {
    pub fn undecided(&self) -> bool {
        self.regime_type == RegimeType::Undecided
            || self.pgc == PgcStatus::Undecided
            || self.ps_measure == MeasureStatus::Undecided
    }
}

/// One logged eigenvalue evaluation `(a, s, rho)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RhoSample<T> {
    pub a: T,
    pub s: T,
    pub rho: T,
}

/// Continuation driver around a calibrated model.
///
/// All solving uses the closed-form level-0 eigenvalue (fast and smooth in
/// both parameters); level 1 serves as a cross-check at the solution.
pub struct CriticalSolver<T> {
    pub model: SchottkyModel<T>,
    /// Series truncation for the one-letter sums.
    pub m: usize,
    log: RefCell<Vec<RhoSample<T>>>,
    predicates_checked: Cell<bool>,
}

impl<T: Real> CriticalSolver<T> {
    pub fn new(model: SchottkyModel<T>, m: usize) -> Self {
        Self {
            model,
            m,
            log: RefCell::new(Vec::new()),
            predicates_checked: Cell::new(false),
        }
    }

    /// Drain the `(a, s, rho)` evaluation log.
    pub fn take_log(&self) -> Vec<RhoSample<T>> {
        self.log.replace(Vec::new())
    }

    pub fn rho(&self, a: T, s: T) -> RhoValue<T> {
        let r = level0_rho(&self.model, a, s, self.m);
        self.log.borrow_mut().push(RhoSample {
            a,
            s,
            rho: r.finite().unwrap_or_else(T::infinity),
        });
        r
    }

    /// Monotonicity spot-check of the bisection predicates: rho nonincreasing
    /// in `s`, nondecreasing in `a`. Runs once per solver.
    fn check_predicates(&self) -> Result<()> {
        if self.predicates_checked.get() {
            return Ok(());
        }
        let a_grid = [lit::<T>(0.0), lit(1.0), lit(4.0), lit(16.0)];
        let s_grid = [lit::<T>(0.5), lit(0.6), lit(1.0), lit(2.0)];
        for &a in &a_grid {
            let mut prev = T::infinity();
            for &s in &s_grid {
                if let RhoValue::Finite(r) = self.rho(a, s) {
                    if r > prev + lit(1e-9) {
                        return Err(Error::ModelConsistency {
                            d: r.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                    prev = r;
                }
            }
        }
        for &s in &s_grid {
            let mut prev = T::zero();
            for &a in &a_grid {
                if let RhoValue::Finite(r) = self.rho(a, s) {
                    if r < prev - lit(1e-9) {
                        return Err(Error::ModelConsistency {
                            d: r.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                    prev = r;
                }
            }
        }
        self.predicates_checked.set(true);
        Ok(())
    }

    /// Critical exponent at stripe depth `a`:
    /// `delta(a) = sup { s : rho(a, s) >= 1 }`, clamped to 1/2 from below
    /// (the parabolic factor diverges for s < 1/2).
    pub fn find_delta(&self, a: T) -> Result<T> {
        self.check_predicates()?;
        let half = lit::<T>(0.5);
        let r_half = self.rho(a, half);
        if !r_half.at_least_one() {
            return Ok(half);
        }
        let mut lo = half;
        let mut hi = lit::<T>(2.0);
        if self.rho(a, hi).at_least_one() {
            return Err(Error::BracketError);
        }
        while hi - lo > lit(DELTA_TOL) {
            let mid = (lo + hi) * lit(0.5);
            if self.rho(a, mid).at_least_one() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) * lit(0.5))
    }

    /// Critical exponent measured on the level-1 discretization (cross-check
    /// path; bisects the power-iterated eigenvalue instead of the closed form).
    pub fn find_delta_level1(&self, a: T, depth: usize, m_exp: usize) -> Result<T> {
        let rho1 = |s: T| -> Result<RhoValue<T>> {
            let mat = build_level1(&self.model, a, s, depth, m_exp)?;
            if mat.infinite {
                return Ok(RhoValue::Infinite);
            }
            Ok(RhoValue::Finite(
                power_iterate(&mat, lit(1e-8), 100_000)?.rho,
            ))
        };
        let half = lit::<T>(0.5);
        if !rho1(half)?.at_least_one() {
            return Ok(half);
        }
        let mut lo = half;
        let mut hi = lit::<T>(2.0);
        if rho1(hi)?.at_least_one() {
            return Err(Error::BracketError);
        }
        while hi - lo > lit(DELTA_TOL) {
            let mid = (lo + hi) * lit(0.5);
            if rho1(mid)?.at_least_one() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) * lit(0.5))
    }

    /// Critical stripe depth: the crossing `rho(a*, 1/2) = 1`, found by
    /// doubling until the eigenvalue exceeds 1 and then bisecting.
    pub fn find_a_star(&self, a_max: T) -> Result<T> {
        self.check_predicates()?;
        let half = lit::<T>(0.5);
        if self.rho(T::zero(), half).at_least_one() {
            // no convergent regime below: calibration precondition violated
            return Err(Error::AStarRange {
                a_max: a_max.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut lo = T::zero();
        let mut hi = T::one();
        while !self.rho(hi, half).at_least_one() {
            lo = hi;
            hi *= lit::<T>(2.0);
            if hi > a_max {
                return Err(Error::AStarRange {
                    a_max: a_max.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            match self.rho(mid, half) {
                RhoValue::Finite(r) => {
                    if (r - T::one()).abs() <= lit(ASTAR_RHO_TOL) {
                        return Ok(mid);
                    }
                    if r >= T::one() {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                RhoValue::Infinite => hi = mid,
            }
            if hi - lo < lit(1e-13) {
                break;
            }
        }
        Ok((lo + hi) * lit(0.5))
    }

    /// Level-0 certificate for strict monotonicity of the eigenvalue in `a`:
    /// the ratio of even-length orbital sums at depths `a < a_prime` decays
    /// like `C rho^k` with `rho < 1`.
    pub fn monotonicity_certificate(&self, a: T, a_prime: T, k_max: usize) -> Result<(T, T)> {
        if a == a_prime {
            return Ok((T::one(), T::one()));
        }
        if a > a_prime {
            return Err(Error::BracketError);
        }
        let half = lit::<T>(0.5);
        let w_p = |aa: T| -> Result<T> {
            parabolic_letter_sum(&self.model.at_a(aa).metric, self.model.s_p, half, self.m)
                .estimate()
                .ok_or(Error::ParabolicSumDivergent)
        };
        let a_num = w_p(a)?;
        let a_den = w_p(a_prime)?;
        let b = hyperbolic_letter_sum(self.model.l_h, half).ok_or(Error::BracketError)?;
        let j = (half * self.model.c).exp();
        // R_k = sum_{|gamma|=2k} e^{-d_a/2} / (same at a'); the product
        // formula gives 2 A^k B^k J^{2k-1} for each side
        let mut ratios = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let num = lit::<T>(2.0) * a_num.powi(k as i32) * b.powi(k as i32)
                * j.powi(2 * k as i32 - 1);
            let den = lit::<T>(2.0) * a_den.powi(k as i32) * b.powi(k as i32)
                * j.powi(2 * k as i32 - 1);
            ratios.push(num / den);
        }
        // geometric fit: rho from the mean log-increment, C from the worst row
        let mut slope_acc = T::zero();
        for w in ratios.windows(2) {
            slope_acc += (w[1] / w[0]).ln();
        }
        let rho_emp = (slope_acc / lit((k_max - 1).max(1) as f64)).exp();
        let mut c_emp = T::zero();
        for (i, &r) in ratios.iter().enumerate() {
            c_emp = c_emp.max(r / rho_emp.powi(i as i32 + 1));
        }
        if rho_emp >= T::one() {
            return Err(Error::CertificateFailure {
                rho: rho_emp.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok((c_emp, rho_emp))
    }

    /// Full regime classification at stripe depth `a`.
    pub fn classify(&self, a: T) -> Result<RegimeReport<T>> {
        let half = lit::<T>(0.5);
        let delta = self.find_delta(a)?;
        let rho_at_half = self
            .rho(a, half)
            .finite()
            .unwrap_or_else(T::infinity);
        let matrix = build_level0(&self.model, a, delta, self.m)?;
        let diag = divergence_diagnostic(&matrix, 64)?;
        let regime_type = match diag.verdict {
            Verdict::Diverges => RegimeType::Divergent,
            Verdict::Converges => RegimeType::Convergent,
            Verdict::Undecided => RegimeType::Undecided,
        };
        let pgc = if delta > half + lit(PGC_BAND) {
            PgcStatus::Holds
        } else if (delta - half).abs() <= lit(PGC_BAND) {
            PgcStatus::Fails
        } else {
            PgcStatus::Undecided
        };
        let ps_measure = if regime_type == RegimeType::Divergent && pgc == PgcStatus::Fails {
            let est = ps_finiteness(&self.model.at_a(a).metric, half, self.m)?;
            match est.verdict {
                Verdict::Converges => MeasureStatus::Finite,
                Verdict::Diverges => MeasureStatus::Infinite,
                Verdict::Undecided => MeasureStatus::Undecided,
            }
        } else {
            MeasureStatus::NotApplicable
        };
        Ok(RegimeReport {
            a,
            alpha: self.model.metric.profile.alpha,
            delta,
            rho_at_half,
            regime_type,
            pgc,
            ps_measure,
        })
    }

    /// Classification bracketed over the two junction defects `{0, c}`; the
    /// regime verdicts must agree or the combined row is undecided.
    pub fn classify_bracket(&self, a: T) -> Result<(RegimeReport<T>, Option<RegimeReport<T>>)> {
        let base = self.classify(a)?;
        if self.model.c == T::zero() {
            return Ok((base, None));
        }
        let mut zero_model = self.model;
        zero_model.c = T::zero();
        let zero_solver = CriticalSolver::new(zero_model, self.m);
        let other = zero_solver.classify(a)?;
        Ok((base, Some(other)))
    }
}

/// Replace `h` by its smallest power making the paired one-letter sums
/// contract at `(a, s) = (0, 1/2)`: the least `k >= 1` with
/// `e^c S_p(0,1/2) S_h^{(k)}(0,1/2) < 1`, where `S_h^{(k)}` uses the axis
/// length `k l_h`. Returns the power and the recalibrated model.
pub fn calibrate_h<T: Real>(model: &SchottkyModel<T>, m: usize) -> Result<(usize, SchottkyModel<T>)> {
    let half = lit::<T>(0.5);
    let base = model.at_a(T::zero());
    let s_p = parabolic_letter_sum(&base.metric, base.s_p, half, m)
        .upper()
        .ok_or(Error::ParabolicSumDivergent)?;
    let defect = (base.c).exp();
    for k in 1..=64usize {
        let l = base.l_h * lit(k as f64);
        if let Some(s_h) = hyperbolic_letter_sum(l, half) {
            if defect * s_p * s_h < T::one() {
                let mut out = *model;
                out.l_h = l;
                return Ok((k, out));
            }
        }
    }
    Err(Error::ParabolicSumDivergent)
}
