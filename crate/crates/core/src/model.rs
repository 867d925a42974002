//! Symbolic orbit model of the two-generator group `G = <p, h>`.
//!
//! The model distance from the origin to `gamma . o` adds, syllable by
//! syllable, the horospherical cost `2 height(|m| s_p)` of a parabolic power
//! and the axis cost `|n| l_h` of a hyperbolic power, minus a configurable
//! junction defect `c` per syllable boundary. The bounded error terms of the
//! underlying geometry are deliberately set to zero; `c` is the single knob
//! standing in for them.
//!
//! Busemann cocycles, Gromov products, the visual metric and conformal
//! derivatives are all derived from this one distance function, so the
//! classical identities (cocycle relation, conformality) hold exactly here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::CuspMetric;
use crate::real::{half, lit, two, Real};
use crate::words::{BoundaryPoint, Letter, Word};

/// Maximum code depth explored before a depth error is raised.
pub const MAX_DEPTH: usize = 64;
/// Depth-stabilization threshold for boundary quantities.
pub const STABILITY_TOL: f64 = 1e-9;

/// Generator geometry plus the ambient cusp metric.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SchottkyModel<T> {
    /// Parabolic translation scale (norm of the translation vector).
    pub s_p: T,
    /// Hyperbolic translation length per power of `h`.
    pub l_h: T,
    /// Junction defect subtracted once per syllable boundary.
    pub c: T,
    pub metric: CuspMetric<T>,
}

/// Busemann cocycle value together with its depth-stability flag.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BusemannValue<T> {
    pub value: T,
    /// True when one extra code syllable leaves the value unchanged.
    pub stable: bool,
}

impl<T: Real> SchottkyModel<T> {
    pub fn new(s_p: T, l_h: T, c: T, metric: CuspMetric<T>) -> Self {
        Self { s_p, l_h, c, metric }
    }

    /// Same model over the metric with stripe depth `a`.
    pub fn at_a(&self, a: T) -> Self {
        Self {
            metric: self.metric.with_a(a),
            ..*self
        }
    }

    /// Cost of a single syllable.
    pub fn syllable_cost(&self, letter: Letter, exponent: i64) -> Result<T> {
        let n = lit::<T>(exponent.unsigned_abs() as f64);
        match letter {
            Letter::P => Ok(two::<T>() * self.metric.height(n * self.s_p)?),
            Letter::H => Ok(n * self.l_h),
        }
    }

    /// Model distance `d(o, gamma . o)`.
    pub fn orbit_distance(&self, gamma: &Word) -> Result<T> {
        if gamma.is_empty() {
            return Ok(T::zero());
        }
        let mut total = T::zero();
        for s in gamma.syllables() {
            total += self.syllable_cost(s.letter, s.exponent)?;
        }
        total -= self.c * lit::<T>((gamma.len() - 1) as f64);
        if total < T::zero() {
            return Err(Error::ModelConsistency {
                d: total.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(total)
    }

    /// Busemann cocycle `b(g, x) = d(g . w_x) - d(w_x)` for the code of `x`.
    pub fn busemann(&self, g: &Word, x: &BoundaryPoint) -> Result<BusemannValue<T>> {
        let value = self.busemann_at(g, x.code())?;
        let deeper = x.code_at_depth(x.depth() + 1);
        let value_deeper = self.busemann_at(g, &deeper)?;
        let stable = (value - value_deeper).abs() <= lit(STABILITY_TOL);
        Ok(BusemannValue { value, stable })
    }

    fn busemann_at(&self, g: &Word, code: &Word) -> Result<T> {
        let (prod, consumed) = g.mul_track(code);
        if consumed == code.len() && !g.is_empty() {
            return Err(Error::DepthError);
        }
        Ok(self.orbit_distance(&prod)? - self.orbit_distance(code)?)
    }

    /// Gromov product `(x|y)` based at the origin, evaluated at the deepest
    /// common truncation at which it has stabilized.
    ///
    /// Stability requires the value to survive two consecutive depth
    /// increments: a single unchanged step can be faked by a zero-cost
    /// syllable (`p^{+-1}` has cost `2 height(s_p)`, which vanishes at
    /// `s_p = 1`).
    pub fn gromov_product(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<T> {
        if x.code() == y.code() {
            return Err(Error::DepthError);
        }
        let mut prev: Option<(T, bool)> = None; // (value, one stable step seen)
        for depth in 1..=MAX_DEPTH {
            let w1 = x.code_at_depth(depth);
            let w2 = y.code_at_depth(depth);
            let v = self.gromov_at(&w1, &w2)?;
            if let Some((pv, one_step)) = prev {
                if (v - pv).abs() <= lit(STABILITY_TOL) {
                    if one_step {
                        return Ok(v);
                    }
                    prev = Some((v, true));
                } else {
                    prev = Some((v, false));
                }
            } else {
                prev = Some((v, false));
            }
        }
        Err(Error::DepthError)
    }

    fn gromov_at(&self, w1: &Word, w2: &Word) -> Result<T> {
        let cross = w1.inverse().mul(w2);
        Ok(half::<T>()
            * (self.orbit_distance(w1)? + self.orbit_distance(w2)?
                - self.orbit_distance(&cross)?))
    }

    /// Visual distance `D(x, y) = exp(-kappa (x|y))`; zero for equal codes.
    pub fn visual_distance(&self, kappa: T, x: &BoundaryPoint, y: &BoundaryPoint) -> Result<T> {
        if !(kappa > T::zero() && kappa <= T::one()) {
            return Err(Error::NonFinite { what: "kappa" });
        }
        if x.code() == y.code() {
            return Ok(T::zero());
        }
        Ok((-kappa * self.gromov_product(x, y)?).exp())
    }

    /// Conformal derivative `|gamma'(x)| = exp(-kappa b(gamma, x))`.
    pub fn conformal_derivative(&self, kappa: T, gamma: &Word, x: &BoundaryPoint) -> Result<T> {
        if !(kappa > T::zero() && kappa <= T::one()) {
            return Err(Error::NonFinite { what: "kappa" });
        }
        Ok((-kappa * self.busemann(gamma, x)?.value).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::UProfile;
    use crate::words::Word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    fn bp(text: &str) -> BoundaryPoint {
        BoundaryPoint::parse(text).unwrap()
    }

    fn model(a: f64, c: f64) -> SchottkyModel<f64> {
        SchottkyModel::new(
            2.0, // s_p > 1 keeps single parabolic syllables strictly positive
            2.0,
            c,
            CuspMetric::new(a, UProfile::lemma22(1.5, 0.125, 0.9)),
        )
    }

    fn random_reduced(rng: &mut ChaCha8Rng, len: usize) -> Word {
        let mut syll = Vec::new();
        let mut letter = if rng.gen_bool(0.5) { Letter::P } else { Letter::H };
        for _ in 0..len {
            let mut e: i64 = rng.gen_range(-5..=5);
            if e == 0 {
                e = 1;
            }
            syll.push((letter, e));
            letter = letter.other();
        }
        Word::from_syllables(syll)
    }

    #[test]
    fn axis_translation_is_defect_free() {
        let m = SchottkyModel::new(1.0, 2.0, 0.5, CuspMetric::hyperbolic());
        assert_eq!(m.orbit_distance(&w("h^3")).unwrap(), 6.0);
    }

    #[test]
    fn deep_stripe_parabolic_distance_is_two_log() {
        // with the stripe much deeper than the translate, height(|m|) = ln|m|
        let m = SchottkyModel::new(
            1.0,
            2.0,
            0.0,
            CuspMetric::new(500.0, UProfile::lemma22(1.5, 0.125, 0.9)),
        );
        for mm in [2i64, 10, 1000] {
            let d: f64 = m.orbit_distance(&Word::syllable(Letter::P, mm)).unwrap();
            assert!((d - 2.0 * (mm as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn junction_defect_arithmetic() {
        let m = model(0.0, 0.5);
        let d_p2 = m.orbit_distance(&w("p^2")).unwrap();
        let d = m.orbit_distance(&w("p^2 h^1")).unwrap();
        assert!((d - (d_p2 + 2.0 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn distance_symmetric_under_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = model(1.0, 0.25);
        for _ in 0..200 {
            let len = rng.gen_range(1..8);
            let g = random_reduced(&mut rng, len);
            let d = m.orbit_distance(&g).unwrap();
            let di = m.orbit_distance(&g.inverse()).unwrap();
            assert!((d - di).abs() < 1e-12);
            assert!(d >= 0.0);
        }
        assert_eq!(m.orbit_distance(&Word::identity()).unwrap(), 0.0);
    }

    #[test]
    fn strict_positivity_off_identity_for_separated_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = model(1.0, 0.0);
        for _ in 0..200 {
            let len = rng.gen_range(1..6);
            let g = random_reduced(&mut rng, len);
            assert!(m.orbit_distance(&g).unwrap() > 0.0, "d({g}) = 0");
        }
    }

    #[test]
    fn pathological_defect_detected() {
        let m = model(0.0, 50.0);
        assert!(matches!(
            m.orbit_distance(&w("p^1 h^1")),
            Err(Error::ModelConsistency { .. })
        ));
    }

    #[test]
    fn monotone_in_stripe_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let shallow = model(0.5, 0.0);
        let deep = model(2.5, 0.0);
        for _ in 0..100 {
            let len = rng.gen_range(1..7);
            let g = random_reduced(&mut rng, len);
            let ds = shallow.orbit_distance(&g).unwrap();
            let dd = deep.orbit_distance(&g).unwrap();
            assert!(ds >= dd - 1e-12, "d_a not monotone on {g}");
        }
    }

    #[test]
    fn busemann_identity_element_is_zero() {
        let m = model(1.0, 0.3);
        let x = bp("p^2 h^1 @4");
        let b = m.busemann(&Word::identity(), &x).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(b.stable);
    }

    #[test]
    fn busemann_cocycle_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = model(1.2, 0.4);
        let mut checked = 0;
        while checked < 500 {
            let (l1, l2, lx) = (rng.gen_range(1..5), rng.gen_range(1..5), rng.gen_range(3..9));
            let g1 = random_reduced(&mut rng, l1);
            let g2 = random_reduced(&mut rng, l2);
            let x = match BoundaryPoint::new(random_reduced(&mut rng, lx)) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let g2x = match x.apply(&g2) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let lhs = match m.busemann(&g1.mul(&g2), &x) {
                Ok(v) => v.value,
                Err(_) => continue,
            };
            let rhs = match (m.busemann(&g1, &g2x), m.busemann(&g2, &x)) {
                (Ok(a), Ok(b)) => a.value + b.value,
                _ => continue,
            };
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                "cocycle failed: {lhs} vs {rhs}"
            );
            checked += 1;
        }
    }

    #[test]
    fn busemann_of_axis_powers_tracks_orbit_distance() {
        let m = model(1.0, 0.3);
        let x = bp("p^3 h^-2 p^1 @5");
        for n in 1..=50i64 {
            let g = Word::syllable(Letter::H, n);
            let b = m.busemann(&g, &x).unwrap();
            assert!(b.stable);
            let gap = b.value - m.orbit_distance(&g).unwrap();
            // in the model the gap is exactly -c
            assert!((gap + 0.3).abs() < 1e-12, "n={n}: gap {gap}");
        }
    }

    #[test]
    fn busemann_full_cancellation_is_depth_error() {
        let m = model(1.0, 0.0);
        let x = bp("p^2 h^1 @2");
        assert!(matches!(
            m.busemann(&w("h^-1 p^-2"), &x),
            Err(Error::DepthError)
        ));
    }

    #[test]
    fn gromov_product_distinct_cells_vanishes_without_defect() {
        let m = model(1.0, 0.0);
        let x = bp("p^2 h^1 @6");
        let y = bp("h^-3 p^1 @6");
        assert!(m.gromov_product(&x, &y).unwrap().abs() < 1e-12);
        // and the visual distance is 1
        assert!((m.visual_distance(0.9, &x, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gromov_product_tracks_common_prefix() {
        let m = model(1.0, 0.0);
        // common prefix w = p^2 h^3, then diverge on fresh letters
        let x = bp("p^2 h^3 p^1 h^2 @8");
        let y = bp("p^2 h^3 p^-2 h^1 @8");
        let v = m.gromov_product(&x, &y).unwrap();
        let dw = m.orbit_distance(&w("p^2 h^3")).unwrap();
        // differing parabolic syllables contribute h(1)+h(2)-h(3) on top
        let hm = |k: f64| -> f64 { m.metric.height(k * m.s_p).unwrap() };
        let expected = dw + hm(1.0) + hm(2.0) - hm(3.0);
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
        // symmetry
        let vs = m.gromov_product(&y, &x).unwrap();
        assert!((v - vs).abs() < 1e-12);
    }

    #[test]
    fn gromov_product_of_prefix_pair_tracks_the_prefix() {
        // y extends x's code; truncations agree up to x's depth, the
        // canonical extension separates them one syllable later
        let m = model(1.0, 0.0);
        let x = bp("p^2 h^3");
        let y = bp("p^2 h^3 p^1 h^2 @5");
        let v: f64 = m.gromov_product(&x, &y).unwrap();
        let dw = m.orbit_distance(&w("p^2 h^3 p^1")).unwrap();
        // shared prefix continues through p^1, then h^1 (canonical) vs h^2
        let expected = dw + (1.0 * m.l_h + 2.0 * m.l_h - 1.0 * m.l_h) / 2.0;
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
    }

    #[test]
    fn gromov_stabilization_survives_null_syllables() {
        // s_p = 1 makes p^{+-1} cost zero; a one-step stability rule would
        // return too early on codes that agree past such a syllable
        let m = SchottkyModel::new(1.0, 2.0, 0.0, CuspMetric::hyperbolic());
        let x = bp("h^1 p^1 h^1 p^2 @4");
        let y = bp("h^1 p^1 h^2 p^2 @4");
        let v: f64 = m.gromov_product(&x, &y).unwrap();
        let expected = m.orbit_distance(&w("h^1 p^1")).unwrap() + (2.0 + 4.0 - 2.0) / 2.0;
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
    }

    #[test]
    fn visual_distance_zero_iff_equal_codes() {
        let m = model(1.0, 0.2);
        let x = bp("p^2 h^1 @5");
        assert_eq!(m.visual_distance(0.9, &x, &x.clone()).unwrap(), 0.0);
        assert!(m.visual_distance(1.5, &x, &x).is_err());
    }

    #[test]
    fn quasi_ultrametric_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = model(1.0, 0.2);
        let kappa = 0.9;
        let mut lambda_max: f64 = 0.0;
        let mut tried = 0;
        while tried < 1000 {
            let x = BoundaryPoint::new(random_reduced(&mut rng, 5)).unwrap();
            let y = BoundaryPoint::new(random_reduced(&mut rng, 5)).unwrap();
            let z = BoundaryPoint::new(random_reduced(&mut rng, 5)).unwrap();
            if x.code() == y.code() || y.code() == z.code() || x.code() == z.code() {
                continue;
            }
            let (dxz, dxy, dyz) = match (
                m.visual_distance(kappa, &x, &z),
                m.visual_distance(kappa, &x, &y),
                m.visual_distance(kappa, &y, &z),
            ) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => continue,
            };
            lambda_max = lambda_max.max(dxz / dxy.max(dyz));
            tried += 1;
        }
        assert!(
            lambda_max.is_finite() && lambda_max < 4.0,
            "quasi-ultrametric constant blew up: {lambda_max}"
        );
    }

    #[test]
    fn conformal_identity_element() {
        let m = model(1.0, 0.2);
        let x = bp("p^2 h^1 @5");
        assert_eq!(
            m.conformal_derivative(0.9, &Word::identity(), &x).unwrap(),
            1.0
        );
    }

    #[test]
    fn conformality_identity_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let m = model(1.3, 0.35);
        let kappa = 0.9;
        let mut checked = 0;
        while checked < 500 {
            let lg = rng.gen_range(1..5);
            let g = random_reduced(&mut rng, lg);
            let x = BoundaryPoint::new(random_reduced(&mut rng, 6)).unwrap();
            let y = BoundaryPoint::new(random_reduced(&mut rng, 6)).unwrap();
            if x.code() == y.code() {
                continue;
            }
            let (gx, gy) = match (x.apply(&g), y.apply(&g)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            if gx.code() == gy.code() {
                continue;
            }
            let lhs = match m.visual_distance(kappa, &gx, &gy) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let (dgx, dgy, dxy) = match (
                m.conformal_derivative(kappa, &g, &x),
                m.conformal_derivative(kappa, &g, &y),
                m.visual_distance(kappa, &x, &y),
            ) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => continue,
            };
            let rhs = (dgx * dgy).sqrt() * dxy;
            assert!(
                (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-12),
                "conformality failed: {lhs} vs {rhs}"
            );
            checked += 1;
        }
    }

    #[test]
    fn derivative_decays_geometrically_in_word_length() {
        // words ending away from the cell of x contract; the rate is
        // governed by the cheapest syllable cost minus the defect
        let m = model(1.0, 0.0);
        let kappa = 0.9;
        let x = bp("p^2 @3");
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut max_by_len = [0.0f64; 9];
        for _ in 0..4000 {
            let len = rng.gen_range(1..9usize);
            let mut g = random_reduced(&mut rng, len);
            if g.last_letter() == Some(Letter::P) {
                continue;
            }
            if g.is_empty() {
                continue;
            }
            if let Ok(d) = m.conformal_derivative(kappa, &g, &x) {
                max_by_len[g.len()] = max_by_len[g.len()].max(d);
            }
            g = g.inverse();
            let _ = g;
        }
        // compare lengths two apart to smooth parity effects
        for k in 2..7 {
            if max_by_len[k] > 0.0 && max_by_len[k + 2] > 0.0 {
                assert!(
                    max_by_len[k + 2] < max_by_len[k],
                    "no decay from length {k}: {} -> {}",
                    max_by_len[k],
                    max_by_len[k + 2]
                );
            }
        }
    }

    #[test]
    fn gromov_ratio_across_stripe_depths_two_sided() {
        // (x|y)_a and (x|y)_{a'} agree within a constant that tightens as
        // a' -> a; the ratio may dip slightly below 1 for opposite-sign
        // exponent pairs, so the bound is two-sided
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let profile = UProfile::lemma22(1.5, 0.125, 0.9);
        let make = |a: f64| SchottkyModel::new(2.0, 2.0, 0.0, CuspMetric::new(a, profile));
        let k_for = |a: f64, ap: f64, rng: &mut ChaCha8Rng| -> f64 {
            let ma = make(a);
            let mb = make(ap);
            let mut k: f64 = 1.0;
            let mut tried = 0;
            while tried < 300 {
                let x = BoundaryPoint::new(random_reduced(rng, 5)).unwrap();
                let y = BoundaryPoint::new(random_reduced(rng, 5)).unwrap();
                if x.code() == y.code() {
                    continue;
                }
                let (pa, pb) = match (ma.gromov_product(&x, &y), mb.gromov_product(&x, &y)) {
                    (Ok(a1), Ok(b1)) => (a1, b1),
                    _ => continue,
                };
                tried += 1;
                if pa.abs() < 1e-9 || pb.abs() < 1e-9 {
                    continue; // distinct-cell pairs carry no information
                }
                let r = pa / pb;
                k = k.max(r.max(1.0 / r));
            }
            k
        };
        let k_wide = k_for(0.5, 3.0, &mut rng);
        let k_near = k_for(0.5, 0.6, &mut rng);
        assert!(k_wide < 3.0, "K(0.5, 3.0) = {k_wide}");
        assert!(k_near < k_wide);
        assert!(k_near < 1.1, "K(0.5, 0.6) = {k_near}");
    }

    #[test]
    fn visual_metrics_holder_comparable_across_depths() {
        // D_0^{1/omega} <= D_a <= D_0^{omega} for a reported omega in (0,1]
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let profile = UProfile::lemma22(1.5, 0.125, 0.9);
        let m0 = SchottkyModel::new(2.0, 2.0, 0.0, CuspMetric::new(0.0, profile));
        let ma = SchottkyModel::new(2.0, 2.0, 0.0, CuspMetric::new(2.0, profile));
        let kappa = 0.9;
        let mut omega: f64 = 1.0;
        let mut tried = 0;
        while tried < 300 {
            let x = BoundaryPoint::new(random_reduced(&mut rng, 5)).unwrap();
            let y = BoundaryPoint::new(random_reduced(&mut rng, 5)).unwrap();
            if x.code() == y.code() {
                continue;
            }
            let (d0, da): (f64, f64) = match (
                m0.visual_distance(kappa, &x, &y),
                ma.visual_distance(kappa, &x, &y),
            ) {
                (Ok(a1), Ok(b1)) => (a1, b1),
                _ => continue,
            };
            tried += 1;
            if d0 >= 1.0 - 1e-12 || d0 <= 0.0 || da <= 0.0 {
                continue;
            }
            // omega such that d0^{1/omega} <= da <= d0^{omega}
            let r = da.ln() / d0.ln(); // both logs negative
            omega = omega.min(r.min(1.0 / r));
            tried += 0;
        }
        assert!(omega > 0.2, "omega_0 collapsed: {omega}");
        assert!(omega <= 1.0 + 1e-12);
    }
}
