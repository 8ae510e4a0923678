//! Evaluation of the quasimodular bundle at a half-plane point.
//!
//! Everything is computed from the classical q-expansions
//!
//! ```text
//! E2 = 1 - 24 sum sigma1(n) q^n
//! E4 = 1 + 240 sum sigma3(n) q^n
//! E6 = 1 - 504 sum sigma5(n) q^n
//! ```
//!
//! together with the exact prefactors `g2 = (4 pi^4 / 3) E4`,
//! `g3 = (8 pi^6 / 27) E6`, `eta1 = (pi^2 / 3) E2` and the Legendre relation
//! `eta2 = tau eta1 - 2 pi i`.
//!
//! The combination `g2^2 - 18 eta1 g3` vanishes exactly at the critical
//! points of `E6` and decays like `1792 pi^8 q` at the cusp, so forming it
//! from products would lose all accuracy high in the half-plane. It is
//! therefore evaluated through its own expansion
//! `1792 pi^8 sum n sigma5(n) q^n`, and its tau-derivative through
//! `2 pi i * 1792 pi^8 sum n^2 sigma5(n) q^n`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfplane::{serialize_complex, HalfPlanePoint};
use crate::real::{cx, i_unit, Real};
use crate::series::eval_sums;

/// Series evaluation budget and floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Precision<T> {
    /// Absolute truncation target for the normalized series.
    pub target_abs_error: T,
    /// Hard cap on the number of q-series terms.
    pub max_terms: usize,
    /// Points below this height must be reduced before series evaluation.
    pub min_im_for_series: T,
}

impl<T: Real> Default for Precision<T> {
    fn default() -> Self {
        Self {
            target_abs_error: T::lit(1e-12).max(T::epsilon() * T::lit(64.0)),
            max_terms: 300,
            min_im_for_series: T::lit(0.3),
        }
    }
}

impl<T: Real> Precision<T> {
    pub fn with_target(target: T) -> Self {
        Self { target_abs_error: target, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let floor = T::epsilon() * T::lit(64.0);
        if self.target_abs_error.is_nan() || self.target_abs_error < floor {
            return Err(Error::InvalidPrecision(format!(
                "target_abs_error must be >= 64*eps = {:e}",
                floor.to_f64().unwrap_or(f64::NAN)
            )));
        }
        if self.max_terms < 8 {
            return Err(Error::InvalidPrecision("max_terms must be >= 8".into()));
        }
        if self.max_terms > 1 << 20 {
            return Err(Error::InvalidPrecision("max_terms is unreasonably large".into()));
        }
        if self.min_im_for_series.is_nan() || self.min_im_for_series <= T::zero() {
            return Err(Error::InvalidPrecision("min_im_for_series must be positive".into()));
        }
        Ok(())
    }
}

/// Per-quantity absolute error bounds (series tail + rounding floor).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrBounds<T> {
    pub e2: T,
    pub e4: T,
    pub e6: T,
    pub g2: T,
    pub g3: T,
    pub eta1: T,
    pub eta2: T,
    pub discriminant: T,
    pub crit: T,
    pub crit_prime: T,
}

/// The full quasimodular bundle at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EisensteinEval<T: Real + Serialize> {
    pub tau: HalfPlanePoint<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub g2: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub g3: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub eta1: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub eta2: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub e2: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub e4: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub e6: Complex<T>,
    /// `g2^3 - 27 g3^2`; nonzero on the whole half-plane.
    #[serde(serialize_with = "serialize_complex")]
    pub discriminant: Complex<T>,
    /// `g2^2 - 18 eta1 g3`, from its dedicated cancellation-free series.
    #[serde(serialize_with = "serialize_complex")]
    pub crit: Complex<T>,
    /// tau-derivative of `crit`, also from a dedicated series.
    #[serde(serialize_with = "serialize_complex")]
    pub crit_prime: Complex<T>,
    /// Max of the per-field bounds below; a certified absolute error.
    pub err_bound: T,
    pub errs: ErrBounds<T>,
    /// Modulus sum of the `crit` series terms; the natural local scale for
    /// residual tests of near-zero values of `crit`.
    pub crit_scale: T,
}

impl<T: Real + Serialize> EisensteinEval<T> {
    /// `sum n sigma5(n) q^n = crit / (1792 pi^8)`, the differentiated
    /// weight-six series.
    pub fn s1(&self) -> Complex<T> {
        let pi = T::PI();
        let pi8 = (pi * pi * pi * pi).powi(2);
        self.crit / (T::lit(1792.0) * pi8)
    }

    /// Legendre defect `|eta2 - (tau eta1 - 2 pi i)|`; zero by construction
    /// for direct evaluations, nonzero after group transforms.
    pub fn legendre_residual(&self) -> T {
        let two_pi_i = cx::<T>(0.0, 2.0) * T::PI();
        (self.eta2 - (self.tau.to_complex() * self.eta1 - two_pi_i)).norm()
    }
}

/// Evaluates the bundle at `tau` by q-expansion.
///
/// Requires `im(tau) >= prec.min_im_for_series`; callers with arbitrary
/// points go through [`crate::modular::eval_anywhere`], which reduces into a
/// fundamental domain first.
pub fn eval<T: Real + Serialize>(
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<EisensteinEval<T>> {
    prec.validate()?;
    if tau.im() < prec.min_im_for_series {
        return Err(Error::BelowSeriesFloor {
            im: tau.im().to_f64().unwrap_or(f64::NAN),
            floor: prec.min_im_for_series.to_f64().unwrap_or(f64::NAN),
        });
    }
    let q = tau.nome();
    let sums = eval_sums(q, prec.target_abs_error, prec.max_terms).map_err(|(bound, n)| {
        Error::PrecisionUnreachable {
            target: prec.target_abs_error.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::NAN),
            max_terms: n,
        }
    })?;

    let pi = T::PI();
    let pi2 = pi * pi;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let one = Complex::new(T::one(), T::zero());

    let e2 = one - sums.f1 * T::lit(24.0);
    let e4 = one + sums.f3 * T::lit(240.0);
    let e6 = one - sums.f5 * T::lit(504.0);
    let eta1 = e2 * (pi2 / T::lit(3.0));
    let g2 = e4 * (pi4 * T::lit(4.0) / T::lit(3.0));
    let g3 = e6 * (pi6 * T::lit(8.0) / T::lit(27.0));
    let two_pi_i = i_unit::<T>() * (pi + pi);
    let eta2 = tau.to_complex() * eta1 - two_pi_i;
    let discriminant = g2 * g2 * g2 - g3 * g3 * T::lit(27.0);
    let crit_pref = T::lit(1792.0) * pi8;
    let crit = sums.s1 * crit_pref;
    let crit_prime = sums.s2 * crit_pref * two_pi_i;

    // Error bounds: certified series tails plus a small rounding floor
    // proportional to the accumulated term moduli.
    let ulp = T::epsilon() * T::lit(8.0);
    let e2_err = sums.tails[0] * T::lit(24.0) + ulp * (T::one() + sums.abs_f1 * T::lit(24.0));
    let e4_err = sums.tails[1] * T::lit(240.0) + ulp * (T::one() + sums.abs_f3 * T::lit(240.0));
    let e6_err = sums.tails[2] * T::lit(504.0) + ulp * (T::one() + sums.abs_f5 * T::lit(504.0));
    let g2_err = e4_err * (pi4 * T::lit(4.0) / T::lit(3.0));
    let g3_err = e6_err * (pi6 * T::lit(8.0) / T::lit(27.0));
    let eta1_err = e2_err * (pi2 / T::lit(3.0));
    let eta2_err = tau.to_complex().norm() * eta1_err + ulp * (pi + pi);
    let crit_err = (sums.tails[3] + ulp * sums.abs_s1) * crit_pref;
    let crit_prime_err = (sums.tails[4] + ulp * sums.abs_s2) * crit_pref * (pi + pi);
    // First-order propagation into the discriminant plus an explicit
    // floating-point cancellation allowance: the two cubes nearly cancel
    // high in the half-plane, where Delta itself tends to zero.
    let g2n = g2.norm();
    let g3n = g3.norm();
    let disc_err = T::lit(3.0) * g2n * g2n * g2_err
        + T::lit(54.0) * g3n * g3_err
        + T::epsilon() * T::lit(16.0) * (g2n.powi(3) + T::lit(27.0) * g3n * g3n);

    let err_bound = [e2_err, e4_err, e6_err, g2_err, g3_err, eta1_err, eta2_err, disc_err]
        .into_iter()
        .fold(T::zero(), T::max);

    Ok(EisensteinEval {
        tau,
        g2,
        g3,
        eta1,
        eta2,
        e2,
        e4,
        e6,
        discriminant,
        crit,
        crit_prime,
        err_bound,
        errs: ErrBounds {
            e2: e2_err,
            e4: e4_err,
            e6: e6_err,
            g2: g2_err,
            g3: g3_err,
            eta1: eta1_err,
            eta2: eta2_err,
            discriminant: disc_err,
            crit: crit_err,
            crit_prime: crit_prime_err,
        },
        crit_scale: sums.abs_s1 * crit_pref + T::min_positive_value(),
    })
}

/// Closed-form tau-derivatives of the bundle; no numerical differentiation.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeBundle<T> {
    pub g2_prime: Complex<T>,
    pub g3_prime: Complex<T>,
    pub eta1_prime: Complex<T>,
    /// Derivative of `g2^2 - 18 eta1 g3`, from the product closed form
    /// `(7i/4pi)(4 eta1 g2^2 - 36 eta1^2 g3 - 3 g2 g3)`.
    pub crit_prime: Complex<T>,
}

/// The classical first-derivative identities:
/// `eta1' = (i/24pi)(12 eta1^2 - g2)`, `g2' = (i/pi)(2 eta1 g2 - 3 g3)`,
/// `g3' = (-i/6pi)(g2^2 - 18 eta1 g3)`.
pub fn derivative_bundle<T: Real + Serialize>(ev: &EisensteinEval<T>) -> DerivativeBundle<T> {
    let pi = T::PI();
    let i = i_unit::<T>();
    let eta1 = ev.eta1;
    let g2 = ev.g2;
    let g3 = ev.g3;
    let eta1_prime = i / (T::lit(24.0) * pi) * (eta1 * eta1 * T::lit(12.0) - g2);
    let g2_prime = i / pi * (eta1 * g2 * T::lit(2.0) - g3 * T::lit(3.0));
    let g3_prime = -i / (T::lit(6.0) * pi) * ev.crit;
    let crit_prime = i * T::lit(7.0) / (T::lit(4.0) * pi)
        * (eta1 * g2 * g2 * T::lit(4.0)
            - eta1 * eta1 * g3 * T::lit(36.0)
            - g2 * g3 * T::lit(3.0));
    DerivativeBundle { g2_prime, g3_prime, eta1_prime, crit_prime }
}

/// `| pi i (E2 E6 - E4^2) - E6' |` where `E6'` comes from term-by-term
/// differentiation of the `E6` series. The two routes are computed
/// independently, so the residual measures how well the derivative identity
/// closes numerically.
pub fn ramanujan_residual<T: Real + Serialize>(ev: &EisensteinEval<T>) -> T {
    let lhs = i_unit::<T>() * T::PI() * (ev.e2 * ev.e6 - ev.e4 * ev.e4);
    let rhs = -i_unit::<T>() * T::PI() * T::lit(1008.0) * ev.s1();
    (lhs - rhs).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn p() -> Precision<f64> {
        Precision::default()
    }

    fn at(re: f64, im: f64) -> EisensteinEval<f64> {
        eval(HalfPlanePoint::new(re, im).unwrap(), &p()).unwrap()
    }

    #[test]
    fn cusp_limit_values() {
        // q -> 0: all normalized series tend to 1
        let ev = at(0.5, 40.0);
        assert!((ev.e2 - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!((ev.e4 - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!((ev.e6 - C::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn g2_vanishes_at_the_order_three_corner() {
        // tau = 1/2 + (sqrt3/2) i: g2 = 0 and eta1 = 2 pi / sqrt3
        let ev = at(0.5, 3f64.sqrt() / 2.0);
        assert!(ev.g2.norm() <= ev.err_bound, "|g2| = {:e}", ev.g2.norm());
        let expect = 2.0 * std::f64::consts::PI / 3f64.sqrt();
        assert!((ev.eta1 - C::new(expect, 0.0)).norm() <= ev.err_bound);
    }

    #[test]
    fn g3_vanishes_at_the_order_two_corner() {
        let ev = at(0.5, 0.5);
        assert!(ev.g3.norm() <= ev.err_bound, "|g3| = {:e}", ev.g3.norm());
    }

    #[test]
    fn precision_unreachable_is_reported() {
        let prec = Precision { target_abs_error: 1e-13, max_terms: 8, min_im_for_series: 0.3 };
        let r = eval(HalfPlanePoint::new(0.0f64, 0.3).unwrap(), &prec);
        assert!(matches!(r, Err(Error::PrecisionUnreachable { .. })));
    }

    #[test]
    fn below_floor_is_rejected() {
        let r = eval(HalfPlanePoint::new(0.0f64, 0.1).unwrap(), &p());
        assert!(matches!(r, Err(Error::BelowSeriesFloor { .. })));
    }

    #[test]
    fn crit_series_matches_products_at_moderate_height() {
        // the dedicated series and the naive product combination agree where
        // the products are still well conditioned
        for (re, im) in [(0.3, 0.9), (0.1, 1.4), (0.7, 2.0)] {
            let ev = at(re, im);
            let direct = ev.g2 * ev.g2 - ev.eta1 * ev.g3 * 18.0;
            assert!(
                (ev.crit - direct).norm() <= 1e-10 * direct.norm().max(1.0),
                "crit mismatch at {re}+{im}i: {:e}",
                (ev.crit - direct).norm()
            );
        }
    }

    #[test]
    fn crit_prime_matches_closed_form() {
        for (re, im) in [(0.3, 0.9), (0.25, 1.3)] {
            let ev = at(re, im);
            let d = derivative_bundle(&ev);
            assert!((ev.crit_prime - d.crit_prime).norm() <= 1e-9 * d.crit_prime.norm());
        }
    }

    #[test]
    fn derivative_bundle_matches_finite_differences() {
        // central differences along the real direction, step 1e-5,
        // relative 1e-6 for each closed form
        let (re, im) = (0.41, 1.15);
        let ev = at(re, im);
        let d = derivative_bundle(&ev);
        let h = 1e-5;
        let plus = at(re + h, im);
        let minus = at(re - h, im);
        let fd = |a: C, b: C| (a - b) / (2.0 * h);
        for (closed, diff, name) in [
            (d.g2_prime, fd(plus.g2, minus.g2), "g2'"),
            (d.g3_prime, fd(plus.g3, minus.g3), "g3'"),
            (d.eta1_prime, fd(plus.eta1, minus.eta1), "eta1'"),
            (d.crit_prime, fd(plus.crit, minus.crit), "crit'"),
        ] {
            let rel = (closed - diff).norm() / diff.norm();
            assert!(rel < 1e-6, "{name}: relative gap {rel:e}");
        }
    }

    #[test]
    fn crit_cusp_asymptotics() {
        // crit = 1792 pi^8 q (1 + 66 q) + O(q^3)
        let tau = HalfPlanePoint::new(0.5f64, 3.0).unwrap();
        let ev = eval(tau, &p()).unwrap();
        let q = tau.nome();
        let pref = 1792.0 * std::f64::consts::PI.powi(8);
        let lead = q * (C::new(1.0, 0.0) + q * 66.0) * pref;
        assert!((ev.crit - lead).norm() < 1e-4 * ev.crit.norm());
    }

    #[test]
    fn ramanujan_residual_small() {
        assert!(ramanujan_residual(&at(0.5, 40.0)) < 1e-12);
        assert!(ramanujan_residual(&at(0.25, 0.9)) < 1e-9);
    }

    #[test]
    fn e2e6_balances_e4_squared_at_the_critical_point() {
        // the zero of E6' on the half-line is where E2 E6 - E4^2 vanishes;
        // the ten-digit reference height carries ~5e-11 of truncation, which
        // the derivative of the combination amplifies to ~1e-8
        let ev = at(0.5, 0.6341269863);
        assert!((ev.e2 * ev.e6 - ev.e4 * ev.e4).norm() < 5e-8);
        let exact = crate::locator::find_tau_infinity(&p()).unwrap();
        let ev = at(exact.tau.re(), exact.tau.im());
        assert!((ev.e2 * ev.e6 - ev.e4 * ev.e4).norm() < 1e-12);
    }

    #[test]
    fn crit_leading_term_high_in_the_plane() {
        // g2^2 - 18 eta1 g3 = 1792 pi^8 q (1 + O(q)) still carries full
        // relative accuracy at height 40 where q ~ 1e-110
        let tau = HalfPlanePoint::new(0.5f64, 40.0).unwrap();
        let ev = eval(tau, &p()).unwrap();
        let lead = tau.nome() * 1792.0 * std::f64::consts::PI.powi(8);
        assert!(ev.crit.norm() > 0.0);
        assert!((ev.crit - lead).norm() < 1e-8 * lead.norm());
        let d = derivative_bundle(&ev);
        let g3p = -Complex::new(0.0, 1.0) / (6.0 * std::f64::consts::PI) * ev.crit;
        assert!((d.g3_prime - g3p).norm() <= 1e-15 * g3p.norm().max(1e-300));
    }

    #[test]
    fn reduced_second_derivative_form_at_the_critical_point() {
        // where crit vanishes, crit' collapses to (21i/4pi) g3 (12 eta1^2 - g2),
        // which must be nonzero (simplicity of the critical point)
        let ev = at(0.5, 0.6341269863);
        assert!(ev.crit.norm() < 1e-7 * ev.crit_scale.max(1.0));
        let d = derivative_bundle(&ev);
        let pi = std::f64::consts::PI;
        let reduced = Complex::new(0.0, 21.0 / (4.0 * pi))
            * ev.g3
            * (ev.eta1 * ev.eta1 * 12.0 - ev.g2);
        assert!(reduced.norm() > 1.0);
        assert!((d.crit_prime - reduced).norm() < 1e-6 * reduced.norm());
        assert!((ev.crit_prime - reduced).norm() < 1e-6 * reduced.norm());
    }

    #[test]
    fn reality_on_the_imaginary_axis() {
        for b in [0.8, 1.0, 1.7, 3.0] {
            let ev = at(0.0, b);
            assert!(ev.g2.re > 0.0);
            assert!(ev.g2.im.abs() <= ev.err_bound);
            assert!(ev.g3.im.abs() <= ev.err_bound);
            assert!(ev.eta1.im.abs() <= ev.err_bound);
        }
    }

    #[test]
    fn reflection_conjugates_values() {
        let ev = at(0.3, 1.1);
        let refl = at(0.7, 1.1); // 1 - conj(tau)
        for (a, b) in [(ev.g2, refl.g2), (ev.g3, refl.g3), (ev.eta1, refl.eta1)] {
            assert!((a.conj() - b).norm() <= 4.0 * ev.err_bound.max(1e-12));
        }
    }

    #[test]
    fn g3_grows_along_the_imaginary_axis() {
        // d/db g3(ib) = Re(i g3') > 0 on the sampled range
        for b in [0.8, 1.0, 1.5, 2.0, 2.5, 3.0] {
            let ev = at(0.0, b);
            let d = derivative_bundle(&ev);
            let along = Complex::new(0.0, 1.0) * d.g3_prime;
            assert!(along.re > 0.0, "d/db g3(ib) <= 0 at b = {b}");
            assert!(along.im.abs() < 1e-9 * along.re.abs());
        }
    }

    #[test]
    fn periodicity_in_re() {
        let a = at(0.23, 1.2);
        let b = at(1.23, 1.2);
        assert!((a.g2 - b.g2).norm() <= 2.0 * a.err_bound.max(1e-13));
        assert!((a.g3 - b.g3).norm() <= 2.0 * a.err_bound.max(1e-13));
        assert!((a.eta1 - b.eta1).norm() <= 2.0 * a.err_bound.max(1e-13));
        // eta2 picks up eta1 per unit translation
        assert!((b.eta2 - (a.eta2 + a.eta1)).norm() <= 1e-10);
    }

    #[test]
    fn f32_instantiation_is_usable() {
        let prec = Precision::<f32> {
            target_abs_error: 1e-5,
            max_terms: 64,
            min_im_for_series: 0.3,
        };
        let ev = eval(HalfPlanePoint::new(0.5f32, 2.0).unwrap(), &prec).unwrap();
        assert!((ev.e4 - Complex::new(1.0f32, 0.0)).norm() < 1e-2);
        assert!(ev.legendre_residual() < 1e-4);
    }
}
