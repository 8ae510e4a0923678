//! Mobius actions, fundamental-domain reduction, and push-forward of the
//! quasimodular bundle under group elements.
//!
//! The fundamental domains follow the geometry used throughout the crate:
//!
//! ```text
//! F  = { 0 <= Re tau <= 1, |tau| >= 1, |tau - 1| >= 1 }          (SL(2,Z))
//! F0 = { 0 <= Re tau <= 1, |tau - 1/2| >= 1/2 }                  (Gamma_0(2))
//! F0 = F u gamma1(F) u gamma2(F)
//! ```

use num_complex::Complex;
use serde::Serialize;

use crate::eisenstein::{ErrBounds, EisensteinEval, Precision};
use crate::error::Result;
use crate::halfplane::HalfPlanePoint;
use crate::matrix::UnimodularMatrix;
use crate::real::{i_unit, Real};

/// Result of a fundamental-domain reduction: `original = gamma * point`.
///
/// Reductions landing within `1e-12` of the domain boundary are flagged, not
/// perturbed; boundary points belong to the closed domain.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Reduction<T: Real + Serialize> {
    pub gamma: UnimodularMatrix,
    pub point: HalfPlanePoint<T>,
    pub on_boundary: bool,
}

/// `gamma . tau = (a tau + b) / (c tau + d)`.
///
/// The imaginary part transforms as `im / |c tau + d|^2`, so the image stays
/// in the half-plane.
pub fn mobius_apply<T: Real>(g: &UnimodularMatrix, tau: HalfPlanePoint<T>) -> HalfPlanePoint<T> {
    let z = tau.to_complex();
    let (a, b, c, d) = g.entries();
    let num = z * T::lit(a as f64) + T::lit(b as f64);
    let den = z * T::lit(c as f64) + T::lit(d as f64);
    let n2 = den.norm_sqr();
    let re = (num * den.conj()).re / n2;
    let im = tau.im() / n2;
    HalfPlanePoint::new_unchecked(re, im.max(T::min_positive_value()))
}

const BOUNDARY_TOL: f64 = 1e-12;

fn near<T: Real>(x: T, y: f64) -> bool {
    (x - T::lit(y)).abs() < T::lit(BOUNDARY_TOL)
}

/// Gauss reduction into `F`. Terminates for every input; entries of the
/// reduction matrix can overflow only for points astronomically close to the
/// real axis, which is reported rather than silently wrapped.
pub fn reduce_to_f<T: Real + Serialize>(tau: HalfPlanePoint<T>) -> Result<Reduction<T>> {
    let mut z = tau.to_complex();
    let mut g = UnimodularMatrix::identity();
    // classical domain |Re| <= 1/2, |tau| >= 1 first
    for _ in 0..4096 {
        let n = z.re.round();
        if n != T::zero() {
            z.re = z.re - n;
            g = g.compose(&UnimodularMatrix::translation(n.to_f64().unwrap() as i64))?;
        }
        let r2 = z.norm_sqr();
        if r2 < T::one() - T::lit(1e-14) {
            // z -> -1/z; track gamma <- gamma * S^{-1}
            z = -z.conj() / r2;
            g = g.compose(&UnimodularMatrix::inversion().inverse())?;
        } else {
            break;
        }
    }
    // shift the left half over to the [0,1] version of the domain
    if z.re < T::zero() {
        z.re = z.re + T::one();
        g = g.compose(&UnimodularMatrix::translation(-1))?;
    }
    let on_boundary = near(z.re, 0.0)
        || near(z.re, 1.0)
        || near(z.norm_sqr(), 1.0)
        || near((z - Complex::new(T::one(), T::zero())).norm_sqr(), 1.0);
    Ok(Reduction { gamma: g, point: HalfPlanePoint::new_unchecked(z.re, z.im), on_boundary })
}

/// Reduction into `F0`, obtained from the `F`-reduction by moving the
/// `F`-copy into `F0` with whichever of `{I, gamma1, gamma2}` makes the
/// total matrix land in `Gamma_0(2)`. Exactly one choice works because the
/// three matrices represent the cosets of `Gamma_0(2)` in `SL(2,Z)`.
pub fn reduce_to_f0<T: Real + Serialize>(tau: HalfPlanePoint<T>) -> Result<Reduction<T>> {
    let base = reduce_to_f(tau)?;
    for h in [
        UnimodularMatrix::identity(),
        UnimodularMatrix::gamma1(),
        UnimodularMatrix::gamma2(),
    ] {
        let candidate = base.gamma.compose(&h.inverse())?;
        if candidate.is_in_gamma0_2() {
            let point = mobius_apply(&h, base.point);
            let z = point.to_complex();
            let centered = z - Complex::new(T::lit(0.5), T::zero());
            let on_boundary = near(point.re(), 0.0)
                || near(point.re(), 1.0)
                || near(centered.norm_sqr(), 0.25);
            return Ok(Reduction { gamma: candidate, point, on_boundary });
        }
    }
    unreachable!("the three coset representatives cover SL(2,Z)")
}

/// Membership tests for the two closed domains (up to `1e-9` slack).
pub fn in_f<T: Real>(z: Complex<T>) -> bool {
    let s = T::lit(1e-9);
    z.re >= -s
        && z.re <= T::one() + s
        && z.norm_sqr() >= T::one() - s
        && (z - Complex::new(T::one(), T::zero())).norm_sqr() >= T::one() - s
}

pub fn in_f0<T: Real>(z: Complex<T>) -> bool {
    let s = T::lit(1e-9);
    z.re >= -s
        && z.re <= T::one() + s
        && (z - Complex::new(T::lit(0.5), T::zero())).norm_sqr() >= T::lit(0.25) - s
}

/// Pushes the bundle at `tau` forward to `gamma . tau` by the weight-4 and
/// weight-6 laws, the quasi-period vector law
/// `(eta2, eta1)(gamma tau) = (c tau + d) * gamma * (eta2, eta1)(tau)`,
/// and the induced law for the critical combination
/// `crit(gamma tau) = j^7 (j crit + 36 pi i c g3)`, `j = c tau + d`.
pub fn transform_eval<T: Real + Serialize>(
    ev: &EisensteinEval<T>,
    g: &UnimodularMatrix,
) -> EisensteinEval<T> {
    let pi = T::PI();
    let (a, b, c, d) = g.entries();
    let (af, bf, cf) = (T::lit(a as f64), T::lit(b as f64), T::lit(c as f64));
    let _ = d;
    let tau = ev.tau.to_complex();
    let j = g.cocycle(tau);
    let j2 = j * j;
    let j4 = j2 * j2;
    let j6 = j4 * j2;
    let j7 = j6 * j;
    let j8 = j4 * j4;

    let g2 = ev.g2 * j4;
    let g3 = ev.g3 * j6;
    let eta2 = j * (ev.eta2 * af + ev.eta1 * bf);
    let eta1 = j * (ev.eta2 * cf + ev.eta1 * T::lit(d as f64));
    let discriminant = ev.discriminant * j8 * j4;

    let thirty_six_pi_i = i_unit::<T>() * (T::lit(36.0) * pi);
    let crit = j7 * (j * ev.crit + thirty_six_pi_i * ev.g3 * cf);
    let crit_prime = j8 * (j2 * ev.crit_prime + j * ev.crit * (cf * T::lit(14.0)))
        + j8 * ev.g3 * (i_unit::<T>() * (T::lit(252.0) * pi) * cf * cf);

    let pi2 = pi * pi;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let e2 = eta1 * (T::lit(3.0) / pi2);
    let e4 = g2 * (T::lit(3.0) / (T::lit(4.0) * pi4));
    let e6 = g3 * (T::lit(27.0) / (T::lit(8.0) * pi6));

    let point = mobius_apply(g, ev.tau);

    // error propagation with the same weights
    let jn = j.norm();
    let jn4 = jn.powi(4);
    let jn6 = jn.powi(6);
    let jn7 = jn.powi(7);
    let e = &ev.errs;
    let g2_err = e.g2 * jn4;
    let g3_err = e.g3 * jn6;
    let eta2_err = jn * (e.eta2 * af.abs() + e.eta1 * bf.abs());
    let eta1_err = jn * (e.eta2 * cf.abs() + e.eta1 * T::lit((d as f64).abs()));
    let disc_err = e.discriminant * jn4.powi(3);
    let crit_err = e.crit * jn.powi(8) + T::lit(36.0) * pi * cf.abs() * e.g3 * jn7;
    let crit_prime_err = e.crit_prime * jn.powi(10)
        + T::lit(14.0) * cf.abs() * e.crit * jn.powi(9)
        + T::lit(252.0) * pi * cf * cf * e.g3 * jn.powi(8);
    let e2_err = eta1_err * (T::lit(3.0) / pi2);
    let e4_err = g2_err * (T::lit(3.0) / (T::lit(4.0) * pi4));
    let e6_err = g3_err * (T::lit(27.0) / (T::lit(8.0) * pi6));
    let err_bound = [e2_err, e4_err, e6_err, g2_err, g3_err, eta1_err, eta2_err, disc_err]
        .into_iter()
        .fold(T::zero(), T::max);

    EisensteinEval {
        tau: point,
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
        crit_scale: ev.crit_scale * jn.powi(8) + T::lit(36.0) * pi * cf.abs() * ev.g3.norm() * jn7,
    }
}

/// Evaluates the bundle at an arbitrary half-plane point: series evaluation
/// directly when high enough, otherwise reduce into `F` (whose height floor
/// is `sqrt(3)/2`) and push forward. Returns the matrix used, if any.
pub fn eval_anywhere<T: Real + Serialize>(
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<(EisensteinEval<T>, Option<UnimodularMatrix>)> {
    if tau.im() >= prec.min_im_for_series {
        return Ok((crate::eisenstein::eval(tau, prec)?, None));
    }
    let red = reduce_to_f(tau)?;
    let base = crate::eisenstein::eval(red.point, prec)?;
    let mut ev = transform_eval(&base, &red.gamma);
    // keep the caller's exact tau rather than the round-tripped one
    ev.tau = tau;
    Ok((ev, Some(red.gamma)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::eval;

    fn hp(re: f64, im: f64) -> HalfPlanePoint<f64> {
        HalfPlanePoint::new(re, im).unwrap()
    }

    #[test]
    fn mobius_identity_and_basic_values() {
        let id = UnimodularMatrix::identity();
        let tau = hp(0.37, 1.3);
        let out = mobius_apply(&id, tau);
        assert_eq!(out.re(), 0.37);
        assert_eq!(out.im(), 1.3);

        // gamma1 applied to i: 1/(1 - i) = (1 + i)/2
        let g1 = UnimodularMatrix::gamma1();
        let out = mobius_apply(&g1, hp(0.0, 1.0));
        assert!((out.re() - 0.5).abs() < 1e-15);
        assert!((out.im() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gamma2_maps_f_into_f0() {
        // the decomposition F0 = F u gamma1(F) u gamma2(F)
        for (re, im) in [(0.1, 1.4), (0.5, 1.05), (0.9, 1.2), (0.5, 0.87)] {
            let tau = hp(re, im);
            assert!(in_f(tau.to_complex()), "test point not in F");
            for g in [UnimodularMatrix::gamma1(), UnimodularMatrix::gamma2()] {
                let img = mobius_apply(&g, tau);
                assert!(in_f0(img.to_complex()), "{g} image {img} left F0");
            }
        }
    }

    #[test]
    fn reduce_interior_point_is_identity() {
        let r = reduce_to_f(hp(0.5, 2.0)).unwrap();
        assert!(r.gamma.is_identity());
        assert_eq!(r.point.re(), 0.5);
    }

    #[test]
    fn reduce_roundtrip() {
        for (re, im) in [(0.5, 0.1), (2.3, 0.8), (-0.2, 0.3), (0.77, 0.004), (-5.4, 0.02)] {
            let tau = hp(re, im);
            let r = reduce_to_f(tau).unwrap();
            assert!(in_f(r.point.to_complex()), "reduced point left F");
            let back = mobius_apply(&r.gamma, r.point);
            assert!(
                (back.to_complex() - tau.to_complex()).norm() < 1e-12 * (1.0 + tau.to_complex().norm()),
                "roundtrip failed for {tau}"
            );
        }
    }

    #[test]
    fn reduce_translation_only() {
        let r = reduce_to_f(hp(2.3, 0.8)).unwrap();
        assert!(r.point.re() >= 0.0 && r.point.re() <= 1.0);
    }

    #[test]
    fn reduce_twice_is_idempotent() {
        for (re, im) in [(0.5, 0.1), (2.3, 0.8), (-0.2, 0.3)] {
            let r = reduce_to_f(hp(re, im)).unwrap();
            let r2 = reduce_to_f(r.point).unwrap();
            assert!(r2.gamma.is_identity() || r2.on_boundary);
        }
    }

    #[test]
    fn reduce_f0_membership_and_roundtrip() {
        for (re, im) in [(-0.2, 0.3), (0.5, 0.1), (3.1, 0.07), (0.49, 0.02)] {
            let tau = hp(re, im);
            let r = reduce_to_f0(tau).unwrap();
            assert!(r.gamma.is_in_gamma0_2(), "matrix {} not in Gamma_0(2)", r.gamma);
            assert!(in_f0(r.point.to_complex()), "reduced point {} left F0", r.point);
            let back = mobius_apply(&r.gamma, r.point);
            assert!((back.to_complex() - tau.to_complex()).norm() < 1e-12 * (1.0 + re.abs()));
        }
    }

    #[test]
    fn reduce_f0_boundary_case() {
        // just inside the circle |tau - 1/2| = 1/2 reduces to (near) the circle
        let tau = hp(0.5, 0.499);
        let r = reduce_to_f0(tau).unwrap();
        let centered = r.point.to_complex() - num_complex::Complex::new(0.5, 0.0);
        assert!(centered.norm() >= 0.5 - 1e-9);
    }

    #[test]
    fn transform_identity_is_noop() {
        let prec = Precision::default();
        let ev = eval(hp(0.3, 1.4), &prec).unwrap();
        let out = transform_eval(&ev, &UnimodularMatrix::identity());
        assert_eq!(out.g2, ev.g2);
        assert_eq!(out.eta2, ev.eta2);
    }

    #[test]
    fn transform_matches_direct_evaluation() {
        // gamma = [1,0;2,1] at tau = 0.3 + 1.4i; the image sits at height
        // ~0.13, where the series still converges with a lowered floor, so
        // both sides are genuinely independent evaluations
        let prec = Precision { min_im_for_series: 0.12, ..Precision::default() };
        let tau = hp(0.3, 1.4);
        let g = UnimodularMatrix::new(1, 0, 2, 1).unwrap();
        let pushed = transform_eval(&eval(tau, &prec).unwrap(), &g);
        let img = mobius_apply(&g, tau);
        let direct = eval(img, &prec).unwrap();
        for (x, y, tol) in [
            (pushed.g2, direct.g2, 1e-9),
            (pushed.g3, direct.g3, 1e-9),
            (pushed.eta1, direct.eta1, 1e-9),
            (pushed.eta2, direct.eta2, 1e-9),
            (pushed.crit, direct.crit, 1e-7),
            (pushed.crit_prime, direct.crit_prime, 1e-6),
        ] {
            let scale = y.norm().max(1.0);
            assert!((x - y).norm() <= tol * scale, "mismatch {:e}", (x - y).norm() / scale);
        }
    }

    #[test]
    fn quasi_period_law_under_tau_over_one_minus_tau() {
        // tau' = tau/(1-tau): eta1(tau') = (1-tau)(eta1 - eta2)
        let prec = Precision::default();
        let tau = hp(0.3, 1.4);
        let ev = eval(tau, &prec).unwrap();
        let g = UnimodularMatrix::new(1, 0, -1, 1).unwrap();
        let pushed = transform_eval(&ev, &g);
        let want = (num_complex::Complex::new(1.0, 0.0) - tau.to_complex()) * (ev.eta1 - ev.eta2);
        assert!((pushed.eta1 - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn eval_anywhere_handles_low_points() {
        let prec = Precision::default();
        let (ev, gamma) = eval_anywhere(hp(1e-3, 1e-3), &prec).unwrap();
        assert!(gamma.is_some());
        assert!(ev.legendre_residual() < 1e-6 * ev.eta2.norm().max(1.0));
    }
}
