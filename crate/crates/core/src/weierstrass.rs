//! Weierstrass functions on the lattice `Z + Z tau` by trigonometric
//! q-expansions:
//!
//! ```text
//! zeta(z) = eta1 z + pi cot(pi z) + 4 pi sum_{n>=1} q^n/(1-q^n) sin(2 pi n z)
//! p(z)    = -eta1 + pi^2 csc^2(pi z) - 8 pi^2 sum n q^n/(1-q^n) cos(2 pi n z)
//! p'(z)   = -2 pi^3 cos(pi z)/sin^3(pi z)
//!           + 16 pi^3 sum n^2 q^n/(1-q^n) sin(2 pi n z)
//! ```
//!
//! The argument is reduced into the centered cell `|x|, |y| <= 1/2` of
//! `z = x + y tau` first (the sums then converge like `|q|^{n/2}`), and
//! `zeta` is corrected back by its quasi-periods:
//! `zeta(z + m + n tau) = zeta(z) + m eta1 + n eta2`.

use num_complex::Complex;
use serde::Serialize;

use crate::eisenstein::{EisensteinEval, Precision};
use crate::error::{Error, Result};
use crate::halfplane::{serialize_complex, HalfPlanePoint};
use crate::modular::eval_anywhere;
use crate::real::Real;
use crate::series::tail_bound;

/// Minimum allowed distance from `z` to the lattice.
pub const LATTICE_CLEARANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct WeierstrassEval<T: Real> {
    #[serde(serialize_with = "serialize_complex")]
    pub z: Complex<T>,
    pub tau: HalfPlanePoint<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub p: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub p_prime: Complex<T>,
    /// `6 p^2 - g2/2`, from the algebraic identity.
    #[serde(serialize_with = "serialize_complex")]
    pub p_dprime: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub zeta_w: Complex<T>,
    pub err_bound: T,
}

/// Writes `z = x + y tau` and reduces both coordinates into `[-1/2, 1/2)`,
/// returning the reduced point and the integer shifts `(m, n)` removed.
pub fn reduce_to_cell<T: Real>(
    z: Complex<T>,
    tau: Complex<T>,
) -> (Complex<T>, i64, i64) {
    let y = z.im / tau.im;
    let n = y.round();
    let z1 = z - tau * n;
    let x = z1.re - (z1.im / tau.im) * tau.re;
    let m = x.round();
    let z2 = z1 - m;
    (z2, m.to_f64().unwrap_or(0.0) as i64, n.to_f64().unwrap_or(0.0) as i64)
}

fn lattice_distance<T: Real>(z: Complex<T>, tau: Complex<T>) -> T {
    // after cell reduction the nearest lattice point is 0 or a neighbor
    let mut best = z.norm();
    for m in -1..=1i32 {
        for n in -1..=1i32 {
            let w = z - Complex::new(T::lit(m as f64), T::zero()) - tau * T::lit(n as f64);
            best = best.min(w.norm());
        }
    }
    best
}

/// Evaluates `p`, `p'`, `zeta` at `z` for the lattice of `tau`.
pub fn weierstrass_eval<T: Real + Serialize>(
    z: Complex<T>,
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<WeierstrassEval<T>> {
    let (ev, _) = eval_anywhere(tau, prec)?;
    weierstrass_eval_with(z, &ev, prec)
}

/// Same, reusing an already computed bundle at `tau`.
pub fn weierstrass_eval_with<T: Real + Serialize>(
    z: Complex<T>,
    ev: &EisensteinEval<T>,
    prec: &Precision<T>,
) -> Result<WeierstrassEval<T>> {
    let tau = ev.tau.to_complex();
    let (zr, m, n) = reduce_to_cell(z, tau);
    let dist = lattice_distance(zr, tau);
    if dist < T::lit(LATTICE_CLEARANCE) {
        return Err(Error::LatticePoint {
            dist: dist.to_f64().unwrap_or(0.0),
            min: LATTICE_CLEARANCE,
        });
    }

    let pi = T::PI();
    let two_pi = pi + pi;
    let q = ev.tau.nome();
    let x = q.norm();
    // |sin/cos(2 pi n z)| <= |q|^{-n/2} in the reduced cell, so terms decay
    // like |q|^{n/2}
    let sqrt_x = x.sqrt();

    let pz = zr * pi;
    let sin_pz = pz.sin();
    let cos_pz = pz.cos();
    let csc2 = Complex::new(T::one(), T::zero()) / (sin_pz * sin_pz);

    let mut zeta_sum = Complex::new(T::zero(), T::zero());
    let mut p_sum = Complex::new(T::zero(), T::zero());
    let mut pp_sum = Complex::new(T::zero(), T::zero());
    let mut qn = Complex::new(T::one(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut tail = T::infinity();
    let mut used = prec.max_terms;
    for k in 1..=prec.max_terms {
        qn = qn * q;
        let base = qn / (one - qn);
        let ang = zr * (two_pi * T::usize(k));
        let (s, c) = (ang.sin(), ang.cos());
        let kt = T::usize(k);
        zeta_sum = zeta_sum + base * s;
        p_sum = p_sum + base * c * kt;
        pp_sum = pp_sum + base * s * (kt * kt);
        // worst series is p': terms ~ n^2 |q|^{n/2}
        tail = tail_bound(k, sqrt_x, 2, T::one() / (T::one() - x));
        if tail * T::lit(16.0) * pi.powi(3) <= prec.target_abs_error * T::lit(10.0) {
            used = k;
            break;
        }
    }

    let eta1 = ev.eta1;
    let p = -eta1 + csc2 * (pi * pi) - p_sum * (T::lit(8.0) * pi * pi);
    let p_prime = -cos_pz / (sin_pz * sin_pz * sin_pz) * (T::lit(2.0) * pi.powi(3))
        + pp_sum * (T::lit(16.0) * pi.powi(3));
    let p_dprime = p * p * T::lit(6.0) - ev.g2 * T::lit(0.5);
    let zeta_reduced = eta1 * zr + (cos_pz / sin_pz) * pi + zeta_sum * (T::lit(4.0) * pi);
    let zeta_w = zeta_reduced + ev.eta1 * T::lit(m as f64) + ev.eta2 * T::lit(n as f64);

    // series tail amplified by the prefactors, plus the bundle error
    let err_bound = tail * T::lit(16.0) * pi.powi(3) + ev.err_bound * (T::one() + zr.norm());
    let _ = used;

    Ok(WeierstrassEval { z, tau: ev.tau, p, p_prime, p_dprime, zeta_w, err_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision<f64> {
        Precision::default()
    }

    fn hp(re: f64, im: f64) -> HalfPlanePoint<f64> {
        HalfPlanePoint::new(re, im).unwrap()
    }

    #[test]
    fn periodicity_in_both_periods() {
        let tau = hp(0.2, 1.3);
        let z = Complex::new(0.31, 0.27);
        let w0 = weierstrass_eval(z, tau, &p()).unwrap();
        let w1 = weierstrass_eval(z + Complex::new(1.0, 0.0), tau, &p()).unwrap();
        let wt = weierstrass_eval(z + tau.to_complex(), tau, &p()).unwrap();
        assert!((w0.p - w1.p).norm() < 1e-10);
        assert!((w0.p - wt.p).norm() < 1e-10);
        assert!((w0.p_prime - w1.p_prime).norm() < 1e-9);
    }

    #[test]
    fn cubic_identity() {
        let tau = hp(0.2, 1.3);
        let ev = crate::eisenstein::eval(tau, &p()).unwrap();
        for z in [Complex::new(0.31, 0.27), Complex::new(0.11, 0.52), Complex::new(0.73, -0.2)] {
            let w = weierstrass_eval(z, tau, &p()).unwrap();
            let lhs = w.p_prime * w.p_prime;
            let rhs = w.p * w.p * w.p * 4.0 - ev.g2 * w.p - ev.g3;
            assert!(
                (lhs - rhs).norm() < 1e-8 * lhs.norm().max(1.0),
                "cubic residual {:e}",
                (lhs - rhs).norm()
            );
        }
    }

    #[test]
    fn quasi_periods_of_zeta() {
        let tau = hp(0.2, 1.3);
        let ev = crate::eisenstein::eval(tau, &p()).unwrap();
        let z = Complex::new(0.31, 0.27);
        let w0 = weierstrass_eval(z, tau, &p()).unwrap();
        let w1 = weierstrass_eval(z + Complex::new(1.0, 0.0), tau, &p()).unwrap();
        assert!((w1.zeta_w - w0.zeta_w - ev.eta1).norm() < 1e-9);
        let wt = weierstrass_eval(z + tau.to_complex(), tau, &p()).unwrap();
        assert!((wt.zeta_w - w0.zeta_w - ev.eta2).norm() < 1e-9);
    }

    #[test]
    fn eta1_is_twice_zeta_half() {
        let tau = hp(0.3, 1.1);
        let ev = crate::eisenstein::eval(tau, &p()).unwrap();
        let w = weierstrass_eval(Complex::new(0.5, 0.0), tau, &p()).unwrap();
        assert!((w.zeta_w * 2.0 - ev.eta1).norm() < 1e-10);
    }

    #[test]
    fn legendre_via_zeta_at_half_tau() {
        // eta2 = 2 zeta(tau/2) against the Legendre construction
        let tau = hp(0.3, 1.1);
        let ev = crate::eisenstein::eval(tau, &p()).unwrap();
        let w = weierstrass_eval(tau.to_complex() * 0.5, tau, &p()).unwrap();
        assert!((w.zeta_w * 2.0 - ev.eta2).norm() < 1e-9);
    }

    #[test]
    fn pole_clearance_enforced() {
        let tau = hp(0.2, 1.3);
        let r = weierstrass_eval(Complex::new(1e-9, 1e-9), tau, &p());
        assert!(matches!(r, Err(Error::LatticePoint { .. })));
        let r = weierstrass_eval(tau.to_complex() + Complex::new(1.0, 0.0), tau, &p());
        assert!(matches!(r, Err(Error::LatticePoint { .. })));
    }

    #[test]
    fn p_prime_is_derivative_of_p() {
        let tau = hp(0.2, 1.3);
        let z = Complex::new(0.31, 0.27);
        let h = 1e-6;
        let wp = weierstrass_eval(z + Complex::new(h, 0.0), tau, &p()).unwrap();
        let wm = weierstrass_eval(z - Complex::new(h, 0.0), tau, &p()).unwrap();
        let w = weierstrass_eval(z, tau, &p()).unwrap();
        let fd = (wp.p - wm.p) / (2.0 * h);
        assert!((fd - w.p_prime).norm() < 1e-6 * w.p_prime.norm().max(1.0));
        // and zeta' = -p
        let fdz = (wp.zeta_w - wm.zeta_w) / (2.0 * h);
        assert!((fdz + w.p).norm() < 1e-6 * w.p.norm().max(1.0));
    }
}
