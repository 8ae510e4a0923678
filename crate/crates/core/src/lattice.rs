//! Independent reference evaluation of `E2`, `E4`, `E6` by direct lattice
//! summation.
//!
//! `G_{2k}(tau) = sum' (m tau + n)^{-2k}` is summed over the box
//! `|m|, |n| <= size`, row by row in `n` with the row order taken first —
//! the conditionally convergent `k = 1` case needs exactly that order. Each
//! row tail is corrected by the midpoint rule with its first Euler-Maclaurin
//! term, which brings the box truncation of every row below `1e-12` at
//! moderate heights. This path shares nothing with the q-expansion code and
//! is deliberately slow; it exists to cross-check the series evaluator.

use num_complex::Complex;
use serde::Serialize;

use crate::halfplane::HalfPlanePoint;
use crate::real::Real;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LatticeEval<T> {
    pub e2: Complex<T>,
    pub e4: Complex<T>,
    pub e6: Complex<T>,
}

/// Midpoint-rule tail of `sum_{|n| > n_max} (w + n)^{-k}` for even `k`:
/// the integral plus the first derivative correction at both ends.
fn row_tail<T: Real>(w: Complex<T>, n_max: usize, k: i32) -> Complex<T> {
    let edge = T::usize(n_max) + T::lit(0.5);
    let plus = w + edge;
    let minus = -w + edge; // (w - x)^(-k) = (x - w)^(-k) for even k
    let km1 = T::lit((k - 1) as f64);
    let integral = (plus.powi(1 - k) + minus.powi(1 - k)) / km1;
    let deriv = (plus.powi(-k - 1) + minus.powi(-k - 1)) * (T::lit(k as f64) / T::lit(24.0));
    integral - deriv
}

/// Brute-force lattice sums over `|m|, |n| <= size` with per-row tail
/// corrections, normalized to `E2`, `E4`, `E6`.
pub fn lattice_eval<T: Real>(tau: HalfPlanePoint<T>, size: usize) -> LatticeEval<T> {
    let t = tau.to_complex();
    let one = Complex::new(T::one(), T::zero());
    let mut g2sum = Complex::new(T::zero(), T::zero());
    let mut g4sum = Complex::new(T::zero(), T::zero());
    let mut g6sum = Complex::new(T::zero(), T::zero());

    let m_max = size as i64;
    let n_max = size as i64;
    for m in -m_max..=m_max {
        let w = t * T::lit(m as f64);
        let mut row2 = Complex::new(T::zero(), T::zero());
        let mut row4 = Complex::new(T::zero(), T::zero());
        let mut row6 = Complex::new(T::zero(), T::zero());
        for n in -n_max..=n_max {
            if m == 0 && n == 0 {
                continue;
            }
            let z = w + T::lit(n as f64);
            let inv2 = one / (z * z);
            let inv4 = inv2 * inv2;
            row2 = row2 + inv2;
            row4 = row4 + inv4;
            row6 = row6 + inv4 * inv2;
        }
        row2 = row2 + row_tail(w, size, 2);
        row4 = row4 + row_tail(w, size, 4);
        row6 = row6 + row_tail(w, size, 6);
        g2sum = g2sum + row2;
        g4sum = g4sum + row4;
        g6sum = g6sum + row6;
    }

    let pi = T::PI();
    let pi2 = pi * pi;
    let pi4 = pi2 * pi2;
    // G2 = (pi^2/3) E2,  G4 = (pi^4/45) E4,  G6 = (2 pi^6/945) E6
    let e2 = g2sum * (T::lit(3.0) / pi2);
    let e4 = g4sum * (T::lit(45.0) / pi4);
    let e6 = g6sum * (T::lit(945.0) / (T::lit(2.0) * pi4 * pi2));
    LatticeEval { e2, e4, e6 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{eval, Precision};

    #[test]
    fn matches_q_expansion_at_the_pinned_point() {
        // tau = 0.3 + 1.7i, box 400: all three normalized series to 1e-8
        let tau = HalfPlanePoint::new(0.3f64, 1.7).unwrap();
        let oracle = lattice_eval(tau, 400);
        let ev = eval(tau, &Precision::default()).unwrap();
        assert!((oracle.e2 - ev.e2).norm() < 1e-8, "E2 gap {:e}", (oracle.e2 - ev.e2).norm());
        assert!((oracle.e4 - ev.e4).norm() < 1e-8, "E4 gap {:e}", (oracle.e4 - ev.e4).norm());
        assert!((oracle.e6 - ev.e6).norm() < 1e-8, "E6 gap {:e}", (oracle.e6 - ev.e6).norm());
    }

    #[test]
    fn g2_and_g3_from_lattice_match_invariants() {
        let tau = HalfPlanePoint::new(0.1f64, 0.9).unwrap();
        let oracle = lattice_eval(tau, 300);
        let ev = eval(tau, &Precision::default()).unwrap();
        let pi = std::f64::consts::PI;
        let g2 = oracle.e4 * (4.0 * pi.powi(4) / 3.0);
        let g3 = oracle.e6 * (8.0 * pi.powi(6) / 27.0);
        assert!((g2 - ev.g2).norm() < 1e-6);
        assert!((g3 - ev.g3).norm() < 1e-6);
    }
}
