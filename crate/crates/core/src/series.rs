//! Divisor-sum machinery shared by the q-expansion evaluators: the sigma
//! sieve, compensated summation, and rigorous geometric tail bounds.

use std::sync::{Arc, RwLock};

use num_complex::Complex;

use crate::real::Real;

/// `sigma_k(n)` tables for k = 1, 3, 5, sieved once and shared.
pub struct SigmaTable {
    pub sigma1: Vec<u64>,
    pub sigma3: Vec<u64>,
    pub sigma5: Vec<u64>,
}

impl SigmaTable {
    fn build(len: usize) -> Self {
        // index 0 unused; sigma_k(n) at index n
        let mut s1 = vec![0u64; len + 1];
        let mut s3 = vec![0u64; len + 1];
        let mut s5 = vec![0u64; len + 1];
        for d in 1..=len as u64 {
            let d3 = d * d * d;
            let d5 = d3 * d * d;
            let mut m = d as usize;
            while m <= len {
                s1[m] += d;
                s3[m] += d3;
                s5[m] += d5;
                m += d as usize;
            }
        }
        Self { sigma1: s1, sigma3: s3, sigma5: s5 }
    }

    pub fn len(&self) -> usize {
        self.sigma1.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

static TABLE: RwLock<Option<Arc<SigmaTable>>> = RwLock::new(None);

/// Returns a sigma table covering at least `1..=min_len`, growing the shared
/// one on demand. Thread-safe; the sieve runs at most a handful of times per
/// process.
pub fn sigma_table(min_len: usize) -> Arc<SigmaTable> {
    if let Some(t) = TABLE.read().unwrap().as_ref() {
        if t.len() >= min_len {
            return Arc::clone(t);
        }
    }
    let mut guard = TABLE.write().unwrap();
    if let Some(t) = guard.as_ref() {
        if t.len() >= min_len {
            return Arc::clone(t);
        }
    }
    let len = min_len.max(512).next_power_of_two();
    let t = Arc::new(SigmaTable::build(len));
    *guard = Some(Arc::clone(&t));
    t
}

/// Kahan-compensated complex accumulator.
#[derive(Clone, Copy)]
pub struct Kahan<T: Real> {
    sum: Complex<T>,
    carry: Complex<T>,
}

impl<T: Real> Default for Kahan<T> {
    fn default() -> Self {
        Self { sum: Complex::new(T::zero(), T::zero()), carry: Complex::new(T::zero(), T::zero()) }
    }
}

impl<T: Real> Kahan<T> {
    pub fn add(&mut self, term: Complex<T>) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex<T> {
        self.sum
    }
}

/// Rigorous bound on `c * sum_{n > n_last} n^k x^n` for `0 <= x < 1`.
///
/// Consecutive terms shrink at least by `x * ((n_last+2)/(n_last+1))^k`, so
/// the tail is dominated by a geometric series whenever that ratio is < 1.
pub fn tail_bound<T: Real>(n_last: usize, x: T, k: i32, c: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let np1 = T::usize(n_last + 1);
    let ratio = x * ((np1 + T::one()) / np1).powi(k);
    if ratio >= T::one() {
        return T::infinity();
    }
    c * np1.powi(k) * x.powi((n_last + 1) as i32) / (T::one() - ratio)
}

// Majorants used by the tail bounds:
//   sigma1(n) <= n^2,  sigma3(n) <= zeta(3) n^3,  sigma5(n) <= zeta(5) n^5.
pub const ZETA3: f64 = 1.202_056_903_159_594_3;
pub const ZETA5: f64 = 1.036_927_755_143_37;

/// Raw q-series sums feeding every quasimodular quantity.
///
/// `f1 = sum sigma1(n) q^n`, `f3`, `f5` likewise, and the differentiated
/// weight-six sums `s1 = sum n sigma5(n) q^n`, `s2 = sum n^2 sigma5(n) q^n`.
/// The `abs_*` fields accumulate the term moduli (for rounding floors), and
/// `tails` records the certified truncation bound of each sum at exit.
#[derive(Debug)]
pub struct SeriesSums<T: Real> {
    pub f1: Complex<T>,
    pub f3: Complex<T>,
    pub f5: Complex<T>,
    pub s1: Complex<T>,
    pub s2: Complex<T>,
    pub abs_f1: T,
    pub abs_f3: T,
    pub abs_f5: T,
    pub abs_s1: T,
    pub abs_s2: T,
    pub tails: [T; 5],
    pub terms_used: usize,
}

/// Weights that turn raw tails into errors of the normalized series
/// (E2, E4, E6 and the two differentiated sums).
const W: [f64; 5] = [24.0, 240.0, 504.0, 1008.0, 1008.0];

/// Evaluates the five divisor sums at nome `q`, stopping once every weighted
/// tail bound drops below `target`, or failing after `max_terms` terms.
pub fn eval_sums<T: Real>(
    q: Complex<T>,
    target: T,
    max_terms: usize,
) -> Result<SeriesSums<T>, (T, usize)> {
    let x = q.norm();
    let table = sigma_table(max_terms);
    let mut acc = [Kahan::<T>::default(); 5];
    let mut abs = [T::zero(); 5];
    let mut qn = Complex::new(T::one(), T::zero());
    let mut tails = [T::infinity(); 5];

    for n in 1..=max_terms {
        qn = qn * q;
        let nt = T::usize(n);
        let c1 = T::from_u64(table.sigma1[n]).unwrap();
        let c3 = T::from_u64(table.sigma3[n]).unwrap();
        let c5 = T::from_u64(table.sigma5[n]).unwrap();
        let coef = [c1, c3, c5, nt * c5, nt * nt * c5];
        for (k, c) in coef.iter().enumerate() {
            let term = qn * *c;
            acc[k].add(term);
            abs[k] = abs[k] + term.norm();
        }

        tails = [
            tail_bound(n, x, 2, T::one()),
            tail_bound(n, x, 3, T::lit(ZETA3)),
            tail_bound(n, x, 5, T::lit(ZETA5)),
            tail_bound(n, x, 6, T::lit(ZETA5)),
            tail_bound(n, x, 7, T::lit(ZETA5)),
        ];
        let worst = tails
            .iter()
            .zip(W.iter())
            .map(|(t, w)| *t * T::lit(*w))
            .fold(T::zero(), T::max);
        if worst <= target {
            return Ok(SeriesSums {
                f1: acc[0].value(),
                f3: acc[1].value(),
                f5: acc[2].value(),
                s1: acc[3].value(),
                s2: acc[4].value(),
                abs_f1: abs[0],
                abs_f3: abs[1],
                abs_f5: abs[2],
                abs_s1: abs[3],
                abs_s2: abs[4],
                tails,
                terms_used: n,
            });
        }
    }
    let worst = tails
        .iter()
        .zip(W.iter())
        .map(|(t, w)| *t * T::lit(*w))
        .fold(T::zero(), T::max);
    Err((worst, max_terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small_values() {
        let t = sigma_table(16);
        assert_eq!(t.sigma1[1], 1);
        assert_eq!(t.sigma1[2], 3);
        assert_eq!(t.sigma1[6], 12);
        assert_eq!(t.sigma3[2], 9);
        assert_eq!(t.sigma5[2], 33);
        assert_eq!(t.sigma5[3], 244);
        assert_eq!(t.sigma5[4], 1057);
    }

    #[test]
    fn zeta_majorant_is_valid_where_spec_constant_is_not() {
        // sigma3(2) = 9 exceeds zeta(4)*2^3 ~ 8.66, but not zeta(3)*2^3 ~ 9.62.
        let t = sigma_table(64);
        for n in 1..=64usize {
            let nf = n as f64;
            assert!((t.sigma1[n] as f64) <= nf * nf);
            assert!((t.sigma3[n] as f64) <= ZETA3 * nf.powi(3));
            assert!((t.sigma5[n] as f64) <= ZETA5 * nf.powi(5));
        }
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        // compare against a long direct sum for x = 0.3, k = 5
        let x = 0.3f64;
        for n_last in [4usize, 8, 16] {
            let mut true_tail = 0.0;
            for n in (n_last + 1)..400 {
                true_tail += (n as f64).powi(5) * x.powi(n as i32);
            }
            let bound = tail_bound(n_last, x, 5, 1.0);
            assert!(bound >= true_tail, "bound {bound} < tail {true_tail}");
            assert!(bound < true_tail * 50.0, "bound too loose: {bound} vs {true_tail}");
        }
    }

    #[test]
    fn unreachable_target_reports_bound() {
        let q = num_complex::Complex::new(0.15f64, 0.0);
        let err = eval_sums(q, 1e-14, 8).unwrap_err();
        assert!(err.0 > 1e-14);
    }
}
