//! Integer matrices acting on the half-plane.

use num_complex::Complex;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::Real;

/// The two groups whose fundamental domains appear throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Sl2z,
    Gamma0_2,
}

/// An integer 2x2 matrix of determinant one, taken modulo `{+-I}`.
///
/// The canonical coset representative has `c > 0`, or `c = 0` and `d > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a
            .checked_mul(d)
            .and_then(|ad| b.checked_mul(c).map(|bc| ad - bc))
            .ok_or(Error::ReductionOverflow)?;
        if det != 1 {
            return Err(Error::NotUnimodular { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d }.canonical())
    }

    pub fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    /// `T^n`, the translation `tau -> tau + n`.
    pub fn translation(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }
    }

    /// The inversion `S: tau -> -1/tau`.
    pub fn inversion() -> Self {
        Self { a: 0, b: -1, c: 1, d: 0 }
    }

    /// First coset matrix in `F0 = F u gamma1(F) u gamma2(F)`.
    pub fn gamma1() -> Self {
        Self { a: 0, b: 1, c: -1, d: 1 }.canonical()
    }

    /// Second coset matrix; inverse of `gamma1`.
    pub fn gamma2() -> Self {
        Self { a: 1, b: -1, c: 1, d: 0 }
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    /// Representative of the `{+-I}` coset with `c > 0`, or `c = 0, d > 0`.
    pub fn canonical(self) -> Self {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    pub fn is_in_gamma0_2(&self) -> bool {
        self.c % 2 == 0
    }

    pub fn is_identity(&self) -> bool {
        let m = self.canonical();
        m.a == 1 && m.b == 0 && m.c == 0 && m.d == 1
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        let mul = |x: i64, y: i64| x.checked_mul(y).ok_or(Error::ReductionOverflow);
        let add = |x: i64, y: i64| x.checked_add(y).ok_or(Error::ReductionOverflow);
        Ok(Self {
            a: add(mul(self.a, rhs.a)?, mul(self.b, rhs.c)?)?,
            b: add(mul(self.a, rhs.b)?, mul(self.b, rhs.d)?)?,
            c: add(mul(self.c, rhs.a)?, mul(self.d, rhs.c)?)?,
            d: add(mul(self.c, rhs.b)?, mul(self.d, rhs.d)?)?,
        }
        .canonical())
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    /// `c tau + d`, the automorphy factor.
    pub fn cocycle<T: Real>(&self, tau: Complex<T>) -> Complex<T> {
        tau * T::lit(self.c as f64) + T::lit(self.d as f64)
    }

    /// The cusp `-d/c` this matrix sends to infinity; `None` when `c = 0`.
    pub fn cusp_parameter<T: Real>(&self) -> Option<T> {
        if self.c == 0 {
            None
        } else {
            Some(T::lit(-(self.d as f64) / (self.c as f64)))
        }
    }
}

impl Serialize for UnimodularMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(4))?;
        for v in [self.a, self.b, self.c, self.d] {
            seq.serialize_element(&v)?;
        }
        seq.end()
    }
}

impl std::fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{};{},{}]", self.a, self.b, self.c, self.d)
    }
}

/// A fundamental domain `gamma(F)` or `gamma(F0)` named by its group and
/// translate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DomainLabel {
    pub group: Group,
    pub representative: UnimodularMatrix,
}

impl DomainLabel {
    pub fn new(group: Group, representative: UnimodularMatrix) -> Result<Self> {
        if group == Group::Gamma0_2 && !representative.is_in_gamma0_2() {
            return Err(Error::MembershipViolation(format!(
                "{representative} has odd lower-left entry"
            )));
        }
        Ok(Self { group, representative })
    }
}
