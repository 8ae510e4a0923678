//! The variable of everything here: a point of the upper half-plane.

use num_complex::Complex;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::Real;

/// A complex number with strictly positive imaginary part.
///
/// The nome `q = exp(2*pi*i*tau)` is always derived on demand, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint<T> {
    re: T,
    im: T,
}

impl<T: Real> HalfPlanePoint<T> {
    pub fn new(re: T, im: T) -> Result<Self> {
        if im > T::zero() && im.is_finite() && re.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(Error::NotInUpperHalfPlane(im.to_f64().unwrap_or(f64::NAN)))
        }
    }

    /// Internal constructor for values already known to be in the half-plane.
    pub(crate) fn new_unchecked(re: T, im: T) -> Self {
        debug_assert!(im > T::zero());
        Self { re, im }
    }

    pub fn from_complex(z: Complex<T>) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn re(&self) -> T {
        self.re
    }

    pub fn im(&self) -> T {
        self.im
    }

    pub fn to_complex(&self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }

    /// The nome `q = exp(2*pi*i*tau)`; satisfies `|q| = exp(-2*pi*im) < 1`.
    pub fn nome(&self) -> Complex<T> {
        let two_pi = T::PI() + T::PI();
        let r = (-two_pi * self.im).exp();
        let phase = two_pi * self.re;
        Complex::new(r * phase.cos(), r * phase.sin())
    }

    pub fn translated(&self, n: T) -> Self {
        Self { re: self.re + n, im: self.im }
    }
}

impl<T: Real> std::fmt::Display for HalfPlanePoint<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

impl<T: Real + Serialize> Serialize for HalfPlanePoint<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.re, self.im].serialize(s)
    }
}

/// Serializes a complex number as the two-element array `[re, im]`.
pub fn serialize_complex<T, S>(z: &Complex<T>, s: S) -> std::result::Result<S::Ok, S::Error>
where
    T: Real + Serialize,
    S: Serializer,
{
    [z.re, z.im].serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_lower_half_plane() {
        assert!(HalfPlanePoint::new(0.3f64, -1.0).is_err());
        assert!(HalfPlanePoint::new(0.3f64, 0.0).is_err());
        assert!(HalfPlanePoint::new(0.3f64, 1.0).is_ok());
    }

    #[test]
    fn nome_magnitude() {
        let tau = HalfPlanePoint::new(0.5f64, 40.0).unwrap();
        let q = tau.nome();
        assert!(q.norm() < 1e-100);
        let tau = HalfPlanePoint::new(0.0f64, 0.5).unwrap();
        assert!((tau.nome().norm() - (-std::f64::consts::PI).exp()).abs() < 1e-15);
    }
}
