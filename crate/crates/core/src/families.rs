//! The one-parameter families whose zeros organize the critical points:
//!
//! ```text
//! h_t(tau) = g2^2 - 18 t eta1 g3                         t in [0, 1]
//! f_C(tau) = (C - tau) g2^2 - 18 (C eta1 - eta2) g3      C real
//!          = (C - tau) (g2^2 - 18 eta1 g3) - 36 pi i g3
//! phi(tau) = tau + 36 pi i g3 / (g2^2 - 18 eta1 g3)
//! ```
//!
//! `f_C(tau) = 0` is equivalent to `phi(tau) = C`. Everything is assembled
//! from the cancellation-free `crit` field of the bundle, in particular
//! `h_t = crit + (16/9) pi^8 (1-t) E2 E6`, which is exact and stays accurate
//! both near `t = 1` and high in the half-plane.

use num_complex::Complex;
use serde::{Serialize, Serializer};

use crate::eisenstein::{EisensteinEval, Precision};
use crate::error::{Error, Result};
use crate::halfplane::HalfPlanePoint;
use crate::modular::eval_anywhere;
use crate::real::{i_unit, Real};

/// A real curve parameter that may be the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveParam<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> CurveParam<T> {
    pub fn finite(&self) -> Option<T> {
        match self {
            CurveParam::Finite(v) => Some(*v),
            CurveParam::Infinity => None,
        }
    }
}

impl<T: Real + Serialize> Serialize for CurveParam<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CurveParam::Finite(v) => v.serialize(s),
            CurveParam::Infinity => "inf".serialize(s),
        }
    }
}

impl<T: Real> std::fmt::Display for CurveParam<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveParam::Finite(v) => write!(f, "{v}"),
            CurveParam::Infinity => write!(f, "inf"),
        }
    }
}

/// Which family a zero belongs to, with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
#[serde(bound = "T: Real + Serialize")]
pub enum FamilyParam<T> {
    HomotopyT(T),
    CurveC(CurveParam<T>),
}

impl<T: Real> FamilyParam<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyParam::HomotopyT(t) => {
                if *t < T::zero() || *t > T::one() {
                    return Err(Error::InvalidUse(format!(
                        "homotopy parameter {} outside [0, 1]",
                        t
                    )));
                }
            }
            FamilyParam::CurveC(CurveParam::Finite(c)) => {
                if !c.is_finite() {
                    return Err(Error::InvalidUse("curve parameter must be finite".into()));
                }
            }
            FamilyParam::CurveC(CurveParam::Infinity) => {}
        }
        Ok(())
    }
}

/// Value of `phi`; the pole set of `phi` is exactly the critical-point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiValue<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> PhiValue<T> {
    pub fn finite(&self) -> Option<Complex<T>> {
        match self {
            PhiValue::Finite(v) => Some(*v),
            PhiValue::Infinity => None,
        }
    }
}

/// Family value, closed-form derivative, and a local magnitude scale for
/// relative residuals, all at one point.
#[derive(Debug, Clone, Copy)]
pub struct FamilyValue<T> {
    pub value: Complex<T>,
    pub derivative: Complex<T>,
    pub scale: T,
}

pub(crate) fn pi8<T: Real>() -> T {
    let pi2 = T::PI() * T::PI();
    (pi2 * pi2).powi(2)
}

/// `f_C` and its derivative from an already computed bundle.
///
/// Off zeros the derivative is the exact expansion
/// `f_C' = -7 crit + (C - tau) crit'`, obtained from the first-derivative
/// identities; it degenerates to the usual closed form at zeros.
pub fn fc_bundle<T: Real + Serialize>(c: T, ev: &EisensteinEval<T>) -> FamilyValue<T> {
    let tau = ev.tau.to_complex();
    let c_minus_tau = Complex::new(c, T::zero()) - tau;
    let pref = i_unit::<T>() * (T::lit(36.0) * T::PI());
    let value = c_minus_tau * ev.crit - pref * ev.g3;
    let derivative = -ev.crit * T::lit(7.0) + c_minus_tau * ev.crit_prime;
    let scale = c_minus_tau.norm() * ev.crit_scale.max(ev.crit.norm())
        + T::lit(36.0) * T::PI() * ev.g3.norm();
    FamilyValue { value, derivative, scale }
}

/// `h_t` and its derivative from a bundle.
pub fn ht_bundle<T: Real + Serialize>(t: T, ev: &EisensteinEval<T>) -> FamilyValue<T> {
    let coeff = pi8::<T>() * T::lit(16.0) / T::lit(9.0) * (T::one() - t);
    let e2e6 = ev.e2 * ev.e6;
    let value = ev.crit + e2e6 * coeff;
    // (E2 E6)' = E2' E6 + E2 E6' with E2' = (i/8pi^3)(12 eta1^2 - g2),
    // E6' = -1008 pi i s1
    let pi = T::PI();
    let e2_prime = i_unit::<T>() / (T::lit(8.0) * pi * pi * pi)
        * (ev.eta1 * ev.eta1 * T::lit(12.0) - ev.g2);
    let e6_prime = -i_unit::<T>() * pi * T::lit(1008.0) * ev.s1();
    let derivative = ev.crit_prime + (e2_prime * ev.e6 + ev.e2 * e6_prime) * coeff;
    let scale = ev.crit_scale.max(ev.crit.norm()) + (e2e6 * coeff).norm();
    FamilyValue { value, derivative, scale }
}

pub fn family_bundle<T: Real + Serialize>(
    param: &FamilyParam<T>,
    ev: &EisensteinEval<T>,
) -> Result<FamilyValue<T>> {
    param.validate()?;
    match param {
        FamilyParam::HomotopyT(t) => Ok(ht_bundle(*t, ev)),
        FamilyParam::CurveC(CurveParam::Finite(c)) => Ok(fc_bundle(*c, ev)),
        FamilyParam::CurveC(CurveParam::Infinity) => Err(Error::InvalidUse(
            "family evaluation requires a finite curve parameter".into(),
        )),
    }
}

/// `h_t(tau)` for `t in [0, 1]`, valid anywhere in the half-plane.
pub fn eval_h<T: Real + Serialize>(
    t: T,
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<Complex<T>> {
    FamilyParam::HomotopyT(t).validate()?;
    let (ev, _) = eval_anywhere(tau, prec)?;
    Ok(ht_bundle(t, &ev).value)
}

/// `f_C(tau)` for finite real `C`, valid anywhere in the half-plane.
pub fn eval_fc<T: Real + Serialize>(
    c: T,
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<Complex<T>> {
    if !c.is_finite() {
        return Err(Error::InvalidUse("f_C requires a finite C".into()));
    }
    let (ev, _) = eval_anywhere(tau, prec)?;
    Ok(fc_bundle(c, &ev).value)
}

/// `phi(tau)`, with the pole reported as `Infinity` whenever the
/// denominator is indistinguishable from zero at the certified error level.
pub fn eval_phi<T: Real + Serialize>(
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<PhiValue<T>> {
    let (ev, _) = eval_anywhere(tau, prec)?;
    Ok(phi_from_eval(&ev))
}

pub fn phi_from_eval<T: Real + Serialize>(ev: &EisensteinEval<T>) -> PhiValue<T> {
    let threshold = ev.errs.crit * T::lit(4.0);
    if ev.crit.norm() <= threshold {
        return PhiValue::Infinity;
    }
    let pref = i_unit::<T>() * (T::lit(36.0) * T::PI());
    PhiValue::Finite(ev.tau.to_complex() + pref * ev.g3 / ev.crit)
}

/// Closed-form `f_C'` at a zero of `f_C`:
/// `-7 g2 (g2^3 - 27 g3^2) / (g2^2 - 18 eta1 g3)`.
///
/// Valid only where `f_C` actually vanishes (enforced), and nonzero there
/// because `g2 != 0` at any zero of `f_C` and the discriminant never
/// vanishes — the simplicity certificate for accepted roots.
pub fn eval_fc_derivative_at_zero<T: Real + Serialize>(
    c: T,
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<Complex<T>> {
    let (ev, _) = eval_anywhere(tau, prec)?;
    let fv = fc_bundle(c, &ev);
    let residual = fv.value.norm() / fv.scale;
    if residual > T::lit(1e-6) {
        return Err(Error::InvalidUse(format!(
            "f_C does not vanish here (relative residual {:e})",
            residual.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if ev.g2.norm() <= ev.errs.g2 * T::lit(4.0) {
        return Err(Error::G2TooSmall(ev.g2.norm().to_f64().unwrap_or(f64::NAN)));
    }
    Ok(-ev.g2 * ev.discriminant * T::lit(7.0) / ev.crit)
}
