//! Numerical machinery around the weight-six Eisenstein series `E6` and the
//! Weierstrass invariant `g3`.
//!
//! The crate evaluates the quasimodular bundle (`E2`, `E4`, `E6`, `g2`, `g3`,
//! `eta1`, `eta2`) by divisor-sum q-expansions with certified truncation
//! bounds, reduces points into fundamental domains of `SL(2,Z)` and
//! `Gamma_0(2)`, locates and certifies every critical point of `E6` in a
//! given fundamental domain, traces the three curves on which the reduced
//! critical points accumulate, and extracts the monodromy data of the
//! associated second-order linear ODE on the torus.
//!
//! All core math is generic over the scalar type through [`Real`]; the
//! `*64` aliases below fix the default double-precision instantiation.

pub mod contour;
pub mod curves;
pub mod eisenstein;
pub mod error;
pub mod export;
pub mod families;
pub mod halfplane;
pub mod lattice;
pub mod locator;
pub mod matrix;
pub mod modular;
pub mod monodromy;
pub mod ode;
pub mod real;
pub mod series;
pub mod verify;
pub mod weierstrass;

pub use contour::{count_zeros, Domain, ZeroCountReport};
pub use curves::{
    dense_sample, restrict_to_f, symmetry_check, trace_curve, CurveId, CurvePoint,
    DenseSamplePoint, DenseSampleSpec, Half,
};
pub use eisenstein::{derivative_bundle, eval, ramanujan_residual, EisensteinEval, Precision};
pub use error::{Error, Result};
pub use families::{
    eval_fc, eval_fc_derivative_at_zero, eval_h, eval_phi, CurveParam, FamilyParam, PhiValue,
};
pub use halfplane::HalfPlanePoint;
pub use locator::{
    critical_points_in_domain, find_tau_infinity, solve_fc, FcRoots, HalfLine, ZeroRecord,
};
pub use matrix::{DomainLabel, Group, UnimodularMatrix};
pub use modular::{eval_anywhere, mobius_apply, reduce_to_f, reduce_to_f0, transform_eval};
pub use monodromy::{chi_and_d, ode_monodromy, MonodromyResult};
pub use real::Real;
pub use weierstrass::{weierstrass_eval, WeierstrassEval};

/// Concrete double-precision aliases, the default instantiation.
pub type HalfPlanePoint64 = HalfPlanePoint<f64>;
pub type Precision64 = Precision<f64>;
pub type EisensteinEval64 = EisensteinEval<f64>;
pub type ZeroRecord64 = ZeroRecord<f64>;
pub type ZeroCountReport64 = ZeroCountReport<f64>;
pub type CurvePoint64 = CurvePoint<f64>;
pub type WeierstrassEval64 = WeierstrassEval<f64>;
pub type MonodromyResult64 = MonodromyResult<f64>;
