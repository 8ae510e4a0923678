//! Tracing the three curves on which the reduced critical points
//! accumulate, their restrictions to `F`, and finite rational samples of
//! the dense critical-point sets.
//!
//! Parameter ranges: curve 2 is `{tau_<(C) | C in (0, inf)}` in the left
//! half, curve 3 is `{tau_>(C) | C in (-inf, 1)}` in the right half, and
//! curve 1 is parametrized by `C in (-inf, 0) u {inf} u (1, inf)` with the
//! splice point at `tau_inf`. Curve 1 is generated as the image of curve 2
//! under `tau -> 1/(1 - tau)` (an exact identity, with `C -> 1/(1 - C)`),
//! and cross-checked against direct solves.

use num_complex::Complex;
use serde::Serialize;

use crate::eisenstein::Precision;
use crate::error::{Error, Result};
use crate::families::{eval_fc_derivative_at_zero, fc_bundle, CurveParam};
use crate::halfplane::HalfPlanePoint;
use crate::locator::{newton, solve_fc};
use crate::modular::{eval_anywhere, in_f};
use crate::real::Real;

/// The three curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveId {
    C1,
    C2,
    C3,
}

impl std::fmt::Display for CurveId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveId::C1 => write!(f, "c1"),
            CurveId::C2 => write!(f, "c2"),
            CurveId::C3 => write!(f, "c3"),
        }
    }
}

/// Which side of `Re tau = 1/2` a curve point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Half {
    Left,
    Right,
}

/// One solved point of a curve: `f_C(tau) = 0`, with its curve label and
/// half-plane side.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct CurvePoint<T: Real> {
    pub c: CurveParam<T>,
    pub tau: HalfPlanePoint<T>,
    pub curve: CurveId,
    pub half: Half,
    /// Relative residual of the defining equation at `tau`.
    pub residual: T,
}

impl<T: Real + Serialize> CurvePoint<T> {
    fn validate(&self) -> Result<()> {
        let ok = match (self.curve, &self.c) {
            (CurveId::C2, CurveParam::Finite(c)) => *c > T::zero() && self.half == Half::Left,
            (CurveId::C3, CurveParam::Finite(c)) => *c < T::one() && self.half == Half::Right,
            (CurveId::C1, CurveParam::Finite(c)) => *c < T::zero() || *c > T::one(),
            (CurveId::C1, CurveParam::Infinity) => true,
            (_, CurveParam::Infinity) => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "curve point violates its parameter/half constraints: {} C = {}",
                self.curve, self.c
            )))
        }
    }
}

/// Finite approximation request for the dense sets: rationals `-d/c` with
/// `|c|, |d| <= max_denominator` (c even for `Gamma_0(2)`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DenseSampleSpec {
    pub max_denominator: u32,
    pub group: crate::matrix::Group,
}

/// A dense-set point tagged with the generating pair `(c, d)`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct DenseSamplePoint<T: Real> {
    pub den_c: i64,
    pub num_d: i64,
    pub point: CurvePoint<T>,
}

const TRACE_IM_CUTOFF: f64 = 30.0;
const TRACE_CUSP_CUTOFF: f64 = 1e-3;

fn near_cusp<T: Real>(z: Complex<T>) -> bool {
    z.norm() < T::lit(TRACE_CUSP_CUTOFF)
        || (z - Complex::new(T::one(), T::zero())).norm() < T::lit(TRACE_CUSP_CUTOFF)
}

/// Traces `tau(C)` over `[c_lo, c_hi]` on one `f_C` branch by
/// predictor-corrector continuation, keeping consecutive points within
/// `max_step` of each other. `mandatory` parameters are always landed on
/// exactly.
fn trace_branch<T: Real + Serialize>(
    half: Half,
    c_lo: T,
    c_hi: T,
    max_step: T,
    mandatory: &[T],
    prec: &Precision<T>,
) -> Result<Vec<(T, Complex<T>, T)>> {
    let start = solve_fc(c_lo, prec)?;
    let rec = match half {
        Half::Left => start.left,
        Half::Right => start.right,
    }
    .ok_or_else(|| Error::InvalidUse(format!("branch absent at C = {c_lo}")))?;

    let fc_at = |c: T, z: Complex<T>| -> Result<crate::families::FamilyValue<T>> {
        let tau = HalfPlanePoint::from_complex(z)?;
        let (ev, _) = eval_anywhere(tau, prec)?;
        Ok(fc_bundle(c, &ev))
    };
    let slope_at = |c: T, z: Complex<T>| -> Result<Complex<T>> {
        let tau = HalfPlanePoint::from_complex(z)?;
        let (ev, _) = eval_anywhere(tau, prec)?;
        Ok(-ev.crit / fc_bundle(c, &ev).derivative)
    };

    let mut out = vec![(c_lo, rec.tau.to_complex(), rec.residual)];
    let mut c_cur = c_lo;
    let mut z = rec.tau.to_complex();
    let mut step_scale = T::one();
    let mut successes = 0usize;
    let mut next_mandatory = mandatory.iter().copied().filter(|m| *m > c_lo).fold(
        c_hi,
        |acc, m| if m < acc { m } else { acc },
    );

    let mut guard = 0usize;
    while c_cur < c_hi {
        guard += 1;
        if guard > 200_000 {
            return Err(Error::NoConvergence("trace exceeded step budget".into()));
        }
        let slope = slope_at(c_cur, z)?;
        let mut dc = (max_step / slope.norm().max(T::lit(1e-12)))
            .min(T::lit(0.25) * (T::one() + c_cur.abs()))
            * step_scale;
        dc = dc.max(T::lit(1e-12) * (T::one() + c_cur.abs()));
        let mut c_next = (c_cur + dc).min(c_hi);
        if c_next >= next_mandatory && c_cur < next_mandatory {
            c_next = next_mandatory;
        }
        let predict = z + slope * (c_next - c_cur);
        let mut f = |w: Complex<T>| fc_at(c_next, w);
        match newton(predict, &mut f, 40) {
            Ok((root, residual)) => {
                let moved = (root - z).norm();
                let side_ok = match half {
                    Half::Left => root.re < T::lit(0.5),
                    Half::Right => root.re > T::lit(0.5),
                };
                if !side_ok {
                    return Err(Error::BranchJump(c_next.to_f64().unwrap_or(f64::NAN)));
                }
                if moved > max_step * T::lit(3.0) {
                    step_scale = step_scale * T::lit(0.5);
                    if step_scale < T::lit(1e-10) {
                        return Err(Error::ContinuationStall(c_cur.to_f64().unwrap_or(f64::NAN)));
                    }
                    continue;
                }
                z = root;
                c_cur = c_next;
                out.push((c_cur, z, residual));
                if c_cur >= next_mandatory {
                    next_mandatory = mandatory
                        .iter()
                        .copied()
                        .filter(|m| *m > c_cur)
                        .fold(c_hi, |acc, m| if m < acc { m } else { acc });
                }
                successes += 1;
                if successes >= 5 {
                    step_scale = (step_scale * T::lit(2.0)).min(T::one());
                    successes = 0;
                }
                if z.im > T::lit(TRACE_IM_CUTOFF) || near_cusp(z) {
                    break;
                }
            }
            Err(_) => {
                successes = 0;
                step_scale = step_scale * T::lit(0.5);
                if step_scale < T::lit(1e-10) {
                    return Err(Error::ContinuationStall(c_cur.to_f64().unwrap_or(f64::NAN)));
                }
            }
        }
    }
    Ok(out)
}

/// Traces one of the three curves over `[c_lo, c_hi]`.
///
/// For curve 1 the range runs through the infinity parameter: `c_lo` must
/// lie in `(1, inf)` and `c_hi` in `(-inf, 0)`; the trace passes through
/// `tau_inf` by the exact correspondence with curve 2.
pub fn trace_curve<T: Real + Serialize>(
    curve: CurveId,
    c_lo: T,
    c_hi: T,
    max_step: T,
    prec: &Precision<T>,
) -> Result<Vec<CurvePoint<T>>> {
    let bad_range = |lo: T, hi: T| Error::InvalidParameterRange {
        curve: curve.to_string(),
        lo: lo.to_f64().unwrap_or(f64::NAN),
        hi: hi.to_f64().unwrap_or(f64::NAN),
    };
    let step = if max_step > T::zero() { max_step } else { T::lit(0.02) };
    match curve {
        CurveId::C2 => {
            if !(T::zero() < c_lo && c_lo < c_hi) {
                return Err(bad_range(c_lo, c_hi));
            }
            let pts = trace_branch(Half::Left, c_lo, c_hi, step, &[T::one()], prec)?;
            pts.into_iter()
                .map(|(c, z, residual)| {
                    let p = CurvePoint {
                        c: CurveParam::Finite(c),
                        tau: HalfPlanePoint::from_complex(z)?,
                        curve: CurveId::C2,
                        half: Half::Left,
                        residual,
                    };
                    p.validate()?;
                    Ok(p)
                })
                .collect()
        }
        CurveId::C3 => {
            if !(c_lo < c_hi && c_hi < T::one()) {
                return Err(bad_range(c_lo, c_hi));
            }
            let pts = trace_branch(Half::Right, c_lo, c_hi, step, &[T::zero()], prec)?;
            pts.into_iter()
                .map(|(c, z, residual)| {
                    let p = CurvePoint {
                        c: CurveParam::Finite(c),
                        tau: HalfPlanePoint::from_complex(z)?,
                        curve: CurveId::C3,
                        half: Half::Right,
                        residual,
                    };
                    p.validate()?;
                    Ok(p)
                })
                .collect()
        }
        CurveId::C1 => {
            if !(c_lo > T::one() && c_hi < T::zero()) {
                return Err(bad_range(c_lo, c_hi));
            }
            // underlying curve-2 parameters: u = (C - 1)/C maps
            // (1, inf) -> (0, 1) and (-inf, 0) -> (1, inf), with C = inf at
            // u = 1; the point map is tau -> 1/(1 - tau)
            let u_lo = (c_lo - T::one()) / c_lo;
            let u_hi = (c_hi - T::one()) / c_hi;
            let base = trace_curve(CurveId::C2, u_lo, u_hi, step, prec)?;
            let one = Complex::new(T::one(), T::zero());
            base.into_iter()
                .map(|p| {
                    let u = p.c.finite().expect("curve 2 parameters are finite");
                    let z = one / (one - p.tau.to_complex());
                    let c_param = if (u - T::one()).abs() <= T::lit(1e-12) {
                        CurveParam::Infinity
                    } else {
                        CurveParam::Finite(T::one() / (T::one() - u))
                    };
                    let q = CurvePoint {
                        c: c_param,
                        tau: HalfPlanePoint::from_complex(z)?,
                        curve: CurveId::C1,
                        half: if z.re < T::lit(0.5) { Half::Left } else { Half::Right },
                        residual: p.residual,
                    };
                    q.validate()?;
                    Ok(q)
                })
                .collect()
        }
    }
}

/// Filters curve points to the `SL(2,Z)` domain `F` and checks the cut
/// parameters: curve 2 enters `F` exactly at `C = 1` (on `|tau| = 1`) and
/// curve 3 leaves at `C = 0` (on `|tau - 1| = 1`).
pub fn restrict_to_f<T: Real + Serialize>(points: &[CurvePoint<T>]) -> Result<Vec<CurvePoint<T>>> {
    let kept: Vec<CurvePoint<T>> = points
        .iter()
        .copied()
        .filter(|p| in_f(p.tau.to_complex()))
        .collect();
    for p in &kept {
        match (p.curve, p.c) {
            (CurveId::C2, CurveParam::Finite(c)) => {
                if c < T::one() - T::lit(1e-6) {
                    return Err(Error::Invariant(format!(
                        "curve 2 point with C = {c} < 1 inside F"
                    )));
                }
                if (c - T::one()).abs() <= T::lit(1e-6) {
                    let r = p.tau.to_complex().norm();
                    if (r - T::one()).abs() > T::lit(1e-9) {
                        return Err(Error::Invariant("curve 2 cut point is off |tau| = 1".into()));
                    }
                }
            }
            (CurveId::C3, CurveParam::Finite(c)) => {
                if c > T::lit(1e-6) {
                    return Err(Error::Invariant(format!(
                        "curve 3 point with C = {c} > 0 inside F"
                    )));
                }
                if c.abs() <= T::lit(1e-6) {
                    let r = (p.tau.to_complex() - Complex::new(T::one(), T::zero())).norm();
                    if (r - T::one()).abs() > T::lit(1e-9) {
                        return Err(Error::Invariant(
                            "curve 3 cut point is off |tau - 1| = 1".into(),
                        ));
                    }
                }
            }
            (CurveId::C1, _) => {
                return Err(Error::Invariant("curve 1 meets F, which must not happen".into()))
            }
            _ => {}
        }
    }
    Ok(kept)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Finite approximation to the dense sets: solves `f_{-d/c} = 0` for every
/// coprime pair with `0 < c <= max_denominator`, `|d| <= max_denominator`
/// (`c` even for `Gamma_0(2)`), keeping the branches the group actually
/// realizes.
pub fn dense_sample<T: Real + Serialize>(
    spec: &DenseSampleSpec,
    prec: &Precision<T>,
) -> Result<Vec<DenseSamplePoint<T>>> {
    if spec.max_denominator < 2 {
        return Err(Error::InvalidUse("max_denominator must be >= 2".into()));
    }
    let dmax = spec.max_denominator as i64;
    let gamma02 = spec.group == crate::matrix::Group::Gamma0_2;
    let mut out = Vec::new();
    let mut c_den = if gamma02 { 2 } else { 1 };
    while c_den <= dmax {
        for d in -dmax..=dmax {
            if gcd(c_den, d) != 1 {
                continue;
            }
            let c_param = T::lit(-(d as f64) / (c_den as f64));
            if gamma02 {
                // c even forces -d/c off {0, 1}; both branches exist
                let roots = solve_fc(c_param, prec)?;
                let l = roots.left.expect("left branch exists off C in {0,1}");
                let r = roots.right.expect("right branch exists off C in {0,1}");
                let (lc, rc) = curve_labels(c_param);
                for (rec, curve, half) in
                    [(l, lc, Half::Left), (r, rc, Half::Right)]
                {
                    let point = CurvePoint {
                        c: CurveParam::Finite(c_param),
                        tau: rec.tau,
                        curve,
                        half,
                        residual: rec.residual,
                    };
                    point.validate()?;
                    out.push(DenseSamplePoint { den_c: c_den, num_d: d, point });
                }
            } else {
                // SL(2,Z): only -d/c <= 0 (right branch) or >= 1 (left)
                // carry critical points
                if c_param >= T::one() {
                    let roots = solve_fc(c_param, prec)?;
                    if let Some(rec) = roots.left {
                        let point = CurvePoint {
                            c: CurveParam::Finite(c_param),
                            tau: rec.tau,
                            curve: CurveId::C2,
                            half: Half::Left,
                            residual: rec.residual,
                        };
                        point.validate()?;
                        out.push(DenseSamplePoint { den_c: c_den, num_d: d, point });
                    }
                } else if c_param <= T::zero() {
                    let roots = solve_fc(c_param, prec)?;
                    if let Some(rec) = roots.right {
                        let point = CurvePoint {
                            c: CurveParam::Finite(c_param),
                            tau: rec.tau,
                            curve: CurveId::C3,
                            half: Half::Right,
                            residual: rec.residual,
                        };
                        point.validate()?;
                        out.push(DenseSamplePoint { den_c: c_den, num_d: d, point });
                    }
                }
            }
        }
        c_den += if gamma02 { 2 } else { 1 };
    }
    out.sort_by(|a, b| {
        (a.point.curve as u8, a.point.c.finite().unwrap().to_f64().unwrap())
            .partial_cmp(&(b.point.curve as u8, b.point.c.finite().unwrap().to_f64().unwrap()))
            .unwrap()
    });
    Ok(out)
}

/// Curve labels of the two branches at parameter `C` (finite, off {0,1}).
fn curve_labels<T: Real>(c: T) -> (CurveId, CurveId) {
    if c < T::zero() {
        (CurveId::C1, CurveId::C3)
    } else if c < T::one() {
        (CurveId::C2, CurveId::C3)
    } else {
        (CurveId::C2, CurveId::C1)
    }
}

/// Maximum deviation of the reflection identity
/// `tau at (1 - C) on the opposite branch = 1 - conj(tau at C)`
/// over the supplied points; the partner root is solved fresh for each.
pub fn symmetry_check<T: Real + Serialize>(
    points: &[CurvePoint<T>],
    prec: &Precision<T>,
) -> Result<T> {
    let mut worst = T::zero();
    for p in points {
        let c = match p.c.finite() {
            Some(c) => c,
            None => continue,
        };
        let partner_param = T::one() - c;
        let roots = solve_fc(partner_param, prec)?;
        let partner = match p.half {
            Half::Left => roots.right,
            Half::Right => roots.left,
        };
        let partner = partner.ok_or_else(|| {
            Error::Invariant(format!("partner branch missing at C = {partner_param}"))
        })?;
        let expected = Complex::new(T::one(), T::zero()) - p.tau.to_complex().conj();
        let dev = (partner.tau.to_complex() - expected).norm();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Consistency of a traced point set: `phi(tau) = C` for every finite
/// parameter, and the simplicity certificate at each point.
pub fn parameter_consistency<T: Real + Serialize>(
    points: &[CurvePoint<T>],
    prec: &Precision<T>,
) -> Result<T> {
    let mut worst = T::zero();
    for p in points {
        if let Some(c) = p.c.finite() {
            if let crate::families::PhiValue::Finite(v) =
                crate::families::eval_phi(p.tau, prec)?
            {
                worst = worst.max((v - Complex::new(c, T::zero())).norm());
            } else {
                return Err(Error::Invariant("phi infinite at a finite-parameter point".into()));
            }
            let d = eval_fc_derivative_at_zero(c, p.tau, prec)?;
            if d.norm() == T::zero() {
                return Err(Error::Invariant("zero derivative on a curve point".into()));
            }
        }
    }
    Ok(worst)
}

/// Minimum Euclidean distance between a point and a polyline.
pub fn distance_to_polyline<T: Real>(z: Complex<T>, polyline: &[Complex<T>]) -> T {
    let mut best = T::infinity();
    for w in polyline.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = b - a;
        let len2 = ab.norm_sqr();
        let t = if len2 > T::zero() {
            (((z - a) * ab.conj()).re / len2).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        let proj = a + ab * t;
        best = best.min((z - proj).norm());
    }
    best
}

/// Minimum pairwise distance between two polylines, restricted to points
/// away from the cusps and below the given height.
pub fn polyline_separation<T: Real>(
    a: &[Complex<T>],
    b: &[Complex<T>],
    im_cap: T,
) -> T {
    let keep = |z: &Complex<T>| {
        z.im <= im_cap
            && z.norm() > T::lit(0.05)
            && (*z - Complex::new(T::one(), T::zero())).norm() > T::lit(0.05)
    };
    let mut best = T::infinity();
    for z in a.iter().filter(|z| keep(z)) {
        best = best.min(distance_to_polyline(*z, b));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Group;

    fn p() -> Precision<f64> {
        Precision::default()
    }

    fn polyline(points: &[CurvePoint<f64>]) -> Vec<Complex<f64>> {
        points.iter().map(|p| p.tau.to_complex()).collect()
    }

    #[test]
    fn c2_endpoint_trends() {
        let pts = trace_curve(CurveId::C2, 0.001, 1000.0, 0.05, &p()).unwrap();
        assert!(pts.len() > 30, "unexpectedly sparse trace: {}", pts.len());
        // toward C -> 0 the curve heads to the cusp at 0 (slowly)
        let first = pts.first().unwrap().tau.to_complex();
        let at_mid = pts
            .iter()
            .find(|q| q.c.finite().unwrap() >= 0.05)
            .unwrap()
            .tau
            .to_complex();
        assert!(first.norm() < at_mid.norm());
        // toward C -> +inf: Re -> 1/4, Im large
        let last = pts.last().unwrap();
        assert!((last.tau.re() - 0.25).abs() < 0.02);
        assert!(last.tau.im() > 1.9);
        // all on the left half, ordered in C
        for q in &pts {
            assert_eq!(q.half, Half::Left);
        }
        for w in pts.windows(2) {
            assert!(w[0].c.finite().unwrap() < w[1].c.finite().unwrap());
            let step = (w[0].tau.to_complex() - w[1].tau.to_complex()).norm();
            assert!(step <= 0.15 + 1e-9, "step too large: {step}");
        }
    }

    #[test]
    fn c3_endpoints() {
        let pts = trace_curve(CurveId::C3, -1000.0, 0.999, 0.05, &p()).unwrap();
        let last = pts.last().unwrap().tau.to_complex();
        // toward C -> 1^- the curve heads to the cusp at 1
        assert!((last - Complex::new(1.0, 0.0)).norm() < 0.7);
        // toward C -> -inf: Re -> 3/4
        let first = pts.first().unwrap();
        assert!((first.tau.re() - 0.75).abs() < 0.02);
        for q in &pts {
            assert_eq!(q.half, Half::Right);
        }
    }

    #[test]
    fn c1_passes_through_tau_inf_and_matches_direct_solves() {
        let pts = trace_curve(CurveId::C1, 4.0, -4.0, 0.02, &p()).unwrap();
        let inf_pts: Vec<_> = pts.iter().filter(|q| q.c.finite().is_none()).collect();
        assert_eq!(inf_pts.len(), 1, "exactly one splice point at C = inf");
        let ti = inf_pts[0].tau;
        assert!((ti.re() - 0.5).abs() < 1e-9);
        assert!((ti.im() - 0.6341269863).abs() < 1e-8);

        // cross-check a few mapped points against direct solves
        for q in pts.iter().filter(|q| q.c.finite().is_some()).step_by(7) {
            let c = q.c.finite().unwrap();
            let roots = solve_fc(c, &p()).unwrap();
            let direct = if c > 1.0 { roots.right.unwrap() } else { roots.left.unwrap() };
            let dev = (direct.tau.to_complex() - q.tau.to_complex()).norm();
            assert!(dev < 1e-8, "C = {c}: mapped vs direct deviation {dev:e}");
        }
    }

    #[test]
    fn mapping_identity_c1_equals_image_of_c2() {
        let pts = trace_curve(CurveId::C2, 0.3, 3.0, 0.05, &p()).unwrap();
        for q in pts.iter().step_by(5) {
            let c = q.c.finite().unwrap();
            if (c - 1.0).abs() < 1e-9 {
                continue;
            }
            let mapped = Complex::new(1.0, 0.0) / (Complex::new(1.0, 0.0) - q.tau.to_complex());
            let cp = 1.0 / (1.0 - c);
            let roots = solve_fc(cp, &p()).unwrap();
            let on_c1 = if cp > 1.0 { roots.right.unwrap() } else { roots.left.unwrap() };
            assert!((on_c1.tau.to_complex() - mapped).norm() < 1e-8);
        }
    }

    #[test]
    fn restriction_to_f_cuts_at_the_right_parameters() {
        let c2 = trace_curve(CurveId::C2, 0.5, 3.0, 0.05, &p()).unwrap();
        let kept = restrict_to_f(&c2).unwrap();
        assert!(kept.iter().all(|q| q.c.finite().unwrap() >= 1.0 - 1e-6));
        assert!(kept.iter().any(|q| q.c.finite().unwrap() > 1.5));
        // the cut end of the restriction is the C = 1 root on |tau| = 1
        let first = kept
            .iter()
            .min_by(|a, b| a.c.finite().unwrap().partial_cmp(&b.c.finite().unwrap()).unwrap())
            .unwrap();
        let tau1 = solve_fc(1.0, &p()).unwrap().left.unwrap().tau.to_complex();
        assert!((first.tau.to_complex() - tau1).norm() < 0.05);
        // C = 0.5 solved directly must be excluded, C = 2 included
        let r05 = solve_fc(0.5, &p()).unwrap().left.unwrap();
        assert!(!in_f(r05.tau.to_complex()));
        let r2 = solve_fc(2.0, &p()).unwrap().left.unwrap();
        assert!(in_f(r2.tau.to_complex()));

        let c1 = trace_curve(CurveId::C1, 4.0, -4.0, 0.05, &p()).unwrap();
        let kept = restrict_to_f(&c1).unwrap();
        assert!(kept.is_empty(), "curve 1 must not meet F");
    }

    #[test]
    fn boundary_points_on_unit_circles() {
        let r1 = solve_fc(1.0, &p()).unwrap().left.unwrap();
        assert!((r1.tau.to_complex().norm() - 1.0).abs() < 1e-9);
        let r0 = solve_fc(0.0, &p()).unwrap().right.unwrap();
        assert!(((r0.tau.to_complex() - Complex::new(1.0, 0.0)).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dense_sample_small_gamma02() {
        let spec = DenseSampleSpec { max_denominator: 2, group: Group::Gamma0_2 };
        let pts = dense_sample(&spec, &p()).unwrap();
        // c = 2, d odd in [-2, 2]: C in {1/2, -1/2}; two branches each
        let cs: Vec<f64> = pts.iter().map(|q| q.point.c.finite().unwrap()).collect();
        assert_eq!(pts.len(), 4);
        assert!(cs.contains(&0.5) && cs.contains(&-0.5));
        for q in &pts {
            assert!(q.point.residual < 1e-9);
        }
    }

    #[test]
    fn dense_sample_sl2z_stays_on_the_f_curves() {
        let spec = DenseSampleSpec { max_denominator: 3, group: Group::Sl2z };
        let pts = dense_sample(&spec, &p()).unwrap();
        assert!(!pts.is_empty());
        for q in &pts {
            let c = q.point.c.finite().unwrap();
            assert!(c <= 0.0 || c >= 1.0);
            // every SL(2,Z) sample lies in the closure of F
            assert!(in_f(q.point.tau.to_complex()), "C = {c} sample left F");
        }
    }

    #[test]
    fn symmetry_pairs() {
        let mut points = Vec::new();
        for c in [0.3, 0.5, 2.0] {
            let roots = solve_fc(c, &p()).unwrap();
            let rec = roots.left.unwrap();
            points.push(CurvePoint {
                c: CurveParam::Finite(c),
                tau: rec.tau,
                curve: CurveId::C2,
                half: Half::Left,
                residual: rec.residual,
            });
        }
        let dev = symmetry_check(&points, &p()).unwrap();
        assert!(dev < 1e-8, "symmetry deviation {dev:e}");
    }

    #[test]
    fn traced_points_return_their_parameter_through_phi() {
        let pts = trace_curve(CurveId::C2, 0.2, 5.0, 0.05, &p()).unwrap();
        let worst = parameter_consistency(&pts, &p()).unwrap();
        assert!(worst < 1e-8, "phi consistency {worst:e}");
    }

    #[test]
    fn curves_are_pairwise_separated() {
        let c1 = polyline(&trace_curve(CurveId::C1, 50.0, -50.0, 0.02, &p()).unwrap());
        let c2 = polyline(&trace_curve(CurveId::C2, 0.01, 200.0, 0.02, &p()).unwrap());
        let c3 = polyline(&trace_curve(CurveId::C3, -200.0, 0.99, 0.02, &p()).unwrap());
        let d12 = polyline_separation(&c1, &c2, 10.0);
        let d13 = polyline_separation(&c1, &c3, 10.0);
        let d23 = polyline_separation(&c2, &c3, 10.0);
        assert!(d12 > 0.0 && d13 > 0.0 && d23 > 0.0);
        assert!(d12.min(d13).min(d23) > 1e-3, "curves nearly touch: {d12} {d13} {d23}");
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        assert!(matches!(
            trace_curve(CurveId::C2, -1.0, 2.0, 0.02, &p()),
            Err(Error::InvalidParameterRange { .. })
        ));
        assert!(matches!(
            trace_curve(CurveId::C1, 0.5, -1.0, 0.02, &p()),
            Err(Error::InvalidParameterRange { .. })
        ));
        assert!(matches!(
            trace_curve(CurveId::C3, -1.0, 1.5, 0.02, &p()),
            Err(Error::InvalidParameterRange { .. })
        ));
    }
}
