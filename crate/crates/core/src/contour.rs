//! Certified zero counting by the argument principle.
//!
//! The boundary of the requested fundamental domain is truncated at height
//! `T` and, for `F0`, the two cusps at 0 and 1 are excised by horocircle
//! caps of Euclidean radius `eps` (circles tangent to the real axis). The
//! family is nonzero on the resulting closed contour; its winding number
//! equals the number of interior zeros counted with multiplicity.
//!
//! Counting runs on two routes at once: the continuous-argument sum of the
//! family values along the adaptively refined contour (exact up to sampling
//! fineness), and the trapezoid quadrature of `f'/f` over the same nodes.
//! The gap between the quadrature and the integer count is reported as
//! `integrality_gap`; the mesh is refined until it is small.

use num_complex::Complex;
use serde::Serialize;

use crate::eisenstein::Precision;
use crate::error::{Error, Result};
use crate::families::{family_bundle, FamilyParam, FamilyValue};
use crate::halfplane::{serialize_complex, HalfPlanePoint};
use crate::modular::eval_anywhere;
use crate::real::Real;

/// Which fundamental domain to count in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    F0,
    F,
}

/// Contour parameters recorded with every count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContourSpec<T> {
    pub truncation_im: T,
    /// Horocircle cap radius at the cusps 0 and 1; absent for `F`, whose
    /// finite boundary stays away from the real axis.
    pub cusp_radius: Option<T>,
    pub samples: usize,
}

/// Winding-number result of one argument-principle contour.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct ZeroCountReport<T: Real> {
    pub count: usize,
    pub contour: ContourSpec<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub winding_raw: Complex<T>,
    pub integrality_gap: T,
    /// Records why the excised caps and the region above the truncation
    /// height contribute no zeros.
    pub note: String,
}

/// One smooth piece of a contour, parametrized over `s in [0, 1]`.
#[derive(Debug, Clone, Copy)]
pub enum Piece<T: Real> {
    Seg(Complex<T>, Complex<T>),
    Arc { center: Complex<T>, radius: T, from: T, to: T },
}

impl<T: Real> Piece<T> {
    pub fn at(&self, s: T) -> Complex<T> {
        match self {
            Piece::Seg(a, b) => *a + (*b - *a) * s,
            Piece::Arc { center, radius, from, to } => {
                let ang = *from + (*to - *from) * s;
                *center + Complex::new(ang.cos(), ang.sin()) * *radius
            }
        }
    }

    pub fn length(&self) -> T {
        match self {
            Piece::Seg(a, b) => (*b - *a).norm(),
            Piece::Arc { radius, from, to, .. } => (*to - *from).abs() * *radius,
        }
    }
}

/// Positively oriented boundary of `F0`, truncated at `im = t_max`, with
/// horocircle caps of radius `eps` at the cusps 0 and 1.
pub fn f0_contour<T: Real>(t_max: T, eps: T) -> Vec<Piece<T>> {
    let one = T::one();
    let half = T::lit(0.5);
    let four_eps2 = T::lit(4.0) * eps * eps;
    let denom = one + four_eps2;
    // second intersection of the cap circle at 0 with |tau - 1/2| = 1/2
    let px = four_eps2 / denom;
    let py = (eps + eps) / denom;
    let p0 = Complex::new(px, py);
    let p1 = Complex::new(one - px, py);

    let cap0_center = Complex::new(T::zero(), eps);
    let cap1_center = Complex::new(one, eps);
    let big_center = Complex::new(half, T::zero());

    let phi_left = (p0 - cap0_center).arg();
    let phi_right = (p1 - cap1_center).arg();
    let theta0 = (p0 - big_center).arg();
    let theta1 = (p1 - big_center).arg();
    let pi_half = T::FRAC_PI_2();

    vec![
        // left edge down
        Piece::Seg(Complex::new(T::zero(), t_max), Complex::new(T::zero(), eps + eps)),
        // clockwise around the excised cap at 0
        Piece::Arc { center: cap0_center, radius: eps, from: pi_half, to: phi_left },
        // along |tau - 1/2| = 1/2, decreasing angle keeps the domain left
        Piece::Arc { center: big_center, radius: half, from: theta0, to: theta1 },
        // clockwise around the excised cap at 1
        Piece::Arc { center: cap1_center, radius: eps, from: phi_right, to: pi_half },
        // right edge up
        Piece::Seg(Complex::new(one, eps + eps), Complex::new(one, t_max)),
        // top, right to left
        Piece::Seg(Complex::new(one, t_max), Complex::new(T::zero(), t_max)),
    ]
}

/// Positively oriented boundary of `F` truncated at `im = t_max`. The finite
/// boundary keeps height >= sqrt(3)/2, so no cusp caps are needed.
pub fn f_contour<T: Real>(t_max: T) -> Vec<Piece<T>> {
    let one = T::one();
    let pi = T::PI();
    vec![
        // |tau| = 1 from i down to the corner e^{i pi/3}
        Piece::Arc {
            center: Complex::new(T::zero(), T::zero()),
            radius: one,
            from: T::FRAC_PI_2(),
            to: pi / T::lit(3.0),
        },
        // |tau - 1| = 1 from the corner to 1 + i
        Piece::Arc {
            center: Complex::new(one, T::zero()),
            radius: one,
            from: pi * T::lit(2.0) / T::lit(3.0),
            to: T::FRAC_PI_2(),
        },
        Piece::Seg(Complex::new(one, one), Complex::new(one, t_max)),
        Piece::Seg(Complex::new(one, t_max), Complex::new(T::zero(), t_max)),
        Piece::Seg(Complex::new(T::zero(), t_max), Complex::new(T::zero(), one)),
    ]
}

struct Node<T: Real> {
    piece: usize,
    s: T,
    z: Complex<T>,
    ratio: Complex<T>, // f'/f
    f: Complex<T>,
}

fn make_node<T, F>(pieces: &[Piece<T>], piece: usize, s: T, eval: &mut F) -> Result<Node<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<FamilyValue<T>>,
{
    let z = pieces[piece].at(s);
    let fv = eval(z)?;
    let fnorm = fv.value.norm();
    if fnorm <= T::lit(1e-9) * fv.scale {
        return Err(Error::BoundaryZero {
            family: "family".into(),
            value: fnorm.to_f64().unwrap_or(0.0),
        });
    }
    Ok(Node { piece, s, z, ratio: fv.derivative / fv.value, f: fv.value })
}

/// Shared winding engine: refine until consecutive argument increments are
/// small, then cross-check the quadrature of f'/f against the integer count.
fn wind<T, F>(pieces: &[Piece<T>], mut eval: F) -> Result<(i64, Complex<T>, T, usize)>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<FamilyValue<T>>,
{
    let mut nodes: Vec<Node<T>> = Vec::new();
    for (k, piece) in pieces.iter().enumerate() {
        let n = (piece.length() / T::lit(0.05)).to_f64().unwrap_or(8.0).ceil().max(8.0) as usize;
        for j in 0..=n {
            let s = T::usize(j) / T::usize(n);
            nodes.push(make_node(pieces, k, s, &mut eval)?);
        }
    }

    let max_arg_step = T::lit(0.4);
    for _round in 0..48 {
        let mut refined = false;
        let mut out: Vec<Node<T>> = Vec::with_capacity(nodes.len() * 2);
        for idx in 0..nodes.len() {
            let next = &nodes[(idx + 1) % nodes.len()];
            let cur = &nodes[idx];
            out.push(Node { ..*cur });
            if cur.piece == next.piece && (next.s - cur.s) > T::lit(1e-9) {
                let darg = (next.f / cur.f).arg().abs();
                if darg > max_arg_step {
                    let mid = (cur.s + next.s) * T::lit(0.5);
                    out.push(make_node(pieces, cur.piece, mid, &mut eval)?);
                    refined = true;
                }
            }
        }
        nodes = out;
        if !refined {
            break;
        }
    }

    // argument route: exact integer winding once steps are below pi;
    // quadrature route: trapezoid of f'/f over the same nodes, refined
    // globally until it agrees with the integer to well under a quarter turn
    let two_pi = T::PI() + T::PI();
    let mut count = 0i64;
    let mut quad = Complex::new(T::zero(), T::zero());
    let mut gap = T::infinity();
    for _pass in 0..4 {
        let mut arg_sum = T::zero();
        quad = Complex::new(T::zero(), T::zero());
        for idx in 0..nodes.len() {
            let cur = &nodes[idx];
            let next = &nodes[(idx + 1) % nodes.len()];
            arg_sum = arg_sum + (next.f / cur.f).arg();
            let dz = next.z - cur.z;
            quad = quad + (cur.ratio + next.ratio) * dz * T::lit(0.5);
        }
        count = (arg_sum / two_pi).round().to_f64().unwrap_or(0.0) as i64;
        gap = (quad / Complex::new(T::zero(), two_pi) - T::lit(count as f64)).norm();
        if gap < T::lit(0.05) {
            break;
        }
        let mut out: Vec<Node<T>> = Vec::with_capacity(nodes.len() * 2);
        for idx in 0..nodes.len() {
            let next_s = if idx + 1 < nodes.len() { Some((nodes[idx + 1].piece, nodes[idx + 1].s)) } else { None };
            let cur = &nodes[idx];
            out.push(Node { ..*cur });
            if let Some((np, ns)) = next_s {
                if np == cur.piece && (ns - cur.s) > T::lit(1e-9) {
                    let mid = (cur.s + ns) * T::lit(0.5);
                    out.push(make_node(pieces, cur.piece, mid, &mut eval)?);
                }
            }
        }
        nodes = out;
    }
    Ok((count, quad, gap, nodes.len()))
}

const COUNT_NOTE: &str = "cusp caps excluded: the family tends to a nonzero limit or to \
infinity at each cusp and at i*infinity, so the excised caps and the region above the \
truncation height contain no zeros";

/// Counts the zeros of the family inside the truncated domain by the
/// argument principle. `t_height >= 5` and `0 < eps <= 0.05` are required;
/// the defaults used by the acceptance checks are `T = 12`, `eps = 0.02`.
pub fn count_zeros<T: Real + Serialize>(
    family: FamilyParam<T>,
    domain: Domain,
    t_height: T,
    eps: T,
    prec: &Precision<T>,
) -> Result<ZeroCountReport<T>> {
    family.validate()?;
    if t_height < T::lit(5.0) {
        return Err(Error::InvalidUse("truncation height must be >= 5".into()));
    }
    if eps <= T::zero() || eps > T::lit(0.05) {
        return Err(Error::InvalidUse("cusp radius must lie in (0, 0.05]".into()));
    }
    if let FamilyParam::CurveC(c) = &family {
        match c.finite() {
            None => {
                return Err(Error::InvalidUse(
                    "zero counting needs a finite curve parameter".into(),
                ))
            }
            Some(c) => {
                if domain == Domain::F0
                    && (c.abs() < T::lit(1e-9) || (c - T::one()).abs() < T::lit(1e-9))
                {
                    return Err(Error::InvalidUse(
                        "f_C vanishes into the cusps of F0 for C in {0, 1}".into(),
                    ));
                }
            }
        }
    }

    let pieces = match domain {
        Domain::F0 => f0_contour(t_height, eps),
        Domain::F => f_contour(t_height),
    };
    let prec = *prec;
    let mut eval = |z: Complex<T>| -> Result<FamilyValue<T>> {
        let tau = HalfPlanePoint::from_complex(z)?;
        let (ev, _) = eval_anywhere(tau, &prec)?;
        family_bundle(&family, &ev)
    };
    let (count, winding_raw, gap, samples) = wind(&pieces, &mut eval)?;
    if count < 0 {
        return Err(Error::Invariant(format!(
            "negative winding count {count}; the contour orientation is positive"
        )));
    }
    if gap >= T::lit(0.25) {
        return Err(Error::NonIntegralWinding {
            winding: (winding_raw / Complex::new(T::zero(), T::PI() + T::PI()))
                .re
                .to_f64()
                .unwrap_or(f64::NAN),
            gap: gap.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(ZeroCountReport {
        count: count as usize,
        contour: ContourSpec {
            truncation_im: t_height,
            cusp_radius: match domain {
                Domain::F0 => Some(eps),
                Domain::F => None,
            },
            samples,
        },
        winding_raw,
        integrality_gap: gap,
        note: COUNT_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::CurveParam;

    fn p() -> Precision<f64> {
        Precision::default()
    }

    fn count_fc(c: f64, domain: Domain) -> ZeroCountReport<f64> {
        count_zeros(FamilyParam::CurveC(CurveParam::Finite(c)), domain, 12.0, 0.02, &p()).unwrap()
    }

    #[test]
    fn contour_geometry_closes() {
        for pieces in [f0_contour(12.0f64, 0.02), f_contour(12.0f64)] {
            for w in pieces.windows(2) {
                let end = w[0].at(1.0);
                let start = w[1].at(0.0);
                assert!((end - start).norm() < 1e-12, "gap between pieces: {end} vs {start}");
            }
            let last = pieces.last().unwrap().at(1.0);
            let first = pieces[0].at(0.0);
            assert!((last - first).norm() < 1e-12);
        }
    }

    #[test]
    fn fc_has_two_zeros_in_f0() {
        let r = count_fc(3.0, Domain::F0);
        assert_eq!(r.count, 2);
        assert!(r.integrality_gap < 0.05, "gap {:e}", r.integrality_gap);
    }

    #[test]
    fn h1_has_one_zero_in_f0() {
        let r = count_zeros(FamilyParam::HomotopyT(1.0), Domain::F0, 12.0, 0.02, &p()).unwrap();
        assert_eq!(r.count, 1);
        assert!(r.integrality_gap < 0.05);
    }

    #[test]
    fn ht_mid_homotopy_has_two_zeros() {
        let r = count_zeros(FamilyParam::HomotopyT(0.5), Domain::F0, 12.0, 0.02, &p()).unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn h0_double_zero_counts_twice() {
        let r = count_zeros(FamilyParam::HomotopyT(0.0), Domain::F0, 12.0, 0.02, &p()).unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn fc_mid_interval_no_zeros_in_f() {
        let r = count_fc(0.5, Domain::F);
        assert_eq!(r.count, 0);
    }

    #[test]
    fn fc_outer_interval_one_zero_in_f() {
        assert_eq!(count_fc(1.5, Domain::F).count, 1);
        assert_eq!(count_fc(-2.0, Domain::F).count, 1);
    }

    #[test]
    fn count_constant_within_each_interval() {
        for cs in [[-5.0, -1.0, -0.1], [0.1, 0.5, 0.9], [1.1, 2.0, 10.0]] {
            let counts: Vec<usize> = cs.iter().map(|c| count_fc(*c, Domain::F0).count).collect();
            assert_eq!(counts, vec![2, 2, 2], "interval {cs:?}");
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        let r = count_zeros(
            FamilyParam::CurveC(CurveParam::Finite(0.0)),
            Domain::F0,
            12.0,
            0.02,
            &p(),
        );
        assert!(matches!(r, Err(Error::InvalidUse(_))));
        let r = count_zeros(
            FamilyParam::CurveC(CurveParam::Finite(3.0)),
            Domain::F0,
            4.0,
            0.02,
            &p(),
        );
        assert!(matches!(r, Err(Error::InvalidUse(_))));
        let r = count_zeros(
            FamilyParam::CurveC(CurveParam::Finite(3.0)),
            Domain::F0,
            12.0,
            0.2,
            &p(),
        );
        assert!(matches!(r, Err(Error::InvalidUse(_))));
    }
}
