//! Monodromy of the torus ODE `y''(z) = I(z; tau) y(z)`.
//!
//! For `tau` with `g2 != 0`, the points `+-q1, +-q2` are where `p''`
//! vanishes: `p(q1) = sqrt(g2/12)`, `p(q2) = -sqrt(g2/12)`. The potential
//!
//! ```text
//! I(z) = 12 p(z) + 2 sum_j [p(z - q_j) + p(z + q_j)]
//!        + sum_j p'(q_j)^2 / (p(q_j) (p(z) - p(q_j)))
//! ```
//!
//! has apparent singularities at `{0, +-q1, +-q2}` mod the lattice. Two
//! independent solutions are `y1 = 1/p''` and `y2 = y1 chi` with
//!
//! ```text
//! chi(z) = 18 p^2 p' + (1/2) g2 p' + 2 g2^2 z - 36 g3 zeta(z)
//! chi1 = chi(z+1) - chi(z)   = 2 (g2^2 - 18 eta1 g3)
//! chi2 = chi(z+tau) - chi(z) = 2 (g2^2 tau - 18 eta2 g3) = chi1 * phi(tau)
//! ```
//!
//! In the basis `(chi1 y1, y2)` the two lattice loops act by the matrices
//! `(1 0; 1 1)` and `(1 0; D 1)` with `D = chi2/chi1 = phi(tau)`; when
//! `chi1 = 0` the basis `(chi2 y1, y2)` is used instead and the generators
//! become the identity and `(1 0; 1 1)`. The module verifies these
//! transfer matrices by numerical integration and reports the deviation.

use num_complex::Complex;
use serde::Serialize;

use crate::eisenstein::{EisensteinEval, Precision};
use crate::error::{Error, Result};
use crate::families::{phi_from_eval, PhiValue};
use crate::halfplane::{serialize_complex, HalfPlanePoint};
use crate::modular::eval_anywhere;
use crate::ode::{circle, integrate_path, route_segment, OdeSettings, Path};
use crate::real::{i_unit, Real};
use crate::weierstrass::{weierstrass_eval_with, WeierstrassEval};

/// 2x2 complex matrix as rows.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_inv<T: Real>(a: &Mat2<T>) -> Result<Mat2<T>> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.norm() == T::zero() {
        return Err(Error::Invariant("singular fundamental matrix".into()));
    }
    Ok([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

fn mat_transpose<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Monodromy data at one `tau`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct MonodromyResult<T: Real> {
    pub tau: HalfPlanePoint<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub q1: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub q2: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub chi1: Complex<T>,
    #[serde(serialize_with = "serialize_complex")]
    pub chi2: Complex<T>,
    /// `chi2/chi1`, or `None` when `chi1` vanishes (the infinity case).
    pub d: Option<[T; 2]>,
    /// Transfer matrices of the two lattice loops, row-major `[re, im]`
    /// pairs, present after ODE verification.
    pub ode_matrices: Option<[[[[T; 2]; 2]; 2]; 2]>,
    /// Max entrywise distance to the expected generators.
    pub ode_deviation: Option<T>,
}

/// Everything fixed once per `tau`: the bundle, the singular points and
/// the exact values of `p` and `p'^2` there.
pub struct TorusContext<T: Real + Serialize> {
    pub ev: EisensteinEval<T>,
    pub q1: Complex<T>,
    pub q2: Complex<T>,
    /// `p(q1) = s`, `p(q2) = -s` with `s = sqrt(g2/12)` (principal branch).
    pub p_q: [Complex<T>; 2],
    /// `p'(q_j)^2 = -(2/3) g2 p(q_j) - g3`, exact in the invariants.
    pub pp2_q: [Complex<T>; 2],
    prec: Precision<T>,
}

const G2_SMALL: f64 = 1e-6;

/// Solves `p(q) = +-sqrt(g2/12)` by Newton from a coarse cell grid.
pub fn solve_singular_points<T: Real + Serialize>(
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<TorusContext<T>> {
    let (ev, _) = eval_anywhere(tau, prec)?;
    let pi = T::PI();
    let natural_g2 = pi.powi(4) * T::lit(4.0) / T::lit(3.0);
    if ev.g2.norm() < T::lit(G2_SMALL) * natural_g2 {
        return Err(Error::G2TooSmall(ev.g2.norm().to_f64().unwrap_or(f64::NAN)));
    }
    let s = (ev.g2 / T::lit(12.0)).sqrt();

    let mut roots: Vec<Complex<T>> = Vec::with_capacity(2);
    for (idx, target) in [s, -s].into_iter().enumerate() {
        let root = newton_on_p(&ev, target, prec)?;
        // certificate: p'' = 6 p^2 - g2/2 vanishes there
        let w = weierstrass_eval_with(root, &ev, prec)?;
        let pdd = w.p_dprime.norm();
        let scale = ev.g2.norm().max(T::one());
        if pdd > T::lit(1e-7) * scale {
            return Err(Error::NoConvergence(format!(
                "p'' residual {:e} at singular point {idx}",
                pdd.to_f64().unwrap_or(f64::NAN)
            )));
        }
        roots.push(root);
    }
    let (q1, q2) = (roots[0], roots[1]);
    let pp2 = |p: Complex<T>| -ev.g2 * p * T::lit(2.0 / 3.0) - ev.g3;
    Ok(TorusContext {
        q1,
        q2,
        p_q: [s, -s],
        pp2_q: [pp2(s), pp2(-s)],
        ev,
        prec: *prec,
    })
}

fn newton_on_p<T: Real + Serialize>(
    ev: &EisensteinEval<T>,
    target: Complex<T>,
    prec: &Precision<T>,
) -> Result<Complex<T>> {
    let tau = ev.tau.to_complex();
    // coarse seeds over the cell, best first
    let mut seeds: Vec<(T, Complex<T>)> = Vec::new();
    let n = 7usize;
    for i in 1..n {
        for j in 1..n {
            let x = T::usize(i) / T::usize(n);
            let y = T::usize(j) / T::usize(n);
            let z = Complex::new(x, T::zero()) + tau * y;
            if let Ok(w) = weierstrass_eval_with(z, ev, prec) {
                seeds.push(((w.p - target).norm(), z));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let scale = target.norm().max(T::one());
    for (_, seed) in seeds.into_iter().take(6) {
        let mut z = seed;
        let mut ok = false;
        for _ in 0..60 {
            let w = match weierstrass_eval_with(z, ev, prec) {
                Ok(w) => w,
                Err(_) => break,
            };
            let f = w.p - target;
            if f.norm() <= T::lit(1e-11) * scale {
                ok = true;
                break;
            }
            let mut step = f / w.p_prime;
            let cap = T::lit(0.2);
            if step.norm() > cap {
                step = step * (cap / step.norm());
            }
            z = z - step;
        }
        if ok {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence("no singular-point seed converged".into()))
}

impl<T: Real + Serialize> TorusContext<T> {
    /// The potential `I(z)`.
    pub fn potential(&self, z: Complex<T>) -> Result<Complex<T>> {
        let w = weierstrass_eval_with(z, &self.ev, &self.prec)?;
        let mut total = w.p * T::lit(12.0);
        let paired = self.p_q.into_iter().zip(self.pp2_q);
        for (qj, (p_qj, pp2_qj)) in [self.q1, self.q2].into_iter().zip(paired) {
            let a = weierstrass_eval_with(z - qj, &self.ev, &self.prec)?;
            let b = weierstrass_eval_with(z + qj, &self.ev, &self.prec)?;
            total = total + (a.p + b.p) * T::lit(2.0);
            total = total + pp2_qj / (p_qj * (w.p - p_qj));
        }
        Ok(total)
    }

    /// `chi(z) = 18 p^2 p' + g2/2 p' + 2 g2^2 z - 36 g3 zeta(z)`.
    pub fn chi(&self, z: Complex<T>) -> Result<Complex<T>> {
        let w = weierstrass_eval_with(z, &self.ev, &self.prec)?;
        Ok(self.chi_from(&w))
    }

    fn chi_from(&self, w: &WeierstrassEval<T>) -> Complex<T> {
        let g2 = self.ev.g2;
        let g3 = self.ev.g3;
        w.p * w.p * w.p_prime * T::lit(18.0)
            + g2 * w.p_prime * T::lit(0.5)
            + g2 * g2 * w.z * T::lit(2.0)
            - g3 * w.zeta_w * T::lit(36.0)
    }

    /// Representatives of all singular points near the rectangle swept by
    /// the loops based at `z0`.
    fn singular_points_near(&self, z0: Complex<T>) -> Vec<Complex<T>> {
        let tau = self.ev.tau.to_complex();
        let mut out = Vec::new();
        for m in -2..=3i32 {
            for n in -2..=3i32 {
                let shift = Complex::new(T::lit(m as f64), T::zero()) + tau * T::lit(n as f64);
                for base in [
                    Complex::new(T::zero(), T::zero()),
                    self.q1,
                    -self.q1,
                    self.q2,
                    -self.q2,
                ] {
                    let s = base + shift;
                    if (s - z0).norm() < T::lit(4.0) * (T::one() + tau.norm()) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    fn min_singular_distance(&self, z: Complex<T>) -> T {
        self.singular_points_near(z)
            .into_iter()
            .map(|s| (s - z).norm())
            .fold(T::infinity(), T::min)
    }
}

/// `chi1`, `chi2`, and `D` by closed forms, with the singular points.
pub fn chi_and_d<T: Real + Serialize>(
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<MonodromyResult<T>> {
    let ctx = solve_singular_points(tau, prec)?;
    Ok(result_from_context(&ctx))
}

fn result_from_context<T: Real + Serialize>(ctx: &TorusContext<T>) -> MonodromyResult<T> {
    let ev = &ctx.ev;
    let chi1 = ev.crit * T::lit(2.0);
    // chi2 = 2 (g2^2 tau - 18 eta2 g3) = 2 (tau crit + 36 pi i g3)
    let chi2 = (ev.tau.to_complex() * ev.crit
        + i_unit::<T>() * (T::lit(36.0) * T::PI()) * ev.g3)
        * T::lit(2.0);
    let d = match phi_from_eval(ev) {
        PhiValue::Finite(v) => Some([v.re, v.im]),
        PhiValue::Infinity => None,
    };
    MonodromyResult {
        tau: ev.tau,
        q1: ctx.q1,
        q2: ctx.q2,
        chi1,
        chi2,
        d,
        ode_matrices: None,
        ode_deviation: None,
    }
}

fn pack<T: Real>(m: &Mat2<T>) -> [[[T; 2]; 2]; 2] {
    let c = |z: Complex<T>| [z.re, z.im];
    [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]]
}

/// Transfer matrix of the loop based at `z0` in the analytic basis
/// `(u, y2)`.
///
/// Both basis functions are single-valued on the plane (all singularities
/// are apparent), so integrating them along the loop lands on their values
/// at `z0 + period`; those are the values at `z0` of the period-shifted
/// solutions, whose coordinates in the original basis form the monodromy
/// matrix: `Phi_num = Phi(z0) * M^T`.
fn transfer_along<T: Real + Serialize>(
    ctx: &TorusContext<T>,
    z0: Complex<T>,
    path: &Path<T>,
    kappa: Complex<T>,
    settings: &OdeSettings<T>,
) -> Result<Mat2<T>> {
    let phi0 = fundamental_matrix(ctx, z0, kappa)?;
    let y0 = [phi0[0][0], phi0[1][0], phi0[0][1], phi0[1][1]];
    let out = integrate_path(path, y0, |z, y| {
        let pot = ctx.potential(z)?;
        Ok([y[1], pot * y[0], y[3], pot * y[2]])
    }, settings)?;
    let phi_end = [[out[0], out[2]], [out[1], out[3]]];
    Ok(mat_transpose(&mat_mul(&mat_inv(&phi0)?, &phi_end)))
}

/// Fundamental matrix `[[u, y2], [u', y2']]` of the analytic basis
/// `u = kappa y1`, `y2 = y1 chi` at the point `z`, from closed forms:
/// `y1 = 1/p''`, `y1' = -12 p p' / p''^2`, `y2' = y1' chi + 7 / y1`.
fn fundamental_matrix<T: Real + Serialize>(
    ctx: &TorusContext<T>,
    z: Complex<T>,
    kappa: Complex<T>,
) -> Result<Mat2<T>> {
    let w = weierstrass_eval_with(z, &ctx.ev, &ctx.prec)?;
    let pdd = w.p_dprime;
    let y1 = Complex::new(T::one(), T::zero()) / pdd;
    let y1p = -w.p * w.p_prime * T::lit(12.0) / (pdd * pdd);
    let chi = ctx.chi_from(&w);
    let y2 = y1 * chi;
    // y2' = y1' chi + y1 chi' with chi' = 7 p''^2, so y1 chi' = 7 p''
    let y2p = y1p * chi + pdd * T::lit(7.0);
    Ok([[y1 * kappa, y2], [y1p * kappa, y2p]])
}

/// Full monodromy verification at `tau`: integrates the ODE along the two
/// lattice loops and reports the transfer matrices in the analytic basis
/// together with their distance to the expected generators.
pub fn ode_monodromy<T: Real + Serialize>(
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
    max_steps: usize,
) -> Result<MonodromyResult<T>> {
    let ctx = solve_singular_points(tau, prec)?;
    let mut result = result_from_context(&ctx);
    let settings = OdeSettings {
        max_steps: if max_steps == 0 { 200_000 } else { max_steps },
        ..OdeSettings::default()
    };

    let tau_c = ctx.ev.tau.to_complex();
    let cell_scale = T::one().min(tau_c.im);
    let clearance = T::lit(0.1) * cell_scale;

    // base point away from all singular points
    let mut z0 = Complex::new(T::lit(0.37), T::zero()) + tau_c * T::lit(0.41);
    let mut tries = 0;
    while ctx.min_singular_distance(z0) < T::lit(0.15) * cell_scale {
        z0 = z0 + Complex::new(T::lit(0.041), T::lit(0.023));
        tries += 1;
        if tries > 64 {
            return Err(Error::PathTooClose("no clear base point found".into()));
        }
    }

    // degenerate normalization at the pole of phi: kappa = chi2 there
    let degenerate = result.d.is_none();
    let kappa = if degenerate { result.chi2 } else { result.chi1 };

    let singular = ctx.singular_points_near(z0);
    let one = Complex::new(T::one(), T::zero());
    let path1 = route_segment(z0, z0 + one, &singular, clearance)?;
    let path_tau = route_segment(z0, z0 + tau_c, &singular, clearance)?;
    let m1 = transfer_along(&ctx, z0, &path1, kappa, &settings)?;
    let mt = transfer_along(&ctx, z0, &path_tau, kappa, &settings)?;

    let zero = Complex::new(T::zero(), T::zero());
    let d_value = result
        .d
        .map(|d| Complex::new(d[0], d[1]))
        .unwrap_or(zero);
    let expected1: Mat2<T> = if degenerate {
        [[one, zero], [zero, one]]
    } else {
        [[one, zero], [one, one]]
    };
    let expected_tau: Mat2<T> = if degenerate {
        [[one, zero], [one, one]]
    } else {
        [[one, zero], [d_value, one]]
    };
    let mut dev = T::zero();
    for (got, want) in [(&m1, &expected1), (&mt, &expected_tau)] {
        for i in 0..2 {
            for j in 0..2 {
                dev = dev.max((got[i][j] - want[i][j]).norm());
            }
        }
    }
    result.ode_matrices = Some([
        [pack(&m1)[0], pack(&m1)[1]],
        [pack(&mt)[0], pack(&mt)[1]],
    ]);
    result.ode_deviation = Some(dev);
    Ok(result)
}

/// Local monodromy around one singular point: identity for apparent
/// singularities. Returns the max entrywise deviation from the identity.
pub fn local_monodromy_deviation<T: Real + Serialize>(
    ctx: &TorusContext<T>,
    center: Complex<T>,
    radius: T,
    settings: &OdeSettings<T>,
) -> Result<T> {
    let z0 = center + Complex::new(radius, T::zero());
    let loop_path = circle(center, radius);
    let kappa = Complex::new(T::one(), T::zero());
    let m = transfer_along(ctx, z0, &loop_path, kappa, settings)?;
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let id: Mat2<T> = [[one, zero], [zero, one]];
    let mut dev = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            dev = dev.max((m[i][j] - id[i][j]).norm());
        }
    }
    Ok(dev)
}
