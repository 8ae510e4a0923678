//! Locating and certifying the zeros that carry the critical points: the
//! distinguished zero `tau_inf = 1/2 + i b_inf` of `g2^2 - 18 eta1 g3` in
//! `F0`, the two `f_C` branches `tau_<(C)` and `tau_>(C)`, and the critical
//! points of `E6` inside an arbitrary fundamental domain.

use num_complex::Complex;
use serde::Serialize;

use crate::eisenstein::{eval, Precision};
use crate::error::{Error, Result};
use crate::families::{fc_bundle, CurveParam, FamilyParam, FamilyValue};
use crate::halfplane::HalfPlanePoint;
use crate::matrix::{Group, UnimodularMatrix};
use crate::modular::{eval_anywhere, mobius_apply};
use crate::real::{i_unit, Real};

/// Position of a zero relative to the half-line `Re tau = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfLine {
    LeftOfHalfLine,
    OnHalfLine,
    RightOfHalfLine,
}

/// A certified zero of one of the families.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct ZeroRecord<T: Real> {
    pub tau: HalfPlanePoint<T>,
    pub param: FamilyParam<T>,
    /// `|f| / scale` at the returned point.
    pub residual: T,
    pub multiplicity: u32,
    pub half: HalfLine,
}

/// The two `f_C` branches; a branch is absent exactly at the degenerate
/// parameters `C = 0` (left absent) and `C = 1` (right absent).
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound = "T: Real + Serialize")]
pub struct FcRoots<T: Real> {
    pub left: Option<ZeroRecord<T>>,
    pub right: Option<ZeroRecord<T>>,
}

fn half_of<T: Real>(re: T) -> HalfLine {
    let half = T::lit(0.5);
    let tol = T::lit(1e-9);
    if (re - half).abs() <= tol {
        HalfLine::OnHalfLine
    } else if re < half {
        HalfLine::LeftOfHalfLine
    } else {
        HalfLine::RightOfHalfLine
    }
}

const NEWTON_TOL: f64 = 1e-12;
const MAX_NEWTON_STEP: f64 = 0.25;

/// Damped Newton iteration on a holomorphic function given by `eval`.
/// Steps are clipped to 0.25 and halved while the residual refuses to
/// decrease.
pub(crate) fn newton<T, F>(mut z: Complex<T>, mut eval: F, max_iter: usize) -> Result<(Complex<T>, T)>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<FamilyValue<T>>,
{
    let mut fv = eval(z)?;
    let mut res = fv.value.norm() / fv.scale;
    for _ in 0..max_iter {
        if res <= T::lit(NEWTON_TOL) {
            return Ok((z, res));
        }
        let mut step = fv.value / fv.derivative;
        let cap = T::lit(MAX_NEWTON_STEP);
        if step.norm() > cap {
            step = step * (cap / step.norm());
        }
        let mut advanced = false;
        for _ in 0..10 {
            let cand = z - step;
            if cand.im <= T::zero() {
                step = step * T::lit(0.5);
                continue;
            }
            if let Ok(cfv) = eval(cand) {
                let cres = cfv.value.norm() / cfv.scale;
                if cres < res {
                    z = cand;
                    fv = cfv;
                    res = cres;
                    advanced = true;
                    break;
                }
            }
            step = step * T::lit(0.5);
        }
        if !advanced {
            break;
        }
    }
    if res <= T::lit(NEWTON_TOL) {
        Ok((z, res))
    } else {
        Err(Error::NoConvergence(format!(
            "newton stalled at residual {:e}",
            res.to_f64().unwrap_or(f64::NAN)
        )))
    }
}

fn fc_eval_closure<T: Real + Serialize>(
    c: T,
    prec: &Precision<T>,
) -> impl FnMut(Complex<T>) -> Result<FamilyValue<T>> + '_ {
    move |z| {
        let tau = HalfPlanePoint::from_complex(z)?;
        let (ev, _) = eval_anywhere(tau, prec)?;
        Ok(fc_bundle(c, &ev))
    }
}

/// Finds `tau_inf`, the unique zero of `g2^2 - 18 eta1 g3` in `F0`.
///
/// On the half-line `Re = 1/2` the combination is real with a sign change
/// inside `(1/2, sqrt(3)/2)`; bisection brackets it and Newton polishes.
pub fn find_tau_infinity<T: Real + Serialize>(prec: &Precision<T>) -> Result<ZeroRecord<T>> {
    let half = T::lit(0.5);
    let crit_at = |b: T| -> Result<(T, T, T)> {
        let ev = eval(HalfPlanePoint::new(half, b)?, prec)?;
        // on the half-line crit is real and d/db crit = Re(i crit')
        let slope = (i_unit::<T>() * ev.crit_prime).re;
        Ok((ev.crit.re, slope, ev.crit_scale))
    };

    let mut lo = T::lit(0.501);
    let mut hi = T::lit(3.0f64.sqrt() / 2.0);
    let (flo, _, _) = crit_at(lo)?;
    let (fhi, _, _) = crit_at(hi)?;
    if !(flo > T::zero() && fhi < T::zero()) {
        return Err(Error::Invariant("bracket signs for tau_inf are wrong".into()));
    }
    for _ in 0..20 {
        let mid = (lo + hi) * half;
        let (fm, _, _) = crit_at(mid)?;
        if fm > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut b = (lo + hi) * half;
    let mut residual = T::infinity();
    for _ in 0..30 {
        let (f, df, scale) = crit_at(b)?;
        residual = f.abs() / scale;
        if residual <= T::lit(1e-14) {
            break;
        }
        b = b - f / df;
    }
    let tau = HalfPlanePoint::new(half, b)?;
    Ok(ZeroRecord {
        tau,
        param: FamilyParam::HomotopyT(T::one()),
        residual,
        multiplicity: 1,
        half: HalfLine::OnHalfLine,
    })
}

/// Which of the two `f_C` zeros is wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Left,
    Right,
}

struct FcSolver<'a, T: Real + Serialize> {
    prec: &'a Precision<T>,
    tau_inf: Complex<T>,
    g3_at_inf: Complex<T>,
    crit_prime_at_inf: Complex<T>,
}

impl<'a, T: Real + Serialize> FcSolver<'a, T> {
    fn new(prec: &'a Precision<T>) -> Result<Self> {
        let rec = find_tau_infinity(prec)?;
        let ev = eval(rec.tau, prec)?;
        Ok(Self {
            prec,
            tau_inf: rec.tau.to_complex(),
            g3_at_inf: ev.g3,
            crit_prime_at_inf: ev.crit_prime,
        })
    }

    /// Seed near the pole of `phi`: inverts the simple pole at `tau_inf`.
    fn pole_seed(&self, c: T) -> Complex<T> {
        let pref = i_unit::<T>() * (T::lit(36.0) * T::PI());
        self.tau_inf
            + pref * self.g3_at_inf
                / (self.crit_prime_at_inf * (Complex::new(c, T::zero()) - self.tau_inf))
    }

    /// Seed near the cusp at infinity, from the expansion of `phi`:
    /// `b = log(168 pi |C|) / 2 pi`, `a = 1/4 or 3/4 + (b - 95/28pi)/(2 pi C)`.
    fn cusp_seed(&self, c: T) -> Complex<T> {
        let pi = T::PI();
        let two_pi = pi + pi;
        let b = (T::lit(168.0) * pi * c.abs()).ln() / two_pi;
        let base = if c > T::zero() { T::lit(0.25) } else { T::lit(0.75) };
        let a = base + (b - T::lit(95.0) / (T::lit(28.0) * pi)) / (two_pi * c);
        Complex::new(a, b)
    }

    fn polish(&self, c: T, seed: Complex<T>) -> Result<Complex<T>> {
        let mut f = fc_eval_closure(c, self.prec);
        let (root, _) = newton(seed, &mut f, 80)?;
        Ok(root)
    }

    fn expected_half(branch: Branch) -> HalfLine {
        match branch {
            Branch::Left => HalfLine::LeftOfHalfLine,
            Branch::Right => HalfLine::RightOfHalfLine,
        }
    }

    fn check_half(branch: Branch, z: Complex<T>) -> bool {
        match branch {
            Branch::Left => z.re < T::lit(0.5),
            Branch::Right => z.re > T::lit(0.5),
        }
    }

    /// Anchor parameter and point for a continuation walk toward `c`.
    fn anchor(&self, branch: Branch, c: T) -> Result<(T, Complex<T>)> {
        let one = Complex::new(T::one(), T::zero());
        match branch {
            Branch::Left => {
                if c > T::zero() {
                    // tau_<(1) = tau_1 = (tau_inf - 1)/tau_inf
                    let seed = (self.tau_inf - one) / self.tau_inf;
                    Ok((T::one(), self.polish(T::one(), seed)?))
                } else {
                    let far = c.min(T::lit(-6.0));
                    Ok((far, self.polish(far, self.pole_seed(far))?))
                }
            }
            Branch::Right => {
                if c < T::one() {
                    // tau_>(0) = tau_0 = 1/(1 - tau_inf)
                    let seed = one / (one - self.tau_inf);
                    Ok((T::zero(), self.polish(T::zero(), seed)?))
                } else {
                    let far = c.max(T::lit(6.0));
                    Ok((far, self.polish(far, self.pole_seed(far))?))
                }
            }
        }
    }

    /// Newton with predictor continuation from the anchor to the target.
    fn solve(&self, branch: Branch, c: T) -> Result<ZeroRecord<T>> {
        // for far-out parameters the direct seeds land inside the basin
        let direct = if (branch == Branch::Left && c <= T::lit(-6.0))
            || (branch == Branch::Right && c >= T::lit(6.0))
        {
            self.polish(c, self.pole_seed(c)).ok()
        } else if (branch == Branch::Left && c >= T::lit(6.0))
            || (branch == Branch::Right && c <= T::lit(-6.0))
        {
            self.polish(c, self.cusp_seed(c)).ok()
        } else {
            None
        };
        let root = match direct.filter(|z| Self::check_half(branch, *z)) {
            Some(z) => z,
            None => self.walk(branch, c)?,
        };
        self.record(branch, c, root)
    }

    fn walk(&self, branch: Branch, c_target: T) -> Result<Complex<T>> {
        let (mut c_cur, mut z) = self.anchor(branch, c_target)?;
        let mut step_scale = T::one();
        let mut guard = 0usize;
        while (c_cur - c_target).abs() > T::zero() {
            guard += 1;
            if guard > 4000 {
                return Err(Error::NoConvergence("continuation exceeded step budget".into()));
            }
            // step sized so the predicted root motion stays moderate
            let fv = {
                let mut f = fc_eval_closure(c_cur, self.prec);
                f(z)?
            };
            let slope = {
                let tau = HalfPlanePoint::from_complex(z)?;
                let (ev, _) = eval_anywhere(tau, self.prec)?;
                // d tau / d C = -crit / f_C'
                -ev.crit / fv.derivative
            };
            let mut dc = (T::lit(0.08) / slope.norm().max(T::lit(1e-12)))
                .min(T::lit(0.5) * (T::one() + c_cur.abs()))
                * step_scale;
            let remaining = (c_target - c_cur).abs();
            dc = dc.min(remaining);
            let c_next = if c_target > c_cur { c_cur + dc } else { c_cur - dc };
            let predict = z + slope * (c_next - c_cur);
            let mut f_next = fc_eval_closure(c_next, self.prec);
            match newton(predict, &mut f_next, 40) {
                Ok((root, _)) if Self::check_half(branch, root) => {
                    z = root;
                    c_cur = c_next;
                    step_scale = (step_scale * T::lit(1.5)).min(T::one());
                }
                _ => {
                    step_scale = step_scale * T::lit(0.5);
                    if step_scale < T::lit(1e-8) {
                        return Err(Error::ContinuationStall(c_cur.to_f64().unwrap_or(f64::NAN)));
                    }
                }
            }
        }
        Ok(z)
    }

    fn record(&self, branch: Branch, c: T, z: Complex<T>) -> Result<ZeroRecord<T>> {
        if !Self::check_half(branch, z) {
            return Err(Error::BranchJump(c.to_f64().unwrap_or(f64::NAN)));
        }
        let mut f = fc_eval_closure(c, self.prec);
        let fv = f(z)?;
        let residual = fv.value.norm() / fv.scale;
        // simplicity certificate: closed-form derivative away from zero
        let tau = HalfPlanePoint::from_complex(z)?;
        let deriv = crate::families::eval_fc_derivative_at_zero(c, tau, self.prec)?;
        if deriv.norm() == T::zero() {
            return Err(Error::Invariant("vanishing derivative at an accepted root".into()));
        }
        Ok(ZeroRecord {
            tau,
            param: FamilyParam::CurveC(CurveParam::Finite(c)),
            residual,
            multiplicity: 1,
            half: Self::expected_half(branch),
        })
    }
}

/// Solves `f_C(tau) = 0` in `F0` for real `C`, returning the left-half and
/// right-half roots. At the degenerate parameters the vanished branch is
/// `None`: only `tau_0` survives at `C = 0` and only `tau_1` at `C = 1`.
pub fn solve_fc<T: Real + Serialize>(c: T, prec: &Precision<T>) -> Result<FcRoots<T>> {
    if !c.is_finite() {
        return Err(Error::InvalidUse("solve_fc requires finite C".into()));
    }
    let solver = FcSolver::new(prec)?;
    let tol = T::lit(1e-9);
    let one = Complex::new(T::one(), T::zero());
    if c.abs() <= tol {
        let root = solver.polish(T::zero(), one / (one - solver.tau_inf))?;
        return Ok(FcRoots { left: None, right: Some(solver.record(Branch::Right, T::zero(), root)?) });
    }
    if (c - T::one()).abs() <= tol {
        let root = solver.polish(T::one(), (solver.tau_inf - one) / solver.tau_inf)?;
        return Ok(FcRoots { left: Some(solver.record(Branch::Left, T::one(), root)?), right: None });
    }
    let left = solver.solve(Branch::Left, c)?;
    let right = solver.solve(Branch::Right, c)?;
    if (left.tau.to_complex() - right.tau.to_complex()).norm() < T::lit(1e-10) {
        return Err(Error::RootCollision(format!("C = {c}")));
    }
    Ok(FcRoots { left: Some(left), right: Some(right) })
}

/// The critical points of `E6` inside `gamma(F0)` or `gamma(F)`.
///
/// For `Gamma_0(2)`: one point `tau_inf + b/d` when `c = 0`, otherwise the
/// Mobius images of the two `f_{-d/c}` roots. For `SL(2,Z)`: none when
/// `-d/c` lies in `(0,1)` or `c = 0`; the image of `tau_<(-d/c)` when
/// `-d/c >= 1`; the image of `tau_>(-d/c)` when `-d/c <= 0`.
pub fn critical_points_in_domain<T: Real + Serialize>(
    g: &UnimodularMatrix,
    group: Group,
    prec: &Precision<T>,
) -> Result<Vec<HalfPlanePoint<T>>> {
    match group {
        Group::Gamma0_2 => {
            if !g.is_in_gamma0_2() {
                return Err(Error::MembershipViolation(format!(
                    "{g} has odd lower-left entry"
                )));
            }
            match g.cusp_parameter::<T>() {
                None => {
                    let rec = find_tau_infinity(prec)?;
                    // canonical c = 0 matrices are translations by b/d = b
                    let shift = T::lit(g.b() as f64) / T::lit(g.d() as f64);
                    Ok(vec![rec.tau.translated(shift)])
                }
                Some(c) => {
                    let roots = solve_fc(c, prec)?;
                    let (l, r) = (roots.left.unwrap(), roots.right.unwrap());
                    Ok(vec![mobius_apply(g, l.tau), mobius_apply(g, r.tau)])
                }
            }
        }
        Group::Sl2z => match g.cusp_parameter::<T>() {
            None => Ok(vec![]),
            Some(c) => {
                if c > T::zero() && c < T::one() {
                    Ok(vec![])
                } else if c >= T::one() {
                    let roots = solve_fc(c, prec)?;
                    let rec = roots.left.ok_or_else(|| {
                        Error::Invariant("left branch missing for C >= 1".into())
                    })?;
                    Ok(vec![mobius_apply(g, rec.tau)])
                } else {
                    let roots = solve_fc(c, prec)?;
                    let rec = roots.right.ok_or_else(|| {
                        Error::Invariant("right branch missing for C <= 0".into())
                    })?;
                    Ok(vec![mobius_apply(g, rec.tau)])
                }
            }
        },
    }
}

/// Residual of `g2^2 - 18 eta1 g3` relative to its local scale; the
/// certificate evaluated after pushing roots into other domains.
pub fn crit_residual_at<T: Real + Serialize>(
    tau: HalfPlanePoint<T>,
    prec: &Precision<T>,
) -> Result<T> {
    let (ev, _) = eval_anywhere(tau, prec)?;
    Ok(ev.crit.norm() / ev.crit_scale)
}

/// Roots of `h_t` in `F0` for `t` in `(0, 1]`, found by a sign scan of the
/// (real) restriction to the half-line and polished by full 2-d Newton from
/// deliberately off-line seeds, so the on-line location is a finding rather
/// than an assumption.
pub fn solve_ht_roots<T: Real + Serialize>(t: T, prec: &Precision<T>) -> Result<Vec<ZeroRecord<T>>> {
    if t <= T::zero() || t > T::one() {
        return Err(Error::InvalidUse("h_t root solve needs t in (0, 1]".into()));
    }
    let half = T::lit(0.5);
    let ht_real = |b: T| -> Result<T> {
        let ev = eval(HalfPlanePoint::new(half, b)?, prec)?;
        Ok(crate::families::ht_bundle(t, &ev).value.re)
    };
    // scan for sign changes on the half-line up to a height where h_t is
    // provably positive again
    let mut brackets = Vec::new();
    let mut b_prev = T::lit(0.501);
    let mut f_prev = ht_real(b_prev)?;
    let mut b = b_prev;
    while b < T::lit(6.0) {
        b = b + T::lit(0.01);
        let f = ht_real(b)?;
        if (f_prev <= T::zero()) != (f <= T::zero()) {
            brackets.push((b_prev, b));
        }
        b_prev = b;
        f_prev = f;
    }
    let mut out = Vec::new();
    for (lo, hi) in brackets {
        let mid = (lo + hi) * half;
        // off-line seed; Newton returns to the half-line on its own
        let seed = Complex::new(half + T::lit(0.01), mid);
        let mut f = |z: Complex<T>| -> Result<FamilyValue<T>> {
            let tau = HalfPlanePoint::from_complex(z)?;
            let (ev, _) = eval_anywhere(tau, prec)?;
            Ok(crate::families::ht_bundle(t, &ev))
        };
        let (root, residual) = newton(seed, &mut f, 80)?;
        out.push(ZeroRecord {
            tau: HalfPlanePoint::from_complex(root)?,
            param: FamilyParam::HomotopyT(t),
            residual,
            multiplicity: 1,
            half: half_of(root.re),
        });
    }
    out.sort_by(|a, b| a.tau.im().partial_cmp(&b.tau.im()).unwrap());
    Ok(out)
}
