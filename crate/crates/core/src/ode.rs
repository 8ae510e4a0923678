//! Adaptive Dormand-Prince 5(4) integration of small complex ODE systems
//! along piecewise paths in the plane, with circular detours around
//! prescribed singular points.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

/// Integration accuracy knobs.
#[derive(Debug, Clone, Copy)]
pub struct OdeSettings<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeSettings<T> {
    fn default() -> Self {
        // the entrywise monodromy deviation is measured against matrix
        // entries as large as |D| ~ e^{2 pi im tau}, so the transfer needs
        // relative accuracy well beyond the headline 1e-5 budget
        Self { rel_tol: T::lit(1e-12), abs_tol: T::lit(1e-13), max_steps: 400_000 }
    }
}

/// A path made of straight segments and circular arcs.
#[derive(Debug, Clone)]
pub struct Path<T: Real> {
    pub pieces: Vec<PathPiece<T>>,
}

#[derive(Debug, Clone, Copy)]
pub enum PathPiece<T: Real> {
    Seg(Complex<T>, Complex<T>),
    Arc { center: Complex<T>, radius: T, from: T, to: T },
}

impl<T: Real> PathPiece<T> {
    fn at(&self, s: T) -> Complex<T> {
        match self {
            PathPiece::Seg(a, b) => *a + (*b - *a) * s,
            PathPiece::Arc { center, radius, from, to } => {
                let ang = *from + (*to - *from) * s;
                *center + Complex::new(ang.cos(), ang.sin()) * *radius
            }
        }
    }

    fn tangent(&self, s: T) -> Complex<T> {
        match self {
            PathPiece::Seg(a, b) => *b - *a,
            PathPiece::Arc { radius, from, to, .. } => {
                let ang = *from + (*to - *from) * s;
                // d/ds of center + r e^{i ang(s)}
                Complex::new(-ang.sin(), ang.cos()) * (*radius * (*to - *from))
            }
        }
    }
}

/// Builds a path from `start` to `end` detouring around the `singular`
/// points: any singularity closer than `clearance` to the segment is
/// bypassed by an arc of radius `clearance` around it. Fails if two
/// detours would overlap.
pub fn route_segment<T: Real>(
    start: Complex<T>,
    end: Complex<T>,
    singular: &[Complex<T>],
    clearance: T,
) -> Result<Path<T>> {
    let dir = end - start;
    let len = dir.norm();
    if len == T::zero() {
        return Err(Error::PathTooClose("degenerate path".into()));
    }
    let unit = dir / len;

    // collect singularities that intrude on the segment corridor
    let mut hits: Vec<(T, Complex<T>, T)> = Vec::new(); // (projection, point, dist)
    for s in singular {
        let rel = (*s - start) / unit;
        let along = rel.re;
        let dist = rel.im.abs();
        if along > -clearance && along < len + clearance && dist < clearance {
            hits.push((along, *s, rel.im));
        }
    }
    hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in hits.windows(2) {
        if (w[1].0 - w[0].0).abs() < clearance * T::lit(2.0) {
            return Err(Error::PathTooClose(
                "two singular points need overlapping detours".into(),
            ));
        }
    }
    if let Some(first) = hits.first() {
        if first.0 < clearance {
            return Err(Error::PathTooClose("singular point at the path start".into()));
        }
    }
    if let Some(last) = hits.last() {
        if last.0 > len - clearance {
            return Err(Error::PathTooClose("singular point at the path end".into()));
        }
    }

    let mut pieces = Vec::new();
    let mut cursor = start;
    for (along, s, side) in hits {
        // enter and exit the detour circle where it crosses the segment
        let half_chord = (clearance * clearance - side * side).max(T::zero()).sqrt();
        let t_in = along - half_chord;
        let t_out = along + half_chord;
        let z_in = start + unit * t_in;
        let z_out = start + unit * t_out;
        if (z_in - cursor).norm() > T::zero() {
            pieces.push(PathPiece::Seg(cursor, z_in));
        }
        let a_in = (z_in - s).arg();
        let mut a_out = (z_out - s).arg();
        // shorter sweep; either side works because the loop around an
        // apparent singularity is trivial
        while a_out - a_in > T::PI() {
            a_out = a_out - T::PI() - T::PI();
        }
        while a_in - a_out > T::PI() {
            a_out = a_out + T::PI() + T::PI();
        }
        pieces.push(PathPiece::Arc { center: s, radius: clearance, from: a_in, to: a_out });
        cursor = z_out;
    }
    pieces.push(PathPiece::Seg(cursor, end));
    Ok(Path { pieces })
}

/// Full circle of radius `r` around `center`, starting at angle 0.
pub fn circle<T: Real>(center: Complex<T>, r: T) -> Path<T> {
    let two_pi = T::PI() + T::PI();
    Path {
        pieces: vec![PathPiece::Arc { center, radius: r, from: T::zero(), to: two_pi }],
    }
}

// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dY/dz = f(z, Y)` for a 4-component complex state along the
/// path, adaptively in the path parameter.
pub fn integrate_path<T, F>(
    path: &Path<T>,
    y0: [Complex<T>; 4],
    mut f: F,
    settings: &OdeSettings<T>,
) -> Result<[Complex<T>; 4]>
where
    T: Real,
    F: FnMut(Complex<T>, &[Complex<T>; 4]) -> Result<[Complex<T>; 4]>,
{
    let mut y = y0;
    let mut total_steps = 0usize;
    for piece in &path.pieces {
        let mut s = T::zero();
        let mut h = T::lit(0.05);
        while s < T::one() {
            if total_steps >= settings.max_steps {
                return Err(Error::Stiffness(format!("{:?}", piece.at(s))));
            }
            total_steps += 1;
            h = h.min(T::one() - s);

            // stages, with the chain rule through the path parametrization
            let zero = Complex::new(T::zero(), T::zero());
            let mut k = [[zero; 4]; 7];
            let eval_stage = |s_loc: T,
                              y_loc: &[Complex<T>; 4],
                              f: &mut F|
             -> Result<[Complex<T>; 4]> {
                let z = piece.at(s_loc);
                let dz = piece.tangent(s_loc);
                let dy = f(z, y_loc)?;
                Ok([dy[0] * dz, dy[1] * dz, dy[2] * dz, dy[3] * dz])
            };
            k[0] = eval_stage(s, &y, &mut f)?;
            let mut failed = false;
            for stage in 1..=6 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = T::lit(A[stage - 1][j]);
                    for comp in 0..4 {
                        ys[comp] = ys[comp] + kj[comp] * (a * h);
                    }
                }
                let c_frac: f64 = A[stage - 1].iter().sum();
                match eval_stage(s + h * T::lit(c_frac.min(1.0)), &ys, &mut f) {
                    Ok(ks) => k[stage.min(6)] = ks,
                    Err(_) => {
                        failed = true;
                        break;
                    }
                }
            }
            if failed {
                h = h * T::lit(0.25);
                if h < T::lit(1e-13) {
                    return Err(Error::Stiffness(format!("{:?}", piece.at(s))));
                }
                continue;
            }

            let mut y5 = y;
            let mut y4 = y;
            for (j, kj) in k.iter().enumerate() {
                for comp in 0..4 {
                    y5[comp] = y5[comp] + kj[comp] * (T::lit(B5[j]) * h);
                    y4[comp] = y4[comp] + kj[comp] * (T::lit(B4[j]) * h);
                }
            }
            // scaled max-norm error estimate
            let mut err = T::zero();
            for comp in 0..4 {
                let scale = settings.abs_tol + settings.rel_tol * y5[comp].norm().max(y[comp].norm());
                err = err.max((y5[comp] - y4[comp]).norm() / scale);
            }
            if err <= T::one() {
                s = s + h;
                y = y5;
                let grow = T::lit(0.9) * err.max(T::lit(1e-10)).powf(T::lit(-0.2));
                h = h * grow.min(T::lit(5.0)).max(T::lit(0.2));
            } else {
                let shrink = T::lit(0.9) * err.powf(T::lit(-0.25));
                h = h * shrink.max(T::lit(0.1));
                if h < T::lit(1e-13) {
                    return Err(Error::Stiffness(format!("{:?}", piece.at(s))));
                }
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_roundtrip() {
        // y'' = -y along a straight path of length 2 pi: solution returns
        let path = Path {
            pieces: vec![PathPiece::Seg(
                Complex::new(0.0f64, 0.0),
                Complex::new(2.0 * std::f64::consts::PI, 0.0),
            )],
        };
        let y0 = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ];
        let out = integrate_path(
            &path,
            y0,
            |_z, y| Ok([y[1], -y[0], y[3], -y[2]]),
            &OdeSettings::default(),
        )
        .unwrap();
        assert!((out[0] - y0[0]).norm() < 1e-8);
        assert!((out[1] - y0[1]).norm() < 1e-8);
        assert!((out[3] - y0[3]).norm() < 1e-8);
    }

    #[test]
    fn exponential_along_an_arc() {
        // y' = y: the value at the end depends only on the endpoint
        let path = circle(Complex::new(0.0f64, 0.0), 1.0);
        let y0 = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ];
        let out = integrate_path(&path, y0, |_z, y| Ok([y[0], y[1], y[2], y[3]]), &OdeSettings::default())
            .unwrap();
        // closed loop: e^{z} single valued, returns to start value
        assert!((out[0] - Complex::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn routing_detours_around_singularities() {
        let path = route_segment(
            Complex::new(0.0f64, 0.0),
            Complex::new(1.0, 0.0),
            &[Complex::new(0.5, 0.02)],
            0.1,
        )
        .unwrap();
        assert!(path.pieces.len() >= 3);
        // every path point keeps the clearance
        for piece in &path.pieces {
            for j in 0..=32 {
                let z = piece.at(j as f64 / 32.0);
                assert!(
                    (z - Complex::new(0.5, 0.02)).norm() > 0.1 - 1e-9,
                    "path point {z} inside clearance"
                );
            }
        }
        let r = route_segment(
            Complex::new(0.0f64, 0.0),
            Complex::new(1.0, 0.0),
            &[Complex::new(0.4, 0.0), Complex::new(0.45, 0.0)],
            0.1,
        );
        assert!(matches!(r, Err(Error::PathTooClose(_))));
    }
}
