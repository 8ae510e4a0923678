//! Plain-text exporters: RFC-4180 CSV for curve points and a static SVG of
//! the tau-plane with the fundamental-domain geometry drawn for reference.

use std::fmt::Write as _;

use crate::curves::{CurveId, CurvePoint};
use crate::real::Real;
use serde::Serialize;

/// CSV with header `curve,C,re_tau,im_tau,half,residual`. All fields are
/// numeric or lowercase tokens, so no quoting is ever needed.
pub fn curve_points_csv<T: Real + Serialize>(points: &[CurvePoint<T>]) -> String {
    let mut out = String::from("curve,C,re_tau,im_tau,half,residual\r\n");
    for p in points {
        let half = match p.half {
            crate::curves::Half::Left => "left",
            crate::curves::Half::Right => "right",
        };
        let _ = write!(
            out,
            "{},{},{},{},{},{:e}\r\n",
            p.curve,
            p.c,
            p.tau.re(),
            p.tau.im(),
            half,
            p.residual.to_f64().unwrap_or(f64::NAN),
        );
    }
    out
}

const SVG_VIEW: (f64, f64, f64, f64) = (-0.1, 0.0, 1.2, 3.0); // x, y, w, h
const SVG_IM_TOP: f64 = 3.0;

fn map_y(im: f64) -> f64 {
    // SVG y grows downward; render im up-positive with im = 3 at the top
    SVG_IM_TOP - im
}

fn polyline_path<T: Real + Serialize>(points: &[CurvePoint<T>]) -> String {
    let mut d = String::new();
    let mut pen_up = true;
    for p in points {
        let x = p.tau.re().to_f64().unwrap_or(f64::NAN);
        let y = map_y(p.tau.im().to_f64().unwrap_or(f64::NAN));
        if !(0.0..=SVG_IM_TOP + 0.5).contains(&y) {
            pen_up = true;
            continue;
        }
        if pen_up {
            let _ = write!(d, "M {x:.5} {y:.5} ");
            pen_up = false;
        } else {
            let _ = write!(d, "L {x:.5} {y:.5} ");
        }
    }
    d
}

/// SVG of curve traces over the `F` / `F0` boundary geometry: the vertical
/// edges `Re = 0, 1/2, 1`, the circle `|tau - 1/2| = 1/2`, and the unit
/// circles around 0 and 1.
pub fn curves_svg<T: Real + Serialize>(traces: &[(CurveId, Vec<CurvePoint<T>>)]) -> String {
    let (x0, y0, w, h) = SVG_VIEW;
    let mut svg = format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {w} {h}" width="480" height="1200">
<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="white"/>
<g fill="none" stroke="#bbbbbb" stroke-width="0.004">
"##
    );
    // domain reference geometry
    for x in [0.0, 1.0] {
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#,
            map_y(0.0),
            map_y(SVG_IM_TOP)
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="0.5" y1="{}" x2="0.5" y2="{}" stroke-dasharray="0.02,0.02"/>"#,
        map_y(0.5),
        map_y(SVG_IM_TOP)
    );
    // |tau - 1/2| = 1/2: upper half circle
    let _ = writeln!(
        svg,
        r#"<path d="M 0 {} A 0.5 0.5 0 0 1 1 {}"/>"#,
        map_y(0.0),
        map_y(0.0)
    );
    // |tau| = 1 and |tau - 1| = 1, upper arcs within the strip
    let s3 = 3f64.sqrt() / 2.0;
    let _ = writeln!(
        svg,
        r#"<path d="M 0 {} A 1 1 0 0 1 0.5 {}"/>"#,
        map_y(1.0),
        map_y(s3)
    );
    let _ = writeln!(
        svg,
        r#"<path d="M 0.5 {} A 1 1 0 0 1 1 {}"/>"#,
        map_y(s3),
        map_y(1.0)
    );
    svg.push_str("</g>\n");

    for (curve, points) in traces {
        let color = match curve {
            CurveId::C1 => "#c0392b",
            CurveId::C2 => "#2471a3",
            CurveId::C3 => "#1e8449",
        };
        let d = polyline_path(points);
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="0.008"/>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Half;
    use crate::families::CurveParam;
    use crate::halfplane::HalfPlanePoint;

    fn sample() -> Vec<CurvePoint<f64>> {
        vec![
            CurvePoint {
                c: CurveParam::Finite(0.5),
                tau: HalfPlanePoint::new(0.2, 0.9).unwrap(),
                curve: CurveId::C2,
                half: Half::Left,
                residual: 1e-13,
            },
            CurvePoint {
                c: CurveParam::Infinity,
                tau: HalfPlanePoint::new(0.5, 0.634).unwrap(),
                curve: CurveId::C1,
                half: Half::Right,
                residual: 1e-13,
            },
        ]
    }

    #[test]
    fn csv_shape() {
        let csv = curve_points_csv(&sample());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "curve,C,re_tau,im_tau,half,residual");
        let row = lines.next().unwrap();
        assert!(row.starts_with("c2,0.5,0.2,0.9,left,"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("c1,inf,0.5,0.634,right,"));
    }

    #[test]
    fn svg_has_geometry_and_traces() {
        let svg = curves_svg(&[(CurveId::C2, sample())]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("viewBox=\"-0.1 0 1.2 3\""));
        assert!(svg.contains("stroke=\"#2471a3\""));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
