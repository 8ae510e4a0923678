//! `e6` — command-line interface to the Eisenstein-series numerics library:
//! bundle evaluation, critical-point location, argument-principle zero
//! counts, curve tracing, dense rational samples, torus-ODE monodromy, and
//! the full verification suite.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use e6_core::contour::Domain;
use e6_core::curves::CurveId;
use e6_core::families::{CurveParam, FamilyParam};
use e6_core::matrix::Group;
use e6_core::{
    count_zeros, critical_points_in_domain, dense_sample, eval_anywhere, ode_monodromy,
    trace_curve, DenseSampleSpec, HalfPlanePoint64, Precision64, UnimodularMatrix,
};

#[derive(Parser)]
#[command(
    name = "e6",
    version,
    about = "Critical points of the weight-six Eisenstein series: evaluation, zero counts, curves, monodromy"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Config {
    /// Series truncation target; E6_PRECISION overrides the default.
    #[arg(long, global = true)]
    precision: Option<f64>,
    /// Seed for the randomized spot checks (verify only).
    #[arg(long, global = true, default_value_t = 0xe6)]
    seed: u64,
}

impl Config {
    fn precision(&self) -> Result<Precision64, String> {
        let target = match self.precision {
            Some(p) => Some(p),
            None => match std::env::var("E6_PRECISION") {
                Ok(s) => {
                    Some(s.parse::<f64>().map_err(|_| format!("bad E6_PRECISION value: {s}"))?)
                }
                Err(_) => None,
            },
        };
        let prec = match target {
            Some(t) => Precision64::with_target(t),
            None => Precision64::with_target(1e-10),
        };
        prec.validate().map_err(|e| e.to_string())?;
        Ok(prec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Sl2z,
    Gamma02,
}

impl From<GroupArg> for Group {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Sl2z => Group::Sl2z,
            GroupArg::Gamma02 => Group::Gamma0_2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Fc,
    Ht,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    F0,
    F,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    C1,
    C2,
    C3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the quasimodular bundle at a point (auto-reduces low points).
    Eval {
        /// Point in the upper half-plane, written as a+bi.
        #[arg(long, value_parser = parse_complex)]
        tau: (f64, f64),
    },
    /// Critical points of E6 inside gamma(F0) or gamma(F).
    Critical {
        #[arg(long)]
        group: GroupArg,
        /// Matrix entries a,b,c,d with ad - bc = 1.
        #[arg(long, value_parser = parse_matrix)]
        matrix: (i64, i64, i64, i64),
    },
    /// Count family zeros in a truncated fundamental domain.
    Count {
        #[arg(long)]
        family: FamilyArg,
        #[arg(long = "C", alias = "c", value_name = "C", allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value = "f0")]
        domain: DomainArg,
        /// Truncation height of the contour.
        #[arg(long, default_value_t = 12.0)]
        height: f64,
        /// Horocircle cap radius at the cusps.
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
    },
    /// Trace one of the three curves over a parameter range.
    Trace {
        #[arg(long)]
        curve: CurveArg,
        #[arg(long = "Clo", alias = "clo", allow_hyphen_values = true)]
        clo: f64,
        #[arg(long = "Chi", alias = "chi", allow_hyphen_values = true)]
        chi: f64,
        #[arg(long, default_value_t = 0.02)]
        max_step: f64,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Rational samples of the dense critical-point sets.
    Dense {
        #[arg(long)]
        group: GroupArg,
        #[arg(long, default_value_t = 8)]
        max_denominator: u32,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Monodromy data of the torus ODE at a point, verified by integration.
    Monodromy {
        #[arg(long, value_parser = parse_complex)]
        tau: (f64, f64),
        /// Integrator step budget (0 = default).
        #[arg(long, default_value_t = 0)]
        steps: usize,
    },
    /// Run the full acceptance suite; exits nonzero on any failure.
    Verify,
}

/// Parses `a+bi` / `a-bi`, with scientific notation in either part.
fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let t = s.trim();
    let inner = t.strip_suffix('i').ok_or_else(|| format!("`{t}` must end in i"))?;
    // split at the sign of the imaginary part: the last +/- not preceded by e/E
    let bytes = inner.as_bytes();
    if bytes.is_empty() {
        return Err(format!("`{t}` is not of the form a+bi"));
    }
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k];
        if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let k = split.ok_or_else(|| format!("`{t}` is not of the form a+bi"))?;
    let re: f64 = inner[..k].parse().map_err(|_| format!("bad real part in `{t}`"))?;
    let im_str = &inner[k..];
    let im: f64 = if im_str == "+" {
        1.0
    } else if im_str == "-" {
        -1.0
    } else {
        im_str.parse().map_err(|_| format!("bad imaginary part in `{t}`"))?
    };
    Ok((re, im))
}

fn parse_matrix(s: &str) -> Result<(i64, i64, i64, i64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("matrix needs four comma-separated integers a,b,c,d".into());
    }
    let mut v = [0i64; 4];
    for (slot, part) in v.iter_mut().zip(parts.iter()) {
        *slot = part.trim().parse().map_err(|_| format!("bad matrix entry `{part}`"))?;
    }
    Ok((v[0], v[1], v[2], v[3]))
}

fn tau_from(pair: (f64, f64)) -> Result<HalfPlanePoint64, String> {
    HalfPlanePoint64::new(pair.0, pair.1).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct EvalOutput {
    tau: [f64; 2],
    reduced_via: Option<UnimodularMatrix>,
    g2: [f64; 2],
    g3: [f64; 2],
    eta1: [f64; 2],
    eta2: [f64; 2],
    e2: [f64; 2],
    e4: [f64; 2],
    e6: [f64; 2],
    discriminant: [f64; 2],
    err_bound: f64,
    legendre_residual: f64,
    flags: Vec<&'static str>,
}

fn run(cli: Cli) -> Result<i32, String> {
    let prec = cli.config.precision()?;
    match cli.cmd {
        Cmd::Eval { tau } => {
            let tau = tau_from(tau)?;
            let (ev, gamma) = eval_anywhere(tau, &prec).map_err(|e| e.to_string())?;
            let c = |z: num_complex::Complex<f64>| [z.re, z.im];
            let mut flags = Vec::new();
            // coarse vanishing indicators, relative to the cusp-limit scale
            // of each invariant so truncated inputs near the special points
            // still get flagged
            let pi = std::f64::consts::PI;
            if ev.g2.norm() <= 1e-5 * (4.0 * pi.powi(4) / 3.0) {
                flags.push("g2_near_zero");
            }
            if ev.g3.norm() <= 1e-5 * (8.0 * pi.powi(6) / 27.0) {
                flags.push("g3_near_zero");
            }
            if ev.crit.norm() <= 1e-9 * ev.crit_scale {
                flags.push("critical_point");
            }
            let out = EvalOutput {
                tau: [tau.re(), tau.im()],
                reduced_via: gamma,
                g2: c(ev.g2),
                g3: c(ev.g3),
                eta1: c(ev.eta1),
                eta2: c(ev.eta2),
                e2: c(ev.e2),
                e4: c(ev.e4),
                e6: c(ev.e6),
                discriminant: c(ev.discriminant),
                err_bound: ev.err_bound,
                legendre_residual: ev.legendre_residual(),
                flags,
            };
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(0)
        }
        Cmd::Critical { group, matrix } => {
            let g = UnimodularMatrix::new(matrix.0, matrix.1, matrix.2, matrix.3)
                .map_err(|e| e.to_string())?;
            let group: Group = group.into();
            let pts = critical_points_in_domain::<f64>(&g, group, &prec)
                .map_err(|e| e.to_string())?;
            let body = json!({
                "group": group,
                "matrix": g,
                "cusp_parameter": g.cusp_parameter::<f64>(),
                "count": pts.len(),
                "points": pts.iter().map(|p| [p.re(), p.im()]).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&body).unwrap());
            Ok(0)
        }
        Cmd::Count { family, c, t, domain, height, eps } => {
            let param = match family {
                FamilyArg::Fc => FamilyParam::CurveC(CurveParam::Finite(
                    c.ok_or("--family fc needs --c")?,
                )),
                FamilyArg::Ht => FamilyParam::HomotopyT(t.ok_or("--family ht needs --t")?),
            };
            let domain = match domain {
                DomainArg::F0 => Domain::F0,
                DomainArg::F => Domain::F,
            };
            let report =
                count_zeros(param, domain, height, eps, &prec).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(0)
        }
        Cmd::Trace { curve, clo, chi, max_step, format } => {
            let id = match curve {
                CurveArg::C1 => CurveId::C1,
                CurveArg::C2 => CurveId::C2,
                CurveArg::C3 => CurveId::C3,
            };
            let pts = trace_curve(id, clo, chi, max_step, &prec).map_err(|e| e.to_string())?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&pts).unwrap()),
                Format::Csv => print!("{}", e6_core::export::curve_points_csv(&pts)),
                Format::Svg => print!("{}", e6_core::export::curves_svg(&[(id, pts)])),
            }
            Ok(0)
        }
        Cmd::Dense { group, max_denominator, format } => {
            let spec = DenseSampleSpec { max_denominator, group: group.into() };
            let pts = dense_sample(&spec, &prec).map_err(|e| e.to_string())?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&pts).unwrap()),
                Format::Csv => {
                    let flat: Vec<_> = pts.iter().map(|p| p.point).collect();
                    print!("{}", e6_core::export::curve_points_csv(&flat));
                }
                Format::Svg => {
                    let flat: Vec<_> = pts.iter().map(|p| p.point).collect();
                    print!("{}", e6_core::export::curves_svg(&[(CurveId::C2, flat)]));
                }
            }
            Ok(0)
        }
        Cmd::Monodromy { tau, steps } => {
            let tau = tau_from(tau)?;
            let result = ode_monodromy(tau, &prec, steps).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&result).unwrap());
            Ok(0)
        }
        Cmd::Verify => {
            let results = e6_core::verify::run_all(cli.config.seed);
            let mut failed = 0;
            for r in &results {
                println!("{}", e6_core::verify::render_line(r));
                if !r.passed {
                    failed += 1;
                }
            }
            println!("{}/{} criteria passed", results.len() - failed, results.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with status 2 on usage errors
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.5+2i").unwrap(), (0.5, 2.0));
        assert_eq!(parse_complex("0.5-2e-3i").unwrap(), (0.5, -2e-3));
        assert_eq!(parse_complex("1e-3+1e-3i").unwrap(), (1e-3, 1e-3));
        assert_eq!(parse_complex("-1.5+0.8660254i").unwrap(), (-1.5, 0.8660254));
        assert!(parse_complex("1.5").is_err());
        assert!(parse_complex("i").is_err());
        assert!(parse_complex("1.5+i2").is_err());
    }

    #[test]
    fn matrix_parsing() {
        assert_eq!(parse_matrix("1,0,2,1").unwrap(), (1, 0, 2, 1));
        assert!(parse_matrix("1,0,2").is_err());
        assert!(parse_matrix("1,0,2,x").is_err());
    }
}
