//! Command-line front end. [`run_command`] is what the `pseudoh` binary
//! calls; it never exits the process, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 crosscheck mismatch (or a failed identity in
//! `verify`), 2 usage error, 3 validation or numerical failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{MetricNilpotentAlgebra, NULL_TOL};
use crate::analytic::{analytic_conjugate_points, default_window, ConjugatePoint, GeodesicInvariants, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::GeodesicIC;
use crate::identities::{identity_suite, j_square_check, j_square_table};
use crate::io::{
    algebra_to_json, cross_report_value, ic_value, parse_vector, point_value, points_csv, resolve_algebra, scan_csv,
    RunReport, ScanRow,
};
use crate::numeric::{cross_validate, detect_conjugate_points, IntegratorConfig};
use crate::ode::Method;

pub const SEED_VAR: &str = "PSEUDOH_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "pseudoh",
    version,
    about = "Conjugate points on pseudo-H-type nilpotent Lie groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate an algebra and run the predicate and identity checks.
    Verify {
        /// Algebra file, or `catalog:NAME`.
        algebra: String,
        /// Random samples per identity.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Tolerance for the identity suite.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Tolerance for `J_z² = −⟨z,z⟩ I`.
        #[arg(long, default_value_t = 1e-12)]
        j_tol: f64,
        #[arg(long, value_enum, default_value_t = VerifyOut::Text)]
        out: VerifyOut,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Conjugate points along one geodesic.
    #[command(subcommand)]
    Conjugate(ConjugateCmd),
    /// Run both pipelines and match their conjugate points.
    Crosscheck {
        #[command(flatten)]
        geo: GeodesicArgs,
        #[command(flatten)]
        num: NumericArgs,
        /// Two points match when their times differ by less than this.
        #[arg(long, default_value_t = 1e-6)]
        t_tol: f64,
        /// Count multiplicity disagreements as mismatches.
        #[arg(long)]
        mult_strict: bool,
        #[arg(long, value_enum, default_value_t = CrossOut::Text)]
        out: CrossOut,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sweep `⟨z0,z0⟩` or `⟨x0,x0⟩` through the closed forms.
    Scan {
        #[command(flatten)]
        geo: GeodesicArgs,
        #[arg(long, value_enum)]
        param: Param,
        /// `lo,hi,n`: n evenly spaced values from lo to hi.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write an algebra in the JSON file format.
    Export {
        algebra: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ConjugateCmd {
    /// Closed-form conjugate loci.
    Analytic {
        #[command(flatten)]
        geo: GeodesicArgs,
        #[arg(long, value_enum, default_value_t = PointsOut::Csv)]
        out: PointsOut,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Jacobi-field integration and rank-drop detection.
    Numeric {
        #[command(flatten)]
        geo: GeodesicArgs,
        #[command(flatten)]
        num: NumericArgs,
        #[arg(long, value_enum, default_value_t = PointsOut::Csv)]
        out: PointsOut,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct GeodesicArgs {
    /// Algebra file, or `catalog:NAME`.
    #[arg(long)]
    algebra: String,
    /// Central component of the initial velocity, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    z0: String,
    /// Complement component of the initial velocity, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// `lo,hi`; defaults to a few characteristic periods from 0.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

#[derive(Debug, Args)]
struct NumericArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Rk45)]
    method: MethodArg,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Fixed step for `--method rk4`.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 1e-7)]
    rank_tol: f64,
    /// Scan-grid points per characteristic period.
    #[arg(long, default_value_t = 64)]
    scan: usize,
    #[arg(long, default_value_t = 1e-9)]
    bisect_tol: f64,
}

impl NumericArgs {
    fn config(&self) -> IntegratorConfig {
        let method = match self.method {
            MethodArg::Rk45 => Method::Rk45 {
                rel_tol: self.rel_tol,
                abs_tol: self.abs_tol,
            },
            MethodArg::Rk4 => Method::Rk4 { step: self.step },
        };
        IntegratorConfig {
            method,
            scan_points_per_period: self.scan,
            rank_tol: self.rank_tol,
            bisect_tol: self.bisect_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Rk45,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum PointsOut {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum VerifyOut {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum CrossOut {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Param {
    A,
    B,
}

/// Seed from `PSEUDOH_SEED`, else 0.
pub fn seed_from_env() -> std::result::Result<u64, String> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_VAR} must be an unsigned integer, got {s:?}")),
        Err(_) => Ok(0),
    }
}

/// Parses `argv` (program name first) and runs it, writing results to `out`
/// (or the `--output` file) and diagnostics to `err`. Returns the exit code.
pub fn run_command<I, S, W, E>(argv: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                2
            } else {
                let _ = write!(out, "{e}");
                0
            };
            return code;
        }
    };
    let seed = match seed_from_env() {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    match dispatch(cli.command, seed) {
        Ok(Output { text, file, code }) => {
            let written = match file {
                Some(path) => std::fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(err, "error: {msg}");
                return 3;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            3
        }
    }
}

struct Output {
    text: String,
    file: Option<PathBuf>,
    code: i32,
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    match parse_vector(s)?.as_slice() {
        &[lo, hi] => Ok((lo, hi)),
        _ => Err(Error::Parse(format!("window must be `lo,hi`, got {s:?}"))),
    }
}

fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || Error::Parse(format!("range must be `lo,hi,n` with n >= 1, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parse_vector(parts[0])?[0];
    let hi = parse_vector(parts[1])?[0];
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![lo]),
        _ => Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()),
    }
}

struct Geodesic {
    id: String,
    alg: MetricNilpotentAlgebra,
    ic: GeodesicIC,
    inv: GeodesicInvariants,
    window: (f64, f64),
}

fn load_geodesic(g: &GeodesicArgs) -> Result<Geodesic> {
    let alg = resolve_algebra(&g.algebra)?;
    let ic = GeodesicIC::new(&alg, &parse_vector(&g.z0)?, &parse_vector(&g.x0)?)?;
    let inv = GeodesicInvariants::from_ic(&alg, &ic)?;
    let window = match &g.window {
        Some(w) => parse_window(w)?,
        None => default_window(&inv),
    };
    Ok(Geodesic {
        id: g.algebra.clone(),
        alg,
        ic,
        inv,
        window,
    })
}

fn window_value(w: (f64, f64)) -> Value {
    json!([w.0, w.1])
}

fn points_output(points: &[ConjugatePoint], out: PointsOut, report: RunReport) -> String {
    match out {
        PointsOut::Csv => points_csv(points),
        PointsOut::Json => report.to_json(),
    }
}

fn dispatch(cmd: Command, seed: u64) -> Result<Output> {
    match cmd {
        Command::Verify {
            algebra,
            samples,
            tol,
            j_tol,
            out,
            output,
        } => verify(&algebra, samples, tol, j_tol, out, seed).map(|(text, code)| Output {
            text,
            file: output,
            code,
        }),
        Command::Conjugate(ConjugateCmd::Analytic { geo, out, output }) => {
            let g = load_geodesic(&geo)?;
            let cfg = SolverConfig::default();
            let points = analytic_conjugate_points(&g.inv, g.window, &cfg)?;
            let mut rep = RunReport::new("conjugate analytic", &g.id);
            rep.ic = ic_value(&g.ic);
            rep.config = json!({"solver": cfg, "window": window_value(g.window)});
            rep.results = points.iter().map(point_value).collect();
            Ok(Output {
                text: points_output(&points, out, rep),
                file: output,
                code: 0,
            })
        }
        Command::Conjugate(ConjugateCmd::Numeric { geo, num, out, output }) => {
            let g = load_geodesic(&geo)?;
            let cfg = num.config();
            let points = detect_conjugate_points(&g.alg, &g.ic, g.window, &cfg)?;
            let mut rep = RunReport::new("conjugate numeric", &g.id);
            rep.ic = ic_value(&g.ic);
            rep.config = json!({"integrator": cfg, "window": window_value(g.window)});
            rep.results = points.iter().map(point_value).collect();
            Ok(Output {
                text: points_output(&points, out, rep),
                file: output,
                code: 0,
            })
        }
        Command::Crosscheck {
            geo,
            num,
            t_tol,
            mult_strict,
            out,
            output,
        } => {
            let g = load_geodesic(&geo)?;
            let scfg = SolverConfig::default();
            let icfg = num.config();
            let analytic = analytic_conjugate_points(&g.inv, g.window, &scfg)?;
            let numeric = detect_conjugate_points(&g.alg, &g.ic, g.window, &icfg)?;
            let rep = cross_validate(&analytic, &numeric, t_tol, mult_strict);
            let text = match out {
                CrossOut::Json => {
                    let mut r = RunReport::new("crosscheck", &g.id);
                    r.ic = ic_value(&g.ic);
                    r.config = json!({
                        "solver": scfg,
                        "integrator": icfg,
                        "window": window_value(g.window),
                        "t_tol": t_tol,
                        "mult_strict": mult_strict,
                    });
                    let v = cross_report_value(&rep);
                    r.results = v["matched"].as_array().cloned().unwrap_or_default();
                    let mut mm = Vec::new();
                    for (side, key) in [("analytic-only", "analytic_only"), ("numeric-only", "numeric_only")] {
                        for p in v[key].as_array().into_iter().flatten() {
                            mm.push(json!({"kind": side, "point": p}));
                        }
                    }
                    if mult_strict {
                        for m in rep.matched.iter().filter(|m| !m.multiplicity_agrees) {
                            mm.push(json!({
                                "kind": "multiplicity",
                                "point": point_value(&m.analytic),
                                "numeric_multiplicity": m.numeric.multiplicity,
                            }));
                        }
                    }
                    r.mismatches = Some(mm);
                    r.to_json()
                }
                CrossOut::Text => crosscheck_text(&rep),
            };
            Ok(Output {
                text,
                file: output,
                code: rep.exit_code(),
            })
        }
        Command::Scan {
            geo,
            param,
            range,
            output,
        } => {
            let g = load_geodesic(&geo)?;
            let cfg = SolverConfig::default();
            let mut rows = Vec::new();
            for value in parse_range(&range)? {
                let inv = match param {
                    Param::A => g.inv.with_a(value),
                    Param::B => g.inv.with_b(value),
                };
                let window = match &geo.window {
                    Some(_) => g.window,
                    None => default_window(&inv),
                };
                for point in analytic_conjugate_points(&inv, window, &cfg)? {
                    rows.push(ScanRow { param: value, point });
                }
            }
            Ok(Output {
                text: scan_csv(&rows),
                file: output,
                code: 0,
            })
        }
        Command::Export { algebra, output } => Ok(Output {
            text: algebra_to_json(&resolve_algebra(&algebra)?),
            file: output,
            code: 0,
        }),
    }
}

fn crosscheck_text(rep: &crate::numeric::CrossReport) -> String {
    let mut s = String::from("status    t_analytic          t_numeric           dt          mult(a/n)  branch\n");
    for m in &rep.matched {
        s += &format!(
            "{:<9} {:<19.12} {:<19.12} {:<11.3e} {:>4}/{:<5} {}\n",
            if m.multiplicity_agrees { "match" } else { "mult-diff" },
            m.analytic.t0,
            m.numeric.t0,
            m.dt,
            m.analytic.multiplicity,
            m.numeric.multiplicity,
            m.analytic.branch.as_str()
        );
    }
    for p in &rep.analytic_only {
        s += &format!(
            "{:<9} {:<19.12} {:<19} {:<11} {:>4}/{:<5} {}\n",
            "analytic",
            p.t0,
            "-",
            "-",
            p.multiplicity,
            "-",
            p.branch.as_str()
        );
    }
    for p in &rep.numeric_only {
        s += &format!(
            "{:<9} {:<19} {:<19.12} {:<11} {:>4}/{:<5} numeric\n",
            "numeric", "-", p.t0, "-", "-", p.multiplicity
        );
    }
    s += &format!(
        "{} matched, {} analytic-only, {} numeric-only, {} mismatches\n",
        rep.matched.len(),
        rep.analytic_only.len(),
        rep.numeric_only.len(),
        rep.mismatches()
    );
    s
}

fn verify(source: &str, samples: usize, tol: f64, j_tol: f64, out: VerifyOut, seed: u64) -> Result<(String, i32)> {
    let alg = resolve_algebra(source)?;
    let defect = alg.pseudo_h_defect();
    let jsq = j_square_check(&alg, samples, seed, j_tol);
    let pr = alg.is_pseudoregular(samples, seed, NULL_TOL);
    let table = j_square_table(&alg);
    let suite = identity_suite(&alg, samples, seed, tol);
    let code = if suite.iter().all(|c| c.passed()) { 0 } else { 1 };

    if out == VerifyOut::Json {
        let mut rep = RunReport::new("verify", source);
        rep.config = json!({"samples": samples, "tol": tol, "j_tol": j_tol, "seed": seed});
        let mut results = vec![
            json!({"check": "valid", "value": true}),
            json!({"check": "pseudo_h", "value": alg.pseudo_h(), "defect": defect}),
            json!({
                "check": "pseudo_h_random",
                "applicable": jsq.applicable,
                "max_error": jsq.max_error,
                "tol": jsq.tol,
                "passed": jsq.passed(),
            }),
            match &pr {
                crate::algebra::Pseudoregularity::False(w) => {
                    json!({"check": "pseudoregular", "value": "False", "witness": w.label(), "detail": w.to_string()})
                }
                crate::algebra::Pseudoregularity::LikelyTrue { samples } => {
                    json!({"check": "pseudoregular", "value": "LikelyTrue", "samples": samples})
                }
            },
        ];
        for e in &table {
            results.push(json!({
                "check": "j_square",
                "z": e.label,
                "lambda": e.lambda,
                "residual": e.residual,
                "expected": e.expected,
            }));
        }
        for c in &suite {
            results.push(json!({
                "check": c.name,
                "applicable": c.applicable,
                "max_error": c.max_error,
                "tol": c.tol,
                "samples": c.samples,
                "passed": c.passed(),
            }));
        }
        rep.results = results;
        return Ok((rep.to_json(), code));
    }

    let mut s = format!(
        "algebra: {source} (dim z = {}, dim v = {})\nvalid: true\n",
        alg.dim_center(),
        alg.dim_v()
    );
    s += &format!("pseudo-H: {} (defect {:.3e})\n", alg.pseudo_h(), defect);
    if jsq.applicable {
        s += &format!(
            "J_z^2 = -<z,z> I on {} random z: max error {:.3e} (tol {:.0e}) {}\n",
            jsq.samples,
            jsq.max_error,
            jsq.tol,
            if jsq.passed() { "ok" } else { "FAIL" }
        );
    }
    match &pr {
        crate::algebra::Pseudoregularity::False(w) => s += &format!("pseudoregular: false ({w})\n"),
        crate::algebra::Pseudoregularity::LikelyTrue { samples } => {
            s += &format!("pseudoregular: likely true ({samples} random samples)\n")
        }
    }
    s += "J_z^2 probes:\n";
    for e in &table {
        let shape = if e.residual <= j_tol * (1.0 + e.lambda.abs()) {
            format!("{:.12} I", e.lambda)
        } else {
            format!("not scalar (residual {:.3e})", e.residual)
        };
        s += &format!("  {:<8} {}\n", e.label, shape);
    }
    s += "identities:\n";
    for c in &suite {
        s += &format!("  {c}\n");
    }
    Ok((s, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("pseudoh").chain(args.iter().copied());
        let code = run_command(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn range_and_window_parsing() {
        assert_eq!(parse_range("0,1,3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_range("0,1").is_err());
        assert!(parse_range("0,1,0").is_err());
        assert_eq!(parse_window("0.1,20").unwrap(), (0.1, 20.0));
        assert!(parse_window("1").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(&[]).0, 2);
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["conjugate", "analytic", "--algebra", "catalog:heisenberg1"]).0, 2);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn zero_velocity_exits_three() {
        let (code, _, err) = run(&[
            "conjugate",
            "analytic",
            "--algebra",
            "catalog:heisenberg1",
            "--z0",
            "0",
            "--x0",
            "0,0",
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("zero"), "{err}");
    }

    #[test]
    fn analytic_csv_for_pure_center() {
        let (code, out, _) = run(&[
            "conjugate",
            "analytic",
            "--algebra",
            "catalog:heisenberg1",
            "--z0",
            "1",
            "--x0",
            "0,0",
            "--window",
            "0.1,20",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "t0,multiplicity,branch,residual");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("6.283185307179586,2,pure-center,"));
    }
}
