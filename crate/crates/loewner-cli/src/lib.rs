//! Command-line front end. [`run`] takes the argument vector and the output
//! streams and returns the process exit code.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use loewner::asymptotics::{residue_ladder, LadderConfig, TOL_LIMIT};
use loewner::classifier::{loewner_profile_with, measure_profile, LadderSummary, ProfileConfig};
use loewner::gallery::{cycle_counterexample, CounterexampleSpec};
use loewner::io::{fmt17, load_rep, moments_csv, rep_to_json, MomentRow, RepSource};
use loewner::laurent::{scalar_moment_fit, TOL_POLY};
use loewner::moments::{scalar_moments_at, telescope};
use loewner::representation::{evaluate, HalfPlanePoint2, PickFunction};
use loewner::{Dir, Real, F128};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "loewner", version, about = "Moments, residues and Loewner-class tests for two-variable Pick functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Representation JSON.
    #[arg(long)]
    rep: PathBuf,
    /// Write data here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Absolute first grid point (default: a multiple of the ray scale).
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate h at one point of the bi-upper half-plane.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Point "a+bi,c+di".
        #[arg(long)]
        z: String,
    },
    /// Table of scalar moments r_k(b).
    Moments {
        #[command(flatten)]
        common: Common,
        /// Direction "b1,b2".
        #[arg(long)]
        b: String,
        #[arg(long = "max-order", default_value_t = 5)]
        max_order: usize,
        #[arg(long = "tol-poly")]
        tol_poly: Option<f64>,
    },
    /// Residue ladder to a given order.
    Residues {
        #[command(flatten)]
        common: Common,
        #[arg(long = "max-order", default_value_t = 4)]
        max_order: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "tol-poly")]
        tol_poly: Option<f64>,
        #[arg(long = "no-meta")]
        no_meta: bool,
    },
    /// Loewner-class profile for N = 1..=max-N.
    Classify {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long = "max-N", default_value_t = 3)]
        max_n: usize,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "tol-poly")]
        tol_poly: Option<f64>,
        /// Exit with status 2 when any verdict is indeterminate.
        #[arg(long)]
        strict: bool,
        #[arg(long = "no-meta")]
        no_meta: bool,
    },
    /// Both sides of the telescoping identity at s = s0·ratio^j.
    Telescope {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        b: String,
        #[arg(long = "max-N", default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 10.0)]
        s0: f64,
        #[arg(long, default_value_t = 100.0)]
        ratio: f64,
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    /// Emit the cyclic counterexample as representation JSON.
    Counterexample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge JSON reports into one document.
    Report {
        /// Reports to merge, in order.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "no-meta")]
        no_meta: bool,
    },
}

/// Parses `a+bi` / `a-bi`; the sign between the parts is mandatory.
pub fn parse_complex(text: &str) -> Result<(f64, f64), String> {
    let bad = || format!("complex literal {text:?} must look like a+bi or a-bi");
    let body = text.strip_suffix('i').ok_or_else(bad)?;
    if body.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok((re, im))
}

fn parse_pair(text: &str, what: &str) -> Result<(String, String), String> {
    let mut parts = text.split(',');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) => Ok((a.to_string(), b.to_string())),
        _ => Err(format!("{what} must be two comma-separated values, got {text:?}")),
    }
}

pub fn parse_direction(text: &str) -> Result<Dir, String> {
    let (a, b) = parse_pair(text, "--b")?;
    let b1: f64 = a.trim().parse().map_err(|_| format!("b1 {a:?} is not a number"))?;
    let b2: f64 = b.trim().parse().map_err(|_| format!("b2 {b:?} is not a number"))?;
    Dir::new(b1, b2).map_err(|e| e.to_string())
}

fn meta(no_meta: bool) -> Option<Value> {
    if no_meta {
        return None;
    }
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Some(json!({"tool": "loewner", "version": env!("CARGO_PKG_VERSION"), "created_unix": secs}))
}

fn with_meta(mut v: Value, no_meta: bool) -> Value {
    if let (Some(m), Some(obj)) = (meta(no_meta), v.as_object_mut()) {
        obj.insert("meta".into(), m);
    }
    v
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => match stdout.write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
            _ => Ok(()),
        },
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<RepSource, String> {
    load_rep(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn ladder_config(grid: &GridArgs, tol_poly: Option<f64>) -> Result<LadderConfig, String> {
    let mut cfg = LadderConfig::default();
    if let Some(s0) = grid.s0 {
        if !(s0 > 0.0) {
            return Err(format!("--s0 {s0} must be positive"));
        }
        cfg.s0 = Some(s0);
    }
    if let Some(r) = grid.ratio {
        if !(r > 1.0) {
            return Err(format!("--ratio {r} must exceed 1"));
        }
        cfg.ratio = r;
    }
    if let Some(l) = grid.levels {
        if l < 4 {
            return Err(format!("--levels {l} must be at least 4"));
        }
        cfg.levels = l;
    }
    if let Some(t) = tol_poly {
        if !(t > 0.0) {
            return Err(format!("--tol-poly {t} must be positive"));
        }
        cfg.tol_poly = t;
    }
    Ok(cfg)
}

fn format_complex(re: f64, im: f64) -> String {
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{re} {sign} {}i", im.abs())
}

enum Outcome {
    Done,
    Indeterminate,
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome, String> {
    match cmd {
        Command::Eval { common, z } => {
            let src = load(&common.rep)?;
            let (a, b) = parse_pair(&z, "--z")?;
            let (z1, z2) = (parse_complex(&a)?, parse_complex(&b)?);
            let p = HalfPlanePoint2::new(loewner::c(z1.0, z1.1), loewner::c(z2.0, z2.1)).map_err(|e| e.to_string())?;
            let h = match src.measure() {
                Some(m) => m.value(p.z1, p.z2),
                None => evaluate(src.rep().map_err(|e| e.to_string())?, &p),
            }
            .map_err(|e| e.to_string())?;
            emit(common.out.as_deref(), &format!("{}\n", format_complex(h.re, h.im)), stdout)?;
        }
        Command::Moments {
            common,
            b,
            max_order,
            tol_poly,
        } => {
            if max_order == 0 {
                return Err("--max-order must be at least 1".into());
            }
            let tol = tol_poly.unwrap_or(TOL_POLY);
            let src = load(&common.rep)?;
            let dir = parse_direction(&b)?;
            let r = scalar_moments_at(src.rep().map_err(|e| e.to_string())?, &dir.into(), max_order).map_err(|e| e.to_string())?;
            let mut rows = Vec::with_capacity(max_order);
            for (i, v) in r.iter().enumerate() {
                let fit = scalar_moment_fit(src.rep().map_err(|e| e.to_string())?, i + 1).map_err(|e| e.to_string())?;
                if fit.relative_residual > tol {
                    writeln!(stderr, "r_{} is not polynomial at tolerance {tol:e} (residual {:e})", i + 1, fit.relative_residual)
                        .ok();
                }
                rows.push(MomentRow {
                    k: i + 1,
                    b1: dir.b1,
                    b2: dir.b2,
                    r: v.re,
                    im: v.im,
                    residual: Some(fit.relative_residual),
                });
            }
            emit(common.out.as_deref(), &moments_csv(&rows), stdout)?;
        }
        Command::Residues {
            common,
            max_order,
            grid,
            tol_poly,
            no_meta,
        } => {
            let cfg = ladder_config(&grid, tol_poly)?;
            let src = load(&common.rep)?;
            let wide = src.rep().map_err(|e| e.to_string())?.cast::<F128>();
            let ladder = residue_ladder(&wide, max_order, &cfg).map_err(|e| e.to_string())?;
            let directions: Vec<Value> = ladder
                .layers
                .iter()
                .chain(ladder.rejected.iter())
                .map(|l| {
                    json!({
                        "order": l.order,
                        "limits": l.directions.iter().map(|d| json!({
                            "b1": [d.b.b1.re.to_f64_lossy(), d.b.b1.im.to_f64_lossy()],
                            "b2": [d.b.b2.re.to_f64_lossy(), d.b.b2.im.to_f64_lossy()],
                            "value": [d.limit.value.re.to_f64_lossy(), d.limit.value.im.to_f64_lossy()],
                            "error_bound": d.limit.error_bound.to_f64_lossy(),
                            "converged": d.limit.converged,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let body = json!({
                "kind": "residue_ladder",
                "max_order": max_order,
                "grid": {"x0": cfg.x0, "s0": cfg.s0, "ratio": cfg.ratio, "levels": cfg.levels},
                "tol_limit": TOL_LIMIT,
                "tol_poly": cfg.tol_poly,
                "ladder": LadderSummary::of(&ladder),
                "directions": directions,
            });
            emit(common.out.as_deref(), &pretty(&with_meta(body, no_meta)), stdout)?;
        }
        Command::Classify {
            rep,
            max_n,
            report,
            grid,
            tol_poly,
            strict,
            no_meta,
        } => {
            if max_n == 0 {
                return Err("--max-N must be at least 1".into());
            }
            let cfg = ProfileConfig {
                tol_poly: tol_poly.unwrap_or(TOL_POLY),
                ladder: ladder_config(&grid, tol_poly)?,
            };
            let src = load(&rep)?;
            let result = match src.measure() {
                Some(m) => {
                    let tmax = m.atoms().iter().fold(0.0f64, |a, t| a.max(t.0.abs()));
                    let s_min = grid.s0.unwrap_or(10.0);
                    let s_max = tmax / 10.0;
                    if !(s_max > s_min) {
                        return Err(format!(
                            "measure window [{s_min}, {s_max}] is empty: the largest atom must exceed 10·s0"
                        ));
                    }
                    measure_profile(m, max_n, s_min, s_max, grid.levels.unwrap_or(15))
                }
                None => loewner_profile_with(src.rep().map_err(|e| e.to_string())?, max_n, &cfg),
            }
            .map_err(|e| e.to_string())?;
            for d in &result.discrepancies {
                writeln!(stderr, "discrepancy at N = {}: {}: {}", d.n, d.kind, d.detail).ok();
            }
            let mut body = serde_json::to_value(&result).expect("report serializes");
            body["kind"] = json!("classification");
            body["first_nonpolynomial_scalar"] = json!(result.moments.scalar_stop.first_failure());
            body["first_nonpolynomial_vector"] = json!(result.moments.vector_stop.first_failure());
            emit(report.as_deref(), &pretty(&with_meta(body, no_meta)), stdout)?;
            if strict && result.has_indeterminate() {
                writeln!(stderr, "indeterminate verdicts present").ok();
                return Ok(Outcome::Indeterminate);
            }
        }
        Command::Telescope {
            common,
            b,
            max_n,
            s0,
            ratio,
            levels,
        } => {
            if max_n == 0 || !(s0 > 0.0) || !(ratio > 1.0) {
                return Err("telescope needs --max-N >= 1, --s0 > 0 and --ratio > 1".into());
            }
            let src = load(&common.rep)?;
            let dir = parse_direction(&b)?;
            let mut csv = String::from("N,s,re_lhs,im_lhs,re_rhs,im_rhs,relative_residual\n");
            for n in 1..=max_n {
                let mut s = s0;
                for _ in 0..=levels {
                    let t = telescope(src.rep().map_err(|e| e.to_string())?, &dir, s, n).map_err(|e| e.to_string())?;
                    csv.push_str(&format!(
                        "{n},{},{},{},{},{},{}\n",
                        fmt17(s),
                        fmt17(t.lhs.re),
                        fmt17(t.lhs.im),
                        fmt17(t.rhs.re),
                        fmt17(t.rhs.im),
                        fmt17(t.relative)
                    ));
                    s *= ratio;
                }
            }
            emit(common.out.as_deref(), &csv, stdout)?;
        }
        Command::Counterexample { n, t, out } => {
            let spec = CounterexampleSpec::new(n, t).map_err(|e| e.to_string())?;
            let mut text = rep_to_json(&cycle_counterexample::<f64>(&spec));
            text.push('\n');
            emit(out.as_deref(), &text, stdout)?;
        }
        Command::Report { inputs, out, no_meta } => {
            let mut reports = Vec::with_capacity(inputs.len());
            for p in &inputs {
                let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                let mut v: Value =
                    serde_json::from_str(&text).map_err(|e| format!("{} is not JSON: {e}", p.display()))?;
                if let Some(obj) = v.as_object_mut() {
                    obj.remove("meta");
                }
                reports.push(json!({"source": p.display().to_string(), "report": v}));
            }
            let body = json!({"kind": "merged", "reports": reports});
            emit(out.as_deref(), &pretty(&with_meta(body, no_meta)), stdout)?;
        }
    }
    Ok(Outcome::Done)
}

/// Runs one invocation. Data goes to `stdout` or the `--out`/`--report`
/// file, diagnostics to `stderr`.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                stderr.write_all(text.as_bytes()).ok();
            } else {
                stdout.write_all(text.as_bytes()).ok();
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Indeterminate) => EXIT_INDETERMINATE,
        Err(msg) => {
            writeln!(stderr, "error: {msg}").ok();
            EXIT_INVALID
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0+1i"), Ok((0.0, 1.0)));
        assert_eq!(parse_complex("-1.5-2i"), Ok((-1.5, -2.0)));
        assert_eq!(parse_complex("1e-3+2.5E+2i"), Ok((1e-3, 250.0)));
        for bad in ["1+2", "1 +2i", "2i", "i", "1+i", "a+bi", ""] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn directions() {
        let d = parse_direction("1,2.5").unwrap();
        assert_eq!((d.b1, d.b2), (1.0, 2.5));
        assert!(parse_direction("1").is_err());
        assert!(parse_direction("1,0").is_err());
        assert!(parse_direction("1,2,3").is_err());
    }

    #[test]
    fn complex_output() {
        assert_eq!(format_complex(0.0, 1.0), "0 + 1i");
        assert_eq!(format_complex(0.5, -2.0), "0.5 - 2i");
    }
}
