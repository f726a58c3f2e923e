//! Command-line front end: `constants`, `eval`, `extremal`, `verify`, `sweep`.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 for numerical failures
//! (including failed verification checks).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bellman::{bellman_value, Sign};
use crate::constants::{c_continuous, c_dyadic, conjectured_nd, delta_root, eps0_dyadic, ExtendedValue};
use crate::domain::BellmanPoint;
use crate::error::{Error, Result};
use crate::extremal::{continuous_extremal, dyadic_extremal};
use crate::piecewise::{bmo_norm_continuous, bmo_norm_dyadic, Moments};
use crate::verify::run_suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Continuous,
    Dyadic,
    Conjectured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Sharp constant and strip radii for one eps.
    Constants,
    /// Bellman function at (x1, x2).
    Eval,
    /// Extremizer for the point (x1, x2).
    Extremal,
    /// Run verification checks and print a pass/fail table.
    Verify,
    /// Constants on the grid eps*i/grid, i = 1..grid (CSV by default).
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct Options {
    #[arg(long, global = true, value_enum, default_value_t = Setting::Continuous)]
    pub setting: Setting,
    #[arg(long, global = true, value_enum, default_value_t = Sign::Plus)]
    pub sign: Sign,
    /// Strip width (BMO norm bound). For sweep, the largest eps.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub x1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub x2: Option<f64>,
    /// Dimension for the conjectured setting.
    #[arg(long, global = true, default_value_t = 2)]
    pub dim: u32,
    /// Number of binary digits used by dyadic extremizers.
    #[arg(long, global = true, default_value_t = 40)]
    pub depth: usize,
    /// Sample count for extremal CSV output and sweep.
    #[arg(long, global = true, default_value_t = 20)]
    pub grid: usize,
    #[arg(long, global = true, default_value_t = 20_000)]
    pub budget: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// all, or one of: ode, concavity, roots, extremal, scan, slide, midpoint, induction, oracle, split.
    #[arg(long, global = true, default_value = "all")]
    pub suite: String,
}

/// Parsed command line.
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "jn-bellman", version, about = "Sharp John-Nirenberg constants, Bellman functions and extremizers")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

/// Formats with 15 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        format!("{:.*}", (14 - e) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}

/// One output quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    pub value: ExtendedValue,
    pub units: &'static str,
    pub conjectural: bool,
    pub formula: &'static str,
    #[serde(skip)]
    pub note: Option<String>,
}

impl Record {
    fn new(name: &str, value: ExtendedValue, units: &'static str, formula: &'static str) -> Self {
        Record { name: name.into(), value, units, conjectural: false, formula, note: None }
    }
}

fn need(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Parameter(format!("--{flag} is required for this command")))
}

fn write_records(records: &[Record], format: Format, out: &mut Vec<u8>) -> Result<()> {
    match format {
        Format::Text => {
            for r in records {
                let mut line = format!("{} = {}", r.name, r.value);
                if let Some(n) = &r.note {
                    line.push_str(&format!(" ({n})"));
                }
                if r.conjectural {
                    line.push_str(" [conjectural]");
                }
                writeln!(out, "{line}").map_err(io_err)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["name", "value", "units", "conjectural", "formula"]).map_err(csv_err)?;
            for r in records {
                let v = r.value.finite().map(fmt_sig).unwrap_or_else(|| "inf".into());
                w.write_record([r.name.as_str(), &v, r.units, &r.conjectural.to_string(), r.formula])
                    .map_err(csv_err)?;
            }
            w.flush().map_err(io_err)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, records).map_err(json_err)?;
            writeln!(out).map_err(io_err)?;
        }
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parameter(format!("cannot write output: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parameter(format!("cannot write CSV: {e}"))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parameter(format!("cannot write JSON: {e}"))
}

const F_CONT: &str = "exp(-eps)/(1-eps)";
const F_DYAD: &str = "exp(-eps/sqrt2)/(2-exp(eps/sqrt2))";
const F_DELTA_P: &str = "root of (1-r)e^r(2-e^(eps/sqrt2)) = (1-delta)e^(delta-eps/sqrt2), r = sqrt(delta^2-eps^2)";
const F_DELTA_M: &str = "root of (1+r)e^-r(2-e^(-eps/sqrt2)) = (1+delta)e^(-delta+eps/sqrt2), r = sqrt(delta^2-eps^2)";
const F_CONJ: &str = "(2^n-1)exp(-eps 2^(-n/2))/(2^n-exp((2^(n/2)-2^(-n/2))eps))";
const F_EPS0: &str = "n log2/(2^(n/2)-2^(-n/2))";
const F_DELTA_ND: &str = "root of (1-+r)exp(+-r-+delta)(2^n-exp(+-k eps)) = (1-+delta)(2^n-1)exp(-+eps 2^(-n/2))";
const F_BELLMAN: &str = "(1-+g)/(1-+delta) exp(x1+-g-+delta), g = sqrt(delta^2+x1^2-x2)";

fn constants_records(o: &Options) -> Result<Vec<Record>> {
    let eps = need(o.eps, "eps")?;
    let mut recs = Vec::new();
    match o.setting {
        Setting::Continuous => {
            let mut r = Record::new("C(eps)", c_continuous(eps)?, "ratio", F_CONT);
            if !r.value.is_finite() {
                r.note = Some("eps >= 1".into());
            }
            recs.push(r);
        }
        Setting::Dyadic => {
            let mut r = Record::new("C_d(eps)", c_dyadic(eps)?, "ratio", F_DYAD);
            if !r.value.is_finite() {
                r.note = Some("eps >= sqrt(2)*log(2)".into());
            }
            recs.push(r);
            if eps > 0.0 && eps < eps0_dyadic() {
                let d = delta_root(eps, Sign::Plus)?;
                recs.push(Record::new("delta_plus", ExtendedValue::Finite(d.root), "strip width", F_DELTA_P));
            }
            if eps > 0.0 {
                let d = delta_root(eps, Sign::Minus)?;
                recs.push(Record::new("delta_minus", ExtendedValue::Finite(d.root), "strip width", F_DELTA_M));
            }
        }
        Setting::Conjectured => {
            let c = conjectured_nd(eps, o.dim)?;
            let mut r = Record::new("C_d_n(eps)", c.c_nd, "ratio", F_CONJ);
            if !c.c_nd.is_finite() {
                r.note = Some(format!("eps >= eps0(n) = {}", fmt_sig(c.eps0_nd)));
            }
            recs.push(r);
            recs.push(Record::new("eps0(n)", ExtendedValue::Finite(c.eps0_nd), "strip width", F_EPS0));
            if let Some(d) = c.delta_plus_nd {
                recs.push(Record::new("delta_plus_n", ExtendedValue::Finite(d), "strip width", F_DELTA_ND));
            }
            if let Some(d) = c.delta_minus_nd {
                recs.push(Record::new("delta_minus_n", ExtendedValue::Finite(d), "strip width", F_DELTA_ND));
            }
            for r in recs.iter_mut() {
                r.conjectural = c.conjectural;
            }
        }
    }
    Ok(recs)
}

fn setting_delta(o: &Options, eps: f64) -> Result<(f64, bool)> {
    Ok(match o.setting {
        Setting::Continuous => (eps, false),
        Setting::Dyadic => (delta_root(eps, o.sign)?.root, false),
        Setting::Conjectured => {
            let c = conjectured_nd(eps, o.dim)?;
            let d = match o.sign {
                Sign::Plus => c.delta_plus_nd,
                Sign::Minus => c.delta_minus_nd,
            };
            let d = d.ok_or_else(|| Error::Domain(format!("no plus radius in dimension {}: eps >= eps0(n)", o.dim)))?;
            (d, c.conjectural)
        }
    })
}

fn eval_records(o: &Options) -> Result<Vec<Record>> {
    let eps = need(o.eps, "eps")?;
    let p = BellmanPoint::new(need(o.x1, "x1")?, need(o.x2, "x2")?)?;
    if p.variance() > eps * eps + crate::domain::MEMBERSHIP_TOL {
        return Err(Error::Domain(format!("point ({}, {}) is outside the eps={eps} strip", p.x1(), p.x2())));
    }
    let (delta, conjectural) = setting_delta(o, eps)?;
    let name = format!("B_{}(x)", o.sign.name());
    let mut b = Record::new(&name, bellman_value(p, delta, o.sign)?, "exp-average", F_BELLMAN);
    b.conjectural = conjectural;
    let mut d = Record::new("delta", ExtendedValue::Finite(delta), "strip width", "strip width used for B");
    d.conjectural = conjectural;
    Ok(vec![b, d])
}

#[derive(Serialize)]
struct ExtremalReport<T: Serialize> {
    setting: Setting,
    sign: Sign,
    eps: f64,
    point: [f64; 2],
    delta: f64,
    bellman_value: ExtendedValue,
    moments: crate::piecewise::MomentTriple,
    bmo_norm: f64,
    conjectural: bool,
    function: T,
}

fn extremal_output(o: &Options, out: &mut Vec<u8>) -> Result<()> {
    let eps = need(o.eps, "eps")?;
    let p = BellmanPoint::new(need(o.x1, "x1")?, need(o.x2, "x2")?)?;
    match o.setting {
        Setting::Continuous => {
            let f = continuous_extremal(p, eps, o.sign)?;
            let report = ExtremalReport {
                setting: o.setting,
                sign: o.sign,
                eps,
                point: [p.x1(), p.x2()],
                delta: eps,
                bellman_value: bellman_value(p, eps, o.sign)?,
                moments: f.moments(0.0, 1.0)?,
                bmo_norm: bmo_norm_continuous(&f)?,
                conjectural: false,
                function: &f,
            };
            emit_extremal(o, &report, &f, out)
        }
        Setting::Dyadic => {
            let ex = dyadic_extremal(p, eps, o.sign, o.depth)?;
            let report = ExtremalReport {
                setting: o.setting,
                sign: o.sign,
                eps,
                point: [p.x1(), p.x2()],
                delta: ex.delta,
                bellman_value: bellman_value(p, ex.delta, o.sign)?,
                moments: ex.function.moments(0.0, 1.0)?,
                bmo_norm: bmo_norm_dyadic(&ex.function, u32::MAX),
                conjectural: false,
                function: &ex.function,
            };
            emit_extremal(o, &report, &ex.function, out)
        }
        Setting::Conjectured => {
            Err(Error::Unsupported("extremizers are only constructed for the continuous and dyadic settings".into()))
        }
    }
}

fn emit_extremal<T: Serialize, F: Moments>(o: &Options, r: &ExtremalReport<T>, f: &F, out: &mut Vec<u8>) -> Result<()> {
    match o.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, r).map_err(json_err)?;
            writeln!(out).map_err(io_err)?;
        }
        Format::Csv => {
            let n = o.grid.max(1);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["t", "phi"]).map_err(csv_err)?;
            for i in 0..n {
                let t = (i as f64 + 0.5) / n as f64;
                w.write_record([fmt_sig(t), fmt_sig(f.eval(t)?)]).map_err(csv_err)?;
            }
            w.flush().map_err(io_err)?;
        }
        Format::Text => {
            let lines = [
                format!("setting = {:?}, sign = {}", r.setting, r.sign.name()).to_lowercase(),
                format!("delta = {}", fmt_sig(r.delta)),
                format!("<phi> = {}", fmt_sig(r.moments.mean)),
                format!("<phi^2> = {}", fmt_sig(r.moments.second())),
                format!("<exp(phi)> = {}", r.moments.exp_mean),
                format!("B_{}(x) = {}", r.sign.name(), r.bellman_value),
                format!("BMO norm = {}", fmt_sig(r.bmo_norm)),
            ];
            for l in lines {
                writeln!(out, "{l}").map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn verify_output(o: &Options, out: &mut Vec<u8>) -> Result<()> {
    let eps = o.eps.unwrap_or(0.5);
    let results = run_suite(&o.suite, eps, o.seed)?;
    match o.format {
        Format::Text => {
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag}  {:<36} {}", r.name, r.detail).map_err(io_err)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["check", "passed", "detail"]).map_err(csv_err)?;
            for r in &results {
                w.write_record([r.name.as_str(), &r.passed.to_string(), &r.detail]).map_err(csv_err)?;
            }
            w.flush().map_err(io_err)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &results).map_err(json_err)?;
            writeln!(out).map_err(io_err)?;
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Error::Numerical(format!("{failed} verification check(s) failed")));
    }
    Ok(())
}

/// One row of `sweep`; `None` cells are infinite or not applicable.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    #[serde(rename = "C_cont")]
    pub c_cont: Option<f64>,
    #[serde(rename = "C_dyad")]
    pub c_dyad: Option<f64>,
    pub delta_plus: Option<f64>,
    pub delta_minus: Option<f64>,
    pub conjectural_n: u32,
    #[serde(rename = "C_conj")]
    pub c_conj: Option<f64>,
}

pub fn sweep_rows(eps_max: f64, points: usize, dim: u32) -> Result<Vec<SweepRow>> {
    if !(eps_max > 0.0 && eps_max.is_finite()) || points == 0 {
        return Err(Error::Parameter("sweep needs --eps > 0 and --grid >= 1".into()));
    }
    (1..=points)
        .map(|i| {
            let eps = eps_max * i as f64 / points as f64;
            let c_dyad = c_dyadic(eps)?.finite();
            Ok(SweepRow {
                eps,
                c_cont: c_continuous(eps)?.finite(),
                c_dyad,
                delta_plus: if c_dyad.is_some() { Some(delta_root(eps, Sign::Plus)?.root) } else { None },
                delta_minus: Some(delta_root(eps, Sign::Minus)?.root),
                conjectural_n: dim,
                c_conj: conjectured_nd(eps, dim)?.c_nd.finite(),
            })
        })
        .collect()
}

fn sweep_output(o: &Options, out: &mut Vec<u8>) -> Result<()> {
    let rows = sweep_rows(o.eps.unwrap_or(0.95), o.grid, o.dim)?;
    if o.format == Format::Json {
        serde_json::to_writer_pretty(&mut *out, &rows).map_err(json_err)?;
        writeln!(out).map_err(io_err)?;
        return Ok(());
    }
    let cell = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
    let mut w = csv::Writer::from_writer(&mut *out);
    w.write_record(["eps", "C_cont", "C_dyad", "delta_plus", "delta_minus", "conjectural_n", "C_conj"])
        .map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            fmt_sig(r.eps),
            cell(r.c_cont),
            cell(r.c_dyad),
            cell(r.delta_plus),
            cell(r.delta_minus),
            r.conjectural_n.to_string(),
            cell(r.c_conj),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Runs a parsed command, appending its output to `out`.
pub fn run(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<()> {
    let o = &cfg.opts;
    match cfg.command {
        Command::Constants => write_records(&constants_records(o)?, o.format, out),
        Command::Eval => write_records(&eval_records(o)?, o.format, out),
        Command::Extremal => extremal_output(o, out),
        Command::Verify => verify_output(o, out),
        Command::Sweep => sweep_output(o, out),
    }
}

/// Exit code for a result: 0, 1 (bad input) or 2 (numerical failure).
pub fn exit_code(r: &Result<()>) -> i32 {
    match r {
        Ok(()) => 0,
        Err(e) if e.is_numerical() => 2,
        Err(_) => 1,
    }
}

/// Parses `args`, runs, writes to stdout or `--out`, and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut buf = Vec::new();
    let res = run(&cfg, &mut buf);
    let written = match &cfg.opts.out {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(&buf).and_then(|_| so.flush()).map_err(io_err)
        }
    };
    let res = res.and(written);
    if let Err(e) = &res {
        eprintln!("error: {e}");
    }
    exit_code(&res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(1.2130613194252668), "1.21306131942527");
        assert_eq!(fmt_sig(0.5), "0.500000000000000");
        assert_eq!(fmt_sig(1.5e-9), "1.50000000000000e-9");
    }

    fn run_args(args: &[&str]) -> (i32, String) {
        let cfg = match RunConfig::try_parse_from(args) {
            Ok(c) => c,
            Err(_) => return (1, String::new()),
        };
        let mut buf = Vec::new();
        let r = run(&cfg, &mut buf);
        (exit_code(&r), String::from_utf8(buf).unwrap())
    }

    #[test]
    fn constants_text() {
        let (code, s) = run_args(&["jn", "constants", "--setting", "continuous", "--eps", "0.5"]);
        assert_eq!(code, 0);
        assert_eq!(s.trim(), "C(eps) = 1.21306131942527");
        let (code, s) = run_args(&["jn", "constants", "--setting", "dyadic", "--eps", "0.99"]);
        assert_eq!(code, 0);
        assert!(s.contains("infinite (eps >= sqrt(2)*log(2))"), "{s}");
    }

    #[test]
    fn validation_exit_codes() {
        assert_eq!(run_args(&["jn", "eval", "--eps", "0.5", "--x1", "0", "--x2", "0.3"]).0, 1);
        assert_eq!(run_args(&["jn", "eval", "--eps", "0.5"]).0, 1);
        assert_eq!(run_args(&["jn", "constants", "--setting", "bogus"]).0, 1);
    }
}
