//! Command-line front end.
//!
//! Each subcommand wires one slice of the library: coefficient tables
//! (`coeffs`, `theta`), identity grids (`special mellin-check`,
//! `mellin check`), sum evaluation (`scp`, `mellin dseries`), central
//! values (`lvalue`), the amplifier bookkeeping (`amplify`,
//! `exponents`), and the acceptance battery (`selftest`).
//!
//! Contract: numeric output goes to stdout (or `--out` where offered);
//! diagnostics go to stderr as `error[category]: message`; the exit code
//! is 0 on success, 1 on domain/precondition/parse errors, and 2 when a
//! resource ceiling or table-coverage requirement is hit. Every
//! subcommand accepts `--format json` and then emits a single JSON
//! document with keys in sorted order. Timing fields are reported as 0
//! unless `--timing` is passed, so that repeated invocations are
//! byte-identical.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use shiftconv::amplifier::{
    balance_report, exponent_calculator, moment_s, one_term_bound, AmplifierSpec, ExponentInput,
};
use shiftconv::arith::{dirichlet_char, CoeffTable, RepDescriptor};
use shiftconv::config::{
    load_config, parse_form_spec, parse_poly_spec, parse_weight_spec, OutputFormat, RepName,
    RunConfig,
};
use shiftconv::error::{Error, Result};
use shiftconv::lfunc::{central_value, AFEConfig};
use shiftconv::mellin::{
    constant_coeff_mellin_closed, constant_coeff_mellin_numeric, dirichlet_series_d, MellinSpec,
};
use shiftconv::quadforms::{enumerate_visit, theta_coeffs, SphericalPoly};
use shiftconv::quadrature::QuadratureConfig;
use shiftconv::selftest::{run_criterion, SelftestContext, CRITERION_COUNT};
use shiftconv::shifted::{growth_fit, linear_shift_sum, quad_shift_sum};
use shiftconv::special::{whittaker_mellin_lhs, whittaker_mellin_rhs, WhittakerParams};

/// Shifted convolution sums, theta lifts, and twisted central values at
/// desk scale.
#[derive(Parser)]
#[command(name = "shiftconv", version, disable_help_subcommand = true)]
struct Cli {
    /// Configuration file of key=value lines (# comments). Keys:
    /// rep_name, table_bound, output_format, deterministic, rel_tol,
    /// abs_tol.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format override: json, csv, or dat.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// Report wall-clock timings instead of zeros in timing fields
    /// (makes output non-reproducible byte-for-byte).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a coefficient table and export it (or re-export an import).
    Coeffs(CoeffsArgs),
    /// Special-function identity grids.
    #[command(subcommand)]
    Special(SpecialCmd),
    /// Theta coefficients r_{f,p}(m) of a quadratic form.
    Theta(ThetaArgs),
    /// Shifted convolution sums and their growth in Y.
    #[command(subcommand)]
    Scp(ScpCmd),
    /// Central twisted L-value by the approximate functional equation.
    Lvalue(LvalueArgs),
    /// Constant-coefficient Mellin transforms of the theta lift.
    #[command(subcommand)]
    Mellin(MellinCmd),
    /// Amplified moment, exponent calculator, and balance sweep.
    #[command(subcommand)]
    Amplify(AmplifyCmd),
    /// Final exponent max(e_diag, e_offdiag) for (n, theta0, u).
    Exponents(ExponentArgs),
    /// Run the acceptance battery (all criteria, or a subset).
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CoeffsArgs {
    /// Representation: delta, sym2, sym3, or formal_ones.
    #[arg(long)]
    rep: Option<String>,
    /// Largest index to tabulate.
    #[arg(long)]
    bound: Option<usize>,
    /// Re-export a previously exported table instead of building one.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["rep", "bound"])]
    import: Option<PathBuf>,
    /// Write here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SpecialCmd {
    /// Whittaker Mellin identity over the built-in (kappa, nu, s) grid:
    /// rows (kappa, nu, s, lhs, rhs, relerr).
    MellinCheck {
        /// Write here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ThetaArgs {
    /// Form as K:UPPER, the upper triangle of 2A (e.g. 2:2,0,2).
    #[arg(long)]
    form: String,
    /// Spherical polynomial as COEF:E1,..,EK terms joined by ';'
    /// (default: the constant 1).
    #[arg(long)]
    poly: Option<String>,
    /// Largest represented value to tabulate.
    #[arg(long, default_value_t = 100)]
    bound: usize,
    /// Write here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ScpCmd {
    /// Quadratic-shift sum over lattice points of a form.
    Quad(ScpQuadArgs),
    /// Linear-progression sum over l1*g1 - l2*g2 = alpha.
    Linear(ScpLinearArgs),
    /// Sweep Y and emit (ln Y, ln |S|) for external plotting.
    Growth(ScpGrowthArgs),
}

#[derive(Args)]
struct ScpQuadArgs {
    /// Form as K:UPPER (default: a single square).
    #[arg(long, default_value = "1:2")]
    form: String,
    /// Spherical polynomial (default: the constant 1).
    #[arg(long)]
    poly: Option<String>,
    /// Shift alpha (nonzero).
    #[arg(long, default_value_t = 1)]
    alpha: i64,
    /// Dyadic scale Y.
    #[arg(long, default_value_t = 100.0)]
    y: f64,
    /// Weight: compact:CENTER or gaussian:CENTER:WIDTH.
    #[arg(long, default_value = "compact:1")]
    weight: String,
    /// Representation override (default from config).
    #[arg(long)]
    rep: Option<String>,
    /// Table bound override (default from config).
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Args)]
struct ScpLinearArgs {
    /// First progression modulus.
    #[arg(long, default_value_t = 1)]
    l1: i64,
    /// Second progression modulus.
    #[arg(long, default_value_t = 1)]
    l2: i64,
    /// Shift alpha (nonzero).
    #[arg(long, default_value_t = 1)]
    alpha: i64,
    /// Dyadic scale Y.
    #[arg(long, default_value_t = 100.0)]
    y: f64,
    /// Weight on the gamma_1 leg.
    #[arg(long, default_value = "compact:1")]
    w1: String,
    /// Weight on the gamma_2 leg.
    #[arg(long, default_value = "compact:1")]
    w2: String,
    /// Representation override (default from config).
    #[arg(long)]
    rep: Option<String>,
    /// Table bound override (default from config).
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Args)]
struct ScpGrowthArgs {
    /// Form as K:UPPER (default: a single square).
    #[arg(long, default_value = "1:2")]
    form: String,
    /// Spherical polynomial (default: the constant 1).
    #[arg(long)]
    poly: Option<String>,
    /// Shift alpha (nonzero).
    #[arg(long, default_value_t = 1)]
    alpha: i64,
    /// Smallest Y in the sweep.
    #[arg(long, default_value_t = 1.0e3)]
    y_min: f64,
    /// Largest Y in the sweep.
    #[arg(long, default_value_t = 1.0e4)]
    y_max: f64,
    /// Number of log-spaced sweep points.
    #[arg(long, default_value_t = 7)]
    points: usize,
    /// Weight: compact:CENTER or gaussian:CENTER:WIDTH.
    #[arg(long, default_value = "compact:1")]
    weight: String,
    /// Representation override (default from config).
    #[arg(long)]
    rep: Option<String>,
    /// Table bound override (default from config).
    #[arg(long)]
    bound: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LvalueArgs {
    /// Representation: delta, sym2, sym3, or formal_ones.
    #[arg(long)]
    rep: Option<String>,
    /// Twisting modulus (prime).
    #[arg(long, default_value_t = 5)]
    q: u64,
    /// Character index in the fixed-generator ordering.
    #[arg(long, default_value_t = 2)]
    index: u64,
    /// Kernel width w of G(s) = exp(s^2/w).
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    /// Cutoff multiplier: the first sum is cut at mult * sqrt(C).
    #[arg(long, default_value_t = 1.0)]
    mult: f64,
    /// Table bound override (default from config).
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Subcommand)]
enum MellinCmd {
    /// Closed-form vs numeric transform on an s-grid: rows
    /// (kappa, nu, s_re, s_im, closed, numeric, relerr).
    Check(MellinCheckArgs),
    /// Truncated Dirichlet series D(s) through theta coefficients.
    Dseries(MellinDseriesArgs),
}

#[derive(Args)]
struct MellinCheckArgs {
    /// Whittaker first parameter (real).
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
    /// Real part of the Whittaker order nu.
    #[arg(long, default_value_t = 0.0)]
    nu_re: f64,
    /// Imaginary part of the Whittaker order nu.
    #[arg(long, default_value_t = 0.0)]
    nu_im: f64,
    /// Real parts of the Mellin variable (repeatable).
    #[arg(long = "s", value_name = "RE", num_args = 1..)]
    s_values: Vec<f64>,
    /// Imaginary part applied to every s.
    #[arg(long, default_value_t = 0.0)]
    s_im: f64,
    /// Form as K:UPPER (default: a single square).
    #[arg(long, default_value = "1:2")]
    form: String,
    /// Spherical polynomial (default: the constant 1).
    #[arg(long)]
    poly: Option<String>,
    /// Lattice truncation of the coefficient sum.
    #[arg(long, default_value_t = 1000)]
    m_cut: usize,
    /// Representation override (default from config).
    #[arg(long)]
    rep: Option<String>,
    /// Write here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MellinDseriesArgs {
    /// Real part of s (inside the convergence half-plane).
    #[arg(long, default_value_t = 3.0)]
    s_re: f64,
    /// Imaginary part of s.
    #[arg(long, default_value_t = 0.0)]
    s_im: f64,
    /// Form as K:UPPER (default: a single square).
    #[arg(long, default_value = "1:2")]
    form: String,
    /// Spherical polynomial (default: the constant 1).
    #[arg(long)]
    poly: Option<String>,
    /// Lattice truncation of the coefficient sum.
    #[arg(long, default_value_t = 2000)]
    m_cut: usize,
    /// Representation override (default from config).
    #[arg(long)]
    rep: Option<String>,
}

#[derive(Subcommand)]
enum AmplifyCmd {
    /// Amplified second moment S and its single-character lower bound.
    Moment(AmplifyMomentArgs),
    /// Exponent triple (e_diag, e_offdiag, e_final) for (n, theta0, u).
    Exponents(ExponentArgs),
    /// Sweep u and emit rows (u, e_diag, e_offdiag, e_final).
    Balance(AmplifyBalanceArgs),
}

#[derive(Args)]
struct AmplifyMomentArgs {
    /// Twisting modulus (prime).
    #[arg(long, default_value_t = 5)]
    q: u64,
    /// Distinguished character index.
    #[arg(long, default_value_t = 2)]
    index: u64,
    /// Amplifier length L (primes are drawn from [L, 2L]).
    #[arg(long, default_value_t = 10.0)]
    l: f64,
    /// Dyadic scale Y of the coefficient window.
    #[arg(long, default_value_t = 200.0)]
    y: f64,
    /// Imaginary part of the sample point w (Re w must vanish).
    #[arg(long, default_value_t = 0.5)]
    w_im: f64,
    /// Weight: compact:CENTER or gaussian:CENTER:WIDTH.
    #[arg(long, default_value = "compact:1")]
    weight: String,
    /// Table bound override (default from config).
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Args)]
struct ExponentArgs {
    /// Degree n of the twisted L-function.
    #[arg(long)]
    n: u32,
    /// Progression-exponent hypothesis theta0 in [0, 1/2]; accepts
    /// decimals or fractions like 7/64.
    #[arg(long)]
    theta0: String,
    /// Amplifier-length exponent u in [0, 1].
    #[arg(long)]
    u: String,
    /// Optional off-diagonal saving delta0.
    #[arg(long)]
    delta0: Option<f64>,
}

#[derive(Args)]
struct AmplifyBalanceArgs {
    /// Degree n of the twisted L-function.
    #[arg(long, default_value_t = 3)]
    n: u32,
    /// theta0 as a decimal or a fraction like 7/64.
    #[arg(long, default_value = "7/64")]
    theta0: String,
    /// Largest u in the sweep.
    #[arg(long, default_value_t = 0.2)]
    u_max: f64,
    /// Number of sweep points.
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Write here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run only these criteria (1-based, repeatable); default: all.
    #[arg(long, value_name = "N", num_args = 1..)]
    criterion: Vec<usize>,
    /// Seed-table bound for a reduced-coverage smoke run. Criteria that
    /// need more coverage then fail with a coverage finding.
    #[arg(long)]
    delta_bound: Option<usize>,
    /// Symmetric-square table bound for a reduced-coverage run.
    #[arg(long)]
    sym2_bound: Option<usize>,
    /// Divisor-table bound for a reduced-coverage run.
    #[arg(long)]
    ones_bound: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // Usage mistakes are precondition failures: exit 1, not
            // clap's default 2 (which we reserve for resource limits).
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let explicit_format = match &cli.format {
        Some(text) => Some(OutputFormat::parse(text)?),
        None => None,
    };
    if let Some(f) = explicit_format {
        cfg.output_format = f;
    }
    let timing = cli.timing;
    match cli.cmd {
        Cmd::Coeffs(a) => cmd_coeffs(a, &cfg, explicit_format),
        Cmd::Special(SpecialCmd::MellinCheck { out }) => {
            cmd_special_mellin_check(out, explicit_format)
        }
        Cmd::Theta(a) => cmd_theta(a, explicit_format),
        Cmd::Scp(ScpCmd::Quad(a)) => cmd_scp_quad(a, &cfg, timing),
        Cmd::Scp(ScpCmd::Linear(a)) => cmd_scp_linear(a, &cfg, timing),
        Cmd::Scp(ScpCmd::Growth(a)) => cmd_scp_growth(a, &cfg, explicit_format),
        Cmd::Lvalue(a) => cmd_lvalue(a, &cfg),
        Cmd::Mellin(MellinCmd::Check(a)) => cmd_mellin_check(a, &cfg, explicit_format),
        Cmd::Mellin(MellinCmd::Dseries(a)) => cmd_mellin_dseries(a, &cfg),
        Cmd::Amplify(AmplifyCmd::Moment(a)) => cmd_amplify_moment(a, &cfg),
        Cmd::Amplify(AmplifyCmd::Exponents(a)) => cmd_exponents(a, explicit_format, false),
        Cmd::Amplify(AmplifyCmd::Balance(a)) => cmd_amplify_balance(a, explicit_format),
        Cmd::Exponents(a) => cmd_exponents(a, explicit_format, true),
        Cmd::Selftest(a) => cmd_selftest(a, explicit_format, timing),
    }
}

// ---------------------------------------------------------------- helpers

/// Apply per-subcommand rep/bound overrides and build the table.
fn table_for(
    cfg: &RunConfig,
    rep: Option<&str>,
    bound: Option<usize>,
) -> Result<(RepDescriptor, Arc<CoeffTable>)> {
    let mut cfg = cfg.clone();
    if let Some(name) = rep {
        cfg.rep_name = RepName::parse(name)?;
    }
    if let Some(b) = bound {
        cfg.table_bound = b;
    }
    cfg.validate()?;
    cfg.build_table()
}

fn poly_for(spec: &Option<String>, k: usize) -> Result<SphericalPoly> {
    match spec {
        Some(text) => parse_poly_spec(text, k),
        None => Ok(SphericalPoly::constant_one(k)),
    }
}

/// Parse a real number, accepting fractions like 7/64.
fn parse_real(text: &str) -> Result<f64> {
    let parse = |f: &str| -> Result<f64> {
        f.trim()
            .parse::<f64>()
            .map_err(|_| Error::Precondition(format!("'{f}' is not a number")))
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let den = parse(den)?;
            if den == 0.0 {
                return Err(Error::Precondition("fraction with denominator 0".into()));
            }
            Ok(parse(num)? / den)
        }
        None => parse(text),
    }
}

/// Parse an exact rational: A/B, an integer, or a (dyadic) decimal.
fn parse_ratio(text: &str) -> Result<num_rational::Ratio<i128>> {
    let int = |f: &str| -> Result<i128> {
        f.trim()
            .parse::<i128>()
            .map_err(|_| Error::Precondition(format!("'{f}' is not an integer")))
    };
    if let Some((num, den)) = text.split_once('/') {
        let den = int(den)?;
        if den == 0 {
            return Err(Error::Precondition("fraction with denominator 0".into()));
        }
        return Ok(num_rational::Ratio::new(int(num)?, den));
    }
    // Finite binary floats are dyadic rationals, so doubling until the
    // fractional part vanishes converts a decimal literal exactly.
    let mut x = parse_real(text)?;
    if !x.is_finite() {
        return Err(Error::Precondition(format!("'{text}' is not finite")));
    }
    let mut den: i128 = 1;
    while x.fract() != 0.0 {
        if den > (1 << 60) {
            return Err(Error::Precondition(format!(
                "'{text}' has no short dyadic representation; pass it as A/B"
            )));
        }
        x *= 2.0;
        den *= 2;
    }
    Ok(num_rational::Ratio::new(x as i128, den))
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

/// Complex number as a single CSV-safe token, re{+/-}im i.
fn fmt_c(z: Complex64) -> String {
    format!("{:.15e}{:+.15e}i", z.re, z.im)
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Render a flat record in the three formats: a JSON object, a one-row
/// CSV, or aligned `key value` lines.
fn render_record(fmt: OutputFormat, fields: &[(&str, Value)]) -> String {
    match fmt {
        OutputFormat::Json => {
            let mut obj = serde_json::Map::new();
            for (k, v) in fields {
                obj.insert((*k).to_string(), v.clone());
            }
            json_text(&Value::Object(obj))
        }
        OutputFormat::Csv => {
            let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = fields.iter().map(|(_, v)| csv_cell(v)).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
        OutputFormat::Dat => {
            let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut out = String::new();
            for (k, v) in fields {
                out.push_str(&format!("{k:<width$}  {}\n", csv_cell(v)));
            }
            out
        }
    }
}

/// One CSV cell: complex pairs become re+im tokens, strings are emitted
/// bare (none of ours contain commas), scalars print as JSON does, and
/// nested structures are quoted with doubled inner quotes.
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Array(parts) if parts.len() == 2 && parts.iter().all(Value::is_number) => {
            let re = parts[0].as_f64().unwrap_or(f64::NAN);
            let im = parts[1].as_f64().unwrap_or(f64::NAN);
            fmt_c(Complex64::new(re, im))
        }
        Value::String(s) => s.clone(),
        Value::Object(_) | Value::Array(_) => {
            format!("\"{}\"", v.to_string().replace('"', "\"\""))
        }
        other => other.to_string(),
    }
}

/// Render a uniform table: CSV with a header, whitespace columns for
/// dat, or an array of row objects for JSON.
fn render_table(fmt: OutputFormat, columns: &[&str], rows: &[Vec<Value>]) -> String {
    match fmt {
        OutputFormat::Json => {
            let objs: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (k, v) in columns.iter().zip(row) {
                        obj.insert((*k).to_string(), v.clone());
                    }
                    Value::Object(obj)
                })
                .collect();
            json_text(&Value::Array(objs))
        }
        OutputFormat::Csv => {
            let mut out = format!("{}\n", columns.join(","));
            for row in rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Dat => {
            let mut out = format!("# {}\n", columns.join(" "));
            for row in rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
            out
        }
    }
}

fn elapsed_ms(t0: Instant, timing: bool) -> f64 {
    if timing {
        t0.elapsed().as_secs_f64() * 1.0e3
    } else {
        0.0
    }
}

// ------------------------------------------------------------- commands

fn cmd_coeffs(a: CoeffsArgs, cfg: &RunConfig, fmt: Option<OutputFormat>) -> Result<()> {
    let table: Arc<CoeffTable> = match &a.import {
        Some(path) => Arc::new(CoeffTable::import_text(&fs::read_to_string(path)?)?),
        None => table_for(cfg, a.rep.as_deref(), a.bound)?.1,
    };
    // The interchange text format is the native output; json/csv are
    // only produced on request so that export -> import round-trips
    // byte-identically by default.
    let text = match fmt.unwrap_or(OutputFormat::Dat) {
        OutputFormat::Dat => table.export_text(),
        OutputFormat::Csv => {
            let mut out = String::from("m,re,im\n");
            for m in 1..=table.bound {
                let v = table.values[m];
                out.push_str(&format!("{m},{:.16e},{:.16e}\n", v.re, v.im));
            }
            out
        }
        OutputFormat::Json => {
            let values: Vec<Value> = (1..=table.bound)
                .map(|m| json!([table.values[m].re, table.values[m].im]))
                .collect();
            json_text(&json!({
                "bound": table.bound,
                "degree": table.degree,
                "rep": table.name,
                "values": values,
            }))
        }
    };
    emit(&a.out, text)
}

fn cmd_special_mellin_check(out: Option<PathBuf>, fmt: Option<OutputFormat>) -> Result<()> {
    // The acceptance grid: a closed-form point, a real order, and an
    // imaginary order, each at three Mellin heights.
    let cases = [
        (Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5)),
    ];
    let quad = QuadratureConfig::default();
    let mut rows = Vec::new();
    for (kappa, nu) in cases {
        let params = WhittakerParams::new(kappa, nu)?;
        for s_re in [1.0, 1.5, 2.0] {
            let s = Complex64::new(s_re, 0.0);
            let lhs = whittaker_mellin_lhs(&params, s, &quad)?;
            let rhs = whittaker_mellin_rhs(&params, s)?;
            let relerr = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
            rows.push(vec![
                json!(kappa.re),
                cjson(nu),
                json!(s_re),
                cjson(lhs),
                cjson(rhs),
                json!(relerr),
            ]);
        }
    }
    let text = render_table(
        fmt.unwrap_or(OutputFormat::Csv),
        &["kappa", "nu", "s", "lhs", "rhs", "relerr"],
        &rows,
    );
    emit(&out, text)
}

fn cmd_theta(a: ThetaArgs, fmt: Option<OutputFormat>) -> Result<()> {
    let form = parse_form_spec(&a.form)?;
    let poly = poly_for(&a.poly, form.k)?;
    let theta = theta_coeffs(&form, &poly, a.bound)?;
    let text = match fmt.unwrap_or(OutputFormat::Dat) {
        OutputFormat::Dat => theta.export_text(),
        OutputFormat::Csv => {
            let mut out = String::from("m,r\n");
            for m in 0..=theta.bound {
                out.push_str(&format!("{m},{:.16e}\n", theta.r[m]));
            }
            out
        }
        OutputFormat::Json => json_text(&json!({
            "bound": theta.bound,
            "label": theta.label,
            "r": theta.r,
        })),
    };
    emit(&a.out, text)
}

fn cmd_scp_quad(a: ScpQuadArgs, cfg: &RunConfig, timing: bool) -> Result<()> {
    let form = parse_form_spec(&a.form)?;
    let poly = poly_for(&a.poly, form.k)?;
    let weight = parse_weight_spec(&a.weight)?;
    let (_, table) = table_for(cfg, a.rep.as_deref(), a.bound)?;
    let t0 = Instant::now();
    let value = quad_shift_sum(&table, &form, &poly, a.alpha, a.y, &weight)?;
    let ms = elapsed_ms(t0, timing);
    // Count the lattice terms the sum actually visited: points a with
    // f(a) + alpha >= 1 inside the weight support.
    let (_, hi) = weight.support();
    let v_max = (hi * a.y).floor() as i64;
    let mut term_count: u64 = 0;
    if v_max - a.alpha >= 0 {
        enumerate_visit(&form, v_max - a.alpha, |_, val| {
            let v = val + a.alpha;
            if v >= 1 && weight.effective(v as f64 / a.y) > 0.0 {
                term_count += 1;
            }
        })?;
    }
    let record = [
        ("elapsed_ms", json!(ms)),
        (
            "params",
            json!({
                "alpha": a.alpha,
                "form": a.form,
                "poly": a.poly.clone().unwrap_or_else(|| "1".into()),
                "rep": table.name,
                "weight": a.weight,
                "y": a.y,
            }),
        ),
        ("term_count", json!(term_count)),
        ("value", cjson(value)),
    ];
    print!("{}", render_record(cfg.output_format, &record));
    Ok(())
}

fn cmd_scp_linear(a: ScpLinearArgs, cfg: &RunConfig, timing: bool) -> Result<()> {
    let w1 = parse_weight_spec(&a.w1)?;
    let w2 = parse_weight_spec(&a.w2)?;
    let (_, table) = table_for(cfg, a.rep.as_deref(), a.bound)?;
    let t0 = Instant::now();
    let sum = linear_shift_sum(&table, &table, a.l1, a.l2, a.alpha, a.y, &w1, &w2)?;
    let ms = elapsed_ms(t0, timing);
    let record = [
        ("elapsed_ms", json!(ms)),
        ("hypothesis_violated", json!(sum.hypothesis_violated)),
        (
            "params",
            json!({
                "alpha": a.alpha,
                "l1": a.l1,
                "l2": a.l2,
                "rep": table.name,
                "w1": a.w1,
                "w2": a.w2,
                "y": a.y,
            }),
        ),
        ("term_count", json!(sum.term_count)),
        ("value", cjson(sum.value)),
    ];
    print!("{}", render_record(cfg.output_format, &record));
    Ok(())
}

fn cmd_scp_growth(a: ScpGrowthArgs, cfg: &RunConfig, fmt: Option<OutputFormat>) -> Result<()> {
    if a.points < 2 || !(a.y_min > 0.0) || !(a.y_max > a.y_min) {
        return Err(Error::Precondition(
            "growth sweep needs points >= 2 and 0 < y_min < y_max".into(),
        ));
    }
    let form = parse_form_spec(&a.form)?;
    let poly = poly_for(&a.poly, form.k)?;
    let weight = parse_weight_spec(&a.weight)?;
    let (_, table) = table_for(cfg, a.rep.as_deref(), a.bound)?;
    let ratio = a.y_max / a.y_min;
    let mut measured = Vec::new();
    for i in 0..a.points {
        let y = a.y_min * ratio.powf(i as f64 / (a.points - 1) as f64);
        let s = quad_shift_sum(&table, &form, &poly, a.alpha, y, &weight)?;
        let mag = s.norm();
        if mag > 0.0 {
            measured.push((y, mag));
        }
    }
    let rows: Vec<Vec<Value>> = measured
        .iter()
        .map(|&(y, mag)| vec![json!(y.ln()), json!(mag.ln())])
        .collect();
    let fmt = fmt.unwrap_or(OutputFormat::Dat);
    let text = if fmt == OutputFormat::Json {
        let fit = growth_fit(&measured).ok().map(|f| {
            json!({"intercept": f.intercept, "residual": f.residual, "slope": f.slope})
        });
        json_text(&json!({
            "fit": fit,
            "points": rows,
        }))
    } else {
        render_table(fmt, &["log_y", "log_abs_s"], &rows)
    };
    emit(&a.out, text)
}

fn cmd_lvalue(a: LvalueArgs, cfg: &RunConfig) -> Result<()> {
    let (rep, table) = table_for(cfg, a.rep.as_deref(), a.bound)?;
    let chi = dirichlet_char(a.q, a.index)?;
    let afe = AFEConfig {
        kernel_width: a.width,
        cutoff_multiplier: a.mult,
        ..AFEConfig::default()
    };
    let cv = central_value(&rep, &table, &chi, &afe)?;
    let record = [
        ("C", json!(cv.conductor)),
        ("epsilon", cjson(cv.epsilon)),
        ("residual", json!(cv.residual)),
        ("value_im", json!(cv.value.im)),
        ("value_re", json!(cv.value.re)),
    ];
    print!("{}", render_record(cfg.output_format, &record));
    Ok(())
}

fn cmd_mellin_check(a: MellinCheckArgs, cfg: &RunConfig, fmt: Option<OutputFormat>) -> Result<()> {
    let form = parse_form_spec(&a.form)?;
    let poly = poly_for(&a.poly, form.k)?;
    // The transform only reads coefficients up to the lattice cut.
    let (rep, table) = table_for(cfg, a.rep.as_deref(), Some(a.m_cut))?;
    let kappa = Complex64::new(a.kappa, 0.0);
    let nu = Complex64::new(a.nu_re, a.nu_im);
    let s_values = if a.s_values.is_empty() {
        vec![2.5, 3.0, 3.5]
    } else {
        a.s_values.clone()
    };
    let quad = QuadratureConfig::default();
    let mut rows = Vec::new();
    for s_re in s_values {
        let spec = MellinSpec {
            rep: rep.clone(),
            form: form.clone(),
            poly: poly.clone(),
            kappa,
            nu,
            s: Complex64::new(s_re, a.s_im),
        };
        let closed = constant_coeff_mellin_closed(&spec, &table, a.m_cut)?;
        let numeric = constant_coeff_mellin_numeric(&spec, &table, a.m_cut, &quad)?;
        let scale = closed.value.norm().max(f64::MIN_POSITIVE);
        let relerr = (closed.value - numeric.value).norm() / scale;
        rows.push(vec![
            json!(a.kappa),
            cjson(nu),
            json!(s_re),
            json!(a.s_im),
            cjson(closed.value),
            cjson(numeric.value),
            json!(relerr),
        ]);
    }
    let text = render_table(
        fmt.unwrap_or(OutputFormat::Csv),
        &["kappa", "nu", "s_re", "s_im", "closed", "numeric", "relerr"],
        &rows,
    );
    emit(&a.out, text)
}

fn cmd_mellin_dseries(a: MellinDseriesArgs, cfg: &RunConfig) -> Result<()> {
    let form = parse_form_spec(&a.form)?;
    let poly = poly_for(&a.poly, form.k)?;
    let (_, table) = table_for(cfg, a.rep.as_deref(), Some(a.m_cut))?;
    let s = Complex64::new(a.s_re, a.s_im);
    let d = dirichlet_series_d(&table, &form, &poly, s, a.m_cut)?;
    let record = [
        ("m_cut", json!(a.m_cut)),
        (
            "params",
            json!({
                "form": a.form,
                "poly": a.poly.clone().unwrap_or_else(|| "1".into()),
                "rep": table.name,
                "s": [a.s_re, a.s_im],
            }),
        ),
        ("tail_bound", json!(d.tail_bound)),
        ("value", cjson(d.value)),
    ];
    print!("{}", render_record(cfg.output_format, &record));
    Ok(())
}

fn cmd_amplify_moment(a: AmplifyMomentArgs, cfg: &RunConfig) -> Result<()> {
    let (_, table) = table_for(cfg, None, a.bound)?;
    let spec = AmplifierSpec {
        q: a.q,
        chi_index: a.index,
        big_l: a.l,
        big_y: a.y,
        w: Complex64::new(0.0, a.w_im),
        weight: parse_weight_spec(&a.weight)?,
    };
    let s = moment_s(&table, &spec)?;
    let lower = one_term_bound(&table, &spec)?;
    let record = [
        ("L", json!(a.l)),
        ("S", json!(s)),
        ("lower_bound", json!(lower)),
        ("q", json!(a.q)),
        ("ratio", json!(s / lower.max(f64::MIN_POSITIVE))),
    ];
    print!("{}", render_record(cfg.output_format, &record));
    Ok(())
}

/// Shared by the top-level `exponents` (bare e_final unless a format is
/// requested) and `amplify exponents` (full triple, table by default).
fn cmd_exponents(a: ExponentArgs, fmt: Option<OutputFormat>, bare: bool) -> Result<()> {
    let inp = ExponentInput {
        n: a.n,
        theta0: parse_real(&a.theta0)?,
        u: parse_real(&a.u)?,
        delta0: a.delta0,
    };
    let (e_diag, e_offdiag, e_final) = exponent_calculator(&inp)?;
    if bare && fmt.is_none() {
        println!("{e_final}");
        return Ok(());
    }
    let record = [
        ("e_diag", json!(e_diag)),
        ("e_final", json!(e_final)),
        ("e_offdiag", json!(e_offdiag)),
    ];
    let fmt = fmt.unwrap_or(if bare { OutputFormat::Json } else { OutputFormat::Dat });
    print!("{}", render_record(fmt, &record));
    Ok(())
}

fn cmd_amplify_balance(a: AmplifyBalanceArgs, fmt: Option<OutputFormat>) -> Result<()> {
    if a.points < 2 || !(a.u_max > 0.0) || a.u_max > 1.0 {
        return Err(Error::Precondition(
            "balance sweep needs points >= 2 and 0 < u_max <= 1".into(),
        ));
    }
    let theta0 = parse_ratio(&a.theta0)?;
    let theta0_f = *theta0.numer() as f64 / *theta0.denom() as f64;
    let mut rows = Vec::new();
    for i in 0..a.points {
        let u = a.u_max * i as f64 / (a.points - 1) as f64;
        let inp = ExponentInput {
            n: a.n,
            theta0: theta0_f,
            u,
            delta0: None,
        };
        let (e_diag, e_offdiag, e_final) = exponent_calculator(&inp)?;
        rows.push(vec![json!(u), json!(e_diag), json!(e_offdiag), json!(e_final)]);
    }
    let fmt = fmt.unwrap_or(OutputFormat::Csv);
    let text = if fmt == OutputFormat::Json {
        let report = balance_report(a.n, theta0)?;
        let ratio_f =
            |q: num_rational::Ratio<i128>| *q.numer() as f64 / *q.denom() as f64;
        json_text(&json!({
            "beats_convexity": report.beats_convexity,
            "e_final_at_star": ratio_f(report.e_final),
            "rows": rows,
            "u_star": ratio_f(report.u_star),
            "u_star_exact": [*report.u_star.numer() as i64, *report.u_star.denom() as i64],
        }))
    } else {
        render_table(fmt, &["u", "e_diag", "e_offdiag", "e_final"], &rows)
    };
    emit(&a.out, text)
}

fn cmd_selftest(a: SelftestArgs, fmt: Option<OutputFormat>, timing: bool) -> Result<()> {
    let ctx = match (a.delta_bound, a.sym2_bound, a.ones_bound) {
        (None, None, None) => SelftestContext::new()?,
        (d, s, o) => SelftestContext::with_bounds(
            d.unwrap_or(200_000),
            s.unwrap_or(2_000),
            o.unwrap_or(120_000),
        )?,
    };
    let mut indices = if a.criterion.is_empty() {
        (1..=CRITERION_COUNT).collect::<Vec<_>>()
    } else {
        a.criterion.clone()
    };
    indices.sort_unstable();
    indices.dedup();
    let mut reports = Vec::new();
    for &i in &indices {
        reports.push(run_criterion(&ctx, i)?);
    }
    let all_ok = reports.iter().all(|r| r.passed);
    match fmt.unwrap_or(OutputFormat::Dat) {
        OutputFormat::Json => {
            let objs: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "detail": r.detail,
                        "elapsed_ms": if timing { r.elapsed.as_secs_f64() * 1.0e3 } else { 0.0 },
                        "index": r.index,
                        "name": r.name,
                        "passed": r.passed,
                    })
                })
                .collect();
            print!("{}", json_text(&json!({"criteria": objs, "passed": all_ok})));
        }
        OutputFormat::Csv => {
            println!("index,name,passed,detail");
            for r in &reports {
                println!("{},{},{},\"{}\"", r.index, r.name, r.passed, r.detail);
            }
        }
        OutputFormat::Dat => {
            for r in &reports {
                println!("{}", r.line());
            }
        }
    }
    if all_ok {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{} of {} criteria failed",
            reports.iter().filter(|r| !r.passed).count(),
            reports.len()
        )))
    }
}
