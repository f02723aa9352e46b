//! Run configuration: which coefficient table to build, how far, and how
//! results are formatted. Parsed from simple `key=value` files and
//! overridable by command-line flags.

use std::path::Path;
use std::sync::Arc;

use num_rational::Rational64;

use crate::arith::{coeff_from_satake, delta_coefficients, sym_power_rep, CoeffTable, RepDescriptor};
use crate::error::{Error, Result};
use crate::quadforms::{QuadraticForm, SphericalPoly};
use crate::shifted::WeightFn;

/// Hard ceiling on coefficient-table sizes; above this the eta-product
/// convolutions and lattice scans stop being desk-scale.
pub const TABLE_BOUND_CEILING: usize = 1_000_000;

/// Which representation seeds the coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepName {
    /// Weight-12 seed; degree 2.
    Delta,
    /// Symmetric square of the seed; degree 3.
    Sym2,
    /// Symmetric cube of the seed; degree 4.
    Sym3,
    /// Divisor-series surrogate (all Satake parameters 1); degree 2,
    /// polar.
    FormalOnes,
}

impl RepName {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "delta" => RepName::Delta,
            "sym2" => RepName::Sym2,
            "sym3" => RepName::Sym3,
            "formal_ones" => RepName::FormalOnes,
            other => {
                return Err(Error::Precondition(format!(
                    "unknown representation '{other}' (expected delta, sym2, sym3, or formal_ones)"
                )))
            }
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RepName::Delta => "delta",
            RepName::Sym2 => "sym2",
            RepName::Sym3 => "sym3",
            RepName::FormalOnes => "formal_ones",
        }
    }
}

/// Output encoding for machine-readable subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Dat,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "json" => OutputFormat::Json,
            "csv" => OutputFormat::Csv,
            "dat" => OutputFormat::Dat,
            other => {
                return Err(Error::Precondition(format!(
                    "unknown output format '{other}' (expected json, csv, or dat)"
                )))
            }
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Dat => "dat",
        }
    }
}

/// Everything a batch invocation needs beyond its subcommand arguments.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub rep_name: RepName,
    pub table_bound: usize,
    pub output_format: OutputFormat,
    /// Reserved switch: all code paths are deterministic today, and this
    /// flag asserts that expectation for future concurrent sweeps.
    pub deterministic: bool,
    /// Relative tolerance handed to adaptive quadrature.
    pub rel_tol: f64,
    /// Absolute floor handed to adaptive quadrature.
    pub abs_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rep_name: RepName::Delta,
            table_bound: 200_000,
            output_format: OutputFormat::Json,
            deterministic: true,
            rel_tol: 1.0e-10,
            abs_tol: 1.0e-14,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.table_bound == 0 {
            return Err(Error::Precondition("table_bound must be positive".into()));
        }
        if self.table_bound > TABLE_BOUND_CEILING {
            return Err(Error::Resource(format!(
                "table_bound {} exceeds the ceiling {TABLE_BOUND_CEILING}",
                self.table_bound
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Precondition(format!(
                "rel_tol must be positive and finite, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Precondition(format!(
                "abs_tol must be positive and finite, got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }

    /// Build the configured representation descriptor and its
    /// coefficient table up to `table_bound`.
    pub fn build_table(&self) -> Result<(RepDescriptor, Arc<CoeffTable>)> {
        self.validate()?;
        match self.rep_name {
            RepName::Delta => {
                let table = Arc::new(delta_coefficients(self.table_bound)?);
                Ok((RepDescriptor::delta(table.clone()), table))
            }
            RepName::Sym2 | RepName::Sym3 => {
                let power = if self.rep_name == RepName::Sym2 { 2 } else { 3 };
                let seed = Arc::new(delta_coefficients(self.table_bound)?);
                let rep = sym_power_rep(&RepDescriptor::delta(seed), power)?;
                let table = Arc::new(coeff_from_satake(&rep, self.table_bound)?);
                Ok((rep, table))
            }
            RepName::FormalOnes => {
                let rep = RepDescriptor::formal_ones(2);
                let table = Arc::new(coeff_from_satake(&rep, self.table_bound)?);
                Ok((rep, table))
            }
        }
    }
}

/// Parse configuration text: one `key=value` per line, `#` starts a
/// comment, blank lines ignored, unknown keys rejected. Absent keys keep
/// their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected key=value, got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let reparse = |e: Error| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        };
        match key {
            "rep_name" => cfg.rep_name = RepName::parse(value).map_err(reparse)?,
            "table_bound" => {
                cfg.table_bound = value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("table_bound must be an unsigned integer, got '{value}'"),
                })?
            }
            "output_format" => cfg.output_format = OutputFormat::parse(value).map_err(reparse)?,
            "deterministic" => {
                cfg.deterministic = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("deterministic must be true/false, got '{value}'"),
                        })
                    }
                }
            }
            "rel_tol" => {
                cfg.rel_tol = value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("rel_tol must be a number, got '{value}'"),
                })?
            }
            "abs_tol" => {
                cfg.abs_tol = value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("abs_tol must be a number, got '{value}'"),
                })?
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown key '{other}'"),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Parse a weight specification: `compact:CENTER` or `gaussian:CENTER:WIDTH`.
pub fn parse_weight_spec(text: &str) -> Result<WeightFn> {
    let err = |msg: String| Error::Precondition(msg);
    let number = |field: &str, what: &str| -> Result<f64> {
        field
            .parse::<f64>()
            .map_err(|_| err(format!("weight {what} '{field}' is not a number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["compact", c] => WeightFn::compact(number(c, "center")?),
        ["gaussian", c, w] => WeightFn::gaussian(number(c, "center")?, number(w, "width")?),
        _ => Err(err(format!(
            "weight spec '{text}' is not compact:CENTER or gaussian:CENTER:WIDTH"
        ))),
    }
}

/// Parse a quadratic-form specification `K:UPPER`, where `UPPER` lists the
/// upper triangle of the (even integral) matrix `2A` row by row, separated by
/// commas. `2:2,0,2` is the sum of two squares; `1:2` is a single square.
pub fn parse_form_spec(text: &str) -> Result<QuadraticForm> {
    let (k_str, upper_str) = text.split_once(':').ok_or_else(|| {
        Error::Precondition(format!("form spec '{text}' is missing the K: prefix"))
    })?;
    let k: usize = k_str
        .parse()
        .map_err(|_| Error::Precondition(format!("form rank '{k_str}' is not an integer")))?;
    let upper = upper_str
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<i64>()
                .map_err(|_| Error::Precondition(format!("form entry '{f}' is not an integer")))
        })
        .collect::<Result<Vec<i64>>>()?;
    QuadraticForm::from_upper_two_a(k, &upper)
}

/// Parse a spherical-polynomial specification: terms `COEF:E1,...,EK` joined
/// by semicolons, with `COEF` a rational `NUM` or `NUM/DEN`. For example
/// `1:2,0;-1:0,2` is `x^2 - y^2` in two variables.
pub fn parse_poly_spec(text: &str, k: usize) -> Result<SphericalPoly> {
    let mut terms = Vec::new();
    for chunk in text.split(';') {
        let (coef_str, expo_str) = chunk.split_once(':').ok_or_else(|| {
            Error::Precondition(format!("polynomial term '{chunk}' is missing the COEF: prefix"))
        })?;
        let int = |f: &str| -> Result<i64> {
            f.trim()
                .parse::<i64>()
                .map_err(|_| Error::Precondition(format!("polynomial field '{f}' is not an integer")))
        };
        let coef = match coef_str.split_once('/') {
            Some((num, den)) => {
                let den = int(den)?;
                if den == 0 {
                    return Err(Error::Precondition(
                        "polynomial coefficient has denominator 0".into(),
                    ));
                }
                Rational64::new(int(num)?, den)
            }
            None => Rational64::from_integer(int(coef_str)?),
        };
        let expo = expo_str
            .split(',')
            .map(|f| int(f).map(|e| e as u32))
            .collect::<Result<Vec<u32>>>()?;
        terms.push((expo, coef));
    }
    SphericalPoly::new(k, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.rep_name, RepName::Delta);
        assert_eq!(cfg.table_bound, 200_000);
        assert_eq!(cfg.output_format, OutputFormat::Json);
        assert!(cfg.deterministic);
    }

    #[test]
    fn keys_comments_and_whitespace() {
        let cfg = parse_config(
            "# leading comment\n\nrep_name = sym2\n  table_bound=1000 # trailing\noutput_format=csv\ndeterministic=false\nrel_tol=1e-8\n",
        )
        .unwrap();
        assert_eq!(cfg.rep_name, RepName::Sym2);
        assert_eq!(cfg.table_bound, 1000);
        assert_eq!(cfg.output_format, OutputFormat::Csv);
        assert!(!cfg.deterministic);
        assert_eq!(cfg.rel_tol, 1.0e-8);
    }

    #[test]
    fn unknown_key_is_an_error_with_line_number() {
        let err = parse_config("rep_name=delta\nbogus=1\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("bogus"));
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn bad_value_reports_its_line() {
        let err = parse_config("table_bound=lots\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn ceiling_boundary_accepted_and_exceeded_rejected() {
        assert_eq!(
            parse_config("table_bound=1000000").unwrap().table_bound,
            TABLE_BOUND_CEILING
        );
        let err = parse_config("table_bound=10000000").unwrap_err();
        assert!(matches!(err, Error::Resource(_)), "got {err}");
    }

    #[test]
    fn build_table_respects_rep_choice() {
        let cfg = RunConfig {
            table_bound: 60,
            rep_name: RepName::Sym2,
            ..RunConfig::default()
        };
        let (rep, table) = cfg.build_table().unwrap();
        assert_eq!(rep.degree, 3);
        assert_eq!(table.bound, 60);
        // c(p²)-driven: sym² of the seed at 2 is c(2)² − c(2)/√2… spot
        // check against the seed identity c₂(p) = c(p)² − c(p²) ⋯ via
        // the degree-3 Hecke relation c₂(4) = c₂(2)² − c₂(2) + 1 − …;
        // here it is enough that the values are finite and nonzero.
        assert!(table.values[2].norm() > 0.0);

        let ones = RunConfig {
            table_bound: 10,
            rep_name: RepName::FormalOnes,
            ..RunConfig::default()
        };
        let (rep1, t1) = ones.build_table().unwrap();
        assert!(rep1.polar);
        assert_eq!(t1.values[6].re, 4.0); // d(6)
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_config(Path::new("/nonexistent/cfg.txt")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn weight_specs_parse() {
        let w = parse_weight_spec("compact:1.5").unwrap();
        let (lo, hi) = w.support();
        assert_eq!((lo, hi), (0.75, 3.0));
        let g = parse_weight_spec("gaussian:1.0:0.25").unwrap();
        assert!(g.effective(1.0) > 0.9);
        for bad in ["triangle:1", "compact:abc", "gaussian:1.0", "compact:1:2:3"] {
            assert!(parse_weight_spec(bad).is_err(), "accepted {bad}");
        }
    }

    #[test]
    fn form_and_poly_specs_parse() {
        let form = parse_form_spec("2:2,0,2").unwrap();
        assert_eq!(form.value(&[3, 4]), 25);
        let square = parse_form_spec("1:2").unwrap();
        assert_eq!(square.value(&[7]), 49);
        assert!(parse_form_spec("2:2,0").is_err()); // short triangle
        assert!(parse_form_spec("nope").is_err());

        let p = parse_poly_spec("1:2,0;-1:0,2", 2).unwrap();
        assert_eq!(p.eval(&[3, 2]), Rational64::from_integer(5));
        let half = parse_poly_spec("1/2:1", 1).unwrap();
        assert_eq!(half.eval(&[4]), Rational64::from_integer(2));
        assert!(parse_poly_spec("1:2", 2).is_err()); // exponent arity
        assert!(parse_poly_spec("1/0:1", 1).is_err());
    }
}
