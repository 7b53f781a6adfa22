//! Command-line front end.
//!
//! ```text
//! replica constant <pi|gamma14|gamma13|gamma23|gamma34|custom> [--w p/q]
//! replica ellipse <a> <b> [--normalized] [--verify]
//! replica verify <pi|...|custom|ellipse> [a b] [--example]
//! replica orders
//! ```
//!
//! Every command accepts `--digits N --algorithm {quad|cubic|quartic|auto}
//! [--w p/q] [--json] [--trace] [--plain]`.

use std::env;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    measure_orders, pi, postprocess_constant, run_borwein, run_ellipse, AlgorithmKind, ConstantId, RunResult,
};
use crate::error::{Error, Result};
use crate::precision::{make_context, nth_root, PrecisionContext, Real};
use crate::series::ellipse_argument;
use crate::verify::{check_discrepancy_case, cubic_half_discrepancy, verify_ellipse, verify_limit, EllipseReference};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

pub const MAX_DIGITS_VAR: &str = "REPLICA_MAX_DIGITS";
pub const DEFAULT_MAX_DIGITS: u64 = 1_000_000;

/// Smallest target actually computed; shorter requests are truncated from it.
pub const MIN_RUN_DIGITS: u64 = 10;

/// Minimum target for the `orders` command.
pub const ORDERS_MIN_DIGITS: u64 = 100;

const GROUP: usize = 10;
const GROUPS_PER_LINE: usize = 5;
const TRUNCATION_MARKER: &str = "...";

#[derive(Debug, Parser)]
#[command(
    name = "replica",
    version,
    about = "Self-replicating Borwein-type iterations for pi, Gamma values and ellipse perimeters"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute pi, a Gamma value, or the raw limit for a custom w.
    Constant {
        /// pi, gamma14, gamma13, gamma23, gamma34 or custom
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Perimeter of the ellipse with semi-axes a >= b > 0.
    Ellipse {
        #[arg(allow_hyphen_values = true)]
        semi_major: String,
        #[arg(allow_hyphen_values = true)]
        semi_minor: String,
        /// Print P(a, b) / (2 pi b^2 / a) instead of the perimeter.
        #[arg(long)]
        normalized: bool,
        /// Also check the result against an independent computation.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Compare an iteration limit with its series oracle.
    Verify {
        /// a constant id, custom, or ellipse followed by the two semi-axes
        target: String,
        axes: Vec<String>,
        /// For cubic w = 1/2: measure the ratio to (2/(sqrt(3) Gamma(1/3)))^(3/2).
        #[arg(long)]
        example: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Per-iteration error exponents and measured convergence orders.
    Orders {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgorithmChoice {
    Quad,
    Cubic,
    Quartic,
    Auto,
}

impl AlgorithmChoice {
    fn resolve(self, auto: AlgorithmKind) -> AlgorithmKind {
        match self {
            Self::Quad => AlgorithmKind::Quadratic,
            Self::Cubic => AlgorithmKind::Cubic,
            Self::Quartic => AlgorithmKind::Quartic,
            Self::Auto => auto,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Number of significant decimal digits.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    digits: u64,
    #[arg(long, value_enum, default_value_t = AlgorithmChoice::Auto)]
    algorithm: AlgorithmChoice,
    /// Free parameter as p/q.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Emit a JSON report.
    #[arg(long)]
    json: bool,
    /// Include per-iteration deltas in text output.
    #[arg(long)]
    trace: bool,
    /// Print digits without grouping.
    #[arg(long)]
    plain: bool,
}

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(code: i32, message: impl std::fmt::Display) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// JSON report shared by all commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    pub algorithm: String,
    pub w: String,
    pub target_digits: u64,
    pub working_digits: u64,
    pub result: String,
    pub iterations: Vec<IterationRecord>,
    pub orders: Vec<f64>,
    pub oracle_digits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eccentricity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: usize,
    pub delta_exp: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub agree: bool,
    pub digits: u64,
    pub reference: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<DiscrepancyRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRecord {
    pub measured_ratio: String,
    pub expected_ratio: String,
    pub ratio_digits: u64,
    pub formula_digits: u64,
    pub example_digits: u64,
    pub supports: String,
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::failure(exit_code(&e), e),
    }
}

/// Exit status for a library error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::NonConvergence { .. } | Error::Divergence(_) | Error::PrecisionInsufficient(_) => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

/// Parses `p/q` or an integer.
pub fn parse_w(text: &str) -> Result<Rational64> {
    Rational64::from_str(text.trim()).map_err(|_| Error::Parse(text.to_string()))
}

fn format_w(w: Rational64) -> String {
    w.to_string()
}

/// Upper bound on `--digits`, from the environment.
pub fn max_digits() -> Result<u64> {
    match env::var(MAX_DIGITS_VAR) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{MAX_DIGITS_VAR}={text}"))),
        Err(_) => Ok(DEFAULT_MAX_DIGITS),
    }
}

fn run_context(digits: u64, kind: AlgorithmKind) -> Result<PrecisionContext> {
    make_context(digits.max(MIN_RUN_DIGITS), kind.order())
}

fn check_digits(digits: u64) -> Result<()> {
    let cap = max_digits()?;
    if digits > cap {
        return Err(Error::UnsupportedParameter(format!(
            "{digits} digits exceeds the limit of {cap} ({MAX_DIGITS_VAR})"
        )));
    }
    Ok(())
}

/// Truncated decimal rendering with exactly `digits` significant digits.
///
/// Fraction digits are grouped by ten, fifty per line, unless `plain`.
pub fn format_value(value: &Real, digits: u64, plain: bool) -> String {
    let d = value.to_digits(digits as usize);
    let sign = if d.negative { "-" } else { "" };
    let (int_part, frac) = if d.exponent >= 0 {
        let int_len = d.exponent as usize + 1;
        if int_len >= d.digits.len() {
            (
                format!("{}{}", d.digits, "0".repeat(int_len - d.digits.len())),
                String::new(),
            )
        } else {
            (d.digits[..int_len].to_string(), d.digits[int_len..].to_string())
        }
    } else {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-d.exponent - 1) as usize), d.digits),
        )
    };
    let head = format!("{sign}{int_part}");
    if frac.is_empty() {
        return head;
    }
    if plain {
        return format!("{head}.{frac}");
    }
    let indent = " ".repeat(head.len() + 1);
    let groups: Vec<&str> = frac
        .as_bytes()
        .chunks(GROUP)
        .map(|c| std::str::from_utf8(c).unwrap())
        .collect();
    let lines: Vec<String> = groups.chunks(GROUPS_PER_LINE).map(|line| line.join(" ")).collect();
    format!("{head}.{}", lines.join(&format!("\n{indent}")))
}

fn text_value(value: &Real, digits: u64, plain: bool) -> String {
    let mut text = format_value(value, digits, plain);
    if !plain {
        text.push_str(TRUNCATION_MARKER);
    }
    text
}

fn iteration_records(run: &RunResult) -> Vec<IterationRecord> {
    run.trace
        .iter()
        .map(|s| IterationRecord {
            n: s.n,
            delta_exp: s.delta_exp(),
        })
        .collect()
}

fn trace_lines(run: &RunResult) -> String {
    let mut out = String::new();
    for state in &run.trace {
        match state.delta_exp() {
            Some(e) => writeln!(out, "# n={} delta_exp={e}", state.n).unwrap(),
            None => writeln!(out, "# n={} delta_exp=-", state.n).unwrap(),
        }
    }
    out
}

fn base_report(command: &str, run: &RunResult, ctx: &PrecisionContext, digits: u64, result: &Real) -> Report {
    Report {
        command: command.to_string(),
        constant: None,
        algorithm: run.kind.name().to_string(),
        w: format_w(run.w),
        target_digits: digits,
        working_digits: ctx.working_digits(),
        result: format_value(result, digits, true),
        iterations: iteration_records(run),
        orders: run.orders.iter().map(|o| o.order).collect(),
        oracle_digits: run.oracle_digits,
        eccentricity: None,
        verification: None,
    }
}

fn json_outcome(report: &Report, code: i32) -> Outcome {
    let mut stdout = serde_json::to_string_pretty(report).expect("report serializes");
    stdout.push('\n');
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Constant { id, common } => cmd_constant(&id, &common),
        Command::Ellipse {
            semi_major,
            semi_minor,
            normalized,
            verify,
            common,
        } => cmd_ellipse(&semi_major, &semi_minor, normalized, verify, &common),
        Command::Verify {
            target,
            axes,
            example,
            common,
        } => cmd_verify(&target, &axes, example, &common),
        Command::Orders { common } => cmd_orders(&common),
    }
}

/// A named constant or a custom `w`.
enum Target {
    Named(ConstantId),
    Custom(Rational64),
}

impl Target {
    fn parse(id: &str, w: Option<&str>) -> Result<Self> {
        let w = w.map(parse_w).transpose()?;
        if id == "custom" {
            return w
                .map(Self::Custom)
                .ok_or_else(|| Error::UnsupportedParameter("custom requires --w p/q".into()));
        }
        let constant = ConstantId::from_str(id)?;
        match w {
            Some(w) if w != constant.parameter() => Err(Error::UnsupportedParameter(format!(
                "{constant} uses w = {}, not {w}",
                format_w(constant.parameter())
            ))),
            _ => Ok(Self::Named(constant)),
        }
    }

    fn kind(&self, choice: AlgorithmChoice) -> Result<AlgorithmKind> {
        match self {
            Self::Named(id) => {
                let kind = choice.resolve(id.default_kind());
                if !id.supports(kind) {
                    return Err(Error::UnsupportedParameter(format!(
                        "{id} cannot be computed with the {kind} family"
                    )));
                }
                Ok(kind)
            }
            Self::Custom(_) => Ok(choice.resolve(AlgorithmKind::Quartic)),
        }
    }

    fn w(&self) -> Rational64 {
        match self {
            Self::Named(id) => id.parameter(),
            Self::Custom(w) => *w,
        }
    }

    fn label(&self) -> String {
        match self {
            Self::Named(id) => id.name().to_string(),
            Self::Custom(_) => "custom".to_string(),
        }
    }
}

fn with_orders(mut run: RunResult) -> RunResult {
    if run.orders.is_empty() {
        run.orders = measure_orders(&run.trace, &run.value).unwrap_or_default();
    }
    run
}

fn cmd_constant(id: &str, common: &Common) -> Result<Outcome> {
    check_digits(common.digits)?;
    let target = Target::parse(id, common.w.as_deref())?;
    let kind = target.kind(common.algorithm)?;
    let ctx = run_context(common.digits, kind)?;
    let run = with_orders(run_borwein(kind, target.w(), &ctx)?);
    let value = match &target {
        Target::Named(id) => postprocess_constant(*id, &run.value, &ctx)?,
        Target::Custom(_) => run.value.clone(),
    };
    if common.json {
        let mut report = base_report("constant", &run, &ctx, common.digits, &value);
        report.constant = Some(target.label());
        return Ok(json_outcome(&report, EXIT_OK));
    }
    let mut stdout = if common.trace { trace_lines(&run) } else { String::new() };
    writeln!(stdout, "{}", text_value(&value, common.digits, common.plain)).unwrap();
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    })
}

fn eccentricity(semi_major: &Real, semi_minor: &Real, ctx: &PrecisionContext) -> Result<Real> {
    nth_root(&ellipse_argument(semi_major, semi_minor, ctx)?, 2)
}

fn perimeter_from_factor(factor: &Real, semi_major: &Real, semi_minor: &Real, ctx: &PrecisionContext) -> Result<Real> {
    Ok((pi(ctx)? * semi_minor * semi_minor / semi_major * factor).mul_pow2(1))
}

fn reference_label(reference: &EllipseReference) -> String {
    match reference {
        EllipseReference::Series => "series".to_string(),
        EllipseReference::OtherIteration(kind) => format!("{} iteration", kind.name()),
    }
}

fn cmd_ellipse(a: &str, b: &str, normalized: bool, verify: bool, common: &Common) -> Result<Outcome> {
    check_digits(common.digits)?;
    if common.w.is_some() {
        return Err(Error::UnsupportedParameter(
            "ellipse runs use w = 0; --w is not accepted".into(),
        ));
    }
    let kind = common.algorithm.resolve(AlgorithmKind::Quartic);
    let ctx = run_context(common.digits, kind)?;
    let semi_major = ctx.parse(a)?;
    let semi_minor = ctx.parse(b)?;
    let ecc = eccentricity(&semi_major, &semi_minor, &ctx)?;

    let mut stderr = String::new();
    let (run, verification) = if verify {
        let check = verify_ellipse(kind, &semi_major, &semi_minor, &ctx)?;
        if check.reference != EllipseReference::Series {
            writeln!(
                stderr,
                "warning: 1 - b^2/a^2 > 0.99, the series oracle is too slow; comparing with the {} instead",
                reference_label(&check.reference)
            )
            .unwrap();
        }
        let record = VerificationRecord {
            agree: check.agreement.reaches(common.digits),
            digits: check.agreement.digits,
            reference: reference_label(&check.reference),
            discrepancy: None,
        };
        (check.run, Some(record))
    } else {
        (run_ellipse(kind, &semi_major, &semi_minor, &ctx)?, None)
    };
    let run = with_orders(run);
    let value = if normalized {
        run.value.clone()
    } else {
        perimeter_from_factor(&run.value, &semi_major, &semi_minor, &ctx)?
    };
    let code = match &verification {
        Some(v) if !v.agree => EXIT_VERIFICATION,
        _ => EXIT_OK,
    };

    if common.json {
        let mut report = base_report("ellipse", &run, &ctx, common.digits, &value);
        report.eccentricity = Some(format_value(&ecc, common.digits, true));
        report.verification = verification;
        let mut outcome = json_outcome(&report, code);
        outcome.stderr = stderr;
        return Ok(outcome);
    }
    let mut stdout = if common.trace { trace_lines(&run) } else { String::new() };
    writeln!(stdout, "{}", text_value(&value, common.digits, common.plain)).unwrap();
    if let Some(v) = &verification {
        writeln!(
            stdout,
            "{}",
            agreement_line(v.agree, v.digits, common.digits, &v.reference)
        )
        .unwrap();
    }
    Ok(Outcome { code, stdout, stderr })
}

fn agreement_line(agree: bool, measured: u64, target: u64, reference: &str) -> String {
    if agree {
        format!("agree: ≥{target} digits ({measured} measured against the {reference})")
    } else {
        format!("disagree: {measured} of {target} digits against the {reference}")
    }
}

fn cmd_verify(target: &str, axes: &[String], example: bool, common: &Common) -> Result<Outcome> {
    check_digits(common.digits)?;
    if target == "ellipse" {
        let [a, b] = axes else {
            return Err(Error::UnsupportedParameter("verify ellipse needs two semi-axes".into()));
        };
        if example {
            return Err(Error::UnsupportedParameter(
                "--example applies to cubic w = 1/2 only".into(),
            ));
        }
        return cmd_ellipse(a, b, true, true, common);
    }
    if !axes.is_empty() {
        return Err(Error::UnsupportedParameter(format!(
            "unexpected arguments after `{target}`"
        )));
    }
    let parsed = Target::parse(target, common.w.as_deref())?;
    let kind = parsed.kind(common.algorithm)?;
    let w = parsed.w();
    if example {
        check_discrepancy_case(kind, w)?;
    }
    let ctx = run_context(common.digits, kind)?;
    let (run, agreement) = verify_limit(kind, w, &ctx)?;
    let run = with_orders(run);
    let agree = agreement.reaches(common.digits);
    let mut record = VerificationRecord {
        agree,
        digits: agreement.digits,
        reference: "series".to_string(),
        discrepancy: None,
    };

    let mut details = String::new();
    if example {
        let report = cubic_half_discrepancy(&ctx)?;
        let shown = common.digits.min(20);
        writeln!(details, "limit vs general formula: {} digits", report.formula_digits).unwrap();
        writeln!(
            details,
            "limit vs (2/(sqrt(3) Gamma(1/3)))^(3/2): {} digits",
            report.example_digits
        )
        .unwrap();
        writeln!(
            details,
            "measured ratio: {}",
            format_value(&report.measured_ratio, shown, true)
        )
        .unwrap();
        writeln!(
            details,
            "3^(3/4) 2^(-4/3): {} ({} digits agree)",
            format_value(&report.expected_ratio, shown, true),
            report.ratio_digits
        )
        .unwrap();
        writeln!(details, "oracle supports: {}", report.supports.describe()).unwrap();
        record.discrepancy = Some(DiscrepancyRecord {
            measured_ratio: format_value(&report.measured_ratio, common.digits, true),
            expected_ratio: format_value(&report.expected_ratio, common.digits, true),
            ratio_digits: report.ratio_digits,
            formula_digits: report.formula_digits,
            example_digits: report.example_digits,
            supports: report.supports.describe().to_string(),
        });
    }
    let code = if agree { EXIT_OK } else { EXIT_VERIFICATION };

    if common.json {
        let mut report = base_report("verify", &run, &ctx, common.digits, &run.value);
        report.constant = Some(parsed.label());
        report.verification = Some(record);
        return Ok(json_outcome(&report, code));
    }
    let mut stdout = if common.trace { trace_lines(&run) } else { String::new() };
    writeln!(
        stdout,
        "{}",
        agreement_line(agree, agreement.digits, common.digits, "series")
    )
    .unwrap();
    stdout.push_str(&details);
    Ok(Outcome {
        code,
        stdout,
        stderr: String::new(),
    })
}

fn cmd_orders(common: &Common) -> Result<Outcome> {
    check_digits(common.digits)?;
    if common.digits < ORDERS_MIN_DIGITS {
        return Err(Error::UnsupportedParameter(format!(
            "orders needs at least {ORDERS_MIN_DIGITS} digits"
        )));
    }
    let kind = common.algorithm.resolve(AlgorithmKind::Quartic);
    let w = common
        .w
        .as_deref()
        .map(parse_w)
        .transpose()?
        .unwrap_or_else(|| Rational64::from(1));
    let ctx = run_context(common.digits, kind)?;
    let run = with_orders(run_borwein(kind, w, &ctx)?);

    if common.json {
        return Ok(json_outcome(
            &base_report("orders", &run, &ctx, common.digits, &run.value),
            EXIT_OK,
        ));
    }
    let mut stdout = String::new();
    writeln!(
        stdout,
        "algorithm {}  w {}  target {} digits  working {} digits",
        kind.name(),
        format_w(w),
        ctx.target_digits(),
        ctx.working_digits()
    )
    .unwrap();
    writeln!(stdout, "{:>4}  {:>14}  {:>8}", "n", "log10|error|", "order").unwrap();
    for state in &run.trace {
        let error = &state.a - &run.value;
        let error = if error.is_zero() {
            "-".to_string()
        } else {
            format!("{:.2}", error.log10_abs())
        };
        let order = run
            .orders
            .iter()
            .find(|o| o.n == state.n)
            .map_or_else(|| "-".to_string(), |o| format!("{:.4}", o.order));
        writeln!(stdout, "{:>4}  {:>14}  {:>8}", state.n, error, order).unwrap();
    }
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        make_context(60, 4).unwrap()
    }

    #[test]
    fn grouping_layout() {
        let value = ctx()
            .parse("3.14159265358979323846264338327950288419716939937510582097494459")
            .unwrap();
        assert_eq!(format_value(&value, 1, false), "3");
        assert_eq!(format_value(&value, 12, false), "3.1415926535 8");
        let long = format_value(&value, 61, false);
        let lines: Vec<&str> = long.lines().collect();
        assert_eq!(lines[0], "3.1415926535 8979323846 2643383279 5028841971 6939937510");
        assert_eq!(lines[1], "  5820974944");
        assert_eq!(format_value(&value, 12, true), "3.14159265358");
    }

    #[test]
    fn small_and_large_values() {
        let c = ctx();
        assert_eq!(format_value(&c.parse("0.000123456").unwrap(), 4, true), "0.0001234");
        assert_eq!(format_value(&c.parse("-12345.678").unwrap(), 7, true), "-12345.67");
        assert_eq!(format_value(&c.parse("4000").unwrap(), 2, true), "4000");
    }

    #[test]
    fn truncates_instead_of_rounding() {
        let value = ctx().parse("2.71828").unwrap();
        assert_eq!(format_value(&value, 4, true), "2.718");
    }

    #[test]
    fn parses_w() {
        assert_eq!(parse_w("1/3").unwrap(), Rational64::new(1, 3));
        assert_eq!(parse_w("3").unwrap(), Rational64::from(3));
        assert!(parse_w("x").is_err());
        assert!(parse_w("1/0").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::NonConvergence { trace: Vec::new() }),
            EXIT_NONCONVERGENCE
        );
        assert_eq!(exit_code(&Error::UnknownConstant("e".into())), EXIT_USAGE);
        assert_eq!(run(["replica", "constant", "pi", "--digits", "0"]).code, EXIT_USAGE);
        assert_eq!(run(["replica", "constant", "e"]).code, EXIT_USAGE);
        assert_eq!(
            run(["replica", "constant", "gamma13", "--algorithm", "quad"]).code,
            EXIT_USAGE
        );
        assert_eq!(run(["replica", "orders", "--digits", "50"]).code, EXIT_USAGE);
    }

    #[test]
    fn json_round_trip() {
        let out = run(["replica", "constant", "gamma14", "--digits", "30", "--json"]);
        assert_eq!(out.code, EXIT_OK);
        let report: Report = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(report.constant.as_deref(), Some("gamma14"));
        assert_eq!(report.w, "1/3");
        let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
        assert_eq!(again, out.stdout);
    }
}
