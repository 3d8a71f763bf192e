//! Command line front end: bound computations, coefficient tables, series
//! and basis decompositions, the inequality verification suite, derivation
//! chains, and hypersurface expansion with residual-point sampling.
//!
//! Output is deterministic for a fixed request, seed and precision. All big
//! integers are printed as decimal strings in every format. Exit codes:
//! 0 success, 1 a verification check FAILED, 2 usage or input error,
//! 3 resource or precision exhaustion.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use penta_core::arith::ceil_rational;
use penta_core::bounds::{self, MTable};
use penta_core::geometry::sample::sample_penta_points;
use penta_core::geometry::{
    poly_from_records, Field, GeometryError, GradedExpansion, HomogeneousPoly, PrimeField,
    ProjectivePoint, Rationals, TermRecord,
};
use penta_core::multidegree::{MultiDegree, MultiDegreeError};
use penta_core::series;
use penta_core::verify::{self, CheckReport, CheckStatus, VerifyConfig};
use penta_core::{BigInt, BigRational};

const EXIT_OK: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

const DEFAULT_MAX_CHAIN: u64 = 100_000_000;
const DEFAULT_MAX_PRECISION: u32 = 4096;

#[derive(Parser)]
#[command(
    name = "penta",
    version,
    about = "Exact dimension bounds for unirationality constructions, with a \
             machine-checkable verification suite and hypersurface geometry demos"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Emit machine-readable JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Starting precision in bits for certified interval checks.
    #[arg(long, global = true, value_name = "BITS", default_value_t = 256)]
    precision: u32,
    /// Cap on materialized chain length; overrides PENTA_MAX_CHAIN.
    #[arg(long, global = true, value_name = "N")]
    max_chain: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integer ambient-dimension bound n(d) for one hypersurface degree.
    Nd {
        #[arg(value_name = "D")]
        degree: u32,
    },
    /// Largest useful linear-section dimension r(d) for one degree.
    R {
        #[arg(value_name = "D")]
        degree: u32,
    },
    /// Full bound report (r, chain length, exact and integer n) for a
    /// multi-degree such as "[2,3]".
    Bound {
        #[arg(value_name = "MULTIDEGREE")]
        multidegree: String,
    },
    /// The coefficient table m_{i,j} for 0 <= i <= imax, 0 <= j <= jmax.
    Mtable {
        #[arg(long, value_name = "I")]
        imax: usize,
        #[arg(long, value_name = "J")]
        jmax: usize,
    },
    /// Coefficients of the truncated generating series F_0..F_imax.
    Series {
        #[arg(long, value_name = "I")]
        imax: usize,
        #[arg(long, value_name = "N")]
        order: usize,
    },
    /// Decomposition of F_i over the (1-x)^-k basis (3 <= i <= 8).
    Decompose {
        #[arg(long, value_name = "I")]
        i: usize,
    },
    /// Run the inequality verification suite.
    Verify {
        /// Run every check at its default scope (the default action).
        #[arg(long, conflicts_with = "check")]
        all: bool,
        /// Run a single check by identifier.
        #[arg(long, value_name = "ID")]
        check: Option<String>,
        /// Override the scope of --check: comma-separated integers whose
        /// meaning depends on the check (see long help).
        #[arg(long, value_name = "N,..", value_delimiter = ',', requires = "check")]
        scope: Option<Vec<u64>>,
    },
    /// Expand a form at a point of its zero locus, report tangency data and
    /// optionally sample residual points over a prime field.
    Resmap {
        /// JSON file with a list of {exponents, coefficient} terms.
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
        /// Base point, e.g. "0,0,1"; must satisfy f = 0.
        #[arg(long, value_name = "Z")]
        point: String,
        /// Prime modulus; omit to work over the rationals.
        #[arg(long, value_name = "P")]
        field: Option<u64>,
        /// Sample up to N directions in the penultimate tangency locus and
        /// map each through the residual construction (needs --field).
        #[arg(long, value_name = "N")]
        samples: Option<usize>,
        /// Seed for the sampling random source.
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
    },
    /// The derivation chain of a multi-degree down to the empty one.
    Chain {
        #[arg(value_name = "MULTIDEGREE")]
        multidegree: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Plain,
    Json,
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn resource(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_RESOURCE,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((output, code)) => {
            let mut stdout = std::io::stdout().lock();
            let written = stdout
                .write_all(output.as_bytes())
                .and_then(|()| stdout.flush());
            match written {
                Ok(()) => ExitCode::from(code),
                // The reader hung up (for example `penta mtable ... | head`).
                // The computation finished, so keep its exit code.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::from(code),
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    ExitCode::from(EXIT_RESOURCE)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn env_u64(name: &str, default: u64) -> Result<u64, Failure> {
    match std::env::var(name) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{name} must be an integer, got {text:?}"))),
        Err(_) => Ok(default),
    }
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    let format = if cli.common.json {
        Format::Json
    } else if cli.common.csv {
        Format::Csv
    } else {
        Format::Plain
    };
    let max_chain = match cli.common.max_chain {
        Some(v) => v,
        None => env_u64("PENTA_MAX_CHAIN", DEFAULT_MAX_CHAIN)?,
    };
    let precision_cap = env_u64("PENTA_MAX_PRECISION", DEFAULT_MAX_PRECISION as u64)? as u32;
    if cli.common.precision == 0 || cli.common.precision > precision_cap {
        return Err(Failure::usage(format!(
            "--precision must be between 1 and the PENTA_MAX_PRECISION cap of {precision_cap}"
        )));
    }
    let verify_cfg = VerifyConfig {
        start_precision: cli.common.precision,
        max_precision: precision_cap,
        ..VerifyConfig::default()
    };

    match cli.command {
        Command::Nd { degree } => cmd_nd(degree, format),
        Command::R { degree } => cmd_r(degree, format),
        Command::Bound { multidegree } => cmd_bound(&multidegree, format),
        Command::Mtable { imax, jmax } => cmd_mtable(imax, jmax, format),
        Command::Series { imax, order } => cmd_series(imax, order, format),
        Command::Decompose { i } => cmd_decompose(i, format),
        Command::Verify { all, check, scope } => {
            cmd_verify(all, check.as_deref(), scope.as_deref(), &verify_cfg, format)
        }
        Command::Resmap {
            poly,
            point,
            field,
            samples,
            seed,
        } => cmd_resmap(&poly, &point, field, samples, seed, format),
        Command::Chain { multidegree } => cmd_chain(&multidegree, max_chain, format),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// Quote a CSV field when it contains a delimiter, quote or newline.
fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    format!("{}\n", quoted.join(","))
}

fn rational_string(x: &BigRational) -> String {
    bounds::format_rational(x)
}

// ---------------------------------------------------------------- nd and r

#[derive(Serialize)]
struct DegreeBoundOut {
    degree: u32,
    n: String,
    n_exact: String,
}

fn cmd_nd(degree: u32, format: Format) -> Result<(String, u8), Failure> {
    if degree == 0 {
        return Err(Failure::usage("the degree must be positive"));
    }
    let exact = bounds::n_of_degree(degree);
    let n = ceil_rational(&exact).to_string();
    let out = match format {
        Format::Plain => format!("{n}\n"),
        Format::Json => to_json(&DegreeBoundOut {
            degree,
            n: n.clone(),
            n_exact: rational_string(&exact),
        }),
        Format::Csv => {
            let mut s = csv_line(&["degree".into(), "n".into(), "n_exact".into()]);
            s.push_str(&csv_line(&[
                degree.to_string(),
                n.clone(),
                rational_string(&exact),
            ]));
            s
        }
    };
    Ok((out, EXIT_OK))
}

#[derive(Serialize)]
struct DegreeROut {
    degree: u32,
    r: String,
}

fn cmd_r(degree: u32, format: Format) -> Result<(String, u8), Failure> {
    if degree == 0 {
        return Err(Failure::usage("the degree must be positive"));
    }
    let r = bounds::r_of_degree(degree).to_string();
    let out = match format {
        Format::Plain => format!("{r}\n"),
        Format::Json => to_json(&DegreeROut {
            degree,
            r: r.clone(),
        }),
        Format::Csv => {
            let mut s = csv_line(&["degree".into(), "r".into()]);
            s.push_str(&csv_line(&[degree.to_string(), r.clone()]));
            s
        }
    };
    Ok((out, EXIT_OK))
}

// ------------------------------------------------------------------- bound

fn parse_multidegree(text: &str) -> Result<MultiDegree, Failure> {
    MultiDegree::from_str(text).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_bound(text: &str, format: Format) -> Result<(String, u8), Failure> {
    let md = parse_multidegree(text)?;
    if md.is_empty() {
        return Err(Failure::usage(
            "the multi-degree must have at least one entry",
        ));
    }
    let report = bounds::bound_report(&md);
    let out = match format {
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "multidegree = {}", report.multidegree);
            let _ = writeln!(s, "r = {}", report.r);
            let _ = writeln!(s, "chain_length = {}", report.chain_length);
            let _ = writeln!(s, "n_exact = {}", report.n_exact);
            let _ = writeln!(s, "n = {}", report.n);
            if let Some(v) = &report.n0_at_r {
                let _ = writeln!(s, "n0_at_r = {v}");
            }
            s
        }
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = csv_line(&[
                "multidegree".into(),
                "r".into(),
                "chain_length".into(),
                "n_exact".into(),
                "n".into(),
                "n0_at_r".into(),
            ]);
            s.push_str(&csv_line(&[
                report.multidegree.clone(),
                report.r.clone(),
                report.chain_length.clone(),
                report.n_exact.clone(),
                report.n.clone(),
                report.n0_at_r.clone().unwrap_or_default(),
            ]));
            s
        }
    };
    Ok((out, EXIT_OK))
}

// ------------------------------------------------------------------ mtable

#[derive(Serialize)]
struct MTableRowOut {
    i: usize,
    values: Vec<String>,
}

#[derive(Serialize)]
struct MTableOut {
    imax: usize,
    jmax: usize,
    rows: Vec<MTableRowOut>,
}

fn cmd_mtable(imax: usize, jmax: usize, format: Format) -> Result<(String, u8), Failure> {
    if imax > 20 || jmax > 10 {
        return Err(Failure::resource(
            "table scope too large: supported ranges are imax <= 20, jmax <= 10",
        ));
    }
    let table = MTable::new(imax, jmax);
    let rows: Vec<MTableRowOut> = (0..=imax)
        .map(|i| MTableRowOut {
            i,
            values: (0..=jmax).map(|j| table.entry(i, j).to_string()).collect(),
        })
        .collect();
    let out = match format {
        Format::Plain => {
            // Pad columns up to a sane width; wider entries (tens of
            // thousands of digits in high rows) print unpadded, and the
            // format machinery rejects widths above u16::MAX anyway.
            const PAD_LIMIT: usize = 1024;
            let mut widths: Vec<usize> = (0..=jmax).map(|j| format!("j={j}").len()).collect();
            for row in &rows {
                for (j, v) in row.values.iter().enumerate() {
                    widths[j] = widths[j].max(v.len().min(PAD_LIMIT));
                }
            }
            let iw = "i".len().max(imax.to_string().len());
            let mut s = format!("{:>iw$}", "i");
            for (j, w) in widths.iter().enumerate() {
                let _ = write!(s, "  {:>w$}", format!("j={j}"));
            }
            s.push('\n');
            for row in &rows {
                let _ = write!(s, "{:>iw$}", row.i);
                for (j, v) in row.values.iter().enumerate() {
                    let _ = write!(s, "  {:>w$}", v, w = widths[j]);
                }
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&MTableOut { imax, jmax, rows }),
        Format::Csv => {
            let mut header = vec!["i".to_string()];
            header.extend((0..=jmax).map(|j| format!("j={j}")));
            let mut s = csv_line(&header);
            for row in &rows {
                let mut fields = vec![row.i.to_string()];
                fields.extend(row.values.iter().cloned());
                s.push_str(&csv_line(&fields));
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

// ------------------------------------------------------------------ series

#[derive(Serialize)]
struct SeriesRowOut {
    i: usize,
    coefficients: Vec<String>,
}

#[derive(Serialize)]
struct SeriesOut {
    imax: usize,
    order: usize,
    m: Vec<String>,
    rows: Vec<SeriesRowOut>,
}

fn cmd_series(imax: usize, order: usize, format: Format) -> Result<(String, u8), Failure> {
    if order < imax + 2 {
        return Err(Failure::usage("--order must be at least imax + 2"));
    }
    if imax > 16 || order > 100 {
        return Err(Failure::resource(
            "series scope too large: supported ranges are imax <= 16, order <= 100",
        ));
    }
    let family = series::generate(imax, order);
    let rows: Vec<SeriesRowOut> = (0..=imax)
        .map(|i| SeriesRowOut {
            i,
            coefficients: family
                .series(i)
                .coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect(),
        })
        .collect();
    let m: Vec<String> = family.m_values().iter().map(|v| v.to_string()).collect();
    let out = match format {
        Format::Plain => {
            let mut s = format!("m = {}\n", m.join(" "));
            for row in &rows {
                let _ = writeln!(s, "F_{} = {}", row.i, row.coefficients.join(" "));
            }
            s
        }
        Format::Json => to_json(&SeriesOut {
            imax,
            order,
            m,
            rows,
        }),
        Format::Csv => {
            let mut header = vec!["i".to_string()];
            header.extend((0..=order).map(|n| format!("x^{n}")));
            let mut s = csv_line(&header);
            for row in &rows {
                let mut fields = vec![row.i.to_string()];
                fields.extend(row.coefficients.iter().cloned());
                s.push_str(&csv_line(&fields));
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

// --------------------------------------------------------------- decompose

#[derive(Serialize)]
struct DecomposeOut {
    i: usize,
    /// Weight of (1-x)^-k at position k-1.
    coefficients: Vec<String>,
    sum: String,
}

fn cmd_decompose(i: usize, format: Format) -> Result<(String, u8), Failure> {
    if !(3..=8).contains(&i) {
        return Err(Failure::usage("--i must be between 3 and 8"));
    }
    let decomp = series::basis_decomposition(i);
    let coefficients: Vec<String> = decomp.coeffs.iter().map(|c| c.to_string()).collect();
    let sum = decomp.coeff_sum().to_string();
    let out = match format {
        Format::Plain => {
            let mut s = format!("i = {i}\n");
            let _ = writeln!(s, "coefficients = {}", coefficients.join(" "));
            let _ = writeln!(s, "sum = {sum}");
            s
        }
        Format::Json => to_json(&DecomposeOut {
            i,
            coefficients,
            sum,
        }),
        Format::Csv => {
            let mut s = csv_line(&["i".into(), "k".into(), "coefficient".into()]);
            for (k0, c) in coefficients.iter().enumerate() {
                s.push_str(&csv_line(&[i.to_string(), (k0 + 1).to_string(), c.clone()]));
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

// ------------------------------------------------------------------ verify

#[derive(Serialize)]
struct VerifyOut {
    overall: String,
    reports: Vec<CheckReport>,
}

fn scoped_check(id: &str, scope: &[u64], cfg: &VerifyConfig) -> Result<Vec<CheckReport>, Failure> {
    fn want(scope: &[u64], n: usize, what: &str) -> Result<(), Failure> {
        if scope.len() != n {
            return Err(Failure::usage(format!(
                "--scope for this check takes {n} value(s): {what}"
            )));
        }
        Ok(())
    }
    fn bounded(v: u64, lo: u64, hi: u64, what: &str) -> Result<(), Failure> {
        if !(lo..=hi).contains(&v) {
            return Err(Failure::usage(format!(
                "{what} must be between {lo} and {hi}, got {v}"
            )));
        }
        Ok(())
    }
    let reports = match id {
        "bigger_r" => {
            want(scope, 3, "max parts, max entry, max top degree")?;
            bounded(scope[0], 1, 6, "max parts")?;
            bounded(scope[1], 1, 6, "max entry")?;
            bounded(scope[2], 1, 8, "max top degree")?;
            vec![verify::check_bigger_r(
                scope[0] as u32,
                scope[1],
                scope[2] as u32,
            )]
        }
        "mij_and_mu" => {
            want(scope, 1, "max degree")?;
            bounded(scope[0], 3, 10, "max degree")?;
            vec![verify::check_mij_and_mu(scope[0] as u32)]
        }
        "lower_bound" => {
            want(scope, 1, "max index")?;
            bounded(scope[0], 6, 16, "max index")?;
            vec![verify::check_lower_bound(scope[0] as usize)]
        }
        "bounds_mij" => {
            want(scope, 2, "max row index, max column index")?;
            bounded(scope[0], 8, 12, "max row index")?;
            bounded(scope[1], 2, 8, "max column index")?;
            vec![verify::check_bounds_mij(
                scope[0] as usize,
                scope[1] as usize,
                cfg,
            )]
        }
        "bounds_m_and_sum" => {
            want(scope, 1, "max index")?;
            bounded(scope[0], 8, 16, "max index")?;
            vec![verify::check_bounds_m_and_sum(scope[0] as usize, cfg)]
        }
        "stepwise_n" => {
            want(scope, 1, "degree")?;
            bounded(scope[0], 3, 16, "degree")?;
            vec![verify::check_stepwise_n(scope[0] as u32, cfg)]
        }
        "main_estimate" => {
            want(scope, 1, "max degree")?;
            bounded(scope[0], 10, 16, "max degree")?;
            vec![verify::check_main_estimate(scope[0] as u32)]
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown check {other:?}; valid identifiers: {}",
                verify::CHECK_IDS.join(", ")
            )))
        }
    };
    reports
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_verify(
    _all: bool,
    check: Option<&str>,
    scope: Option<&[u64]>,
    cfg: &VerifyConfig,
    format: Format,
) -> Result<(String, u8), Failure> {
    let reports = match (check, scope) {
        (None, _) => verify::run_all(cfg).map_err(|e| Failure::usage(e.to_string()))?,
        (Some(id), None) => {
            verify::run_check(id, cfg).map_err(|e| Failure::usage(e.to_string()))?
        }
        (Some(id), Some(scope)) => scoped_check(id, scope, cfg)?,
    };

    let mut code = EXIT_OK;
    let mut overall = CheckStatus::Verified;
    for report in &reports {
        if report.status == CheckStatus::Failed {
            overall = CheckStatus::Failed;
        } else if report.status == CheckStatus::Inconclusive && overall != CheckStatus::Failed {
            overall = CheckStatus::Inconclusive;
        }
    }
    if overall == CheckStatus::Failed {
        code = EXIT_CHECK_FAILED;
    } else if overall == CheckStatus::Inconclusive {
        code = EXIT_RESOURCE;
    }

    let out = match format {
        Format::Plain => {
            let mut s = String::new();
            for report in &reports {
                let _ = writeln!(
                    s,
                    "{} [{}] {} (precision {} bits)",
                    report.check_id,
                    report.scope,
                    report.status.as_str(),
                    report.precision_used
                );
                for witness in &report.witnesses {
                    let _ = writeln!(s, "    {witness}");
                }
            }
            let _ = writeln!(s, "overall: {}", overall.as_str());
            s
        }
        Format::Json => to_json(&VerifyOut {
            overall: overall.as_str().to_string(),
            reports,
        }),
        Format::Csv => {
            let mut s = csv_line(&[
                "check_id".into(),
                "scope".into(),
                "status".into(),
                "precision_bits".into(),
            ]);
            for report in &reports {
                s.push_str(&csv_line(&[
                    report.check_id.clone(),
                    report.scope.clone(),
                    report.status.as_str().to_string(),
                    report.precision_used.to_string(),
                ]));
            }
            s
        }
    };
    Ok((out, code))
}

// ------------------------------------------------------------------ resmap

#[derive(Serialize)]
struct PieceOut {
    degree: u32,
    rendered: String,
    terms: Vec<TermRecord>,
}

#[derive(Serialize)]
struct SampleOut {
    direction: Vec<String>,
    tangency_order: Option<u32>,
    line_on_hypersurface: bool,
    residual_chart: Option<Vec<String>>,
    residual_ambient: Option<Vec<String>>,
    on_hypersurface: Option<bool>,
}

#[derive(Serialize)]
struct ResmapOut {
    field: String,
    degree: u32,
    variables: usize,
    chart_variables: usize,
    change_matrix: Vec<Vec<String>>,
    pieces: Vec<PieceOut>,
    penultimate_equation_degrees: Vec<u32>,
    samples: Vec<SampleOut>,
}

fn geometry_failure(e: GeometryError) -> Failure {
    Failure::usage(e.to_string())
}

fn parse_point_texts(text: &str) -> Result<Vec<String>, Failure> {
    let inner = text
        .trim()
        .trim_start_matches(['[', '('])
        .trim_end_matches([']', ')']);
    let parts: Vec<String> = inner.split(',').map(|t| t.trim().to_string()).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Failure::usage(format!("cannot parse {text:?} as a point")));
    }
    Ok(parts)
}

/// Expansion plus rendered report pieces, shared between both coefficient
/// fields; sampling is added afterwards by the prime-field caller.
fn resmap_expand<F: Field>(
    field: &F,
    field_label: String,
    records: &[TermRecord],
    point_texts: &[String],
) -> Result<(HomogeneousPoly<F>, GradedExpansion<F>, ResmapOut), Failure> {
    let f = poly_from_records(field, records).map_err(geometry_failure)?;
    let coords = point_texts
        .iter()
        .map(|t| field.parse(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(geometry_failure)?;
    let z = ProjectivePoint::new(field, coords).map_err(geometry_failure)?;
    let exp = GradedExpansion::expand_at_point(field, &f, &z).map_err(geometry_failure)?;
    let penta = exp
        .tangency_locus_equations(exp.degree() - 1)
        .map_err(geometry_failure)?;
    let report = ResmapOut {
        field: field_label,
        degree: f.degree(),
        variables: f.nvars(),
        chart_variables: exp.chart_vars(),
        change_matrix: exp
            .change_matrix()
            .iter()
            .map(|row| row.iter().map(|c| field.render(c)).collect())
            .collect(),
        pieces: exp
            .pieces()
            .iter()
            .map(|p| PieceOut {
                degree: p.degree(),
                rendered: p.render(field, "y"),
                terms: penta_core::geometry::poly_to_records(field, p),
            })
            .collect(),
        penultimate_equation_degrees: penta.iter().map(|p| p.degree()).collect(),
        samples: Vec::new(),
    };
    Ok((f, exp, report))
}

fn cmd_resmap(
    poly_path: &PathBuf,
    point: &str,
    field: Option<u64>,
    samples: Option<usize>,
    seed: u64,
    format: Format,
) -> Result<(String, u8), Failure> {
    let raw = std::fs::read_to_string(poly_path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", poly_path.display())))?;
    let records: Vec<TermRecord> = serde_json::from_str(&raw)
        .map_err(|e| Failure::usage(format!("cannot parse {}: {e}", poly_path.display())))?;
    let point_texts = parse_point_texts(point)?;

    let report = match field {
        None => {
            if samples.is_some() {
                return Err(Failure::usage(
                    "--samples needs a finite field; pass --field P as well",
                ));
            }
            let field = Rationals;
            let (_, _, report) =
                resmap_expand(&field, "rationals".to_string(), &records, &point_texts)?;
            report
        }
        Some(p) => {
            let field = PrimeField::new(p).map_err(geometry_failure)?;
            let (f, exp, mut report) =
                resmap_expand(&field, format!("F_{p}"), &records, &point_texts)?;
            if let Some(budget) = samples {
                use rand_chacha::rand_core::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let found = sample_penta_points(&field, &exp, budget, &mut rng);
                for y in &found {
                    let order = exp.tangency_order(&field, y).map_err(geometry_failure)?;
                    let mut sample = SampleOut {
                        direction: y.coords().iter().map(|c| field.render(c)).collect(),
                        tangency_order: order,
                        line_on_hypersurface: order.is_none(),
                        residual_chart: None,
                        residual_ambient: None,
                        on_hypersurface: None,
                    };
                    match exp.residual_point(&field, y) {
                        Ok(res) => {
                            let ambient = exp
                                .apply_change(&field, res.coords())
                                .map_err(geometry_failure)?;
                            let value = f.eval(&field, &ambient).map_err(geometry_failure)?;
                            sample.residual_chart =
                                Some(res.coords().iter().map(|c| field.render(c)).collect());
                            sample.residual_ambient =
                                Some(ambient.iter().map(|c| field.render(c)).collect());
                            sample.on_hypersurface = Some(field.is_zero(&value));
                        }
                        Err(GeometryError::LineOnHypersurface) => {}
                        Err(e) => return Err(geometry_failure(e)),
                    }
                    report.samples.push(sample);
                }
            }
            report
        }
    };

    let out = match format {
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "field = {}", report.field);
            let _ = writeln!(s, "degree = {}", report.degree);
            let _ = writeln!(s, "variables = {}", report.variables);
            let _ = writeln!(s, "chart_variables = {}", report.chart_variables);
            let _ = writeln!(s, "change matrix:");
            for row in &report.change_matrix {
                let _ = writeln!(s, "    {}", row.join(" "));
            }
            for piece in &report.pieces {
                let _ = writeln!(s, "f_{} = {}", piece.degree, piece.rendered);
            }
            let degrees: Vec<String> = report
                .penultimate_equation_degrees
                .iter()
                .map(|d| d.to_string())
                .collect();
            let _ = writeln!(s, "penultimate equation degrees = ({})", degrees.join(","));
            for (idx, sample) in report.samples.iter().enumerate() {
                let _ = write!(
                    s,
                    "sample {idx}: direction ({})",
                    sample.direction.join(" : ")
                );
                match sample.tangency_order {
                    Some(o) => {
                        let _ = write!(s, " order {o}");
                    }
                    None => {
                        let _ = write!(s, " line inside the hypersurface");
                    }
                }
                if let (Some(chart), Some(ambient), Some(on)) = (
                    &sample.residual_chart,
                    &sample.residual_ambient,
                    sample.on_hypersurface,
                ) {
                    let _ = write!(
                        s,
                        " residual ({}) ambient ({}) on_hypersurface {on}",
                        chart.join(" : "),
                        ambient.join(" : ")
                    );
                }
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = csv_line(&[
                "sample".into(),
                "direction".into(),
                "tangency_order".into(),
                "residual_chart".into(),
                "residual_ambient".into(),
                "on_hypersurface".into(),
            ]);
            for (idx, sample) in report.samples.iter().enumerate() {
                s.push_str(&csv_line(&[
                    idx.to_string(),
                    sample.direction.join(" "),
                    sample
                        .tangency_order
                        .map(|o| o.to_string())
                        .unwrap_or_else(|| "inf".to_string()),
                    sample
                        .residual_chart
                        .as_ref()
                        .map(|v| v.join(" "))
                        .unwrap_or_default(),
                    sample
                        .residual_ambient
                        .as_ref()
                        .map(|v| v.join(" "))
                        .unwrap_or_default(),
                    sample
                        .on_hypersurface
                        .map(|b| b.to_string())
                        .unwrap_or_default(),
                ]));
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

// ------------------------------------------------------------------- chain

#[derive(Serialize)]
struct ChainOut {
    multidegree: String,
    length: usize,
    r: String,
    elements: Vec<String>,
}

fn cmd_chain(text: &str, max_chain: u64, format: Format) -> Result<(String, u8), Failure> {
    let md = parse_multidegree(text)?;
    let chain = md.chain(max_chain).map_err(|e| match e {
        MultiDegreeError::ChainTooLong { .. } | MultiDegreeError::TooLarge { .. } => {
            Failure::resource(e.to_string())
        }
        other => Failure::usage(other.to_string()),
    })?;
    let elements: Vec<String> = chain.iter().map(|m| m.to_string()).collect();
    let r = BigInt::from(elements.len() as i64) - BigInt::from(2);
    let report = ChainOut {
        multidegree: md.to_string(),
        length: elements.len(),
        r: r.to_string(),
        elements,
    };
    let out = match format {
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "multidegree = {}", report.multidegree);
            let _ = writeln!(s, "length = {}", report.length);
            let _ = writeln!(s, "r = {}", report.r);
            for (step, element) in report.elements.iter().enumerate() {
                let _ = writeln!(s, "{step}: {element}");
            }
            s
        }
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = csv_line(&["step".into(), "multidegree".into()]);
            for (step, element) in report.elements.iter().enumerate() {
                s.push_str(&csv_line(&[step.to_string(), element.clone()]));
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}
