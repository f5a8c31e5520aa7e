//! `hardy-cesaro` command line: `verify`, `spectrum` and `norms`.

use std::f64::consts::LN_2;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::norms::{
    cesaro_ratio, h1_counterexample_report, optimize_beta_bound, ratio_test_family, ExponentP,
    H1Report,
};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{
    build_compression, circle_distance, compression_eigs, compression_norm, section_norm, PointGrid,
};
use crate::verify::{run_suite, SuiteConfig, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

const DEFAULT_VERIFY_GRID: &str = "log:0.1:10:5";
const DEFAULT_SPECTRUM_GRID: &str = "log:0.0001:10000:40";
const H1_RADII: [f64; 4] = [10.0, 100.0, 1e3, 1e4];

#[derive(Debug, Parser)]
#[command(
    name = "hardy-cesaro",
    version,
    about = "Cesàro operator on H² of the upper half-plane"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite and write a report.
    Verify {
        /// Tolerance for every quadrature-backed check.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Points s for the pairwise checks, as KIND:LO:HI:N.
        #[arg(long, default_value = DEFAULT_VERIFY_GRID)]
        grid: PointGrid,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Eigenvalues and norm of the compression of C onto kernels at the grid points.
    Spectrum {
        #[arg(long, default_value = DEFAULT_SPECTRUM_GRID)]
        grid: PointGrid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal beta bounds on ‖C‖_p and observed ratios ‖Cf‖_p/‖f‖_p.
    Norms {
        #[arg(long = "p", value_delimiter = ',', default_value = "1.25,1.5,2,3,10")]
        p: Vec<f64>,
        /// Append the growth table showing C is unbounded on H¹.
        #[arg(long)]
        h1_demo: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Verify {
            tol,
            seed,
            grid,
            out,
            format,
        } => cmd_verify(tol, seed, grid, format).map(|o| (o, out)),
        Command::Spectrum { grid, out } => cmd_spectrum(grid).map(|o| (o, out)),
        Command::Norms { p, h1_demo, out } => cmd_norms(&p, h1_demo).map(|o| (o, out)),
    };
    let (output, out) = match outcome {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &out {
        Some(path) => fs::write(path, &output.body).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout
            .write_all(output.body.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_IO;
    }
    for line in &output.failures {
        let _ = writeln!(stderr, "FAILED {line}");
    }
    if output.failures.is_empty() {
        EXIT_OK
    } else {
        let _ = writeln!(stderr, "{} check(s) failed", output.failures.len());
        EXIT_CHECK_FAILED
    }
}

struct Output {
    body: String,
    failures: Vec<String>,
}

/// 17 significant digits, independent of locale.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_block<S: AsRef<[u8]>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

fn config_comment<T: Serialize>(config: &T) -> String {
    format!(
        "# config: {}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

#[derive(Serialize)]
struct VerifyRun<'a> {
    command: &'static str,
    format: Format,
    #[serde(flatten)]
    suite: &'a SuiteConfig,
}

#[derive(Serialize)]
struct VerifyDocument<'a> {
    config: VerifyRun<'a>,
    checks: &'a [crate::verify::IdentityCheck],
    summary: &'a crate::verify::Summary,
}

fn cmd_verify(
    tol: Option<f64>,
    seed: u64,
    grid: PointGrid,
    format: Format,
) -> Result<Output, Error> {
    let config = SuiteConfig {
        seed,
        grid,
        quadrature_tol: tol,
        ..SuiteConfig::default()
    };
    let report = run_suite(&config)?;
    let run = VerifyRun {
        command: "verify",
        format,
        suite: &report.config,
    };
    let body = match format {
        Format::Json => {
            let doc = VerifyDocument {
                config: run,
                checks: &report.checks,
                summary: &report.summary,
            };
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
        Format::Csv => verify_csv(&run, &report),
    };
    let failures = report
        .failures()
        .map(|c| {
            format!(
                "{} {} residual={:e} tol={:e}",
                c.name, c.inputs, c.residual, c.tol
            )
        })
        .collect();
    Ok(Output { body, failures })
}

fn verify_csv(run: &VerifyRun<'_>, report: &VerificationReport) -> String {
    let header = [
        "name",
        "paper_anchor",
        "lane",
        "inputs",
        "lhs_re",
        "lhs_im",
        "rhs_re",
        "rhs_im",
        "residual",
        "tol",
        "passed",
        "error",
    ];
    let rows = report.checks.iter().map(|c| {
        vec![
            c.name.clone(),
            c.identity.clone(),
            serde_json::to_value(c.lane)
                .expect("lane serializes")
                .as_str()
                .unwrap_or("")
                .to_string(),
            c.inputs.to_string(),
            num(c.lhs.re()),
            num(c.lhs.im()),
            num(c.rhs.re()),
            num(c.rhs.im()),
            num(c.residual),
            num(c.tol),
            c.passed.to_string(),
            c.error.clone().unwrap_or_default(),
        ]
    });
    let s = &report.summary;
    format!(
        "{}# summary: total={} passed={} failed={}\n{}",
        config_comment(run),
        s.total,
        s.passed,
        s.failed,
        csv_block(&header, rows)
    )
}

#[derive(Serialize)]
struct SpectrumRun {
    command: &'static str,
    grid: PointGrid,
}

/// Slack allowed on the containment and norm bounds.
const SPECTRAL_SLACK: f64 = 1e-8;

fn cmd_spectrum(grid: PointGrid) -> Result<Output, Error> {
    let config = SpectrumRun {
        command: "spectrum",
        grid,
    };
    let header = [
        "n",
        "re",
        "im",
        "abs_lambda_minus_1",
        "compression_norm",
        "gram_condition",
        "status",
    ];
    let points = grid.points()?;
    let n = points.len().to_string();
    let mut comments = config_comment(&config);
    let mut failures = Vec::new();
    let analysis = build_compression(&points).and_then(|m| {
        let eigs = compression_eigs(&m)?;
        Ok((
            compression_norm(&m)?,
            section_norm(&m)?,
            m.condition_estimate(),
            eigs,
        ))
    });
    let rows: Vec<Vec<String>> = match analysis {
        Ok((norm, section, condition, eigs)) => {
            let (min_d, mean_d) = circle_distance(&eigs);
            comments += &format!(
                "# section_norm: {}\n# circle_distance_min: {}\n# circle_distance_mean: {}\n",
                num(section),
                num(min_d),
                num(mean_d)
            );
            let norm_ok =
                norm >= 2.0 * LN_2.sqrt() - SPECTRAL_SLACK && norm <= 2.0 + SPECTRAL_SLACK;
            if !norm_ok {
                failures.push(format!(
                    "compression norm {norm} outside [2 sqrt(log 2), 2]"
                ));
            }
            eigs.iter()
                .map(|z| {
                    let d = (z - 1.0).norm();
                    let status = if d > 1.0 + SPECTRAL_SLACK {
                        failures.push(format!("eigenvalue {z} outside |λ-1| <= 1"));
                        "outside_disk"
                    } else if !norm_ok {
                        "norm_out_of_range"
                    } else {
                        "ok"
                    };
                    vec![
                        n.clone(),
                        num(z.re),
                        num(z.im),
                        num(d),
                        num(norm),
                        num(condition),
                        status.to_string(),
                    ]
                })
                .collect()
        }
        Err(
            e @ (Error::IllConditioned { .. } | Error::DuplicatePoint(_) | Error::Factorization(_)),
        ) => {
            let condition = match e {
                Error::IllConditioned { condition, .. } => num(condition),
                _ => String::new(),
            };
            failures.push(e.to_string());
            vec![vec![
                n.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                condition,
                format!("conditioning: {e}"),
            ]]
        }
        Err(e) => return Err(e),
    };
    Ok(Output {
        body: comments + &csv_block(&header, rows),
        failures,
    })
}

#[derive(Serialize)]
struct NormsRun<'a> {
    command: &'static str,
    p: &'a [f64],
    h1_demo: bool,
    h1_radii: &'a [f64],
    quadrature: QuadratureSpec,
}

/// Slack on `ratio ≤ p/(p-1)`.
const BOUND_SLACK: f64 = 1e-8;

fn cmd_norms(ps: &[f64], h1_demo: bool) -> Result<Output, Error> {
    let exps = ps
        .iter()
        .map(|&p| ExponentP::for_bound(p))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = QuadratureSpec::default();
    let config = NormsRun {
        command: "norms",
        p: ps,
        h1_demo,
        h1_radii: if h1_demo { &H1_RADII } else { &[] },
        quadrature: spec,
    };
    let family = ratio_test_family()?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for p in exps {
        let (beta, bound) = optimize_beta_bound(p)?;
        let exact = p.value() / (p.value() - 1.0);
        let mut best: (f64, &str) = (f64::NEG_INFINITY, "");
        let mut status = String::from("ok");
        for (label, f) in &family {
            match cesaro_ratio(f, p, &spec) {
                Ok(r) => {
                    if r > best.0 {
                        best = (r, label);
                    }
                    if r > exact + BOUND_SLACK {
                        failures.push(format!(
                            "p={}: ratio {r} for {label} exceeds {exact}",
                            p.value()
                        ));
                        status = "bound_exceeded".into();
                    }
                }
                Err(e) => {
                    failures.push(format!("p={}: {label}: {e}", p.value()));
                    status = format!("error: {label}: {e}");
                }
            }
        }
        rows.push(vec![
            num(p.value()),
            num(beta),
            num(bound),
            num(exact),
            num(best.0),
            best.1.to_string(),
            num(bound - best.0),
            status,
        ]);
    }
    let header = [
        "p",
        "beta_star",
        "bound_star",
        "p_over_p_minus_1",
        "max_ratio",
        "max_ratio_function",
        "margin",
        "status",
    ];
    let mut body = config_comment(&config) + &csv_block(&header, rows);
    if h1_demo {
        let report = h1_counterexample_report(&H1_RADII, &spec)?;
        failures.extend(h1_failures(&report));
        body += &format!(
            "\n# h1_counterexample: f(z) = (z+i)^-2, f_norm_1: {}\n",
            num(report.f_norm)
        );
        let rows = report.rows.iter().map(|r| {
            vec![
                num(r.radius),
                num(r.integral),
                num(r.closed_form),
                r.increment.map(num).unwrap_or_default(),
            ]
        });
        body += &csv_block(&["radius", "integral", "closed_form", "increment"], rows);
    }
    Ok(Output { body, failures })
}

/// `‖f‖_1 = π` and per-decade growth `2 log 10 ± 2%`.
fn h1_failures(report: &H1Report) -> Vec<String> {
    let mut out = Vec::new();
    if (report.f_norm - std::f64::consts::PI).abs() > 1e-8 {
        out.push(format!("h1: ||f||_1 = {} differs from pi", report.f_norm));
    }
    let target = 2.0 * 10f64.ln();
    for r in &report.rows {
        if let Some(inc) = r.increment {
            if (inc - target).abs() > 0.02 * target {
                out.push(format!(
                    "h1: increment {inc} at R = {} not within 2% of 2 log 10",
                    r.radius
                ));
            }
        }
    }
    out
}
