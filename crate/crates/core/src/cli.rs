//! Command-line front end.
//!
//! Results go to the output stream, diagnostics to the error stream. Exit
//! codes: 0 success, 1 invalid arguments or inputs, 2 computation failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::density::{
    self, calabi_minimum, closed_form_diagnostic, conformal_density, einstein_density,
    soliton_density, CalabiProfile, DensityError, DensityReport, SolitonProblem,
    TopologyInvariants,
};
use crate::expint::{polytope_exp_integral, LinearForm};
use crate::optimize::{RationalFn, DEFAULT_NEWTON_TOL};
use crate::polytope::{self, Polytope};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "gaussian-density",
    version,
    about = "Gaussian densities of canonical metrics on complex surfaces"
)]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Densities of the Koiso-Cao, Page, Chen-LeBrun-Weber and Wang-Zhu metrics.
    Table,
    /// Einstein metric of positive scalar curvature.
    Einstein {
        #[arg(long, allow_negative_numbers = true)]
        scalar_curvature: f64,
        #[arg(long, allow_negative_numbers = true)]
        volume: f64,
        /// Real dimension.
        #[arg(long, allow_negative_numbers = true)]
        dim: f64,
    },
    /// Einstein metric conformal to an extremal Kähler metric.
    #[command(group(ArgGroup::new("calabi").required(true).args(["calabi_profile", "c_min"])))]
    Conformal {
        #[arg(long, allow_negative_numbers = true)]
        chi: i64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: i64,
        #[arg(long, value_enum)]
        calabi_profile: Option<ProfileName>,
        #[arg(long, allow_negative_numbers = true)]
        c_min: Option<f64>,
    },
    /// Toric Kähler-Ricci soliton on a moment polygon.
    #[command(group(ArgGroup::new("source").required(true).args(["polytope", "polytope_file"])))]
    Soliton {
        #[arg(long, value_enum)]
        polytope: Option<BuiltinPolytope>,
        #[arg(long)]
        polytope_file: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        dim_complex: usize,
        #[arg(long, default_value_t = DEFAULT_NEWTON_TOL)]
        tol: f64,
        #[arg(long)]
        no_symmetry_reduce: bool,
    },
    /// Sample a curve as `x,value` CSV.
    Scan {
        #[arg(long, value_enum)]
        target: ScanTarget,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileName {
    Clbw,
    Page,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinPolytope {
    Pentagon,
    Trapezium,
    Square,
}

impl BuiltinPolytope {
    fn name(self) -> &'static str {
        match self {
            BuiltinPolytope::Pentagon => "pentagon",
            BuiltinPolytope::Trapezium => "trapezium",
            BuiltinPolytope::Square => "square",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanTarget {
    #[value(name = "F-pentagon")]
    FPentagon,
    #[value(name = "F-trapezium")]
    FTrapezium,
    #[value(name = "calabi-f")]
    CalabiF,
    #[value(name = "calabi-h")]
    CalabiH,
}

/// Rounds to 4 decimals, ties to even.
pub fn round4(x: f64) -> String {
    let r = (x * 1e4).round_ties_even() / 1e4;
    format!("{r:.4}")
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Optimize(_) | Error::ExpInt(_) | Error::Density(DensityError::Optimize(_)) => {
                EXIT_COMPUTE
            }
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<DensityError> for Failure {
    fn from(e: DensityError) -> Self {
        Error::from(e).into()
    }
}

impl From<polytope::PolytopeError> for Failure {
    fn from(e: polytope::PolytopeError) -> Self {
        Error::from(e).into()
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_COMPUTE,
            message: format!("write failed: {e}"),
        }
    }
}

/// Parses `argv` (program name first) and executes the subcommand.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Table => table(cli.json, out),
        Command::Einstein {
            scalar_curvature,
            volume,
            dim,
        } => {
            let report = einstein_density(*scalar_curvature, *volume, *dim)?;
            emit_report(&report, cli.json, out)
        }
        Command::Conformal {
            chi,
            sigma,
            calabi_profile,
            c_min,
        } => {
            let topo = TopologyInvariants::new(*chi, *sigma);
            let report = match (calabi_profile, c_min) {
                (Some(name), _) => {
                    let profile = match name {
                        ProfileName::Clbw => CalabiProfile::clbw(),
                        ProfileName::Page => CalabiProfile::page(),
                    };
                    let (c_min, m) = calabi_minimum(&profile)?;
                    let mut r = conformal_density(topo, c_min)?;
                    r.intermediates.insert("profile_argmin".into(), m.argmin[0]);
                    r.intermediates.insert("profile_min".into(), m.value);
                    r
                }
                (None, Some(c)) => conformal_density(topo, *c)?,
                (None, None) => unreachable!("clap enforces the calabi group"),
            };
            emit_report(&report, cli.json, out)
        }
        Command::Soliton {
            polytope,
            polytope_file,
            dim_complex,
            tol,
            no_symmetry_reduce,
        } => {
            if !(*tol > 0.0) {
                return Err(Failure {
                    code: EXIT_USAGE,
                    message: format!("--tol must be positive, got {tol}"),
                });
            }
            let (poly, default_reduce) = match (polytope, polytope_file) {
                (Some(b), _) => (polytope::builtin(b.name())?, true),
                (None, Some(path)) => (Polytope::from_json_file(path)?, false),
                (None, None) => unreachable!("clap enforces the source group"),
            };
            let reduce = default_reduce && !no_symmetry_reduce;
            let prob = SolitonProblem::new(poly, *dim_complex, reduce)?;
            let mut report = soliton_density(&prob, *tol)?;
            let c = report.intermediates["soliton_constant_1"];
            let diag = closed_form_diagnostic(&prob, c);
            if let Some(d) = &diag {
                let inter = &mut report.intermediates;
                inter.insert("closed_form_engine".into(), d.engine_value);
                inter.insert("closed_form_displayed".into(), d.displayed_value);
                inter.insert("closed_form_discrepancy".into(), d.discrepancy);
                inter.insert(
                    "closed_form_flagged".into(),
                    if d.flagged { 1.0 } else { 0.0 },
                );
                if let Some(v) = d.derived_value {
                    inter.insert("closed_form_derived".into(), v);
                }
            }
            emit_report(&report, cli.json, out)?;
            if let (Some(d), false) = (diag, cli.json) {
                writeln!(out, "{}", d.render())?;
            }
            Ok(())
        }
        Command::Scan {
            target,
            from,
            to,
            steps,
        } => scan(*target, *from, *to, *steps, cli.json, out),
    }
}

fn table(json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let rows = density::paper_table_rows()?;
    if json {
        let reports: Vec<&DensityReport> = rows.iter().map(|r| &r.report).collect();
        writeln!(out, "{}", to_json(&reports))?;
        return Ok(());
    }
    writeln!(
        out,
        "{:<12} {:<25} {:<21} Theta",
        "Manifold", "Metric Name", "Type"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{:<12} {:<25} {:<21} {}",
            r.manifold,
            r.metric_name,
            r.metric_type,
            round4(r.report.theta)
        )?;
    }
    Ok(())
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports contain only finite numbers and strings")
}

fn emit_report(report: &DensityReport, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    if json {
        if !report.theta.is_finite() || report.intermediates.values().any(|v| !v.is_finite()) {
            return Err(Failure {
                code: EXIT_COMPUTE,
                message: "report contains non-finite values".into(),
            });
        }
        writeln!(out, "{}", to_json(report))?;
        return Ok(());
    }
    writeln!(out, "metric: {}", report.metric_label)?;
    for (k, v) in &report.intermediates {
        writeln!(out, "{k} = {v}")?;
    }
    writeln!(out, "nu = {}", report.nu)?;
    writeln!(out, "theta = {} ({})", round4(report.theta), report.theta)?;
    Ok(())
}

#[derive(Serialize)]
struct ScanRow {
    x: f64,
    value: f64,
}

fn scan(
    target: ScanTarget,
    from: f64,
    to: f64,
    steps: usize,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if !from.is_finite() || !to.is_finite() {
        return Err(Failure {
            code: EXIT_USAGE,
            message: "--from and --to must be finite".into(),
        });
    }
    let pentagon = polytope::pentagon();
    let trapezium = polytope::trapezium();
    let f = RationalFn::clbw_profile();
    let h = RationalFn::page_profile();
    let eval = |x: f64| -> Result<f64, Failure> {
        let v = match target {
            ScanTarget::FPentagon => polytope_exp_integral(&pentagon, &LinearForm::diagonal(-x, 2)),
            ScanTarget::FTrapezium => {
                polytope_exp_integral(&trapezium, &LinearForm::diagonal(-x, 2))
            }
            ScanTarget::CalabiF => f.eval(x).map_err(Error::from)?,
            ScanTarget::CalabiH => h.eval(x).map_err(Error::from)?,
        };
        Ok(v)
    };
    let mut rows = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let x = if steps == 0 {
            from
        } else {
            from + (to - from) * (k as f64 / steps as f64)
        };
        rows.push(ScanRow { x, value: eval(x)? });
    }
    if json {
        writeln!(out, "{}", to_json(&rows))?;
    } else {
        writeln!(out, "x,value")?;
        for r in &rows {
            writeln!(out, "{},{}", r.x, r.value)?;
        }
    }
    Ok(())
}
