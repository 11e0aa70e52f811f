use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use superint::catalog::{self, EntryOptions, Filter, TableId};
use superint::dynamics::{self, IntegratorOptions, Termination};
use superint::geometry::{self, CurvatureTag, Direction, Frame};
use superint::poisson;
use superint::report::DEFAULT_SEED;
use superint::{
    Class, Error, IdentityResult, PhasePoint, SystemSpec, Tolerances, VerificationReport,
};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "superint",
    version,
    about = "Verify superintegrable systems with quadratic integrals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Leave the timestamp out of reports.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Commutation and quadratic-algebra identities.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// The Casimir identity.
    Casimir {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Gaussian curvature classification.
    Curvature {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Fail unless the classification matches.
        #[arg(long, value_enum)]
        expect: Option<CurvatureExpect>,
    },
    /// Surface-of-revolution check.
    Revolution {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Frame to test in; all applicable frames by default.
        #[arg(long)]
        frame: Option<Frame>,
    },
    /// Linear integral check.
    Linear {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        frame: Option<Frame>,
        /// plus, minus, x or y; all by default.
        #[arg(long)]
        direction: Option<Direction>,
    },
    /// Verify catalog rows.
    Tables {
        #[command(flatten)]
        run: RunArgs,
        /// Restrict to one table (T1..T8).
        #[arg(long)]
        table: Option<TableId>,
        /// Restrict to one row.
        #[arg(long)]
        row: Option<String>,
        /// Free-parameter draws per row.
        #[arg(long, default_value_t = 5)]
        draws: usize,
        /// Curvature used for rows written in terms of 1/K.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        curvature: f64,
    },
    /// Integrate the flow and report conservation.
    Trajectory {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long, allow_hyphen_values = true)]
        p_xi: f64,
        #[arg(long, allow_hyphen_values = true)]
        p_eta: f64,
        #[arg(long, default_value_t = dynamics::DEFAULT_T_END)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        abs_tol: f64,
        /// Normalized drift allowed for each conserved quantity.
        #[arg(long, default_value_t = 1e-6)]
        drift_tol: f64,
    },
    /// Print the embedded catalog.
    DumpCatalog,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CurvatureExpect {
    Zero,
    Constant,
    NonConstant,
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// JSON file holding a system spec.
    #[arg(long, conflicts_with = "class")]
    spec_file: Option<PathBuf>,
    #[arg(long)]
    class: Option<Class>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    k: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    ell: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    m: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    n: f64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// First-bracket tolerance.
    #[arg(long)]
    tol_first: Option<f64>,
    /// Nested-bracket tolerance.
    #[arg(long)]
    tol_nested: Option<f64>,
    #[arg(long)]
    tol_casimir: Option<f64>,
    #[arg(long)]
    tol_curvature: Option<f64>,
}

impl RunArgs {
    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            first_bracket: self.tol_first.unwrap_or(d.first_bracket),
            nested_bracket: self.tol_nested.unwrap_or(d.nested_bracket),
            casimir: self.tol_casimir.unwrap_or(d.casimir),
            curvature: self.tol_curvature.unwrap_or(d.curvature),
        }
    }
}

impl SpecArgs {
    fn resolve(&self) -> Result<SystemSpec, Failure> {
        let spec = match (&self.spec_file, self.class) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<SystemSpec>(&text)
                    .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?
            }
            (None, Some(class)) => SystemSpec::new(
                class,
                [self.kappa, self.lambda, self.mu, self.nu],
                [self.k, self.ell, self.m, self.n],
            ),
            (None, None) => {
                return Err(Failure::config(
                    "a spec is required: pass --class or --spec-file",
                ))
            }
        };
        spec.validate().map_err(Failure::from)?;
        Ok(spec)
    }
}

/// Error carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Sampling { .. } | Error::StepFailure { .. } => EXIT_DOMAIN,
            Error::IllConditioned { .. } => EXIT_FAIL,
            Error::Constraint(_) | Error::Unverifiable(_) | Error::Invalid(_) | Error::Json(_) => {
                EXIT_CONFIG
            }
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// What a command produced and whether it passed.
struct Outcome {
    body: String,
    code: u8,
}

fn stamp(mut report: VerificationReport, common: &Common) -> VerificationReport {
    if !common.no_timestamp {
        report.timestamp =
            Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    report
}

fn identities_csv(reports: &[&VerificationReport]) -> String {
    let mut out = String::from("label,identity,max_residual,tolerance,pass\n");
    for r in reports {
        let label = r.label.as_deref().unwrap_or("");
        for i in &r.identities {
            out.push_str(&format!(
                "{label},{},{:.16e},{:.16e},{}\n",
                i.name, i.max_residual, i.tolerance, i.pass
            ));
        }
    }
    out
}

fn render(report: VerificationReport, common: &Common) -> Outcome {
    let report = stamp(report, common);
    let body = match common.format {
        Format::Json => report.to_json() + "\n",
        Format::Human => report.to_human(),
        Format::Csv => identities_csv(&[&report]),
    };
    Outcome {
        body,
        code: if report.passed() { 0 } else { EXIT_FAIL },
    }
}

fn frames_for(spec: &SystemSpec, frame: Option<Frame>) -> Result<Vec<Frame>, Failure> {
    match frame {
        Some(f) if !f.applies_to(spec) => Err(Failure::config(format!(
            "{} frame is not defined for class {}",
            f.as_str(),
            spec.class
        ))),
        Some(f) => Ok(vec![f]),
        None => Ok(Frame::ALL
            .into_iter()
            .filter(|f| f.applies_to(spec))
            .collect()),
    }
}

fn curvature_command(
    spec: SystemSpec,
    run: &RunArgs,
    expect: Option<CurvatureExpect>,
) -> Result<VerificationReport, Failure> {
    let class = geometry::classify_curvature(&spec, run.points, run.seed)?;
    let mut report = VerificationReport::new(Some(spec), run.seed, run.points);
    let tag = match class.tag {
        CurvatureTag::Zero => "zero".to_string(),
        CurvatureTag::Constant(k) => format!("constant {k:.12e}"),
        CurvatureTag::NonConstant => "non-constant".to_string(),
    };
    report.notes.push(format!(
        "curvature {tag}: max |K| {:.3e}, mean {:.6e}, stddev {:.3e}",
        class.max_abs, class.mean, class.stddev
    ));
    let tol = run.tolerances().curvature;
    match expect {
        None => {}
        Some(CurvatureExpect::Zero) => {
            report.push(IdentityResult::new("curvature-zero", class.max_abs, tol));
        }
        Some(CurvatureExpect::Constant) => {
            report.push(IdentityResult::new("curvature-stddev", class.stddev, tol));
        }
        Some(CurvatureExpect::NonConstant) => {
            report.push(IdentityResult::flag(
                "curvature-non-constant",
                class.tag == CurvatureTag::NonConstant,
            ));
        }
    }
    Ok(report)
}

fn revolution_command(
    spec: SystemSpec,
    run: &RunArgs,
    frame: Option<Frame>,
) -> Result<VerificationReport, Failure> {
    let mut best: Option<geometry::RevolutionEvidence> = None;
    let mut report = VerificationReport::new(Some(spec), run.seed, run.points);
    for f in frames_for(&spec, frame)? {
        let ev = geometry::revolution_check_in(&spec, f, run.points, run.seed)?;
        report.notes.push(format!(
            "{} frame: {} (sum {:.3e}, diff {:.3e}, x {:.3e}, y {:.3e})",
            f.as_str(),
            ev.outcome.as_str(),
            ev.sum_residual,
            ev.diff_residual,
            ev.x_residual,
            ev.y_residual
        ));
        if best.is_none_or(|b| ev.best_residual() < b.best_residual()) {
            best = Some(ev);
        }
    }
    let ev = best.expect("the Liouville frame always applies");
    report.push(
        IdentityResult::new("revolution", ev.best_residual(), geometry::TOL_REVOLUTION)
            .with_detail(format!(
                "{} frame, {}",
                ev.frame.as_str(),
                ev.outcome.as_str()
            )),
    );
    Ok(report)
}

fn linear_command(
    spec: SystemSpec,
    run: &RunArgs,
    frame: Option<Frame>,
    direction: Option<Direction>,
) -> Result<VerificationReport, Failure> {
    let dirs = direction.map_or(Direction::ALL.to_vec(), |d| vec![d]);
    let tol = run.tol_first.unwrap_or(geometry::TOL_LINEAR);
    let mut report = VerificationReport::new(Some(spec), run.seed, run.points);
    let mut best: Option<(f64, Frame, Direction)> = None;
    for f in frames_for(&spec, frame)? {
        for &d in &dirs {
            let r = geometry::linear_integral_check_in(&spec, f, d, run.points, run.seed)?;
            report
                .notes
                .push(format!("{} frame, {}: {r:.3e}", f.as_str(), d.as_str()));
            if best.is_none_or(|(b, _, _)| r < b) {
                best = Some((r, f, d));
            }
        }
    }
    let (r, f, d) = best.expect("at least one frame and direction");
    report.push(
        IdentityResult::new("linear-integral", r, tol).with_detail(format!(
            "{} frame, {}",
            f.as_str(),
            d.as_str()
        )),
    );
    Ok(report)
}

#[derive(Serialize)]
struct TableRow {
    table: TableId,
    row_id: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<VerificationReport>,
}

#[derive(Serialize)]
struct TablesReport {
    schema: &'static str,
    seed: u64,
    draws: usize,
    n_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
    rows: Vec<TableRow>,
}

fn tables_command(
    run: &RunArgs,
    table: Option<TableId>,
    row: Option<&str>,
    draws: usize,
    curvature: f64,
    common: &Common,
) -> Result<Outcome, Failure> {
    let opts = EntryOptions {
        draws,
        n_points: run.points,
        seed: run.seed,
        curvature: Some(curvature),
        tolerances: run.tolerances(),
        algebra: true,
    };
    let entries: Vec<_> = catalog::lookup(&Filter {
        table,
        ..Filter::default()
    })
    .into_iter()
    .filter(|e| e.is_principal() && row.is_none_or(|r| r == e.row_id))
    .collect();
    if entries.is_empty() {
        return Err(Failure::config("no catalog rows match"));
    }
    let mut rows = Vec::new();
    let mut code = 0;
    for e in entries {
        let (status, message, report) = match catalog::verify_entry(e, &opts) {
            Ok(r) if r.passed() => ("pass", None, Some(r)),
            Ok(r) => {
                code = code.max(EXIT_FAIL);
                ("fail", None, Some(r))
            }
            Err(Error::Unverifiable(m)) => ("unverifiable", Some(m), None),
            Err(err) => {
                let f = Failure::from(err);
                code = code.max(f.code);
                ("error", Some(f.message), None)
            }
        };
        rows.push(TableRow {
            table: e.table,
            row_id: e.row_id.clone(),
            status,
            message,
            report,
        });
    }
    let body = match common.format {
        Format::Json => {
            let out = TablesReport {
                schema: superint::report::SCHEMA,
                seed: run.seed,
                draws,
                n_points: run.points,
                timestamp: (!common.no_timestamp)
                    .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
                rows,
            };
            serde_json::to_string_pretty(&out).expect("serializable") + "\n"
        }
        Format::Csv => {
            let reports: Vec<_> = rows.iter().filter_map(|r| r.report.as_ref()).collect();
            identities_csv(&reports)
        }
        Format::Human => {
            let mut out = String::new();
            for r in &rows {
                let worst = r
                    .report
                    .as_ref()
                    .map(|rep| {
                        superint::report::max_residual(
                            rep.identities.iter().map(|i| i.max_residual / i.tolerance),
                        )
                    })
                    .unwrap_or(f64::NAN);
                out.push_str(&format!(
                    "{:<12} {} {:<10} worst residual/tol {:.2e}",
                    r.status.to_uppercase(),
                    r.table,
                    r.row_id,
                    worst
                ));
                if let Some(m) = &r.message {
                    out.push_str(&format!("  {m}"));
                }
                if let Some(rep) = &r.report {
                    for n in &rep.notes {
                        out.push_str(&format!("  ({n})"));
                    }
                }
                out.push('\n');
            }
            out
        }
    };
    Ok(Outcome { body, code })
}

#[derive(Serialize)]
struct TrajectoryReport {
    schema: &'static str,
    spec: SystemSpec,
    initial: PhasePoint,
    t_end: f64,
    options: IntegratorOptions,
    termination: Termination,
    stats: dynamics::StepStats,
    drift: dynamics::DriftReport,
    identities: Vec<IdentityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn trajectory_command(
    spec: SystemSpec,
    initial: PhasePoint,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    drift_tol: f64,
    common: &Common,
) -> Result<Outcome, Failure> {
    let initial = dynamics::clamp_momenta(&spec, initial)?;
    let options = IntegratorOptions::with_tolerances(rel_tol, abs_tol);
    let traj = dynamics::integrate_with(&spec, initial, t_end, &options)?;
    let drift = dynamics::drift_report(&spec, &traj)?;
    let identities: Vec<IdentityResult> = drift
        .drifts
        .iter()
        .map(|d| IdentityResult::new(format!("drift-{}", d.name), d.normalized, drift_tol))
        .collect();
    let mut code = if identities.iter().all(|i| i.pass) {
        0
    } else {
        EXIT_FAIL
    };
    if let Termination::DomainExit { t } = traj.termination {
        eprintln!("trajectory left the domain at t = {t}");
        code = EXIT_DOMAIN;
    }
    let body = match common.format {
        Format::Csv => dynamics::to_csv(&spec, &traj)?,
        Format::Json => {
            let out = TrajectoryReport {
                schema: superint::report::SCHEMA,
                spec,
                initial,
                t_end,
                options,
                termination: traj.termination,
                stats: traj.stats,
                drift,
                identities,
                timestamp: (!common.no_timestamp)
                    .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            };
            serde_json::to_string_pretty(&out).expect("serializable") + "\n"
        }
        Format::Human => {
            let mut out = format!(
                "{} accepted, {} rejected steps, dt in [{:.3e}, {:.3e}]\n",
                traj.stats.accepted, traj.stats.rejected, traj.stats.min_dt, traj.stats.max_dt
            );
            for (d, i) in drift.drifts.iter().zip(&identities) {
                out.push_str(&format!(
                    "{:<4} {:<8} initial {:+.6e}  drift {:.3e}  normalized {:.3e}\n",
                    if i.pass { "PASS" } else { "FAIL" },
                    d.name,
                    d.initial,
                    d.absolute,
                    d.normalized
                ));
            }
            out
        }
    };
    Ok(Outcome { body, code })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::Verify { spec, run } => {
            let spec = spec.resolve()?;
            let r = poisson::verify_algebra(&spec, run.points, run.seed, &run.tolerances())?;
            Ok(render(r, common))
        }
        Command::Casimir { spec, run } => {
            let spec = spec.resolve()?;
            let r = poisson::verify_casimir(&spec, run.points, run.seed, &run.tolerances())?;
            Ok(render(r, common))
        }
        Command::Curvature { spec, run, expect } => {
            let r = curvature_command(spec.resolve()?, run, *expect)?;
            Ok(render(r, common))
        }
        Command::Revolution { spec, run, frame } => {
            let r = revolution_command(spec.resolve()?, run, *frame)?;
            Ok(render(r, common))
        }
        Command::Linear {
            spec,
            run,
            frame,
            direction,
        } => {
            let r = linear_command(spec.resolve()?, run, *frame, *direction)?;
            Ok(render(r, common))
        }
        Command::Tables {
            run,
            table,
            row,
            draws,
            curvature,
        } => tables_command(run, *table, row.as_deref(), *draws, *curvature, common),
        Command::Trajectory {
            spec,
            xi,
            eta,
            p_xi,
            p_eta,
            t_end,
            rel_tol,
            abs_tol,
            drift_tol,
        } => trajectory_command(
            spec.resolve()?,
            PhasePoint::new(*xi, *eta, *p_xi, *p_eta),
            *t_end,
            *rel_tol,
            *abs_tol,
            *drift_tol,
            common,
        ),
        Command::DumpCatalog => Ok(Outcome {
            body: catalog::catalog().to_json() + "\n",
            code: 0,
        }),
    }
}

fn emit(body: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::config(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = run(&cli).and_then(|o| emit(&o.body, cli.common.output.as_ref()).map(|_| o.code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
