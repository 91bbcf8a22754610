mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ckylab::catalog::{self, FamilyId, FamilySpec};
use ckylab::cky::{self, FormKind};
use ckylab::json::{algebra_to_value, form_to_json, parse_algebra};
use ckylab::verify::{self, Suite, VerifyOptions};
use ckylab::{Error, MetricLieAlgebra, PForm, ToleranceConfig};

use report::{render, Format, RunReport, Status};

#[derive(Parser)]
#[command(name = "ckylab", version, about = "Conformal Killing-Yano forms on metric Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for CKY, KY, *-KY or parallel p-forms.
    Solve {
        /// Algebra in JSON form.
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        input: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        /// Comma-separated `name=value` overrides; values may be fractions.
        #[arg(long, default_value = "", requires = "family")]
        params: String,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value = "cky")]
        kind: String,
        /// Residual tolerance (overrides CKYLAB_TOL).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        /// tables, grs, holonomy, identities, extensions, basis, negative, properties or all.
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Inspect the family catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// One line per family: parameters, constraints, description.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a family instance as algebra JSON with its reference form.
    Show {
        family: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn tolerance(flag: Option<f64>) -> Result<ToleranceConfig, Error> {
    let residual = match flag {
        Some(v) => Some(v),
        None => match std::env::var("CKYLAB_TOL") {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Input(format!("CKYLAB_TOL='{s}' is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    let tol = match residual {
        Some(r) => ToleranceConfig::default().with_residual(r),
        None => ToleranceConfig::default(),
    };
    tol.validate()?;
    Ok(tol)
}

struct Loaded {
    algebra: MetricLieAlgebra,
    form: Option<PForm>,
    expected: Option<catalog::Expected>,
}

fn load(input: &Option<PathBuf>, family: &Option<String>, params: &str, tol: ToleranceConfig) -> Result<Loaded, Error> {
    if let Some(path) = input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let (algebra, form) = parse_algebra(&text, tol)?;
        return Ok(Loaded {
            algebra,
            form,
            expected: None,
        });
    }
    let id: FamilyId = family.as_deref().unwrap_or_default().parse()?;
    let inst = catalog::build_family(&FamilySpec::parse(id, params)?)?;
    Ok(Loaded {
        algebra: inst.algebra.with_tol(tol)?,
        form: inst.reference_form,
        expected: Some(inst.expected),
    })
}

fn expected_dim(e: &catalog::Expected, p: usize, kind: FormKind) -> Option<usize> {
    match (p, kind) {
        (2, FormKind::Cky) => e.cky2,
        (2, FormKind::Ky) => e.ky2,
        (2, FormKind::StarKy) => e.starky2,
        (2, FormKind::Parallel) => e.parallel2,
        (3, FormKind::Cky) => e.cky3,
        (3, FormKind::Ky) => e.ky3,
        (3, FormKind::StarKy) => e.starky3,
        _ => None,
    }
}

fn classification(algebra: &MetricLieAlgebra, omega: &PForm) -> Value {
    match cky::extract_associated_vector(algebra, omega) {
        Ok(c) => json!({
            "strict": c.is_strict,
            "xi": c.xi.iter().collect::<Vec<_>>(),
            "xi_norm": c.xi_norm,
            "closed": c.closed,
            "coclosed": c.coclosed,
            "parallel": c.parallel,
            "xi_in_center": c.xi_in_center,
            "xi_perp_center": c.xi_perp_center,
            "t_xi_residual": c.t_xi_residual,
            "restricted_rank": c.restricted_rank,
            "cky_residual": c.cky_residual,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn solve(loaded: &Loaded, p: usize, kind: FormKind) -> Result<(Value, Status), Error> {
    let alg = &loaded.algebra;
    let space = cky::solve_form_space(alg, p, kind)?;
    let mut results = json!({
        "dimension": space.dim(),
        "system_rank": space.system_rank,
        "sv_gap": space.sv_gap,
        "max_residual": space.max_residual,
        "basis": space.basis.iter().map(|b| serde_json::to_value(form_to_json(b)).expect("form")).collect::<Vec<_>>(),
    });
    if p == 2 && matches!(kind, FormKind::Cky | FormKind::Ky | FormKind::StarKy) {
        results["classification"] = space.basis.iter().map(|b| classification(alg, b)).collect();
    }
    let mut passed = true;
    if let Some(e) = loaded.expected.as_ref().and_then(|e| expected_dim(e, p, kind)) {
        results["expected_dimension"] = json!(e);
        passed &= e == space.dim();
    }
    if let Some(w) = &loaded.form {
        if w.degree() == p {
            let residual = space.projection_residual(alg, w);
            results["reference_projection_residual"] = json!(residual);
            if kind == FormKind::Cky {
                passed &= residual <= 1e-8;
            }
        }
    }
    Ok((results, if passed { Status::Pass } else { Status::Fail }))
}

fn error_report(command: &str, inputs: Value, e: &Error, start: Instant) -> RunReport {
    RunReport {
        command: command.into(),
        inputs,
        results: json!({ "error": e.to_string() }),
        status: Status::Error,
        wall_time_ms: start.elapsed().as_millis() as u64,
    }
}

fn emit(report: &RunReport, format: Format) -> ExitCode {
    print!("{}", render(report, format));
    if let Some(msg) = report.results.get("error").and_then(Value::as_str) {
        eprintln!("error: {msg}");
    }
    ExitCode::from(report.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match cli.command {
        Command::Solve {
            input,
            family,
            params,
            degree,
            kind,
            tol,
            format,
        } => {
            let inputs = json!({
                "input": input.as_ref().map(|p| p.display().to_string()),
                "family": family,
                "params": params,
                "degree": degree,
                "kind": kind,
                "tol": tol,
            });
            let run = || -> Result<(Value, Status), Error> {
                let tol = tolerance(tol)?;
                let kind: FormKind = kind.parse()?;
                let loaded = load(&input, &family, &params, tol)?;
                solve(&loaded, degree, kind)
            };
            let report = match run() {
                Ok((results, status)) => RunReport {
                    command: "solve".into(),
                    inputs,
                    results,
                    status,
                    wall_time_ms: start.elapsed().as_millis() as u64,
                },
                Err(e) => error_report("solve", inputs, &e, start),
            };
            emit(&report, format)
        }
        Command::Verify { suite, seed, tol, format } => {
            let inputs = json!({ "suite": suite, "seed": seed, "tol": tol });
            let run = || -> Result<(Value, Status), Error> {
                let tol = tolerance(tol)?;
                let suite: Suite = suite.parse()?;
                let mut opts = VerifyOptions { tol, ..VerifyOptions::default() };
                if let Some(s) = seed {
                    opts.seed = s;
                }
                let reports = verify::run(suite, &opts);
                let passed = reports.iter().all(|r| r.passed);
                let results = json!({
                    "seed": opts.seed,
                    "checks": reports.iter().map(|r| r.checks.len()).sum::<usize>(),
                    "failed": reports.iter().map(|r| r.failures().count()).sum::<usize>(),
                    "suites": serde_json::to_value(&reports)?,
                });
                Ok((results, if passed { Status::Pass } else { Status::Fail }))
            };
            let report = match run() {
                Ok((results, status)) => RunReport {
                    command: "verify".into(),
                    inputs,
                    results,
                    status,
                    wall_time_ms: start.elapsed().as_millis() as u64,
                },
                Err(e) => error_report("verify", inputs, &e, start),
            };
            emit(&report, format)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List { format } => {
                let entries = catalog::catalog_list();
                match format {
                    Format::Json => print!("{}", report::to_json(&serde_json::to_value(&entries).expect("entries"))),
                    Format::Text => {
                        for e in &entries {
                            let params: Vec<String> = e.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
                            println!(
                                "{:<11} [{}]  constraints: {}  -- {}",
                                e.id,
                                params.join(","),
                                e.constraints,
                                e.description
                            );
                        }
                    }
                }
                ExitCode::SUCCESS
            }
            CatalogAction::Show { family, params, format } => {
                let shown = family
                    .parse::<FamilyId>()
                    .and_then(|id| FamilySpec::parse(id, &params))
                    .and_then(|spec| catalog::build_family(&spec));
                match shown {
                    Ok(inst) => {
                        let value = algebra_to_value(&inst.algebra, inst.reference_form.as_ref());
                        match format {
                            Format::Json => print!("{}", report::to_json(&value)),
                            Format::Text => print!("{}", report::to_text(&value)),
                        }
                        ExitCode::SUCCESS
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        ExitCode::from(2)
                    }
                }
            }
        },
    }
}
