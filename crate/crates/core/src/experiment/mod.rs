//! Experiment orchestration behind the command line: analytic checks,
//! ensemble runs persisted as PSFIELD files with a manifest, estimator
//! reports against the analytic truth, and the synthetic bound suite.
//!
//! Output layout for an output directory `out`:
//!
//! ```text
//! out/grid_<n>/manifest.json
//! out/grid_<n>/<label>.psfield
//! out/grid_<n>/convergence_<label>.csv
//! out/grid_<n>/density_<label>.csv
//! out/grid_<n>/approx_<label>.psfield
//! out/grid_<n>/report_<method>.json, report_<method>.csv
//! out/synthetic.json
//! ```
//!
//! Nothing written depends on the clock or the thread schedule, so a
//! command repeated with the same configuration reproduces every byte.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, MaskKind, PatternKind};

use crate::defect::{build_error_basis, ErrorBasis};
use crate::error::{Error, Result};
use crate::estimators::{
    angle_report, prager_synge_growth, prager_synge_solution, triangle_estimate, width_estimate, EstimateReport, Method,
};
use crate::gas::{project_pattern, FlowPattern, PatternCheck};
use crate::grid::{Grid, GridFunction};
use crate::psfield;
use crate::solver::{run_ensemble, ConvergenceLog, EnsembleMember, MemberFailure, SchemeId, SolutionEnsemble};
use crate::synthetic::{synthetic_suite, SyntheticReport};

pub const MANIFEST: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

/// Largest pattern residual `verify-analytic` accepts.
pub const ANALYTIC_TOLERANCE: f64 = 1e-10;

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn grid_dir(out: &Path, n: usize) -> PathBuf {
    out.join(format!("grid_{n}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub summary: String,
    pub checks: Vec<PatternCheck>,
    pub passed: bool,
}

/// Builds the configured pattern and runs its invariant checks.
pub fn verify_analytic(config: &ExperimentConfig) -> Result<AnalyticReport> {
    let p = config.pattern()?;
    let checks = p.checks();
    let passed = checks.iter().all(|c| c.residual < ANALYTIC_TOLERANCE);
    let mut summary = p.summary();
    for c in &checks {
        let _ = writeln!(summary, "check {:<40} {:.3e}", c.name, c.residual);
    }
    Ok(AnalyticReport {
        summary,
        checks,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestMember {
    pub label: String,
    pub scheme: SchemeId,
    pub file: String,
    pub digest: String,
    pub converged: bool,
    pub steps: usize,
    pub final_residual: f64,
}

/// Index of one persisted ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub grid: Grid,
    pub config: ExperimentConfig,
    pub members: Vec<ManifestMember>,
    pub failures: Vec<MemberFailure>,
}

/// `x,y,rho` per cell, rows bottom to top.
pub fn density_csv(f: &GridFunction) -> String {
    let g = f.grid();
    let mut s = String::from("x,y,rho\n");
    for j in 0..g.ny {
        for i in 0..g.nx {
            let _ = writeln!(s, "{},{},{}", g.x_center(i), g.y_center(j), f.get(i, j, 0));
        }
    }
    s
}

/// Runs the roster on every grid size and persists each ensemble. Refuses
/// to replace an existing manifest unless `force`.
pub fn run_ensembles(config: &ExperimentConfig, out: &Path, force: bool) -> Result<Vec<Manifest>> {
    config.validate()?;
    let pattern = config.pattern()?;
    for &n in &config.grid_sizes {
        let m = grid_dir(out, n).join(MANIFEST);
        if m.exists() && !force {
            return Err(Error::Exists(m));
        }
    }
    config
        .grid_sizes
        .iter()
        .map(|&n| run_one(config, &pattern, &grid_dir(out, n), n))
        .collect()
}

fn run_one(config: &ExperimentConfig, pattern: &FlowPattern, dir: &Path, n: usize) -> Result<Manifest> {
    let configs = config
        .schemes
        .iter()
        .map(|&s| config.solver_config(s, n, pattern))
        .collect::<Result<Vec<_>>>()?;
    let ens = run_ensemble(&configs, config.execution)?;
    create_dir(dir)?;
    let mut members = Vec::new();
    for m in ens.members() {
        let file = format!("{}.psfield", m.label);
        psfield::save(&m.field, &dir.join(&file))?;
        write(&dir.join(format!("convergence_{}.csv", m.label)), m.log.to_csv())?;
        write(&dir.join(format!("density_{}.csv", m.label)), density_csv(&m.field))?;
        members.push(ManifestMember {
            label: m.label.clone(),
            scheme: m.scheme.expect("solver members carry their scheme"),
            file,
            digest: m.digest.clone(),
            converged: m.log.converged,
            steps: m.log.steps(),
            final_residual: m.log.final_residual(),
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        grid: *ens.grid(),
        config: config.clone(),
        members,
        failures: ens.failures.clone(),
    };
    write(&dir.join(MANIFEST), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Reads a persisted ensemble. Convergence histories stay on disk; the
/// members carry only the converged flag and tolerance.
pub fn load_ensemble(dir: &Path) -> Result<(Manifest, SolutionEnsemble)> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.version != MANIFEST_VERSION {
        return Err(Error::Format(format!(
            "manifest version {} is not supported",
            manifest.version
        )));
    }
    let mut ens = SolutionEnsemble::new(manifest.grid);
    for m in &manifest.members {
        let field = psfield::load(&dir.join(&m.file))?;
        if !field.grid().same_as(&manifest.grid) {
            return Err(Error::GridMismatch(format!(
                "{} does not match the manifest grid",
                m.file
            )));
        }
        ens.push(EnsembleMember {
            label: m.label.clone(),
            scheme: Some(m.scheme),
            field,
            digest: m.digest.clone(),
            log: ConvergenceLog {
                records: Vec::new(),
                converged: m.converged,
                steady_tol: manifest.config.steady_tol,
            },
        })?;
    }
    ens.failures = manifest.failures.clone();
    Ok((manifest, ens))
}

/// Reports written for one grid, plus the estimators that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOutcome {
    pub grid_size: usize,
    pub reports: Vec<EstimateReport>,
    pub failures: Vec<(Method, String, i32)>,
}

impl EstimateOutcome {
    pub fn report(&self, method: Method) -> Option<&EstimateReport> {
        self.reports.iter().find(|r| r.method == method)
    }
}

fn pattern_label(config: &ExperimentConfig, p: &FlowPattern) -> String {
    match config.pattern {
        PatternKind::Freestream | PatternKind::SingleWedge => {
            format!("{} M={} chi={}", p.name, config.mach, config.chi1)
        }
        _ => format!("{} M={} chi={}/{}", p.name, config.mach, config.chi1, config.chi2),
    }
}

/// Runs the configured estimators on every persisted ensemble under `out`,
/// with the truth projected from the pattern.
pub fn estimate(config: &ExperimentConfig, out: &Path) -> Result<Vec<EstimateOutcome>> {
    config.validate()?;
    let pattern = config.pattern()?;
    config
        .grid_sizes
        .iter()
        .map(|&n| estimate_one(config, &pattern, &grid_dir(out, n), n))
        .collect()
}

fn estimate_one(config: &ExperimentConfig, pattern: &FlowPattern, dir: &Path, n: usize) -> Result<EstimateOutcome> {
    let (manifest, ens) = load_ensemble(dir)?;
    let truth = project_pattern(pattern, &manifest.grid, &config.gas())?;
    let metric = config.metric();
    let mut basis: Option<Result<ErrorBasis>> = None;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let label = pattern_label(config, pattern);
    for &method in &config.estimators {
        let r: Result<EstimateReport> = match method {
            Method::Width => width_estimate(&ens, metric, Some(&truth)),
            Method::Triangle => {
                let sub = if config.triangle_members.is_empty() {
                    ens.clone()
                } else {
                    let labels: Vec<&str> = config.triangle_members.iter().map(String::as_str).collect();
                    ens.subset(&labels)?
                };
                triangle_estimate(&sub, metric, Some(&truth), config.triangle_threshold).map(|(r, _)| r)
            }
            Method::Angle | Method::PragerSynge => {
                let b = basis.get_or_insert_with(|| build_basis(config, pattern, &ens, dir));
                match b {
                    Err(e) => Err(Error::Estimator(format!("error basis unavailable: {e}"))),
                    Ok(b) if method == Method::Angle => {
                        angle_report(&ens, b, metric, Some(&truth), config.angle_options())
                    }
                    Ok(b) => prager_synge(config, b, &ens, &truth),
                }
            }
        };
        match r {
            Ok(mut rep) => {
                rep.meta.pattern = label.clone();
                let stem = format!("report_{}", method.tag());
                write(&dir.join(format!("{stem}.json")), rep.to_json()?)?;
                write(&dir.join(format!("{stem}.csv")), rep.to_csv())?;
                reports.push(rep);
            }
            Err(e) => failures.push((method, e.to_string(), e.exit_code())),
        }
    }
    Ok(EstimateOutcome {
        grid_size: n,
        reports,
        failures,
    })
}

fn build_basis(
    config: &ExperimentConfig,
    pattern: &FlowPattern,
    ens: &SolutionEnsemble,
    dir: &Path,
) -> Result<ErrorBasis> {
    let base = config.solver_config(SchemeId::S1, ens.grid().nx, pattern)?;
    let basis = build_error_basis(ens, config.defect_options(), &base, config.execution)?;
    for e in &basis.entries {
        psfield::save(&e.approx, &dir.join(format!("approx_{}.psfield", e.label)))?;
    }
    Ok(basis)
}

fn prager_synge(
    config: &ExperimentConfig,
    basis: &ErrorBasis,
    ens: &SolutionEnsemble,
    truth: &GridFunction,
) -> Result<EstimateReport> {
    let opts = config.superposition_options();
    let mut rep = if config.basis_sizes.is_empty() {
        prager_synge_solution(basis, ens, &opts, Some(truth), config.execution)?.1
    } else {
        let order: Vec<&str> = if config.basis_order.is_empty() {
            basis.labels()
        } else {
            config.basis_order.iter().map(String::as_str).collect()
        };
        prager_synge_growth(
            basis,
            ens,
            &order,
            &config.basis_sizes,
            &opts,
            Some(truth),
            config.execution,
        )?
    };
    rep.warnings.extend(
        basis
            .excluded
            .iter()
            .map(|x| format!("{} excluded from the basis: {}", x.label, x.error)),
    );
    Ok(rep)
}

/// Runs the synthetic suite and, with an output directory, writes
/// `synthetic.json`.
pub fn run_synthetic(config: &ExperimentConfig, out: Option<&Path>) -> Result<SyntheticReport> {
    let r = synthetic_suite(&config.synthetic_options())?;
    if let Some(dir) = out {
        create_dir(dir)?;
        write(&dir.join("synthetic.json"), serde_json::to_string_pretty(&r)?)?;
    }
    Ok(r)
}
