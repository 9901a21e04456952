//! Truncation-error estimates and their conversion into approximation-error
//! estimates by defect correction.
//!
//! For a member `u_m`, the truncation estimate is the steady rate of a
//! reference operator evaluated on it, `delta = L_ref(u_m)`. The default
//! reference is a fourth-order central flux difference, more accurate than
//! every marched scheme, so `delta` approximates the member's own
//! truncation rather than its distance to another scheme. The correction
//! then solves the base discretization with the source
//! `s = -e * delta - L_base(u_m)`, warm-started at `u_m`. At the new steady
//! state `L_base(u_c) - L_base(u_m) = e * delta`, so `(u_c - u_m) / e` is the
//! linearized response to the truncation error and points along `u_m - u~`.
//! The scale `e` keeps the solve in the linear regime: at full strength the
//! truncation estimate at shocks is O(jump / h) and the solve can lose
//! positivity. `corrected = u_m + approx` is the extrapolated full-strength
//! solution and `u_m - approx` the defect-corrected one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Grid, GridFunction, Metric};
use crate::solver::{
    central_residual, run_from, steady_residual, ConvergenceLog, SchemeId, SolutionEnsemble, SolverConfig,
};

/// A discretization that can be evaluated and marched to steady state.
pub trait SteadyOperator {
    /// Rate `L(u)` of `u_t = L(u)`.
    fn rate(&self, u: &GridFunction) -> Result<GridFunction>;
    /// Marches `u_t = L(u) + source` from `initial` to steady state.
    fn march(&self, initial: &GridFunction, source: &GridFunction) -> Result<(GridFunction, ConvergenceLog)>;
}

impl SteadyOperator for SolverConfig {
    fn rate(&self, u: &GridFunction) -> Result<GridFunction> {
        steady_residual(self, u)
    }

    fn march(&self, initial: &GridFunction, source: &GridFunction) -> Result<(GridFunction, ConvergenceLog)> {
        run_from(self, initial, Some(source))
    }
}

/// Operator whose rate on a member measures its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationReference {
    /// Fourth-order central flux difference, evaluated only.
    Central4,
    /// Steady rate of one of the marched schemes.
    Scheme(SchemeId),
}

impl std::fmt::Display for TruncationReference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TruncationReference::Central4 => f.write_str("central4"),
            TruncationReference::Scheme(s) => write!(f, "{s}"),
        }
    }
}

impl From<SchemeId> for TruncationReference {
    fn from(s: SchemeId) -> Self {
        TruncationReference::Scheme(s)
    }
}

/// Steady rate of `reference` evaluated on `u`.
pub fn estimate_truncation(
    u: &GridFunction,
    reference: impl Into<TruncationReference>,
    config: &SolverConfig,
) -> Result<GridFunction> {
    if !u.grid().same_as(&config.grid) {
        return Err(Error::GridMismatch("field and solver grid differ".into()));
    }
    match reference.into() {
        TruncationReference::Central4 => central_residual(config, u),
        TruncationReference::Scheme(s) => steady_residual(&config.with_scheme(s), u),
    }
}

/// Output of one defect-correction solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub corrected: GridFunction,
    pub approx: GridFunction,
    pub log: ConvergenceLog,
}

/// Solves `base` with source `-scale * delta - L_base(member)` from
/// `member` and rescales the response by `1 / scale`.
pub fn defect_correct<O: SteadyOperator + ?Sized>(
    base: &O,
    member: &GridFunction,
    delta: &GridFunction,
    scale: f64,
) -> Result<Correction> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "source scale must be positive, got {scale}"
        )));
    }
    let own = base.rate(member)?;
    let source = delta.lincomb(-scale, &own, -1.0)?;
    let (solved, log) = base.march(member, &source)?;
    let corrected = member.lincomb(1.0, &solved.sub(member)?, 1.0 / scale)?;
    let approx = corrected.sub(member)?;
    Ok(Correction { corrected, approx, log })
}

/// Which discretization inverts the truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseOperator {
    /// Each member's own scheme.
    OwnScheme,
    /// One scheme for every member.
    Shared(SchemeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectOptions {
    pub reference: TruncationReference,
    /// Used instead of a scheme reference for the member computed by that
    /// scheme, whose own residual carries no information.
    pub fallback_reference: SchemeId,
    pub inverse: InverseOperator,
    /// Fraction of the truncation estimate used as source; the response is
    /// divided by it.
    pub source_scale: f64,
}

impl Default for DefectOptions {
    fn default() -> Self {
        DefectOptions {
            reference: TruncationReference::Central4,
            fallback_reference: SchemeId::LW,
            inverse: InverseOperator::OwnScheme,
            source_scale: 0.1,
        }
    }
}

impl DefectOptions {
    /// Scheme inverting the truncation of a member computed by `scheme`.
    pub fn inverse_scheme_for(&self, scheme: Option<SchemeId>) -> Option<SchemeId> {
        match self.inverse {
            InverseOperator::Shared(s) => Some(s),
            InverseOperator::OwnScheme => scheme,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisEntry {
    pub label: String,
    /// Operator that produced `delta`.
    pub truncation: TruncationReference,
    /// Scheme used for the correction solve; `None` for supplied entries.
    pub inverse_scheme: Option<SchemeId>,
    pub delta: GridFunction,
    pub approx: GridFunction,
    pub corrected: GridFunction,
    pub log: ConvergenceLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedEntry {
    pub label: String,
    pub error: String,
    pub exit_code: i32,
}

/// Per-member approximation-error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBasis {
    pub grid: Grid,
    pub options: DefectOptions,
    pub entries: Vec<BasisEntry>,
    pub excluded: Vec<ExcludedEntry>,
    pub notices: Vec<String>,
}

impl ErrorBasis {
    pub fn get(&self, label: &str) -> Option<&BasisEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.label.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries with the given labels, in that order.
    pub fn subset(&self, labels: &[&str]) -> Result<ErrorBasis> {
        let mut entries = Vec::with_capacity(labels.len());
        for l in labels {
            let e = self
                .get(l)
                .ok_or_else(|| Error::Estimator(format!("no basis entry for {l}")))?;
            entries.push(e.clone());
        }
        Ok(ErrorBasis {
            grid: self.grid,
            options: self.options,
            entries,
            excluded: Vec::new(),
            notices: Vec::new(),
        })
    }

    /// Basis from externally supplied `(label, delta, approx)` triples, with
    /// `corrected` reconstructed from the members.
    pub fn from_parts(
        ensemble: &SolutionEnsemble,
        parts: Vec<(String, GridFunction, GridFunction)>,
        options: DefectOptions,
    ) -> Result<ErrorBasis> {
        let mut entries = Vec::new();
        for (label, delta, approx) in parts {
            let member = ensemble.field(&label)?;
            let corrected = member.add(&approx)?;
            entries.push(BasisEntry {
                label,
                truncation: options.reference,
                inverse_scheme: None,
                delta,
                approx,
                corrected,
                log: ConvergenceLog::default(),
            });
        }
        Ok(ErrorBasis {
            grid: *ensemble.grid(),
            options,
            entries,
            excluded: Vec::new(),
            notices: Vec::new(),
        })
    }
}

/// Runs the truncation estimate and correction solve for every member.
/// Failing solves are excluded; the rest are kept.
pub fn build_error_basis(
    ensemble: &SolutionEnsemble,
    options: DefectOptions,
    base_config: &SolverConfig,
    exec: Execution,
) -> Result<ErrorBasis> {
    if ensemble.is_empty() {
        return Err(Error::Ensemble(
            "cannot build an error basis from an empty ensemble".into(),
        ));
    }
    if !ensemble.grid().same_as(&base_config.grid) {
        return Err(Error::GridMismatch("ensemble and solver grid differ".into()));
    }
    let mut notices = Vec::new();
    let mut plan = Vec::new();
    for m in ensemble.members() {
        let reference = if m.scheme.map(TruncationReference::Scheme) == Some(options.reference) {
            notices.push(format!(
                "{}: produced by reference {}, truncation measured with {}",
                m.label, options.reference, options.fallback_reference
            ));
            TruncationReference::Scheme(options.fallback_reference)
        } else {
            options.reference
        };
        let inverse = options.inverse_scheme_for(m.scheme).ok_or_else(|| {
            Error::Ensemble(format!(
                "member {} has no scheme; use a shared inverse operator",
                m.label
            ))
        })?;
        plan.push((m, reference, inverse));
    }
    let results = exec.map(&plan, |(m, reference, inverse)| -> Result<BasisEntry> {
        let delta = estimate_truncation(&m.field, *reference, base_config)?;
        let c = defect_correct(
            &base_config.with_scheme(*inverse),
            &m.field,
            &delta,
            options.source_scale,
        )?;
        Ok(BasisEntry {
            label: m.label.clone(),
            truncation: *reference,
            inverse_scheme: Some(*inverse),
            delta,
            approx: c.approx,
            corrected: c.corrected,
            log: c.log,
        })
    });
    let mut entries = Vec::new();
    let mut excluded = Vec::new();
    for ((m, _, _), r) in plan.iter().zip(results) {
        match r {
            Ok(e) => {
                if !e.log.converged {
                    notices.push(format!(
                        "{}: correction solve stopped at residual {:e}",
                        e.label,
                        e.log.final_residual()
                    ));
                }
                entries.push(e)
            }
            Err(err) => excluded.push(ExcludedEntry {
                label: m.label.clone(),
                exit_code: err.exit_code(),
                error: err.to_string(),
            }),
        }
    }
    Ok(ErrorBasis {
        grid: *ensemble.grid(),
        options,
        entries,
        excluded,
        notices,
    })
}

/// Symmetric matrix of angles with labelled rows and columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleTable {
    pub labels: Vec<String>,
    /// Radians, row-major.
    pub values: Vec<Vec<f64>>,
    pub notices: Vec<String>,
}

impl AngleTable {
    /// Pairwise angles between `fields`; zero-norm fields are dropped with a notice.
    pub fn from_fields(fields: &[(&str, &GridFunction)], metric: Metric) -> Result<AngleTable> {
        let mut kept = Vec::new();
        let mut notices = Vec::new();
        for (label, f) in fields {
            if metric.norm(f)? == 0.0 {
                notices.push(format!("{label}: zero norm, excluded"));
            } else {
                kept.push((*label, *f));
            }
        }
        let n = kept.len();
        let mut values = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                let t = metric.angle(kept[a].1, kept[b].1)?;
                values[a][b] = t;
                values[b][a] = t;
            }
        }
        Ok(AngleTable {
            labels: kept.iter().map(|(l, _)| l.to_string()).collect(),
            values,
            notices,
        })
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }

    /// Mean over distinct unordered pairs.
    pub fn mean_off_diagonal(&self) -> Option<f64> {
        let n = self.labels.len();
        if n < 2 {
            return None;
        }
        let mut s = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                s += self.values[a][b];
            }
        }
        Some(s / (n * (n - 1) / 2) as f64)
    }

    /// CSV in degrees with the labels as header row and first column.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("label");
        for l in &self.labels {
            s.push(',');
            s.push_str(l);
        }
        s.push('\n');
        for (l, row) in self.labels.iter().zip(&self.values) {
            s.push_str(l);
            for v in row {
                s.push_str(&format!(",{}", v.to_degrees()));
            }
            s.push('\n');
        }
        s
    }
}

/// Angles `beta_km` between the truncation estimates of the basis.
pub fn truncation_angle_table(basis: &ErrorBasis, metric: Metric) -> Result<AngleTable> {
    if basis.len() < 2 {
        return Err(Error::Estimator("angle table needs at least two basis entries".into()));
    }
    let fields: Vec<(&str, &GridFunction)> = basis.entries.iter().map(|e| (e.label.as_str(), &e.delta)).collect();
    AngleTable::from_fields(&fields, metric)
}
