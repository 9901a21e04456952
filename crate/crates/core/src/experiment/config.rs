use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::defect::{DefectOptions, InverseOperator, TruncationReference};
use crate::error::{Error, Result};
use crate::estimators::{AngleOptions, Method, SuperpositionOptions};
use crate::exec::Execution;
use crate::gas::{
    build_edney1, build_edney6, single_wedge, uniform_flow, FlowPattern, GasModel, PatternGeometry, PrimitiveState,
};
use crate::grid::{ComponentMask, Grid, Metric};
use crate::solver::{Inflow, InitialCondition, Limiter, SchemeId, SolverConfig};
use crate::synthetic::SyntheticOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Edney1,
    Edney6,
    SingleWedge,
    Freestream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    #[default]
    Density,
    Conserved,
}

impl MaskKind {
    pub fn mask(self) -> ComponentMask {
        match self {
            MaskKind::Density => ComponentMask::DENSITY,
            MaskKind::Conserved => ComponentMask::CONSERVED,
        }
    }
}

/// One experiment: pattern, grids, scheme roster and estimator settings.
/// Angles are in degrees. Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pattern: PatternKind,
    pub mach: f64,
    pub chi1: f64,
    pub chi2: f64,
    /// Point the waves radiate from; the pattern's default when absent.
    pub origin: Option<(f64, f64)>,
    pub gamma: f64,
    pub grid_sizes: Vec<usize>,
    pub schemes: Vec<SchemeId>,
    pub estimators: Vec<Method>,
    pub mask: MaskKind,
    pub reference: TruncationReference,
    pub fallback_reference: SchemeId,
    pub inverse: InverseOperator,
    pub source_scale: f64,
    pub steady_tol: f64,
    pub max_steps: usize,
    /// Overrides every scheme's default CFL number.
    pub cfl: Option<f64>,
    pub limiter: Limiter,
    pub initial: InitialCondition,
    pub execution: Execution,
    pub triangle_threshold: f64,
    /// Members used by the triangle estimate; the whole ensemble when empty.
    pub triangle_members: Vec<String>,
    pub angle_factor: f64,
    pub beta_divisor: f64,
    pub angle_tol_deg: f64,
    pub max_iter: usize,
    /// Basis sizes for a Prager-Synge growth table; one solution on the
    /// whole basis when empty.
    pub basis_sizes: Vec<usize>,
    /// Member order for the growth table; the roster order when empty.
    pub basis_order: Vec<String>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub synthetic: SyntheticOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let d = DefectOptions::default();
        let s = SuperpositionOptions::default();
        let a = AngleOptions::default();
        ExperimentConfig {
            pattern: PatternKind::Edney1,
            mach: 4.0,
            chi1: 20.0,
            chi2: 15.0,
            origin: None,
            gamma: GasModel::default().gamma,
            grid_sizes: vec![100],
            schemes: SchemeId::ALL.to_vec(),
            estimators: vec![Method::Width, Method::Triangle, Method::Angle, Method::PragerSynge],
            mask: MaskKind::Density,
            reference: d.reference,
            fallback_reference: d.fallback_reference,
            inverse: d.inverse,
            source_scale: d.source_scale,
            steady_tol: SolverConfig::DEFAULT_STEADY_TOL,
            max_steps: SolverConfig::DEFAULT_MAX_STEPS,
            cfl: None,
            limiter: Limiter::default(),
            initial: InitialCondition::default(),
            execution: Execution::default(),
            triangle_threshold: 2.0,
            triangle_members: Vec::new(),
            angle_factor: a.factor,
            beta_divisor: a.beta_divisor,
            angle_tol_deg: s.angle_tol.to_degrees(),
            max_iter: s.max_iter,
            basis_sizes: Vec::new(),
            basis_order: Vec::new(),
            output: None,
            seed: 0,
            synthetic: SyntheticOptions::default(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn gas(&self) -> GasModel {
        GasModel {
            gamma: self.gamma,
            ..GasModel::default()
        }
    }

    pub fn metric(&self) -> Metric {
        Metric::new(self.mask.mask())
    }

    pub fn defect_options(&self) -> DefectOptions {
        DefectOptions {
            reference: self.reference,
            fallback_reference: self.fallback_reference,
            inverse: self.inverse,
            source_scale: self.source_scale,
        }
    }

    pub fn superposition_options(&self) -> SuperpositionOptions {
        SuperpositionOptions {
            metric: self.metric(),
            angle_tol: self.angle_tol_deg.to_radians(),
            max_iter: self.max_iter,
        }
    }

    pub fn angle_options(&self) -> AngleOptions {
        AngleOptions {
            factor: self.angle_factor,
            beta_divisor: self.beta_divisor,
        }
    }

    pub fn synthetic_options(&self) -> SyntheticOptions {
        SyntheticOptions {
            seed: self.seed,
            ..self.synthetic
        }
    }

    /// Checks everything that can be checked before a solve, including the
    /// analytic pattern (attached shocks, valid wave matching).
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("scheme roster is empty".into()));
        }
        if self.schemes.iter().collect::<BTreeSet<_>>().len() != self.schemes.len() {
            return Err(Error::InvalidConfig("scheme roster has duplicates".into()));
        }
        if self.grid_sizes.is_empty() {
            return Err(Error::InvalidConfig("no grid sizes".into()));
        }
        if let Some(&n) = self.grid_sizes.iter().find(|&&n| n < 4) {
            return Err(Error::InvalidConfig(format!("grid size {n} is below 4")));
        }
        positive("gamma - 1", self.gamma - 1.0)?;
        positive("source_scale", self.source_scale)?;
        positive("steady_tol", self.steady_tol)?;
        positive("triangle_threshold", self.triangle_threshold)?;
        positive("angle_factor", self.angle_factor)?;
        positive("beta_divisor", self.beta_divisor)?;
        positive("angle_tol_deg", self.angle_tol_deg)?;
        if let Some(c) = self.cfl {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::InvalidConfig(format!("cfl must lie in (0, 1], got {c}")));
            }
        }
        if let Some(&n) = self.basis_sizes.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!("basis size {n} is below 2")));
        }
        let known: BTreeSet<&str> = self.schemes.iter().map(|s| s.label()).collect();
        for l in self.triangle_members.iter().chain(&self.basis_order) {
            if !known.contains(l.as_str()) {
                return Err(Error::InvalidConfig(format!("{l} is not in the scheme roster")));
            }
        }
        self.pattern()?;
        Ok(())
    }

    pub fn freestream(&self) -> PrimitiveState {
        PrimitiveState::freestream(self.mach, &self.gas())
    }

    /// The analytic flow the experiment is measured against.
    pub fn pattern(&self) -> Result<FlowPattern> {
        if !(self.mach > 1.0) {
            return Err(Error::Subsonic(self.mach));
        }
        let gas = self.gas();
        let free = self.freestream();
        let (c1, c2) = (self.chi1.to_radians(), self.chi2.to_radians());
        let at = |default: PatternGeometry| self.origin.map_or(default, |(x, y)| PatternGeometry::at(x, y));
        match self.pattern {
            PatternKind::Edney1 => build_edney1(free, c1, c2, at(PatternGeometry::default()), &gas),
            PatternKind::Edney6 => build_edney6(free, c1, c2, at(PatternGeometry::default()), &gas),
            PatternKind::SingleWedge => single_wedge(free, c1, at(PatternGeometry::wedge_default()), &gas),
            PatternKind::Freestream => uniform_flow(free, &gas),
        }
    }

    /// Solver setup for one scheme on an `n x n` unit square.
    pub fn solver_config(&self, scheme: SchemeId, n: usize, pattern: &FlowPattern) -> Result<SolverConfig> {
        let grid = Grid::unit_square(n)?;
        let mut c = SolverConfig::new(scheme, grid, self.gas(), Inflow::pattern(pattern.clone()));
        if let Some(cfl) = self.cfl {
            c.cfl = cfl;
        }
        c.max_steps = self.max_steps;
        c.steady_tol = self.steady_tol;
        c.limiter = self.limiter;
        c.initial = self.initial;
        c.execution = self.execution;
        c.validate()?;
        Ok(c)
    }
}
