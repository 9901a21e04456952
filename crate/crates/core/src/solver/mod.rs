//! Steady 2D Euler solvers marched in pseudo-time.
//!
//! Every scheme is written in conservative face-flux form, so one update
//! `u += dt * (L(u) + s)` serves all of them. The roster:
//!
//! | id  | scheme                                           | viscosity        |
//! |-----|--------------------------------------------------|------------------|
//! | S1  | first-order Steger-Warming flux-vector splitting | none             |
//! | S2H | MUSCL on primitive variables + HLLC              | none             |
//! | MC  | unsplit MacCormack                               | none             |
//! | MC1 | MacCormack                                       | 2nd order, 0.01  |
//! | MC2 | MacCormack                                       | 2nd order, 0.002 |
//! | MC4 | MacCormack                                       | 4th order, 0.01  |
//! | LW  | two-step Richtmyer Lax-Wendroff                  | 2nd order, 0.01  |
//!
//! S2H advances with two-stage Heun steps; plain forward Euler settles into
//! a limit cycle behind strong shocks. The viscous face terms are written per
//! step, `mu * (h/dt) * diff(u)`, so `mu` is the fraction of the difference
//! removed on each step independently of the local wave speed.

mod ensemble;
mod flux;
mod march;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gas::{project_pattern, FlowPattern, GasModel, PrimitiveState};
use crate::grid::{Grid, GridFunction};

pub use ensemble::{run_ensemble, EnsembleMember, MemberFailure, SolutionEnsemble};
pub use march::Marcher;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    S1,
    S2H,
    MC,
    MC1,
    MC2,
    MC4,
    LW,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Viscosity {
    None,
    Second(f64),
    Fourth(f64),
}

impl SchemeId {
    pub const ALL: [SchemeId; 7] = [
        SchemeId::S1,
        SchemeId::S2H,
        SchemeId::MC,
        SchemeId::MC1,
        SchemeId::MC2,
        SchemeId::MC4,
        SchemeId::LW,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SchemeId::S1 => "S1",
            SchemeId::S2H => "S2H",
            SchemeId::MC => "MC",
            SchemeId::MC1 => "MC1",
            SchemeId::MC2 => "MC2",
            SchemeId::MC4 => "MC4",
            SchemeId::LW => "LW",
        }
    }

    pub fn viscosity(self) -> Viscosity {
        match self {
            SchemeId::S1 | SchemeId::S2H | SchemeId::MC => Viscosity::None,
            SchemeId::MC1 | SchemeId::LW => Viscosity::Second(0.01),
            SchemeId::MC2 => Viscosity::Second(0.002),
            SchemeId::MC4 => Viscosity::Fourth(0.01),
        }
    }

    pub fn default_cfl(self) -> f64 {
        match self {
            SchemeId::S1 | SchemeId::S2H => 0.45,
            // the weak viscosity only damps the shock wiggles at small steps
            SchemeId::MC2 => 0.10,
            _ => 0.30,
        }
    }

    /// Runge-Kutta stages per pseudo-time step.
    pub(crate) fn stages(self) -> usize {
        match self {
            SchemeId::S2H => 2,
            _ => 1,
        }
    }

    pub(crate) fn is_maccormack(self) -> bool {
        matches!(self, SchemeId::MC | SchemeId::MC1 | SchemeId::MC2 | SchemeId::MC4)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limiter {
    #[default]
    Minmod,
    VanLeer,
}

/// Smooth exact steady Euler flow: uniform velocity and pressure, density
/// varying only across streamlines,
/// `rho = 1 + amplitude * exp(rate * eta)` with `eta = -x sin(a) + y cos(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedFlow {
    pub mach: f64,
    pub angle: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub gamma: f64,
}

impl Default for ManufacturedFlow {
    fn default() -> Self {
        ManufacturedFlow {
            mach: 3.0,
            angle: 30f64.to_radians(),
            amplitude: 0.2,
            rate: 1.5,
            gamma: 1.4,
        }
    }
}

impl ManufacturedFlow {
    pub fn state(&self, x: f64, y: f64) -> PrimitiveState {
        let (s, c) = self.angle.sin_cos();
        let eta = -x * s + y * c;
        PrimitiveState {
            rho: 1.0 + self.amplitude * (self.rate * eta).exp(),
            u: self.mach * c,
            v: self.mach * s,
            p: 1.0 / self.gamma,
        }
    }
}

/// Exact flow that supplies boundary data (and optionally the initial state).
#[derive(Debug, Clone, PartialEq)]
pub enum Inflow {
    Pattern(Arc<FlowPattern>),
    Manufactured(ManufacturedFlow),
}

impl Inflow {
    pub fn pattern(p: FlowPattern) -> Self {
        Inflow::Pattern(Arc::new(p))
    }

    pub fn exact(&self, x: f64, y: f64) -> PrimitiveState {
        match self {
            Inflow::Pattern(p) => p.eval(x, y),
            Inflow::Manufactured(m) => m.state(x, y),
        }
    }

    pub fn freestream(&self) -> PrimitiveState {
        match self {
            Inflow::Pattern(p) => p.freestream_state(),
            Inflow::Manufactured(m) => m.state(0.0, 0.0),
        }
    }

    pub fn project(&self, grid: &Grid, gas: &GasModel) -> Result<GridFunction> {
        match self {
            Inflow::Pattern(p) => project_pattern(p, grid, gas),
            Inflow::Manufactured(m) => GridFunction::from_fn(*grid, 4, |x, y, out| {
                out.copy_from_slice(&m.state(x, y).to_conserved(gas))
            }),
        }
    }

    fn view(&self) -> InflowView<'_> {
        match self {
            Inflow::Pattern(p) => InflowView::Pattern(p),
            Inflow::Manufactured(m) => InflowView::Manufactured(m),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum InflowView<'a> {
    Pattern(&'a FlowPattern),
    Manufactured(&'a ManufacturedFlow),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    #[default]
    Freestream,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub scheme: SchemeId,
    pub grid: Grid,
    pub gas: GasModel,
    pub inflow: Inflow,
    pub cfl: f64,
    pub max_steps: usize,
    pub steady_tol: f64,
    pub limiter: Limiter,
    pub initial: InitialCondition,
    pub execution: Execution,
}

#[derive(Serialize)]
struct Descriptor<'a> {
    scheme: SchemeId,
    grid: &'a Grid,
    gas: &'a GasModel,
    inflow: InflowView<'a>,
    cfl: f64,
    max_steps: usize,
    steady_tol: f64,
    limiter: Limiter,
    initial: InitialCondition,
}

impl SolverConfig {
    pub const DEFAULT_STEADY_TOL: f64 = 1e-8;
    pub const DEFAULT_MAX_STEPS: usize = 50_000;

    pub fn new(scheme: SchemeId, grid: Grid, gas: GasModel, inflow: Inflow) -> Self {
        SolverConfig {
            scheme,
            grid,
            gas,
            inflow,
            cfl: scheme.default_cfl(),
            max_steps: Self::DEFAULT_MAX_STEPS,
            steady_tol: Self::DEFAULT_STEADY_TOL,
            limiter: Limiter::default(),
            initial: InitialCondition::default(),
            execution: Execution::default(),
        }
    }

    /// Same setup with another scheme and that scheme's default CFL.
    pub fn with_scheme(&self, scheme: SchemeId) -> Self {
        SolverConfig {
            scheme,
            cfl: scheme.default_cfl(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.steady_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "steady_tol must be positive, got {}",
                self.steady_tol
            )));
        }
        let free = self.inflow.freestream();
        free.validate()?;
        let m = free.mach(&self.gas);
        if !(m > 1.0) {
            return Err(Error::Subsonic(m));
        }
        Ok(())
    }

    /// SHA-256 of everything that determines the result (not the execution policy).
    pub fn digest(&self) -> String {
        let d = Descriptor {
            scheme: self.scheme,
            grid: &self.grid,
            gas: &self.gas,
            inflow: self.inflow.view(),
            cfl: self.cfl,
            max_steps: self.max_steps,
            steady_tol: self.steady_tol,
            limiter: self.limiter,
            initial: self.initial,
        };
        let bytes = serde_json::to_vec(&d).expect("descriptor serializes");
        hex(&Sha256::digest(bytes))
    }

    pub fn initial_state(&self) -> Result<GridFunction> {
        match self.initial {
            InitialCondition::Freestream => {
                let q = self.inflow.freestream().to_conserved(&self.gas);
                GridFunction::from_fn(self.grid, 4, |_, _, out| out.copy_from_slice(&q))
            }
            InitialCondition::Exact => self.inflow.project(&self.grid, &self.gas),
        }
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub residual: f64,
    pub dt: f64,
}

/// Residual history of one run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceLog {
    pub records: Vec<StepRecord>,
    pub converged: bool,
    pub steady_tol: f64,
}

impl ConvergenceLog {
    pub fn steps(&self) -> usize {
        self.records.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.residual)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,residual,dt\n");
        for r in &self.records {
            s.push_str(&format!("{},{:e},{:e}\n", r.step, r.residual, r.dt));
        }
        s
    }
}

/// Marches `config` from its initial condition to steady state.
pub fn run_scheme(config: &SolverConfig) -> Result<(GridFunction, ConvergenceLog)> {
    run_from(config, &config.initial_state()?, None)
}

/// As [`run_scheme`], with a fixed `source` added to every cell update.
pub fn run_scheme_with_source(config: &SolverConfig, source: &GridFunction) -> Result<(GridFunction, ConvergenceLog)> {
    run_from(config, &config.initial_state()?, Some(source))
}

/// Marches from an arbitrary starting state.
pub fn run_from(
    config: &SolverConfig,
    initial: &GridFunction,
    source: Option<&GridFunction>,
) -> Result<(GridFunction, ConvergenceLog)> {
    let mut m = Marcher::new(config, initial, source)?;
    let mut log = ConvergenceLog {
        records: Vec::new(),
        converged: false,
        steady_tol: config.steady_tol,
    };
    while m.steps_taken() < config.max_steps {
        let rec = m.advance()?;
        log.records.push(rec);
        if rec.residual < config.steady_tol {
            log.converged = true;
            break;
        }
    }
    Ok((m.solution(), log))
}

/// Spatial operator of the scheme evaluated on `u`: the rate `L(u)` in
/// `u_t = L(u)`, with boundary ghosts filled from the config's inflow.
/// Time-step dependent schemes use the CFL step of `u` itself.
pub fn steady_residual(config: &SolverConfig, u: &GridFunction) -> Result<GridFunction> {
    let mut m = Marcher::new(config, u, None)?;
    let (rates, _) = m.rates();
    let values = rates.into_iter().flatten().collect();
    GridFunction::from_values(config.grid, 4, values)
}

/// Fourth-order central flux-difference rate of `u` with the config's
/// boundary ghosts: a truncation-error postprocessor more accurate than any
/// marched scheme in smooth regions.
pub fn central_residual(config: &SolverConfig, u: &GridFunction) -> Result<GridFunction> {
    let mut m = Marcher::new(config, u, None)?;
    let values = m.central_rates().into_iter().flatten().collect();
    GridFunction::from_values(config.grid, 4, values)
}

#[cfg(test)]
mod tests;
