//! Exact perfect-gas relations and analytic shock-interaction patterns.

mod edney;
mod pattern;
mod prandtl_meyer;
mod roots;
mod shock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use edney::{
    build_edney1, build_edney6, matching_branch, single_wedge, uniform_flow, MatchingBranch, PatternGeometry,
    PATTERN_TOLERANCE,
};
pub use pattern::{project_pattern, FanSector, FlowPattern, PatternCheck, Region, Sector, SectorKind, Wave, WaveKind};
pub use prandtl_meyer::{inverse_prandtl_meyer, max_prandtl_meyer, prandtl_meyer};
pub use shock::{max_deflection, normal_shock, oblique_shock, rankine_hugoniot_residual, Branch, ObliqueShockSolution};

/// Conserved variables `[rho, rho*u, rho*v, rho*E]`.
pub type Conserved = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
    pub gas_constant: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel::new(1.4).unwrap()
    }
}

impl GasModel {
    /// Ideal gas with `R = 1/gamma`, so the nondimensional freestream
    /// (`rho = 1`, `p = 1/gamma`) has unit temperature.
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidState(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(GasModel {
            gamma,
            gas_constant: 1.0 / gamma,
        })
    }
}

/// Density, velocity components and pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, u: f64, v: f64, p: f64) -> Result<Self> {
        let s = PrimitiveState { rho, u, v, p };
        s.validate()?;
        Ok(s)
    }

    /// Nondimensional freestream along +x: `rho = 1`, `p = 1/gamma`, unit sound speed.
    pub fn freestream(mach: f64, gas: &GasModel) -> Self {
        PrimitiveState {
            rho: 1.0,
            u: mach,
            v: 0.0,
            p: 1.0 / gas.gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rho > 0.0
            && self.p > 0.0
            && self.rho.is_finite()
            && self.p.is_finite()
            && self.u.is_finite()
            && self.v.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidState(format!("{self:?}")))
        }
    }

    pub fn speed(&self) -> f64 {
        self.u.hypot(self.v)
    }

    /// Flow direction measured counterclockwise from +x.
    pub fn flow_angle(&self) -> f64 {
        self.v.atan2(self.u)
    }

    pub fn sound_speed(&self, gas: &GasModel) -> f64 {
        (gas.gamma * self.p / self.rho).sqrt()
    }

    pub fn mach(&self, gas: &GasModel) -> f64 {
        self.speed() / self.sound_speed(gas)
    }

    pub fn temperature(&self, gas: &GasModel) -> f64 {
        self.p / (self.rho * gas.gas_constant)
    }

    /// `p / rho^gamma`, nondecreasing across admissible shocks.
    pub fn entropy_function(&self, gas: &GasModel) -> f64 {
        self.p / self.rho.powf(gas.gamma)
    }

    pub fn total_enthalpy(&self, gas: &GasModel) -> f64 {
        gas.gamma / (gas.gamma - 1.0) * self.p / self.rho + 0.5 * (self.u * self.u + self.v * self.v)
    }

    pub fn to_conserved(&self, gas: &GasModel) -> Conserved {
        let e = self.p / (gas.gamma - 1.0) + 0.5 * self.rho * (self.u * self.u + self.v * self.v);
        [self.rho, self.rho * self.u, self.rho * self.v, e]
    }

    pub fn from_conserved(q: &[f64], gas: &GasModel) -> Self {
        let rho = q[0];
        let u = q[1] / rho;
        let v = q[2] / rho;
        let p = (gas.gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
        PrimitiveState { rho, u, v, p }
    }

    /// Mirror image about the x axis.
    pub fn reflected(&self) -> Self {
        PrimitiveState { v: -self.v, ..*self }
    }

    /// Same thermodynamic state with the velocity rotated to `angle`.
    pub fn with_direction(&self, angle: f64, speed: f64) -> Self {
        PrimitiveState {
            u: speed * angle.cos(),
            v: speed * angle.sin(),
            ..*self
        }
    }
}
