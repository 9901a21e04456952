use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::roots::bracketed_root;
use super::{GasModel, PrimitiveState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    #[default]
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObliqueShockSolution {
    /// Shock angle measured from the upstream flow direction.
    pub beta: f64,
    /// Signed turning: positive turns the flow counterclockwise.
    pub deflection: f64,
    /// Absolute direction of the downstream-going half of the shock line.
    pub shock_direction: f64,
    pub upstream: PrimitiveState,
    pub downstream: PrimitiveState,
    pub branch: Branch,
}

/// Flow deflection produced by a shock at angle `beta` (theta-beta-M relation).
pub(crate) fn deflection_for_angle(beta: f64, mach: f64, gamma: f64) -> f64 {
    let m2 = mach * mach;
    let s = beta.sin();
    let num = 2.0 / beta.tan() * (m2 * s * s - 1.0);
    let den = m2 * (gamma + (2.0 * beta).cos()) + 2.0;
    (num / den).atan()
}

/// Shock angle at which the deflection is largest.
pub(crate) fn angle_of_max_deflection(mach: f64, gamma: f64) -> f64 {
    let m2 = mach * mach;
    let g1 = gamma + 1.0;
    let root = (g1 * (g1 * m2 * m2 + 8.0 * (gamma - 1.0) * m2 + 16.0)).sqrt();
    let s2 = (g1 * m2 - 4.0 + root) / (4.0 * gamma * m2);
    s2.sqrt().asin()
}

/// Largest attached-shock deflection at Mach `mach`.
pub fn max_deflection(mach: f64, gas: &GasModel) -> f64 {
    deflection_for_angle(angle_of_max_deflection(mach, gas.gamma), mach, gas.gamma)
}

/// Normal-shock jumps `(p2/p1, rho2/rho1, M2)` for upstream normal Mach `mn`.
pub fn normal_shock(mn: f64, gas: &GasModel) -> (f64, f64, f64) {
    let g = gas.gamma;
    let m2 = mn * mn;
    let pr = 1.0 + 2.0 * g / (g + 1.0) * (m2 - 1.0);
    let rr = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
    let down = ((1.0 + 0.5 * (g - 1.0) * m2) / (g * m2 - 0.5 * (g - 1.0))).sqrt();
    (pr, rr, down)
}

/// Attached oblique shock turning `upstream` by the signed `deflection`.
pub fn oblique_shock(
    upstream: PrimitiveState,
    deflection: f64,
    gas: &GasModel,
    branch: Branch,
) -> Result<ObliqueShockSolution> {
    upstream.validate()?;
    let mach = upstream.mach(gas);
    if !(mach > 1.0) {
        return Err(Error::Subsonic(mach));
    }
    let theta = deflection.abs();
    let beta_star = angle_of_max_deflection(mach, gas.gamma);
    let theta_max = deflection_for_angle(beta_star, mach, gas.gamma);
    if !theta.is_finite() || theta > theta_max {
        return Err(Error::Detached {
            mach,
            deflection_deg: theta.to_degrees(),
            max_deg: theta_max.to_degrees(),
        });
    }
    let mu = (1.0 / mach).asin();
    let beta = match (branch, theta == 0.0) {
        (Branch::Weak, true) => mu,
        (Branch::Strong, true) => FRAC_PI_2,
        (Branch::Weak, false) => bracketed_root(
            |b| deflection_for_angle(b, mach, gas.gamma) - theta,
            mu,
            beta_star,
            1e-12,
        )
        .unwrap_or(beta_star),
        (Branch::Strong, false) => bracketed_root(
            |b| deflection_for_angle(b, mach, gas.gamma) - theta,
            beta_star,
            FRAC_PI_2,
            1e-12,
        )
        .unwrap_or(beta_star),
    };
    let sign = if deflection < 0.0 { -1.0 } else { 1.0 };
    let psi = upstream.flow_angle() + sign * beta;
    let downstream = if theta == 0.0 && branch == Branch::Weak {
        upstream
    } else {
        jump_across(&upstream, psi, sign, gas)
    };
    Ok(ObliqueShockSolution {
        beta,
        deflection,
        shock_direction: psi,
        upstream,
        downstream,
        branch,
    })
}

/// Downstream state behind a shock line of direction `psi`; `sign` selects the
/// side the upstream flow comes from.
fn jump_across(up: &PrimitiveState, psi: f64, sign: f64, gas: &GasModel) -> PrimitiveState {
    let (t, n) = frame(psi, sign);
    let wt = up.u * t.0 + up.v * t.1;
    let wn = up.u * n.0 + up.v * n.1;
    let (pr, rr, _) = normal_shock(wn / up.sound_speed(gas), gas);
    let wn2 = wn / rr;
    PrimitiveState {
        rho: up.rho * rr,
        u: wt * t.0 + wn2 * n.0,
        v: wt * t.1 + wn2 * n.1,
        p: up.p * pr,
    }
}

fn frame(psi: f64, sign: f64) -> ((f64, f64), (f64, f64)) {
    let (s, c) = psi.sin_cos();
    ((c, s), (sign * s, -sign * c))
}

/// Largest relative violation of the jump conditions (mass, normal momentum,
/// tangential velocity, total enthalpy) across a shock line of direction `psi`.
pub fn rankine_hugoniot_residual(up: &PrimitiveState, down: &PrimitiveState, psi: f64, gas: &GasModel) -> f64 {
    let (s, c) = psi.sin_cos();
    let (t, n) = ((c, s), (s, -c));
    let wt1 = up.u * t.0 + up.v * t.1;
    let wn1 = up.u * n.0 + up.v * n.1;
    let wt2 = down.u * t.0 + down.v * t.1;
    let wn2 = down.u * n.0 + down.v * n.1;
    let mass = (up.rho * wn1 - down.rho * wn2).abs() / (up.rho * wn1).abs().max(1e-300);
    let mom1 = up.p + up.rho * wn1 * wn1;
    let mom = (mom1 - down.p - down.rho * wn2 * wn2).abs() / mom1;
    let tang = (wt1 - wt2).abs() / up.speed().max(1e-300);
    let h1 = up.total_enthalpy(gas);
    let energy = (h1 - down.total_enthalpy(gas)).abs() / h1;
    mass.max(mom).max(tang).max(energy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn zero_deflection_is_mach_wave() {
        let gas = GasModel::default();
        let up = PrimitiveState::freestream(3.0, &gas);
        let s = oblique_shock(up, 0.0, &gas, Branch::Weak).unwrap();
        assert!((s.beta - (1.0f64 / 3.0).asin()).abs() < 1e-15);
        assert_eq!(s.downstream, up);
    }

    #[test]
    fn max_deflection_frozen_values() {
        // scipy bounded maximisation of theta(beta)
        let gas = GasModel::default();
        assert!((max_deflection(3.5, &gas).to_degrees() - 36.86701012918265).abs() < 1e-8);
        assert!((max_deflection(4.0, &gas).to_degrees() - 38.7738608453917).abs() < 1e-8);
        assert!((max_deflection(2.0, &gas).to_degrees() - 22.973531760937938).abs() < 1e-8);
    }

    #[test]
    fn detachment_and_subsonic_errors() {
        let gas = GasModel::default();
        let up = PrimitiveState::freestream(2.0, &gas);
        assert!(matches!(
            oblique_shock(up, deg(45.0), &gas, Branch::Weak),
            Err(Error::Detached { .. })
        ));
        let slow = PrimitiveState::freestream(0.8, &gas);
        assert!(matches!(
            oblique_shock(slow, deg(5.0), &gas, Branch::Weak),
            Err(Error::Subsonic(_))
        ));
    }

    #[test]
    fn mach4_twenty_degrees_frozen() {
        // beta, p2/p1, rho2/rho1, M2 from an independent scipy brentq solve
        let gas = GasModel::default();
        let up = PrimitiveState::freestream(4.0, &gas);
        let s = oblique_shock(up, -deg(20.0), &gas, Branch::Weak).unwrap();
        assert!((s.beta.to_degrees() - 32.46389685027424).abs() < 1e-9);
        assert!((s.downstream.p / up.p - 5.211572502220712).abs() < 1e-9);
        assert!((s.downstream.rho / up.rho - 2.8782256018888135).abs() < 1e-9);
        assert!((s.downstream.mach(&gas) - 2.56861688903135).abs() < 1e-9);
        assert!((s.downstream.flow_angle() + deg(20.0)).abs() < 1e-12);
        assert!((s.shock_direction + s.beta).abs() < 1e-15);
        assert!(rankine_hugoniot_residual(&up, &s.downstream, s.shock_direction, &gas) < 1e-13);
    }

    #[test]
    fn strong_branch_is_steeper_and_subsonic() {
        let gas = GasModel::default();
        let up = PrimitiveState::freestream(3.0, &gas);
        let weak = oblique_shock(up, deg(15.0), &gas, Branch::Weak).unwrap();
        let strong = oblique_shock(up, deg(15.0), &gas, Branch::Strong).unwrap();
        assert!(strong.beta > weak.beta);
        assert!(strong.downstream.mach(&gas) < 1.0);
        assert!((strong.downstream.flow_angle() - deg(15.0)).abs() < 1e-10);
    }

    #[test]
    fn normal_shock_mach2_frozen() {
        // standard tables: p2/p1 = 4.5, rho2/rho1 = 2.6667, M2 = 0.57735
        let gas = GasModel::default();
        let (pr, rr, m2) = normal_shock(2.0, &gas);
        assert!((pr - 4.5).abs() < 1e-14);
        assert!((rr - 8.0 / 3.0).abs() < 1e-14);
        assert!((m2 - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }
}
