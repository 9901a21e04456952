use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::roots::bracketed_root;
use super::shock::rankine_hugoniot_residual;
use super::{prandtl_meyer, GasModel, PrimitiveState};
use crate::error::Result;
use crate::grid::{Grid, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock,
    SlipLine,
    ExpansionFan,
}

/// A discontinuity or fan emanating from the pattern origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub name: String,
    pub kind: WaveKind,
    /// Ray angles from the origin (two for a fan: leading, trailing).
    pub angles: Vec<f64>,
    /// Region indices; for a slip line these are simply the two sides.
    pub upstream: usize,
    pub downstream: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub state: PrimitiveState,
}

/// Centred simple wave. `family` is `+1` for left-running Mach lines
/// (`theta + mu`) and `-1` for right-running ones (`theta - mu`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanSector {
    pub upstream: usize,
    pub downstream: usize,
    pub family: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorKind {
    Uniform(usize),
    Fan(FanSector),
}

/// Angular sector `[start, next.start)` around the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub start: f64,
    pub kind: SectorKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCheck {
    pub name: String,
    pub residual: f64,
}

/// Exact piecewise-constant (plus centred fans) steady flow made of rays
/// through a single interaction point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowPattern {
    pub name: String,
    pub origin: (f64, f64),
    pub gas: GasModel,
    pub regions: Vec<Region>,
    /// Sorted by `start`, all starts in `[-pi, pi)`.
    pub sectors: Vec<Sector>,
    pub waves: Vec<Wave>,
    pub freestream: usize,
    pub notes: Vec<String>,
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut a = a;
    while a >= PI {
        a -= 2.0 * PI;
    }
    while a < -PI {
        a += 2.0 * PI;
    }
    a
}

impl FlowPattern {
    pub fn freestream_state(&self) -> PrimitiveState {
        self.regions[self.freestream].state
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name == name)
    }

    pub fn wave(&self, name: &str) -> Option<&Wave> {
        self.waves.iter().find(|w| w.name == name)
    }

    fn sector_at(&self, angle: f64) -> usize {
        match self.sectors.iter().rposition(|s| s.start <= angle) {
            Some(k) => k,
            None => self.sectors.len() - 1,
        }
    }

    /// State at `(x, y)`; rays belong to the sector they open.
    pub fn eval(&self, x: f64, y: f64) -> PrimitiveState {
        let angle = (y - self.origin.1).atan2(x - self.origin.0);
        self.eval_ray(wrap_angle(angle))
    }

    /// State along the ray leaving the origin at `angle`.
    pub fn eval_ray(&self, angle: f64) -> PrimitiveState {
        match self.sectors[self.sector_at(angle)].kind {
            SectorKind::Uniform(r) => self.regions[r].state,
            SectorKind::Fan(fan) => self.fan_state(&fan, angle),
        }
    }

    fn fan_state(&self, fan: &FanSector, ray: f64) -> PrimitiveState {
        let gas = &self.gas;
        let up = self.regions[fan.upstream].state;
        let down = self.regions[fan.downstream].state;
        let (m_up, m_down) = (up.mach(gas), down.mach(gas));
        let nu_up = prandtl_meyer(m_up, gas).unwrap_or(0.0);
        // nu + family * theta is constant through the fan
        let invariant = nu_up + fan.family * up.flow_angle();
        let theta_of = |m: f64| {
            let nu = prandtl_meyer(m, gas).unwrap_or(0.0);
            -fan.family * (nu - invariant)
        };
        let ray_of = |m: f64| theta_of(m) + fan.family * (1.0 / m).asin();
        let (lo, hi) = if m_up <= m_down { (m_up, m_down) } else { (m_down, m_up) };
        let mach = bracketed_root(|m| ray_of(m) - ray, lo, hi, 1e-15).unwrap_or_else(|| {
            if (ray_of(lo) - ray).abs() < (ray_of(hi) - ray).abs() {
                lo
            } else {
                hi
            }
        });
        isentropic(&up, mach, theta_of(mach), gas)
    }

    /// Every invariant residual: jump conditions, slip-line matching, fan
    /// edge continuity and sector ordering.
    pub fn checks(&self) -> Vec<PatternCheck> {
        let gas = &self.gas;
        let mut out = Vec::new();
        let ordered = self.sectors.windows(2).all(|w| w[0].start < w[1].start)
            && self.sectors.iter().all(|s| s.start >= -PI && s.start < PI);
        out.push(PatternCheck {
            name: "sector tiling".into(),
            residual: if ordered { 0.0 } else { 1.0 },
        });
        for w in &self.waves {
            let a = self.regions[w.upstream].state;
            let b = self.regions[w.downstream].state;
            match w.kind {
                WaveKind::Shock => out.push(PatternCheck {
                    name: format!("{}: Rankine-Hugoniot", w.name),
                    residual: rankine_hugoniot_residual(&a, &b, w.angles[0], gas),
                }),
                WaveKind::SlipLine => {
                    out.push(PatternCheck {
                        name: format!("{}: pressure match", w.name),
                        residual: (a.p - b.p).abs() / a.p.max(b.p),
                    });
                    let dir = (a.flow_angle() - b.flow_angle())
                        .abs()
                        .max((a.flow_angle() - w.angles[0]).abs());
                    out.push(PatternCheck {
                        name: format!("{}: flow direction", w.name),
                        residual: dir,
                    });
                }
                WaveKind::ExpansionFan => {
                    let lead = self.eval_ray(w.angles[0]);
                    let trail = self.eval_ray(w.angles[1] - 1e-14);
                    out.push(PatternCheck {
                        name: format!("{}: leading edge continuity", w.name),
                        residual: state_gap(&lead, &a),
                    });
                    out.push(PatternCheck {
                        name: format!("{}: trailing edge continuity", w.name),
                        residual: state_gap(&trail, &b),
                    });
                }
            }
        }
        out
    }

    pub fn max_residual(&self) -> f64 {
        self.checks().iter().fold(0.0, |m, c| m.max(c.residual))
    }

    /// Plain-text report of regions, waves and invariant residuals.
    pub fn summary(&self) -> String {
        let gas = &self.gas;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "pattern {} origin ({:.6}, {:.6})",
            self.name, self.origin.0, self.origin.1
        );
        for note in &self.notes {
            let _ = writeln!(s, "note {note}");
        }
        let _ = writeln!(s, "regions");
        for r in &self.regions {
            let st = r.state;
            let _ = writeln!(
                s,
                "  {:<12} rho={:.12} u={:.12} v={:.12} p={:.12} M={:.9} dir={:.9}deg",
                r.name,
                st.rho,
                st.u,
                st.v,
                st.p,
                st.mach(gas),
                st.flow_angle().to_degrees()
            );
        }
        let _ = writeln!(s, "waves");
        for w in &self.waves {
            let angles: Vec<String> = w.angles.iter().map(|a| format!("{:.9}", a.to_degrees())).collect();
            let _ = writeln!(
                s,
                "  {:<20} {:?} rays=[{}]deg between {} and {}",
                w.name,
                w.kind,
                angles.join(", "),
                self.regions[w.upstream].name,
                self.regions[w.downstream].name
            );
        }
        let _ = writeln!(s, "checks");
        for c in self.checks() {
            let _ = writeln!(s, "  {:<44} {:.3e}", c.name, c.residual);
        }
        s
    }
}

fn state_gap(a: &PrimitiveState, b: &PrimitiveState) -> f64 {
    let scale = b.speed().max(1e-300);
    ((a.rho - b.rho).abs() / b.rho)
        .max((a.p - b.p).abs() / b.p)
        .max((a.u - b.u).abs() / scale)
        .max((a.v - b.v).abs() / scale)
}

/// Isentropic state at Mach `mach` and direction `theta`, same stagnation
/// conditions as `reference`.
pub(crate) fn isentropic(reference: &PrimitiveState, mach: f64, theta: f64, gas: &GasModel) -> PrimitiveState {
    let g = gas.gamma;
    let m0 = reference.mach(gas);
    let ratio = (1.0 + 0.5 * (g - 1.0) * m0 * m0) / (1.0 + 0.5 * (g - 1.0) * mach * mach);
    let p = reference.p * ratio.powf(g / (g - 1.0));
    let rho = reference.rho * ratio.powf(1.0 / (g - 1.0));
    let c = (g * p / rho).sqrt();
    PrimitiveState {
        rho,
        u: mach * c * theta.cos(),
        v: mach * c * theta.sin(),
        p,
    }
}

/// Samples the pattern at every cell centre as conserved variables.
pub fn project_pattern(pattern: &FlowPattern, grid: &Grid, gas: &GasModel) -> Result<GridFunction> {
    GridFunction::from_fn(*grid, 4, |x, y, out| {
        out.copy_from_slice(&pattern.eval(x, y).to_conserved(gas));
    })
}
