use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::pattern::{wrap_angle, FanSector, FlowPattern, Region, Sector, SectorKind, Wave, WaveKind};
use super::roots::bracketed_root;
use super::shock::{max_deflection, oblique_shock, Branch};
use super::{max_prandtl_meyer, prandtl_meyer, GasModel, PrimitiveState};
use crate::error::{Error, Result};

/// Largest residual accepted by the post-construction invariant check.
pub const PATTERN_TOLERANCE: f64 = 1e-10;

/// Placement of the point every wave of a pattern radiates from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternGeometry {
    pub origin: (f64, f64),
}

impl Default for PatternGeometry {
    fn default() -> Self {
        PatternGeometry { origin: (0.4, 0.5) }
    }
}

impl PatternGeometry {
    pub fn at(x: f64, y: f64) -> Self {
        PatternGeometry { origin: (x, y) }
    }

    /// Wedge apex on the left boundary, shock sweeping up through the square.
    pub fn wedge_default() -> Self {
        PatternGeometry { origin: (0.0, 0.2) }
    }
}

fn region(name: &str, state: PrimitiveState) -> Region {
    Region {
        name: name.into(),
        state,
    }
}

fn shock(name: &str, ray: f64, upstream: usize, downstream: usize) -> Wave {
    Wave {
        name: name.into(),
        kind: WaveKind::Shock,
        angles: vec![wrap_angle(ray)],
        upstream,
        downstream,
    }
}

fn uniform(start: f64, r: usize) -> Sector {
    Sector {
        start: wrap_angle(start),
        kind: SectorKind::Uniform(r),
    }
}

fn finish(mut p: FlowPattern) -> Result<FlowPattern> {
    p.sectors.sort_by(|a, b| a.start.total_cmp(&b.start));
    let worst = p.checks().into_iter().find(|c| !(c.residual < PATTERN_TOLERANCE));
    match worst {
        None => Ok(p),
        Some(c) => Err(Error::Matching {
            interaction: "pattern invariants",
            reason: format!("{} in {}: residual {:.3e}", c.name, p.name, c.residual),
        }),
    }
}

/// Flow without waves.
pub fn uniform_flow(freestream: PrimitiveState, gas: &GasModel) -> Result<FlowPattern> {
    freestream.validate()?;
    finish(FlowPattern {
        name: "freestream".into(),
        origin: (0.0, 0.0),
        gas: *gas,
        regions: vec![region("freestream", freestream)],
        sectors: vec![uniform(-PI, 0)],
        waves: Vec::new(),
        freestream: 0,
        notes: Vec::new(),
    })
}

/// Straight shock line through the origin turning the flow by `deflection`
/// (positive is counterclockwise, as behind a lower wall).
fn single_line(
    name: &str,
    freestream: PrimitiveState,
    deflection: f64,
    geometry: PatternGeometry,
    gas: &GasModel,
) -> Result<FlowPattern> {
    let s = oblique_shock(freestream, deflection, gas, Branch::Weak)?;
    let psi = s.shock_direction;
    let (down_start, free_start) = if deflection > 0.0 {
        (psi - PI, psi)
    } else {
        (psi, psi + PI)
    };
    finish(FlowPattern {
        name: name.into(),
        origin: geometry.origin,
        gas: *gas,
        regions: vec![region("freestream", freestream), region("shocked", s.downstream)],
        sectors: vec![uniform(down_start, 1), uniform(free_start, 0)],
        waves: vec![shock("shock", psi, 0, 1)],
        freestream: 0,
        notes: Vec::new(),
    })
}

/// Attached shock from a wedge of half-angle `chi` whose apex is the origin;
/// the shocked region lies below the shock.
pub fn single_wedge(
    freestream: PrimitiveState,
    chi: f64,
    geometry: PatternGeometry,
    gas: &GasModel,
) -> Result<FlowPattern> {
    if chi == 0.0 {
        let mut p = uniform_flow(freestream, gas)?;
        p.origin = geometry.origin;
        return Ok(p);
    }
    if !(chi > 0.0) {
        return Err(Error::InvalidConfig(format!("wedge angle must be positive, got {chi}")));
    }
    let mut p = single_line("single_wedge", freestream, chi, geometry, gas)?;
    p.regions[1].name = "wedge".into();
    p.waves[0].name = "wedge shock".into();
    Ok(p)
}

/// Regular crossing of two opposite-family shocks.
///
/// The upper shock turns the flow clockwise by `chi_upper`, the lower one
/// counterclockwise by `chi_lower`. The refracted shocks leave regions 4
/// (above) and 5 (below) separated by a slip line whose direction equalizes
/// their pressures.
pub fn build_edney1(
    freestream: PrimitiveState,
    chi_upper: f64,
    chi_lower: f64,
    geometry: PatternGeometry,
    gas: &GasModel,
) -> Result<FlowPattern> {
    if !(chi_upper >= 0.0 && chi_lower >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "wedge angles must be nonnegative, got {chi_upper} and {chi_lower}"
        )));
    }
    match (chi_upper == 0.0, chi_lower == 0.0) {
        (true, true) => {
            let mut p = uniform_flow(freestream, gas)?;
            p.origin = geometry.origin;
            return Ok(p);
        }
        (true, false) => return single_line("edney1", freestream, chi_lower, geometry, gas),
        (false, true) => return single_line("edney1", freestream, -chi_upper, geometry, gas),
        _ => {}
    }
    let up = oblique_shock(freestream, -chi_upper, gas, Branch::Weak)?;
    let lo = oblique_shock(freestream, chi_lower, gas, Branch::Weak)?;
    let (s2, s3) = (up.downstream, lo.downstream);
    let (th2, th3) = (s2.flow_angle(), s3.flow_angle());
    let eps = 1e-12;
    let lo_d = th2.max(th3 - max_deflection(s3.mach(gas), gas)) + eps;
    let hi_d = th3.min(th2 + max_deflection(s2.mach(gas), gas)) - eps;
    let mismatch = |delta: f64| -> f64 {
        let p4 = oblique_shock(s2, delta - th2, gas, Branch::Weak).map(|s| s.downstream.p);
        let p5 = oblique_shock(s3, delta - th3, gas, Branch::Weak).map(|s| s.downstream.p);
        match (p4, p5) {
            (Ok(a), Ok(b)) => (a - b) / (a + b),
            _ => f64::NAN,
        }
    };
    let delta = if lo_d < hi_d {
        bracketed_root(mismatch, lo_d, hi_d, 1e-14)
    } else {
        None
    }
    .ok_or_else(|| Error::Matching {
        interaction: "edney1 slip line",
        reason: format!(
            "no pressure match for slip-line direction in [{:.6}, {:.6}] deg",
            lo_d.to_degrees(),
            hi_d.to_degrees()
        ),
    })?;
    let t4 = oblique_shock(s2, delta - th2, gas, Branch::Weak)?;
    let t5 = oblique_shock(s3, delta - th3, gas, Branch::Weak)?;
    // regions: 0 freestream, 1 behind upper, 2 behind lower, 3 above slip, 4 below slip
    let regions = vec![
        region("freestream", freestream),
        region("upper", s2),
        region("lower", s3),
        region("upper_refracted", t4.downstream),
        region("lower_refracted", t5.downstream),
    ];
    let sectors = vec![
        uniform(-PI, 0),
        uniform(lo.shock_direction - PI, 2),
        uniform(t5.shock_direction, 4),
        uniform(delta, 3),
        uniform(t4.shock_direction, 1),
        uniform(up.shock_direction + PI, 0),
    ];
    let waves = vec![
        shock("upper incident", up.shock_direction + PI, 0, 1),
        shock("lower incident", lo.shock_direction - PI, 0, 2),
        shock("upper refracted", t4.shock_direction, 1, 3),
        shock("lower refracted", t5.shock_direction, 2, 4),
        Wave {
            name: "slip line".into(),
            kind: WaveKind::SlipLine,
            angles: vec![delta],
            upstream: 3,
            downstream: 4,
        },
    ];
    finish(FlowPattern {
        name: "edney1".into(),
        origin: geometry.origin,
        gas: *gas,
        regions,
        sectors,
        waves,
        freestream: 0,
        notes: vec![format!("slip line direction {:.12} deg", delta.to_degrees())],
    })
}

/// Which wave turns the flow behind the second ramp shock onto the slip line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingBranch {
    Expansion,
    Compression,
}

impl MatchingBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchingBranch::Expansion => "expansion",
            MatchingBranch::Compression => "compression",
        }
    }
}

/// Coalescence of two same-family shocks from consecutive ramps.
///
/// `chi1` is the first ramp angle and `chi2` the total turning after the
/// second ramp, both measured from the freestream. The merged shock turns
/// freestream directly to the slip-line direction; a centred fan (or weak
/// shock) brings the doubly shocked flow to the same pressure and direction.
pub fn build_edney6(
    freestream: PrimitiveState,
    chi1: f64,
    chi2: f64,
    geometry: PatternGeometry,
    gas: &GasModel,
) -> Result<FlowPattern> {
    if !(chi1 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "first ramp angle must be positive, got {chi1}"
        )));
    }
    if chi2 == 0.0 || chi2 == chi1 {
        return single_line("edney6", freestream, chi1, geometry, gas);
    }
    if chi2 < chi1 {
        return Err(Error::InvalidConfig(format!(
            "total ramp angle {} deg is below the first ramp angle {} deg",
            chi2.to_degrees(),
            chi1.to_degrees()
        )));
    }
    let m0 = freestream.mach(gas);
    let theta_max0 = max_deflection(m0, gas);
    if chi2 >= theta_max0 {
        return Err(Error::Detached {
            mach: m0,
            deflection_deg: chi2.to_degrees(),
            max_deg: theta_max0.to_degrees(),
        });
    }
    let first = oblique_shock(freestream, chi1, gas, Branch::Weak)?;
    let s1 = first.downstream;
    let second = oblique_shock(s1, chi2 - chi1, gas, Branch::Weak)?;
    let s2 = second.downstream;
    let theta0 = freestream.flow_angle();
    let m2 = s2.mach(gas);
    let nu2 = prandtl_meyer(m2, gas)?;

    let merged_p = |delta: f64| oblique_shock(freestream, delta - theta0, gas, Branch::Weak).map(|s| s.downstream.p);
    let single_p = merged_p(chi2)?;
    let branch = if single_p < s2.p {
        MatchingBranch::Expansion
    } else {
        MatchingBranch::Compression
    };
    let eps = 1e-12;
    let (lo_d, hi_d) = match branch {
        MatchingBranch::Expansion => (
            chi2 + eps,
            (theta0 + theta_max0).min(chi2 + max_prandtl_meyer(gas) - nu2) - eps,
        ),
        MatchingBranch::Compression => ((chi2 - max_deflection(m2, gas)).max(theta0) + eps, chi2 - eps),
    };
    let matched_p = |delta: f64| -> Result<f64> {
        match branch {
            MatchingBranch::Expansion => {
                let m = super::inverse_prandtl_meyer(nu2 + delta - chi2, gas)?;
                Ok(super::pattern::isentropic(&s2, m, delta, gas).p)
            }
            MatchingBranch::Compression => oblique_shock(s2, delta - chi2, gas, Branch::Weak).map(|s| s.downstream.p),
        }
    };
    let mismatch = |delta: f64| match (merged_p(delta), matched_p(delta)) {
        (Ok(a), Ok(b)) => (a - b) / (a + b),
        _ => f64::NAN,
    };
    let delta = if lo_d < hi_d {
        bracketed_root(mismatch, lo_d, hi_d, 1e-14)
    } else {
        None
    }
    .ok_or_else(|| Error::Matching {
        interaction: "edney6 triple point",
        reason: format!(
            "{} branch: no pressure match in [{:.6}, {:.6}] deg",
            branch.as_str(),
            lo_d.to_degrees(),
            hi_d.to_degrees()
        ),
    })?;
    let merged = oblique_shock(freestream, delta - theta0, gas, Branch::Weak)?;

    // regions: 0 freestream, 1 first ramp, 2 second ramp, 3 behind merged, 4 behind matching wave
    let mut regions = vec![
        region("freestream", freestream),
        region("ramp1", s1),
        region("ramp2", s2),
        region("merged", merged.downstream),
    ];
    let mut sectors = vec![
        uniform(-PI, 0),
        uniform(first.shock_direction - PI, 1),
        uniform(second.shock_direction - PI, 2),
    ];
    let mut waves = vec![
        shock("first shock", first.shock_direction - PI, 0, 1),
        shock("second shock", second.shock_direction - PI, 1, 2),
        shock("merged shock", merged.shock_direction, 0, 3),
    ];
    match branch {
        MatchingBranch::Expansion => {
            let m4 = super::inverse_prandtl_meyer(nu2 + delta - chi2, gas)?;
            let s4 = super::pattern::isentropic(&s2, m4, delta, gas);
            regions.push(region("expanded", s4));
            let lead = chi2 - (1.0 / m2).asin();
            let trail = delta - (1.0 / m4).asin();
            sectors.push(Sector {
                start: lead,
                kind: SectorKind::Fan(FanSector {
                    upstream: 2,
                    downstream: 4,
                    family: -1.0,
                }),
            });
            sectors.push(uniform(trail, 4));
            waves.push(Wave {
                name: "expansion fan".into(),
                kind: WaveKind::ExpansionFan,
                angles: vec![lead, trail],
                upstream: 2,
                downstream: 4,
            });
        }
        MatchingBranch::Compression => {
            let c = oblique_shock(s2, delta - chi2, gas, Branch::Weak)?;
            regions.push(region("recompressed", c.downstream));
            sectors.push(uniform(c.shock_direction, 4));
            waves.push(shock("matching shock", c.shock_direction, 2, 4));
        }
    }
    sectors.push(uniform(delta, 3));
    sectors.push(uniform(merged.shock_direction, 0));
    waves.push(Wave {
        name: "slip line".into(),
        kind: WaveKind::SlipLine,
        angles: vec![delta],
        upstream: 4,
        downstream: 3,
    });
    finish(FlowPattern {
        name: "edney6".into(),
        origin: geometry.origin,
        gas: *gas,
        regions,
        sectors,
        waves,
        freestream: 0,
        notes: vec![
            format!("matching wave: {}", branch.as_str()),
            format!("slip line direction {:.12} deg", delta.to_degrees()),
        ],
    })
}

/// Matching-wave branch recorded by [`build_edney6`], if any.
pub fn matching_branch(pattern: &FlowPattern) -> Option<MatchingBranch> {
    pattern
        .notes
        .iter()
        .find_map(|n| match n.strip_prefix("matching wave: ") {
            Some("expansion") => Some(MatchingBranch::Expansion),
            Some("compression") => Some(MatchingBranch::Compression),
            _ => None,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn gas() -> GasModel {
        GasModel::default()
    }

    /// Independent slip-line oracle: Newton on the deflection with a
    /// finite-difference slope, using only the theta-beta-M relation.
    fn oracle_pressure_behind(mach: f64, theta: f64) -> (f64, f64) {
        let g = 1.4;
        let f = |b: f64| {
            let s = b.sin();
            (2.0 / b.tan() * (mach * mach * s * s - 1.0) / (mach * mach * (g + (2.0 * b).cos()) + 2.0)).atan() - theta
        };
        let (mut a, mut b) = ((1.0 / mach).asin(), 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let beta = 0.5 * (a + b);
        let mn = mach * beta.sin();
        let pr = 1.0 + 2.0 * g / (g + 1.0) * (mn * mn - 1.0);
        let mn2 = ((1.0 + 0.5 * (g - 1.0) * mn * mn) / (g * mn * mn - 0.5 * (g - 1.0))).sqrt();
        (pr, mn2 / (beta - theta).sin())
    }

    #[test]
    fn edney1_matches_newton_oracle() {
        let g = gas();
        let free = PrimitiveState::freestream(4.0, &g);
        let p = build_edney1(free, deg(20.0), deg(15.0), PatternGeometry::default(), &g).unwrap();
        let (pr2, m2) = oracle_pressure_behind(4.0, deg(20.0));
        let (pr3, m3) = oracle_pressure_behind(4.0, deg(15.0));
        let p0 = 1.0 / 1.4;
        let mismatch = |d: f64| {
            let (a, _) = oracle_pressure_behind(m2, d + deg(20.0));
            let (b, _) = oracle_pressure_behind(m3, deg(15.0) - d);
            pr2 * a - pr3 * b
        };
        let mut d = 0.0;
        for _ in 0..50 {
            let h = 1e-7;
            let slope = (mismatch(d + h) - mismatch(d - h)) / (2.0 * h);
            d -= mismatch(d) / slope;
        }
        let slip = p.wave("slip line").unwrap().angles[0];
        assert!((slip - d).abs() < 1e-10, "{} vs {}", slip, d);
        let p4 = p.region("upper_refracted").unwrap().state.p;
        let (a, _) = oracle_pressure_behind(m2, d + deg(20.0));
        assert!((p4 - p0 * pr2 * a).abs() / p4 < 1e-10);
        assert!(p.max_residual() < PATTERN_TOLERANCE);
        assert_eq!(p.regions.len(), 5);
    }

    #[test]
    fn symmetric_edney1_has_horizontal_slip_line() {
        let g = gas();
        let free = PrimitiveState::freestream(4.0, &g);
        let p = build_edney1(free, deg(15.0), deg(15.0), PatternGeometry::default(), &g).unwrap();
        assert!(p.wave("slip line").unwrap().angles[0].abs() < 1e-12);
        let a = p.region("upper_refracted").unwrap().state;
        let b = p.region("lower_refracted").unwrap().state;
        assert!((a.p - b.p).abs() < 1e-12 * a.p);
    }

    #[test]
    fn edney1_mirror_symmetry() {
        let g = gas();
        let free = PrimitiveState::freestream(4.0, &g);
        let geo = PatternGeometry::default();
        let a = build_edney1(free, deg(20.0), deg(15.0), geo, &g).unwrap();
        let b = build_edney1(free, deg(15.0), deg(20.0), geo, &g).unwrap();
        for k in 0..400 {
            let x = 0.003 + (k % 20) as f64 * 0.05;
            let y = 0.002 + (k / 20) as f64 * 0.05;
            let sa = a.eval(x, y);
            let sb = b.eval(x, 2.0 * geo.origin.1 - y).reflected();
            for (u, v) in [(sa.rho, sb.rho), (sa.u, sb.u), (sa.v, sb.v), (sa.p, sb.p)] {
                assert!((u - v).abs() < 1e-12 * (1.0 + u.abs()), "({x},{y}) {sa:?} {sb:?}");
            }
        }
    }

    #[test]
    fn edney1_slip_line_sides() {
        let g = gas();
        let free = PrimitiveState::freestream(4.0, &g);
        let p = build_edney1(free, deg(20.0), deg(15.0), PatternGeometry::default(), &g).unwrap();
        let d = p.wave("slip line").unwrap().angles[0];
        let (x0, y0) = p.origin;
        let above = p.eval(x0 + 0.3 * (d + 1e-6).cos(), y0 + 0.3 * (d + 1e-6).sin());
        let below = p.eval(x0 + 0.3 * (d - 1e-6).cos(), y0 + 0.3 * (d - 1e-6).sin());
        assert!((above.p - below.p).abs() < 1e-10 * above.p);
        assert!((above.rho - below.rho).abs() > 1e-3);
        assert_eq!(p.eval(0.0, 0.5), free);
    }

    #[test]
    fn edney1_degenerates_to_single_shock() {
        let g = gas();
        let free = PrimitiveState::freestream(4.0, &g);
        let p = build_edney1(free, 0.0, deg(15.0), PatternGeometry::default(), &g).unwrap();
        assert_eq!(p.waves.len(), 1);
        assert_eq!(p.waves[0].kind, WaveKind::Shock);
        let q = build_edney1(free, deg(20.0), 0.0, PatternGeometry::default(), &g).unwrap();
        assert_eq!(q.waves.len(), 1);
        assert!((q.regions[1].state.flow_angle() + deg(20.0)).abs() < 1e-12);
        let u = build_edney1(free, 0.0, 0.0, PatternGeometry::default(), &g).unwrap();
        assert!(u.waves.is_empty());
    }

    #[test]
    fn edney1_detachment_is_reported() {
        let g = gas();
        let free = PrimitiveState::freestream(2.0, &g);
        let e = build_edney1(free, deg(30.0), deg(10.0), PatternGeometry::default(), &g).unwrap_err();
        assert!(matches!(e, Error::Detached { .. }));
    }

    #[test]
    fn edney6_triple_point_frozen() {
        let g = gas();
        let free = PrimitiveState::freestream(3.5, &g);
        let p = build_edney6(free, deg(15.0), deg(25.0), PatternGeometry::default(), &g).unwrap();
        assert_eq!(matching_branch(&p), Some(MatchingBranch::Expansion));
        let r1 = p.region("ramp1").unwrap().state;
        assert!((r1.p * 1.4 - 3.2331).abs() < 1e-3);
        assert!((r1.mach(&g) - 2.6053).abs() < 1e-3);
        let r2 = p.region("ramp2").unwrap().state;
        assert!((r2.p * 1.4 - 6.1485).abs() < 1e-3);
        assert!((r2.mach(&g) - 2.1760).abs() < 1e-3);
        let d = p.wave("slip line").unwrap().angles[0];
        assert!(d > deg(25.0));
        let merged = p.region("merged").unwrap().state;
        let expanded = p.region("expanded").unwrap().state;
        assert!((merged.p - expanded.p).abs() < 1e-10 * merged.p);
        assert!((merged.flow_angle() - expanded.flow_angle()).abs() < 1e-10);
        assert!(p.max_residual() < PATTERN_TOLERANCE);
    }

    #[test]
    fn edney6_matches_independent_root_solve() {
        // merged shock pressure vs isentropic expansion of ramp2, bisected on delta
        let g = gas();
        let free = PrimitiveState::freestream(3.5, &g);
        let p = build_edney6(free, deg(15.0), deg(25.0), PatternGeometry::default(), &g).unwrap();
        let r2 = p.region("ramp2").unwrap().state;
        let m2 = r2.mach(&g);
        let nu = |m: f64| {
            let k: f64 = (1.4 + 1.0) / (1.4 - 1.0);
            k.sqrt() * ((m * m - 1.0) / k).sqrt().atan() - (m * m - 1.0).sqrt().atan()
        };
        let inv_nu = |target: f64| {
            let (mut a, mut b) = (1.0, 50.0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if nu(m) < target {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        let f = |d: f64| {
            let (pr, _) = oracle_pressure_behind(3.5, d);
            let m4 = inv_nu(nu(m2) + d - deg(25.0));
            let ratio = (1.0 + 0.2 * m2 * m2) / (1.0 + 0.2 * m4 * m4);
            pr / 1.4 - r2.p * ratio.powf(3.5)
        };
        let (mut a, mut b) = (deg(25.0), deg(35.0));
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let d = p.wave("slip line").unwrap().angles[0];
        assert!((d - 0.5 * (a + b)).abs() < 1e-10);
    }

    #[test]
    fn edney6_fan_edges_are_continuous() {
        let g = gas();
        let free = PrimitiveState::freestream(3.5, &g);
        let p = build_edney6(free, deg(15.0), deg(25.0), PatternGeometry::default(), &g).unwrap();
        let fan = p.wave("expansion fan").unwrap();
        let trail = fan.angles[1];
        let down = p.region("expanded").unwrap().state;
        let s = p.eval_ray(trail - 1e-13);
        assert!((s.rho - down.rho).abs() < 1e-10);
        assert!((s.p - down.p).abs() < 1e-10);
        assert!((s.u - down.u).abs() < 1e-10 && (s.v - down.v).abs() < 1e-10);
        let mid = p.eval_ray(0.5 * (fan.angles[0] + trail));
        let up = p.region("ramp2").unwrap().state;
        assert!(mid.p < up.p && mid.p > down.p);
    }

    #[test]
    fn edney6_degenerate_and_error_cases() {
        let g = gas();
        let free = PrimitiveState::freestream(3.5, &g);
        let geo = PatternGeometry::default();
        let p = build_edney6(free, deg(15.0), 0.0, geo, &g).unwrap();
        assert_eq!(p.waves.len(), 1);
        assert!((p.regions[1].state.flow_angle() - deg(15.0)).abs() < 1e-12);
        assert!(build_edney6(free, deg(15.0), deg(15.0), geo, &g).unwrap().waves.len() == 1);
        assert!(matches!(
            build_edney6(free, deg(15.0), deg(40.0), geo, &g).unwrap_err(),
            Error::Detached { .. }
        ));
        assert!(build_edney6(free, deg(15.0), deg(10.0), geo, &g).is_err());
    }

    #[test]
    fn wedge_detachment_and_layout() {
        let g = gas();
        let e = single_wedge(
            PrimitiveState::freestream(2.0, &g),
            deg(45.0),
            PatternGeometry::wedge_default(),
            &g,
        );
        assert!(matches!(e.unwrap_err(), Error::Detached { .. }));
        let free = PrimitiveState::freestream(4.0, &g);
        let p = single_wedge(free, deg(20.0), PatternGeometry::wedge_default(), &g).unwrap();
        assert_eq!(p.eval(0.5, 0.9), free);
        let below = p.eval(0.9, 0.25);
        assert!((below.flow_angle() - deg(20.0)).abs() < 1e-12);
        assert!((p.waves[0].angles[0].to_degrees() - 32.46389685027424).abs() < 1e-9);
    }

    #[test]
    fn summary_lists_regions_and_waves() {
        let g = gas();
        let free = PrimitiveState::freestream(4.0, &g);
        let p = build_edney1(free, deg(20.0), deg(15.0), PatternGeometry::default(), &g).unwrap();
        let s = p.summary();
        assert!(s.contains("upper_refracted"));
        assert!(s.contains("slip line"));
        assert!(s.contains("Rankine-Hugoniot"));
    }
}
