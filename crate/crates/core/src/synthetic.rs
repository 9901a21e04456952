//! Randomized checks of the provable bounds behind the nonintrusive
//! estimators, on synthetic vectors with a known truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimators::{angle_estimate, ensemble_width};
use crate::grid::{ComponentMask, Extent, Grid, GridFunction, Metric};
use crate::solver::SolutionEnsemble;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticOptions {
    pub seed: u64,
    /// Vector dimension.
    pub dim: usize,
    pub angle_trials: usize,
    /// Smallest exact angle between the two errors, radians.
    pub min_angle: f64,
    pub angle_factor: f64,
    pub triangle_trials: usize,
    pub width_trials: usize,
    pub max_members: usize,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        SyntheticOptions {
            seed: 0,
            dim: 100,
            angle_trials: 10_000,
            min_angle: 5f64.to_radians(),
            angle_factor: 1.1,
            triangle_trials: 10_000,
            width_trials: 1_000,
            max_members: 8,
        }
    }
}

/// Outcome of one randomized property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Smallest `bound / true` ratio seen; at least 1 when all pass.
    pub min_ratio: f64,
}

impl PropertyCheck {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    pub fn pass_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.passed as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticReport {
    pub options: SyntheticOptions,
    pub checks: Vec<PropertyCheck>,
}

impl SyntheticReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::all_passed)
    }
}

struct Space {
    grid: Grid,
    metric: Metric,
}

impl Space {
    fn new(dim: usize) -> Result<Self> {
        Ok(Space {
            grid: Grid::new(dim, 1, Extent::UNIT)?,
            metric: Metric::new(ComponentMask::DENSITY),
        })
    }

    fn field(&self, v: Vec<f64>) -> Result<GridFunction> {
        GridFunction::from_values(self.grid, 1, v)
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

fn unit(mut a: Vec<f64>) -> Vec<f64> {
    let n = dot(&a, &a).sqrt();
    a.iter_mut().for_each(|x| *x /= n);
    a
}

/// `a` minus its projections on the orthonormal `basis`, normalized.
fn orthonormal_to(mut a: Vec<f64>, basis: &[Vec<f64>]) -> Vec<f64> {
    // two Gram-Schmidt passes keep the result orthogonal to rounding
    for _ in 0..2 {
        for b in basis {
            let c = dot(&a, b);
            a.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    unit(a)
}

/// Error magnitude spread over three decades.
fn magnitude(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-2.0..1.0))
}

fn plus(t: &[f64], e: &[f64]) -> Vec<f64> {
    t.iter().zip(e).map(|(a, b)| a + b).collect()
}

fn record(check: &mut PropertyCheck, bound: f64, truth: f64) {
    check.trials += 1;
    if bound >= truth {
        check.passed += 1;
    }
    check.min_ratio = check.min_ratio.min(bound / truth);
}

fn new_check(name: &str) -> PropertyCheck {
    PropertyCheck {
        name: name.to_string(),
        trials: 0,
        passed: 0,
        min_ratio: f64::INFINITY,
    }
}

/// Two errors at an exact angle `alpha >= min_angle`; the angle bound on the
/// two solutions must exceed both error norms.
pub fn angle_bound_trials(options: &SyntheticOptions) -> Result<PropertyCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let s = Space::new(options.dim)?;
    let mut check = new_check("angle_bound");
    for _ in 0..options.angle_trials {
        let truth = gaussian(&mut rng, options.dim);
        let a = unit(gaussian(&mut rng, options.dim));
        let b = orthonormal_to(gaussian(&mut rng, options.dim), std::slice::from_ref(&a));
        let alpha = rng.gen_range(options.min_angle..std::f64::consts::PI - options.min_angle);
        let (r1, r2) = (magnitude(&mut rng), magnitude(&mut rng));
        let e1 = scaled(&a, r1);
        let e2: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| r2 * (alpha.cos() * x + alpha.sin() * y))
            .collect();
        let u1 = s.field(plus(&truth, &e1))?;
        let u2 = s.field(plus(&truth, &e2))?;
        let t = s.field(truth)?;
        let m = angle_estimate(&u1, &u2, alpha, s.metric, options.angle_factor)?;
        let worst = s.metric.distance(&u1, &t)?.max(s.metric.distance(&u2, &t)?);
        record(&mut check, m, worst);
    }
    Ok(check)
}

/// Errors with `|e1| >= 2 |e2|` by construction; the distance between the
/// two solutions must bound the smaller error.
pub fn triangle_trials(options: &SyntheticOptions) -> Result<PropertyCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(1));
    let s = Space::new(options.dim)?;
    let mut check = new_check("triangle_premise");
    for _ in 0..options.triangle_trials {
        let truth = gaussian(&mut rng, options.dim);
        let r2 = magnitude(&mut rng);
        let r1 = r2 * rng.gen_range(2.0..10.0);
        let e1 = scaled(&unit(gaussian(&mut rng, options.dim)), r1);
        let e2 = scaled(&unit(gaussian(&mut rng, options.dim)), r2);
        let u1 = s.field(plus(&truth, &e1))?;
        let u2 = s.field(plus(&truth, &e2))?;
        let t = s.field(truth)?;
        let d12 = s.metric.distance(&u1, &u2)?;
        record(&mut check, d12, s.metric.distance(&u2, &t)?);
    }
    Ok(check)
}

/// Ensembles of 2..=max_members solutions with mutually orthogonal errors;
/// the ensemble width must bound every error.
pub fn width_trials(options: &SyntheticOptions) -> Result<PropertyCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(2));
    let s = Space::new(options.dim)?;
    let mut check = new_check("orthogonal_width");
    let max_members = options.max_members.clamp(2, options.dim);
    for _ in 0..options.width_trials {
        let truth = gaussian(&mut rng, options.dim);
        let n = rng.gen_range(2..=max_members);
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let d = orthonormal_to(gaussian(&mut rng, options.dim), &dirs);
            dirs.push(d);
        }
        let mut fields = Vec::with_capacity(n);
        for (k, d) in dirs.iter().enumerate() {
            let e = scaled(d, magnitude(&mut rng));
            fields.push((format!("m{k}"), s.field(plus(&truth, &e))?));
        }
        let t = s.field(truth)?;
        let worst = fields
            .iter()
            .map(|(_, f)| s.metric.distance(f, &t))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let ens = SolutionEnsemble::from_fields(s.grid, fields)?;
        record(&mut check, ensemble_width(&ens, s.metric)?.d_max, worst);
    }
    Ok(check)
}

/// All three randomized properties.
pub fn synthetic_suite(options: &SyntheticOptions) -> Result<SyntheticReport> {
    Ok(SyntheticReport {
        options: *options,
        checks: vec![
            angle_bound_trials(options)?,
            triangle_trials(options)?,
            width_trials(options)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SyntheticOptions {
        SyntheticOptions {
            seed,
            angle_trials: 500,
            triangle_trials: 500,
            width_trials: 100,
            ..SyntheticOptions::default()
        }
    }

    #[test]
    fn all_bounds_hold() {
        let r = synthetic_suite(&small(7)).unwrap();
        for c in &r.checks {
            assert!(c.all_passed(), "{c:?}");
            assert!(c.min_ratio >= 1.0);
        }
    }

    #[test]
    fn suite_is_reproducible_from_the_seed() {
        let a = synthetic_suite(&small(3)).unwrap();
        let b = synthetic_suite(&small(3)).unwrap();
        assert_eq!(a, b);
        let c = synthetic_suite(&small(4)).unwrap();
        assert_ne!(a.checks[0].min_ratio, c.checks[0].min_ratio);
    }

    #[test]
    fn overstated_angle_breaks_the_bound() {
        let o = small(11);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Space::new(o.dim).unwrap();
        let a = unit(gaussian(&mut rng, o.dim));
        let e2 = orthonormal_to(gaussian(&mut rng, o.dim), std::slice::from_ref(&a));
        // true angle 10 deg, |e1| = 1, |e2| = cos(10 deg): d = sin(10 deg)
        let alpha = 10f64.to_radians();
        let e2: Vec<f64> = a
            .iter()
            .zip(&e2)
            .map(|(x, y)| alpha.cos() * (alpha.cos() * x + alpha.sin() * y))
            .collect();
        let u1 = s.field(a).unwrap();
        let u2 = s.field(e2).unwrap();
        let t = s.field(vec![0.0; o.dim]).unwrap();
        let e1 = s.metric.distance(&u1, &t).unwrap();
        let honest = angle_estimate(&u1, &u2, alpha, s.metric, 1.0).unwrap();
        let overstated = angle_estimate(&u1, &u2, 60f64.to_radians(), s.metric, 1.0).unwrap();
        assert!(honest >= e1);
        assert!(overstated < e1);
    }
}
