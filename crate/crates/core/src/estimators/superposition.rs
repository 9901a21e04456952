use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::nonintrusive::{error_angles, meta_of};
use super::report::{DistanceMatrix, EstimateReport, EstimateRow, Method, MethodDetails};
use crate::defect::{truncation_angle_table, ErrorBasis};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{GridFunction, Metric};
use crate::solver::SolutionEnsemble;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionOptions {
    pub metric: Metric,
    /// Accepted deviation of the achieved angle from pi/2, radians.
    pub angle_tol: f64,
    pub max_iter: usize,
}

impl Default for SuperpositionOptions {
    fn default() -> Self {
        SuperpositionOptions {
            metric: Metric::default(),
            angle_tol: 2f64.to_radians(),
            max_iter: 10_000,
        }
    }
}

/// Centre and radius of a hypersphere meant to contain the exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PragerSyngeSolution {
    pub center_label: String,
    pub center: GridFunction,
    pub radius: f64,
    /// Weights of the auxiliary members, summing to one.
    pub weights: Vec<(String, f64)>,
    /// Angle between the centre's estimated error and the superposed one.
    pub phi: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Discrepancy after every accepted step, starting with the initial one.
    pub discrepancy: Vec<f64>,
}

impl PragerSyngeSolution {
    /// `sum w_i u_i` over the auxiliary members.
    pub fn auxiliary(&self, ensemble: &SolutionEnsemble) -> Result<GridFunction> {
        let fields: Vec<&GridFunction> = self
            .weights
            .iter()
            .map(|(l, _)| ensemble.field(l))
            .collect::<Result<_>>()?;
        let w: Vec<f64> = self.weights.iter().map(|(_, w)| *w).collect();
        GridFunction::weighted_sum(&w, &fields)
    }
}

fn quad(g: &[Vec<f64>], w: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, wa) in w.iter().enumerate() {
        for (b, wb) in w.iter().enumerate() {
            s += wa * g[a][b] * wb;
        }
    }
    s
}

fn inner(c: &[f64], w: &[f64]) -> f64 {
    c.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Steepest descent on `eps(w) = (du0, sum w_i du_i)^2 / 2` with the weights
/// renormalized to unit sum after every step. The step grows by 1.2 after an
/// accepted step and halves after a rejected one.
pub fn orthogonal_superposition(
    basis: &ErrorBasis,
    ensemble: &SolutionEnsemble,
    basic: &str,
    options: &SuperpositionOptions,
) -> Result<PragerSyngeSolution> {
    let metric = options.metric;
    let center = ensemble.field(basic)?;
    let d0 = &basis
        .get(basic)
        .ok_or_else(|| Error::Estimator(format!("no basis entry for the centre {basic}")))?
        .approx;
    let aux: Vec<_> = basis
        .entries
        .iter()
        .filter(|e| e.label != basic && ensemble.get(&e.label).is_some())
        .collect();
    let n = aux.len();
    if n < 2 {
        return Err(Error::Estimator(format!(
            "centre {basic}: need at least two auxiliary members, have {n}"
        )));
    }
    let n0 = metric.norm(d0)?;
    if n0 == 0.0 {
        return Err(Error::Estimator(format!("centre {basic}: estimated error is zero")));
    }
    let c: Vec<f64> = aux.iter().map(|e| metric.dot(d0, &e.approx)).collect::<Result<_>>()?;
    let mut gram = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let v = metric.dot(&aux[a].approx, &aux[b].approx)?;
            gram[a][b] = v;
            gram[b][a] = v;
        }
    }
    let max_sq = (0..n).map(|k| gram[k][k]).fold(0.0, f64::max);
    let phi_of = |w: &[f64]| -> Result<f64> {
        let nv = quad(&gram, w).max(0.0).sqrt();
        if nv == 0.0 {
            return Err(Error::Estimator(format!("centre {basic}: superposed error vanishes")));
        }
        Ok((inner(&c, w) / (n0 * nv)).clamp(-1.0, 1.0).acos())
    };

    let mut w = vec![1.0 / n as f64; n];
    let mut tau = 1.0 / (n0 * n0 * max_sq + f64::MIN_POSITIVE);
    let mut s = inner(&c, &w);
    let mut eps = 0.5 * s * s;
    let mut discrepancy = vec![eps];
    let mut phi = phi_of(&w)?;
    let mut iterations = 0;
    let mut converged = (phi - FRAC_PI_2).abs() < options.angle_tol;
    while !converged && iterations < options.max_iter {
        iterations += 1;
        let trial: Vec<f64> = w.iter().zip(&c).map(|(wk, ck)| wk - tau * s * ck).collect();
        let sum: f64 = trial.iter().sum();
        if sum.abs() < 1e-10 {
            return Err(Error::DegenerateWeights(sum));
        }
        let trial: Vec<f64> = trial.iter().map(|x| x / sum).collect();
        let st = inner(&c, &trial);
        let et = 0.5 * st * st;
        if et <= eps {
            w = trial;
            s = st;
            eps = et;
            discrepancy.push(eps);
            phi = phi_of(&w)?;
            converged = (phi - FRAC_PI_2).abs() < options.angle_tol;
            tau *= 1.2;
        } else {
            tau *= 0.5;
            if tau == 0.0 {
                break;
            }
        }
    }
    let weights: Vec<(String, f64)> = aux.iter().zip(&w).map(|(e, x)| (e.label.clone(), *x)).collect();
    let mut sol = PragerSyngeSolution {
        center_label: basic.to_string(),
        center: center.clone(),
        radius: 0.0,
        weights,
        phi,
        iterations,
        converged,
        discrepancy,
    };
    sol.radius = metric.distance(center, &sol.auxiliary(ensemble)?)?;
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TryOutcome {
    pub center: String,
    /// Number of auxiliary members.
    pub group: usize,
    pub radius: Option<f64>,
    pub phi: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub selected: bool,
    pub weights: Vec<(String, f64)>,
    pub true_error: Option<f64>,
    pub effectivity: Option<f64>,
    pub error: Option<String>,
}

/// Tries every basis member as the centre and keeps the converged try with
/// the largest radius (ties to the lexicographically first label).
pub fn prager_synge_solution(
    basis: &ErrorBasis,
    ensemble: &SolutionEnsemble,
    options: &SuperpositionOptions,
    truth: Option<&GridFunction>,
    exec: Execution,
) -> Result<(PragerSyngeSolution, EstimateReport)> {
    let centers: Vec<String> = ensemble
        .labels()
        .into_iter()
        .filter(|l| basis.get(l).is_some())
        .map(str::to_string)
        .collect();
    if centers.len() < 3 {
        return Err(Error::Estimator(format!(
            "Prager-Synge solution needs at least three members with basis entries, have {}",
            centers.len()
        )));
    }
    let results = exec.map(&centers, |l| orthogonal_superposition(basis, ensemble, l, options));
    let metric = options.metric;
    let mut tries = Vec::new();
    let mut best: Option<usize> = None;
    for (k, (l, r)) in centers.iter().zip(&results).enumerate() {
        let true_error = truth.map(|t| metric.distance(ensemble.field(l)?, t)).transpose()?;
        let t = match r {
            Ok(sol) => {
                if sol.converged {
                    let better = match best {
                        None => true,
                        Some(b) => {
                            let other = results[b].as_ref().unwrap();
                            sol.radius > other.radius || (sol.radius == other.radius && *l < other.center_label)
                        }
                    };
                    if better {
                        best = Some(k);
                    }
                }
                TryOutcome {
                    center: l.clone(),
                    group: centers.len() - 1,
                    radius: Some(sol.radius),
                    phi: Some(sol.phi),
                    iterations: sol.iterations,
                    converged: sol.converged,
                    selected: false,
                    weights: sol.weights.clone(),
                    true_error,
                    effectivity: true_error.and_then(|e| super::effectivity_index(sol.radius, e).ok()),
                    error: (!sol.converged).then(|| {
                        format!(
                            "orthogonality not reached: phi = {:.3} deg after {} iterations",
                            sol.phi.to_degrees(),
                            sol.iterations
                        )
                    }),
                }
            }
            Err(e) => TryOutcome {
                center: l.clone(),
                group: centers.len() - 1,
                radius: None,
                phi: None,
                iterations: 0,
                converged: false,
                selected: false,
                weights: Vec::new(),
                true_error,
                effectivity: None,
                error: Some(e.to_string()),
            },
        };
        tries.push(t);
    }
    let Some(b) = best else {
        return Err(Error::AllTriesFailed(
            tries
                .iter()
                .map(|t| format!("{}: {}", t.center, t.error.as_deref().unwrap_or("failed")))
                .collect(),
        ));
    };
    tries[b].selected = true;
    let solution = results.into_iter().nth(b).unwrap()?;
    let mut warnings: Vec<String> = tries
        .iter()
        .filter_map(|t| t.error.as_ref().map(|e| format!("{}: {e}", t.center)))
        .collect();
    warnings.extend(basis.notices.iter().cloned());
    let rows: Vec<EstimateRow> = tries
        .iter()
        .map(|t| {
            let mut r = EstimateRow::new(&t.center, t.radius.filter(|_| t.converged), t.true_error);
            r.group = Some(t.group);
            r
        })
        .collect();
    let labels: Vec<&str> = centers.iter().map(String::as_str).collect();
    let sub = ensemble.subset(&labels)?;
    let report = EstimateReport {
        method: Method::PragerSynge,
        meta: meta_of(ensemble, metric),
        rows,
        distances: Some(DistanceMatrix::of(&sub, metric)?),
        error_angles: error_angles(&sub, truth, metric)?,
        truncation_angles: truncation_angle_table(&basis.subset(&labels)?, metric).ok(),
        details: MethodDetails::PragerSynge { tries },
        warnings,
    };
    Ok((solution, report))
}

/// Prager-Synge solutions on growing prefixes of `order`: for every `n` in
/// `sizes`, the first `n + 1` labels (n auxiliary members per centre).
/// Rows and tries carry `n` as their group.
pub fn prager_synge_growth(
    basis: &ErrorBasis,
    ensemble: &SolutionEnsemble,
    order: &[&str],
    sizes: &[usize],
    options: &SuperpositionOptions,
    truth: Option<&GridFunction>,
    exec: Execution,
) -> Result<EstimateReport> {
    let mut rows = Vec::new();
    let mut tries = Vec::new();
    let mut warnings = Vec::new();
    let mut last = None;
    for &n in sizes {
        if n + 1 > order.len() {
            return Err(Error::Estimator(format!(
                "basis size {n} needs {} members, have {}",
                n + 1,
                order.len()
            )));
        }
        let labels = &order[..n + 1];
        let sub_e = ensemble.subset(labels)?;
        let sub_b = basis.subset(labels)?;
        match prager_synge_solution(&sub_b, &sub_e, options, truth, exec) {
            Ok((_, r)) => {
                rows.extend(r.rows.iter().cloned());
                if let MethodDetails::PragerSynge { tries: t } = &r.details {
                    tries.extend(t.iter().cloned());
                }
                warnings.extend(r.warnings.iter().map(|w| format!("n={n}: {w}")));
                last = Some(r);
            }
            Err(e) => warnings.push(format!("n={n}: {e}")),
        }
    }
    let last = last.ok_or_else(|| Error::AllTriesFailed(warnings.clone()))?;
    warnings.extend(basis.notices.iter().cloned());
    warnings.dedup();
    Ok(EstimateReport {
        rows,
        details: MethodDetails::PragerSynge { tries },
        warnings,
        ..last
    })
}
