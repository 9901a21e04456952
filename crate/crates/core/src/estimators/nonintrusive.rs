use serde::{Deserialize, Serialize};

use super::report::{DistanceMatrix, EstimateReport, EstimateRow, Method, MethodDetails, ReportMeta};
use crate::defect::{truncation_angle_table, AngleTable, ErrorBasis};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Metric};
use crate::solver::SolutionEnsemble;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Width {
    pub d_max: f64,
    /// Labels of the most distant pair, lexicographically ordered.
    pub pair: (String, String),
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn width_of(d: &DistanceMatrix) -> Width {
    let mut best: Option<Width> = None;
    let n = d.labels.len();
    for a in 0..n {
        for b in a + 1..n {
            let pair = ordered(&d.labels[a], &d.labels[b]);
            let v = d.values[a][b];
            let better = match &best {
                None => true,
                Some(w) => v > w.d_max || (v == w.d_max && pair < w.pair),
            };
            if better {
                best = Some(Width { d_max: v, pair });
            }
        }
    }
    best.expect("at least one pair")
}

/// Largest pairwise distance; ties go to the lexicographically first pair.
pub fn ensemble_width(ensemble: &SolutionEnsemble, metric: Metric) -> Result<Width> {
    if ensemble.len() < 2 {
        return Err(Error::Estimator("ensemble width needs at least two members".into()));
    }
    Ok(width_of(&DistanceMatrix::of(ensemble, metric)?))
}

pub(crate) fn meta_of(ensemble: &SolutionEnsemble, metric: Metric) -> ReportMeta {
    ReportMeta {
        nx: ensemble.grid().nx,
        ny: ensemble.grid().ny,
        pattern: String::new(),
        metric,
    }
}

/// True error norm per member, in ensemble order.
pub(crate) fn true_errors(
    ensemble: &SolutionEnsemble,
    truth: Option<&GridFunction>,
    metric: Metric,
) -> Result<Vec<Option<f64>>> {
    ensemble
        .members()
        .iter()
        .map(|m| truth.map(|t| metric.distance(&m.field, t)).transpose())
        .collect()
}

pub(crate) fn error_angles(
    ensemble: &SolutionEnsemble,
    truth: Option<&GridFunction>,
    metric: Metric,
) -> Result<Option<AngleTable>> {
    let Some(t) = truth else { return Ok(None) };
    let errors: Vec<(String, GridFunction)> = ensemble
        .members()
        .iter()
        .map(|m| Ok((m.label.clone(), m.field.sub(t)?)))
        .collect::<Result<_>>()?;
    let refs: Vec<(&str, &GridFunction)> = errors.iter().map(|(l, f)| (l.as_str(), f)).collect();
    Ok(Some(AngleTable::from_fields(&refs, metric)?))
}

fn zero_truth_warnings(rows: &[EstimateRow], warnings: &mut Vec<String>) {
    for r in rows {
        if r.true_error == Some(0.0) {
            warnings.push(format!("{}: true error is zero, effectivity undefined", r.label));
        }
    }
}

/// Every member is assigned the ensemble width as its error estimate.
pub fn width_estimate(
    ensemble: &SolutionEnsemble,
    metric: Metric,
    truth: Option<&GridFunction>,
) -> Result<EstimateReport> {
    if ensemble.len() < 2 {
        return Err(Error::Estimator("ensemble width needs at least two members".into()));
    }
    let distances = DistanceMatrix::of(ensemble, metric)?;
    let width = width_of(&distances);
    let errs = true_errors(ensemble, truth, metric)?;
    let rows: Vec<EstimateRow> = ensemble
        .members()
        .iter()
        .zip(&errs)
        .map(|(m, e)| EstimateRow::new(&m.label, Some(width.d_max), *e))
        .collect();
    let mut warnings = Vec::new();
    if width.d_max == 0.0 {
        warnings.push("ensemble width is zero: members coincide and the estimate is void".into());
    }
    zero_truth_warnings(&rows, &mut warnings);
    Ok(EstimateReport {
        method: Method::Width,
        meta: meta_of(ensemble, metric),
        rows,
        distances: Some(distances),
        error_angles: error_angles(ensemble, truth, metric)?,
        truncation_angles: None,
        details: MethodDetails::Width(width),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleOutcome {
    pub ordering_detected: bool,
    pub outlier: String,
    pub outlier_min_distance: f64,
    pub rest_max_distance: f64,
}

/// Picks the member farthest from its nearest neighbour. If that distance is
/// at least `threshold` times every distance among the others, the others'
/// errors are bounded by their distance to it.
pub fn triangle_estimate(
    ensemble: &SolutionEnsemble,
    metric: Metric,
    truth: Option<&GridFunction>,
    threshold: f64,
) -> Result<(EstimateReport, TriangleOutcome)> {
    let n = ensemble.len();
    if n < 3 {
        return Err(Error::Estimator(
            "triangle estimate needs at least three members".into(),
        ));
    }
    let d = DistanceMatrix::of(ensemble, metric)?;
    let labels = &d.labels;
    let nearest = |k: usize| {
        (0..n)
            .filter(|&j| j != k)
            .map(|j| d.values[k][j])
            .fold(f64::INFINITY, f64::min)
    };
    let mut o = 0;
    for k in 1..n {
        let (a, b) = (nearest(k), nearest(o));
        if a > b || (a == b && labels[k] < labels[o]) {
            o = k;
        }
    }
    let outlier_min = nearest(o);
    let mut rest_max = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            if a != o && b != o {
                rest_max = rest_max.max(d.values[a][b]);
            }
        }
    }
    let detected = outlier_min >= threshold * rest_max;
    let errs = true_errors(ensemble, truth, metric)?;
    let rows: Vec<EstimateRow> = (0..n)
        .map(|k| {
            let est = (detected && k != o).then(|| d.values[o][k]);
            EstimateRow::new(&labels[k], est, errs[k])
        })
        .collect();
    let mut warnings = Vec::new();
    if !detected {
        warnings.push(format!(
            "no ordering: nearest distance of {} is {outlier_min:.4}, below {threshold} x {rest_max:.4}",
            labels[o]
        ));
    }
    zero_truth_warnings(&rows, &mut warnings);
    let outcome = TriangleOutcome {
        ordering_detected: detected,
        outlier: labels[o].clone(),
        outlier_min_distance: outlier_min,
        rest_max_distance: rest_max,
    };
    let report = EstimateReport {
        method: Method::Triangle,
        meta: meta_of(ensemble, metric),
        rows,
        distances: Some(d),
        error_angles: error_angles(ensemble, truth, metric)?,
        truncation_angles: None,
        details: MethodDetails::Triangle {
            ordering_detected: detected,
            outlier: outcome.outlier.clone(),
            outlier_min_distance: outlier_min,
            rest_max_distance: rest_max,
            threshold,
        },
        warnings,
    };
    Ok((report, outcome))
}

/// `factor * |u1 - u2| / sin(alpha / 2)`, a bound on both members' errors
/// when `alpha` bounds the angle between them from below.
pub fn angle_estimate(u1: &GridFunction, u2: &GridFunction, alpha: f64, metric: Metric, factor: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        return Err(Error::Estimator(format!(
            "angle bound needs 0 < alpha < pi, got {alpha} (the bound diverges as alpha -> 0)"
        )));
    }
    let d = metric.distance(u1, u2)?;
    if d == 0.0 {
        return Err(Error::Estimator("angle bound needs two distinct solutions".into()));
    }
    Ok(factor * d / (0.5 * alpha).sin())
}

/// Lower bound on the error angle from the truncation-error angle: `beta / divisor`.
pub fn alpha_from_beta(basis: &ErrorBasis, a: &str, b: &str, metric: Metric, divisor: f64) -> Result<f64> {
    let ea = basis
        .get(a)
        .ok_or_else(|| Error::Estimator(format!("no basis entry for {a}")))?;
    let eb = basis
        .get(b)
        .ok_or_else(|| Error::Estimator(format!("no basis entry for {b}")))?;
    Ok(metric.angle(&ea.delta, &eb.delta)? / divisor)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleOptions {
    pub factor: f64,
    pub beta_divisor: f64,
}

impl Default for AngleOptions {
    fn default() -> Self {
        AngleOptions {
            factor: 1.1,
            beta_divisor: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub a: String,
    pub b: String,
    pub beta: f64,
    pub alpha: f64,
    pub bound: f64,
    /// Bound over the true error of `a` and of `b`.
    pub effectivity_a: Option<f64>,
    pub effectivity_b: Option<f64>,
    /// True angle between the two errors, when known.
    pub true_alpha: Option<f64>,
}

/// Angle bound for every pair in the basis. Each member's row carries its
/// tightest bound over partners.
pub fn angle_report(
    ensemble: &SolutionEnsemble,
    basis: &ErrorBasis,
    metric: Metric,
    truth: Option<&GridFunction>,
    options: AngleOptions,
) -> Result<EstimateReport> {
    let labels: Vec<&str> = basis
        .labels()
        .into_iter()
        .filter(|l| ensemble.get(l).is_some())
        .collect();
    if labels.len() < 2 {
        return Err(Error::Estimator(
            "angle bound needs two members with basis entries".into(),
        ));
    }
    let sub = ensemble.subset(&labels)?;
    let errs = true_errors(&sub, truth, metric)?;
    let err_of = |l: &str| labels.iter().position(|x| *x == l).and_then(|k| errs[k]);
    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    let mut best: Vec<Option<f64>> = vec![None; labels.len()];
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            let (la, lb) = (labels[a], labels[b]);
            let r = alpha_from_beta(basis, la, lb, metric, options.beta_divisor).and_then(|alpha| {
                let m = angle_estimate(sub.field(la)?, sub.field(lb)?, alpha, metric, options.factor)?;
                Ok((alpha, m))
            });
            let (alpha, m) = match r {
                Ok(v) => v,
                Err(e) => {
                    warnings.push(format!("{la}-{lb}: {e}"));
                    continue;
                }
            };
            for k in [a, b] {
                best[k] = Some(best[k].map_or(m, |x: f64| x.min(m)));
            }
            let true_alpha = match truth {
                Some(t) => metric.angle(&sub.field(la)?.sub(t)?, &sub.field(lb)?.sub(t)?).ok(),
                None => None,
            };
            pairs.push(AnglePair {
                a: la.to_string(),
                b: lb.to_string(),
                beta: alpha * options.beta_divisor,
                alpha,
                bound: m,
                effectivity_a: err_of(la).and_then(|e| super::effectivity_index(m, e).ok()),
                effectivity_b: err_of(lb).and_then(|e| super::effectivity_index(m, e).ok()),
                true_alpha,
            });
        }
    }
    let rows: Vec<EstimateRow> = labels
        .iter()
        .enumerate()
        .map(|(k, l)| EstimateRow::new(l, best[k], errs[k]))
        .collect();
    zero_truth_warnings(&rows, &mut warnings);
    Ok(EstimateReport {
        method: Method::Angle,
        meta: meta_of(ensemble, metric),
        rows,
        distances: Some(DistanceMatrix::of(&sub, metric)?),
        error_angles: error_angles(&sub, truth, metric)?,
        truncation_angles: Some(truncation_angle_table(basis, metric)?),
        details: MethodDetails::Angle { pairs },
        warnings,
    })
}
