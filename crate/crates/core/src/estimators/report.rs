use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::nonintrusive::{AnglePair, Width};
use super::superposition::TryOutcome;
use crate::defect::AngleTable;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Metric};
use crate::solver::SolutionEnsemble;

/// `estimate / true_norm`.
pub fn effectivity_index(estimate: f64, true_norm: f64) -> Result<f64> {
    if true_norm == 0.0 {
        return Err(Error::ZeroTrueError);
    }
    Ok(estimate / true_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Width,
    Triangle,
    Angle,
    PragerSynge,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Width => "width",
            Method::Triangle => "triangle",
            Method::Angle => "angle",
            Method::PragerSynge => "prager_synge",
        }
    }
}

/// Pairwise distances between members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn of(ensemble: &SolutionEnsemble, metric: Metric) -> Result<DistanceMatrix> {
        let fields: Vec<(&str, &GridFunction)> = ensemble
            .members()
            .iter()
            .map(|m| (m.label.as_str(), &m.field))
            .collect();
        DistanceMatrix::from_fields(&fields, metric)
    }

    pub fn from_fields(fields: &[(&str, &GridFunction)], metric: Metric) -> Result<DistanceMatrix> {
        let n = fields.len();
        let mut values = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                let d = metric.distance(fields[a].1, fields[b].1)?;
                values[a][b] = d;
                values[b][a] = d;
            }
        }
        Ok(DistanceMatrix {
            labels: fields.iter().map(|(l, _)| l.to_string()).collect(),
            values,
        })
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.values[self.index(a)?][self.index(b)?])
    }

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
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

/// One estimate, optionally compared with the true error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub label: String,
    /// Basis size for Prager-Synge growth tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
    pub estimate: Option<f64>,
    pub true_error: Option<f64>,
    pub effectivity: Option<f64>,
}

impl EstimateRow {
    pub fn new(label: &str, estimate: Option<f64>, true_error: Option<f64>) -> Self {
        let effectivity = match (estimate, true_error) {
            (Some(e), Some(t)) => effectivity_index(e, t).ok(),
            _ => None,
        };
        EstimateRow {
            label: label.to_string(),
            group: None,
            estimate,
            true_error,
            effectivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportMeta {
    pub nx: usize,
    pub ny: usize,
    pub pattern: String,
    pub metric: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodDetails {
    Width(Width),
    Triangle {
        ordering_detected: bool,
        outlier: String,
        outlier_min_distance: f64,
        rest_max_distance: f64,
        threshold: f64,
    },
    Angle {
        pairs: Vec<AnglePair>,
    },
    PragerSynge {
        tries: Vec<TryOutcome>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: Method,
    pub meta: ReportMeta,
    pub rows: Vec<EstimateRow>,
    pub distances: Option<DistanceMatrix>,
    /// Angles between true errors, when the truth is known.
    pub error_angles: Option<AngleTable>,
    pub truncation_angles: Option<AngleTable>,
    pub details: MethodDetails,
    pub warnings: Vec<String>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl EstimateReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Flat per-row table: `label,estimate,true_error,effectivity`, with a
    /// leading `n` column for grouped rows.
    pub fn to_csv(&self) -> String {
        let grouped = self.rows.iter().any(|r| r.group.is_some());
        let mut s = String::new();
        if grouped {
            s.push_str("n,");
        }
        s.push_str("label,estimate,true_error,effectivity\n");
        for r in &self.rows {
            if grouped {
                let _ = write!(s, "{},", r.group.map(|g| g.to_string()).unwrap_or_default());
            }
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.label,
                opt(r.estimate),
                opt(r.true_error),
                opt(r.effectivity)
            );
        }
        s
    }

    pub fn row(&self, label: &str) -> Option<&EstimateRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Human-readable table for terminals.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} estimate on {}x{} ({})\n",
            self.method.tag(),
            self.meta.nx,
            self.meta.ny,
            self.meta.pattern
        );
        let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:>4} {:<8} {:>10} {:>10} {:>8}",
            "n", "label", "estimate", "true", "I_eff"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>4} {:<8} {:>10} {:>10} {:>8}",
                r.group.map(|g| g.to_string()).unwrap_or_else(|| "-".into()),
                r.label,
                f(r.estimate),
                f(r.true_error),
                f(r.effectivity)
            );
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}
