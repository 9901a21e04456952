use serde::{Deserialize, Serialize};

use super::{run_scheme, ConvergenceLog, SchemeId, SolverConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Grid, GridFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub label: String,
    pub scheme: Option<SchemeId>,
    pub field: GridFunction,
    pub digest: String,
    pub log: ConvergenceLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberFailure {
    pub label: String,
    pub digest: String,
    pub error: String,
    pub exit_code: i32,
}

/// Labelled solutions from independent schemes on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionEnsemble {
    grid: Grid,
    members: Vec<EnsembleMember>,
    pub failures: Vec<MemberFailure>,
}

impl SolutionEnsemble {
    pub fn new(grid: Grid) -> Self {
        SolutionEnsemble {
            grid,
            members: Vec::new(),
            failures: Vec::new(),
        }
    }

    /// Ensemble of bare fields without solver provenance.
    pub fn from_fields(grid: Grid, fields: Vec<(String, GridFunction)>) -> Result<Self> {
        let mut e = SolutionEnsemble::new(grid);
        for (label, field) in fields {
            e.push(EnsembleMember {
                label,
                scheme: None,
                field,
                digest: String::new(),
                log: ConvergenceLog::default(),
            })?;
        }
        Ok(e)
    }

    pub fn push(&mut self, member: EnsembleMember) -> Result<()> {
        if !member.field.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch(format!(
                "member {} is on a different grid",
                member.label
            )));
        }
        if self.members.iter().any(|m| m.label == member.label) {
            return Err(Error::Ensemble(format!("duplicate label {}", member.label)));
        }
        if let Some(first) = self.members.first() {
            if first.field.ncomp() != member.field.ncomp() {
                return Err(Error::GridMismatch(format!(
                    "member {} has {} components, expected {}",
                    member.label,
                    member.field.ncomp(),
                    first.field.ncomp()
                )));
            }
        }
        self.members.push(member);
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.label.as_str()).collect()
    }

    pub fn get(&self, label: &str) -> Option<&EnsembleMember> {
        self.members.iter().find(|m| m.label == label)
    }

    pub fn field(&self, label: &str) -> Result<&GridFunction> {
        self.get(label)
            .map(|m| &m.field)
            .ok_or_else(|| Error::Ensemble(format!("no member labelled {label}")))
    }

    /// Members with the given labels, in the given order.
    pub fn subset(&self, labels: &[&str]) -> Result<SolutionEnsemble> {
        let mut e = SolutionEnsemble::new(self.grid);
        for l in labels {
            let m = self
                .get(l)
                .ok_or_else(|| Error::Ensemble(format!("no member labelled {l}")))?;
            e.push(m.clone())?;
        }
        Ok(e)
    }
}

/// Runs every config independently. Failing members are recorded, not fatal.
pub fn run_ensemble(configs: &[SolverConfig], exec: Execution) -> Result<SolutionEnsemble> {
    let first = configs
        .first()
        .ok_or_else(|| Error::Ensemble("no solver configurations".into()))?;
    for c in configs {
        if !c.grid.same_as(&first.grid) {
            return Err(Error::GridMismatch("ensemble members must share one grid".into()));
        }
        if c.gas != first.gas || c.inflow != first.inflow {
            return Err(Error::Ensemble(
                "ensemble members must share gas model and inflow".into(),
            ));
        }
    }
    for (k, c) in configs.iter().enumerate() {
        if configs[..k].iter().any(|o| o.scheme == c.scheme) {
            return Err(Error::Ensemble(format!("duplicate label {}", c.scheme)));
        }
    }
    let results = exec.map(configs, |c| (c.digest(), run_scheme(c)));
    let mut e = SolutionEnsemble::new(first.grid);
    for (c, (digest, r)) in configs.iter().zip(results) {
        match r {
            Ok((field, log)) => e.push(EnsembleMember {
                label: c.scheme.label().to_string(),
                scheme: Some(c.scheme),
                field,
                digest,
                log,
            })?,
            Err(err) => e.failures.push(MemberFailure {
                label: c.scheme.label().to_string(),
                digest,
                exit_code: err.exit_code(),
                error: err.to_string(),
            }),
        }
    }
    Ok(e)
}
