//! Error estimators built on an ensemble of independent solutions.
//!
//! Three are nonintrusive and use only the member fields: the ensemble
//! width, the triangle inequality with norm ordering, and the angle bound
//! fed by truncation-error angles. The fourth searches for a superposition
//! of members whose estimated error is orthogonal to a chosen centre's and
//! turns its distance into the radius of a Prager-Synge hypersphere.

mod nonintrusive;
mod report;
mod superposition;

pub use nonintrusive::{
    alpha_from_beta, angle_estimate, angle_report, ensemble_width, triangle_estimate, width_estimate, AngleOptions,
    AnglePair, TriangleOutcome, Width,
};
pub use report::{effectivity_index, DistanceMatrix, EstimateReport, EstimateRow, Method, MethodDetails, ReportMeta};
pub use superposition::{
    orthogonal_superposition, prager_synge_growth, prager_synge_solution, PragerSyngeSolution, SuperpositionOptions,
    TryOutcome,
};
