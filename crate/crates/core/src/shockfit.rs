//! Location of a captured shock from the density field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockFit {
    /// Angle of the fitted line to the x axis, radians.
    pub angle: f64,
    /// Height of the line at `x = 0`.
    pub intercept: f64,
    /// Shock position in each sampled column.
    pub points: Vec<(f64, f64)>,
    /// RMS vertical distance of the points from the line.
    pub rms: f64,
}

/// Least-squares line through the largest vertical density jump of every
/// column whose centre lies in `x_range`. Each position is the centroid of
/// the jumps over the two faces on either side of the largest one; columns
/// whose largest jump touches the top or bottom boundary are skipped.
pub fn fit_shock_line(u: &GridFunction, x_range: (f64, f64)) -> Result<ShockFit> {
    let g = *u.grid();
    if g.ny < 6 {
        return Err(Error::InvalidConfig("shock fit needs at least 6 rows".into()));
    }
    let mut points = Vec::new();
    for i in 0..g.nx {
        let x = g.x_center(i);
        if x < x_range.0 || x > x_range.1 {
            continue;
        }
        // jump across the face between rows j and j + 1
        let jump = |j: usize| (u.get(i, j + 1, 0) - u.get(i, j, 0)).abs();
        let k = (0..g.ny - 1).max_by(|&a, &b| jump(a).total_cmp(&jump(b))).unwrap();
        if k < 2 || k + 3 > g.ny - 1 {
            continue;
        }
        let (mut w, mut s) = (0.0, 0.0);
        for j in k - 2..=k + 2 {
            let face = 0.5 * (g.y_center(j) + g.y_center(j + 1));
            w += jump(j);
            s += jump(j) * face;
        }
        if w > 0.0 {
            points.push((x, s / w));
        }
    }
    if points.len() < 2 {
        return Err(Error::Estimator(format!(
            "shock fit found {} usable columns in x = {:?}",
            points.len(),
            x_range
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ShockFit {
        angle: slope.atan(),
        intercept,
        points,
        rms,
    })
}
