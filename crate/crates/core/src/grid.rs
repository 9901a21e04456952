//! Uniform cell-centred grids, multi-component grid functions, and the
//! inner-product geometry used by every estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Extent {
    pub const UNIT: Extent = Extent {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Extent { x0, x1, y0, y1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub extent: Extent,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, extent: Extent) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGrid(format!(
                "cell counts must be positive, got {nx}x{ny}"
            )));
        }
        let Extent { x0, x1, y0, y1 } = extent;
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
            return Err(Error::InvalidGrid("non-finite extent".into()));
        }
        if x1 <= x0 || y1 <= y0 {
            return Err(Error::InvalidGrid(format!(
                "degenerate extent [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Grid {
            nx,
            ny,
            extent,
            hx: (x1 - x0) / nx as f64,
            hy: (y1 - y0) / ny as f64,
        })
    }

    /// `n x n` cells on the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        Grid::new(n, n, Extent::UNIT)
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.extent.x0 + (i as f64 + 0.5) * self.hx
    }

    pub fn y_center(&self, j: usize) -> f64 {
        self.extent.y0 + (j as f64 + 0.5) * self.hy
    }

    /// Centre of cell `(i, j)`; signed indices reach into ghost layers.
    pub fn center(&self, i: isize, j: isize) -> (f64, f64) {
        (
            self.extent.x0 + (i as f64 + 0.5) * self.hx,
            self.extent.y0 + (j as f64 + 0.5) * self.hy,
        )
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.extent == other.extent
    }
}

/// Subset of field components participating in a norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentMask(u32);

impl ComponentMask {
    pub const DENSITY: ComponentMask = ComponentMask(1);
    pub const CONSERVED: ComponentMask = ComponentMask(0b1111);

    pub fn from_components(components: &[usize]) -> Self {
        ComponentMask(components.iter().fold(0, |m, &c| m | (1u32 << c)))
    }

    pub fn contains(self, c: usize) -> bool {
        c < 32 && self.0 & (1 << c) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn check(self, ncomp: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidMask("mask selects no component".into()));
        }
        if ncomp < 32 && self.0 >> ncomp != 0 {
            return Err(Error::InvalidMask(format!(
                "mask {:#b} exceeds {ncomp} components",
                self.0
            )));
        }
        Ok(())
    }
}

/// Whether inner products carry the `hx * hy` cell measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Measure,
    Unweighted,
}

/// Cell-centred grid function with `ncomp` scalars per cell, stored
/// row-major as `((j * nx) + i) * ncomp + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    ncomp: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid, ncomp: usize) -> Self {
        assert!(ncomp > 0, "grid function needs at least one component");
        GridFunction {
            grid,
            ncomp,
            values: vec![0.0; grid.cells() * ncomp],
        }
    }

    pub fn from_values(grid: Grid, ncomp: usize, values: Vec<f64>) -> Result<Self> {
        if ncomp == 0 {
            return Err(Error::InvalidGrid("zero components".into()));
        }
        if values.len() != grid.cells() * ncomp {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.cells() * ncomp,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(GridFunction { grid, ncomp, values })
    }

    /// Builds a field by evaluating `f(x, y, out)` at every cell centre.
    pub fn from_fn<F>(grid: Grid, ncomp: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64, f64, &mut [f64]),
    {
        let mut values = vec![0.0; grid.cells() * ncomp];
        for j in 0..grid.ny {
            let y = grid.y_center(j);
            for i in 0..grid.nx {
                let k = (j * grid.nx + i) * ncomp;
                f(grid.x_center(i), y, &mut values[k..k + ncomp]);
            }
        }
        GridFunction::from_values(grid, ncomp, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let k = (j * self.grid.nx + i) * self.ncomp;
        &self.values[k..k + self.ncomp]
    }

    pub fn get(&self, i: usize, j: usize, c: usize) -> f64 {
        self.values[(j * self.grid.nx + i) * self.ncomp + c]
    }

    /// Extracts component `c` as a scalar field.
    pub fn component(&self, c: usize) -> GridFunction {
        let values = self.values.iter().skip(c).step_by(self.ncomp).copied().collect();
        GridFunction {
            grid: self.grid,
            ncomp: 1,
            values,
        }
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "{}x{} vs {}x{} (or different extents)",
                self.grid.nx, self.grid.ny, other.grid.nx, other.grid.ny
            )));
        }
        if self.ncomp != other.ncomp {
            return Err(Error::GridMismatch(format!(
                "{} vs {} components",
                self.ncomp, other.ncomp
            )));
        }
        Ok(())
    }

    /// `a * self + b * other`
    pub fn lincomb(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(GridFunction {
            grid: self.grid,
            ncomp: self.ncomp,
            values,
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x - y).collect();
        Ok(GridFunction {
            grid: self.grid,
            ncomp: self.ncomp,
            values,
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn scale(&self, a: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            ncomp: self.ncomp,
            values: self.values.iter().map(|x| a * x).collect(),
        }
    }

    /// `sum_k w_k f_k` over fields sharing one grid.
    pub fn weighted_sum(weights: &[f64], fields: &[&GridFunction]) -> Result<GridFunction> {
        let first = fields
            .first()
            .ok_or_else(|| Error::GridMismatch("empty superposition".into()))?;
        if weights.len() != fields.len() {
            return Err(Error::GridMismatch(format!(
                "{} weights for {} fields",
                weights.len(),
                fields.len()
            )));
        }
        let mut values = vec![0.0; first.values.len()];
        for (w, f) in weights.iter().zip(fields) {
            first.check_compatible(f)?;
            for (acc, x) in values.iter_mut().zip(&f.values) {
                *acc += w * x;
            }
        }
        Ok(GridFunction {
            grid: first.grid,
            ncomp: first.ncomp,
            values,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Norm/inner-product configuration shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metric {
    pub mask: ComponentMask,
    pub weighting: Weighting,
}

impl Default for Metric {
    fn default() -> Self {
        Metric {
            mask: ComponentMask::DENSITY,
            weighting: Weighting::Measure,
        }
    }
}

impl Metric {
    pub fn new(mask: ComponentMask) -> Self {
        Metric {
            mask,
            weighting: Weighting::Measure,
        }
    }

    fn measure(&self, grid: &Grid) -> f64 {
        match self.weighting {
            Weighting::Measure => grid.cell_area(),
            Weighting::Unweighted => 1.0,
        }
    }

    pub fn dot(&self, f: &GridFunction, g: &GridFunction) -> Result<f64> {
        f.check_compatible(g)?;
        self.mask.check(f.ncomp)?;
        let n = f.ncomp;
        let mut sum = 0.0;
        for (a, b) in f.values.chunks_exact(n).zip(g.values.chunks_exact(n)) {
            for c in 0..n {
                if self.mask.contains(c) {
                    sum += a[c] * b[c];
                }
            }
        }
        Ok(sum * self.measure(&f.grid))
    }

    pub fn norm(&self, f: &GridFunction) -> Result<f64> {
        self.mask.check(f.ncomp)?;
        let n = f.ncomp;
        let mut sum = 0.0;
        for a in f.values.chunks_exact(n) {
            for (c, x) in a.iter().enumerate() {
                if self.mask.contains(c) {
                    sum += x * x;
                }
            }
        }
        Ok((sum * self.measure(&f.grid)).sqrt())
    }

    pub fn distance(&self, f: &GridFunction, g: &GridFunction) -> Result<f64> {
        f.check_compatible(g)?;
        self.mask.check(f.ncomp)?;
        let n = f.ncomp;
        let mut sum = 0.0;
        for (a, b) in f.values.chunks_exact(n).zip(g.values.chunks_exact(n)) {
            for c in 0..n {
                if self.mask.contains(c) {
                    let d = a[c] - b[c];
                    sum += d * d;
                }
            }
        }
        Ok((sum * self.measure(&f.grid)).sqrt())
    }

    /// Angle in `[0, pi]` from the half-angle form
    /// `2 atan2(|f/|f| - g/|g||, |f/|f| + g/|g||)`, which stays accurate near
    /// 0 and pi where `acos` of the cosine loses half the digits.
    pub fn angle(&self, f: &GridFunction, g: &GridFunction) -> Result<f64> {
        f.check_compatible(g)?;
        let nf = self.norm(f)?;
        let ng = self.norm(g)?;
        if nf == 0.0 {
            return Err(Error::UndefinedAngle("first argument"));
        }
        if ng == 0.0 {
            return Err(Error::UndefinedAngle("second argument"));
        }
        let n = f.ncomp;
        let (mut minus, mut plus) = (0.0, 0.0);
        for (a, b) in f.values.chunks_exact(n).zip(g.values.chunks_exact(n)) {
            for c in 0..n {
                if self.mask.contains(c) {
                    let (x, y) = (a[c] / nf, b[c] / ng);
                    minus += (x - y) * (x - y);
                    plus += (x + y) * (x + y);
                }
            }
        }
        Ok(2.0 * minus.sqrt().atan2(plus.sqrt()))
    }
}

pub fn l2_norm(f: &GridFunction, mask: ComponentMask) -> Result<f64> {
    Metric::new(mask).norm(f)
}

pub fn dot(f: &GridFunction, g: &GridFunction, mask: ComponentMask) -> Result<f64> {
    Metric::new(mask).dot(f, g)
}

pub fn distance(f: &GridFunction, g: &GridFunction, mask: ComponentMask) -> Result<f64> {
    Metric::new(mask).distance(f, g)
}

pub fn angle_between(f: &GridFunction, g: &GridFunction, mask: ComponentMask) -> Result<f64> {
    Metric::new(mask).angle(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn field(grid: Grid, ncomp: usize, seed: u64) -> GridFunction {
        // small LCG keeps the unit tests free of rand plumbing
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let values = (0..grid.cells() * ncomp)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect();
        GridFunction::from_values(grid, ncomp, values).unwrap()
    }

    #[test]
    fn make_grid_examples() {
        let g = Grid::unit_square(1).unwrap();
        assert_eq!(g.center(0, 0), (0.5, 0.5));
        let g = Grid::unit_square(100).unwrap();
        assert_eq!(g.hx, 0.01);
        assert_eq!(g.hy, 0.01);
        let g = Grid::unit_square(400).unwrap();
        assert_eq!(g.hx, 0.0025);
    }

    #[test]
    fn make_grid_rejects_bad_input() {
        assert!(Grid::new(0, 3, Extent::UNIT).is_err());
        assert!(Grid::new(3, 0, Extent::UNIT).is_err());
        assert!(Grid::new(3, 3, Extent::new(1.0, 1.0, 0.0, 1.0)).is_err());
        assert!(Grid::new(3, 3, Extent::new(0.0, 1.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn norm_examples() {
        let g = Grid::unit_square(7).unwrap();
        let zero = GridFunction::zeros(g, 4);
        assert_eq!(l2_norm(&zero, ComponentMask::DENSITY).unwrap(), 0.0);
        let c = GridFunction::from_fn(g, 1, |_, _, v| v[0] = -2.5).unwrap();
        assert!((l2_norm(&c, ComponentMask::DENSITY).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn empty_mask_rejected() {
        let g = Grid::unit_square(2).unwrap();
        let f = GridFunction::zeros(g, 4);
        let empty = ComponentMask::from_components(&[]);
        assert!(matches!(l2_norm(&f, empty), Err(Error::InvalidMask(_))));
        let too_wide = ComponentMask::from_components(&[5]);
        assert!(l2_norm(&f, too_wide).is_err());
    }

    #[test]
    fn metrics_match_direct_double_loop() {
        let g = Grid::new(10, 10, Extent::new(0.0, 2.0, -1.0, 0.5)).unwrap();
        let f = field(g, 4, 1);
        let h = field(g, 4, 2);
        let mask = ComponentMask::from_components(&[0, 2]);
        let w = g.hx * g.hy;
        let (mut ff, mut fh, mut dd) = (0.0, 0.0, 0.0);
        for j in 0..10 {
            for i in 0..10 {
                for c in [0, 2] {
                    let a = f.get(i, j, c);
                    let b = h.get(i, j, c);
                    ff += a * a * w;
                    fh += a * b * w;
                    dd += (a - b) * (a - b) * w;
                }
            }
        }
        assert!((l2_norm(&f, mask).unwrap() - ff.sqrt()).abs() < 1e-13);
        assert!((dot(&f, &h, mask).unwrap() - fh).abs() < 1e-13);
        assert!((distance(&f, &h, mask).unwrap() - dd.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn unweighted_variant_drops_measure() {
        let g = Grid::unit_square(4).unwrap();
        let f = GridFunction::from_fn(g, 1, |_, _, v| v[0] = 1.0).unwrap();
        let m = Metric {
            mask: ComponentMask::DENSITY,
            weighting: Weighting::Unweighted,
        };
        assert!((m.norm(&f).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn angle_examples() {
        let g = Grid::unit_square(6).unwrap();
        let m = ComponentMask::DENSITY;
        let f = field(g, 1, 9);
        assert!(angle_between(&f, &f, m).unwrap() < 1e-7);
        assert!((angle_between(&f, &f.scale(-1.0), m).unwrap() - PI).abs() < 1e-7);
        let left = GridFunction::from_fn(g, 1, |x, _, v| v[0] = if x < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let right = GridFunction::from_fn(g, 1, |x, _, v| v[0] = if x < 0.5 { 0.0 } else { 3.0 }).unwrap();
        assert_eq!(angle_between(&left, &right, m).unwrap(), FRAC_PI_2);
        let zero = GridFunction::zeros(g, 1);
        assert!(matches!(angle_between(&zero, &f, m), Err(Error::UndefinedAngle(_))));
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = GridFunction::zeros(Grid::unit_square(3).unwrap(), 1);
        let b = GridFunction::zeros(Grid::unit_square(4).unwrap(), 1);
        let c = GridFunction::zeros(Grid::unit_square(3).unwrap(), 4);
        assert!(dot(&a, &b, ComponentMask::DENSITY).is_err());
        assert!(distance(&a, &c, ComponentMask::DENSITY).is_err());
    }

    #[test]
    fn from_values_rejects_nan() {
        let g = Grid::unit_square(1).unwrap();
        assert!(matches!(
            GridFunction::from_values(g, 1, vec![f64::NAN]),
            Err(Error::NonFinite(0))
        ));
    }

    proptest! {
        #[test]
        fn cauchy_schwarz_and_triangle(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), c in -5.0f64..5.0) {
            let g = Grid::unit_square(5).unwrap();
            let m = ComponentMask::CONSERVED;
            let (f, h, k) = (field(g, 4, s1), field(g, 4, s2), field(g, 4, s3));
            let nf = l2_norm(&f, m).unwrap();
            let nh = l2_norm(&h, m).unwrap();
            prop_assert!(dot(&f, &h, m).unwrap().abs() <= nf * nh + 1e-12);
            let dfh = distance(&f, &h, m).unwrap();
            let dhk = distance(&h, &k, m).unwrap();
            let dfk = distance(&f, &k, m).unwrap();
            prop_assert!(dfk <= dfh + dhk + 1e-12);
            prop_assert!((distance(&h, &f, m).unwrap() - dfh).abs() == 0.0);
            prop_assert!((l2_norm(&f.scale(c), m).unwrap() - c.abs() * nf).abs() < 1e-13);
            prop_assert!((dot(&f, &f, m).unwrap() - nf * nf).abs() < 1e-13);
        }

        #[test]
        fn angle_invariant_under_positive_scaling(s1 in any::<u64>(), s2 in any::<u64>(), a in 0.01f64..100.0, b in 0.01f64..100.0) {
            let g = Grid::unit_square(4).unwrap();
            let m = ComponentMask::DENSITY;
            let (f, h) = (field(g, 2, s1), field(g, 2, s2));
            let base = angle_between(&f, &h, m).unwrap();
            let scaled = angle_between(&f.scale(a), &h.scale(b), m).unwrap();
            prop_assert!((base - scaled).abs() < 1e-12);
        }
    }
}
