//! Hypercube partitions and least-squares projection onto their indicators.
//!
//! The normalized indicators `sqrt(M / card D_j) 1_{D_j}` are orthonormal for
//! the empirical inner product, so the least-squares coefficients have a
//! closed form and the fitted function is the per-cell mean of the responses.
//! No linear system is ever solved here.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regular partition of `[d1, d2)` into boxes of edge `δ`.
///
/// Cell `j` with multi-index `(j_0, .., j_{d-1})` is the half-open box
/// `Π_i [d1_i + j_i δ, d1_i + (j_i + 1) δ)`; the multi-index is flattened
/// row-major (axis 0 slowest). When the span is not a multiple of `δ` the
/// last cell along an axis is cut at `d2`.
#[derive(Debug, Serialize, Deserialize)]
pub struct HypercubeBasis {
    lower: Vec<f64>,
    upper: Vec<f64>,
    delta: f64,
    cells_per_axis: Vec<usize>,
    total: usize,
    #[serde(skip)]
    clamps: AtomicU64,
}

impl Clone for HypercubeBasis {
    fn clone(&self) -> Self {
        Self {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            delta: self.delta,
            cells_per_axis: self.cells_per_axis.clone(),
            total: self.total,
            clamps: AtomicU64::new(self.clamp_count()),
        }
    }
}

impl PartialEq for HypercubeBasis {
    fn eq(&self, other: &Self) -> bool {
        self.lower == other.lower && self.upper == other.upper && self.delta == other.delta
    }
}

/// `ceil(span / δ)`, treating ratios within 1e-9 (relative) of an integer as that integer.
fn cells_along(span: f64, delta: f64) -> usize {
    let ratio = span / delta;
    let nearest = ratio.round();
    let cells = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    (cells as usize).max(1)
}

impl HypercubeBasis {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells_per_axis
    }

    /// Total number of cells `L`.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Number of lookups whose point fell outside `[d1, d2)`.
    pub fn clamp_count(&self) -> u64 {
        self.clamps.load(Ordering::Relaxed)
    }

    /// Index of the cell containing `clamp(x, d1, d2 - ulp)`.
    pub fn locate(&self, x: &[f64]) -> usize {
        debug_assert_eq!(x.len(), self.dim());
        let mut index = 0;
        let mut clamped = false;
        for (i, &v) in x.iter().enumerate() {
            let lo = self.lower[i];
            let hi = self.upper[i];
            let v = if v >= lo && v < hi {
                v
            } else {
                clamped = true;
                if v.is_nan() || v < lo {
                    lo
                } else {
                    hi.next_down()
                }
            };
            let along = self.cells_per_axis[i];
            let j = (((v - lo) / self.delta).floor() as usize).min(along - 1);
            index = index * along + j;
        }
        if clamped {
            self.clamps.fetch_add(1, Ordering::Relaxed);
        }
        index
    }

    /// Cell of every point in a flattened `M × d` array.
    pub fn locate_all(&self, points: &[f64]) -> Vec<usize> {
        points
            .chunks_exact(self.dim())
            .map(|x| self.locate(x))
            .collect()
    }

    /// Multi-index of cell `j`.
    pub fn multi_index(&self, mut j: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = j % self.cells_per_axis[i];
            j /= self.cells_per_axis[i];
        }
        idx
    }

    /// Lower and upper corners of cell `j`; the upper corner is capped at `d2`.
    pub fn cell_bounds(&self, j: usize) -> (Vec<f64>, Vec<f64>) {
        let idx = self.multi_index(j);
        let lo: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(i, &k)| self.lower[i] + k as f64 * self.delta)
            .collect();
        let hi = idx
            .iter()
            .enumerate()
            .map(|(i, &k)| (self.lower[i] + (k + 1) as f64 * self.delta).min(self.upper[i]))
            .collect();
        (lo, hi)
    }
}

/// Partitions `[d1, d2)` into hypercubes of edge `δ`.
pub fn build_basis(lower: &[f64], upper: &[f64], delta: f64) -> Result<HypercubeBasis> {
    if lower.is_empty() || lower.len() != upper.len() {
        return Err(Error::InvalidBasis(format!(
            "bounds must be non-empty and of equal length, got {} and {}",
            lower.len(),
            upper.len()
        )));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidBasis(format!(
            "edge must be > 0, got {delta}"
        )));
    }
    let mut cells_per_axis = Vec::with_capacity(lower.len());
    for (i, (&lo, &hi)) in lower.iter().zip(upper).enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidBasis(format!(
                "axis {i}: need finite d1 < d2, got [{lo}, {hi}]"
            )));
        }
        if delta >= hi - lo {
            log::warn!("axis {i}: edge {delta} covers the whole span [{lo}, {hi}]; one cell");
        }
        cells_per_axis.push(cells_along(hi - lo, delta));
    }
    let total = cells_per_axis.iter().product();
    Ok(HypercubeBasis {
        lower: lower.to_vec(),
        upper: upper.to_vec(),
        delta,
        cells_per_axis,
        total,
        clamps: AtomicU64::new(0),
    })
}

/// A function constant on every cell of a basis, with `width` values per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseField {
    basis: Arc<HypercubeBasis>,
    width: usize,
    /// `L × width`, cell-major.
    values: Vec<f64>,
    occupancy: Vec<usize>,
}

impl PiecewiseField {
    pub fn zeros(basis: Arc<HypercubeBasis>, width: usize) -> Self {
        let cells = basis.len();
        Self {
            basis,
            width,
            values: vec![0.0; cells * width],
            occupancy: vec![0; cells],
        }
    }

    /// Per-cell means of `responses` (`M × width`) grouped by the precomputed `cells`.
    ///
    /// Means are updated incrementally in sample order, so a cell whose
    /// responses are all equal reproduces that value exactly.
    pub fn from_cells(
        basis: Arc<HypercubeBasis>,
        cells: &[usize],
        responses: &[f64],
        width: usize,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptySample("projection needs M >= 1".into()));
        }
        if responses.len() != cells.len() * width {
            return Err(Error::dims(
                "responses",
                cells.len() * width,
                responses.len(),
            ));
        }
        let mut field = Self::zeros(basis, width);
        if width == 0 {
            for &j in cells {
                field.occupancy[j] += 1;
            }
            return Ok(field);
        }
        for (&j, r) in cells.iter().zip(responses.chunks_exact(width)) {
            field.occupancy[j] += 1;
            let count = field.occupancy[j] as f64;
            for (mean, v) in field.values[j * width..(j + 1) * width].iter_mut().zip(r) {
                *mean += (v - *mean) / count;
            }
        }
        Ok(field)
    }

    pub fn basis(&self) -> &Arc<HypercubeBasis> {
        &self.basis
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn occupancy(&self) -> &[usize] {
        &self.occupancy
    }

    pub fn value_at_cell(&self, j: usize) -> &[f64] {
        &self.values[j * self.width..(j + 1) * self.width]
    }

    /// Value of the cell containing `clamp(x)`.
    pub fn eval(&self, x: &[f64]) -> &[f64] {
        self.value_at_cell(self.basis.locate(x))
    }

    /// Largest absolute difference between the values of two fields on the same basis.
    pub fn sup_distance(&self, other: &PiecewiseField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Occupancy summary: `(occupied cells, min occupancy among occupied, max occupancy)`.
    pub fn occupancy_stats(&self) -> OccupancyStats {
        let occupied: Vec<usize> = self.occupancy.iter().copied().filter(|&c| c > 0).collect();
        OccupancyStats {
            cells: self.occupancy.len(),
            occupied: occupied.len(),
            min_occupied: occupied.iter().copied().min().unwrap_or(0),
            max_occupied: occupied.iter().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyStats {
    pub cells: usize,
    pub occupied: usize,
    pub min_occupied: usize,
    pub max_occupied: usize,
}

/// Empirical least-squares projection of `responses` (`M × width`) at `points`
/// (`M × d`) onto the indicator basis.
pub fn project(
    basis: &Arc<HypercubeBasis>,
    points: &[f64],
    responses: &[f64],
    width: usize,
) -> Result<PiecewiseField> {
    if !points.len().is_multiple_of(basis.dim()) {
        return Err(Error::dims(
            "points",
            basis.dim(),
            points.len() % basis.dim(),
        ));
    }
    let cells = basis.locate_all(points);
    PiecewiseField::from_cells(Arc::clone(basis), &cells, responses, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    #[test]
    fn cell_counts() {
        assert_eq!(build_basis(&[60.0], &[200.0], 1.0).unwrap().len(), 140);
        assert_eq!(build_basis(&[60.0], &[200.0], 0.5).unwrap().len(), 280);
        let b = build_basis(&[0.0, 0.0], &[10.0, 10.0], 2.0).unwrap();
        assert_eq!(b.len(), 25);
        assert_eq!(b.cells_per_axis(), &[5, 5]);
    }

    #[test]
    fn remainder_goes_to_last_cell() {
        let b = build_basis(&[40.0], &[180.0], 50.0).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.cell_bounds(2), (vec![140.0], vec![180.0]));
        assert_eq!(b.locate(&[179.9]), 2);
    }

    #[test]
    fn rejects_bad_bases() {
        assert!(build_basis(&[0.0], &[1.0], 0.0).is_err());
        assert!(build_basis(&[0.0], &[1.0], -1.0).is_err());
        assert!(build_basis(&[1.0], &[1.0], 0.5).is_err());
        assert!(build_basis(&[0.0, 0.0], &[1.0], 0.5).is_err());
        // Edge covering the span is allowed.
        assert_eq!(build_basis(&[0.0], &[1.0], 2.0).unwrap().len(), 1);
    }

    #[test]
    fn locate_edges_and_clamping() {
        let b = build_basis(&[60.0], &[200.0], 1.0).unwrap();
        assert_eq!(b.locate(&[60.0]), 0);
        assert_eq!(b.locate(&[61.0]), 1);
        assert_eq!(b.locate(&[60.999]), 0);
        assert_eq!(b.clamp_count(), 0);
        assert_eq!(b.locate(&[250.0]), 139);
        assert_eq!(b.locate(&[200.0]), 139);
        assert_eq!(b.locate(&[10.0]), 0);
        assert_eq!(b.clamp_count(), 3);
    }

    #[test]
    fn locate_row_major() {
        let b = build_basis(&[0.0, 0.0], &[10.0, 10.0], 2.0).unwrap();
        assert_eq!(b.locate(&[0.0, 0.0]), 0);
        assert_eq!(b.locate(&[0.0, 2.0]), 1);
        assert_eq!(b.locate(&[2.0, 0.0]), 5);
        assert_eq!(b.multi_index(7), vec![1, 2]);
        assert_eq!(b.cell_bounds(7), (vec![2.0, 4.0], vec![4.0, 6.0]));
    }

    #[test]
    fn one_cell_mean() {
        let b = Arc::new(build_basis(&[0.0], &[3.0], 1.0).unwrap());
        let field = project(&b, &[0.1, 0.5, 0.9], &[1.0, 2.0, 3.0], 1).unwrap();
        assert_eq!(field.values(), &[2.0, 0.0, 0.0]);
        assert_eq!(field.occupancy(), &[3, 0, 0]);
    }

    #[test]
    fn empty_sample_rejected() {
        let b = Arc::new(build_basis(&[0.0], &[3.0], 1.0).unwrap());
        assert!(matches!(
            project(&b, &[], &[], 1),
            Err(Error::EmptySample(_))
        ));
    }

    /// Least squares over `sqrt(M / card) 1_{D_j}` for occupied cells, by normal equations.
    fn dense_least_squares(cells: &[usize], responses: &[f64], n_cells: usize) -> Vec<f64> {
        let m = cells.len();
        let mut card = vec![0usize; n_cells];
        for &j in cells {
            card[j] += 1;
        }
        let occupied: Vec<usize> = (0..n_cells).filter(|&j| card[j] > 0).collect();
        let p = DMatrix::from_fn(m, occupied.len(), |row, col| {
            let j = occupied[col];
            if cells[row] == j {
                (m as f64 / card[j] as f64).sqrt()
            } else {
                0.0
            }
        });
        let r = DVector::from_column_slice(responses);
        let gram = p.transpose() * &p;
        let rhs = p.transpose() * r;
        let alpha = gram
            .lu()
            .solve(&rhs)
            .expect("gram matrix is diagonal and positive");
        let mut out = vec![0.0; n_cells];
        for (col, &j) in occupied.iter().enumerate() {
            out[j] = alpha[col] * (m as f64 / card[j] as f64).sqrt();
        }
        out
    }

    #[test]
    fn six_samples_three_cells_match_dense_solve() {
        let b = Arc::new(build_basis(&[0.0], &[3.0], 1.0).unwrap());
        let points = [0.2, 1.5, 2.7, 0.9, 1.1, 2.0];
        let responses = [3.0, -1.0, 4.0, 1.0, 5.0, -9.0];
        let field = project(&b, &points, &responses, 1).unwrap();
        let oracle = dense_least_squares(&b.locate_all(&points), &responses, 3);
        // cells: {0.2, 0.9} -> 2.0, {1.5, 1.1} -> 2.0, {2.7, 2.0} -> -2.5
        assert_eq!(oracle.len(), 3);
        for (v, o) in field.values().iter().zip(&oracle) {
            assert!((v - o).abs() < 1e-12);
        }
        assert!((field.values()[2] + 2.5).abs() < 1e-15);
    }

    #[test]
    fn constant_responses() {
        let b = Arc::new(build_basis(&[0.0], &[4.0], 1.0).unwrap());
        let field = project(&b, &[0.5, 1.5, 1.7, 3.2], &[7.0; 4], 1).unwrap();
        assert_eq!(field.values(), &[7.0, 7.0, 0.0, 7.0]);
    }

    #[test]
    fn multi_width_responses() {
        let b = Arc::new(build_basis(&[0.0], &[2.0], 1.0).unwrap());
        let field = project(&b, &[0.5, 0.6, 1.5], &[1.0, 10.0, 3.0, 30.0, 5.0, 50.0], 2).unwrap();
        assert_eq!(field.value_at_cell(0), &[2.0, 20.0]);
        assert_eq!(field.value_at_cell(1), &[5.0, 50.0]);
        assert_eq!(field.eval(&[1.2]), &[5.0, 50.0]);
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
        (1usize..80, 0.5f64..3.0).prop_flat_map(|(m, delta)| {
            (
                proptest::collection::vec(-1.0f64..11.0, m),
                proptest::collection::vec(-100.0f64..100.0, m),
                Just(delta),
            )
        })
    }

    proptest! {
        #[test]
        fn fitted_values_are_contracted((points, responses, delta) in instance()) {
            let b = Arc::new(build_basis(&[0.0], &[10.0], delta).unwrap());
            let field = project(&b, &points, &responses, 1).unwrap();
            let bound = responses.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            prop_assert!(field.values().iter().all(|v| v.abs() <= bound + 1e-12));
            prop_assert_eq!(field.occupancy().iter().sum::<usize>(), points.len());
        }

        #[test]
        fn projection_is_idempotent((points, responses, delta) in instance()) {
            let b = Arc::new(build_basis(&[0.0], &[10.0], delta).unwrap());
            let field = project(&b, &points, &responses, 1).unwrap();
            let refit: Vec<f64> = points.iter().map(|&x| field.eval(&[x])[0]).collect();
            let again = project(&b, &points, &refit, 1).unwrap();
            prop_assert!(field.sup_distance(&again) <= 1e-12 * (1.0 + field.values().iter().fold(0.0f64, |a, v| a.max(v.abs()))));
        }

        #[test]
        fn cell_constant_functions_are_reproduced(points in proptest::collection::vec(0.0f64..10.0, 1..60), levels in proptest::collection::vec(-5.0f64..5.0, 5)) {
            let b = Arc::new(build_basis(&[0.0], &[10.0], 2.0).unwrap());
            let responses: Vec<f64> = points.iter().map(|&x| levels[b.locate(&[x])]).collect();
            let field = project(&b, &points, &responses, 1).unwrap();
            for (j, &level) in levels.iter().enumerate() {
                if field.occupancy()[j] > 0 {
                    prop_assert_eq!(field.values()[j], level);
                } else {
                    prop_assert_eq!(field.values()[j], 0.0);
                }
            }
        }

        #[test]
        fn every_point_in_domain_has_one_cell(x in 0.0f64..10.0, y in 0.0f64..10.0, delta in 0.3f64..4.0) {
            let b = build_basis(&[0.0, 0.0], &[10.0, 10.0], delta).unwrap();
            let j = b.locate(&[x, y]);
            prop_assert!(j < b.len());
            let (lo, hi) = b.cell_bounds(j);
            prop_assert!(lo[0] <= x && x < hi[0] + 1e-12);
            prop_assert!(lo[1] <= y && y < hi[1] + 1e-12);
            prop_assert_eq!(b.clamp_count(), 0);
        }
    }
}
