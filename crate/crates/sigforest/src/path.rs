//! Discretized functional observations as piecewise-linear paths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary sample label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Normal,
    Anomaly,
}

impl Label {
    pub fn is_anomaly(self) -> bool {
        matches!(self, Label::Anomaly)
    }

    /// 1 for anomalies, 0 for normal data.
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Normal => 0,
            Label::Anomaly => 1,
        }
    }
}

/// A contiguous index window on a shared grid: grid points
/// `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

impl Window {
    pub fn new(start: usize, len: usize) -> Self {
        Window { start, len }
    }

    /// Full-grid window over `points` grid points.
    pub fn full(points: usize) -> Self {
        Window { start: 0, len: points }
    }

    pub fn fits(&self, points: usize) -> bool {
        self.len >= 2 && self.start + self.len <= points
    }
}

/// Borrowed view of a path: `times` has `p` entries, `values` is a row-major
/// `p x dim` block. All signature and projection kernels work on views so
/// windowing never copies.
#[derive(Debug, Clone, Copy)]
pub struct PathRef<'a> {
    pub times: &'a [f64],
    pub values: &'a [f64],
    pub dim: usize,
}

impl<'a> PathRef<'a> {
    pub fn points(&self) -> usize {
        self.times.len()
    }

    /// Value of coordinate `coord` (0-based) at grid index `i`.
    #[inline]
    pub fn value(&self, i: usize, coord: usize) -> f64 {
        self.values[i * self.dim + coord]
    }

    /// Row of all coordinates at grid index `i`.
    #[inline]
    pub fn point(&self, i: usize) -> &'a [f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Sub-path over the window; time values are kept unchanged since
    /// signatures are reparameterization-invariant.
    pub fn restrict(&self, w: Window) -> Result<PathRef<'a>> {
        if !w.fits(self.points()) {
            return Err(Error::WindowOutOfBounds {
                start: w.start,
                len: w.len,
                points: self.points(),
            });
        }
        Ok(PathRef {
            times: &self.times[w.start..w.start + w.len],
            values: &self.values[w.start * self.dim..(w.start + w.len) * self.dim],
            dim: self.dim,
        })
    }

    pub fn to_owned_path(&self) -> FunctionalPath {
        FunctionalPath {
            times: self.times.to_vec(),
            values: self.values.to_vec(),
            dim: self.dim,
        }
    }
}

/// One curve: a strictly increasing time grid in [0, 1] plus a row-major
/// `p x d` value matrix, interpreted piecewise-linearly between grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalPath {
    times: Vec<f64>,
    values: Vec<f64>,
    dim: usize,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::TooFewPoints { min: 2, got: times.len() });
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonIncreasingTimes);
    }
    let (first, last) = (times[0], times[times.len() - 1]);
    if first < 0.0 || last > 1.0 {
        return Err(Error::TimesOutOfRange { first, last });
    }
    Ok(())
}

impl FunctionalPath {
    /// Build a path from observations `(t_i, x_i)` with `x_i` a d-vector.
    pub fn from_observations(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        check_times(&times)?;
        if values.len() != times.len() {
            return Err(Error::GridShapeMismatch { times: times.len(), rows: values.len() });
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|row| row.len() != dim) {
            return Err(Error::RaggedValues);
        }
        let flat: Vec<f64> = values.into_iter().flatten().collect();
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValues);
        }
        Ok(FunctionalPath { times, values: flat, dim })
    }

    /// Build from a flat row-major `p x dim` block.
    pub fn from_flat(times: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        check_times(&times)?;
        if dim == 0 || values.len() != times.len() * dim {
            return Err(Error::GridShapeMismatch {
                times: times.len(),
                rows: values.len().checked_div(dim).unwrap_or(0),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValues);
        }
        Ok(FunctionalPath { times, values, dim })
    }

    pub fn points(&self) -> usize {
        self.times.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn view(&self) -> PathRef<'_> {
        PathRef { times: &self.times, values: &self.values, dim: self.dim }
    }

    /// Owned sub-path over the window.
    pub fn restrict(&self, w: Window) -> Result<FunctionalPath> {
        Ok(self.view().restrict(w)?.to_owned_path())
    }

    /// Returns the (d+1)-dimensional path whose first coordinate is the time
    /// grid itself.
    pub fn time_augment(&self) -> FunctionalPath {
        FunctionalPath {
            times: self.times.clone(),
            values: augment_values(&self.times, &self.values, self.dim),
            dim: self.dim + 1,
        }
    }
}

fn augment_values(times: &[f64], values: &[f64], dim: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len() * (dim + 1));
    for (i, &t) in times.iter().enumerate() {
        out.push(t);
        out.extend_from_slice(&values[i * dim..(i + 1) * dim]);
    }
    out
}

/// A set of curves on one shared grid, with optional labels.
///
/// The shared grid is what makes index-aligned split windows meaningful:
/// the same window selects the same time span on every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalDataset {
    grid: Vec<f64>,
    dim: usize,
    /// One row-major `p x dim` block per sample.
    samples: Vec<Vec<f64>>,
    labels: Option<Vec<Label>>,
}

impl FunctionalDataset {
    pub fn new(
        grid: Vec<f64>,
        dim: usize,
        samples: Vec<Vec<f64>>,
        labels: Option<Vec<Label>>,
    ) -> Result<Self> {
        check_times(&grid)?;
        if samples.is_empty() {
            return Err(Error::TooFewSamples { min: 1, got: 0 });
        }
        if dim == 0 {
            return Err(Error::RaggedValues);
        }
        let expected = grid.len() * dim;
        for (index, s) in samples.iter().enumerate() {
            if s.len() != expected {
                return Err(Error::SampleShapeMismatch { index });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValues);
            }
        }
        if let Some(ref l) = labels {
            if l.len() != samples.len() {
                return Err(Error::ScoreLengthMismatch { left: samples.len(), right: l.len() });
            }
        }
        Ok(FunctionalDataset { grid, dim, samples, labels })
    }

    /// Uniform grid `t_i = i / (p - 1)` on [0, 1].
    pub fn uniform_grid(points: usize) -> Vec<f64> {
        (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> usize {
        self.grid.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn sample(&self, i: usize) -> PathRef<'_> {
        PathRef { times: &self.grid, values: &self.samples[i], dim: self.dim }
    }

    pub fn sample_values(&self, i: usize) -> &[f64] {
        &self.samples[i]
    }

    pub fn to_path(&self, i: usize) -> FunctionalPath {
        self.sample(i).to_owned_path()
    }

    /// Dataset with every sample time-augmented.
    pub fn time_augment(&self) -> FunctionalDataset {
        let samples = self
            .samples
            .iter()
            .map(|s| augment_values(&self.grid, s, self.dim))
            .collect();
        FunctionalDataset {
            grid: self.grid.clone(),
            dim: self.dim + 1,
            samples,
            labels: self.labels.clone(),
        }
    }

    /// Reorder samples (and labels) by the given permutation.
    pub fn permuted(&self, order: &[usize]) -> FunctionalDataset {
        FunctionalDataset {
            grid: self.grid.clone(),
            dim: self.dim,
            samples: order.iter().map(|&i| self.samples[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| order.iter().map(|&i| l[i]).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_path() {
        let p = FunctionalPath::from_observations(vec![0.0, 1.0], vec![vec![0.0], vec![1.0]])
            .unwrap();
        assert_eq!(p.points(), 2);
        assert_eq!(p.dim(), 1);
    }

    #[test]
    fn rejects_non_strictly_increasing_grid() {
        let err = FunctionalPath::from_observations(
            vec![0.0, 0.5, 0.5, 1.0],
            vec![vec![0.0]; 4],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonIncreasingTimes));
    }

    #[test]
    fn rejects_nan_and_short_grids() {
        assert!(matches!(
            FunctionalPath::from_observations(vec![0.0, 1.0], vec![vec![f64::NAN], vec![0.0]]),
            Err(Error::NonFiniteValues)
        ));
        assert!(matches!(
            FunctionalPath::from_observations(vec![0.0], vec![vec![0.0]]),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn two_dimensional_path_shape() {
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.5, 1.0],
            vec![vec![0.0, 1.0], vec![1.0, 2.0], vec![2.0, 3.0]],
        )
        .unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.points(), 3);
        assert_eq!(p.view().value(1, 1), 2.0);
    }

    #[test]
    fn restrict_full_window_is_identity() {
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.25, 0.5, 0.75, 1.0],
            (0..5).map(|i| vec![i as f64]).collect(),
        )
        .unwrap();
        let r = p.restrict(Window::full(5)).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn restrict_rejects_overrun() {
        let grid: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let p = FunctionalPath::from_observations(grid, (0..10).map(|i| vec![i as f64]).collect())
            .unwrap();
        assert!(matches!(
            p.restrict(Window::new(5, 6)),
            Err(Error::WindowOutOfBounds { .. })
        ));
    }

    #[test]
    fn floor_window_on_24_point_grid() {
        // p = 24, omega = 10 gives windows of floor(24 / 10) = 2 points.
        let grid: Vec<f64> = (0..24).map(|i| i as f64 / 23.0).collect();
        let p = FunctionalPath::from_observations(
            grid.clone(),
            (0..24).map(|i| vec![i as f64]).collect(),
        )
        .unwrap();
        let sub = p.restrict(Window::new(7, 2)).unwrap();
        assert_eq!(sub.points(), 2);
        assert_eq!(sub.times(), &grid[7..9]);
    }

    #[test]
    fn restrict_composes() {
        let grid: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
        let p = FunctionalPath::from_observations(
            grid,
            (0..12).map(|i| vec![(i * i) as f64]).collect(),
        )
        .unwrap();
        let a = p.restrict(Window::new(2, 8)).unwrap().restrict(Window::new(3, 4)).unwrap();
        let b = p.restrict(Window::new(5, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn time_augment_prepends_grid() {
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.5, 1.0],
            vec![vec![7.0, 1.0], vec![7.0, 2.0], vec![7.0, 3.0]],
        )
        .unwrap();
        let a = p.time_augment();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.points(), 3);
        for i in 0..3 {
            assert_eq!(a.view().value(i, 0), p.times()[i]);
            assert_eq!(a.view().value(i, 1), 7.0);
        }
    }

    #[test]
    fn constant_path_augmented_has_moving_first_coordinate() {
        let p = FunctionalPath::from_observations(vec![0.0, 1.0], vec![vec![3.0], vec![3.0]])
            .unwrap();
        let a = p.time_augment();
        // displacement of coordinate 1 equals the time span
        assert_eq!(a.view().value(1, 0) - a.view().value(0, 0), 1.0);
    }

    #[test]
    fn dataset_shape_checks() {
        let grid = FunctionalDataset::uniform_grid(4);
        let ok = FunctionalDataset::new(grid.clone(), 1, vec![vec![0.0; 4]; 3], None).unwrap();
        assert_eq!(ok.len(), 3);
        assert!(matches!(
            FunctionalDataset::new(grid.clone(), 1, vec![vec![0.0; 3]], None),
            Err(Error::SampleShapeMismatch { .. })
        ));
        assert!(matches!(
            FunctionalDataset::new(grid, 1, vec![], None),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
