use super::space::{PhaseSpace, Point};
use crate::error::{Error, Result};

/// A measure on a regular grid of `resolution` cells per axis.
///
/// Cells are half-open, `[l/M, (l+1)/M)`, except that the right endpoint 1
/// belongs to the last cell. Two-axis grids are stored with the first axis
/// outermost (`index = i₀·M + i₁`). On the sphere the axes are the
/// equal-area chart `((1 − cos θ)/2, φ/2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    space: PhaseSpace,
    resolution: usize,
    weights: Vec<f64>,
    samples: u64,
}

impl EmpiricalMeasure {
    pub fn zeros(space: PhaseSpace, resolution: usize) -> Self {
        assert!(resolution > 0, "grid resolution must be positive");
        Self { space, resolution, weights: vec![0.0; resolution.pow(space.axes() as u32)], samples: 0 }
    }

    /// Equal mass in every cell; on the sphere this is the normalized
    /// Lebesgue measure.
    pub fn uniform(space: PhaseSpace, resolution: usize) -> Self {
        let mut m = Self::zeros(space, resolution);
        let w = 1.0 / m.weights.len() as f64;
        m.weights.iter_mut().for_each(|x| *x = w);
        m
    }

    pub fn point_mass(space: PhaseSpace, resolution: usize, at: &Point) -> Self {
        let mut m = Self::zeros(space, resolution);
        let k = m.cell_of(at);
        m.weights[k] = 1.0;
        m
    }

    pub fn from_weights(space: PhaseSpace, resolution: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != resolution.pow(space.axes() as u32) {
            return Err(Error::Invalid(format!("{} weights for a {resolution}-cell grid on {space:?}", weights.len())));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Invalid("weights must be nonnegative".into()));
        }
        Ok(Self { space, resolution, weights, samples: 0 })
    }

    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn axes(&self) -> usize {
        self.space.axes()
    }

    /// Raw (unnormalized) cell weights; sample counts for chaos-game output.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of points binned into this measure (zero for grid-evolved measures).
    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn normalized(&self) -> Vec<f64> {
        let t = self.total();
        self.weights.iter().map(|w| w / t).collect()
    }

    fn axis_cell(&self, u: f64) -> usize {
        ((u * self.resolution as f64).floor().max(0.0) as usize).min(self.resolution - 1)
    }

    pub fn cell_of(&self, p: &Point) -> usize {
        let u = self.space.unit_coords(p);
        match self.axes() {
            1 => self.axis_cell(u[0]),
            _ => self.axis_cell(u[0]) * self.resolution + self.axis_cell(u[1]),
        }
    }

    /// Per-axis cell indices of a flat index.
    pub fn cell_indices(&self, k: usize) -> Vec<usize> {
        match self.axes() {
            1 => vec![k],
            _ => vec![k / self.resolution, k % self.resolution],
        }
    }

    pub fn cell_center(&self, k: usize) -> Point {
        let m = self.resolution as f64;
        let idx = self.cell_indices(k);
        let u0 = (idx[0] as f64 + 0.5) / m;
        let u1 = idx.get(1).map_or(0.0, |&i| (i as f64 + 0.5) / m);
        self.space.from_unit_coords([u0, u1])
    }

    pub fn add_point(&mut self, p: &Point) {
        let k = self.cell_of(p);
        self.weights[k] += 1.0;
        self.samples += 1;
    }

    pub(crate) fn add_mass(&mut self, k: usize, w: f64) {
        self.weights[k] += w;
    }

    /// Sum another histogram on the same grid into this one.
    pub fn merge(&mut self, other: &EmpiricalMeasure) -> Result<()> {
        if other.space != self.space || other.resolution != self.resolution {
            return Err(Error::Invalid("cannot merge histograms on different grids".into()));
        }
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        self.samples += other.samples;
        Ok(())
    }

    /// Merge blocks of `factor` cells per axis; `factor` must divide the resolution.
    pub fn coarsen(&self, factor: usize) -> Result<EmpiricalMeasure> {
        if factor == 0 || !self.resolution.is_multiple_of(factor) {
            return Err(Error::Invalid(format!("coarsening factor {factor} does not divide {}", self.resolution)));
        }
        let m = self.resolution / factor;
        let mut out = EmpiricalMeasure::zeros(self.space, m);
        out.samples = self.samples;
        for (k, &w) in self.weights.iter().enumerate() {
            let idx = self.cell_indices(k);
            let target = match self.axes() {
                1 => idx[0] / factor,
                _ => (idx[0] / factor) * m + idx[1] / factor,
            };
            out.weights[target] += w;
        }
        Ok(out)
    }

    /// Marginal along one axis (normalized).
    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.resolution];
        let t = self.total();
        for (k, &w) in self.weights.iter().enumerate() {
            out[self.cell_indices(k)[axis]] += w / t;
        }
        out
    }

    /// L¹ distance between the normalized weights of two measures on the same grid.
    pub fn l1_distance(&self, other: &EmpiricalMeasure) -> Result<f64> {
        if other.space != self.space || other.resolution != self.resolution {
            return Err(Error::Invalid("measures live on different grids".into()));
        }
        Ok(self.normalized().iter().zip(other.normalized()).map(|(a, b)| (a - b).abs()).sum())
    }

    /// Rows × columns layout for image export (1-D grids are a single row).
    pub fn grid_shape(&self) -> (usize, usize) {
        match self.axes() {
            1 => (1, self.resolution),
            _ => (self.resolution, self.resolution),
        }
    }
}
