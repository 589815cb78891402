//! Uniform real-space grids and sampled functions on them.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Uniform grid `x_i = −L + i·h`, `i = 0..M`, with `M` odd so that `x = 0`
/// is a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid half-width must be positive, got {half_width}")));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("grid point count must be odd and >= 3, got {points}")));
        }
        Ok(Grid { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn center_index(&self) -> usize {
        (self.points - 1) / 2
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i == self.center_index() {
            return 0.0;
        }
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    /// Same extent, twice the resolution.
    pub fn refined(&self) -> Grid {
        Grid { half_width: self.half_width, points: 2 * self.points - 1 }
    }

    /// Trapezoid rule for samples on this grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.points);
        let h = self.spacing();
        let inner: f64 = values.iter().sum();
        h * (inner - 0.5 * (values[0] + values[self.points - 1]))
    }
}

/// Real two-particle amplitude `φ(x_a, x_b)` sampled on `grid × grid`.
#[derive(Debug, Clone)]
pub struct GridWavefunction2D {
    pub grid: Grid,
    /// `values[(a, b)] = φ(x_a, x_b)`
    pub values: Matrix,
}

impl GridWavefunction2D {
    pub fn new(grid: Grid, values: Matrix) -> Result<Self> {
        if values.rows() != grid.len() || values.cols() != grid.len() {
            return Err(Error::Input(format!(
                "wavefunction shape {}x{} does not match grid of {} points",
                values.rows(),
                values.cols(),
                grid.len()
            )));
        }
        Ok(GridWavefunction2D { grid, values })
    }

    /// `h² Σ φ²`
    pub fn norm_squared(&self) -> f64 {
        let h = self.grid.spacing();
        h * h * self.values.as_slice().iter().map(|x| x * x).sum::<f64>()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_squared().sqrt();
        if n > 0.0 {
            self.values.scale(1.0 / n);
        }
    }

    pub fn asymmetry(&self) -> f64 {
        self.values.asymmetry()
    }

    /// `|φ|²` as a 2D density field.
    pub fn density(&self) -> DensityField {
        let m = self.grid.len();
        DensityField::Pair {
            grid: self.grid,
            values: Matrix::from_fn(m, m, |a, b| {
                let v = self.values[(a, b)];
                v * v
            }),
        }
    }
}

/// Sampled density on a grid.
#[derive(Debug, Clone)]
pub enum DensityField {
    /// One-body diagonal `ρ(x, x)`.
    OneBody { grid: Grid, values: Vec<f64> },
    /// Pair density `|φ(x₁, x₂)|²`, indexed `[(i₁, i₂)]`.
    Pair { grid: Grid, values: Matrix },
}

impl DensityField {
    pub fn grid(&self) -> &Grid {
        match self {
            DensityField::OneBody { grid, .. } | DensityField::Pair { grid, .. } => grid,
        }
    }

    /// Trapezoid-rule integral (1D or 2D).
    pub fn integral(&self) -> f64 {
        match self {
            DensityField::OneBody { grid, values } => grid.integrate(values),
            DensityField::Pair { grid, values } => {
                let rows: Vec<f64> = (0..grid.len()).map(|a| grid.integrate(values.row(a))).collect();
                grid.integrate(&rows)
            }
        }
    }

    /// Smallest sampled value.
    pub fn min_value(&self) -> f64 {
        match self {
            DensityField::OneBody { values, .. } => values.iter().copied().fold(f64::INFINITY, f64::min),
            DensityField::Pair { values, .. } => values.as_slice().iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Integral deviates from 1 by more than 1e−3 (grid too coarse or too narrow).
    pub fn coarse_warning(&self) -> bool {
        (self.integral() - 1.0).abs() > 1e-3
    }
}
