//! Uniform cell-centered grids over the cube `[-L, L]^n` and sampled functions on them.
//!
//! Cell centers sit at `x_i = -L + (i + 1/2) h`. With an even number of cells per axis
//! no center ever coincides with the origin, so radial kernels such as `|y|^{-n}` are
//! finite at every sample point. Internally a center is also described by its
//! "half-unit" coordinates `m = 2i + 1 - cells` (always odd), with `x = m h / 2`; all
//! radial comparisons are made on these integers so ties are detected exactly.

mod family;
mod io;

pub use family::{Bump, Family, FamilyDescriptor, dilate_family, synthesize};
pub use io::{read_grid, read_grid_bytes, write_csv, write_grid, write_grid_bytes};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MorreyError, Result};

/// Multi-index into the grid; unused trailing axes are zero.
pub type Index = [usize; 3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    cells_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, cells_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(MorreyError::InvalidGrid(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(MorreyError::InvalidGrid(format!("half width must be positive and finite, got {half_width}")));
        }
        if cells_per_axis < 4 || !cells_per_axis.is_multiple_of(2) {
            return Err(MorreyError::InvalidGrid(format!(
                "cells per axis must be even and at least 4, got {cells_per_axis}"
            )));
        }
        if cells_per_axis.checked_pow(dim as u32).is_none_or(|n| n > (1 << 31)) {
            return Err(MorreyError::InvalidGrid("grid too large".into()));
        }
        Ok(Self { dim, half_width, cells_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    /// Cell spacing `h = 2L / cells`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.cells_per_axis as f64
    }

    /// `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume of the unit ball in `R^n`.
    pub fn unit_ball_volume(&self) -> f64 {
        unit_ball_volume(self.dim)
    }

    /// Euclidean diameter of the domain cube, `2 L sqrt(n)`.
    pub fn diameter(&self) -> f64 {
        2.0 * self.half_width * (self.dim as f64).sqrt()
    }

    /// Total number of cells, `cells^dim`.
    pub fn len(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn multi_index(&self, flat: usize) -> Index {
        let c = self.cells_per_axis;
        let mut idx = [0usize; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rem % c;
            rem /= c;
        }
        idx
    }

    pub fn flat_index(&self, idx: Index) -> usize {
        let c = self.cells_per_axis;
        (0..self.dim).fold(0, |acc, axis| acc * c + idx[axis])
    }

    /// Odd half-unit coordinates `2i + 1 - cells` of a cell center.
    pub fn half_units(&self, flat: usize) -> [i64; 3] {
        let idx = self.multi_index(flat);
        let c = self.cells_per_axis as i64;
        let mut m = [0i64; 3];
        for axis in 0..self.dim {
            m[axis] = 2 * idx[axis] as i64 + 1 - c;
        }
        m
    }

    /// Coordinates of a cell center (trailing unused axes are zero).
    pub fn center(&self, flat: usize) -> [f64; 3] {
        let half = 0.5 * self.spacing();
        let m = self.half_units(flat);
        [m[0] as f64 * half, m[1] as f64 * half, m[2] as f64 * half]
    }

    /// Squared norm of a cell center in half units; `|x| = (h/2) sqrt(key)`.
    pub fn radial_key(&self, flat: usize) -> i64 {
        let m = self.half_units(flat);
        m[0] * m[0] + m[1] * m[1] + m[2] * m[2]
    }

    /// Euclidean norm of a cell center. Never zero.
    pub fn center_norm(&self, flat: usize) -> f64 {
        0.5 * self.spacing() * (self.radial_key(flat) as f64).sqrt()
    }

    /// Cell containing `point` (clamped to the domain). A point on a cell face maps to
    /// the cell on its positive side.
    pub fn nearest_cell(&self, point: &[f64]) -> usize {
        let h = self.spacing();
        let c = self.cells_per_axis;
        let mut idx = [0usize; 3];
        for (axis, slot) in idx.iter_mut().enumerate().take(self.dim) {
            let x = point.get(axis).copied().unwrap_or(0.0);
            let i = ((x + self.half_width) / h).floor();
            *slot = i.clamp(0.0, (c - 1) as f64) as usize;
        }
        self.flat_index(idx)
    }

    /// Same grid with `factor` times as many cells per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.dim, self.half_width, self.cells_per_axis * factor)
    }
}

pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Sampled real function on a [`GridSpec`], row-major with axis 0 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(MorreyError::InvalidGrid(format!("expected {} values, got {}", spec.len(), values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MorreyError::InvalidGrid(format!("non-finite value at cell {i}")));
        }
        Ok(Self { spec, values })
    }

    pub(crate) fn from_raw(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![0.0; spec.len()] }
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self { spec, values: vec![value; spec.len()] }
    }

    /// Samples `f` at every cell center (coordinates padded with zeros to length 3).
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let values = (0..spec.len()).into_par_iter().map(|i| f(&spec.center(i)[..spec.dim()])).collect();
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value_at(&self, point: &[f64]) -> f64 {
        self.values[self.spec.nearest_cell(point)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        Self { spec: self.spec, values: self.values.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { spec: self.spec, values })
    }

    /// `|f|^p` cellwise.
    pub fn pointwise_power(&self, p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(crate::error::invalid(format!("power must be >= 1, got {p}")));
        }
        Ok(if p == 1.0 { self.abs() } else { self.map(|v| v.abs().powf(p)) })
    }

    /// `h^n * sum |f|^p`, summed sequentially.
    pub fn p_mass(&self, p: f64) -> f64 {
        let s: f64 = if p == 1.0 {
            self.values.iter().map(|v| v.abs()).sum()
        } else {
            self.values.iter().map(|v| v.abs().powf(p)).sum()
        };
        s * self.spec.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(MorreyError::GridMismatch(format!("{:?} vs {:?}", self.spec, other.spec)));
        }
        Ok(())
    }
}

/// `max_i |a_i - b_i| / max_i |b_i|`, or the absolute difference when `b` vanishes.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale > 0.0 { diff / scale } else { diff }
}
