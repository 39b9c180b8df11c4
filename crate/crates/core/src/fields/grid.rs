use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::{luxemburg, SampledFunction};
use crate::young::YoungFunction;

/// Uniform box grid with `extents[k]` cells of width `spacing[k]` along axis `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub extents: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl Grid {
    pub fn new(extents: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let dim = extents.len();
        if !(dim == 2 || dim == 3) {
            return Err(Error::Config(format!("grids must be 2- or 3-dimensional, got {dim}")));
        }
        if spacing.len() != dim || origin.len() != dim {
            return Err(Error::Config("extents, spacing and origin must have equal length".into()));
        }
        if extents.iter().any(|e| *e == 0) {
            return Err(Error::Config("every axis needs at least one cell".into()));
        }
        if spacing.iter().any(|h| !(*h > 0.0 && h.is_finite())) || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::Config("spacing must be positive and finite".into()));
        }
        Ok(Self { dim, extents, spacing, origin })
    }

    /// `[lo, hi]^n` split into `cells` cells per axis.
    pub fn cube(dim: usize, cells: usize, lo: f64, hi: f64) -> Result<Self> {
        let h = (hi - lo) / cells as f64;
        Self::new(vec![cells; dim], vec![h; dim], vec![lo; dim])
    }

    pub fn unit_cube(dim: usize, cells: usize) -> Result<Self> {
        Self::cube(dim, cells, 0.0, 1.0)
    }

    pub fn node_dims(&self) -> Vec<usize> {
        self.extents.iter().map(|e| e + 1).collect()
    }

    pub fn node_count(&self) -> usize {
        self.node_dims().iter().product()
    }

    pub fn cell_count(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        self.extents.iter().zip(&self.spacing).map(|(e, h)| *e as f64 * h).product()
    }

    pub fn center(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for k in 0..self.dim {
            c[k] = self.origin[k] + 0.5 * self.extents[k] as f64 * self.spacing[k];
        }
        c
    }

    /// Node strides, axis 0 fastest.
    pub fn node_strides(&self) -> [usize; 3] {
        let d = self.node_dims();
        let mut s = [0; 3];
        let mut acc = 1;
        for k in 0..self.dim {
            s[k] = acc;
            acc *= d[k];
        }
        s
    }

    pub fn node_multi(&self, idx: usize) -> [usize; 3] {
        let d = self.node_dims();
        let mut m = [0; 3];
        let mut r = idx;
        for k in 0..self.dim {
            m[k] = r % d[k];
            r /= d[k];
        }
        m
    }

    pub fn cell_multi(&self, idx: usize) -> [usize; 3] {
        let mut m = [0; 3];
        let mut r = idx;
        for k in 0..self.dim {
            m[k] = r % self.extents[k];
            r /= self.extents[k];
        }
        m
    }

    pub fn node_coords(&self, idx: usize) -> [f64; 3] {
        let m = self.node_multi(idx);
        let mut x = [0.0; 3];
        for k in 0..self.dim {
            x[k] = self.origin[k] + m[k] as f64 * self.spacing[k];
        }
        x
    }

    pub fn cell_center(&self, idx: usize) -> [f64; 3] {
        let m = self.cell_multi(idx);
        let mut x = [0.0; 3];
        for k in 0..self.dim {
            x[k] = self.origin[k] + (m[k] as f64 + 0.5) * self.spacing[k];
        }
        x
    }

    pub fn is_boundary_node(&self, idx: usize) -> bool {
        let m = self.node_multi(idx);
        (0..self.dim).any(|k| m[k] == 0 || m[k] == self.extents[k])
    }

    /// Index of the lowest corner node of a cell.
    pub fn cell_base_node(&self, idx: usize) -> usize {
        let m = self.cell_multi(idx);
        let s = self.node_strides();
        (0..self.dim).map(|k| m[k] * s[k]).sum()
    }

    /// Offsets of the `2^n` corners relative to the base node; bit `k` of the
    /// position selects the upper node along axis `k`.
    pub fn corner_offsets(&self) -> Vec<usize> {
        let s = self.node_strides();
        (0..1usize << self.dim).map(|b| (0..self.dim).filter(|k| b >> k & 1 == 1).map(|k| s[k]).sum()).collect()
    }

    /// Same box with `factor` times as many cells per axis.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            dim: self.dim,
            extents: self.extents.iter().map(|e| e * factor).collect(),
            spacing: self.spacing.iter().map(|h| h / factor as f64).collect(),
            origin: self.origin.clone(),
        }
    }

    /// Uniform cell weights, as used by every Orlicz norm on this grid.
    pub fn cell_function(&self, values: Vec<f64>) -> SampledFunction {
        let n = values.len();
        SampledFunction { values, weights: vec![self.cell_volume(); n], total_measure: self.measure() }
    }
}

/// Node-valued vector field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: Grid,
    pub components: Vec<Vec<f64>>,
    pub boundary_flag: bool,
}

impl GridField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>, boundary_flag: bool) -> Result<Self> {
        if components.len() != grid.dim || components.iter().any(|c| c.len() != grid.node_count()) {
            return Err(Error::Config("field components do not match the grid".into()));
        }
        let f = Self { grid, components, boundary_flag };
        if boundary_flag && !f.vanishes_on_boundary() {
            return Err(Error::Config("boundary flag set but boundary values are not zero".into()));
        }
        Ok(f)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), components: vec![vec![0.0; grid.node_count()]; grid.dim], boundary_flag: true }
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn<F: Fn(&[f64; 3]) -> [f64; 3] + Sync>(grid: &Grid, f: F) -> Self {
        let vals: Vec<[f64; 3]> = (0..grid.node_count()).into_par_iter().map(|i| f(&grid.node_coords(i))).collect();
        let components = (0..grid.dim).map(|k| vals.iter().map(|v| v[k]).collect()).collect();
        Self { grid: grid.clone(), components, boundary_flag: false }
    }

    /// Samples `f` and forces the boundary nodes to zero.
    pub fn from_fn_zero_bc<F: Fn(&[f64; 3]) -> [f64; 3] + Sync>(grid: &Grid, f: F) -> Self {
        let mut u = Self::from_fn(grid, f);
        u.clamp_boundary();
        u
    }

    pub fn clamp_boundary(&mut self) {
        for i in 0..self.grid.node_count() {
            if self.grid.is_boundary_node(i) {
                for c in &mut self.components {
                    c[i] = 0.0;
                }
            }
        }
        self.boundary_flag = true;
    }

    pub fn vanishes_on_boundary(&self) -> bool {
        (0..self.grid.node_count()).filter(|i| self.grid.is_boundary_node(*i)).all(|i| self.components.iter().all(|c| c[i] == 0.0))
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn node_value(&self, idx: usize) -> [f64; 3] {
        let mut v = [0.0; 3];
        for (k, c) in self.components.iter().enumerate() {
            v[k] = c[idx];
        }
        v
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &GridField, b: f64) -> Result<GridField> {
        if self.grid != other.grid {
            return Err(Error::Config("fields live on different grids".into()));
        }
        let components = self.components.iter().zip(&other.components).map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()).collect();
        Ok(GridField { grid: self.grid.clone(), components, boundary_flag: self.boundary_flag && other.boundary_flag })
    }

    pub fn scaled(&self, a: f64) -> GridField {
        GridField { grid: self.grid.clone(), components: self.components.iter().map(|c| c.iter().map(|v| a * v).collect()).collect(), boundary_flag: self.boundary_flag }
    }

    /// Average of the corner values in each cell.
    pub fn cell_values(&self) -> Vec<[f64; 3]> {
        let offs = self.grid.corner_offsets();
        let scale = 1.0 / offs.len() as f64;
        (0..self.grid.cell_count())
            .into_par_iter()
            .map(|c| {
                let base = self.grid.cell_base_node(c);
                let mut v = [0.0; 3];
                for (k, comp) in self.components.iter().enumerate() {
                    v[k] = offs.iter().map(|o| comp[base + o]).sum::<f64>() * scale;
                }
                v
            })
            .collect()
    }

    /// `‖u‖_{L^A}` of the pointwise Euclidean length at the cell centers.
    pub fn orlicz_norm(&self, a: &YoungFunction) -> f64 {
        let vals = self.cell_values().iter().map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()).collect();
        luxemburg(a, &self.grid.cell_function(vals)).value
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cell-centred `n×n` matrices, stored cell-major (`entries[c·n² + i·n + j]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorField {
    pub grid: Grid,
    pub entries: Vec<f64>,
    pub symmetric: bool,
    pub trace_free: bool,
}

impl TensorField {
    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn at(&self, cell: usize, i: usize, j: usize) -> f64 {
        let n = self.dim();
        self.entries[cell * n * n + i * n + j]
    }

    /// The `(i, j)` entry over all cells.
    pub fn entry(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.grid.cell_count()).map(|c| self.at(c, i, j)).collect()
    }

    pub fn matrix(&self, cell: usize) -> &[f64] {
        let n2 = self.dim() * self.dim();
        &self.entries[cell * n2..(cell + 1) * n2]
    }

    /// Frobenius norm in every cell.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        let n2 = self.dim() * self.dim();
        self.entries.par_chunks(n2).map(|m| m.iter().map(|x| x * x).sum::<f64>().sqrt()).collect()
    }

    pub fn orlicz_norm(&self, a: &YoungFunction) -> f64 {
        luxemburg(a, &self.grid.cell_function(self.pointwise_norms())).value
    }

    pub fn max_norm(&self) -> f64 {
        self.pointwise_norms().into_iter().fold(0.0, f64::max)
    }

    /// Largest `|M − Mᵀ|` entry relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim();
        let scale = self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for c in 0..self.grid.cell_count() {
            for i in 0..n {
                for j in 0..i {
                    worst = worst.max((self.at(c, i, j) - self.at(c, j, i)).abs());
                }
            }
        }
        worst / scale
    }

    /// Largest `|tr M|` relative to the largest entry.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim();
        let scale = self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        (0..self.grid.cell_count()).map(|c| (0..n).map(|i| self.at(c, i, i)).sum::<f64>().abs()).fold(0.0, f64::max) / scale
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry() <= 1e-12
    }

    pub fn is_trace_free(&self) -> bool {
        self.trace_defect() <= 1e-10
    }

    pub fn difference(&self, other: &TensorField) -> Result<TensorField> {
        if self.grid != other.grid {
            return Err(Error::Config("tensor fields live on different grids".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(TensorField { grid: self.grid.clone(), entries, symmetric: self.symmetric && other.symmetric, trace_free: self.trace_free && other.trace_free })
    }
}
