use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridField};
use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use crate::young::YoungFunction;

/// Closed-form generator of `𝓡` or `Σ`, in coordinates centred at the box centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    /// `e_i`.
    Constant(usize),
    /// `x_j e_i − x_i e_j`.
    Skew(usize, usize),
    /// `x`.
    Dilation,
    /// `2(e_i·x)x − |x|² e_i`.
    Special(usize),
}

impl Generator {
    pub fn eval(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut v = [0.0; 3];
        match *self {
            Generator::Constant(i) => v[i] = 1.0,
            Generator::Skew(i, j) => {
                v[i] = x[j];
                v[j] = -x[i];
            }
            Generator::Dilation => v = *x,
            Generator::Special(i) => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                for (k, vk) in v.iter_mut().enumerate() {
                    *vk = 2.0 * x[i] * x[k];
                }
                v[i] -= r2;
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// Rigid motions `b + Qx`, the kernel of `𝓔`.
    Rigid,
    /// `𝓓 ⊕ 𝓡 ⊕ 𝓢`, the kernel of `𝓔ᴰ` for `n >= 3`.
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBasis {
    pub kind: KernelKind,
    pub dim: usize,
    pub center: [f64; 3],
    pub generators: Vec<Generator>,
}

impl KernelBasis {
    pub fn rigid(grid: &Grid) -> Self {
        let n = grid.dim;
        let mut generators: Vec<Generator> = (0..n).map(Generator::Constant).collect();
        for i in 0..n {
            for j in i + 1..n {
                generators.push(Generator::Skew(i, j));
            }
        }
        Self { kind: KernelKind::Rigid, dim: n, center: grid.center(), generators }
    }

    pub fn sigma(grid: &Grid) -> Result<Self> {
        if grid.dim < 3 {
            return Err(Error::Config("the trace-free kernel is finite-dimensional only for n >= 3".into()));
        }
        let mut b = Self::rigid(grid);
        b.kind = KernelKind::Sigma;
        b.generators.push(Generator::Dilation);
        b.generators.extend((0..grid.dim).map(Generator::Special));
        Ok(b)
    }

    pub fn for_kind(kind: KernelKind, grid: &Grid) -> Result<Self> {
        match kind {
            KernelKind::Rigid => Ok(Self::rigid(grid)),
            KernelKind::Sigma => Self::sigma(grid),
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn sample(&self, grid: &Grid, k: usize) -> GridField {
        let g = self.generators[k];
        let c = self.center;
        GridField::from_fn(grid, move |x| g.eval(&[x[0] - c[0], x[1] - c[1], x[2] - c[2]]))
    }

    pub fn samples(&self, grid: &Grid) -> Vec<GridField> {
        (0..self.len()).map(|k| self.sample(grid, k)).collect()
    }

    /// Gram matrix of the sampled generators in the discrete `L²` product.
    pub fn gram(&self, grid: &Grid) -> DMatrix<f64> {
        let s = self.samples(grid);
        let w = node_weights(grid);
        DMatrix::from_fn(self.len(), self.len(), |a, b| inner(&s[a], &s[b], &w))
    }

    /// Least-squares projection onto the span of the generators.
    pub fn project(&self, u: &GridField) -> Result<GridField> {
        let grid = &u.grid;
        let s = self.samples(grid);
        let w = node_weights(grid);
        let gram = DMatrix::from_fn(self.len(), self.len(), |a, b| inner(&s[a], &s[b], &w));
        let rhs = DVector::from_iterator(self.len(), s.iter().map(|g| inner(g, u, &w)));
        let chol = gram.cholesky().ok_or_else(|| Error::Config("kernel Gram matrix is singular; grid too coarse".into()))?;
        let coef = chol.solve(&rhs);
        let mut out = GridField::zeros(grid);
        out.boundary_flag = false;
        for (k, g) in s.iter().enumerate() {
            for (o, c) in out.components.iter_mut().zip(&g.components) {
                o.iter_mut().zip(c).for_each(|(x, y)| *x += coef[k] * y);
            }
        }
        Ok(out)
    }

    /// `u − Πu`.
    pub fn residual(&self, u: &GridField) -> Result<GridField> {
        let p = self.project(u)?;
        let mut r = u.combine(1.0, &p, -1.0)?;
        r.boundary_flag = false;
        Ok(r)
    }

    /// `max ‖Πu‖₁ / ‖u‖₁` over the given fields.
    pub fn l1_constant(&self, fields: &[GridField]) -> Result<f64> {
        let l1 = YoungFunction::power(1.0);
        let mut worst = 0.0f64;
        for u in fields {
            let d = u.orlicz_norm(&l1);
            if d > 0.0 {
                worst = worst.max(self.project(u)?.orlicz_norm(&l1) / d);
            }
        }
        Ok(worst)
    }
}

/// Trapezoid weights of the nodes.
pub fn node_weights(grid: &Grid) -> Vec<f64> {
    let v = grid.cell_volume();
    (0..grid.node_count())
        .map(|i| {
            let m = grid.node_multi(i);
            (0..grid.dim).filter(|k| m[*k] == 0 || m[*k] == grid.extents[*k]).fold(v, |w, _| 0.5 * w)
        })
        .collect()
}

fn inner(u: &GridField, v: &GridField, w: &[f64]) -> f64 {
    let terms: Vec<f64> = (0..w.len()).into_par_iter().map(|i| w[i] * u.components.iter().zip(&v.components).map(|(a, b)| a[i] * b[i]).sum::<f64>()).collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::calculus::{dev_sym_gradient, sym_gradient};

    #[test]
    fn dimensions() {
        let g3 = Grid::unit_cube(3, 4).unwrap();
        assert_eq!(KernelBasis::rigid(&g3).len(), 6);
        assert_eq!(KernelBasis::sigma(&g3).unwrap().len(), 10);
        let g2 = Grid::unit_cube(2, 4).unwrap();
        assert_eq!(KernelBasis::rigid(&g2).len(), 3);
        assert!(KernelBasis::sigma(&g2).is_err());
    }

    #[test]
    fn generators_are_in_the_kernels() {
        let g = Grid::cube(3, 6, -1.0, 2.0).unwrap();
        let r = KernelBasis::rigid(&g);
        for u in r.samples(&g) {
            assert!(sym_gradient(&u).max_norm() < 1e-13);
        }
        let s = KernelBasis::sigma(&g).unwrap();
        for u in s.samples(&g) {
            assert!(dev_sym_gradient(&u).max_norm() < 1e-12);
        }
    }

    #[test]
    fn gram_is_well_conditioned() {
        let g = Grid::unit_cube(3, 4).unwrap();
        let ev = KernelBasis::sigma(&g).unwrap().gram(&g).symmetric_eigenvalues();
        let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
        assert!(lo > 0.0 && hi / lo < 1e6);
    }

    #[test]
    fn projection_fixes_the_range() {
        let g = Grid::unit_cube(3, 5).unwrap();
        let b = KernelBasis::sigma(&g).unwrap();
        let s = b.samples(&g);
        let mut u = s[0].scaled(2.0);
        for (k, f) in s.iter().enumerate().skip(1) {
            u = u.combine(1.0, f, 0.5 - k as f64 * 0.1).unwrap();
        }
        let p = b.project(&u).unwrap();
        let err = p.combine(1.0, &u, -1.0).unwrap().max_abs();
        assert!(err <= 1e-10 * u.max_abs());
    }

    #[test]
    fn projection_is_idempotent() {
        let g = Grid::unit_cube(3, 6).unwrap();
        let b = KernelBasis::sigma(&g).unwrap();
        let u = GridField::from_fn(&g, |x| [(4.0 * x[0]).sin() * x[2], x[1].exp(), x[0] * x[1] * x[2]]);
        let p = b.project(&u).unwrap();
        let pp = b.project(&p).unwrap();
        assert!(pp.combine(1.0, &p, -1.0).unwrap().max_abs() <= 1e-10 * p.max_abs());
    }
}
