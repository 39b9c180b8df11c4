//! The Bogovskii right inverse of the divergence on a box, star-shaped with
//! respect to a central ball carrying the weight `ω`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::calculus::{divergence, gradient};
use crate::fields::grid::{Grid, GridField};
use crate::quad::{gauss_legendre, pairwise_sum};
use crate::rearrange::luxemburg;
use crate::young::YoungFunction;

/// Mean-value tolerance relative to `‖f‖₁`.
pub const MEAN_TOL: f64 = 1e-8;
pub const ANGULAR_NODES: usize = 16;
pub const RADIAL_NODES: usize = 8;
/// Ball radius as a fraction of the shortest box side.
pub const DEFAULT_RADIUS: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BogovskiiConfig {
    pub grid: Grid,
    pub center: [f64; 3],
    pub radius: f64,
    /// Normalizing constant of `ω(z) = c (1 − |z − z₀|²/R²)⁴₊`.
    pub omega_constant: f64,
}

impl BogovskiiConfig {
    /// Ball centred in the box with radius `DEFAULT_RADIUS` times the shortest side.
    pub fn new(grid: &Grid) -> Result<Self> {
        let side = (0..grid.dim).map(|k| grid.extents[k] as f64 * grid.spacing[k]).fold(f64::INFINITY, f64::min);
        Self::with_ball(grid, grid.center(), DEFAULT_RADIUS * side)
    }

    pub fn with_ball(grid: &Grid, center: [f64; 3], radius: f64) -> Result<Self> {
        for k in 0..grid.dim {
            let lo = grid.origin[k];
            let hi = lo + grid.extents[k] as f64 * grid.spacing[k];
            if !(center[k] - radius > lo && center[k] + radius < hi) {
                return Err(Error::Config("the weight ball must lie inside the box".into()));
            }
        }
        // ∫_0^1 (1 − s²)⁴ s^{n−1} ds is 1/10 for n = 2 and 128/3465 for n = 3
        let (sphere, radial) = match grid.dim {
            2 => (2.0 * std::f64::consts::PI, 0.1),
            _ => (4.0 * std::f64::consts::PI, 128.0 / 3465.0),
        };
        let omega_constant = 1.0 / (sphere * radius.powi(grid.dim as i32) * radial);
        Ok(Self { grid: grid.clone(), center, radius, omega_constant })
    }

    pub fn omega(&self, z: &[f64; 3]) -> f64 {
        let d2 = (0..self.grid.dim).map(|k| (z[k] - self.center[k]).powi(2)).sum::<f64>() / (self.radius * self.radius);
        if d2 >= 1.0 {
            0.0
        } else {
            self.omega_constant * (1.0 - d2).powi(4)
        }
    }

    /// `∫ω` by a 4-point Gauss rule per axis in every cell.
    pub fn omega_mass(&self) -> f64 {
        let g = &self.grid;
        let (nodes, weights) = gauss_legendre(4);
        let per_cell: Vec<f64> = (0..g.cell_count())
            .into_par_iter()
            .map(|c| {
                let base = g.cell_center(c);
                let mut s = 0.0;
                let count = 4usize.pow(g.dim as u32);
                for idx in 0..count {
                    let mut z = base;
                    let mut w = 1.0;
                    let mut r = idx;
                    for k in 0..g.dim {
                        let i = r % 4;
                        r /= 4;
                        z[k] += 0.5 * g.spacing[k] * nodes[i];
                        w *= 0.5 * weights[i];
                    }
                    s += w * self.omega(&z);
                }
                s * g.cell_volume()
            })
            .collect();
        pairwise_sum(&per_cell)
    }

    /// `ω` at the cell centres.
    pub fn omega_cells(&self) -> Vec<f64> {
        (0..self.grid.cell_count()).map(|c| self.omega(&self.grid.cell_center(c))).collect()
    }

    /// `∫_{|x−y|}^∞ ω(y + r e) r^{n−1} dr`, `e = (x−y)/|x−y|`, exact for the polynomial bump.
    fn ray_integral(&self, y: &[f64; 3], e: &[f64; 3], d: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
        let n = self.grid.dim;
        let mut b = 0.0;
        let mut c = 0.0;
        for k in 0..n {
            let w = y[k] - self.center[k];
            b += e[k] * w;
            c += w * w;
        }
        let disc = b * b - c + self.radius * self.radius;
        if disc <= 0.0 {
            return 0.0;
        }
        let root = disc.sqrt();
        let lo = (-b - root).max(d);
        let hi = -b + root;
        if hi <= lo {
            return 0.0;
        }
        let (half, mid) = (0.5 * (hi - lo), 0.5 * (hi + lo));
        let r2 = self.radius * self.radius;
        let mut s = 0.0;
        for (t, w) in gl.0.iter().zip(&gl.1) {
            let r = mid + half * t;
            let q = (r * r + 2.0 * r * b + c) / r2;
            s += w * (1.0 - q).max(0.0).powi(4) * r.powi(n as i32 - 1);
        }
        self.omega_constant * half * s
    }

    /// The kernel `(x−y)/|x−y|ⁿ · ∫_{|x−y|}^∞ ω(y + r e) r^{n−1} dr`.
    pub fn kernel(&self, x: &[f64; 3], y: &[f64; 3], gl: &(Vec<f64>, Vec<f64>)) -> [f64; 3] {
        let n = self.grid.dim;
        let mut e = [0.0; 3];
        let d = (0..n).map(|k| (x[k] - y[k]).powi(2)).sum::<f64>().sqrt();
        if d == 0.0 {
            return [0.0; 3];
        }
        for k in 0..n {
            e[k] = (x[k] - y[k]) / d;
        }
        let scale = self.ray_integral(y, &e, d, gl) / d.powi(n as i32 - 1);
        [e[0] * scale, e[1] * scale, e[2] * scale]
    }

    /// `∫_cell K(x, y) dy` for a cell having the node `x` as a corner: the cell
    /// splits into `n` pyramids with apex `x`, each integrated in polar form
    /// `y = x + s (p − x)`, `p` on the far face, which cancels the singularity.
    fn corner_cell_integral(&self, x: &[f64; 3], lo: &[f64; 3], gl: &(Vec<f64>, Vec<f64>), ang: &(Vec<f64>, Vec<f64>), rad: &(Vec<f64>, Vec<f64>)) -> [f64; 3] {
        let g = &self.grid;
        let n = g.dim;
        let h = &g.spacing;
        let mut out = [0.0; 3];
        // face per axis k: the one opposite to x
        for k in 0..n {
            let far_k = if (x[k] - lo[k]).abs() < 0.5 * h[k] { lo[k] + h[k] } else { lo[k] };
            let height = (far_k - x[k]).abs();
            let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
            let face_nodes: Vec<(Vec<f64>, f64)> = if n == 2 {
                ang.0.iter().zip(&ang.1).map(|(t, w)| (vec![*t], *w)).collect()
            } else {
                // 16 face nodes as a 4 × 4 tensor rule
                let (p4, w4) = gauss_legendre(4);
                let mut v = Vec::with_capacity(16);
                for i in 0..4 {
                    for j in 0..4 {
                        v.push((vec![p4[i], p4[j]], w4[i] * w4[j]));
                    }
                }
                v
            };
            for (pt, wf) in &face_nodes {
                let mut p = [0.0; 3];
                p[k] = far_k;
                let mut area = 1.0;
                for (idx, &j) in others.iter().enumerate() {
                    p[j] = lo[j] + 0.5 * h[j] * (1.0 + pt[idx]);
                    area *= 0.5 * h[j];
                }
                for (sr, wr) in rad.0.iter().zip(&rad.1) {
                    let s = 0.5 * (1.0 + sr);
                    let mut y = [0.0; 3];
                    for m in 0..n {
                        y[m] = x[m] + s * (p[m] - x[m]);
                    }
                    // dy = s^{n−1} · height · dp ds
                    let jac = s.powi(n as i32 - 1) * height * area * wf * 0.5 * wr;
                    let kv = self.kernel(x, &y, gl);
                    for m in 0..n {
                        out[m] += jac * kv[m];
                    }
                }
            }
        }
        out
    }

    /// `𝓑f` at every node, for `f` given by its cell values.
    pub fn apply(&self, f: &[f64]) -> Result<GridField> {
        let g = &self.grid;
        if f.len() != g.cell_count() {
            return Err(Error::Config("one value per cell is required".into()));
        }
        let vol = g.cell_volume();
        let l1 = pairwise_sum(&f.iter().map(|v| v.abs() * vol).collect::<Vec<_>>());
        let mean = pairwise_sum(&f.iter().map(|v| v * vol).collect::<Vec<_>>());
        if mean.abs() > MEAN_TOL * l1 {
            return Err(Error::Domain(format!("f must have zero mean, ∫f = {mean:e} against ‖f‖₁ = {l1:e}")));
        }
        let gl = gauss_legendre(6);
        let ang = gauss_legendre(ANGULAR_NODES);
        let rad = gauss_legendre(RADIAL_NODES);
        let n = g.dim;
        let support: Vec<usize> = (0..f.len()).filter(|&c| f[c] != 0.0).collect();
        let values: Vec<[f64; 3]> = (0..g.node_count())
            .into_par_iter()
            .map(|node| {
                if g.is_boundary_node(node) {
                    return [0.0; 3];
                }
                let x = g.node_coords(node);
                let xm = g.node_multi(node);
                let mut acc = [Vec::with_capacity(support.len()), Vec::with_capacity(support.len()), Vec::new()];
                for &c in &support {
                    let cm = g.cell_multi(c);
                    let touches = (0..n).all(|k| cm[k] + 1 == xm[k] || cm[k] == xm[k]);
                    let contrib = if touches {
                        let mut lo = [0.0; 3];
                        for k in 0..n {
                            lo[k] = g.origin[k] + cm[k] as f64 * g.spacing[k];
                        }
                        self.corner_cell_integral(&x, &lo, &gl, &ang, &rad)
                    } else {
                        let k = self.kernel(&x, &g.cell_center(c), &gl);
                        [k[0] * vol, k[1] * vol, k[2] * vol]
                    };
                    for m in 0..n {
                        acc[m].push(f[c] * contrib[m]);
                    }
                }
                let mut v = [0.0; 3];
                for m in 0..n {
                    v[m] = pairwise_sum(&acc[m]);
                }
                v
            })
            .collect();
        let components = (0..n).map(|m| values.iter().map(|v| v[m]).collect()).collect();
        GridField::new(g.clone(), components, true)
    }

    /// `f − (∫f / ∫ω) ω` on cells: the zero-mean correction used by the suites.
    pub fn remove_mean(&self, f: &[f64]) -> Vec<f64> {
        let w = self.omega_cells();
        let (sf, sw) = (pairwise_sum(f), pairwise_sum(&w));
        f.iter().zip(&w).map(|(a, b)| a - sf / sw * b).collect()
    }
}

/// `‖div 𝓑f − f‖∞ / ‖f‖∞`.
pub fn div_residual(u: &GridField, f: &[f64]) -> f64 {
    let d = divergence(u);
    let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    d.iter().zip(f).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / fmax
}

/// Largest node value within `layer` cells of the boundary, relative to the global maximum.
pub fn boundary_layer(u: &GridField, layer: usize) -> f64 {
    let g = &u.grid;
    let mut near = 0.0f64;
    for i in 0..g.node_count() {
        let m = g.node_multi(i);
        if (0..g.dim).any(|k| m[k] <= layer || m[k] + layer >= g.extents[k]) {
            near = near.max(u.components.iter().map(|c| c[i].abs()).fold(0.0, f64::max));
        }
    }
    let top = u.max_abs();
    if top == 0.0 {
        0.0
    } else {
        near / top
    }
}

/// `‖∇𝓑f‖_{L^B} / ‖f‖_{L^A}`.
pub fn norm_bound_ratio(cfg: &BogovskiiConfig, a: &YoungFunction, b: &YoungFunction, f: &[f64]) -> Result<f64> {
    let u = cfg.apply(f)?;
    let den = luxemburg(a, &cfg.grid.cell_function(f.to_vec())).value;
    if den == 0.0 {
        return Err(Error::Degenerate("f vanishes".into()));
    }
    Ok(gradient(&u).orlicz_norm(b) / den)
}

fn relative(grid: &Grid, x: &[f64; 3]) -> [f64; 3] {
    crate::fields::suites::relative(grid, x)
}

/// Five smooth compactly supported functions, made mean-free with `ω`.
pub fn smooth_suite(cfg: &BogovskiiConfig) -> Vec<Vec<f64>> {
    let g = &cfg.grid;
    let n = g.dim;
    let bump = |xh: &[f64; 3], c: [f64; 3], r: f64| {
        let d2 = (0..n).map(|k| (xh[k] - c[k]).powi(2)).sum::<f64>() / (r * r);
        if d2 < 1.0 {
            (1.0 - d2).powi(4)
        } else {
            0.0
        }
    };
    let profiles: Vec<Box<dyn Fn(&[f64; 3]) -> f64 + Sync>> = vec![
        Box::new(move |x| bump(x, [0.35, 0.4, 0.5], 0.25) - bump(x, [0.65, 0.6, 0.5], 0.25)),
        Box::new(move |x| bump(x, [0.5, 0.5, 0.5], 0.35) * (2.0 * std::f64::consts::PI * x[0]).sin()),
        Box::new(move |x| bump(x, [0.4, 0.6, 0.5], 0.3)),
        Box::new(move |x| bump(x, [0.5, 0.5, 0.5], 0.4) * (x[0] - 0.5) * (x[1] - 0.5) * 16.0),
        Box::new(move |x| bump(x, [0.3, 0.3, 0.4], 0.2) + 0.5 * bump(x, [0.7, 0.65, 0.6], 0.2) - bump(x, [0.5, 0.5, 0.5], 0.3)),
    ];
    profiles
        .iter()
        .map(|p| {
            let f: Vec<f64> = (0..g.cell_count()).map(|c| p(&relative(g, &g.cell_center(c)))).collect();
            cfg.remove_mean(&f)
        })
        .collect()
}

/// `χ_{|x−p|<ε}/|B_ε|` made mean-free, for the given radii (relative to the box).
pub fn spike_suite(cfg: &BogovskiiConfig, radii: &[f64]) -> Vec<Vec<f64>> {
    let g = &cfg.grid;
    let p = [0.3, 0.35, 0.4];
    radii
        .iter()
        .map(|&eps| {
            let ind: Vec<f64> = (0..g.cell_count())
                .map(|c| {
                    let xh = relative(g, &g.cell_center(c));
                    let d2 = (0..g.dim).map(|k| (xh[k] - p[k]).powi(2)).sum::<f64>();
                    if d2 < eps * eps {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let count = ind.iter().sum::<f64>().max(1.0);
            let scaled: Vec<f64> = ind.iter().map(|v| v / (count * g.cell_volume())).collect();
            cfg.remove_mean(&scaled)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_has_unit_mass() {
        for dim in [2, 3] {
            let g = Grid::unit_cube(dim, if dim == 2 { 64 } else { 24 }).unwrap();
            let cfg = BogovskiiConfig::new(&g).unwrap();
            assert!((cfg.omega_mass() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::unit_cube(2, 8).unwrap();
        let cfg = BogovskiiConfig::new(&g).unwrap();
        assert_eq!(cfg.apply(&vec![0.0; 64]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let g = Grid::unit_cube(2, 8).unwrap();
        let cfg = BogovskiiConfig::new(&g).unwrap();
        assert!(matches!(cfg.apply(&vec![1.0; 64]), Err(Error::Domain(_))));
    }

    #[test]
    fn corner_rule_matches_subdivided_midpoints() {
        let g = Grid::unit_cube(2, 16).unwrap();
        let cfg = BogovskiiConfig::new(&g).unwrap();
        let gl = gauss_legendre(6);
        let (ang, rad) = (gauss_legendre(ANGULAR_NODES), gauss_legendre(RADIAL_NODES));
        let x = [0.5, 0.4375, 0.0];
        let lo = [0.5, 0.4375, 0.0];
        let polar = cfg.corner_cell_integral(&x, &lo, &gl, &ang, &rad);
        // midpoint rule on a 512 × 512 subdivision, converging like the square root of the cell size
        let m = 512;
        let h = 1.0 / 16.0 / m as f64;
        let mut s = [0.0; 2];
        for i in 0..m {
            for j in 0..m {
                let y = [lo[0] + (i as f64 + 0.5) * h, lo[1] + (j as f64 + 0.5) * h, 0.0];
                let k = cfg.kernel(&x, &y, &gl);
                s[0] += k[0] * h * h;
                s[1] += k[1] * h * h;
            }
        }
        for k in 0..2 {
            assert!((polar[k] - s[k]).abs() <= 1e-3 * polar[k].abs().max(1e-12), "{polar:?} vs {s:?}");
        }
    }
}
