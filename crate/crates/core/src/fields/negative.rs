use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use crate::rearrange::{luxemburg, SampledFunction};
use crate::young::YoungFunction;

/// Bump half-widths as fractions of the box side.
pub const DICTIONARY_SCALES: [f64; 3] = [0.25, 0.125, 0.0625];

/// One test field `φ = e_k b`, `b` a tensor-product bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestField {
    pub center: [f64; 3],
    pub half_width: [f64; 3],
    pub direction: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeNormBound {
    /// `max ∫u div φ / ‖∇φ‖_{L^Ã}` over the dictionary.
    pub value: f64,
    pub best: Option<TestField>,
    pub dictionary_size: usize,
}

fn bump(center: &[f64; 3], hw: &[f64; 3], x: &[f64; 3], dim: usize) -> f64 {
    let mut p = 1.0;
    for k in 0..dim {
        let z = (x[k] - center[k]) / hw[k];
        if z.abs() >= 1.0 {
            return 0.0;
        }
        p *= (1.0 - z * z).powi(3);
    }
    p
}

/// Bump centres and half-widths: three scales, shifted by one half-width.
pub fn dictionary(grid: &Grid) -> Vec<([f64; 3], [f64; 3])> {
    let n = grid.dim;
    let mut out = Vec::new();
    for s in DICTIONARY_SCALES {
        let mut hw = [1.0; 3];
        let mut counts = [1usize; 3];
        for k in 0..n {
            hw[k] = s * grid.extents[k] as f64 * grid.spacing[k];
            counts[k] = (1.0 / s).round() as usize - 1;
        }
        for a in 0..counts[0] {
            for b in 0..counts[1] {
                for c in 0..counts[2] {
                    let idx = [a, b, c];
                    let mut center = [0.0; 3];
                    for k in 0..n {
                        center[k] = grid.origin[k] + (idx[k] + 1) as f64 * hw[k];
                    }
                    out.push((center, hw));
                }
            }
        }
    }
    out
}

/// Discrete `∇b` in the cells meeting the support of the bump.
fn bump_gradient(grid: &Grid, center: &[f64; 3], hw: &[f64; 3]) -> Vec<(usize, [f64; 3])> {
    let n = grid.dim;
    let mut lo = [0usize; 3];
    let mut hi = [1usize; 3];
    for k in 0..n {
        let a = ((center[k] - hw[k] - grid.origin[k]) / grid.spacing[k]).floor().max(0.0) as usize;
        let b = (((center[k] + hw[k] - grid.origin[k]) / grid.spacing[k]).ceil() as usize).min(grid.extents[k]);
        lo[k] = a;
        hi[k] = b;
    }
    let node = |m: [usize; 3]| {
        let mut x = [0.0; 3];
        for k in 0..n {
            x[k] = grid.origin[k] + m[k] as f64 * grid.spacing[k];
        }
        bump(center, hw, &x, n)
    };
    let mut out = Vec::new();
    for i2 in lo[2]..hi[2] {
        for i1 in lo[1]..hi[1] {
            for i0 in lo[0]..hi[0] {
                let m = [i0, i1, i2];
                let mut g = [0.0; 3];
                let corners = 1usize << n;
                for j in 0..n {
                    let mut s = 0.0;
                    for bits in 0..corners {
                        if bits >> j & 1 == 1 {
                            continue;
                        }
                        let mut a = m;
                        for k in 0..n {
                            a[k] += bits >> k & 1;
                        }
                        let mut b = a;
                        b[j] += 1;
                        s += node(b) - node(a);
                    }
                    g[j] = s / ((corners / 2) as f64 * grid.spacing[j]);
                }
                let cell = m[0] + grid.extents[0] * (m[1] + if n == 3 { grid.extents[1] * m[2] } else { 0 });
                out.push((cell, g));
            }
        }
    }
    out
}

/// `sup ∫u div φ / ‖∇φ‖_{L^Ã}` over the fixed dictionary, `u` given at the cell centres.
pub fn negative_norm_lower_bound(a: &YoungFunction, grid: &Grid, cell_values: &[f64]) -> Result<NegativeNormBound> {
    if cell_values.len() != grid.cell_count() {
        return Err(Error::Config("one value per cell is required".into()));
    }
    let conj = a.conjugate();
    let vol = grid.cell_volume();
    let dict = dictionary(grid);
    let best = dict
        .par_iter()
        .map(|(center, hw)| {
            let grad = bump_gradient(grid, center, hw);
            let norms: Vec<f64> = grad.iter().map(|(_, g)| (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt()).filter(|v| *v > 0.0).collect();
            let weights = vec![vol; norms.len()];
            let den = luxemburg(&conj, &SampledFunction { values: norms, weights, total_measure: grid.measure() }).value;
            let mut top = (0.0f64, None);
            if den > 0.0 {
                for k in 0..grid.dim {
                    let terms: Vec<f64> = grad.iter().map(|(c, g)| cell_values[*c] * g[k] * vol).collect();
                    let v = pairwise_sum(&terms).abs() / den;
                    if v > top.0 {
                        top = (v, Some(TestField { center: *center, half_width: *hw, direction: k }));
                    }
                }
            }
            top
        })
        .reduce(|| (0.0, None), |x, y| if y.0 > x.0 { y } else { x });
    Ok(NegativeNormBound { value: best.0, best: best.1, dictionary_size: dict.len() * grid.dim })
}

/// `2√n ‖u − u_Ω‖_{L^A}`: Hölder with constant 2 and `|div φ| <= √n |∇φ|`.
pub fn trivial_upper_bound(a: &YoungFunction, grid: &Grid, cell_values: &[f64]) -> f64 {
    let mean = pairwise_sum(cell_values) / cell_values.len() as f64;
    let centered = grid.cell_function(cell_values.iter().map(|v| v - mean).collect());
    2.0 * (grid.dim as f64).sqrt() * luxemburg(a, &centered).value
}
