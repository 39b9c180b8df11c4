//! Deterministic trial fields. Every field is defined in coordinates relative
//! to the grid box, so the same suite can be sampled on refined grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridField};

pub const SUITE_SEED: u64 = 0x4b4f_524e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Smooth,
    Random,
    Laminate,
    Radial,
}

/// Trigonometric modes, optionally multiplied by `∏ sin(π x̂_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothField {
    /// Per component: `(amplitude, frequency vector, phase)`.
    pub modes: Vec<Vec<(f64, [f64; 3], f64)>>,
    /// Affine part `M x̂ + b`, only used without boundary conditions.
    pub affine: Option<([[f64; 3]; 3], [f64; 3])>,
    pub zero_bc: bool,
}

impl SmoothField {
    pub fn random(rng: &mut ChaCha8Rng, dim: usize, zero_bc: bool) -> Self {
        let modes = (0..dim)
            .map(|_| {
                (0..rng.gen_range(1..4))
                    .map(|_| {
                        let mut k = [0.0; 3];
                        for kk in k.iter_mut().take(dim) {
                            *kk = rng.gen_range(-3.0..3.0);
                        }
                        (rng.gen_range(-1.0..1.0), k, rng.gen_range(0.0..std::f64::consts::TAU))
                    })
                    .collect()
            })
            .collect();
        let affine = (!zero_bc).then(|| {
            let mut m = [[0.0; 3]; 3];
            let mut b = [0.0; 3];
            for i in 0..dim {
                b[i] = rng.gen_range(-1.0..1.0);
                for j in 0..dim {
                    m[i][j] = rng.gen_range(-1.0..1.0);
                }
            }
            (m, b)
        });
        Self { modes, affine, zero_bc }
    }

    pub fn eval(&self, xh: &[f64; 3], dim: usize) -> [f64; 3] {
        let cut = if self.zero_bc { (0..dim).map(|k| (std::f64::consts::PI * xh[k]).sin()).product() } else { 1.0 };
        let mut v = [0.0; 3];
        for (i, modes) in self.modes.iter().enumerate() {
            let s: f64 = modes.iter().map(|(a, k, p)| a * (std::f64::consts::PI * (k[0] * xh[0] + k[1] * xh[1] + k[2] * xh[2]) + p).cos()).sum();
            v[i] = cut * s;
            if let Some((m, b)) = &self.affine {
                v[i] += b[i] + (0..dim).map(|j| m[i][j] * xh[j]).sum::<f64>();
            }
        }
        v
    }

    pub fn sample(&self, grid: &Grid) -> GridField {
        let dim = grid.dim;
        let f = |x: &[f64; 3]| self.eval(&relative(grid, x), dim);
        if self.zero_bc {
            GridField::from_fn_zero_bc(grid, f)
        } else {
            GridField::from_fn(grid, f)
        }
    }
}

/// Sum of compactly supported bumps `v (1 − |x̂−c|²/r²)³₊`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpField {
    pub bumps: Vec<([f64; 3], f64, [f64; 3])>,
}

impl BumpField {
    pub fn random(rng: &mut ChaCha8Rng, dim: usize) -> Self {
        let bumps = (0..rng.gen_range(1..5))
            .map(|_| {
                let r = rng.gen_range(0.15..0.45);
                let mut c = [0.0; 3];
                let mut v = [0.0; 3];
                for k in 0..dim {
                    c[k] = rng.gen_range(r..1.0 - r);
                    v[k] = rng.gen_range(-1.0..1.0);
                }
                (c, r, v)
            })
            .collect();
        Self { bumps }
    }

    pub fn eval(&self, xh: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (c, r, v) in &self.bumps {
            let d2 = (0..3).map(|k| (xh[k] - c[k]).powi(2)).sum::<f64>() / (r * r);
            if d2 < 1.0 {
                let b = (1.0 - d2).powi(3);
                for k in 0..3 {
                    out[k] += v[k] * b;
                }
            }
        }
        out
    }

    pub fn sample(&self, grid: &Grid) -> GridField {
        let dim = grid.dim;
        GridField::from_fn_zero_bc(grid, |x| {
            let mut xh = relative(grid, x);
            for v in xh.iter_mut().skip(dim) {
                *v = 0.0;
            }
            self.eval(&xh)
        })
    }
}

/// `x̂ ∈ [0,1]^n`, the position relative to the grid box.
pub fn relative(grid: &Grid, x: &[f64; 3]) -> [f64; 3] {
    let mut xh = [0.0; 3];
    for k in 0..grid.dim {
        xh[k] = (x[k] - grid.origin[k]) / (grid.extents[k] as f64 * grid.spacing[k]);
    }
    xh
}

pub fn smooth_fields(dim: usize, count: usize, zero_bc: bool, seed: u64) -> Vec<SmoothField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| SmoothField::random(&mut rng, dim, zero_bc)).collect()
}

pub fn bump_fields(dim: usize, count: usize, seed: u64) -> Vec<BumpField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| BumpField::random(&mut rng, dim)).collect()
}

pub fn smooth_suite(grid: &Grid, count: usize, zero_bc: bool) -> Vec<GridField> {
    smooth_fields(grid.dim, count, zero_bc, SUITE_SEED).iter().map(|f| f.sample(grid)).collect()
}

pub fn random_suite(grid: &Grid, count: usize) -> Vec<GridField> {
    bump_fields(grid.dim, count, SUITE_SEED ^ 1).iter().map(|f| f.sample(grid)).collect()
}
