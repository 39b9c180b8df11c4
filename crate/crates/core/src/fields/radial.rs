use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridField};
use crate::error::{Error, Result};
use crate::hardy::{dual_at, graded_cells};
use crate::rearrange::SampledFunction;
use crate::young::YoungFunction;

/// Volume of the unit ball.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => {
            let nf = n as f64;
            std::f64::consts::PI.powf(nf / 2.0) / gamma_half_integer(nf / 2.0 + 1.0)
        }
    }
}

fn gamma_half_integer(x: f64) -> f64 {
    if x <= 1.0 {
        if (x - 0.5).abs() < 1e-12 {
            std::f64::consts::PI.sqrt()
        } else {
            1.0
        }
    } else {
        (x - 1.0) * gamma_half_integer(x - 1.0)
    }
}

/// `u(x) = Q x ρ(|x|)` around the grid centre, with the companion field `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    pub u: GridField,
    pub companion: GridField,
}

/// `ρ(r) = ∫_r^1 h(ω_n tⁿ)/t dt`, zero for `r >= 1`.
pub fn rho(h: &SampledFunction, n: usize, r: f64) -> f64 {
    if r >= 1.0 {
        return 0.0;
    }
    let s = unit_ball_volume(n) * r.powi(n as i32);
    if s <= 0.0 {
        return if h.values.first().copied().unwrap_or(0.0) == 0.0 { 0.0 } else { f64::INFINITY };
    }
    dual_at(h, s) / n as f64
}

/// `∫_r^1 h(ω_n tⁿ) dt`, exact for step functions `h`.
pub fn companion_profile(h: &SampledFunction, n: usize, r: f64) -> f64 {
    let w = unit_ball_volume(n);
    let mut acc = 0.0;
    let mut start = 0.0;
    for (v, len) in h.values.iter().zip(&h.weights) {
        let (a, b) = ((start / w).powf(1.0 / n as f64), ((start + len) / w).min(1.0).powf(1.0 / n as f64));
        start += len;
        let lo = a.max(r);
        if b > lo {
            acc += v * (b - lo);
        }
    }
    acc
}

/// Builds the radial field for a profile `h >= 0` on `(0, ω_n)`; the unit
/// ball around the grid centre must lie inside the box.
pub fn radial_test_field(h: &SampledFunction, grid: &Grid) -> Result<RadialField> {
    let n = grid.dim;
    if h.values.iter().any(|v| *v < 0.0) {
        return Err(Error::Domain("radial profile must be non-negative".into()));
    }
    let w = unit_ball_volume(n);
    if (h.total_measure - w).abs() > 1e-9 * w {
        return Err(Error::Domain(format!("radial profile must live on (0, {w}), got measure {}", h.total_measure)));
    }
    let c = grid.center();
    for k in 0..n {
        let half = 0.5 * grid.extents[k] as f64 * grid.spacing[k];
        if half < 1.0 {
            return Err(Error::Config("the unit ball does not fit inside the grid box".into()));
        }
    }
    let q = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = GridField::from_fn(grid, |x| {
        let y = [x[0] - c[0], x[1] - c[1], if n == 3 { x[2] - c[2] } else { 0.0 }];
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        if r == 0.0 || r >= 1.0 {
            return [0.0; 3];
        }
        let p = rho(h, n, r);
        [q * y[1] * p, -q * y[0] * p, 0.0]
    });
    u.clamp_boundary();
    let mut companion = GridField::from_fn(grid, |x| {
        let r = (0..n).map(|k| (x[k] - c[k]).powi(2)).sum::<f64>().sqrt();
        [companion_profile(h, n, r), 0.0, 0.0]
    });
    companion.clamp_boundary();
    Ok(RadialField { u, companion })
}

/// `A⁻¹(1/δ)·χ_(0,δ)` on graded cells of `(0, ω_n)`, unit norm in `L^A(0, ω_n)`.
pub fn radial_spike(a: &YoungFunction, n: usize, delta: f64) -> SampledFunction {
    let w = unit_ball_volume(n);
    let cells = graded_cells(w, 32, 10);
    let height = a.inverse(1.0 / delta);
    let mut start = 0.0;
    let values = cells
        .iter()
        .map(|len| {
            let mid = start + 0.5 * len;
            start += len;
            if mid < delta {
                height
            } else {
                0.0
            }
        })
        .collect();
    SampledFunction { values, weights: cells, total_measure: w }
}

/// Grid `[-1.25, 1.25]^n` centred at the origin, holding the unit ball.
pub fn ball_grid(n: usize, cells: usize) -> Result<Grid> {
    Grid::cube(n, cells, -1.25, 1.25)
}
