//! Numerical Legendre transform.
//!
//! `A` is replaced by its chordal interpolant on an adaptive grid, and the
//! interpolant is conjugated exactly. The grid starts at `R_MIN` and steps
//! geometrically (`BASE_STEPS` per decade), halving a step while the chord
//! error bound `(Δr)(Δa)/4` exceeds `REL_TOL · A(r)`. It stops once `A`
//! leaves the floating range. This is the only approximation in conjugation.

use super::{Table, YoungFunction};

pub const R_MIN: f64 = 1e-6;
pub const BASE_STEPS: f64 = 100.0;
pub const REL_TOL: f64 = 1e-5;
const VALUE_CEILING: f64 = 1e300;
const MAX_NODES: usize = 4_000_000;

/// Knots and values of the chordal interpolant of `a`.
pub fn interpolation_grid(a: &YoungFunction) -> (Vec<f64>, Vec<f64>) {
    let growth = 10f64.powf(1.0 / BASE_STEPS);
    let mut rs = vec![0.0, R_MIN];
    let mut vs = vec![0.0, a.eval(R_MIN)];
    let limit = a.reliable_limit().min(1e300);
    let mut r = R_MIN;
    let mut v = vs[1];
    let mut d = a.density(r);
    let mut step = r * (growth - 1.0);
    while rs.len() < MAX_NODES {
        if !(v <= VALUE_CEILING) || r >= limit {
            break;
        }
        let mut next = (r + (2.0 * step).min(r * (growth - 1.0))).min(limit);
        let mut nv = a.eval(next);
        let mut nd = a.density(next);
        let mut halvings = 0;
        while halvings < 60 && (!nv.is_finite() || (next - r) * (nd - d) / 4.0 > REL_TOL * v.max(f64::MIN_POSITIVE)) {
            next = r + (next - r) / 2.0;
            nv = a.eval(next);
            nd = a.density(next);
            halvings += 1;
        }
        if !nv.is_finite() || next <= r {
            break;
        }
        step = next - r;
        rs.push(next);
        vs.push(nv);
        r = next;
        v = nv;
        d = nd;
    }
    (rs, vs)
}

/// Chordal interpolant of `a` as a table that is `+∞` past the last node.
pub fn interpolant(a: &YoungFunction) -> Table {
    let (rs, vs) = interpolation_grid(a);
    let mut slopes = Vec::with_capacity(rs.len());
    let mut prev = 0.0f64;
    for j in 0..rs.len() - 1 {
        let s = ((vs[j + 1] - vs[j]) / (rs[j + 1] - rs[j])).max(prev);
        slopes.push(s);
        prev = s;
    }
    slopes.push(f64::INFINITY);
    Table::new(rs, slopes).expect("interpolant of a Young function is a valid table")
}

/// `Ã` tabulated as the exact conjugate of the chordal interpolant of `a`.
pub fn tabulate_conjugate(a: &YoungFunction) -> Table {
    interpolant(a).conjugate()
}

/// Brute-force `sup_r (r s − A(r))` over a supplied grid of `r`.
pub fn brute_force_sup(a: &YoungFunction, s: f64, grid: &[f64]) -> f64 {
    grid.iter().map(|&r| r * s - a.eval(r)).fold(0.0, f64::max)
}
