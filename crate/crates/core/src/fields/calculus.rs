use rayon::prelude::*;

use super::grid::{GridField, TensorField};

/// Cell-centred `∇u`: `∂_j u_i` is the mean of the `2^{n-1}` edge differences
/// along axis `j` in each cell. Exact for affine and quadratic fields.
pub fn gradient(u: &GridField) -> TensorField {
    let g = &u.grid;
    let n = g.dim;
    let strides = g.node_strides();
    let offs = g.corner_offsets();
    // corners whose bit j is clear, for each axis j
    let lower: Vec<Vec<usize>> = (0..n).map(|j| (0..offs.len()).filter(|b| b >> j & 1 == 0).map(|b| offs[b]).collect()).collect();
    let scale: Vec<f64> = (0..n).map(|j| 1.0 / (lower[j].len() as f64 * g.spacing[j])).collect();
    let mut entries = vec![0.0; g.cell_count() * n * n];
    entries.par_chunks_mut(n * n).enumerate().for_each(|(c, m)| {
        let base = g.cell_base_node(c);
        for (i, comp) in u.components.iter().enumerate() {
            for j in 0..n {
                let s: f64 = lower[j].iter().map(|o| comp[base + o + strides[j]] - comp[base + o]).sum();
                m[i * n + j] = s * scale[j];
            }
        }
    });
    TensorField { grid: g.clone(), entries, symmetric: false, trace_free: false }
}

/// `½(M + Mᵀ)` cellwise.
pub fn symmetric_part(t: &TensorField) -> TensorField {
    let n = t.dim();
    let mut entries = t.entries.clone();
    entries.par_chunks_mut(n * n).zip(t.entries.par_chunks(n * n)).for_each(|(out, m)| {
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = 0.5 * (m[i * n + j] + m[j * n + i]);
            }
        }
    });
    TensorField { grid: t.grid.clone(), entries, symmetric: true, trace_free: t.trace_free }
}

/// `M − (tr M / n) I` cellwise.
pub fn deviatoric_part(t: &TensorField) -> TensorField {
    let n = t.dim();
    let mut entries = t.entries.clone();
    entries.par_chunks_mut(n * n).for_each(|m| {
        let tr = (0..n).map(|i| m[i * n + i]).sum::<f64>() / n as f64;
        for i in 0..n {
            m[i * n + i] -= tr;
        }
    });
    TensorField { grid: t.grid.clone(), entries, symmetric: t.symmetric, trace_free: true }
}

pub fn sym_gradient(u: &GridField) -> TensorField {
    symmetric_part(&gradient(u))
}

pub fn dev_sym_gradient(u: &GridField) -> TensorField {
    deviatoric_part(&sym_gradient(u))
}

/// `div u` at the cell centres.
pub fn divergence(u: &GridField) -> Vec<f64> {
    let t = gradient(u);
    let n = t.dim();
    t.entries.par_chunks(n * n).map(|m| (0..n).map(|i| m[i * n + i]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::grid::Grid;

    #[test]
    fn affine_fields_are_exact() {
        let g = Grid::new(vec![3, 4, 5], vec![0.3, 0.2, 0.1], vec![-0.5, 0.0, 1.0]).unwrap();
        let m = [[1.0, -2.0, 0.5], [3.0, 0.0, 4.0], [-1.0, 2.0, 7.0]];
        let u = GridField::from_fn(&g, |x| {
            let mut v = [0.3, -1.0, 2.0];
            for i in 0..3 {
                for j in 0..3 {
                    v[i] += m[i][j] * x[j];
                }
            }
            v
        });
        let t = gradient(&u);
        for c in 0..g.cell_count() {
            for i in 0..3 {
                for j in 0..3 {
                    assert!((t.at(c, i, j) - m[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shear_has_a_single_entry() {
        let g = Grid::unit_cube(3, 4).unwrap();
        let t = gradient(&GridField::from_fn(&g, |x| [x[1], 0.0, 0.0]));
        for c in 0..g.cell_count() {
            for i in 0..3 {
                for j in 0..3 {
                    let want = if (i, j) == (0, 1) { 1.0 } else { 0.0 };
                    assert!((t.at(c, i, j) - want).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn kernels_of_the_symmetric_operators() {
        let g = Grid::cube(3, 5, -1.0, 1.0).unwrap();
        let skew = GridField::from_fn(&g, |x| [x[1] - 2.0 * x[2], -x[0], 2.0 * x[0]]);
        assert!(sym_gradient(&skew).max_norm() < 1e-13);
        let dil = GridField::from_fn(&g, |x| [3.0 * x[0], 3.0 * x[1], 3.0 * x[2]]);
        let e = sym_gradient(&dil);
        for c in 0..g.cell_count() {
            for i in 0..3 {
                assert!((e.at(c, i, i) - 3.0).abs() < 1e-13);
            }
        }
        assert!(dev_sym_gradient(&dil).max_norm() < 1e-13);
        let d = dev_sym_gradient(&GridField::from_fn(&g, |x| [x[0] * x[1], x[2].sin(), x[0].exp()]));
        assert!(d.is_symmetric() && d.is_trace_free() && d.symmetric && d.trace_free);
    }

    #[test]
    fn second_order_on_trig_fields() {
        let err = |cells: usize| {
            let g = Grid::unit_cube(2, cells).unwrap();
            let u = GridField::from_fn(&g, |x| [(3.0 * x[0]).sin() * x[1].cos(), (x[0] + 2.0 * x[1]).cos(), 0.0]);
            let t = gradient(&u);
            (0..g.cell_count())
                .map(|c| {
                    let x = g.cell_center(c);
                    let exact = [3.0 * (3.0 * x[0]).cos() * x[1].cos(), -(3.0 * x[0]).sin() * x[1].sin(), -(x[0] + 2.0 * x[1]).sin(), -2.0 * (x[0] + 2.0 * x[1]).sin()];
                    (0..4).map(|k| (t.entries[c * 4 + k] - exact[k]).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(16), err(32));
        let order = (e1 / e2).log2();
        assert!(order > 1.9 && order < 2.1, "order {order}");
    }

    #[test]
    fn divergence_telescopes() {
        let g = Grid::unit_cube(2, 8).unwrap();
        let u = GridField::from_fn_zero_bc(&g, |x| [(5.0 * x[0]).sin() + x[1], x[0] * x[0], 0.0]);
        let s: f64 = divergence(&u).iter().sum();
        assert!(s.abs() < 1e-12);
    }
}
