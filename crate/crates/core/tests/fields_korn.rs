use orlicz_korn::fields::kernel::{Generator, KernelBasis};
use orlicz_korn::fields::radial::{ball_grid, unit_ball_volume};
use orlicz_korn::fields::suites::{random_suite, smooth_suite};
use orlicz_korn::fields::*;
use orlicz_korn::young::catalog::{lookup, shipped_functions};
use orlicz_korn::{Error, YoungFunction};

fn sup_ratio(a: &YoungFunction, b: &YoungFunction, fields: &[GridField], mode: Mode, op: Operator) -> f64 {
    let s = korn_suite(a, b, fields, mode, op).unwrap();
    assert_eq!(s.kernel_members, 0);
    s.max
}

#[test]
fn special_generators_are_annihilated_up_to_roundoff() {
    for cells in [8, 16, 32] {
        let g = Grid::cube(3, cells, -1.0, 1.0).unwrap();
        let c = g.center();
        for i in 0..3 {
            let u = GridField::from_fn(&g, |x| Generator::Special(i).eval(&[x[0] - c[0], x[1] - c[1], x[2] - c[2]]));
            let scale = gradient(&u).max_norm();
            assert!(dev_sym_gradient(&u).max_norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn deviatoric_and_symmetric_parts_are_pointwise_ordered() {
    let g = Grid::unit_cube(3, 10).unwrap();
    for u in smooth_suite(&g, 6, false).iter().chain(random_suite(&g, 6).iter()) {
        let (d, e, full) = (dev_sym_gradient(u), sym_gradient(u), gradient(u));
        let (d, e, full) = (d.pointwise_norms(), e.pointwise_norms(), full.pointwise_norms());
        for c in 0..d.len() {
            assert!(d[c] <= 2.0 * e[c] + 1e-12 && e[c] <= full[c] + 1e-12);
        }
    }
}

#[test]
fn sigma_members_signal_kernel_membership() {
    let g = Grid::cube(3, 8, -1.0, 1.0).unwrap();
    let basis = KernelBasis::sigma(&g).unwrap();
    let a = YoungFunction::power(2.0);
    for u in basis.samples(&g) {
        match korn_ratio(&a, &a, &u, Mode::FullDomain, Operator::ED) {
            Err(Error::KernelMembership { .. }) => {}
            other => panic!("expected a kernel signal, got {other:?}"),
        }
        assert!(matches!(poincare_ratio(&a, &u, Mode::FullDomain, Operator::ED), Err(Error::KernelMembership { .. })));
    }
}

#[test]
fn projection_removes_nothing_from_orthogonal_fields() {
    let g = Grid::cube(3, 12, -1.0, 1.0).unwrap();
    let u = GridField::from_fn(&g, |x| [(7.0 * x[0]).sin() * (5.0 * x[1]).cos(), (9.0 * x[2]).sin() * x[0], (6.0 * x[1] * x[2]).cos()]);
    let r = KernelBasis::sigma(&g).unwrap().residual(&u).unwrap();
    let again = project_sigma(&r).unwrap();
    assert!(again.max_abs() <= 1e-10 * r.max_abs());
}

#[test]
fn quadratic_korn_ratio_is_refinement_stable() {
    let a = YoungFunction::power(2.0);
    let sups: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let g = Grid::unit_cube(3, n).unwrap();
            sup_ratio(&a, &a, &smooth_suite(&g, 8, true), Mode::ZeroBc, Operator::ED)
        })
        .collect();
    for w in sups.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() <= 0.1, "{sups:?}");
    }
    // for zero boundary values ‖∇u‖₂² = 2‖𝓔u‖₂² − ‖div u‖₂², so the E ratio never exceeds √2
    let g = Grid::unit_cube(3, 16).unwrap();
    let e = sup_ratio(&a, &a, &smooth_suite(&g, 8, true), Mode::ZeroBc, Operator::E);
    assert!(e <= std::f64::consts::SQRT_2 * 1.02, "{e}");
}

#[test]
fn quadratic_korn_ratio_on_random_compact_fields() {
    let a = YoungFunction::power(2.0);
    let g = Grid::unit_cube(3, 16).unwrap();
    let s = korn_suite(&a, &a, &random_suite(&g, 100), Mode::ZeroBc, Operator::ED).unwrap();
    assert_eq!(s.ratios.len(), 100);
    assert!(s.max <= 10.0, "{}", s.max);
    assert!(s.top_decile_median <= s.max);
}

#[test]
fn full_domain_ratios_are_finite_for_balanced_pairs() {
    let g = Grid::cube(3, 12, -1.0, 1.0).unwrap();
    let fields = smooth_suite(&g, 6, false);
    for (an, bn) in [("L2", "L2"), ("L2logL", "L2logL"), ("LlogL", "L1"), ("expL", "expL^1/2")] {
        let (a, b) = (lookup(an).unwrap(), lookup(bn).unwrap());
        let s = korn_suite(&a, &b, &fields, Mode::FullDomain, Operator::ED).unwrap();
        assert!(s.is_finite() && s.max < 50.0, "{an} {bn}: {}", s.max);
    }
}

#[test]
fn planar_grids_reject_the_trace_free_operator() {
    let g = Grid::unit_cube(2, 8).unwrap();
    let u = smooth_suite(&g, 1, true).remove(0);
    let a = YoungFunction::power(2.0);
    assert!(matches!(korn_ratio(&a, &a, &u, Mode::ZeroBc, Operator::ED), Err(Error::Config(_))));
    assert!(korn_ratio(&a, &a, &u, Mode::ZeroBc, Operator::E).unwrap().is_finite());
    let free = smooth_suite(&g, 1, false).remove(0);
    assert!(matches!(korn_ratio(&a, &a, &free, Mode::ZeroBc, Operator::E), Err(Error::Config(_))));
}

#[test]
fn poincare_ratios_are_finite_and_stable() {
    for name in ["L1", "L2", "LlogL", "expL", "Linf"] {
        let a = lookup(name).unwrap();
        for (zero_bc, mode) in [(true, Mode::ZeroBc), (false, Mode::FullDomain)] {
            let sups: Vec<f64> = [8, 16]
                .iter()
                .map(|&n| {
                    let g = Grid::unit_cube(3, n).unwrap();
                    poincare_suite(&a, &smooth_suite(&g, 6, zero_bc), mode, Operator::ED).unwrap().max
                })
                .collect();
            assert!(sups.iter().all(|s| s.is_finite() && *s > 0.0), "{name}: {sups:?}");
            assert!((sups[1] / sups[0] - 1.0).abs() <= 0.1, "{name} {mode:?}: {sups:?}");
        }
    }
}

fn scalar_suite(g: &Grid) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for u in smooth_suite(g, 3, false).iter().chain(random_suite(g, 3).iter()) {
        let cells = u.cell_values();
        for k in 0..g.dim {
            out.push(cells.iter().map(|v| v[k]).collect());
        }
    }
    out
}

#[test]
fn negative_norm_lower_bound_never_exceeds_the_trivial_bound() {
    let g = Grid::unit_cube(2, 16).unwrap();
    let suite = scalar_suite(&g);
    for (name, a) in shipped_functions() {
        for u in &suite {
            let lb = negative_norm_lower_bound(&a, &g, u).unwrap().value;
            let ub = trivial_upper_bound(&a, &g, u);
            assert!(lb <= ub * (1.0 + 1e-9), "{name}: {lb} > {ub}");
        }
    }
}

#[test]
fn negative_norm_of_single_bumps_is_comparable_to_the_mean_free_norm() {
    let a = YoungFunction::power(2.0);
    for dim in [2, 3] {
        let g = Grid::unit_cube(dim, if dim == 2 { 24 } else { 12 }).unwrap();
        for u in random_suite(&g, 4) {
            let cells: Vec<f64> = u.cell_values().iter().map(|v| v[0]).collect();
            if cells.iter().all(|v| *v == 0.0) {
                continue;
            }
            let lb = negative_norm_lower_bound(&a, &g, &cells).unwrap().value;
            let ub = trivial_upper_bound(&a, &g, &cells);
            assert!(lb >= 1e-2 * ub && lb <= ub, "{lb} vs {ub}");
        }
    }
}

#[test]
fn radial_field_symmetric_gradient_is_bounded_by_the_profile() {
    let a = lookup("L2").unwrap();
    let g = ball_grid(2, 256).unwrap();
    let w = unit_ball_volume(2);
    let h = radial_spike(&a, 2, 0.3);
    let f = radial_test_field(&h, &g).unwrap();
    let e = sym_gradient(&f.u);
    let dx = g.spacing[0];
    let height = a.inverse(1.0 / 0.3);
    for (c, norm) in e.pointwise_norms().iter().enumerate() {
        let x = g.cell_center(c);
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        // cells straddling the jump of h or the unit sphere see both sides
        let near_jump = (w * r * r - 0.3).abs() < 4.0 * w * r * dx || (r - 1.0).abs() < 2.0 * dx;
        let bound = if w * r * r < 0.3 { height } else { 0.0 };
        if !near_jump && r > 2.0 * dx {
            assert!(*norm <= bound * (1.0 + 4.0 * dx) + 1e-12, "r={r}: {norm} > {bound}");
        }
    }
}

#[test]
fn radial_spikes_expose_the_growth_gap() {
    let g = ball_grid(2, 512).unwrap();
    let l1 = lookup("L1").unwrap();
    let llogl = lookup("LlogL").unwrap();
    let mut same = Vec::new();
    let mut into_llogl = Vec::new();
    for k in 0..=6 {
        let delta = 3.0 * 10f64.powf(-0.5 * k as f64);
        let mut f = radial_test_field(&radial_spike(&l1, 2, delta), &g).unwrap();
        f.u.boundary_flag = true;
        same.push(korn_ratio(&l1, &l1, &f.u, Mode::ZeroBc, Operator::E).unwrap());
        into_llogl.push(korn_ratio(&l1, &llogl, &f.u, Mode::ZeroBc, Operator::E).unwrap());
    }
    assert!(into_llogl.windows(2).all(|w| w[1] > w[0]), "{into_llogl:?}");
    assert!(into_llogl[6] > 5.0 * into_llogl[0]);
    let lo = same.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = same.iter().cloned().fold(0.0, f64::max);
    assert!(hi <= 1.05 * lo, "{same:?}");
}

#[test]
fn field_files_round_trip_through_disk() {
    let g = Grid::unit_cube(3, 4).unwrap();
    let u = random_suite(&g, 1).remove(0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    io::write_csv(&u, std::fs::File::create(&path).unwrap()).unwrap();
    assert_eq!(io::read_csv(std::fs::File::open(&path).unwrap()).unwrap(), u);
}
