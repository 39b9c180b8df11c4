use std::collections::BTreeMap;

use num_rational::Ratio;
use orlicz_korn::fields::{korn_ratio, Mode, Operator};
use orlicz_korn::laminate::*;
use orlicz_korn::young::catalog::lookup;
use orlicz_korn::Error;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

/// Unrolls `μ^(m) = ⅓δ(s,−s) + ⅙δ(−2s,2s) + ½μ^(m−1)`, `s = 2^-m`, into a map of atoms.
fn three_term(m: usize) -> BTreeMap<ExactG, Q> {
    let mut atoms = BTreeMap::new();
    atoms.insert(ExactG::new(q(1, 1), q(1, 1)), q(1, 1));
    for j in 1..=m {
        let s = q(1, 1i64 << j);
        for w in atoms.values_mut() {
            *w /= 2;
        }
        *atoms.entry(ExactG::new(s, -s)).or_insert(q(0, 1)) += q(1, 3);
        *atoms.entry(ExactG::new(-s * 2, s * 2)).or_insert(q(0, 1)) += q(1, 6);
    }
    atoms
}

#[test]
fn exact_mass_and_barycenter() {
    for m in 0..=12 {
        let l = build_laminate(m, 1.0).unwrap();
        assert_eq!(l.atoms.len(), 2 * m + 1);
        assert_eq!(l.total_mass(), q(1, 1));
        let s = q(1, 1i64 << m);
        assert_eq!(l.barycenter(), ExactG::new(s, s));
        assert!(l.atoms.iter().all(|a| a.weight > q(0, 1)));
    }
}

#[test]
fn three_constructions_agree_atom_by_atom() {
    for m in 0..=12 {
        let closed = build_laminate(m, 1.0).unwrap().canonical();
        let chained = build_by_recursion(m, 1.0).unwrap().canonical();
        assert_eq!(closed, chained);
        let unrolled: Vec<(ExactG, Q)> = three_term(m).into_iter().collect();
        assert_eq!(closed.iter().map(|a| (a.at, a.weight)).collect::<Vec<_>>(), unrolled);
    }
}

#[test]
fn intermediate_step_of_the_two_term_recursion() {
    // ¼δ(−2s,2s) + ¾δ(2s,2s) averages to G(s,2s), which splits off ⅓δ(s,−s) to reach G(s,s)
    for sp in split_chain(6).unwrap() {
        if sp.lambda == q(1, 4) {
            let two_s = sp.continuation.a;
            assert_eq!(sp.parent, ExactG::new(two_s / 2, two_s));
            assert_eq!(sp.atom, ExactG::new(-two_s, two_s));
        }
    }
}

#[test]
fn only_the_top_atom_is_symmetric() {
    for m in 1..=12 {
        let l = build_laminate(m, 3.0).unwrap();
        let sym: Vec<_> = l.atoms.iter().filter(|a| a.at.matrix(l.scale).is_symmetric()).collect();
        assert_eq!(sym.len(), 1);
        assert_eq!(sym[0].at, ExactG::new(q(1, 1), q(1, 1)));
        assert_eq!(l.atoms.iter().filter(|a| a.at.matrix(l.scale).is_skew()).count(), 2 * m);
    }
}

#[test]
fn matrix_g_symmetry() {
    assert!(Matrix2::g(2.0, 2.0).is_symmetric() && !Matrix2::g(2.0, 2.0).is_skew());
    assert!(Matrix2::g(2.0, -2.0).is_skew() && !Matrix2::g(2.0, -2.0).is_symmetric());
    assert_eq!(Matrix2::g(1.0, -1.0).sym(), Matrix2::g(0.0, 0.0));
}

#[test]
fn moments() {
    for m in 0..=12 {
        let l = build_laminate(m, 1.0).unwrap();
        assert_eq!(moment_exact(&l, |_| q(1, 1)), q(1, 1));
        assert!((moment(&l, |_| 1.0) - 1.0).abs() < 1e-15);
        let avg = l.average();
        for t in [0.5, 1.0, 7.0] {
            let lt = l.with_scale(t);
            let avg_t = lt.average();
            let phi1 = moment(&lt, |x| x.sym().sub(&avg_t).norm());
            assert!(phi1 <= 2f64.powi(-(m as i32)) * 2.0 * Matrix2::g(t, t).norm() * (1.0 + 1e-12));
        }
        // oracle: the skew atoms at level k < m sit at distance ≥ √2(2^-k − 2^-m) from the average
        let first = moment(&l, |x| x.sub(&avg).norm());
        let lower = std::f64::consts::SQRT_2 / 3.0 * 2f64.powi(-(m as i32)) * (m as f64 - 2.0);
        assert!(first >= lower, "m={m}: {first} < {lower}");
    }
}

#[test]
fn l1_blowup_grows_and_l2_does_not() {
    let l1 = lookup("L1").unwrap();
    let rows = blowup_curve(&l1, &l1, 8, 1.0).unwrap();
    for w in rows[2..].windows(2) {
        assert!(w[1].ratio > w[0].ratio, "{rows:?}");
    }
    // exact first-moment ratio: least-squares line through m = 2..12
    let pts: Vec<(f64, f64)> = (2..=12).map(|m| (m as f64, first_moment_ratio(m).unwrap())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    assert!(sxy / sxx > 0.0 && sxy * sxy / (sxx * syy) > 0.95);
    let l2 = lookup("L2").unwrap();
    let rows = blowup_curve(&l2, &l2, 12, 1.0).unwrap();
    let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let lo = rows[1..].iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    assert!(hi.is_finite() && hi / lo < 2.0, "{rows:?}");
}

#[test]
fn scales_double_at_most() {
    for name in ["L2", "LlogL", "L3"] {
        let a = lookup(name).unwrap();
        let rows = blowup_curve(&a, &a, 14, 0.5).unwrap();
        for w in rows[4..].windows(2) {
            assert!(w[1].t_m <= 2.0 * w[0].t_m * (1.0 + 1e-9), "{name}: {:?}", w);
        }
        let t0 = rows[0].t_m;
        assert!(rows.iter().all(|r| r.t_m <= t0 * 2f64.powi(r.m as i32) * (1.0 + 1e-9)));
    }
}

#[test]
fn indicator_is_rejected() {
    let linf = lookup("Linf").unwrap();
    assert!(matches!(blowup_curve(&linf, &linf, 3, 1.0), Err(Error::Domain(_))));
}

#[test]
fn realized_moments_converge() {
    for m in 1..=3 {
        let l = build_laminate(m, 1.0).unwrap();
        let rz = Realization::new(&l, 1.0, 64).unwrap();
        let checks: [(&str, fn(&Matrix2) -> f64); 3] = [("|X|", |x| x.norm()), ("|X|²", |x| x.norm().powi(2)), ("|Xsym|", |x| x.sym().norm())];
        for (label, phi) in checks {
            let exact = moment(&l, phi);
            let got = rz.mean_of(phi, 1 << 18);
            assert!((got / exact - 1.0).abs() <= 0.05, "m={m} {label}: {got} vs {exact}");
        }
    }
}

#[test]
fn realized_gradients_sit_on_the_atoms_outside_a_thin_layer() {
    let l = build_laminate(2, 1.0).unwrap();
    let atoms: Vec<Matrix2> = l.atoms.iter().map(|a| a.at.matrix(1.0)).collect();
    let off = |depth: usize| {
        let rz = Realization::new(&l, 1.0, depth).unwrap();
        rz.mean_of(|x| if atoms.iter().any(|a| x.sub(a).norm() < 1e-9) { 0.0 } else { 1.0 }, 1 << 17)
    };
    let (coarse, fine) = (off(16), off(64));
    assert!(fine < coarse && fine <= 4.0 / 64.0, "{coarse} {fine}");
}

#[test]
fn grid_korn_ratios_increase_with_the_order() {
    let l1 = lookup("L1").unwrap();
    let ratios: Vec<f64> = (1..=3)
        .map(|m| {
            let u = realize_field(&build_laminate(m, 1.0).unwrap(), 1.0, 2, 1024).unwrap();
            korn_ratio(&l1, &l1, &u, Mode::ZeroBc, Operator::E).unwrap()
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
}
