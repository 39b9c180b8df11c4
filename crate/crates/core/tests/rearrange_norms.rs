use orlicz_korn::rearrange::{holder_check, luxemburg, modular, rearrangement, SampledFunction};
use orlicz_korn::young::{catalog, dominates, YoungFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_function(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SampledFunction {
    let v = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
    let w = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    SampledFunction::new(v, w).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn rearrangement_preserves_every_catalog_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, a) in catalog::shipped_functions() {
        for _ in 0..3 {
            let u = random_function(&mut rng, 500, 3.0);
            let (x, y) = (luxemburg(&a, &u).value, luxemburg(&a, &rearrangement(&u)).value);
            assert!(rel(x, y) <= 1e-8, "{name}: {x} vs {y}");
        }
    }
}

#[test]
fn bisection_lands_on_the_unit_modular() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (name, a) in catalog::shipped_functions() {
        if name == "Linf" {
            continue;
        }
        let u = random_function(&mut rng, 200, 2.0);
        let n = luxemburg(&a, &u);
        let m = modular(&a, &u, n.value);
        assert!(m <= 1.0 && m >= 1.0 - 1e-6, "{name}: modular {m}");
        assert!(n.lambda_bracket.0 <= n.value && n.value == n.lambda_bracket.1);
    }
}

#[test]
fn norm_axioms_on_the_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (name, a) in catalog::shipped_functions() {
        for _ in 0..4 {
            let u = random_function(&mut rng, 100, 2.0);
            let v = u.with_values((0..100).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let c = rng.gen_range(-4.0..4.0);
            let cu = u.with_values(u.values.iter().map(|x| c * x).collect()).unwrap();
            let (nu, nv, ncu) = (luxemburg(&a, &u).value, luxemburg(&a, &v).value, luxemburg(&a, &cu).value);
            assert!(rel(ncu, c.abs() * nu) <= 1e-8, "{name}: homogeneity {ncu} vs {}", c.abs() * nu);
            let sum = u.with_values(u.values.iter().zip(&v.values).map(|(x, y)| x + y).collect()).unwrap();
            assert!(luxemburg(&a, &sum).value <= (nu + nv) * (1.0 + 1e-8), "{name}: triangle");
        }
    }
}

#[test]
fn monotone_in_absolute_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for (name, a) in catalog::shipped_functions() {
        let v = random_function(&mut rng, 150, 3.0);
        let u = v.with_values(v.values.iter().map(|x| x * rng.gen_range(-1.0..1.0)).collect()).unwrap();
        assert!(luxemburg(&a, &u).value <= luxemburg(&a, &v).value * (1.0 + 1e-10), "{name}");
    }
}

#[test]
fn global_dominance_bounds_the_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let pairs = [("L2logL", "L2"), ("expL", "L1"), ("LlogL*", "L1"), ("L2", "L2/logL")];
    for (an, bn) in pairs {
        let (a, b) = (catalog::lookup(an).unwrap(), catalog::lookup(bn).unwrap());
        let d = dominates(&a, &b, false);
        assert!(d.holds, "{an} over {bn}");
        for _ in 0..5 {
            let u = random_function(&mut rng, 300, 10.0);
            let (na, nb) = (luxemburg(&a, &u).value, luxemburg(&b, &u).value);
            assert!(nb <= d.witness_constant * na * (1.0 + 1e-9), "{an}/{bn}: {nb} > {} * {na}", d.witness_constant);
        }
    }
}

#[test]
fn dominance_near_infinity_bounds_the_embedding() {
    // B <= A(C.) beyond t0 gives ||u||_B <= C (1 + B(t0)|Ω|) ||u||_A
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pairs = [("L2", "L1"), ("L3", "L2"), ("expL", "L2"), ("L2", "LlogL")];
    for (an, bn) in pairs {
        let (a, b) = (catalog::lookup(an).unwrap(), catalog::lookup(bn).unwrap());
        let d = dominates(&a, &b, true);
        assert!(d.holds, "{an} over {bn}");
        for scale in [0.01, 1.0, 100.0] {
            let u = random_function(&mut rng, 300, scale);
            let k = d.witness_constant * (1.0 + b.eval(d.threshold_t0.value()) * u.total_measure);
            let (na, nb) = (luxemburg(&a, &u).value, luxemburg(&b, &u).value);
            assert!(nb <= k * na * (1.0 + 1e-9), "{an}/{bn}: {nb} > {k} * {na}");
        }
    }
}

#[test]
fn holder_ratio_stays_below_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let a = YoungFunction::linear_log();
    for _ in 0..20 {
        let u = random_function(&mut rng, 200, 5.0);
        let v = u.with_values((0..200).map(|_| rng.gen_range(-5.0..5.0)).collect()).unwrap();
        let r = holder_check(&a, &u, &v).unwrap();
        assert!(r.abs() <= 2.0, "{r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holder_bound_for_powers(vals in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..40), p in 1.2f64..4.0) {
        let (x, y): (Vec<f64>, Vec<f64>) = vals.into_iter().unzip();
        prop_assume!(x.iter().any(|v| *v != 0.0) && y.iter().any(|v| *v != 0.0));
        let u = SampledFunction::uniform(x, 1.0).unwrap();
        let v = u.with_values(y).unwrap();
        let r = holder_check(&YoungFunction::power(p), &u, &v).unwrap();
        prop_assert!(r.abs() <= 2.0 * (1.0 + 1e-9));
    }

    #[test]
    fn rearrangement_keeps_the_distribution(vals in prop::collection::vec(-100.0f64..100.0, 1..60), t in 0.0f64..100.0) {
        let u = SampledFunction::uniform(vals, 3.0).unwrap();
        let r = rearrangement(&u);
        prop_assert!((r.distribution(t) - u.distribution(t)).abs() <= 1e-12);
        prop_assert!(r.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
