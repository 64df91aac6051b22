use contractis::channels::{identity, mix, qubit_canonical, tensor, QuantumChannel};
use contractis::contractivity::{
    contraction_ratio, fixed_point, kappa, kappa_search, Budget, FixedPointMethod, FixedPointOptions,
};
use contractis::linalg::kron;
use contractis::random::Sampler;
use contractis::states::{trace_norm_distance, DensityOperator};
use proptest::prelude::*;

fn small_budget(seed: u64) -> Budget {
    Budget {
        samples: 300,
        restarts: 6,
        seed,
    }
}

fn contractive_qubit(s: &mut Sampler) -> QuantumChannel<f64> {
    qubit_canonical(&s.canonical_qubit_form(0.95, 0.2)).unwrap()
}

#[test]
fn every_channel_is_a_trace_norm_contraction() {
    let mut s = Sampler::new(100);
    for i in 0..500 {
        let d = 2 + i % 3;
        let t = s.channel::<f64>(d, 1 + i % 4);
        let (rho, sigma) = (s.state::<f64>(d), s.state::<f64>(d));
        let before = trace_norm_distance(&rho, &sigma).unwrap();
        let (a, b) = (t.apply(&rho).unwrap(), t.apply(&sigma).unwrap());
        assert!(trace_norm_distance(&a, &b).unwrap() <= before + 1e-9);
        let tr: f64 = (0..d).map(|k| a.matrix()[(k, k)].re).sum();
        assert!((tr - 1.0).abs() < 1e-10);
    }
}

#[test]
fn witness_attains_reported_value() {
    let mut s = Sampler::new(7);
    let channels = [contractive_qubit(&mut s), s.channel(3, 2), s.channel(2, 3)];
    for t in &channels {
        for est in [kappa(t, &small_budget(1)).unwrap(), kappa_search(t, &small_budget(1)).unwrap()] {
            let (rho, sigma) = &est.witness;
            let r = contraction_ratio(t, rho, sigma).unwrap();
            assert!((r - est.lower_bound).abs() < 1e-8, "{r} vs {}", est.lower_bound);
        }
    }
}

#[test]
fn mixed_pairs_never_beat_orthogonal_pure_pairs() {
    let mut s = Sampler::new(8);
    for _ in 0..3 {
        let t = s.channel::<f64>(3, 2);
        let best = kappa_search(&t, &Budget::with_seed(4)).unwrap().lower_bound;
        for _ in 0..500 {
            let (rho, sigma) = (s.state::<f64>(3), s.state::<f64>(3));
            assert!(contraction_ratio(&t, &rho, &sigma).unwrap() <= best + 1e-6);
        }
    }
}

#[test]
fn exponential_convergence_to_fixed_point() {
    let mut s = Sampler::new(9);
    for _ in 0..100 {
        let t = contractive_qubit(&mut s);
        let k = kappa(&t, &Budget::default()).unwrap();
        assert!(k.exact);
        let fp = fixed_point(&t, FixedPointMethod::Nullspace, &FixedPointOptions::default()).unwrap();
        let mut rho = s.state::<f64>(2);
        let d0 = trace_norm_distance(&rho, &fp.state).unwrap();
        let mut power = 1.0;
        for _ in 1..=50 {
            rho = t.apply(&rho).unwrap();
            power *= k.lower_bound;
            assert!(trace_norm_distance(&rho, &fp.state).unwrap() <= power * d0 + 1e-9);
        }
    }
}

#[test]
fn convex_mixing_bound() {
    let mut s = Sampler::new(10);
    for i in 0..20 {
        let lambda = s.uniform::<f64>(0.0, 1.0);
        let (t, t2) = if i % 2 == 0 {
            (s.channel::<f64>(2, 3), contractive_qubit(&mut s))
        } else {
            // qutrit pair: the mixture goes through the search, which can only under-report
            (s.channel::<f64>(3, 2), s.channel::<f64>(3, 4))
        };
        let k2 = kappa(&t2, &small_budget(2)).unwrap();
        let m = mix(&[(lambda, &t), (1.0 - lambda, &t2)]).unwrap();
        let km = kappa(&m, &small_budget(3)).unwrap().lower_bound;
        if k2.exact {
            assert!(km <= lambda + (1.0 - lambda) * k2.lower_bound + 1e-9);
        }
        assert!(km <= 1.0 + 1e-12);
    }
}

#[test]
fn extending_by_identity_destroys_strict_contractivity() {
    let mut s = Sampler::new(12);
    let unital = s.unital_qubit_channel::<f64>(0.9);
    let general = contractive_qubit(&mut s);
    for t in [unital, general] {
        let ext = tensor(&t, &identity(2).unwrap()).unwrap();
        let k = kappa(&ext, &small_budget(5)).unwrap().lower_bound;
        assert!(k >= 1.0 - 1e-3, "{k}");
        let fp = fixed_point(&t, FixedPointMethod::Nullspace, &FixedPointOptions::default()).unwrap();
        for _ in 0..10 {
            let sigma = s.state::<f64>(2);
            let joint = DensityOperator::new(kron(fp.state.matrix(), sigma.matrix())).unwrap();
            let image = ext.apply(&joint).unwrap();
            assert!(trace_norm_distance(&image, &joint).unwrap() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fixed_point_methods_agree(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let t = contractive_qubit(&mut s);
        let opts = FixedPointOptions { tol: 1e-11, ..FixedPointOptions::default() };
        let a = fixed_point(&t, FixedPointMethod::Nullspace, &opts).unwrap();
        let b = fixed_point(&t, FixedPointMethod::Iteration, &opts).unwrap();
        prop_assert!(trace_norm_distance(&a.state, &b.state).unwrap() < 1e-9);
        prop_assert!(a.residual < 1e-10);
    }

    #[test]
    fn kappa_is_a_modulus(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let t = contractive_qubit(&mut s);
        let k = kappa(&t, &Budget::default()).unwrap().lower_bound;
        for _ in 0..20 {
            let (rho, sigma) = (s.state::<f64>(2), s.state::<f64>(2));
            prop_assert!(contraction_ratio(&t, &rho, &sigma).unwrap() <= k + 1e-9);
        }
    }
}
