use contractis::algebra::{commutant, interaction_algebra, wedderburn_profile, OperatorAlgebra, WedderburnProfile};
use contractis::channels::{depolarizing, identity, mix, qubit_canonical, tensor, unitary_channel, QuantumChannel};
use contractis::contractivity::{kappa, Budget};
use contractis::discrimination::{helstrom, lemma1_bound, success_probability};
use contractis::dynamics::{named_gate, simulate_circuit, simulate_memory, NoisyCircuit};
use contractis::linalg::ComplexMatrix;
use contractis::random::Sampler;
use contractis::{Channel, Matrix};
use proptest::prelude::*;

fn check_sum_rules(profile: &WedderburnProfile, d: usize, alg_dim: usize, comm_dim: usize) {
    let mn: usize = profile.blocks.iter().map(|(m, n)| m * n).sum();
    let nn: usize = profile.blocks.iter().map(|(_, n)| n * n).sum();
    let mm: usize = profile.blocks.iter().map(|(m, _)| m * m).sum();
    assert_eq!((mn, nn, mm), (d, alg_dim, comm_dim), "{:?}", profile.blocks);
}

fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = (a.rows(), b.rows());
    ComplexMatrix::from_fn(p + q, p + q, |i, j| {
        if i < p && j < p {
            a[(i, j)]
        } else if i >= p && j >= p {
            b[(i - p, j - p)]
        } else {
            Default::default()
        }
    })
}

fn unitary_mixture(us: &[Matrix]) -> Channel {
    let chans: Vec<Channel> = us.iter().map(|u| unitary_channel(u).unwrap()).collect();
    let w = 1.0 / us.len() as f64;
    let parts: Vec<(f64, &Channel)> = chans.iter().map(|c| (w, c)).collect();
    mix(&parts).unwrap()
}

#[test]
fn sum_rules_and_commutant_fixed_points() {
    let mut s = Sampler::new(40);
    let block_unitaries: Vec<Matrix> = (0..3).map(|_| block_diag(&s.unitary(2), &s.unitary(1))).collect();
    let cases: Vec<Channel> = vec![
        tensor(&identity(2).unwrap(), &depolarizing(2, 0.3).unwrap()).unwrap(),
        tensor(&depolarizing(2, 0.3).unwrap(), &identity(2).unwrap()).unwrap(),
        unitary_mixture(&block_unitaries),
        depolarizing(3, 0.5).unwrap(),
        s.unital_qubit_channel(0.9),
        {
            let us: Vec<Matrix> = (0..2).map(|_| s.unitary(3)).collect();
            unitary_mixture(&us)
        },
    ];
    for t in &cases {
        assert!(t.is_unital());
        let alg = interaction_algebra(t).unwrap();
        let comm = commutant(&alg).unwrap();
        let profile = wedderburn_profile(&alg).unwrap();
        check_sum_rules(&profile, t.dim(), alg.dim(), comm.dim());
        for x in comm.basis() {
            let image = t.apply_operator(x).unwrap();
            assert!((&image - x).frobenius_norm() < 1e-8);
        }
    }
}

#[test]
fn kraus_representation_does_not_change_the_algebra() {
    let mut s = Sampler::new(41);
    for _ in 0..10 {
        let t = s.channel::<f64>(3, 3);
        let u = s.unitary::<f64>(3);
        let mixed: Vec<Matrix> = (0..3)
            .map(|i| {
                let mut k = ComplexMatrix::zeros(3, 3);
                for j in 0..3 {
                    k += &t.kraus()[j].scale(u[(i, j)]);
                }
                k
            })
            .collect();
        let t2 = QuantumChannel::from_kraus(3, mixed).unwrap();
        let (a, b) = (interaction_algebra(&t).unwrap(), interaction_algebra(&t2).unwrap());
        assert!(a.same_span(&b, 1e-8));
        assert_eq!(a.dim(), b.dim());
    }
}

#[test]
fn strictly_contractive_qubit_channels_have_trivial_commutant() {
    let mut s = Sampler::new(42);
    for _ in 0..50 {
        let t = qubit_canonical(&s.canonical_qubit_form::<f64>(0.95, 0.2)).unwrap();
        let alg = interaction_algebra(&t).unwrap();
        assert_eq!(commutant(&alg).unwrap().dim(), 1);
        let profile = wedderburn_profile(&alg).unwrap();
        assert_eq!(profile.blocks, vec![(1, 2)]);
        assert!(!profile.has_noiseless_subsystem());
    }
}

#[test]
fn generated_algebra_is_closed() {
    let mut s = Sampler::new(43);
    let alg = OperatorAlgebra::generated_by(3, &[s.ginibre::<f64>(3, 3)]).unwrap();
    assert_eq!(alg.dim(), 9);
    assert!(alg.closure_residual() < 1e-9);
}

#[test]
fn decoherence_rate_does_not_depend_on_dimension() {
    let mut s = Sampler::new(44);
    let b = Budget::default();
    let t2 = qubit_canonical(&s.canonical_qubit_form::<f64>(0.85, 0.0)).unwrap();
    let k = kappa(&t2, &b).unwrap().lower_bound;
    // second factor strictly more contractive, so the product keeps κ
    let other = s.unital_qubit_channel::<f64>(0.5 * k);
    let t4 = tensor(&t2, &other).unwrap();
    let k4 = kappa(&t4, &b).unwrap();
    assert!(k4.exact);
    assert!((k4.lower_bound - k).abs() < 1e-12);
    let a = simulate_memory(&t2, &s.pure_state(2), 30, &b).unwrap();
    let c = simulate_memory(&t4, &s.pure_state(4), 30, &b).unwrap();
    for (x, y) in a.records.iter().zip(&c.records) {
        let rx = x.bound / a.records[0].bound;
        let ry = y.bound / c.records[0].bound;
        assert!((rx - ry).abs() < 1e-9);
        assert!(x.distance <= x.bound + 1e-9 && y.distance <= y.bound + 1e-9);
    }
}

#[test]
fn gates_do_not_change_the_pairwise_bound() {
    let mut s = Sampler::new(45);
    let noise = depolarizing(4, 0.15).unwrap();
    let gates = vec![
        named_gate::<f64>("H", &[0], 2).unwrap(),
        named_gate("CNOT", &[0, 1], 2).unwrap(),
        s.unitary(4),
    ];
    let initial = vec![s.pure_state(4), s.pure_state(4)];
    let circuit = NoisyCircuit::new(gates, noise, initial, 25).unwrap();
    let b = Budget::default();
    let with = simulate_circuit(&circuit, &b).unwrap();
    let idle = simulate_circuit(&circuit.idle(), &b).unwrap();
    for (x, y) in with.records.iter().zip(&idle.records) {
        assert_eq!(x.bound, y.bound);
        assert!(x.distance <= x.bound + 1e-9);
    }
}

#[test]
fn helstrom_beats_random_measurements() {
    let mut s = Sampler::new(46);
    for i in 0..20 {
        let d = 2 + i % 2;
        let (a, b) = (s.state::<f64>(d), s.state::<f64>(d));
        let pi1 = s.uniform::<f64>(0.0, 1.0);
        let h = helstrom(&a, &b, pi1).unwrap();
        for _ in 0..50 {
            let f = s.effect::<f64>(d);
            assert!(success_probability(&a, &b, pi1, &f).unwrap() <= h.p_correct + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn contractive_channels_cap_discrimination(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let t = qubit_canonical(&s.canonical_qubit_form::<f64>(0.9, 0.1)).unwrap();
        let l = lemma1_bound(&t, &Budget::default()).unwrap();
        prop_assert!(l.certified && l.bound < 1.0);
        for _ in 0..60 {
            let (a, b) = (s.pure_state::<f64>(2), s.pure_state::<f64>(2));
            let p = helstrom(&t.apply(&a).unwrap(), &t.apply(&b).unwrap(), 0.5).unwrap().p_correct;
            prop_assert!(p <= l.bound + 1e-9);
        }
    }
}
