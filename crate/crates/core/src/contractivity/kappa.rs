use num_traits::Zero;
use rayon::prelude::*;

use super::{Budget, ASCENT_TOL, MAX_ASCENT_STEPS};
use crate::channels::{BlochAffine, QuantumChannel, Structure};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inner, trace_norm_hermitian, vector_norm, ComplexMatrix};
use crate::random::Sampler;
use crate::scalar::{Real, C};
use crate::states::{basis_state, trace_norm_distance, DensityOperator};

/// How a [`KappaEstimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaMethod {
    /// Largest singular value of the Bloch matrix of a qubit channel, or of
    /// the factors of a tensor product of unital qubit channels.
    ClosedFormQubit,
    /// `1 − p` for the depolarizing channel.
    ClosedFormDepolarizing,
    /// Multistart local search over orthogonal pure pairs; a lower bound.
    MultistartSearch,
}

impl KappaMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            KappaMethod::ClosedFormQubit => "closed_form_qubit",
            KappaMethod::ClosedFormDepolarizing => "closed_form_depolarizing",
            KappaMethod::MultistartSearch => "multistart_search",
        }
    }
}

/// Value of the contractivity modulus `sup ‖Tρ − Tσ‖₁ / ‖ρ − σ‖₁` together
/// with a pair of states realizing it.
#[derive(Debug, Clone)]
pub struct KappaEstimate<T> {
    pub lower_bound: T,
    /// True when `lower_bound` is the modulus itself rather than a bound.
    pub exact: bool,
    pub method: KappaMethod,
    pub witness: (DensityOperator<T>, DensityOperator<T>),
}

/// `‖Tρ − Tσ‖₁ / ‖ρ − σ‖₁` for a distinct pair.
pub fn contraction_ratio<T: Real>(
    channel: &QuantumChannel<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<T> {
    let before = trace_norm_distance(rho, sigma)?;
    if before <= T::tol(1e-14) {
        return Err(Error::param("states", "ratio undefined for coinciding states"));
    }
    let after = trace_norm_distance(&channel.apply(rho)?, &channel.apply(sigma)?)?;
    Ok(after / before)
}

/// Contractivity modulus: closed forms where the channel structure allows,
/// multistart search otherwise.
///
/// Closed forms cover depolarizing channels in any dimension, every qubit
/// channel (largest singular value of its Bloch matrix, which for the
/// canonical form `T_{v,t}` is `max|vᵢ|`), and tensor products of two
/// unital qubit channels.
pub fn kappa<T: Real>(channel: &QuantumChannel<T>, budget: &Budget) -> Result<KappaEstimate<T>> {
    channel.ensure_cptp()?;
    let d = channel.dim();
    if d == 1 {
        return Ok(trivial_estimate());
    }
    match channel.structure() {
        Structure::Depolarizing { p } => Ok(KappaEstimate {
            lower_bound: T::one() - *p,
            exact: true,
            method: KappaMethod::ClosedFormDepolarizing,
            witness: (basis_state(d, 0)?, basis_state(d, 1)?),
        }),
        Structure::UnitalQubitTensor { factors } => Ok(tensor_closed_form(factors)),
        _ if d == 2 => {
            let bloch = channel.bloch_affine()?;
            let n = bloch.top_direction();
            Ok(KappaEstimate {
                lower_bound: bloch.scalings()[0],
                exact: true,
                method: KappaMethod::ClosedFormQubit,
                witness: antipodal_pair(n),
            })
        }
        _ => kappa_search(channel, budget),
    }
}

fn trivial_estimate<T: Real>() -> KappaEstimate<T> {
    let one = basis_state(1, 0).expect("dimension 1");
    KappaEstimate {
        lower_bound: T::zero(),
        exact: true,
        method: KappaMethod::ClosedFormDepolarizing,
        witness: (one.clone(), one),
    }
}

fn antipodal_pair<T: Real>(n: [T; 3]) -> (DensityOperator<T>, DensityOperator<T>) {
    let up = DensityOperator::from_bloch(n).expect("unit Bloch vector");
    let down = DensityOperator::from_bloch(n.map(|x| -x)).expect("unit Bloch vector");
    (up, down)
}

fn tensor_closed_form<T: Real>(factors: &[BlochAffine<T>]) -> KappaEstimate<T> {
    let mut best = 0;
    let mut value = T::zero();
    for (i, f) in factors.iter().enumerate() {
        let s = f.scalings()[0];
        if s > value {
            best = i;
            value = s;
        }
    }
    let (up, down) = antipodal_pair(factors[best].top_direction());
    let spectator = basis_state::<T>(2, 0).expect("qubit");
    let embed = |rho: &DensityOperator<T>| {
        let mut m = ComplexMatrix::identity(1);
        for i in 0..factors.len() {
            let part = if i == best { rho.matrix() } else { spectator.matrix() };
            m = crate::linalg::kron(&m, part);
        }
        DensityOperator::from_trusted(m)
    };
    KappaEstimate {
        lower_bound: value,
        exact: true,
        method: KappaMethod::ClosedFormQubit,
        witness: (embed(&up), embed(&down)),
    }
}

/// Multistart search over orthogonal pure pairs, ignoring any closed form.
///
/// Each restart screens `samples / restarts` random pairs, then runs a
/// monotone ascent: with `D = T(P − Q)` and `G = T*(sgn D)`, the next pair
/// is the top and bottom eigenvectors of `G`, which cannot decrease
/// `‖T(P − Q)‖₁`. Restarts run in parallel; the reduction is by restart
/// index, so the result depends only on the budget.
pub fn kappa_search<T: Real>(channel: &QuantumChannel<T>, budget: &Budget) -> Result<KappaEstimate<T>> {
    channel.ensure_cptp()?;
    let d = channel.dim();
    if d == 1 {
        return Ok(trivial_estimate());
    }
    let runs: Vec<Pair<T>> = (0..budget.restarts())
        .into_par_iter()
        .map(|r| search_restart(channel, budget, r as u64))
        .collect();
    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.value > best.value {
            best = run;
        }
    }
    let p = DensityOperator::from_trusted(ComplexMatrix::outer(&best.psi, &best.psi));
    let q = DensityOperator::from_trusted(ComplexMatrix::outer(&best.phi, &best.phi));
    Ok(KappaEstimate {
        lower_bound: best.value,
        exact: false,
        method: KappaMethod::MultistartSearch,
        witness: (p, q),
    })
}

struct Pair<T> {
    psi: Vec<C<T>>,
    phi: Vec<C<T>>,
    value: T,
    image: ComplexMatrix<T>,
}

impl<T: Real> Pair<T> {
    fn new(channel: &QuantumChannel<T>, psi: Vec<C<T>>, phi: Vec<C<T>>) -> Self {
        let diff = &ComplexMatrix::outer(&psi, &psi) - &ComplexMatrix::outer(&phi, &phi);
        let image = channel.apply_unchecked(&diff);
        let num = trace_norm_hermitian(&image).expect("square");
        let den = trace_norm_hermitian(&diff).expect("square");
        Self {
            psi,
            phi,
            value: num / den,
            image,
        }
    }
}

fn orthogonal_partner<T: Real>(rng: &mut Sampler, psi: &[C<T>]) -> Vec<C<T>> {
    loop {
        let mut phi = rng.pure::<T>(psi.len());
        let overlap = inner(psi, &phi);
        for (x, p) in phi.iter_mut().zip(psi) {
            *x = *x - *p * overlap;
        }
        let n = vector_norm(&phi);
        if n > T::lit(1e-6) {
            return phi.into_iter().map(|z| z / n).collect();
        }
    }
}

fn search_restart<T: Real>(channel: &QuantumChannel<T>, budget: &Budget, restart: u64) -> Pair<T> {
    let mut rng = Sampler::with_stream(budget.seed, restart);
    let d = channel.dim();
    let mut best: Option<Pair<T>> = None;
    for _ in 0..budget.samples_per_restart() {
        let psi = rng.pure::<T>(d);
        let phi = orthogonal_partner(&mut rng, &psi);
        let cand = Pair::new(channel, psi, phi);
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    ascend(channel, best.expect("at least one sample"))
}

fn ascend<T: Real>(channel: &QuantumChannel<T>, mut current: Pair<T>) -> Pair<T> {
    let tol = T::tol(ASCENT_TOL);
    for _ in 0..MAX_ASCENT_STEPS {
        let e = hermitian_eigen(&current.image).expect("square");
        let sign = e.reconstruct_with(signum);
        let g = channel.apply_adjoint_unchecked(&sign);
        let eg = hermitian_eigen(&g).expect("square");
        let top = eg.vector(eg.values.len() - 1);
        let bottom = eg.vector(0);
        if top.iter().all(|z| z.is_zero()) {
            break;
        }
        let next = Pair::new(channel, top, bottom);
        if next.value > current.value + tol {
            current = next;
        } else {
            if next.value > current.value {
                current = next;
            }
            break;
        }
    }
    current
}

fn signum<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{constant_channel, depolarizing, identity, tensor, unitary_channel};
    use crate::random::Sampler;

    #[test]
    fn closed_form_examples() {
        let b = Budget::default();
        let k = kappa(&depolarizing(2, 0.1f64).unwrap(), &b).unwrap();
        assert!((k.lower_bound - 0.9).abs() < 1e-15);
        assert!(k.exact && k.method == KappaMethod::ClosedFormDepolarizing);

        let k = kappa(&depolarizing(3, 0.25f64).unwrap(), &b).unwrap();
        assert!((k.lower_bound - 0.75).abs() < 1e-15 && k.exact);

        let u = Sampler::new(1).unitary::<f64>(2);
        let k = kappa(&unitary_channel(&u).unwrap(), &b).unwrap();
        assert!((k.lower_bound - 1.0).abs() < 1e-12 && k.exact);

        let sigma = Sampler::new(2).state::<f64>(2);
        let k = kappa(&constant_channel(&sigma).unwrap(), &b).unwrap();
        assert!(k.lower_bound.abs() < 1e-12);

        let t = tensor(&depolarizing(2, 0.3f64).unwrap(), &depolarizing(2, 0.1).unwrap()).unwrap();
        let k = kappa(&t, &b).unwrap();
        assert!((k.lower_bound - 0.9).abs() < 1e-12 && k.exact);
    }

    #[test]
    fn witness_reproduces_value() {
        let b = Budget::default();
        let mut s = Sampler::new(3);
        let channels = vec![
            s.channel::<f64>(2, 2),
            s.channel::<f64>(3, 2),
            tensor(&s.unital_qubit_channel(0.8), &s.unital_qubit_channel(0.8)).unwrap(),
        ];
        for ch in channels {
            let k = kappa(&ch, &b).unwrap();
            let (r, q) = &k.witness;
            let ratio = contraction_ratio(&ch, r, q).unwrap();
            assert!((ratio - k.lower_bound).abs() < 1e-8, "{ratio} vs {}", k.lower_bound);
            assert!(k.lower_bound <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn search_matches_depolarizing() {
        let b = Budget { samples: 64, restarts: 4, seed: 5 };
        let k = kappa_search(&depolarizing(3, 0.4f64).unwrap(), &b).unwrap();
        assert!((k.lower_bound - 0.6).abs() < 1e-9);
        assert!(!k.exact);
    }

    #[test]
    fn search_on_identity_tensor() {
        let b = Budget { samples: 32, restarts: 2, seed: 0 };
        let ch = tensor(&identity::<f64>(2).unwrap(), &depolarizing(2, 0.5).unwrap()).unwrap();
        let k = kappa_search(&ch, &b).unwrap();
        assert!(k.lower_bound > 1.0 - 1e-6);
    }

    #[test]
    fn refuses_non_cp_maps() {
        let h = 0.5f64.sqrt();
        let t = QuantumChannel::from_weighted_kraus(
            2,
            (0..4).map(|k| crate::states::pauli::<f64>(k).scale_real(h)).collect(),
            vec![1.0, 1.0, -1.0, 1.0],
        )
        .unwrap();
        assert!(kappa(&t, &Budget::default()).is_err());
    }
}
