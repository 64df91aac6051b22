//! Optimal discrimination between two states and the ceiling imposed on it
//! by a strictly contractive channel.

use crate::channels::QuantumChannel;
use crate::contractivity::{kappa, Budget};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::scalar::Real;
use crate::states::DensityOperator;

/// Eigenvalues down to `−ZERO_SLACK` count as nonnegative when forming `P₊`.
const ZERO_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DiscriminationResult<T> {
    /// `½ + ½‖π₁ρ₁ − π₂ρ₂‖₁`.
    pub p_correct: T,
    /// `‖π₁ρ₁ − π₂ρ₂‖₁`.
    pub distance: T,
    /// Projector onto the nonnegative eigenspace of `π₁ρ₁ − π₂ρ₂`; announce `ρ₁` on this outcome.
    pub optimal_effect: ComplexMatrix<T>,
    pub priors: (T, T),
}

/// Success probability `π₁ tr(Fρ₁) + π₂ tr((I − F)ρ₂)` of the two-outcome measurement `{F, I − F}`.
pub fn success_probability<T: Real>(
    rho1: &DensityOperator<T>,
    rho2: &DensityOperator<T>,
    pi1: T,
    effect: &ComplexMatrix<T>,
) -> Result<T> {
    check_pair(rho1, rho2)?;
    if effect.rows() != rho1.dim() || effect.cols() != rho1.dim() {
        return Err(Error::DimensionMismatch("effect does not match the state dimension".into()));
    }
    let pi2 = T::one() - pi1;
    let complement = &ComplexMatrix::identity(rho1.dim()) - effect;
    Ok(pi1 * effect.hs_inner(rho1.matrix()).re + pi2 * complement.hs_inner(rho2.matrix()).re)
}

fn check_pair<T: Real>(rho1: &DensityOperator<T>, rho2: &DensityOperator<T>) -> Result<()> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    Ok(())
}

/// Helstrom measurement for `ρ₁` (prior `π₁`) against `ρ₂` (prior `1 − π₁`).
pub fn helstrom<T: Real>(rho1: &DensityOperator<T>, rho2: &DensityOperator<T>, pi1: T) -> Result<DiscriminationResult<T>> {
    check_pair(rho1, rho2)?;
    if !(pi1 >= T::zero() && pi1 <= T::one()) {
        return Err(Error::param("pi1", format!("prior {pi1} outside [0, 1]")));
    }
    let pi2 = T::one() - pi1;
    let gamma = &rho1.matrix().scale_real(pi1) - &rho2.matrix().scale_real(pi2);
    let e = hermitian_eigen(&gamma)?;
    let distance: T = e.values.iter().map(|l| l.abs()).sum();
    let slack = T::tol(ZERO_SLACK);
    let effect = e.reconstruct_with(|l| if l >= -slack { T::one() } else { T::zero() });
    let half = T::lit(0.5);
    Ok(DiscriminationResult {
        p_correct: half + half * distance,
        distance,
        optimal_effect: effect,
        priors: (pi1, pi2),
    })
}

/// Equiprobable success ceiling `(1 + κ)/2` after the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Bound<T> {
    pub bound: T,
    pub kappa: T,
    /// False when `κ` is only a search lower bound; the ceiling is then not guaranteed.
    pub certified: bool,
}

/// `(1 + κ(T))/2`, certified when `κ` is known in closed form.
pub fn lemma1_bound<T: Real>(channel: &QuantumChannel<T>, budget: &Budget) -> Result<Lemma1Bound<T>> {
    let k = kappa(channel, budget)?;
    Ok(Lemma1Bound {
        bound: (T::one() + k.lower_bound) * T::lit(0.5),
        kappa: k.lower_bound,
        certified: k.exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{constant_channel, depolarizing, unitary_channel};
    use crate::random::Sampler;
    use crate::states::basis_state;
    use proptest::prelude::*;

    #[test]
    fn helstrom_examples() {
        let (z0, z1) = (basis_state::<f64>(2, 0).unwrap(), basis_state::<f64>(2, 1).unwrap());
        assert!((helstrom(&z0, &z1, 0.5).unwrap().p_correct - 1.0).abs() < 1e-15);
        assert!((helstrom(&z0, &z0, 0.5).unwrap().p_correct - 0.5).abs() < 1e-15);

        let d = depolarizing(2, 0.1f64).unwrap();
        let r = helstrom(&d.apply(&z0).unwrap(), &d.apply(&z1).unwrap(), 0.5).unwrap();
        assert!((r.p_correct - 0.95).abs() < 1e-14);
        assert!((r.distance - 0.9).abs() < 1e-14);
        let achieved = success_probability(&d.apply(&z0).unwrap(), &d.apply(&z1).unwrap(), 0.5, &r.optimal_effect).unwrap();
        assert!((achieved - r.p_correct).abs() < 1e-12);

        assert!(helstrom(&z0, &z1, 1.5).is_err());
        assert!(helstrom(&z0, &basis_state(3, 0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn ceiling_examples() {
        let b = Budget::default();
        let l = lemma1_bound(&depolarizing(2, 0.1f64).unwrap(), &b).unwrap();
        assert!((l.bound - 0.95).abs() < 1e-15 && l.certified);
        let sigma = Sampler::new(1).state::<f64>(2);
        let l = lemma1_bound(&constant_channel(&sigma).unwrap(), &b).unwrap();
        assert!((l.bound - 0.5).abs() < 1e-12);
        let u = Sampler::new(2).unitary::<f64>(2);
        let l = lemma1_bound(&unitary_channel(&u).unwrap(), &b).unwrap();
        assert!((l.bound - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn effect_reproduces_probability(seed in any::<u64>(), pi1 in 0.0f64..=1.0) {
            let mut s = Sampler::new(seed);
            let d = 2 + (seed % 3) as usize;
            let (a, b) = (s.state::<f64>(d), s.state::<f64>(d));
            let r = helstrom(&a, &b, pi1).unwrap();
            let achieved = success_probability(&a, &b, pi1, &r.optimal_effect).unwrap();
            prop_assert!((achieved - r.p_correct).abs() < 1e-10);
            prop_assert!(r.p_correct >= 0.5 - 1e-12 && r.p_correct <= 1.0 + 1e-12);
            for _ in 0..20 {
                let f = s.effect::<f64>(d);
                prop_assert!(success_probability(&a, &b, pi1, &f).unwrap() <= r.p_correct + 1e-9);
            }
        }

        #[test]
        fn channels_never_help(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let t = s.channel::<f64>(2, 3);
            let (a, b) = (s.state::<f64>(2), s.state::<f64>(2));
            let before = helstrom(&a, &b, 0.5).unwrap().p_correct;
            let after = helstrom(&t.apply(&a).unwrap(), &t.apply(&b).unwrap(), 0.5).unwrap().p_correct;
            prop_assert!(after <= before + 1e-9);
        }
    }
}
