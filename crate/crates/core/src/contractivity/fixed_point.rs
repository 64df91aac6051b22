use num_traits::One;

use crate::channels::{QuantumChannel, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{null_space, trace_distance_matrices, unvectorize, ComplexMatrix};
use crate::scalar::{Real, C};
use crate::states::{maximally_mixed, DensityOperator};

/// Relative singular-value cutoff for the kernel of `S − I`.
const KERNEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    /// Kernel of `S − I` for the superoperator `S`.
    Nullspace,
    /// Repeated application starting from `I/d`.
    Iteration,
}

impl FixedPointMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FixedPointMethod::Nullspace => "nullspace",
            FixedPointMethod::Iteration => "iteration",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions<T> {
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for FixedPointOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10),
            max_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointResult<T> {
    pub state: DensityOperator<T>,
    /// `‖Tρ − ρ‖₁` for the returned state.
    pub residual: T,
    /// Channel applications performed to reach `state` (zero for the nullspace method).
    pub iterations: usize,
    pub method: FixedPointMethod,
}

/// `⌈log(tol/2) / log κ⌉`: iterations after which a channel with modulus
/// `κ < 1` is guaranteed to have residual below `tol`.
pub fn iteration_bound(kappa: f64, tol: f64) -> Option<usize> {
    if !(kappa > 0.0 && kappa < 1.0 && tol > 0.0) {
        return None;
    }
    if tol >= 2.0 {
        return Some(0);
    }
    Some(((tol / 2.0).ln() / kappa.ln()).ceil() as usize)
}

/// Fixed point `Tρ = ρ` of a channel.
///
/// The nullspace method fails with [`Error::DegenerateFixedPoint`] when
/// `S − I` has a kernel of dimension above one, i.e. the fixed state is not
/// unique. The iteration method stops at the first `ρₙ = Tⁿ(I/d)` with
/// `‖Tρₙ − ρₙ‖₁ < tol`.
pub fn fixed_point<T: Real>(
    channel: &QuantumChannel<T>,
    method: FixedPointMethod,
    options: &FixedPointOptions<T>,
) -> Result<FixedPointResult<T>> {
    channel.ensure_cptp()?;
    if !(options.tol > T::zero()) {
        return Err(Error::param("tol", "tolerance must be positive"));
    }
    match method {
        FixedPointMethod::Nullspace => by_nullspace(channel, options),
        FixedPointMethod::Iteration => by_iteration(channel, options),
    }
}

fn by_nullspace<T: Real>(channel: &QuantumChannel<T>, options: &FixedPointOptions<T>) -> Result<FixedPointResult<T>> {
    let d = channel.dim();
    let s = channel.to_superoperator();
    let shifted = s.difference(&Superoperator::identity(d))?;
    let kernel = null_space(shifted.matrix(), T::lit(KERNEL_TOL))?;
    if kernel.len() != 1 {
        return Err(Error::DegenerateFixedPoint { dimension: kernel.len() });
    }
    let x = unvectorize(&kernel[0], d, d);
    let tr = x.trace();
    if tr.norm() < T::lit(1e-8) {
        return Err(Error::FixedPointNotState("kernel vector is traceless".into()));
    }
    let x = x.scale(C::<T>::one() / tr).hermitize();
    let state = DensityOperator::new(x).map_err(|e| Error::FixedPointNotState(e.to_string()))?;
    let residual = residual(channel, state.matrix());
    let limit = options.tol.max(T::tol(1e-12));
    if residual > limit {
        return Err(Error::NoConvergence {
            max_iter: 0,
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(FixedPointResult {
        state,
        residual,
        iterations: 0,
        method: FixedPointMethod::Nullspace,
    })
}

fn residual<T: Real>(channel: &QuantumChannel<T>, x: &ComplexMatrix<T>) -> T {
    trace_distance_matrices(&channel.apply_unchecked(x), x).expect("square")
}

fn by_iteration<T: Real>(channel: &QuantumChannel<T>, options: &FixedPointOptions<T>) -> Result<FixedPointResult<T>> {
    let mut rho = maximally_mixed::<T>(channel.dim())?.into_matrix();
    let mut next = channel.apply_unchecked(&rho);
    let mut res = trace_distance_matrices(&next, &rho)?;
    let mut n = 0;
    while !(res < options.tol) {
        if n >= options.max_iter {
            return Err(Error::NoConvergence {
                max_iter: options.max_iter,
                residual: res.to_f64_lossy(),
            });
        }
        rho = next;
        n += 1;
        next = channel.apply_unchecked(&rho);
        res = trace_distance_matrices(&next, &rho)?;
    }
    // renormalize away accumulated trace drift
    let tr = rho.trace().re;
    let state = DensityOperator::new(rho.scale_real(T::one() / tr).hermitize())
        .map_err(|e| Error::FixedPointNotState(e.to_string()))?;
    Ok(FixedPointResult {
        residual: residual(channel, state.matrix()),
        state,
        iterations: n,
        method: FixedPointMethod::Iteration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{compose, constant_channel, depolarizing, identity, tensor, unitary_channel};
    use crate::random::Sampler;
    use crate::states::trace_norm_distance;

    fn hadamard() -> ComplexMatrix<f64> {
        let h = 0.5f64.sqrt();
        ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]).unwrap()
    }

    #[test]
    fn depolarizing_fixes_maximally_mixed() {
        let opts = FixedPointOptions::default();
        for d in [2, 3] {
            let ch = depolarizing(d, 0.2f64).unwrap();
            let mixed = maximally_mixed::<f64>(d).unwrap();
            for method in [FixedPointMethod::Nullspace, FixedPointMethod::Iteration] {
                let fp = fixed_point(&ch, method, &opts).unwrap();
                assert!(fp.state.matrix().max_abs_diff(mixed.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn constant_channel_in_one_step() {
        let sigma = Sampler::new(4).state::<f64>(3);
        let ch = constant_channel(&sigma).unwrap();
        let fp = fixed_point(&ch, FixedPointMethod::Iteration, &FixedPointOptions::default()).unwrap();
        assert_eq!(fp.iterations, 1);
        assert!(fp.state.matrix().max_abs_diff(sigma.matrix()) < 1e-12);
        let fp = fixed_point(&ch, FixedPointMethod::Nullspace, &FixedPointOptions::default()).unwrap();
        assert!(fp.state.matrix().max_abs_diff(sigma.matrix()) < 1e-10);
    }

    #[test]
    fn methods_agree_on_rotated_depolarizing() {
        let ch = compose(&depolarizing(2, 0.2f64).unwrap(), &unitary_channel(&hadamard()).unwrap()).unwrap();
        let opts = FixedPointOptions::default();
        let a = fixed_point(&ch, FixedPointMethod::Nullspace, &opts).unwrap();
        let b = fixed_point(&ch, FixedPointMethod::Iteration, &opts).unwrap();
        assert!(trace_norm_distance(&a.state, &b.state).unwrap() < 1e-10);
        assert!(a.residual < 1e-10 && b.residual < 1e-10);
    }

    #[test]
    fn methods_agree_on_non_unital_channel() {
        let mut s = Sampler::new(21);
        let form = s.canonical_qubit_form::<f64>(0.7, 0.2);
        let ch = crate::channels::qubit_canonical(&form).unwrap();
        let opts = FixedPointOptions { tol: 1e-12, max_iter: 100_000 };
        let a = fixed_point(&ch, FixedPointMethod::Nullspace, &opts).unwrap();
        let b = fixed_point(&ch, FixedPointMethod::Iteration, &opts).unwrap();
        assert!(trace_norm_distance(&a.state, &b.state).unwrap() < 1e-9);
    }

    #[test]
    fn degenerate_fixed_set_is_reported() {
        let ch = tensor(&depolarizing(2, 0.3f64).unwrap(), &identity(2).unwrap()).unwrap();
        match fixed_point(&ch, FixedPointMethod::Nullspace, &FixedPointOptions::default()) {
            Err(Error::DegenerateFixedPoint { dimension }) => assert_eq!(dimension, 4),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn unitary_channels_have_degenerate_fixed_set() {
        let x = crate::states::pauli::<f64>(1);
        let ch = unitary_channel(&x).unwrap();
        // iteration starts on I/2, which every unitary channel fixes
        let fp = fixed_point(&ch, FixedPointMethod::Iteration, &FixedPointOptions::default()).unwrap();
        assert_eq!(fp.iterations, 0);
        assert!(matches!(
            fixed_point(&ch, FixedPointMethod::Nullspace, &FixedPointOptions::default()),
            Err(Error::DegenerateFixedPoint { .. })
        ));
    }

    #[test]
    fn iteration_bound_examples() {
        assert_eq!(iteration_bound(0.5, 0.5), Some(2));
        assert_eq!(iteration_bound(1.0, 1e-3), None);
    }
}
