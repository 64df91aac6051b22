use num_traits::Zero;
use rayon::prelude::*;

use super::{Budget, ASCENT_TOL, MAX_ASCENT_STEPS};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, trace_norm_hermitian, ComplexMatrix};
use crate::random::Sampler;
use crate::scalar::{Real, C};

/// Offset separating the RNG streams used here from those of the κ search.
const STREAM_BASE: u64 = 1 << 40;

/// `A − B` extended by an identity on a `k`-dimensional ancilla.
struct Difference<T> {
    d: usize,
    k: usize,
    terms: Vec<(ComplexMatrix<T>, T)>,
}

impl<T: Real> Difference<T> {
    fn new(a: &QuantumChannel<T>, b: &QuantumChannel<T>, k: usize) -> Self {
        let id = ComplexMatrix::identity(k);
        // terms shared verbatim by both channels cancel exactly
        let mut left: Vec<(&ComplexMatrix<T>, T)> = a.kraus().iter().zip(a.weights().iter().copied()).collect();
        let mut right = Vec::new();
        for (op, &w) in b.kraus().iter().zip(b.weights()) {
            match left.iter().position(|(o, v)| *v == w && *o == op) {
                Some(i) => {
                    left.remove(i);
                }
                None => right.push((op, w)),
            }
        }
        let terms = left
            .into_iter()
            .map(|(op, w)| (kron(op, &id), w))
            .chain(right.into_iter().map(|(op, w)| (kron(op, &id), -w)))
            .collect();
        Self { d: a.dim(), k, terms }
    }

    /// `((A − B) ⊗ id)(|ψ⟩⟨ψ|)`.
    fn image(&self, psi: &[C<T>]) -> ComplexMatrix<T> {
        let n = self.d * self.k;
        let mut out = ComplexMatrix::zeros(n, n);
        for (op, w) in &self.terms {
            let v = op.mul_vec(psi);
            out += &ComplexMatrix::outer(&v, &v).scale_real(*w);
        }
        out
    }

    fn adjoint(&self, s: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.d * self.k;
        let mut out = ComplexMatrix::zeros(n, n);
        for (op, w) in &self.terms {
            out += &op.adjoint().sandwich(s).scale_real(*w);
        }
        out
    }

    fn value(&self, psi: &[C<T>]) -> (T, ComplexMatrix<T>) {
        let image = self.image(psi);
        (trace_norm_hermitian(&image).expect("square"), image)
    }

    /// Monotone ascent `ψ ← top eigenvector of Φ*(sgn Φ(ψ))`.
    fn ascend(&self, mut psi: Vec<C<T>>) -> (T, Vec<C<T>>) {
        let (mut value, mut image) = self.value(&psi);
        let tol = T::tol(ASCENT_TOL);
        for _ in 0..MAX_ASCENT_STEPS {
            let e = hermitian_eigen(&image).expect("square");
            let sign = e.reconstruct_with(|x| {
                if x > T::zero() {
                    T::one()
                } else if x < T::zero() {
                    -T::one()
                } else {
                    T::zero()
                }
            });
            let g = self.adjoint(&sign);
            let eg = hermitian_eigen(&g).expect("square");
            let next = eg.vector(eg.values.len() - 1);
            let (next_value, next_image) = self.value(&next);
            let improved = next_value > value + tol;
            if next_value > value {
                psi = next;
                value = next_value;
                image = next_image;
            }
            if !improved {
                break;
            }
        }
        (value, psi)
    }
}

fn check_dims<T: Real>(a: &QuantumChannel<T>, b: &QuantumChannel<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channels of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Best value found at one ancilla size, optionally seeded with a vector
/// carried over from the previous size.
fn search_level<T: Real>(
    diff: &Difference<T>,
    budget: &Budget,
    level: usize,
    carried: Option<&[C<T>]>,
) -> (T, Vec<C<T>>) {
    let n = diff.d * diff.k;
    let runs: Vec<(T, Vec<C<T>>)> = (0..budget.restarts())
        .into_par_iter()
        .map(|r| {
            let stream = STREAM_BASE + ((level as u64) << 20) + r as u64;
            let mut rng = Sampler::with_stream(budget.seed, stream);
            let mut best: Option<(T, Vec<C<T>>)> = None;
            for _ in 0..budget.samples_per_restart() {
                let psi = rng.pure::<T>(n);
                let v = diff.value(&psi).0;
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, psi));
                }
            }
            diff.ascend(best.expect("at least one sample").1)
        })
        .collect();
    let mut best = match carried {
        Some(psi) => diff.ascend(psi.to_vec()),
        None => (T::neg_infinity(), Vec::new()),
    };
    for run in runs {
        if run.0 > best.0 {
            best = run;
        }
    }
    best
}

/// Pads `ψ ∈ C^d ⊗ C^{k}` to `C^d ⊗ C^{k+1}`.
fn embed<T: Real>(psi: &[C<T>], d: usize, k: usize) -> Vec<C<T>> {
    let mut out = vec![C::zero(); d * (k + 1)];
    for i in 0..d {
        for a in 0..k {
            out[i * (k + 1) + a] = psi[i * k + a];
        }
    }
    out
}

/// Certified lower bound on `‖A − B‖_cb`: the best `‖((A − B) ⊗ id)(ψ)‖₁`
/// found over pure `ψ` on the system plus an ancilla of dimension
/// `ancilla_dim` (default `d`).
///
/// Ancilla sizes `1, …, ancilla_dim` are searched in turn, each seeded with
/// the optimum of the previous size, so the value never decreases with
/// `ancilla_dim` for a fixed budget.
pub fn cb_dist_lower<T: Real>(
    a: &QuantumChannel<T>,
    b: &QuantumChannel<T>,
    ancilla_dim: Option<usize>,
    budget: &Budget,
) -> Result<T> {
    check_dims(a, b)?;
    let d = a.dim();
    let k_max = ancilla_dim.unwrap_or(d);
    if k_max == 0 {
        return Err(Error::param("ancilla_dim", "ancilla dimension must be positive"));
    }
    let mut best: Option<(T, Vec<C<T>>)> = None;
    for k in 1..=k_max {
        let diff = Difference::new(a, b, k);
        let carried = best.as_ref().map(|(_, psi)| embed(psi, d, k - 1));
        best = Some(search_level(&diff, budget, k, carried.as_deref()));
    }
    Ok(best.expect("at least one level").0)
}

/// Best-found `max ‖(A − B)(|ψ⟩⟨ψ|)‖₁` over pure inputs: a lower estimate of
/// the induced trace norm of `A − B` on Hermitian operators.
pub fn one_to_one_norm<T: Real>(a: &QuantumChannel<T>, b: &QuantumChannel<T>, budget: &Budget) -> Result<T> {
    check_dims(a, b)?;
    let diff = Difference::new(a, b, 1);
    Ok(search_level(&diff, budget, 0, None).0)
}

/// Heuristic upper estimate `d · ‖A − B‖₁→₁` of `‖A − B‖_cb`.
///
/// Not certified: the 1→1 norm is itself found by local search, so the
/// true bound may be larger.
pub fn cb_dist_upper<T: Real>(a: &QuantumChannel<T>, b: &QuantumChannel<T>, budget: &Budget) -> Result<T> {
    Ok(one_to_one_norm(a, b, budget)? * T::lit(a.dim() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{constant_channel, depolarizing, identity};
    use crate::random::Sampler;
    use crate::states::maximally_mixed;

    fn quick() -> Budget {
        Budget { samples: 64, restarts: 4, seed: 3 }
    }

    #[test]
    fn identical_channels_are_at_distance_zero() {
        let t = Sampler::new(1).channel::<f64>(2, 2);
        assert_eq!(cb_dist_lower(&t, &t, None, &quick()).unwrap(), 0.0);
        assert_eq!(cb_dist_upper(&t, &t, &quick()).unwrap(), 0.0);
    }

    #[test]
    fn bell_witness_against_complete_depolarization() {
        let id = identity::<f64>(2).unwrap();
        let m = constant_channel(&maximally_mixed(2).unwrap()).unwrap();
        let v = cb_dist_lower(&id, &m, Some(2), &quick()).unwrap();
        assert!((v - 1.5).abs() < 1e-9, "{v}");
        // without an ancilla only 1 is reachable
        let v1 = cb_dist_lower(&id, &m, Some(1), &quick()).unwrap();
        assert!((v1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_ancilla() {
        let mut s = Sampler::new(9);
        let (a, b) = (s.channel::<f64>(2, 2), s.channel::<f64>(2, 3));
        let mut last = 0.0;
        for k in 1..=3 {
            let v = cb_dist_lower(&a, &b, Some(k), &quick()).unwrap();
            assert!(v >= last - 1e-15);
            assert!(v <= 2.0 + 1e-9);
            last = v;
        }
    }

    #[test]
    fn depolarizing_pair_upper_bound() {
        let (p, q) = (0.1f64, 0.35);
        let up = cb_dist_upper(&depolarizing(2, p).unwrap(), &depolarizing(2, q).unwrap(), &quick()).unwrap();
        assert!(up >= (p - q).abs());
    }
}
