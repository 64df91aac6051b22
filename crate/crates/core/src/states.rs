//! Density operators, pure states, Bloch vectors, the two-qubit
//! coherence-vector / correlation-tensor decomposition, and entropy.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, kron, trace_distance_matrices, vector_norm, ComplexMatrix, HERMITIAN_TOL,
    PSD_TOL,
};
use crate::scalar::{c, cr, Real, C};

/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-10;
/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;
const ENTROPY_CUTOFF: f64 = 1e-12;

/// Pauli matrix `ς_k` with `ς_0 = I`, `ς_1 = X`, `ς_2 = Y`, `ς_3 = Z`.
pub fn pauli<T: Real>(k: usize) -> ComplexMatrix<T> {
    let (o, z, i) = (C::<T>::one(), C::<T>::zero(), c(T::zero(), T::one()));
    let rows = match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        3 => [[o, z], [z, -o]],
        _ => panic!("Pauli index {k} out of range"),
    };
    ComplexMatrix::from_fn(2, 2, |r, s| rows[r][s])
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    /// Validates and wraps a matrix.
    ///
    /// The Hermitian part is kept; eigenvalues in `[−1e−10, 0)` are clamped
    /// to zero and the trace renormalized.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        matrix.ensure_square()?;
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > T::tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian {
                deviation: deviation.to_f64_lossy(),
            });
        }
        let h = matrix.hermitize();
        let trace = h.trace().re;
        if (trace - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(Error::BadTrace {
                trace: trace.to_f64_lossy(),
            });
        }
        let e = hermitian_eigen(&h)?;
        if e.min() < -T::tol(PSD_TOL) {
            return Err(Error::NotPositive {
                min_eigenvalue: e.min().to_f64_lossy(),
            });
        }
        let matrix = if e.min() < T::zero() {
            let clamped = e.reconstruct_with(|l| l.max(T::zero()));
            let tr = clamped.trace().re;
            clamped.scale_real(T::one() / tr)
        } else {
            h
        };
        Ok(Self { matrix })
    }

    /// Wraps a matrix already known to be a state up to rounding (e.g. the
    /// output of a validated channel); only Hermitizes.
    pub(crate) fn from_trusted(matrix: ComplexMatrix<T>) -> Self {
        Self {
            matrix: matrix.hermitize(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigen(&self.matrix)
            .expect("density operator is square")
            .values
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        self.matrix.hs_inner(&self.matrix).re
    }

    /// Bloch vector `r_k = tr(ρ ς_k)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[T; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Bloch vector needs a qubit, got dimension {}",
                self.dim()
            )));
        }
        Ok([1, 2, 3].map(|k| pauli::<T>(k).hs_inner(&self.matrix).re))
    }

    /// Qubit state `(I + r·ς)/2`; requires `|r| ≤ 1`.
    pub fn from_bloch(r: [T; 3]) -> Result<Self> {
        DensityOperator::new(bloch_operator(T::one(), r))
    }

    pub fn cast<U: Real>(&self) -> DensityOperator<U> {
        DensityOperator {
            matrix: self.matrix.cast(),
        }
    }
}

/// `(w₀ I + w·ς)/2` without validation.
pub(crate) fn bloch_operator<T: Real>(w0: T, w: [T; 3]) -> ComplexMatrix<T> {
    let mut m = pauli::<T>(0).scale_real(w0);
    for (k, wk) in w.iter().enumerate() {
        m += &pauli::<T>(k + 1).scale_real(*wk);
    }
    m.scale_real(T::lit(0.5))
}

/// `|ψ⟩⟨ψ|` for a unit vector.
pub fn pure_state<T: Real>(psi: &[C<T>]) -> Result<DensityOperator<T>> {
    if psi.is_empty() {
        return Err(Error::param("psi", "empty vector"));
    }
    let norm = vector_norm(psi);
    if (norm - T::one()).abs() > T::tol(NORM_TOL) {
        return Err(Error::NotNormalized {
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(DensityOperator::from_trusted(ComplexMatrix::outer(psi, psi)))
}

/// Computational basis state `|k⟩⟨k|` in dimension `d`.
pub fn basis_state<T: Real>(d: usize, k: usize) -> Result<DensityOperator<T>> {
    if k >= d {
        return Err(Error::param("k", format!("basis index {k} out of range for dimension {d}")));
    }
    let mut v = vec![C::zero(); d];
    v[k] = C::one();
    pure_state(&v)
}

/// `I/d`.
pub fn maximally_mixed<T: Real>(d: usize) -> Result<DensityOperator<T>> {
    if d == 0 {
        return Err(Error::param("d", "dimension must be positive"));
    }
    Ok(DensityOperator {
        matrix: ComplexMatrix::identity(d).scale_real(T::one() / T::lit(d as f64)),
    })
}

/// `‖ρ − σ‖₁ ∈ [0, 2]`.
pub fn trace_norm_distance<T: Real>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    trace_distance_matrices(rho.matrix(), sigma.matrix())
}

/// Pauli-basis expansion of a two-qubit operator:
/// `ρ = ¼(I⊗I + Σ α_k ς_k⊗I + Σ β_k I⊗ς_k + Σ θ_kl ς_k⊗ς_l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteDecomposition<T> {
    /// Coherence vector of the first qubit.
    pub alpha: [T; 3],
    /// Coherence vector of the second qubit.
    pub beta: [T; 3],
    /// Correlation tensor, `theta[k][l]` pairs `ς_{k+1} ⊗ ς_{l+1}`.
    pub theta: [[T; 3]; 3],
}

impl<T: Real> BipartiteDecomposition<T> {
    pub fn zero() -> Self {
        Self {
            alpha: [T::zero(); 3],
            beta: [T::zero(); 3],
            theta: [[T::zero(); 3]; 3],
        }
    }
}

pub fn decompose_two_qubit<T: Real>(rho: &DensityOperator<T>) -> Result<BipartiteDecomposition<T>> {
    decompose_two_qubit_operator(rho.matrix())
}

/// Same as [`decompose_two_qubit`] for any Hermitian 4×4 operator.
pub fn decompose_two_qubit_operator<T: Real>(m: &ComplexMatrix<T>) -> Result<BipartiteDecomposition<T>> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit decomposition needs a 4x4 operator, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let coeff = |a: usize, b: usize| kron(&pauli::<T>(a), &pauli::<T>(b)).hs_inner(m).re;
    let mut out = BipartiteDecomposition::zero();
    for k in 0..3 {
        out.alpha[k] = coeff(k + 1, 0);
        out.beta[k] = coeff(0, k + 1);
        for l in 0..3 {
            out.theta[k][l] = coeff(k + 1, l + 1);
        }
    }
    Ok(out)
}

/// Inverse of [`decompose_two_qubit`]. The result is Hermitian with unit
/// trace but may fail positivity; callers validate.
pub fn reconstruct_two_qubit<T: Real>(dec: &BipartiteDecomposition<T>) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::identity(4);
    for k in 0..3 {
        m += &kron(&pauli::<T>(k + 1), &pauli::<T>(0)).scale_real(dec.alpha[k]);
        m += &kron(&pauli::<T>(0), &pauli::<T>(k + 1)).scale_real(dec.beta[k]);
        for l in 0..3 {
            m += &kron(&pauli::<T>(k + 1), &pauli::<T>(l + 1)).scale_real(dec.theta[k][l]);
        }
    }
    m.scale_real(T::lit(0.25))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

/// `S(ρ) = −Σ λ ln λ`; eigenvalues below `1e−12` contribute nothing.
pub fn von_neumann_entropy<T: Real>(rho: &DensityOperator<T>, base: LogBase) -> T {
    let cutoff = T::lit(ENTROPY_CUTOFF);
    let nats: T = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l >= cutoff)
        .map(|l| -l * l.ln())
        .sum();
    let nats = nats.max(T::zero());
    match base {
        LogBase::Natural => nats,
        LogBase::Two => nats / T::LN_2(),
    }
}

/// Maximally entangled vector `Σ_i |ii⟩/√d`.
pub fn maximally_entangled<T: Real>(d: usize) -> Vec<C<T>> {
    let amp = cr(T::one() / T::lit(d as f64).sqrt());
    let mut v = vec![C::zero(); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;
    use proptest::prelude::*;

    type D = DensityOperator<f64>;

    fn bell() -> D {
        pure_state(&maximally_entangled::<f64>(2)).unwrap()
    }

    #[test]
    fn pure_state_examples() {
        let e0 = basis_state::<f64>(2, 0).unwrap();
        assert_eq!(e0.matrix(), &ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        let h = 0.5f64.sqrt();
        let plus = pure_state(&[cr(h), cr(h)]).unwrap();
        for z in plus.matrix().as_slice() {
            assert!((z.re - 0.5).abs() < 1e-15 && z.im.abs() < 1e-15);
        }
        assert!((plus.purity() - 1.0).abs() < 1e-14);
        assert!(matches!(pure_state(&[cr(0.9), cr(0.0)]), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn maximally_mixed_examples() {
        let m = maximally_mixed::<f64>(4).unwrap();
        assert_eq!(m.matrix(), &ComplexMatrix::identity(4).scale_real(0.25));
        assert!((m.purity() - 0.25).abs() < 1e-15);
        assert!(maximally_mixed::<f64>(0).is_err());
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let not_herm = ComplexMatrix::<f64>::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(matches!(D::new(not_herm), Err(Error::NotHermitian { .. })));
        let neg = ComplexMatrix::<f64>::from_real_diag(&[1.5, -0.5]);
        assert!(matches!(D::new(neg), Err(Error::NotPositive { .. })));
        let tr = ComplexMatrix::<f64>::from_real_diag(&[0.5, 0.6]);
        assert!(matches!(D::new(tr), Err(Error::BadTrace { .. })));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = basis_state::<f64>(2, 0).unwrap();
        let one = basis_state::<f64>(2, 1).unwrap();
        assert!(trace_norm_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_norm_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-14);
        let mixed = maximally_mixed::<f64>(2).unwrap();
        let mut s = Sampler::new(3);
        for _ in 0..20 {
            let psi = s.pure_state::<f64>(2);
            assert!((trace_norm_distance(&psi, &mixed).unwrap() - 1.0).abs() < 1e-12);
        }
        let d3 = maximally_mixed::<f64>(3).unwrap();
        assert!(trace_norm_distance(&zero, &d3).is_err());
    }

    #[test]
    fn two_qubit_decomposition_examples() {
        let dec = decompose_two_qubit(&maximally_mixed::<f64>(4).unwrap()).unwrap();
        assert_eq!(dec, BipartiteDecomposition::zero());

        let zz = basis_state::<f64>(4, 0).unwrap();
        let dec = decompose_two_qubit(&zz).unwrap();
        assert_eq!(dec.alpha, [0.0, 0.0, 1.0]);
        assert_eq!(dec.beta, [0.0, 0.0, 1.0]);
        for k in 0..3 {
            for l in 0..3 {
                let want = if (k, l) == (2, 2) { 1.0 } else { 0.0 };
                assert!((dec.theta[k][l] - want).abs() < 1e-15);
            }
        }

        let dec = decompose_two_qubit(&bell()).unwrap();
        let want = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for k in 0..3 {
            assert!(dec.alpha[k].abs() < 1e-15 && dec.beta[k].abs() < 1e-15);
            for l in 0..3 {
                assert!((dec.theta[k][l] - want[k][l]).abs() < 1e-14);
            }
        }
        let rebuilt = reconstruct_two_qubit(&dec);
        assert!(rebuilt.max_abs_diff(bell().matrix()) < 1e-14);
        assert_eq!(reconstruct_two_qubit(&BipartiteDecomposition::<f64>::zero()), ComplexMatrix::identity(4).scale_real(0.25));
        assert!(decompose_two_qubit(&zz.clone()).is_ok());
        assert!(decompose_two_qubit(&maximally_mixed::<f64>(2).unwrap()).is_err());
    }

    #[test]
    fn entropy_examples() {
        let zero = basis_state::<f64>(2, 0).unwrap();
        assert_eq!(von_neumann_entropy(&zero, LogBase::Natural), 0.0);
        let mixed = maximally_mixed::<f64>(2).unwrap();
        assert!((von_neumann_entropy(&mixed, LogBase::Natural) - 2f64.ln()).abs() < 1e-14);
        assert!((von_neumann_entropy(&mixed, LogBase::Two) - 1.0).abs() < 1e-14);
        let d = D::new(ComplexMatrix::from_real_diag(&[0.75, 0.25])).unwrap();
        let want = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((von_neumann_entropy(&d, LogBase::Natural) - want).abs() < 1e-14);
        assert!((want - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn bloch_round_trip() {
        let rho = D::from_bloch([0.1, -0.2, 0.3]).unwrap();
        let r = rho.bloch_vector().unwrap();
        assert!((r[0] - 0.1).abs() < 1e-15 && (r[1] + 0.2).abs() < 1e-15 && (r[2] - 0.3).abs() < 1e-15);
        assert!(D::from_bloch([1.0, 1.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn two_qubit_round_trip(seed in any::<u64>()) {
            let rho = Sampler::new(seed).state::<f64>(4);
            let back = reconstruct_two_qubit(&decompose_two_qubit(&rho).unwrap());
            prop_assert!(back.max_abs_diff(rho.matrix()) < 1e-10);
        }

        #[test]
        fn trace_distance_is_a_metric(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let (a, b, c3) = (s.state::<f64>(3), s.state::<f64>(3), s.state::<f64>(3));
            let ab = trace_norm_distance(&a, &b).unwrap();
            let ba = trace_norm_distance(&b, &a).unwrap();
            let ac = trace_norm_distance(&a, &c3).unwrap();
            let cb = trace_norm_distance(&c3, &b).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab <= ac + cb + 1e-12);
            prop_assert!((0.0..=2.0 + 1e-12).contains(&ab));
        }
    }
}
