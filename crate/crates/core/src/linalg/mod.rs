//! Dense complex linear algebra: eigendecomposition, Schatten norms,
//! Kronecker products, partial traces and column-major vectorization.

mod eigen;
mod matrix;

pub use eigen::{eigvalsh, hermitian_eigen, HermitianEigen};
pub use matrix::{inner, vector_norm, ComplexMatrix};


use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Max-abs deviation from Hermiticity tolerated for nominally Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Most negative eigenvalue tolerated for nominally PSD inputs.
pub const PSD_TOL: f64 = 1e-10;

/// Order of a Schatten norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenP {
    Finite(u32),
    Infinity,
}

impl SchattenP {
    pub const TRACE: Self = SchattenP::Finite(1);
    pub const FROBENIUS: Self = SchattenP::Finite(2);
}

/// Singular values in descending order, from the eigenvalues of `X†X`.
pub fn singular_values<T: Real>(x: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let gram = x.adjoint().matmul(x);
    let mut s: Vec<T> = eigvalsh(&gram)?
        .into_iter()
        .map(|l| l.max(T::zero()).sqrt())
        .collect();
    s.reverse();
    Ok(s)
}

/// Schatten p-norm of a square matrix.
///
/// Hermitian inputs use absolute eigenvalues directly; everything else goes
/// through the spectrum of `X†X`.
pub fn schatten_norm<T: Real>(x: &ComplexMatrix<T>, p: SchattenP) -> Result<T> {
    x.ensure_square()?;
    if p == SchattenP::Finite(0) {
        return Err(Error::param("p", "Schatten order must be positive"));
    }
    let scale = x.max_abs().max(T::one());
    let s: Vec<T> = if x.hermitian_deviation() <= T::epsilon() * scale * T::lit(16.0) {
        eigvalsh(x)?.into_iter().map(T::abs).collect()
    } else {
        singular_values(x)?
    };
    Ok(match p {
        SchattenP::Infinity => s.into_iter().fold(T::zero(), T::max),
        SchattenP::Finite(1) => s.into_iter().sum(),
        SchattenP::Finite(k) => {
            let k = T::lit(k as f64);
            s.into_iter().map(|v| v.powf(k)).sum::<T>().powf(T::one() / k)
        }
    })
}

/// Trace norm of a Hermitian matrix as the sum of absolute eigenvalues.
pub fn trace_norm_hermitian<T: Real>(x: &ComplexMatrix<T>) -> Result<T> {
    Ok(eigvalsh(x)?.into_iter().map(T::abs).sum())
}

/// `‖A − B‖₁` for Hermitian `A`, `B`.
pub fn trace_distance_matrices<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    trace_norm_hermitian(&(a - b))
}

/// Splits a Hermitian `X` into `X₊ − X₋` with orthogonal PSD parts.
pub fn orthogonal_decomposition<T: Real>(
    x: &ComplexMatrix<T>,
) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    x.ensure_square()?;
    let deviation = x.hermitian_deviation();
    if deviation > T::tol(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            deviation: deviation.to_f64_lossy(),
        });
    }
    let e = hermitian_eigen(x)?;
    let plus = e.reconstruct_with(|l| l.max(T::zero()));
    let minus = e.reconstruct_with(|l| (-l).max(T::zero()));
    Ok((plus, minus))
}

/// Projector onto the span of eigenvectors whose eigenvalue is at least `threshold`.
pub fn spectral_projector<T: Real>(x: &ComplexMatrix<T>, threshold: T) -> Result<ComplexMatrix<T>> {
    let e = hermitian_eigen(x)?;
    Ok(e.reconstruct_with(|l| if l >= threshold { T::one() } else { T::zero() }))
}

/// Kronecker product `A ⊗ B`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of vectors.
pub fn kron_vec<T: Real>(u: &[C<T>], v: &[C<T>]) -> Vec<C<T>> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect()
}

/// Which tensor factor of `H₁ ⊗ H₂` to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace over one factor of a bipartite operator on `C^{d₁} ⊗ C^{d₂}`.
pub fn partial_trace<T: Real>(
    x: &ComplexMatrix<T>,
    (d1, d2): (usize, usize),
    which: Subsystem,
) -> Result<ComplexMatrix<T>> {
    if d1 == 0 || d2 == 0 || !x.is_square() || x.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator does not factor as {d1}x{d2}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(match which {
        Subsystem::Second => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| x[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Subsystem::First => ComplexMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| x[(k * d2 + i, k * d2 + j)]).sum()
        }),
    })
}

/// Column-major vectorization, so that `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
pub fn vectorize<T: Real>(x: &ComplexMatrix<T>) -> Vec<C<T>> {
    (0..x.cols())
        .flat_map(|j| (0..x.rows()).map(move |i| x[(i, j)]))
        .collect()
}

/// Inverse of [`vectorize`].
pub fn unvectorize<T: Real>(v: &[C<T>], rows: usize, cols: usize) -> ComplexMatrix<T> {
    assert_eq!(v.len(), rows * cols, "vector length does not match shape");
    ComplexMatrix::from_fn(rows, cols, |i, j| v[j * rows + i])
}

/// Orthonormal basis of the (numerical) kernel of `a`.
///
/// Singular values `≤ rel_tol · σ_max` count as zero; an all-zero matrix has
/// the whole space as kernel.
pub fn null_space<T: Real>(a: &ComplexMatrix<T>, rel_tol: T) -> Result<Vec<Vec<C<T>>>> {
    let gram = a.adjoint().matmul(a);
    null_space_of_gram(&gram, rel_tol)
}

/// Kernel of a PSD Gram matrix `A†A` given directly.
pub fn null_space_of_gram<T: Real>(gram: &ComplexMatrix<T>, rel_tol: T) -> Result<Vec<Vec<C<T>>>> {
    let e = hermitian_eigen(gram)?;
    let top = e.max().max(T::zero());
    let cutoff = (rel_tol * rel_tol * top).max(T::min_positive_value());
    Ok((0..e.values.len())
        .filter(|&k| e.values[k] <= cutoff)
        .map(|k| e.vector(k))
        .collect())
}

/// Incrementally built orthonormal basis (modified Gram-Schmidt with one
/// re-orthogonalization pass).
#[derive(Debug, Clone)]
pub struct OrthonormalBasis<T> {
    vectors: Vec<Vec<C<T>>>,
    rank_tol: T,
}

impl<T: Real> OrthonormalBasis<T> {
    pub fn new(rank_tol: T) -> Self {
        Self {
            vectors: Vec::new(),
            rank_tol,
        }
    }

    /// Adds `v` if its normalized component outside the current span exceeds
    /// the rank tolerance. Returns whether the basis grew.
    pub fn try_push(&mut self, v: &[C<T>]) -> bool {
        let norm = vector_norm(v);
        if norm == T::zero() {
            return false;
        }
        let mut w: Vec<C<T>> = v.iter().map(|z| *z / norm).collect();
        for _ in 0..2 {
            for b in &self.vectors {
                let proj = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi = *wi - *bi * proj;
                }
            }
        }
        let rest = vector_norm(&w);
        if rest <= self.rank_tol {
            return false;
        }
        for wi in &mut w {
            *wi = *wi / rest;
        }
        self.vectors.push(w);
        true
    }

    /// Norm of the component of `v` orthogonal to the span.
    pub fn residual(&self, v: &[C<T>]) -> T {
        let mut w = v.to_vec();
        for b in &self.vectors {
            let proj = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi = *wi - *bi * proj;
            }
        }
        vector_norm(&w)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C<T>>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vec<C<T>>> {
        self.vectors
    }
}
