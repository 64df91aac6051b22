//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, reducing the
//! 2x2 block to a real symmetric one, then applies the classical stable
//! Jacobi rotation. Quadratically convergent; adequate for the small
//! dimensions this crate targets.

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::Result;
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }

    /// Rebuilds `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == T::zero() {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }
}

/// Eigendecomposition of the Hermitian part `(H + H†)/2` of a square matrix.
pub fn hermitian_eigen<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    h.ensure_square()?;
    let n = h.dim();
    let mut a = h.hermitize();
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
    }
    let mut v = ComplexMatrix::<T>::identity(n);

    let scale = a.frobenius_norm();
    if scale == T::zero() {
        return Ok(HermitianEigen {
            values: vec![T::zero(); n],
            vectors: v,
        });
    }
    let threshold = T::epsilon() * scale;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, threshold);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize, threshold: T) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b <= threshold * T::lit(1e-3) {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / b; // e^{iφ}

    let zeta = (aqq - app) / (b + b);
    let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
    let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
    let cos = T::one() / (T::one() + t * t).sqrt();
    let sin = t * cos;

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on (p, q)
    let g00 = Complex::new(cos, T::zero());
    let g01 = Complex::new(sin, T::zero());
    let g10 = -phase.conj() * sin;
    let g11 = phase.conj() * cos;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g00 + akq * g10;
        a[(k, q)] = akp * g01 + akq * g11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g00.conj() * apk + g10.conj() * aqk;
        a[(q, k)] = g01.conj() * apk + g11.conj() * aqk;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g00 + vkq * g10;
        v[(k, q)] = vkp * g01 + vkq * g11;
    }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(hermitian_eigen(h)?.values)
}
