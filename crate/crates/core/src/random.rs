//! Seeded sampling of states, unitaries and channels.
//!
//! Mixed states follow the Hilbert-Schmidt measure (`GG†/tr GG†` for a
//! complex Ginibre matrix `G`), unitaries the Haar measure (Gram-Schmidt on
//! Ginibre columns, which fixes the phases of the triangular factor), and
//! random channels are cut from a Haar isometry. Every draw is a pure
//! function of the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::QuantumChannel;
use crate::linalg::{vector_norm, ComplexMatrix, OrthonormalBasis};
use crate::scalar::{c, Real, C};
use crate::states::DensityOperator;

/// Deterministic random source.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` under `seed`; used to give every
    /// multistart restart its own generator.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform draw from `[lo, hi)`; a degenerate range returns `lo` without
    /// advancing the generator.
    pub fn uniform<T: Real>(&mut self, lo: f64, hi: f64) -> T {
        if lo == hi {
            return T::lit(lo);
        }
        T::lit(self.rng.random_range(lo..hi))
    }

    pub fn gaussian<T: Real>(&mut self) -> T {
        T::lit(self.rng.sample::<f64, _>(StandardNormal))
    }

    /// Standard complex Gaussian, `E|z|² = 1`.
    pub fn complex_gaussian<T: Real>(&mut self) -> C<T> {
        let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        c(self.gaussian::<T>() * h, self.gaussian::<T>() * h)
    }

    pub fn ginibre<T: Real>(&mut self, rows: usize, cols: usize) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    /// Haar-random unit vector.
    pub fn pure<T: Real>(&mut self, d: usize) -> Vec<C<T>> {
        loop {
            let v: Vec<C<T>> = (0..d).map(|_| self.complex_gaussian()).collect();
            let n = vector_norm(&v);
            if n > T::lit(1e-6) {
                return v.into_iter().map(|z| z / n).collect();
            }
        }
    }

    /// Haar-random unitary.
    pub fn unitary<T: Real>(&mut self, d: usize) -> ComplexMatrix<T> {
        self.isometry(d, d)
    }

    /// Haar-random isometry with `rows ≥ cols` (first `cols` columns of a Haar unitary).
    pub fn isometry<T: Real>(&mut self, rows: usize, cols: usize) -> ComplexMatrix<T> {
        assert!(rows >= cols, "isometry needs rows >= cols");
        loop {
            let g = self.ginibre::<T>(rows, cols);
            let mut basis = OrthonormalBasis::new(T::lit(1e-6));
            if (0..cols).all(|j| basis.try_push(&g.column(j))) {
                let mut q = ComplexMatrix::zeros(rows, cols);
                for (j, v) in basis.vectors().iter().enumerate() {
                    q.set_column(j, v);
                }
                return q;
            }
        }
    }

    /// Hilbert-Schmidt random density operator.
    pub fn state<T: Real>(&mut self, d: usize) -> DensityOperator<T> {
        let g = self.ginibre::<T>(d, d);
        let w = g.matmul(&g.adjoint());
        let tr = w.trace().re;
        DensityOperator::from_trusted(w.scale_real(T::one() / tr))
    }

    pub fn pure_state<T: Real>(&mut self, d: usize) -> DensityOperator<T> {
        let v = self.pure(d);
        DensityOperator::from_trusted(ComplexMatrix::outer(&v, &v))
    }

    /// Random CPTP map with `kraus_rank` Kraus operators cut from a Haar isometry.
    pub fn channel<T: Real>(&mut self, d: usize, kraus_rank: usize) -> QuantumChannel<T> {
        let v = self.isometry::<T>(d * kraus_rank, d);
        let kraus = (0..kraus_rank)
            .map(|k| ComplexMatrix::from_fn(d, d, |i, j| v[(k * d + i, j)]))
            .collect();
        QuantumChannel::from_kraus(d, kraus).expect("isometry blocks form a channel")
    }

    /// Random strictly contractive unital qubit channel `U T_v V` with `max|v_i| ≤ vmax`.
    pub fn unital_qubit_channel<T: Real>(&mut self, vmax: f64) -> QuantumChannel<T> {
        loop {
            let v = [
                self.uniform::<T>(-vmax, vmax),
                self.uniform::<T>(-vmax, vmax),
                self.uniform::<T>(-vmax, vmax),
            ];
            let form = crate::channels::QubitCanonicalForm {
                u: self.unitary(2),
                v_mat: self.unitary(2),
                v,
                t: [T::zero(); 3],
            };
            if let Ok(ch) = crate::channels::qubit_canonical(&form) {
                return ch;
            }
        }
    }

    /// Random (generally non-unital) qubit channel in canonical form with
    /// `max|v_i| ≤ vmax`, rejection-sampled until completely positive.
    pub fn canonical_qubit_form<T: Real>(&mut self, vmax: f64, tmax: f64) -> crate::channels::QubitCanonicalForm<T> {
        loop {
            let form = crate::channels::QubitCanonicalForm {
                u: self.unitary(2),
                v_mat: self.unitary(2),
                v: [
                    self.uniform::<T>(-vmax, vmax),
                    self.uniform::<T>(-vmax, vmax),
                    self.uniform::<T>(-vmax, vmax),
                ],
                t: [
                    self.uniform::<T>(-tmax, tmax),
                    self.uniform::<T>(-tmax, tmax),
                    self.uniform::<T>(-tmax, tmax),
                ],
            };
            if crate::channels::qubit_canonical(&form).is_ok() {
                return form;
            }
        }
    }

    /// Random effect `0 ≤ F ≤ I`: Haar eigenbasis with uniform eigenvalues in `[0, 1]`.
    pub fn effect<T: Real>(&mut self, d: usize) -> ComplexMatrix<T> {
        let u = self.unitary::<T>(d);
        let diag: Vec<T> = (0..d).map(|_| self.uniform::<T>(0.0, 1.0)).collect();
        u.matmul(&ComplexMatrix::from_real_diag(&diag)).matmul(&u.adjoint())
    }
}

/// Hilbert-Schmidt random state of dimension `d`.
pub fn random_state<T: Real>(d: usize, seed: u64) -> DensityOperator<T> {
    Sampler::new(seed).state(d)
}

/// Haar-random `d×d` unitary.
pub fn random_unitary<T: Real>(d: usize, seed: u64) -> ComplexMatrix<T> {
    Sampler::new(seed).unitary(d)
}

/// Haar-random unit vector in `C^d`.
pub fn random_pure<T: Real>(d: usize, seed: u64) -> Vec<C<T>> {
    Sampler::new(seed).pure(d)
}
