//! Quantum channels in Kraus form: construction, validation, application,
//! canonical families, combinators, and the superoperator / Choi pictures.
//!
//! A channel stores an operator-sum `T(X) = Σ wᵢ KᵢXKᵢ†` with `wᵢ = ±1`.
//! Honest Kraus sets have every weight `+1`; negative weights let
//! Hermiticity-preserving maps that are not completely positive (the
//! transpose, for instance) be loaded and inspected. Such maps are flagged
//! at construction and refused by analysis routines.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, vectorize, unvectorize, ComplexMatrix, PSD_TOL};
use crate::scalar::{c, cr, Real, C};
use crate::states::{pauli, DensityOperator};

/// Tolerance on `Σ K†K = I` (and `Σ KK† = I` for unitality).
pub const TP_TOL: f64 = 1e-8;
/// Kraus operators with Frobenius norm below this are dropped.
pub const KRAUS_DROP_TOL: f64 = 1e-12;
/// Tolerance on mixture weights summing to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Closed-form metadata carried by channels built from known families.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure<T> {
    General,
    /// Depolarizing channel `D_p` in any dimension.
    Depolarizing { p: T },
    /// Conjugation by a unitary (includes the identity channel).
    Unitary,
    /// Replacement channel `ρ ↦ σ`.
    Constant,
    /// Tensor product of two unital qubit channels, with the Bloch
    /// representation of each factor.
    UnitalQubitTensor { factors: Vec<BlochAffine<T>> },
}

/// Operator-sum representation with validation flags.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel<T> {
    dim: usize,
    kraus: Vec<ComplexMatrix<T>>,
    weights: Vec<T>,
    trace_preserving: bool,
    unital: bool,
    choi_min_eigenvalue: T,
    structure: Structure<T>,
}

impl<T: Real> QuantumChannel<T> {
    /// Channel `X ↦ Σ KᵢXKᵢ†`; flags are computed, not enforced.
    pub fn from_kraus(dim: usize, kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let weights = vec![T::one(); kraus.len()];
        Self::from_weighted_kraus(dim, kraus, weights)
    }

    /// Map `X ↦ Σ wᵢ KᵢXKᵢ†` with real weights. Positive weights are folded
    /// into the operators as `√wᵢ`; negative ones keep a `−1` sign.
    pub fn from_weighted_kraus(dim: usize, kraus: Vec<ComplexMatrix<T>>, weights: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be positive"));
        }
        if kraus.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} Kraus operators but {} weights",
                kraus.len(),
                weights.len()
            )));
        }
        let mut ops = Vec::with_capacity(kraus.len());
        let mut signs = Vec::with_capacity(kraus.len());
        for (k, (op, w)) in kraus.into_iter().zip(weights).enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
            if !op.is_finite() || !w.is_finite() {
                return Err(Error::NonFinite);
            }
            if w == T::zero() {
                continue;
            }
            let scaled = op.scale_real(w.abs().sqrt());
            if scaled.frobenius_norm() < T::lit(KRAUS_DROP_TOL) {
                continue;
            }
            ops.push(scaled);
            signs.push(if w > T::zero() { T::one() } else { -T::one() });
        }
        if ops.is_empty() {
            return Err(Error::param("kraus", "no nonzero Kraus operators"));
        }
        Ok(Self::assemble(dim, ops, signs, Structure::General))
    }

    fn assemble(dim: usize, kraus: Vec<ComplexMatrix<T>>, weights: Vec<T>, structure: Structure<T>) -> Self {
        let id = ComplexMatrix::identity(dim);
        let mut left = ComplexMatrix::zeros(dim, dim);
        let mut right = ComplexMatrix::zeros(dim, dim);
        for (k, &w) in kraus.iter().zip(&weights) {
            left += &k.adjoint().matmul(k).scale_real(w);
            right += &k.matmul(&k.adjoint()).scale_real(w);
        }
        let tol = T::tol(TP_TOL);
        let mut ch = Self {
            dim,
            kraus,
            weights,
            trace_preserving: left.max_abs_diff(&id) <= tol,
            unital: right.max_abs_diff(&id) <= tol,
            choi_min_eigenvalue: T::zero(),
            structure,
        };
        ch.choi_min_eigenvalue = hermitian_eigen(&ch.choi_matrix())
            .map(|e| e.min())
            .unwrap_or(T::neg_infinity());
        ch
    }

    fn with_structure(mut self, structure: Structure<T>) -> Self {
        self.structure = structure;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    /// Signs of the operator-sum terms (`+1` for every term of a CP map built from Kraus operators).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn choi_min_eigenvalue(&self) -> T {
        self.choi_min_eigenvalue
    }

    pub fn is_completely_positive(&self) -> bool {
        self.choi_min_eigenvalue >= -T::tol(PSD_TOL)
    }

    pub fn is_cptp(&self) -> bool {
        self.trace_preserving && self.is_completely_positive()
    }

    pub fn structure(&self) -> &Structure<T> {
        &self.structure
    }

    /// Fails unless the map is completely positive and trace preserving.
    pub fn ensure_cptp(&self) -> Result<()> {
        if !self.is_completely_positive() {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: self.choi_min_eigenvalue.to_f64_lossy(),
            });
        }
        if !self.trace_preserving {
            let mut left = ComplexMatrix::zeros(self.dim, self.dim);
            for (k, &w) in self.kraus.iter().zip(&self.weights) {
                left += &k.adjoint().matmul(k).scale_real(w);
            }
            return Err(Error::NotTracePreserving {
                deviation: left.max_abs_diff(&ComplexMatrix::identity(self.dim)).to_f64_lossy(),
            });
        }
        Ok(())
    }

    fn check_operator(&self, x: &ComplexMatrix<T>) -> Result<()> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel acts on dimension {}, operator is {}x{}",
                self.dim,
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// `Σ wᵢ KᵢXKᵢ†` for an arbitrary operator.
    pub fn apply_operator(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.check_operator(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, &w) in self.kraus.iter().zip(&self.weights) {
            out += &k.sandwich(x).scale_real(w);
        }
        out
    }

    /// Heisenberg-picture dual `Σ wᵢ Kᵢ†XKᵢ`.
    pub fn apply_adjoint(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.check_operator(x)?;
        Ok(self.apply_adjoint_unchecked(x))
    }

    pub(crate) fn apply_adjoint_unchecked(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, &w) in self.kraus.iter().zip(&self.weights) {
            out += &k.adjoint().sandwich(x).scale_real(w);
        }
        out
    }

    /// Applies a validated channel to a state.
    pub fn apply(&self, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
        self.ensure_cptp()?;
        self.check_operator(rho.matrix())?;
        Ok(DensityOperator::from_trusted(self.apply_unchecked(rho.matrix())))
    }

    /// `Tⁿρ`.
    pub fn apply_n(&self, rho: &DensityOperator<T>, n: usize) -> Result<DensityOperator<T>> {
        let mut out = rho.clone();
        for _ in 0..n {
            out = self.apply(&out)?;
        }
        Ok(out)
    }

    /// Matrix of the map on column-major vectorized operators: `Σ wᵢ conj(Kᵢ) ⊗ Kᵢ`.
    pub fn to_superoperator(&self) -> Superoperator<T> {
        let d2 = self.dim * self.dim;
        let mut m = ComplexMatrix::zeros(d2, d2);
        for (k, &w) in self.kraus.iter().zip(&self.weights) {
            m += &kron(&k.conj(), k).scale_real(w);
        }
        Superoperator { dim: self.dim, matrix: m }
    }

    /// Choi matrix `Σ_ij T(|i⟩⟨j|) ⊗ |i⟩⟨j|`, PSD iff the map is completely positive.
    pub fn choi_matrix(&self) -> ComplexMatrix<T> {
        let d2 = self.dim * self.dim;
        let mut m = ComplexMatrix::zeros(d2, d2);
        for (k, &w) in self.kraus.iter().zip(&self.weights) {
            // row-major flattening of K indexes the Choi matrix as (a·d + i)
            let v = k.as_slice();
            m += &ComplexMatrix::outer(v, v).scale_real(w);
        }
        m
    }

    /// Bloch representation `r ↦ M r + t` of a trace-preserving qubit map.
    pub fn bloch_affine(&self) -> Result<BlochAffine<T>> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Bloch representation needs a qubit channel, got dimension {}",
                self.dim
            )));
        }
        let half = T::lit(0.5);
        let image_of_identity = self.apply_unchecked(&pauli(0));
        let mut matrix = [[T::zero(); 3]; 3];
        let mut shift = [T::zero(); 3];
        for k in 0..3 {
            shift[k] = pauli::<T>(k + 1).hs_inner(&image_of_identity).re * half;
            for l in 0..3 {
                let image = self.apply_unchecked(&pauli(l + 1));
                matrix[k][l] = pauli::<T>(k + 1).hs_inner(&image).re * half;
            }
        }
        Ok(BlochAffine { matrix, shift })
    }

    /// Builds a channel from a Choi matrix `Σ_ij T(|i⟩⟨j|) ⊗ |i⟩⟨j|`,
    /// rejecting it when not positive semidefinite.
    pub fn from_choi(dim: usize, choi: &ComplexMatrix<T>) -> Result<Self> {
        if choi.rows() != dim * dim || choi.cols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of a dimension-{dim} map must be {0}x{0}",
                dim * dim
            )));
        }
        let e = hermitian_eigen(choi)?;
        if e.min() < -T::tol(PSD_TOL) {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: e.min().to_f64_lossy(),
            });
        }
        let kraus = (0..e.values.len())
            .rev()
            .filter(|&k| e.values[k] > T::zero())
            .map(|k| {
                let v = e.vector(k);
                let s = e.values[k].sqrt();
                ComplexMatrix::from_fn(dim, dim, |a, i| v[a * dim + i] * s)
            })
            .collect();
        Self::from_kraus(dim, kraus)
    }

    pub fn cast<U: Real>(&self) -> QuantumChannel<U> {
        let kraus = self.kraus.iter().map(ComplexMatrix::cast).collect();
        let weights = self.weights.iter().map(|w| U::lit(w.to_f64_lossy())).collect();
        let structure = match &self.structure {
            Structure::General => Structure::General,
            Structure::Depolarizing { p } => Structure::Depolarizing { p: U::lit(p.to_f64_lossy()) },
            Structure::Unitary => Structure::Unitary,
            Structure::Constant => Structure::Constant,
            Structure::UnitalQubitTensor { factors } => Structure::UnitalQubitTensor {
                factors: factors.iter().map(BlochAffine::cast).collect(),
            },
        };
        QuantumChannel::assemble(self.dim, kraus, weights, structure)
    }
}

/// Affine action `r ↦ M r + t` of a qubit channel on Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAffine<T> {
    pub matrix: [[T; 3]; 3],
    pub shift: [T; 3],
}

impl<T: Real> BlochAffine<T> {
    /// Singular values of the Bloch matrix, descending.
    pub fn scalings(&self) -> [T; 3] {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| cr(self.matrix[i][j]));
        let s = crate::linalg::singular_values(&m).expect("3x3 is square");
        [s[0], s[1], s[2]]
    }

    pub fn cast<U: Real>(&self) -> BlochAffine<U> {
        let conv = |x: &T| U::lit(x.to_f64_lossy());
        BlochAffine {
            matrix: self.matrix.map(|row| row.map(|x| conv(&x))),
            shift: self.shift.map(|x| conv(&x)),
        }
    }

    /// Image of the Bloch vector `r`.
    pub fn apply(&self, r: [T; 3]) -> [T; 3] {
        std::array::from_fn(|k| self.shift[k] + (0..3).map(|l| self.matrix[k][l] * r[l]).sum::<T>())
    }

    /// Right singular vector for the largest singular value.
    pub(crate) fn top_direction(&self) -> [T; 3] {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| cr(self.matrix[i][j]));
        let e = hermitian_eigen(&m.adjoint().matmul(&m)).expect("3x3 is square");
        let v = e.vector(2);
        // eigenvector of a real symmetric matrix; strip the global phase
        let pivot = v.iter().copied().fold(C::zero(), |best: C<T>, z| if z.norm() > best.norm() { z } else { best });
        let phase = if pivot.norm() > T::zero() { pivot.conj() / pivot.norm() } else { C::one() };
        let r: Vec<T> = v.iter().map(|z| (*z * phase).re).collect();
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        [r[0] / n, r[1] / n, r[2] / n]
    }
}

/// Linear map on `d²`-dimensional column-major vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator<T> {
    dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn new(dim: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on dimension {dim} must be {0}x{0}",
                dim * dim
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperator acts on dimension {}, operator is {}x{}",
                self.dim,
                x.rows(),
                x.cols()
            )));
        }
        let v = self.matrix.mul_vec(&vectorize(x));
        Ok(unvectorize(&v, self.dim, self.dim))
    }

    /// `self − other`, e.g. `S = T − id`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("superoperator dimensions differ".into()));
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
        })
    }
}

/// Identity channel on `C^d`.
pub fn identity<T: Real>(d: usize) -> Result<QuantumChannel<T>> {
    Ok(QuantumChannel::from_kraus(d, vec![ComplexMatrix::identity(d)])?.with_structure(Structure::Unitary))
}

/// Depolarizing channel `ρ ↦ p I/d + (1 − p)ρ`, `p ∈ [0, 1]`.
///
/// Qubits use the Pauli Kraus set; larger dimensions use the Weyl
/// (clock-and-shift) operators.
pub fn depolarizing<T: Real>(d: usize, p: T) -> Result<QuantumChannel<T>> {
    if d == 0 {
        return Err(Error::param("dim", "dimension must be positive"));
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::param("p", format!("depolarizing parameter {p} outside [0, 1]")));
    }
    let dd = T::lit((d * d) as f64);
    let mut kraus = vec![ComplexMatrix::identity(d).scale_real((T::one() - p + p / dd).sqrt())];
    let weight = (p / dd).sqrt();
    if d == 2 {
        kraus.extend((1..4).map(|k| pauli::<T>(k).scale_real(weight)));
    } else {
        for a in 0..d {
            for b in 0..d {
                if (a, b) != (0, 0) {
                    kraus.push(weyl(d, a, b).scale_real(weight));
                }
            }
        }
    }
    Ok(QuantumChannel::from_kraus(d, kraus)?.with_structure(Structure::Depolarizing { p }))
}

/// Weyl operator `X^a Z^b` on `C^d`.
pub fn weyl<T: Real>(d: usize, a: usize, b: usize) -> ComplexMatrix<T> {
    let omega = T::TAU() / T::lit(d as f64);
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + a) % d {
            let phase = omega * T::lit(((b * j) % d) as f64);
            c(phase.cos(), phase.sin())
        } else {
            C::zero()
        }
    })
}

/// `ρ ↦ UρU†`.
pub fn unitary_channel<T: Real>(u: &ComplexMatrix<T>) -> Result<QuantumChannel<T>> {
    u.ensure_unitary(T::tol(1e-10))?;
    Ok(QuantumChannel::from_kraus(u.rows(), vec![u.clone()])?.with_structure(Structure::Unitary))
}

/// Replacement channel `ρ ↦ σ` with Kraus set `{√λᵢ |vᵢ⟩⟨j|}`.
pub fn constant_channel<T: Real>(sigma: &DensityOperator<T>) -> Result<QuantumChannel<T>> {
    let d = sigma.dim();
    let e = hermitian_eigen(sigma.matrix())?;
    let mut kraus = Vec::new();
    for (k, &lambda) in e.values.iter().enumerate() {
        if lambda <= T::zero() {
            continue;
        }
        let v = e.vector(k);
        let s = lambda.sqrt();
        for j in 0..d {
            kraus.push(ComplexMatrix::from_fn(d, d, |a, b| if b == j { v[a] * s } else { C::zero() }));
        }
    }
    Ok(QuantumChannel::from_kraus(d, kraus)?.with_structure(Structure::Constant))
}

/// Amplitude damping with decay probability `γ ∈ [0, 1]`.
pub fn amplitude_damping<T: Real>(gamma: T) -> Result<QuantumChannel<T>> {
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::param("gamma", format!("damping probability {gamma} outside [0, 1]")));
    }
    let k0 = ComplexMatrix::from_real_diag(&[T::one(), (T::one() - gamma).sqrt()]);
    let mut k1 = ComplexMatrix::zeros(2, 2);
    k1[(0, 1)] = cr(gamma.sqrt());
    QuantumChannel::from_kraus(2, vec![k0, k1])
}

/// Qubit channel `ρ ↦ U[T_{v,t}(VρV†)]U†` where
/// `T_{v,t}(w₀I + w·ς) = w₀I + (w₀t + diag(v)w)·ς`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitCanonicalForm<T> {
    pub u: ComplexMatrix<T>,
    pub v_mat: ComplexMatrix<T>,
    pub v: [T; 3],
    pub t: [T; 3],
}

impl<T: Real> QubitCanonicalForm<T> {
    /// Form with `U = V = I`.
    pub fn diagonal(v: [T; 3], t: [T; 3]) -> Self {
        Self {
            u: ComplexMatrix::identity(2),
            v_mat: ComplexMatrix::identity(2),
            v,
            t,
        }
    }
}

/// Assembles a canonical-form qubit map, rejecting it when the Choi matrix
/// has a negative eigenvalue.
pub fn qubit_canonical<T: Real>(form: &QubitCanonicalForm<T>) -> Result<QuantumChannel<T>> {
    form.u.ensure_unitary(T::tol(1e-10))?;
    form.v_mat.ensure_unitary(T::tol(1e-10))?;
    if form.u.rows() != 2 || form.v_mat.rows() != 2 {
        return Err(Error::DimensionMismatch("canonical form unitaries must be 2x2".into()));
    }
    let half = T::lit(0.5);
    let core_map = |x: &ComplexMatrix<T>| -> ComplexMatrix<T> {
        let w0 = x.trace() * half;
        let mut out = pauli::<T>(0).scale(w0);
        for k in 0..3 {
            let wk = pauli::<T>(k + 1).hs_inner(x) * half;
            out += &pauli::<T>(k + 1).scale(w0 * form.t[k] + wk * form.v[k]);
        }
        out
    };
    let mut choi = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(i, j)] = C::one();
            let image = form.u.sandwich(&core_map(&form.v_mat.sandwich(&e)));
            choi += &kron(&image, &e);
        }
    }
    QuantumChannel::from_choi(2, &choi)
}

/// `outer ∘ inner`: Kraus set `{KᵢLⱼ}`.
pub fn compose<T: Real>(outer: &QuantumChannel<T>, inner: &QuantumChannel<T>) -> Result<QuantumChannel<T>> {
    if outer.dim != inner.dim {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose channels of dimension {} and {}",
            outer.dim, inner.dim
        )));
    }
    let mut kraus = Vec::new();
    let mut weights = Vec::new();
    for (k, &wk) in outer.kraus.iter().zip(&outer.weights) {
        for (l, &wl) in inner.kraus.iter().zip(&inner.weights) {
            kraus.push(k.matmul(l));
            weights.push(wk * wl);
        }
    }
    let structure = match (&outer.structure, &inner.structure) {
        (Structure::Unitary, Structure::Unitary) => Structure::Unitary,
        (_, Structure::Constant) if outer.is_cptp() => Structure::Constant,
        _ => Structure::General,
    };
    Ok(QuantumChannel::from_weighted_kraus(outer.dim, kraus, weights)?.with_structure(structure))
}

/// Convex mixture `Σ λᵢ Tᵢ`: weights nonnegative and summing to one.
pub fn mix<T: Real>(components: &[(T, &QuantumChannel<T>)]) -> Result<QuantumChannel<T>> {
    let first = components
        .first()
        .ok_or_else(|| Error::param("components", "empty mixture"))?;
    let dim = first.1.dim;
    let mut total = T::zero();
    let mut kraus = Vec::new();
    let mut weights = Vec::new();
    for (lambda, ch) in components {
        if ch.dim != dim {
            return Err(Error::DimensionMismatch("mixture components differ in dimension".into()));
        }
        if !(*lambda >= T::zero()) {
            return Err(Error::param("weights", format!("negative mixture weight {lambda}")));
        }
        total = total + *lambda;
        for (k, &w) in ch.kraus.iter().zip(&ch.weights) {
            kraus.push(k.clone());
            weights.push(w * *lambda);
        }
    }
    if (total - T::one()).abs() > T::tol(WEIGHT_SUM_TOL) {
        return Err(Error::param("weights", format!("mixture weights sum to {total}, expected 1")));
    }
    QuantumChannel::from_weighted_kraus(dim, kraus, weights)
}

/// `T ⊗ S`: Kraus set `{Kᵢ ⊗ Lⱼ}`.
pub fn tensor<T: Real>(a: &QuantumChannel<T>, b: &QuantumChannel<T>) -> Result<QuantumChannel<T>> {
    let mut kraus = Vec::new();
    let mut weights = Vec::new();
    for (k, &wk) in a.kraus.iter().zip(&a.weights) {
        for (l, &wl) in b.kraus.iter().zip(&b.weights) {
            kraus.push(kron(k, l));
            weights.push(wk * wl);
        }
    }
    let unital_qubit = |ch: &QuantumChannel<T>| ch.dim == 2 && ch.unital && ch.is_cptp();
    let structure = if unital_qubit(a) && unital_qubit(b) {
        Structure::UnitalQubitTensor {
            factors: vec![a.bloch_affine()?, b.bloch_affine()?],
        }
    } else {
        Structure::General
    };
    Ok(QuantumChannel::from_weighted_kraus(a.dim * b.dim, kraus, weights)?.with_structure(structure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;
    use crate::states::{basis_state, bloch_operator, maximally_mixed, trace_norm_distance};
    use proptest::prelude::*;

    type Ch = QuantumChannel<f64>;
    type M = ComplexMatrix<f64>;

    fn bloch_state(r: [f64; 3]) -> M {
        bloch_operator(1.0, r)
    }

    fn transpose_map() -> Ch {
        let h = 0.5f64.sqrt();
        Ch::from_weighted_kraus(
            2,
            (0..4).map(|k| pauli::<f64>(k).scale_real(h)).collect(),
            vec![1.0, 1.0, -1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        let rho = Sampler::new(1).state::<f64>(2);
        let id = identity::<f64>(2).unwrap();
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let d = depolarizing(2, 0.3).unwrap();
        let out = d.apply(&basis_state(2, 0).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(&M::from_real_diag(&[0.85, 0.15])) < 1e-15);

        let flip = unitary_channel(&pauli::<f64>(1)).unwrap();
        let out = flip.apply(&basis_state(2, 0).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(basis_state::<f64>(2, 1).unwrap().matrix()) < 1e-15);

        assert!(d.apply(&maximally_mixed(3).unwrap()).is_err());
    }

    #[test]
    fn depolarizing_examples() {
        for d in [2, 3, 4] {
            let ch = depolarizing(d, 0.37).unwrap();
            assert!(ch.is_cptp() && ch.is_unital());
            let mixed = maximally_mixed::<f64>(d).unwrap();
            assert!(ch.apply(&mixed).unwrap().matrix().max_abs_diff(mixed.matrix()) < 1e-14);
            // traceless operators shrink by (1 - p)
            let x = weyl::<f64>(d, 1, 1);
            let out = ch.apply_operator(&x).unwrap();
            assert!(out.max_abs_diff(&x.scale_real(0.63)) < 1e-14);
        }
        let ch = depolarizing(2, 0.1).unwrap();
        let z = pauli::<f64>(3);
        assert!(ch.apply_operator(&z).unwrap().max_abs_diff(&z.scale_real(0.9)) < 1e-15);
        assert!((ch.kraus()[0][(0, 0)].re - (1.0f64 - 0.075).sqrt()).abs() < 1e-15);
        assert!(depolarizing(2, 1.5).is_err());
        assert!(depolarizing(2, -0.1).is_err());
        assert!(depolarizing::<f64>(2, f64::NAN).is_err());
    }

    #[test]
    fn canonical_form_examples() {
        let p = 0.3;
        let form = QubitCanonicalForm::diagonal([1.0 - p; 3], [0.0; 3]);
        let ch = qubit_canonical(&form).unwrap();
        let sup = ch.to_superoperator();
        let dep = depolarizing(2, p).unwrap().to_superoperator();
        assert!(sup.matrix().max_abs_diff(dep.matrix()) < 1e-13);

        let id = qubit_canonical(&QubitCanonicalForm::diagonal([1.0; 3], [0.0; 3])).unwrap();
        assert!(id.to_superoperator().matrix().max_abs_diff(&M::identity(4)) < 1e-13);

        let constant = qubit_canonical(&QubitCanonicalForm::diagonal([0.0; 3], [0.0, 0.0, 1.0])).unwrap();
        let mut s = Sampler::new(2);
        for _ in 0..5 {
            let out = constant.apply(&s.state::<f64>(2)).unwrap();
            let r = out.bloch_vector().unwrap();
            assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12 && (r[2] - 1.0).abs() < 1e-12);
        }

        let bad = qubit_canonical(&QubitCanonicalForm::diagonal([1.0, 1.0, -1.0], [0.0; 3]));
        match bad {
            Err(Error::NotCompletelyPositive { min_eigenvalue }) => assert!(min_eigenvalue < -0.1),
            other => panic!("expected CP failure, got {other:?}"),
        }
    }

    #[test]
    fn canonical_form_with_rotations_matches_definition() {
        let mut s = Sampler::new(8);
        let form = s.canonical_qubit_form::<f64>(0.6, 0.2);
        let ch = qubit_canonical(&form).unwrap();
        let rho = s.state::<f64>(2);
        let inner = form.v_mat.sandwich(rho.matrix());
        let inner_r = crate::states::DensityOperator::new(inner).unwrap().bloch_vector().unwrap();
        let r: [f64; 3] = std::array::from_fn(|k| form.t[k] + form.v[k] * inner_r[k]);
        let want = form.u.sandwich(&bloch_state(r));
        assert!(ch.apply(&rho).unwrap().matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn constant_channel_examples() {
        let mut s = Sampler::new(4);
        let sigma = s.state::<f64>(3);
        let k = constant_channel(&sigma).unwrap();
        assert!(k.is_cptp());
        let (a, b) = (s.state(3), s.state(3));
        let (ka, kb) = (k.apply(&a).unwrap(), k.apply(&b).unwrap());
        assert!(ka.matrix().max_abs_diff(kb.matrix()) < 1e-14);
        assert!(ka.matrix().max_abs_diff(sigma.matrix()) < 1e-14);
        // pure target drops the zero-eigenvalue Kraus operators
        let pure = constant_channel(&basis_state::<f64>(2, 1).unwrap()).unwrap();
        assert_eq!(pure.kraus().len(), 2);
    }

    #[test]
    fn combinator_examples() {
        let mut s = Sampler::new(6);
        let t = s.channel::<f64>(2, 3);
        let id = identity::<f64>(2).unwrap();
        let c1 = compose(&t, &id).unwrap();
        assert!(c1.to_superoperator().matrix().max_abs_diff(t.to_superoperator().matrix()) < 1e-14);

        let sigma = s.state::<f64>(2);
        let k = constant_channel(&sigma).unwrap();
        let m = mix(&[(0.5, &id), (0.5, &k)]).unwrap();
        let rho = s.state::<f64>(2);
        let want = (rho.matrix() + sigma.matrix()).scale_real(0.5);
        assert!(m.apply(&rho).unwrap().matrix().max_abs_diff(&want) < 1e-14);
        assert!(mix(&[(0.6, &id), (0.6, &k)]).is_err());
        assert!(mix(&[(1.5, &id), (-0.5, &k)]).is_err());
        assert!(compose(&id, &identity(3).unwrap()).is_err());
    }

    #[test]
    fn tensor_depolarizing_scales_pauli_coefficients() {
        use crate::states::decompose_two_qubit;
        let (p, q) = (0.2, 0.45);
        let ch = tensor(&depolarizing(2, p).unwrap(), &depolarizing(2, q).unwrap()).unwrap();
        assert!(matches!(ch.structure(), Structure::UnitalQubitTensor { .. }));
        let mut s = Sampler::new(7);
        for _ in 0..100 {
            let rho = s.state::<f64>(4);
            let before = decompose_two_qubit(&rho).unwrap();
            let after = decompose_two_qubit(&ch.apply(&rho).unwrap()).unwrap();
            for k in 0..3 {
                assert!((after.alpha[k] - (1.0 - p) * before.alpha[k]).abs() < 1e-10);
                assert!((after.beta[k] - (1.0 - q) * before.beta[k]).abs() < 1e-10);
                for l in 0..3 {
                    let want = (1.0 - p) * (1.0 - q) * before.theta[k][l];
                    assert!((after.theta[k][l] - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn choi_and_superoperator_examples() {
        let id = identity::<f64>(2).unwrap();
        let omega = M::from_real_rows(&[
            &[1.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(id.choi_matrix().max_abs_diff(&omega) < 1e-15);

        let t = transpose_map();
        assert!(t.is_trace_preserving());
        assert!(!t.is_completely_positive());
        assert!((t.choi_min_eigenvalue() + 1.0).abs() < 1e-12);
        let evs = hermitian_eigen(&t.choi_matrix()).unwrap().values;
        for (got, want) in evs.iter().zip([-1.0, 1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let x = M::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64 - 0.25));
        assert!(t.apply_operator(&x).unwrap().max_abs_diff(&x.transpose()) < 1e-14);
        assert!(matches!(t.ensure_cptp(), Err(Error::NotCompletelyPositive { .. })));
        assert!(t.apply(&basis_state(2, 0).unwrap()).is_err());

        // D_p superoperator spectrum {1, 1-p, 1-p, 1-p}
        let sup = depolarizing(2, 0.25f64).unwrap().to_superoperator();
        let evs = hermitian_eigen(sup.matrix()).unwrap().values;
        for (got, want) in evs.iter().zip([0.75, 0.75, 0.75, 1.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn from_choi_round_trip() {
        let t = Sampler::new(12).channel::<f64>(3, 2);
        let back = Ch::from_choi(3, &t.choi_matrix()).unwrap();
        assert!(back.to_superoperator().matrix().max_abs_diff(t.to_superoperator().matrix()) < 1e-12);
    }

    #[test]
    fn bloch_affine_of_amplitude_damping() {
        let ad = amplitude_damping(0.19f64).unwrap();
        let b = ad.bloch_affine().unwrap();
        assert!((b.matrix[0][0] - 0.9).abs() < 1e-14);
        assert!((b.matrix[2][2] - 0.81).abs() < 1e-14);
        assert!((b.shift[2] - 0.19).abs() < 1e-14);
        let s = b.scalings();
        assert!((s[0] - 0.9).abs() < 1e-12 && (s[2] - 0.81).abs() < 1e-12);
    }

    #[test]
    fn single_precision_channel() {
        let ch = depolarizing::<f32>(2, 0.2).unwrap();
        assert!(ch.is_cptp());
        let out = ch.apply(&basis_state::<f32>(2, 0).unwrap()).unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.9).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn channels_contract_trace_distance(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let d = 2 + (seed % 2) as usize;
            let t = s.channel::<f64>(d, 1 + (seed % 4) as usize);
            let (rho, sigma) = (s.state(d), s.state(d));
            let before = trace_norm_distance(&rho, &sigma).unwrap();
            let after = trace_norm_distance(&t.apply(&rho).unwrap(), &t.apply(&sigma).unwrap()).unwrap();
            prop_assert!(after <= before + 1e-9);
            prop_assert!((t.apply(&rho).unwrap().matrix().trace().re - 1.0).abs() < 1e-10);
        }

        #[test]
        fn superoperator_matches_kraus_action(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let t = s.channel::<f64>(3, 2);
            let x = s.ginibre::<f64>(3, 3);
            let via_sup = t.to_superoperator().apply(&x).unwrap();
            prop_assert!(via_sup.max_abs_diff(&t.apply_operator(&x).unwrap()) < 1e-10);
        }

        #[test]
        fn kraus_unitary_freedom(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let t = s.channel::<f64>(2, 2);
            // pad to four operators and mix with a 4x4 unitary
            let mut ops = t.kraus().to_vec();
            ops.extend([M::zeros(2, 2), M::zeros(2, 2)]);
            let v = s.unitary::<f64>(4);
            let mixed: Vec<M> = (0..4)
                .map(|i| {
                    let mut acc = M::zeros(2, 2);
                    for (mu, op) in ops.iter().enumerate() {
                        acc += &op.scale(v[(i, mu)]);
                    }
                    acc
                })
                .collect();
            let other = Ch::from_kraus(2, mixed).unwrap();
            prop_assert!(other.to_superoperator().matrix().max_abs_diff(t.to_superoperator().matrix()) < 1e-10);
        }
    }
}
