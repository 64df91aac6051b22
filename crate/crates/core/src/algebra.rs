//! Interaction algebras of channels, commutants, Wedderburn block structure,
//! noiseless subsystems and the Knill-Laflamme condition.

use num_traits::{One, Zero};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, null_space_of_gram, ComplexMatrix, OrthonormalBasis};
use crate::random::Sampler;
use crate::scalar::{c, cr, Real, C};

/// Rank tolerance for span growth (relative, on normalized residuals).
pub const RANK_TOL: f64 = 1e-9;
/// Relative singular-value cutoff when solving commutation constraints.
pub const KERNEL_TOL: f64 = 1e-7;
/// Eigenvalues of the generic central element closer than this share a block.
pub const GROUPING_TOL: f64 = 1e-7;
/// Seed of the generic central element; redrawn with successive seeds if degenerate.
pub const CENTRAL_SEED: u64 = 0x5EED;
/// Redraws allowed for a degenerate central element.
const CENTRAL_ATTEMPTS: u64 = 5;
/// Knill-Laflamme proportionality tolerance.
pub const KL_TOL: f64 = 1e-8;
/// Code basis orthonormality tolerance.
pub const CODE_BASIS_TOL: f64 = 1e-10;

/// Subalgebra of `B(C^d)` held as a Hilbert-Schmidt orthonormal basis.
#[derive(Debug, Clone)]
pub struct OperatorAlgebra<T> {
    ambient: usize,
    basis: Vec<ComplexMatrix<T>>,
}

fn flatten<T: Real>(m: &ComplexMatrix<T>) -> &[C<T>] {
    m.as_slice()
}

fn unflatten<T: Real>(v: &[C<T>], d: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

impl<T: Real> OperatorAlgebra<T> {
    /// Span of the given operators, without closing it under products.
    pub fn span(ambient: usize, elements: &[ComplexMatrix<T>]) -> Result<Self> {
        let mut basis = OrthonormalBasis::new(T::lit(RANK_TOL));
        for (k, e) in elements.iter().enumerate() {
            if e.rows() != ambient || e.cols() != ambient {
                return Err(Error::DimensionMismatch(format!(
                    "element {k} is {}x{}, expected {ambient}x{ambient}",
                    e.rows(),
                    e.cols()
                )));
            }
            basis.try_push(flatten(e));
        }
        Ok(Self::from_basis(ambient, basis))
    }

    fn from_basis(ambient: usize, basis: OrthonormalBasis<T>) -> Self {
        Self {
            ambient,
            basis: basis.into_vectors().iter().map(|v| unflatten(v, ambient)).collect(),
        }
    }

    /// `*`-algebra with identity generated by `generators`.
    pub fn generated_by(ambient: usize, generators: &[ComplexMatrix<T>]) -> Result<Self> {
        let mut seeds = vec![ComplexMatrix::identity(ambient)];
        for g in generators {
            seeds.push(g.clone());
            seeds.push(g.adjoint());
        }
        let mut alg = Self::span(ambient, &seeds)?;
        alg.close();
        Ok(alg)
    }

    /// Grows the span until it is closed under products and adjoints.
    fn close(&mut self) {
        let mut basis = OrthonormalBasis::new(T::lit(RANK_TOL));
        for b in &self.basis {
            basis.try_push(flatten(b));
        }
        let mut checked = 0;
        loop {
            let current: Vec<ComplexMatrix<T>> = basis.vectors().iter().map(|v| unflatten(v, self.ambient)).collect();
            let before = current.len();
            for (i, a) in current.iter().enumerate() {
                basis.try_push(flatten(&a.adjoint()));
                for (j, b) in current.iter().enumerate() {
                    // pairs among already-checked elements were handled in an earlier round
                    if i < checked && j < checked {
                        continue;
                    }
                    basis.try_push(flatten(&a.matmul(b)));
                }
            }
            checked = before;
            if basis.len() == before {
                break;
            }
        }
        self.basis = basis.into_vectors().iter().map(|v| unflatten(v, self.ambient)).collect();
    }

    /// Dimension `d` of the underlying Hilbert space.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension of the algebra as a vector space.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix<T>] {
        &self.basis
    }

    /// Frobenius norm of the part of `x` outside the algebra.
    pub fn residual(&self, x: &ComplexMatrix<T>) -> T {
        let mut rest = x.clone();
        for b in &self.basis {
            let coeff = b.hs_inner(x);
            rest -= &b.scale(coeff);
        }
        rest.frobenius_norm()
    }

    pub fn contains(&self, x: &ComplexMatrix<T>, tol: T) -> bool {
        self.residual(x) <= tol * x.frobenius_norm().max(T::one())
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&ComplexMatrix::identity(self.ambient), T::tol(1e-8))
    }

    /// Largest residual of adjoints and pairwise products of basis elements.
    pub fn closure_residual(&self) -> T {
        let mut worst = T::zero();
        for a in &self.basis {
            worst = worst.max(self.residual(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.residual(&a.matmul(b)));
            }
        }
        worst
    }

    pub fn is_abelian(&self) -> bool {
        let tol = T::tol(1e-8);
        self.basis
            .iter()
            .enumerate()
            .all(|(i, a)| self.basis[i + 1..].iter().all(|b| a.commutator(b).max_abs() <= tol))
    }

    /// Mutual containment of spans within `tol`.
    pub fn same_span(&self, other: &Self, tol: T) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && self.basis.iter().all(|b| other.residual(b) <= tol)
            && other.basis.iter().all(|b| self.residual(b) <= tol)
    }
}

/// Row-major matrix of `X ↦ XB − BX`, i.e. `I ⊗ Bᵀ − B ⊗ I`.
fn commutation_gram<T: Real>(d: usize, elements: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let n = d * d;
    let mut gram = ComplexMatrix::zeros(n, n);
    for b in elements {
        let id = ComplexMatrix::identity(d);
        let l = &crate::linalg::kron(&id, &b.transpose()) - &crate::linalg::kron(b, &id);
        gram += &l.adjoint().matmul(&l);
    }
    gram
}

/// `*`-algebra with identity generated by the Kraus operators of `T`.
pub fn interaction_algebra<T: Real>(channel: &QuantumChannel<T>) -> Result<OperatorAlgebra<T>> {
    channel.ensure_cptp()?;
    OperatorAlgebra::generated_by(channel.dim(), channel.kraus())
}

/// All operators commuting with every element of `alg`.
pub fn commutant<T: Real>(alg: &OperatorAlgebra<T>) -> Result<OperatorAlgebra<T>> {
    let d = alg.ambient;
    let gram = commutation_gram(d, &alg.basis);
    let kernel = if gram.max_abs() == T::zero() {
        (0..d * d)
            .map(|k| (0..d * d).map(|i| if i == k { C::one() } else { C::zero() }).collect())
            .collect()
    } else {
        null_space_of_gram(&gram, T::lit(KERNEL_TOL))?
    };
    let elements: Vec<ComplexMatrix<T>> = kernel.iter().map(|v| unflatten(v, d)).collect();
    OperatorAlgebra::span(d, &elements)
}

/// Center `A ∩ A′` of an algebra.
pub fn center<T: Real>(alg: &OperatorAlgebra<T>) -> Result<OperatorAlgebra<T>> {
    let d = alg.ambient;
    let m = alg.dim();
    // coefficient-space constraints Σ_j c_j [B_j, B_k] = 0
    let mut gram = ComplexMatrix::zeros(m, m);
    for bk in &alg.basis {
        let cols: Vec<Vec<C<T>>> = alg.basis.iter().map(|bj| bj.commutator(bk).into_vec()).collect();
        for i in 0..m {
            for j in 0..m {
                let entry: C<T> = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * *b).sum();
                gram[(i, j)] = gram[(i, j)] + entry;
            }
        }
    }
    let kernel = if gram.max_abs() == T::zero() {
        (0..m)
            .map(|k| (0..m).map(|i| if i == k { C::one() } else { C::zero() }).collect())
            .collect()
    } else {
        null_space_of_gram(&gram, T::lit(KERNEL_TOL))?
    };
    let elements: Vec<ComplexMatrix<T>> = kernel
        .iter()
        .map(|coeffs: &Vec<C<T>>| {
            let mut x = ComplexMatrix::zeros(d, d);
            for (cj, bj) in coeffs.iter().zip(&alg.basis) {
                x += &bj.scale(*cj);
            }
            x
        })
        .collect();
    OperatorAlgebra::span(d, &elements)
}

/// Block structure `H ≅ ⊕ C^{mᵢ} ⊗ C^{nᵢ}` of a `*`-algebra with identity,
/// under which the algebra is `⊕ I_{mᵢ} ⊗ M_{nᵢ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedderburnProfile {
    /// `(mᵢ, nᵢ)` = (multiplicity, matrix size), sorted.
    pub blocks: Vec<(usize, usize)>,
}

impl WedderburnProfile {
    /// `Σ mᵢnᵢ`.
    pub fn ambient_dim(&self) -> usize {
        self.blocks.iter().map(|(m, n)| m * n).sum()
    }

    /// `Σ nᵢ²`.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|(_, n)| n * n).sum()
    }

    /// `Σ mᵢ²`.
    pub fn commutant_dim(&self) -> usize {
        self.blocks.iter().map(|(m, _)| m * m).sum()
    }

    /// Some block has multiplicity at least two.
    pub fn has_noiseless_subsystem(&self) -> bool {
        self.blocks.iter().any(|&(m, _)| m >= 2)
    }
}

/// Hermitian, Frobenius-normalized spanning set of a `*`-closed algebra.
fn hermitian_spanning_set<T: Real>(alg: &OperatorAlgebra<T>) -> Vec<ComplexMatrix<T>> {
    let half = T::lit(0.5);
    let mut basis = OrthonormalBasis::new(T::lit(RANK_TOL));
    let mut out = Vec::new();
    for z in &alg.basis {
        let re = (z + &z.adjoint()).scale_real(half);
        let im = (z - &z.adjoint()).scale(c(T::zero(), -half));
        for h in [re, im] {
            let n = h.frobenius_norm();
            if n > T::tol(1e-12) && basis.try_push(flatten(&h)) {
                out.push(h.scale_real(T::one() / n));
            }
        }
    }
    out
}

/// Groups sorted eigenvalues into clusters of gap below `tol`.
fn group_eigenvalues<T: Real>(values: &[T], tol: T) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - values[*g.last().expect("nonempty")] <= tol => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Minimal central projections from a generic Hermitian central element.
fn central_projections<T: Real>(alg: &OperatorAlgebra<T>) -> Result<Vec<ComplexMatrix<T>>> {
    let d = alg.ambient;
    let z = center(alg)?;
    let herm = hermitian_spanning_set(&z);
    if herm.len() != z.dim() {
        return Err(Error::SumRule(format!(
            "center of dimension {} has {} independent Hermitian elements",
            z.dim(),
            herm.len()
        )));
    }
    for attempt in 0..CENTRAL_ATTEMPTS {
        let mut rng = Sampler::new(CENTRAL_SEED + attempt);
        let mut h = ComplexMatrix::zeros(d, d);
        for b in &herm {
            h += &b.scale_real(rng.uniform::<T>(-1.0, 1.0));
        }
        let e = hermitian_eigen(&h)?;
        let groups = group_eigenvalues(&e.values, T::tol(GROUPING_TOL));
        if groups.len() != z.dim() {
            continue;
        }
        return Ok(groups
            .iter()
            .map(|g| {
                let mut p = ComplexMatrix::zeros(d, d);
                for &k in g {
                    let v = e.vector(k);
                    p += &ComplexMatrix::outer(&v, &v);
                }
                p
            })
            .collect());
    }
    Err(Error::SumRule(format!(
        "no generic central element separated {} blocks after {CENTRAL_ATTEMPTS} draws",
        z.dim()
    )))
}

fn exact_sqrt(x: usize) -> Option<usize> {
    let r = (x as f64).sqrt().round() as usize;
    (r * r == x).then_some(r)
}

/// Wedderburn block structure of a `*`-algebra with identity.
///
/// Block sizes come from the compressions `PᵢAPᵢ` onto minimal central
/// projections; the sum rules `Σmᵢnᵢ = d`, `Σnᵢ² = dim A`,
/// `Σmᵢ² = dim A′` are checked and reported as [`Error::SumRule`] on failure.
pub fn wedderburn_profile<T: Real>(alg: &OperatorAlgebra<T>) -> Result<WedderburnProfile> {
    if !alg.contains_identity() {
        return Err(Error::param("algebra", "algebra does not contain the identity"));
    }
    let d = alg.ambient;
    let mut blocks = Vec::new();
    for p in central_projections(alg)? {
        let rank = p.trace().re.round().to_usize().unwrap_or(0);
        let compressed: Vec<ComplexMatrix<T>> = alg.basis.iter().map(|b| p.matmul(b).matmul(&p)).collect();
        let block_dim = OperatorAlgebra::span(d, &compressed)?.dim();
        let n = exact_sqrt(block_dim)
            .ok_or_else(|| Error::SumRule(format!("compressed block has non-square dimension {block_dim}")))?;
        if n == 0 || rank % n != 0 {
            return Err(Error::SumRule(format!("block of rank {rank} is not a multiple of {n}")));
        }
        blocks.push((rank / n, n));
    }
    blocks.sort_unstable();
    let profile = WedderburnProfile { blocks };
    let commutant_dim = commutant(alg)?.dim();
    if profile.ambient_dim() != d {
        return Err(Error::SumRule(format!("Σ m·n = {} but d = {d}", profile.ambient_dim())));
    }
    if profile.algebra_dim() != alg.dim() {
        return Err(Error::SumRule(format!(
            "Σ n² = {} but the algebra has dimension {}",
            profile.algebra_dim(),
            alg.dim()
        )));
    }
    if profile.commutant_dim() != commutant_dim {
        return Err(Error::SumRule(format!(
            "Σ m² = {} but the commutant has dimension {commutant_dim}",
            profile.commutant_dim()
        )));
    }
    Ok(profile)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiselessReport {
    pub profile: WedderburnProfile,
    /// Some block carries a tensor factor of dimension at least two.
    pub nontrivial: bool,
    pub algebra_dim: usize,
    pub commutant_dim: usize,
}

/// Noiseless-subsystem structure of a channel from its interaction algebra.
pub fn noiseless_subsystems<T: Real>(channel: &QuantumChannel<T>) -> Result<NoiselessReport> {
    let alg = interaction_algebra(channel)?;
    let profile = wedderburn_profile(&alg)?;
    Ok(NoiselessReport {
        nontrivial: profile.has_noiseless_subsystem(),
        algebra_dim: alg.dim(),
        commutant_dim: profile.commutant_dim(),
        profile,
    })
}

#[derive(Debug, Clone)]
pub struct KnillLaflammeReport<T> {
    pub correctable: bool,
    /// `λᵢⱼ = tr(P Kᵢ†Kⱼ P) / dim K`.
    pub lambda: ComplexMatrix<T>,
    /// Worst Frobenius norm of `P Kᵢ†Kⱼ P − λᵢⱼ P`.
    pub max_residual: T,
}

/// Checks `P Kᵢ†Kⱼ P = λᵢⱼ P` on the span of an orthonormal code basis.
pub fn knill_laflamme_check<T: Real>(
    errors: &[ComplexMatrix<T>],
    code_basis: &[Vec<C<T>>],
) -> Result<KnillLaflammeReport<T>> {
    let first = code_basis.first().ok_or_else(|| Error::param("code_basis", "empty code basis"))?;
    let d = first.len();
    if errors.is_empty() {
        return Err(Error::param("errors", "empty error set"));
    }
    if let Some(e) = errors.iter().find(|e| e.rows() != d || e.cols() != d) {
        return Err(Error::DimensionMismatch(format!(
            "error operator is {}x{}, code vectors have length {d}",
            e.rows(),
            e.cols()
        )));
    }
    if code_basis.iter().any(|v| v.len() != d) {
        return Err(Error::DimensionMismatch("code vectors differ in length".into()));
    }
    let k = code_basis.len();
    let mut iso = ComplexMatrix::zeros(d, k);
    for (j, v) in code_basis.iter().enumerate() {
        iso.set_column(j, v);
    }
    let deviation = iso.adjoint().matmul(&iso).max_abs_diff(&ComplexMatrix::identity(k));
    if deviation > T::tol(CODE_BASIS_TOL) {
        return Err(Error::NonOrthonormalBasis {
            deviation: deviation.to_f64_lossy(),
        });
    }
    // compressions in code coordinates: V† Kᵢ† Kⱼ V, with residual norms equal to those of P Kᵢ†Kⱼ P − λ P
    let images: Vec<ComplexMatrix<T>> = errors.iter().map(|e| e.matmul(&iso)).collect();
    let r = errors.len();
    let kk = T::lit(k as f64);
    let mut lambda = ComplexMatrix::zeros(r, r);
    let mut worst = T::zero();
    for i in 0..r {
        let left = images[i].adjoint();
        for j in 0..r {
            let block = left.matmul(&images[j]);
            let l = block.trace() / cr(kk);
            lambda[(i, j)] = l;
            let residual = (&block - &ComplexMatrix::identity(k).scale(l)).frobenius_norm();
            worst = worst.max(residual);
        }
    }
    Ok(KnillLaflammeReport {
        correctable: worst <= T::tol(KL_TOL),
        lambda,
        max_residual: worst,
    })
}
