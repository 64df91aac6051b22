use super::{cb_dist_lower, cb_dist_upper, Budget};
use crate::channels::{constant_channel, depolarizing, identity, mix, QuantumChannel};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::states::DensityOperator;

/// Strictly contractive channel close to a given one.
#[derive(Debug, Clone)]
pub struct ContractiveApproximation<T> {
    /// `Tₙ = (1/2n) K_σ + (1 − 1/2n) T`.
    pub channel: QuantumChannel<T>,
    pub n: usize,
    /// `1 − 1/(2n)`, an upper bound on `κ(Tₙ)`.
    pub kappa_ceiling: T,
    /// `1/n`, an upper bound on `‖T − Tₙ‖_cb`.
    pub cb_distance_bound: T,
}

/// Smallest integer `n ≥ 1` with `1/n < ε`.
fn smallest_reciprocal_below<T: Real>(epsilon: T) -> usize {
    let mut n = (T::one() / epsilon).floor().to_usize().unwrap_or(usize::MAX - 1).saturating_add(1);
    while n > 1 && T::one() / T::lit((n - 1) as f64) < epsilon {
        n -= 1;
    }
    while !(T::one() / T::lit(n as f64) < epsilon) {
        n += 1;
    }
    n
}

/// Mixes `T` with the replacement channel `K_σ` at weight `1/(2n)`, where `n`
/// is the smallest integer with `1/n < ε`. The result has `κ ≤ 1 − 1/(2n)`
/// and lies within `1/n` of `T` in cb-norm.
pub fn contractive_approximation<T: Real>(
    channel: &QuantumChannel<T>,
    sigma: &DensityOperator<T>,
    epsilon: T,
) -> Result<ContractiveApproximation<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::param("epsilon", format!("must be positive and finite, got {epsilon}")));
    }
    channel.ensure_cptp()?;
    if sigma.dim() != channel.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel of dimension {} with state of dimension {}",
            channel.dim(),
            sigma.dim()
        )));
    }
    let n = smallest_reciprocal_below(epsilon);
    let nn = T::lit(n as f64);
    let w = T::one() / (nn + nn);
    let k = constant_channel(sigma)?;
    let mixed = mix(&[(w, &k), (T::one() - w, channel)])?;
    Ok(ContractiveApproximation {
        channel: mixed,
        n,
        kappa_ceiling: T::one() - w,
        cb_distance_bound: T::one() / nn,
    })
}

/// Depolarizing channel indistinguishable from `T` at resolution `ε`.
#[derive(Debug, Clone)]
pub struct DepolarizingApproximation<T> {
    pub n: usize,
    /// `D_{1/n}`.
    pub channel: QuantumChannel<T>,
    /// Upper estimate used for `‖T − id‖_cb`.
    pub identity_distance: T,
    /// Certified lower bound on `‖T − D_{1/n}‖_cb`.
    pub lower_check: T,
    /// Whether `lower_check < ε`.
    pub passes: bool,
}

/// For `T` within `t < ε` of the identity, returns `D_{1/n}` with `n` the
/// smallest integer above `2/(ε − t)`, so that
/// `‖T − D_{1/n}‖_cb ≤ t + (1/n)‖id − M‖_cb < ε` using `‖id − M‖_cb ≤ 2`
/// for the completely depolarizing channel `M`.
pub fn depolarizing_indistinguishability_n<T: Real>(
    channel: &QuantumChannel<T>,
    epsilon: T,
    budget: &Budget,
) -> Result<DepolarizingApproximation<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::param("epsilon", format!("must be positive and finite, got {epsilon}")));
    }
    channel.ensure_cptp()?;
    let d = channel.dim();
    let id = identity(d)?;
    let t = cb_dist_upper(channel, &id, budget)?;
    if !(epsilon > t) {
        return Err(Error::Inapplicable(format!(
            "epsilon {epsilon} does not exceed the estimated distance {t} from the identity"
        )));
    }
    let ratio = (T::one() + T::one()) / (epsilon - t);
    let mut n = ratio.floor().to_usize().unwrap_or(usize::MAX - 1).saturating_add(1);
    while !(T::lit(n as f64) > ratio) {
        n += 1;
    }
    let dep = depolarizing(d, T::one() / T::lit(n as f64))?;
    let lower = cb_dist_lower(channel, &dep, None, budget)?;
    Ok(DepolarizingApproximation {
        n,
        channel: dep,
        identity_distance: t,
        lower_check: lower,
        passes: lower < epsilon,
    })
}

/// Bound `δⁿ` on the cb-norm of `(T − id)^{⊗n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualBound<T> {
    /// Estimate of `‖T − id‖_cb` from [`cb_dist_upper`].
    pub delta: T,
    pub bound: T,
    /// Always false: `δ` comes from a heuristic estimator.
    pub is_certified: bool,
}

/// `δⁿ` with `δ` the upper estimate of `‖T − id‖_cb`, using
/// multiplicativity of the cb-norm under tensor products.
pub fn approx_ec_residual_bound<T: Real>(channel: &QuantumChannel<T>, n: u32, budget: &Budget) -> Result<ResidualBound<T>> {
    channel.ensure_cptp()?;
    let id = identity(channel.dim())?;
    let delta = cb_dist_upper(channel, &id, budget)?;
    Ok(ResidualBound {
        delta,
        bound: delta.powi(n as i32),
        is_certified: false,
    })
}
