//! Contractivity moduli, fixed points, completely bounded distances and the
//! constructions built on them.

mod approximation;
mod cb;
mod fixed_point;
mod kappa;

pub use approximation::{
    approx_ec_residual_bound, contractive_approximation, depolarizing_indistinguishability_n, ContractiveApproximation,
    DepolarizingApproximation, ResidualBound,
};
pub use cb::{cb_dist_lower, cb_dist_upper, one_to_one_norm};
pub use fixed_point::{fixed_point, iteration_bound, FixedPointMethod, FixedPointOptions, FixedPointResult};
pub use kappa::{contraction_ratio, kappa, kappa_search, KappaEstimate, KappaMethod};

/// Search budget shared by the randomized estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Random starting points examined in total (split across restarts).
    pub samples: usize,
    /// Independent local searches; restart `i` draws from RNG stream `i`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            samples: 2000,
            restarts: 16,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub(crate) fn restarts(&self) -> usize {
        self.restarts.max(1)
    }

    /// Candidates screened before each local search.
    pub(crate) fn samples_per_restart(&self) -> usize {
        (self.samples / self.restarts()).max(1)
    }
}

/// Hard cap on ascent iterations within one restart.
pub(crate) const MAX_ASCENT_STEPS: usize = 500;
/// Ascent stops once a step improves the objective by less than this.
pub(crate) const ASCENT_TOL: f64 = 1e-12;
