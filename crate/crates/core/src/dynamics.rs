//! Decoherence of noisy memories and of circuits with noise after every
//! gate, distinguishability horizons, and fixed points of static algorithms.

use num_traits::{One, Zero};

use crate::channels::{compose, unitary_channel, QuantumChannel};
use crate::contractivity::{fixed_point, kappa, Budget, FixedPointMethod, FixedPointOptions, FixedPointResult, KappaEstimate};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix};
use crate::scalar::{c, cr, Real, C};
use crate::states::{maximally_mixed, trace_norm_distance, DensityOperator};

/// Gates must be unitary to this accuracy.
pub const GATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub step: usize,
    /// Distance to the reference state, or between the two trajectories.
    pub distance: T,
    /// `κⁿ` times the initial distance.
    pub bound: T,
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    /// One record per step, starting at step 0.
    pub records: Vec<TrajectoryRecord<T>>,
    /// Modulus used for the bound column.
    pub kappa: KappaEstimate<T>,
    /// Reference state for single-trajectory runs (the fixed point, or `I/d`).
    pub reference: Option<DensityOperator<T>>,
    /// States `ρ₀, ρ₁, …` of the (first) trajectory.
    pub states: Vec<DensityOperator<T>>,
}

impl<T: Real> Trajectory<T> {
    /// Whether the bound column is guaranteed (closed-form `κ`).
    pub fn bound_certified(&self) -> bool {
        self.kappa.exact
    }

    /// Equiprobable Helstrom ceiling `½ + ¼·bound` at `step`.
    pub fn helstrom_ceiling(&self, step: usize) -> Option<T> {
        self.records
            .get(step)
            .map(|r| T::lit(0.5) + T::lit(0.25) * r.bound)
    }
}

/// Memory register left to the channel for `steps` rounds: records
/// `‖Tⁿρ₀ − ρ_T‖₁` against `κⁿ‖ρ₀ − ρ_T‖₁`.
pub fn simulate_memory<T: Real>(
    channel: &QuantumChannel<T>,
    rho0: &DensityOperator<T>,
    steps: usize,
    budget: &Budget,
) -> Result<Trajectory<T>> {
    channel.ensure_cptp()?;
    if rho0.dim() != channel.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel of dimension {} with initial state of dimension {}",
            channel.dim(),
            rho0.dim()
        )));
    }
    let fp = fixed_point(channel, FixedPointMethod::Nullspace, &FixedPointOptions::default())?;
    let k = kappa(channel, budget)?;
    let d0 = trace_norm_distance(rho0, &fp.state)?;
    let mut states = vec![rho0.clone()];
    let mut records = vec![TrajectoryRecord {
        step: 0,
        distance: d0,
        bound: d0,
    }];
    let mut rho = rho0.clone();
    let mut power = T::one();
    for n in 1..=steps {
        rho = channel.apply(&rho)?;
        power = power * k.lower_bound;
        records.push(TrajectoryRecord {
            step: n,
            distance: trace_norm_distance(&rho, &fp.state)?,
            bound: power * d0,
        });
        states.push(rho.clone());
    }
    Ok(Trajectory {
        records,
        kappa: k,
        reference: Some(fp.state),
        states,
    })
}

/// Circuit of size `steps` where the noise channel follows every gate.
/// Gates are applied cyclically; an empty gate list means idle steps.
#[derive(Debug, Clone)]
pub struct NoisyCircuit<T> {
    dim: usize,
    gates: Vec<ComplexMatrix<T>>,
    noise: QuantumChannel<T>,
    initial: Vec<DensityOperator<T>>,
    steps: usize,
}

impl<T: Real> NoisyCircuit<T> {
    pub fn new(
        gates: Vec<ComplexMatrix<T>>,
        noise: QuantumChannel<T>,
        initial: Vec<DensityOperator<T>>,
        steps: usize,
    ) -> Result<Self> {
        let dim = noise.dim();
        noise.ensure_cptp()?;
        for (i, g) in gates.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "gate {i} is {}x{}, noise acts on dimension {dim}",
                    g.rows(),
                    g.cols()
                )));
            }
            g.ensure_unitary(T::tol(GATE_TOL))?;
        }
        if initial.is_empty() || initial.len() > 2 {
            return Err(Error::param("initial", "expected one or two initial states"));
        }
        if let Some(bad) = initial.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "initial state of dimension {}, noise acts on dimension {dim}",
                bad.dim()
            )));
        }
        Ok(Self {
            dim,
            gates,
            noise,
            initial,
            steps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn noise(&self) -> &QuantumChannel<T> {
        &self.noise
    }

    pub fn gates(&self) -> &[ComplexMatrix<T>] {
        &self.gates
    }

    pub fn initial(&self) -> &[DensityOperator<T>] {
        &self.initial
    }

    /// The same circuit with every gate replaced by the identity.
    pub fn idle(&self) -> Self {
        Self {
            gates: Vec::new(),
            ..self.clone()
        }
    }

    /// Gate applied at step `n ≥ 1`.
    pub fn gate(&self, n: usize) -> Option<&ComplexMatrix<T>> {
        if self.gates.is_empty() {
            None
        } else {
            Some(&self.gates[(n - 1) % self.gates.len()])
        }
    }

    fn step(&self, rho: &DensityOperator<T>, n: usize) -> Result<DensityOperator<T>> {
        let rotated = match self.gate(n) {
            Some(u) => DensityOperator::from_trusted(u.sandwich(rho.matrix())),
            None => rho.clone(),
        };
        self.noise.apply(&rotated)
    }

    fn is_static(&self) -> bool {
        self.gates.windows(2).all(|w| w[0] == w[1])
    }
}

/// Runs a noisy circuit.
///
/// With two initial states the records hold `‖ρₙ − σₙ‖₁` against
/// `κⁿ‖ρ₀ − σ₀‖₁`. With one, the distance is measured to `I/d` when the
/// noise is unital, or to the fixed point of `T∘Û` when every step applies
/// the same gate; other single-state circuits have no common reference and
/// are rejected.
pub fn simulate_circuit<T: Real>(circuit: &NoisyCircuit<T>, budget: &Budget) -> Result<Trajectory<T>> {
    let k = kappa(&circuit.noise, budget)?;
    let first = circuit.initial[0].clone();
    let (reference, partner) = match circuit.initial.get(1) {
        Some(sigma) => (None, Some(sigma.clone())),
        None if circuit.noise.is_unital() => (Some(maximally_mixed(circuit.dim)?), None),
        None if circuit.is_static() => {
            let u = circuit
                .gates
                .first()
                .cloned()
                .unwrap_or_else(|| ComplexMatrix::identity(circuit.dim));
            let fp = static_algorithm_fixed_point(&circuit.noise, &u)?;
            (Some(fp.state), None)
        }
        None => {
            return Err(Error::Inapplicable(
                "single-state circuit needs unital noise or a repeated gate to define a reference state".into(),
            ))
        }
    };
    let distance = |rho: &DensityOperator<T>, other: &DensityOperator<T>| trace_norm_distance(rho, other);
    let target = |partner: &Option<DensityOperator<T>>| -> DensityOperator<T> {
        partner.clone().or_else(|| reference.clone()).expect("reference or partner")
    };
    let d0 = distance(&first, &target(&partner))?;
    let mut records = vec![TrajectoryRecord {
        step: 0,
        distance: d0,
        bound: d0,
    }];
    let mut states = vec![first.clone()];
    let mut rho = first;
    let mut sigma = partner;
    let mut power = T::one();
    for n in 1..=circuit.steps {
        rho = circuit.step(&rho, n)?;
        if let Some(s) = sigma.as_mut() {
            *s = circuit.step(s, n)?;
        }
        power = power * k.lower_bound;
        records.push(TrajectoryRecord {
            step: n,
            distance: distance(&rho, &target(&sigma))?,
            bound: power * d0,
        });
        states.push(rho.clone());
    }
    Ok(Trajectory {
        records,
        kappa: k,
        reference,
        states,
    })
}

/// Smallest `N₀` with `κ^{N₀} ≤ ε/2`, i.e. `⌈log(ε/2) / log κ⌉` evaluated
/// exactly (the floating-point ceiling is corrected against direct powers).
pub fn distinguishability_horizon(kappa: f64, epsilon: f64) -> Result<u64> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::param("kappa", format!("must lie in (0, 1), got {kappa}")));
    }
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::param("epsilon", format!("must lie in (0, 2), got {epsilon}")));
    }
    let target = epsilon / 2.0;
    let mut n = ((target.ln() / kappa.ln()).ceil().max(1.0)) as u64;
    let pow = |m: u64| kappa.powi(m as i32);
    while n > 1 && pow(n - 1) <= target {
        n -= 1;
    }
    while pow(n) > target {
        n += 1;
    }
    Ok(n)
}

/// Fixed point of `S = T∘Û` for an algorithm repeating the gate `U`.
pub fn static_algorithm_fixed_point<T: Real>(
    channel: &QuantumChannel<T>,
    u: &ComplexMatrix<T>,
) -> Result<FixedPointResult<T>> {
    let s = compose(channel, &unitary_channel(u)?)?;
    fixed_point(&s, FixedPointMethod::Nullspace, &FixedPointOptions::default())
}

/// Named gate on `num_qubits` qubits; qubit 0 is the most significant tensor
/// factor. Single-qubit gates `I, X, Y, Z, H, S` take one index, `CNOT`
/// takes `[control, target]`.
pub fn named_gate<T: Real>(name: &str, qubits: &[usize], num_qubits: usize) -> Result<ComplexMatrix<T>> {
    if num_qubits == 0 || num_qubits > 12 {
        return Err(Error::param("qubits", format!("unsupported register size {num_qubits}")));
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= num_qubits) {
        return Err(Error::param("qubits", format!("qubit index {q} outside register of {num_qubits}")));
    }
    let upper = name.to_ascii_uppercase();
    if upper == "CNOT" || upper == "CX" {
        let [control, target] = qubits else {
            return Err(Error::param("qubits", "CNOT needs [control, target]"));
        };
        if control == target {
            return Err(Error::param("qubits", "CNOT control and target coincide"));
        }
        let dim = 1usize << num_qubits;
        let bit = |q: usize| 1usize << (num_qubits - 1 - q);
        return Ok(ComplexMatrix::from_fn(dim, dim, |row, col| {
            let image = if col & bit(*control) != 0 { col ^ bit(*target) } else { col };
            if row == image {
                C::one()
            } else {
                C::zero()
            }
        }));
    }
    let [q] = qubits else {
        return Err(Error::param("qubits", format!("gate {name} acts on exactly one qubit")));
    };
    let single = single_qubit_gate::<T>(&upper).ok_or_else(|| Error::param("gate", format!("unknown gate {name}")))?;
    let mut m = ComplexMatrix::identity(1);
    for k in 0..num_qubits {
        let factor = if k == *q { single.clone() } else { ComplexMatrix::identity(2) };
        m = kron(&m, &factor);
    }
    Ok(m)
}

fn single_qubit_gate<T: Real>(name: &str) -> Option<ComplexMatrix<T>> {
    let (o, z) = (T::one(), T::zero());
    let h = T::FRAC_1_SQRT_2();
    let rows = match name {
        "I" => [[cr(o), cr(z)], [cr(z), cr(o)]],
        "X" => [[cr(z), cr(o)], [cr(o), cr(z)]],
        "Y" => [[cr(z), c(z, -o)], [c(z, o), cr(z)]],
        "Z" => [[cr(o), cr(z)], [cr(z), -cr(o)]],
        "H" => [[cr(h), cr(h)], [cr(h), cr(-h)]],
        "S" => [[cr(o), cr(z)], [cr(z), c(z, o)]],
        _ => return None,
    };
    Some(ComplexMatrix::from_fn(2, 2, |i, j| rows[i][j]))
}
