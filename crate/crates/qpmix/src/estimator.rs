//! The Monte-Carlo estimation loop and its analytic cost bounds.
//!
//! `S` total shots are spread over `N_c = S / s` independently sampled
//! circuit instances, `s` shots each. Every shot contributes
//! `Γ_c · sign(Γ_L) · parity`, where `Γ_c` is the product of per-gate
//! coefficient one-norms (identical for every instance of a given circuit)
//! and `sign(Γ_L)` is the instance's sampled coefficient-product sign. The
//! mean of these weighted samples is an unbiased estimate of the
//! ideal-circuit observable.
//!
//! Instance workers draw from rng substreams derived deterministically from
//! `(seed, instance index)`, so results are bit-identical regardless of the
//! thread count; aggregation is compensated summation in instance order.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::circuits::{CircuitSpec, PreparedCircuit, SampledInstance};
use crate::math;
use crate::mixture;
use crate::pauli::PauliString;
use crate::statevec::BasisSampler;
use crate::{Error, Result};

/// Shots per sampled circuit instance used by the experiment recipes.
pub const DEFAULT_SHOTS_PER_INSTANCE: u64 = 100;

/// Per-instance bookkeeping retained alongside the weighted samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceMeta {
    /// Sign of the sampled coefficient product, ±1.
    pub sign: f64,
    /// Γ_c, the magnitude every shot of this instance carries.
    pub weight: f64,
    /// Branch-2 draws in this instance (extra T-type rotations).
    pub t_insertions: u32,
}

/// Result of one estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    /// Arithmetic mean of `weighted_samples`.
    pub mean: f64,
    /// One signed value per shot: Γ_c · sign(Γ_L) · parity.
    pub weighted_samples: Vec<f64>,
    /// Total shots S.
    pub total_shots: u64,
    /// Shots per instance s.
    pub shots_per_instance: u64,
    /// N_c = S / s.
    pub n_instances: u64,
    /// Unbiased (n−1) standard deviation of the weighted samples.
    pub empirical_std: f64,
    /// Analytic bound on Var of one weighted sample: Γ_c²·‖O‖∞².
    pub variance_bound: f64,
    /// Master seed the run was derived from.
    pub seed: u64,
    /// One entry per sampled instance, in sampling order.
    pub instances: Vec<InstanceMeta>,
}

impl EstimatorResult {
    /// Standard error of the mean, empirical_std / √S.
    pub fn std_error(&self) -> f64 {
        self.empirical_std / math::sqrt(self.total_shots as f64)
    }

    /// Mean number of branch-2 insertions per instance.
    pub fn mean_t_insertions(&self) -> f64 {
        if self.instances.is_empty() {
            return 0.0;
        }
        self.instances
            .iter()
            .map(|m| m.t_insertions as f64)
            .sum::<f64>()
            / self.instances.len() as f64
    }
}

fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = kahan_sum(values) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let mut sq = Vec::with_capacity(n);
    for &v in values {
        let d = v - mean;
        sq.push(d * d);
    }
    let var = kahan_sum(&sq) / (n - 1) as f64;
    (mean, math::sqrt(var))
}

fn validate_observable(circuit: &CircuitSpec, observable: &PauliString) -> Result<()> {
    if observable.n_qubits() != circuit.n_qubits {
        return Err(Error::SizeMismatch {
            left: observable.n_qubits(),
            right: circuit.n_qubits,
        });
    }
    if *observable != PauliString::z_all(circuit.n_qubits) {
        return Err(Error::UnsupportedObservable);
    }
    Ok(())
}

/// The rng substream for instance `index` under `seed`. Stream 0 is
/// reserved for whole-circuit draws (the unmitigated arm's error
/// realization and plain shot sampling).
fn instance_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}

fn run_one_instance(
    prepared: &PreparedCircuit<'_>,
    shots: u64,
    seed: u64,
    index: u64,
) -> Result<(InstanceMeta, Vec<f64>)> {
    let mut rng = instance_rng(seed, index);
    let instance: SampledInstance = prepared.sample_instance(&mut rng)?;
    let state = instance.evolve()?;
    debug_assert!(math::abs(state.norm_sqr() - 1.0) < 1e-10);
    let sampler = BasisSampler::new(&state);
    let signed_weight = instance.sign * instance.weight;
    let mut values = Vec::with_capacity(shots as usize);
    for _ in 0..shots {
        values.push(signed_weight * sampler.sample_z_parity(&mut rng));
    }
    Ok((
        InstanceMeta {
            sign: instance.sign,
            weight: instance.weight,
            t_insertions: instance.t_insertions,
        },
        values,
    ))
}

/// Run the mitigated estimator: sample `total_shots / shots_per_instance`
/// circuit instances and take `shots_per_instance` parity measurements from
/// each, weighting every shot by Γ_c·sign(Γ_L).
pub fn estimate(
    circuit: &CircuitSpec,
    observable: &PauliString,
    total_shots: u64,
    shots_per_instance: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    validate_observable(circuit, observable)?;
    if total_shots == 0 || shots_per_instance == 0 {
        return Err(Error::InvalidArgument("shot counts must be positive"));
    }
    if !total_shots.is_multiple_of(shots_per_instance) {
        return Err(Error::ShotsNotDivisible {
            total: total_shots,
            per_instance: shots_per_instance,
        });
    }
    let n_instances = total_shots / shots_per_instance;
    let prepared = PreparedCircuit::new(circuit)?;
    let gamma_product = prepared.gamma_product();

    let per_instance = run_instances(&prepared, shots_per_instance, seed, n_instances)?;

    let mut weighted_samples = Vec::with_capacity(total_shots as usize);
    let mut instances = Vec::with_capacity(n_instances as usize);
    for (meta, values) in per_instance {
        instances.push(meta);
        weighted_samples.extend_from_slice(&values);
    }
    let (mean, empirical_std) = mean_and_std(&weighted_samples);

    Ok(EstimatorResult {
        mean,
        weighted_samples,
        total_shots,
        shots_per_instance,
        n_instances,
        empirical_std,
        variance_bound: gamma_product * gamma_product,
        seed,
        instances,
    })
}

#[cfg(feature = "parallel")]
fn run_instances(
    prepared: &PreparedCircuit<'_>,
    shots: u64,
    seed: u64,
    n_instances: u64,
) -> Result<Vec<(InstanceMeta, Vec<f64>)>> {
    use rayon::prelude::*;
    (0..n_instances)
        .into_par_iter()
        .map(|idx| run_one_instance(prepared, shots, seed, idx))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_instances(
    prepared: &PreparedCircuit<'_>,
    shots: u64,
    seed: u64,
    n_instances: u64,
) -> Result<Vec<(InstanceMeta, Vec<f64>)>> {
    (0..n_instances)
        .map(|idx| run_one_instance(prepared, shots, seed, idx))
        .collect()
}

fn plain_sampling_result(
    state: &crate::statevec::StateVector,
    total_shots: u64,
    seed: u64,
    rng: &mut ChaCha12Rng,
) -> EstimatorResult {
    let sampler = BasisSampler::new(state);
    let mut weighted_samples = Vec::with_capacity(total_shots as usize);
    for _ in 0..total_shots {
        weighted_samples.push(sampler.sample_z_parity(rng));
    }
    let (mean, empirical_std) = mean_and_std(&weighted_samples);
    EstimatorResult {
        mean,
        weighted_samples,
        total_shots,
        shots_per_instance: total_shots,
        n_instances: 1,
        empirical_std,
        variance_bound: 1.0,
        seed,
        instances: alloc::vec![InstanceMeta {
            sign: 1.0,
            weight: 1.0,
            t_insertions: 0,
        }],
    }
}

/// Plain sampling of one noisy circuit realization (weight 1); converges to
/// the noisy expectation, not the ideal one. Randomized error models are
/// resolved once, from stream 0 of `seed`.
pub fn estimate_unmitigated(
    circuit: &CircuitSpec,
    observable: &PauliString,
    total_shots: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    validate_observable(circuit, observable)?;
    if total_shots == 0 {
        return Err(Error::InvalidArgument("shot counts must be positive"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let state = circuit.evolve_noisy(&mut rng)?;
    Ok(plain_sampling_result(&state, total_shots, seed, &mut rng))
}

/// Plain sampling of the ideal (error-free) circuit.
pub fn estimate_ideal(
    circuit: &CircuitSpec,
    observable: &PauliString,
    total_shots: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    validate_observable(circuit, observable)?;
    if total_shots == 0 {
        return Err(Error::InvalidArgument("shot counts must be positive"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let state = circuit.evolve_exact()?;
    Ok(plain_sampling_result(&state, total_shots, seed, &mut rng))
}

/// Shots required to reach accuracy δ with ν equally over-rotated gates:
/// `e^{0.83·|ε|·ν} · ‖O‖∞² / δ²`.
pub fn shot_bound(epsilon: f64, nu: u64, delta: f64, op_norm: f64) -> f64 {
    math::exp(0.83 * math::abs(epsilon) * nu as f64) * op_norm * op_norm / (delta * delta)
}

/// Variance bound in its exact form `‖γ(ε)‖₁^{2ν} · ‖O‖∞²`.
pub fn variance_bound_exact(epsilon: f64, nu: u64, op_norm: f64) -> f64 {
    math::powi(mixture::one_norm_closed_form(epsilon), 2 * nu as i32) * op_norm * op_norm
}

/// Variance bound in its exponential form `e^{0.83·|ε|·ν} · ‖O‖∞²`.
pub fn variance_bound_exponential(epsilon: f64, nu: u64, op_norm: f64) -> f64 {
    math::exp(0.83 * math::abs(epsilon) * nu as f64) * op_norm * op_norm
}

/// Expected extra T-type insertions per mitigated rotation:
/// Ω_T(ε) = |γ₂|/‖γ‖₁ = √2·cos(π/8)·sin|ε|·sec(|ε|−π/8) ≈ √2·|ε|.
pub fn t_overhead(epsilon: f64) -> f64 {
    let pi_8 = core::f64::consts::FRAC_PI_8;
    let e = math::abs(epsilon);
    core::f64::consts::SQRT_2 * math::cos(pi_8) * math::sin(e) / math::cos(e - pi_8)
}
