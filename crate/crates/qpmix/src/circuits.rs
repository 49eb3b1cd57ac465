//! Trotterized Ising circuits, Clifford + Rz compilation, error attachment
//! and randomized instance sampling.
//!
//! A [`CircuitSpec`] is an ordered list of fixed (Clifford frame) gates and
//! parameterized Pauli rotations; each rotation carries its error model and
//! mitigation policy. [`sample_instance`] resolves every random choice —
//! per-gate error draws, twirl elements, mixture branches — into a fully
//! concrete gate list together with the estimator bookkeeping (sign of the
//! sampled coefficient product, one-norm weight, T-insertion count).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand_core::RngCore;

use crate::math;
use crate::mixture::{self, GammaTriple};
use crate::noise::{ErrorModel, ResolvedError};
use crate::pauli::{Axis, PauliString};
use crate::statevec::{FixedGate, StateVector};
use crate::{Error, Result};

/// What the sampler does with each parameterized rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MitigationPolicy {
    /// Leave the noisy gate as is.
    Off,
    /// Conjugate by a uniform element of {I, P}, no mixture branches.
    TwirlOnly,
    /// Sample signed mixture branches.
    Mixture,
    /// Twirl and sample mixture branches.
    MixtureTwirl,
}

impl MitigationPolicy {
    pub fn uses_twirl(&self) -> bool {
        matches!(
            self,
            MitigationPolicy::TwirlOnly | MitigationPolicy::MixtureTwirl
        )
    }

    pub fn uses_mixture(&self) -> bool {
        matches!(
            self,
            MitigationPolicy::Mixture | MitigationPolicy::MixtureTwirl
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            MitigationPolicy::Off => "off",
            MitigationPolicy::TwirlOnly => "twirl",
            MitigationPolicy::Mixture => "mix",
            MitigationPolicy::MixtureTwirl => "mix+twirl",
        }
    }
}

/// A parameterized Pauli rotation with its noise and mitigation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRotation {
    pub generator: PauliString,
    pub theta: f64,
    pub error: ErrorModel,
    pub mitigation: MitigationPolicy,
}

/// One circuit element.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Fixed(FixedGate),
    Rotation(ParamRotation),
}

/// An ordered gate list on a fixed-width register.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub ops: Vec<GateOp>,
}

impl CircuitSpec {
    /// Number of parameterized rotations.
    pub fn nu(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, GateOp::Rotation(_)))
            .count()
    }

    pub fn rotations(&self) -> impl Iterator<Item = &ParamRotation> {
        self.ops.iter().filter_map(|op| match op {
            GateOp::Rotation(r) => Some(r),
            GateOp::Fixed(_) => None,
        })
    }

    /// Evolve |0…0⟩ under the ideal circuit (errors ignored).
    pub fn evolve_exact(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        for op in &self.ops {
            match op {
                GateOp::Fixed(g) => state.apply_fixed_gate(*g)?,
                GateOp::Rotation(r) => state.apply_pauli_rotation(&r.generator, r.theta)?,
            }
        }
        Ok(state)
    }

    /// Evolve |0…0⟩ under one realization of the noisy circuit (errors
    /// applied, no mitigation). Randomized error models draw from `rng`.
    pub fn evolve_noisy<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        for op in &self.ops {
            match op {
                GateOp::Fixed(g) => state.apply_fixed_gate(*g)?,
                GateOp::Rotation(r) => {
                    state.apply_pauli_rotation(&r.generator, r.theta)?;
                    crate::noise::apply_error(&mut state, &r.error, &r.generator, rng)?;
                }
            }
        }
        Ok(state)
    }

    /// Γ_c: the product of one-norms of the mitigation coefficients over
    /// all mixture-sampled rotations. This is the constant magnitude every
    /// weighted sample carries.
    pub fn gamma_product(&self) -> Result<f64> {
        let mut product = 1.0;
        for r in self.rotations() {
            if r.mitigation.uses_mixture() {
                product *= mixture::gamma_default(r.error.mitigation_epsilon())?.one_norm;
            }
        }
        Ok(product)
    }

    /// Line-oriented text dump, one gate per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            match op {
                GateOp::Fixed(g) => {
                    let _ = writeln!(out, "{g}");
                }
                GateOp::Rotation(r) => {
                    let _ = write!(out, "{}", rotation_name(&r.generator));
                    let _ = write!(out, " {:.6}", r.theta);
                    match r.error {
                        ErrorModel::None => {}
                        ErrorModel::ConstantOverrotation { epsilon } => {
                            let _ = write!(out, " eps={epsilon}");
                        }
                        ErrorModel::UniformOverrotation {
                            epsilon0,
                            lo_factor,
                            hi_factor,
                        } => {
                            let _ = write!(out, " eps=U({epsilon0},{lo_factor},{hi_factor})");
                        }
                        ErrorModel::Unstructured {
                            eps_x,
                            eps_y,
                            eps_z,
                        } => {
                            let _ = write!(out, " eps=[{eps_x},{eps_y},{eps_z}]");
                        }
                    }
                    if r.mitigation != MitigationPolicy::Off {
                        let _ = write!(out, " policy={}", r.mitigation.label());
                    }
                    let _ = writeln!(out);
                }
            }
        }
        out
    }
}

fn rotation_name(p: &PauliString) -> String {
    if let Some((q, axis)) = p.single_support() {
        let name = match axis {
            Axis::X => "RX",
            Axis::Y => "RY",
            Axis::Z => "RZ",
        };
        let mut s = String::new();
        let _ = write!(s, "{name} {q}");
        return s;
    }
    // XX bond: name the two supported qubits.
    if p.z_mask() == 0 && p.x_mask().count_ones() == 2 {
        let a = p.x_mask().trailing_zeros();
        let b = 63 - p.x_mask().leading_zeros();
        let mut s = String::new();
        let _ = write!(s, "RXX {a} {b}");
        return s;
    }
    let mut s = String::new();
    let _ = write!(s, "R {}", p.to_text());
    s
}

/// First-order Trotter circuit for the periodic transverse-Ising-like
/// Hamiltonian `h·ΣY_i + J·ΣX_iX_{i+1}`: each step applies N rotations
/// `R_y(2hT/L)` and then the N bond rotations `R_xx(2JT/L)` in index order
/// (0,1), (1,2), …, (N−1,0).
pub fn build_trotter_ising(
    n_qubits: usize,
    steps: usize,
    time: f64,
    field_h: f64,
    coupling_j: f64,
) -> Result<CircuitSpec> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument(
            "periodic coupling needs at least 2 qubits",
        ));
    }
    if steps < 1 {
        return Err(Error::InvalidArgument("at least one Trotter step required"));
    }
    let y_angle = 2.0 * field_h * time / steps as f64;
    let xx_angle = 2.0 * coupling_j * time / steps as f64;
    let mut ops = Vec::with_capacity(steps * 2 * n_qubits);
    for _ in 0..steps {
        for q in 0..n_qubits {
            ops.push(GateOp::Rotation(ParamRotation {
                generator: PauliString::single(n_qubits, q, Axis::Y)?,
                theta: y_angle,
                error: ErrorModel::None,
                mitigation: MitigationPolicy::Off,
            }));
        }
        for q in 0..n_qubits {
            ops.push(GateOp::Rotation(ParamRotation {
                generator: PauliString::xx(n_qubits, q, (q + 1) % n_qubits)?,
                theta: xx_angle,
                error: ErrorModel::None,
                mitigation: MitigationPolicy::Off,
            }));
        }
    }
    Ok(CircuitSpec { n_qubits, ops })
}

/// Rewrite every rotation over a Clifford frame so that all parameterized
/// gates are single-qubit Z rotations:
/// `R_y(θ) → S†·H · R_z(θ) · H·S` (gate order in time) and
/// `R_xx(θ) on (i, j) → H_i H_j CNOT(i,j) · R_z(θ) on j · CNOT(i,j) H_i H_j`.
/// Existing Z rotations pass through; other generators are rejected.
pub fn compile_to_rz(circuit: &CircuitSpec) -> Result<CircuitSpec> {
    let n = circuit.n_qubits;
    let mut ops = Vec::with_capacity(circuit.ops.len() * 4);
    for op in &circuit.ops {
        match op {
            GateOp::Fixed(g) => ops.push(GateOp::Fixed(*g)),
            GateOp::Rotation(r) => match classify_generator(&r.generator) {
                Generator::SingleZ => ops.push(GateOp::Rotation(r.clone())),
                Generator::SingleY(q) => {
                    ops.push(GateOp::Fixed(FixedGate::Sdg(q)));
                    ops.push(GateOp::Fixed(FixedGate::H(q)));
                    ops.push(GateOp::Rotation(ParamRotation {
                        generator: PauliString::single(n, q, Axis::Z)?,
                        theta: r.theta,
                        error: r.error,
                        mitigation: r.mitigation,
                    }));
                    ops.push(GateOp::Fixed(FixedGate::H(q)));
                    ops.push(GateOp::Fixed(FixedGate::S(q)));
                }
                Generator::Xx(a, b) => {
                    ops.push(GateOp::Fixed(FixedGate::H(a)));
                    ops.push(GateOp::Fixed(FixedGate::H(b)));
                    ops.push(GateOp::Fixed(FixedGate::Cnot(a, b)));
                    ops.push(GateOp::Rotation(ParamRotation {
                        generator: PauliString::single(n, b, Axis::Z)?,
                        theta: r.theta,
                        error: r.error,
                        mitigation: r.mitigation,
                    }));
                    ops.push(GateOp::Fixed(FixedGate::Cnot(a, b)));
                    ops.push(GateOp::Fixed(FixedGate::H(a)));
                    ops.push(GateOp::Fixed(FixedGate::H(b)));
                }
                Generator::Other => {
                    return Err(Error::UnsupportedGenerator {
                        context: "compile_to_rz",
                    })
                }
            },
        }
    }
    Ok(CircuitSpec { n_qubits: n, ops })
}

enum Generator {
    SingleZ,
    SingleY(usize),
    Xx(usize, usize),
    Other,
}

fn classify_generator(p: &PauliString) -> Generator {
    if let Some((q, axis)) = p.single_support() {
        return match axis {
            Axis::Z => {
                let _ = q;
                Generator::SingleZ
            }
            Axis::Y => Generator::SingleY(q),
            Axis::X => Generator::Other,
        };
    }
    if p.z_mask() == 0 && p.x_mask().count_ones() == 2 {
        let a = p.x_mask().trailing_zeros() as usize;
        let b = (63 - p.x_mask().leading_zeros()) as usize;
        return Generator::Xx(a, b);
    }
    Generator::Other
}

/// Attach one error model and one mitigation policy to every rotation.
/// Clifford frame gates stay error-free.
pub fn attach_errors(
    circuit: &CircuitSpec,
    model: ErrorModel,
    policy: MitigationPolicy,
) -> Result<CircuitSpec> {
    for r in circuit.rotations() {
        let single = r.generator.single_support();
        if matches!(model, ErrorModel::Unstructured { .. }) && !matches!(single, Some((_, Axis::Z)))
        {
            return Err(Error::PolicyMismatch {
                detail: "unstructured errors need a compiled Rz-only circuit",
            });
        }
        if policy.uses_twirl() && single.is_none() {
            return Err(Error::PolicyMismatch {
                detail: "twirling needs single-qubit rotation generators",
            });
        }
    }
    let ops = circuit
        .ops
        .iter()
        .map(|op| match op {
            GateOp::Fixed(g) => GateOp::Fixed(*g),
            GateOp::Rotation(r) => GateOp::Rotation(ParamRotation {
                generator: r.generator,
                theta: r.theta,
                error: model,
                mitigation: policy,
            }),
        })
        .collect();
    Ok(CircuitSpec {
        n_qubits: circuit.n_qubits,
        ops,
    })
}

/// A gate in a fully resolved circuit instance.
#[derive(Debug, Clone, PartialEq)]
pub enum ConcreteOp {
    Fixed(FixedGate),
    Rotation { generator: PauliString, angle: f64 },
}

/// One sampled circuit realization with its estimator bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledInstance {
    pub n_qubits: usize,
    pub ops: Vec<ConcreteOp>,
    /// Product of the signs of the sampled mixture coefficients, ±1.
    pub sign: f64,
    /// Γ_c = product of per-gate coefficient one-norms; ≥ 1.
    pub weight: f64,
    /// Number of ±π/4 branch insertions (extra T-type rotations).
    pub t_insertions: u32,
}

impl SampledInstance {
    /// Evolve |0…0⟩ through the concrete gate list.
    pub fn evolve(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        for op in &self.ops {
            match op {
                ConcreteOp::Fixed(g) => state.apply_fixed_gate(*g)?,
                ConcreteOp::Rotation { generator, angle } => {
                    state.apply_pauli_rotation(generator, *angle)?
                }
            }
        }
        Ok(state)
    }
}

/// The resolved random choices for one rotation, used both by the sampler
/// and by the oracle's exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationChoice {
    /// Mixture branch in {1, 2, 3}; 1 for policies without mixture.
    pub branch: u8,
    /// Conjugate the noisy gate by the generator (the non-identity twirl
    /// element). Always false for policies without twirling.
    pub twirl_conjugate: bool,
    /// The concrete error realization.
    pub resolved: ResolvedError,
}

struct PreparedRotation<'c> {
    rotation: &'c ParamRotation,
    /// Mitigation coefficients, present iff the policy samples branches.
    gamma: Option<GammaTriple>,
}

/// A circuit with its per-rotation mitigation coefficients computed once,
/// ready for repeated instance sampling. Immutable and shareable across
/// worker threads.
pub struct PreparedCircuit<'c> {
    circuit: &'c CircuitSpec,
    rotations: Vec<PreparedRotation<'c>>,
}

impl<'c> PreparedCircuit<'c> {
    /// Validate the circuit and precompute the coefficients. Rotations
    /// carrying an error but no mitigation are rejected: sampling them
    /// would silently bias the estimator.
    pub fn new(circuit: &'c CircuitSpec) -> Result<Self> {
        let rotations = circuit
            .rotations()
            .map(|r| {
                if r.mitigation == MitigationPolicy::Off && !r.error.is_none() {
                    return Err(Error::UnmitigatedRotation);
                }
                let gamma = if r.mitigation.uses_mixture() {
                    Some(mixture::gamma_default(r.error.mitigation_epsilon())?)
                } else {
                    None
                };
                Ok(PreparedRotation { rotation: r, gamma })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { circuit, rotations })
    }

    pub fn circuit(&self) -> &CircuitSpec {
        self.circuit
    }

    /// Per-rotation mitigation coefficients (None where the policy does not
    /// sample branches).
    pub fn gammas(&self) -> impl Iterator<Item = Option<&GammaTriple>> {
        self.rotations.iter().map(|p| p.gamma.as_ref())
    }

    /// Γ_c over the prepared rotations.
    pub fn gamma_product(&self) -> f64 {
        self.rotations
            .iter()
            .filter_map(|p| p.gamma.as_ref())
            .map(|g| g.one_norm)
            .product()
    }

    /// Draw the per-rotation choices in the fixed order: error realization,
    /// twirl element, mixture branch.
    pub fn sample_choices<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<RotationChoice> {
        self.rotations
            .iter()
            .map(|prep| {
                let resolved = prep.rotation.error.resolve(rng);
                let twirl_conjugate = if prep.rotation.mitigation.uses_twirl() {
                    rng.next_u64() & 1 == 1
                } else {
                    false
                };
                let branch = match &prep.gamma {
                    Some(gamma) => mixture::sample_branch(gamma, rng).index,
                    None => 1,
                };
                RotationChoice {
                    branch,
                    twirl_conjugate,
                    resolved,
                }
            })
            .collect()
    }

    /// Draw one instance.
    pub fn sample_instance<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<SampledInstance> {
        let choices = self.sample_choices(rng);
        self.materialize(&choices)
    }

    /// Build the concrete gate list for a fixed set of per-rotation
    /// choices; sign, weight and T-insertion count come from the chosen
    /// branches' coefficients.
    pub fn materialize(&self, choices: &[RotationChoice]) -> Result<SampledInstance> {
        if choices.len() != self.rotations.len() {
            return Err(Error::InvalidArgument(
                "one choice per parameterized rotation required",
            ));
        }
        let n = self.circuit.n_qubits;
        let mut ops = Vec::with_capacity(self.circuit.ops.len() * 2);
        let mut rotation_idx = 0usize;
        let mut sign = 1.0;
        let mut weight = 1.0;
        let mut t_insertions = 0u32;

        for op in &self.circuit.ops {
            match op {
                GateOp::Fixed(g) => ops.push(ConcreteOp::Fixed(*g)),
                GateOp::Rotation(r) => {
                    let choice = &choices[rotation_idx];
                    let prep = &self.rotations[rotation_idx];
                    rotation_idx += 1;

                    let twirl_gate = if choice.twirl_conjugate {
                        let (q, axis) = r.generator.single_support().ok_or(
                            Error::SingleQubitSupportRequired {
                                context: "twirl insertion",
                            },
                        )?;
                        Some(match axis {
                            Axis::X => FixedGate::X(q),
                            Axis::Y => FixedGate::Y(q),
                            Axis::Z => FixedGate::Z(q),
                        })
                    } else {
                        None
                    };

                    if let Some(g) = twirl_gate {
                        ops.push(ConcreteOp::Fixed(g));
                    }
                    // The noisy gate: along-generator errors fold into the
                    // rotation angle, axis errors follow as own rotations.
                    match choice.resolved {
                        ResolvedError::None => ops.push(ConcreteOp::Rotation {
                            generator: r.generator,
                            angle: r.theta,
                        }),
                        ResolvedError::AlongGenerator { epsilon } => {
                            ops.push(ConcreteOp::Rotation {
                                generator: r.generator,
                                angle: r.theta + epsilon,
                            })
                        }
                        ResolvedError::Xyz {
                            eps_x,
                            eps_y,
                            eps_z,
                        } => {
                            ops.push(ConcreteOp::Rotation {
                                generator: r.generator,
                                angle: r.theta,
                            });
                            let (q, _) = r.generator.single_support().ok_or(
                                Error::SingleQubitSupportRequired {
                                    context: "unstructured error",
                                },
                            )?;
                            for (axis, angle) in
                                [(Axis::X, eps_x), (Axis::Y, eps_y), (Axis::Z, eps_z)]
                            {
                                if angle != 0.0 {
                                    ops.push(ConcreteOp::Rotation {
                                        generator: PauliString::single(n, q, axis)?,
                                        angle,
                                    });
                                }
                            }
                        }
                    }
                    if let Some(g) = twirl_gate {
                        ops.push(ConcreteOp::Fixed(g));
                    }

                    if let Some(gamma) = &prep.gamma {
                        let g = gamma.as_array();
                        let idx = choice.branch as usize - 1;
                        sign *= if g[idx] < 0.0 { -1.0 } else { 1.0 };
                        weight *= gamma.one_norm;
                        let offset = gamma.offsets()[idx];
                        if choice.branch == 2 {
                            t_insertions += 1;
                        }
                        if choice.branch != 1 && offset != 0.0 {
                            ops.push(ConcreteOp::Rotation {
                                generator: r.generator,
                                angle: offset,
                            });
                        }
                    } else if choice.branch != 1 {
                        return Err(Error::InvalidArgument(
                            "branch choices require a mixture policy",
                        ));
                    }
                }
            }
        }

        debug_assert!(weight >= 1.0 - 1e-12);
        Ok(SampledInstance {
            n_qubits: n,
            ops,
            sign,
            weight,
            t_insertions,
        })
    }
}

/// Draw one circuit instance: per rotation, resolve the error model, draw a
/// twirl element where the policy asks for one, and draw a mixture branch
/// with probability |γ_i|/‖γ‖₁, accumulating sign and weight.
pub fn sample_instance<R: RngCore + ?Sized>(
    circuit: &CircuitSpec,
    rng: &mut R,
) -> Result<SampledInstance> {
    PreparedCircuit::new(circuit)?.sample_instance(rng)
}

/// Convenience: `one_norm_closed_form(ε)^ν`, the instance weight of a
/// circuit whose ν rotations all carry the same mitigation ε.
pub fn uniform_weight(epsilon: f64, nu: usize) -> f64 {
    math::powi(mixture::one_norm_closed_form(epsilon), nu as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn trotter_structure_and_gate_count() {
        let c = build_trotter_ising(5, 1, 0.1, 1.0, 1.0).unwrap();
        assert_eq!(c.nu(), 10);
        let dump = c.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 10);
        for (q, line) in lines[..5].iter().enumerate() {
            assert_eq!(*line, alloc::format!("RY {q} 0.200000"));
        }
        assert_eq!(lines[5], "RXX 0 1 0.200000");
        assert_eq!(lines[6], "RXX 1 2 0.200000");
        assert_eq!(lines[7], "RXX 2 3 0.200000");
        assert_eq!(lines[8], "RXX 3 4 0.200000");
        assert_eq!(lines[9], "RXX 0 4 0.200000");

        assert_eq!(
            build_trotter_ising(15, 70, 1.0, 1.0, 1.0).unwrap().nu(),
            2100
        );
        let c = build_trotter_ising(12, 24, 0.8, 1.0, 1.0).unwrap();
        assert_eq!(c.nu(), 576);
        approx(c.rotations().next().unwrap().theta, 2.0 * 0.8 / 24.0, 1e-15);

        assert!(build_trotter_ising(1, 1, 1.0, 1.0, 1.0).is_err());
        assert!(build_trotter_ising(3, 0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn compile_emits_expected_frames() {
        let c = build_trotter_ising(2, 1, 0.3, 1.0, 1.0).unwrap();
        let compiled = compile_to_rz(&c).unwrap();
        assert_eq!(compiled.nu(), c.nu());
        for r in compiled.rotations() {
            let (_, axis) = r.generator.single_support().unwrap();
            assert_eq!(axis, Axis::Z);
        }
        // 2 Ry -> 5 ops each, 2 XX bonds -> 7 ops each.
        assert_eq!(compiled.ops.len(), 2 * 5 + 2 * 7);

        // Unitary equivalence on the full parity observable.
        let obs = PauliString::z_all(2);
        let a = c.evolve_exact().unwrap().expectation_pauli(&obs).unwrap();
        let b = compiled
            .evolve_exact()
            .unwrap()
            .expectation_pauli(&obs)
            .unwrap();
        approx(a, b, 1e-10);
    }

    #[test]
    fn compile_preserves_parity_for_random_circuits() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = 2 + (rng.next_u64() % 3) as usize;
            let l = 1 + (rng.next_u64() % 3) as usize;
            let t = crate::math::uniform_range(&mut rng, 0.1, 1.4);
            let c = build_trotter_ising(n, l, t, 1.0, 1.0).unwrap();
            let compiled = compile_to_rz(&c).unwrap();
            let obs = PauliString::z_all(n);
            let a = c.evolve_exact().unwrap().expectation_pauli(&obs).unwrap();
            let b = compiled
                .evolve_exact()
                .unwrap()
                .expectation_pauli(&obs)
                .unwrap();
            approx(a, b, 1e-10);
        }
    }

    #[test]
    fn compile_rejects_unsupported_generators() {
        let c = CircuitSpec {
            n_qubits: 1,
            ops: alloc::vec![GateOp::Rotation(ParamRotation {
                generator: PauliString::single(1, 0, Axis::X).unwrap(),
                theta: 0.2,
                error: ErrorModel::None,
                mitigation: MitigationPolicy::Off,
            })],
        };
        assert!(matches!(
            compile_to_rz(&c),
            Err(Error::UnsupportedGenerator { .. })
        ));
    }

    #[test]
    fn attach_errors_validations() {
        let c = build_trotter_ising(3, 1, 0.5, 1.0, 1.0).unwrap();
        let unchanged = attach_errors(&c, ErrorModel::None, MitigationPolicy::Off).unwrap();
        assert_eq!(unchanged, c);

        // Unstructured errors require the compiled circuit.
        let model = ErrorModel::Unstructured {
            eps_x: 1e-3,
            eps_y: 0.0,
            eps_z: 1e-3,
        };
        assert!(matches!(
            attach_errors(&c, model, MitigationPolicy::Mixture),
            Err(Error::PolicyMismatch { .. })
        ));
        let compiled = compile_to_rz(&c).unwrap();
        let noisy = attach_errors(&compiled, model, MitigationPolicy::MixtureTwirl).unwrap();
        assert_eq!(noisy.nu(), c.nu());

        // Twirling multi-qubit generators is rejected on the raw circuit.
        assert!(matches!(
            attach_errors(
                &c,
                ErrorModel::ConstantOverrotation { epsilon: 1e-3 },
                MitigationPolicy::MixtureTwirl
            ),
            Err(Error::PolicyMismatch { .. })
        ));
        // Plain mixture on the raw circuit is fine.
        assert!(attach_errors(
            &c,
            ErrorModel::ConstantOverrotation { epsilon: 1e-3 },
            MitigationPolicy::Mixture
        )
        .is_ok());
    }

    #[test]
    fn zero_error_instances_are_the_plain_circuit() {
        let c = build_trotter_ising(3, 2, 0.4, 1.0, 1.0).unwrap();
        let mitigated = attach_errors(
            &c,
            ErrorModel::ConstantOverrotation { epsilon: 0.0 },
            MitigationPolicy::Mixture,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let inst = sample_instance(&mitigated, &mut rng).unwrap();
        assert_eq!(inst.sign, 1.0);
        approx(inst.weight, 1.0, 1e-15);
        assert_eq!(inst.t_insertions, 0);
        assert_eq!(inst.ops.len(), c.ops.len());
        let obs = PauliString::z_all(3);
        approx(
            inst.evolve().unwrap().expectation_pauli(&obs).unwrap(),
            c.evolve_exact().unwrap().expectation_pauli(&obs).unwrap(),
            1e-12,
        );
    }

    #[test]
    fn sampling_rejects_unmitigated_errored_rotations() {
        let c = build_trotter_ising(2, 1, 0.4, 1.0, 1.0).unwrap();
        let noisy = attach_errors(
            &c,
            ErrorModel::ConstantOverrotation { epsilon: 0.01 },
            MitigationPolicy::Off,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        assert!(matches!(
            sample_instance(&noisy, &mut rng),
            Err(Error::UnmitigatedRotation)
        ));
    }

    #[test]
    fn instance_weight_is_one_norm_power() {
        let eps = 0.02;
        let c = build_trotter_ising(4, 3, 0.7, 1.0, 1.0).unwrap();
        let mitigated = attach_errors(
            &c,
            ErrorModel::ConstantOverrotation { epsilon: eps },
            MitigationPolicy::Mixture,
        )
        .unwrap();
        let nu = mitigated.nu();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let inst = sample_instance(&mitigated, &mut rng).unwrap();
        approx(inst.weight, uniform_weight(eps, nu), 1e-12);
        approx(
            mitigated.gamma_product().unwrap(),
            uniform_weight(eps, nu),
            1e-12,
        );
        assert!(inst.weight >= 1.0);

        // Rotation ops: ν noisy rotations plus 0..=ν corrections.
        let rot_count = inst
            .ops
            .iter()
            .filter(|op| matches!(op, ConcreteOp::Rotation { .. }))
            .count();
        assert!(rot_count >= nu && rot_count <= 2 * nu);
    }

    #[test]
    fn twirl_gates_come_in_pairs() {
        let c = build_trotter_ising(3, 2, 0.5, 1.0, 1.0).unwrap();
        let compiled = compile_to_rz(&c).unwrap();
        let mitigated = attach_errors(
            &compiled,
            ErrorModel::Unstructured {
                eps_x: 0.01,
                eps_y: 0.02,
                eps_z: 0.005,
            },
            MitigationPolicy::MixtureTwirl,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let inst = sample_instance(&mitigated, &mut rng).unwrap();
        let z_gates = inst
            .ops
            .iter()
            .filter(|op| matches!(op, ConcreteOp::Fixed(FixedGate::Z(_))))
            .count();
        assert_eq!(z_gates % 2, 0, "twirl conjugation inserts Z gates in pairs");
        assert!(inst.weight > 1.0);
    }

    #[test]
    fn dump_includes_error_and_policy() {
        let c = build_trotter_ising(2, 1, 0.4, 1.0, 1.0).unwrap();
        let compiled = compile_to_rz(&c).unwrap();
        let mitigated = attach_errors(
            &compiled,
            ErrorModel::ConstantOverrotation { epsilon: 0.003 },
            MitigationPolicy::MixtureTwirl,
        )
        .unwrap();
        let dump = mitigated.dump();
        assert!(dump.contains("RZ 0 0.800000 eps=0.003 policy=mix+twirl"));
        assert!(dump.contains("H 0"));
        assert!(dump.contains("CNOT 0 1"));
    }
}
