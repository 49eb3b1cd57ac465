//! Coherent error models and Pauli-twirl sampling.
//!
//! A noisy rotation is the ideal gate followed by a unitary error. The
//! models here cover a constant over-rotation along the gate's own
//! generator, a per-gate uniform over-rotation with known mean, and the
//! unstructured three-axis error `Rz(εz)·Ry(εy)·Rx(εx)` that stands in for
//! finite-gate-set synthesis residuals. For a given approximate unitary the
//! three axis angles can be extracted exactly.

use num_complex::Complex64;
use rand_core::RngCore;

use crate::math;
use crate::pauli::{Axis, PauliString};
use crate::statevec::StateVector;
use crate::{Error, Result};

/// Default lower bound factor of the uniform over-rotation interval.
pub const UNIFORM_LO_FACTOR: f64 = -1.0;
/// Default upper bound factor of the uniform over-rotation interval.
pub const UNIFORM_HI_FACTOR: f64 = 3.0;

/// Coherent error attached to a parameterized rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorModel {
    /// No error.
    None,
    /// Fixed over-rotation by `epsilon` along the gate's generator.
    ConstantOverrotation { epsilon: f64 },
    /// Per-gate over-rotation drawn uniformly from
    /// `[lo_factor·epsilon0, hi_factor·epsilon0]`; with the default factors
    /// (−1, 3) the mean is `epsilon0`, the value used for mitigation.
    UniformOverrotation {
        epsilon0: f64,
        lo_factor: f64,
        hi_factor: f64,
    },
    /// Three-axis unitary error applied after the gate, on the gate's qubit.
    Unstructured { eps_x: f64, eps_y: f64, eps_z: f64 },
}

/// A concrete error realization for one gate in one circuit instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedError {
    None,
    /// Extra rotation by this angle along the gate's own generator.
    AlongGenerator {
        epsilon: f64,
    },
    /// Axis rotations applied in X, then Y, then Z order.
    Xyz {
        eps_x: f64,
        eps_y: f64,
        eps_z: f64,
    },
}

impl ErrorModel {
    /// Uniform over-rotation with the default interval factors.
    pub fn uniform(epsilon0: f64) -> Self {
        ErrorModel::UniformOverrotation {
            epsilon0,
            lo_factor: UNIFORM_LO_FACTOR,
            hi_factor: UNIFORM_HI_FACTOR,
        }
    }

    /// Draw the concrete per-gate realization. Only the uniform model
    /// consumes randomness.
    pub fn resolve<R: RngCore + ?Sized>(&self, rng: &mut R) -> ResolvedError {
        match *self {
            ErrorModel::None => ResolvedError::None,
            ErrorModel::ConstantOverrotation { epsilon } => {
                ResolvedError::AlongGenerator { epsilon }
            }
            ErrorModel::UniformOverrotation {
                epsilon0,
                lo_factor,
                hi_factor,
            } => {
                let (a, b) = (lo_factor * epsilon0, hi_factor * epsilon0);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                ResolvedError::AlongGenerator {
                    epsilon: math::uniform_range(rng, lo, hi),
                }
            }
            ErrorModel::Unstructured {
                eps_x,
                eps_y,
                eps_z,
            } => ResolvedError::Xyz {
                eps_x,
                eps_y,
                eps_z,
            },
        }
    }

    /// The over-rotation angle the mitigation coefficients are built from:
    /// the exact ε for the constant model, the mean ε₀ for the uniform
    /// model, and the Z component for the unstructured model (the X and Y
    /// components are left to twirling).
    pub fn mitigation_epsilon(&self) -> f64 {
        match *self {
            ErrorModel::None => 0.0,
            ErrorModel::ConstantOverrotation { epsilon } => epsilon,
            ErrorModel::UniformOverrotation { epsilon0, .. } => epsilon0,
            ErrorModel::Unstructured { eps_z, .. } => eps_z,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, ErrorModel::None)
    }
}

/// Build the unstructured model from a total rotation angle and a unit
/// direction: ε_α = η_α·ε, so the components satisfy
/// ε_x² + ε_y² + ε_z² = ε².
pub fn build_unstructured(epsilon: f64, direction: [f64; 3]) -> Result<ErrorModel> {
    let norm = math::sqrt(
        direction[0] * direction[0] + direction[1] * direction[1] + direction[2] * direction[2],
    );
    if math::abs(norm - 1.0) > 1e-10 {
        return Err(Error::NonUnitDirection { norm });
    }
    Ok(ErrorModel::Unstructured {
        eps_x: epsilon * direction[0],
        eps_y: epsilon * direction[1],
        eps_z: epsilon * direction[2],
    })
}

/// Operator-norm distance ‖I − U'‖ of a rotation error through angle ε,
/// the scalar form of the synthesis-accuracy relation: 2·sin(|ε|/4) < ζ.
pub fn approx_error_norm(epsilon: f64) -> f64 {
    2.0 * math::sin(math::abs(epsilon) / 4.0)
}

/// Apply the error realization that `model` draws for this gate, acting
/// after the ideal gate. Along-generator errors rotate about
/// `target_pauli`; the three-axis error requires single-qubit support.
pub fn apply_error<R: RngCore + ?Sized>(
    state: &mut StateVector,
    model: &ErrorModel,
    target_pauli: &PauliString,
    rng: &mut R,
) -> Result<()> {
    match model.resolve(rng) {
        ResolvedError::None => Ok(()),
        ResolvedError::AlongGenerator { epsilon } => {
            state.apply_pauli_rotation(target_pauli, epsilon)
        }
        ResolvedError::Xyz {
            eps_x,
            eps_y,
            eps_z,
        } => {
            let (qubit, _) =
                target_pauli
                    .single_support()
                    .ok_or(Error::SingleQubitSupportRequired {
                        context: "unstructured error",
                    })?;
            let n = state.n_qubits();
            for (axis, angle) in [(Axis::X, eps_x), (Axis::Y, eps_y), (Axis::Z, eps_z)] {
                if angle != 0.0 {
                    state.apply_pauli_rotation(&PauliString::single(n, qubit, axis)?, angle)?;
                }
            }
            Ok(())
        }
    }
}

/// One sampled twirl element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwirlDraw {
    /// Element of {I, P}; conjugates the noisy gate when non-identity.
    pub sigma: PauliString,
}

/// Draw uniformly from the two-element twirl group {I, P} of a
/// single-qubit-support generator.
pub fn sample_twirl<R: RngCore + ?Sized>(
    generator: &PauliString,
    rng: &mut R,
) -> Result<TwirlDraw> {
    let [identity, p] = generator.commuting_subgroup()?;
    let sigma = if rng.next_u64() & 1 == 0 { identity } else { p };
    Ok(TwirlDraw { sigma })
}

// ---------------------------------------------------------------------------
// Error-angle extraction from a given approximate unitary.
// ---------------------------------------------------------------------------

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat2_dagger(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// e^{-iθ/2 Z}.
pub fn rz_matrix(theta: f64) -> Mat2 {
    let half = theta / 2.0;
    [
        [
            Complex64::new(math::cos(half), -math::sin(half)),
            Complex64::ZERO,
        ],
        [
            Complex64::ZERO,
            Complex64::new(math::cos(half), math::sin(half)),
        ],
    ]
}

/// e^{-iθ/2 Y}.
pub fn ry_matrix(theta: f64) -> Mat2 {
    let (c, s) = (math::cos(theta / 2.0), math::sin(theta / 2.0));
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// e^{-iθ/2 X}.
pub fn rx_matrix(theta: f64) -> Mat2 {
    let (c, s) = (math::cos(theta / 2.0), math::sin(theta / 2.0));
    [
        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ]
}

fn unitarity_deviation(m: &Mat2) -> f64 {
    let prod = mat2_mul(&mat2_dagger(m), m);
    let mut dev: f64 = 0.0;
    for (i, row) in prod.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            dev = dev.max((*v - target).norm());
        }
    }
    dev
}

/// Extract the ZYX error angles of `approx_unitary` relative to the ideal
/// `Rz(ideal_theta)`: with `U' = V·Rz(θ)†` stripped of its global phase,
/// returns (ε_x, ε_y, ε_z) such that `Rz(ε_z)·Ry(ε_y)·Rx(ε_x) = U'` exactly.
pub fn extract_error_angles(ideal_theta: f64, approx_unitary: &Mat2) -> Result<(f64, f64, f64)> {
    let dev = unitarity_deviation(approx_unitary);
    if dev > 1e-10 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    let w = mat2_mul(approx_unitary, &mat2_dagger(&rz_matrix(ideal_theta)));

    // Map to SU(2): divide by a square root of the determinant and pick the
    // representative with non-negative real trace.
    let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
    let root = det.sqrt();
    let mut p = w[0][0] / root;
    let mut q = w[1][0] / root;
    if p.re + (w[1][1] / root).re < 0.0 {
        p = -p;
        q = -q;
    }

    // Rotation angle of the error; reject outside the small-angle regime
    // ‖I − U'‖ ≤ 0.5.
    let half_trace = p.re.clamp(-1.0, 1.0);
    let rotation = 2.0
        * math::atan2(
            math::sqrt((1.0 - half_trace * half_trace).max(0.0)),
            half_trace,
        );
    if 2.0 * math::sin(rotation / 4.0) > 0.5 {
        return Err(Error::OutOfRegime {
            what: "error rotation angle",
            value: rotation,
            limit: 4.0 * math::asin(0.25),
        });
    }

    // For W = Rz(εz)·Ry(εy)·Rx(εx) in SU(2), with p = W00 and q = W10,
    // the product p·q = (sin εy − i·sin εx·cos εy)/2 is phase-free and
    // |p|² − |q|² = cos εx·cos εy.
    let pq = p * q;
    let eps_y = math::asin((2.0 * pq.re).clamp(-1.0, 1.0));
    let eps_x = math::atan2(-2.0 * pq.im, p.norm_sqr() - q.norm_sqr());
    // arg(p) = −εz/2 + arg(cos(εy/2)cos(εx/2) + i·sin(εy/2)sin(εx/2)).
    let inner = math::atan2(
        math::sin(eps_y / 2.0) * math::sin(eps_x / 2.0),
        math::cos(eps_y / 2.0) * math::cos(eps_x / 2.0),
    );
    let mut eps_z = 2.0 * (inner - math::atan2(p.im, p.re));
    let two_pi = 2.0 * core::f64::consts::PI;
    eps_z -= two_pi * math::round(eps_z / two_pi);

    Ok((eps_x, eps_y, eps_z))
}
