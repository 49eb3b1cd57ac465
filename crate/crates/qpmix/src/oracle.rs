//! Exact reference implementations: dense matrices, superoperator algebra,
//! density-matrix channel evolution and exhaustive mixture enumeration.
//!
//! Nothing here samples. These paths verify the decomposition identities
//! and the estimator's unbiasedness at small scale, so they favor clarity
//! over speed. Vectorization is column-stacking: `vec(ρ)[i + d·j] = ρ[i,j]`,
//! hence `vec(AρB) = (Bᵀ ⊗ A)·vec(ρ)` and the channel of a unitary U is
//! `conj(U) ⊗ U`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::circuits::{CircuitSpec, GateOp, ParamRotation, PreparedCircuit, RotationChoice};
use crate::math;
use crate::mixture::{self, GammaTriple};
use crate::noise::{ErrorModel, ResolvedError};
use crate::pauli::PauliString;
use crate::statevec::FixedGate;
use crate::{Error, Result};

/// Refuse exhaustive enumeration past this many branch/twirl assignments.
pub const ENUMERATION_LIMIT: u128 = 2_000_000;

/// Density-matrix evolution cap: 64×64 matrices.
pub const DENSITY_MAX_QUBITS: usize = 6;

// ---------------------------------------------------------------------------
// Small dense complex matrices.
// ---------------------------------------------------------------------------

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &CMat, factor: Complex64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.data {
            *a *= factor;
        }
    }

    pub fn dagger(&self) -> CMat {
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn conj_elementwise(&self) -> CMat {
        let mut out = self.clone();
        for a in &mut out.data {
            *a = a.conj();
        }
        out
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let (da, db) = (self.dim, other.dim);
        let mut out = CMat::zeros(da * db);
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self[(i1, j1)];
                if a == Complex64::ZERO {
                    continue;
                }
                for i2 in 0..db {
                    for j2 in 0..db {
                        out[(i1 * db + i2, j1 * db + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude of `self − other`.
    pub fn max_entry_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    fn unitarity_deviation(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_entry_diff(&CMat::identity(self.dim))
    }

    /// Apply to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex64::ZERO; self.dim];
        for i in 0..self.dim {
            let mut acc = Complex64::ZERO;
            for j in 0..self.dim {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Matrix exponential by scaling-and-squaring over a plain Taylor series.
/// Independent of the closed rotation forms it is used to check.
pub fn expm_taylor(a: &CMat) -> CMat {
    let norm: f64 = (0..a.dim)
        .map(|i| (0..a.dim).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let mut scaled = a.clone();
    scaled.scale(Complex64::new(scale, 0.0));

    let mut result = CMat::identity(a.dim);
    let mut term = CMat::identity(a.dim);
    for k in 1..=24 {
        term = term.mul(&scaled);
        term.scale(Complex64::new(1.0 / k as f64, 0.0));
        result.add_scaled(&term, Complex64::ONE);
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}

// ---------------------------------------------------------------------------
// Dense Pauli and gate matrices.
// ---------------------------------------------------------------------------

/// Dense matrix of a Pauli string (phase-free: `i^{|Y|}·X^x·Z^z`).
pub fn pauli_dense(p: &PauliString) -> CMat {
    let n = p.n_qubits();
    assert!(n <= DENSITY_MAX_QUBITS + 2, "dense Pauli too large");
    let dim = 1usize << n;
    let mut m = CMat::zeros(dim);
    let x = p.x_mask() as usize;
    let z = p.z_mask();
    let ny = (p.x_mask() & z).count_ones();
    let i_pow = match ny % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    for b in 0..dim {
        let sign = if (b as u64 & z).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        };
        m[(b ^ x, b)] = i_pow * sign;
    }
    m
}

/// Dense rotation `exp(-i θ/2 P)` via the closed two-term form.
pub fn rotation_dense(p: &PauliString, theta: f64) -> CMat {
    let mut m = CMat::identity(1 << p.n_qubits());
    m.scale(Complex64::new(math::cos(theta / 2.0), 0.0));
    m.add_scaled(
        &pauli_dense(p),
        Complex64::new(0.0, -math::sin(theta / 2.0)),
    );
    m
}

/// Dense rotation built from the Taylor-series exponential, the slow
/// independent route.
pub fn rotation_dense_expm(p: &PauliString, theta: f64) -> CMat {
    let mut exponent = pauli_dense(p);
    exponent.scale(Complex64::new(0.0, -theta / 2.0));
    expm_taylor(&exponent)
}

fn single_qubit_dense(n: usize, q: usize, m2: &[[Complex64; 2]; 2]) -> CMat {
    let dim = 1usize << n;
    let mut m = CMat::zeros(dim);
    let bit = 1usize << q;
    for col in 0..dim {
        let jb = usize::from(col & bit != 0);
        for (ib, row_pair) in m2.iter().enumerate() {
            let row = if ib == 1 { col | bit } else { col & !bit };
            m[(row, col)] += row_pair[jb];
        }
    }
    m
}

/// Dense matrix of a fixed gate in an `n`-qubit register.
pub fn fixed_gate_dense(n: usize, g: FixedGate) -> Result<CMat> {
    g.validate(n)?;
    let f = core::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::ZERO;
    let o = Complex64::ONE;
    let single = |m2: [[Complex64; 2]; 2], q: usize| single_qubit_dense(n, q, &m2);
    Ok(match g {
        FixedGate::H(q) => single(
            [
                [Complex64::new(f, 0.0), Complex64::new(f, 0.0)],
                [Complex64::new(f, 0.0), Complex64::new(-f, 0.0)],
            ],
            q,
        ),
        FixedGate::S(q) => single([[o, z], [z, Complex64::new(0.0, 1.0)]], q),
        FixedGate::Sdg(q) => single([[o, z], [z, Complex64::new(0.0, -1.0)]], q),
        FixedGate::T(q) => single([[o, z], [z, Complex64::new(f, f)]], q),
        FixedGate::Tdg(q) => single([[o, z], [z, Complex64::new(f, -f)]], q),
        FixedGate::X(q) => single([[z, o], [o, z]], q),
        FixedGate::Y(q) => single(
            [
                [z, Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), z],
            ],
            q,
        ),
        FixedGate::Z(q) => single([[o, z], [z, -o]], q),
        FixedGate::Cnot(c, t) => {
            let dim = 1usize << n;
            let mut m = CMat::zeros(dim);
            let cbit = 1usize << c;
            let tbit = 1usize << t;
            for col in 0..dim {
                let row = if col & cbit != 0 { col ^ tbit } else { col };
                m[(row, col)] = o;
            }
            m
        }
    })
}

// ---------------------------------------------------------------------------
// Superoperators.
// ---------------------------------------------------------------------------

/// A linear map on vectorized density matrices (column-stacking).
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    /// d² for a d-dimensional Hilbert space.
    pub dim: usize,
    pub mat: CMat,
}

impl Superoperator {
    pub fn zeros(hilbert_dim: usize) -> Self {
        Self {
            dim: hilbert_dim * hilbert_dim,
            mat: CMat::zeros(hilbert_dim * hilbert_dim),
        }
    }

    pub fn identity(hilbert_dim: usize) -> Self {
        Self {
            dim: hilbert_dim * hilbert_dim,
            mat: CMat::identity(hilbert_dim * hilbert_dim),
        }
    }

    /// The map ρ → AρB as a superoperator: (Bᵀ ⊗ A).
    pub fn sandwich(a: &CMat, b: &CMat) -> Self {
        let bt = {
            let d = b.dim;
            let mut t = CMat::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    t[(i, j)] = b[(j, i)];
                }
            }
            t
        };
        Self {
            dim: a.dim * a.dim,
            mat: bt.kron(a),
        }
    }

    pub fn add_scaled(&mut self, other: &Superoperator, factor: f64) {
        self.mat.add_scaled(&other.mat, Complex64::new(factor, 0.0));
    }

    /// Composition: `self` after `other`.
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            mat: self.mat.mul(&other.mat),
        }
    }

    pub fn max_entry_diff(&self, other: &Superoperator) -> f64 {
        self.mat.max_entry_diff(&other.mat)
    }

    /// Apply to a density matrix.
    pub fn apply_to_density(&self, rho: &CMat) -> CMat {
        let d = rho.dim;
        let mut v = vec![Complex64::ZERO; d * d];
        for j in 0..d {
            for i in 0..d {
                v[i + d * j] = rho[(i, j)];
            }
        }
        let w = self.mat.apply(&v);
        let mut out = CMat::zeros(d);
        for j in 0..d {
            for i in 0..d {
                out[(i, j)] = w[i + d * j];
            }
        }
        out
    }
}

/// The channel ρ → uρu† of a unitary, `conj(u) ⊗ u`.
pub fn channel_of_unitary(u: &CMat) -> Result<Superoperator> {
    let dev = u.unitarity_deviation();
    if dev > 1e-10 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    Ok(Superoperator {
        dim: u.dim * u.dim,
        mat: u.conj_elementwise().kron(u),
    })
}

/// Channel of the rotation `exp(-iθ/2 P)`.
pub fn rotation_channel(p: &PauliString, theta: f64) -> Superoperator {
    channel_of_unitary(&rotation_dense(p, theta)).expect("rotations are unitary")
}

// ---------------------------------------------------------------------------
// Identity residuals.
// ---------------------------------------------------------------------------

/// Max-entry residual of the two-term unitary identity
/// `cos(ε/2)·R(θ+ε) − sin(ε/2)·R(θ+ε+π) = R(θ)`.
pub fn two_term_residual(p: &PauliString, theta: f64, epsilon: f64) -> f64 {
    let mut lhs = rotation_dense(p, theta + epsilon);
    lhs.scale(Complex64::new(math::cos(epsilon / 2.0), 0.0));
    lhs.add_scaled(
        &rotation_dense(p, theta + epsilon + core::f64::consts::PI),
        Complex64::new(-math::sin(epsilon / 2.0), 0.0),
    );
    lhs.max_entry_diff(&rotation_dense(p, theta))
}

/// Max-entry residual of the four-channel decomposition against the ideal
/// rotation channel.
pub fn four_term_residual(p: &PauliString, theta: f64, epsilon: f64) -> f64 {
    let dim = 1usize << p.n_qubits();
    let mut acc = Superoperator::zeros(dim);
    for (angle, weight) in mixture::four_term_weights(theta, epsilon) {
        acc.add_scaled(&rotation_channel(p, angle), weight);
    }
    acc.max_entry_diff(&rotation_channel(p, theta))
}

/// Max-entry residual of the signed three-channel mixture
/// `Σ γ_i · R(θ+ε+offset_i)` against `R(θ)`, for arbitrary offsets.
pub fn mixture_residual(
    p: &PauliString,
    theta: f64,
    epsilon: f64,
    offset_a: f64,
    offset_b: f64,
) -> Result<f64> {
    let triple = mixture::gamma_general(epsilon, offset_a, offset_b)?;
    Ok(mixture_residual_for(p, theta, &triple))
}

/// Residual for a precomputed coefficient triple.
pub fn mixture_residual_for(p: &PauliString, theta: f64, triple: &GammaTriple) -> f64 {
    let dim = 1usize << p.n_qubits();
    let mut acc = Superoperator::zeros(dim);
    for (gamma, offset) in triple.as_array().iter().zip(triple.offsets()) {
        acc.add_scaled(
            &rotation_channel(p, theta + triple.epsilon + offset),
            *gamma,
        );
    }
    acc.max_entry_diff(&rotation_channel(p, theta))
}

/// Single-qubit Z-rotation mixture residual for the given (ε, A, B).
pub fn verify_mixture_identity(
    theta: f64,
    epsilon: f64,
    offset_a: f64,
    offset_b: f64,
) -> Result<f64> {
    let z = PauliString::parse("Z").expect("static");
    mixture_residual(&z, theta, epsilon, offset_a, offset_b)
}

/// Max-entry residual of the cross-term identity
/// `R(a)(.)R†(a+π) + R(a+π)(.)R†(a) = R(a+π/2)(.)R†(a+π/2) − R(a−π/2)(.)R†(a−π/2)`
/// with a = θ+ε. The right side is the channel difference; this is the form
/// the four-channel decomposition rests on (the sum version fails by a full
/// unit, as conjugating by R(−π) = iP flips no sign).
pub fn cross_term_residual(p: &PauliString, theta: f64, epsilon: f64) -> f64 {
    let a = theta + epsilon;
    let pi = core::f64::consts::PI;
    let half_pi = core::f64::consts::FRAC_PI_2;
    let r = |angle: f64| rotation_dense(p, angle);

    let mut lhs = Superoperator::sandwich(&r(a), &r(a + pi).dagger());
    lhs.add_scaled(&Superoperator::sandwich(&r(a + pi), &r(a).dagger()), 1.0);
    let mut rhs = Superoperator::sandwich(&r(a + half_pi), &r(a + half_pi).dagger());
    rhs.add_scaled(
        &Superoperator::sandwich(&r(a - half_pi), &r(a - half_pi).dagger()),
        -1.0,
    );
    lhs.max_entry_diff(&rhs)
}

// ---------------------------------------------------------------------------
// Pauli transfer matrices and twirl averages.
// ---------------------------------------------------------------------------

/// Pauli transfer matrix of a single-qubit channel:
/// `T[a][b] = Tr[σ_a · Λ(σ_b)] / 2` over {I, X, Y, Z}.
pub fn pauli_transfer_matrix(channel: &Superoperator) -> [[f64; 4]; 4] {
    assert_eq!(channel.dim, 4, "PTM is defined for single-qubit channels");
    let paulis: [CMat; 4] = [
        CMat::identity(2),
        pauli_dense(&PauliString::parse("X").unwrap()),
        pauli_dense(&PauliString::parse("Y").unwrap()),
        pauli_dense(&PauliString::parse("Z").unwrap()),
    ];
    let mut t = [[0.0; 4]; 4];
    for (b, sigma_b) in paulis.iter().enumerate() {
        let mapped = channel.apply_to_density(sigma_b);
        for (a, sigma_a) in paulis.iter().enumerate() {
            let tr = sigma_a.mul(&mapped).trace();
            debug_assert!(tr.im.abs() < 1e-9);
            t[a][b] = tr.re / 2.0;
        }
    }
    t
}

/// Average of `σ·Λ(σ (.) σ)·σ` over the given Pauli elements.
pub fn twirl_average(channel: &Superoperator, elements: &[PauliString]) -> Superoperator {
    let n = elements[0].n_qubits();
    let dim = 1usize << n;
    let mut acc = Superoperator::zeros(dim);
    let weight = 1.0 / elements.len() as f64;
    for sigma in elements {
        let s = pauli_dense(sigma);
        let conj = Superoperator::sandwich(&s, &s.dagger());
        acc.add_scaled(&conj.compose(channel).compose(&conj), weight);
    }
    acc
}

// ---------------------------------------------------------------------------
// Density matrices.
// ---------------------------------------------------------------------------

/// Dense density matrix. Signed-mixture intermediates may be non-positive;
/// only the trace and Hermiticity are meaningful mid-circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub mat: CMat,
}

impl DensityMatrix {
    /// |0…0⟩⟨0…0|.
    pub fn zero(n: usize) -> Result<Self> {
        if !(1..=DENSITY_MAX_QUBITS).contains(&n) {
            return Err(Error::CapacityExceeded {
                requested: n,
                limit: DENSITY_MAX_QUBITS,
            });
        }
        let mut mat = CMat::zeros(1 << n);
        mat[(0, 0)] = Complex64::ONE;
        Ok(Self { n_qubits: n, mat })
    }

    pub fn apply_unitary(&mut self, u: &CMat) {
        self.mat = u.mul(&self.mat).mul(&u.dagger());
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.mat.max_entry_diff(&self.mat.dagger())
    }

    /// Tr[P ρ].
    pub fn expectation(&self, p: &PauliString) -> f64 {
        let tr = pauli_dense(p).mul(&self.mat).trace();
        debug_assert!(tr.im.abs() < 1e-9);
        tr.re
    }
}

// ---------------------------------------------------------------------------
// Exact mixture expectations.
// ---------------------------------------------------------------------------

fn deterministic_resolved(model: &ErrorModel) -> Result<ResolvedError> {
    match *model {
        ErrorModel::None => Ok(ResolvedError::None),
        ErrorModel::ConstantOverrotation { epsilon } => {
            Ok(ResolvedError::AlongGenerator { epsilon })
        }
        ErrorModel::Unstructured {
            eps_x,
            eps_y,
            eps_z,
        } => Ok(ResolvedError::Xyz {
            eps_x,
            eps_y,
            eps_z,
        }),
        ErrorModel::UniformOverrotation { .. } => Err(Error::UnresolvableErrorModel),
    }
}

struct RotationArity {
    branches: u8,
    twirls: u8,
    resolved: ResolvedError,
    gamma: Option<GammaTriple>,
}

fn rotation_arities(circuit: &CircuitSpec) -> Result<Vec<RotationArity>> {
    circuit
        .rotations()
        .map(|r| {
            if r.mitigation == crate::circuits::MitigationPolicy::Off && !r.error.is_none() {
                return Err(Error::UnmitigatedRotation);
            }
            let gamma = if r.mitigation.uses_mixture() {
                Some(mixture::gamma_default(r.error.mitigation_epsilon())?)
            } else {
                None
            };
            Ok(RotationArity {
                branches: if r.mitigation.uses_mixture() { 3 } else { 1 },
                twirls: if r.mitigation.uses_twirl() { 2 } else { 1 },
                resolved: deterministic_resolved(&r.error)?,
                gamma,
            })
        })
        .collect()
}

/// Exact expectation of the mitigated-circuit estimator by exhaustive
/// enumeration: `Σ_L Γ_L ⟨O⟩_L`, with the twirl average folded in as a
/// uniform 1/2 weight per twirled rotation. Equals the ideal expectation
/// when the mixture compensates the attached errors exactly.
pub fn exact_mixture_expectation_enumerated(
    circuit: &CircuitSpec,
    observable: &PauliString,
) -> Result<f64> {
    let arities = rotation_arities(circuit)?;
    let mut count: u128 = 1;
    for a in &arities {
        count = count.saturating_mul(a.branches as u128 * a.twirls as u128);
        if count > ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                count,
                limit: ENUMERATION_LIMIT,
            });
        }
    }
    let prepared = PreparedCircuit::new(circuit)?;

    let mut total = 0.0;
    let mut assignment = vec![(0u8, 0u8); arities.len()];
    loop {
        // Weight of this assignment: product of branch coefficients and the
        // 1/2 twirl probabilities.
        let mut weight = 1.0;
        let mut choices = Vec::with_capacity(arities.len());
        for ((branch_idx, twirl_idx), arity) in assignment.iter().zip(&arities) {
            if let Some(g) = &arity.gamma {
                weight *= g.as_array()[*branch_idx as usize];
            }
            if arity.twirls == 2 {
                weight *= 0.5;
            }
            choices.push(RotationChoice {
                branch: branch_idx + 1,
                twirl_conjugate: *twirl_idx == 1,
                resolved: arity.resolved,
            });
        }
        if weight != 0.0 {
            let instance = prepared.materialize(&choices)?;
            let state = instance.evolve()?;
            total += weight * state.expectation_pauli(observable)?;
        }

        // Next mixed-radix assignment.
        let mut pos = 0;
        loop {
            if pos == assignment.len() {
                return Ok(total);
            }
            let (ref mut b, ref mut t) = assignment[pos];
            *t += 1;
            if *t < arities[pos].twirls {
                break;
            }
            *t = 0;
            *b += 1;
            if *b < arities[pos].branches {
                break;
            }
            *b = 0;
            pos += 1;
        }
    }
}

/// Exact expectation by density-matrix evolution: every rotation applies
/// its signed-mixture (and twirl-averaged) map gate by gate. Polynomial in
/// ν, capped at [`DENSITY_MAX_QUBITS`] qubits.
pub fn exact_mixture_expectation_density(
    circuit: &CircuitSpec,
    observable: &PauliString,
) -> Result<f64> {
    let n = circuit.n_qubits;
    let mut rho = DensityMatrix::zero(n)?;
    for op in &circuit.ops {
        match op {
            GateOp::Fixed(g) => rho.apply_unitary(&fixed_gate_dense(n, *g)?),
            GateOp::Rotation(r) => {
                let map = rotation_mixture_map(n, r)?;
                rho.mat = map.apply_to_density(&rho.mat);
            }
        }
    }
    debug_assert!(rho.hermiticity_deviation() < 1e-9);
    Ok(rho.expectation(observable))
}

/// The signed-mixture superoperator of one mitigated rotation.
fn rotation_mixture_map(n: usize, r: &ParamRotation) -> Result<Superoperator> {
    if r.mitigation == crate::circuits::MitigationPolicy::Off && !r.error.is_none() {
        return Err(Error::UnmitigatedRotation);
    }
    let resolved = deterministic_resolved(&r.error)?;

    // The noisy gate as a dense unitary.
    let mut noisy = rotation_dense(&r.generator, r.theta);
    match resolved {
        ResolvedError::None => {}
        ResolvedError::AlongGenerator { epsilon } => {
            noisy = rotation_dense(&r.generator, epsilon).mul(&noisy);
        }
        ResolvedError::Xyz {
            eps_x,
            eps_y,
            eps_z,
        } => {
            let (q, _) = r
                .generator
                .single_support()
                .ok_or(Error::SingleQubitSupportRequired {
                    context: "unstructured error",
                })?;
            for (axis, angle) in [
                (crate::pauli::Axis::X, eps_x),
                (crate::pauli::Axis::Y, eps_y),
                (crate::pauli::Axis::Z, eps_z),
            ] {
                noisy = rotation_dense(&PauliString::single(n, q, axis)?, angle).mul(&noisy);
            }
        }
    }

    let gamma = if r.mitigation.uses_mixture() {
        Some(mixture::gamma_default(r.error.mitigation_epsilon())?)
    } else {
        None
    };
    let twirl_elems: Vec<PauliString> = if r.mitigation.uses_twirl() {
        r.generator.commuting_subgroup()?.to_vec()
    } else {
        vec![PauliString::identity(n)]
    };

    let dim = 1usize << n;
    let mut map = Superoperator::zeros(dim);
    let branch_list: Vec<(f64, f64)> = match &gamma {
        Some(g) => g
            .as_array()
            .iter()
            .zip(g.offsets())
            .map(|(w, o)| (*w, o))
            .collect(),
        None => vec![(1.0, 0.0)],
    };
    for (weight, offset) in branch_list {
        if weight == 0.0 {
            continue;
        }
        let branch_unitary = if offset != 0.0 {
            rotation_dense(&r.generator, offset).mul(&noisy)
        } else {
            noisy.clone()
        };
        for sigma in &twirl_elems {
            let s = pauli_dense(sigma);
            let conjugated = s.mul(&branch_unitary).mul(&s);
            map.add_scaled(
                &channel_of_unitary(&conjugated)?,
                weight / twirl_elems.len() as f64,
            );
        }
    }
    Ok(map)
}

/// Exact mixture expectation: enumeration when small enough, density-matrix
/// evolution otherwise.
pub fn exact_mixture_expectation(circuit: &CircuitSpec, observable: &PauliString) -> Result<f64> {
    match exact_mixture_expectation_enumerated(circuit, observable) {
        Err(Error::EnumerationTooLarge { .. }) => {
            exact_mixture_expectation_density(circuit, observable)
        }
        other => other,
    }
}

/// Ideal-circuit expectation, for convenience in tests and the harness.
pub fn ideal_expectation(circuit: &CircuitSpec, observable: &PauliString) -> Result<f64> {
    circuit.evolve_exact()?.expectation_pauli(observable)
}
