//! Dense statevector engine.
//!
//! Pauli-string rotations are applied through the two-term action
//! `|ψ⟩ → cos(θ/2)|ψ⟩ − i·sin(θ/2)·P|ψ⟩`, an O(2^n) pass over the
//! amplitudes, never through dense matrices. `P|b⟩` is evaluated with the
//! bitmask identity `P = i^{|Y|} · X^{x_mask} · Z^{z_mask}`, so each basis
//! state maps to `b ⊕ x_mask` with a ±1/±i phase read off popcounts.
//!
//! Norms are never renormalized; drift is asserted by the tests instead of
//! being hidden.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::math;
use crate::pauli::PauliString;
use crate::{Error, Result};

/// Hard cap on the register width: 2^24 amplitudes (256 MiB per state).
pub const MAX_QUBITS: usize = 24;

/// One- and two-qubit fixed gates (the Clifford frame plus T/T†).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedGate {
    H(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// CNOT with (control, target).
    Cnot(usize, usize),
}

impl FixedGate {
    /// Qubits the gate touches, for range validation.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            FixedGate::H(q)
            | FixedGate::S(q)
            | FixedGate::Sdg(q)
            | FixedGate::T(q)
            | FixedGate::Tdg(q)
            | FixedGate::X(q)
            | FixedGate::Y(q)
            | FixedGate::Z(q) => (q, None),
            FixedGate::Cnot(c, t) => (c, Some(t)),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let (a, b) = self.qubits();
        if a >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: a, n_qubits });
        }
        if let Some(b) = b {
            if b >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: b, n_qubits });
            }
            if a == b {
                return Err(Error::InvalidArgument(
                    "CNOT control and target must be distinct",
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for FixedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FixedGate::H(q) => write!(f, "H {q}"),
            FixedGate::S(q) => write!(f, "S {q}"),
            FixedGate::Sdg(q) => write!(f, "SDG {q}"),
            FixedGate::T(q) => write!(f, "T {q}"),
            FixedGate::Tdg(q) => write!(f, "TDG {q}"),
            FixedGate::X(q) => write!(f, "X {q}"),
            FixedGate::Y(q) => write!(f, "Y {q}"),
            FixedGate::Z(q) => write!(f, "Z {q}"),
            FixedGate::Cnot(c, t) => write!(f, "CNOT {c} {t}"),
        }
    }
}

/// Dense complex amplitudes over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(Error::CapacityExceeded {
                requested: n,
                limit: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::ZERO; 1usize << n];
        amps[0] = Complex64::ONE;
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply `exp(-i θ/2 · P)`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: p.n_qubits(),
                right: self.n_qubits,
            });
        }
        let c = math::cos(theta / 2.0);
        let s = math::sin(theta / 2.0);
        let x = p.x_mask();
        let z = p.z_mask();
        // P = i^{ny} X^x Z^z with ny the number of Y factors.
        let ny = (x & z).count_ones();
        let i_pow = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        // -i sin(θ/2) i^{ny}, the off-diagonal factor before the ±1 signs.
        let m = Complex64::new(0.0, -s) * i_pow;

        if x == 0 {
            let plus = Complex64::new(c, -s);
            let minus = Complex64::new(c, s);
            for (b, amp) in self.amps.iter_mut().enumerate() {
                let odd = (b as u64 & z).count_ones() & 1 == 1;
                *amp *= if odd { minus } else { plus };
            }
        } else {
            let pivot = 1usize << x.trailing_zeros();
            let dim = self.amps.len();
            let mut b = 0usize;
            while b < dim {
                if b & pivot == 0 {
                    let cidx = b ^ x as usize;
                    let sb = if (b as u64 & z).count_ones() & 1 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    let sc = if (cidx as u64 & z).count_ones() & 1 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    let ab = self.amps[b];
                    let ac = self.amps[cidx];
                    self.amps[b] = ab * c + ac * (m * sc);
                    self.amps[cidx] = ac * c + ab * (m * sb);
                }
                b += 1;
            }
        }
        Ok(())
    }

    /// Apply one fixed gate.
    pub fn apply_fixed_gate(&mut self, g: FixedGate) -> Result<()> {
        g.validate(self.n_qubits)?;
        match g {
            FixedGate::H(q) => {
                let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
                self.for_each_pair(q, |a0, a1| ((a0 + a1) * inv_sqrt2, (a0 - a1) * inv_sqrt2));
            }
            FixedGate::S(q) => self.phase_on_one(q, Complex64::new(0.0, 1.0)),
            FixedGate::Sdg(q) => self.phase_on_one(q, Complex64::new(0.0, -1.0)),
            FixedGate::T(q) => {
                let f = core::f64::consts::FRAC_1_SQRT_2;
                self.phase_on_one(q, Complex64::new(f, f));
            }
            FixedGate::Tdg(q) => {
                let f = core::f64::consts::FRAC_1_SQRT_2;
                self.phase_on_one(q, Complex64::new(f, -f));
            }
            FixedGate::X(q) => self.for_each_pair(q, |a0, a1| (a1, a0)),
            FixedGate::Y(q) => self.for_each_pair(q, |a0, a1| {
                (
                    a1 * Complex64::new(0.0, -1.0),
                    a0 * Complex64::new(0.0, 1.0),
                )
            }),
            FixedGate::Z(q) => self.phase_on_one(q, Complex64::new(-1.0, 0.0)),
            FixedGate::Cnot(c, t) => {
                let cbit = 1usize << c;
                let tbit = 1usize << t;
                for b in 0..self.amps.len() {
                    if b & cbit != 0 && b & tbit == 0 {
                        self.amps.swap(b, b | tbit);
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn for_each_pair<F>(&mut self, q: usize, f: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (n0, n1) = f(self.amps[b], self.amps[b | bit]);
                self.amps[b] = n0;
                self.amps[b | bit] = n1;
            }
        }
    }

    #[inline]
    fn phase_on_one(&mut self, q: usize, phase: Complex64) {
        let bit = 1usize << q;
        for (b, amp) in self.amps.iter_mut().enumerate() {
            if b & bit != 0 {
                *amp *= phase;
            }
        }
    }

    /// ⟨ψ|O|ψ⟩ for a Pauli observable. The imaginary residue is asserted
    /// negligible in debug builds and discarded.
    pub fn expectation_pauli(&self, o: &PauliString) -> Result<f64> {
        if o.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: o.n_qubits(),
                right: self.n_qubits,
            });
        }
        let x = o.x_mask();
        let z = o.z_mask();
        if x == 0 {
            let mut acc = 0.0;
            for (b, amp) in self.amps.iter().enumerate() {
                let sign = if (b as u64 & z).count_ones() & 1 == 1 {
                    -1.0
                } else {
                    1.0
                };
                acc += sign * amp.norm_sqr();
            }
            return Ok(acc);
        }
        let ny = (x & z).count_ones();
        let i_pow = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut acc = Complex64::ZERO;
        for (b, amp) in self.amps.iter().enumerate() {
            let sign = if (b as u64 & z).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            // P|b⟩ = i^{ny} · sign · |b ⊕ x⟩
            acc += self.amps[b ^ x as usize].conj() * *amp * (i_pow * sign);
        }
        debug_assert!(acc.im.abs() < 1e-10, "Pauli expectation not real");
        Ok(acc.re)
    }

    /// Sample one computational-basis outcome and return the Z-parity
    /// `(-1)^{popcount(b)}` of the drawn bitstring `b`.
    pub fn sample_z_parity<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = math::uniform_f64(rng);
        let mut acc = 0.0;
        let mut drawn = self.amps.len() - 1;
        for (b, amp) in self.amps.iter().enumerate() {
            acc += amp.norm_sqr();
            if u < acc {
                drawn = b;
                break;
            }
        }
        parity_of(drawn)
    }
}

/// Cumulative-distribution sampler over basis outcomes, built once per state
/// so repeated shots cost O(log dim) each.
pub struct BasisSampler {
    cdf: Vec<f64>,
}

impl BasisSampler {
    pub fn new(state: &StateVector) -> Self {
        let mut cdf = Vec::with_capacity(state.amps.len());
        let mut acc = 0.0;
        for amp in &state.amps {
            acc += amp.norm_sqr();
            cdf.push(acc);
        }
        Self { cdf }
    }

    /// Draw a basis index.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cdf.last().unwrap_or(&1.0);
        let u = math::uniform_f64(rng) * total;
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }

    /// Draw a basis index and reduce it to its Z-parity.
    pub fn sample_z_parity<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        parity_of(self.sample(rng))
    }
}

#[inline]
pub(crate) fn parity_of(basis_index: usize) -> f64 {
    if basis_index.count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}
