//! Pauli strings in the symplectic (x, z) bitmask representation.
//!
//! Qubit `q` carries X iff bit `q` of `x_mask` is set, Z iff bit `q` of
//! `z_mask` is set, Y iff both, identity iff neither. Phases are not tracked:
//! every consumer either conjugates by a Pauli or exponentiates one, so a
//! global phase cancels.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Maximum register width representable with `u64` masks.
pub const MAX_PAULI_QUBITS: usize = 64;

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// An n-qubit tensor product of {I, X, Y, Z}, without phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    /// The identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        assert!(
            (1..=MAX_PAULI_QUBITS).contains(&n),
            "unsupported qubit count"
        );
        Self {
            n_qubits: n,
            x_mask: 0,
            z_mask: 0,
        }
    }

    /// A single-qubit Pauli embedded in an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, axis: Axis) -> Result<Self> {
        if qubit >= n {
            return Err(Error::QubitOutOfRange { qubit, n_qubits: n });
        }
        let mut p = Self::identity(n);
        let bit = 1u64 << qubit;
        match axis {
            Axis::X => p.x_mask = bit,
            Axis::Y => {
                p.x_mask = bit;
                p.z_mask = bit;
            }
            Axis::Z => p.z_mask = bit,
        }
        Ok(p)
    }

    /// The XX interaction generator on qubits `a` and `b`.
    pub fn xx(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n {
            return Err(Error::QubitOutOfRange {
                qubit: a.max(b),
                n_qubits: n,
            });
        }
        if a == b {
            return Err(Error::InvalidArgument("XX generator needs distinct qubits"));
        }
        let mut p = Self::identity(n);
        p.x_mask = (1u64 << a) | (1u64 << b);
        Ok(p)
    }

    /// The full Z string, the parity observable on all `n` qubits.
    pub fn z_all(n: usize) -> Self {
        let mut p = Self::identity(n);
        p.z_mask = mask_low(n);
        p
    }

    /// Build from raw masks.
    pub fn from_masks(n: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if !(1..=MAX_PAULI_QUBITS).contains(&n) {
            return Err(Error::CapacityExceeded {
                requested: n,
                limit: MAX_PAULI_QUBITS,
            });
        }
        let valid = mask_low(n);
        if x_mask & !valid != 0 || z_mask & !valid != 0 {
            return Err(Error::InvalidArgument("mask bits outside the register"));
        }
        Ok(Self {
            n_qubits: n,
            x_mask,
            z_mask,
        })
    }

    /// Parse the text form, qubit 0 leftmost, e.g. `"IXYZ"`.
    pub fn parse(text: &str) -> Result<Self> {
        let n = text.chars().count();
        if !(1..=MAX_PAULI_QUBITS).contains(&n) {
            return Err(Error::CapacityExceeded {
                requested: n,
                limit: MAX_PAULI_QUBITS,
            });
        }
        let mut p = Self::identity(n);
        for (q, ch) in text.chars().enumerate() {
            let bit = 1u64 << q;
            match ch {
                'I' => {}
                'X' => p.x_mask |= bit,
                'Y' => {
                    p.x_mask |= bit;
                    p.z_mask |= bit;
                }
                'Z' => p.z_mask |= bit,
                other => return Err(Error::InvalidPauliChar(other)),
            }
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of qubits on which the string acts nontrivially.
    pub fn support_weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    /// The single qubit this string acts on, if its support has weight one.
    pub fn single_support(&self) -> Option<(usize, Axis)> {
        let support = self.x_mask | self.z_mask;
        if support.count_ones() != 1 {
            return None;
        }
        let q = support.trailing_zeros() as usize;
        let axis = match ((self.x_mask >> q) & 1, (self.z_mask >> q) & 1) {
            (1, 0) => Axis::X,
            (1, 1) => Axis::Y,
            (0, 1) => Axis::Z,
            _ => unreachable!(),
        };
        Some((q, axis))
    }

    /// The Pauli on qubit `q`: `None` for identity.
    pub fn axis_on(&self, q: usize) -> Option<Axis> {
        match ((self.x_mask >> q) & 1, (self.z_mask >> q) & 1) {
            (0, 0) => None,
            (1, 0) => Some(Axis::X),
            (1, 1) => Some(Axis::Y),
            (0, 1) => Some(Axis::Z),
            _ => unreachable!(),
        }
    }

    /// Whether this string commutes with `other`.
    ///
    /// Two Pauli strings commute iff an even number of qubit positions carry
    /// anticommuting single-qubit factors, i.e. the symplectic form
    /// `popcount(x1 & z2) + popcount(z1 & x2)` is even.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let anti =
            (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        Ok(anti.is_multiple_of(2))
    }

    /// The two-element twirl subgroup {I, P} for a single-qubit-support
    /// string P. Everything in the returned set commutes with `self`.
    pub fn commuting_subgroup(&self) -> Result<[PauliString; 2]> {
        if self.single_support().is_none() {
            return Err(Error::SingleQubitSupportRequired {
                context: "commuting_subgroup",
            });
        }
        Ok([Self::identity(self.n_qubits), *self])
    }

    /// Text form, qubit 0 leftmost.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.n_qubits);
        for q in 0..self.n_qubits {
            s.push(match self.axis_on(q) {
                None => 'I',
                Some(Axis::X) => 'X',
                Some(Axis::Y) => 'Y',
                Some(Axis::Z) => 'Z',
            });
        }
        s
    }

    /// All 4^n strings on `n` qubits, for exhaustive small-scale checks.
    pub fn enumerate_all(n: usize) -> Vec<PauliString> {
        assert!(n <= 8, "exhaustive enumeration is for small registers");
        let mut out = Vec::with_capacity(1 << (2 * n));
        for x in 0..(1u64 << n) {
            for z in 0..(1u64 << n) {
                out.push(Self {
                    n_qubits: n,
                    x_mask: x,
                    z_mask: z,
                });
            }
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[inline]
fn mask_low(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
