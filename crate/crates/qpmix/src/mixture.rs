//! Signed mixture coefficients expressing an ideal rotation channel as a
//! combination of over-rotated channels.
//!
//! With noisy rotations `R(θ' + ε)` available at any requested angle `θ'`,
//! the ideal channel `R(θ)` equals
//!
//! ```text
//! R(θ) = γ1·R(θ+ε) + γ2·R(θ+ε+A) + γ3·R(θ+ε+B)
//! ```
//!
//! for coefficients that depend only on (ε, A, B), not on θ. The default
//! offsets are A = −sign(ε)·π/4 and B = π, so the two correction branches
//! are realizable as a single T (or T†) and a Z gate respectively; the
//! optimal-offset landscape is available through [`scan_ab`] but is not
//! wired into the default path.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::math;
use crate::{Error, Result};

/// Default tolerance (radians) for rejecting singular (A, B) choices.
pub const DEFAULT_SINGULARITY_TOL: f64 = 1e-8;

/// Default validity limit for the fixed-offset decomposition: |ε| < π/8.
pub const DEFAULT_EPSILON_LIMIT: f64 = core::f64::consts::FRAC_PI_8;

/// The signed mixture coefficients for one over-rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTriple {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Over-rotation angle the triple was built for.
    pub epsilon: f64,
    /// Angle offset of the second branch relative to the noisy angle.
    pub offset_a: f64,
    /// Angle offset of the third branch.
    pub offset_b: f64,
    /// Cached |γ1| + |γ2| + |γ3|.
    pub one_norm: f64,
}

impl GammaTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.gamma1, self.gamma2, self.gamma3]
    }

    pub fn sum(&self) -> f64 {
        self.gamma1 + self.gamma2 + self.gamma3
    }

    /// Angle offsets of the three branches: (0, A, B).
    pub fn offsets(&self) -> [f64; 3] {
        [0.0, self.offset_a, self.offset_b]
    }

    /// Sampling probabilities |γ_i| / ‖γ‖₁.
    pub fn probabilities(&self) -> [f64; 3] {
        let g = self.as_array();
        [
            math::abs(g[0]) / self.one_norm,
            math::abs(g[1]) / self.one_norm,
            math::abs(g[2]) / self.one_norm,
        ]
    }
}

/// One sampled mixture branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchDraw {
    /// Branch index in {1, 2, 3}.
    pub index: u8,
    /// sign(γ_index), ±1.
    pub sign: f64,
    /// Rotation offset to insert after the noisy gate: 0, A or B.
    pub angle_offset: f64,
}

fn wrap_to_pi(x: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    x - two_pi * math::round(x / two_pi)
}

fn check_nonsingular(value: f64, factor: &'static str, tol: f64) -> Result<()> {
    let dist = math::abs(wrap_to_pi(value));
    if dist < tol {
        return Err(Error::DegenerateDecomposition {
            factor,
            value: dist,
            tol,
        });
    }
    Ok(())
}

/// General closed-form solution of the three-channel system for arbitrary
/// offsets (A, B), with the default singularity tolerance.
pub fn gamma_general(epsilon: f64, offset_a: f64, offset_b: f64) -> Result<GammaTriple> {
    gamma_general_with_tol(epsilon, offset_a, offset_b, DEFAULT_SINGULARITY_TOL)
}

/// As [`gamma_general`] with an explicit tolerance on how far A, B and A−B
/// must stay from multiples of 2π.
pub fn gamma_general_with_tol(
    epsilon: f64,
    offset_a: f64,
    offset_b: f64,
    tol: f64,
) -> Result<GammaTriple> {
    check_nonsingular(offset_a, "A", tol)?;
    check_nonsingular(offset_b, "B", tol)?;
    check_nonsingular(offset_a - offset_b, "A - B", tol)?;

    let half = |x: f64| math::sin(x / 2.0);
    let csc_a = 1.0 / half(offset_a);
    let csc_b = 1.0 / half(offset_b);
    let csc_ab = 1.0 / half(offset_a - offset_b);

    let gamma1 = csc_a * csc_b * half(offset_a + epsilon) * half(offset_b + epsilon);
    let gamma2 = csc_a * csc_ab * half(epsilon) * half(offset_b + epsilon);
    let gamma3 = -csc_ab * csc_b * half(epsilon) * half(offset_a + epsilon);
    let one_norm = math::abs(gamma1) + math::abs(gamma2) + math::abs(gamma3);

    let triple = GammaTriple {
        gamma1,
        gamma2,
        gamma3,
        epsilon,
        offset_a,
        offset_b,
        one_norm,
    };
    debug_assert!(
        math::abs(triple.sum() - 1.0) < 1e-9 * one_norm.max(1.0),
        "mixture coefficients must sum to 1"
    );
    Ok(triple)
}

/// The fixed-offset decomposition A = −sign(ε)·π/4, B = π used throughout
/// the estimators. Valid for |ε| below the default limit π/8.
pub fn gamma_default(epsilon: f64) -> Result<GammaTriple> {
    gamma_default_with_limit(epsilon, DEFAULT_EPSILON_LIMIT)
}

/// As [`gamma_default`] with a caller-chosen validity limit.
pub fn gamma_default_with_limit(epsilon: f64, limit: f64) -> Result<GammaTriple> {
    if math::abs(epsilon) >= limit {
        return Err(Error::OutOfRegime {
            what: "epsilon",
            value: epsilon,
            limit,
        });
    }
    let offset_a = if epsilon < 0.0 {
        core::f64::consts::FRAC_PI_4
    } else {
        -core::f64::consts::FRAC_PI_4
    };
    gamma_general(epsilon, offset_a, core::f64::consts::PI)
}

/// Closed form of ‖γ(ε)‖₁ for the default offsets: sec(π/8)·cos(|ε| − π/8).
pub fn one_norm_closed_form(epsilon: f64) -> f64 {
    let pi_8 = core::f64::consts::FRAC_PI_8;
    math::cos(math::abs(epsilon) - pi_8) / math::cos(pi_8)
}

/// Draw one branch with probability |γ_i| / ‖γ‖₁.
pub fn sample_branch<R: RngCore + ?Sized>(triple: &GammaTriple, rng: &mut R) -> BranchDraw {
    let gammas = triple.as_array();
    let offsets = triple.offsets();
    let u = math::uniform_f64(rng) * triple.one_norm;
    let mut acc = 0.0;
    let mut chosen = None;
    for (i, gamma) in gammas.iter().enumerate() {
        acc += math::abs(*gamma);
        if u < acc {
            chosen = Some(i);
            break;
        }
    }
    // Fall back to the last branch with nonzero weight if u landed on the
    // upper boundary.
    let i = chosen.unwrap_or_else(|| {
        (0..3)
            .rev()
            .find(|&i| gammas[i] != 0.0)
            .expect("one_norm >= 1 guarantees a nonzero branch")
    });
    BranchDraw {
        index: (i + 1) as u8,
        sign: if gammas[i] < 0.0 { -1.0 } else { 1.0 },
        angle_offset: offsets[i],
    }
}

/// One cell of the (A, B) landscape scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbPoint {
    pub offset_a: f64,
    pub offset_b: f64,
    /// ‖γ‖₁, absent for singular cells.
    pub one_norm: Option<f64>,
}

/// Output of [`scan_ab`]: the full grid (row-major in A, then B) plus the
/// location of the valid-cell minimum.
#[derive(Debug, Clone)]
pub struct AbScan {
    pub epsilon: f64,
    pub grid_steps: usize,
    pub points: Vec<AbPoint>,
    pub argmin: Option<AbPoint>,
}

impl AbScan {
    /// Minimum valid ‖γ‖₁ for each A row, as (A, B_argmin, norm).
    pub fn per_a_minima(&self) -> Vec<(f64, f64, f64)> {
        let n = self.grid_steps;
        let mut out = Vec::new();
        for i in 0..n {
            let row = &self.points[i * n..(i + 1) * n];
            let best = row
                .iter()
                .filter_map(|p| p.one_norm.map(|v| (p, v)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((p, v)) = best {
                out.push((p.offset_a, p.offset_b, v));
            }
        }
        out
    }
}

/// Evaluate ‖γ‖₁ over a `grid_steps` × `grid_steps` grid of cell centers in
/// (0, 2π)². Singular cells (including the A = B diagonal) are marked
/// absent rather than failing the scan.
pub fn scan_ab(epsilon: f64, grid_steps: usize) -> AbScan {
    assert!(grid_steps >= 2, "grid needs at least 2 steps");
    let step = 2.0 * core::f64::consts::PI / grid_steps as f64;
    let mut points = Vec::with_capacity(grid_steps * grid_steps);
    let mut argmin: Option<AbPoint> = None;
    for i in 0..grid_steps {
        let a = (i as f64 + 0.5) * step;
        for j in 0..grid_steps {
            let b = (j as f64 + 0.5) * step;
            let one_norm = gamma_general(epsilon, a, b).ok().map(|t| t.one_norm);
            let point = AbPoint {
                offset_a: a,
                offset_b: b,
                one_norm,
            };
            if let Some(v) = one_norm {
                let better = argmin.and_then(|p| p.one_norm).is_none_or(|cur| v < cur);
                if better {
                    argmin = Some(point);
                }
            }
            points.push(point);
        }
    }
    AbScan {
        epsilon,
        grid_steps,
        points,
        argmin,
    }
}

/// The four-channel decomposition of the ideal channel in terms of channels
/// at angles θ+ε, θ+ε+π and θ+ε±π/2, as (angle, weight) pairs. Weights sum
/// to one; the two quadrature terms carry opposite signs.
pub fn four_term_weights(theta: f64, epsilon: f64) -> [(f64, f64); 4] {
    let c = math::cos(epsilon / 2.0);
    let s = math::sin(epsilon / 2.0);
    let base = theta + epsilon;
    let half_pi = core::f64::consts::FRAC_PI_2;
    [
        (base, c * c),
        (base + core::f64::consts::PI, s * s),
        (base + half_pi, -c * s),
        (base - half_pi, c * s),
    ]
}
