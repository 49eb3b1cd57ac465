//! The `oracle-check` battery: every decomposition identity and both exact
//! estimator paths, printed one line per check.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use qpmix::circuits::{attach_errors, build_trotter_ising, compile_to_rz, MitigationPolicy};
use qpmix::mixture::gamma_default;
use qpmix::noise::ErrorModel;
use qpmix::oracle::{
    cross_term_residual, exact_mixture_expectation_density, exact_mixture_expectation_enumerated,
    four_term_residual, ideal_expectation, mixture_residual_for, two_term_residual,
};
use qpmix::pauli::PauliString;

struct Check {
    name: &'static str,
    worst: f64,
    tol: f64,
}

fn uniform(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * (hi - lo)
}

/// Run the battery; returns false if any check fails.
pub fn run_oracle_checks() -> bool {
    let mut rng = ChaCha12Rng::seed_from_u64(0xC0FFEE);
    let z = PauliString::parse("Z").unwrap();
    let xx = PauliString::parse("XX").unwrap();
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let theta = uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let eps = uniform(&mut rng, 0.0, std::f64::consts::TAU);
        worst = worst.max(two_term_residual(&z, theta, eps));
        worst = worst.max(two_term_residual(&xx, theta, eps));
    }
    checks.push(Check {
        name: "two-term unitary decomposition",
        worst,
        tol: 1e-12,
    });

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let theta = uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let eps = uniform(&mut rng, -3.0, 3.0);
        worst = worst.max(four_term_residual(&z, theta, eps));
        worst = worst.max(four_term_residual(&xx, theta, eps));
    }
    checks.push(Check {
        name: "four-term channel decomposition",
        worst,
        tol: 1e-12,
    });

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let theta = uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let eps = uniform(&mut rng, -0.3, 0.3);
        let triple = gamma_default(eps).unwrap();
        worst = worst.max(mixture_residual_for(&z, theta, &triple));
    }
    checks.push(Check {
        name: "three-term signed mixture",
        worst,
        tol: 1e-12,
    });

    let mut worst = 0.0f64;
    for &theta in &[0.4, std::f64::consts::FRAC_PI_2, 2.4] {
        worst = worst.max(four_term_residual(&z, theta, -theta));
    }
    checks.push(Check {
        name: "finite-angle special case (ε = −θ)",
        worst,
        tol: 1e-12,
    });

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let theta = uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let eps = uniform(&mut rng, -3.0, 3.0);
        worst = worst.max(cross_term_residual(&z, theta, eps));
    }
    checks.push(Check {
        name: "cross-term quadrature identity",
        worst,
        tol: 1e-12,
    });

    // Unbiasedness at desk scale, constant over-rotation.
    let c = build_trotter_ising(2, 1, 0.7, 1.0, 1.0).unwrap();
    let mitigated = attach_errors(
        &c,
        ErrorModel::ConstantOverrotation { epsilon: 0.05 },
        MitigationPolicy::Mixture,
    )
    .unwrap();
    let obs = PauliString::z_all(2);
    let ideal = ideal_expectation(&c, &obs).unwrap();
    let enumerated = exact_mixture_expectation_enumerated(&mitigated, &obs).unwrap();
    let density = exact_mixture_expectation_density(&mitigated, &obs).unwrap();
    checks.push(Check {
        name: "enumerated estimator mean vs ideal",
        worst: (enumerated - ideal).abs(),
        tol: 1e-10,
    });
    checks.push(Check {
        name: "enumeration vs density-matrix path",
        worst: (enumerated - density).abs(),
        tol: 1e-10,
    });

    // Twirled compiled circuit.
    let compiled = compile_to_rz(&c).unwrap();
    let twirled = attach_errors(
        &compiled,
        ErrorModel::ConstantOverrotation { epsilon: 0.04 },
        MitigationPolicy::MixtureTwirl,
    )
    .unwrap();
    let ideal_c = ideal_expectation(&compiled, &obs).unwrap();
    let enumerated_t = exact_mixture_expectation_enumerated(&twirled, &obs).unwrap();
    checks.push(Check {
        name: "twirled enumerated mean vs ideal",
        worst: (enumerated_t - ideal_c).abs(),
        tol: 1e-10,
    });

    let mut all_ok = true;
    for c in &checks {
        let ok = c.worst <= c.tol;
        all_ok &= ok;
        println!(
            "{}: {} (worst residual {:.3e}, tolerance {:.0e})",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tol
        );
    }
    all_ok
}
