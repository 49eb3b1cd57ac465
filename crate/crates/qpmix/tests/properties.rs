//! Property tests over randomized inputs.

use proptest::prelude::*;
use qpmix::mixture::{gamma_general, one_norm_closed_form};
use qpmix::pauli::PauliString;
use qpmix::statevec::{FixedGate, StateVector};

fn pauli_text(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
        .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Text parsing round-trips and preserves length.
    #[test]
    fn pauli_text_roundtrip(text in pauli_text(6)) {
        let p = PauliString::parse(&text).unwrap();
        prop_assert_eq!(p.to_text(), text);
        prop_assert_eq!(p.n_qubits(), 6);
    }

    /// Commutation is symmetric and every string commutes with itself and
    /// with the identity.
    #[test]
    fn commutation_symmetry(a in pauli_text(5), b in pauli_text(5)) {
        let p = PauliString::parse(&a).unwrap();
        let q = PauliString::parse(&b).unwrap();
        prop_assert_eq!(p.commutes(&q).unwrap(), q.commutes(&p).unwrap());
        prop_assert!(p.commutes(&p).unwrap());
        prop_assert!(p.commutes(&PauliString::identity(5)).unwrap());
    }

    /// Coefficients from any non-singular offsets sum to one, have a
    /// one-norm of at least one, and the default choice matches the closed
    /// form.
    #[test]
    fn gamma_sum_and_norm(
        eps in -0.35f64..0.35,
        a in 0.2f64..6.0,
        b in 0.2f64..6.0,
    ) {
        prop_assume!((a - b).abs() > 0.2);
        let t = gamma_general(eps, a, b).unwrap();
        prop_assert!((t.sum() - 1.0).abs() < 1e-9 * t.one_norm.max(1.0));
        prop_assert!(t.one_norm >= 1.0 - 1e-12);
        let d = qpmix::mixture::gamma_default(eps).unwrap();
        prop_assert!((d.one_norm - one_norm_closed_form(eps)).abs() < 1e-10);
    }

    /// A rotation followed by its inverse is the identity, and the norm is
    /// preserved throughout.
    #[test]
    fn rotation_inverse_and_norm(
        text in pauli_text(3),
        theta in -6.3f64..6.3,
        flips in proptest::collection::vec(0usize..3, 0..4),
    ) {
        let p = PauliString::parse(&text).unwrap();
        let mut s = StateVector::zero(3).unwrap();
        for q in &flips {
            s.apply_fixed_gate(FixedGate::H(*q)).unwrap();
        }
        let before = s.clone();
        s.apply_pauli_rotation(&p, theta).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        s.apply_pauli_rotation(&p, -theta).unwrap();
        for (x, y) in s.amplitudes().iter().zip(before.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-10);
        }
    }
}
