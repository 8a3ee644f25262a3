//! Properties of truncated τ-series and theta sections.

use proptest::prelude::*;

use mirrorlab::lattice::{coset_reps, q, qf, LatticeVector, Q};
use mirrorlab::series::{recompose, section_mul_decompose, theta_section, TauSeries};

fn series(cutoff: i64) -> impl Strategy<Value = TauSeries> {
    prop::collection::vec((0i64..=4 * cutoff, -5i64..=5), 0..6).prop_map(move |terms| {
        TauSeries::from_terms(terms.into_iter().map(|(e, c)| (qf(e, 4), q(c))), q(cutoff))
    })
}

fn rep(l: i64) -> impl Strategy<Value = LatticeVector> {
    let reps = coset_reps(l).unwrap();
    (0..reps.len()).prop_map(move |i| reps[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn addition_commutes(a in series(4), b in series(4)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn multiplication_is_associative_and_distributive(a in series(3), b in series(3), c in series(3)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&TauSeries::one(q(3))), a.clone());
    }

    #[test]
    fn evaluation_is_a_ring_map(a in series(3), b in series(3)) {
        // Far below the cutoff the truncation error is negligible.
        let tau = 1e-3;
        let lhs = a.mul(&b).eval(tau);
        let rhs = a.eval(tau) * b.eval(tau);
        let scale = 1.0 + a.eval(tau).abs() * b.eval(tau).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn theta_is_complete_below_cutoff(e in rep(3), c in 1i64..=6, extra in 1i64..=4) {
        let small = theta_section(&e, 3, &q(c)).unwrap();
        let big = theta_section(&e, 3, &q(c + extra)).unwrap();
        prop_assert!(small.agrees_with(&big));
        // Nothing in the larger section below the small cutoff is missing.
        for (k, s) in &big.coeffs {
            if s.leading().is_some_and(|(x, _)| x <= &q(c)) {
                prop_assert!(small.coeffs.contains_key(k));
            }
        }
    }

    #[test]
    fn decompose_recompose_round_trip(e1 in rep(1), e2 in rep(2), cut in 2i64..=5) {
        let cutoff = q(cut);
        let s1 = theta_section(&e1, 1, &cutoff).unwrap();
        let s2 = theta_section(&e2, 2, &cutoff).unwrap();
        let d = section_mul_decompose(&s1, &s2, &cutoff).unwrap();
        let back = recompose(&d, 3, &cutoff).unwrap();
        prop_assert!(back.agrees_with(&s1.mul(&s2)));
    }

    #[test]
    fn decomposition_commutes(e1 in rep(2), e2 in rep(2), cut in 2i64..=5) {
        let cutoff = q(cut);
        let s1 = theta_section(&e1, 2, &cutoff).unwrap();
        let s2 = theta_section(&e2, 2, &cutoff).unwrap();
        let a = section_mul_decompose(&s1, &s2, &cutoff).unwrap();
        let b = section_mul_decompose(&s2, &s1, &cutoff).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn truncation_is_idempotent(a in series(5), c in 0i64..=5) {
        let t = a.truncate(&q(c));
        prop_assert_eq!(t.truncate(&q(c)), t.clone());
        prop_assert!(t.terms().keys().all(|x: &Q| x <= &q(c)));
        prop_assert!(t.agrees_with(&a));
    }
}

#[test]
fn section_values() {
    let s = theta_section(&LatticeVector::ZERO, 1, &q(3)).unwrap();
    // One key of norm 0, six of norm 1 and six of norm 3.
    let counts: usize = s.coeffs.len();
    assert_eq!(counts, 13);
    assert!(theta_section(&LatticeVector::new(3, 0), 3, &q(2)).is_err());
}
