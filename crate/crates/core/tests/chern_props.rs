mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use k3lattice::chern::{self, Gen, GradedRing, Monomial};

fn factorial(k: u32) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

#[test]
fn newton_round_trip_to_degree_24() {
    let back = chern::round_trip(12).unwrap();
    let ring = GradedRing::new(24);
    for (j, c) in back.iter().enumerate() {
        assert_eq!(*c, ring.c(j as u32 + 1, ""), "c_{}", j + 1);
    }
}

#[test]
fn character_denominators_divide_factorial() {
    let ch = chern::chern_to_character(12).unwrap();
    for (i, e) in ch.iter().enumerate() {
        let f = factorial(i as u32 + 1);
        for (m, a) in e.terms() {
            assert!((&f % a.denom()).is_zero(), "ch_{} coefficient {a} of {m}", i + 1);
            assert_eq!(m.degree(), 2 * (i as u32 + 1));
        }
        let lead = e.coefficient(&Monomial::gen(Gen::c(i as u32 + 1, "")));
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        assert_eq!(lead, BigRational::new(sign, factorial(i as u32)));
    }
}

#[test]
fn sigma_and_twist_identities() {
    for i in 2..=8 {
        let r = chern::verify_sigma_linear(i).unwrap();
        assert!(r.holds && r.matches_closed_form, "σ_{i}: {}", r.residual);
    }
    for i in 1..=8 {
        let r = chern::verify_twist_formula(i).unwrap();
        assert!(r.holds, "twist {i}: {} vs {}", r.lhs, r.rhs);
    }
    assert!(chern::verify_sigma_linear(1).is_err());
}

#[test]
fn whitney_sum_is_associative() {
    let ring = GradedRing::new(16);
    let left = {
        let xy = ring.whitney(&["x", "y"]);
        let z = ring.whitney(&["z"]);
        (0..=8usize).map(|d| (0..=d).fold(ring.zero(), |a, j| &a + &(&xy[j] * &z[d - j]))).collect::<Vec<_>>()
    };
    let right = {
        let x = ring.whitney(&["x"]);
        let yz = ring.whitney(&["y", "z"]);
        (0..=8usize).map(|d| (0..=d).fold(ring.zero(), |a, j| &a + &(&x[j] * &yz[d - j]))).collect::<Vec<_>>()
    };
    assert_eq!(left, right);
    assert_eq!(left, ring.whitney(&["x", "y", "z"]));
}

proptest! {
    #![proptest_config(common::config(100))]

    #[test]
    fn ring_axioms(a in proptest::collection::vec((-3i64..=3, 0u32..=3, 0u32..=2), 1..4),
                   b in proptest::collection::vec((-3i64..=3, 0u32..=3, 0u32..=2), 1..4),
                   c in proptest::collection::vec((-3i64..=3, 0u32..=3, 0u32..=2), 1..4)) {
        let ring = GradedRing::new(10);
        let build = |terms: &[(i64, u32, u32)]| terms.iter().fold(ring.zero(), |acc, &(k, e1, e2)| {
            let m = &ring.c(1, "x").pow(e1) * &ring.c(2, "y").pow(e2);
            &acc + &m.scale(&BigRational::from_integer(k.into()))
        });
        let (x, y, z) = (build(&a), build(&b), build(&c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert!((&x - &x).is_zero());
    }
}
