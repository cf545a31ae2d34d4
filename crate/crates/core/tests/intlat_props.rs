mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use k3lattice::intlat::{self, mod_two, Isometry, Lattice, StandardLattice};
use k3lattice::linalg::{self, IntMatrix, Matrix};
use k3lattice::Error;

fn even_gram(n: usize, entries: &[i64]) -> IntMatrix {
    let mut k = 0;
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = entries[k % entries.len()];
            k += 1;
            let v = if i == j { BigInt::from(2 * x) } else { BigInt::from(x) };
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

proptest! {
    #![proptest_config(common::config(1000))]

    #[test]
    fn snf_round_trip(r in 1usize..=12, c in 1usize..=12, seed in proptest::collection::vec(-20i64..=20, 144)) {
        let m = Matrix::from_fn(r, c, |i, j| BigInt::from(seed[i * 12 + j]));
        let s = linalg::snf(&m);
        prop_assert_eq!(&(&s.p * &m) * &s.q, s.s.clone());
        prop_assert!((&s.p * &s.p_inv) == IntMatrix::identity(r));
        prop_assert!((&s.q * &s.q_inv) == IntMatrix::identity(c));
        let inv = s.invariant_factors();
        prop_assert!(inv.iter().all(|d| d.is_positive()));
        prop_assert!(inv.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        for i in 0..r {
            for j in 0..c {
                if i != j {
                    prop_assert!(s.s.get(i, j).is_zero());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(common::config(200))]

    #[test]
    fn discriminant_order_is_det(n in 1usize..=5, entries in proptest::collection::vec(-4i64..=4, 15)) {
        let gram = even_gram(n, &entries);
        let lat = Lattice::new("random", gram).unwrap();
        let det = lat.det();
        prop_assume!(!det.is_zero());
        let dg = intlat::discriminant_group(&lat).unwrap();
        prop_assert_eq!(dg.order(), det.abs());
    }

    #[test]
    fn q_independent_of_lift(n in 1usize..=5, entries in proptest::collection::vec(-4i64..=4, 15),
                             shift in proptest::collection::vec(-5i64..=5, 5)) {
        let lat = Lattice::new("random", even_gram(n, &entries)).unwrap();
        prop_assume!(!lat.det().is_zero());
        let dg = intlat::discriminant_group(&lat).unwrap();
        for i in 0..dg.orders.len() {
            let y = dg.generator(i);
            let moved: Vec<BigRational> =
                y.iter().zip(&shift).map(|(a, &b)| a + BigRational::from_integer(b.into())).collect();
            prop_assert_eq!(mod_two(&dg.q(&y)), mod_two(&dg.q(&moved)));
            prop_assert_eq!(dg.coords(&y).unwrap(), dg.coords(&moved).unwrap());
        }
    }

    #[test]
    fn signed_permutations_of_u_powers(k in 1usize..=4, perm_seed in proptest::collection::vec(0usize..24, 4),
                                       flips in proptest::collection::vec(any::<(bool, bool)>(), 8)) {
        let u = intlat::make_standard(StandardLattice::U).unwrap();
        let lat = Arc::new((1..k).fold(u.clone(), |acc, _| intlat::direct_sum(&acc, &u)));
        let build = |offset: usize| {
            let mut order: Vec<usize> = (0..k).collect();
            for (i, &s) in perm_seed.iter().enumerate().take(k) {
                order.swap(i, (s + offset) % k);
            }
            let mut m = IntMatrix::zeros(2 * k, 2 * k);
            for (b, &target) in order.iter().enumerate() {
                let (swap, neg) = flips[(b + offset) % flips.len()];
                let sign = if neg { -BigInt::one() } else { BigInt::one() };
                let (p, q) = if swap { (1, 0) } else { (0, 1) };
                m.set(2 * target, 2 * b + p, sign.clone());
                m.set(2 * target + 1, 2 * b + q, sign);
            }
            m
        };
        let (a, b) = (build(0), build(3));
        prop_assert!(intlat::is_isometry(&lat, &a).unwrap());
        let g = Isometry::new(Arc::clone(&lat), a).unwrap();
        let h = Isometry::new(Arc::clone(&lat), b).unwrap();
        let gh = g.compose(&h).unwrap();
        prop_assert!(intlat::is_isometry(&lat, gh.matrix()).unwrap());
        prop_assert!(g.compose(&g.inverse()).unwrap().is_identity());
        prop_assert!(intlat::is_isometry(&lat, g.inverse().matrix()).unwrap());
    }
}

#[test]
fn construction_rejects_bad_grams() {
    let odd = IntMatrix::from_i64_rows(&[&[1, 0], &[0, 2]]);
    assert!(matches!(Lattice::new("odd", odd), Err(Error::OddDiagonal(_))));
    let asym = IntMatrix::from_i64_rows(&[&[2, 1], &[0, 2]]);
    assert!(matches!(Lattice::new("asym", asym), Err(Error::NotSymmetric(_, _))));
}

#[test]
fn standard_lattices() {
    for (name, rank, sig, det) in [
        (StandardLattice::U, 2, (1, 1), -1),
        (StandardLattice::E8Neg, 8, (0, 8), 1),
        (StandardLattice::K3, 22, (3, 19), -1),
        (StandardLattice::Mukai, 24, (4, 20), 1),
    ] {
        let l = intlat::make_standard(name).unwrap();
        assert_eq!(l.rank(), rank);
        assert_eq!(l.signature(), sig);
        assert_eq!(l.det(), BigInt::from(det));
        assert!(intlat::discriminant_group(&l).unwrap().is_trivial());
    }
    let h = intlat::make_standard(StandardLattice::Hilb(7)).unwrap();
    assert_eq!((h.rank(), h.signature()), (23, (3, 20)));
}

#[test]
fn lattice_json_round_trip() {
    let l = intlat::make_standard(StandardLattice::Hilb(4)).unwrap();
    let back = Lattice::from_json(&l.to_json()).unwrap();
    assert_eq!(back.gram(), l.gram());
}
