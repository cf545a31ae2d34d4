mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use k3lattice::intlat::{Isometry, Lattice};
use k3lattice::linalg::IntMatrix;
use k3lattice::monodromy::{self, HilbModel, OrientedLattice};
use k3lattice::numtheory;

/// Swap `e, f` in the hyperbolic plane at `block`.
fn swap_plane(lattice: &Arc<Lattice>, block: usize) -> Isometry {
    let n = lattice.rank();
    let mut m = IntMatrix::identity(n);
    let (a, b) = (2 * block, 2 * block + 1);
    m.set(a, a, 0.into());
    m.set(b, b, 0.into());
    m.set(a, b, 1.into());
    m.set(b, a, 1.into());
    Isometry::new(Arc::clone(lattice), m).unwrap()
}

/// `-1` on the hyperbolic plane at `block`.
fn negate_plane(lattice: &Arc<Lattice>, block: usize) -> Isometry {
    let mut m = IntMatrix::identity(lattice.rank());
    m.set(2 * block, 2 * block, (-1).into());
    m.set(2 * block + 1, 2 * block + 1, (-1).into());
    Isometry::new(Arc::clone(lattice), m).unwrap()
}

fn hilb_n() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(13)]
}

proptest! {
    #![proptest_config(common::config(40))]

    #[test]
    fn reflection_products_lie_in_w(n in hilb_n(), seed in any::<u64>(), len in 1usize..=6) {
        let ol = OrientedLattice::hilb(n).unwrap();
        let lat = Arc::clone(ol.lattice());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_product(&lat, &mut rng, len);
        let h = common::random_product(&lat, &mut rng, 7 - len);
        prop_assert!(monodromy::in_w(&ol, &g).unwrap().member);
        prop_assert!(monodromy::in_w(&ol, &h).unwrap().member);
        prop_assert!(monodromy::in_w(&ol, &g.compose(&h).unwrap()).unwrap().member);
    }

    #[test]
    fn characters_are_multiplicative(n in hilb_n(), seed in any::<u64>(), swaps in proptest::collection::vec(0usize..3, 0..3)) {
        let ol = OrientedLattice::hilb(n).unwrap();
        let lat = Arc::clone(ol.lattice());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = common::random_product(&lat, &mut rng, 2);
        for b in &swaps {
            g = g.compose(&swap_plane(&lat, *b)).unwrap().compose(&negate_plane(&lat, (*b + 1) % 3)).unwrap();
        }
        let h = common::random_product(&lat, &mut rng, 3).negate();
        let gh = g.compose(&h).unwrap();
        let eta = |x: &Isometry| ol.orientation_character(x).unwrap();
        prop_assert_eq!(eta(&gh), eta(&g) * eta(&h));
        prop_assert_eq!(eta(&swap_plane(&lat, 0)), 1);
        prop_assert_eq!(eta(&negate_plane(&lat, 1)), -1);

        let group: Vec<BigInt> = monodromy::residual_orthogonal_group(n).unwrap().into_iter().map(BigInt::from).collect();
        let res = |x: &Isometry| ol.residual_action(x).unwrap();
        let (rg, rh, rgh) = (res(&g), res(&h), res(&gh));
        let m = BigInt::from(2 * n - 2);
        prop_assert_eq!(rg.modulus.clone(), m.clone());
        prop_assert_eq!((&rg.multiplier * &rh.multiplier).mod_floor(&m), rgh.multiplier.mod_floor(&m));
        for r in [&rg, &rh, &rgh] {
            prop_assert!(group.contains(&r.multiplier.mod_floor(&m)) || m == BigInt::from(2));
        }
    }

    #[test]
    fn ext_and_mu_are_inverse(n in hilb_n(), seed in any::<u64>()) {
        let model = HilbModel::get(n).unwrap();
        let lat = Arc::clone(model.lattice());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_product(&lat, &mut rng, 4);
        let ext = model.ext_to_mukai(&g).unwrap();
        let v = model.v.to_coords();
        let fixing = if ext.apply(&v) == v { ext } else { ext.negate() };
        prop_assert_eq!(model.mu(&fixing).unwrap(), g.clone());
        // the other direction, up to the sign fixed by η̃
        let h = model.mu(&fixing).unwrap();
        let back = model.ext_to_mukai(&h).unwrap();
        prop_assert!(back == fixing || back == fixing.negate());
    }
}

#[test]
fn residual_group_orders() {
    for n in 2..=3000u64 {
        let units = monodromy::residual_orthogonal_group(n).unwrap();
        let rho = numtheory::distinct_prime_count(n - 1);
        assert_eq!(units.len() as u64, 1 << rho, "n = {n}");
        assert!(monodromy::is_elementary_abelian(&units, 2 * n - 2));
        let want = if n <= 6 { 1 } else { 1 << (rho - 1) };
        assert_eq!(monodromy::w_index(n).unwrap(), want, "n = {n}");
    }
}

#[test]
fn trace_criterion_examples() {
    assert!(!monodromy::trace_criterion(3, 3).unwrap());
    assert!(monodromy::trace_criterion(2, 2).unwrap());
    assert!(monodromy::trace_criterion(5, 4).unwrap());
}

#[test]
fn minus_identity_on_hilb() {
    let ol = OrientedLattice::hilb(5).unwrap();
    let m = Isometry::minus_identity(Arc::clone(ol.lattice()));
    // -1 reverses the orientation of a positive 3-space
    assert_eq!(ol.orientation_character(&m).unwrap(), -1);
    assert!(!monodromy::in_w(&ol, &m).unwrap().member);
}
