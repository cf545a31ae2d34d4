mod common;

use std::collections::HashSet;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use k3lattice::moduli::{self, Embedding, PnEntry};
use k3lattice::monodromy;
use k3lattice::mukai;
use k3lattice::numtheory;

#[test]
fn pn_entries_are_valid_and_distinct() {
    for n in 2..=3000u64 {
        let entries = moduli::enumerate_pn(n).unwrap();
        let set: HashSet<PnEntry> = entries.iter().copied().collect();
        assert_eq!(set.len(), entries.len());
        for e in &entries {
            e.validate(n).unwrap();
        }
        let rho = numtheory::distinct_prime_count(n - 1);
        assert_eq!(entries.len() as u64, 1 << rho.saturating_sub(1), "n = {n}");
        assert_eq!(moduli::count_nonbirational(n).unwrap(), entries.len());
    }
    assert!(PnEntry { r: 2, s: -2 }.validate(5).is_err());
    assert!(PnEntry { r: 3, s: -2 }.validate(7).is_err());
}

#[test]
fn iota_is_primitive_with_index_two_n_minus_two() {
    for n in 2..=50u64 {
        for e in moduli::enumerate_pn(n).unwrap() {
            let emb = moduli::iota(n, e).unwrap();
            assert!(moduli::complement_is_orthogonal(&emb).unwrap());
            assert_eq!(moduli::glue_index(&emb).unwrap(), BigInt::from(2 * n - 2), "n = {n}, {e:?}");
            let w = emb.complement_generator().unwrap();
            let expected = mukai::MukaiVector::trivial(e.r, e.s).to_coords();
            let neg: Vec<BigInt> = expected.iter().map(|x| -x).collect();
            assert!(w == expected || w == neg);
        }
    }
}

#[test]
fn same_orbit_has_pn_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mukai_lat = mukai::mukai_lattice();
    for n in [7u64, 31, 211] {
        let entries = moduli::enumerate_pn(n).unwrap();
        let mut embs: Vec<Embedding> = Vec::new();
        for e in &entries {
            let base = moduli::iota(n, *e).unwrap();
            embs.push(base.clone());
            let g = common::random_product(&mukai_lat, &mut rng, 3);
            embs.push(base.then(&g).unwrap());
        }
        let k = embs.len();
        let same: Vec<Vec<bool>> =
            (0..k).map(|i| (0..k).map(|j| moduli::same_orbit(&embs[i], &embs[j]).unwrap()).collect()).collect();
        for i in 0..k {
            assert!(same[i][i]);
            for j in 0..k {
                assert_eq!(same[i][j], same[j][i]);
                for l in 0..k {
                    if same[i][j] && same[j][l] {
                        assert!(same[i][l]);
                    }
                }
            }
        }
        let mut classes: Vec<usize> = Vec::new();
        for i in 0..k {
            if !classes.iter().any(|&c| same[c][i]) {
                classes.push(i);
            }
        }
        assert_eq!(classes.len(), entries.len(), "n = {n}");
    }
}

#[test]
fn example_report_values() {
    let r = moduli::example7_report().unwrap();
    let got: Vec<(i64, i64, [i64; 2], bool)> =
        r.cases.iter().map(|c| (c.w0_square, c.residual, c.f_delta, c.in_w)).collect();
    assert_eq!(got, vec![(-4, -5, [-12, -5], false), (4, 5, [-12, -7], false)]);
    let _ = monodromy::index_formula(7);
}
