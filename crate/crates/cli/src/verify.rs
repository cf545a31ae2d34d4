//! The `verify` and `verify-all` batteries. Failures are collected as
//! checks instead of aborting, so one report covers everything.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use k3lattice::chern::{self, Gen, GradedRing, Monomial};
use k3lattice::extorder::{self, EquivariantSystem};
use k3lattice::intlat::{self, mod_two, Isometry, Lattice, StandardLattice};
use k3lattice::linalg::{self, IntMatrix, Matrix};
use k3lattice::moduli;
use k3lattice::monodromy::{self, HilbModel, OrientedLattice};
use k3lattice::mukai::{self, HilbertPoly, MukaiVector};
use k3lattice::{numtheory, Result};

use crate::report::Check;

/// Runs `f`, turning an error into a failed check.
fn guard(name: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::failed(name, e)])
}

/// A single check summarizing many cases: the first failing case, if any.
fn all_of(name: &str, mut cases: impl Iterator<Item = Result<Option<String>>>) -> Check {
    match cases.find_map(|c| match c {
        Ok(None) => None,
        Ok(Some(why)) => Some(why),
        Err(e) => Some(e.to_string()),
    }) {
        None => Check::holds(name, true),
        Some(why) => Check::failed(name, why),
    }
}

fn fail_if(cond: bool, why: impl FnOnce() -> String) -> Result<Option<String>> {
    Ok((!cond).then(why))
}

/// Checks specific to one `n`.
pub fn for_n(n: u64) -> Vec<Check> {
    guard("verify", || {
        let m = 2 * n - 2;
        let mut out = Vec::new();
        let lat = intlat::make_standard(StandardLattice::Hilb(n))?;
        let dg = intlat::discriminant_group(&lat)?;
        out.push(Check::holds("discriminant group cyclic", dg.is_cyclic()));
        out.push(Check::eq("discriminant order", BigInt::from(m), dg.order()));
        out.push(Check::eq("q(gen) mod 2", mod_two(&BigRational::new(BigInt::from(-1), BigInt::from(m))), dg.q_values[0].clone()));
        let rho = numtheory::distinct_prime_count(n - 1);
        out.push(Check::eq("|P_n|", 1u64 << rho.saturating_sub(1), moduli::enumerate_pn(n)?.len() as u64));
        out.push(Check::eq("|O(q)|", 1u64 << rho, monodromy::residual_orthogonal_group(n)?.len() as u64));
        let want = if n <= 6 { 1 } else { 1u64 << (rho - 1) };
        out.push(Check::eq("[O⁺ : W]", want, monodromy::w_index(n)?));
        let v = MukaiVector::ideal_sheaf(n);
        out.push(Check::eq("dim M(v)", BigInt::from(2 * n), v.moduli_dimension()));
        let comp = mukai::orthogonal_complement(&v)?;
        out.push(Check::holds("v^⊥ has the Hilb(n) form", comp.gram() == lat.gram()));
        for e in moduli::enumerate_pn(n)? {
            let emb = moduli::iota(n, e)?;
            out.push(Check::eq(format!("glue index of ι({}, {})", e.r, e.s), BigInt::from(m), moduli::glue_index(&emb)?));
        }
        out.push(Check::eq("μ kernel nontrivial", n == 2, !extorder::mu_kernel(n)?.is_trivial()));
        if n <= 12 {
            let r = extorder::mukai_middle_ext_order(n, 12, n)?;
            out.push(Check::eq("middle extension order", m.to_string(), r.order.unwrap_or_default()));
        }
        Ok(out)
    })
}

pub fn all(seed: u64) -> Vec<(&'static str, Vec<Check>)> {
    vec![
        ("intlat", intlat_suite(seed)),
        ("mukai", mukai_suite(seed)),
        ("monodromy", monodromy_suite(seed)),
        ("moduli", moduli_suite(seed)),
        ("chern", chern_suite()),
        ("extorder", extorder_suite(seed)),
    ]
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, bound: i64) -> IntMatrix {
    Matrix::from_fn(r, c, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
}

fn random_even_lattice(rng: &mut ChaCha8Rng) -> Result<Lattice> {
    let n = rng.gen_range(1..=5);
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = BigInt::from(rng.gen_range(-4i64..=4));
            let x = if i == j { x * 2 } else { x };
            g.set(i, j, x.clone());
            g.set(j, i, x);
        }
    }
    Lattice::new("random", g)
}

fn intlat_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    guard("intlat", || {
        let mut out = Vec::new();
        let snf_cases: Vec<IntMatrix> = (0..1000)
            .map(|_| {
                let (r, c) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
                random_matrix(&mut rng, r, c, 20)
            })
            .collect();
        out.push(all_of(
            "SNF round trip, 1000 matrices",
            snf_cases.iter().map(|a| {
                let s = linalg::snf(a);
                let inv = s.invariant_factors();
                fail_if(
                    &(&s.p * a) * &s.q == s.s && inv.windows(2).all(|w| (&w[1] % &w[0]).is_zero()),
                    || format!("{}×{} case", a.rows(), a.cols()),
                )
            }),
        ));
        let lattices: Vec<Lattice> = (0..200).map(|_| random_even_lattice(&mut rng)).collect::<Result<_>>()?;
        out.push(all_of(
            "discriminant order = |det|",
            lattices.iter().filter(|l| !l.det().is_zero()).map(|l| {
                let dg = intlat::discriminant_group(l)?;
                fail_if(dg.order() == l.det().abs(), || format!("order {} vs det {}", dg.order(), l.det()))
            }),
        ));
        let shifts: Vec<Vec<i64>> = (0..200).map(|_| (0..5).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        out.push(all_of(
            "q independent of the lift",
            lattices.iter().zip(&shifts).filter(|(l, _)| !l.det().is_zero()).map(|(l, sh)| {
                let dg = intlat::discriminant_group(l)?;
                for i in 0..dg.orders.len() {
                    let y = dg.generator(i);
                    let z: Vec<BigRational> =
                        y.iter().zip(sh).map(|(a, &b)| a + BigRational::from_integer(b.into())).collect();
                    if mod_two(&dg.q(&y)) != mod_two(&dg.q(&z)) || dg.coords(&y)? != dg.coords(&z)? {
                        return Ok(Some("q changed under a lattice shift".into()));
                    }
                }
                Ok(None)
            }),
        ));
        let u = intlat::make_standard(StandardLattice::U)?;
        out.push(all_of(
            "signed permutations of U^k",
            (1..=4usize).map(|k| {
                let lat = Arc::new((1..k).fold(u.clone(), |acc, _| intlat::direct_sum(&acc, &u)));
                let perm = |rng: &mut ChaCha8Rng| {
                    let mut m = IntMatrix::zeros(2 * k, 2 * k);
                    let mut order: Vec<usize> = (0..k).collect();
                    for i in (1..k).rev() {
                        order.swap(i, rng.gen_range(0..=i));
                    }
                    for (b, &t) in order.iter().enumerate() {
                        let sign = if rng.gen_bool(0.5) { -BigInt::one() } else { BigInt::one() };
                        let (p, q) = if rng.gen_bool(0.5) { (1, 0) } else { (0, 1) };
                        m.set(2 * t, 2 * b + p, sign.clone());
                        m.set(2 * t + 1, 2 * b + q, sign);
                    }
                    m
                };
                let g = Isometry::new(Arc::clone(&lat), perm(&mut rng))?;
                let h = Isometry::new(Arc::clone(&lat), perm(&mut rng))?;
                let gh = g.compose(&h)?;
                fail_if(
                    intlat::is_isometry(&lat, gh.matrix())? && g.compose(&g.inverse())?.is_identity(),
                    || format!("closure fails on U^{k}"),
                )
            }),
        ));
        Ok(out)
    })
}

fn mukai_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
    guard("mukai", || {
        let mut out = Vec::new();
        let vec24 = |rng: &mut ChaCha8Rng| -> Vec<BigInt> { (0..24).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect() };
        let triples: Vec<[Vec<BigInt>; 3]> = (0..200).map(|_| [vec24(&mut rng), vec24(&mut rng), vec24(&mut rng)]).collect();
        out.push(all_of(
            "pairing symmetric, bilinear, even",
            triples.iter().map(|[x, y, z]| {
                let p = |a: &[BigInt], b: &[BigInt]| -> Result<BigInt> {
                    mukai::mukai_pairing(&MukaiVector::from_coords(a)?, &MukaiVector::from_coords(b)?)
                };
                let comb: Vec<BigInt> = x.iter().zip(y).map(|(s, t)| s * 3 + t).collect();
                fail_if(
                    p(x, y)? == p(y, x)?
                        && p(&comb, z)? == p(x, z)? * 3 + p(y, z)?
                        && (p(x, x)? % BigInt::from(2)).is_zero(),
                    || "pairing identity fails".into(),
                )
            }),
        ));
        for n in 2..=12u64 {
            let v = MukaiVector::ideal_sheaf(n);
            let lat = mukai::orthogonal_complement(&v)?;
            let dg = intlat::discriminant_group(&lat)?;
            let vv = BigInt::from(2 * n - 2);
            out.push(Check::eq(format!("|det v^⊥|, n = {n}"), vv.clone(), lat.det().abs()));
            out.push(Check::holds(format!("A(v^⊥) cyclic of order (v,v), n = {n}"), dg.is_cyclic() && dg.order() == vv));
            out.push(Check::eq(format!("dim = (v,v) + 2, n = {n}"), BigInt::from(2 * n), v.moduli_dimension()));
        }
        let polys: Vec<HilbertPoly> = (0..15)
            .map(|_| {
                HilbertPoly::from_sheaf(
                    rng.gen_range(1..=4),
                    2 * rng.gen_range(1..=3),
                    rng.gen_range(-4..=4),
                    rng.gen_range(-6..=6),
                    rng.gen_range(-6..=6),
                )
            })
            .collect::<Result<_>>()?;
        let mut preorder = true;
        for a in &polys {
            for b in &polys {
                let ab = mukai::gieseker_compare(a, b)?;
                preorder &= ab == mukai::gieseker_compare(b, a)?.reverse();
                for c in &polys {
                    if ab != Ordering::Greater && mukai::gieseker_compare(b, c)? != Ordering::Greater {
                        preorder &= mukai::gieseker_compare(a, c)? != Ordering::Greater;
                    }
                }
            }
        }
        out.push(Check::holds("Gieseker comparison is a total preorder", preorder));
        Ok(out)
    })
}

fn random_reflection(lat: &Arc<Lattice>, rng: &mut ChaCha8Rng) -> Result<Isometry> {
    let sq = if rng.gen_bool(0.5) { 2 } else { -2 };
    monodromy::reflection(&monodromy::sample_vector_of_square(lat, sq, rng))
}

fn random_product(lat: &Arc<Lattice>, rng: &mut ChaCha8Rng, len: usize) -> Result<Isometry> {
    (0..len).try_fold(Isometry::identity(Arc::clone(lat)), |acc, _| acc.compose(&random_reflection(lat, rng)?))
}

fn monodromy_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
    guard("monodromy", || {
        let mut out = Vec::new();
        for n in [2u64, 3, 5, 7, 13] {
            let model = HilbModel::get(n)?;
            let ol = OrientedLattice::hilb(n)?;
            let lat = Arc::clone(ol.lattice());
            let group: Vec<BigInt> = monodromy::residual_orthogonal_group(n)?.into_iter().map(BigInt::from).collect();
            let mut w_ok = true;
            let mut eta_ok = true;
            let mut res_ok = true;
            let mut round_ok = true;
            for len in 1..=6 {
                let g = random_product(&lat, &mut rng, len)?;
                let h = random_product(&lat, &mut rng, 7 - len)?.negate();
                let gh = g.compose(&h)?;
                w_ok &= monodromy::in_w(&ol, &g)?.member;
                eta_ok &= ol.orientation_character(&gh)? == ol.orientation_character(&g)? * ol.orientation_character(&h)?;
                let (rg, rh, rgh) = (ol.residual_action(&g)?, ol.residual_action(&h)?, ol.residual_action(&gh)?);
                let m = &rg.modulus;
                res_ok &= (&rg.multiplier * &rh.multiplier).mod_floor(m) == rgh.multiplier.mod_floor(m);
                res_ok &= n == 2 || [&rg, &rh, &rgh].iter().all(|r| group.contains(&r.multiplier.mod_floor(m)));
                let ext = model.ext_to_mukai(&g)?;
                let v = model.v.to_coords();
                let fixing = if ext.apply(&v) == v { ext } else { ext.negate() };
                round_ok &= model.mu(&fixing)? == g;
            }
            out.push(Check::holds(format!("reflection products in W, n = {n}"), w_ok));
            out.push(Check::holds(format!("η multiplicative, n = {n}"), eta_ok));
            out.push(Check::holds(format!("residual multiplicative, in O(q), n = {n}"), res_ok));
            out.push(Check::holds(format!("μ ∘ ext = id, n = {n}"), round_ok));
        }
        out.push(all_of(
            "|O(q)| = 2^ρ(n-1) and the W index, n ≤ 20000",
            (2..=20000u64).map(|n| {
                let rho = numtheory::distinct_prime_count(n - 1);
                let order = monodromy::residual_orthogonal_group(n)?.len() as u64;
                let want = if n <= 6 { 1 } else { 1u64 << (rho - 1) };
                let idx = monodromy::w_index(n)?;
                fail_if(order == 1 << rho && idx == want, || format!("n = {n}: |O(q)| = {order}, index {idx}"))
            }),
        ));
        out.push(Check::eq("trace criterion, n = 3, m = 3", false, monodromy::trace_criterion(3, 3)?));
        Ok(out)
    })
}

fn moduli_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
    guard("moduli", || {
        let mut out = Vec::new();
        out.push(all_of(
            "P_n valid, distinct, of size 2^(ρ(n-1)-1), n ≤ 20000",
            (2..=20000u64).map(|n| {
                let e = moduli::enumerate_pn(n)?;
                let mut sorted = e.clone();
                sorted.dedup();
                let rho = numtheory::distinct_prime_count(n - 1);
                for x in &e {
                    x.validate(n)?;
                }
                fail_if(sorted.len() == e.len() && e.len() as u64 == 1 << rho.saturating_sub(1), || format!("n = {n}"))
            }),
        ));
        out.push(all_of(
            "ι primitive with glue index 2n-2, n ≤ 50",
            (2..=50u64).flat_map(|n| moduli::enumerate_pn(n).unwrap_or_default().into_iter().map(move |e| (n, e))).map(
                |(n, e)| {
                    let emb = moduli::iota(n, e)?;
                    fail_if(
                        moduli::complement_is_orthogonal(&emb)? && moduli::glue_index(&emb)? == BigInt::from(2 * n - 2),
                        || format!("n = {n}, ({}, {})", e.r, e.s),
                    )
                },
            ),
        ));
        let mk = mukai::mukai_lattice();
        for n in [7u64, 31, 211] {
            let entries = moduli::enumerate_pn(n)?;
            let mut embs = Vec::new();
            for e in &entries {
                let base = moduli::iota(n, *e)?;
                let g = random_product(&mk, &mut rng, 3)?;
                embs.push(base.then(&g)?);
                embs.push(base);
            }
            let k = embs.len();
            let mut same = vec![vec![false; k]; k];
            for i in 0..k {
                for j in 0..k {
                    same[i][j] = moduli::same_orbit(&embs[i], &embs[j])?;
                }
            }
            let equivalence = (0..k).all(|i| {
                same[i][i]
                    && (0..k).all(|j| same[i][j] == same[j][i] && (0..k).all(|l| !(same[i][j] && same[j][l]) || same[i][l]))
            });
            let classes = (0..k).filter(|&i| (0..i).all(|j| !same[j][i])).count();
            out.push(Check::holds(format!("same_orbit is an equivalence, n = {n}"), equivalence));
            out.push(Check::eq(format!("orbit classes = |P_n|, n = {n}"), entries.len(), classes));
        }
        let rep = moduli::example7_report()?;
        for (case, want) in rep.cases.iter().zip([-5i64, -7]) {
            out.push(Check::eq(format!("genus-2 example, deg {}: residual", case.degree), want.rem_euclid(12), case.residual.rem_euclid(12)));
            out.push(Check::eq(format!("genus-2 example, deg {}: in W", case.degree), false, case.in_w));
        }
        Ok(out)
    })
}

fn factorial(k: u32) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

fn chern_suite() -> Vec<Check> {
    guard("chern", || {
        let mut out = Vec::new();
        let back = chern::round_trip(12)?;
        let ring = GradedRing::new(24);
        out.push(Check::holds(
            "Newton round trip to degree 24",
            back.iter().enumerate().all(|(j, c)| *c == ring.c(j as u32 + 1, "")),
        ));
        let ch = chern::chern_to_character(12)?;
        let mut denoms = true;
        let mut leads = true;
        for (i, e) in ch.iter().enumerate() {
            let f = factorial(i as u32 + 1);
            denoms &= e.terms().all(|(_, a)| (&f % a.denom()).is_zero());
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            leads &= e.coefficient(&Monomial::gen(Gen::c(i as u32 + 1, ""))) == BigRational::new(sign, factorial(i as u32));
        }
        out.push(Check::holds("ch_i denominators divide i!", denoms));
        out.push(Check::holds("ch_i leading coefficient (-1)^(i-1)/(i-1)!", leads));
        for i in 3..=8 {
            out.push(Check::holds(format!("σ_{i} linear"), chern::verify_sigma_linear(i)?.holds));
        }
        for i in 1..=8 {
            out.push(Check::holds(format!("twist formula, i = {i}"), chern::verify_twist_formula(i)?.holds));
        }
        let r = GradedRing::new(16);
        let nested = |a: &[&str], b: &[&str]| {
            let (x, y) = (r.whitney(a), r.whitney(b));
            (0..=8usize).map(|d| (0..=d).fold(r.zero(), |s, j| &s + &(&x[j] * &y[d - j]))).collect::<Vec<_>>()
        };
        out.push(Check::holds("Whitney associativity", nested(&["x", "y"], &["z"]) == nested(&["x"], &["y", "z"])));
        Ok(out)
    })
}

fn extorder_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
    guard("extorder", || {
        let mut out = Vec::new();
        out.push(all_of(
            "cyclic orders match the splitting search, d, e ≤ 60",
            (1..=60i64).flat_map(|d| (1..=60i64).map(move |e| (d, e))).map(|(d, e)| {
                let k = extorder::cyclic_ext_order(d, e)?;
                fail_if(Some(k) == extorder::cyclic_ext_order_search(d, e), || format!("({d}, {e})"))
            }),
        ));
        let model = HilbModel::get(2)?;
        let lat = Arc::clone(model.lattice());
        let gens: Vec<(Isometry, Isometry)> = (0..30)
            .map(|_| extorder::reflection_pair(&model, &mut rng).map(|(_, g)| (g.clone(), g)))
            .collect::<Result<_>>()?;
        let mut prev: Option<Vec<Vec<BigInt>>> = None;
        let mut monotone = true;
        for k in [1usize, 4, 10, 30] {
            let sys = EquivariantSystem::new(Arc::clone(&lat), Arc::clone(&lat), gens[..k].to_vec(), None)?;
            let sol = extorder::equivariant_hom(&sys)?;
            if let Some(p) = &prev {
                let mut both = p.clone();
                both.extend(sol.lattice.iter().cloned());
                monotone &= linalg::hnf_rows(&both) == linalg::hnf_rows(p);
            }
            prev = Some(sol.lattice);
        }
        out.push(Check::holds("equivariant solutions shrink as generators are added", monotone));
        out.push(Check::eq("Hom_G(Hilb(2), Hilb(2)) rank", 1, prev.map_or(0, |p| p.len())));
        for n in 2..=4u64 {
            let r = extorder::mukai_middle_ext_order(n, 12, seed.wrapping_add(n))?;
            out.push(Check::eq(format!("middle extension order, n = {n}"), (2 * n - 2).to_string(), r.order.unwrap_or_default()));
        }
        out.push(Check::eq("r(3, 2)", 4, extorder::master_order(3, 2)?));
        out.push(all_of(
            "r(n, i) ≥ 3 for n ≤ 500",
            (3..=500u64).flat_map(|n| (2..=(n + 2) / 2).map(move |i| (n, i))).map(|(n, i)| {
                let r = extorder::master_order(n, i)?;
                fail_if(r >= 3, || format!("r({n}, {i}) = {r}"))
            }),
        ));
        out.push(Check::holds("μ kernel nontrivial at n = 2", !extorder::mu_kernel(2)?.is_trivial()));
        out.push(all_of(
            "μ kernel trivial for 3 ≤ n ≤ 10",
            (3..=10u64).map(|n| fail_if(extorder::mu_kernel(n)?.is_trivial(), || format!("n = {n}"))),
        ));
        Ok(out)
    })
}
