//! Orders of extension classes: the cyclic gcd formula, equivariant
//! homomorphism lattices cut out by reflection generators, the Mukai-middle
//! order `(v,v)`, the master order formula, and the kernel of `μ`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intlat::{Isometry, LatVec, Lattice};
use crate::linalg::{self, modp, IntMatrix, Matrix};
use crate::monodromy::{self, HilbModel};

/// The extension `0 → dZ/deZ → Z/deZ → Z/dZ → 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FinCyclicExt {
    pub d: i64,
    pub e: i64,
}

impl FinCyclicExt {
    pub fn order(&self) -> Result<u64> {
        cyclic_ext_order(self.d, self.e)
    }
}

/// Least `k >= 1` such that some `x` in `Z/deZ` has `d x = 0` and maps to
/// `k` in `Z/dZ`, i.e. the pullback along multiplication by `k` splits.
pub fn cyclic_ext_order_search(d: i64, e: i64) -> Option<u64> {
    let (d, e) = (d.unsigned_abs(), e.unsigned_abs());
    if d == 0 || e == 0 {
        return None;
    }
    let de = d * e;
    let mut best = d;
    for x in 0..de {
        if (d * x) % de == 0 {
            let k = x % d;
            if k != 0 {
                best = best.min(k);
            }
        }
    }
    Some(best)
}

/// `gcd(d, e)`, cross-checked by [`cyclic_ext_order_search`] when `|de| <= 10^4`.
pub fn cyclic_ext_order(d: i64, e: i64) -> Result<u64> {
    if d == 0 {
        return Err(Error::OutOfRange("d must be nonzero".into()));
    }
    let g = d.unsigned_abs().gcd(&e.unsigned_abs());
    if (d as i128 * e as i128).unsigned_abs() <= 10_000 {
        if let Some(k) = cyclic_ext_order_search(d, e) {
            assert_eq!(k, g, "splitting search disagrees with gcd for ({d}, {e})");
        }
    }
    Ok(g)
}

/// A linear map on unknown vectors, evaluated exactly or modulo a prime.
trait LinearMap: Send + Sync {
    fn image(&self, x: &[BigInt]) -> Vec<BigInt>;
    fn image_mod(&self, x: &[u64], p: u64) -> Vec<u64>;
}

fn small_entries(m: &IntMatrix) -> Result<Vec<i64>> {
    m.entries()
        .iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::OutOfRange("matrix entry exceeds 64 bits".into())))
        .collect()
}

fn to_mod(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Products of small dense matrices mod `p`; `a` is `r×k`, `b` is `k×c`.
fn mul_mod_dense(a: &[u64], b: &[u64], r: usize, k: usize, c: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; r * c];
    for i in 0..r {
        for t in 0..k {
            let x = a[i * k + t];
            if x == 0 {
                continue;
            }
            for j in 0..c {
                let y = b[t * c + j];
                if y != 0 {
                    out[i * c + j] = modp::add_mod(out[i * c + j], modp::mul_mod(x, y, p), p);
                }
            }
        }
    }
    out
}

/// Unknown vector layout: `vec(M)` row-major (`cod × dom`), then one scale
/// parameter `t` when an affine constraint is present.
struct Commutes {
    dom: usize,
    cod: usize,
    a: Vec<i64>,
    c: Vec<i64>,
    a_big: IntMatrix,
    c_big: IntMatrix,
}

impl LinearMap for Commutes {
    fn image(&self, x: &[BigInt]) -> Vec<BigInt> {
        let m = Matrix::from_fn(self.cod, self.dom, |i, j| x[i * self.dom + j].clone());
        let d = &(&m * &self.a_big) - &(&self.c_big * &m);
        d.entries().to_vec()
    }

    fn image_mod(&self, x: &[u64], p: u64) -> Vec<u64> {
        let a: Vec<u64> = self.a.iter().map(|&v| to_mod(v, p)).collect();
        let c: Vec<u64> = self.c.iter().map(|&v| to_mod(v, p)).collect();
        let m = &x[..self.cod * self.dom];
        let ma = mul_mod_dense(m, &a, self.cod, self.dom, self.dom, p);
        let cm = mul_mod_dense(&c, m, self.cod, self.cod, self.dom, p);
        ma.iter().zip(&cm).map(|(&u, &v)| modp::sub_mod(u, v, p)).collect()
    }
}

/// `M · basis - t · target`.
struct Restricts {
    dom: usize,
    cod: usize,
    width: usize,
    basis: Vec<i64>,
    target: Vec<i64>,
    basis_big: IntMatrix,
    target_big: IntMatrix,
}

impl LinearMap for Restricts {
    fn image(&self, x: &[BigInt]) -> Vec<BigInt> {
        let m = Matrix::from_fn(self.cod, self.dom, |i, j| x[i * self.dom + j].clone());
        let t = &x[self.cod * self.dom];
        let d = &(&m * &self.basis_big) - &self.target_big.scale(t);
        d.entries().to_vec()
    }

    fn image_mod(&self, x: &[u64], p: u64) -> Vec<u64> {
        let b: Vec<u64> = self.basis.iter().map(|&v| to_mod(v, p)).collect();
        let m = &x[..self.cod * self.dom];
        let t = x[self.cod * self.dom];
        let mb = mul_mod_dense(m, &b, self.cod, self.dom, self.width, p);
        mb.iter()
            .zip(&self.target)
            .map(|(&u, &v)| modp::sub_mod(u, modp::mul_mod(t, to_mod(v, p), p), p))
            .collect()
    }
}

/// `M · basis = t · target` for a scale `t`; `basis` is `dom × m`,
/// `target` is `cod × m`.
#[derive(Clone, Debug)]
pub struct AffineConstraint {
    pub basis: IntMatrix,
    pub target: IntMatrix,
}

/// Homomorphisms `M: domain → codomain` with `M g = g' M` for every
/// generator pair `(g, g')`, optionally subject to an affine constraint.
#[derive(Clone, Debug)]
pub struct EquivariantSystem {
    pub domain: Arc<Lattice>,
    pub codomain: Arc<Lattice>,
    pub generators: Vec<(Isometry, Isometry)>,
    pub constraint: Option<AffineConstraint>,
}

impl EquivariantSystem {
    pub fn new(
        domain: Arc<Lattice>,
        codomain: Arc<Lattice>,
        generators: Vec<(Isometry, Isometry)>,
        constraint: Option<AffineConstraint>,
    ) -> Result<Self> {
        for (g, h) in &generators {
            if g.lattice().gram() != domain.gram() {
                return Err(Error::LatticeMismatch(g.lattice().label().into(), domain.label().into()));
            }
            if h.lattice().gram() != codomain.gram() {
                return Err(Error::LatticeMismatch(h.lattice().label().into(), codomain.label().into()));
            }
        }
        if let Some(c) = &constraint {
            if c.basis.rows() != domain.rank() || c.target.rows() != codomain.rank() || c.basis.cols() != c.target.cols() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{}×m basis and {}×m target", domain.rank(), codomain.rank()),
                    found: format!(
                        "{}×{} basis and {}×{} target",
                        c.basis.rows(),
                        c.basis.cols(),
                        c.target.rows(),
                        c.target.cols()
                    ),
                });
            }
        }
        Ok(EquivariantSystem { domain, codomain, generators, constraint })
    }

    fn nvars(&self) -> usize {
        self.domain.rank() * self.codomain.rank() + usize::from(self.constraint.is_some())
    }

    fn maps(&self) -> Result<Vec<Box<dyn LinearMap>>> {
        let (dom, cod) = (self.domain.rank(), self.codomain.rank());
        let mut maps: Vec<Box<dyn LinearMap>> = Vec::new();
        if let Some(c) = &self.constraint {
            maps.push(Box::new(Restricts {
                dom,
                cod,
                width: c.basis.cols(),
                basis: small_entries(&c.basis)?,
                target: small_entries(&c.target)?,
                basis_big: c.basis.clone(),
                target_big: c.target.clone(),
            }));
        }
        for (g, h) in &self.generators {
            maps.push(Box::new(Commutes {
                dom,
                cod,
                a: small_entries(g.matrix())?,
                c: small_entries(h.matrix())?,
                a_big: g.matrix().clone(),
                c_big: h.matrix().clone(),
            }));
        }
        Ok(maps)
    }
}

/// Integral solutions of an [`EquivariantSystem`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSolution {
    /// Z-basis of the homogeneous solutions (`t = 0`).
    pub homogeneous: Vec<IntMatrix>,
    /// A solution with `t = 1`, when the constraint is present and solvable.
    pub particular: Option<IntMatrix>,
    /// Least `t >= 1` admitting a solution; `None` without a constraint or
    /// when only `t = 0` is possible.
    pub min_scale: Option<BigInt>,
    /// Hermite basis of the full solution lattice, in unknown-vector form.
    pub lattice: Vec<Vec<BigInt>>,
}

impl HomSolution {
    pub fn rank(&self) -> usize {
        self.lattice.len()
    }
}

/// Kernel of a family of maps mod `p`, kept up to date as maps are added.
struct ModularKernel {
    kernel: modp::IncrementalKernel,
}

impl ModularKernel {
    fn new(nvars: usize, p: u64) -> Self {
        ModularKernel { kernel: modp::IncrementalKernel::full(nvars, p) }
    }

    fn constrain(&mut self, map: &dyn LinearMap) {
        let p = self.kernel.prime();
        if self.kernel.dim() > 0 {
            self.kernel.constrain(|x| map.image_mod(x, p));
        }
    }
}

/// Exact Z-basis (Hermite form) of the common kernel, from the mod-`p`
/// shape, rational reconstruction and exact verification.
fn exact_kernel(nvars: usize, maps: &[Box<dyn LinearMap>], first: Option<ModularKernel>) -> Result<Vec<Vec<BigInt>>> {
    let mut primes = modp::large_primes();
    let mut residues: Vec<(Vec<Vec<u64>>, u64)> = Vec::new();
    let mut pivots: Option<Vec<usize>> = None;
    let mut first = first;
    for _ in 0..8 {
        let mk = match first.take() {
            Some(k) => k,
            None => {
                let used: Vec<u64> = residues.iter().map(|r| r.1).collect();
                let p = primes.by_ref().find(|p| !used.contains(p)).expect("infinitely many primes");
                let mut k = ModularKernel::new(nvars, p);
                for m in maps {
                    k.constrain(m.as_ref());
                }
                k
            }
        };
        let p = mk.kernel.prime();
        let (rows, piv) = mk.kernel.canonical();
        match &pivots {
            Some(old) if old.len() < piv.len() => continue,
            Some(old) if *old == piv => {}
            _ => {
                pivots = Some(piv.clone());
                residues.clear();
            }
        }
        residues.push((rows, p));
        if let Some(basis) = reconstruct(&residues, nvars) {
            if basis.iter().all(|v| maps.iter().all(|m| m.image(v).iter().all(Zero::is_zero))) {
                return Ok(basis);
            }
        }
    }
    Err(Error::Unstabilized("modular reconstruction did not converge".into()))
}

fn reconstruct(residues: &[(Vec<Vec<u64>>, u64)], nvars: usize) -> Option<Vec<Vec<BigInt>>> {
    let dim = residues[0].0.len();
    if dim == 0 {
        return Some(Vec::new());
    }
    let primes: Vec<u64> = residues.iter().map(|r| r.1).collect();
    let mut rat_rows = Vec::with_capacity(dim);
    let mut integral = true;
    for i in 0..dim {
        let mut row = Vec::with_capacity(nvars);
        for j in 0..nvars {
            let rs: Vec<u64> = residues.iter().map(|r| r.0[i][j]).collect();
            let q = if rs.iter().all(|&x| x == 0) {
                BigRational::zero()
            } else {
                let (x, m) = modp::crt(&rs, &primes);
                modp::rational_reconstruct(&x, &m)?
            };
            integral &= q.is_integer();
            row.push(q);
        }
        rat_rows.push(row);
    }
    let int_rows: Vec<Vec<BigInt>> = rat_rows
        .iter()
        .map(|row| {
            let d = linalg::rational::common_denominator(row);
            row.iter().map(|q| (q * BigRational::from_integer(d.clone())).to_integer()).collect()
        })
        .collect();
    // integral RREF rows with unit pivots already span the saturated lattice
    Some(if integral { linalg::hnf_rows(&int_rows) } else { linalg::saturate_rows(&int_rows) })
}

fn solution_from_lattice(sys: &EquivariantSystem, lattice: Vec<Vec<BigInt>>) -> HomSolution {
    let (dom, cod) = (sys.domain.rank(), sys.codomain.rank());
    let to_matrix = |v: &[BigInt]| Matrix::from_fn(cod, dom, |i, j| v[i * dom + j].clone());
    if sys.constraint.is_none() {
        return HomSolution {
            homogeneous: lattice.iter().map(|v| to_matrix(v)).collect(),
            particular: None,
            min_scale: None,
            lattice,
        };
    }
    let t_idx = dom * cod;
    let tau: Vec<BigInt> = lattice.iter().map(|v| v[t_idx].clone()).collect();
    let combine = |c: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); t_idx + 1];
        for (ci, v) in c.iter().zip(&lattice) {
            if ci.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += ci * x;
            }
        }
        out
    };
    let homogeneous = if lattice.is_empty() {
        Vec::new()
    } else {
        let row = Matrix::from_rows(vec![tau.clone()]).expect("one row");
        linalg::integer_kernel(&row).iter().map(|c| to_matrix(&combine(c))).collect()
    };
    // Bezout combination reaching gcd of the scale coordinates
    let mut g = BigInt::zero();
    let mut coeffs = vec![BigInt::zero(); tau.len()];
    for (i, t) in tau.iter().enumerate() {
        let e = g.extended_gcd(t);
        for c in coeffs.iter_mut().take(i) {
            *c *= &e.x;
        }
        coeffs[i] = e.y;
        g = e.gcd;
    }
    let min_scale = (!g.is_zero()).then(|| g.abs());
    let particular = if g.abs().is_one() {
        let mut v = combine(&coeffs);
        if v[t_idx].is_negative() {
            v.iter_mut().for_each(|x| *x = -&*x);
        }
        Some(to_matrix(&v))
    } else {
        None
    };
    HomSolution { homogeneous, particular, min_scale, lattice }
}

pub fn equivariant_hom(sys: &EquivariantSystem) -> Result<HomSolution> {
    let maps = sys.maps()?;
    let lattice = exact_kernel(sys.nvars(), &maps, None)?;
    Ok(solution_from_lattice(sys, lattice))
}

/// Generator batches are added until the mod-`p` solution space is
/// unchanged by two whole batches in a row; the exact lattice is then recovered.
#[derive(Clone, Debug)]
pub struct Stabilized {
    pub solution: HomSolution,
    pub stabilized: bool,
    pub batches: usize,
    pub generators: usize,
}

pub fn equivariant_hom_stabilized(
    domain: Arc<Lattice>,
    codomain: Arc<Lattice>,
    constraint: Option<AffineConstraint>,
    batch_size: usize,
    max_batches: usize,
    mut sample: impl FnMut() -> Result<(Isometry, Isometry)>,
) -> Result<Stabilized> {
    let mut sys = EquivariantSystem::new(domain, codomain, Vec::new(), constraint)?;
    let nvars = sys.nvars();
    let p = modp::large_primes().next().expect("a prime");
    let mut mk = ModularKernel::new(nvars, p);
    for m in sys.maps()? {
        mk.constrain(m.as_ref());
    }
    let mut previous: Option<Vec<Vec<u64>>> = None;
    let mut stabilized = false;
    let mut unchanged = 0;
    let mut batches = 0;
    while batches < max_batches {
        let batch: Vec<(Isometry, Isometry)> = (0..batch_size).map(|_| sample()).collect::<Result<_>>()?;
        let probe = EquivariantSystem::new(Arc::clone(&sys.domain), Arc::clone(&sys.codomain), batch.clone(), None)?;
        for m in probe.maps()? {
            mk.constrain(m.as_ref());
        }
        sys.generators.extend(batch);
        batches += 1;
        let (rows, _) = mk.kernel.canonical();
        if previous.as_ref() == Some(&rows) {
            unchanged += 1;
            if unchanged == 2 {
                stabilized = true;
                break;
            }
        } else {
            unchanged = 0;
        }
        previous = Some(rows);
    }
    let maps = sys.maps()?;
    let lattice = exact_kernel(nvars, &maps, Some(mk))?;
    let generators = sys.generators.len();
    Ok(Stabilized { solution: solution_from_lattice(&sys, lattice), stabilized, batches, generators })
}

/// Pairs `(ρ_u on Mukai, ρ_u on v^⊥)` for random `u ∈ v^⊥` with `(u,u) = -2`.
/// Half the draws are dense roots `e + b f + y + cδ` through the first
/// hyperbolic plane; sparse roots alone tend to miss `δ` or whole blocks,
/// leaving invariant vectors behind.
pub fn reflection_pair(model: &HilbModel, rng: &mut ChaCha8Rng) -> Result<(Isometry, Isometry)> {
    let u = if rng.gen_bool(0.5) {
        delta_root(model.lattice(), rng)
    } else {
        monodromy::sample_vector_of_square(model.lattice(), -2, rng)
    };
    let on_hilb = monodromy::reflection(&u)?;
    let big = LatVec::new(Arc::clone(model.mukai.lattice()), model.complement.embed(u.coords()))?;
    let on_mukai = monodromy::reflection(&big)?;
    Ok((on_mukai, on_hilb))
}

fn delta_root(lattice: &Arc<Lattice>, rng: &mut ChaCha8Rng) -> LatVec {
    let n = lattice.rank();
    let mut x = vec![BigInt::zero(); n];
    for xi in x.iter_mut().take(n - 1).skip(2) {
        if rng.gen_bool(0.3) {
            *xi = BigInt::from(rng.gen_range(-1i64..=1));
        }
    }
    // a fixed δ-coefficient would leave (2n-2)f + δ invariant
    x[n - 1] = BigInt::from([-2i64, -1, 1, 2][rng.gen_range(0..4)]);
    x[0] = BigInt::one();
    // (x, x) = 2b + (rest) must equal -2
    let rest = lattice.square(&x);
    x[1] = (BigInt::from(-2) - rest) / 2;
    debug_assert_eq!(lattice.square(&x), BigInt::from(-2));
    LatVec::new(Arc::clone(lattice), x).expect("rank matches")
}

#[derive(Clone, Debug, Serialize)]
pub struct MiddleReport {
    pub n: u64,
    pub order: Option<String>,
    pub stabilized: bool,
    pub generators: usize,
    pub batches: usize,
    pub rank: usize,
}

/// Least `k >= 1` admitting an equivariant `φ: Mukai → v^⊥` with
/// `φ|_{v^⊥} = k·id`, for `v = (1, 0, 1-n)`.
pub fn mukai_middle_ext_order(n: u64, generator_count: usize, seed: u64) -> Result<MiddleReport> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    if generator_count < 10 {
        return Err(Error::OutOfRange(format!("need at least 10 generators per batch, got {generator_count}")));
    }
    let model = HilbModel::get(n)?;
    let constraint = AffineConstraint {
        basis: model.complement.basis.clone(),
        target: IntMatrix::identity(model.lattice().rank()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let st = equivariant_hom_stabilized(
        Arc::clone(model.mukai.lattice()),
        Arc::clone(model.lattice()),
        Some(constraint),
        generator_count,
        12,
        || reflection_pair(&model, &mut rng),
    )?;
    let rank = st.solution.rank();
    if !st.stabilized || rank > 2 {
        return Err(Error::Unstabilized(format!(
            "solution rank {rank} after {} generators; increase the generator count",
            st.generators
        )));
    }
    Ok(MiddleReport {
        n,
        order: st.solution.min_scale.as_ref().map(ToString::to_string),
        stabilized: st.stabilized,
        generators: st.generators,
        batches: st.batches,
        rank,
    })
}

/// Lower bound `r(n, i)` on the order of the extension class in degree `2i`.
pub fn master_order(n: u64, i: u64) -> Result<u64> {
    if n < 3 || i < 2 || 2 * i > n + 2 {
        return Err(Error::OutOfRange(format!("(n, i) = ({n}, {i}) outside 3 <= n, 2 <= i <= (n+2)/2")));
    }
    let m = 2 * n - 2;
    let r = if i == 2 {
        if n % 2 == 1 {
            m
        } else {
            n - 1
        }
    } else {
        m / (i - 1).gcd(&m)
    };
    assert!(r >= 3, "order {r} below 3 at (n, i) = ({n}, {i})");
    Ok(r)
}

/// The element acting as `-1` on `v^⊥` and `+1` on `v`, when integral.
#[derive(Clone, Debug)]
pub struct MuKernel {
    pub n: u64,
    pub element: Option<Isometry>,
}

impl MuKernel {
    pub fn is_trivial(&self) -> bool {
        self.element.is_none()
    }
}

pub fn mu_kernel(n: u64) -> Result<MuKernel> {
    let model = HilbModel::get(n)?;
    let minus = -&IntMatrix::identity(model.lattice().rank());
    let element = match model.extend(&minus, 1).to_integer() {
        Some(m) => Some(Isometry::new(Arc::clone(model.mukai.lattice()), m)?),
        None => None,
    };
    Ok(MuKernel { n, element })
}
