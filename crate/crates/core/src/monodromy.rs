//! Reflections, the orientation character, residual actions on discriminant
//! groups, membership in the reflection group W, and the homomorphisms
//! between stabilizers in the Mukai lattice and isometries of `v^⊥`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::intlat::{self, DiscGroup, Isometry, LatVec, Lattice, StandardLattice, K3_RANK};
use crate::linalg::{self, rational, IntMatrix, Matrix, RatMatrix};
use crate::mukai::{self, Complement, MukaiVector};
use crate::numtheory;

/// `ρ_u(w) = (-2/(u,u)) w + (w,u) u` for `(u,u) = ±2`.
pub fn reflection(u: &LatVec) -> Result<Isometry> {
    let sq = u.square();
    let scale = match sq.to_i64() {
        Some(-2) => BigInt::one(),
        Some(2) => -BigInt::one(),
        _ => return Err(Error::NotRoot(sq.to_string())),
    };
    let lat = u.lattice();
    let x = u.coords();
    let gu = lat.gram().mul_vec(x);
    let n = lat.rank();
    let m = Matrix::from_fn(n, n, |i, j| {
        let d = if i == j { scale.clone() } else { BigInt::zero() };
        d + &x[i] * &gu[j]
    });
    Isometry::new(Arc::clone(lat), m)
}

/// A lattice with a declared ordered basis of a maximal positive subspace.
#[derive(Clone, Debug)]
pub struct OrientedLattice {
    lattice: Arc<Lattice>,
    frame: RatMatrix,
    /// `(F^T G F)^{-1} F^T G`: orthogonal projection onto the frame span, in frame coordinates.
    projector: RatMatrix,
    disc: Option<DiscGroup>,
}

impl OrientedLattice {
    /// `frame` vectors are given in lattice coordinates.
    pub fn new(lattice: Arc<Lattice>, frame: Vec<Vec<BigRational>>) -> Result<Self> {
        let (pos, neg) = lattice.signature();
        if pos + neg != lattice.rank() {
            return Err(Error::Singular);
        }
        if frame.len() != pos || frame.iter().any(|f| f.len() != lattice.rank()) {
            return Err(Error::DimensionMismatch {
                expected: format!("{pos} frame vectors of length {}", lattice.rank()),
                found: format!("{} frame vectors", frame.len()),
            });
        }
        let f = Matrix::from_columns(&frame)?;
        let ft_g = &f.transpose() * &lattice.gram().to_rational();
        let fgf = &ft_g * &f;
        if !rational::is_positive_definite(&fgf) {
            return Err(Error::OutOfRange("frame does not span a positive definite subspace".into()));
        }
        let projector = &rational::inverse(&fgf)? * &ft_g;
        let disc = intlat::discriminant_group(&lattice).ok();
        Ok(OrientedLattice { lattice, frame: f, projector, disc })
    }

    /// Frame `e_i + f_i` over the first hyperbolic planes found among the
    /// coordinate pairs `(j, j+1)`, as many as the positive index.
    pub fn standard(lattice: Arc<Lattice>) -> Result<Self> {
        let (pos, _) = lattice.signature();
        let g = lattice.gram();
        let n = lattice.rank();
        let is_plane = |j: usize| {
            (0..n).all(|k| {
                let (a, b) = (g.get(j, k), g.get(j + 1, k));
                let ea = if k == j + 1 { BigInt::one() } else { BigInt::zero() };
                let eb = if k == j { BigInt::one() } else { BigInt::zero() };
                *a == ea && *b == eb
            })
        };
        let mut frame = Vec::new();
        let mut j = 0;
        while j + 1 < n && frame.len() < pos {
            if is_plane(j) {
                let mut v = vec![BigRational::zero(); n];
                v[j] = BigRational::one();
                v[j + 1] = BigRational::one();
                frame.push(v);
                j += 2;
            } else {
                j += 1;
            }
        }
        Self::new(lattice, frame)
    }

    pub fn hilb(n: u64) -> Result<Self> {
        Self::standard(Arc::new(intlat::make_standard(StandardLattice::Hilb(n))?))
    }

    pub fn mukai() -> Self {
        Self::standard(mukai::mukai_lattice()).expect("Mukai lattice has four coordinate planes")
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn frame(&self) -> &RatMatrix {
        &self.frame
    }

    pub fn disc(&self) -> Option<&DiscGroup> {
        self.disc.as_ref()
    }

    pub fn orientation_character(&self, g: &Isometry) -> Result<i8> {
        check_same(&self.lattice, g.lattice())?;
        let gf = &g.matrix().to_rational() * &self.frame;
        let c = &self.projector * &gf;
        let d = rational::rat_det(&c);
        assert!(!d.is_zero(), "an isometry maps a positive frame onto a nondegenerate projection");
        Ok(if d.is_positive() { 1 } else { -1 })
    }

    pub fn residual_action(&self, g: &Isometry) -> Result<ResidualAction> {
        check_same(&self.lattice, g.lattice())?;
        match &self.disc {
            Some(d) => residual_action_in(d, g),
            None => Err(Error::Singular),
        }
    }
}

fn check_same(a: &Lattice, b: &Lattice) -> Result<()> {
    if a.gram() != b.gram() {
        return Err(Error::LatticeMismatch(a.label().to_string(), b.label().to_string()));
    }
    Ok(())
}

pub fn orientation_character(l: &OrientedLattice, g: &Isometry) -> Result<i8> {
    l.orientation_character(g)
}

/// Multiplication by a unit on a cyclic discriminant group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualAction {
    pub multiplier: BigInt,
    pub modulus: BigInt,
}

impl ResidualAction {
    pub fn is_plus_one(&self) -> bool {
        (&self.multiplier - 1u32).mod_floor(&self.modulus).is_zero()
    }

    pub fn is_minus_one(&self) -> bool {
        (&self.multiplier + 1u32).mod_floor(&self.modulus).is_zero()
    }

    pub fn is_plus_minus_one(&self) -> bool {
        self.is_plus_one() || self.is_minus_one()
    }

    /// Representative in `(-modulus/2, modulus/2]`.
    pub fn centered(&self) -> BigInt {
        let m = self.multiplier.mod_floor(&self.modulus);
        if &m * 2u32 > self.modulus {
            m - &self.modulus
        } else {
            m
        }
    }
}

pub fn residual_action(l: &Lattice, g: &Isometry) -> Result<ResidualAction> {
    check_same(l, g.lattice())?;
    residual_action_in(&intlat::discriminant_group(l)?, g)
}

fn residual_action_in(d: &DiscGroup, g: &Isometry) -> Result<ResidualAction> {
    if !d.is_cyclic() {
        return Err(Error::NotCyclic(d.orders.iter().map(ToString::to_string).collect()));
    }
    if d.is_trivial() {
        return Ok(ResidualAction { multiplier: BigInt::zero(), modulus: BigInt::one() });
    }
    let gen = d.generator(0);
    let image = g.apply_rat(&gen);
    let c = d.coords(&image)?;
    Ok(ResidualAction { multiplier: c[0].clone(), modulus: d.orders[0].clone() })
}

/// Outcome of a W-membership test.
#[derive(Clone, Debug)]
pub struct WMembership {
    pub member: bool,
    pub orientation: i8,
    pub residual: ResidualAction,
    /// Integral extension to the Mukai lattice, for members on `Hilb(n)`.
    pub witness: Option<Isometry>,
}

/// Orientation preserving with residual action `±1`.
pub fn in_w(l: &OrientedLattice, g: &Isometry) -> Result<WMembership> {
    let orientation = l.orientation_character(g)?;
    let residual = l.residual_action(g)?;
    let member = orientation == 1 && residual.is_plus_minus_one();
    let witness = if member {
        match HilbModel::for_lattice(&l.lattice) {
            Some(model) => Some(model.ext_to_mukai(g)?),
            None => None,
        }
    } else {
        None
    };
    Ok(WMembership { member, orientation, residual, witness })
}

/// `Hilb(n)` realized as `v^⊥` for `v = (1, 0, 1-n)` inside the Mukai lattice.
#[derive(Debug)]
pub struct HilbModel {
    pub n: u64,
    pub hilb: OrientedLattice,
    pub mukai: OrientedLattice,
    pub v: MukaiVector,
    pub complement: Complement,
    /// `[B | v]`, columns in Mukai coordinates.
    glue: IntMatrix,
    glue_inv: RatMatrix,
}

impl HilbModel {
    pub fn new(n: u64) -> Result<Self> {
        let hilb = OrientedLattice::hilb(n)?;
        let v = MukaiVector::ideal_sheaf(n);
        let complement = mukai::complement(&v)?;
        assert_eq!(complement.lattice.gram(), hilb.lattice.gram());
        let mut cols: Vec<Vec<BigInt>> = (0..complement.basis.cols()).map(|j| complement.basis.column(j)).collect();
        cols.push(v.to_coords());
        let glue = Matrix::from_columns(&cols)?;
        let glue_inv = rational::inverse(&glue.to_rational())?;
        Ok(HilbModel { n, hilb, mukai: OrientedLattice::mukai(), v, complement, glue, glue_inv })
    }

    /// Shared model for `n`.
    pub fn get(n: u64) -> Result<Arc<HilbModel>> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<HilbModel>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(m) = cache.lock().expect("model cache").get(&n) {
            return Ok(Arc::clone(m));
        }
        let model = Arc::new(HilbModel::new(n)?);
        cache.lock().expect("model cache").insert(n, Arc::clone(&model));
        Ok(model)
    }

    /// The model whose lattice has the given Gram matrix, if any.
    pub fn for_lattice(l: &Lattice) -> Option<Arc<HilbModel>> {
        if l.rank() != K3_RANK + 1 {
            return None;
        }
        let d = -l.gram().get(K3_RANK, K3_RANK);
        let n = (d / 2u32 + 1u32).to_u64()?;
        let model = HilbModel::get(n).ok()?;
        (model.hilb.lattice.gram() == l.gram()).then_some(model)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        self.hilb.lattice()
    }

    /// `(2n-2)`.
    pub fn v_square(&self) -> BigInt {
        BigInt::from(2 * self.n - 2)
    }

    /// Rational matrix on the Mukai lattice acting as `g` on `v^⊥` and as
    /// `eps` on `v`.
    pub fn extend(&self, g: &IntMatrix, eps: i64) -> RatMatrix {
        let d = Matrix::block_diagonal(g, &IntMatrix::from_i64_rows(&[&[eps]]));
        &(&self.glue.to_rational() * &d.to_rational()) * &self.glue_inv
    }

    /// The isometry of the Mukai lattice restricting to `g` on `v^⊥`.
    pub fn ext_to_mukai(&self, g: &Isometry) -> Result<Isometry> {
        let eta = self.hilb.orientation_character(g)?;
        let res = self.hilb.residual_action(g)?;
        if eta != 1 {
            return Err(Error::NotInW("orientation character is -1".into()));
        }
        if !res.is_plus_minus_one() {
            return Err(Error::NotInW(format!("residual action {} mod {}", res.centered(), res.modulus)));
        }
        let eps = if res.is_plus_one() { 1 } else { -1 };
        let m = self
            .extend(g.matrix(), eps)
            .to_integer()
            .ok_or_else(|| Error::NotInW("glue condition fails".into()))?;
        Isometry::new(Arc::clone(self.mukai.lattice()), m)
    }

    /// Restriction of `η̃(h)·h` to `v^⊥`, for `h` fixing `v`.
    pub fn mu(&self, h: &Isometry) -> Result<Isometry> {
        check_same(self.mukai.lattice(), h.lattice())?;
        let v = self.v.to_coords();
        if h.apply(&v) != v {
            return Err(Error::DoesNotFix);
        }
        let eta = self.mukai.orientation_character(h)?;
        let signed = if eta == 1 { h.clone() } else { h.negate() };
        let conj = &(&self.glue_inv * &signed.matrix().to_rational()) * &self.glue.to_rational();
        let r = K3_RANK + 1;
        let block = Matrix::from_fn(r, r, |i, j| conj.get(i, j).clone())
            .to_integer()
            .expect("restriction to a primitive sublattice is integral");
        Isometry::new(Arc::clone(self.lattice()), block)
    }
}

pub fn ext_to_mukai(g: &Isometry) -> Result<Isometry> {
    let model = HilbModel::for_lattice(g.lattice())
        .ok_or_else(|| Error::LatticeMismatch(g.lattice().label().to_string(), "Hilb(n)".into()))?;
    model.ext_to_mukai(g)
}

/// Units `a` mod `2n-2` with `a^2 ≡ 1 (mod 4n-4)`, ascending.
pub fn residual_orthogonal_group(n: u64) -> Result<Vec<u64>> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    let m = 2 * n - 2;
    Ok((1..=m).filter(|&a| (a * a) % (2 * m) == 1 % (2 * m)).map(|a| a % m).collect())
}

/// Closed under multiplication mod `modulus`, every element an involution.
pub fn is_elementary_abelian(units: &[u64], modulus: u64) -> bool {
    let set: std::collections::HashSet<u64> = units.iter().map(|a| a % modulus).collect();
    set.iter().all(|&a| (a * a) % modulus == 1 % modulus)
        && set.iter().all(|&a| set.iter().all(|&b| set.contains(&((a * b) % modulus))))
}

/// `[O⁺Λ : W]` for `Λ = Hilb(n)`.
pub fn w_index(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    // roots of a^2 = 1 mod 4n-4 are stable under a -> a + 2n-2, so half of
    // them are the units counted by residual_orthogonal_group
    let order = square_roots_of_one(4 * n - 4) / 2;
    Ok(if n == 2 { 1 } else { order / 2 })
}

/// Number of `x mod m` with `x^2 = 1`.
fn square_roots_of_one(mut m: u64) -> u64 {
    let mut count = 1;
    let mut twos = 0;
    while m % 2 == 0 {
        m /= 2;
        twos += 1;
    }
    count *= match twos {
        0 | 1 => 1,
        2 => 2,
        _ => 4,
    };
    let mut p = 3;
    while p * p <= m {
        if m % p == 0 {
            count *= 2;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 2;
    }
    if m > 1 {
        count *= 2;
    }
    count
}

/// `2^{ρ(n-1)-1}` for `n >= 3`, and 1 for `n = 2`.
pub fn index_formula(n: u64) -> u64 {
    let r = numtheory::distinct_prime_count(n - 1);
    1 << r.saturating_sub(1)
}

/// Whether every norm-one unit of `Z[√m]` has trace `±2 (mod 4n-4)`.
pub fn trace_criterion(n: u64, m: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    if numtheory::is_perfect_square(m) {
        return Ok(true);
    }
    let (b, a) = numtheory::pell_fundamental(m).expect("non-square");
    let modulus = BigInt::from(4 * n - 4);
    let mb = BigInt::from(m);
    let fund = (b.mod_floor(&modulus), a.mod_floor(&modulus));
    let trace_ok = |b: &BigInt| {
        let t = (b * 2u32).mod_floor(&modulus);
        t == BigInt::from(2).mod_floor(&modulus) || t == BigInt::from(-2).mod_floor(&modulus)
    };
    let mut cur = fund.clone();
    loop {
        if !trace_ok(&cur.0) {
            return Ok(false);
        }
        let nb = (&cur.0 * &fund.0 + &mb * &cur.1 * &fund.1).mod_floor(&modulus);
        let na = (&cur.0 * &fund.1 + &cur.1 * &fund.0).mod_floor(&modulus);
        cur = (nb, na);
        if cur.0 == BigInt::one().mod_floor(&modulus) && cur.1.is_zero() {
            return Ok(true);
        }
    }
}

/// A vector of the given square found by sparse search: support of size
/// 1 to 4, entries in `[-3, 3]`.
pub fn sample_vector_of_square(lattice: &Arc<Lattice>, square: i64, rng: &mut impl Rng) -> LatVec {
    let n = lattice.rank();
    let target = BigInt::from(square);
    for _ in 0..1_000_000 {
        let mut x = vec![BigInt::zero(); n];
        for _ in 0..rng.gen_range(1..=4) {
            x[rng.gen_range(0..n)] = BigInt::from(rng.gen_range(-3i64..=3));
        }
        if lattice.square(&x) == target && intlat::is_primitive(&x) {
            return LatVec::new(Arc::clone(lattice), x).expect("rank matches");
        }
    }
    panic!("no vector of square {square} found in {}", lattice.label());
}

/// Index of `v^⊥ ⊕ Zv` in the Mukai lattice.
pub fn glue_index(model: &HilbModel) -> BigInt {
    linalg::det(&model.glue).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilb(n: u64) -> Arc<Lattice> {
        Arc::new(intlat::make_standard(StandardLattice::Hilb(n)).unwrap())
    }

    #[test]
    fn reflections() {
        let l = hilb(3);
        let mut u = vec![BigInt::zero(); 23];
        u[0] = BigInt::one();
        u[1] = BigInt::from(-1);
        let u = LatVec::new(Arc::clone(&l), u).unwrap();
        let r = reflection(&u).unwrap();
        let neg: Vec<BigInt> = u.coords().iter().map(|x| -x).collect();
        assert_eq!(r.apply(u.coords()), neg);
        assert!(r.compose(&r).unwrap().is_identity());

        let mut p = vec![BigInt::zero(); 23];
        p[0] = BigInt::one();
        p[1] = BigInt::one();
        let p = LatVec::new(Arc::clone(&l), p).unwrap();
        let rp = reflection(&p).unwrap();
        assert_eq!(rp.apply(p.coords()), p.coords().to_vec());
        let x = l.basis_vector(6);
        let negx: Vec<BigInt> = x.coords().iter().map(|c| -c).collect();
        assert_eq!(rp.apply(x.coords()), negx);

        assert!(matches!(reflection(&l.basis_vector(0)), Err(Error::NotRoot(_))));
    }

    #[test]
    fn orientation_of_minus_identity() {
        let h = OrientedLattice::hilb(5).unwrap();
        let id = Isometry::identity(Arc::clone(h.lattice()));
        assert_eq!(h.orientation_character(&id).unwrap(), 1);
        assert_eq!(h.orientation_character(&id.negate()).unwrap(), -1);
        let m = OrientedLattice::mukai();
        let mid = Isometry::minus_identity(Arc::clone(m.lattice()));
        assert_eq!(m.orientation_character(&mid).unwrap(), 1);
    }

    #[test]
    fn residual_groups() {
        assert_eq!(residual_orthogonal_group(7).unwrap(), vec![1, 5, 7, 11]);
        assert_eq!(residual_orthogonal_group(2).unwrap(), vec![1]);
        assert_eq!(residual_orthogonal_group(6).unwrap().len(), 2);
        assert!(is_elementary_abelian(&residual_orthogonal_group(31).unwrap(), 60));
    }

    #[test]
    fn w_indices() {
        for n in 2..=6 {
            assert_eq!(w_index(n).unwrap(), 1);
        }
        assert_eq!(w_index(7).unwrap(), 2);
        assert_eq!(w_index(31).unwrap(), 4);
    }

    #[test]
    fn trace_examples() {
        assert!(trace_criterion(5, 4).unwrap());
        assert!(trace_criterion(5, 0).unwrap());
        assert!(trace_criterion(3, 2).unwrap());
        // 2 + √3 has trace 4, which is not ±2 mod 8
        assert!(!trace_criterion(3, 3).unwrap());
    }

    #[test]
    fn minus_identity_not_in_w() {
        let h = OrientedLattice::hilb(7).unwrap();
        let w = in_w(&h, &Isometry::minus_identity(Arc::clone(h.lattice()))).unwrap();
        assert!(!w.member);
        assert_eq!(w.orientation, -1);
    }

    #[test]
    fn identity_extends_and_restricts() {
        let model = HilbModel::get(4).unwrap();
        let id = Isometry::identity(Arc::clone(model.lattice()));
        let ext = model.ext_to_mukai(&id).unwrap();
        assert!(ext.is_identity());
        assert!(model.mu(&ext).unwrap().is_identity());
        assert_eq!(glue_index(&model), BigInt::from(6));
    }

    #[test]
    fn delta_reflection_on_hilb_two() {
        let model = HilbModel::get(2).unwrap();
        let delta = model.lattice().basis_vector(22);
        let r = reflection(&delta).unwrap();
        let ext = model.ext_to_mukai(&r).unwrap();
        let v = model.v.to_coords();
        assert_eq!(ext.apply(&v), v);
    }

    #[test]
    fn mu_rejects_non_fixing() {
        let model = HilbModel::get(3).unwrap();
        let m = Isometry::minus_identity(mukai::mukai_lattice());
        assert_eq!(model.mu(&m).unwrap_err(), Error::DoesNotFix);
    }
}
