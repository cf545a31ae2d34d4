//! Mukai vectors `(r, c, s)` on the Mukai lattice, their pairing and
//! complements, and the Gieseker order on normalized Hilbert polynomials.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::intlat::{self, int_json, json_int, LatVec, Lattice, StandardLattice, K3_RANK, MUKAI_RANK};
use crate::linalg::{self, IntMatrix, Matrix};

pub fn k3_lattice() -> Arc<Lattice> {
    static K3: OnceLock<Arc<Lattice>> = OnceLock::new();
    Arc::clone(K3.get_or_init(|| Arc::new(intlat::make_standard(StandardLattice::K3).expect("K3 lattice"))))
}

pub fn mukai_lattice() -> Arc<Lattice> {
    static MUKAI: OnceLock<Arc<Lattice>> = OnceLock::new();
    Arc::clone(MUKAI.get_or_init(|| Arc::new(intlat::make_standard(StandardLattice::Mukai).expect("Mukai lattice"))))
}

/// Rank, first Chern class and `χ - rank`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c: LatVec,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: impl Into<BigInt>, c: LatVec, s: impl Into<BigInt>) -> Result<Self> {
        if c.lattice().rank() != K3_RANK || c.lattice().gram() != k3_lattice().gram() {
            return Err(Error::LatticeMismatch(c.lattice().label().to_string(), "K3".into()));
        }
        Ok(MukaiVector { r: r.into(), c, s: s.into() })
    }

    /// A vector with `c = 0`.
    pub fn trivial(r: impl Into<BigInt>, s: impl Into<BigInt>) -> Self {
        let c = LatVec::new(k3_lattice(), vec![BigInt::zero(); K3_RANK]).expect("rank 22");
        MukaiVector { r: r.into(), c, s: s.into() }
    }

    /// `(1, 0, 1-n)`, the class of an ideal sheaf of `n` points.
    pub fn ideal_sheaf(n: u64) -> Self {
        Self::trivial(1, BigInt::one() - BigInt::from(n))
    }

    /// Coordinates in the Mukai lattice: `c`, then `(r, -s)` in the last plane.
    pub fn to_coords(&self) -> Vec<BigInt> {
        let mut v = self.c.coords().to_vec();
        v.push(self.r.clone());
        v.push(-&self.s);
        v
    }

    pub fn from_coords(coords: &[BigInt]) -> Result<Self> {
        if coords.len() != MUKAI_RANK {
            return Err(Error::DimensionMismatch {
                expected: format!("{MUKAI_RANK} coordinates"),
                found: format!("{} coordinates", coords.len()),
            });
        }
        let c = LatVec::new(k3_lattice(), coords[..K3_RANK].to_vec())?;
        Ok(MukaiVector { r: coords[K3_RANK].clone(), c, s: -&coords[K3_RANK + 1] })
    }

    pub fn chi(&self) -> BigInt {
        &self.r + &self.s
    }

    pub fn square(&self) -> BigInt {
        mukai_pairing(self, self).expect("same lattice")
    }

    /// `(v, v) + 2`.
    pub fn moduli_dimension(&self) -> BigInt {
        self.square() + 2
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero() && self.c.is_zero()
    }

    pub fn is_primitive(&self) -> bool {
        intlat::is_primitive(&self.to_coords())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r": int_json(&self.r),
            "c": self.c.coords().iter().map(int_json).collect::<Vec<_>>(),
            "s": int_json(&self.s),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("missing field {k}")));
        let r = json_int(field("r")?)?;
        let s = json_int(field("s")?)?;
        let c = field("c")?
            .as_array()
            .ok_or_else(|| Error::Parse("c is not an array".into()))?
            .iter()
            .map(json_int)
            .collect::<Result<Vec<_>>>()?;
        MukaiVector::new(r, LatVec::new(k3_lattice(), c)?, s)
    }
}

impl fmt::Debug for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_zero() {
            write!(f, "({},0,{})", self.r, self.s)
        } else {
            let c: Vec<String> = self.c.coords().iter().map(ToString::to_string).collect();
            write!(f, "({},[{}],{})", self.r, c.join(","), self.s)
        }
    }
}

/// Parses the shorthand `(r,0,s)`.
impl FromStr for MukaiVector {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let bad = || Error::Parse(format!("expected (r,0,s), got {text:?}"));
        if parts.len() != 3 || parts[1] != "0" {
            return Err(bad());
        }
        let r: BigInt = parts[0].parse().map_err(|_| bad())?;
        let s: BigInt = parts[2].parse().map_err(|_| bad())?;
        Ok(MukaiVector::trivial(r, s))
    }
}

/// `(c, c') - r s' - r' s`.
pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector) -> Result<BigInt> {
    let cc = v.c.pair(&w.c)?;
    Ok(cc - &v.r * &w.s - &w.r * &v.s)
}

pub fn chi(v: &MukaiVector) -> BigInt {
    v.chi()
}

/// Whether `c` is effective (or zero) is Hodge-theoretic input and must be
/// supplied by the caller.
pub fn is_effective(v: &MukaiVector, c_is_effective_divisor: bool) -> bool {
    v.square() >= BigInt::from(-2)
        && !v.r.is_negative()
        && (v.r.is_positive() || c_is_effective_divisor)
        && (!v.r.is_zero() || !v.c.is_zero() || v.chi().is_positive())
}

/// `v^⊥` together with the integral basis used to present it.
#[derive(Clone, Debug)]
pub struct Complement {
    pub lattice: Arc<Lattice>,
    /// 24×23; column `j` is the `j`-th basis vector in Mukai coordinates.
    pub basis: IntMatrix,
}

impl Complement {
    /// Mukai coordinates of a vector given in complement coordinates.
    pub fn embed(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.basis.mul_vec(x)
    }
}

pub fn complement(v: &MukaiVector) -> Result<Complement> {
    if v.is_zero() || !v.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if v.square().is_zero() {
        return Err(Error::Singular);
    }
    let mukai = mukai_lattice();
    let coords = v.to_coords();
    let functional = mukai.gram().mul_vec(&coords);
    let row = Matrix::from_rows(vec![functional])?;
    let mut rows = linalg::integer_kernel(&row);
    // K3 block first, stable otherwise
    rows.sort_by_key(|r| !(r[K3_RANK].is_zero() && r[K3_RANK + 1].is_zero()));
    let basis = Matrix::from_columns(&rows)?;
    let gram = &(&basis.transpose() * mukai.gram()) * &basis;
    let lattice = Lattice::new(format!("{v}^perp"), gram)?;
    Ok(Complement { lattice: Arc::new(lattice), basis })
}

pub fn orthogonal_complement(v: &MukaiVector) -> Result<Lattice> {
    Ok((*complement(v)?.lattice).clone())
}

/// `a2 n^2 + a1 n + a0` with the normalizer `l0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertPoly {
    pub a2: BigRational,
    pub a1: BigRational,
    pub a0: BigRational,
    pub l0: BigInt,
}

impl HilbertPoly {
    pub fn new(a2: BigRational, a1: BigRational, a0: BigRational, l0: BigInt) -> Result<Self> {
        if !l0.is_positive() {
            return Err(Error::OutOfRange(format!("l0 must be positive, got {l0}")));
        }
        Ok(HilbertPoly { a2, a1, a0, l0 })
    }

    /// From rank, `h^2`, `h·c1`, `c1^2` and `c2` of a sheaf on a surface.
    pub fn from_sheaf(r: i64, h2: i64, h_c1: i64, c1_sq: i64, c2: i64) -> Result<Self> {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let a2 = q(r * h2, 2);
        let a1 = q(h_c1, 1);
        let a0 = q(c1_sq - 2 * c2, 2) + q(2 * r, 1);
        let l0 = if r > 0 {
            r * h2
        } else if h_c1 != 0 {
            h_c1
        } else {
            -c2
        };
        Self::new(a2, a1, a0, BigInt::from(l0))
    }

    fn normalized(&self) -> [BigRational; 3] {
        let l = BigRational::from_integer(self.l0.clone());
        [&self.a2 / &l, &self.a1 / &l, &self.a0 / &l]
    }
}

/// Compares `p/l0(p)` with `q/l0(q)` for all sufficiently large arguments.
pub fn gieseker_compare(p: &HilbertPoly, q: &HilbertPoly) -> Result<Ordering> {
    for h in [p, q] {
        if !h.l0.is_positive() {
            return Err(Error::OutOfRange(format!("l0 must be positive, got {}", h.l0)));
        }
    }
    Ok(p.normalized().cmp(&q.normalized()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    #[test]
    fn pairing_examples() {
        for n in 2..10u64 {
            let v = MukaiVector::ideal_sheaf(n);
            assert_eq!(v.square(), BigInt::from(2 * n - 2));
            assert_eq!(v.moduli_dimension(), BigInt::from(2 * n));
        }
        assert_eq!(MukaiVector::trivial(0, 1).square(), BigInt::zero());
        assert_eq!(MukaiVector::trivial(2, -3).square(), BigInt::from(12));
    }

    #[test]
    fn coords_agree_with_lattice_pairing() {
        let v = MukaiVector::trivial(2, -3);
        let w = MukaiVector::trivial(5, 7);
        let m = mukai_lattice();
        assert_eq!(m.pair(&v.to_coords(), &w.to_coords()), mukai_pairing(&v, &w).unwrap());
        assert_eq!(MukaiVector::from_coords(&v.to_coords()).unwrap(), v);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(MukaiVector::trivial(1, 1).chi(), BigInt::from(2));
        assert_eq!(MukaiVector::trivial(0, 1).chi(), BigInt::from(1));
        assert_eq!(MukaiVector::trivial(2, -3).chi(), BigInt::from(-1));
    }

    #[test]
    fn effectiveness() {
        for n in 2..8 {
            assert!(is_effective(&MukaiVector::ideal_sheaf(n), false));
        }
        assert!(is_effective(&MukaiVector::trivial(0, 1), true));
        assert!(!is_effective(&MukaiVector::trivial(0, -1), true));
        assert!(!is_effective(&MukaiVector::trivial(-1, 0), true));
    }

    #[test]
    fn complement_of_ideal_sheaf_is_hilb() {
        for n in [2u64, 3, 7] {
            let c = orthogonal_complement(&MukaiVector::ideal_sheaf(n)).unwrap();
            let h = intlat::make_standard(StandardLattice::Hilb(n)).unwrap();
            assert_eq!(c.gram(), h.gram());
        }
        let d = intlat::discriminant_group(&orthogonal_complement(&MukaiVector::trivial(1, -1)).unwrap()).unwrap();
        assert_eq!(d.orders, vec![BigInt::from(2)]);
    }

    #[test]
    fn complement_rejects_bad_vectors() {
        assert_eq!(orthogonal_complement(&MukaiVector::trivial(0, 0)).unwrap_err(), Error::NotPrimitive);
        assert_eq!(orthogonal_complement(&MukaiVector::trivial(2, 4)).unwrap_err(), Error::NotPrimitive);
        assert_eq!(orthogonal_complement(&MukaiVector::trivial(1, 0)).unwrap_err(), Error::Singular);
    }

    #[test]
    fn parse_shorthand() {
        let v: MukaiVector = "(2,0,-3)".parse().unwrap();
        assert_eq!(v, MukaiVector::trivial(2, -3));
        assert_eq!(v.to_string(), "(2,0,-3)");
        assert!("(2,1,-3)".parse::<MukaiVector>().is_err());
        assert_eq!(MukaiVector::from_json(&v.to_json()).unwrap(), v);
    }

    #[test]
    fn gieseker_examples() {
        let one = BigInt::one();
        let p = HilbertPoly::new(rat(1, 1), rat(0, 1), rat(1, 1), one.clone()).unwrap();
        let q = HilbertPoly::new(rat(1, 1), rat(1, 1), rat(0, 1), one.clone()).unwrap();
        assert_eq!(gieseker_compare(&p, &q).unwrap(), Ordering::Less);
        assert_eq!(gieseker_compare(&p, &p).unwrap(), Ordering::Equal);
        let bad = HilbertPoly { l0: BigInt::zero(), ..p.clone() };
        assert!(gieseker_compare(&p, &bad).is_err());
    }

    #[test]
    fn l0_cases() {
        assert_eq!(HilbertPoly::from_sheaf(2, 2, 0, 0, 5).unwrap().l0, BigInt::from(4));
        assert_eq!(HilbertPoly::from_sheaf(0, 2, 3, 0, 0).unwrap().l0, BigInt::from(3));
        assert_eq!(HilbertPoly::from_sheaf(0, 2, 0, 0, -4).unwrap().l0, BigInt::from(4));
        let p = HilbertPoly::from_sheaf(2, 2, 0, 0, 5).unwrap();
        assert_eq!(p.a0, rat(-1, 1));
    }
}
