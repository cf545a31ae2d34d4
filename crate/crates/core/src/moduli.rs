//! The set `P_n`, the embeddings `ι_{r,s}` of `Hilb(n)` into the Mukai
//! lattice, orbit classification of such embeddings, and the genus-2
//! reflection example in `Hilb(7)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intlat::{self, Isometry, Lattice, StandardLattice, K3_RANK, MUKAI_RANK};
use crate::linalg::{self, IntMatrix, Matrix};
use crate::monodromy::{self, HilbModel};
use crate::mukai::{self, MukaiVector};

/// A coprime factorization `r s = 1 - n` with `-s >= r > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PnEntry {
    pub r: u64,
    pub s: i64,
}

impl PnEntry {
    pub fn validate(&self, n: u64) -> Result<()> {
        let (r, s) = (self.r as i128, self.s as i128);
        let ok = r > 0 && -s >= r && r * s == 1 - n as i128 && (self.r).gcd(&self.s.unsigned_abs()) == 1;
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("({}, {}) is not in P_{n}", self.r, self.s)))
        }
    }
}

pub fn enumerate_pn(n: u64) -> Result<Vec<PnEntry>> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    let m = n - 1;
    let mut out = Vec::new();
    let mut r = 1;
    while r * r <= m {
        if m % r == 0 && r.gcd(&(m / r)) == 1 {
            out.push(PnEntry { r, s: -((m / r) as i64) });
        }
        r += 1;
    }
    Ok(out)
}

pub fn count_nonbirational(n: u64) -> Result<usize> {
    Ok(enumerate_pn(n)?.len())
}

/// A primitive isometric embedding, as a matrix whose columns are the
/// images of the source basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub source: Arc<Lattice>,
    pub target: Arc<Lattice>,
    pub matrix: IntMatrix,
}

impl Embedding {
    pub fn new(source: Arc<Lattice>, target: Arc<Lattice>, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", target.rank(), source.rank()),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        let pulled = &(&matrix.transpose() * target.gram()) * &matrix;
        if pulled != *source.gram() {
            return Err(Error::NotIsometry(format!("{} -> {}", source.label(), target.label())));
        }
        let f = linalg::snf(&matrix);
        if f.rank() != source.rank() || f.invariant_factors().iter().any(|d| !d.is_one()) {
            return Err(Error::NotPrimitive);
        }
        Ok(Embedding { source, target, matrix })
    }

    /// Postcomposition with an isometry of the target.
    pub fn then(&self, g: &Isometry) -> Result<Embedding> {
        if g.lattice().gram() != self.target.gram() {
            return Err(Error::LatticeMismatch(g.lattice().label().into(), self.target.label().into()));
        }
        Embedding::new(Arc::clone(&self.source), Arc::clone(&self.target), g.matrix() * &self.matrix)
    }

    /// Primitive generator of the orthogonal complement of the image, for
    /// corank one; its first nonzero coordinate is positive.
    pub fn complement_generator(&self) -> Result<Vec<BigInt>> {
        let functional = &self.matrix.transpose() * self.target.gram();
        let kernel = linalg::integer_kernel(&functional);
        if kernel.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: "corank one".into(),
                found: format!("corank {}", kernel.len()),
            });
        }
        let mut w = kernel.into_iter().next().expect("one vector");
        if w.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            w.iter_mut().for_each(|x| *x = -&*x);
        }
        Ok(w)
    }

    /// The unit `k mod (w,w)`, up to sign, with `e(y) + k w/(w,w)` integral
    /// for the discriminant generator `y` of the source.
    pub fn glue_invariant(&self) -> Result<BigInt> {
        let w = self.complement_generator()?;
        let m = self.target.square(&w).abs();
        let disc = intlat::discriminant_group(&self.source)?;
        if !disc.is_cyclic() || disc.order() != m {
            return Err(Error::NotCyclic(disc.orders.iter().map(ToString::to_string).collect()));
        }
        let mr = BigRational::from_integer(m.clone());
        let ey = self.matrix.to_rational().mul_vec(&disc.generator(0));
        let c: Vec<BigInt> = ey
            .iter()
            .map(|x| {
                let t = x * &mr;
                assert!(t.is_integer());
                t.to_integer()
            })
            .collect();
        // c + k w ≡ 0 (mod m), solved through a Bezout combination of w
        let a = bezout(&w);
        let k = (-linalg::dot::<BigInt>(&a, &c)).mod_floor(&m);
        if c.iter().zip(&w).any(|(ci, wi)| !(ci + &k * wi).mod_floor(&m).is_zero()) {
            return Err(Error::NotPrimitive);
        }
        let neg = (-&k).mod_floor(&m);
        Ok(k.min(neg))
    }
}

/// Coefficients `a` with `a · v = gcd(v)`.
fn bezout(v: &[BigInt]) -> Vec<BigInt> {
    let mut a = vec![BigInt::zero(); v.len()];
    let mut g = BigInt::zero();
    for (i, x) in v.iter().enumerate() {
        let e = g.extended_gcd(x);
        for c in a.iter_mut().take(i) {
            *c *= &e.x;
        }
        a[i] = e.y.clone();
        g = e.gcd;
    }
    a
}

/// `ι_{r,s}`: identity on the K3 part, `δ = (1,0,n-1) ↦ (r,0,-s)`.
pub fn iota(n: u64, entry: PnEntry) -> Result<Embedding> {
    entry.validate(n)?;
    let source = Arc::new(intlat::make_standard(StandardLattice::Hilb(n))?);
    let target = mukai::mukai_lattice();
    let delta_image = MukaiVector::trivial(entry.r, -entry.s).to_coords();
    let matrix = Matrix::from_fn(MUKAI_RANK, K3_RANK + 1, |i, j| {
        if j < K3_RANK {
            if i == j {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        } else {
            delta_image[i].clone()
        }
    });
    Embedding::new(source, target, matrix)
}

/// Whether `e1` and `e2` differ by an isometry of the Mukai lattice.
pub fn same_orbit(e1: &Embedding, e2: &Embedding) -> Result<bool> {
    if e1.source.gram() != e2.source.gram() || e1.target.gram() != e2.target.gram() {
        return Err(Error::LatticeMismatch(e1.source.label().into(), e2.source.label().into()));
    }
    Ok(e1.glue_invariant()? == e2.glue_invariant()?)
}

/// The `P_n` entry whose embedding lies in the orbit of `e`.
pub fn orbit_representative(n: u64, e: &Embedding) -> Result<PnEntry> {
    let k = e.glue_invariant()?;
    for entry in enumerate_pn(n)? {
        if iota(n, entry)?.glue_invariant()? == k {
            return Ok(entry);
        }
    }
    Err(Error::OutOfRange("embedding matches no P_n entry".into()))
}

/// One polarization degree in the genus-2 example on `Hilb(7)`.
#[derive(Clone, Debug, Serialize)]
pub struct Example7Case {
    pub degree: i64,
    pub w0_square: i64,
    pub is_isometry: bool,
    pub orientation: i8,
    /// `f(δ) = a·h + b·δ`, as `[a, b]`.
    pub f_delta: [i64; 2],
    pub residual: i64,
    pub residual_modulus: i64,
    pub in_w: bool,
    pub ext_error: Option<String>,
    #[serde(skip)]
    pub f: Option<Isometry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Example7Report {
    pub cases: Vec<Example7Case>,
}

/// `f(x) = -4/(w0,w0) x + (x,w0)/2 w0` for `w0 = 2h + δ`, `h` of square 2 or 4.
pub fn example7_report() -> Result<Example7Report> {
    let model = HilbModel::get(7)?;
    let lat = Arc::clone(model.lattice());
    let n = lat.rank();
    let mut cases = Vec::new();
    for (degree, h) in [(2i64, [1i64, 1]), (4, [1, 2])] {
        let mut hv = vec![BigInt::zero(); n];
        hv[0] = BigInt::from(h[0]);
        hv[1] = BigInt::from(h[1]);
        let mut w0: Vec<BigInt> = hv.iter().map(|x| x * 2).collect();
        w0[K3_RANK] = BigInt::one();
        let sq = lat.square(&w0);
        let gw = lat.gram().mul_vec(&w0);
        let scale = BigRational::new(BigInt::from(-4), sq.clone());
        let fm = Matrix::from_fn(n, n, |i, j| {
            let d = if i == j { scale.clone() } else { BigRational::zero() };
            d + BigRational::new(&gw[j] * &w0[i], BigInt::from(2))
        });
        let fm = fm.to_integer().ok_or(Error::NotIsometry("f is not integral".into()))?;
        let is_iso = intlat::is_isometry(&lat, &fm)?;
        let f = Isometry::new(Arc::clone(&lat), fm)?;
        let mut delta = vec![BigInt::zero(); n];
        delta[K3_RANK] = BigInt::one();
        let fd = f.apply(&delta);
        // f(δ) lies in span(h, δ); read off the h coefficient from the first coordinate
        let a = &fd[0] / &hv[0];
        let b = fd[K3_RANK].clone();
        let expected: Vec<BigInt> = hv.iter().zip(&delta).map(|(x, d)| x * &a + d * &b).collect();
        assert_eq!(fd, expected);
        let w = monodromy::in_w(&model.hilb, &f)?;
        let ext_error = model.ext_to_mukai(&f).err().map(|e| e.to_string());
        cases.push(Example7Case {
            degree,
            w0_square: to_i64(&sq),
            is_isometry: is_iso,
            orientation: w.orientation,
            f_delta: [to_i64(&a), to_i64(&b)],
            residual: to_i64(&w.residual.centered()),
            residual_modulus: to_i64(&w.residual.modulus),
            in_w: w.member,
            ext_error,
            f: Some(f),
        });
    }
    Ok(Example7Report { cases })
}

fn to_i64(x: &BigInt) -> i64 {
    i64::try_from(x).expect("small integer")
}

/// Index of `e(Λ) ⊕ Zw` in the target.
pub fn glue_index(e: &Embedding) -> Result<BigInt> {
    let w = e.complement_generator()?;
    let mut cols: Vec<Vec<BigInt>> = (0..e.matrix.cols()).map(|j| e.matrix.column(j)).collect();
    cols.push(w);
    let m = Matrix::from_columns(&cols)?;
    Ok(linalg::det(&m).abs())
}

/// Whether the embedding and its complement generator are orthogonal.
pub fn complement_is_orthogonal(e: &Embedding) -> Result<bool> {
    let w = e.complement_generator()?;
    let gw = e.target.gram().mul_vec(&w);
    let t = e.matrix.transpose().mul_vec(&gw);
    Ok(t.iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(n: u64) -> Vec<(u64, i64)> {
        enumerate_pn(n).unwrap().into_iter().map(|e| (e.r, e.s)).collect()
    }

    #[test]
    fn pn_examples() {
        assert_eq!(entries(7), vec![(1, -6), (2, -3)]);
        assert_eq!(entries(2), vec![(1, -1)]);
        assert_eq!(entries(31), vec![(1, -30), (2, -15), (3, -10), (5, -6)]);
        assert_eq!(count_nonbirational(211).unwrap(), 8);
    }

    #[test]
    fn iota_complement() {
        let e = iota(7, PnEntry { r: 1, s: -6 }).unwrap();
        let w = e.complement_generator().unwrap();
        assert_eq!(w, MukaiVector::trivial(1, -6).to_coords());
        assert_eq!(e.target.square(&w), BigInt::from(12));
        assert_eq!(glue_index(&e).unwrap(), BigInt::from(12));
        assert!(complement_is_orthogonal(&e).unwrap());
        let e2 = iota(2, PnEntry { r: 1, s: -1 }).unwrap();
        assert_eq!(e2.target.square(&e2.complement_generator().unwrap()), BigInt::from(2));
    }

    #[test]
    fn iota_rejects_bad_entry() {
        assert!(iota(7, PnEntry { r: 3, s: -2 }).is_err());
        assert!(iota(7, PnEntry { r: 1, s: -5 }).is_err());
    }

    #[test]
    fn orbits_of_seven() {
        let a = iota(7, PnEntry { r: 1, s: -6 }).unwrap();
        let b = iota(7, PnEntry { r: 2, s: -3 }).unwrap();
        assert!(same_orbit(&a, &a).unwrap());
        assert!(!same_orbit(&a, &b).unwrap());
        assert_eq!(orbit_representative(7, &b).unwrap(), PnEntry { r: 2, s: -3 });
    }

    #[test]
    fn example7() {
        let rep = example7_report().unwrap();
        let d2 = &rep.cases[0];
        assert_eq!((d2.w0_square, d2.f_delta, d2.residual), (-4, [-12, -5], -5));
        let d4 = &rep.cases[1];
        assert_eq!((d4.w0_square, d4.f_delta), (4, [-12, -7]));
        assert_eq!(d4.residual.rem_euclid(12), 5);
        for c in &rep.cases {
            assert!(c.is_isometry);
            assert_eq!(c.orientation, 1);
            assert!(!c.in_w);
            assert!(c.ext_error.is_some());
        }
    }

    #[test]
    fn bezout_combination() {
        let v = linalg::int_vec(&[6, 10, 15]);
        let a = bezout(&v);
        assert_eq!(linalg::dot::<BigInt>(&a, &v), BigInt::one());
    }
}
