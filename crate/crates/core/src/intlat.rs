//! Even integral lattices given by Gram matrices, their standard building
//! blocks, isometries and discriminant forms.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, rational, IntMatrix, Matrix, RatMatrix};

/// A finite-rank free abelian group with an even symmetric integral form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    label: String,
    gram: IntMatrix,
}

impl Lattice {
    pub fn new(label: impl Into<String>, gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square gram matrix".into(),
                found: format!("{}x{}", gram.rows(), gram.cols()),
            });
        }
        for i in 0..gram.rows() {
            for j in 0..i {
                if gram.get(i, j) != gram.get(j, i) {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
            if gram.get(i, i).is_odd() {
                return Err(Error::OddDiagonal(i));
            }
        }
        Ok(Lattice { label: label.into(), gram })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.rank(), "vector length does not match lattice rank");
        assert_eq!(y.len(), self.rank(), "vector length does not match lattice rank");
        let gy = self.gram.mul_vec(y);
        linalg::dot::<BigInt>(x, &gy)
    }

    /// Pairing extended to rational vectors.
    pub fn pair_rat(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let gy = self.gram.to_rational().mul_vec(y);
        linalg::dot::<BigRational>(x, &gy)
    }

    pub fn square(&self, x: &[BigInt]) -> BigInt {
        self.pair(x, x)
    }

    pub fn det(&self) -> BigInt {
        linalg::det(&self.gram)
    }

    pub fn signature(&self) -> (usize, usize) {
        rational::signature(&self.gram)
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn basis_vector(self: &Arc<Self>, i: usize) -> LatVec {
        let mut coords = vec![BigInt::zero(); self.rank()];
        coords[i] = BigInt::one();
        LatVec { lattice: Arc::clone(self), coords }
    }

    pub fn vector(self: &Arc<Self>, coords: Vec<BigInt>) -> Result<LatVec> {
        LatVec::new(Arc::clone(self), coords)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "rank": self.rank(),
            "gram": self.gram.to_rows().iter().map(|r| r.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let label = v.get("label").and_then(Value::as_str).unwrap_or("").to_string();
        let rows = v
            .get("gram")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing gram".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("gram row is not an array".into()))?
                    .iter()
                    .map(json_int)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let gram = Matrix::from_rows(rows)?;
        if let Some(rank) = v.get("rank").and_then(Value::as_u64) {
            if rank as usize != gram.rows() {
                return Err(Error::Parse(format!("rank {rank} does not match gram size {}", gram.rows())));
            }
        }
        Lattice::new(label, gram)
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({}, rank {})", self.label, self.rank())
    }
}

pub(crate) fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub(crate) fn json_int(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    v.as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("not an integer: {v}")))
}

pub(crate) fn rat_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Named lattices used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StandardLattice {
    /// Hyperbolic plane.
    U,
    /// Negative definite E8 root lattice.
    E8Neg,
    /// `U^3 + (-E8)^2`.
    K3,
    /// `U^3 + (-E8)^2 + U`, the last plane carrying rank and `-(χ - rank)`.
    Mukai,
    /// `K3 + <2-2n>`, with the generator of the rank-one summand last.
    Hilb(u64),
}

impl FromStr for StandardLattice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parse_n = |t: &str| -> Result<u64> {
            t.trim().parse().map_err(|_| Error::Parse(format!("bad lattice parameter in {s:?}")))
        };
        match lower.as_str() {
            "u" => Ok(Self::U),
            "e8neg" | "-e8" | "e8" => Ok(Self::E8Neg),
            "k3" => Ok(Self::K3),
            "mukai" => Ok(Self::Mukai),
            _ => {
                if let Some(rest) = lower.strip_prefix("hilb:") {
                    Ok(Self::Hilb(parse_n(rest)?))
                } else if let Some(rest) = lower.strip_prefix("hilb(").and_then(|r| r.strip_suffix(')')) {
                    Ok(Self::Hilb(parse_n(rest)?))
                } else {
                    Err(Error::Parse(format!("unknown lattice {s:?}")))
                }
            }
        }
    }
}

pub const K3_RANK: usize = 22;
pub const MUKAI_RANK: usize = 24;

fn hyperbolic_plane() -> IntMatrix {
    IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])
}

/// Cartan matrix of E8 (Bourbaki labelling: chain 1-3-4-5-6-7-8, node 2 on node 4), negated.
fn e8_negative() -> IntMatrix {
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    Matrix::from_fn(8, 8, |i, j| {
        if i == j {
            BigInt::from(-2)
        } else if edges.contains(&(i, j)) || edges.contains(&(j, i)) {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

fn k3_gram() -> IntMatrix {
    let u = hyperbolic_plane();
    let e8 = e8_negative();
    let mut g = Matrix::block_diagonal(&u, &u);
    g = Matrix::block_diagonal(&g, &u);
    g = Matrix::block_diagonal(&g, &e8);
    Matrix::block_diagonal(&g, &e8)
}

pub fn make_standard(name: StandardLattice) -> Result<Lattice> {
    let lat = match name {
        StandardLattice::U => Lattice::new("U", hyperbolic_plane())?,
        StandardLattice::E8Neg => Lattice::new("-E8", e8_negative())?,
        StandardLattice::K3 => Lattice::new("K3", k3_gram())?,
        StandardLattice::Mukai => Lattice::new("Mukai", Matrix::block_diagonal(&k3_gram(), &hyperbolic_plane()))?,
        StandardLattice::Hilb(n) => {
            if n < 2 {
                return Err(Error::OutOfRange(format!("Hilb(n) needs n >= 2, got {n}")));
            }
            let delta = IntMatrix::from_fn(1, 1, |_, _| BigInt::from(2) - BigInt::from(2) * BigInt::from(n));
            Lattice::new(format!("Hilb({n})"), Matrix::block_diagonal(&k3_gram(), &delta))?
        }
    };
    Ok(lat)
}

/// Rank-one lattice `<d>`; `d` must be even.
pub fn rank_one(d: i64) -> Result<Lattice> {
    Lattice::new(format!("<{d}>"), IntMatrix::from_i64_rows(&[&[d]]))
}

pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    Lattice {
        label: format!("{}+{}", a.label, b.label),
        gram: Matrix::block_diagonal(&a.gram, &b.gram),
    }
}

/// A vector with integer coordinates in a lattice.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LatVec {
    lattice: Arc<Lattice>,
    coords: Vec<BigInt>,
}

impl LatVec {
    pub fn new(lattice: Arc<Lattice>, coords: Vec<BigInt>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coordinates", lattice.rank()),
                found: format!("{} coordinates", coords.len()),
            });
        }
        Ok(LatVec { lattice, coords })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }

    pub fn pair(&self, other: &LatVec) -> Result<BigInt> {
        if !Arc::ptr_eq(&self.lattice, &other.lattice) && *self.lattice != *other.lattice {
            return Err(Error::LatticeMismatch(self.lattice.label.clone(), other.lattice.label.clone()));
        }
        Ok(self.lattice.pair(&self.coords, &other.coords))
    }

    pub fn square(&self) -> BigInt {
        self.lattice.square(&self.coords)
    }

    pub fn is_primitive(&self) -> bool {
        is_primitive(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "{}[{}]", self.lattice.label, c.join(", "))
    }
}

pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    content(v).is_one()
}

/// True iff `m^T G m = G`.
pub fn is_isometry(lattice: &Lattice, m: &IntMatrix) -> Result<bool> {
    let n = lattice.rank();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let lhs = &(&m.transpose() * lattice.gram()) * m;
    Ok(lhs == *lattice.gram())
}

/// An integral isometry, acting on column coordinate vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    lattice: Arc<Lattice>,
    matrix: IntMatrix,
}

impl Isometry {
    pub fn new(lattice: Arc<Lattice>, matrix: IntMatrix) -> Result<Self> {
        if !is_isometry(&lattice, &matrix)? {
            return Err(Error::NotIsometry(lattice.label.clone()));
        }
        Ok(Isometry { lattice, matrix })
    }

    pub fn identity(lattice: Arc<Lattice>) -> Self {
        let n = lattice.rank();
        Isometry { lattice, matrix: IntMatrix::identity(n) }
    }

    pub fn minus_identity(lattice: Arc<Lattice>) -> Self {
        let n = lattice.rank();
        Isometry { lattice, matrix: -&IntMatrix::identity(n) }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    pub fn apply_rat(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.matrix.to_rational().mul_vec(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if *self.lattice != *other.lattice {
            return Err(Error::LatticeMismatch(self.lattice.label.clone(), other.lattice.label.clone()));
        }
        Ok(Isometry { lattice: Arc::clone(&self.lattice), matrix: &self.matrix * &other.matrix })
    }

    pub fn inverse(&self) -> Isometry {
        let inv = rational::inverse(&self.matrix.to_rational())
            .expect("isometries of nondegenerate lattices are invertible")
            .to_integer()
            .expect("isometry inverse is integral");
        Isometry { lattice: Arc::clone(&self.lattice), matrix: inv }
    }

    pub fn negate(&self) -> Isometry {
        Isometry { lattice: Arc::clone(&self.lattice), matrix: -&self.matrix }
    }

    pub fn det(&self) -> BigInt {
        linalg::det(&self.matrix)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == IntMatrix::identity(self.lattice.rank())
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isometry of {}:\n{}", self.lattice.label, self.matrix)
    }
}

/// The discriminant group `L*/L` with its residual quadratic form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscGroup {
    /// Invariant factors greater than one, `d_1 | d_2 | ...`.
    pub orders: Vec<BigInt>,
    /// `q(g_i)` in `[0, 2)`.
    pub q_values: Vec<BigRational>,
    /// Columns are rational lifts of the generators in lattice coordinates.
    pub lift: RatMatrix,
    /// `coords(y) = coord_map · (G y) mod orders`.
    coord_map: IntMatrix,
    gram: IntMatrix,
}

impl DiscGroup {
    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.orders.len() <= 1
    }

    pub fn generator(&self, i: usize) -> Vec<BigRational> {
        self.lift.column(i)
    }

    /// Residual form `y^T G y` reduced into `[0, 2)`.
    pub fn q(&self, y: &[BigRational]) -> BigRational {
        let gy = self.gram.to_rational().mul_vec(y);
        mod_two(&linalg::dot::<BigRational>(y, &gy))
    }

    /// Coset coordinates of a dual-lattice vector.
    pub fn coords(&self, y: &[BigRational]) -> Result<Vec<BigInt>> {
        let gy = self.gram.to_rational().mul_vec(y);
        if gy.iter().any(|x| !x.is_integer()) {
            return Err(Error::OutOfRange("vector is not in the dual lattice".into()));
        }
        let gy: Vec<BigInt> = gy.iter().map(|x| x.to_integer()).collect();
        Ok(self
            .coord_map
            .mul_vec(&gy)
            .into_iter()
            .zip(&self.orders)
            .map(|(c, d)| c.mod_floor(d))
            .collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "orders": self.orders.iter().map(int_json).collect::<Vec<_>>(),
            "q": self.q_values.iter().map(rat_string).collect::<Vec<_>>(),
        })
    }
}

/// Reduces a rational into `[0, 2)`.
pub fn mod_two(q: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let k = (q / &two).floor();
    q - k * two
}

pub fn discriminant_group(lattice: &Lattice) -> Result<DiscGroup> {
    let gram = lattice.gram().clone();
    let n = gram.rows();
    let f = linalg::snf(&gram);
    let factors = f.invariant_factors();
    if factors.len() < n {
        return Err(Error::Singular);
    }
    let nontrivial: Vec<usize> = (0..n).filter(|&i| !factors[i].is_one()).collect();
    let orders: Vec<BigInt> = nontrivial.iter().map(|&i| factors[i].clone()).collect();

    // P G Q = S, so y = Q e_i / d_i has coset coordinates e_i.
    let mut lift_cols: Vec<Vec<BigRational>> = nontrivial
        .iter()
        .map(|&i| f.q.column(i).into_iter().map(|x| BigRational::new(x, factors[i].clone())).collect())
        .collect();
    let mut coord_rows: Vec<Vec<BigInt>> = nontrivial.iter().map(|&i| f.p.row(i).to_vec()).collect();

    // A cyclic group is generated by the last dual-basis vector that has full order.
    if orders.len() == 1 {
        let d = &orders[0];
        let g_inv = rational::inverse(&gram.to_rational())?;
        if let Some(k) = (0..n).rev().find(|&k| coord_rows[0][k].gcd(d).is_one()) {
            let u = coord_rows[0][k].mod_floor(d);
            let u_inv = mod_inverse(&u, d).expect("unit");
            lift_cols[0] = g_inv.column(k);
            coord_rows[0] = coord_rows[0].iter().map(|x| (x * &u_inv).mod_floor(d)).collect();
        }
    }

    let lift = if lift_cols.is_empty() {
        RatMatrix::zeros(n, 0)
    } else {
        Matrix::from_columns(&lift_cols)?
    };
    let coord_map = if coord_rows.is_empty() { IntMatrix::zeros(0, n) } else { Matrix::from_rows(coord_rows)? };
    let mut dg = DiscGroup { orders, q_values: Vec::new(), lift, coord_map, gram };
    dg.q_values = (0..dg.orders.len()).map(|i| dg.q(&dg.generator(i))).collect();
    Ok(dg)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}
