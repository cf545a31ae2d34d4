//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, Matrix, RatMatrix};
use crate::error::{Error, Result};

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols() {
        if row == a.rows() {
            break;
        }
        let Some(p) = (row..a.rows()).find(|&i| !a.get(i, col).is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a.get(row, col).recip();
        for j in col..a.cols() {
            let v = a.get(row, j) * &inv;
            a.set(row, j, v);
        }
        for i in 0..a.rows() {
            if i == row || a.get(i, col).is_zero() {
                continue;
            }
            let f = a.get(i, col).clone();
            for j in col..a.cols() {
                if a.get(row, j).is_zero() {
                    continue;
                }
                let v = a.get(i, j) - &f * a.get(row, j);
                a.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let n = m.rows();
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::Singular);
    }
    Ok(r.column_block(n, 2 * n))
}

/// Unique solution `x` of `m x = b` for square nonsingular `m`.
pub fn solve(m: &RatMatrix, b: &[BigRational]) -> Result<Vec<BigRational>> {
    let inv = inverse(m)?;
    Ok(inv.mul_vec(b))
}

/// Solves `m x = b` for a matrix with full column rank; errors if the
/// system is inconsistent.
pub fn solve_full_column_rank(m: &RatMatrix, b: &[BigRational]) -> Result<Vec<BigRational>> {
    let (r, c) = (m.rows(), m.cols());
    let aug = Matrix::from_fn(r, c + 1, |i, j| if j < c { m.get(i, j).clone() } else { b[i].clone() });
    let (red, pivots) = rref(&aug);
    if pivots.len() != c || pivots.iter().any(|&p| p >= c) {
        return Err(Error::Singular);
    }
    Ok((0..c).map(|i| red.get(i, c).clone()).collect())
}

/// Signature `(positive, negative)` of a symmetric matrix by exact
/// congruence diagonalization.
pub fn signature(gram: &IntMatrix) -> (usize, usize) {
    let mut a = gram.to_rational();
    let n = a.rows();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a.get(k, k).is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a.get(j, j).is_zero()) {
                a.swap_rows(k, j);
                a.swap_cols(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                // e_k + e_j has square 2 a_kj != 0
                for c in 0..n {
                    let v = a.get(k, c) + a.get(j, c);
                    a.set(k, c, v);
                }
                for r in 0..n {
                    let v = a.get(r, k) + a.get(r, j);
                    a.set(r, k, v);
                }
            } else {
                continue;
            }
        }
        let p = a.get(k, k).clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a.get(i, k).is_zero() {
                continue;
            }
            let f = a.get(i, k) / &p;
            for c in k..n {
                let v = a.get(i, c) - &f * a.get(k, c);
                a.set(i, c, v);
            }
            for r in k..n {
                let v = a.get(r, i) - &f * a.get(r, k);
                a.set(r, i, v);
            }
        }
    }
    (pos, neg)
}

/// Leading principal minors all positive.
pub fn is_positive_definite(m: &RatMatrix) -> bool {
    let n = m.rows();
    (1..=n).all(|k| {
        let sub = Matrix::from_fn(k, k, |i, j| m.get(i, j).clone());
        rat_det(&sub).is_positive()
    })
}

pub fn rat_det(m: &RatMatrix) -> BigRational {
    let n = m.rows();
    let mut a = m.clone();
    let mut d = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap_rows(p, k);
            d = -d;
        }
        let piv = a.get(k, k).clone();
        d *= &piv;
        for i in k + 1..n {
            if a.get(i, k).is_zero() {
                continue;
            }
            let f = a.get(i, k) / &piv;
            for j in k..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }
    d
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_rat_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Least common multiple of the denominators.
pub fn common_denominator(v: &[BigRational]) -> BigInt {
    use num_integer::Integer;
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_of_hyperbolic_plane() {
        assert_eq!(signature(&IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])), (1, 1));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]).to_rational();
        let inv = inverse(&m).unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(2));
    }

    #[test]
    fn singular_inverse_errors() {
        let m = IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).to_rational();
        assert_eq!(inverse(&m), Err(Error::Singular));
    }
}
