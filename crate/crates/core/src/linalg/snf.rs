//! Smith and Hermite normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, Matrix};

/// Result of a Smith normal form computation: `p * m * q == s`.
///
/// `p_inv` and `q_inv` are the exact inverses of the transforms; they are
/// maintained alongside because saturation and coset arithmetic need them.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub p_inv: IntMatrix,
    pub q_inv: IntMatrix,
}

impl Snf {
    /// The nonzero diagonal entries `d_1 | d_2 | ... | d_rank`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i).clone()).take_while(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

struct Work {
    a: IntMatrix,
    p: IntMatrix,
    q: IntMatrix,
    p_inv: IntMatrix,
    q_inv: IntMatrix,
}

impl Work {
    /// row[i] += c * row[j]
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.p] {
            for k in 0..m.cols() {
                let v = m.get(j, k) * c;
                if !v.is_zero() {
                    *m.get_mut(i, k) += v;
                }
            }
        }
        // P^{-1} picks up the inverse column operation.
        let pi = &mut self.p_inv;
        for k in 0..pi.rows() {
            let v = pi.get(k, i) * c;
            if !v.is_zero() {
                *pi.get_mut(k, j) -= v;
            }
        }
    }

    /// col[i] += c * col[j]
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.q] {
            for k in 0..m.rows() {
                let v = m.get(k, j) * c;
                if !v.is_zero() {
                    *m.get_mut(k, i) += v;
                }
            }
        }
        let qi = &mut self.q_inv;
        for k in 0..qi.cols() {
            let v = qi.get(i, k) * c;
            if !v.is_zero() {
                *qi.get_mut(j, k) -= v;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.p.swap_rows(i, j);
        self.p_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.q.swap_cols(i, j);
        self.q_inv.swap_rows(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.p] {
            for k in 0..m.cols() {
                let v = -m.get(i, k);
                m.set(i, k, v);
            }
        }
        let pi = &mut self.p_inv;
        for k in 0..pi.rows() {
            let v = -pi.get(k, i);
            pi.set(k, i, v);
        }
    }
}

/// Smith normal form with unimodular transforms.
pub fn snf(m: &IntMatrix) -> Snf {
    let (r, c) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.clone(),
        p: Matrix::identity(r),
        q: Matrix::identity(c),
        p_inv: Matrix::identity(r),
        q_inv: Matrix::identity(c),
    };

    for t in 0..r.min(c) {
        let Some((pi, pj)) = min_abs_entry(&w.a, t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..r {
                if w.a.get(i, t).is_zero() {
                    continue;
                }
                let q = w.a.get(i, t).div_floor(w.a.get(t, t));
                w.add_row(i, t, &-q);
                if !w.a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if w.a.get(t, j).is_zero() {
                    continue;
                }
                let q = w.a.get(t, j).div_floor(w.a.get(t, t));
                w.add_col(j, t, &-q);
                if !w.a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // A nonzero remainder is strictly smaller than the pivot.
                let mut best: Option<(bool, usize, BigInt)> = None;
                for i in t + 1..r {
                    let v = w.a.get(i, t).abs();
                    if !v.is_zero() && best.as_ref().map_or(true, |b| v < b.2) {
                        best = Some((true, i, v));
                    }
                }
                for j in t + 1..c {
                    let v = w.a.get(t, j).abs();
                    if !v.is_zero() && best.as_ref().map_or(true, |b| v < b.2) {
                        best = Some((false, j, v));
                    }
                }
                if let Some((is_row, k, v)) = best {
                    if v < w.a.get(t, t).abs() {
                        if is_row {
                            w.swap_rows(t, k);
                        } else {
                            w.swap_cols(t, k);
                        }
                    }
                }
                continue;
            }
            let pivot = w.a.get(t, t).clone();
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_row(t);
        }
    }

    Snf { s: w.a, p: w.p, q: w.q, p_inv: w.p_inv, q_inv: w.q_inv }
}

fn min_abs_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            let v = v.abs();
            if best.as_ref().map_or(true, |b| v < b.2) {
                let done = v.is_one();
                best = Some((i, j, v));
                if done {
                    return best.map(|b| (b.0, b.1));
                }
            }
        }
    }
    best.map(|b| (b.0, b.1))
}

/// Row-style Hermite normal form: returns the nonzero rows of the echelon
/// basis of the row lattice, with positive pivots and entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hnf_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(n) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row >= m.len() {
            break;
        }
        loop {
            let best = (pivot_row..m.len())
                .filter(|&i| !m[i][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = m[i][col].div_floor(&m[pivot_row][col]);
                let (head, tail) = m.split_at_mut(i);
                axpy(&mut tail[0], &head[pivot_row], &-q);
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][col].is_zero() {
            continue;
        }
        if m[pivot_row][col].is_negative() {
            for x in m[pivot_row].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..pivot_row {
            let q = m[i][col].div_floor(&m[pivot_row][col]);
            if !q.is_zero() {
                let (head, tail) = m.split_at_mut(pivot_row);
                axpy(&mut head[i], &tail[0], &-q);
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    m
}

fn axpy(y: &mut [BigInt], x: &[BigInt], c: &BigInt) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += xi * c;
        }
    }
}

/// Integral basis (as columns, then HNF-canonicalized rows) of the kernel
/// `{x in Z^cols : m x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let f = snf(m);
    let rank = f.rank();
    let basis: Vec<Vec<BigInt>> = (rank..m.cols()).map(|j| f.q.column(j)).collect();
    hnf_rows(&basis)
}

/// Basis of the saturation `(Q-span of rows) ∩ Z^n`, in Hermite form.
pub fn saturate_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(rows.to_vec()).expect("ragged rows");
    let f = snf(&m);
    let rank = f.rank();
    let basis: Vec<Vec<BigInt>> = (0..rank).map(|i| f.q_inv.row(i).to_vec()).collect();
    hnf_rows(&basis)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IntMatrix) -> BigInt {
    assert!(m.is_square(), "determinant of non-square matrix");
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = a.get(k, k).clone();
    }
    sign * a.get(n - 1, n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn snf_of_diag_2_3() {
        let f = snf(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(f.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(&(&f.p * &m(&[&[2, 0], &[0, 3]])) * &f.q, f.s);
    }

    #[test]
    fn inverses_are_tracked() {
        let a = m(&[&[4, 6, 8], &[3, 9, -12], &[1, 0, 5]]);
        let f = snf(&a);
        assert_eq!(&f.p * &f.p_inv, IntMatrix::identity(3));
        assert_eq!(&f.q * &f.q_inv, IntMatrix::identity(3));
        assert_eq!(&(&f.p * &a) * &f.q, f.s);
    }

    #[test]
    fn kernel_of_row() {
        let k = integer_kernel(&m(&[&[2, 4, 6]]));
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = &v[0] * 2 + &v[1] * 4 + &v[2] * 6;
            assert!(s.is_zero());
        }
        assert_eq!(k, vec![crate::linalg::int_vec(&[1, 1, -1]), crate::linalg::int_vec(&[0, 3, -2])]);
    }

    #[test]
    fn hnf_is_canonical() {
        let a = vec![crate::linalg::int_vec(&[2, 4]), crate::linalg::int_vec(&[1, 1])];
        let b = vec![crate::linalg::int_vec(&[3, 5]), crate::linalg::int_vec(&[5, 9])];
        assert_eq!(hnf_rows(&a), hnf_rows(&b));
    }

    #[test]
    fn saturation_recovers_primitive_vector() {
        let s = saturate_rows(&[crate::linalg::int_vec(&[4, 6, -2])]);
        assert_eq!(s, vec![crate::linalg::int_vec(&[2, 3, -1])]);
    }

    #[test]
    fn bareiss_det() {
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det(&m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])), BigInt::from(4));
        assert_eq!(det(&m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }
}
