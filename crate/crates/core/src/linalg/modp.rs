//! Linear algebra over word-sized prime fields, used to find the shape of
//! large rational kernels quickly. Every result that leaves this module is
//! reconstructed over Q and verified exactly by the caller.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Descending primes below 2^62.
pub fn large_primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while !is_prime_u64(n) {
            n -= 2;
        }
        let p = n;
        n -= 2;
        Some(p)
    })
}

pub fn reduce(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Kernel of a sequence of linear constraints on `F_p^dim`, maintained as a
/// basis of the surviving subspace.
#[derive(Clone, Debug)]
pub struct IncrementalKernel {
    p: u64,
    dim: usize,
    basis: Vec<Vec<u64>>,
}

impl IncrementalKernel {
    pub fn full(dim: usize, p: u64) -> Self {
        let basis = (0..dim)
            .map(|i| {
                let mut v = vec![0; dim];
                v[i] = 1;
                v
            })
            .collect();
        IncrementalKernel { p, dim, basis }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Restricts to the subspace killed by a linear map; `image` evaluates
    /// the map (mod p) on one basis vector.
    pub fn constrain(&mut self, mut image: impl FnMut(&[u64]) -> Vec<u64>) {
        let p = self.p;
        let images: Vec<Vec<u64>> = self.basis.iter().map(|b| image(b)).collect();

        struct Pivot {
            col: usize,
            img: Vec<u64>,
            track: Vec<(usize, u64)>,
        }
        let mut pivots: Vec<Pivot> = Vec::new();
        let mut combos: Vec<Vec<(usize, u64)>> = Vec::new();

        for (j, img0) in images.into_iter().enumerate() {
            let mut img = img0;
            let mut track = vec![(j, 1u64)];
            for piv in &pivots {
                let c = img[piv.col];
                if c == 0 {
                    continue;
                }
                for (x, y) in img.iter_mut().zip(&piv.img) {
                    if *y != 0 {
                        *x = sub_mod(*x, mul_mod(c, *y, p), p);
                    }
                }
                track = sparse_axpy(&track, &piv.track, p - c, p);
            }
            match img.iter().position(|&x| x != 0) {
                Some(col) => {
                    let inv = inv_mod(img[col], p);
                    for x in img.iter_mut() {
                        *x = mul_mod(*x, inv, p);
                    }
                    for t in track.iter_mut() {
                        t.1 = mul_mod(t.1, inv, p);
                    }
                    pivots.push(Pivot { col, img, track });
                }
                None => combos.push(track),
            }
        }

        let basis = combos
            .iter()
            .map(|combo| {
                let mut v = vec![0u64; self.dim];
                for &(i, c) in combo {
                    for (x, y) in v.iter_mut().zip(&self.basis[i]) {
                        if *y != 0 {
                            *x = add_mod(*x, mul_mod(c, *y, p), p);
                        }
                    }
                }
                v
            })
            .collect();
        self.basis = basis;
    }

    /// Reduced row echelon form of the basis, which is independent of the
    /// order in which constraints were applied.
    pub fn canonical(&self) -> (Vec<Vec<u64>>, Vec<usize>) {
        rref_mod(&self.basis, self.p)
    }
}

fn sparse_axpy(y: &[(usize, u64)], x: &[(usize, u64)], c: u64, p: u64) -> Vec<(usize, u64)> {
    // both inputs sorted by index
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    let mut ys: Vec<(usize, u64)> = y.to_vec();
    ys.sort_unstable_by_key(|t| t.0);
    let mut xs: Vec<(usize, u64)> = x.to_vec();
    xs.sort_unstable_by_key(|t| t.0);
    while i < ys.len() || j < xs.len() {
        if j == xs.len() || (i < ys.len() && ys[i].0 < xs[j].0) {
            out.push(ys[i]);
            i += 1;
        } else if i == ys.len() || xs[j].0 < ys[i].0 {
            let v = mul_mod(c, xs[j].1, p);
            if v != 0 {
                out.push((xs[j].0, v));
            }
            j += 1;
        } else {
            let v = add_mod(ys[i].1, mul_mod(c, xs[j].1, p), p);
            if v != 0 {
                out.push((ys[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn rref_mod(rows: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = rows.to_vec();
    let n = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == a.len() {
            break;
        }
        let Some(k) = (r..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, k);
        let inv = inv_mod(a[r][col], p);
        for x in a[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let c = row[col];
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if *y != 0 {
                    *x = sub_mod(*x, mul_mod(c, *y, p), p);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Chinese remaindering of residues modulo pairwise coprime moduli.
pub fn crt(residues: &[u64], primes: &[u64]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&r, &p) in residues.iter().zip(primes) {
        let pb = BigInt::from(p);
        // x + m t ≡ r (mod p)
        let m_mod = reduce(&m, p);
        let x_mod = reduce(&x, p);
        let t = mul_mod(sub_mod(r % p, x_mod, p), inv_mod(m_mod, p), p);
        x += &m * BigInt::from(t);
        m *= &pb;
    }
    (x, m)
}

/// Rational number `n/d` with `|n|, d <= sqrt(m/2)` congruent to `a` mod `m`,
/// if one exists.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_prime() {
        let ps: Vec<u64> = large_primes().take(3).collect();
        assert!(ps.iter().all(|&p| p > (1 << 61)));
        assert!(is_prime_u64(2_147_483_647));
        assert!(!is_prime_u64(2_147_483_649));
    }

    #[test]
    fn reconstruct_small_fraction() {
        let p = large_primes().next().unwrap();
        let a = mul_mod(p - 3, inv_mod(7, p), p);
        let q = rational_reconstruct(&BigInt::from(a), &BigInt::from(p)).unwrap();
        assert_eq!(q, BigRational::new((-3).into(), 7.into()));
    }

    #[test]
    fn incremental_kernel_matches_constraint() {
        let p = 1_000_000_007;
        let mut k = IncrementalKernel::full(3, p);
        // x0 + x1 + x2 = 0
        k.constrain(|v| vec![(v[0] + v[1] + v[2]) % p]);
        assert_eq!(k.dim(), 2);
        // x0 = x1
        k.constrain(|v| vec![sub_mod(v[0], v[1], p)]);
        assert_eq!(k.dim(), 1);
        let (rows, piv) = k.canonical();
        assert_eq!(piv, vec![0]);
        assert_eq!(rows[0], vec![1, 1, p - 2]);
    }
}
