//! Small integer helpers: distinct prime counts, square tests, Pell units.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};

/// Number of distinct primes dividing `m` (zero for `m <= 1`).
pub fn distinct_prime_count(mut m: u64) -> u32 {
    let mut count = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            count += 1;
            while m % p == 0 {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        count += 1;
    }
    count
}

/// `table[m]` = number of distinct prime divisors of `m`, for `m <= limit`.
pub fn distinct_prime_table(limit: usize) -> Vec<u32> {
    let mut t = vec![0u32; limit + 1];
    for p in 2..=limit {
        if t[p] == 0 {
            for k in (p..=limit).step_by(p) {
                t[k] += 1;
            }
        }
    }
    t
}

pub fn is_perfect_square(m: u64) -> bool {
    let r = m.sqrt();
    r * r == m
}

/// Fundamental solution `(b, a)` of `b^2 - m a^2 = 1` with `a > 0`, for
/// non-square `m > 0`, from the continued fraction of `sqrt(m)`.
pub fn pell_fundamental(m: u64) -> Option<(BigInt, BigInt)> {
    if m == 0 || is_perfect_square(m) {
        return None;
    }
    let a0 = m.sqrt();
    let (mut mm, mut d, mut a) = (0u64, 1u64, a0);
    let mb = BigInt::from(m);
    // convergents h/k
    let (mut h_prev, mut h) = (BigInt::one(), BigInt::from(a0));
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    loop {
        if &h * &h - &mb * &k * &k == BigInt::one() {
            return Some((h, k));
        }
        mm = d * a - mm;
        d = (m - mm * mm) / d;
        a = (a0 + mm) / d;
        let ab = BigInt::from(a);
        let h_next = &ab * &h + &h_prev;
        let k_next = &ab * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_counts() {
        assert_eq!(distinct_prime_count(1), 0);
        assert_eq!(distinct_prime_count(6), 2);
        assert_eq!(distinct_prime_count(30), 3);
        assert_eq!(distinct_prime_count(210), 4);
        assert_eq!(distinct_prime_count(64), 1);
        let t = distinct_prime_table(1000);
        for m in 1..=1000u64 {
            assert_eq!(t[m as usize], distinct_prime_count(m), "m = {m}");
        }
    }

    #[test]
    fn pell() {
        assert_eq!(pell_fundamental(2), Some((BigInt::from(3), BigInt::from(2))));
        assert_eq!(pell_fundamental(7), Some((BigInt::from(8), BigInt::from(3))));
        assert_eq!(pell_fundamental(61), Some((BigInt::from(1_766_319_049u64), BigInt::from(226_153_980u64))));
        assert_eq!(pell_fundamental(9), None);
    }
}
