//! Cyclotomic polynomials and the exact root-of-unity test.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::IntPolynomial;
use crate::numeric::{factor_u64, totient};

/// `Phi_n`, via `Phi_n(x) = Phi_rad(n)(x^(n / rad(n)))` and the Möbius product
/// over the squarefree kernel.
pub fn cyclotomic(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic index must be positive");
    let primes: Vec<u64> = factor_u64(n).into_iter().map(|(p, _)| p).collect();
    let rad: u64 = primes.iter().product();
    // Divisors of rad with their Möbius sign mu(rad / d).
    let mut num = vec![BigInt::one()];
    let mut dens: Vec<u64> = Vec::new();
    let k = primes.len();
    for mask in 0u32..(1 << k) {
        let d: u64 = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| primes[i]).product();
        let omitted = k - mask.count_ones() as usize;
        if omitted.is_multiple_of(2) {
            num = mul_x_pow_minus_one(&num, d as usize);
        } else {
            dens.push(d);
        }
    }
    for d in dens {
        num = div_x_pow_minus_one(&num, d as usize);
    }
    // (x^d - 1) factors carry sign (-1) each; normalise to a monic polynomial.
    let phi_rad = IntPolynomial::new(num).canonical();
    phi_rad.compose_power((n / rad) as usize)
}

fn mul_x_pow_minus_one(p: &[BigInt], d: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + d];
    for (i, c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

fn div_x_pow_minus_one(p: &[BigInt], d: usize) -> Vec<BigInt> {
    // p = q (x^d - 1): q_i = q_{i-d} - p_i read from the bottom.
    let n = p.len() - d;
    let mut q = vec![BigInt::zero(); n];
    for i in 0..n {
        let prev = if i >= d { q[i - d].clone() } else { BigInt::zero() };
        q[i] = prev - &p[i];
    }
    q
}

/// Exact order `n` if `p` (canonical) is the cyclotomic polynomial `Phi_n`.
pub fn root_of_unity_order(p: &IntPolynomial) -> Option<u64> {
    if !p.is_monic() {
        return None;
    }
    let c0 = p.coeff(0);
    if c0 != BigInt::one() && c0 != -BigInt::one() {
        return None;
    }
    let d = p.degree() as u64;
    if d == 0 {
        return None;
    }
    // phi(n) >= sqrt(n / 2), so phi(n) = d forces n <= 2 d^2.
    let bound = 2 * d * d + 2;
    (1..=bound).filter(|&n| totient(n) == d).find(|&n| cyclotomic(n) == *p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2), IntPolynomial::from_i64(&[1, 1]));
        assert_eq!(cyclotomic(4), IntPolynomial::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), IntPolynomial::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), IntPolynomial::from_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic(5), IntPolynomial::from_i64(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn phi_105_has_a_coefficient_minus_two() {
        let p = cyclotomic(105);
        assert_eq!(p.degree(), 48);
        assert!(p.coeffs().iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn product_of_cyclotomics_over_divisors_is_x_n_minus_one() {
        for n in [1u64, 6, 12, 30, 36] {
            let mut prod = IntPolynomial::one();
            for d in (1..=n).filter(|d| n % d == 0) {
                prod = prod.mul(&cyclotomic(d));
            }
            let mut c = vec![0i64; n as usize + 1];
            c[0] = -1;
            c[n as usize] = 1;
            assert_eq!(prod, IntPolynomial::from_i64(&c), "n = {n}");
        }
    }

    #[test]
    fn order_detection() {
        for n in 1..=40 {
            assert_eq!(root_of_unity_order(&cyclotomic(n)), Some(n));
        }
        assert_eq!(root_of_unity_order(&IntPolynomial::from_i64(&[-2, 0, 1])), None);
        let lehmer = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert_eq!(root_of_unity_order(&lehmer), None);
    }
}
