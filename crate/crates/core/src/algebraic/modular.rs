//! Polynomials over small prime fields: squarefree tests and distinct-degree
//! factorisation, used to constrain the degrees of integer factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::poly::IntPolynomial;

pub(crate) const SMALL_PRIMES: [u64; 30] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109,
    113, 127,
];

type Fp = Vec<u64>;

fn trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn reduce(p: &IntPolynomial, q: u64) -> Fp {
    let qb = BigInt::from(q);
    trim(p.coeffs().iter().map(|c| c.mod_floor(&qb).to_u64().unwrap()).collect())
}

fn inv(a: u64, q: u64) -> u64 {
    pow(a, q - 2, q)
}

fn pow(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1u64;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % q;
        }
        a = a * a % q;
        e >>= 1;
    }
    r
}

fn rem(a: &[u64], f: &[u64], q: u64) -> Fp {
    let mut r = a.to_vec();
    let df = f.len() - 1;
    let lc_inv = inv(*f.last().unwrap(), q);
    while r.len() > df {
        let top = *r.last().unwrap() * lc_inv % q;
        let shift = r.len() - 1 - df;
        if top != 0 {
            for (i, &c) in f.iter().enumerate() {
                r[shift + i] = (r[shift + i] + q - top * c % q) % q;
            }
        }
        r.pop();
    }
    trim(r)
}

fn mul(a: &[u64], b: &[u64], q: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    trim(out)
}

fn sub(a: &[u64], b: &[u64], q: u64) -> Fp {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + q - y) % q
            })
            .collect(),
    )
}

fn gcd(a: &[u64], b: &[u64], q: u64) -> Fp {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, q);
        a = b;
        b = r;
    }
    a
}

fn derivative(a: &[u64], q: u64) -> Fp {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % q) * c % q)
            .collect(),
    )
}

fn monic(a: Fp, q: u64) -> Fp {
    let l = inv(*a.last().unwrap(), q);
    a.into_iter().map(|c| c * l % q).collect()
}

/// `x^e mod f`.
fn x_pow_mod(e: u64, f: &[u64], q: u64) -> Fp {
    let mut result: Fp = vec![1];
    let mut base = rem(&[0, 1], f, q);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = rem(&mul(&result, &base, q), f, q);
        }
        base = rem(&mul(&base, &base, q), f, q);
        e >>= 1;
    }
    result
}

/// Composition `g(h) mod f` by Horner.
fn compose_mod(g: &[u64], h: &[u64], f: &[u64], q: u64) -> Fp {
    let mut acc: Fp = Vec::new();
    for &c in g.iter().rev() {
        acc = rem(&mul(&acc, h, q), f, q);
        if c != 0 {
            if acc.is_empty() {
                acc.push(0);
            }
            acc[0] = (acc[0] + c) % q;
            acc = trim(acc);
        }
    }
    acc
}

/// `None` if `q` divides the leading coefficient, otherwise whether `p mod q`
/// is squarefree (which implies `p` is squarefree over `Q`).
pub(crate) fn squarefree_mod(p: &IntPolynomial, q: u64) -> Option<bool> {
    let f = reduce(p, q);
    if f.len() != p.coeffs().len() {
        return None;
    }
    let g = gcd(&f, &derivative(&f, q), q);
    Some(g.len() == 1)
}

/// Degrees of irreducible factors of `p mod q`, when `q` is a good prime
/// (does not divide the leading coefficient, `p mod q` squarefree).
pub(crate) fn factor_degrees(p: &IntPolynomial, q: u64) -> Option<Vec<usize>> {
    let f = reduce(p, q);
    if f.len() != p.coeffs().len() || f.len() < 2 {
        return None;
    }
    if gcd(&f, &derivative(&f, q), q).len() != 1 {
        return None;
    }
    let mut f = monic(f, q);
    let mut degrees = Vec::new();
    let xq = x_pow_mod(q, &f, q);
    let mut h = xq.clone();
    let mut i = 1;
    while f.len() > 2 * i {
        // h = x^(q^i) mod f
        let g = gcd(&f, &sub(&h, &[0, 1], q), q);
        let dg = g.len() - 1;
        if dg > 0 {
            for _ in 0..dg / i {
                degrees.push(i);
            }
            f = monic(quotient(&f, &g, q), q);
            h = rem(&h, &f, q);
        }
        i += 1;
        if f.len() > 2 * i {
            let xq_f = rem(&xq, &f, q);
            h = compose_mod(&h, &xq_f, &f, q);
        }
    }
    if f.len() > 1 {
        degrees.push(f.len() - 1);
    }
    Some(degrees)
}

fn quotient(a: &[u64], b: &[u64], q: u64) -> Fp {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lc_inv = inv(*b.last().unwrap(), q);
    let mut out = vec![0u64; a.len() - db];
    while r.len() > db {
        let top = *r.last().unwrap() * lc_inv % q;
        let shift = r.len() - 1 - db;
        out[shift] = top;
        for (i, &c) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + q - top * c % q) % q;
        }
        r.pop();
    }
    trim(out)
}

/// Subset sums of a degree multiset as a membership table over `0..=total`.
pub(crate) fn subset_sums(degrees: &[usize]) -> Vec<bool> {
    let total: usize = degrees.iter().sum();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=total).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_of_x4_plus_1_mod_small_primes() {
        // x^4 + 1 is irreducible over Q but splits mod every prime.
        let p = IntPolynomial::from_i64(&[1, 0, 0, 0, 1]);
        let d3 = factor_degrees(&p, 3).unwrap();
        assert_eq!(d3, vec![2, 2]);
        let d17 = factor_degrees(&p, 17).unwrap();
        assert_eq!(d17, vec![1, 1, 1, 1]);
    }

    #[test]
    fn cyclotomic_degrees_follow_multiplicative_order() {
        // Phi_7 mod 2 would split into two cubics; mod 3 (primitive root) it is irreducible.
        let p = IntPolynomial::from_i64(&[1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(factor_degrees(&p, 3).unwrap(), vec![6]);
        assert_eq!(factor_degrees(&p, 29).unwrap(), vec![1; 6]);
    }

    #[test]
    fn subset_sum_table() {
        let s = subset_sums(&[2, 2]);
        assert_eq!(s, vec![true, false, true, false, true]);
    }
}
