//! Small numeric helpers shared across modules: logarithms of big integers,
//! rational parsing/printing and float conversions that never overflow.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Natural logarithm of `|n|`. Returns `-inf` for zero.
pub fn ln_abs(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
}

/// `log max(|p|, |q|)` for a rational in lowest terms.
pub fn ln_height_rational(r: &BigRational) -> f64 {
    let num = r.numer().abs();
    let den = r.denom().abs();
    if num > den {
        ln_abs(&num)
    } else {
        ln_abs(&den)
    }
}

/// `p / q` as an `f64` without intermediate overflow.
pub fn ratio_to_f64(p: &BigInt, q: &BigInt) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let pb = p.bits() as i64;
    let qb = q.bits() as i64;
    if pb < 1000 && qb < 1000 {
        return p.to_f64().unwrap() / q.to_f64().unwrap();
    }
    // Keep ~64 significant bits of each and rescale.
    let ps = (pb - 64).max(0);
    let qs = (qb - 64).max(0);
    let pt = (p >> ps as usize).to_f64().unwrap();
    let qt = (q >> qs as usize).to_f64().unwrap();
    let e = (ps - qs) as i32;
    pt / qt * 2f64.powi(e)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

/// Parses `"p/q"`, `"p"` or a plain integer. Rejects zero denominators.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator in {s:?}"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

/// Prints a rational as `"p/q"`, or `"p"` when integral.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter: rationals as `"p/q"` strings; JSON integers also accepted on input.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(BigRational::from_integer(n.into())),
            Repr::Str(s) => super::parse_rational(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Exact integer `k`-th root if `n >= 0` is a perfect `k`-th power.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Primes below `limit` by a plain sieve.
pub fn primes_below(limit: usize) -> Vec<u64> {
    let mut sieve = vec![true; limit.max(2)];
    sieve[0] = false;
    if limit > 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i < limit {
        if sieve[i] {
            let mut j = i * i;
            while j < limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i as u64))
        .collect()
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Euler's totient by trial division.
pub fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Prime factorisation of a `u64` by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
