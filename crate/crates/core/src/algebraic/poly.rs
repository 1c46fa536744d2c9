use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::modular;

/// Dense univariate polynomial with arbitrary-precision integer coefficients,
/// constant term first. Trailing zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `x`
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `c x^n`
    pub fn monomial(c: BigInt, n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("leading coefficient of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn canonical(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn is_canonical(&self) -> bool {
        !self.is_zero() && self.leading().is_positive() && self.content().is_one()
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.leading().is_one()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `x^d p(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// `p(-x)`.
    pub fn negate_variable(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `p(x^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        let mut out = vec![BigInt::zero(); self.degree() * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        Self::new(out)
    }

    /// Pseudo-remainder of `self` by `divisor` (`lc(divisor)^k * self mod divisor`).
    pub fn pseudo_rem(&self, divisor: &Self) -> Self {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree();
        let lc = divisor.leading().clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.last().unwrap().clone();
            let shift = r.len() - 1 - dd;
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= &top * d;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Exact quotient over `Z`, when `divisor` divides `self` with integral quotient.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < divisor.degree() {
            return None;
        }
        let dd = divisor.degree();
        let lc = divisor.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let top = &r[k + dd];
            let (qk, rem) = top.div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                r[k + i] -= &qk * d;
            }
            q[k] = qk;
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    /// Whether `divisor` divides `self` in `Q[x]`.
    pub fn divisible_over_q(&self, divisor: &Self) -> bool {
        self.pseudo_rem(divisor).is_zero()
    }

    /// Greatest common divisor in canonical form (primitive remainder sequence).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.canonical();
        let mut b = other.canonical();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).canonical();
            a = b;
            b = r;
        }
        if a.degree() == 0 {
            return Self::one();
        }
        a.canonical()
    }

    /// Squarefree test: modular shortcut, exact gcd fallback.
    pub fn is_squarefree(&self) -> bool {
        if self.degree() <= 1 {
            return true;
        }
        for &q in modular::SMALL_PRIMES.iter().take(8) {
            if let Some(true) = modular::squarefree_mod(self, q) {
                return true;
            }
        }
        self.gcd(&self.derivative()).degree() == 0
    }

    /// Squarefree decomposition: `self = c * prod s_i^i` with `s_i`
    /// canonical, squarefree and pairwise coprime. Returns `(s_i, i)` for
    /// non-constant `s_i`, by increasing multiplicity.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPolynomial, usize)> {
        let f = self.canonical();
        if f.degree() == 0 {
            return Vec::new();
        }
        if f.is_squarefree() {
            return vec![(f, 1)];
        }
        // Musser's scheme: only gcds and exact quotients, so free of scaling drift.
        let mut out = Vec::new();
        let mut g = f.gcd(&f.derivative());
        let mut w = exact_div_q(&f, &g);
        let mut i = 1;
        while w.degree() > 0 {
            let y = w.gcd(&g);
            let factor = exact_div_q(&w, &y);
            if factor.degree() > 0 {
                out.push((factor, i));
            }
            g = exact_div_q(&g, &y);
            w = y;
            i += 1;
        }
        out
    }

    /// Coefficients as `f64` (may be infinite for astronomically large integers).
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }

    /// Canonical minimal polynomial of `r * alpha` given the one of `alpha`:
    /// substitute `x / r` and clear denominators.
    pub fn scale_root(&self, r: &BigRational) -> Self {
        let p = r.numer();
        let q = r.denom();
        let d = self.degree();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * num_traits::pow(q.clone(), i) * num_traits::pow(p.clone(), d - i))
            .collect();
        Self::new(coeffs).canonical()
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Builds the integer polynomial `den * p` from rational coefficients.
    pub fn from_rational_coeffs(coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        Self::new(
            coeffs
                .iter()
                .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
                .collect(),
        )
    }
}

/// Exact quotient over `Q` of integer polynomials known to divide, returned canonical.
fn exact_div_q(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let lc = b.leading().clone();
    let k = a.degree() + 1 - b.degree().min(a.degree());
    let scaled = a.scale(&num_traits::pow(lc, k));
    scaled
        .exact_div(b)
        .expect("exact division over Q after scaling")
        .canonical()
}

impl From<IntPolynomial> for Vec<String> {
    fn from(p: IntPolynomial) -> Self {
        p.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl TryFrom<Vec<String>> for IntPolynomial {
    type Error = String;
    fn try_from(v: Vec<String>) -> Result<Self, String> {
        let coeffs = v
            .iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(|_| format!("bad coefficient {s:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}
