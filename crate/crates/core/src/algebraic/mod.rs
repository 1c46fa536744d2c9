//! Algebraic numbers over `Q` and their absolute logarithmic Weil height.
//!
//! An [`AlgebraicNumber`] is an irreducible canonical integer polynomial plus
//! the index of one of its certified roots (roots sorted by real then
//! imaginary part). Its height is `log M(minpoly) / deg`, where the Mahler
//! measure `M` is computed from the certified roots.

mod cyclotomic;
mod factor;
mod literal;
mod modular;
mod poly;
mod roots;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use cyclotomic::{cyclotomic, root_of_unity_order};
pub use factor::check_irreducible;
pub use literal::AlgebraicLiteral;
pub use poly::IntPolynomial;
pub use roots::{residual, roots, roots_best_effort, CertifiedRoot};

use crate::numeric::{exact_root, ln_abs, ln_height_rational};

/// Target enclosure radius used when constructing algebraic numbers.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraicError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial has no roots")]
    ConstantPolynomial,
    #[error("root refinement stalled at radius {achieved:e} (requested {requested:e})")]
    NonConvergence { achieved: f64, requested: f64 },
    #[error("coefficients too large for floating root isolation")]
    CoefficientOverflow,
    #[error("polynomial is reducible; factor {factor}")]
    Reducible { factor: IntPolynomial },
    #[error("could not certify irreducibility of a degree {degree} polynomial within budget")]
    IrreducibilityUnverified { degree: usize },
    #[error("polynomial {0} is not in canonical form (primitive, positive leading coefficient, constant term first)")]
    NotCanonical(IntPolynomial),
    #[error("root index {index} out of range for degree {degree}")]
    RootIndex { index: usize, degree: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Log Mahler measure with the error bound propagated from the root enclosures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MahlerLog {
    pub value: f64,
    pub error: f64,
}

/// `log M(p) = log |c_d| + sum log+ |root_i|`.
pub fn mahler_log(p: &IntPolynomial) -> Result<MahlerLog, AlgebraicError> {
    if p.is_zero() {
        return Err(AlgebraicError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(AlgebraicError::ConstantPolynomial);
    }
    if p.degree() == 1 {
        // log |c1| + log+ |c0 / c1| = log max(|c0|, |c1|)
        let v = ln_abs(&p.coeff(0)).max(ln_abs(&p.coeff(1)));
        return Ok(MahlerLog {
            value: v,
            error: v * f64::EPSILON,
        });
    }
    let rs = roots_best_effort(p)?;
    Ok(mahler_from_roots(p.leading(), &rs))
}

fn mahler_from_roots(lead: &BigInt, rs: &[CertifiedRoot]) -> MahlerLog {
    let mut value = ln_abs(lead);
    let mut error = value.abs() * f64::EPSILON;
    for r in rs {
        let m = r.center.norm();
        if m > 1.0 {
            value += m.ln();
        }
        if m + r.radius > 1.0 {
            error += r.radius / (m - r.radius).max(1.0);
        }
        error += f64::EPSILON * m.ln().abs();
    }
    MahlerLog {
        value: value.max(0.0),
        error,
    }
}

#[derive(Debug)]
struct Shared {
    minpoly: IntPolynomial,
    roots: Vec<CertifiedRoot>,
    height: OnceLock<(f64, f64)>,
    unity_order: OnceLock<Option<u64>>,
}

/// A root of an irreducible canonical integer polynomial, identified by its
/// index among the sorted certified roots. Conjugates share one root table.
#[derive(Clone)]
pub struct AlgebraicNumber {
    shared: Arc<Shared>,
    index: usize,
}

impl std::fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "AlgebraicNumber({}, #{} ~ {})",
            self.shared.minpoly,
            self.index,
            self.center()
        )
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.shared.minpoly == other.shared.minpoly
    }
}

impl Eq for AlgebraicNumber {}

impl AlgebraicNumber {
    /// Validates canonical form and irreducibility, then isolates the roots.
    pub fn from_minpoly(minpoly: IntPolynomial, root_index: usize) -> Result<Self, AlgebraicError> {
        if minpoly.is_zero() {
            return Err(AlgebraicError::ZeroPolynomial);
        }
        if !minpoly.is_canonical() {
            return Err(AlgebraicError::NotCanonical(minpoly));
        }
        check_irreducible(&minpoly)?;
        Self::from_irreducible(minpoly, root_index)
    }

    /// Skips the irreducibility check; `minpoly` must be canonical and irreducible.
    pub fn from_irreducible(minpoly: IntPolynomial, root_index: usize) -> Result<Self, AlgebraicError> {
        let d = minpoly.degree();
        if d == 0 {
            return Err(AlgebraicError::ConstantPolynomial);
        }
        if root_index >= d {
            return Err(AlgebraicError::RootIndex {
                index: root_index,
                degree: d,
            });
        }
        let rs = roots(&minpoly, DEFAULT_EPS.max(1e-6 * f64::EPSILON * d as f64))
            .or_else(|_| roots_best_effort(&minpoly))?;
        Ok(AlgebraicNumber {
            shared: Arc::new(Shared {
                minpoly,
                roots: rs,
                height: OnceLock::new(),
                unity_order: OnceLock::new(),
            }),
            index: root_index,
        })
    }

    /// The root of `minpoly` nearest to `approx`.
    pub fn nearest_root(minpoly: IntPolynomial, approx: Complex64, check: bool) -> Result<Self, AlgebraicError> {
        let probe = if check {
            Self::from_minpoly(minpoly, 0)?
        } else {
            Self::from_irreducible(minpoly, 0)?
        };
        let idx = probe.nearest_index(approx);
        Ok(probe.with_index(idx))
    }

    fn nearest_index(&self, approx: Complex64) -> usize {
        self.shared
            .roots
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.center - approx).norm().total_cmp(&(b.1.center - approx).norm()))
            .map(|(i, _)| i)
            .unwrap()
    }

    fn with_index(&self, index: usize) -> Self {
        AlgebraicNumber {
            shared: Arc::clone(&self.shared),
            index,
        }
    }

    /// `p/q`, minimal polynomial `q x - p`.
    pub fn rational(r: &BigRational) -> Self {
        let minpoly = IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]).canonical();
        Self::from_irreducible(minpoly, 0).expect("linear polynomial")
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(&BigRational::from_integer(n.into()))
    }

    /// The real root `r^(1/m)`: positive for `r > 0`, negative for `r < 0` and odd `m`.
    ///
    /// The minimal polynomial is exact: with `g` the largest divisor of `m`
    /// such that `|r|` is a rational `g`-th power `s^g`, the number is a root of
    /// `x^(m/g) - s`, which is irreducible.
    pub fn radical(r: &BigRational, m: u32) -> Result<Self, AlgebraicError> {
        if m == 0 {
            return Err(AlgebraicError::Invalid("radical degree must be >= 1".into()));
        }
        if r.is_zero() {
            return Err(AlgebraicError::Invalid("radical of zero".into()));
        }
        if r.is_negative() && m.is_multiple_of(2) {
            return Err(AlgebraicError::Invalid(
                "even root of a negative rational is not real".into(),
            ));
        }
        let sign = if r.is_negative() { -1 } else { 1 };
        let (num, den) = (r.numer().abs(), r.denom().clone());
        let mut best = (1u32, num.clone(), den.clone());
        for g in (1..=m).rev().filter(|g| m.is_multiple_of(*g)) {
            if let (Some(a), Some(b)) = (exact_root(&num, g), exact_root(&den, g)) {
                best = (g, a, b);
                break;
            }
        }
        let (g, s_num, s_den) = best;
        let k = (m / g) as usize;
        let s_num = s_num * BigInt::from(sign);
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[0] = -s_num.clone();
        coeffs[k] = s_den.clone();
        let minpoly = IntPolynomial::new(coeffs).canonical();
        let magnitude = (crate::numeric::ratio_to_f64(&s_num.abs(), &s_den)).powf(1.0 / k as f64);
        let approx = Complex64::new(sign as f64 * magnitude, 0.0);
        Self::nearest_root(minpoly, approx, false)
    }

    /// `exp(2 pi i k / n)` for `gcd(k, n) = 1`.
    pub fn root_of_unity(n: u64, k: u64) -> Result<Self, AlgebraicError> {
        if n == 0 || crate::numeric::gcd_u64(k % n, n) != 1 {
            return Err(AlgebraicError::Invalid(format!(
                "exp(2 pi i {k}/{n}) is not a primitive root of unity of order {n}"
            )));
        }
        let theta = 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64;
        let a = Self::nearest_root(cyclotomic(n), Complex64::from_polar(1.0, theta), false)?;
        let _ = a.shared.unity_order.set(Some(n));
        Ok(a)
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.shared.minpoly
    }

    pub fn degree(&self) -> usize {
        self.shared.minpoly.degree()
    }

    pub fn root_index(&self) -> usize {
        self.index
    }

    pub fn enclosure(&self) -> CertifiedRoot {
        self.shared.roots[self.index]
    }

    pub fn center(&self) -> Complex64 {
        self.enclosure().center
    }

    pub fn is_zero(&self) -> bool {
        self.degree() == 1 && self.shared.minpoly.coeff(0).is_zero()
    }

    /// The exact rational value for degree-1 numbers.
    pub fn as_rational(&self) -> Option<BigRational> {
        (self.degree() == 1).then(|| {
            let p = &self.shared.minpoly;
            BigRational::new(-p.coeff(0), p.coeff(1))
        })
    }

    /// Multiplicative order if this is a root of unity (exact cyclotomic test).
    pub fn root_of_unity_order(&self) -> Option<u64> {
        *self
            .shared
            .unity_order
            .get_or_init(|| root_of_unity_order(&self.shared.minpoly))
    }

    pub fn is_root_of_unity(&self) -> bool {
        self.root_of_unity_order().is_some()
    }

    /// Absolute logarithmic Weil height `log M(minpoly) / deg`. Exactly zero
    /// for zero and roots of unity; `log max(|p|, |q|)` for rationals.
    pub fn weil_height(&self) -> f64 {
        self.weil_height_with_error().0
    }

    /// Height together with its certified error bound.
    pub fn weil_height_with_error(&self) -> (f64, f64) {
        *self.shared.height.get_or_init(|| {
            if let Some(r) = self.as_rational() {
                if r.is_zero() {
                    return (0.0, 0.0);
                }
                let v = ln_height_rational(&r);
                return (v, v * f64::EPSILON);
            }
            let d = self.degree() as f64;
            let m = mahler_from_roots(self.shared.minpoly.leading(), &self.shared.roots);
            // Kronecker: only a monic polynomial with unit constant term can
            // have Mahler measure 1; settle those exactly.
            if m.value <= 1e-6 && self.root_of_unity_order().is_some() {
                return (0.0, 0.0);
            }
            (m.value / d, m.error / d)
        })
    }

    /// All roots of the minimal polynomial, in root-index order.
    pub fn conjugates(&self) -> Vec<AlgebraicNumber> {
        (0..self.degree()).map(|i| self.with_index(i)).collect()
    }

    /// All certified roots of the minimal polynomial.
    pub fn conjugate_enclosures(&self) -> &[CertifiedRoot] {
        &self.shared.roots
    }

    /// `r * self`: substitute `x / r` into the minimal polynomial.
    pub fn scale_by_rational(&self, r: &BigRational) -> Result<Self, AlgebraicError> {
        if r.is_zero() {
            return Err(AlgebraicError::Invalid("scaling by zero".into()));
        }
        if r.is_one() {
            return Ok(self.clone());
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::rational(&(q * r)));
        }
        let minpoly = self.shared.minpoly.scale_root(r);
        let approx = self.center() * crate::numeric::rational_to_f64(r);
        Self::nearest_root(minpoly, approx, false)
    }

    /// `1 / self` via the reversed minimal polynomial.
    pub fn reciprocal(&self) -> Result<Self, AlgebraicError> {
        if self.is_zero() {
            return Err(AlgebraicError::Invalid("reciprocal of zero".into()));
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::rational(&q.recip()));
        }
        let minpoly = self.shared.minpoly.reversed().canonical();
        Self::nearest_root(minpoly, self.center().inv(), false)
    }

    pub fn to_literal(&self) -> AlgebraicLiteral {
        AlgebraicLiteral::from_number(self)
    }
}

/// A torus coordinate `base^exponent`, kept symbolic so that power-map orbits
/// never need the minimal polynomial of a power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusElement {
    pub base: AlgebraicNumber,
    pub exponent: BigInt,
}

impl TorusElement {
    pub fn new(base: AlgebraicNumber, exponent: BigInt) -> Result<Self, AlgebraicError> {
        if base.is_zero() {
            return Err(AlgebraicError::Invalid("torus coordinates must be nonzero".into()));
        }
        Ok(TorusElement { base, exponent })
    }

    pub fn from_base(base: AlgebraicNumber) -> Result<Self, AlgebraicError> {
        Self::new(base, BigInt::one())
    }

    pub fn one() -> Self {
        Self::rational(&BigRational::one())
    }

    /// Rational coordinate `q != 0` (panics on zero).
    pub fn rational(q: &BigRational) -> Self {
        assert!(!q.is_zero(), "torus coordinate must be nonzero");
        TorusElement {
            base: AlgebraicNumber::rational(q),
            exponent: BigInt::one(),
        }
    }

    /// `|exponent| * h(base)`.
    pub fn height(&self) -> f64 {
        self.height_with_error().0
    }

    pub fn height_with_error(&self) -> (f64, f64) {
        if self.exponent.is_zero() {
            return (0.0, 0.0);
        }
        let (h, e) = self.base.weil_height_with_error();
        let k = self.exponent.abs().to_f64().unwrap_or(f64::INFINITY);
        (k * h, k * e)
    }

    /// `(base, exponent * k)`.
    pub fn power(&self, k: &BigInt) -> Self {
        TorusElement {
            base: self.base.clone(),
            exponent: &self.exponent * k,
        }
    }

    /// Exact rational value when the base is rational (or the exponent is zero).
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.exponent.is_zero() {
            return Some(BigRational::one());
        }
        let q = self.base.as_rational()?;
        let e = self.exponent.to_i64()?;
        if e.unsigned_abs() > 1 << 20 {
            return None;
        }
        Some(if e >= 0 {
            num_traits::pow(q, e as usize)
        } else {
            num_traits::pow(q.recip(), (-e) as usize)
        })
    }

    /// Whether the value is a root of unity (exact).
    pub fn is_root_of_unity(&self) -> bool {
        self.exponent.is_zero() || self.base.is_root_of_unity()
    }

    /// Reduces to an equivalent element with exponent `1` when that can be
    /// done exactly (rational base, exponent `+-1`, or zero exponent).
    pub fn materialize(&self) -> Option<AlgebraicNumber> {
        if let Some(q) = self.as_rational() {
            return Some(AlgebraicNumber::rational(&q));
        }
        if self.exponent.is_one() {
            return Some(self.base.clone());
        }
        if self.exponent == -BigInt::one() {
            return self.base.reciprocal().ok();
        }
        if let Some(n) = self.base.root_of_unity_order() {
            // zeta^e for a primitive n-th root: another primitive root of order n / gcd.
            let e = self.exponent.clone();
            let n_big = BigInt::from(n);
            let e_mod = ((e % &n_big) + &n_big) % &n_big;
            let e_mod = e_mod.to_u64()?;
            let k_base = unity_index(&self.base, n);
            let k = (k_base as u128 * e_mod as u128 % n as u128) as u64;
            let g = crate::numeric::gcd_u64(k, n);
            let (k, n) = if k == 0 { (0, 1) } else { (k / g, n / g) };
            return AlgebraicNumber::root_of_unity(n, k).ok();
        }
        None
    }

    /// Approximate complex value with a radius bound.
    pub fn approx_disk(&self) -> Option<(Complex64, f64)> {
        let e = self.exponent.to_i32()?;
        let r = self.base.enclosure();
        let (c, rad) = if e >= 0 {
            (r.center, r.radius)
        } else {
            let m = r.center.norm();
            if m <= r.radius {
                return None;
            }
            (r.center.inv(), r.radius / (m * (m - r.radius)))
        };
        let k = e.unsigned_abs() as i32;
        let m = c.norm();
        let center = c.powi(k);
        let radius = (m + rad).powi(k) - m.powi(k);
        Some((
            center,
            radius.abs() + center.norm() * 4.0 * f64::EPSILON * (k as f64 + 1.0),
        ))
    }
}

impl std::fmt::Display for TorusElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(q) = self.as_rational() {
            if q.numer().bits() <= 256 && q.denom().bits() <= 256 {
                return write!(f, "{}", crate::numeric::format_rational(&q));
            }
        }
        write!(f, "{}", self.base)?;
        if !self.exponent.is_one() {
            write!(f, "^{}", self.exponent)?;
        }
        Ok(())
    }
}

impl std::fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{}", crate::numeric::format_rational(&q)),
            None => write!(f, "[{}]#{}", self.minpoly(), self.index),
        }
    }
}

/// `k` with `zeta = exp(2 pi i k / n)` for a primitive `n`-th root of unity.
pub(crate) fn unity_index(zeta: &AlgebraicNumber, n: u64) -> u64 {
    let theta = zeta.center().arg().rem_euclid(2.0 * std::f64::consts::PI);
    let k = (theta * n as f64 / (2.0 * std::f64::consts::PI)).round() as u64;
    k % n
}
