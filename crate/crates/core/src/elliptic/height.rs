//! Naive and canonical heights.
//!
//! The canonical height is the limit `lim 4^-n h(x(2^n P))`. Doubling the
//! point exactly is hopeless (coordinate sizes grow like `4^n`), so the limit
//! is computed through the telescoping identity
//!
//! ```text
//! h(x(2Q)) - 4 h(x(Q)) = log max(|F(X,Z)|, |G(X,Z)|) - 4 log max(|X|, |Z|) - log g
//! ```
//!
//! on an integral model, where `x(Q) = X/Z` in lowest terms, `F/G` is the
//! duplication map and `g = gcd(F, G)` divides `D = 4(4A^3 + 27B^2)`. The first
//! two terms depend only on the projective point `(X : Z)` normalised to unit
//! max-norm and are evaluated in floating point; `g` only needs `X, Z` modulo a
//! power of `D`, tracked exactly. Partial sums equal `4^-n h(x(2^n P))`
//! exactly up to float rounding, and every term lies in `[-C, C]` with
//! `C` from [`EllipticCurveQ::height_constant`], giving the tail bound
//! `C / (3 * 4^n)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::{ECPoint, EllipticCurveQ, EllipticError};
use crate::numeric::{ln_abs, ln_height_rational, ratio_to_f64};

/// Allowance for floating-point rounding in the archimedean terms.
const FLOAT_SLACK: f64 = 1e-12;

/// Most doublings ever taken; the tail bound is far below any tolerance by then.
const MAX_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalHeight {
    #[serde(serialize_with = "crate::format::ser12")]
    pub value: f64,
    /// Certified bound on `|value - h^(P)|`.
    #[serde(serialize_with = "crate::format::ser12")]
    pub error: f64,
    /// Doublings used (0 for torsion points, which are settled exactly).
    pub steps: usize,
}

/// Integral model `y^2 = x^3 + A x + B` with `A = a u^4`, `B = b u^6`.
struct IntegralModel {
    u: BigInt,
    a: BigInt,
    b: BigInt,
    /// `|4 (4A^3 + 27B^2)|`
    d: BigInt,
    c_int: f64,
}

impl IntegralModel {
    fn new(e: &EllipticCurveQ) -> Self {
        let u = e.integral_scale();
        let u4 = BigRational::from_integer(num_traits::pow(u.clone(), 4));
        let u6 = BigRational::from_integer(num_traits::pow(u.clone(), 6));
        let a = (e.a() * u4).to_integer();
        let b = (e.b() * u6).to_integer();
        let delta = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
        let d = (BigInt::from(4) * delta).abs();
        let c_int = height_constant_integral(&a, &b);
        IntegralModel { u, a, b, d, c_int }
    }

    /// `x' = u^2 x` as `(X, Z)` in lowest terms with `Z > 0`.
    fn projective_x(&self, x: &BigRational) -> (BigInt, BigInt) {
        let xs = x * BigRational::from_integer(&self.u * &self.u);
        (xs.numer().clone(), xs.denom().clone())
    }

    /// `(F, G)` of the duplication map at integer `(X, Z)`.
    fn dup_exact(&self, x: &BigInt, z: &BigInt) -> (BigInt, BigInt) {
        let (a, b) = (&self.a, &self.b);
        let x2 = x * x;
        let z2 = z * z;
        let z3 = &z2 * z;
        let f = &x2 * &x2 - BigInt::from(2) * a * &x2 * &z2 - BigInt::from(8) * b * x * &z3 + a * a * &z2 * &z2;
        let g = BigInt::from(4) * (&x2 * x * z + a * x * &z3 + b * &z3 * z);
        (f, g)
    }

    fn dup_float(&self, x: f64, z: f64) -> (f64, f64) {
        let a = crate::numeric::ratio_to_f64(&self.a, &BigInt::one());
        let b = crate::numeric::ratio_to_f64(&self.b, &BigInt::one());
        let x2 = x * x;
        let z2 = z * z;
        let z3 = z2 * z;
        let f = x2 * x2 - 2.0 * a * x2 * z2 - 8.0 * b * x * z3 + a * a * z2 * z2;
        let g = 4.0 * (x2 * x * z + a * x * z3 + b * z3 * z);
        (f, g)
    }
}

/// `C` with `|h(x(2Q)) - 4 h(x(Q))| <= C` on the integral model.
///
/// Upper side: `log max(|F|, |G|) <= log max(||F||_1, ||G||_1)` at unit
/// max-norm. Lower side: the identities
/// `f1 F - g1 G = 4 Delta Z^7` and `f2 F + g2 G = 4 Delta X^7` bound
/// `max(|F|, |G|) >= |4 Delta| / K`, while `g <= |4 Delta|`.
fn height_constant_integral(a: &BigInt, b: &BigInt) -> f64 {
    let l1 = |cs: &[BigInt]| -> f64 {
        cs.iter()
            .map(|c| crate::numeric::ratio_to_f64(&c.abs(), &BigInt::one()))
            .sum()
    };
    let i = |n: i64| BigInt::from(n);
    let a2 = a * a;
    let a3 = &a2 * a;
    let b2 = b * b;
    let delta = i(4) * &a3 + i(27) * &b2;
    let f_norm = l1(&[i(1), i(2) * a, i(8) * b, a2.clone()]);
    let g_norm = l1(&[i(4), i(4) * a, i(4) * b]);
    let f1 = l1(&[i(12), i(16) * a]);
    let g1 = l1(&[i(3), i(5) * a, i(27) * b]);
    let f2 = l1(&[
        i(4) * &delta,
        i(4) * &a2 * b,
        i(4) * a * (i(3) * &a3 + i(22) * &b2),
        i(12) * b * (&a3 + i(8) * &b2),
    ]);
    let g2 = l1(&[
        &a2 * b,
        a * (i(5) * &a3 + i(32) * &b2),
        i(2) * b * (i(13) * &a3 + i(96) * &b2),
        i(3) * &a2 * (&a3 + i(8) * &b2),
    ]);
    let k = (f1 + g1).max(f2 + g2);
    k.ln().max(f_norm.max(g_norm).ln())
}

impl EllipticCurveQ {
    /// `log max(|num x|, |den x|)`, and 0 at `O`.
    pub fn naive_height(&self, p: &ECPoint) -> f64 {
        match p.x() {
            None => 0.0,
            Some(x) => ln_height_rational(x),
        }
    }

    /// A constant `C(E)` with `|h(2Q) - 4 h(Q)| <= C(E)` for every rational
    /// point `Q`, where `h` is the naive height in the coordinates of `self`.
    pub fn height_constant(&self) -> f64 {
        let m = IntegralModel::new(self);
        // Passing to the integral model moves h by at most 2 log u.
        m.c_int + 10.0 * ln_abs(&m.u)
    }

    /// Canonical height to within `tol`.
    pub fn canonical_height(&self, p: &ECPoint, tol: f64) -> Result<CanonicalHeight, EllipticError> {
        self.check(p)?;
        if !(tol > 0.0) {
            return Err(EllipticError::InvalidTolerance(tol));
        }
        if self.is_torsion(p).is_some() {
            return Ok(CanonicalHeight {
                value: 0.0,
                error: 0.0,
                steps: 0,
            });
        }
        let achievable = 2.0 * FLOAT_SLACK;
        if tol < achievable {
            return Err(EllipticError::PrecisionLimit {
                requested: tol,
                achievable,
            });
        }
        let x = p.x().expect("non-torsion point is affine");
        let model = IntegralModel::new(self);
        let c = model.c_int;
        let budget = tol - FLOAT_SLACK;
        let mut steps = 0;
        while steps < MAX_STEPS && c / (3.0 * 4f64.powi(steps as i32)) > budget {
            steps += 1;
        }
        let (x0, z0) = model.projective_x(x);
        let value = telescoped(&model, &x0, &z0, steps);
        let error = c / (3.0 * 4f64.powi(steps as i32)) + FLOAT_SLACK;
        Ok(CanonicalHeight {
            value: value.max(0.0),
            error,
            steps,
        })
    }

    /// `4^-n h(x(2^n P))` for `n = 0..=steps`, computed by exact doubling.
    /// Only practical for small `steps`; used to exhibit convergence.
    pub fn duplication_sequence(&self, p: &ECPoint, steps: usize) -> Result<Vec<f64>, EllipticError> {
        self.check(p)?;
        let mut out = Vec::with_capacity(steps + 1);
        let mut q = p.clone();
        for n in 0..=steps {
            out.push(self.naive_height(&q) / 4f64.powi(n as i32));
            if n < steps {
                q = self.add_unchecked(&q, &q);
            }
        }
        Ok(out)
    }
}

fn telescoped(model: &IntegralModel, x0: &BigInt, z0: &BigInt, steps: usize) -> f64 {
    let d = &model.d;
    let mut modulus = num_traits::pow(d.clone(), steps + 2);
    let mut xm = x0.mod_floor(&modulus);
    let mut zm = z0.mod_floor(&modulus);
    let top = if x0.abs() > z0.abs() { x0.abs() } else { z0.abs() };
    let mut xf = ratio_to_f64(x0, &top);
    let mut zf = ratio_to_f64(z0, &top);
    let mut sum = ln_abs(&top);
    let mut weight = 1.0;
    for _ in 0..steps {
        weight /= 4.0;
        // Exact part: g = gcd(F, G) divides D.
        let (f, g) = model.dup_exact(&xm, &zm);
        let (f, g) = (f.mod_floor(&modulus), g.mod_floor(&modulus));
        let common = f.gcd(&g).gcd(d);
        modulus = &modulus / &common;
        xm = (&f / &common).mod_floor(&modulus);
        zm = (&g / &common).mod_floor(&modulus);
        // Archimedean part at unit max-norm.
        let (ff, gf) = model.dup_float(xf, zf);
        let norm = ff.abs().max(gf.abs());
        sum += weight * (norm.ln() - ln_abs(&common));
        xf = ff / norm;
        zf = gf / norm;
    }
    sum
}
