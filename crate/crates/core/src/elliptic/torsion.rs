//! Torsion detection and enumeration of rational torsion points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ECPoint, EllipticCurveQ, EllipticError, TORSION_BOUND};
use crate::algebraic::{roots_best_effort, IntPolynomial};

/// Trial division limit when factoring the discriminant.
const TRIAL_LIMIT: u64 = 1_000_000;

impl EllipticCurveQ {
    /// Order of `P` if `k P = O` for some `1 <= k <= 12`. Rational points of
    /// finite order always qualify, so `None` means infinite order.
    pub fn is_torsion(&self, p: &ECPoint) -> Option<u32> {
        if !self.contains(p) {
            return None;
        }
        // Nagell–Lutz: every multiple of a torsion point is integral on the
        // integral model, so a non-integral multiple settles the question.
        let u = self.integral_scale();
        let u2 = BigRational::from_integer(&u * &u);
        let u3 = BigRational::from_integer(&u * &u * &u);
        let integral = |q: &ECPoint| match q {
            ECPoint::Infinity => true,
            ECPoint::Affine { x, y } => (x * &u2).is_integer() && (y * &u3).is_integer(),
        };
        let mut q = p.clone();
        for k in 1..=TORSION_BOUND {
            if q.is_identity() {
                return Some(k);
            }
            if !integral(&q) {
                return None;
            }
            q = self.add_unchecked(&q, p);
        }
        None
    }

    /// All rational torsion points, sorted, identity first.
    ///
    /// Uses Nagell–Lutz on the integral model: torsion points have integer
    /// coordinates with `y = 0` or `y^2 | 4A^3 + 27B^2`.
    pub fn rational_torsion_points(&self) -> Result<Vec<ECPoint>, EllipticError> {
        let u = self.integral_scale();
        let u2 = BigRational::from_integer(&u * &u);
        let u3 = BigRational::from_integer(&u * &u * &u);
        let a = (self.a() * &u2 * &u2).to_integer();
        let b = (self.b() * &u3 * &u3).to_integer();
        let delta = (BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b).abs();
        let mut out = vec![ECPoint::Infinity];
        for y in square_divisor_roots(&delta)? {
            for x in integer_roots_of_cubic(&a, &(&b - &y * &y)) {
                for ys in [y.clone(), -y.clone()] {
                    let p = ECPoint::affine(
                        BigRational::from_integer(x.clone()) / &u2,
                        BigRational::from_integer(ys) / &u3,
                    );
                    if self.contains(&p) && self.is_torsion(&p).is_some() && !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Nonnegative integers `y` with `y^2 | n` (including 0).
fn square_divisor_roots(n: &BigInt) -> Result<Vec<BigInt>, EllipticError> {
    let mut rest = n.clone();
    let mut prime_powers: Vec<(BigInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_LIMIT && BigInt::from(p) * BigInt::from(p) <= rest {
        let pb = BigInt::from(p);
        let mut e = 0;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e >= 2 {
            prime_powers.push((pb, e / 2));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        let bound = BigInt::from(TRIAL_LIMIT);
        let s = rest.sqrt();
        if &s * &s == rest {
            // Every prime factor exceeds the trial limit, so below limit^4 the
            // square root is prime.
            if rest.bits() > 78 {
                return Err(EllipticError::TorsionSearch(format!(
                    "cannot certify the factorisation of the cofactor {rest} of the discriminant"
                )));
            }
            prime_powers.push((s, 1));
        } else if rest >= &bound * &bound * &bound {
            // Could hide a square factor p^2 q with p, q above the trial limit.
            return Err(EllipticError::TorsionSearch(format!(
                "discriminant cofactor {rest} too large to factor"
            )));
        }
    }
    let mut ys = vec![BigInt::one()];
    for (p, e) in prime_powers {
        let mut next = Vec::new();
        for y in &ys {
            let mut m = y.clone();
            for _ in 0..=e {
                next.push(m.clone());
                m *= &p;
            }
        }
        ys = next;
    }
    ys.push(BigInt::zero());
    ys.sort();
    Ok(ys)
}

/// Integer roots of `x^3 + a x + c`.
fn integer_roots_of_cubic(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let p = IntPolynomial::new(vec![c.clone(), a.clone(), BigInt::zero(), BigInt::one()]);
    let eval = |x: &BigInt| x * x * x + a * x + c;
    let mut out = Vec::new();
    if c.is_zero() {
        out.push(BigInt::zero());
    }
    let Ok(rs) = roots_best_effort(&p) else {
        return out;
    };
    for r in rs {
        if r.center.im.abs() > r.radius + 0.5 {
            continue;
        }
        let Some(base) = BigInt::from_f64_round(r.center.re) else {
            continue;
        };
        for delta in -1i64..=1 {
            let x = &base + delta;
            if eval(&x).is_zero() && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

trait FromF64Round {
    fn from_f64_round(v: f64) -> Option<BigInt>;
}

impl FromF64Round for BigInt {
    fn from_f64_round(v: f64) -> Option<BigInt> {
        use num_traits::FromPrimitive;
        if !v.is_finite() {
            return None;
        }
        BigInt::from_f64(v.round())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: i64, b: i64) -> EllipticCurveQ {
        EllipticCurveQ::from_i64(a, b).unwrap()
    }

    #[test]
    fn is_torsion_examples() {
        assert_eq!(e(0, 1).is_torsion(&ECPoint::Infinity), Some(1));
        assert_eq!(e(0, 1).is_torsion(&ECPoint::from_i64(2, 3)), Some(6));
        assert_eq!(e(0, -2).is_torsion(&ECPoint::from_i64(3, 5)), None);
        assert_eq!(e(0, 1).is_torsion(&ECPoint::from_i64(-1, 0)), Some(2));
    }

    #[test]
    fn torsion_of_y2_x3_plus_1_is_cyclic_of_order_6() {
        let pts = e(0, 1).rational_torsion_points().unwrap();
        assert_eq!(pts.len(), 6);
        let orders: Vec<u32> = pts.iter().map(|p| e(0, 1).is_torsion(p).unwrap()).collect();
        assert_eq!(orders.iter().filter(|&&o| o == 6).count(), 2);
        assert!(pts.contains(&ECPoint::from_i64(0, 1)));
        assert!(pts.contains(&ECPoint::from_i64(0, -1)));
    }

    #[test]
    fn torsion_counts_on_known_curves() {
        // y^2 = x^3 - 2: trivial; y^2 = x^3 - x: Z/2 x Z/2; y^2 = x^3 + 4: Z/3.
        assert_eq!(e(0, -2).rational_torsion_points().unwrap(), vec![ECPoint::Infinity]);
        assert_eq!(e(-1, 0).rational_torsion_points().unwrap().len(), 4);
        assert_eq!(e(0, 4).rational_torsion_points().unwrap().len(), 3);
        // y^2 = x^3 - 43x + 166 has a rational 7-torsion point (3, 8).
        let c = e(-43, 166);
        assert_eq!(c.is_torsion(&ECPoint::from_i64(3, 8)), Some(7));
        assert_eq!(c.rational_torsion_points().unwrap().len(), 7);
    }

    #[test]
    fn non_integral_model() {
        // y^2 = x^3 + 1 scaled by u = 2: x = X/4, y = Y/8.
        let c = EllipticCurveQ::new(BigRational::zero(), BigRational::new(1.into(), 64.into())).unwrap();
        assert_eq!(c.rational_torsion_points().unwrap().len(), 6);
    }

    #[test]
    fn square_divisors() {
        let ys = square_divisor_roots(&BigInt::from(432)).unwrap();
        // 432 = 2^4 3^3: y in {0, 1, 2, 3, 4, 6, 12}
        let want: Vec<BigInt> = [0, 1, 2, 3, 4, 6, 12].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(ys, want);
    }
}
