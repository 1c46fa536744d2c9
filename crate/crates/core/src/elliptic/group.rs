//! Chord-tangent group law in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{ECPoint, EllipticCurveQ, EllipticError};

impl EllipticCurveQ {
    /// `P + Q`; rejects points not on the curve.
    pub fn add(&self, p: &ECPoint, q: &ECPoint) -> Result<ECPoint, EllipticError> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub fn sub(&self, p: &ECPoint, q: &ECPoint) -> Result<ECPoint, EllipticError> {
        self.add(p, &q.neg())
    }

    pub fn double(&self, p: &ECPoint) -> Result<ECPoint, EllipticError> {
        self.check(p)?;
        Ok(self.add_unchecked(p, p))
    }

    /// `k P` by double-and-add.
    pub fn mul(&self, k: &BigInt, p: &ECPoint) -> Result<ECPoint, EllipticError> {
        self.check(p)?;
        Ok(self.mul_unchecked(k, p))
    }

    pub fn mul_i64(&self, k: i64, p: &ECPoint) -> Result<ECPoint, EllipticError> {
        self.mul(&BigInt::from(k), p)
    }

    pub(crate) fn mul_unchecked(&self, k: &BigInt, p: &ECPoint) -> ECPoint {
        let base = if k.is_negative() { p.neg() } else { p.clone() };
        let k = k.abs();
        let mut acc = ECPoint::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.add_unchecked(&acc, &acc);
            if k.bit(i) {
                acc = self.add_unchecked(&acc, &base);
            }
        }
        acc
    }

    pub(crate) fn add_unchecked(&self, p: &ECPoint, q: &ECPoint) -> ECPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (ECPoint::Infinity, _) => return q.clone(),
            (_, ECPoint::Infinity) => return p.clone(),
            (ECPoint::Affine { x: x1, y: y1 }, ECPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if y1 != y2 || y1.is_zero() {
                return ECPoint::Infinity;
            }
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            (three * x1 * x1 + &self.a) / (two * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        ECPoint::Affine { x: x3, y: y3 }
    }
}
