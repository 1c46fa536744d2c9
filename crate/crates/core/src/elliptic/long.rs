//! Long Weierstrass input `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`,
//! normalised to short form by completing the square and the cube.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{ECPoint, EllipticCurveQ, EllipticError};
use crate::numeric::serde_rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LongWeierstrass {
    #[serde(with = "serde_rational")]
    pub a1: BigRational,
    #[serde(with = "serde_rational")]
    pub a2: BigRational,
    #[serde(with = "serde_rational")]
    pub a3: BigRational,
    #[serde(with = "serde_rational")]
    pub a4: BigRational,
    #[serde(with = "serde_rational")]
    pub a6: BigRational,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl LongWeierstrass {
    pub fn from_i64(a: [i64; 5]) -> Self {
        LongWeierstrass {
            a1: q(a[0]),
            a2: q(a[1]),
            a3: q(a[2]),
            a4: q(a[3]),
            a6: q(a[4]),
        }
    }

    fn b2(&self) -> BigRational {
        &self.a1 * &self.a1 + q(4) * &self.a2
    }

    fn b4(&self) -> BigRational {
        q(2) * &self.a4 + &self.a1 * &self.a3
    }

    fn b6(&self) -> BigRational {
        &self.a3 * &self.a3 + q(4) * &self.a6
    }

    /// `y'^2 = x'^3 + A x' + B` with `x' = x + b2/12`, `y' = y + (a1 x + a3)/2`.
    pub fn short_model(&self) -> Result<EllipticCurveQ, EllipticError> {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        let a = &b4 / q(2) - &b2 * &b2 / q(48);
        let b = &b6 / q(4) - &b2 * &b4 / q(24) + &b2 * &b2 * &b2 / q(864);
        EllipticCurveQ::new(a, b)
    }

    pub fn contains(&self, p: &ECPoint) -> bool {
        match p {
            ECPoint::Infinity => true,
            ECPoint::Affine { x, y } => {
                y * y + &self.a1 * x * y + &self.a3 * y == x * x * x + &self.a2 * x * x + &self.a4 * x + &self.a6
            }
        }
    }

    pub fn to_short(&self, p: &ECPoint) -> Result<ECPoint, EllipticError> {
        if !self.contains(p) {
            return Err(EllipticError::OffCurve(p.to_string()));
        }
        Ok(match p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine { x, y } => ECPoint::Affine {
                x: x + self.b2() / q(12),
                y: y + (&self.a1 * x + &self.a3) / q(2),
            },
        })
    }

    pub fn from_short(&self, p: &ECPoint) -> ECPoint {
        match p {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine { x, y } => {
                let xl = x - self.b2() / q(12);
                let yl = y - (&self.a1 * &xl + &self.a3) / q(2);
                ECPoint::Affine { x: xl, y: yl }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_form_round_trip() {
        // 11a3: y^2 + y = x^3 - x^2, with the 5-torsion point (0, 0).
        let l = LongWeierstrass::from_i64([0, -1, 1, 0, 0]);
        let e = l.short_model().unwrap();
        let p = ECPoint::from_i64(0, 0);
        let s = l.to_short(&p).unwrap();
        assert!(e.contains(&s));
        assert_eq!(e.is_torsion(&s), Some(5));
        assert_eq!(l.from_short(&s), p);
        assert!(l.to_short(&ECPoint::from_i64(1, 1)).is_err());
    }

    #[test]
    fn short_input_is_unchanged() {
        let l = LongWeierstrass::from_i64([0, 0, 0, -2, 1]);
        assert_eq!(l.short_model().unwrap(), EllipticCurveQ::from_i64(-2, 1).unwrap());
    }

    #[test]
    fn group_law_commutes_with_the_change_of_variables() {
        let l = LongWeierstrass::from_i64([1, 0, 1, -1, 0]);
        let e = l.short_model().unwrap();
        let p = ECPoint::from_i64(0, 0);
        assert!(l.contains(&p));
        let s = l.to_short(&p).unwrap();
        let s2 = e.mul_i64(2, &s).unwrap();
        assert!(l.contains(&l.from_short(&s2)));
    }
}
