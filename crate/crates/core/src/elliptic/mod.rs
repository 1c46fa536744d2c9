//! Elliptic curves `y^2 = x^3 + a x + b` over `Q` with exact rational points.
//!
//! Heights are taken relative to the x-coordinate: the naive height is
//! `log max(|num x|, |den x|)` and the canonical height is
//! `lim 4^-n h(x(2^n P))`, so that `h(mP) = m^2 h(P)`.

mod group;
mod height;
mod long;
mod torsion;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use height::CanonicalHeight;
pub use long::LongWeierstrass;

use crate::numeric::{format_rational, serde_rational};

/// Largest order checked by [`EllipticCurveQ::is_torsion`]; rational torsion
/// orders never exceed 12 (Mazur).
pub const TORSION_BOUND: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("singular curve: 4a^3 + 27b^2 = 0")]
    Singular,
    #[error("point {0} is not on the curve")]
    OffCurve(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("requested tolerance {requested:e} is below the floating-point floor; best achievable is {achievable:e}")]
    PrecisionLimit { requested: f64, achievable: f64 },
    #[error("torsion search incomplete: {0}")]
    TorsionSearch(String),
}

/// Short Weierstrass curve `y^2 = x^3 + a x + b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr", into = "CurveRepr")]
pub struct EllipticCurveQ {
    a: BigRational,
    b: BigRational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveRepr {
    #[serde(with = "serde_rational")]
    a: BigRational,
    #[serde(with = "serde_rational")]
    b: BigRational,
}

impl TryFrom<CurveRepr> for EllipticCurveQ {
    type Error = EllipticError;

    fn try_from(r: CurveRepr) -> Result<Self, EllipticError> {
        EllipticCurveQ::new(r.a, r.b)
    }
}

impl From<EllipticCurveQ> for CurveRepr {
    fn from(c: EllipticCurveQ) -> Self {
        CurveRepr { a: c.a, b: c.b }
    }
}

/// Point on a curve: the identity `O` or an affine point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ECPoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl EllipticCurveQ {
    pub fn new(a: BigRational, b: BigRational) -> Result<Self, EllipticError> {
        let c = EllipticCurveQ { a, b };
        if c.disc_core().is_zero() {
            return Err(EllipticError::Singular);
        }
        Ok(c)
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self, EllipticError> {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    /// `4a^3 + 27b^2`.
    fn disc_core(&self) -> BigRational {
        let four = BigRational::from_integer(4.into());
        let tw7 = BigRational::from_integer(27.into());
        four * &self.a * &self.a * &self.a + tw7 * &self.b * &self.b
    }

    /// `-16 (4a^3 + 27b^2)`.
    pub fn discriminant(&self) -> BigRational {
        -BigRational::from_integer(16.into()) * self.disc_core()
    }

    /// Right-hand side `x^3 + a x + b`.
    pub fn rhs(&self, x: &BigRational) -> BigRational {
        x * x * x + &self.a * x + &self.b
    }

    pub fn contains(&self, p: &ECPoint) -> bool {
        match p {
            ECPoint::Infinity => true,
            ECPoint::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    pub(crate) fn check(&self, p: &ECPoint) -> Result<(), EllipticError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(EllipticError::OffCurve(p.to_string()))
        }
    }

    /// Smallest positive integer `u` with `a u^4` and `b u^6` integral.
    pub(crate) fn integral_scale(&self) -> BigInt {
        use num_integer::Integer;
        let mut u = BigInt::from(1);
        loop {
            let u4 = num_traits::pow(u.clone(), 4);
            let u6 = num_traits::pow(u.clone(), 6);
            let ok_a = (&self.a * BigRational::from_integer(u4)).is_integer();
            let ok_b = (&self.b * BigRational::from_integer(u6)).is_integer();
            if ok_a && ok_b {
                return u;
            }
            // The lcm of denominators always works; search below it only for small cases.
            let l = self.a.denom().lcm(self.b.denom());
            if u >= l || l.bits() > 20 {
                return l;
            }
            u += 1;
        }
    }
}

impl ECPoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        ECPoint::Affine { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        ECPoint::Affine {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, ECPoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            ECPoint::Infinity => None,
            ECPoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            ECPoint::Infinity => None,
            ECPoint::Affine { y, .. } => Some(y),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ECPoint::Infinity => ECPoint::Infinity,
            ECPoint::Affine { x, y } => ECPoint::Affine { x: x.clone(), y: -y },
        }
    }

    /// `true` for affine points with `y = 0` (the 2-torsion).
    pub fn is_two_torsion(&self) -> bool {
        matches!(self, ECPoint::Affine { y, .. } if y.is_zero())
    }
}

impl fmt::Display for ECPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ECPoint::Infinity => write!(f, "O"),
            ECPoint::Affine { x, y } => {
                write!(f, "({}, {})", format_rational(x), format_rational(y))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineRepr {
    #[serde(with = "serde_rational")]
    x: BigRational,
    #[serde(with = "serde_rational")]
    y: BigRational,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Identity(String),
    Affine(AffineRepr),
}

impl Serialize for ECPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ECPoint::Infinity => PointRepr::Identity("O".into()).serialize(s),
            ECPoint::Affine { x, y } => PointRepr::Affine(AffineRepr {
                x: x.clone(),
                y: y.clone(),
            })
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ECPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Identity(s) if s == "O" => Ok(ECPoint::Infinity),
            PointRepr::Identity(s) => Err(serde::de::Error::custom(format!(
                "expected \"O\" or {{\"x\", \"y\"}}, got {s:?}"
            ))),
            PointRepr::Affine(AffineRepr { x, y }) => Ok(ECPoint::Affine { x, y }),
        }
    }
}

/// Curve file contents: short `{"a", "b"}` or long `{"a1", "a2", "a3", "a4", "a6"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSpec {
    Short(EllipticCurveQ),
    Long(LongWeierstrass),
}

impl CurveSpec {
    /// The short model together with the coordinate change from the input model.
    pub fn resolve(&self) -> Result<(EllipticCurveQ, Option<LongWeierstrass>), EllipticError> {
        match self {
            CurveSpec::Short(c) => Ok((c.clone(), None)),
            CurveSpec::Long(l) => Ok((l.short_model()?, Some(l.clone()))),
        }
    }
}
