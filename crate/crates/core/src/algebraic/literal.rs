//! JSON literal for algebraic numbers.
//!
//! Either a rational string `"p/q"` (or a bare JSON integer), or
//! `{"minpoly": [c0, ..., cd], "root_index": k}`. When `root_index` is
//! absent, `"approx": {"re": f, "im": f}` selects the nearest root.
//! Coefficients may be JSON integers or decimal strings.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{AlgebraicError, AlgebraicNumber, IntPolynomial};
use crate::format::round12;
use crate::numeric::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Str(String),
}

impl Coefficient {
    fn to_bigint(&self) -> Result<BigInt, AlgebraicError> {
        match self {
            Coefficient::Int(n) => Ok(BigInt::from(*n)),
            Coefficient::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| AlgebraicError::Invalid(format!("bad integer coefficient {s:?}"))),
        }
    }

    fn from_bigint(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => Coefficient::Int(v),
            None => Coefficient::Str(n.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Approx {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraicLiteral {
    Integer(i64),
    Rational(String),
    Root {
        minpoly: Vec<Coefficient>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root_index: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        approx: Option<Approx>,
    },
}

impl AlgebraicLiteral {
    pub fn from_number(a: &AlgebraicNumber) -> Self {
        if let Some(q) = a.as_rational() {
            return AlgebraicLiteral::Rational(format_rational(&q));
        }
        let c = a.center();
        AlgebraicLiteral::Root {
            minpoly: a.minpoly().coeffs().iter().map(Coefficient::from_bigint).collect(),
            root_index: Some(a.root_index()),
            approx: Some(Approx {
                re: round12(c.re),
                im: round12(c.im),
            }),
        }
    }

    /// Builds the number, verifying canonical form and irreducibility.
    pub fn to_number(&self) -> Result<AlgebraicNumber, AlgebraicError> {
        match self {
            AlgebraicLiteral::Integer(n) => Ok(AlgebraicNumber::integer(*n)),
            AlgebraicLiteral::Rational(s) => {
                let q = parse_rational(s).map_err(AlgebraicError::Invalid)?;
                Ok(AlgebraicNumber::rational(&q))
            }
            AlgebraicLiteral::Root {
                minpoly,
                root_index,
                approx,
            } => {
                let coeffs = minpoly
                    .iter()
                    .map(Coefficient::to_bigint)
                    .collect::<Result<Vec<_>, _>>()?;
                let p = IntPolynomial::new(coeffs);
                match (root_index, approx) {
                    (Some(k), _) => AlgebraicNumber::from_minpoly(p, *k),
                    (None, Some(z)) => AlgebraicNumber::nearest_root(p, Complex64::new(z.re, z.im), true),
                    (None, None) => Err(AlgebraicError::Invalid(
                        "algebraic literal needs root_index or approx".into(),
                    )),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<AlgebraicNumber, AlgebraicError> {
        serde_json::from_str::<AlgebraicLiteral>(s).unwrap().to_number()
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(
            parse("\"2/3\"").unwrap().as_rational(),
            Some(parse_rational("2/3").unwrap())
        );
        assert_eq!(parse("-5").unwrap().as_rational(), Some(parse_rational("-5").unwrap()));
        let a = parse(r#"{"minpoly": [-2, 0, 1], "root_index": 1}"#).unwrap();
        assert!((a.center().re - 2f64.sqrt()).abs() < 1e-14);
        let b = parse(r#"{"minpoly": ["-2", 0, 1], "approx": {"re": -1.4, "im": 0}}"#).unwrap();
        assert_eq!(b.root_index(), 0);
        assert!(parse(r#"{"minpoly": [-2, 0, 1]}"#).is_err());
        assert!(parse(r#"{"minpoly": [1, 0, -1], "root_index": 0}"#).is_err());
    }

    #[test]
    fn round_trip() {
        for src in [
            r#"{"minpoly": [1, 1, 1], "root_index": 1}"#,
            r#"{"minpoly": [-2, 0, 0, 0, 0, 1], "root_index": 3}"#,
            "\"-7/4\"",
        ] {
            let a = parse(src).unwrap();
            let text = serde_json::to_string(&a.to_literal()).unwrap();
            assert_eq!(parse(&text).unwrap(), a);
        }
    }
}
