//! Polynomial relations in the coordinates `(x, y, t_1, ..., t_n)` and the
//! membership test for points of `E x G_m^n`.
//!
//! JSON: `{"equations": [{"ex,ey,e1,...,en": "coefficient", ...}, ...]}`,
//! each key listing the exponents of `x`, `y` and the torus coordinates
//! (torus exponents may be negative). Example `t_1 = 2` for `n = 1`:
//! `{"equations": [{"0,0,1": 1, "0,0,0": -2}]}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{SemiabelianError, SemiabelianPoint};
use crate::algebraic::{unity_index, AlgebraicNumber, IntPolynomial, TorusElement};
use crate::elliptic::ECPoint;
use crate::numeric::{format_rational, parse_rational, rational_to_f64};

/// Largest exponent span for which the exact divisibility test is attempted.
const MAX_SPAN: i64 = 100_000;

type Monomial = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRelation {
    torus_rank: usize,
    equations: Vec<BTreeMap<Monomial, BigRational>>,
}

/// Verdicts ordered from strongest yes to strongest no.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Membership {
    ExactYes,
    NumericYes {
        #[serde(serialize_with = "crate::format::ser12", deserialize_with = "crate::format::de12")]
        residual: f64,
    },
    NumericNo {
        #[serde(serialize_with = "crate::format::ser12", deserialize_with = "crate::format::de12")]
        residual: f64,
    },
    ExactNo,
}

impl Membership {
    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::ExactYes | Membership::NumericYes { .. })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Membership::ExactYes | Membership::ExactNo)
    }

    fn rank(&self) -> u8 {
        match self {
            Membership::ExactYes => 0,
            Membership::NumericYes { .. } => 1,
            Membership::NumericNo { .. } => 2,
            Membership::ExactNo => 3,
        }
    }

    /// Conjunction over equations: the weakest "yes" or strongest "no" wins.
    fn and(self, other: Membership) -> Membership {
        match (self, other) {
            (Membership::NumericYes { residual: a }, Membership::NumericYes { residual: b }) => {
                Membership::NumericYes { residual: a.max(b) }
            }
            (Membership::NumericNo { residual: a }, Membership::NumericNo { residual: b }) => {
                Membership::NumericNo { residual: a.max(b) }
            }
            _ if other.rank() > self.rank() => other,
            _ => self,
        }
    }
}

impl CurveRelation {
    /// Equations as lists of `(exponents, coefficient)`; exponent vectors have
    /// length `2 + torus_rank`.
    pub fn new(torus_rank: usize, equations: Vec<Vec<(Monomial, BigRational)>>) -> Result<Self, SemiabelianError> {
        if equations.is_empty() {
            return Err(SemiabelianError::InvalidRelation("no equations".into()));
        }
        let mut out = Vec::with_capacity(equations.len());
        for (k, eq) in equations.into_iter().enumerate() {
            let mut terms: BTreeMap<Monomial, BigRational> = BTreeMap::new();
            for (m, c) in eq {
                if m.len() != 2 + torus_rank {
                    return Err(SemiabelianError::InvalidRelation(format!(
                        "monomial {m:?} has {} exponents, expected {}",
                        m.len(),
                        2 + torus_rank
                    )));
                }
                if m[0] < 0 || m[1] < 0 {
                    return Err(SemiabelianError::InvalidRelation(format!(
                        "negative exponent of x or y in {m:?}"
                    )));
                }
                *terms.entry(m).or_insert_with(BigRational::zero) += c;
            }
            terms.retain(|_, c| !c.is_zero());
            if terms.is_empty() {
                return Err(SemiabelianError::InvalidRelation(format!(
                    "equation {k} is identically zero"
                )));
            }
            out.push(terms);
        }
        Ok(CurveRelation {
            torus_rank,
            equations: out,
        })
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn equations(&self) -> usize {
        self.equations.len()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationRepr {
    equations: Vec<BTreeMap<String, Coeff>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Int(i64),
    Str(String),
}

impl Serialize for CurveRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let equations = self
            .equations
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|(m, c)| {
                        let key = m.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
                        (key, Coeff::Str(format_rational(c)))
                    })
                    .collect()
            })
            .collect();
        RelationRepr { equations }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurveRelation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = RelationRepr::deserialize(d)?;
        let mut rank = None;
        let mut eqs = Vec::new();
        for eq in r.equations {
            let mut terms = Vec::new();
            for (key, c) in eq {
                let m: Monomial = key
                    .split(',')
                    .map(|s| s.trim().parse::<i64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| D::Error::custom(format!("bad monomial key {key:?}")))?;
                if m.len() < 2 {
                    return Err(D::Error::custom(format!("monomial key {key:?} needs at least ex,ey")));
                }
                let n = m.len() - 2;
                if *rank.get_or_insert(n) != n {
                    return Err(D::Error::custom("monomial keys have inconsistent lengths"));
                }
                let c = match c {
                    Coeff::Int(v) => BigRational::from_integer(v.into()),
                    Coeff::Str(s) => parse_rational(&s).map_err(D::Error::custom)?,
                };
                terms.push((m, c));
            }
            eqs.push(terms);
        }
        CurveRelation::new(rank.unwrap_or(0), eqs).map_err(D::Error::custom)
    }
}

/// Whether `x` satisfies every equation of `rel`.
///
/// Exact when all coordinates are rational, or when the algebraic torus
/// coordinates are powers of one common number `alpha` (or all roots of
/// unity): the relation then becomes a Laurent polynomial in `alpha`, tested
/// for divisibility by its minimal polynomial. Otherwise the equations are
/// evaluated in complex disk arithmetic. Equations mentioning `x` or `y` are
/// false at the identity `O`.
pub fn curve_membership(rel: &CurveRelation, x: &SemiabelianPoint) -> Result<Membership, SemiabelianError> {
    if x.torus.len() != rel.torus_rank {
        return Err(SemiabelianError::InvalidRelation(format!(
            "relation has {} torus variables, point has {}",
            rel.torus_rank,
            x.torus.len()
        )));
    }
    let coords = classify(&x.torus);
    let mut verdict = Membership::ExactYes;
    for eq in &rel.equations {
        verdict = verdict.and(equation_membership(eq, &x.ec, &x.torus, &coords));
        if verdict == Membership::ExactNo {
            break;
        }
    }
    Ok(verdict)
}

/// How the torus coordinates can be handled exactly.
enum Coords {
    /// Every coordinate rational.
    Rational(Vec<BigRational>),
    /// Each coordinate `q_i` (rational) or `alpha^k_i`.
    Power {
        alpha: AlgebraicNumber,
        parts: Vec<Result<BigRational, BigInt>>,
    },
    Numeric,
}

fn classify(torus: &[TorusElement]) -> Coords {
    let rationals: Vec<Option<BigRational>> = torus.iter().map(TorusElement::as_rational).collect();
    if rationals.iter().all(Option::is_some) {
        return Coords::Rational(rationals.into_iter().map(Option::unwrap).collect());
    }
    let algebraic: Vec<&TorusElement> = torus
        .iter()
        .zip(&rationals)
        .filter(|(_, q)| q.is_none())
        .map(|(t, _)| t)
        .collect();
    let common_base = algebraic.iter().all(|t| t.base == algebraic[0].base);
    if common_base {
        let alpha = algebraic[0].base.clone();
        let parts = torus
            .iter()
            .zip(rationals)
            .map(|(t, q)| q.ok_or_else(|| t.exponent.clone()))
            .collect();
        return Coords::Power { alpha, parts };
    }
    if algebraic.iter().all(|t| t.base.is_root_of_unity()) {
        // zeta_n^k = zeta_L^(k L / n) with L the lcm of the orders.
        let orders: Vec<u64> = algebraic
            .iter()
            .map(|t| t.base.root_of_unity_order().unwrap())
            .collect();
        let l = orders
            .iter()
            .fold(1u64, |acc, &n| acc / crate::numeric::gcd_u64(acc, n) * n);
        if let Ok(alpha) = AlgebraicNumber::root_of_unity(l, 1) {
            let parts = torus
                .iter()
                .zip(rationals)
                .map(|(t, q)| match q {
                    Some(q) => Ok(q),
                    None => {
                        let n = t.base.root_of_unity_order().unwrap();
                        let k = unity_index(&t.base, n) * (l / n);
                        Err(&t.exponent * BigInt::from(k))
                    }
                })
                .collect();
            return Coords::Power { alpha, parts };
        }
    }
    Coords::Numeric
}

fn equation_membership(
    eq: &BTreeMap<Monomial, BigRational>,
    ec: &ECPoint,
    torus: &[TorusElement],
    coords: &Coords,
) -> Membership {
    let (ex, ey) = match ec {
        ECPoint::Affine { x, y } => (x, y),
        ECPoint::Infinity => {
            if eq.keys().any(|m| m[0] != 0 || m[1] != 0) {
                return Membership::ExactNo;
            }
            // Only torus variables: substitute x = y = 0 harmlessly.
            return torus_membership(eq, &BigRational::zero(), &BigRational::zero(), torus, coords);
        }
    };
    torus_membership(eq, ex, ey, torus, coords)
}

fn rational_pow(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

fn torus_membership(
    eq: &BTreeMap<Monomial, BigRational>,
    ex: &BigRational,
    ey: &BigRational,
    torus: &[TorusElement],
    coords: &Coords,
) -> Membership {
    let ec_factor = |m: &Monomial| rational_pow(ex, m[0]) * rational_pow(ey, m[1]);
    match coords {
        Coords::Rational(qs) => {
            let mut total = BigRational::zero();
            for (m, c) in eq {
                let mut term = c * ec_factor(m);
                for (q, &k) in qs.iter().zip(&m[2..]) {
                    term *= rational_pow(q, k);
                }
                total += term;
            }
            if total.is_zero() {
                Membership::ExactYes
            } else {
                Membership::ExactNo
            }
        }
        Coords::Power { alpha, parts } => {
            let mut laurent: BTreeMap<BigInt, BigRational> = BTreeMap::new();
            for (m, c) in eq {
                let mut coeff = c * ec_factor(m);
                let mut power = BigInt::zero();
                for (part, &k) in parts.iter().zip(&m[2..]) {
                    match part {
                        Ok(q) => coeff *= rational_pow(q, k),
                        Err(e) => power += e * BigInt::from(k),
                    }
                }
                *laurent.entry(power).or_insert_with(BigRational::zero) += coeff;
            }
            laurent.retain(|_, c| !c.is_zero());
            if laurent.is_empty() {
                return Membership::ExactYes;
            }
            let lo = laurent.keys().next().unwrap().clone();
            let hi = laurent.keys().next_back().unwrap().clone();
            let span = (&hi - &lo).to_i64().unwrap_or(i64::MAX);
            if span > MAX_SPAN {
                return numeric_membership(eq, ex, ey, torus);
            }
            let mut coeffs = vec![BigRational::zero(); span as usize + 1];
            for (p, c) in laurent {
                let i = (p - &lo).to_usize().unwrap();
                coeffs[i] = c;
            }
            let poly = IntPolynomial::from_rational_coeffs(&coeffs);
            if poly.divisible_over_q(alpha.minpoly()) {
                Membership::ExactYes
            } else {
                Membership::ExactNo
            }
        }
        Coords::Numeric => numeric_membership(eq, ex, ey, torus),
    }
}

/// Complex disk `(center, radius)`.
#[derive(Clone, Copy)]
struct Disk(Complex64, f64);

impl Disk {
    fn mul(self, o: Disk) -> Disk {
        let c = self.0 * o.0;
        let r = self.0.norm() * o.1 + o.0.norm() * self.1 + self.1 * o.1;
        Disk(c, r + 4.0 * f64::EPSILON * c.norm())
    }

    fn add(self, o: Disk) -> Disk {
        let c = self.0 + o.0;
        Disk(c, self.1 + o.1 + 2.0 * f64::EPSILON * c.norm())
    }
}

fn numeric_membership(
    eq: &BTreeMap<Monomial, BigRational>,
    ex: &BigRational,
    ey: &BigRational,
    torus: &[TorusElement],
) -> Membership {
    let mut disks = Vec::with_capacity(torus.len());
    for t in torus {
        let base = TorusElement {
            base: t.base.clone(),
            exponent: BigInt::one(),
        };
        match (base.approx_disk(), t.exponent.to_i64()) {
            (Some(d), Some(e)) => disks.push((Disk(d.0, d.1), e)),
            _ => {
                return Membership::NumericYes {
                    residual: f64::INFINITY,
                }
            }
        }
    }
    let mut total = Disk(Complex64::new(0.0, 0.0), 0.0);
    for (m, c) in eq {
        let cv = rational_to_f64(&(c * rational_pow(ex, m[0]) * rational_pow(ey, m[1])));
        let mut term = Disk(Complex64::new(cv, 0.0), 2.0 * f64::EPSILON * cv.abs());
        for (&(d, e), &k) in disks.iter().zip(&m[2..]) {
            let power = e * k;
            let Some(pd) = disk_pow(d, power) else {
                return Membership::NumericYes {
                    residual: f64::INFINITY,
                };
            };
            term = term.mul(pd);
        }
        total = total.add(term);
    }
    let residual = total.0.norm();
    if residual > total.1 {
        Membership::NumericNo { residual }
    } else {
        Membership::NumericYes { residual }
    }
}

fn disk_pow(d: Disk, k: i64) -> Option<Disk> {
    let d = if k < 0 {
        let m = d.0.norm();
        if m <= d.1 {
            return None;
        }
        Disk(d.0.inv(), d.1 / (m * (m - d.1)))
    } else {
        d
    };
    let n = k.unsigned_abs();
    if n > 1 << 16 {
        return None;
    }
    let mut acc = Disk(Complex64::new(1.0, 0.0), 0.0);
    let mut base = d;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(base);
        }
        base = base.mul(base);
        e >>= 1;
    }
    Some(acc)
}

impl Membership {
    pub fn residual(&self) -> Option<f64> {
        match self {
            Membership::NumericYes { residual } | Membership::NumericNo { residual } => Some(*residual),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(json: &str) -> CurveRelation {
        serde_json::from_str(json).unwrap()
    }

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn pt(ec: ECPoint, torus: Vec<TorusElement>) -> SemiabelianPoint {
        SemiabelianPoint { ec, torus }
    }

    #[test]
    fn rational_examples() {
        let t_is_one = rel(r#"{"equations": [{"0,0,1": 1, "0,0,0": -1}]}"#);
        let x = pt(ECPoint::from_i64(3, 5), vec![TorusElement::one()]);
        assert_eq!(curve_membership(&t_is_one, &x).unwrap(), Membership::ExactYes);
        let x_is_t_plus_1 = rel(r#"{"equations": [{"1,0,0": 1, "0,0,1": -1, "0,0,0": -1}]}"#);
        let x = pt(ECPoint::from_i64(2, 3), vec![TorusElement::one()]);
        assert_eq!(curve_membership(&x_is_t_plus_1, &x).unwrap(), Membership::ExactYes);
        let x = pt(ECPoint::from_i64(0, 1), vec![TorusElement::one()]);
        assert_eq!(curve_membership(&x_is_t_plus_1, &x).unwrap(), Membership::ExactNo);
    }

    #[test]
    fn divisibility_examples() {
        let t_is_two = rel(r#"{"equations": [{"0,0,1": 1, "0,0,0": -2}]}"#);
        let s2 = TorusElement::from_base(AlgebraicNumber::radical(&q("2"), 2).unwrap()).unwrap();
        let x = pt(ECPoint::Infinity, vec![s2.clone()]);
        assert_eq!(curve_membership(&t_is_two, &x).unwrap(), Membership::ExactNo);
        // t^2 = 2 holds for sqrt 2, and for (sqrt 2)^1 written with exponent.
        let t_sq = rel(r#"{"equations": [{"0,0,2": 1, "0,0,0": -2}]}"#);
        assert_eq!(curve_membership(&t_sq, &x).unwrap(), Membership::ExactYes);
        // (2^(1/8))^4 satisfies t = sqrt 2 ... i.e. t^2 = 2 with t = alpha^4.
        let r8 = AlgebraicNumber::radical(&q("2"), 8).unwrap();
        let x = pt(ECPoint::Infinity, vec![TorusElement::new(r8, BigInt::from(4)).unwrap()]);
        assert_eq!(curve_membership(&t_sq, &x).unwrap(), Membership::ExactYes);
        // negative exponents: t^-1 = 1/2 at t = 2.
        let inv = rel(r#"{"equations": [{"0,0,-1": 2, "0,0,0": -1}]}"#);
        let x = pt(ECPoint::Infinity, vec![TorusElement::rational(&q("2"))]);
        assert_eq!(curve_membership(&inv, &x).unwrap(), Membership::ExactYes);
    }

    #[test]
    fn roots_of_unity_with_different_orders() {
        // t1^4 t2^3 = 1 at (zeta_3, zeta_4): zeta_3^4 zeta_4^3 = zeta_12^(16 + 9) = zeta_12.
        let r = rel(r#"{"equations": [{"0,0,4,3": 1, "0,0,0,0": -1}]}"#);
        let z3 = TorusElement::from_base(AlgebraicNumber::root_of_unity(3, 1).unwrap()).unwrap();
        let z4 = TorusElement::from_base(AlgebraicNumber::root_of_unity(4, 1).unwrap()).unwrap();
        let x = pt(ECPoint::Infinity, vec![z3.clone(), z4.clone()]);
        assert_eq!(curve_membership(&r, &x).unwrap(), Membership::ExactNo);
        let r = rel(r#"{"equations": [{"0,0,3,4": 1, "0,0,0,0": -1}]}"#);
        assert_eq!(curve_membership(&r, &x).unwrap(), Membership::ExactYes);
    }

    #[test]
    fn numeric_fallback() {
        let s2 = TorusElement::from_base(AlgebraicNumber::radical(&q("2"), 2).unwrap()).unwrap();
        let s3 = TorusElement::from_base(AlgebraicNumber::radical(&q("3"), 2).unwrap()).unwrap();
        let x = pt(ECPoint::Infinity, vec![s2, s3]);
        let yes = rel(r#"{"equations": [{"0,0,2,2": 1, "0,0,0,0": -6}]}"#);
        assert!(matches!(
            curve_membership(&yes, &x).unwrap(),
            Membership::NumericYes { .. }
        ));
        let no = rel(r#"{"equations": [{"0,0,1,1": 1, "0,0,0,0": -6}]}"#);
        assert!(matches!(
            curve_membership(&no, &x).unwrap(),
            Membership::NumericNo { .. }
        ));
    }

    #[test]
    fn identity_point_and_elliptic_variables() {
        let r = rel(r#"{"equations": [{"1,0,0": 1}]}"#);
        let x = pt(ECPoint::Infinity, vec![TorusElement::one()]);
        assert_eq!(curve_membership(&r, &x).unwrap(), Membership::ExactNo);
    }

    #[test]
    fn conjunction_of_equations() {
        let r = rel(r#"{"equations": [{"0,0,1": 1, "0,0,0": -1}, {"1,0,0": 1, "0,0,0": -2}]}"#);
        let x = pt(ECPoint::from_i64(2, 3), vec![TorusElement::one()]);
        assert_eq!(curve_membership(&r, &x).unwrap(), Membership::ExactYes);
        let x = pt(ECPoint::from_i64(0, 1), vec![TorusElement::one()]);
        assert_eq!(curve_membership(&r, &x).unwrap(), Membership::ExactNo);
    }

    #[test]
    fn invalid_relations() {
        assert!(serde_json::from_str::<CurveRelation>(r#"{"equations": []}"#).is_err());
        assert!(serde_json::from_str::<CurveRelation>(r#"{"equations": [{"0,0,1": 0}]}"#).is_err());
        assert!(serde_json::from_str::<CurveRelation>(r#"{"equations": [{"0,0,1": 1, "0,0": 1}]}"#).is_err());
        assert!(serde_json::from_str::<CurveRelation>(r#"{"equations": [{"-1,0,1": 1}]}"#).is_err());
        let r = rel(r#"{"equations": [{"0,0,1": "1/2", "0,0,0": -1}]}"#);
        let back: CurveRelation = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
