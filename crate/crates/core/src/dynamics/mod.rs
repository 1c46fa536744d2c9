//! Height-expanding self-maps and the N-function.
//!
//! A [`HeightedSystem`] is a power map `x -> x^m` on a torus, the
//! multiplication map `[m]` on an elliptic curve, or both componentwise on
//! `E x G_m^n`, together with the height `h~ = s h + delta` and the
//! expansion parameters `(r, M, c)` of condition (*):
//! `h~(z) > M  =>  h~(f^r z) > c h~(z)`.
//!
//! Orbits are never materialised for heights. The identities
//! `h(a^k) = |k| h(a)` and `h^([k] P) = k^2 h^(P)` give every orbit height
//! from the height of the starting point, with the error scaled alongside.
//! Any comparison against `M` that the error bound cannot decide is reported
//! as inconclusive.

mod compare;
mod scenario;
mod star;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{
    check_prop1, check_prop2, check_prop3, check_prop4, classify_small_sequence, derive_prop1_params,
    empirical_height_comparison, HeightComparison, Prop1Report, Prop2Report, Prop3Report, Prop4Report, Psi,
    SampleCheck, SequenceEntry, SequenceReport, COMPARISON_MARGIN,
};
pub use scenario::{PropReport, PropScenario, SampleSpec, BUILTIN_SCENARIOS};
pub use star::{verify_star, StarOutcome, StarReport, StarSample};

use crate::algebraic::AlgebraicError;
use crate::elliptic::{ECPoint, EllipticCurveQ, EllipticError};
use crate::semiabelian::{HeightValue, SemiabelianError, SemiabelianPoint};

/// Iteration cap used when none is given.
pub const DEFAULT_CAP: u32 = 64;

/// Tolerance for canonical heights when the system does not set one.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("point outside the system's domain: {0}")]
    DomainMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty sample")]
    EmptySample,
    #[error("maps do not commute: {0}")]
    NonCommuting(String),
    #[error("psi does not intertwine the maps: {0}")]
    NonIntertwining(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Semiabelian(#[from] SemiabelianError),
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
}

type Result<T> = std::result::Result<T, DynamicsError>;

/// Parameters `(r, M, c)` of condition (*).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StarRepr", into = "StarRepr")]
pub struct StarParams {
    pub r: u32,
    pub big_m: f64,
    pub c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StarRepr {
    r: u32,
    #[serde(rename = "M", serialize_with = "crate::format::ser12")]
    big_m: f64,
    #[serde(serialize_with = "crate::format::ser12")]
    c: f64,
}

impl StarParams {
    pub fn new(r: u32, big_m: f64, c: f64) -> Result<Self> {
        if r < 1 {
            return Err(DynamicsError::InvalidSystem(format!("r must be >= 1, got {r}")));
        }
        if !(big_m > 0.0) || !big_m.is_finite() {
            return Err(DynamicsError::InvalidSystem(format!("M must be > 0, got {big_m}")));
        }
        if !(c > 1.0) || !c.is_finite() {
            return Err(DynamicsError::InvalidSystem(format!("c must be > 1, got {c}")));
        }
        Ok(StarParams { r, big_m, c })
    }
}

impl TryFrom<StarRepr> for StarParams {
    type Error = DynamicsError;

    fn try_from(s: StarRepr) -> Result<Self> {
        StarParams::new(s.r, s.big_m, s.c)
    }
}

impl From<StarParams> for StarRepr {
    fn from(s: StarParams) -> Self {
        StarRepr {
            r: s.r,
            big_m: s.big_m,
            c: s.c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Torus,
    Elliptic,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    /// `x -> x^m` on each torus coordinate.
    Power,
    /// `P -> [m] P` on the curve.
    Mult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDescriptor {
    pub kind: MapKind,
    pub m: u32,
}

/// System descriptor as read from JSON, before the shift default is applied.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub domain: Domain,
    pub map: MapDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    pub star: StarParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<EllipticCurveQ>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl SystemSpec {
    /// Validates the descriptor, using `default_shift` when no shift is given.
    pub fn resolve(&self, default_shift: f64) -> Result<HeightedSystem> {
        let sys = HeightedSystem {
            domain: self.domain,
            map: self.map,
            shift: self.shift.unwrap_or(default_shift),
            star: self.star,
            curve: self.curve.clone(),
            height_scale: self.height_scale.unwrap_or(1.0),
            tol: self.tol.unwrap_or(DEFAULT_TOL),
        };
        sys.validate()?;
        Ok(sys)
    }
}

/// A self-map with its height `h~ = height_scale * h + shift` and the
/// parameters of condition (*).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemSpec", into = "SystemSpec")]
pub struct HeightedSystem {
    pub domain: Domain,
    pub map: MapDescriptor,
    pub shift: f64,
    pub star: StarParams,
    pub curve: Option<EllipticCurveQ>,
    pub height_scale: f64,
    pub tol: f64,
}

impl TryFrom<SystemSpec> for HeightedSystem {
    type Error = DynamicsError;

    fn try_from(s: SystemSpec) -> Result<Self> {
        s.resolve(0.0)
    }
}

impl From<HeightedSystem> for SystemSpec {
    fn from(s: HeightedSystem) -> Self {
        SystemSpec {
            domain: s.domain,
            map: s.map,
            shift: Some(s.shift),
            star: s.star,
            curve: s.curve,
            height_scale: Some(s.height_scale),
            tol: Some(s.tol),
        }
    }
}

impl HeightedSystem {
    /// `x -> x^m` on a torus with the Weil height shifted by `shift`.
    pub fn torus_power(m: u32, shift: f64, star: StarParams) -> Result<Self> {
        let sys = HeightedSystem {
            domain: Domain::Torus,
            map: MapDescriptor {
                kind: MapKind::Power,
                m,
            },
            shift,
            star,
            curve: None,
            height_scale: 1.0,
            tol: DEFAULT_TOL,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// `P -> [m] P` with the canonical height shifted by `shift`.
    pub fn elliptic_mult(curve: EllipticCurveQ, m: u32, shift: f64, star: StarParams) -> Result<Self> {
        let sys = HeightedSystem {
            domain: Domain::Elliptic,
            map: MapDescriptor { kind: MapKind::Mult, m },
            shift,
            star,
            curve: Some(curve),
            height_scale: 1.0,
            tol: DEFAULT_TOL,
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(DynamicsError::InvalidSystem(s));
        if self.map.m < 2 {
            return bad(format!("map exponent must be >= 2, got {}", self.map.m));
        }
        match (self.domain, self.map.kind) {
            (Domain::Torus, MapKind::Mult) => return bad("torus maps are power maps".into()),
            (Domain::Elliptic, MapKind::Power) => return bad("elliptic maps are multiplication maps".into()),
            _ => {}
        }
        if self.domain != Domain::Torus && self.curve.is_none() {
            return bad("elliptic and product domains need a curve".into());
        }
        if self.domain == Domain::Torus && self.curve.is_some() {
            return bad("torus domain takes no curve".into());
        }
        if !(self.shift >= 0.0) || !self.shift.is_finite() {
            return bad(format!("shift must be >= 0, got {}", self.shift));
        }
        if !(self.height_scale > 0.0) || !self.height_scale.is_finite() {
            return bad(format!("height scale must be > 0, got {}", self.height_scale));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance must be > 0, got {}", self.tol));
        }
        Ok(())
    }

    pub fn with_star(&self, star: StarParams) -> Self {
        HeightedSystem { star, ..self.clone() }
    }

    pub fn with_shift(&self, shift: f64) -> Result<Self> {
        let s = HeightedSystem { shift, ..self.clone() };
        s.validate()?;
        Ok(s)
    }

    /// Factor by which one application of the map multiplies the torus and
    /// elliptic parts of the height.
    fn growth(&self) -> (f64, f64) {
        let m = self.map.m as f64;
        (m, m * m)
    }

    /// Whether `z` lies in the domain (coordinate shape and curve membership).
    pub fn check_point(&self, z: &SemiabelianPoint) -> Result<()> {
        let bad = |s: &str| Err(DynamicsError::DomainMismatch(format!("{z}: {s}")));
        match self.domain {
            Domain::Torus => {
                if !z.ec.is_identity() {
                    return bad("torus points have no elliptic component");
                }
                if z.torus.is_empty() {
                    return bad("torus points need at least one coordinate");
                }
            }
            Domain::Elliptic => {
                if !z.torus.is_empty() {
                    return bad("elliptic points have no torus coordinates");
                }
            }
            Domain::Product => {}
        }
        if let Some(c) = &self.curve {
            if !c.contains(&z.ec) {
                return bad("not on the curve");
            }
        }
        if z.torus.iter().any(|t| t.base.is_zero()) {
            return bad("torus coordinate is zero");
        }
        Ok(())
    }

    /// `f(z)`, computed exactly.
    pub fn apply(&self, z: &SemiabelianPoint) -> Result<SemiabelianPoint> {
        self.check_point(z)?;
        let m = BigInt::from(self.map.m);
        let ec = match &self.curve {
            Some(c) => c.mul(&m, &z.ec)?,
            None => ECPoint::Infinity,
        };
        Ok(SemiabelianPoint {
            ec,
            torus: z.torus.iter().map(|t| t.power(&m)).collect(),
        })
    }

    /// Unshifted, unscaled height `h(z)` directly from the point.
    pub fn base_height(&self, z: &SemiabelianPoint) -> Result<HeightValue> {
        let (t, e) = self.split_height(z)?;
        Ok(HeightValue {
            value: t.value + e.value,
            error: t.error + e.error,
        })
    }

    /// `h~(z) = s h(z) + delta`.
    pub fn shifted_height(&self, z: &SemiabelianPoint) -> Result<HeightValue> {
        Ok(Orbit::new(self, z, 0)?.height_at(0).into())
    }

    fn split_height(&self, z: &SemiabelianPoint) -> Result<(HeightValue, HeightValue)> {
        self.check_point(z)?;
        let mut t = HeightValue { value: 0.0, error: 0.0 };
        for x in &z.torus {
            let (h, e) = x.height_with_error();
            t.value += h;
            t.error += e;
        }
        let e = match &self.curve {
            Some(c) if !z.ec.is_identity() => canonical_height_cached(c, &z.ec, self.tol)?,
            _ => HeightValue { value: 0.0, error: 0.0 },
        };
        Ok((t, e))
    }
}

type CanonKey = (EllipticCurveQ, ECPoint, u64);

/// Canonical heights are the expensive part of every check and the same
/// sample is evaluated by several of them, so results are memoised.
fn canonical_height_cached(c: &EllipticCurveQ, p: &ECPoint, tol: f64) -> Result<HeightValue> {
    static CACHE: OnceLock<Mutex<HashMap<CanonKey, HeightValue>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (c.clone(), p.clone(), tol.to_bits());
    if let Some(h) = cache.lock().expect("height cache").get(&key) {
        return Ok(*h);
    }
    let h = c.canonical_height(p, tol)?;
    let h = HeightValue {
        value: h.value,
        error: h.error,
    };
    let mut guard = cache.lock().expect("height cache");
    if guard.len() > 4096 {
        guard.clear();
    }
    guard.insert(key, h);
    Ok(h)
}

/// Shifted height with a certified enclosure `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Enclosure {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl From<Enclosure> for HeightValue {
    fn from(e: Enclosure) -> Self {
        HeightValue {
            value: e.value,
            error: ((e.hi - e.value).max(e.value - e.lo)).max(0.0),
        }
    }
}

/// Orbit data of `z`: component heights of `z` and, for preperiodic points,
/// the first step at which the orbit repeats.
pub(crate) struct Orbit<'a> {
    sys: &'a HeightedSystem,
    torus: HeightValue,
    elliptic: HeightValue,
    repeat: Option<u32>,
}

impl<'a> Orbit<'a> {
    /// Looks for a repeat among `f^0 z, ..., f^limit z`.
    pub fn new(sys: &'a HeightedSystem, z: &SemiabelianPoint, limit: u32) -> Result<Self> {
        let (torus, elliptic) = sys.split_height(z)?;
        let repeat = residue_moduli(sys, z).and_then(|moduli| first_repeat(sys.map.m, &moduli, limit));
        Ok(Orbit {
            sys,
            torus,
            elliptic,
            repeat,
        })
    }

    /// `h~(f^j z)` from the scaling identities.
    pub fn height_at(&self, j: u32) -> Enclosure {
        let (gt, ge) = self.sys.growth();
        let j = j as i32;
        let (ft, fe) = (gt.powi(j), ge.powi(j));
        let s = self.sys.height_scale;
        let d = self.sys.shift;
        let comb = |t: f64, e: f64| {
            let mut v = d;
            if t != 0.0 {
                v += s * ft * t;
            }
            if e != 0.0 {
                v += s * fe * e;
            }
            v
        };
        let value = comb(self.torus.value, self.elliptic.value);
        let lo = comb(
            (self.torus.value - self.torus.error).max(0.0),
            (self.elliptic.value - self.elliptic.error).max(0.0),
        );
        let hi = comb(
            self.torus.value + self.torus.error,
            self.elliptic.value + self.elliptic.error,
        );
        Enclosure { value, lo, hi }
    }

    /// Torus and elliptic parts of `s h(z)` as intervals `(lo, hi)`.
    pub fn parts(&self) -> [(f64, f64); 2] {
        let s = self.sys.height_scale;
        let iv = |h: HeightValue| (s * (h.value - h.error).max(0.0), s * (h.value + h.error));
        [iv(self.torus), iv(self.elliptic)]
    }
}

/// For a point with finite orbit, the moduli describing it: the order of the
/// elliptic component and, per torus coordinate, the order of the base with
/// the exponent reduced. `None` if some component has infinite order.
fn residue_moduli(sys: &HeightedSystem, z: &SemiabelianPoint) -> Option<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    if let Some(c) = &sys.curve {
        let n = c.is_torsion(&z.ec)? as u64;
        out.push((1 % n, n));
    }
    for t in &z.torus {
        if t.exponent.is_zero() {
            out.push((0, 1));
            continue;
        }
        let n = t.base.root_of_unity_order()?;
        let nb = BigInt::from(n);
        let e = ((&t.exponent % &nb) + &nb) % &nb;
        out.push((e.to_u64().expect("residue fits"), n));
    }
    Some(out)
}

/// First `j` in `1..=limit` with `f^j z = f^i z` for some `i < j`.
fn first_repeat(m: u32, moduli: &[(u64, u64)], limit: u32) -> Option<u32> {
    let mut seen: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut cur: Vec<u64> = moduli.iter().map(|&(e, _)| e).collect();
    seen.insert(cur.clone(), 0);
    for j in 1..=limit {
        for (x, &(_, n)) in cur.iter_mut().zip(moduli) {
            *x = ((*x as u128 * m as u128) % n as u128) as u64;
        }
        if seen.contains_key(&cur) {
            return Some(j);
        }
        seen.insert(cur.clone(), j);
    }
    None
}

/// Value of the N-function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NValue {
    /// `h~(f^n z) > M` and `h~(f^j z) <= M` for `1 <= j < n`.
    Finite { n: u32 },
    /// Finite orbit that never exceeds `M`: `N = infinity`.
    Preperiodic,
    /// No exceedance and no repeat within `cap` steps: `N > cap`.
    CapExceeded { cap: u32 },
    /// `h~(f^step z)` is within its error bound of `M`; `N >= step`.
    Inconclusive { step: u32 },
}

impl NValue {
    /// Certified range `[lo, hi]` of `N`, with `u64::MAX` for infinity.
    pub fn range(&self) -> (u64, u64) {
        match *self {
            NValue::Finite { n } => (n as u64, n as u64),
            NValue::Preperiodic => (u64::MAX, u64::MAX),
            NValue::CapExceeded { cap } => (cap as u64 + 1, u64::MAX),
            NValue::Inconclusive { step } => (step as u64, u64::MAX),
        }
    }

    pub fn finite(&self) -> Option<u32> {
        match *self {
            NValue::Finite { n } => Some(n),
            _ => None,
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self, NValue::Finite { .. } | NValue::Preperiodic)
    }
}

impl std::fmt::Display for NValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NValue::Finite { n } => write!(f, "{n}"),
            NValue::Preperiodic => write!(f, "preperiodic"),
            NValue::CapExceeded { cap } => write!(f, "> {cap} (cap exceeded)"),
            NValue::Inconclusive { step } => write!(f, "inconclusive at step {step}"),
        }
    }
}

/// The N-function together with the shifted heights `h~(f^j z)`, `j >= 1`,
/// that were evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NTrace {
    pub value: NValue,
    #[serde(serialize_with = "crate::format::ser12")]
    pub shift: f64,
    pub heights: Vec<HeightValue>,
}

fn check_cap(cap: u32) -> Result<()> {
    if cap < 1 {
        return Err(DynamicsError::InvalidArgument("cap must be >= 1".into()));
    }
    Ok(())
}

/// `N(z)` with the evaluated orbit heights.
pub fn n_trace(sys: &HeightedSystem, z: &SemiabelianPoint, cap: u32) -> Result<NTrace> {
    check_cap(cap)?;
    let orbit = Orbit::new(sys, z, cap)?;
    let m = sys.star.big_m;
    let mut heights = Vec::new();
    let mut value = NValue::CapExceeded { cap };
    for j in 1..=cap {
        let h = orbit.height_at(j);
        heights.push(h.into());
        if h.lo > m {
            value = NValue::Finite { n: j };
            break;
        }
        if h.hi > m {
            value = NValue::Inconclusive { step: j };
            break;
        }
        // Once the orbit has closed up, every later point was already seen.
        if orbit.repeat.is_some_and(|p| j >= p) {
            value = NValue::Preperiodic;
            break;
        }
    }
    Ok(NTrace {
        value,
        shift: sys.shift,
        heights,
    })
}

/// Smallest `N >= 1` with `h~(f^N z) > M`.
pub fn n_function(sys: &HeightedSystem, z: &SemiabelianPoint, cap: u32) -> Result<NValue> {
    Ok(n_trace(sys, z, cap)?.value)
}

/// Whether the orbit of `z` repeats within `cap` steps (exact).
pub fn is_preperiodic(sys: &HeightedSystem, z: &SemiabelianPoint, cap: u32) -> Result<bool> {
    check_cap(cap)?;
    Ok(Orbit::new(sys, z, cap)?.repeat.is_some())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NBall {
    In,
    Out,
    Inconclusive,
}

/// Membership in `{z : N(z) > 1/eps}`.
pub fn n_ball_membership(sys: &HeightedSystem, z: &SemiabelianPoint, eps: f64, cap: u32) -> Result<NBall> {
    if !(eps > 0.0) {
        return Err(DynamicsError::InvalidArgument(format!("eps must be > 0, got {eps}")));
    }
    let threshold = 1.0 / eps;
    let (lo, hi) = n_function(sys, z, cap)?.range();
    let as_f = |n: u64| if n == u64::MAX { f64::INFINITY } else { n as f64 };
    Ok(if as_f(lo) > threshold {
        NBall::In
    } else if as_f(hi) <= threshold {
        NBall::Out
    } else {
        NBall::Inconclusive
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{AlgebraicNumber, TorusElement};
    use crate::numeric::parse_rational;

    pub(crate) fn torus_sys(m: u32, shift: f64, big_m: f64, c: f64) -> HeightedSystem {
        HeightedSystem::torus_power(m, shift, StarParams::new(1, big_m, c).unwrap()).unwrap()
    }

    pub(crate) fn rad(r: &str, n: u32) -> SemiabelianPoint {
        let a = AlgebraicNumber::radical(&parse_rational(r).unwrap(), n).unwrap();
        SemiabelianPoint::torus_only(vec![TorusElement::from_base(a).unwrap()])
    }

    pub(crate) fn zeta(n: u64, k: u64) -> SemiabelianPoint {
        let a = AlgebraicNumber::root_of_unity(n, k).unwrap();
        SemiabelianPoint::torus_only(vec![TorusElement::from_base(a).unwrap()])
    }

    #[test]
    fn n_function_examples() {
        let s = torus_sys(2, 0.0, 0.5, 1.5);
        assert_eq!(n_function(&s, &rad("2", 1), 64).unwrap(), NValue::Finite { n: 1 });
        assert_eq!(n_function(&s, &rad("2", 8), 64).unwrap(), NValue::Finite { n: 3 });
        assert_eq!(n_function(&s, &zeta(5, 1), 64).unwrap(), NValue::Preperiodic);
        assert_eq!(n_function(&s, &zeta(5, 1), 2).unwrap(), NValue::CapExceeded { cap: 2 });
        assert!(n_function(&s, &rad("2", 1), 0).is_err());
    }

    #[test]
    fn trace_agrees_with_direct_heights() {
        let s = torus_sys(2, 0.0, 0.5, 1.5);
        let z = rad("2", 8);
        let t = n_trace(&s, &z, 64).unwrap();
        let n = t.value.finite().unwrap() as usize;
        assert_eq!(t.heights.len(), n);
        let mut w = z.clone();
        for (j, h) in t.heights.iter().enumerate() {
            w = s.apply(&w).unwrap();
            let direct = s.shifted_height(&w).unwrap();
            assert!((direct.value - h.value).abs() < 1e-12);
            assert_eq!(direct.value > 0.5, j + 1 == n);
        }
    }

    #[test]
    fn shift_can_make_torsion_exceed() {
        let s = torus_sys(2, 1.0, 0.5, 1.5);
        assert_eq!(n_function(&s, &zeta(5, 1), 64).unwrap(), NValue::Finite { n: 1 });
    }

    #[test]
    fn preperiodicity() {
        let s = torus_sys(2, 0.0, 0.5, 1.5);
        assert!(is_preperiodic(&s, &zeta(5, 2), 64).unwrap());
        assert!(is_preperiodic(&s, &zeta(12, 5), 64).unwrap());
        for cap in [1, 10, 200] {
            assert!(!is_preperiodic(&s, &rad("2", 1), cap).unwrap());
        }
        // 2 has order 4 modulo 5: zeta_5 -> zeta_5^2 -> ^4 -> ^3 -> zeta_5.
        assert!(!is_preperiodic(&s, &zeta(5, 1), 3).unwrap());
        assert!(is_preperiodic(&s, &zeta(5, 1), 4).unwrap());

        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        let es = HeightedSystem::elliptic_mult(e.clone(), 2, 0.0, StarParams::new(1, 0.5, 3.0).unwrap()).unwrap();
        let p = SemiabelianPoint {
            ec: ECPoint::from_i64(2, 3),
            torus: vec![],
        };
        assert!(is_preperiodic(&es, &p, 64).unwrap());
        assert_eq!(n_function(&es, &p, 64).unwrap(), NValue::Preperiodic);
        // The exact orbit of the 6-torsion point repeats as predicted.
        let mut w = p.clone();
        let mut pts = vec![w.clone()];
        for _ in 0..3 {
            w = es.apply(&w).unwrap();
            pts.push(w.clone());
        }
        // P -> 2P -> 4P -> 8P = 2P.
        assert_eq!(pts[3], pts[1]);
        assert_ne!(pts[2], pts[1]);
    }

    #[test]
    fn elliptic_n_function() {
        let e = EllipticCurveQ::from_i64(0, -2).unwrap();
        let es = HeightedSystem::elliptic_mult(e, 2, 0.0, StarParams::new(1, 10.0, 3.0).unwrap()).unwrap();
        let p = SemiabelianPoint {
            ec: ECPoint::from_i64(3, 5),
            torus: vec![],
        };
        // h^(3,5) = 1.3496: 4 h = 5.40, 16 h = 21.6.
        assert_eq!(n_function(&es, &p, 64).unwrap(), NValue::Finite { n: 2 });
        let bad = SemiabelianPoint {
            ec: ECPoint::from_i64(3, 4),
            torus: vec![],
        };
        assert!(matches!(
            n_function(&es, &bad, 64),
            Err(DynamicsError::DomainMismatch(_))
        ));
    }

    #[test]
    fn boundary_is_inconclusive() {
        // h(4) = log 4 exactly at M.
        let s = torus_sys(2, 0.0, 4f64.ln(), 1.5);
        assert_eq!(
            n_function(&s, &rad("2", 1), 64).unwrap(),
            NValue::Inconclusive { step: 1 }
        );
    }

    #[test]
    fn conjugate_invariance() {
        let s = torus_sys(2, 0.0, 0.5, 1.5);
        let p = crate::algebraic::IntPolynomial::from_i64(&[-2, 0, 0, 1]);
        let ns: Vec<NValue> = (0..3)
            .map(|i| {
                let a = AlgebraicNumber::from_minpoly(p.clone(), i).unwrap();
                let z = SemiabelianPoint::torus_only(vec![TorusElement::from_base(a).unwrap()]);
                n_function(&s, &z, 64).unwrap()
            })
            .collect();
        assert!(ns.iter().all(|n| *n == ns[0]));
    }

    #[test]
    fn ball_examples() {
        let s = torus_sys(2, 0.0, 0.5, 1.5);
        assert_eq!(n_ball_membership(&s, &zeta(7, 3), 0.01, 64).unwrap(), NBall::In);
        assert_eq!(n_ball_membership(&s, &rad("2", 1), 0.5, 64).unwrap(), NBall::Out);
        assert_eq!(n_ball_membership(&s, &rad("2", 8), 0.5, 64).unwrap(), NBall::In);
        // N > cap = 2 decides membership for 1/eps <= 2, not beyond.
        assert_eq!(n_ball_membership(&s, &zeta(5, 1), 0.5, 2).unwrap(), NBall::In);
        assert_eq!(n_ball_membership(&s, &zeta(5, 1), 0.1, 2).unwrap(), NBall::Inconclusive);
        assert!(n_ball_membership(&s, &zeta(5, 1), 0.0, 2).is_err());
    }

    #[test]
    fn system_json() {
        let s: HeightedSystem = serde_json::from_str(
            r#"{"domain": "torus", "map": {"kind": "power", "m": 2}, "star": {"r": 1, "M": 0.5, "c": 1.5}}"#,
        )
        .unwrap();
        assert_eq!(s.shift, 0.0);
        let back: HeightedSystem = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        for bad in [
            r#"{"domain": "torus", "map": {"kind": "power", "m": 2}, "star": {"r": 1, "M": 0.5, "c": 1.0}}"#,
            r#"{"domain": "torus", "map": {"kind": "power", "m": 1}, "star": {"r": 1, "M": 0.5, "c": 1.5}}"#,
            r#"{"domain": "torus", "map": {"kind": "mult", "m": 2}, "star": {"r": 1, "M": 0.5, "c": 1.5}}"#,
            r#"{"domain": "elliptic", "map": {"kind": "mult", "m": 2}, "star": {"r": 1, "M": 0.5, "c": 1.5}}"#,
            r#"{"domain": "torus", "map": {"kind": "power", "m": 2}, "star": {"r": 0, "M": 0.5, "c": 1.5}}"#,
            r#"{"domain": "torus", "map": {"kind": "power", "m": 2}, "star": {"r": 1, "M": 0.5, "c": 1.5}, "extra": 1}"#,
        ] {
            assert!(serde_json::from_str::<HeightedSystem>(bad).is_err(), "{bad}");
        }
    }
}
