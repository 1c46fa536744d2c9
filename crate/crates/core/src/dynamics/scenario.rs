//! Scenario files for the comparison checks, and the shipped scenarios.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{
    check_prop1, check_prop2, check_prop3, check_prop4, DynamicsError, HeightedSystem, Prop1Report, Prop2Report,
    Prop3Report, Prop4Report, Psi, Result, SystemSpec, DEFAULT_CAP,
};
use crate::algebraic::{AlgebraicNumber, TorusElement};
use crate::elliptic::ECPoint;
use crate::numeric::{gcd_u64, parse_rational};
use crate::semiabelian::SemiabelianPoint;

/// Shift used by scenario systems that do not set one, so that heights exceed 1.
pub const SCENARIO_SHIFT: f64 = 1.0;

/// A sample point, or a family expanded against the system's domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSpec {
    Family(Family),
    Point(SemiabelianPoint),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `base^(1/n)` for `n_min <= n <= n_max` (real positive root).
    Radicals {
        base: String,
        #[serde(default = "one")]
        n_min: u32,
        n_max: u32,
    },
    /// All primitive roots of unity of the given order.
    RootsOfUnity { order: u64 },
    /// The rational torsion points of the system's curve.
    Torsion,
    /// `k P` for `1 <= k <= k_max`.
    Multiples { point: ECPoint, k_max: u32 },
}

fn one() -> u32 {
    1
}

impl SampleSpec {
    pub fn expand(&self, sys: &HeightedSystem) -> Result<Vec<SemiabelianPoint>> {
        let torus_point = |t: TorusElement| -> Result<SemiabelianPoint> {
            if sys.curve.is_some() && sys.domain == super::Domain::Elliptic {
                return Err(DynamicsError::DomainMismatch(
                    "torus family on an elliptic domain".into(),
                ));
            }
            Ok(SemiabelianPoint::torus_only(vec![t]))
        };
        let curve = || {
            sys.curve
                .as_ref()
                .ok_or_else(|| DynamicsError::DomainMismatch("elliptic family on a torus domain".into()))
        };
        let elliptic_point = |p: ECPoint| SemiabelianPoint { ec: p, torus: vec![] };
        let family = match self {
            SampleSpec::Point(p) => return Ok(vec![p.clone()]),
            SampleSpec::Family(f) => f,
        };
        match family {
            Family::Radicals { base, n_min, n_max } => {
                let q = parse_rational(base).map_err(DynamicsError::InvalidArgument)?;
                (*n_min.max(&1)..=*n_max)
                    .map(|n| torus_point(TorusElement::from_base(AlgebraicNumber::radical(&q, n)?)?))
                    .collect()
            }
            Family::RootsOfUnity { order } => (1..=*order)
                .filter(|&k| gcd_u64(k, *order) == 1)
                .map(|k| torus_point(TorusElement::from_base(AlgebraicNumber::root_of_unity(*order, k)?)?))
                .collect(),
            Family::Torsion => Ok(curve()?
                .rational_torsion_points()?
                .into_iter()
                .map(elliptic_point)
                .collect()),
            Family::Multiples { point, k_max } => {
                let c = curve()?;
                (1..=*k_max)
                    .map(|k| Ok(elliptic_point(c.mul(&BigInt::from(k), point)?)))
                    .collect()
            }
        }
    }
}

/// A comparison check: which part, the two systems, and the samples.
/// For part 3 the systems carry the maps `f` and `g`; for part 4 they are
/// `U` and `U'` and `psi` is required.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropScenario {
    pub part: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub system: SystemSpec,
    pub system_prime: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Psi>,
    pub samples: Vec<SampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum PropReport {
    Prop1(Prop1Report),
    Prop2(Prop2Report),
    Prop3(Prop3Report),
    Prop4(Prop4Report),
}

impl PropReport {
    pub fn violation_count(&self) -> usize {
        match self {
            PropReport::Prop1(r) => r.violations.len(),
            PropReport::Prop2(r) => r.violations.len(),
            PropReport::Prop3(r) => r.violations.len(),
            PropReport::Prop4(r) => r.violations.len(),
        }
    }

    pub fn sample_count(&self) -> usize {
        match self {
            PropReport::Prop1(r) => r.star.samples.len(),
            PropReport::Prop2(r) => r.samples.len(),
            PropReport::Prop3(r) => r.samples.len(),
            PropReport::Prop4(r) => r.samples.len(),
        }
    }

    pub fn inconclusive_count(&self) -> usize {
        match self {
            PropReport::Prop1(r) => r.inconclusive.len(),
            PropReport::Prop2(r) => r.inconclusive.len(),
            PropReport::Prop3(r) => r.inconclusive.len(),
            PropReport::Prop4(r) => r.inconclusive.len(),
        }
    }
}

/// Shipped scenarios by name.
pub const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    (
        "part1-scaled-height",
        include_str!("../../scenarios/part1-scaled-height.json"),
    ),
    ("part2-threshold", include_str!("../../scenarios/part2-threshold.json")),
    (
        "part2-elliptic-shift",
        include_str!("../../scenarios/part2-elliptic-shift.json"),
    ),
    (
        "part3-square-cube",
        include_str!("../../scenarios/part3-square-cube.json"),
    ),
    (
        "part4-factor-inclusion",
        include_str!("../../scenarios/part4-factor-inclusion.json"),
    ),
    ("part4-diagonal", include_str!("../../scenarios/part4-diagonal.json")),
    (
        "part4-elliptic-inclusion",
        include_str!("../../scenarios/part4-elliptic-inclusion.json"),
    ),
];

impl PropScenario {
    pub fn builtin(name: &str) -> Option<PropScenario> {
        BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| serde_json::from_str(s).expect("shipped scenario parses"))
    }

    pub fn from_json(s: &str) -> std::result::Result<PropScenario, String> {
        let sc: PropScenario = serde_json::from_str(s).map_err(|e| e.to_string())?;
        if !(1..=4).contains(&sc.part) {
            return Err(format!("part must be 1, 2, 3 or 4, got {}", sc.part));
        }
        if (sc.part == 4) != sc.psi.is_some() {
            return Err("psi is required for part 4 and only there".into());
        }
        Ok(sc)
    }

    pub fn run(&self, cap_override: Option<u32>) -> Result<PropReport> {
        let a = self.system.resolve(SCENARIO_SHIFT)?;
        let b = self.system_prime.resolve(SCENARIO_SHIFT)?;
        let cap = cap_override.or(self.cap).unwrap_or(DEFAULT_CAP);
        let mut samples = Vec::new();
        for s in &self.samples {
            samples.extend(s.expand(&a)?);
        }
        Ok(match (self.part, &self.psi) {
            (1, _) => PropReport::Prop1(check_prop1(&a, &b, &samples, cap)?),
            (2, _) => PropReport::Prop2(check_prop2(&a, &b, &samples, cap)?),
            (3, _) => PropReport::Prop3(check_prop3(&a, &b, &samples, cap)?),
            (4, Some(psi)) => PropReport::Prop4(check_prop4(psi, &a, &b, &samples, cap)?),
            _ => {
                return Err(DynamicsError::InvalidArgument(format!(
                    "part must be 1, 2, 3 or 4 (part 4 with psi), got {}",
                    self.part
                )))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenarios_pass() {
        for (name, _) in BUILTIN_SCENARIOS {
            let s = PropScenario::builtin(name).unwrap();
            let r = s.run(None).unwrap();
            assert_eq!(r.violation_count(), 0, "{name}");
            assert_eq!(r.inconclusive_count(), 0, "{name}");
        }
    }

    #[test]
    fn factor_inclusion_gives_equality() {
        let s = PropScenario::builtin("part4-factor-inclusion").unwrap();
        match s.run(None).unwrap() {
            PropReport::Prop4(r) => assert_eq!(r.equalities, r.samples.len()),
            other => panic!("unexpected report {other:?}"),
        }
    }

    #[test]
    fn corrupted_scenario_rejected() {
        let bad = include_str!("../../scenarios/corrupted-c.json");
        assert!(PropScenario::from_json(bad).is_err());
        let s = BUILTIN_SCENARIOS[0].1.replace("\"part\": 1", "\"part\": 7");
        assert!(PropScenario::from_json(&s).is_err());
    }

    #[test]
    fn families_expand() {
        let sys: HeightedSystem = serde_json::from_str(
            r#"{"domain": "elliptic", "map": {"kind": "mult", "m": 2}, "star": {"r": 1, "M": 2, "c": 2.5},
                "curve": {"a": "0", "b": "1"}}"#,
        )
        .unwrap();
        let t: SampleSpec = serde_json::from_str(r#"{"family": "torsion"}"#).unwrap();
        assert_eq!(t.expand(&sys).unwrap().len(), 6);
        let m: SampleSpec =
            serde_json::from_str(r#"{"family": "multiples", "point": {"x": "2", "y": "3"}, "k_max": 6}"#).unwrap();
        let pts = m.expand(&sys).unwrap();
        assert!(pts[5].ec.is_identity());
        let r: SampleSpec = serde_json::from_str(r#"{"family": "radicals", "base": "2", "n_max": 3}"#).unwrap();
        assert!(r.expand(&sys).is_err());
        let p: SampleSpec = serde_json::from_str(r#"{"torus": ["2"]}"#).unwrap();
        assert!(matches!(p, SampleSpec::Point(_)));
    }
}
