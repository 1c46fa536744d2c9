//! Bounded search for points of `X ∩ Gamma_eps`.
//!
//! Candidates are `x = gamma + z` with `gamma` a bounded combination of the
//! generators and `z` drawn from a declared catalog of small points
//! (rational torsion times roots of unity and radicals `r^(1/m)`). A candidate
//! is a hit when `z` is certified in `B_eps` and `x` lies on the relation.
//! This is an experiment harness: the constant `eps` of the finiteness
//! statement is not effective, so an empty result proves nothing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    ball_verdict, curve_membership, gamma_enumerate, AmbientVariety, BallVerdict, CurveRelation, HeightValue,
    Membership, SemiabelianError, SemiabelianPoint, SubgroupGamma,
};
use crate::algebraic::{AlgebraicNumber, TorusElement};
use crate::elliptic::ECPoint;
use crate::format::{fmt12, ser12};
use crate::numeric::{gcd_u64, parse_rational};

pub const DISCLAIMER: &str = "Absence of hits is not evidence of finiteness: the epsilon in the \
finiteness statement is non-effective, and this search covers only a bounded part of Gamma and a \
declared catalog of small points.";

pub const INTEGRALITY_NOTE: &str = "The relation is treated as a formal locus; geometric \
integrality of X is not verified.";

fn default_tol() -> f64 {
    1e-8
}

fn default_bound() -> u32 {
    1
}

fn default_limit() -> u128 {
    1_000_000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogConfig {
    /// Include the rational torsion of the curve (otherwise only `O`).
    #[serde(default = "default_true")]
    pub include_torsion: bool,
    /// Roots of unity of every order up to this bound (`0` or `1`: only `1`).
    #[serde(default)]
    pub roots_of_unity_max_order: u64,
    /// Rationals `r` whose roots `r^(1/m)`, `1 <= m <= radical_max_degree`, are included.
    #[serde(default)]
    pub radicals: Vec<String>,
    #[serde(default)]
    pub radical_max_degree: u32,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            include_torsion: true,
            roots_of_unity_max_order: 0,
            radicals: Vec::new(),
            radical_max_degree: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploreConfig {
    #[serde(default = "default_bound")]
    pub generator_bound: u32,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_limit")]
    pub max_candidates: u128,
    #[serde(default)]
    pub catalog: CatalogConfig,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            generator_bound: default_bound(),
            tol: default_tol(),
            max_candidates: default_limit(),
            catalog: CatalogConfig::default(),
        }
    }
}

/// Experiment description file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub ambient: AmbientVariety,
    #[serde(default)]
    pub generators: Vec<SemiabelianPoint>,
    pub relation: CurveRelation,
    pub eps: f64,
    #[serde(default)]
    pub config: ExploreConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub gamma_coefficients: Vec<i64>,
    pub gamma: SemiabelianPoint,
    pub z: SemiabelianPoint,
    pub z_label: String,
    #[serde(serialize_with = "ser12")]
    pub z_height: f64,
    #[serde(serialize_with = "ser12")]
    pub z_height_error: f64,
    pub verdict: BallVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hit {
    pub point: SemiabelianPoint,
    pub membership: Membership,
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub disclaimer: &'static str,
    pub integrality: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreReport {
    pub header: ReportHeader,
    #[serde(serialize_with = "ser12")]
    pub eps: f64,
    #[serde(serialize_with = "ser12")]
    pub tol: f64,
    pub generator_bound: u32,
    pub gamma_points: u128,
    pub catalog_elliptic: usize,
    pub catalog_torus: usize,
    pub candidates: u128,
    pub in_ball: u64,
    pub boundary: u64,
    pub unsupported: u64,
    pub hits: Vec<Hit>,
    /// Hits grouped by differences that are torsion or catalog elements.
    pub cosets: Vec<Vec<usize>>,
}

struct CatalogEntry {
    label: String,
    value: TorusElement,
    height: HeightValue,
}

struct Catalog {
    elliptic: Vec<ECPoint>,
    torus: Vec<CatalogEntry>,
}

impl Catalog {
    fn build(a: &AmbientVariety, cfg: &CatalogConfig) -> Result<Self, SemiabelianError> {
        let elliptic = if cfg.include_torsion {
            a.curve.rational_torsion_points()?
        } else {
            vec![ECPoint::Infinity]
        };
        let mut torus: Vec<CatalogEntry> = Vec::new();
        let mut push = |label: String, n: AlgebraicNumber| -> Result<(), SemiabelianError> {
            if torus.iter().any(|e| e.value.base == n) {
                return Ok(());
            }
            let value = TorusElement::from_base(n)?;
            let (h, e) = value.height_with_error();
            torus.push(CatalogEntry {
                label,
                value,
                height: HeightValue { value: h, error: e },
            });
            Ok(())
        };
        push("1".into(), AlgebraicNumber::integer(1))?;
        for n in 2..=cfg.roots_of_unity_max_order {
            for k in (1..n).filter(|&k| gcd_u64(k, n) == 1) {
                push(format!("zeta_{n}^{k}"), AlgebraicNumber::root_of_unity(n, k)?)?;
            }
        }
        for r in &cfg.radicals {
            let q = parse_rational(r).map_err(SemiabelianError::InvalidRelation)?;
            for m in 1..=cfg.radical_max_degree {
                if q.numer() < &0.into() && m % 2 == 0 {
                    continue;
                }
                push(format!("({r})^(1/{m})"), AlgebraicNumber::radical(&q, m)?)?;
            }
        }
        Ok(Catalog { elliptic, torus })
    }

    fn contains_torus(&self, t: &TorusElement) -> bool {
        match t.materialize() {
            Some(a) => self.torus.iter().any(|e| e.value.base == a),
            None => false,
        }
    }

    fn contains(&self, z: &SemiabelianPoint) -> bool {
        self.elliptic.contains(&z.ec) && z.torus.iter().all(|t| self.contains_torus(t))
    }
}

/// Runs the bounded search. Rejects search spaces above `max_candidates`.
pub fn explore_theorem(
    a: &AmbientVariety,
    g: &SubgroupGamma,
    x: &CurveRelation,
    eps: f64,
    cfg: &ExploreConfig,
) -> Result<ExploreReport, SemiabelianError> {
    if x.torus_rank() != a.torus_rank {
        return Err(SemiabelianError::InvalidRelation(format!(
            "relation has {} torus variables, ambient variety has {}",
            x.torus_rank(),
            a.torus_rank
        )));
    }
    if !(eps >= 0.0) {
        return Err(SemiabelianError::InvalidRelation(format!(
            "eps must be >= 0, got {eps}"
        )));
    }
    let catalog = Catalog::build(a, &cfg.catalog)?;
    let gamma_points = g.count(cfg.generator_bound);
    let torus_tuples = (catalog.torus.len() as u128).saturating_pow(a.torus_rank as u32);
    let estimate = gamma_points
        .saturating_mul(catalog.elliptic.len() as u128)
        .saturating_mul(torus_tuples);
    if estimate > cfg.max_candidates {
        return Err(SemiabelianError::SearchSpace {
            estimate,
            limit: cfg.max_candidates,
        });
    }

    let mut report = ExploreReport {
        header: ReportHeader {
            disclaimer: DISCLAIMER,
            integrality: INTEGRALITY_NOTE,
        },
        eps,
        tol: cfg.tol,
        generator_bound: cfg.generator_bound,
        gamma_points,
        catalog_elliptic: catalog.elliptic.len(),
        catalog_torus: catalog.torus.len(),
        candidates: estimate,
        in_ball: 0,
        boundary: 0,
        unsupported: 0,
        hits: Vec::new(),
        cosets: Vec::new(),
    };
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let n = a.torus_rank;
    let small: Vec<(SemiabelianPoint, String, HeightValue)> = small_points(&catalog, n);

    for (coeffs, gamma) in gamma_enumerate(a, g, cfg.generator_bound) {
        for (z, label, h) in &small {
            let verdict = ball_verdict(*h, eps);
            match verdict {
                BallVerdict::Out => continue,
                BallVerdict::Boundary => {
                    report.boundary += 1;
                    continue;
                }
                BallVerdict::In => report.in_ball += 1,
            }
            let x_pt = match a.add(&gamma, z) {
                Ok(p) => p.normalized(),
                Err(SemiabelianError::Unsupported(_)) => {
                    report.unsupported += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let membership = curve_membership(x, &x_pt)?;
            if !membership.is_yes() {
                continue;
            }
            let cert = Certificate {
                gamma_coefficients: coeffs.clone(),
                gamma: gamma.clone(),
                z: z.clone(),
                z_label: label.clone(),
                z_height: h.value,
                z_height_error: h.error,
                verdict,
            };
            let key = serde_json::to_string(&x_pt).expect("point serialises");
            match index.get(&key) {
                Some(&i) => report.hits[i].certificates.push(cert),
                None => {
                    index.insert(key, report.hits.len());
                    report.hits.push(Hit {
                        point: x_pt,
                        membership,
                        certificates: vec![cert],
                    });
                }
            }
        }
    }
    report.cosets = group_cosets(a, &catalog, &report.hits);
    Ok(report)
}

/// Every catalog point `z` with its label and height, in catalog order.
fn small_points(catalog: &Catalog, n: usize) -> Vec<(SemiabelianPoint, String, HeightValue)> {
    let mut out = Vec::new();
    let t = catalog.torus.len();
    for ec in &catalog.elliptic {
        let mut idx = vec![0usize; n];
        loop {
            let torus: Vec<TorusElement> = idx.iter().map(|&i| catalog.torus[i].value.clone()).collect();
            let mut height = HeightValue { value: 0.0, error: 0.0 };
            let mut labels = vec![ec.to_string()];
            for &i in &idx {
                height.value += catalog.torus[i].height.value;
                height.error += catalog.torus[i].height.error;
                labels.push(catalog.torus[i].label.clone());
            }
            out.push((SemiabelianPoint { ec: ec.clone(), torus }, labels.join(" x "), height));
            // odometer over torus tuples
            let mut k = n;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < t {
                    break;
                }
                idx[k] = 0;
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if n == 0 || k == usize::MAX {
                break;
            }
        }
    }
    out
}

fn group_cosets(a: &AmbientVariety, catalog: &Catalog, hits: &[Hit]) -> Vec<Vec<usize>> {
    let n = hits.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let Ok(d) = a.sub(&hits[i].point, &hits[j].point) else {
                continue;
            };
            if d.is_exactly_torsion(&a.curve) || catalog.contains(&d.normalized()) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

impl std::fmt::Display for SemiabelianPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.torus.is_empty() {
            return write!(f, "{}", self.ec);
        }
        write!(f, "({}", self.ec)?;
        for t in &self.torus {
            write!(f, ", {t}")?;
        }
        write!(f, ")")
    }
}

impl ExploreReport {
    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "# {}\n# {}\n",
            self.header.disclaimer, self.header.integrality
        ));
        s.push_str(&format!(
            "eps = {}  tol = {}  generator bound = {}\n",
            fmt12(self.eps),
            fmt12(self.tol),
            self.generator_bound
        ));
        s.push_str(&format!(
            "gamma points = {}  catalog = {} elliptic x {} torus  candidates = {}\n",
            self.gamma_points, self.catalog_elliptic, self.catalog_torus, self.candidates
        ));
        s.push_str(&format!(
            "in ball = {}  boundary = {}  unsupported = {}  hits = {}\n",
            self.in_ball,
            self.boundary,
            self.unsupported,
            self.hits.len()
        ));
        let rows: Vec<[String; 5]> = self
            .hits
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let c = &h.certificates[0];
                [
                    i.to_string(),
                    h.point.to_string(),
                    format!("{:?}", c.gamma_coefficients),
                    c.z_label.clone(),
                    membership_label(&h.membership),
                ]
            })
            .collect();
        let head = ["#", "point", "gamma", "z", "membership"].map(String::from);
        let mut widths = head.clone().map(|h| h.len());
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        for r in std::iter::once(&head).chain(&rows) {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
            s.push_str(cells.join("  ").trim_end());
            s.push('\n');
        }
        for (k, g) in self.cosets.iter().enumerate() {
            s.push_str(&format!("coset {k}: {g:?}\n"));
        }
        s
    }
}

fn membership_label(m: &Membership) -> String {
    match m {
        Membership::ExactYes => "exact".into(),
        Membership::ExactNo => "exact-no".into(),
        Membership::NumericYes { residual } => format!("numeric (residual {})", fmt12(*residual)),
        Membership::NumericNo { residual } => format!("numeric-no (residual {})", fmt12(*residual)),
    }
}
