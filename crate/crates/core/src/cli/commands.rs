use clap::Args;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    json_arg, parse_json, to_json, write_out, CliError, Format, Settings, DEFAULT_HEIGHT_TOL, EXIT_INCONCLUSIVE,
    EXIT_OFF_CURVE, EXIT_OK, EXIT_VIOLATION,
};
use crate::algebraic::{AlgebraicLiteral, AlgebraicNumber, IntPolynomial, TorusElement};
use crate::dynamics::{
    classify_small_sequence, n_trace, HeightedSystem, NValue, PropReport, PropScenario, BUILTIN_SCENARIOS,
};
use crate::elliptic::{CanonicalHeight, CurveSpec, ECPoint};
use crate::equidist::{bilu_row, root_angle, write_orbit_csv, write_summary_csv, BiluReport, SUMMARY_CSV_HEADER};
use crate::format::{fmt12, ser12, ser12_opt};
use crate::numeric::{format_rational, parse_rational, primes_below};
use crate::semiabelian::{explore_theorem, AmbientVariety, Experiment, HeightValue, SemiabelianPoint, SubgroupGamma};

type CmdResult = Result<(i32, String), CliError>;

fn csv_unsupported(cmd: &str) -> CliError {
    CliError::parse(format!("--format csv is not available for {cmd}"))
}

/// Left-aligned columns separated by two spaces.
fn table(head: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = head.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let head: Vec<String> = head.iter().map(|s| s.to_string()).collect();
    let mut s = String::new();
    for r in std::iter::once(&head).chain(rows) {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        s.push_str(cells.join("  ").trim_end());
        s.push('\n');
    }
    s
}

fn csv_string(head: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::parse(e.to_string());
    w.write_record(head).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn parse_minpoly(coeffs: &[String]) -> Result<IntPolynomial, CliError> {
    let c = coeffs
        .iter()
        .map(|s| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| CliError::parse(format!("bad coefficient {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntPolynomial::new(c))
}

/// An algebraic literal; a bare `{"minpoly": [...]}` selects root 0.
fn parse_literal(v: serde_json::Value) -> Result<AlgebraicNumber, CliError> {
    let mut v = v;
    if let Some(obj) = v.as_object_mut() {
        if obj.contains_key("minpoly") && !obj.contains_key("root_index") && !obj.contains_key("approx") {
            obj.insert("root_index".into(), 0.into());
        }
    }
    let lit: AlgebraicLiteral =
        serde_json::from_value(v).map_err(|e| CliError::parse(format!("algebraic literal: {e}")))?;
    Ok(lit.to_number()?)
}

fn number_from_args(
    minpoly: &Option<Vec<String>>,
    index: usize,
    literal: &Option<String>,
) -> Result<Option<AlgebraicNumber>, CliError> {
    match (minpoly, literal) {
        (Some(_), Some(_)) => Err(CliError::parse("give either --minpoly or --literal")),
        (Some(c), None) => Ok(Some(AlgebraicNumber::from_minpoly(parse_minpoly(c)?, index)?)),
        (None, Some(l)) => Ok(Some(parse_literal(parse_json(l, "algebraic literal")?)?)),
        (None, None) => Ok(None),
    }
}

/// A point given as a rational (a one-coordinate torus point) or as JSON.
fn parse_point(arg: &str) -> Result<SemiabelianPoint, CliError> {
    if let Ok(q) = parse_rational(arg) {
        return Ok(SemiabelianPoint::torus_only(vec![TorusElement::rational(&q)]));
    }
    let text = json_arg(arg)?;
    if let Ok(p) = serde_json::from_str::<SemiabelianPoint>(&text) {
        return Ok(p);
    }
    let ec: ECPoint = serde_json::from_str(&text).map_err(|e| CliError::parse(format!("point: {e}")))?;
    Ok(SemiabelianPoint { ec, torus: vec![] })
}

#[derive(Debug, Args)]
pub struct HeightArgs {
    /// A rational number `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub rational: Option<String>,
    /// Minimal polynomial coefficients, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub minpoly: Option<Vec<String>>,
    /// Root index into the sorted roots of `--minpoly`.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// An algebraic literal, inline JSON or a file.
    #[arg(long)]
    pub literal: Option<String>,
    /// Curve file: `{"a", "b"}` or `{"a1", "a2", "a3", "a4", "a6"}`.
    #[arg(long)]
    pub curve: Option<String>,
    /// Point file: an elliptic point or `{"ec", "torus"}`.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long)]
    pub canonical: bool,
    #[arg(long)]
    pub naive: bool,
}

#[derive(Debug, Serialize)]
struct HeightReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    number: Option<AlgebraicLiteral>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weil: Option<HeightValue>,
    /// The point on the short model.
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<SemiabelianPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    naive: Option<HeightValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical: Option<CanonicalHeight>,
    #[serde(skip_serializing_if = "Option::is_none")]
    torus: Option<Vec<HeightValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<HeightValue>,
}

impl HeightReport {
    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        let mut push = |name: String, h: &HeightValue| rows.push(vec![name, fmt12(h.value), fmt12(h.error)]);
        if let Some(h) = &self.weil {
            push("weil".into(), h);
        }
        if let Some(h) = &self.naive {
            push("naive".into(), h);
        }
        if let Some(c) = &self.canonical {
            push(
                "canonical".into(),
                &HeightValue {
                    value: c.value,
                    error: c.error,
                },
            );
        }
        for (i, h) in self.torus.iter().flatten().enumerate() {
            push(format!("torus{}", i + 1), h);
        }
        if let Some(h) = &self.product {
            push("product".into(), h);
        }
        rows
    }
}

fn hv(value: f64) -> HeightValue {
    HeightValue {
        value,
        error: 4.0 * f64::EPSILON * value.abs(),
    }
}

pub fn height(a: &HeightArgs, s: &Settings) -> CmdResult {
    let tol = s.tol_or(DEFAULT_HEIGHT_TOL);
    let mut r = HeightReport {
        number: None,
        degree: None,
        weil: None,
        point: None,
        naive: None,
        canonical: None,
        torus: None,
        product: None,
    };
    let number = match &a.rational {
        Some(q) => {
            if a.minpoly.is_some() || a.literal.is_some() {
                return Err(CliError::parse("give one of --rational, --minpoly, --literal"));
            }
            Some(AlgebraicNumber::rational(&parse_rational(q).map_err(CliError::parse)?))
        }
        None => number_from_args(&a.minpoly, a.index, &a.literal)?,
    };
    if let Some(n) = number {
        let (value, error) = n.weil_height_with_error();
        r.number = Some(n.to_literal());
        r.degree = Some(n.degree());
        r.weil = Some(HeightValue { value, error });
    } else if let Some(p) = &a.point {
        let point = parse_point(p)?;
        match &a.curve {
            Some(c) => {
                let spec: CurveSpec = parse_json(c, "curve")?;
                let (curve, long) = spec.resolve()?;
                let ec = match &long {
                    Some(l) => {
                        if !l.contains(&point.ec) {
                            return Err(CliError::new(
                                EXIT_OFF_CURVE,
                                format!("point {} is not on the curve", point.ec),
                            ));
                        }
                        l.to_short(&point.ec)?
                    }
                    None => point.ec.clone(),
                };
                if !curve.contains(&ec) {
                    return Err(CliError::new(EXIT_OFF_CURVE, format!("point {ec} is not on the curve")));
                }
                let both = !a.canonical && !a.naive;
                if a.naive || both {
                    r.naive = Some(hv(curve.naive_height(&ec)));
                }
                if a.canonical || both {
                    r.canonical = Some(curve.canonical_height(&ec, tol)?);
                }
                let x = SemiabelianPoint {
                    ec,
                    torus: point.torus.clone(),
                };
                if !x.torus.is_empty() {
                    r.torus = Some(torus_heights(&x));
                    let amb = AmbientVariety::new(curve, x.torus.len());
                    r.product = Some(amb.product_height(&x, tol)?);
                }
                r.point = Some(x);
            }
            None => {
                if !point.ec.is_identity() {
                    return Err(CliError::parse("an elliptic point needs --curve"));
                }
                let t = torus_heights(&point);
                r.product = Some(HeightValue {
                    value: t.iter().map(|h| h.value).sum(),
                    error: t.iter().map(|h| h.error).sum(),
                });
                r.torus = Some(t);
                r.point = Some(point);
            }
        }
    } else {
        return Err(CliError::parse(
            "nothing to do: give --rational, --minpoly, --literal or --point",
        ));
    }
    let out = match s.format {
        Format::Json => to_json(&r),
        Format::Csv => csv_string(&["quantity", "value", "error"], &r.rows())?,
        Format::Text => table(&["quantity", "value", "error"], &r.rows()),
    };
    Ok((EXIT_OK, out))
}

fn torus_heights(x: &SemiabelianPoint) -> Vec<HeightValue> {
    x.torus
        .iter()
        .map(|t| {
            let (value, error) = t.height_with_error();
            HeightValue { value, error }
        })
        .collect()
}

#[derive(Debug, Args)]
pub struct NfuncArgs {
    /// System descriptor (JSON or file).
    #[arg(long)]
    pub system: String,
    /// A point: a rational, or JSON for `{"ec", "torus"}` or an elliptic point.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// `exp(2 pi i / n)`.
    #[arg(long)]
    pub root_of_unity: Vec<u64>,
    /// `base^(1/n)`, as two values `BASE N`.
    #[arg(long, num_args = 2, value_names = ["BASE", "N"])]
    pub radical: Vec<String>,
    /// The family `base^(1/n)` for `n = 1..=n_max`.
    #[arg(long)]
    pub radicals: Option<String>,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Adds this many random rationals, drawn with `--seed`.
    #[arg(long)]
    pub random: Option<usize>,
    /// Classify the points as a sequence.
    #[arg(long)]
    pub sequence: bool,
}

#[derive(Debug, Serialize)]
struct NfuncEntry {
    index: usize,
    point: SemiabelianPoint,
    n: NValue,
    /// `h~(f^j z)` for the evaluated `j >= 1`.
    heights: Vec<HeightValue>,
}

#[derive(Debug, Serialize)]
struct NfuncReport {
    system: HeightedSystem,
    cap: u32,
    results: Vec<NfuncEntry>,
}

fn radical_point(base: &str, n: u32) -> Result<SemiabelianPoint, CliError> {
    let q = parse_rational(base).map_err(CliError::parse)?;
    let a = AlgebraicNumber::radical(&q, n)?;
    Ok(SemiabelianPoint::torus_only(vec![TorusElement::from_base(a)?]))
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let mut p: i64 = 0;
    while p == 0 {
        p = rng.gen_range(-1000..=1000);
    }
    let q: i64 = rng.gen_range(1..=1000);
    BigRational::new(p.into(), q.into())
}

fn nfunc_points(a: &NfuncArgs, s: &Settings) -> Result<Vec<SemiabelianPoint>, CliError> {
    let mut pts = Vec::new();
    for p in &a.point {
        pts.push(parse_point(p)?);
    }
    for &n in &a.root_of_unity {
        let z = AlgebraicNumber::root_of_unity(n, 1)?;
        pts.push(SemiabelianPoint::torus_only(vec![TorusElement::from_base(z)?]));
    }
    for pair in a.radical.chunks(2) {
        let n: u32 = pair[1]
            .parse()
            .map_err(|_| CliError::parse(format!("bad radical degree {:?}", pair[1])))?;
        pts.push(radical_point(&pair[0], n)?);
    }
    match (&a.radicals, a.n_max) {
        (Some(b), Some(n_max)) => {
            for n in 1..=n_max {
                pts.push(radical_point(b, n)?);
            }
        }
        (None, None) => {}
        _ => return Err(CliError::parse("--radicals and --n-max go together")),
    }
    if let Some(k) = a.random {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for _ in 0..k {
            pts.push(SemiabelianPoint::torus_only(vec![TorusElement::rational(
                &random_rational(&mut rng),
            )]));
        }
    }
    Ok(pts)
}

pub fn nfunc(a: &NfuncArgs, s: &Settings) -> CmdResult {
    let mut sys: HeightedSystem = parse_json(&a.system, "system")?;
    if let Some(t) = s.tol {
        sys.tol = t;
    }
    let pts = nfunc_points(a, s)?;
    if let Some(c) = &sys.curve {
        if let Some(p) = pts.iter().find(|p| !c.contains(&p.ec)) {
            return Err(CliError::new(
                EXIT_OFF_CURVE,
                format!("point {} is not on the curve", p.ec),
            ));
        }
    }
    if a.sequence {
        let r = classify_small_sequence(&sys, &pts, s.cap)?;
        let code = if r.nondecreasing.is_none() {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_OK
        };
        let rows: Vec<Vec<String>> = r
            .entries
            .iter()
            .map(|e| {
                vec![
                    e.index.to_string(),
                    e.point.to_string(),
                    e.n.to_string(),
                    fmt12(e.height.value),
                ]
            })
            .collect();
        let head = ["index", "point", "N", "height"];
        let out = match s.format {
            Format::Json => to_json(&r),
            Format::Csv => csv_string(&head, &rows)?,
            Format::Text => {
                let flag = |b: Option<bool>| b.map_or("undecided".to_string(), |b| b.to_string());
                format!(
                    "{}N nondecreasing: {}\nfinal N maximal: {}\nheights nonincreasing: {}\nsmall (heuristic): {}\n",
                    table(&head, &rows),
                    flag(r.nondecreasing),
                    flag(r.final_is_maximal),
                    r.heights_nonincreasing,
                    r.small
                )
            }
        };
        return Ok((code, out));
    }
    let mut results = Vec::with_capacity(pts.len());
    for (index, p) in pts.into_iter().enumerate() {
        let t = n_trace(&sys, &p, s.cap)?;
        results.push(NfuncEntry {
            index,
            point: p,
            n: t.value,
            heights: t.heights,
        });
    }
    let code = if results.iter().any(|e| matches!(e.n, NValue::Inconclusive { .. })) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|e| vec![e.index.to_string(), e.point.to_string(), e.n.to_string()])
        .collect();
    let head = ["index", "point", "N"];
    let out = match s.format {
        Format::Json => to_json(&NfuncReport {
            system: sys,
            cap: s.cap,
            results,
        }),
        Format::Csv => csv_string(&head, &rows)?,
        Format::Text if rows.len() == 1 => format!("{}\n", rows[0][2]),
        Format::Text => table(&head, &rows),
    };
    Ok((code, out))
}

#[derive(Debug, Args)]
pub struct EquidistArgs {
    /// Base of the family `base^(1/n)`.
    #[arg(long)]
    pub radicals: Option<String>,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Primitive `p`-th roots of unity for primes `p <= P`.
    #[arg(long, value_name = "P")]
    pub cyclotomic_primes: Option<u64>,
    /// Algebraic literal files (or inline JSON); a file may hold a list.
    #[arg(long)]
    pub poly: Vec<String>,
}

#[derive(Debug, Serialize)]
struct EquidistOutput {
    labels: Vec<String>,
    #[serde(flatten)]
    report: BiluReport,
}

fn equidist_family(a: &EquidistArgs) -> Result<Vec<(String, AlgebraicNumber)>, CliError> {
    let mut seq = Vec::new();
    match (&a.radicals, a.n_max) {
        (Some(b), Some(n_max)) => {
            let q = parse_rational(b).map_err(CliError::parse)?;
            for n in 1..=n_max {
                seq.push((
                    format!("({})^(1/{n})", format_rational(&q)),
                    AlgebraicNumber::radical(&q, n)?,
                ));
            }
        }
        (None, None) => {}
        _ => return Err(CliError::parse("--radicals and --n-max go together")),
    }
    if let Some(p_max) = a.cyclotomic_primes {
        let limit = usize::try_from(p_max).map_err(|_| CliError::parse("--cyclotomic-primes is too large"))?;
        for p in primes_below(limit.saturating_add(1)) {
            seq.push((format!("zeta_{p}"), AlgebraicNumber::root_of_unity(p, 1)?));
        }
    }
    for arg in &a.poly {
        let v: serde_json::Value = parse_json(arg, "poly")?;
        let items = match v {
            serde_json::Value::Array(xs) => xs,
            other => vec![other],
        };
        for (i, item) in items.into_iter().enumerate() {
            seq.push((format!("{arg}[{i}]"), parse_literal(item)?));
        }
    }
    Ok(seq)
}

pub fn equidist(a: &EquidistArgs, s: &Settings) -> CmdResult {
    let seq = equidist_family(a)?;
    let mut rows = Vec::with_capacity(seq.len());
    for (i, (_, x)) in seq.iter().enumerate() {
        let (row, m) = bilu_row(i, x)?;
        if let Some(dir) = &s.out_dir {
            let mut buf = Vec::new();
            write_orbit_csv(&m, &mut buf)?;
            write_out(dir, &format!("orbit_{i:04}.csv"), &buf)?;
        }
        rows.push(row);
    }
    let report = BiluReport::from_rows(rows);
    let mut summary = Vec::new();
    write_summary_csv(&report, &mut summary)?;
    if let Some(dir) = &s.out_dir {
        write_out(dir, "summary.csv", &summary)?;
    }
    let labels: Vec<String> = seq.into_iter().map(|(l, _)| l).collect();
    let out = match s.format {
        Format::Json => to_json(&EquidistOutput { labels, report }),
        Format::Csv => String::from_utf8(summary).expect("csv output is UTF-8"),
        Format::Text => {
            let mut head = vec!["entry"];
            head.extend(SUMMARY_CSV_HEADER);
            let body: Vec<Vec<String>> = report
                .rows
                .iter()
                .zip(&labels)
                .map(|(r, l)| {
                    let mut v = vec![l.clone(), r.degree.to_string(), fmt12(r.height), fmt12(r.discrepancy)];
                    v.extend(r.weyl.iter().map(|&w| fmt12(w)));
                    v.push(fmt12(r.radial_dev));
                    v
                })
                .collect();
            let t = &report.trend;
            format!(
                "{}trend ({}): {}, small: {}\n",
                table(&head, &body),
                t.method,
                t.verdict,
                t.small
            )
        }
    };
    Ok((EXIT_OK, out))
}

#[derive(Debug, Args)]
pub struct PropCheckArgs {
    /// Scenario file.
    pub scenario: Option<String>,
    /// Name of a shipped scenario.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Lists the shipped scenarios.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Serialize)]
struct PropCheckOutput {
    scenario: String,
    part: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    verdict: &'static str,
    samples: usize,
    violations: usize,
    inconclusive: usize,
    report: PropReport,
}

pub fn prop_check(a: &PropCheckArgs, s: &Settings) -> CmdResult {
    if a.list {
        let names: Vec<&str> = BUILTIN_SCENARIOS.iter().map(|(n, _)| *n).collect();
        return Ok((EXIT_OK, format!("{}\n", names.join("\n"))));
    }
    if s.format == Format::Csv {
        return Err(csv_unsupported("prop-check"));
    }
    let (name, scenario) = match (&a.scenario, &a.builtin) {
        (Some(p), None) => (
            p.clone(),
            PropScenario::from_json(&json_arg(p)?).map_err(CliError::parse)?,
        ),
        (None, Some(b)) => {
            let sc = PropScenario::builtin(b).ok_or_else(|| CliError::parse(format!("no shipped scenario {b:?}")))?;
            (b.clone(), sc)
        }
        _ => return Err(CliError::parse("give a scenario file or --builtin NAME")),
    };
    let report = scenario.run(a_cap(s))?;
    let (violations, inconclusive) = (report.violation_count(), report.inconclusive_count());
    let (code, verdict) = if violations > 0 {
        (EXIT_VIOLATION, "violation")
    } else if inconclusive > 0 {
        (EXIT_INCONCLUSIVE, "inconclusive")
    } else {
        (EXIT_OK, "pass")
    };
    let o = PropCheckOutput {
        scenario: name,
        part: scenario.part,
        description: scenario.description.clone(),
        verdict,
        samples: report.sample_count(),
        violations,
        inconclusive,
        report,
    };
    let out = match s.format {
        Format::Json => to_json(&o),
        _ => format!(
            "{}: part {}: {} samples, {} violations, {} inconclusive: {}\n",
            o.scenario, o.part, o.samples, o.violations, o.inconclusive, o.verdict
        ),
    };
    Ok((code, out))
}

/// `--cap` overrides the scenario only when given explicitly.
fn a_cap(s: &Settings) -> Option<u32> {
    (s.cap != crate::dynamics::DEFAULT_CAP).then_some(s.cap)
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    /// Experiment file.
    pub experiment: String,
}

pub fn explore(a: &ExploreArgs, s: &Settings) -> CmdResult {
    if s.format == Format::Csv {
        return Err(csv_unsupported("explore"));
    }
    let e: Experiment = parse_json(&a.experiment, "experiment")?;
    let mut cfg = e.config.clone();
    if let Some(t) = s.tol {
        cfg.tol = t;
    }
    let g = SubgroupGamma::new(&e.ambient, e.generators.clone())?;
    let report = explore_theorem(&e.ambient, &g, &e.relation, e.eps, &cfg)?;
    let json = to_json(&report);
    let text = report.to_text();
    if let Some(dir) = &s.out_dir {
        write_out(dir, "explore.json", json.as_bytes())?;
        write_out(dir, "explore.txt", text.as_bytes())?;
    }
    Ok((EXIT_OK, if s.format == Format::Json { json } else { text }))
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Minimal polynomial coefficients, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub minpoly: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// An algebraic literal, inline JSON or a file.
    #[arg(long)]
    pub literal: Option<String>,
}

#[derive(Debug, Serialize)]
struct Conjugate {
    index: usize,
    #[serde(serialize_with = "ser12")]
    re: f64,
    #[serde(serialize_with = "ser12")]
    im: f64,
    /// Radius of the certified enclosure.
    #[serde(serialize_with = "ser12")]
    enclosure: f64,
    #[serde(serialize_with = "ser12")]
    modulus: f64,
    /// Argument in turns, `None` if the enclosure meets the cut.
    #[serde(serialize_with = "ser12_opt")]
    angle: Option<f64>,
}

#[derive(Debug, Serialize)]
struct OrbitReport {
    number: AlgebraicLiteral,
    degree: usize,
    conjugates: Vec<Conjugate>,
}

pub fn orbit(a: &OrbitArgs, s: &Settings) -> CmdResult {
    let x = number_from_args(&a.minpoly, a.index, &a.literal)?
        .ok_or_else(|| CliError::parse("give --minpoly or --literal"))?;
    let conjugates: Vec<Conjugate> = x
        .conjugate_enclosures()
        .iter()
        .enumerate()
        .map(|(index, r)| Conjugate {
            index,
            re: r.center.re,
            im: r.center.im,
            enclosure: r.radius,
            modulus: r.center.norm(),
            angle: root_angle(r).map(|a| a.0),
        })
        .collect();
    let head = ["index", "re", "im", "enclosure", "modulus", "angle"];
    let rows: Vec<Vec<String>> = conjugates
        .iter()
        .map(|c| {
            vec![
                c.index.to_string(),
                fmt12(c.re),
                fmt12(c.im),
                fmt12(c.enclosure),
                fmt12(c.modulus),
                c.angle.map_or(String::new(), fmt12),
            ]
        })
        .collect();
    let out = match s.format {
        Format::Json => to_json(&OrbitReport {
            number: x.to_literal(),
            degree: x.degree(),
            conjugates,
        }),
        Format::Csv => csv_string(&head, &rows)?,
        Format::Text => table(&head, &rows),
    };
    Ok((EXIT_OK, out))
}
