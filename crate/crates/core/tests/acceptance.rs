#![allow(clippy::excessive_precision)]

//! Acceptance criteria, one pass/fail line each.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use smallpoints::algebraic::{mahler_log, AlgebraicNumber, IntPolynomial};
use smallpoints::dynamics::{
    n_function, HeightedSystem, NValue, PropReport, PropScenario, StarParams, BUILTIN_SCENARIOS,
};
use smallpoints::elliptic::{ECPoint, EllipticCurveQ};
use smallpoints::equidist::{orbit_measure, radial_deviation, star_discrepancy};
use smallpoints::numeric::{parse_rational, primes_below, totient};
use smallpoints::semiabelian::{explore_theorem, BallVerdict, Experiment, SubgroupGamma};
use smallpoints::{SemiabelianPoint, TorusElement};

const LEHMER_LOG_M: f64 = 0.162357612007738139432;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn radical(base: &str, n: u32) -> AlgebraicNumber {
    AlgebraicNumber::radical(&parse_rational(base).unwrap(), n).unwrap()
}

fn criterion_1() -> Check {
    let h = radical("2", 12).weil_height();
    let want = 2f64.ln() / 12.0;
    ensure((h - want).abs() <= 1e-9, || format!("h(2^(1/12)) = {h}, want {want}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let mut p: i64 = 0;
        while p == 0 {
            p = rng.gen_range(-1_000_000..=1_000_000);
        }
        let q: i64 = rng.gen_range(1..=1_000_000);
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        let h = AlgebraicNumber::rational(&r).weil_height();
        let want = (r.numer().magnitude().max(r.denom().magnitude()).to_string())
            .parse::<f64>()
            .unwrap()
            .ln();
        ensure((h - want).abs() <= 1e-12, || format!("h({r}) = {h}, want {want}"))?;
    }
    let mut count = 0;
    for n in 1..=60u64 {
        if totient(n) > 8 {
            continue;
        }
        let z = AlgebraicNumber::root_of_unity(n, 1).map_err(|e| e.to_string())?;
        let h = z.weil_height();
        ensure(h <= 1e-12, || format!("h(zeta_{n}) = {h}"))?;
        count += 1;
    }
    ensure(count == 18, || {
        format!("{count} cyclotomic orders of degree <= 8, expected 18")
    })
}

fn criterion_2() -> Check {
    let p = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
    let m = mahler_log(&p).map_err(|e| e.to_string())?;
    ensure((m.value - LEHMER_LOG_M).abs() <= 1e-6, || {
        format!("log M = {}, oracle {LEHMER_LOG_M}", m.value)
    })
}

fn criterion_3() -> Check {
    let e = EllipticCurveQ::from_i64(0, -2).unwrap();
    let p = ECPoint::from_i64(3, 5);
    let h = |q: &ECPoint, tol: f64| e.canonical_height(q, tol).map(|c| c.value).map_err(|x| x.to_string());
    let hp = h(&p, 1e-8)?;
    let h2 = h(&e.mul_i64(2, &p).unwrap(), 1e-8)?;
    let h3 = h(&e.mul_i64(3, &p).unwrap(), 1e-8)?;
    ensure((h2 - 4.0 * hp).abs() <= 2e-8, || {
        format!("|h(2P) - 4h(P)| = {:e}", (h2 - 4.0 * hp).abs())
    })?;
    ensure((h3 - 9.0 * hp).abs() <= 2e-8, || {
        format!("|h(3P) - 9h(P)| = {:e}", (h3 - 9.0 * hp).abs())
    })?;
    // Rank 2: y^2 = x^3 + 17.
    let e = EllipticCurveQ::from_i64(0, 17).unwrap();
    let pts = [(-2, 3), (-1, 4), (2, 5), (4, 9), (8, 23)].map(|(x, y)| ECPoint::from_i64(x, y));
    let tol = 5e-9;
    let mut pairs = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (&pts[i], &pts[j]);
            let hs = |q: &ECPoint| e.canonical_height(q, tol).map(|c| c.value).map_err(|x| x.to_string());
            let lhs = hs(&e.add(a, b).unwrap())? + hs(&e.sub(a, b).unwrap())?;
            let rhs = 2.0 * hs(a)? + 2.0 * hs(b)?;
            ensure((lhs - rhs).abs() <= 4e-8, || {
                format!("parallelogram {a} {b}: {:e}", (lhs - rhs).abs())
            })?;
            pairs += 1;
        }
    }
    ensure(pairs == 10, || format!("{pairs} pairs"))
}

fn criterion_4() -> Check {
    let e = EllipticCurveQ::from_i64(0, 1).unwrap();
    let t = e.rational_torsion_points().map_err(|x| x.to_string())?;
    ensure(t.len() == 6, || format!("torsion group has {} points", t.len()))?;
    for p in &t {
        let h = e.canonical_height(p, 1e-9).map_err(|x| x.to_string())?.value;
        ensure(h <= 1e-8, || format!("h({p}) = {h}"))?;
        ensure(e.is_torsion(p).is_some(), || format!("{p} not torsion"))?;
    }
    let e = EllipticCurveQ::from_i64(0, -2).unwrap();
    let p = ECPoint::from_i64(3, 5);
    let h = e.canonical_height(&p, 1e-9).map_err(|x| x.to_string())?.value;
    ensure(h > 1e-3, || format!("h(3,5) = {h}"))?;
    ensure(e.is_torsion(&p).is_none(), || "(3,5) reported torsion".into())
}

fn criterion_5() -> Check {
    let sys = HeightedSystem::torus_power(2, 0.0, StarParams::new(1, 0.5, 1.5).unwrap()).unwrap();
    let pt = |a: AlgebraicNumber| SemiabelianPoint::torus_only(vec![TorusElement::from_base(a).unwrap()]);
    let n = |a: AlgebraicNumber| n_function(&sys, &pt(a), 64).map_err(|e| e.to_string());
    ensure(n(AlgebraicNumber::integer(2))? == NValue::Finite { n: 1 }, || {
        "N(2) != 1".into()
    })?;
    ensure(n(radical("2", 8))? == NValue::Finite { n: 3 }, || {
        "N(2^(1/8)) != 3".into()
    })?;
    ensure(
        n(AlgebraicNumber::root_of_unity(5, 1).unwrap())? == NValue::Preperiodic,
        || "N(zeta_5) not preperiodic".into(),
    )?;
    let mut prev = 0;
    let mut prev_h = f64::INFINITY;
    for k in 1..=200 {
        let a = radical("2", k);
        let h = a.weil_height();
        let v = n(a)?.finite().ok_or_else(|| format!("N(2^(1/{k})) undecided"))?;
        ensure(v >= prev, || format!("staircase drops at n = {k}: {prev} -> {v}"))?;
        ensure(h < prev_h, || format!("height does not decrease at n = {k}"))?;
        prev = v;
        prev_h = h;
    }
    ensure(prev >= 8, || format!("N(2^(1/200)) = {prev} < 8"))?;
    ensure(prev_h < 0.004, || format!("h(2^(1/200)) = {prev_h}"))
}

fn criterion_6() -> Check {
    let mut parts = [false; 4];
    for (name, _) in BUILTIN_SCENARIOS {
        let s = PropScenario::builtin(name).unwrap();
        let r = s.run(None).map_err(|e| format!("{name}: {e}"))?;
        parts[s.part as usize - 1] = true;
        ensure(r.violation_count() == 0, || {
            format!("{name}: {} violations", r.violation_count())
        })?;
        ensure(r.inconclusive_count() == 0, || {
            format!("{name}: {} inconclusive", r.inconclusive_count())
        })?;
        if *name == "part4-factor-inclusion" {
            if let PropReport::Prop4(p) = &r {
                ensure(p.equalities == p.samples.len(), || {
                    format!("factor inclusion: {} equalities of {}", p.equalities, p.samples.len())
                })?;
            }
        }
    }
    ensure(parts.iter().all(|&b| b), || format!("parts covered: {parts:?}"))
}

fn criterion_7() -> Check {
    let ln2 = 2f64.ln();
    for n in 1..=200u32 {
        let m = orbit_measure(&radical("2", n)).map_err(|e| e.to_string())?;
        let d = star_discrepancy(&m).map_err(|e| e.to_string())?;
        ensure((d - 1.0 / n as f64).abs() <= 1e-9, || format!("D*(2^(1/{n})) = {d}"))?;
        let r = radial_deviation(&m);
        ensure((r - ln2 / n as f64).abs() <= 1e-9, || {
            format!("radial(2^(1/{n})) = {r}")
        })?;
    }
    for p in primes_below(200) {
        let m = orbit_measure(&AlgebraicNumber::root_of_unity(p, 1).unwrap()).map_err(|e| e.to_string())?;
        let d = star_discrepancy(&m).map_err(|e| e.to_string())?;
        ensure(d <= 4.0 / p as f64, || format!("D*(zeta_{p}) = {d}"))?;
    }
    Ok(())
}

fn criterion_8() -> Check {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/explore-t2.json");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let run = || -> Result<(String, smallpoints::semiabelian::ExploreReport), String> {
        let e: Experiment = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let g = SubgroupGamma::new(&e.ambient, e.generators.clone()).map_err(|e| e.to_string())?;
        let r = explore_theorem(&e.ambient, &g, &e.relation, e.eps, &e.config).map_err(|e| e.to_string())?;
        Ok((serde_json::to_string_pretty(&r).unwrap(), r))
    };
    let (json, r) = run()?;
    ensure(r.hits.len() == 1, || format!("{} hits", r.hits.len()))?;
    let hit = &r.hits[0];
    ensure(hit.point.to_string() == "(O, 2)", || format!("hit {}", hit.point))?;
    let e: Experiment = serde_json::from_str(&text).unwrap();
    let cert = hit.certificates.first().ok_or("no certificate")?;
    let diff = e.ambient.sub(&hit.point, &cert.gamma).map_err(|e| e.to_string())?;
    ensure(diff == cert.z, || {
        format!("x - gamma = {diff}, certificate z = {}", cert.z)
    })?;
    ensure(cert.verdict == BallVerdict::In, || {
        format!("certificate verdict {:?}", cert.verdict)
    })?;
    ensure(hit.membership.is_yes(), || "hit not on the relation".into())?;
    let (again, _) = run()?;
    ensure(json == again, || "second run differs".into())
}

type Criterion = (&'static str, fn() -> Check, Duration);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 height kernel", criterion_1, Duration::from_secs(1)),
        ("2 Mahler oracle", criterion_2, Duration::from_secs(1)),
        ("3 canonical height laws", criterion_3, Duration::from_secs(30)),
        ("4 torsion / zero height", criterion_4, Duration::from_secs(10)),
        ("5 N-function goldens", criterion_5, Duration::from_secs(5)),
        ("6 comparison suite", criterion_6, Duration::from_secs(10)),
        ("7 equidistribution decay", criterion_7, Duration::from_secs(60)),
        ("8 explorer determinism", criterion_8, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let t = Instant::now();
        let result = f();
        let dt = t.elapsed();
        let result = result.and_then(|_| {
            ensure(dt <= limit, || {
                format!("took {:.2} s, limit {} s", dt.as_secs_f64(), limit.as_secs())
            })
        });
        match result {
            Ok(()) => println!("PASS  {name}  ({:.3} s)", dt.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}  ({:.3} s): {msg}", dt.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
