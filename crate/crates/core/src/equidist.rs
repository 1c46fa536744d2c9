//! Galois-orbit angle statistics on the unit circle.
//!
//! A nonzero algebraic number gives an empirical measure on `[0, 1)`: one
//! atom at `arg(sigma a) / 2 pi` per conjugate. Small points equidistribute
//! towards the uniform measure, which is measured here by the star
//! discrepancy, Weyl sums and the largest `|log |sigma a||`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebraic::{AlgebraicNumber, CertifiedRoot};
use crate::format::{fmt12, ser12, ser12_vec};

/// Largest accepted uncertainty of a single angle, in turns.
pub const ANGLE_TOL: f64 = 1e-10;

/// Number of Weyl sums reported per orbit.
pub const WEYL_TERMS: usize = 5;

const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EquidistError {
    #[error("zero has no angle measure")]
    Zero,
    #[error("conjugate {index}: angle uncertainty {achieved:e} exceeds {ANGLE_TOL:e}")]
    Unresolved { index: usize, achieved: f64 },
    #[error("Weyl sum order must be at least 1")]
    InvalidOrder,
    #[error("empty measure")]
    Empty,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = EquidistError> = std::result::Result<T, E>;

/// Angles in `[0, 1)` sorted ascending, with the modulus of each conjugate
/// in the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalAngleMeasure {
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
    /// Largest angle uncertainty over the orbit, in turns.
    pub angle_error: f64,
}

impl EmpiricalAngleMeasure {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Angle of a certified root in turns, with its uncertainty. Real roots get
/// exactly 0 or 1/2.
pub fn root_angle(root: &CertifiedRoot) -> Option<(f64, f64)> {
    let c = root.center;
    if root.is_real() {
        return Some((if c.re > 0.0 { 0.0 } else { 0.5 }, 0.0));
    }
    let modulus = c.norm();
    if root.radius >= modulus {
        return None;
    }
    let err = (root.radius / modulus).asin() / (2.0 * PI);
    // A non-real disk that reaches the positive real axis straddles the cut.
    if c.re > 0.0 && c.im.abs() <= root.radius {
        return None;
    }
    let mut t = c.im.atan2(c.re) / (2.0 * PI);
    if t < 0.0 {
        t += 1.0;
    }
    if t >= 1.0 {
        t = 0.0;
    }
    Some((t, err))
}

/// The angle measure of the Galois orbit of `a`.
pub fn orbit_measure(a: &AlgebraicNumber) -> Result<EmpiricalAngleMeasure> {
    if a.is_zero() {
        return Err(EquidistError::Zero);
    }
    let mut pairs = Vec::with_capacity(a.degree());
    let mut worst: f64 = 0.0;
    for (index, root) in a.conjugate_enclosures().iter().enumerate() {
        let (t, err) = root_angle(root).ok_or(EquidistError::Unresolved {
            index,
            achieved: root.radius / root.center.norm(),
        })?;
        if err > ANGLE_TOL {
            return Err(EquidistError::Unresolved { index, achieved: err });
        }
        worst = worst.max(err);
        pairs.push((t, root.center.norm()));
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(EmpiricalAngleMeasure {
        angles: pairs.iter().map(|p| p.0).collect(),
        radii: pairs.iter().map(|p| p.1).collect(),
        angle_error: worst,
    })
}

/// `D*_N = max_i max(i/N - u_i, u_i - (i-1)/N)` over the sorted angles.
pub fn star_discrepancy(m: &EmpiricalAngleMeasure) -> Result<f64> {
    if m.is_empty() {
        return Err(EquidistError::Empty);
    }
    let n = m.len() as f64;
    Ok(m.angles
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            // Scaled by N and snapped within rounding of an integer, so grid
            // points i/N give exactly 1/N.
            let (i, mut nu) = (i as f64, n * u);
            if (nu - nu.round()).abs() <= 4.0 * f64::EPSILON * n {
                nu = nu.round();
            }
            ((i + 1.0 - nu) / n).max((nu - i) / n)
        })
        .fold(0.0, f64::max))
}

/// The mean of `exp(2 pi i k u)` over the angles, before taking the modulus.
pub fn weyl_mean(m: &EmpiricalAngleMeasure, k: u32) -> Result<Complex64> {
    if k == 0 {
        return Err(EquidistError::InvalidOrder);
    }
    if m.is_empty() {
        return Err(EquidistError::Empty);
    }
    let s: Complex64 = m
        .angles
        .iter()
        .map(|&u| {
            // Reduce k u mod 1 first so large k keeps full precision.
            let t = (k as f64 * u).fract();
            Complex64::from_polar(1.0, 2.0 * PI * t)
        })
        .sum();
    Ok(s / m.len() as f64)
}

/// `|N^-1 sum_j exp(2 pi i k u_j)|`.
pub fn weyl_sum(m: &EmpiricalAngleMeasure, k: u32) -> Result<f64> {
    Ok(weyl_mean(m, k)?.norm().min(1.0))
}

/// `max |log r|` over the conjugate moduli; 0 for an empty measure.
pub fn radial_deviation(m: &EmpiricalAngleMeasure) -> f64 {
    m.radii.iter().map(|r| r.ln().abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiluRow {
    pub index: usize,
    pub degree: usize,
    #[serde(serialize_with = "ser12")]
    pub height: f64,
    #[serde(serialize_with = "ser12")]
    pub height_error: f64,
    #[serde(serialize_with = "ser12")]
    pub discrepancy: f64,
    #[serde(serialize_with = "ser12_vec")]
    pub weyl: Vec<f64>,
    #[serde(serialize_with = "ser12")]
    pub radial_dev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendVerdict {
    /// Discrepancy and radial deviation both shrink on most steps.
    Decreasing,
    NoTrend,
}

impl std::fmt::Display for TrendVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrendVerdict::Decreasing => "decreasing",
            TrendVerdict::NoTrend => "no trend",
        })
    }
}

/// Monotone-majority summary of a sequence of rows. Heuristic only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trend {
    pub method: &'static str,
    /// Whether the heights look like a small sequence: all zero, or
    /// decreasing on most steps and ending below where they started.
    pub small: bool,
    #[serde(serialize_with = "ser12")]
    pub height_decreasing: f64,
    #[serde(serialize_with = "ser12")]
    pub discrepancy_decreasing: f64,
    #[serde(serialize_with = "ser12")]
    pub radial_decreasing: f64,
    pub verdict: TrendVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiluReport {
    pub rows: Vec<BiluRow>,
    pub trend: Trend,
}

/// Fraction of consecutive pairs where the statistic drops, or is already 0.
fn improving_fraction(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let good = xs
        .windows(2)
        .filter(|w| w[1] < w[0] - ZERO_TOL || (w[0] <= ZERO_TOL && w[1] <= ZERO_TOL))
        .count();
    good as f64 / (xs.len() - 1) as f64
}

fn trend(rows: &[BiluRow]) -> Trend {
    let col = |f: fn(&BiluRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let heights = col(|r| r.height);
    let strict_drops = if heights.len() < 2 {
        0.0
    } else {
        heights.windows(2).filter(|w| w[1] < w[0] - ZERO_TOL).count() as f64 / (heights.len() - 1) as f64
    };
    let all_zero = !heights.is_empty() && heights.iter().all(|&h| h <= ZERO_TOL);
    let small = all_zero || (strict_drops > 0.5 && heights.last() < heights.first().map(|h| h - ZERO_TOL).as_ref());
    let disc = improving_fraction(&col(|r| r.discrepancy));
    let radial = improving_fraction(&col(|r| r.radial_dev));
    let verdict = if rows.len() >= 2 && disc > 0.5 && radial > 0.5 {
        TrendVerdict::Decreasing
    } else {
        TrendVerdict::NoTrend
    };
    Trend {
        method: "heuristic (monotone-majority)",
        small,
        height_decreasing: strict_drops,
        discrepancy_decreasing: disc,
        radial_decreasing: radial,
        verdict,
    }
}

/// One row of statistics for `a`, together with its angle measure.
pub fn bilu_row(index: usize, a: &AlgebraicNumber) -> Result<(BiluRow, EmpiricalAngleMeasure)> {
    let m = orbit_measure(a)?;
    let (height, height_error) = a.weil_height_with_error();
    let weyl = (1..=WEYL_TERMS as u32)
        .map(|k| weyl_sum(&m, k))
        .collect::<Result<Vec<f64>>>()?;
    let row = BiluRow {
        index,
        degree: a.degree(),
        height,
        height_error,
        discrepancy: star_discrepancy(&m)?,
        weyl,
        radial_dev: radial_deviation(&m),
    };
    Ok((row, m))
}

pub fn bilu_report(seq: &[AlgebraicNumber]) -> Result<BiluReport> {
    let rows = seq
        .iter()
        .enumerate()
        .map(|(i, a)| bilu_row(i, a).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(BiluReport::from_rows(rows))
}

impl BiluReport {
    pub fn from_rows(rows: Vec<BiluRow>) -> Self {
        let trend = trend(&rows);
        BiluReport { rows, trend }
    }
}

pub const ORBIT_CSV_HEADER: [&str; 4] = ["index", "angle", "radius", "log_radius"];
pub const SUMMARY_CSV_HEADER: [&str; 9] = [
    "degree",
    "height",
    "discrepancy",
    "weyl1",
    "weyl2",
    "weyl3",
    "weyl4",
    "weyl5",
    "radial_dev",
];

/// One row per conjugate in sorted-angle order.
pub fn write_orbit_csv<W: Write>(m: &EmpiricalAngleMeasure, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ORBIT_CSV_HEADER)?;
    for (i, (&t, &r)) in m.angles.iter().zip(&m.radii).enumerate() {
        out.write_record([i.to_string(), fmt12(t), fmt12(r), fmt12(r.ln())])?;
    }
    out.flush()?;
    Ok(())
}

/// One row per sequence entry, in sequence order. The header is written
/// even when there are no rows.
pub fn write_summary_csv<W: Write>(report: &BiluReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_CSV_HEADER)?;
    for row in &report.rows {
        let mut rec = vec![row.degree.to_string(), fmt12(row.height), fmt12(row.discrepancy)];
        rec.extend(row.weyl.iter().map(|&x| fmt12(x)));
        rec.push(fmt12(row.radial_dev));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::IntPolynomial;
    use crate::numeric::{parse_rational, primes_below};

    fn radical(base: &str, n: u32) -> AlgebraicNumber {
        AlgebraicNumber::radical(&parse_rational(base).unwrap(), n).unwrap()
    }

    fn grid(n: usize) -> EmpiricalAngleMeasure {
        EmpiricalAngleMeasure {
            angles: (0..n).map(|i| i as f64 / n as f64).collect(),
            radii: vec![1.0; n],
            angle_error: 0.0,
        }
    }

    fn lehmer() -> AlgebraicNumber {
        let p = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        AlgebraicNumber::from_minpoly(p, 0).unwrap()
    }

    #[test]
    fn minus_one() {
        let m = orbit_measure(&AlgebraicNumber::integer(-1)).unwrap();
        assert_eq!(m.angles, vec![0.5]);
        assert_eq!(m.radii, vec![1.0]);
        assert_eq!(star_discrepancy(&m).unwrap(), 0.5);
    }

    #[test]
    fn fifth_root_of_two() {
        let m = orbit_measure(&radical("2", 5)).unwrap();
        let r = 2f64.powf(0.2);
        for (i, (&t, &rad)) in m.angles.iter().zip(&m.radii).enumerate() {
            assert!((t - i as f64 / 5.0).abs() < 1e-12);
            assert!((rad - r).abs() < 1e-12);
        }
        assert_eq!(m.angles[0], 0.0);
        assert!((star_discrepancy(&m).unwrap() - 0.2).abs() < 1e-12);
        assert!((radial_deviation(&m) - 2f64.ln() / 5.0).abs() < 1e-12);
    }

    #[test]
    fn golden_ratio() {
        let a = AlgebraicNumber::from_minpoly(IntPolynomial::from_i64(&[-1, -1, 1]), 1).unwrap();
        let m = orbit_measure(&a).unwrap();
        assert_eq!(m.angles, vec![0.0, 0.5]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m.radii[0] - phi).abs() < 1e-12);
        assert!((m.radii[1] - 1.0 / phi).abs() < 1e-12);
        assert!((radial_deviation(&m) - 0.481211825059603447498).abs() < 1e-12);
    }

    #[test]
    fn zero_rejected() {
        assert!(matches!(
            orbit_measure(&AlgebraicNumber::integer(0)),
            Err(EquidistError::Zero)
        ));
    }

    #[test]
    fn grid_and_atom_discrepancy() {
        for n in [1, 2, 7, 100] {
            assert_eq!(star_discrepancy(&grid(n)).unwrap(), 1.0 / n as f64);
        }
        let atom = EmpiricalAngleMeasure {
            angles: vec![0.0],
            radii: vec![1.0],
            angle_error: 0.0,
        };
        assert_eq!(star_discrepancy(&atom).unwrap(), 1.0);
        assert_eq!(weyl_sum(&atom, 3).unwrap(), 1.0);
        let empty = EmpiricalAngleMeasure {
            angles: vec![],
            radii: vec![],
            angle_error: 0.0,
        };
        assert!(star_discrepancy(&empty).is_err());
    }

    #[test]
    fn grid_weyl_sums_vanish() {
        let m = grid(12);
        for k in 1..30 {
            let w = weyl_sum(&m, k).unwrap();
            if k % 12 == 0 {
                assert!((w - 1.0).abs() < 1e-10);
            } else {
                assert!(w < 1e-10, "k={k} w={w}");
            }
        }
        assert!(matches!(weyl_sum(&m, 0), Err(EquidistError::InvalidOrder)));
    }

    #[test]
    fn lehmer_weyl_sums_match_oracle() {
        let expected = [
            0.1026417949186959859,
            0.089363029521291577078,
            0.17580325717827745705,
            0.056320666675517163354,
            0.33040056792707842782,
        ];
        let m = orbit_measure(&lehmer()).unwrap();
        assert_eq!(m.len(), 10);
        for (k, e) in (1..).zip(expected) {
            assert!((weyl_sum(&m, k).unwrap() - e).abs() < 1e-10, "k={k}");
            // The orbit is closed under conjugation, so the mean is real.
            assert!(weyl_mean(&m, k).unwrap().im.abs() < 1e-12);
        }
        assert!((radial_deviation(&m) - 1.17628081825991750654f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn real_numbers_give_symmetric_angles() {
        for a in [radical("3", 7), radical("5/2", 6), lehmer()] {
            let m = orbit_measure(&a).unwrap();
            let mut reflected: Vec<f64> = m.angles.iter().map(|&t| if t == 0.0 { 0.0 } else { 1.0 - t }).collect();
            reflected.sort_by(f64::total_cmp);
            for (x, y) in m.angles.iter().zip(&reflected) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn radicals_of_two_sequence() {
        let seq: Vec<_> = (1..=50).map(|n| radical("2", n)).collect();
        let r = bilu_report(&seq).unwrap();
        for (row, n) in r.rows.iter().zip(1..) {
            let n = n as f64;
            assert!((row.height - 2f64.ln() / n).abs() < 1e-9);
            assert!((row.discrepancy - 1.0 / n).abs() < 1e-9);
            assert!((row.radial_dev - 2f64.ln() / n).abs() < 1e-9);
            assert!(row.weyl[0] <= 4.0 * row.discrepancy + 1e-9);
        }
        assert!(r.trend.small);
        assert_eq!(r.trend.verdict, TrendVerdict::Decreasing);
    }

    #[test]
    fn constant_sequence_has_no_trend() {
        let seq = vec![AlgebraicNumber::integer(2); 5];
        let r = bilu_report(&seq).unwrap();
        assert!(!r.trend.small);
        assert_eq!(r.trend.verdict, TrendVerdict::NoTrend);
        assert_eq!(r.trend.method, "heuristic (monotone-majority)");
    }

    #[test]
    fn cyclotomic_primes() {
        let seq: Vec<_> = primes_below(60)
            .into_iter()
            .map(|p| AlgebraicNumber::root_of_unity(p, 1).unwrap())
            .collect();
        let r = bilu_report(&seq).unwrap();
        for (row, p) in r.rows.iter().zip(primes_below(60)) {
            assert_eq!(row.height, 0.0);
            assert!(row.discrepancy <= 4.0 / p as f64);
            assert!((row.discrepancy - 1.0 / p as f64).abs() < 1e-9);
            assert!(row.radial_dev < 1e-12);
        }
        assert!(r.trend.small);
        assert_eq!(r.trend.verdict, TrendVerdict::Decreasing);
    }

    #[test]
    fn csv_layout() {
        let m = orbit_measure(&radical("2", 3)).unwrap();
        let mut buf = Vec::new();
        write_orbit_csv(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,angle,radius,log_radius");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0,1.25992104989,"));

        let empty = bilu_report(&[]).unwrap();
        let mut buf = Vec::new();
        write_summary_csv(&empty, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "degree,height,discrepancy,weyl1,weyl2,weyl3,weyl4,weyl5,radial_dev\n"
        );
    }
}
