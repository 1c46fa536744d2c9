//! Certified complex roots of integer polynomials.
//!
//! Approximations come from simultaneous Aberth iteration in `f64`; each
//! approximation `z_k` is then certified with the inclusion disk
//! `D(z_k, d |W_k|)`, `W_k = p(z_k) / (c_d prod_{j != k} (z_k - z_j))`.
//! The union of those disks contains every root and a connected component made
//! of `m` disks holds exactly `m` roots, so pairwise-disjoint disks isolate the
//! roots one by one. `|p(z_k)|` is replaced by an upper bound that includes
//! the rounding error of the Horner evaluation.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::IntPolynomial;
use super::AlgebraicError;

/// Disk `{ z : |z - center| <= radius }` holding exactly one root of the
/// associated squarefree polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRoot {
    pub center: Complex64,
    pub radius: f64,
}

impl CertifiedRoot {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn is_real(&self) -> bool {
        self.center.im == 0.0
    }

    fn overlaps(&self, other: &CertifiedRoot) -> bool {
        (self.center - other.center).norm() <= self.radius + other.radius
    }
}

const MAX_SWEEPS: usize = 200;
const POLISH_SWEEPS: usize = 50;
const UNIT_ROUNDOFF: f64 = f64::EPSILON * 0.5;

/// All `d` roots of `p`, with multiplicity, each enclosed in a disk of radius
/// at most `eps`, sorted by `(re, im)` of the centers.
pub fn roots(p: &IntPolynomial, eps: f64) -> Result<Vec<CertifiedRoot>, AlgebraicError> {
    let all = roots_best_effort(p)?;
    let worst = all.iter().map(|r| r.radius).fold(0.0, f64::max);
    if worst > eps {
        return Err(AlgebraicError::NonConvergence {
            achieved: worst,
            requested: eps,
        });
    }
    Ok(all)
}

/// Like [`roots`] but returns whatever radius the `f64` iteration certifies.
pub fn roots_best_effort(p: &IntPolynomial) -> Result<Vec<CertifiedRoot>, AlgebraicError> {
    if p.is_zero() {
        return Err(AlgebraicError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(AlgebraicError::ConstantPolynomial);
    }
    let mut out = Vec::with_capacity(p.degree());
    for (factor, mult) in p.squarefree_decomposition() {
        let rs = squarefree_roots(&factor)?;
        for _ in 0..mult {
            out.extend_from_slice(&rs);
        }
    }
    sort_roots(&mut out);
    Ok(out)
}

pub(crate) fn sort_roots(rs: &mut [CertifiedRoot]) {
    rs.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
}

/// Roots of a squarefree polynomial, pairwise disjoint and sorted.
pub(crate) fn squarefree_roots(p: &IntPolynomial) -> Result<Vec<CertifiedRoot>, AlgebraicError> {
    let coeffs = p.to_f64_coeffs();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(AlgebraicError::CoefficientOverflow);
    }
    let d = p.degree();
    if d == 1 {
        let center = -coeffs[0] / coeffs[1];
        let radius = 2.0 * UNIT_ROUNDOFF * center.abs();
        return Ok(vec![CertifiedRoot {
            center: Complex64::new(normalize_zero(center), 0.0),
            radius,
        }]);
    }
    // Zero roots are exact; strip them so the iteration sees a nonzero constant term.
    let zeros = coeffs.iter().take_while(|c| **c == 0.0).count();
    let mut out: Vec<CertifiedRoot> = (0..zeros)
        .map(|_| CertifiedRoot {
            center: Complex64::zero(),
            radius: 0.0,
        })
        .collect();
    if zeros > 0 {
        let rest: Vec<_> = p.coeffs()[zeros..].to_vec();
        if rest.len() > 1 {
            out.extend(squarefree_roots(&IntPolynomial::new(rest))?);
        }
        sort_roots(&mut out);
        return Ok(out);
    }

    let mut z = aberth(&coeffs, MAX_SWEEPS);
    let mut certified = certify(&coeffs, &z);
    if certified.is_none() {
        z = aberth_from(&coeffs, z, POLISH_SWEEPS);
        certified = certify(&coeffs, &z);
    }
    let mut rs = match certified {
        Some(rs) => rs,
        None => bisection_fallback(&coeffs, &z)?,
    };
    sort_roots(&mut rs);
    Ok(rs)
}

fn normalize_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Starting points: perturbed uniform spread on the circle whose radius is
/// the geometric mean of the root moduli, `|c_0 / c_d|^(1/d)`.
fn initial_points(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let radius = (c[0].abs() / c[d].abs()).powf(1.0 / d as f64);
    (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (d as f64) + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth(c: &[f64], sweeps: usize) -> Vec<Complex64> {
    aberth_from(c, initial_points(c), sweeps)
}

fn aberth_from(c: &[f64], mut z: Vec<Complex64>, sweeps: usize) -> Vec<Complex64> {
    let d = z.len();
    let rev: Vec<f64> = c.iter().rev().copied().collect();
    // A root stops moving once its step is at rounding level.
    let mut done = vec![false; d];
    for _ in 0..sweeps {
        for k in 0..d {
            if done[k] {
                continue;
            }
            let ratio = newton_ratio(c, &rev, z[k]);
            if !ratio.is_finite() {
                continue;
            }
            let mut s = Complex64::zero();
            for j in 0..d {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff != Complex64::zero() {
                        s += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let step = if denom.norm() > 0.0 { ratio / denom } else { ratio };
            if step.is_finite() {
                z[k] -= step;
                let rel = step.norm() / z[k].norm().max(1e-300);
                done[k] = rel < 4.0 * f64::EPSILON;
            }
        }
        if done.iter().all(|&x| x) {
            break;
        }
    }
    z
}

/// `p(z) / p'(z)`, evaluated through the reversed polynomial `rev` when
/// `|z| > 1` so that high degrees never overflow.
fn newton_ratio(c: &[f64], rev: &[f64], z: Complex64) -> Complex64 {
    let d = c.len() - 1;
    if z.norm() <= 1.0 {
        let (p, dp) = horner_with_derivative(c, z);
        p / dp
    } else {
        let w = z.inv();
        let (r, dr) = horner_with_derivative(rev, w);
        // p(z) = z^d r(w), p'(z) = z^(d-1) (d r(w) - w r'(w))
        z * r / (Complex64::new(d as f64, 0.0) * r - w * dr)
    }
}

fn horner_with_derivative(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// `log |p(z)|` upper bound including Horner rounding error.
fn log_residual_bound(c: &[f64], z: Complex64) -> f64 {
    let d = c.len() - 1;
    let gamma = (4.0 * d as f64 + 4.0) * UNIT_ROUNDOFF;
    let abs: Vec<f64> = c.iter().map(|x| x.abs()).collect();
    if z.norm() <= 1.0 {
        let mut p = Complex64::zero();
        let mut s = 0.0;
        for (&a, &m) in c.iter().rev().zip(abs.iter().rev()) {
            p = p * z + a;
            s = s * z.norm() + m;
        }
        (p.norm() + gamma * s).ln()
    } else {
        let w = z.inv();
        let mut r = Complex64::zero();
        let mut s = 0.0;
        for (&a, &m) in c.iter().zip(abs.iter()) {
            r = r * w + a;
            s = s * w.norm() + m;
        }
        (r.norm() + gamma * s).ln() + d as f64 * z.norm().ln()
    }
}

fn inclusion_radii(c: &[f64], z: &[Complex64]) -> Vec<f64> {
    let d = z.len();
    let log_lead = c[d].abs().ln();
    (0..d)
        .map(|k| {
            let mut log_prod = 0.0;
            for j in 0..d {
                if j != k {
                    log_prod += (z[k] - z[j]).norm().ln();
                }
            }
            let log_r = (d as f64).ln() + log_residual_bound(c, z[k]) - log_lead - log_prod;
            log_r.exp() * (1.0 + 1e-9)
        })
        .collect()
}

/// Symmetrises the approximations under complex conjugation, then certifies.
/// Returns `None` when the disks are not pairwise disjoint.
fn certify(c: &[f64], z: &[Complex64]) -> Option<Vec<CertifiedRoot>> {
    if z.iter().any(|w| !w.is_finite()) {
        return None;
    }
    let raw = inclusion_radii(c, z);
    let sym = symmetrize(z, &raw).unwrap_or_else(|| z.to_vec());
    let radii = inclusion_radii(c, &sym);
    let mut rs: Vec<CertifiedRoot> = sym
        .iter()
        .zip(&radii)
        .map(|(&center, &radius)| CertifiedRoot { center, radius })
        .collect();
    // Conjugate disks share the larger radius so the set stays symmetric.
    for i in 0..rs.len() {
        if rs[i].center.im > 0.0 {
            let partner = rs[i].center.conj();
            if let Some(j) = rs.iter().position(|r| r.center == partner) {
                let m = rs[i].radius.max(rs[j].radius);
                rs[i].radius = m;
                rs[j].radius = m;
            }
        }
    }
    if !rs.iter().all(|r| r.radius.is_finite()) {
        return None;
    }
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            if rs[i].overlaps(&rs[j]) {
                return None;
            }
        }
    }
    Some(rs)
}

/// Pairs every approximation with its conjugate. Near-real approximations
/// become exactly real; pairs become exact conjugates.
fn symmetrize(z: &[Complex64], radii: &[f64]) -> Option<Vec<Complex64>> {
    let d = z.len();
    let mut out = z.to_vec();
    let mut used = vec![false; d];
    for k in 0..d {
        if z[k].im.abs() <= 2.0 * radii[k] {
            out[k] = Complex64::new(z[k].re, 0.0);
            used[k] = true;
        }
    }
    for k in 0..d {
        if used[k] || z[k].im < 0.0 {
            continue;
        }
        let target = z[k].conj();
        let j = (0..d)
            .filter(|&j| !used[j] && j != k && z[j].im < 0.0)
            .min_by(|&a, &b| (z[a] - target).norm().total_cmp(&(z[b] - target).norm()))?;
        let avg = (z[k] + z[j].conj()) * 0.5;
        out[k] = avg;
        out[j] = avg.conj();
        used[k] = true;
        used[j] = true;
    }
    if used.iter().all(|&u| u) {
        Some(out)
    } else {
        None
    }
}

fn eval_real(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Real roots whose disks could not be separated are re-isolated by bisection
/// on sign changes; the certificate is then the bracketing interval.
fn bisection_fallback(c: &[f64], z: &[Complex64]) -> Result<Vec<CertifiedRoot>, AlgebraicError> {
    let radii = inclusion_radii(c, z);
    let sym = symmetrize(z, &radii).ok_or(AlgebraicError::NonConvergence {
        achieved: f64::INFINITY,
        requested: 0.0,
    })?;
    let mut out = Vec::with_capacity(sym.len());
    let mut complex_centers = Vec::new();
    for (k, &w) in sym.iter().enumerate() {
        if w.im != 0.0 {
            complex_centers.push((w, radii[k]));
            continue;
        }
        let mut half = radii[k].max(1e-12 * w.re.abs().max(1.0));
        let (mut lo, mut hi) = (w.re - half, w.re + half);
        let mut tries = 0;
        while eval_real(c, lo).signum() == eval_real(c, hi).signum() && tries < 40 {
            half *= 2.0;
            lo = w.re - half;
            hi = w.re + half;
            tries += 1;
        }
        let (mut flo, fhi) = (eval_real(c, lo), eval_real(c, hi));
        if flo.signum() == fhi.signum() {
            return Err(AlgebraicError::NonConvergence {
                achieved: half,
                requested: 0.0,
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = eval_real(c, mid);
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        out.push(CertifiedRoot {
            center: Complex64::new(0.5 * (lo + hi), 0.0),
            radius: 0.5 * (hi - lo),
        });
    }
    for (w, r) in complex_centers {
        out.push(CertifiedRoot { center: w, radius: r });
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if out[i].overlaps(&out[j]) {
                return Err(AlgebraicError::NonConvergence {
                    achieved: out[i].radius.max(out[j].radius),
                    requested: 0.0,
                });
            }
        }
    }
    Ok(out)
}

/// `|p(center)|` evaluated in `f64`, for residual diagnostics.
pub fn residual(p: &IntPolynomial, z: Complex64) -> f64 {
    log_residual_bound(&p.to_f64_coeffs(), z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn sqrt_two() {
        let rs = roots(&p(&[-2, 0, 1]), 1e-12).unwrap();
        assert_eq!(rs.len(), 2);
        assert!((rs[0].center.re + 2f64.sqrt()).abs() < 1e-14);
        assert!((rs[1].center.re - 2f64.sqrt()).abs() < 1e-14);
        assert!(rs.iter().all(|r| r.is_real()));
    }

    #[test]
    fn plus_minus_i() {
        let rs = roots(&p(&[1, 0, 1]), 1e-12).unwrap();
        assert_eq!(rs[0].center, Complex64::new(0.0, rs[0].center.im));
        assert!((rs[0].center.im + 1.0).abs() < 1e-14);
        assert!((rs[1].center.im - 1.0).abs() < 1e-14);
        assert_eq!(rs[0].center.re, rs[1].center.re);
    }

    #[test]
    fn lehmer_has_one_root_outside_unit_circle() {
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let rs = roots(&lehmer, 1e-12).unwrap();
        assert_eq!(rs.len(), 10);
        let outside: Vec<_> = rs.iter().filter(|r| r.center.norm() > 1.0 + 1e-9).collect();
        assert_eq!(outside.len(), 1);
        // frozen from the 60-digit oracle in tests/oracles/oracle.py
        assert!((outside[0].center.re - 1.17628081825991750654).abs() < 1e-12);
    }

    #[test]
    fn repeated_roots_are_reported_with_multiplicity() {
        // (x - 1)^2 (x + 2)
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1]));
        let rs = roots(&f, 1e-12).unwrap();
        assert_eq!(rs.len(), 3);
        assert!((rs[0].center.re + 2.0).abs() < 1e-14);
        assert!((rs[1].center.re - 1.0).abs() < 1e-14);
        assert_eq!(rs[1], rs[2]);
    }

    #[test]
    fn zero_root_is_exact() {
        let rs = roots(&p(&[0, -2, 0, 1]), 1e-12).unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs[1].center, Complex64::zero());
        assert_eq!(rs[1].radius, 0.0);
    }

    #[test]
    fn high_degree_radical() {
        let mut c = vec![0i64; 201];
        c[0] = -2;
        c[200] = 1;
        let rs = roots(&p(&c), 1e-10).unwrap();
        let target = 2f64.powf(1.0 / 200.0);
        for r in &rs {
            assert!((r.center.norm() - target).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            roots(&IntPolynomial::zero(), 1e-9),
            Err(AlgebraicError::ZeroPolynomial)
        ));
    }

    #[test]
    fn too_small_eps_reports_achieved_radius() {
        match roots(&p(&[-2, 0, 1]), 1e-300) {
            Err(AlgebraicError::NonConvergence { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
