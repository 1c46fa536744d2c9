//! Irreducibility over `Q` for candidate minimal polynomials.
//!
//! Cheap certificates first (degree 1, Eisenstein, modular degree patterns);
//! whatever degrees survive are settled by trial factorisation: every
//! conjugation-closed subset of the roots of a surviving size is multiplied
//! out, rounded to integers and tested by exact division.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modular;
use super::poly::IntPolynomial;
use super::roots::squarefree_roots;
use super::AlgebraicError;

/// Upper bound on subsets tried by the trial factorisation.
const SUBSET_BUDGET: u64 = 400_000;

/// `Ok(())` if `p` is irreducible over `Q`; `Reducible` with a found factor,
/// or `IrreducibilityUnverified` when the search budget is exhausted.
pub fn check_irreducible(p: &IntPolynomial) -> Result<(), AlgebraicError> {
    let d = p.degree();
    if p.is_zero() || d == 0 {
        return Err(AlgebraicError::ConstantPolynomial);
    }
    if d == 1 {
        return Ok(());
    }
    if !p.content().is_one() {
        return Err(AlgebraicError::Reducible {
            factor: IntPolynomial::new(vec![p.content()]),
        });
    }
    if !p.is_squarefree() {
        let g = p.gcd(&p.derivative());
        return Err(AlgebraicError::Reducible { factor: g });
    }
    if p.coeff(0).is_zero() {
        return Err(AlgebraicError::Reducible {
            factor: IntPolynomial::x(),
        });
    }
    if eisenstein(p) || eisenstein(&p.reversed()) {
        return Ok(());
    }
    let candidates = candidate_degrees(p);
    if candidates.is_empty() {
        return Ok(());
    }
    trial_factor(p, &candidates)
}

fn eisenstein(p: &IntPolynomial) -> bool {
    let d = p.degree();
    let lower = p.coeffs()[..d].iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if lower.is_zero() {
        return false;
    }
    let mut g = lower.abs();
    // Only small primes of the common content are tried.
    for q in crate::numeric::primes_below(10_000) {
        let qb = BigInt::from(q);
        if g.is_one() {
            break;
        }
        if !(&g % &qb).is_zero() {
            continue;
        }
        while (&g % &qb).is_zero() {
            g /= &qb;
        }
        let lead_ok = !(p.leading() % &qb).is_zero();
        let const_ok = !(p.coeff(0) % (&qb * &qb)).is_zero();
        if lead_ok && const_ok {
            return true;
        }
    }
    false
}

/// Proper factor degrees `k <= d / 2` compatible with the factorisation
/// patterns modulo several good primes.
fn candidate_degrees(p: &IntPolynomial) -> Vec<usize> {
    let d = p.degree();
    let mut allowed = vec![true; d + 1];
    let mut good = 0;
    for &q in modular::SMALL_PRIMES.iter() {
        let Some(degs) = modular::factor_degrees(p, q) else {
            continue;
        };
        good += 1;
        let sums = modular::subset_sums(&degs);
        for k in 0..=d {
            allowed[k] &= sums[k];
        }
        let open = (1..d).any(|k| allowed[k]);
        if !open || good >= 12 {
            break;
        }
    }
    (1..=d / 2).filter(|&k| allowed[k]).collect()
}

fn trial_factor(p: &IntPolynomial, degrees: &[usize]) -> Result<(), AlgebraicError> {
    let rs = squarefree_roots(p)?;
    // Units: a real root, or a conjugate pair (index of the upper member).
    let mut units: Vec<Vec<Complex64>> = Vec::new();
    for r in &rs {
        if r.center.im == 0.0 {
            units.push(vec![r.center]);
        } else if r.center.im > 0.0 {
            units.push(vec![r.center, r.center.conj()]);
        }
    }
    let lead = p.leading().to_f64().unwrap_or(f64::INFINITY);
    let mut budget = SUBSET_BUDGET;
    for &k in degrees {
        let mut chosen = Vec::new();
        if let Some(f) = search(p, &units, 0, k, &mut chosen, lead, &mut budget)? {
            return Err(AlgebraicError::Reducible { factor: f });
        }
    }
    Ok(())
}

fn search(
    p: &IntPolynomial,
    units: &[Vec<Complex64>],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<Complex64>,
    lead: f64,
    budget: &mut u64,
) -> Result<Option<IntPolynomial>, AlgebraicError> {
    if remaining == 0 {
        if *budget == 0 {
            return Err(AlgebraicError::IrreducibilityUnverified { degree: p.degree() });
        }
        *budget -= 1;
        return Ok(test_subset(p, chosen, lead));
    }
    for i in start..units.len() {
        let u = &units[i];
        if u.len() > remaining {
            continue;
        }
        chosen.extend_from_slice(u);
        let found = search(p, units, i + 1, remaining - u.len(), chosen, lead, budget)?;
        chosen.truncate(chosen.len() - u.len());
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// `lead * prod (x - r)`, rounded; a factor of `p` if it divides exactly.
fn test_subset(p: &IntPolynomial, roots: &[Complex64], lead: f64) -> Option<IntPolynomial> {
    let mut c = vec![Complex64::new(lead, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::zero(); c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    let mut coeffs = Vec::with_capacity(c.len());
    for a in &c {
        let rounded = a.re.round();
        if (a.re - rounded).abs() > 0.25 || !rounded.is_finite() {
            return None;
        }
        coeffs.push(BigInt::from(rounded as i128));
    }
    let cand = IntPolynomial::new(coeffs).canonical();
    if cand.degree() == 0 || cand.degree() == p.degree() {
        return None;
    }
    if p.divisible_over_q(&cand) {
        Some(cand)
    } else {
        None
    }
}

/// Product of the given monic linear factors, for tests.
#[cfg(test)]
fn from_roots(rs: &[i64]) -> IntPolynomial {
    rs.iter().fold(IntPolynomial::one(), |acc, &r| {
        acc.mul(&IntPolynomial::from_i64(&[-r, 1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::cyclotomic::cyclotomic;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn irreducible_examples() {
        assert!(check_irreducible(&p(&[-2, 0, 1])).is_ok());
        assert!(check_irreducible(&p(&[1, 0, 0, 0, 1])).is_ok()); // x^4 + 1
        assert!(check_irreducible(&p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])).is_ok());
        assert!(check_irreducible(&p(&[-2, 3])).is_ok());
        for n in [5u64, 7, 12, 15, 30, 199] {
            assert!(check_irreducible(&cyclotomic(n)).is_ok(), "Phi_{n}");
        }
    }

    #[test]
    fn reducible_examples_report_a_factor() {
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2)
        match check_irreducible(&p(&[4, 0, 0, 0, 1])) {
            Err(AlgebraicError::Reducible { factor }) => {
                assert_eq!(factor.degree(), 2);
                assert!(p(&[4, 0, 0, 0, 1]).divisible_over_q(&factor));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            check_irreducible(&p(&[-4, 0, 1])),
            Err(AlgebraicError::Reducible { .. })
        ));
        assert!(matches!(
            check_irreducible(&from_roots(&[1, 2, 3])),
            Err(AlgebraicError::Reducible { .. })
        ));
        // x^6 - 1 is squarefree but splits into cyclotomic pieces.
        assert!(matches!(
            check_irreducible(&p(&[-1, 0, 0, 0, 0, 0, 1])),
            Err(AlgebraicError::Reducible { .. })
        ));
    }

    #[test]
    fn non_primitive_rejected() {
        assert!(matches!(
            check_irreducible(&p(&[2, 0, 2])),
            Err(AlgebraicError::Reducible { .. })
        ));
    }
}
