use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use smallpoints::algebraic::{AlgebraicNumber, TorusElement};
use smallpoints::dynamics::{n_function, HeightedSystem, NValue, StarParams};
use smallpoints::elliptic::{ECPoint, EllipticCurveQ};
use smallpoints::equidist::{star_discrepancy, weyl_sum, EmpiricalAngleMeasure};
use smallpoints::semiabelian::{AmbientVariety, SemiabelianPoint};

fn rational() -> impl Strategy<Value = BigRational> {
    (-100_000i64..=100_000, 1i64..=100_000)
        .prop_filter("nonzero", |(p, _)| *p != 0)
        .prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

fn ln_max(r: &BigRational) -> f64 {
    let m = r.numer().magnitude().max(r.denom().magnitude()).clone();
    m.to_string().parse::<f64>().unwrap().ln()
}

fn curve17() -> EllipticCurveQ {
    EllipticCurveQ::from_i64(0, 17).unwrap()
}

fn point17() -> impl Strategy<Value = ECPoint> {
    // Small combinations of two independent points on y^2 = x^3 + 17.
    (-2i64..=2, -2i64..=2).prop_map(|(a, b)| {
        let e = curve17();
        let p = e.mul_i64(a, &ECPoint::from_i64(-2, 3)).unwrap();
        let q = e.mul_i64(b, &ECPoint::from_i64(-1, 4)).unwrap();
        e.add(&p, &q).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_height_is_log_max(r in rational()) {
        let h = AlgebraicNumber::rational(&r).weil_height();
        prop_assert!((h - ln_max(&r)).abs() <= 1e-12);
        let inv = AlgebraicNumber::rational(&r.recip()).weil_height();
        prop_assert!((h - inv).abs() <= 1e-12);
    }

    #[test]
    fn radical_height_divides(p in 2i64..200, n in 1u32..16) {
        let q = BigRational::from_integer(BigInt::from(p));
        let a = AlgebraicNumber::radical(&q, n).unwrap();
        let want = (p as f64).ln() / n as f64;
        prop_assert!((a.weil_height() - want).abs() <= 1e-9);
        for r in a.conjugate_enclosures() {
            prop_assert!(r.radius < 1e-9);
            prop_assert!((r.center.norm() - (p as f64).powf(1.0 / n as f64)).abs() <= 1e-9);
        }
    }

    #[test]
    fn roots_of_unity_have_height_zero(n in 1u64..40, k in 1u64..40) {
        prop_assume!(num_integer::gcd(n, k) == 1 && k <= n);
        let z = AlgebraicNumber::root_of_unity(n, k).unwrap();
        prop_assert_eq!(z.weil_height(), 0.0);
        prop_assert_eq!(z.root_of_unity_order(), Some(n));
    }

    #[test]
    fn group_law_is_consistent(p in point17(), q in point17()) {
        let e = curve17();
        let s = e.add(&p, &q).unwrap();
        prop_assert!(e.contains(&s));
        prop_assert_eq!(&s, &e.add(&q, &p).unwrap());
        prop_assert_eq!(e.sub(&s, &q).unwrap(), p);
    }

    #[test]
    fn canonical_height_is_quadratic(p in point17(), k in 1i64..4) {
        let e = curve17();
        let tol = 1e-9;
        let h = e.canonical_height(&p, tol).unwrap();
        let hk = e.canonical_height(&e.mul_i64(k, &p).unwrap(), tol).unwrap();
        let k2 = (k * k) as f64;
        prop_assert!((hk.value - k2 * h.value).abs() <= hk.error + k2 * h.error);
        prop_assert!(h.value >= -h.error);
    }

    #[test]
    fn product_height_adds_components(p in point17(), r in rational()) {
        let a = AmbientVariety::new(curve17(), 1);
        let x = SemiabelianPoint { ec: p.clone(), torus: vec![TorusElement::rational(&r)] };
        let tol = 1e-9;
        let total = a.product_height(&x, tol).unwrap();
        let ec = curve17().canonical_height(&p, tol / 2.0).unwrap();
        let want = ec.value + ln_max(&r);
        prop_assert!((total.value - want).abs() <= total.error + ec.error + 1e-12);
        let y = a.add(&x, &x.neg()).unwrap();
        prop_assert_eq!(y, a.identity());
    }

    #[test]
    fn n_function_is_antitone_in_height(r1 in rational(), r2 in rational()) {
        let sys = HeightedSystem::torus_power(2, 0.0, StarParams::new(1, 5.0, 1.5).unwrap()).unwrap();
        let pt = |r: &BigRational| SemiabelianPoint::torus_only(vec![TorusElement::rational(r)]);
        let (h1, h2) = (ln_max(&r1), ln_max(&r2));
        let n1 = n_function(&sys, &pt(&r1), 64).unwrap();
        let n2 = n_function(&sys, &pt(&r2), 64).unwrap();
        let key = |v: NValue| v.range().0;
        if h1 > h2 + 1e-9 {
            prop_assert!(key(n1) <= key(n2));
        }
        if h1 > 0.0 {
            prop_assert!(n1.finite().is_some());
        } else {
            prop_assert_eq!(n1, NValue::Preperiodic);
        }
    }

    #[test]
    fn discrepancy_and_weyl_bounds(mut angles in prop::collection::vec(0.0f64..1.0, 1..60), k in 1u32..12) {
        angles.sort_by(f64::total_cmp);
        let n = angles.len() as f64;
        let m = EmpiricalAngleMeasure { radii: vec![1.0; angles.len()], angles, angle_error: 0.0 };
        let d = star_discrepancy(&m).unwrap();
        prop_assert!(d >= 1.0 / (2.0 * n) - 1e-15 && d <= 1.0);
        let w = weyl_sum(&m, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&w));
    }
}
