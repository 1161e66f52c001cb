use elliptic::exactcore::{format_rational, parse_rational, rat, Cyclotomic, ExactMatrix, Rational};
use elliptic::series::decimal::{parse_decimal_rational, rational_to_decimal};
use elliptic::series::{QJet, QSeries, Scalar};
use elliptic::DoubleDouble;
use num_complex::Complex;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-30i64..30, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

/// Element of ℚ(ζ_n) as a random combination of powers of ζ_n.
fn cyc(n: u32) -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec(small_rat(), n as usize).prop_map(move |cs| {
        cs.iter()
            .enumerate()
            .fold(Cyclotomic::zero(), |acc, (k, c)| &acc + &Cyclotomic::root_of_unity(n, k as i64).scale(c))
    })
}

fn series(den: u32) -> impl Strategy<Value = QSeries<f64>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..8)
        .prop_map(move |cs| QSeries::from_terms(den, 10, cs.into_iter().enumerate().map(|(i, (re, im))| (i as i64, Complex::new(re, im)))))
}

proptest! {
    #[test]
    fn rational_text_round_trip(r in small_rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn cyclotomic_field_laws(a in cyc(6), b in cyc(6), c in cyc(6)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert!((&a * &inv).is_one());
        }
        let z = (&a * &b).to_complex() - a.to_complex() * b.to_complex();
        prop_assert!(z.norm() < 1e-9 * (1.0 + a.to_complex().norm() * b.to_complex().norm()));
    }

    #[test]
    fn roots_of_unity_multiply(n in 1u32..13, j in -20i64..20, k in -20i64..20) {
        let p = &Cyclotomic::root_of_unity(n, j) * &Cyclotomic::root_of_unity(n, k);
        prop_assert_eq!(p, Cyclotomic::root_of_unity(n, j + k));
    }

    #[test]
    fn exact_inverse(entries in prop::collection::vec(-5i64..6, 9)) {
        let m = ExactMatrix::from_ints(&entries.chunks(3).map(|r| r.to_vec()).collect::<Vec<_>>());
        if let Ok(inv) = m.inverse() {
            prop_assert_eq!(m.try_mul(&inv).unwrap(), ExactMatrix::identity(3));
        } else {
            prop_assert!(m.determinant().is_zero());
        }
    }

    #[test]
    fn decimal_text_is_exact_at_enough_digits(n in -10_000i64..10_000, d in 1i64..1000) {
        let r = rat(n, d);
        let s = rational_to_decimal(&r, 60);
        let back = parse_decimal_rational(&s).unwrap();
        let err = (&back - &r) / if r.is_zero() { Rational::one() } else { r.clone() };
        prop_assert!(err.numer().bits() + 190 < err.denom().bits() || err.is_zero());
    }

    #[test]
    fn double_double_decimal_round_trip(a in -1e6f64..1e6, b in 1e-3f64..1e3, e in -40i32..40) {
        let x = elliptic::exactcore::fdiv(DoubleDouble::from(a), DoubleDouble::from(b)) * DoubleDouble::from(10f64.powi(e));
        let s = x.to_decimal();
        prop_assert_eq!(DoubleDouble::parse_decimal(&s), Some(x));
    }

    #[test]
    fn f64_decimal_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(f64::parse_decimal(&x.to_decimal()), Some(x));
    }

    #[test]
    fn qseries_ring_laws(a in series(2), b in series(2), c in series(2)) {
        let close = |x: &QSeries<f64>, y: &QSeries<f64>| x.sub_ref(y).max_abs() < 1e-9 * (1.0 + x.max_abs());
        prop_assert!(close(&a.mul_ref(&b), &b.mul_ref(&a)));
        prop_assert!(close(&a.mul_ref(&b).mul_ref(&c), &a.mul_ref(&b.mul_ref(&c))));
        prop_assert!(close(&a.mul_ref(&b.add_ref(&c)), &a.mul_ref(&b).add_ref(&a.mul_ref(&c))));
        prop_assert!(close(&a.mul_ref(&QSeries::one(2)), &a));
        prop_assert_eq!(a.mul_ref(&b).prec(), 10);
    }

    #[test]
    fn qseries_inverse(a in series(1)) {
        let lead = a.coeff(0).norm();
        prop_assume!(lead > 0.5);
        let inv = a.inv(1e-12).unwrap();
        let one = a.mul_ref(&inv);
        prop_assert!(one.sub_ref(&QSeries::one(1)).max_abs() < 1e-6 * (1.0 + inv.max_abs()));
    }

    #[test]
    fn qjet_exchange_round_trip(cs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..5)) {
        let weights = vec![1, 1, 2];
        let x = QJet::<f64>::variable(weights.clone(), 4, 2, 0);
        let y = QJet::<f64>::variable(weights.clone(), 4, 2, 2);
        let s = QSeries::from_terms(2, 12, cs.into_iter().enumerate().map(|(i, (re, im))| (i as i64, Complex::new(re, im))));
        let j = x.mul_ref(&y).scale_series(&s).add_ref(&x.pow(3));
        let rows = j.exchange_rows();
        let back = QJet::<f64>::from_exchange_rows(weights, 4, 2, 12, rows.iter().map(String::as_str)).unwrap();
        prop_assert_eq!(back.exchange_rows(), rows);
        prop_assert!(j.drift(&back) == 0.0);
    }
}
