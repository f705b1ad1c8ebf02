use num_rational::BigRational;
use orthorec::analysis::{detect_sign_changes, fit_envelope_slope, SampledSequence};
use orthorec::inequalities::verify_inequality_suite;
use orthorec::series::{g_closed_form, g_series};
use orthorec::{ball_coefficients, exact_coefficients, io, Status};
use proptest::prelude::*;
use std::sync::OnceLock;

fn exact_table() -> &'static orthorec::ExactCoefficientTable {
    static T: OnceLock<orthorec::ExactCoefficientTable> = OnceLock::new();
    T.get_or_init(|| exact_coefficients(160).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_contain_exact_at_any_precision(prec in 48u32..200, n in 1usize..160) {
        let b = ball_coefficients(160, 1.0, prec).unwrap();
        prop_assert!(b.coeff(n).contains_rational(exact_table().coeff(n)));
        prop_assert!(b.partial_sums()[n].contains_rational(&exact_table().partial_sums()[n]));
    }

    #[test]
    fn exact_suite_passes_on_any_window(lo in 1usize..150, len in 0usize..10) {
        let hi = (lo + len).min(160);
        let r = verify_inequality_suite(exact_table(), lo, hi).unwrap();
        prop_assert_eq!(r.overall(), Status::Pass);
    }

    #[test]
    fn reported_sign_changes_are_genuine(values in prop::collection::vec(-1.0f64..1.0, 2..200)) {
        let seq = SampledSequence::new(values.clone()).unwrap();
        let r = detect_sign_changes(&seq);
        for w in r.indices.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for &n in &r.indices {
            prop_assert!(values[n] * values[n + 1] < 0.0);
        }
        let expected = values.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        prop_assert_eq!(r.indices.len(), expected);
    }

    #[test]
    fn power_laws_are_recovered(delta in 0.5f64..4.0, scale in 0.1f64..10.0) {
        let seq = SampledSequence::from_fn(300, |n| scale * (n.max(1) as f64).powf(-delta)).unwrap();
        let fit = fit_envelope_slope(&seq, 2, 300).unwrap();
        prop_assert!((fit.envelope_slope + delta).abs() < 1e-6);
    }

    #[test]
    fn g_strategies_agree(n in 0usize..40, num in 51i64..99) {
        let t = BigRational::new(num.into(), 100.into());
        let a = g_series(n, &t, 96).unwrap();
        let b = g_closed_form(n, &t, 96).unwrap();
        prop_assert!(a.overlaps(&b));
    }

    #[test]
    fn exact_csv_round_trips(n in 0usize..160) {
        let sub = orthorec::ExactCoefficientTable::from_coefficients(
            exact_table().coeffs()[..=n].to_vec(),
        ).unwrap();
        let mut buf = Vec::new();
        io::write_exact_csv(&sub, &mut buf).unwrap();
        prop_assert_eq!(io::read_exact_csv(&buf[..]).unwrap(), sub);
    }
}
