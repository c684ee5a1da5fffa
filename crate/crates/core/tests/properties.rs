mod common;

use proptest::prelude::*;

use qcusp::cli::{emit_series, emit_tower, parse_series, parse_tower, SeriesFile};
use qcusp::principles::detect_level;
use qcusp::tiltperf::{sharp, tower_add, tower_from_charp, tower_mul};
use qcusp::trace::tate_trace;
use qcusp::valuation::v1minus;
use qcusp::{CycloCoeff, Exponent, FracSeries, RingCtx, Valuation};

fn ctx(p: u64) -> qcusp::Ctx {
    RingCtx::new(p, 5, 2).unwrap()
}

fn pair(seed: u64, p: u64) -> (FracSeries, FracSeries, FracSeries) {
    let c = ctx(p);
    let mut rng = common::rng(seed);
    (
        common::series(&mut rng, &c, 2, 3, 5),
        common::series(&mut rng, &c, 2, 3, 5),
        common::series(&mut rng, &c, 2, 3, 5),
    )
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), p in prime()) {
        let (f, g, h) = pair(seed, p);
        prop_assert!(f.checked_add(&g).unwrap().eq_at_precision(&g.checked_add(&f).unwrap()));
        prop_assert!(f.checked_mul(&g).unwrap().eq_at_precision(&g.checked_mul(&f).unwrap()));
        let lhs = f.checked_mul(&g.checked_add(&h).unwrap()).unwrap();
        let rhs = f.checked_mul(&g).unwrap().checked_add(&f.checked_mul(&h).unwrap()).unwrap();
        prop_assert!(lhs.eq_at_precision(&rhs));
        let lhs = f.checked_mul(&g).unwrap().checked_mul(&h).unwrap();
        let rhs = f.checked_mul(&g.checked_mul(&h).unwrap()).unwrap();
        prop_assert!(lhs.eq_at_precision(&rhs));
        prop_assert!(f.checked_sub(&f).unwrap().is_zero());
    }

    #[test]
    fn coefficient_valuation_is_additive(seed in any::<u64>(), p in prime()) {
        let c = ctx(p);
        let mut rng = common::rng(seed);
        let a = common::coeff(&mut rng, &c, -2..=2);
        let b = common::coeff(&mut rng, &c, -2..=2);
        let ab = a.checked_mul(&b).unwrap();
        let expected = match (a.val_p().finite(), b.val_p().finite()) {
            (Some(x), Some(y)) => x + y,
            _ => unreachable!("nonzero coefficients"),
        };
        prop_assert_eq!(ab.val_p().finite(), Some(expected));
        // Only elements of integral valuation have a unit part that is a unit.
        match a.inv() {
            Ok(inv) => prop_assert_eq!(a.checked_mul(&inv).unwrap(), CycloCoeff::one(&c)),
            Err(_) => prop_assert!(!a.val_p().finite().unwrap().is_integer()),
        }
    }

    #[test]
    fn twist_is_an_automorphism(seed in any::<u64>(), p in prime(), h1 in -40i64..40, h2 in -40i64..40) {
        let (f, g, _) = pair(seed, p);
        let e = if p == 2 { 3 } else { 2 };
        let prod = f.checked_mul(&g).unwrap().twist(h1, e).unwrap();
        let split = f.twist(h1, e).unwrap().checked_mul(&g.twist(h1, e).unwrap()).unwrap();
        prop_assert!(prod.eq_at_precision(&split));
        let sum = f.checked_add(&g).unwrap().twist(h1, e).unwrap();
        prop_assert!(sum.eq_at_precision(&f.twist(h1, e).unwrap().checked_add(&g.twist(h1, e).unwrap()).unwrap()));
        let twice = f.twist(h1, e).unwrap().twist(h2, e).unwrap();
        prop_assert_eq!(twice, f.twist(h1 + h2, e).unwrap());
        prop_assert_eq!(f.twist(0, e).unwrap(), f);
    }

    #[test]
    fn trace_is_linear_over_lower_level(seed in any::<u64>(), p in prime(), n in 0u32..=2) {
        let (f, g, h) = pair(seed, p);
        let sum = tate_trace(&f.checked_add(&g).unwrap(), n).unwrap();
        let parts = tate_trace(&f, n).unwrap().checked_add(&tate_trace(&g, n).unwrap()).unwrap();
        prop_assert!(sum.eq_at_precision(&parts));
        let low = tate_trace(&h, n).unwrap();
        prop_assert!(detect_level(&low).unwrap() <= n);
        let lhs = tate_trace(&low.checked_mul(&f).unwrap(), n).unwrap();
        let rhs = low.checked_mul(&tate_trace(&f, n).unwrap()).unwrap();
        prop_assert!(lhs.eq_at_precision(&rhs));
    }

    #[test]
    fn series_file_round_trip(seed in any::<u64>(), p in prime()) {
        let (f, _, _) = pair(seed, p);
        let file = SeriesFile::frac(f);
        let text = emit_series(&file);
        let back = parse_series(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(emit_series(&back), text.clone());
        let mut rng = common::rng(seed ^ 1);
        prop_assert_eq!(parse_series(&common::shuffle_terms(&text, &mut rng)).unwrap(), file);
    }

    #[test]
    fn laurent_round_trip_and_value(seed in any::<u64>(), p in prime()) {
        let c = RingCtx::new(p, 4, 0).unwrap();
        let mut rng = common::rng(seed);
        let f = common::laurent(&mut rng, &c, -3, 3, 5, -1..=2);
        let file = SeriesFile::frac(f.clone());
        prop_assert_eq!(parse_series(&emit_series(&file)).unwrap(), file);
        let g = common::laurent(&mut rng, &c, -3, 3, 5, -1..=2);
        let fg = f.checked_mul(&g).unwrap();
        // Multiplicative as long as the leading product is still known.
        let expected = v1minus(&f).unwrap() + v1minus(&g).unwrap();
        if expected.v < Valuation::integer(fg.abs_prec()) && Exponent::integer(expected.g) <= fg.deg_bound() {
            prop_assert_eq!(v1minus(&fg).unwrap(), expected);
        }
    }

    #[test]
    fn tower_arithmetic(seed in any::<u64>(), p in prime()) {
        let mut rng = common::rng(seed);
        let x = tower_from_charp(&common::charp(&mut rng, p, 1, 3, 5), 3).unwrap();
        let y = tower_from_charp(&common::charp(&mut rng, p, 1, 3, 5), 3).unwrap();
        let sum = tower_add(&x, &y).unwrap();
        prop_assert_eq!(sum.effective_depth(), 3);
        prop_assert_eq!(sharp(&sum), &sharp(&x).checked_add(sharp(&y)).unwrap());
        prop_assert_eq!(tower_mul(&x, &y).unwrap(), tower_mul(&y, &x).unwrap());
        prop_assert_eq!(parse_tower(&emit_tower(&x)).unwrap(), x);
        let g = sharp(&y).clone();
        prop_assert_eq!(g.frobenius().checked_mul(&g.frobenius()).unwrap(), g.checked_mul(&g).unwrap().frobenius());
    }
}
