use std::cmp::Ordering;

use dwrs::cf::{alpha_enclosure, convergents, PartialQuotients, Tau};
use dwrs::complexity::words::{plug_in_entropy, WordTable};
use dwrs::rotation::{code_symbol, walk, Angle, Linear};
use dwrs::scenery::{displacement, LabelWord};
use dwrs::system::{Config, System};
use dwrs::{Int, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn tau_half() -> System {
    System::for_tau(Tau::new(1, 2).unwrap(), Config::default()).unwrap()
}

fn golden() -> System {
    System::golden(Config::default()).unwrap()
}

fn theta(num: u64, den: u64) -> Angle {
    Angle::rational(Rational::new(BigInt::from(num), BigInt::from(den)))
}

fn digits() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..40, 3..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn displacement_steps_by_the_coding_symbol(num in 0u64..997, i in 0u64..3000) {
        let g = golden();
        let th = theta(num, 997);
        let d0 = displacement(&g, &th, i).unwrap();
        let d1 = displacement(&g, &th, i + 1).unwrap();
        prop_assert_eq!(d1 - d0, code_symbol(&g, &th, i as i64).unwrap() as i64);
    }

    #[test]
    fn half_turn_flips_the_walk(num in 0u64..1009, m in -500i64..500, len in 0i64..5000) {
        let t = tau_half();
        let th = theta(num, 1009);
        let a = walk(&t, &th, m, m + len).unwrap();
        let b = walk(&t, &th.add_half(), m, m + len).unwrap();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn walk_is_additive(num in 1u64..1_000_003, m in 0i64..20_000, a in 0i64..20_000, b in 1i64..20_000) {
        let t = tau_half();
        let th = theta(num, 1_000_003);
        let whole = walk(&t, &th, m, m + a + b).unwrap();
        let split = walk(&t, &th, m, m + a).unwrap() + walk(&t, &th, m + a + 1, m + a + b).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn walk_shifts_with_the_rotation(num in 1u64..10_007, j in -300i64..300, n in 0i64..2000) {
        let g = golden();
        let th = theta(num, 10_007);
        let direct = walk(&g, &th, j, j + n).unwrap();
        let moved = walk(&g, &th.shift_alpha(j), 0, n).unwrap();
        prop_assert_eq!(direct, moved);
    }

    #[test]
    fn long_sums_agree_with_symbolwise_sums(num in 1u64..1_000_003, start in 0i64..40_000) {
        let t = tau_half();
        let th = theta(num, 1_000_003);
        let n = 20_000;
        let mut by_symbol = 0i64;
        for i in start..=start + n {
            by_symbol += code_symbol(&t, &th, i).unwrap() as i64;
        }
        prop_assert_eq!(walk(&t, &th, start, start + n).unwrap(), by_symbol);
    }

    #[test]
    fn enclosures_shrink_and_nest(ds in digits()) {
        let big: Vec<Int> = ds.iter().map(|&d| Int::from(d)).collect();
        let pq = PartialQuotients::explicit(big).unwrap();
        let mut prev = alpha_enclosure(&pq, 1).unwrap();
        for d in 2..ds.len() {
            let e = alpha_enclosure(&pq, d).unwrap();
            prop_assert!(e.lo >= prev.lo && e.hi <= prev.hi);
            prop_assert!(e.width() < prev.width());
            prev = e;
        }
    }

    #[test]
    fn convergent_ratios_lie_between_digits(ds in digits()) {
        let big: Vec<Int> = ds.iter().map(|&d| Int::from(d)).collect();
        let c = convergents(&big, big.len());
        for n in 1..big.len() {
            let (q, next) = (&c[n].q, &c[n + 1].q);
            let a = &big[n];
            prop_assert!(a * q <= *next);
            prop_assert!(*next <= (a + 1u32) * q);
        }
    }

    #[test]
    fn approximation_errors_alternate_in_sign(ds in digits()) {
        let big: Vec<Int> = ds.iter().map(|&d| Int::from(d)).collect();
        let sys = System::from_digits(big.clone(), Config::default()).unwrap();
        for n in 0..big.len().saturating_sub(3) {
            let p = Rational::from_integer(BigInt::from(sys.p(n).unwrap().clone()));
            let q = Rational::from_integer(BigInt::from(sys.q(n).unwrap().clone()));
            let e = Linear::new(-p, q);
            let expect = if n % 2 == 0 { Ordering::Greater } else { Ordering::Less };
            prop_assert_eq!(e.sign(&sys).unwrap(), expect);
        }
    }

    #[test]
    fn word_counts_are_monotone_and_bound_entropy(words in prop::collection::vec(prop::collection::vec(any::<bool>(), 70), 1..60)) {
        let times: Vec<u64> = (0..70).collect();
        let ws: Vec<LabelWord> = words.iter().map(|w| LabelWord::new(times.clone(), w).unwrap()).collect();
        let t = WordTable::new(&ws).unwrap();
        let mut last = 0;
        for k in 0..=70 {
            let d = t.distinct(k);
            prop_assert!(d >= last);
            let mut oracle: Vec<&[bool]> = words.iter().map(|w| &w[..k]).collect();
            oracle.sort();
            oracle.dedup();
            prop_assert_eq!(d, oracle.len());
            let h: f64 = plug_in_entropy(&t.class_sizes(k));
            prop_assert!(h >= 0.0 && h <= (d as f64).ln() + 1e-12);
            last = d;
        }
    }
}

#[test]
fn golden_enclosure_brackets_the_limit() {
    let pq = PartialQuotients::golden(40);
    let e = alpha_enclosure(&pq, 39).unwrap();
    let lo: f64 = num_traits::ToPrimitive::to_f64(&e.lo).unwrap();
    assert!((lo - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    assert!(e.lo < e.hi);
    assert!(!e.width().is_zero() && e.width() < Rational::one());
}
