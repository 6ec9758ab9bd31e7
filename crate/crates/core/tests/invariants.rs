mod common;

use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toeplitz_core::factor::FactorMap;
use toeplitz_core::format;
use toeplitz_core::period::{build_periodic_structure, essential_reduce, exact_skeleton, Witness};
use toeplitz_core::sequence::{materialize, product_distance};
use toeplitz_core::{Odometer, SequenceRule};

use common::{dyadic_fill, random_periodic, random_rule, random_stage_fill};

const RADIUS: u64 = 512;

fn rule_from(seed: u64) -> SequenceRule {
    random_rule(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// A periodic point whose skeletons are known exactly.
fn periodic_from(seed: u64) -> SequenceRule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        random_periodic(&mut rng, k)
    } else {
        random_stage_fill(&mut rng, k)
    }
}

/// Regular moduli `n_1 | n_2 | ...` with top at most `2^12`.
fn moduli() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(2u64..=4, 1..=5).prop_map(|factors| {
        let mut n = 1;
        factors
            .into_iter()
            .map(|f| {
                n *= f;
                n
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifts_compose(seed in any::<u64>(), a in -5000i64..5000, b in -5000i64..5000, n in -2000i64..2000) {
        let x = rule_from(seed);
        prop_assert_eq!(x.shift(a).shift(b).eval(n), x.eval(n + a + b));
        prop_assert_eq!(x.shift(a).shift(-a).eval(n), x.eval(n));
    }

    #[test]
    fn evaluation_is_total_and_in_alphabet(seed in any::<u64>(), n in any::<i64>()) {
        let x = rule_from(seed);
        let s = x.eval(n);
        prop_assert!(s.index() < x.alphabet().len());
        prop_assert_eq!(s, x.eval(n));
    }

    #[test]
    fn product_distance_is_a_metric(s1 in any::<u64>(), s2 in any::<u64>(), t in -40i64..40) {
        let x = rule_from(s1);
        // same alphabet for all three points
        let y = x.shift(t);
        let z = rule_from(s2);
        let r = 24;
        prop_assert!(product_distance(&x, &x, r).unwrap().is_zero());
        let xy = product_distance(&x, &y, r).unwrap();
        prop_assert_eq!(&xy, &product_distance(&y, &x, r).unwrap());
        if z.same_alphabet(&x) {
            let xz = product_distance(&x, &z, r).unwrap();
            let zy = product_distance(&z, &y, r).unwrap();
            prop_assert!(xy <= xz + zy);
        } else {
            prop_assert!(product_distance(&x, &z, r).is_err());
        }
    }

    #[test]
    fn skeletons_grow_along_divisors(seed in any::<u64>(), p in 1usize..=16, m in 1usize..=4) {
        let x = rule_from(seed);
        let w = Witness::new(&x, RADIUS).unwrap();
        let (sp, sq) = (w.skeleton(p).unwrap(), w.skeleton(p * m).unwrap());
        for r in 0..p * m {
            if let Some(s) = sp.get(r % p) {
                prop_assert_eq!(sq.get(r), Some(s));
            }
        }
        prop_assert!(sp.max_block() <= sq.max_block());
    }

    #[test]
    fn stabilizer_divides_and_stabilizes(seed in any::<u64>(), p in 1usize..=32) {
        let x = rule_from(seed);
        let sk = Witness::new(&x, RADIUS).unwrap().skeleton(p).unwrap();
        let k = sk.stabilizer();
        prop_assert_eq!(p % k, 0);
        prop_assert!(sk.is_shift_stable(k as i64));
        prop_assert!((1..k).all(|t| !sk.is_shift_stable(t as i64)));
    }

    #[test]
    fn stable_skeletons_reduce_to_the_gcd(seed in any::<u64>(), p in 1usize..=24, q in 1usize..=24) {
        let x = periodic_from(seed);
        let sk = exact_skeleton(&x, p).unwrap();
        if !sk.is_empty() && sk.is_shift_stable(q as i64) {
            let g = p.gcd(&q);
            let sg = exact_skeleton(&x, g).unwrap();
            prop_assert!(sg.lift(p).unwrap().same_map(&sk));
        }
    }

    #[test]
    fn reduction_is_idempotent(seed in any::<u64>(), p in 1usize..=32) {
        let x = rule_from(seed);
        let Ok(red) = essential_reduce(&x, p, RADIUS) else { return Ok(()) };
        prop_assert_eq!(p % red.k, 0);
        let again = essential_reduce(&x, red.k, RADIUS).unwrap();
        prop_assert_eq!(again.k, red.k);
        prop_assert!(again.skeleton.same_map(&red.skeleton));
    }

    #[test]
    fn witnessed_matches_exact_on_periodic_points(seed in any::<u64>(), p in 1usize..=24) {
        // window 1024 spans lcm(p, L) for every pattern of length <= 32
        let x = periodic_from(seed);
        let w = Witness::new(&x, RADIUS).unwrap();
        let exact = exact_skeleton(&x, p).unwrap();
        let lcm = p.lcm(&common_period(&x));
        if lcm as u64 <= 2 * RADIUS {
            prop_assert!(w.skeleton(p).unwrap().same_map(&exact));
        }
    }

    #[test]
    fn odometer_group_laws(m in moduli(), a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
        let od = Odometer::from_moduli(m).unwrap();
        let (x, y, z) = (od.from_integer(a), od.from_integer(b), od.from_integer(c));
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        prop_assert_eq!(x.add(&x.neg()).unwrap(), od.zero());
        prop_assert_eq!(x.step(), x.add(&od.generator()).unwrap());
        prop_assert_eq!(x.step().inverse_step(), x.clone());
        let top = od.moduli().top() as i64;
        prop_assert_eq!(x.add(&y).unwrap(), od.from_integer(a.rem_euclid(top) + b.rem_euclid(top)));
        let (dxy, dyz, dxz) = (
            x.natural_distance(&y).unwrap(),
            y.natural_distance(&z).unwrap(),
            x.natural_distance(&z).unwrap(),
        );
        prop_assert!(dxz <= dxy.max(dyz));
        prop_assert_eq!(dxy, y.natural_distance(&x).unwrap());
        // translation invariance
        prop_assert_eq!(x.add(&z).unwrap().natural_distance(&y.add(&z).unwrap()).unwrap(), dxy);
    }

    #[test]
    fn odometer_text_round_trips(m in moduli(), k in any::<i64>()) {
        let od = Odometer::from_moduli(m).unwrap();
        let a = od.from_integer(k);
        prop_assert_eq!(od.parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn addresses_follow_shifts(depth in 2u32..=7, shift in -64i64..64, t in -200i64..200) {
        let x = dyadic_fill(depth).shift(shift);
        let candidates: Vec<usize> = (1..=1 << depth).collect();
        let ps = build_periodic_structure(&x, &candidates, RADIUS).unwrap();
        let map = FactorMap::new(&x, &ps, RADIUS).unwrap();
        let a = map.address(&x).unwrap();
        prop_assert_eq!(map.address(&x.shift(t)).unwrap(), a.step_by(t));
        prop_assert_eq!(a, map.odometer().zero());
    }

    #[test]
    fn sequence_files_round_trip(seed in any::<u64>()) {
        let x = rule_from(seed);
        let text = format::to_string(&x).unwrap();
        let y = format::parse(&text).unwrap();
        prop_assert_eq!(materialize(&x, -300, 300).unwrap(), materialize(&y, -300, 300).unwrap());
        prop_assert_eq!(format::to_string(&y).unwrap(), text);
    }
}

fn common_period(x: &SequenceRule) -> usize {
    use toeplitz_core::sequence::RuleKind;
    match x.kind() {
        RuleKind::Periodic(p) => p.len(),
        RuleKind::ToeplitzFill(f) => f.common_period(),
        _ => unreachable!("periodic points only"),
    }
}
