//! Randomized properties against brute force and structural invariants.

use num_bigint::BigUint;
use proptest::collection::vec;
use proptest::prelude::*;

use puiseux::approximation::{set_liminf, set_limsup};
use puiseux::oracle::{naive_factorizations, naive_member};
use puiseux::{normalize, Limits, Rat, ReducedMonoid};

fn rat(p: u64, q: u64) -> Rat {
    Rat::new(BigUint::from(p), BigUint::from(q)).unwrap()
}

fn small_atoms() -> impl Strategy<Value = Vec<Rat>> {
    vec((1..=12u64, 1..=6u64), 1..=4).prop_map(|v| v.into_iter().map(|(p, q)| rat(p, q)).collect())
}

fn monoid(atoms: &[Rat]) -> ReducedMonoid {
    normalize(atoms).unwrap().monoid
}

fn small_sets() -> impl Strategy<Value = Vec<Vec<u64>>> {
    vec(proptest::collection::btree_set(0..8u64, 0..5), 1..7)
        .prop_map(|v| v.into_iter().map(|s| s.into_iter().collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factorizations_are_sound_and_complete(atoms in small_atoms(), v in 0..=150u64) {
        let m = monoid(&atoms);
        let x = m.from_int(v);
        let fast = m.factorizations(&x, &Limits::default()).unwrap();
        for z in &fast {
            prop_assert_eq!(m.evaluate(z).unwrap(), x.clone());
        }
        prop_assert_eq!(&fast, &naive_factorizations(&m, &x, 300).unwrap());
        prop_assert_eq!(m.member(&x).unwrap(), naive_member(&m, &x, 300).unwrap());
        let lens: Vec<u64> = {
            let mut l: Vec<u64> = fast.iter().map(|z| z.length).collect();
            l.sort();
            l.dedup();
            l
        };
        let l = m.length_set(&x, &Limits::default()).unwrap();
        prop_assert_eq!(l.as_slice(), &lens[..]);
    }

    #[test]
    fn atoms_are_minimal(atoms in small_atoms()) {
        let n = normalize(&atoms).unwrap();
        let kept = n.monoid.atoms();
        for (k, a) in kept.iter().enumerate() {
            let others: Vec<Rat> = kept.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, b)| b.clone()).collect();
            if !others.is_empty() {
                prop_assert!(!monoid(&others).member(a).unwrap(), "{} is generated by {:?}", a, others);
            }
        }
        // every input generator still lies in the monoid
        for a in &atoms {
            prop_assert!(n.monoid.member(a).unwrap());
        }
    }

    #[test]
    fn scaling_preserves_invariants(atoms in small_atoms(), (p, q) in (1..=15u64, 1..=15u64), v in 0..=80u64) {
        let c = rat(p, q);
        let m = monoid(&atoms);
        let mc = monoid(&atoms.iter().map(|a| a * &c).collect::<Vec<_>>());
        let x = m.from_int(v);
        let cx = &x * &c;
        let lim = Limits::default();
        prop_assert_eq!(m.length_set(&x, &lim).unwrap(), mc.length_set(&cx, &lim).unwrap());
        prop_assert_eq!(m.delta_of_element(&x, &lim).unwrap(), mc.delta_of_element(&cx, &lim).unwrap());
        prop_assert_eq!(m.elasticity_of_element(&x, &lim).unwrap(), mc.elasticity_of_element(&cx, &lim).unwrap());
    }

    #[test]
    fn liminf_within_limsup(sets in small_sets()) {
        let lo = set_liminf(&sets).unwrap();
        let hi = set_limsup(&sets).unwrap();
        prop_assert!(lo.iter().all(|v| hi.contains(v)), "{:?} not within {:?}", lo, hi);
    }

    #[test]
    fn constant_tail_survives(sets in small_sets(), e in 0..8u64, tail in 2..4usize) {
        // e is present in every set from some point on, for at least two sets
        let mut sets = sets;
        let start = sets.len().saturating_sub(1);
        sets.extend(std::iter::repeat_n(vec![], tail - 1));
        for s in &mut sets[start..] {
            if !s.contains(&e) {
                s.push(e);
                s.sort();
            }
        }
        prop_assert!(set_liminf(&sets).unwrap().contains(&e));
        prop_assert!(set_limsup(&sets).unwrap().contains(&e));
    }
}
