//! Whole-monoid invariants of finitely generated Puiseux monoids.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::{LengthTable, Limits, MinMaxTable, ReducedMonoid};
use crate::rational::{ExtRat, Rat};

/// Integer-side ceiling for the default elasticity witness search.
pub const WITNESS_SEARCH_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    Accepted,
    NotFoundBelowBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElasticityReport {
    pub value: ExtRat,
    pub accepted: Acceptance,
    pub witness: Option<Rat>,
    pub search_bound: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionReport {
    pub n: u64,
    pub members: Vec<u64>,
    pub rho_n: u64,
    pub lambda_n: u64,
}

/// An element `x` and length `l` with `L(x) ∩ [l, l+d] = {l, l+d}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaWitness {
    pub d: u64,
    pub x: Rat,
    pub l: u64,
}

/// Δ restricted to elements `x <= bound`. Never claimed to be all of Δ(M).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub bound: Rat,
    pub exact: bool,
    pub deltas: Vec<u64>,
    pub witnesses: Vec<DeltaWitness>,
}

fn require_atoms(m: &ReducedMonoid) -> Result<()> {
    if m.is_trivial() {
        Err(Error::NoAtoms)
    } else {
        Ok(())
    }
}

/// `ρ(M) = max A(M) / min A(M)` together with the least witness `x` below
/// the search bound whose own elasticity attains it.
pub fn monoid_elasticity(
    m: &ReducedMonoid,
    bound: Option<&Rat>,
    limits: &Limits,
) -> Result<ElasticityReport> {
    require_atoms(m)?;
    let gens = m.gens();
    let (gmin, gmax) = (gens[0], *gens.last().unwrap());
    let value = m.max_atom().unwrap().div(m.min_atom().unwrap())?;

    let int_bound = match bound {
        Some(b) => m.floor_int(b)?,
        None => {
            let l = gens.iter().fold(1u128, |acc, &g| acc.lcm(&(g as u128)));
            l.saturating_mul(gmax as u128).min(WITNESS_SEARCH_CAP as u128) as u64
        }
    };
    // lcm(gmin, gmax) is gmax/c copies of gmin and gmin/c copies of gmax, so
    // the least witness never lies beyond it
    let search = int_bound.min(gmin.lcm(&gmax));
    let table = MinMaxTable::build(m, search, limits)?;
    let witness = (1..=search).find(|&v| {
        table
            .get(v)
            .is_some_and(|(lo, hi)| hi as u128 * gmin as u128 == lo as u128 * gmax as u128)
    });
    Ok(ElasticityReport {
        value: ExtRat::Finite(value),
        accepted: if witness.is_some() {
            Acceptance::Accepted
        } else {
            Acceptance::NotFoundBelowBound
        },
        witness: witness.map(|v| m.from_int(v)),
        search_bound: m.from_int(int_bound),
    })
}

/// `U_n(M)`: every length that shares an element with a length-`n`
/// factorization.
pub fn union_of_lengths(m: &ReducedMonoid, n: u64, limits: &Limits) -> Result<UnionReport> {
    require_atoms(m)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let gens = m.gens();
    let overflow = || Error::Overflow(format!("{n} * {}", gens.last().unwrap()));
    let lo = n.checked_mul(gens[0]).ok_or_else(overflow)?;
    let hi = n.checked_mul(*gens.last().unwrap()).ok_or_else(overflow)?;
    let table = LengthTable::build(m, hi, limits)?;
    let mut members = BTreeSet::new();
    for v in (lo..=hi).filter(|v| v % m.content() == 0) {
        if table.contains(v, n) {
            members.extend(table.length_set(v).as_slice().iter().copied());
        }
    }
    let members: Vec<u64> = members.into_iter().collect();
    Ok(UnionReport {
        n,
        rho_n: *members.last().expect("n is always present"),
        lambda_n: members[0],
        members,
    })
}

/// `ρ_n(M) = max U_n(M)`.
pub fn local_elasticity(m: &ReducedMonoid, n: u64, limits: &Limits) -> Result<u64> {
    Ok(union_of_lengths(m, n, limits)?.rho_n)
}

/// Heuristic default for [`monoid_delta_bounded`]: `4·(max σa)²` on the
/// integer side. Not claimed to capture all of Δ(M).
pub fn default_delta_bound(m: &ReducedMonoid) -> Rat {
    let g = m.gens().last().copied().unwrap_or(1);
    m.from_int(4u64.saturating_mul(g).saturating_mul(g))
}

/// Union of Δ(x) over members `x <= bound`, with the least witness per
/// distance.
pub fn monoid_delta_bounded(m: &ReducedMonoid, bound: &Rat, limits: &Limits) -> Result<DeltaReport> {
    if bound.is_zero() {
        return Err(Error::InvalidArgument("delta bound must be positive".into()));
    }
    let mut found: BTreeMap<u64, DeltaWitness> = BTreeMap::new();
    if !m.is_trivial() {
        let limit = m.floor_int(bound)?;
        let table = LengthTable::build(m, limit, limits)?;
        let step = m.content() as usize;
        for v in (step as u64..=limit).step_by(step) {
            let l = table.length_set(v);
            for w in l.as_slice().windows(2) {
                let d = w[1] - w[0];
                found.entry(d).or_insert_with(|| DeltaWitness {
                    d,
                    x: m.from_int(v),
                    l: w[0],
                });
            }
        }
    }
    Ok(DeltaReport {
        bound: bound.clone(),
        exact: false,
        deltas: found.keys().copied().collect(),
        witnesses: found.into_values().collect(),
    })
}

/// Re-derive a witness from scratch: `l` and `l + d` are lengths of `x` with
/// nothing in between.
pub fn check_delta_witness(m: &ReducedMonoid, w: &DeltaWitness, limits: &Limits) -> Result<bool> {
    let l = m.length_set(&w.x, limits)?;
    Ok(l.contains(w.l) && l.contains(w.l + w.d) && !(w.l + 1..w.l + w.d).any(|k| l.contains(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::normalize;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn m(xs: &[&str]) -> ReducedMonoid {
        normalize(&xs.iter().map(|s| r(s)).collect::<Vec<_>>())
            .unwrap()
            .monoid
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn elasticity_examples() {
        let rep = monoid_elasticity(&m(&["4", "6", "9"]), None, &lim()).unwrap();
        assert_eq!(rep.value, ExtRat::Finite(r("9/4")));
        assert_eq!(rep.accepted, Acceptance::Accepted);
        assert_eq!(rep.witness, Some(r("36")));

        let rep = monoid_elasticity(&m(&["7/3"]), None, &lim()).unwrap();
        assert_eq!(rep.value, ExtRat::Finite(Rat::one()));
        assert_eq!(rep.witness, Some(r("7/3")));

        let rep = monoid_elasticity(&m(&["1/2", "1/3"]), None, &lim()).unwrap();
        assert_eq!(rep.value, ExtRat::Finite(r("3/2")));
        assert_eq!(rep.witness, Some(r("1")));
    }

    #[test]
    fn elasticity_bound_too_small() {
        let rep = monoid_elasticity(&m(&["4", "6", "9"]), Some(&r("35")), &lim()).unwrap();
        assert_eq!(rep.accepted, Acceptance::NotFoundBelowBound);
        assert_eq!(rep.witness, None);
        assert_eq!(rep.value, ExtRat::Finite(r("9/4")));
        assert!(matches!(
            monoid_elasticity(&m(&[]), None, &lim()),
            Err(Error::NoAtoms)
        ));
    }

    #[test]
    fn unions() {
        let u = union_of_lengths(&m(&["4", "6", "9"]), 2, &lim()).unwrap();
        assert_eq!(u.members, vec![2, 3, 4]);
        assert_eq!((u.rho_n, u.lambda_n), (4, 2));
        for n in 1..6 {
            assert_eq!(union_of_lengths(&m(&["1"]), n, &lim()).unwrap().members, vec![n]);
        }
        assert_eq!(union_of_lengths(&m(&["4", "6", "9"]), 1, &lim()).unwrap().members, vec![1]);
        assert_eq!(local_elasticity(&m(&["4", "6", "9"]), 2, &lim()).unwrap(), 4);
        assert_eq!(local_elasticity(&m(&["1"]), 5, &lim()).unwrap(), 5);
        assert_eq!(local_elasticity(&m(&["2", "3"]), 2, &lim()).unwrap(), 3);
        assert!(union_of_lengths(&m(&["2", "3"]), 0, &lim()).is_err());
    }

    #[test]
    fn union_symmetry() {
        // a ∈ U_b iff b ∈ U_a
        for gens in [&["4", "6", "9"][..], &["3", "5", "7"], &["1/2", "1/5", "2/3"]] {
            let s = m(gens);
            let us: Vec<UnionReport> = (1..=5).map(|n| union_of_lengths(&s, n, &lim()).unwrap()).collect();
            for a in 1..=5u64 {
                for b in 1..=5u64 {
                    assert_eq!(
                        us[(b - 1) as usize].members.contains(&a),
                        us[(a - 1) as usize].members.contains(&b),
                        "{gens:?} a={a} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        let rep = monoid_delta_bounded(&m(&["4", "6", "9"]), &r("500"), &lim()).unwrap();
        assert_eq!(rep.deltas, vec![1]);
        assert!(!rep.exact);
        assert_eq!(monoid_delta_bounded(&m(&["2", "3"]), &r("50"), &lim()).unwrap().deltas, vec![1]);
        assert!(monoid_delta_bounded(&m(&["5/7"]), &r("100"), &lim()).unwrap().deltas.is_empty());
        assert!(monoid_delta_bounded(&m(&["2", "3"]), &Rat::zero(), &lim()).is_err());
    }

    #[test]
    fn delta_witnesses_recheck() {
        for gens in [&["4", "6", "9"][..], &["5", "8", "13"], &["3/2", "7/3", "5"]] {
            let s = m(gens);
            let rep = monoid_delta_bounded(&s, &default_delta_bound(&s), &lim()).unwrap();
            assert_eq!(rep.witnesses.len(), rep.deltas.len());
            for w in &rep.witnesses {
                assert!(check_delta_witness(&s, w, &lim()).unwrap(), "{w:?}");
            }
        }
    }

    #[test]
    fn delta_monotone_in_bound() {
        let s = m(&["5", "8", "13", "21"]);
        let mut prev: Vec<u64> = Vec::new();
        for b in (10..=400).step_by(30) {
            let cur = monoid_delta_bounded(&s, &Rat::from(b), &lim()).unwrap().deltas;
            assert!(prev.iter().all(|d| cur.contains(d)), "bound {b}");
            prev = cur;
        }
    }

    #[test]
    fn elasticity_dominates_samples() {
        let s = m(&["5", "7", "11"]);
        let rep = monoid_elasticity(&s, None, &lim()).unwrap();
        let mut best = ExtRat::Finite(Rat::one());
        for v in 0..=200u64 {
            if let Some(e) = s.elasticity_of_element(&Rat::from(v), &lim()).unwrap() {
                assert!(e <= rep.value);
                best = best.max(e);
            }
        }
        assert_eq!(best, rep.value);
    }
}
