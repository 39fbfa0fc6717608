//! Built-in atom streams.
//!
//! * `cyclic`: powers `r^0, r^1, …` of a non-integer `r > 0`.
//! * `example46`: all even powers of `r > 1` plus the first `i` odd powers,
//!   `M_i = ⟨r^{2k}, r^{2j-1} : k >= 0, 1 <= j <= i⟩`.
//! * `multicyclic`: all powers of every `b` in a list `B` whose members
//!   have numerators above 1, pairwise coprime denominators and a common
//!   `|n(b) - d(b)|`.
//! * `unit_fraction_primes`: `1/2, 1/3, 1/5, …`; numerator 1 is shared by
//!   every atom.
//! * `explicit`: a finite list.

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::approximation::{AtomStream, StreamMeta};
use crate::error::{Error, Result};
use crate::monoid::{normalize_with, Limits, Normalized};
use crate::rational::Rat;

/// Indices scanned before a truncation is declared non-terminating.
pub const TRUNCATION_SCAN_CAP: usize = 10_000;

/// How many primes the unit-fraction family can draw from.
pub const PRIME_COUNT: usize = 10_000;

/// Family selector as it appears in monoid spec documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Cyclic {
        r: Rat,
    },
    Example46 {
        r: Rat,
        i: u32,
    },
    Multicyclic {
        #[serde(rename = "B")]
        b: Vec<Rat>,
    },
    UnitFractionPrimes {
        count: usize,
    },
    Explicit {
        atoms: Vec<Rat>,
    },
}

impl FamilySpec {
    /// Parse either a family document or a bare `{"atoms": [...]}` monoid.
    /// Parameters may also sit under a nested `"params"` object.
    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::InvalidFamily(e.to_string());
        let mut doc: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
        let obj = doc
            .as_object_mut()
            .ok_or_else(|| Error::InvalidFamily("spec must be a JSON object".into()))?;
        if let Some(serde_json::Value::Object(params)) = obj.remove("params") {
            for (k, v) in params {
                obj.entry(k).or_insert(v);
            }
        }
        if !obj.contains_key("family") {
            obj.insert("family".into(), "explicit".into());
        }
        serde_json::from_value(doc).map_err(bad)
    }

    pub fn stream(&self) -> Result<AtomStream> {
        match self {
            FamilySpec::Cyclic { r } => cyclic_stream(r),
            FamilySpec::Example46 { r, i } => example46_stream(r, *i),
            FamilySpec::Multicyclic { b } => multicyclic_stream(b),
            FamilySpec::UnitFractionPrimes { count } => unit_fraction_prime_stream(*count),
            FamilySpec::Explicit { atoms } => explicit_stream(atoms),
        }
    }
}

fn nd(q: &Rat) -> (BigUint, BigUint) {
    (q.numer().clone(), q.denom().clone())
}

fn pow_index(i: usize) -> u32 {
    u32::try_from(i - 1).expect("stream index fits in u32")
}

/// `r^0, r^1, r^2, …`.
pub fn cyclic_stream(r: &Rat) -> Result<AtomStream> {
    if r.is_zero() {
        return Err(Error::InvalidFamily("cyclic: r must be positive".into()));
    }
    if r.is_integer() {
        return Err(Error::InvalidFamily(format!(
            "cyclic: r = {r} is an integer, so the monoid is just ⟨1⟩"
        )));
    }
    let (n, _) = nd(r);
    let below_one = r < &Rat::one();
    if below_one && n.is_one() {
        return Err(Error::InvalidFamily(format!(
            "cyclic: r = {r} < 1 with n(r) = 1 gives a monoid with no atoms"
        )));
    }
    let q = r.clone();
    Ok(AtomStream::new(
        move |i| q.pow(pow_index(i)),
        None,
        StreamMeta {
            family: "cyclic".into(),
            atomic_guaranteed: true,
            stable_atom_numerator: None,
            zero_limit_point: Some(below_one),
            ascending: !below_one,
        },
    ))
}

/// Exponent of the `index`-th atom (1-based) of `M_i`, ascending.
fn example46_exponent(index: usize, i: u32) -> u32 {
    let k = pow_index(index);
    if k < 2 * i {
        k
    } else {
        2 * k - 2 * i
    }
}

/// Ascending atoms of `M_i`: `r^0, …, r^{2i-1}` then the even powers beyond.
pub fn example46_stream(r: &Rat, i: u32) -> Result<AtomStream> {
    if i == 0 {
        return Err(Error::InvalidFamily("example46: i must be at least 1".into()));
    }
    if r <= &Rat::one() || r.is_integer() {
        return Err(Error::InvalidFamily(format!(
            "example46: r = {r} must be a non-integer rational greater than 1"
        )));
    }
    let q = r.clone();
    Ok(AtomStream::new(
        move |idx| q.pow(example46_exponent(idx, i)),
        None,
        StreamMeta {
            family: format!("example46(i={i})"),
            atomic_guaranteed: true,
            stable_atom_numerator: None,
            zero_limit_point: Some(false),
            ascending: true,
        },
    ))
}

/// Check the multicyclic conditions, naming the first offending pair.
pub fn validate_multicyclic(b: &[Rat]) -> Result<BigUint> {
    let first = b
        .first()
        .ok_or_else(|| Error::InvalidFamily("multicyclic: B must be nonempty".into()))?;
    for q in b {
        if q.is_zero() || q.is_integer() {
            return Err(Error::InvalidFamily(format!(
                "multicyclic: {q} must be a positive non-integer"
            )));
        }
        if q.numer().is_one() {
            return Err(Error::InvalidFamily(format!("multicyclic: n({q}) = 1, need n(b) > 1")));
        }
    }
    let gap = |q: &Rat| {
        let (n, d) = nd(q);
        if n >= d {
            n - d
        } else {
            d - n
        }
    };
    for (k, p) in b.iter().enumerate() {
        for q in &b[k + 1..] {
            if p == q {
                return Err(Error::InvalidFamily(format!("multicyclic: {p} is listed twice")));
            }
            if !p.denom().gcd(q.denom()).is_one() {
                return Err(Error::InvalidFamily(format!(
                    "multicyclic: gcd(d({p}), d({q})) = {} violates the coprime-denominator condition",
                    p.denom().gcd(q.denom())
                )));
            }
            if gap(p) != gap(q) {
                return Err(Error::InvalidFamily(format!(
                    "multicyclic: |n({p}) - d({p})| = {} differs from |n({q}) - d({q})| = {}",
                    gap(p),
                    gap(q)
                )));
            }
        }
    }
    Ok(gap(first))
}

/// All powers `b^n`, `b ∈ B`, with the shared atom 1 listed once.
///
/// When every `b > 1` the stream is ascending by value. Otherwise powers
/// below 1 accumulate at 0, so atoms are listed in rounds: round `n` holds
/// `b^n` for every `b`, ascending within the round.
pub fn multicyclic_stream(b: &[Rat]) -> Result<AtomStream> {
    let gap = validate_multicyclic(b)?;
    let all_above = b.iter().all(|q| q > &Rat::one());
    let bases: Arc<Vec<Rat>> = Arc::new(b.to_vec());
    let meta = StreamMeta {
        family: format!("multicyclic(gap={gap})"),
        atomic_guaranteed: true,
        stable_atom_numerator: None,
        zero_limit_point: Some(!all_above),
        ascending: all_above,
    };
    if all_above {
        Ok(AtomStream::new(move |i| merged_powers(&bases, i), None, meta))
    } else {
        Ok(AtomStream::new(move |i| round_powers(&bases, i), None, meta))
    }
}

/// `i`-th smallest element of `{1} ∪ {b^n : n >= 1}` for bases above 1.
fn merged_powers(bases: &[Rat], i: usize) -> Rat {
    if i == 1 {
        return Rat::one();
    }
    let mut exps = vec![1u32; bases.len()];
    let mut cur = Rat::one();
    for _ in 1..i {
        let (k, v) = bases
            .iter()
            .zip(&exps)
            .map(|(b, &e)| b.pow(e))
            .enumerate()
            .min_by(|a, b| a.1.cmp(&b.1))
            .unwrap();
        exps[k] += 1;
        cur = v;
    }
    cur
}

fn round_powers(bases: &[Rat], i: usize) -> Rat {
    if i == 1 {
        return Rat::one();
    }
    let k = i - 2;
    let round = (k / bases.len()) as u32 + 1;
    let mut powers: Vec<Rat> = bases.iter().map(|b| b.pow(round)).collect();
    powers.sort();
    powers.swap_remove(k % bases.len())
}

fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        // p_10000 = 104729
        let n = 105_000usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut p = 2;
        while p * p <= n {
            if sieve[p] {
                (p * p..=n).step_by(p).for_each(|m| sieve[m] = false);
            }
            p += 1;
        }
        sieve
            .iter()
            .enumerate()
            .filter(|(_, &is_p)| is_p)
            .map(|(k, _)| k as u64)
            .take(PRIME_COUNT)
            .collect()
    })
}

/// `1/p_1, …, 1/p_count`.
pub fn unit_fraction_prime_stream(count: usize) -> Result<AtomStream> {
    if count == 0 || count > PRIME_COUNT {
        return Err(Error::InvalidFamily(format!(
            "unit_fraction_primes: count must be in 1..={PRIME_COUNT}"
        )));
    }
    let atoms = primes()[..count]
        .iter()
        .map(|&p| Rat::new(1u32, p).unwrap())
        .collect();
    AtomStream::finite(
        atoms,
        StreamMeta {
            family: "unit_fraction_primes".into(),
            atomic_guaranteed: true,
            stable_atom_numerator: Some(1),
            zero_limit_point: Some(true),
            ascending: false,
        },
    )
}

pub fn explicit_stream(atoms: &[Rat]) -> Result<AtomStream> {
    if atoms.is_empty() {
        return Err(Error::InvalidFamily("explicit: atom list is empty".into()));
    }
    AtomStream::finite(
        atoms.to_vec(),
        StreamMeta {
            family: "explicit".into(),
            atomic_guaranteed: false,
            stable_atom_numerator: None,
            zero_limit_point: Some(false),
            ascending: atoms.windows(2).all(|w| w[0] < w[1]),
        },
    )
}

/// Every stream atom `<= x`. Atoms above `x` never occur in a factorization
/// of `x`, so the truncation has the same `Z(x)` as the full monoid.
pub fn truncate_stream_below(s: &AtomStream, x: &Rat) -> Result<Vec<Rat>> {
    if let Some(len) = s.len() {
        return Ok(s.prefix(len)?.into_iter().filter(|a| a <= x).collect());
    }
    if !s.meta.ascending {
        return Err(Error::NonTerminatingTruncation(x.to_string(), 0));
    }
    let mut out = Vec::new();
    for i in 1..=TRUNCATION_SCAN_CAP {
        let a = s.atom(i)?;
        if &a > x {
            return Ok(out);
        }
        out.push(a);
    }
    Err(Error::NonTerminatingTruncation(x.to_string(), TRUNCATION_SCAN_CAP))
}

/// The monoid generated by the stream atoms `<= x`.
pub fn truncated_monoid(s: &AtomStream, x: &Rat, limits: &Limits) -> Result<Normalized> {
    normalize_with(&truncate_stream_below(s, x)?, limits)
}

/// `x_i = n(r)^2 · r^{2i}`, the element carrying the gap `n(r)^2 - d(r)^2`.
pub fn example46_element(r: &Rat, i: u32) -> Rat {
    let n = Rat::from_int(r.numer().clone());
    &(&n * &n) * &r.pow(2 * i)
}

/// `d(r)^2 · r^{2i+2}` as a count vector over `m`'s atoms, when that atom is
/// present.
pub fn example46_short_factorization(r: &Rat, i: u32, m: &Normalized) -> Option<Vec<u64>> {
    let atom = r.pow(2 * i + 2);
    let k = m.monoid.atoms().iter().position(|a| *a == atom)?;
    let d2 = (r.denom() * r.denom()).to_u64()?;
    let mut counts = vec![0; m.monoid.rank()];
    counts[k] = d2;
    Some(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn rs(xs: &[&str]) -> Vec<Rat> {
        xs.iter().map(|s| r(s)).collect()
    }

    #[test]
    fn cyclic() {
        let s = cyclic_stream(&r("2/3")).unwrap();
        assert_eq!(s.prefix(4).unwrap(), rs(&["1", "2/3", "4/9", "8/27"]));
        let s = cyclic_stream(&r("3/2")).unwrap();
        assert_eq!(s.prefix(3).unwrap(), rs(&["1", "3/2", "9/4"]));
        assert!(cyclic_stream(&r("1/2")).is_err());
        assert!(cyclic_stream(&r("3")).is_err());
        assert!(cyclic_stream(&Rat::zero()).is_err());
    }

    #[test]
    fn cyclic_prefix_integer_form() {
        // N_i = d^{-(i-1)} ⟨n^{i-1-k} d^k⟩
        for (q, n, d) in [("2/3", 2u64, 3u64), ("3/2", 3, 2), ("2/5", 2, 5), ("5/3", 5, 3)] {
            let s = cyclic_stream(&r(q)).unwrap();
            for i in 1..=5u32 {
                let m = crate::approximation::prefix_monoid(&s, i as usize, &Limits::default())
                    .unwrap()
                    .monoid;
                let mut want: Vec<u64> = (0..i).map(|k| n.pow(i - 1 - k) * d.pow(k)).collect();
                want.sort();
                assert_eq!(m.gens(), want.as_slice(), "{q} i={i}");
                assert_eq!(m.scale(), &BigUint::from(d.pow(i - 1)));
            }
        }
    }

    #[test]
    fn example46() {
        let s = example46_stream(&r("3/2"), 1).unwrap();
        assert_eq!(
            s.prefix(5).unwrap(),
            rs(&["1", "3/2", "9/4", "81/16", "729/64"])
        );
        let s = example46_stream(&r("3/2"), 2).unwrap();
        assert_eq!(
            s.prefix(6).unwrap(),
            rs(&["1", "3/2", "9/4", "27/8", "81/16", "729/64"])
        );
        assert!(example46_stream(&r("3/2"), 0).is_err());
        assert!(example46_stream(&r("2/3"), 1).is_err());
        assert!(example46_stream(&r("2"), 1).is_err());
    }

    #[test]
    fn multicyclic() {
        let single = multicyclic_stream(&rs(&["3/2"])).unwrap();
        let cyc = cyclic_stream(&r("3/2")).unwrap();
        assert_eq!(single.prefix(6).unwrap(), cyc.prefix(6).unwrap());

        let s = multicyclic_stream(&rs(&["3/2", "8/7"])).unwrap();
        let p = s.prefix(7).unwrap();
        assert_eq!(p, rs(&["1", "8/7", "64/49", "512/343", "3/2", "4096/2401", "32768/16807"]));
        assert!(p.windows(2).all(|w| w[0] < w[1]));

        let err = multicyclic_stream(&rs(&["3/2", "5/2"])).unwrap_err().to_string();
        assert!(err.contains("gcd(d(3/2), d(5/2))"), "{err}");
        let err = multicyclic_stream(&rs(&["3/2", "7/5"])).unwrap_err().to_string();
        assert!(err.contains("differs"), "{err}");
        assert!(multicyclic_stream(&rs(&["1/2"])).is_err());
        assert!(multicyclic_stream(&[]).is_err());
    }

    #[test]
    fn multicyclic_below_one_uses_rounds() {
        let s = multicyclic_stream(&rs(&["2/3", "3/4"])).unwrap();
        assert_eq!(
            s.prefix(5).unwrap(),
            rs(&["1", "2/3", "3/4", "4/9", "9/16"])
        );
    }

    #[test]
    fn multicyclic_validation_matches_conditions() {
        let pool = rs(&["3/2", "5/2", "4/3", "8/7", "2/3", "5/7", "7/5", "9/8", "5/4", "1/3", "7/2"]);
        for (a, p) in pool.iter().enumerate() {
            for q in &pool[a + 1..] {
                let gap = |x: &Rat| {
                    let (n, d) = (x.numer().to_u64().unwrap(), x.denom().to_u64().unwrap());
                    n.abs_diff(d)
                };
                let ok = p.numer() > &BigUint::one()
                    && q.numer() > &BigUint::one()
                    && p.denom().gcd(q.denom()).is_one()
                    && gap(p) == gap(q);
                let got = validate_multicyclic(&[p.clone(), q.clone()]).is_ok();
                assert_eq!(got, ok, "{p} {q}");
            }
        }
    }

    #[test]
    fn unit_fractions() {
        let s = unit_fraction_prime_stream(3).unwrap();
        assert_eq!(s.prefix(3).unwrap(), rs(&["1/2", "1/3", "1/5"]));
        assert_eq!(unit_fraction_prime_stream(1).unwrap().prefix(1).unwrap(), rs(&["1/2"]));
        assert_eq!(s.meta.stable_atom_numerator, Some(1));
        assert!(unit_fraction_prime_stream(0).is_err());
        assert_eq!(primes()[PRIME_COUNT - 1], 104_729);
    }

    #[test]
    fn truncation() {
        let s = example46_stream(&r("3/2"), 1).unwrap();
        assert_eq!(
            truncate_stream_below(&s, &r("81/4")).unwrap(),
            rs(&["1", "3/2", "9/4", "81/16", "729/64"])
        );
        assert!(truncate_stream_below(&s, &r("1/2")).unwrap().is_empty());
        let e = explicit_stream(&rs(&["1/2", "3", "1/3"])).unwrap();
        assert_eq!(truncate_stream_below(&e, &r("1")).unwrap(), rs(&["1/2", "1/3"]));
        let dec = cyclic_stream(&r("2/3")).unwrap();
        assert!(matches!(
            truncate_stream_below(&dec, &r("5")),
            Err(Error::NonTerminatingTruncation(..))
        ));
    }

    #[test]
    fn truncation_preserves_factorizations() {
        let lim = Limits::default();
        for (s, x) in [
            (example46_stream(&r("3/2"), 1).unwrap(), r("81/4")),
            (cyclic_stream(&r("5/3")).unwrap(), r("12")),
            (multicyclic_stream(&rs(&["3/2", "8/7"])).unwrap(), r("2")),
        ] {
            let atoms = truncate_stream_below(&s, &x).unwrap();
            let short = normalize_with(&atoms, &lim).unwrap().monoid;
            let longer = s.prefix(atoms.len() + 1).unwrap();
            let long = normalize_with(&longer, &lim).unwrap().monoid;
            let z_short = short.factorizations(&x, &lim).unwrap();
            let z_long = long.factorizations(&x, &lim).unwrap();
            // the extra atom exceeds x, so it only pads the count vectors
            let padded: Vec<Vec<u64>> = z_short
                .iter()
                .map(|z| {
                    let mut c = z.counts.clone();
                    let pos = long.atoms().iter().position(|a| a > &x).unwrap();
                    c.insert(pos, 0);
                    c
                })
                .collect();
            let got: Vec<Vec<u64>> = z_long.iter().map(|z| z.counts.clone()).collect();
            assert_eq!(got, padded);
        }
    }

    #[test]
    fn spec_documents() {
        let cases = [
            (r#"{"family":"cyclic","r":"2/3"}"#, FamilySpec::Cyclic { r: r("2/3") }),
            (r#"{"family":"example46","r":"3/2","i":2}"#, FamilySpec::Example46 { r: r("3/2"), i: 2 }),
            (r#"{"family":"multicyclic","B":["3/2","8/7"]}"#, FamilySpec::Multicyclic { b: rs(&["3/2", "8/7"]) }),
            (r#"{"family":"unit_fraction_primes","count":5}"#, FamilySpec::UnitFractionPrimes { count: 5 }),
            (r#"{"family":"explicit","atoms":["1/2","1/3"]}"#, FamilySpec::Explicit { atoms: rs(&["1/2", "1/3"]) }),
            (r#"{"atoms":["4","6","9"]}"#, FamilySpec::Explicit { atoms: rs(&["4", "6", "9"]) }),
            (r#"{"family":"cyclic","params":{"r":"2/5"}}"#, FamilySpec::Cyclic { r: r("2/5") }),
        ];
        for (text, want) in cases {
            let got = FamilySpec::from_json(text).unwrap();
            assert_eq!(got, want, "{text}");
            let again = FamilySpec::from_json(&serde_json::to_string(&got).unwrap()).unwrap();
            assert_eq!(again, got);
        }
        assert!(FamilySpec::from_json(r#"{"family":"bifurcus"}"#).is_err());
        assert!(FamilySpec::from_json(r#"[1,2]"#).is_err());
        assert!(FamilySpec::from_json(r#"{"family":"cyclic","r":"2.5"}"#).is_err());
    }

    #[test]
    fn example46_helpers() {
        assert_eq!(example46_element(&r("3/2"), 1), r("81/4"));
        assert_eq!(example46_element(&r("3/2"), 2), r("729/16"));
        let s = example46_stream(&r("3/2"), 1).unwrap();
        let m = truncated_monoid(&s, &r("81/4"), &Limits::default()).unwrap();
        assert_eq!(example46_short_factorization(&r("3/2"), 1, &m), Some(vec![0, 0, 0, 4, 0]));
    }
}
