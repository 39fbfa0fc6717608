//! Plain exhaustive reference implementations used to certify the optimized
//! enumeration. Nothing here touches the Apéry tables or DP tables.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::monoid::{Factorization, ReducedMonoid};
use crate::rational::Rat;

pub const DEFAULT_ORACLE_LIMIT: u64 = 300;

/// Every count vector `c` with `Σ c_k·σa_k = σx`, found by trying all
/// `0 <= c_k <= σx / σa_k`.
pub fn naive_factorizations(m: &ReducedMonoid, x: &Rat, limit: u64) -> Result<Vec<Factorization>> {
    let scaled = x * &Rat::from_int(m.scale().clone());
    if !scaled.is_integer() {
        return Ok(Vec::new());
    }
    let target = scaled
        .numer()
        .to_u64()
        .filter(|&v| v <= limit)
        .ok_or(Error::CapExceeded {
            what: "oracle target value",
            cap: limit,
        })?;
    let gens = m.gens();
    let mut out = Vec::new();
    let mut counts = vec![0u64; gens.len()];
    fill(gens, 0, target, &mut counts, &mut out);
    out.sort();
    Ok(out)
}

fn fill(gens: &[u64], k: usize, rem: u64, counts: &mut Vec<u64>, out: &mut Vec<Factorization>) {
    if k == gens.len() {
        if rem == 0 {
            out.push(Factorization::new(counts.clone()));
        }
        return;
    }
    for c in 0..=rem / gens[k] {
        counts[k] = c;
        fill(gens, k + 1, rem - c * gens[k], counts, out);
    }
    counts[k] = 0;
}

pub fn naive_member(m: &ReducedMonoid, x: &Rat, limit: u64) -> Result<bool> {
    Ok(x.is_zero() || !naive_factorizations(m, x, limit)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{normalize, Limits};

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn m(xs: &[&str]) -> ReducedMonoid {
        normalize(&xs.iter().map(|s| r(s)).collect::<Vec<_>>())
            .unwrap()
            .monoid
    }

    #[test]
    fn examples() {
        let s = m(&["4", "6", "9"]);
        let naive = naive_factorizations(&s, &r("18"), DEFAULT_ORACLE_LIMIT).unwrap();
        assert_eq!(naive.len(), 3);
        assert_eq!(naive, s.factorizations(&r("18"), &Limits::default()).unwrap());
        assert_eq!(
            naive_factorizations(&s, &Rat::zero(), DEFAULT_ORACLE_LIMIT).unwrap(),
            vec![Factorization::new(vec![0, 0, 0])]
        );
        assert!(naive_factorizations(&s, &r("5"), DEFAULT_ORACLE_LIMIT).unwrap().is_empty());
        assert!(!naive_member(&s, &r("5"), DEFAULT_ORACLE_LIMIT).unwrap());
        assert!(naive_member(&s, &Rat::zero(), DEFAULT_ORACLE_LIMIT).unwrap());
        assert!(naive_member(&m(&["1/2", "1/3"]), &r("7/6"), DEFAULT_ORACLE_LIMIT).unwrap());
    }

    #[test]
    fn limit_enforced() {
        let s = m(&["4", "6", "9"]);
        assert!(naive_factorizations(&s, &r("301"), DEFAULT_ORACLE_LIMIT)
            .unwrap_err()
            .is_cap());
    }
}
