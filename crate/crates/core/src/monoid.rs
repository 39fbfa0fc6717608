//! Finitely generated Puiseux monoids.
//!
//! A monoid `⟨q_1, …, q_k⟩ ⊂ ℚ≥0` is stored through the scaling isomorphism
//! `x ↦ σ·x`, where `σ` is the lcm of the generator denominators. Every
//! per-element query runs on the integer side and maps back through `σ`.
//!
//! Membership uses Apéry tables with respect to the smallest integer
//! generator: `apery[k][ρ]` is the least value `≡ ρ (mod g_0)` that is a
//! combination of `g_0, …, g_k`. A value `v` is representable by that prefix
//! iff `v >= apery[k][v mod g_0]`. The same tables prune the factorization
//! recursion so that every branch it enters produces at least one
//! factorization.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{lcm_denominators, ExtRat, Rat};

const UNREACHABLE: u64 = u64::MAX;

/// Resource guards for enumeration and dynamic-programming tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Abort factorization enumeration once this many factorizations exist.
    pub max_factorizations: u64,
    /// Upper bound on 64-bit words held by any single DP table.
    pub max_table_words: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_factorizations: 1_000_000,
            max_table_words: 40_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with `PUISEUX_CAP` overriding the factorization cap.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var("PUISEUX_CAP") {
            limits.max_factorizations = raw
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("PUISEUX_CAP={raw:?}")))?;
        }
        Ok(limits)
    }

    fn check_table(&self, words: u64) -> Result<()> {
        if words > self.max_table_words {
            return Err(Error::CapExceeded {
                what: "DP table size (words)",
                cap: self.max_table_words,
            });
        }
        Ok(())
    }
}

/// A finitely generated Puiseux monoid reduced to its atoms.
#[derive(Clone, Debug)]
pub struct ReducedMonoid {
    atoms: Vec<Rat>,
    gens: Vec<u64>,
    scale: BigUint,
    content: u64,
    apery: Vec<Vec<u64>>,
}

/// Result of [`normalize`]: the reduced monoid plus what the reduction dropped.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub monoid: ReducedMonoid,
    /// Inputs that repeated an earlier generator.
    pub duplicates: Vec<Rat>,
    /// Inputs that were sums of other generators.
    pub eliminated: Vec<Rat>,
    /// The generator list was empty, so the monoid is `{0}`.
    pub trivial: bool,
}

impl Normalized {
    pub fn was_reduced(&self) -> bool {
        !self.duplicates.is_empty() || !self.eliminated.is_empty()
    }
}

/// Normalize a generator list: scale to integers, deduplicate, and keep only
/// the minimal generators.
pub fn normalize(gens: &[Rat]) -> Result<Normalized> {
    normalize_with(gens, &Limits::default())
}

pub fn normalize_with(gens: &[Rat], limits: &Limits) -> Result<Normalized> {
    if gens.iter().any(Rat::is_zero) {
        return Err(Error::ZeroGenerator);
    }
    let scale = lcm_denominators(gens);
    let mut scaled = Vec::with_capacity(gens.len());
    for q in gens {
        let v = to_u64(q, &scale)?;
        scaled.push((v, q.clone()));
    }
    scaled.sort_by_key(|(v, _)| *v);

    let mut duplicates = Vec::new();
    let mut unique: Vec<(u64, Rat)> = Vec::with_capacity(scaled.len());
    for (v, q) in scaled {
        if unique.last().is_some_and(|(w, _)| *w == v) {
            duplicates.push(q);
        } else {
            unique.push((v, q));
        }
    }

    let mut eliminated = Vec::new();
    let mut kept: Vec<(u64, Rat)> = Vec::with_capacity(unique.len());
    let mut apery: Vec<Vec<u64>> = Vec::new();
    for (v, q) in unique {
        match apery.last() {
            None => {
                limits.check_table(v)?;
                let mut w = vec![UNREACHABLE; v as usize];
                w[0] = 0;
                apery.push(w);
                kept.push((v, q));
            }
            Some(w) => {
                let g0 = kept[0].0;
                if w[(v % g0) as usize] <= v {
                    eliminated.push(q);
                } else {
                    limits.check_table(g0 * (apery.len() as u64 + 1))?;
                    let mut next = w.clone();
                    add_generator(&mut next, g0, v);
                    apery.push(next);
                    kept.push((v, q));
                }
            }
        }
    }

    let gens_int: Vec<u64> = kept.iter().map(|(v, _)| *v).collect();
    let content = gens_int.iter().fold(0u64, |acc, &g| acc.gcd(&g)).max(1);
    let atoms: Vec<Rat> = kept.into_iter().map(|(_, q)| q).collect();
    // a sum of atoms has a denominator dividing lcm(d(atoms)), so σ is
    // already the lcm over the atoms alone
    let trivial = atoms.is_empty();
    let monoid = ReducedMonoid {
        atoms,
        gens: gens_int,
        scale,
        content,
        apery,
    };
    Ok(Normalized {
        monoid,
        duplicates,
        eliminated,
        trivial,
    })
}

fn to_u64(q: &Rat, scale: &BigUint) -> Result<u64> {
    match q.scaled_to_u64(scale) {
        Some(Some(v)) => Ok(v),
        Some(None) => Err(Error::Overflow(format!("{q} * {scale}"))),
        None => unreachable!("scale is a multiple of every denominator"),
    }
}

/// Round-robin update of an Apéry table modulo `modulus` after adjoining `g`.
fn add_generator(w: &mut [u64], modulus: u64, g: u64) {
    let step = g % modulus;
    let cycles = modulus.gcd(&step).max(1);
    let cycle_len = modulus / cycles;
    for start in 0..cycles {
        // begin at the cheapest residue of this cycle; one lap then suffices
        let mut best = start;
        let mut best_val = w[start as usize];
        let mut p = start;
        for _ in 0..cycle_len {
            p = (p + step) % modulus;
            if w[p as usize] < best_val {
                best_val = w[p as usize];
                best = p;
            }
        }
        if best_val == UNREACHABLE {
            continue;
        }
        let mut p = best;
        for _ in 0..cycle_len {
            let q = (p + step) % modulus;
            let cand = w[p as usize].saturating_add(g);
            if cand < w[q as usize] {
                w[q as usize] = cand;
            }
            p = q;
        }
    }
}

impl ReducedMonoid {
    /// The atoms `A(M)` in ascending order.
    pub fn atoms(&self) -> &[Rat] {
        &self.atoms
    }

    /// Integer-side generators `σ·a` in ascending order.
    pub fn gens(&self) -> &[u64] {
        &self.gens
    }

    pub fn scale(&self) -> &BigUint {
        &self.scale
    }

    /// `gcd` of the integer generators.
    pub fn content(&self) -> u64 {
        self.content
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn min_atom(&self) -> Option<&Rat> {
        self.atoms.first()
    }

    pub fn max_atom(&self) -> Option<&Rat> {
        self.atoms.last()
    }

    /// `σ·x` when it is an integer, `None` otherwise.
    pub fn to_int(&self, x: &Rat) -> Result<Option<u64>> {
        match x.scaled_to_u64(&self.scale) {
            None => Ok(None),
            Some(Some(v)) => Ok(Some(v)),
            Some(None) => Err(Error::Overflow(format!("{x} * {}", self.scale))),
        }
    }

    /// Integer-side value back to a rational.
    pub fn from_int(&self, v: u64) -> Rat {
        Rat::new(v, self.scale.clone()).expect("scale is positive")
    }

    /// Largest integer-side value not exceeding `bound`.
    pub fn floor_int(&self, bound: &Rat) -> Result<u64> {
        let prod = bound.numer() * &self.scale / bound.denom();
        prod.to_u64()
            .ok_or_else(|| Error::Overflow(format!("{bound} * {}", self.scale)))
    }

    pub(crate) fn representable_by_prefix(&self, v: u64, last: usize) -> bool {
        let g0 = self.gens[0];
        self.apery[last][(v % g0) as usize] <= v
    }

    pub fn member_int(&self, v: u64) -> bool {
        if v == 0 {
            return true;
        }
        if self.gens.is_empty() {
            return false;
        }
        self.representable_by_prefix(v, self.gens.len() - 1)
    }

    pub fn member(&self, x: &Rat) -> Result<bool> {
        Ok(self.to_int(x)?.is_some_and(|v| self.member_int(v)))
    }

    /// All factorizations of `x`, sorted lexicographically by count vector.
    /// Empty exactly when `x` is not in the monoid.
    pub fn factorizations(&self, x: &Rat, limits: &Limits) -> Result<Vec<Factorization>> {
        match self.to_int(x)? {
            Some(v) => self.factorizations_int(v, limits),
            None => Ok(Vec::new()),
        }
    }

    pub fn factorizations_int(&self, v: u64, limits: &Limits) -> Result<Vec<Factorization>> {
        let mut out = Vec::new();
        if !self.member_int(v) {
            return Ok(out);
        }
        if v == 0 {
            out.push(Factorization::new(vec![0; self.rank()]));
            return Ok(out);
        }
        let mut counts = vec![0u64; self.rank()];
        self.enumerate(self.rank() - 1, v, &mut counts, &mut out, limits)?;
        out.sort();
        Ok(out)
    }

    fn enumerate(
        &self,
        idx: usize,
        rem: u64,
        counts: &mut [u64],
        out: &mut Vec<Factorization>,
        limits: &Limits,
    ) -> Result<()> {
        let g0 = self.gens[0];
        if idx == 0 {
            debug_assert_eq!(rem % g0, 0);
            counts[0] = rem / g0;
            if out.len() as u64 >= limits.max_factorizations {
                return Err(Error::CapExceeded {
                    what: "factorization count",
                    cap: limits.max_factorizations,
                });
            }
            out.push(Factorization::new(counts.to_vec()));
            counts[0] = 0;
            return Ok(());
        }
        let g = self.gens[idx];
        for c in 0..=rem / g {
            let r = rem - c * g;
            if self.representable_by_prefix(r, idx - 1) {
                counts[idx] = c;
                self.enumerate(idx - 1, r, counts, out, limits)?;
            }
        }
        counts[idx] = 0;
        Ok(())
    }

    /// `π(z)`: the element a factorization represents.
    pub fn evaluate(&self, z: &Factorization) -> Result<Rat> {
        if z.counts.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: z.counts.len(),
            });
        }
        Ok(z.counts
            .iter()
            .zip(&self.atoms)
            .fold(Rat::zero(), |acc, (&c, a)| acc + a * &Rat::from(c)))
    }

    /// `L(x)`; empty exactly when `x` is not in the monoid.
    pub fn length_set(&self, x: &Rat, limits: &Limits) -> Result<LengthSet> {
        match self.to_int(x)? {
            Some(v) => self.length_set_int(v, limits),
            None => Ok(LengthSet::default()),
        }
    }

    pub fn length_set_int(&self, v: u64, limits: &Limits) -> Result<LengthSet> {
        if !self.member_int(v) {
            return Ok(LengthSet::default());
        }
        let table = LengthTable::build(self, v, limits)?;
        Ok(table.length_set(v))
    }

    /// `Δ(x)`, or `None` when `x` is not in the monoid.
    pub fn delta_of_element(&self, x: &Rat, limits: &Limits) -> Result<Option<Vec<u64>>> {
        let l = self.length_set(x, limits)?;
        Ok((!l.is_empty()).then(|| l.deltas()))
    }

    /// `ρ(x)`, or `None` when `x` is not in the monoid.
    pub fn elasticity_of_element(&self, x: &Rat, limits: &Limits) -> Result<Option<ExtRat>> {
        let l = self.length_set(x, limits)?;
        Ok(l.elasticity().map(ExtRat::Finite))
    }
}

/// Atom multiplicities, indexed like [`ReducedMonoid::atoms`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct Factorization {
    pub counts: Vec<u64>,
    pub length: u64,
}

impl Factorization {
    pub fn new(counts: Vec<u64>) -> Self {
        let length = counts.iter().sum();
        Factorization { counts, length }
    }
}

impl From<Vec<u64>> for Factorization {
    fn from(counts: Vec<u64>) -> Self {
        Factorization::new(counts)
    }
}

impl From<Factorization> for Vec<u64> {
    fn from(z: Factorization) -> Self {
        z.counts
    }
}

/// Sorted set of factorization lengths.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LengthSet(Vec<u64>);

impl LengthSet {
    pub fn from_iter_unsorted(it: impl IntoIterator<Item = u64>) -> Self {
        let set: BTreeSet<u64> = it.into_iter().collect();
        LengthSet(set.into_iter().collect())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn min(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn contains(&self, l: u64) -> bool {
        self.0.binary_search(&l).is_ok()
    }

    pub fn is_subset(&self, other: &LengthSet) -> bool {
        self.0.iter().all(|&l| other.contains(l))
    }

    /// Distinct gaps between consecutive lengths.
    pub fn deltas(&self) -> Vec<u64> {
        let gaps: BTreeSet<u64> = self.0.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.into_iter().collect()
    }

    /// `max/min`, with `ρ = 1` for `L = {0}`; `None` for the empty set.
    pub fn elasticity(&self) -> Option<Rat> {
        let (lo, hi) = (self.min()?, self.max()?);
        if lo == 0 {
            return Some(Rat::one());
        }
        Some(Rat::new(hi, lo).expect("nonzero"))
    }
}

/// Bitset of lengths for every integer-side value `0..=limit`.
#[derive(Debug)]
pub struct LengthTable {
    limit: u64,
    words: usize,
    bits: Vec<u64>,
}

impl LengthTable {
    pub fn build(m: &ReducedMonoid, limit: u64, limits: &Limits) -> Result<Self> {
        let max_len = m.gens.first().map_or(0, |&g0| limit / g0);
        let words = (max_len / 64 + 1) as usize;
        let cells = (limit + 1)
            .checked_mul(words as u64)
            .ok_or(Error::CapExceeded {
                what: "DP table size (words)",
                cap: limits.max_table_words,
            })?;
        limits.check_table(cells)?;
        let mut bits = vec![0u64; cells as usize];
        bits[0] = 1;
        let c = m.content;
        for v in (c..=limit).step_by(c as usize) {
            let (lo, hi) = bits.split_at_mut(v as usize * words);
            let dst = &mut hi[..words];
            for &g in &m.gens {
                if g > v {
                    break;
                }
                let s = (v - g) as usize * words;
                let src = &lo[s..s + words];
                let mut carry = 0u64;
                for (d, &w) in dst.iter_mut().zip(src) {
                    *d |= (w << 1) | carry;
                    carry = w >> 63;
                }
            }
        }
        Ok(LengthTable { limit, words, bits })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn row(&self, v: u64) -> &[u64] {
        let s = v as usize * self.words;
        &self.bits[s..s + self.words]
    }

    pub fn is_member(&self, v: u64) -> bool {
        self.row(v).iter().any(|&w| w != 0)
    }

    pub fn contains(&self, v: u64, len: u64) -> bool {
        let w = (len / 64) as usize;
        w < self.words && self.row(v)[w] >> (len % 64) & 1 == 1
    }

    pub fn length_set(&self, v: u64) -> LengthSet {
        let mut out = Vec::new();
        for (wi, &w) in self.row(v).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as u64;
                out.push(wi as u64 * 64 + b);
                w &= w - 1;
            }
        }
        LengthSet(out)
    }
}

/// Minimum and maximum factorization length for every value `0..=limit`.
pub struct MinMaxTable {
    min: Vec<u32>,
    max: Vec<u32>,
}

impl MinMaxTable {
    pub fn build(m: &ReducedMonoid, limit: u64, limits: &Limits) -> Result<Self> {
        limits.check_table(limit + 1)?;
        let n = limit as usize + 1;
        let mut min = vec![u32::MAX; n];
        let mut max = vec![u32::MAX; n];
        min[0] = 0;
        max[0] = 0;
        for v in 1..n {
            for &g in &m.gens {
                let g = g as usize;
                if g > v {
                    break;
                }
                if min[v - g] == u32::MAX {
                    continue;
                }
                min[v] = min[v].min(min[v - g] + 1);
                max[v] = if max[v] == u32::MAX {
                    max[v - g] + 1
                } else {
                    max[v].max(max[v - g] + 1)
                };
            }
        }
        Ok(MinMaxTable { min, max })
    }

    pub fn get(&self, v: u64) -> Option<(u64, u64)> {
        let v = v as usize;
        (self.min[v] != u32::MAX).then(|| (self.min[v] as u64, self.max[v] as u64))
    }
}
