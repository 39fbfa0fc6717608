//! Increasing chains of finitely generated monoids.
//!
//! An [`AtomStream`] lists atoms `a_1, a_2, …` of an atomic Puiseux monoid
//! `M`; its prefix monoids `N_i = ⟨a_1, …, a_i⟩` exhaust `M`. When
//! `A(N_i) ⊆ A(N_{i+1})` for every `i`, the chain is an approximation and
//! factorization sets of a fixed `x` only grow along it, so lengths,
//! elasticities and unions of lengths can be read off as limits. Delta sets
//! only satisfy `Δ_M(x) ⊆ liminf Δ_{N_i}(x)`.
//!
//! All limits here are estimates from a finite window. Nothing in a report
//! is a proof of convergence or divergence.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::invariants::{self, default_delta_bound};
use crate::monoid::{normalize_with, Limits, Normalized, ReducedMonoid};
use crate::rational::{ExtRat, Rat};

pub type AtomFn = Arc<dyn Fn(usize) -> Rat + Send + Sync>;

/// What is known about a stream beyond its values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamMeta {
    pub family: String,
    pub atomic_guaranteed: bool,
    /// Numerator shared by infinitely many atoms, if the family has one.
    pub stable_atom_numerator: Option<u64>,
    /// Whether 0 is a limit point of the monoid, when the family knows.
    pub zero_limit_point: Option<bool>,
    /// Atoms appear in strictly increasing order.
    pub ascending: bool,
}

/// Pure index → atom map, 1-based, optionally finite.
#[derive(Clone)]
pub struct AtomStream {
    gen: AtomFn,
    len: Option<usize>,
    pub meta: StreamMeta,
}

impl fmt::Debug for AtomStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AtomStream")
            .field("len", &self.len)
            .field("meta", &self.meta)
            .finish_non_exhaustive()
    }
}

impl AtomStream {
    pub fn new(
        gen: impl Fn(usize) -> Rat + Send + Sync + 'static,
        len: Option<usize>,
        meta: StreamMeta,
    ) -> Self {
        AtomStream {
            gen: Arc::new(gen),
            len,
            meta,
        }
    }

    pub fn finite(atoms: Vec<Rat>, meta: StreamMeta) -> Result<Self> {
        if atoms.iter().any(Rat::is_zero) {
            return Err(Error::ZeroGenerator);
        }
        let len = atoms.len();
        let atoms = Arc::new(atoms);
        Ok(AtomStream::new(move |i| atoms[i - 1].clone(), Some(len), meta))
    }

    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    pub fn atom(&self, i: usize) -> Result<Rat> {
        if i == 0 || self.len.is_some_and(|l| i > l) {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len.unwrap_or(usize::MAX),
            });
        }
        Ok((self.gen)(i))
    }

    /// `[a_1, …, a_i]`.
    pub fn prefix(&self, i: usize) -> Result<Vec<Rat>> {
        (1..=i).map(|k| self.atom(k)).collect()
    }
}

/// `N_i = ⟨a_1, …, a_i⟩`, reduced to its atoms.
pub fn prefix_monoid(s: &AtomStream, i: usize, limits: &Limits) -> Result<Normalized> {
    if i == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            len: s.len.unwrap_or(usize::MAX),
        });
    }
    normalize_with(&s.prefix(i)?, limits)
}

/// Whether `A(N_i) ⊆ A(N_{i+1})` held along the observed chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// The atoms of `N_{step-1}` are not all atoms of `N_step`.
    ViolatedAt(usize),
    Unchecked,
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Valid => f.write_str("valid"),
            Validity::ViolatedAt(k) => write!(f, "violated-at-step-{k}"),
            Validity::Unchecked => f.write_str("unchecked"),
        }
    }
}

impl FromStr for Validity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "valid" => Ok(Validity::Valid),
            "unchecked" => Ok(Validity::Unchecked),
            _ => s
                .strip_prefix("violated-at-step-")
                .and_then(|k| k.parse().ok())
                .map(Validity::ViolatedAt)
                .ok_or_else(|| Error::InvalidArgument(format!("validity {s:?}"))),
        }
    }
}

impl Serialize for Validity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Validity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// First step `k` where an atom of `N_{k-1}` stops being an atom of `N_k`,
/// together with the lost atoms.
pub fn first_violation(chain: &[ReducedMonoid]) -> Option<(usize, Vec<Rat>)> {
    chain.windows(2).enumerate().find_map(|(k, w)| {
        let next: BTreeSet<&Rat> = w[1].atoms().iter().collect();
        let lost: Vec<Rat> = w[0]
            .atoms()
            .iter()
            .filter(|a| !next.contains(a))
            .cloned()
            .collect();
        (!lost.is_empty()).then_some((k + 2, lost))
    })
}

/// Check `A(N_i) ⊆ A(N_{i+1})` for `i < depth`.
pub fn check_approximation(s: &AtomStream, depth: usize, limits: &Limits) -> Result<(Validity, Vec<Rat>)> {
    if depth < 2 {
        return Err(Error::InvalidArgument("approximation check needs depth >= 2".into()));
    }
    let chain = build_chain(s, depth, limits)?;
    let monoids: Vec<ReducedMonoid> = chain.into_iter().map(|n| n.monoid).collect();
    Ok(match first_violation(&monoids) {
        Some((k, lost)) => (Validity::ViolatedAt(k), lost),
        None => (Validity::Valid, Vec::new()),
    })
}

fn build_chain(s: &AtomStream, depth: usize, limits: &Limits) -> Result<Vec<Normalized>> {
    if let Some(len) = s.len {
        if depth > len {
            return Err(Error::IndexOutOfRange { index: depth, len });
        }
    }
    (1..=depth)
        .into_par_iter()
        .map(|i| prefix_monoid(s, i, limits))
        .collect()
}

/// Per-step payload of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Set(Vec<u64>),
    Number(ExtRat),
    Int(u64),
}

impl Value {
    fn as_number(&self) -> Option<ExtRat> {
        match self {
            Value::Number(q) => Some(q.clone()),
            Value::Int(n) => Some(ExtRat::Finite(Rat::from(*n))),
            Value::Set(_) => None,
        }
    }

    fn as_set(&self) -> Option<&[u64]> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Set(s) => {
                f.write_str("{")?;
                for (k, v) in s.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Value::Number(q) => write!(f, "{q}"),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Stabilization {
    /// The final `window` payloads agree; `at` is where that final run began.
    Stabilized { at: usize },
    Increasing,
    Varying,
    /// Fewer payloads than the window.
    Insufficient,
}

/// Classify the tail of a payload sequence.
pub fn detect_stabilization(values: &[Value], window: usize) -> Stabilization {
    let window = window.max(1);
    if values.len() < window {
        return Stabilization::Insufficient;
    }
    let tail = &values[values.len() - window..];
    let last = tail.last().unwrap();
    if tail.iter().all(|v| v == last) {
        let run = values.iter().rev().take_while(|v| *v == last).count();
        return Stabilization::Stabilized {
            at: values.len() - run + 1,
        };
    }
    let nums: Option<Vec<ExtRat>> = tail.iter().map(Value::as_number).collect();
    match nums {
        Some(nums) if nums.windows(2).all(|w| w[0] < w[1]) => Stabilization::Increasing,
        _ => Stabilization::Varying,
    }
}

fn is_nondecreasing(sets: &[Vec<u64>]) -> bool {
    sets.windows(2).all(|w| {
        let next: BTreeSet<u64> = w[1].iter().copied().collect();
        w[0].iter().all(|v| next.contains(v))
    })
}

fn intersect_all<'a>(sets: impl IntoIterator<Item = &'a Vec<u64>>) -> BTreeSet<u64> {
    let mut it = sets.into_iter();
    let mut acc: BTreeSet<u64> = it.next().map(|s| s.iter().copied().collect()).unwrap_or_default();
    for s in it {
        let s: BTreeSet<u64> = s.iter().copied().collect();
        acc.retain(|v| s.contains(v));
    }
    acc
}

/// Window estimate of `liminf S_i = ⋃_i ⋂_{j>=i} S_j`.
///
/// A nondecreasing window is treated as an increasing chain, whose limit is
/// its union (the last set). Otherwise the tail term `i = d` (the last set on
/// its own) is left out of the union, so an element must persist through at
/// least the final two observations.
pub fn set_liminf(sets: &[Vec<u64>]) -> Result<Vec<u64>> {
    if sets.is_empty() {
        return Err(Error::InvalidArgument("set limit of an empty sequence".into()));
    }
    if is_nondecreasing(sets) {
        return Ok(sets.last().unwrap().clone());
    }
    let d = sets.len();
    let mut out = BTreeSet::new();
    for i in 0..d - 1 {
        out.extend(intersect_all(&sets[i..]));
    }
    Ok(out.into_iter().collect())
}

/// Window estimate of `limsup S_i = ⋂_i ⋃_{j>=i} S_j`, with the same
/// increasing-chain and tail rules as [`set_liminf`].
pub fn set_limsup(sets: &[Vec<u64>]) -> Result<Vec<u64>> {
    if sets.is_empty() {
        return Err(Error::InvalidArgument("set limit of an empty sequence".into()));
    }
    if is_nondecreasing(sets) {
        return Ok(sets.last().unwrap().clone());
    }
    let d = sets.len();
    let unions: Vec<Vec<u64>> = (0..d - 1)
        .map(|i| {
            let u: BTreeSet<u64> = sets[i..].iter().flatten().copied().collect();
            u.into_iter().collect()
        })
        .collect();
    Ok(intersect_all(&unions).into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Lengths,
    Elasticity,
    LocalElasticity,
    Delta,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Lengths => "lengths",
            SweepKind::Elasticity => "elasticity",
            SweepKind::LocalElasticity => "local_elasticity",
            SweepKind::Delta => "delta",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxStep {
    pub i: usize,
    pub atoms: Vec<Rat>,
    pub value: Value,
    /// Whether the queried element lies in this step's monoid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub suspected: bool,
    /// The last value passed the growth threshold.
    pub exceeds_threshold: bool,
    /// Side condition under which divergence is a theorem, and where it
    /// came from (family metadata or a finite-window heuristic).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_condition: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// Running union for lengths; last value for scalar sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    pub stabilization: Stabilization,
    pub window: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<Divergence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liminf_estimate: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limsup_estimate: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub containment: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub kind: SweepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Rat>,
    pub steps: Vec<ApproxStep>,
    pub valid: Validity,
    pub limit_estimate: LimitEstimate,
    pub stabilized_at: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Tunables shared by every sweep.
#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub window: usize,
    /// Growth past this value (with a strictly increasing window) makes
    /// divergence suspected.
    pub divergence_threshold: Rat,
    /// Minimum atoms below this, strictly decreasing over the window, make
    /// the "0 is a limit point" heuristic fire.
    pub zero_tolerance: Rat,
    pub limits: Limits,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            window: 3,
            divergence_threshold: Rat::from(1000),
            zero_tolerance: Rat::new(1u32, 1_000_000u32).unwrap(),
            limits: Limits::default(),
        }
    }
}

/// Prefix chain clipped to the stream length, with validity and notes.
struct Chain {
    monoids: Vec<ReducedMonoid>,
    valid: Validity,
    notes: Vec<String>,
}

impl Chain {
    fn build(s: &AtomStream, depth: usize, limits: &Limits) -> Result<Chain> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be positive".into()));
        }
        let mut notes = Vec::new();
        let depth = match s.len {
            Some(len) if len < depth => {
                notes.push(format!("depth clipped to the stream length {len}"));
                len.max(1)
            }
            _ => depth,
        };
        let normalized = build_chain(s, depth, limits)?;
        for (k, n) in normalized.iter().enumerate() {
            if !n.eliminated.is_empty() || !n.duplicates.is_empty() {
                let dropped: Vec<String> = n
                    .eliminated
                    .iter()
                    .chain(&n.duplicates)
                    .map(ToString::to_string)
                    .collect();
                notes.push(format!(
                    "step {}: non-minimal generators reduced away: {}",
                    k + 1,
                    dropped.join(", ")
                ));
            }
        }
        let monoids: Vec<ReducedMonoid> = normalized.into_iter().map(|n| n.monoid).collect();
        let valid = if monoids.len() < 2 {
            Validity::Unchecked
        } else {
            match first_violation(&monoids) {
                Some((k, lost)) => {
                    let lost: Vec<String> = lost.iter().map(ToString::to_string).collect();
                    notes.push(format!(
                        "warning: not an approximation; atoms {} of step {} are not atoms of step {k}; monotonicity is not guaranteed",
                        lost.join(", "),
                        k - 1
                    ));
                    Validity::ViolatedAt(k)
                }
                None => Validity::Valid,
            }
        };
        Ok(Chain {
            monoids,
            valid,
            notes,
        })
    }

    fn step(&self, k: usize, value: Value, member: Option<bool>) -> ApproxStep {
        ApproxStep {
            i: k + 1,
            atoms: self.monoids[k].atoms().to_vec(),
            value,
            member,
        }
    }
}

fn scalar_limit(
    steps: &[ApproxStep],
    opts: &SweepOptions,
    side_condition: Option<String>,
) -> (LimitEstimate, Option<usize>) {
    let values: Vec<Value> = steps.iter().map(|s| s.value.clone()).collect();
    let stabilization = detect_stabilization(&values, opts.window);
    let last = values.last().and_then(Value::as_number);
    let exceeds = last
        .as_ref()
        .is_some_and(|v| *v > ExtRat::Finite(opts.divergence_threshold.clone()));
    let increasing = stabilization == Stabilization::Increasing;
    let divergence = Divergence {
        suspected: increasing && (exceeds || side_condition.is_some()),
        exceeds_threshold: exceeds,
        side_condition,
    };
    let stabilized_at = match stabilization {
        Stabilization::Stabilized { at } => Some(at),
        _ => None,
    };
    (
        LimitEstimate {
            value: values.last().cloned(),
            stabilization,
            window: opts.window,
            divergence: Some(divergence),
            liminf_estimate: None,
            limsup_estimate: None,
            containment: None,
        },
        stabilized_at,
    )
}

/// Per-step `L_{N_i}(x)` and their running union.
pub fn approx_length_set(s: &AtomStream, x: &Rat, depth: usize, opts: &SweepOptions) -> Result<ApproxReport> {
    let mut chain = Chain::build(s, depth, &opts.limits)?;
    let sets: Vec<_> = chain
        .monoids
        .par_iter()
        .map(|m| m.length_set(x, &opts.limits))
        .collect::<Result<_>>()?;
    if sets.iter().all(|l| l.is_empty()) {
        chain.notes.push(format!("{x} lies in none of the observed steps"));
    }
    if chain.valid == Validity::Valid {
        if let Some(k) = sets.windows(2).position(|w| !w[0].is_subset(&w[1])) {
            chain
                .notes
                .push(format!("length sets not nested between steps {} and {}", k + 1, k + 2));
        }
    }
    let union: BTreeSet<u64> = sets.iter().flat_map(|l| l.as_slice().iter().copied()).collect();
    let steps: Vec<ApproxStep> = sets
        .into_iter()
        .enumerate()
        .map(|(k, l)| {
            let member = !l.is_empty();
            chain.step(k, Value::Set(l.as_slice().to_vec()), Some(member))
        })
        .collect();
    let values: Vec<Value> = steps.iter().map(|s| s.value.clone()).collect();
    let stabilization = detect_stabilization(&values, opts.window);
    let stabilized_at = match stabilization {
        Stabilization::Stabilized { at } => Some(at),
        _ => None,
    };
    Ok(ApproxReport {
        kind: SweepKind::Lengths,
        x: Some(x.clone()),
        n: None,
        bound: None,
        steps,
        valid: chain.valid,
        limit_estimate: LimitEstimate {
            value: Some(Value::Set(union.into_iter().collect())),
            stabilization,
            window: opts.window,
            divergence: None,
            liminf_estimate: None,
            limsup_estimate: None,
            containment: Some("running union is a subset of L_M(x)".into()),
        },
        stabilized_at,
        notes: chain.notes,
    })
}

/// Zero-limit-point evidence for the elasticity sweep.
fn zero_limit_point(s: &AtomStream, chain: &Chain, opts: &SweepOptions) -> Option<String> {
    if s.meta.zero_limit_point == Some(true) {
        return Some("0 is a limit point (family metadata)".into());
    }
    let mins: Vec<&Rat> = chain.monoids.iter().filter_map(ReducedMonoid::min_atom).collect();
    if mins.len() < opts.window {
        return None;
    }
    let tail = &mins[mins.len() - opts.window..];
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    (decreasing && *tail.last().unwrap() < &opts.zero_tolerance)
        .then(|| "0 is a limit point (window heuristic)".into())
}

/// `ρ_{N_i}(x)` per step, or `ρ(N_i) = max A(N_i) / min A(N_i)` without `x`.
pub fn approx_elasticity(
    s: &AtomStream,
    depth: usize,
    x: Option<&Rat>,
    opts: &SweepOptions,
) -> Result<ApproxReport> {
    let mut chain = Chain::build(s, depth, &opts.limits)?;
    let mut steps = Vec::with_capacity(chain.monoids.len());
    let side_condition = match x {
        Some(x) => {
            let rhos: Vec<_> = chain
                .monoids
                .par_iter()
                .map(|m| m.elasticity_of_element(x, &opts.limits))
                .collect::<Result<_>>()?;
            for (k, rho) in rhos.into_iter().enumerate() {
                let member = rho.is_some();
                // ρ is undefined off the monoid; record 0/1 as a placeholder
                let v = rho.unwrap_or(ExtRat::Finite(Rat::zero()));
                steps.push(chain.step(k, Value::Number(v), Some(member)));
            }
            if steps.iter().all(|s| s.member == Some(false)) {
                chain.notes.push(format!("{x} lies in none of the observed steps"));
            }
            None
        }
        None => {
            for (k, m) in chain.monoids.iter().enumerate() {
                let rho = m.max_atom().unwrap().div(m.min_atom().unwrap())?;
                steps.push(chain.step(k, Value::Number(ExtRat::Finite(rho)), None));
            }
            zero_limit_point(s, &chain, opts)
        }
    };
    let (limit_estimate, stabilized_at) = scalar_limit(&steps, opts, side_condition);
    Ok(ApproxReport {
        kind: SweepKind::Elasticity,
        x: x.cloned(),
        n: None,
        bound: None,
        steps,
        valid: chain.valid,
        limit_estimate,
        stabilized_at,
        notes: chain.notes,
    })
}

/// `ρ_n(N_i)` per step.
pub fn approx_local_elasticity(
    s: &AtomStream,
    n: u64,
    depth: usize,
    opts: &SweepOptions,
) -> Result<ApproxReport> {
    let chain = Chain::build(s, depth, &opts.limits)?;
    let rhos: Vec<u64> = chain
        .monoids
        .par_iter()
        .map(|m| invariants::local_elasticity(m, n, &opts.limits))
        .collect::<Result<_>>()?;
    let steps: Vec<ApproxStep> = rhos
        .into_iter()
        .enumerate()
        .map(|(k, v)| chain.step(k, Value::Int(v), None))
        .collect();
    let side_condition = s
        .meta
        .stable_atom_numerator
        .map(|num| format!("stable atom with numerator {num} (family metadata)"));
    let (limit_estimate, stabilized_at) = scalar_limit(&steps, opts, side_condition);
    Ok(ApproxReport {
        kind: SweepKind::LocalElasticity,
        x: None,
        n: Some(n),
        bound: None,
        steps,
        valid: chain.valid,
        limit_estimate,
        stabilized_at,
        notes: chain.notes,
    })
}

/// What a delta sweep computes at each step.
#[derive(Clone, Debug)]
pub enum DeltaQuery {
    /// `Δ(x)` for one fixed element.
    Element(Rat),
    /// `Δ(x_i)` with a separate element per step.
    PerStep(Vec<Rat>),
    /// Bounded `Δ(M_i)` over elements `<= bound`.
    Bounded(Rat),
}

const DELTA_CONTAINMENT: &str =
    "Delta_M is contained in the liminf estimate; equality is not claimed and can fail";

/// One step's delta set and, for element queries, whether `x` is a member.
pub type StepSet = (Vec<u64>, Option<bool>);

/// `(liminf, limsup)` window estimates.
pub type SetLimits = (Vec<u64>, Vec<u64>);

/// Delta sets along an explicit chain of monoids.
pub fn delta_chain(
    monoids: &[ReducedMonoid],
    query: &DeltaQuery,
    opts: &SweepOptions,
) -> Result<(Vec<StepSet>, SetLimits)> {
    if monoids.is_empty() {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    if let DeltaQuery::PerStep(xs) = query {
        if xs.len() != monoids.len() {
            return Err(Error::InvalidArgument(format!(
                "{} elements for {} steps",
                xs.len(),
                monoids.len()
            )));
        }
    }
    let per_step: Vec<StepSet> = monoids
        .par_iter()
        .enumerate()
        .map(|(k, m)| match query {
            DeltaQuery::Element(x) => element_delta(m, x, &opts.limits),
            DeltaQuery::PerStep(xs) => element_delta(m, &xs[k], &opts.limits),
            DeltaQuery::Bounded(b) => {
                invariants::monoid_delta_bounded(m, b, &opts.limits).map(|r| (r.deltas, None))
            }
        })
        .collect::<Result<_>>()?;
    let sets: Vec<Vec<u64>> = per_step.iter().map(|(s, _)| s.clone()).collect();
    Ok((per_step, (set_liminf(&sets)?, set_limsup(&sets)?)))
}

fn element_delta(m: &ReducedMonoid, x: &Rat, limits: &Limits) -> Result<StepSet> {
    Ok(match m.delta_of_element(x, limits)? {
        Some(d) => (d, Some(true)),
        None => (Vec::new(), Some(false)),
    })
}

/// Assemble a delta report for a chain given as explicit monoids, e.g. a
/// family indexed by something other than stream prefixes.
pub fn delta_report_for_chain(
    monoids: &[ReducedMonoid],
    query: &DeltaQuery,
    opts: &SweepOptions,
    valid: Validity,
    mut notes: Vec<String>,
) -> Result<ApproxReport> {
    let (per_step, (liminf, limsup)) = delta_chain(monoids, query, opts)?;
    let steps: Vec<ApproxStep> = per_step
        .into_iter()
        .enumerate()
        .map(|(k, (set, member))| ApproxStep {
            i: k + 1,
            atoms: monoids[k].atoms().to_vec(),
            value: Value::Set(set),
            member,
        })
        .collect();
    let values: Vec<Value> = steps.iter().map(|s| s.value.clone()).collect();
    let stabilization = detect_stabilization(&values, opts.window);
    let stabilized_at = match stabilization {
        Stabilization::Stabilized { at } => Some(at),
        _ => None,
    };
    let (x, bound) = match query {
        DeltaQuery::Element(x) => (Some(x.clone()), None),
        DeltaQuery::PerStep(_) => (None, None),
        DeltaQuery::Bounded(b) => {
            notes.push(format!(
                "per-step sets are bounded delta sets over elements <= {b} (exact: false)"
            ));
            (None, Some(b.clone()))
        }
    };
    Ok(ApproxReport {
        kind: SweepKind::Delta,
        x,
        n: None,
        bound,
        steps,
        valid,
        limit_estimate: LimitEstimate {
            value: None,
            stabilization,
            window: opts.window,
            divergence: None,
            liminf_estimate: Some(liminf),
            limsup_estimate: Some(limsup),
            containment: Some(DELTA_CONTAINMENT.into()),
        },
        stabilized_at,
        notes,
    })
}

/// Per-step `Δ_{N_i}(x)` (or bounded `Δ(N_i)` without `x`) and their
/// liminf/limsup window estimates.
pub fn approx_delta(
    s: &AtomStream,
    depth: usize,
    x: Option<&Rat>,
    bound: Option<&Rat>,
    opts: &SweepOptions,
) -> Result<ApproxReport> {
    let chain = Chain::build(s, depth, &opts.limits)?;
    let query = match x {
        Some(x) => DeltaQuery::Element(x.clone()),
        None => DeltaQuery::Bounded(match bound {
            Some(b) => b.clone(),
            None => default_delta_bound(chain.monoids.last().unwrap()),
        }),
    };
    delta_report_for_chain(&chain.monoids, &query, opts, chain.valid, chain.notes)
}

/// Extract the set payloads of a report's steps.
pub fn step_sets(report: &ApproxReport) -> Vec<Vec<u64>> {
    report
        .steps
        .iter()
        .filter_map(|s| s.value.as_set().map(<[u64]>::to_vec))
        .collect()
}
