//! Partition states of the chain and the stage spaces S(n, t).
//!
//! A state records how many teams of each size exist. Internally a
//! [`Partition`] is kept in vector notation: `counts[i - 1]` is the number of
//! teams with exactly `i` members, and the last entry is always nonzero.
//! Part-list notation (`[321]`) is a presentation format only.
//!
//! Text forms, both accepted by [`str::parse`]:
//!
//! * part-list: `[321]`, parts in descending order;
//! * vector: `(111)`, the team counts `r_1 r_2 ... r_k`.
//!
//! Digits are concatenated when every entry is a single digit. As soon as
//! one entry needs two digits, entries are comma separated and a lone entry
//! carries a trailing comma, e.g. `[10,]`, `(10,)` or `[6,3,1]`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Default upper bound on `n` accepted by the enumeration entry points.
pub const DEFAULT_MAX_N: u32 = 40;

/// Upper bound on the number of players; the state space grows like p(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCap(u32);

impl SizeCap {
    pub fn new(max_n: u32) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::Config("max-n must be at least 1".into()));
        }
        Ok(SizeCap(max_n))
    }

    pub fn max_n(self) -> u32 {
        self.0
    }

    pub fn check(self, n: u32) -> Result<()> {
        if n == 0 || n > self.0 {
            Err(Error::SizeOutOfRange { n, max: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for SizeCap {
    fn default() -> Self {
        SizeCap(DEFAULT_MAX_N)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    counts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from team counts `(r_1, ..., r_k)`. Trailing zeros
    /// are dropped; at least one team is required.
    pub fn from_counts(mut counts: Vec<u32>) -> Result<Self> {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        if counts.is_empty() {
            return Err(Error::InvalidPartition("no teams".into()));
        }
        Ok(Partition { counts })
    }

    /// Builds a partition from team sizes given in any order.
    pub fn from_parts(parts: &[u32]) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition("team of size zero".into()));
        }
        let largest = parts.iter().copied().max().unwrap_or(0) as usize;
        let mut counts = vec![0u32; largest];
        for &p in parts {
            counts[p as usize - 1] += 1;
        }
        Partition::from_counts(counts)
    }

    /// All `n` players on their own: vector `(n)`.
    pub fn singletons(n: u32) -> Self {
        assert!(n > 0, "a partition needs at least one player");
        Partition { counts: vec![n] }
    }

    /// One team holding every player: the absorbing state.
    pub fn single_team(n: u32) -> Self {
        assert!(n > 0, "a partition needs at least one player");
        let mut counts = vec![0; n as usize];
        counts[n as usize - 1] = 1;
        Partition { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of teams of the given size.
    pub fn count(&self, size: u32) -> u32 {
        if size == 0 {
            return 0;
        }
        self.counts.get(size as usize - 1).copied().unwrap_or(0)
    }

    /// Total number of players, `Σ i·r_i`.
    pub fn n(&self) -> u32 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &r)| (i as u32 + 1) * r)
            .sum()
    }

    /// Number of teams, `Σ r_i`; this is the stage of the state.
    pub fn t(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn largest(&self) -> u32 {
        self.counts.len() as u32
    }

    /// Team sizes in descending order.
    pub fn parts(&self) -> Vec<u32> {
        let mut parts = Vec::with_capacity(self.t() as usize);
        for (i, &r) in self.counts.iter().enumerate().rev() {
            parts.extend(std::iter::repeat_n(i as u32 + 1, r as usize));
        }
        parts
    }

    /// Multinomial coefficient `t! / (r_1! ... r_k!)`: the number of distinct
    /// orderings of the team sizes.
    pub fn multinomial(&self) -> BigUint {
        let mut value = factorial(self.t());
        for &r in &self.counts {
            value /= factorial(r);
        }
        value
    }

    /// Part-list notation, e.g. `[321]`.
    pub fn part_list(&self) -> String {
        format!("[{}]", join_entries(&self.parts()))
    }

    /// Vector notation, e.g. `(111)`.
    pub fn vector_notation(&self) -> String {
        format!("({})", join_entries(&self.counts))
    }
}

impl Ord for Partition {
    /// Lexicographic order on the descending part-lists, so `222 < 321 < 411`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts().cmp(&other.parts())
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.part_list())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::Parse {
            what: "partition",
            input: s.to_string(),
        };
        let (body, is_vector) =
            if let Some(b) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
                (b, false)
            } else if let Some(b) = s.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
                (b, true)
            } else {
                return Err(err());
            };
        let entries = split_entries(body).ok_or_else(err)?;
        if entries.is_empty() {
            return Err(err());
        }
        if is_vector {
            if entries.last() == Some(&0) {
                return Err(Error::InvalidPartition(format!(
                    "{s}: last entry of vector notation must be nonzero"
                )));
            }
            Partition::from_counts(entries)
        } else {
            if entries.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidPartition(format!(
                    "{s}: parts must be listed in descending order"
                )));
            }
            Partition::from_parts(&entries)
        }
    }
}

fn join_entries(entries: &[u32]) -> String {
    if entries.iter().all(|&e| e < 10) {
        entries.iter().map(|e| e.to_string()).collect()
    } else if entries.len() == 1 {
        format!("{},", entries[0])
    } else {
        entries
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn split_entries(body: &str) -> Option<Vec<u32>> {
    if body.contains(',') {
        body.split(',')
            .map(str::trim)
            .filter(|piece| !piece.is_empty())
            .map(|piece| piece.parse().ok())
            .collect()
    } else {
        body.chars().map(|c| c.to_digit(10)).collect()
    }
}

pub(crate) fn factorial(k: u32) -> BigUint {
    (2..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut value = BigUint::one();
    for i in 0..k {
        value = value * (n - i) / (i + 1);
    }
    value
}

/// The states of one stage: every partition of `n` into exactly `t` parts,
/// in canonical (ascending lexicographic) order.
#[derive(Debug, Clone)]
pub struct StageSpace {
    n: u32,
    t: u32,
    states: Vec<Partition>,
    index: HashMap<Vec<u32>, usize>,
}

impl StageSpace {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn states(&self) -> &[Partition] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &Partition) -> Option<usize> {
        self.index.get(state.counts()).copied()
    }

    /// Lookup by raw team counts `(r_1, ..., r_k)` without trailing zeros.
    pub fn index_of_counts(&self, counts: &[u32]) -> Option<usize> {
        self.index.get(counts).copied()
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(Partition::part_list).collect()
    }
}

/// Enumerates S(n, t) in canonical order.
pub fn enumerate_stage(n: u32, t: u32, cap: SizeCap) -> Result<StageSpace> {
    cap.check(n)?;
    if t < 1 || t > n {
        return Err(Error::InvalidStage { n, t });
    }
    let mut states = Vec::new();
    let mut prefix = Vec::with_capacity(t as usize);
    descending_parts(n, t, n, &mut prefix, &mut |parts| {
        states.push(Partition::from_parts(parts).expect("generated parts are positive"));
    });
    let index = states
        .iter()
        .enumerate()
        .map(|(i, p)| (p.counts().to_vec(), i))
        .collect();
    Ok(StageSpace {
        n,
        t,
        states,
        index,
    })
}

/// Visits every descending list of `parts` positive integers summing to
/// `remaining`, each at most `max_part`, in ascending lexicographic order.
fn descending_parts(
    remaining: u32,
    parts: u32,
    max_part: u32,
    prefix: &mut Vec<u32>,
    visit: &mut impl FnMut(&[u32]),
) {
    if parts == 0 {
        if remaining == 0 {
            visit(prefix);
        }
        return;
    }
    let lo = remaining.div_ceil(parts);
    let hi = max_part.min(remaining.saturating_sub(parts - 1));
    for first in lo..=hi {
        prefix.push(first);
        descending_parts(remaining - first, parts - 1, first, prefix, visit);
        prefix.pop();
    }
}

/// The multinomial weights `u_t` over one stage, kept as exact integers.
#[derive(Debug, Clone)]
pub struct WeightVector {
    pub n: u32,
    pub t: u32,
    pub weights: Vec<BigUint>,
}

impl WeightVector {
    pub fn sum(&self) -> BigUint {
        self.weights.iter().sum()
    }
}

pub fn weight_vector(stage: &StageSpace) -> WeightVector {
    WeightVector {
        n: stage.n(),
        t: stage.t(),
        weights: stage.states().iter().map(Partition::multinomial).collect(),
    }
}
