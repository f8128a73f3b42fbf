//! Fixtures and brute-force oracles shared by the integration tests. Nothing
//! here calls into the chain builder; the oracles work on raw player labels
//! and plain integers.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Sorted-descending team sizes after moving `loser` into `winner`'s team.
fn sizes_after(team_of: &[usize], winner: usize, loser: usize) -> Vec<u32> {
    let mut team_of = team_of.to_vec();
    team_of[loser] = team_of[winner];
    let mut sizes: BTreeMap<usize, u32> = BTreeMap::new();
    for &team in &team_of {
        *sizes.entry(team).or_default() += 1;
    }
    let mut sizes: Vec<u32> = sizes.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Assigns labeled players to teams of the given sizes, enumerates every
/// ordered (winner, loser) pair of distinct players and tallies the resulting
/// descending part-lists.
pub fn labeled_tally(parts: &[u32]) -> BTreeMap<Vec<u32>, u64> {
    let mut team_of = Vec::new();
    for (team, &size) in parts.iter().enumerate() {
        team_of.extend(std::iter::repeat_n(team, size as usize));
    }
    let n = team_of.len();
    let mut tally = BTreeMap::new();
    for winner in 0..n {
        for loser in 0..n {
            if winner != loser {
                *tally
                    .entry(sizes_after(&team_of, winner, loser))
                    .or_insert(0) += 1;
            }
        }
    }
    tally
}

/// p(n, t) from p(n, t) = p(n-1, t-1) + p(n-t, t).
pub fn partition_count(n: u32, t: u32) -> u64 {
    let (n, t) = (n as usize, t as usize);
    let mut table = vec![vec![0u64; t + 1]; n + 1];
    table[0][0] = 1;
    for m in 1..=n {
        for k in 1..=t.min(m) {
            table[m][k] = table[m - 1][k - 1] + if m >= k { table[m - k][k] } else { 0 };
        }
    }
    table[n][t]
}

/// Every composition (ordered list of positive parts) of `n` into `t` parts,
/// grouped by its multiset of parts (sorted descending).
pub fn compositions_by_partition(n: u32, t: u32) -> BTreeMap<Vec<u32>, u64> {
    fn walk(remaining: u32, slots: u32, prefix: &mut Vec<u32>, out: &mut BTreeMap<Vec<u32>, u64>) {
        if slots == 0 {
            if remaining == 0 {
                let mut key = prefix.clone();
                key.sort_unstable_by(|a, b| b.cmp(a));
                *out.entry(key).or_default() += 1;
            }
            return;
        }
        for first in 1..=remaining {
            prefix.push(first);
            walk(remaining - first, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = BTreeMap::new();
    walk(n, t, &mut Vec::new(), &mut out);
    out
}

/// Parses the concatenated single-digit part-lists used in the fixtures.
pub fn digits(label: &str) -> Vec<u32> {
    label.chars().map(|c| c.to_digit(10).unwrap()).collect()
}

/// Full transition matrix for six players, numerators over 30. States in the
/// reference order: [111111], [21111], [2211], [3111], [222], [321], [411],
/// [33], [42], [51], [6].
pub const SIX_PLAYER_STATES: [&str; 11] = [
    "111111", "21111", "2211", "3111", "222", "321", "411", "33", "42", "51", "6",
];

pub const SIX_PLAYER_P: [[i64; 11]; 11] = [
    [0, 30, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 10, 12, 8, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 12, 8, 2, 8, 0, 0, 0, 0, 0],
    [0, 0, 9, 6, 0, 6, 9, 0, 0, 0, 0],
    [0, 0, 0, 0, 6, 24, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 3, 16, 6, 2, 3, 0, 0],
    [0, 0, 0, 0, 0, 8, 12, 0, 2, 8, 0],
    [0, 0, 0, 0, 0, 0, 0, 12, 18, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 8, 14, 8, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 5, 20, 5],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 30],
];

/// Stage four of the ten-player chain, numerators over 90, in the reference
/// (non-canonical) state order.
pub const TEN_STAGE_FOUR: [&str; 9] = [
    "3331", "3322", "4321", "4411", "4222", "5311", "5221", "6211", "7111",
];
pub const TEN_STAGE_THREE: [&str; 8] = ["433", "442", "541", "532", "631", "622", "721", "811"];

pub const TEN_A4: [[i64; 9]; 9] = [
    [18, 9, 54, 0, 0, 0, 0, 0, 0],
    [8, 40, 24, 0, 18, 0, 0, 0, 0],
    [8, 4, 40, 6, 3, 8, 12, 0, 0],
    [0, 0, 16, 24, 0, 32, 0, 0, 0],
    [0, 24, 24, 0, 18, 0, 24, 0, 0],
    [0, 0, 10, 15, 0, 26, 6, 15, 0],
    [0, 0, 20, 0, 5, 8, 28, 20, 0],
    [0, 0, 0, 0, 0, 12, 12, 36, 12],
    [0, 0, 0, 0, 0, 0, 0, 21, 42],
];

pub const TEN_A43: [[i64; 8]; 9] = [
    [9, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [2, 3, 0, 4, 0, 0, 0, 0],
    [0, 2, 16, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 6, 2, 10, 0, 0, 0],
    [0, 0, 0, 4, 0, 5, 0, 0],
    [0, 0, 0, 0, 4, 2, 12, 0],
    [0, 0, 0, 0, 0, 0, 6, 21],
];

/// Reference weight vectors `u_4`, `u_3` for ten players, same orders as above.
pub const TEN_U4: [u64; 9] = [4, 6, 24, 6, 4, 12, 12, 12, 4];
pub const TEN_U3: [u64; 8] = [3, 3, 6, 6, 6, 3, 6, 3];

/// Reference closed-form inverse of `M_6`, numerators over 6.
pub const M6_INVERSE: [[i64; 5]; 5] = [
    [5, 4, 3, 2, 1],
    [4, 8, 6, 4, 2],
    [3, 6, 9, 6, 3],
    [2, 4, 6, 8, 4],
    [1, 2, 3, 4, 5],
];
