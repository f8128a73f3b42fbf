//! Transition structure of the winner-absorbs-loser chain.
//!
//! Every step draws an ordered (winner, loser) pair of distinct players
//! uniformly from the `n(n-1)` possibilities. The loser leaves its team and
//! joins the winner's team. Transitions are counted per event class (the
//! sizes of the loser's and winner's teams) rather than per player, and the
//! integer counts δ are divided by `n(n-1)` only when the blocks are built.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Rational, RationalMatrix};
use crate::partition::{enumerate_stage, Partition, SizeCap, StageSpace};

/// A class of (winner, loser) pairs that all lead to the same successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventClass {
    pub loser_size: u32,
    pub winner_size: u32,
    pub same_team: bool,
    /// Number of ordered winner-loser pairs in the class.
    pub count: u64,
}

/// Every event class with a nonzero count in `state`. Counts sum to `n(n-1)`.
pub fn event_classes(state: &Partition) -> Vec<EventClass> {
    let sizes: Vec<(u64, u64)> = state
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > 0)
        .map(|(i, &r)| (i as u64 + 1, r as u64))
        .collect();
    let mut classes = Vec::new();
    for &(i, r_i) in &sizes {
        if i >= 2 {
            classes.push(EventClass {
                loser_size: i as u32,
                winner_size: i as u32,
                same_team: true,
                count: i * (i - 1) * r_i,
            });
        }
        for &(j, r_j) in &sizes {
            let count = if i == j {
                (i * r_i) * (i * (r_i - 1))
            } else {
                (i * r_i) * (j * r_j)
            };
            if count > 0 {
                classes.push(EventClass {
                    loser_size: i as u32,
                    winner_size: j as u32,
                    same_team: false,
                    count,
                });
            }
        }
    }
    classes
}

/// Successor of `state` after one event of class `ev`.
pub fn apply_event(state: &Partition, ev: &EventClass) -> Result<Partition> {
    let infeasible = |reason| Error::Infeasible {
        state: state.part_list(),
        reason,
    };
    let (i, j) = (ev.loser_size, ev.winner_size);
    if i == 0 || j == 0 {
        return Err(infeasible("team sizes must be positive"));
    }
    if ev.same_team {
        if i != j {
            return Err(infeasible("same-team event needs equal sizes"));
        }
        if i < 2 || state.count(i) == 0 {
            return Err(infeasible("no team with two or more members of that size"));
        }
        return Ok(state.clone());
    }
    if state.count(i) == 0 || state.count(j) == 0 || (i == j && state.count(i) < 2) {
        return Err(infeasible("no such pair of distinct teams"));
    }

    let mut counts = state.counts().to_vec();
    counts.resize(counts.len().max(j as usize + 1), 0);
    let (i, j) = (i as usize, j as usize);
    counts[i - 1] -= 1;
    if i > 1 {
        counts[i - 2] += 1;
    }
    counts[j - 1] -= 1;
    counts[j] += 1;
    Partition::from_counts(counts)
}

/// δ counts from `state` to each reachable successor.
pub fn transition_row(state: &Partition) -> BTreeMap<Partition, u64> {
    let mut row = BTreeMap::new();
    for ev in event_classes(state) {
        let next = apply_event(state, &ev).expect("enumerated classes are feasible");
        *row.entry(next).or_insert(0) += ev.count;
    }
    row
}

/// The within-stage block `A_t` and the descent block `A_{t,t-1}`.
#[derive(Debug, Clone)]
pub struct StageMatrices {
    pub n: u32,
    pub t: u32,
    pub space: StageSpace,
    pub a_t: RationalMatrix,
    /// Absent for the absorbing stage `t = 1`.
    pub lower_space: Option<StageSpace>,
    pub a_down: Option<RationalMatrix>,
}

impl StageMatrices {
    /// `[A_t | A_{t,t-1}]`, or just `A_1` for the final stage.
    pub fn combined(&self) -> RationalMatrix {
        match &self.a_down {
            Some(down) => self.a_t.hconcat(down).expect("blocks share rows"),
            None => self.a_t.clone(),
        }
    }

    /// Row and column labels (part-list notation) for [`Self::combined`].
    pub fn column_labels(&self) -> Vec<String> {
        let mut labels = self.space.labels();
        if let Some(lower) = &self.lower_space {
            labels.extend(lower.labels());
        }
        labels
    }
}

pub fn build_stage(n: u32, t: u32, cap: SizeCap) -> Result<StageMatrices> {
    let space = enumerate_stage(n, t, cap)?;
    let lower_space = if t > 1 {
        Some(enumerate_stage(n, t - 1, cap)?)
    } else {
        None
    };
    Ok(assemble_stage(space, lower_space))
}

fn assemble_stage(space: StageSpace, lower_space: Option<StageSpace>) -> StageMatrices {
    let (n, t) = (space.n(), space.t());
    let pairs = n as i64 * (n as i64 - 1);
    let mut a_t = RationalMatrix::zeros(space.len(), space.len());
    let mut a_down = lower_space
        .as_ref()
        .map(|lower| RationalMatrix::zeros(space.len(), lower.len()));

    for (row, state) in space.states().iter().enumerate() {
        if n == 1 {
            a_t[(row, 0)] = Rational::from_integer(1.into());
            continue;
        }
        for (next, delta) in transition_row(state) {
            let value = Rational::new((delta as i64).into(), pairs.into());
            if next.t() == t {
                let col = space.index_of(&next).expect("successor in the same stage");
                a_t[(row, col)] = value;
            } else {
                let col = lower_space
                    .as_ref()
                    .and_then(|lower| lower.index_of(&next))
                    .expect("successor in the stage below");
                if let Some(down) = a_down.as_mut() {
                    down[(row, col)] = value;
                }
            }
        }
    }
    StageMatrices {
        n,
        t,
        space,
        a_t,
        lower_space,
        a_down,
    }
}

/// All stages of the chain, ordered from `t = n` down to `t = 1`.
#[derive(Debug, Clone)]
pub struct Chain {
    pub n: u32,
    pub stages: Vec<StageMatrices>,
}

pub fn build_full_chain(n: u32, cap: SizeCap) -> Result<Chain> {
    cap.check(n)?;
    let spaces: Vec<StageSpace> = (1..=n)
        .rev()
        .map(|t| enumerate_stage(n, t, cap))
        .collect::<Result<_>>()?;
    let stages = spaces
        .par_iter()
        .enumerate()
        .map(|(k, space)| assemble_stage(space.clone(), spaces.get(k + 1).cloned()))
        .collect();
    Ok(Chain { n, stages })
}

impl Chain {
    pub fn stage(&self, t: u32) -> Option<&StageMatrices> {
        if t == 0 || t > self.n {
            return None;
        }
        self.stages.get((self.n - t) as usize)
    }

    /// Every state, stage `n` first; the absorbing state is last.
    pub fn states(&self) -> Vec<Partition> {
        self.stages
            .iter()
            .flat_map(|s| s.space.states().iter().cloned())
            .collect()
    }

    /// The full block upper bidiagonal transition matrix `P`.
    pub fn full_matrix(&self) -> RationalMatrix {
        let offsets = self.offsets();
        let total = *offsets.last().unwrap();
        let mut p = RationalMatrix::zeros(total, total);
        for (k, stage) in self.stages.iter().enumerate() {
            let base = offsets[k];
            copy_block(&mut p, &stage.a_t, base, base);
            if let Some(down) = &stage.a_down {
                copy_block(&mut p, down, base, offsets[k + 1]);
            }
        }
        p
    }

    /// Start offset of each stage's rows in [`Self::full_matrix`], plus the total.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offsets = vec![0];
        for stage in &self.stages {
            offsets.push(offsets.last().unwrap() + stage.space.len());
        }
        offsets
    }
}

fn copy_block(target: &mut RationalMatrix, block: &RationalMatrix, row0: usize, col0: usize) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let value = &block[(i, j)];
            if !value.is_zero() {
                target[(row0 + i, col0 + j)] = value.clone();
            }
        }
    }
}
