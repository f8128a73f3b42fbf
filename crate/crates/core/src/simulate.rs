//! Monte Carlo simulation of the labeled-player game.
//!
//! Players carry a team id; a step draws an ordered (winner, loser) pair of
//! distinct players uniformly and moves the loser alone into the winner's
//! team. Every trial gets its own ChaCha stream seeded from
//! `(master_seed, trial index)`, and per-trial results are folded into
//! integer sums, so a report depends only on `(n, trials, master_seed)` and
//! not on how rayon schedules the work.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::ChainAnalysis;
use crate::error::{Error, Result};
use crate::linalg::{format_rational, to_f64, Rational};
use crate::partition::{enumerate_stage, Partition, SizeCap, StageSpace};

/// Default |z| above which a simulated quantity is flagged.
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

const TRIALS_PER_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub n: u32,
    pub trials: u64,
    pub master_seed: u64,
}

impl SimulationConfig {
    pub fn new(n: u32, trials: u64, master_seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::SizeTooSmall { n, min: 2 });
        }
        if trials == 0 {
            return Err(Error::Config("at least one trial is required".into()));
        }
        Ok(SimulationConfig {
            n,
            trials,
            master_seed,
        })
    }
}

/// Team membership of `n` labeled players.
#[derive(Debug, Clone)]
pub struct Teams {
    team_of: Vec<u32>,
    sizes: Vec<u32>,
    /// `counts[s]` = number of teams of size `s`; index 0 unused.
    counts: Vec<u32>,
    teams: u32,
    largest: usize,
}

impl Teams {
    pub fn singletons(n: u32) -> Self {
        let mut teams = Teams {
            team_of: Vec::new(),
            sizes: Vec::new(),
            counts: Vec::new(),
            teams: 0,
            largest: 0,
        };
        teams.reset(n);
        teams
    }

    /// Players `0..n` assigned to teams realizing `state`, largest team first.
    pub fn from_partition(state: &Partition) -> Self {
        let n = state.n();
        let mut teams = Teams::singletons(n);
        let mut player = 0usize;
        teams.counts.iter_mut().for_each(|c| *c = 0);
        teams.sizes.iter_mut().for_each(|s| *s = 0);
        for (team, size) in state.parts().into_iter().enumerate() {
            for _ in 0..size {
                teams.team_of[player] = team as u32;
                player += 1;
            }
            teams.sizes[team] = size;
            teams.counts[size as usize] += 1;
        }
        teams.teams = state.t();
        teams.largest = state.largest() as usize;
        teams
    }

    fn reset(&mut self, n: u32) {
        let n = n as usize;
        self.team_of.clear();
        self.team_of.extend(0..n as u32);
        self.sizes.clear();
        self.sizes.resize(n, 1);
        self.counts.clear();
        self.counts.resize(n + 1, 0);
        self.counts[1] = n as u32;
        self.teams = n as u32;
        self.largest = 1;
    }

    pub fn players(&self) -> u32 {
        self.team_of.len() as u32
    }

    /// Number of nonempty teams, i.e. the current stage.
    pub fn stage(&self) -> u32 {
        self.teams
    }

    /// The loser leaves its team and joins the winner's.
    pub fn apply(&mut self, winner: usize, loser: usize) {
        let (to, from) = (self.team_of[winner] as usize, self.team_of[loser] as usize);
        if to == from {
            return;
        }
        let (old_from, old_to) = (self.sizes[from] as usize, self.sizes[to] as usize);
        self.counts[old_from] -= 1;
        if old_from > 1 {
            self.counts[old_from - 1] += 1;
        } else {
            self.teams -= 1;
        }
        self.counts[old_to] -= 1;
        self.counts[old_to + 1] += 1;
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        self.team_of[loser] = to as u32;
        self.largest = self.largest.max(old_to + 1);
        while self.counts[self.largest] == 0 {
            self.largest -= 1;
        }
    }

    /// Team counts `(r_1, ..., r_k)` with trailing zeros trimmed.
    pub fn counts(&self) -> &[u32] {
        &self.counts[1..=self.largest]
    }

    pub fn partition(&self) -> Partition {
        Partition::from_counts(self.counts().to_vec()).expect("at least one team")
    }

    fn step(&mut self, rng: &mut impl Rng) {
        let n = self.team_of.len();
        let winner = rng.gen_range(0..n);
        let loser = loop {
            let candidate = rng.gen_range(0..n);
            if candidate != winner {
                break candidate;
            }
        };
        self.apply(winner, loser);
    }
}

/// Tallies the successors of `state` over every ordered (winner, loser)
/// pair of distinct labeled players.
pub fn labeled_transition_tally(state: &Partition) -> BTreeMap<Partition, u64> {
    let base = Teams::from_partition(state);
    let n = base.players() as usize;
    let mut tally = BTreeMap::new();
    for winner in 0..n {
        for loser in (0..n).filter(|&l| l != winner) {
            let mut teams = base.clone();
            teams.apply(winner, loser);
            *tally.entry(teams.partition()).or_insert(0) += 1;
        }
    }
    tally
}

/// Seed of trial `index` under `master_seed` (one SplitMix64 output).
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One game from all singletons to a single team. Entry `k` is the partition
/// after `k` steps; entry 0 is the start.
pub fn run_game(n: u32, seed: u64) -> Result<Vec<(u64, Partition)>> {
    if n < 2 {
        return Err(Error::SizeTooSmall { n, min: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut teams = Teams::singletons(n);
    let mut trajectory = vec![(0, teams.partition())];
    let mut step = 0;
    while teams.stage() > 1 {
        teams.step(&mut rng);
        step += 1;
        trajectory.push((step, teams.partition()));
    }
    Ok(trajectory)
}

/// Observations for one stage, indexed like the stage's canonical states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageObservation {
    pub t: u32,
    pub states: Vec<Partition>,
    /// Trials whose first arrival in this stage was at each state.
    pub landing_counts: Vec<u64>,
    /// Σ and Σ² of steps from first arrival here to first arrival below.
    pub time_sum: u128,
    pub time_sq_sum: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationReport {
    pub n: u32,
    pub trials: u64,
    pub master_seed: u64,
    /// Stages `t = n` down to 1.
    pub stages: Vec<StageObservation>,
    /// Σ T^k of the total absorption time T, for k = 1..=4.
    pub total_power_sums: [u128; 4],
}

#[derive(Clone)]
struct Accumulator {
    landing: Vec<Vec<u64>>,
    time_sum: Vec<u128>,
    time_sq_sum: Vec<u128>,
    power_sums: [u128; 4],
}

impl Accumulator {
    fn new(spaces: &[StageSpace]) -> Self {
        Accumulator {
            landing: spaces.iter().map(|s| vec![0; s.len()]).collect(),
            time_sum: vec![0; spaces.len()],
            time_sq_sum: vec![0; spaces.len()],
            power_sums: [0; 4],
        }
    }

    fn merge(mut self, other: Accumulator) -> Self {
        for (a, b) in self.landing.iter_mut().zip(other.landing) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self.time_sum
            .iter_mut()
            .zip(other.time_sum)
            .for_each(|(x, y)| *x += y);
        self.time_sq_sum
            .iter_mut()
            .zip(other.time_sq_sum)
            .for_each(|(x, y)| *x += y);
        self.power_sums
            .iter_mut()
            .zip(other.power_sums)
            .for_each(|(x, y)| *x += y);
        self
    }
}

pub fn simulate(config: &SimulationConfig) -> Result<SimulationReport> {
    let SimulationConfig {
        n,
        trials,
        master_seed,
    } = *config;
    if n < 2 || trials == 0 {
        return Err(Error::Config(format!(
            "invalid simulation config {config:?}"
        )));
    }
    let cap = SizeCap::new(n)?;
    // spaces[k] is stage t = n - k
    let spaces: Vec<StageSpace> = (1..=n)
        .rev()
        .map(|t| enumerate_stage(n, t, cap))
        .collect::<Result<_>>()?;

    let chunks = trials.div_ceil(TRIALS_PER_CHUNK);
    let totals = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = Accumulator::new(&spaces);
            let mut teams = Teams::singletons(n);
            let start = chunk * TRIALS_PER_CHUNK;
            let end = (start + TRIALS_PER_CHUNK).min(trials);
            for index in start..end {
                run_trial(
                    n,
                    trial_seed(master_seed, index),
                    &spaces,
                    &mut teams,
                    &mut acc,
                );
            }
            acc
        })
        .reduce(|| Accumulator::new(&spaces), Accumulator::merge);

    let stages = spaces
        .iter()
        .enumerate()
        .map(|(k, space)| StageObservation {
            t: space.t(),
            states: space.states().to_vec(),
            landing_counts: totals.landing[k].clone(),
            time_sum: totals.time_sum[k],
            time_sq_sum: totals.time_sq_sum[k],
        })
        .collect();
    Ok(SimulationReport {
        n,
        trials,
        master_seed,
        stages,
        total_power_sums: totals.power_sums,
    })
}

fn run_trial(n: u32, seed: u64, spaces: &[StageSpace], teams: &mut Teams, acc: &mut Accumulator) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    teams.reset(n);
    acc.landing[0][0] += 1;
    let mut total: u128 = 0;
    let mut in_stage: u128 = 0;
    let mut stage = n;
    while stage > 1 {
        teams.step(&mut rng);
        total += 1;
        in_stage += 1;
        let now = teams.stage();
        if now != stage {
            let k = (n - stage) as usize;
            acc.time_sum[k] += in_stage;
            acc.time_sq_sum[k] += in_stage * in_stage;
            let landed = spaces[k + 1]
                .index_of_counts(teams.counts())
                .expect("simulated state belongs to its stage");
            acc.landing[k + 1][landed] += 1;
            stage = now;
            in_stage = 0;
        }
    }
    acc.power_sums[0] += total;
    acc.power_sums[1] += total * total;
    acc.power_sums[2] += total * total * total;
    acc.power_sums[3] += total * total * total * total;
}

fn exact(x: u128) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

impl SimulationReport {
    pub fn stage(&self, t: u32) -> Option<&StageObservation> {
        self.stages.iter().find(|s| s.t == t)
    }

    pub fn landing_frequencies(&self, t: u32) -> Option<Vec<f64>> {
        let stage = self.stage(t)?;
        Some(
            stage
                .landing_counts
                .iter()
                .map(|&c| c as f64 / self.trials as f64)
                .collect(),
        )
    }

    /// Empirical standard error of each landing frequency.
    pub fn landing_std_errors(&self, t: u32) -> Option<Vec<f64>> {
        let n = self.trials as f64;
        Some(
            self.landing_frequencies(t)?
                .into_iter()
                .map(|p| (p * (1.0 - p) / n).sqrt())
                .collect(),
        )
    }

    pub fn stage_mean(&self, t: u32) -> Option<f64> {
        let s = self.stage(t).filter(|s| s.t >= 2)?;
        Some(to_f64(
            &(exact(s.time_sum) / exact(u128::from(self.trials))),
        ))
    }

    pub fn stage_std_error(&self, t: u32) -> Option<f64> {
        let s = self.stage(t).filter(|s| s.t >= 2)?;
        let (var, _) = sample_moments(&[s.time_sum, s.time_sq_sum], self.trials);
        Some((to_f64(&var) / self.trials as f64).sqrt())
    }

    pub fn total_mean(&self) -> f64 {
        to_f64(&(exact(self.total_power_sums[0]) / exact(u128::from(self.trials))))
    }

    /// Unbiased sample variance of the total absorption time.
    pub fn total_variance(&self) -> f64 {
        to_f64(&sample_moments(&self.total_power_sums[..2], self.trials).0)
    }

    pub fn total_mean_std_error(&self) -> f64 {
        (self.total_variance() / self.trials as f64).sqrt()
    }

    /// Large-sample standard error of the sample variance, `sqrt((m4 - m2²) / N)`.
    pub fn total_variance_std_error(&self) -> f64 {
        let (_, central) = sample_moments(&self.total_power_sums, self.trials);
        let m2 = to_f64(&central[0]);
        let m4 = to_f64(&central[2]);
        ((m4 - m2 * m2).max(0.0) / self.trials as f64).sqrt()
    }
}

/// Exact moments from integer power sums `Σx, Σx², ...`: returns the unbiased
/// variance and the biased central moments of order 2 and up.
fn sample_moments(power_sums: &[u128], trials: u64) -> (Rational, Vec<Rational>) {
    let count = exact(u128::from(trials));
    let raw: Vec<Rational> = power_sums.iter().map(|&s| exact(s) / &count).collect();
    let mean = raw[0].clone();
    let mut central = Vec::new();
    if raw.len() >= 2 {
        central.push(&raw[1] - &mean * &mean);
    }
    if raw.len() >= 3 {
        let m3 = &raw[2] - exact(3) * &mean * &raw[1] + exact(2) * &mean * &mean * &mean;
        central.push(m3);
    }
    if raw.len() >= 4 {
        let mean2 = &mean * &mean;
        let m4 = &raw[3] - exact(4) * &mean * &raw[2] + exact(6) * &mean2 * &raw[1]
            - exact(3) * &mean2 * &mean2;
        central.push(m4);
    }
    let unbiased = if trials > 1 {
        &central[0] * &count / (&count - exact(1))
    } else {
        Rational::zero()
    };
    (unbiased, central)
}

/// One simulated quantity next to its exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub quantity: String,
    pub exact: Rational,
    pub empirical: f64,
    pub std_error: f64,
    pub z: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub n: u32,
    pub trials: u64,
    pub threshold: f64,
    pub rows: Vec<Discrepancy>,
}

impl ComparisonTable {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| !r.flagged)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

fn z_score(empirical: f64, exact: f64, std_error: f64) -> f64 {
    let diff = empirical - exact;
    if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-12 * exact.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// Compares a simulation against the exact analysis of the same `n`.
///
/// Landing frequencies use the binomial standard error under the exact
/// probability; means and the variance use the empirical standard errors.
pub fn compare(
    report: &SimulationReport,
    analysis: &ChainAnalysis,
    threshold: f64,
) -> Result<ComparisonTable> {
    if report.n != analysis.n || report.stages.len() != analysis.stages.len() {
        return Err(Error::Shape(format!(
            "simulation has n = {} with {} stages, analysis has n = {} with {} stages",
            report.n,
            report.stages.len(),
            analysis.n,
            analysis.stages.len()
        )));
    }
    let trials = report.trials as f64;
    let mut rows = Vec::new();
    let mut push = |quantity: String, exact: Rational, empirical: f64, std_error: f64| {
        let z = z_score(empirical, to_f64(&exact), std_error);
        rows.push(Discrepancy {
            quantity,
            exact,
            empirical,
            std_error,
            z,
            // NaN z counts as flagged
            flagged: !matches!(
                z.abs().partial_cmp(&threshold),
                Some(Ordering::Less | Ordering::Equal)
            ),
        });
    };

    for (observed, stage) in report.stages.iter().zip(&analysis.stages) {
        if observed.t != stage.t || observed.states != stage.states {
            return Err(Error::Shape(format!("stage {} states differ", stage.t)));
        }
        for ((state, count), p) in observed
            .states
            .iter()
            .zip(&observed.landing_counts)
            .zip(&stage.landing)
        {
            let p_f = to_f64(p);
            push(
                format!("L_{}{}", stage.t, state.part_list()),
                p.clone(),
                *count as f64 / trials,
                (p_f * (1.0 - p_f) / trials).sqrt(),
            );
        }
        if let Some(e) = &stage.expected_time {
            push(
                format!("e_{},{}", stage.t, stage.t - 1),
                e.clone(),
                report.stage_mean(stage.t).unwrap_or(f64::NAN),
                report.stage_std_error(stage.t).unwrap_or(f64::NAN),
            );
        }
    }
    push(
        "total_mean".into(),
        analysis.total_time.clone(),
        report.total_mean(),
        report.total_mean_std_error(),
    );
    push(
        "total_variance".into(),
        analysis.variance.clone(),
        report.total_variance(),
        report.total_variance_std_error(),
    );
    Ok(ComparisonTable {
        n: report.n,
        trials: report.trials,
        threshold,
        rows,
    })
}

impl std::fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<22} {:>12} {:>14} {:>12} {:>9}",
            "quantity", "exact", "empirical", "std err", "z"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<22} {:>12} {:>14.6} {:>12.3e} {:>9.3}{}",
                r.quantity,
                format_rational(&r.exact),
                r.empirical,
                r.std_error,
                r.z,
                if r.flagged { "  FLAGGED" } else { "" }
            )?;
        }
        Ok(())
    }
}
