//! Landing vectors, stage times, total absorption time and its variance.
//!
//! Stage quantities follow the recursion
//!
//! ```text
//! L_n     = (1)
//! L_{t-1} = L_t (I - A_t)^-1 A_{t,t-1}
//! e_{t,t-1} = L_t (I - A_t)^-1 1
//! ```
//!
//! The variance uses the fundamental matrix `N = (I - A)^-1` of the transient
//! part of the full chain: `τ = N 1`, `τ₂ = (2N - I) τ - τ_sq`, read at the
//! all-singletons start state. Since `I - A` is block upper bidiagonal, `N`
//! is applied by block back-substitution from stage 2 upward instead of being
//! materialized.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::chain::{build_full_chain, Chain};
use crate::error::{Error, Result};
use crate::linalg::{solve, solve_left, Rational, RationalMatrix};
use crate::partition::{weight_vector, Partition, SizeCap};

/// Probability of first arriving in each state of stage `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandingVector {
    pub t: u32,
    pub probabilities: Vec<Rational>,
}

pub fn landing_vectors(chain: &Chain) -> Result<Vec<LandingVector>> {
    let mut out = Vec::with_capacity(chain.stages.len());
    let mut current = RationalMatrix::row_vector(vec![Rational::one()]);
    for stage in &chain.stages {
        out.push(LandingVector {
            t: stage.t,
            probabilities: current.entries().to_vec(),
        });
        if let Some(down) = &stage.a_down {
            let through = solve_left(&current, &stage.a_t.identity_minus()?)?;
            current = through.mul(down)?;
        }
    }
    Ok(out)
}

/// `e_{t,t-1} = L_t (I - A_t)^-1 1` for `t = n` down to 2.
pub fn stage_times(chain: &Chain, landing: &[LandingVector]) -> Result<Vec<(u32, Rational)>> {
    let mut out = Vec::new();
    for stage in chain.stages.iter().filter(|s| s.t >= 2) {
        let l = landing
            .iter()
            .find(|l| l.t == stage.t)
            .ok_or_else(|| Error::Shape(format!("no landing vector for stage {}", stage.t)))?;
        if l.probabilities.len() != stage.space.len() {
            return Err(Error::Shape(format!(
                "landing vector for stage {} has {} entries, stage has {} states",
                stage.t,
                l.probabilities.len(),
                stage.space.len()
            )));
        }
        let times = solve(
            &stage.a_t.identity_minus()?,
            &RationalMatrix::ones_column(stage.space.len()),
        )?;
        let e: Rational = l
            .probabilities
            .iter()
            .zip(times.entries())
            .map(|(p, x)| p * x)
            .sum();
        out.push((stage.t, e));
    }
    Ok(out)
}

/// Expected absorption time from the all-singletons state, summed stage by stage.
pub fn total_time(n: u32, cap: SizeCap) -> Result<Rational> {
    cap.check(n)?;
    let chain = build_full_chain(n, cap)?;
    let landing = landing_vectors(&chain)?;
    Ok(stage_times(&chain, &landing)?
        .into_iter()
        .map(|(_, e)| e)
        .sum())
}

/// `d_t = (n-t)(n+t-1) / (n(n-1))`, the eigenvalue of `A_t` for `u_t`.
pub fn same_stage_eigenvalue(n: u32, t: u32) -> Rational {
    let (n, t) = (i64::from(n), i64::from(t));
    Rational::new(((n - t) * (n + t - 1)).into(), (n * (n - 1)).into())
}

/// `h_t = t(n-t+1) / (n(n-1))`, with `u_t A_{t,t-1} = h_t u_{t-1}`.
pub fn descent_eigenvalue(n: u32, t: u32) -> Rational {
    let (n, t) = (i64::from(n), i64::from(t));
    Rational::new((t * (n - t + 1)).into(), (n * (n - 1)).into())
}

/// `n(n-1) / (t(t-1))`.
pub fn stage_time_formula(n: u32, t: u32) -> Rational {
    let (n, t) = (i64::from(n), i64::from(t));
    Rational::new((n * (n - 1)).into(), (t * (t - 1)).into())
}

pub fn weights_as_rationals(weights: &[BigUint]) -> Vec<Rational> {
    weights
        .iter()
        .map(|w| Rational::from_integer(BigInt::from(w.clone())))
        .collect()
}

/// `u_t` normalized to a probability vector.
pub fn normalized_weights(chain: &Chain, t: u32) -> Option<Vec<Rational>> {
    let stage = chain.stage(t)?;
    let weights = weights_as_rationals(&weight_vector(&stage.space).weights);
    let total: Rational = weights.iter().sum();
    Some(weights.into_iter().map(|w| w / &total).collect())
}

/// Applies `N = (I - A)^-1` to a vector over the transient states, given per
/// stage in chain order (stage `n` first, stage 1 omitted).
pub fn apply_fundamental(chain: &Chain, rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let transient: Vec<_> = chain.stages.iter().filter(|s| s.t >= 2).collect();
    if rhs.len() != transient.len()
        || rhs
            .iter()
            .zip(&transient)
            .any(|(b, s)| b.len() != s.space.len())
    {
        return Err(Error::Shape(
            "right-hand side does not match the transient stages".into(),
        ));
    }
    let mut out: Vec<Vec<Rational>> = vec![Vec::new(); transient.len()];
    let mut below: Option<RationalMatrix> = None;
    for k in (0..transient.len()).rev() {
        let stage = transient[k];
        let mut b = RationalMatrix::column(rhs[k].clone());
        if let (Some(x_below), Some(down)) = (&below, &stage.a_down) {
            b = b.add(&down.mul(x_below)?)?;
        }
        let x = solve(&stage.a_t.identity_minus()?, &b)?;
        out[k] = x.entries().to_vec();
        below = Some(x);
    }
    Ok(out)
}

/// Expected steps to absorption from every transient state, `τ = N 1`.
pub fn expected_absorption_times(chain: &Chain) -> Result<Vec<Vec<Rational>>> {
    let ones: Vec<Vec<Rational>> = chain
        .stages
        .iter()
        .filter(|s| s.t >= 2)
        .map(|s| vec![Rational::one(); s.space.len()])
        .collect();
    apply_fundamental(chain, &ones)
}

/// `τ₂ = (2N - I) τ - τ_sq` for every transient state.
pub fn absorption_variances(chain: &Chain) -> Result<Vec<Vec<Rational>>> {
    let tau = expected_absorption_times(chain)?;
    let n_tau = apply_fundamental(chain, &tau)?;
    let two = Rational::from_integer(2.into());
    Ok(tau
        .iter()
        .zip(&n_tau)
        .map(|(tau_s, ntau_s)| {
            tau_s
                .iter()
                .zip(ntau_s)
                .map(|(x, y)| &two * y - x - x * x)
                .collect()
        })
        .collect())
}

/// Variance of the absorption time from the all-singletons state. Zero when
/// `n = 1` (nothing left to merge).
pub fn absorption_variance(n: u32, cap: SizeCap) -> Result<Rational> {
    let chain = build_full_chain(n, cap)?;
    variance_of_chain(&chain)
}

pub fn variance_of_chain(chain: &Chain) -> Result<Rational> {
    if chain.n == 1 {
        return Ok(Rational::zero());
    }
    Ok(absorption_variances(chain)?[0][0].clone())
}

/// Dense transient block `A` of `P` (the absorbing row and column removed).
pub fn transient_matrix(chain: &Chain) -> RationalMatrix {
    let p = chain.full_matrix();
    let size = p.rows() - 1;
    let mut a = RationalMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            a[(i, j)] = p[(i, j)].clone();
        }
    }
    a
}

/// `N = (I - A)^-1`, materialized. Only sensible for small `n`.
pub fn fundamental_matrix(chain: &Chain) -> Result<RationalMatrix> {
    transient_matrix(chain).identity_minus()?.inverse()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageSummary {
    pub t: u32,
    pub states: Vec<Partition>,
    pub landing: Vec<Rational>,
    /// `e_{t,t-1}`; absent for the absorbing stage.
    pub expected_time: Option<Rational>,
}

/// Landing vectors, stage times, total time and variance for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainAnalysis {
    pub n: u32,
    pub stages: Vec<StageSummary>,
    pub total_time: Rational,
    pub variance: Rational,
}

impl ChainAnalysis {
    pub fn compute(n: u32, cap: SizeCap) -> Result<Self> {
        let chain = build_full_chain(n, cap)?;
        Self::from_chain(&chain)
    }

    pub fn from_chain(chain: &Chain) -> Result<Self> {
        let landing = landing_vectors(chain)?;
        let times = stage_times(chain, &landing)?;
        let stages = chain
            .stages
            .iter()
            .zip(landing)
            .map(|(stage, l)| StageSummary {
                t: stage.t,
                states: stage.space.states().to_vec(),
                landing: l.probabilities,
                expected_time: times
                    .iter()
                    .find(|(t, _)| *t == stage.t)
                    .map(|(_, e)| e.clone()),
            })
            .collect();
        Ok(ChainAnalysis {
            n: chain.n,
            stages,
            total_time: times.into_iter().map(|(_, e)| e).sum(),
            variance: variance_of_chain(chain)?,
        })
    }

    pub fn stage(&self, t: u32) -> Option<&StageSummary> {
        self.stages.iter().find(|s| s.t == t)
    }

    pub fn stage_times(&self) -> Vec<(u32, Rational)> {
        self.stages
            .iter()
            .filter_map(|s| s.expected_time.clone().map(|e| (s.t, e)))
            .collect()
    }
}
