//! Exact identity checks for one chain size.
//!
//! Each check compares two independently computed exact values and reports
//! the first discrepancy it finds. Nothing here uses a tolerance.

use num_traits::{One, Zero};

use crate::analysis::{
    descent_eigenvalue, expected_absorption_times, landing_vectors, normalized_weights,
    same_stage_eigenvalue, stage_time_formula, stage_times, weights_as_rationals, LandingVector,
};
use crate::chain::{build_full_chain, Chain};
use crate::error::Result;
use crate::linalg::{format_rational, int, solve_left, Rational, RationalMatrix};
use crate::partition::{binomial, weight_vector, SizeCap};
use crate::symmetric;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// First discrepancy, if any.
    pub detail: Option<String>,
}

impl Check {
    fn from_failures(name: &'static str, mut failures: impl Iterator<Item = String>) -> Self {
        let detail = failures.next();
        Check {
            name,
            passed: detail.is_none(),
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub n: u32,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn u_row(chain: &Chain, t: u32) -> RationalMatrix {
    let stage = chain.stage(t).expect("stage exists");
    RationalMatrix::row_vector(weights_as_rationals(&weight_vector(&stage.space).weights))
}

fn show(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

fn descending_stages(n: u32) -> impl Iterator<Item = u32> {
    (2..=n).rev()
}

/// `Σ_{r ∈ S(n,t)} m_r = C(n-1, t-1)` for every stage.
pub fn verify_weight_sums(chain: &Chain) -> Check {
    let n = chain.n;
    Check::from_failures(
        "weight sums equal C(n-1, t-1)",
        chain.stages.iter().filter_map(move |stage| {
            let sum = weight_vector(&stage.space).sum();
            let expected = binomial(n - 1, stage.t - 1);
            (sum != expected).then(|| format!("t = {}: sum {sum}, expected {expected}", stage.t))
        }),
    )
}

/// `u_{t-1} 1 = (t-1)/(n-t+1) · u_t 1`, and the recursion from `u_n 1 = 1`
/// reproduces `C(n-1, t-1)`.
pub fn verify_sum_recursion(chain: &Chain) -> Check {
    let n = chain.n;
    let sum_of = |t: u32| -> Rational {
        weights_as_rationals(&weight_vector(&chain.stage(t).unwrap().space).weights)
            .into_iter()
            .sum()
    };
    let mut failures = Vec::new();
    let mut running = Rational::one();
    for t in descending_stages(n) {
        let factor = Rational::new(i64::from(t - 1).into(), i64::from(n - t + 1).into());
        let (upper, lower) = (sum_of(t), sum_of(t - 1));
        if lower != &factor * &upper {
            failures.push(format!(
                "t = {t}: u_(t-1)1 = {lower}, ratio gives {}",
                &factor * &upper
            ));
        }
        running *= &factor;
        let binom = Rational::from_integer(binomial(n - 1, t - 2).into());
        if running != binom {
            failures.push(format!(
                "t = {}: recursion gives {running}, C(n-1, t-2) = {binom}",
                t - 1
            ));
        }
    }
    Check::from_failures("weight sum recursion", failures.into_iter())
}

/// `u_t A_t = d_t u_t` for `2 <= t <= n`.
pub fn verify_same_stage_eigen(chain: &Chain) -> Check {
    let n = chain.n;
    Check::from_failures(
        "u_t A_t = d_t u_t",
        descending_stages(n).filter_map(|t| {
            let u = u_row(chain, t);
            let lhs = u.mul(&chain.stage(t).unwrap().a_t).ok()?;
            let rhs = u.scale(&same_stage_eigenvalue(n, t));
            (lhs != rhs).then(|| {
                format!(
                    "t = {t}: {} vs {}",
                    show(lhs.entries()),
                    show(rhs.entries())
                )
            })
        }),
    )
}

/// `u_t A_{t,t-1} = h_t u_{t-1}` for `2 <= t <= n`.
pub fn verify_descent_eigen(chain: &Chain) -> Check {
    let n = chain.n;
    Check::from_failures(
        "u_t A_(t,t-1) = h_t u_(t-1)",
        descending_stages(n).filter_map(|t| {
            let down = chain.stage(t).unwrap().a_down.as_ref()?;
            let lhs = u_row(chain, t).mul(down).ok()?;
            let rhs = u_row(chain, t - 1).scale(&descent_eigenvalue(n, t));
            (lhs != rhs).then(|| {
                format!(
                    "t = {t}: {} vs {}",
                    show(lhs.entries()),
                    show(rhs.entries())
                )
            })
        }),
    )
}

/// `d_t + (t-1) h_t / (n-t+1) = 1`.
pub fn verify_eigenvalue_dependency(n: u32) -> Check {
    Check::from_failures(
        "d_t + (t-1) h_t / (n-t+1) = 1",
        descending_stages(n).filter_map(move |t| {
            let lhs = same_stage_eigenvalue(n, t)
                + descent_eigenvalue(n, t)
                    * Rational::new(i64::from(t - 1).into(), i64::from(n - t + 1).into());
            (!lhs.is_one()).then(|| format!("t = {t}: {lhs}"))
        }),
    )
}

/// `u_t (I - A_t)^-1 = u_t / (1 - d_t)`.
pub fn verify_resolvent_eigen(chain: &Chain) -> Check {
    let n = chain.n;
    Check::from_failures(
        "u_t (I - A_t)^-1 = u_t / (1 - d_t)",
        descending_stages(n).filter_map(|t| {
            let u = u_row(chain, t);
            let resolvent = chain.stage(t).unwrap().a_t.identity_minus().ok()?;
            let lhs = match solve_left(&u, &resolvent) {
                Ok(x) => x,
                Err(e) => return Some(format!("t = {t}: {e}")),
            };
            let rhs = u.scale(&(Rational::one() - same_stage_eigenvalue(n, t)).recip());
            (lhs != rhs).then(|| {
                format!(
                    "t = {t}: {} vs {}",
                    show(lhs.entries()),
                    show(rhs.entries())
                )
            })
        }),
    )
}

/// Landing vectors from the recursion equal normalized `u_t`.
pub fn verify_landing_weights(chain: &Chain, landing: &[LandingVector]) -> Check {
    Check::from_failures(
        "L_t = u_t / (u_t 1)",
        landing.iter().filter_map(|l| {
            let expected = normalized_weights(chain, l.t)?;
            (l.probabilities != expected).then(|| {
                format!(
                    "t = {}: {} vs {}",
                    l.t,
                    show(&l.probabilities),
                    show(&expected)
                )
            })
        }),
    )
}

/// Landing vectors are probability vectors.
pub fn verify_landing_sums(landing: &[LandingVector]) -> Check {
    Check::from_failures(
        "landing vectors sum to 1",
        landing.iter().filter_map(|l| {
            let sum: Rational = l.probabilities.iter().sum();
            let negative = l.probabilities.iter().any(|p| p < &Rational::zero());
            (!sum.is_one() || negative).then(|| format!("t = {}: {}", l.t, show(&l.probabilities)))
        }),
    )
}

/// Every row of `[A_t | A_{t,t-1}]` sums to one.
pub fn verify_stochastic_rows(chain: &Chain) -> Check {
    Check::from_failures(
        "rows of P sum to 1",
        chain.stages.iter().filter_map(|stage| {
            let bad = stage
                .combined()
                .row_sums()
                .into_iter()
                .position(|s| !s.is_one())?;
            Some(format!(
                "t = {}, row {}",
                stage.t,
                stage.space.states()[bad]
            ))
        }),
    )
}

/// Every transition row totals `n(n-1)` ordered pairs and stays in stage `t` or `t-1`.
pub fn verify_transition_counts(chain: &Chain) -> Check {
    let n = u64::from(chain.n);
    Check::from_failures(
        "transition counts sum to n(n-1)",
        chain
            .stages
            .iter()
            .flat_map(|stage| stage.space.states().iter())
            .filter_map(move |state| {
                if n < 2 {
                    return None;
                }
                let row = crate::chain::transition_row(state);
                let total: u64 = row.values().sum();
                let stray = row
                    .keys()
                    .find(|s| s.t() != state.t() && s.t() + 1 != state.t());
                if total != n * (n - 1) {
                    Some(format!("{state}: {total}"))
                } else {
                    stray.map(|s| format!("{state} -> {s} skips a stage"))
                }
            }),
    )
}

/// `L_t (I - A_t)^-1 1 = n(n-1) / (t(t-1))`.
pub fn verify_stage_times(chain: &Chain, landing: &[LandingVector]) -> Check {
    let n = chain.n;
    let failures: Vec<String> = match stage_times(chain, landing) {
        Ok(times) => times
            .into_iter()
            .filter(|(t, e)| *e != stage_time_formula(n, *t))
            .map(|(t, e)| format!("t = {t}: {e} vs {}", stage_time_formula(n, t)))
            .collect(),
        Err(e) => vec![e.to_string()],
    };
    Check::from_failures("e_(t,t-1) = n(n-1) / (t(t-1))", failures.into_iter())
}

/// Stage-decomposed total equals `(n-1)²`.
pub fn verify_total_time(chain: &Chain, landing: &[LandingVector]) -> Check {
    let n = i64::from(chain.n);
    let expected = int((n - 1) * (n - 1));
    let failure = match stage_times(chain, landing) {
        Ok(times) => {
            let total: Rational = times.into_iter().map(|(_, e)| e).sum();
            (total != expected).then(|| format!("total {total}, expected {expected}"))
        }
        Err(e) => Some(e.to_string()),
    };
    Check::from_failures("total time = (n-1)^2", failure.into_iter())
}

/// Fundamental-matrix `τ` at the all-singletons state equals `(n-1)²`.
pub fn verify_fundamental_total(chain: &Chain) -> Check {
    let n = i64::from(chain.n);
    let expected = int((n - 1) * (n - 1));
    let failure = if chain.n < 2 {
        None
    } else {
        match expected_absorption_times(chain) {
            Ok(tau) => (tau[0][0] != expected).then(|| format!("tau = {}", tau[0][0])),
            Err(e) => Some(e.to_string()),
        }
    };
    Check::from_failures("(N 1) at all singletons = (n-1)^2", failure.into_iter())
}

/// Closed-form `M_n^-1` inverts `M_n`, `n x_1 = (n-1)²`, and it agrees with
/// the stage-decomposed total.
pub fn verify_symmetric(chain: &Chain, landing: &[LandingVector]) -> Check {
    let n = chain.n;
    let mut failures = Vec::new();
    if n >= 2 {
        let result: Result<()> = (|| {
            let system = symmetric::build_system(n)?;
            let inverse = symmetric::closed_form_inverse(n)?;
            if inverse.mul(&system.m)? != RationalMatrix::identity(system.m.rows()) {
                failures.push("closed-form inverse times M_n is not I".to_string());
            }
            let total = symmetric::total_time_from_wins(n)?;
            let n64 = i64::from(n);
            if total != int((n64 - 1) * (n64 - 1)) {
                failures.push(format!("n x_1 = {total}"));
            }
            let staged: Rational = stage_times(chain, landing)?
                .into_iter()
                .map(|(_, e)| e)
                .sum();
            if staged != total {
                failures.push(format!("n x_1 = {total} but stage sum = {staged}"));
            }
            Ok(())
        })();
        if let Err(e) = result {
            failures.push(e.to_string());
        }
    }
    Check::from_failures("symmetric approach agrees", failures.into_iter())
}

/// Runs every exact identity for one `n`.
pub fn verify_all(n: u32, cap: SizeCap) -> Result<VerificationReport> {
    let chain = build_full_chain(n, cap)?;
    let landing = landing_vectors(&chain)?;
    let checks = vec![
        verify_stochastic_rows(&chain),
        verify_transition_counts(&chain),
        verify_weight_sums(&chain),
        verify_sum_recursion(&chain),
        verify_same_stage_eigen(&chain),
        verify_resolvent_eigen(&chain),
        verify_descent_eigen(&chain),
        verify_eigenvalue_dependency(n),
        verify_landing_sums(&landing),
        verify_landing_weights(&chain, &landing),
        verify_stage_times(&chain, &landing),
        verify_total_time(&chain, &landing),
        verify_fundamental_total(&chain),
        verify_symmetric(&chain, &landing),
    ];
    Ok(VerificationReport { n, checks })
}
