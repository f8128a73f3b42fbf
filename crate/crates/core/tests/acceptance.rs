//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use coalesce_core::analysis::{
    absorption_variance, landing_vectors, total_time, ChainAnalysis, LandingVector,
};
use coalesce_core::chain::{build_full_chain, build_stage, transition_row, Chain};
use coalesce_core::linalg::{format_rational, int, ratio, solve, Rational, RationalMatrix};
use coalesce_core::partition::{weight_vector, Partition, SizeCap};
use coalesce_core::simulate::{compare, simulate, SimulationConfig, DEFAULT_Z_THRESHOLD};
use coalesce_core::symmetric::{build_system, closed_form_inverse, expected_wins};
use num_bigint::BigUint;

use common::*;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);
/// (n, t, expected probability per state label)
type LandingFixture<'a> = (u32, u32, &'a [(&'a str, Rational)]);

const MAX_N: u32 = 12;
const MC_TRIALS: u64 = 1_000_000;
const MC_SEED: u64 = 0x5eed_2024;

fn cap() -> SizeCap {
    SizeCap::default()
}

fn part(label: &str) -> Partition {
    Partition::from_parts(&digits(label)).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit_secs: u64) -> Outcome {
    check(elapsed.as_secs_f64() < limit_secs as f64, || {
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn chains() -> Result<Vec<(Chain, Vec<LandingVector>)>, String> {
    (2..=MAX_N)
        .map(|n| {
            let chain = build_full_chain(n, cap()).map_err(err)?;
            let landing = landing_vectors(&chain).map_err(err)?;
            Ok((chain, landing))
        })
        .collect()
}

fn landing_at(landing: &[LandingVector], t: u32) -> &[Rational] {
    &landing.iter().find(|l| l.t == t).unwrap().probabilities
}

fn u_row(chain: &Chain, t: u32) -> Vec<Rational> {
    let space = &chain.stage(t).unwrap().space;
    weight_vector(space)
        .weights
        .iter()
        .map(|w| Rational::from_integer(w.clone().into()))
        .collect()
}

fn row_times(row: &[Rational], m: &RationalMatrix) -> Vec<Rational> {
    RationalMatrix::row_vector(row.to_vec())
        .mul(m)
        .unwrap()
        .into_entries()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `L_t (I - A_t)^-1 1` through an explicit solve.
fn matrix_stage_time(chain: &Chain, landing: &[LandingVector], t: u32) -> Result<Rational, String> {
    let stage = chain.stage(t).unwrap();
    let x = solve(
        &stage.a_t.identity_minus().map_err(err)?,
        &RationalMatrix::ones_column(stage.space.len()),
    )
    .map_err(err)?;
    Ok(dot(landing_at(landing, t), x.entries()))
}

fn exact_totals() -> Outcome {
    let start = Instant::now();
    for n in 2..=MAX_N {
        let total = total_time(n, cap()).map_err(err)?;
        let expected = int(i64::from((n - 1) * (n - 1)));
        check(total == expected, || format!("n = {n}: got {total}"))?;
    }
    within(start.elapsed(), 10)
}

fn stage_times() -> Outcome {
    for (chain, landing) in chains()? {
        let n = chain.n;
        for t in 2..=n {
            let got = matrix_stage_time(&chain, &landing, t)?;
            let expected = ratio(i64::from(n * (n - 1)), i64::from(t * (t - 1)));
            check(got == expected, || format!("n = {n}, t = {t}: got {got}"))?;
        }
    }
    let fixtures: [(u32, Vec<Rational>); 2] = [
        (4, vec![int(1), int(2), int(6)]),
        (5, vec![int(1), ratio(5, 3), ratio(10, 3), int(10)]),
    ];
    for (n, expected) in fixtures {
        let chain = build_full_chain(n, cap()).map_err(err)?;
        let landing = landing_vectors(&chain).map_err(err)?;
        for (t, e) in (2..=n).rev().zip(expected) {
            let got = matrix_stage_time(&chain, &landing, t)?;
            check(got == e, || {
                format!("fixture n = {n}, t = {t}: got {got}, want {e}")
            })?;
        }
    }
    Ok(())
}

fn landing_vectors_match_weights() -> Outcome {
    for (chain, landing) in chains()? {
        for t in 1..=chain.n {
            let u = u_row(&chain, t);
            let total: Rational = u.iter().sum();
            let normalized: Vec<Rational> = u.iter().map(|w| w / &total).collect();
            check(landing_at(&landing, t) == normalized.as_slice(), || {
                format!("n = {}, t = {t}", chain.n)
            })?;
        }
    }
    let fixtures: [LandingFixture; 3] = [
        (4, 2, &[("31", ratio(2, 3)), ("22", ratio(1, 3))]),
        (6, 4, &[("2211", ratio(3, 5)), ("3111", ratio(2, 5))]),
        (
            6,
            3,
            &[
                ("222", ratio(1, 10)),
                ("321", ratio(3, 5)),
                ("411", ratio(3, 10)),
            ],
        ),
    ];
    for (n, t, expected) in fixtures {
        let chain = build_full_chain(n, cap()).map_err(err)?;
        let landing = landing_vectors(&chain).map_err(err)?;
        let space = &chain.stage(t).unwrap().space;
        for (label, p) in expected {
            let got = &landing_at(&landing, t)[space.index_of(&part(label)).unwrap()];
            check(got == p, || {
                format!("n = {n}, L_{t}[{label}] = {got}, want {p}")
            })?;
        }
    }
    Ok(())
}

fn matrix_fixtures() -> Outcome {
    let six = build_full_chain(6, cap()).map_err(err)?;
    let labels: Vec<String> = six.states().iter().map(|p| p.part_list()).collect();
    let reference_labels: Vec<String> =
        SIX_PLAYER_STATES.iter().map(|s| format!("[{s}]")).collect();
    check(labels == reference_labels, || {
        format!("n = 6 state order {labels:?}")
    })?;
    let reference = RationalMatrix::from_scaled_integers(
        &SIX_PLAYER_P.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        30,
    )
    .map_err(err)?;
    check(six.full_matrix() == reference, || {
        "n = 6 full matrix differs".into()
    })?;

    let ten = build_stage(10, 4, cap()).map_err(err)?;
    let lower = ten.lower_space.as_ref().unwrap();
    let down = ten.a_down.as_ref().unwrap();
    for (i, r) in TEN_STAGE_FOUR.iter().enumerate() {
        let row = ten.space.index_of(&part(r)).unwrap();
        for (j, c) in TEN_STAGE_FOUR.iter().enumerate() {
            let col = ten.space.index_of(&part(c)).unwrap();
            check(ten.a_t[(row, col)] == ratio(TEN_A4[i][j], 90), || {
                format!("A_4 [{r}] -> [{c}] = {}", ten.a_t[(row, col)])
            })?;
        }
        for (j, c) in TEN_STAGE_THREE.iter().enumerate() {
            let col = lower.index_of(&part(c)).unwrap();
            check(down[(row, col)] == ratio(TEN_A43[i][j], 90), || {
                format!("A_43 [{r}] -> [{c}] = {}", down[(row, col)])
            })?;
        }
    }

    let four = build_stage(4, 2, cap()).map_err(err)?;
    let x = solve(
        &four.a_t.identity_minus().map_err(err)?,
        &RationalMatrix::ones_column(2),
    )
    .map_err(err)?;
    for (label, want) in [("31", ratio(11, 2)), ("22", int(7))] {
        let got = &x[(four.space.index_of(&part(label)).unwrap(), 0)];
        check(*got == want, || {
            format!("n = 4 time from [{label}] = {got}")
        })?;
    }
    Ok(())
}

fn eigen_relations() -> Outcome {
    for (chain, _) in chains()? {
        let n = chain.n;
        let nn = i64::from(n * (n - 1));
        for t in 2..=n {
            let (ni, ti) = (i64::from(n), i64::from(t));
            let d = ratio((ni - ti) * (ni + ti - 1), nn);
            let h = ratio(ti * (ni - ti + 1), nn);
            let stage = chain.stage(t).unwrap();
            let u = u_row(&chain, t);
            let u_down = u_row(&chain, t - 1);
            let scaled = |v: &[Rational], s: &Rational| -> Vec<Rational> {
                v.iter().map(|x| x * s).collect()
            };
            check(row_times(&u, &stage.a_t) == scaled(&u, &d), || {
                format!("u_t A_t != d_t u_t at n = {n}, t = {t}")
            })?;
            let a_down = stage.a_down.as_ref().unwrap();
            check(row_times(&u, a_down) == scaled(&u_down, &h), || {
                format!("u_t A_t,t-1 != h_t u_t-1 at n = {n}, t = {t}")
            })?;
            let identity = &d + &h * int(ti - 1) / int(ni - ti + 1);
            check(identity == int(1), || {
                format!("d + (t-1)h/(n-t+1) = {identity} at n = {n}, t = {t}")
            })?;
        }
    }
    let chain = build_full_chain(10, cap()).map_err(err)?;
    let stage = chain.stage(4).unwrap();
    let u4 = u_row(&chain, 4);
    let u3 = u_row(&chain, 3);
    let d4 = &row_times(&u4, &stage.a_t)[0] / &u4[0];
    let h4 = &row_times(&u4, stage.a_down.as_ref().unwrap())[0] / &u3[0];
    check(d4 == ratio(13, 15), || format!("d_4 = {d4}"))?;
    check(h4 == ratio(14, 45), || format!("h_4 = {h4}"))
}

fn coefficient_sums() -> Outcome {
    for (chain, _) in chains()? {
        let n = chain.n;
        let sums: Vec<Rational> = (1..=n).map(|t| u_row(&chain, t).iter().sum()).collect();
        for t in 1..=n {
            let want = binomial(u64::from(n - 1), u64::from(t - 1));
            let got = &sums[t as usize - 1];
            check(*got == int(want as i64), || {
                format!("u_{t}1 = {got} at n = {n}")
            })?;
            if t >= 2 {
                let predicted =
                    &sums[t as usize - 1] * ratio(i64::from(t - 1), i64::from(n - t + 1));
                check(sums[t as usize - 2] == predicted, || {
                    format!("recursion fails at n = {n}, t = {t}")
                })?;
            }
        }
    }
    let chain = build_full_chain(10, cap()).map_err(err)?;
    for (t, want) in [(4, 84u32), (3, 36)] {
        let sum = weight_vector(&chain.stage(t).unwrap().space).sum();
        check(sum == BigUint::from(want), || {
            format!("u_{t}1 = {sum} at n = 10")
        })?;
    }
    Ok(())
}

fn variances() -> Outcome {
    let start = Instant::now();
    let expected = [int(0), int(6), int(32), ratio(890, 9), ratio(469, 2)];
    for (n, want) in (2..=6).zip(expected) {
        let got = absorption_variance(n, cap()).map_err(err)?;
        check(got == want, || {
            format!(
                "n = {n}: got {}, want {}",
                format_rational(&got),
                format_rational(&want)
            )
        })?;
    }
    within(start.elapsed(), 5)
}

fn symmetric_system() -> Outcome {
    for n in 2..=MAX_N {
        let system = build_system(n).map_err(err)?;
        let inverse = closed_form_inverse(n).map_err(err)?;
        let size = (n - 1) as usize;
        check(
            inverse.mul(&system.m).map_err(err)? == RationalMatrix::identity(size),
            || format!("closed form is not an inverse at n = {n}"),
        )?;
        let x1 = expected_wins(n).map_err(err)?[0].clone() * int(i64::from(n));
        check(x1 == int(i64::from((n - 1) * (n - 1))), || {
            format!("n x_1 = {x1} at n = {n}")
        })?;
        let total = total_time(n, cap()).map_err(err)?;
        check(x1 == total, || {
            format!("n x_1 = {x1}, total = {total} at n = {n}")
        })?;
    }
    let reference = RationalMatrix::from_scaled_integers(
        &M6_INVERSE.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        6,
    )
    .map_err(err)?;
    check(closed_form_inverse(6).map_err(err)? == reference, || {
        "M_6 inverse differs".into()
    })
}

fn oracle_equivalence() -> Outcome {
    for n in 2..=7 {
        let chain = build_full_chain(n, cap()).map_err(err)?;
        for state in chain.states() {
            let row: Vec<(Vec<u32>, u64)> = transition_row(&state)
                .into_iter()
                .map(|(p, d)| (p.parts(), d))
                .collect();
            let mut row = row;
            row.sort();
            let oracle: Vec<(Vec<u32>, u64)> = labeled_tally(&state.parts()).into_iter().collect();
            check(row == oracle, || {
                format!("row of {state} differs from the labeled tally")
            })?;
        }
    }
    let row = transition_row(&part("321"));
    let expected = [("222", 3), ("321", 16), ("411", 6), ("33", 2), ("42", 3)];
    check(row.len() == expected.len(), || {
        format!("[321] row has {} targets", row.len())
    })?;
    for (label, count) in expected {
        let got = row.get(&part(label)).copied().unwrap_or(0);
        check(got == count, || {
            format!("[321] -> [{label}] = {got}, want {count}")
        })?;
    }
    Ok(())
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for n in 4..=6 {
        let config = SimulationConfig::new(n, MC_TRIALS, MC_SEED).map_err(err)?;
        let report = simulate(&config).map_err(err)?;
        let analysis = ChainAnalysis::compute(n, cap()).map_err(err)?;
        let table = compare(&report, &analysis, DEFAULT_Z_THRESHOLD).map_err(err)?;
        if let Some(row) = table.rows.iter().find(|r| r.flagged) {
            return Err(format!("n = {n}: {} has z = {:.2}", row.quantity, row.z));
        }
        println!(
            "    n = {n}: {} quantities, max |z| = {:.2}",
            table.rows.len(),
            table.max_abs_z()
        );
        reports.push(report);
    }
    let elapsed = start.elapsed();

    // same seed on a pool of a different size must give identical tallies
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .map_err(err)?;
    let config = SimulationConfig::new(4, MC_TRIALS, MC_SEED).map_err(err)?;
    let rerun = pool.install(|| simulate(&config)).map_err(err)?;
    check(rerun == reports[0], || {
        "rerun with the same seed differs".into()
    })?;
    within(elapsed, 60)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact totals", exact_totals),
        ("stage times", stage_times),
        ("landing vectors", landing_vectors_match_weights),
        ("matrix fixtures", matrix_fixtures),
        ("eigen-relations", eigen_relations),
        ("coefficient sums", coefficient_sums),
        ("variance", variances),
        ("symmetric approach", symmetric_system),
        ("oracle equivalence", oracle_equivalence),
        ("monte carlo consistency", monte_carlo),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
