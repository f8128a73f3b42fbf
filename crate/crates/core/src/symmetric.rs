//! Total absorption time from a single field's point of view.
//!
//! Fix one of the `n` starting fields and let `x_i` be the expected number of
//! future wins by its members when `i` of them remain. With `x_0 = x_n = 0`
//! the one-step balance reduces to
//!
//! ```text
//! 2 x_i - (x_{i-1} + x_{i+1}) = (n-1) / (n-i),   1 <= i <= n-1
//! ```
//!
//! i.e. `M_n x = rhs` with `M_n` the (n-1)x(n-1) second-difference matrix.
//! Every step is exactly one win, so the total time is `n · x_1`.
//!
//! Indices `i`, `j` in this module are 1-based.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{int, ratio, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSystem {
    pub n: u32,
    pub m: RationalMatrix,
    pub rhs: Vec<Rational>,
}

impl SymmetricSystem {
    /// Entry `(i, j)` of `M_n`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.m[(i - 1, j - 1)]
    }

    /// Residuals of `2x_i - x_{i-1} - x_{i+1} - rhs_i` with `x_0 = x_n = 0`.
    pub fn recurrence_residuals(&self, x: &[Rational]) -> Vec<Rational> {
        let zero = Rational::zero();
        let at = |i: usize| -> &Rational {
            if i == 0 || i == x.len() + 1 {
                &zero
            } else {
                &x[i - 1]
            }
        };
        (1..=x.len())
            .map(|i| int(2) * at(i) - at(i - 1) - at(i + 1) - &self.rhs[i - 1])
            .collect()
    }
}

fn require_two(n: u32) -> Result<()> {
    if n < 2 {
        Err(Error::SizeTooSmall { n, min: 2 })
    } else {
        Ok(())
    }
}

pub fn build_system(n: u32) -> Result<SymmetricSystem> {
    require_two(n)?;
    let size = n as usize - 1;
    let mut m = RationalMatrix::zeros(size, size);
    for k in 0..size {
        m[(k, k)] = int(2);
        if k + 1 < size {
            m[(k, k + 1)] = int(-1);
            m[(k + 1, k)] = int(-1);
        }
    }
    let n64 = i64::from(n);
    let rhs = (1..n64).map(|i| ratio(n64 - 1, n64 - i)).collect();
    Ok(SymmetricSystem { n, m, rhs })
}

/// `(M_n^-1)_{ij} = min(i,j) (n - max(i,j)) / n`.
pub fn closed_form_inverse(n: u32) -> Result<RationalMatrix> {
    require_two(n)?;
    let size = n as usize - 1;
    let n64 = i64::from(n);
    let mut inv = RationalMatrix::zeros(size, size);
    for i in 1..=size {
        for j in 1..=size {
            let (lo, hi) = (i.min(j) as i64, i.max(j) as i64);
            inv[(i - 1, j - 1)] = ratio(lo * (n64 - hi), n64);
        }
    }
    Ok(inv)
}

/// `(x_1, ..., x_{n-1}) = M_n^-1 rhs`, using the closed-form inverse.
pub fn expected_wins(n: u32) -> Result<Vec<Rational>> {
    let system = build_system(n)?;
    let x = closed_form_inverse(n)?.mul(&RationalMatrix::column(system.rhs))?;
    Ok(x.into_entries())
}

/// Same vector as [`expected_wins`], by exact elimination on `M_n`.
pub fn expected_wins_by_elimination(n: u32) -> Result<Vec<Rational>> {
    let system = build_system(n)?;
    Ok(system
        .m
        .solve(&RationalMatrix::column(system.rhs))?
        .into_entries())
}

/// `n · x_1`, the expected total number of steps.
pub fn total_time_from_wins(n: u32) -> Result<Rational> {
    Ok(int(i64::from(n)) * &expected_wins(n)?[0])
}
