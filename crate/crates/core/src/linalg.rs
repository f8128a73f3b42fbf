//! Exact rational scalars and dense matrices.
//!
//! Everything here is exact: no floating point, no rounding. `BigRational`
//! keeps every value in lowest terms with a positive denominator.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for the rational `numer / denom`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    Rational::from_str(text.trim()).map_err(|_| Error::Parse {
        what: "rational",
        input: text.to_string(),
    })
}

/// Lossy conversion for the Monte Carlo comparison layer only.
pub fn to_f64(value: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let n_rows = rows.len();
        Ok(RationalMatrix {
            rows: n_rows,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer rows scaled by `1 / denom`, the way transition blocks are written.
    pub fn from_scaled_integers(rows: &[Vec<i64>], denom: i64) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| ratio(x, denom)).collect())
                .collect(),
        )
    }

    pub fn column(values: Vec<Rational>) -> Self {
        RationalMatrix {
            rows: values.len(),
            cols: 1,
            entries: values,
        }
    }

    pub fn row_vector(values: Vec<Rational>) -> Self {
        RationalMatrix {
            rows: 1,
            cols: values.len(),
            entries: values,
        }
    }

    pub fn ones_column(rows: usize) -> Self {
        Self::column(vec![Rational::one(); rows])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &RationalMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn add(&self, rhs: &RationalMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    fn zip_with(
        &self,
        rhs: &RationalMatrix,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * factor).collect(),
        }
    }

    /// `I - self`, for square matrices.
    pub fn identity_minus(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("identity_minus needs a square matrix".into()));
        }
        Self::identity(self.rows).sub(self)
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hconcat(&self, rhs: &RationalMatrix) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::Shape("hconcat needs equal row counts".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        Ok(out)
    }

    /// Solves `self · x = b` exactly.
    pub fn solve(&self, b: &RationalMatrix) -> Result<Self> {
        solve(self, b)
    }

    pub fn inverse(&self) -> Result<Self> {
        inverse(self)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(format_rational).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            let line: Vec<String> = cells[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Gauss-Jordan elimination on exact rationals; the pivot is the first
/// nonzero entry in the column.
pub fn solve(a: &RationalMatrix, b: &RationalMatrix) -> Result<RationalMatrix> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "coefficient matrix is {}x{}, not square",
            a.rows, a.cols
        )));
    }
    if b.rows != a.rows {
        return Err(Error::Shape(format!(
            "right-hand side has {} rows, expected {}",
            b.rows, a.rows
        )));
    }
    let size = a.rows;
    let mut lhs: Vec<Vec<Rational>> = (0..size).map(|i| a.row(i).to_vec()).collect();
    let mut rhs: Vec<Vec<Rational>> = (0..size).map(|i| b.row(i).to_vec()).collect();

    for col in 0..size {
        let pivot = (col..size)
            .find(|&r| !lhs[r][col].is_zero())
            .ok_or(Error::Singular)?;
        lhs.swap(col, pivot);
        rhs.swap(col, pivot);

        let inv = lhs[col][col].recip();
        for x in lhs[col][col..].iter_mut() {
            *x *= &inv;
        }
        for x in rhs[col].iter_mut() {
            *x *= &inv;
        }

        let pivot_lhs = lhs[col][col..].to_vec();
        let pivot_rhs = rhs[col].clone();
        for r in 0..size {
            if r == col || lhs[r][col].is_zero() {
                continue;
            }
            let factor = lhs[r][col].clone();
            for (x, p) in lhs[r][col..].iter_mut().zip(&pivot_lhs) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
            for (x, p) in rhs[r].iter_mut().zip(&pivot_rhs) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
    }
    RationalMatrix::from_rows(rhs)
}

pub fn inverse(a: &RationalMatrix) -> Result<RationalMatrix> {
    if !a.is_square() {
        return Err(Error::Shape("only square matrices have inverses".into()));
    }
    solve(a, &RationalMatrix::identity(a.rows))
}

/// Solves the row-vector system `x · a = b`.
pub fn solve_left(b: &RationalMatrix, a: &RationalMatrix) -> Result<RationalMatrix> {
    Ok(solve(&a.transpose(), &b.transpose())?.transpose())
}
