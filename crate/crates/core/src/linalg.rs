//! Dense exact linear algebra over the rationals.

use num_traits::Zero;

use crate::{Error, Rational, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| (0..self.cols).fold(Rational::zero(), |acc, c| acc + self.get(r, c) * &x[c]))
            .collect()
    }
}

/// Solves the square system `a·x = b` by Gaussian elimination with
/// first-nonzero pivoting. Exact arithmetic makes pivot tolerance moot.
pub fn solve(mut a: Matrix, mut b: Vec<Rational>) -> Result<Vec<Rational>> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected square system, got {}x{} with rhs {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a.get(r, col).is_zero())
            .ok_or(Error::Singular)?;
        if pivot != col {
            for c in 0..n {
                a.data.swap(pivot * n + c, col * n + c);
            }
            b.swap(pivot, col);
        }
        let inv = a.get(col, col).recip();
        for r in col + 1..n {
            if a.get(r, col).is_zero() {
                continue;
            }
            let factor = a.get(r, col) * &inv;
            for c in col..n {
                let delta = &factor * a.get(col, c);
                *a.get_mut(r, c) -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for (c, xc) in x.iter().enumerate().skip(r + 1) {
            acc -= a.get(r, c) * xc;
        }
        x[r] = acc / a.get(r, r);
    }
    Ok(x)
}
