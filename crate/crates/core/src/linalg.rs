//! Small dense linear algebra over a [`Scalar`] backend.

use std::fmt;

use crate::error::{Error, Result};
use crate::exterior::{Vector6, DIM};
use crate::scalar::Scalar;

/// Linear endomorphism of the 6-dimensional space, stored row-major;
/// column `j` is the image of `e_j`.
#[derive(Clone, PartialEq)]
pub struct LinearMap6<S> {
    pub m: [[S; DIM]; DIM],
}

impl<S: Scalar> LinearMap6<S> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        Self { m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| S::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn diagonal(d: [S; DIM]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i].clone() } else { S::zero() })
    }

    pub fn from_columns(cols: &[Vector6<S>]) -> Self {
        assert_eq!(cols.len(), DIM);
        Self::from_fn(|i, j| cols[j][i].clone())
    }

    pub fn column(&self, j: usize) -> Vector6<S> {
        Vector6::from_fn(|i| self.m[i][j].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.m[i][j]
    }

    pub fn apply(&self, x: &Vector6<S>) -> Vector6<S> {
        Vector6::from_fn(|i| (0..DIM).fold(S::zero(), |acc, j| acc + self.m[i][j].clone() * x[j].clone()))
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| (0..DIM).fold(S::zero(), |acc, k| acc + self.m[i][k].clone() * o.m[k][j].clone()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i].clone())
    }

    pub fn trace(&self) -> S {
        (0..DIM).fold(S::zero(), |acc, i| acc + self.m[i][i].clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(|i, j| self.m[i][j].clone() * c.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j].clone() + o.m[i][j].clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j].clone() - o.m[i][j].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.m.iter().flatten().zip(o.m.iter().flatten()).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinearMap6<T> {
        LinearMap6::from_fn(|i, j| f(&self.m[i][j]))
    }

    pub fn to_f64(&self) -> LinearMap6<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.m.iter().map(|r| r.to_vec()).collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = inverse(&self.to_rows())?;
        Ok(Self::from_fn(|i, j| inv[i][j].clone()))
    }

    pub fn det(&self) -> S {
        det(&self.to_rows())
    }
}

impl<S: fmt::Debug> fmt::Debug for LinearMap6<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LinearMap6[")?;
        for row in &self.m {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

fn pivot_row<S: Scalar>(a: &[Vec<S>], col: usize, from: usize, tol: f64) -> Option<usize> {
    if S::EXACT {
        (from..a.len()).find(|&r| !a[r][col].is_zero())
    } else {
        let (best, val) = (from..a.len()).map(|r| (r, a[r][col].to_f64().abs())).fold((from, -1.0), |acc, x| {
            if x.1 > acc.1 {
                x
            } else {
                acc
            }
        });
        (val > tol).then_some(best)
    }
}

/// Determinant by Gaussian elimination (exact on rationals).
pub fn det<S: Scalar>(a: &[Vec<S>]) -> S {
    let n = a.len();
    match n {
        0 => return S::one(),
        1 => return a[0][0].clone(),
        2 => return a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone(),
        3 => {
            return a[0][0].clone() * (a[1][1].clone() * a[2][2].clone() - a[1][2].clone() * a[2][1].clone())
                - a[0][1].clone() * (a[1][0].clone() * a[2][2].clone() - a[1][2].clone() * a[2][0].clone())
                + a[0][2].clone() * (a[1][0].clone() * a[2][1].clone() - a[1][1].clone() * a[2][0].clone())
        }
        _ => {}
    }
    let mut m = a.to_vec();
    let mut d = S::one();
    for c in 0..n {
        let Some(p) = pivot_row(&m, c, c, 0.0) else {
            return S::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c].clone();
        d = d * piv.clone();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].checked_div(&piv).expect("nonzero pivot");
            for k in c..n {
                m[r][k] = m[r][k].clone() - f.clone() * m[c][k].clone();
            }
        }
    }
    d
}

/// Rank; `tol` is the pivot threshold on the float backend.
pub fn rank<S: Scalar>(a: &[Vec<S>], tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let mut m = a.to_vec();
    let cols = m[0].len();
    let mut row = 0;
    for c in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = pivot_row(&m, c, row, tol) else {
            continue;
        };
        m.swap(p, row);
        let piv = m[row][c].clone();
        for r in row + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].checked_div(&piv).expect("nonzero pivot");
            for k in c..cols {
                m[r][k] = m[r][k].clone() - f.clone() * m[row][k].clone();
            }
        }
        row += 1;
    }
    row
}

/// Inverse by Gauss–Jordan elimination.
pub fn inverse<S: Scalar>(a: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = pivot_row(&m, c, c, 0.0).ok_or(Error::Singular)?;
        m.swap(p, c);
        let piv = m[c][c].clone();
        for k in 0..2 * n {
            m[c][k] = m[c][k].checked_div(&piv)?;
        }
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for k in 0..2 * n {
                m[r][k] = m[r][k].clone() - f.clone() * m[c][k].clone();
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn det_and_inverse_exact() {
        let a: Vec<Vec<Rational>> = vec![
            vec![rat(2, 1), rat(1, 1), rat(0, 1), rat(1, 1)],
            vec![rat(0, 1), rat(0, 1), rat(3, 1), rat(1, 2)],
            vec![rat(1, 1), rat(0, 1), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1)],
        ];
        let inv = inverse(&a).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let s = (0..4).fold(rat(0, 1), |acc, k| acc + a[i][k].clone() * inv[k][j].clone());
                assert_eq!(s, if i == j { rat(1, 1) } else { rat(0, 1) });
            }
        }
        let d = det(&a);
        let di = det(&inv);
        assert_eq!(d * di, rat(1, 1));
    }

    #[test]
    fn rank_and_singular() {
        let a: Vec<Vec<Rational>> = vec![
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            vec![rat(2, 1), rat(4, 1), rat(6, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        ];
        assert_eq!(rank(&a, 0.0), 2);
        assert_eq!(det(&a), rat(0, 1));
        assert_eq!(inverse(&a), Err(Error::Singular));
        let f: Vec<Vec<f64>> = vec![vec![1.0, 1e-14], vec![1.0, 1e-14]];
        assert_eq!(rank(&f, 1e-10), 1);
    }
}
