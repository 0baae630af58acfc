//! Small dense matrices over any [`Scalar`].

use crate::jets::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: Vec<Vec<S>>) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(S::zero(), |acc, c| {
                    acc + self.get(r, c).clone() * v[c].clone()
                })
            })
            .collect()
    }

    pub fn matmul(&self, o: &Mat<S>) -> Mat<S> {
        Mat::from_fn(self.rows, o.cols, |r, c| {
            (0..self.cols).fold(S::zero(), |acc, i| {
                acc + self.get(r, i).clone() * o.get(i, c).clone()
            })
        })
    }

    pub fn add(&self, o: &Mat<S>) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c).clone() + o.get(r, c).clone()
        })
    }

    pub fn scale(&self, k: f64) -> Mat<S> {
        self.map(|v| v.scale(k))
    }

    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// `uᵀ A v`.
    pub fn bilinear(&self, u: &[S], v: &[S]) -> S {
        let av = self.mul_vec(v);
        u.iter()
            .zip(av)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting on the
    /// real parts. Returns `None` when a pivot's magnitude falls below
    /// `tol · max|A|`.
    pub fn solve(&self, b: &[S], tol: f64) -> Option<Vec<S>> {
        let n = self.rows;
        assert_eq!(n, self.cols, "solve needs a square matrix");
        let scale = self
            .data
            .iter()
            .map(|v| v.value().abs())
            .fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let (piv, mag) = (col..n).map(|r| (r, a.get(r, col).value().abs())).fold(
                (col, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
            if mag <= tol * scale {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.data.swap(col * n + c, piv * n + c);
                }
                x.swap(col, piv);
            }
            let inv = a.get(col, col).recip();
            for r in col + 1..n {
                let f = a.get(r, col).clone() * inv.clone();
                for c in col..n {
                    let v = a.get(r, c).clone() - f.clone() * a.get(col, c).clone();
                    a.set(r, c, v);
                }
                x[r] = x[r].clone() - f * x[col].clone();
            }
        }
        for r in (0..n).rev() {
            let mut acc = x[r].clone();
            for (c, xc) in x.iter().enumerate().skip(r + 1) {
                acc = acc - a.get(r, c).clone() * xc.clone();
            }
            x[r] = acc / a.get(r, r).clone();
        }
        Some(x)
    }
}

impl Mat<f64> {
    pub fn max_abs_diff(&self, o: &Mat<f64>) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(
        if a.len() == b.len() {
            0.0
        } else {
            f64::INFINITY
        },
        f64::max,
    )
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = Mat::from_fn(2, 2, |r, c| [[2.0, 1.0], [1.0, 3.0]][r][c]);
        let x = a.solve(&[3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn singular_system_detected() {
        let a = Mat::from_fn(2, 2, |r, _| if r == 0 { 1.0 } else { 2.0 });
        assert!(a.solve(&[1.0, 2.0], 1e-12).is_none());
        assert!(Mat::<f64>::zeros(2, 2).solve(&[0.0, 0.0], 1e-12).is_none());
    }
}
