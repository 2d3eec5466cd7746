//! Small dense matrices over any [`Scalar`].
//!
//! Sizes in this crate never exceed [`crate::jet::MAX_DIM`], so everything is
//! row-major `Vec` storage with naive algorithms.

use std::ops::{Index, IndexMut};

use crate::jet::{Lower, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn diagonal(d: &[S]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i] } else { S::zero() })
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

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn values(&self) -> Mat<f64> {
        self.map(Scalar::value)
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self[(i, i)];
        }
        t
    }

    pub fn matmul(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc += self[(i, k)] * o[(k, j)];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (k, vk) in v.iter().enumerate() {
                    acc += self[(i, k)] * *vk;
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Mat<S>) -> Mat<S> {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + o[(i, j)])
    }

    pub fn sub(&self, o: &Mat<S>) -> Mat<S> {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - o[(i, j)])
    }

    pub fn scale(&self, s: S) -> Mat<S> {
        self.map(|x| *x * s)
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> Mat<S> {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)]) * 0.5)
    }

    /// Solves `self · X = rhs` by Gauss–Jordan elimination with partial
    /// pivoting on the value part. Returns `None` if a pivot vanishes.
    pub fn solve(&self, rhs: &Mat<S>) -> Option<Mat<S>> {
        assert!(self.is_square() && rhs.rows == self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = self
            .data
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.value().abs()))
            .max(f64::MIN_POSITIVE);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| {
                    a[(i, col)]
                        .value()
                        .abs()
                        .total_cmp(&a[(j, col)].value().abs())
                })
                .unwrap();
            if a[(piv, col)].value().abs() <= 1e-14 * scale {
                return None;
            }
            if piv != col {
                a.swap_rows(piv, col);
                b.swap_rows(piv, col);
            }
            let inv = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * inv;
            }
            for j in 0..b.cols {
                b[(col, j)] = b[(col, j)] * inv;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == S::zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(i, j)] -= f * t;
                }
                for j in 0..b.cols {
                    let t = b[(col, j)];
                    b[(i, j)] -= f * t;
                }
            }
        }
        Some(b)
    }

    pub fn inverse(&self) -> Option<Mat<S>> {
        self.solve(&Mat::identity(self.rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S: Lower> Mat<S> {
    pub fn truncate(&self) -> Mat<S::Down> {
        self.map(Lower::truncate)
    }
}

impl Mat<f64> {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest entry of `|M - Mᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        self.sub(&self.transpose()).max_abs()
    }

    /// Cholesky factorisation succeeds iff the (symmetric) matrix is
    /// positive definite.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.rows;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return false;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        true
    }

    pub fn as_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a component vector.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn axpy<S: Scalar>(a: S, x: &[S], y: &mut [S]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

pub fn sub_vec<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(a, b)| *a - *b).collect()
}

pub fn add_vec<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(a, b)| *a + *b).collect()
}

pub fn scale_vec<S: Scalar>(s: S, x: &[S]) -> Vec<S> {
    x.iter().map(|a| s * *a).collect()
}

/// Linear combination `Σ c_a v_a` of equally sized vectors.
pub fn combine<S: Scalar>(coeffs: &[S], vectors: &[Vec<S>]) -> Vec<S> {
    let dim = vectors.first().map_or(0, Vec::len);
    let mut out = vec![S::zero(); dim];
    for (c, v) in coeffs.iter().zip(vectors) {
        axpy(*c, v, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet1;

    #[test]
    fn inverse_of_small_matrix() {
        let m = Mat::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        assert!(id.sub(&Mat::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn jet_inverse_differentiates() {
        // d(1/x) = -1/x² through a 1×1 solve
        let m = Mat::from_rows(&[vec![Jet1::variable(2.0, 0)]]);
        let inv = m.inverse().unwrap();
        assert!((inv[(0, 0)].v - 0.5).abs() < 1e-16);
        assert!((inv[(0, 0)].g[0] + 0.25).abs() < 1e-16);
    }

    #[test]
    fn positive_definiteness() {
        assert!(Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).is_positive_definite());
        assert!(!Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_positive_definite());
    }
}
