//! Small dense linear algebra over [`Real`].

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Real> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, F::one())
    }

    pub fn scalar(n: usize, s: F) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn diag(d: &[F]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_cols(cols: &[Vec<F>]) -> Self {
        Self::from_rows(cols).transpose()
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

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<F>) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == F::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Computes `selfᵀ x`.
    pub fn tr_mul_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(self.rows, x.len(), "dimension mismatch");
        let mut out = vec![F::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * xi;
            }
        }
        out
    }

    pub fn scale(&self, s: F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix<F>) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix<F>) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix<F>, f: impl Fn(F, F) -> F) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn symmetrize(&self) -> Self {
        self.add(&self.transpose()).scale(F::c(0.5))
    }

    pub fn frobenius(&self) -> F {
        self.data.iter().map(|&v| v * v).sum::<F>().sqrt()
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_off_diagonal(&self) -> F {
        let mut m = F::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    m = m.max(self[(i, j)].abs());
                }
            }
        }
        m
    }

    /// Returns `s` when the matrix equals `s·I` up to a relative tolerance.
    pub fn as_scalar(&self, rel_tol: F) -> Option<F> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let s = self[(0, 0)];
        let scale = self.max_abs().max(F::min_positive_value());
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { s } else { F::zero() };
                if (self[(i, j)] - expect).abs() > rel_tol * scale {
                    return None;
                }
            }
        }
        Some(s)
    }

    pub fn is_symmetric(&self, rel_tol: F) -> bool {
        self.is_square()
            && self.sub(&self.transpose()).max_abs() <= rel_tol * self.max_abs().max(F::one())
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        if scale == F::zero() {
            return None;
        }
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| {
                a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap_or(std::cmp::Ordering::Equal)
            })?;
            let p = a[(pivot, col)];
            if p.abs() <= F::epsilon() * scale * F::c(n as f64) {
                return None;
            }
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == F::zero() {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                    inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Determinant by LU elimination with partial pivoting.
    pub fn determinant(&self) -> F {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[(pivot, col)] == F::zero() {
                return F::zero();
            }
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a[(col, col)];
            det = det * p;
            for i in col + 1..n {
                let f = a[(i, col)] / p;
                for j in col..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                }
            }
        }
        det
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the matching orthonormal
    /// eigenvectors as columns.
    pub fn symmetric_eigen(&self) -> (Vec<F>, Matrix<F>) {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.symmetrize();
        let mut v = Self::identity(n);
        let tol = F::epsilon() * F::c(0.1);
        for _sweep in 0..100 {
            let off: F = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off.sqrt() <= tol * a.frobenius().max(F::min_positive_value()) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == F::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (F::c(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                    let c = F::one() / (t * t + F::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| a[(i, i)]).collect();
        let mut vectors = Self::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new)] = v[(k, old)];
            }
        }
        (values, vectors)
    }

    /// Applies `f` to the spectrum of a symmetric matrix.
    pub fn spectral_map(&self, f: impl Fn(F) -> F) -> Self {
        let (vals, vecs) = self.symmetric_eigen();
        let mapped: Vec<F> = vals.into_iter().map(f).collect();
        vecs.mul(&Self::diag(&mapped)).mul(&vecs.transpose())
    }

    pub fn psd_sqrt(&self) -> Self {
        self.spectral_map(|l| l.max(F::zero()).sqrt())
    }

    pub fn psd_inv_sqrt(&self) -> Self {
        self.spectral_map(|l| F::one() / l.sqrt())
    }

    /// Singular values in ascending order.
    pub fn singular_values(&self) -> Vec<F> {
        let (vals, _) = self.transpose().mul(self).symmetric_eigen();
        vals.into_iter().map(|l| l.max(F::zero()).sqrt()).collect()
    }

    pub fn cast<G: Real>(&self) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| G::c(v.as_f64())).collect(),
        }
    }
}

pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<F: Real>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

pub fn sub<F: Real>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<F: Real>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<F: Real>(a: &[F], s: F) -> Vec<F> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += s·x`
pub fn axpy<F: Real>(y: &mut [F], s: F, x: &[F]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

pub fn dist2<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<F>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inverse_and_determinant() {
        let m = Matrix::from_rows(&[vec![4.0, 7.0], vec![2.0, 6.0]]);
        assert_abs_diff_eq!(m.determinant(), 10.0, epsilon = 1e-12);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        assert!(id.sub(&Matrix::identity(2)).max_abs() < 1e-12);
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).inverse().is_none());
    }

    #[test]
    fn jacobi_eigen() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = m.symmetric_eigen();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
        let recon = vecs.mul(&Matrix::diag(&vals)).mul(&vecs.transpose());
        assert!(recon.sub(&m).max_abs() < 1e-12);
        let s = m.psd_sqrt();
        assert!(s.mul(&s).sub(&m).max_abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_diag() {
        let m = Matrix::diag(&[3.0f32, -2.0]);
        let sv = m.singular_values();
        assert!((sv[0] - 2.0).abs() < 1e-5 && (sv[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn scalar_detection() {
        let m = Matrix::scalar(3, 2.5);
        assert_eq!(m.as_scalar(1e-12), Some(2.5));
        let mut n = m.clone();
        n[(0, 1)] = 1e-3;
        assert_eq!(n.as_scalar(1e-12), None);
    }
}
