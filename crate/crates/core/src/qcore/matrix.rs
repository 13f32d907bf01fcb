use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::WrongLength {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::WrongLength {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        for c in columns {
            if c.len() != rows {
                return Err(Error::WrongLength {
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Transpose in the computational basis.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product with the left factor outermost:
    /// `(A⊗B)[p*i + k, q*j + l] = A[i, j] * B[k, l]` for `B` of shape `p×q`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |r, c| {
            self[(r / p, c / q)] * other[(r % p, c % q)]
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Deviation of `M†M` from the identity, max entry norm.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }

    /// Eigen-decomposition of a Hermitian matrix. Eigenvalues ascend; the
    /// eigenvector for `values[k]` is column `k` of the returned matrix.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let err = self.hermiticity_error();
        if err > 1e-8 {
            return Err(Error::NotHermitian(err));
        }
        let n = self.rows;
        // symmetrize so the solver sees an exactly Hermitian input
        let m = DMatrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, vectors))
    }

    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    /// Eigenvectors of a normal matrix via the complex Schur form, whose
    /// triangular factor is diagonal for normal input. Columns of the result
    /// are orthonormal eigenvectors.
    pub fn normal_eigenvectors(&self) -> ComplexMatrix {
        let n = self.rows;
        let m = DMatrix::from_fn(n, n, |i, j| self[(i, j)]);
        let (q, _t) = m.schur().unpack();
        Self::from_fn(n, n, |i, j| q[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Serialized as a list of rows, each entry a `[re, im]` pair.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Kronecker product of two matrices, left factor outermost.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub(crate) fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn projector_product() {
        let a = ComplexMatrix::real_diag(&[1.0, 0.0]);
        let b = ComplexMatrix::real_diag(&[0.0, 1.0]);
        assert_eq!(tensor_product(&a, &b), ComplexMatrix::real_diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn x_kron_z_matches_index_formula() {
        let x = ComplexMatrix::from_rows(&[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let z = ComplexMatrix::from_rows(&[vec![c(1.0), c(0.0)], vec![c(0.0), c(-1.0)]]).unwrap();
        let k = tensor_product(&x, &z);
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        assert_eq!(k[(2 * i + a, 2 * j + b)], x[(i, j)] * z[(a, b)]);
                    }
                }
            }
        }
        // block form [0, Z; Z, 0]
        assert_eq!(k[(0, 2)], c(1.0));
        assert_eq!(k[(1, 3)], c(-1.0));
        assert_eq!(k[(0, 0)], c(0.0));
    }

    #[test]
    fn eigh_sorts_ascending() {
        let h =
            ComplexMatrix::from_rows(&[vec![c(2.0), C64::new(0.0, 1.0)], vec![C64::new(0.0, -1.0), c(2.0)]]).unwrap();
        let (vals, vecs) = h.eigh().unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        for k in 0..2 {
            let v = vecs.column(k);
            let hv = h.apply(&v);
            for i in 0..2 {
                assert!((hv[i] - v[i] * vals[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![c(0.0), c(1.0)], vec![c(0.0), c(0.0)]]).unwrap();
        assert!(matches!(m.eigh(), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn normal_eigenvectors_diagonalize_unitary() {
        // a 3-cycle permutation: eigenvalues are the cube roots of unity
        let p = ComplexMatrix::from_fn(3, 3, |i, j| if (j + 1) % 3 == i { ONE } else { ZERO });
        let q = p.normal_eigenvectors();
        assert!(q.unitarity_error() < 1e-10);
        let t = q.adjoint().matmul(&p).matmul(&q);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(t[(i, j)].norm() < 1e-10);
                }
            }
        }
    }
}
