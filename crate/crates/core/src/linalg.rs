//! Small dense linear algebra: row-major matrices, LU with partial pivoting,
//! Cholesky, cyclic Jacobi eigenvalues and the two norms the closed forms
//! need. Everything here is sized for pools of a dozen members or so.

use std::fmt;
use std::ops::{Deref, Index, IndexMut};
use std::slice::SliceIndex;

use thiserror::Error;

/// Absolute pivot tolerance shared by LU and Cholesky.
pub const PIVOT_TOL: f64 = 1e-12;
/// Relative tolerance for the symmetry precondition.
pub const SYMMETRY_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is not symmetric (max deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },
    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("matrix is singular (pivot {pivot} below tolerance)")]
    Singular { pivot: usize },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },
    #[error("empty matrix or vector")]
    Empty,
}

/// Column vector of reals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Checked constructor: non-empty, all entries finite.
    pub fn new(entries: Vec<f64>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::Empty);
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Vector(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self::filled(n, 1.0)
    }

    pub fn filled(n: usize, value: f64) -> Self {
        Vector(vec![value; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn zip_with(&self, other: &[f64], f: impl Fn(f64, f64) -> f64) -> Vector {
        assert_eq!(self.len(), other.len(), "zip_with: length mismatch");
        Vector(self.0.iter().zip(other).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &[f64]) -> Vector {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &[f64]) -> Vector {
        self.zip_with(other, |a, b| a - b)
    }

    /// Componentwise product.
    pub fn hadamard(&self, other: &[f64]) -> Vector {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Vector {
        self.map(|x| s * x)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl<I: SliceIndex<[f64]>> Index<I> for Vector {
    type Output = I::Output;
    fn index(&self, i: I) -> &I::Output {
        &self.0[i]
    }
}

impl<I: SliceIndex<[f64]>> IndexMut<I> for Vector {
    fn index_mut(&mut self, i: I) -> &mut I::Output {
        &mut self.0[i]
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Empty);
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            if row.len() != c {
                return Err(LinalgError::DimensionMismatch { expected: c, actual: row.len() });
            }
            data.extend_from_slice(row);
        }
        Matrix::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// a·bᵀ
    pub fn outer(a: &[f64], b: &[f64]) -> Self {
        let mut data = Vec::with_capacity(a.len() * b.len());
        for &x in a {
            data.extend(b.iter().map(|&y| x * y));
        }
        Matrix { rows: a.len(), cols: b.len(), data }
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)]).collect::<Vec<_>>().into()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vector {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect::<Vec<_>>().into()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vector {
        assert_eq!(self.cols, x.len(), "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect::<Vec<f64>>()
            .into()
    }

    /// xᵀ·M·y
    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).dot(x)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "elementwise op: shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| s * x).collect() }
    }

    /// Row i scaled by d_i, i.e. D(d)·M.
    pub fn scale_rows(&self, d: &[f64]) -> Matrix {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] *= d[i];
            }
        }
        out
    }

    /// Column j scaled by d_j, i.e. M·D(d).
    pub fn scale_cols(&self, d: &[f64]) -> Matrix {
        assert_eq!(d.len(), self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] *= d[j];
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vector {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect::<Vec<f64>>().into()
    }

    pub fn col_sums(&self) -> Vector {
        let mut s = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, x) in self.row(i).iter().enumerate() {
                s[j] += x;
            }
        }
        s.into()
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// max |a_ij − a_ji| for square matrices.
    pub fn symmetry_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        dev
    }

    pub fn check_symmetric(&self) -> Result<(), LinalgError> {
        self.check_square()?;
        let deviation = self.symmetry_deviation();
        if deviation > SYMMETRY_TOL * self.max_abs() {
            return Err(LinalgError::NotSymmetric { deviation });
        }
        Ok(())
    }

    fn check_square(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    /// (M + Mᵀ)/2, used to remove rounding asymmetry from products like LᵀML.
    pub fn symmetrized(&self) -> Matrix {
        self.add(&self.transpose()).scale(0.5)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Lower-triangular factor L with M = L·Lᵀ.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(m: &Matrix) -> Result<Self, LinalgError> {
        m.check_symmetric()?;
        let n = m.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > PIVOT_TOL) {
                return Err(LinalgError::NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    /// Solves L·y = b.
    pub fn forward(&self, b: &[f64]) -> Vector {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l[(i, k)] * y[k];
            }
            y[i] /= self.l[(i, i)];
        }
        y.into()
    }

    /// Solves Lᵀ·x = y.
    pub fn backward(&self, y: &[f64]) -> Vector {
        let n = self.l.rows();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.l[(k, i)] * x[k];
            }
            x[i] /= self.l[(i, i)];
        }
        x.into()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vector, LinalgError> {
        if b.len() != self.l.rows() {
            return Err(LinalgError::DimensionMismatch { expected: self.l.rows(), actual: b.len() });
        }
        Ok(self.backward(&self.forward(b)))
    }

    /// L⁻¹, built column by column from forward substitution.
    pub fn inverse_factor(&self) -> Matrix {
        let n = self.l.rows();
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.forward(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    pub fn determinant(&self) -> f64 {
        self.l.diagonal().iter().map(|d| d * d).product()
    }
}

pub fn cholesky(m: &Matrix) -> Result<Cholesky, LinalgError> {
    Cholesky::factor(m)
}

/// PA = LU with partial pivoting; L unit-lower and U stored in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(m: &Matrix) -> Result<Self, LinalgError> {
        m.check_square()?;
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (piv, best) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < PIVOT_TOL {
                return Err(LinalgError::Singular { pivot: k });
            }
            if piv != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu.data[i * n + j] -= f * lu.data[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vector, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, actual: b.len() });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        Ok(x.into())
    }

    pub fn solve_mat(&self, b: &Matrix) -> Result<Matrix, LinalgError> {
        if b.rows() != self.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), actual: b.rows() });
        }
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.col(j))?;
            for i in 0..b.rows() {
                out[(i, j)] = x[i];
            }
        }
        Ok(out)
    }

    pub fn determinant(&self) -> f64 {
        self.sign * self.lu.diagonal().iter().product::<f64>()
    }

    pub fn inverse(&self) -> Matrix {
        self.solve_mat(&Matrix::identity(self.dim())).expect("identity has matching dimension")
    }
}

pub fn solve(m: &Matrix, b: &[f64]) -> Result<Vector, LinalgError> {
    Lu::factor(m)?.solve_vec(b)
}

pub fn solve_matrix(m: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    Lu::factor(m)?.solve_mat(b)
}

/// Inverse via LU solves against the identity columns.
pub fn invert(m: &Matrix) -> Result<Matrix, LinalgError> {
    Ok(Lu::factor(m)?.inverse())
}

/// Eigen-decomposition of a symmetric matrix. Values ascend; column j of
/// `vectors` belongs to `values[j]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vector,
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Cyclic Jacobi rotations.
pub fn eigen_sym(m: &Matrix) -> Result<SymEigen, LinalgError> {
    m.check_symmetric()?;
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    let target = JACOBI_TOL * m.frobenius();

    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..=JACOBI_MAX_SWEEPS {
        if off(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
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
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(SymEigen { values: values.into(), vectors })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixNorms {
    /// Maximum absolute row sum.
    pub inf_norm: f64,
    /// min_i (m_ii − Σ_{j≠i} |m_ij|); negative when dominance fails.
    pub diag_dominance_margin: f64,
}

pub fn norms(m: &Matrix) -> MatrixNorms {
    MatrixNorms { inf_norm: inf_norm(m), diag_dominance_margin: dominance_margins(m).min() }
}

pub fn inf_norm(m: &Matrix) -> f64 {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Per-row diagonal dominance margins m_ii − Σ_{j≠i}|m_ij|.
pub fn dominance_margins(m: &Matrix) -> Vector {
    (0..m.rows())
        .map(|i| {
            let off: f64 = m.row(i).iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.abs()).sum();
            m[(i, i)] - off
        })
        .collect::<Vec<f64>>()
        .into()
}
