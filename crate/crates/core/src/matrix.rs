//! Small dense matrices and the circulant blurring matrix.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, DeblurError, Result};
use crate::image::ImageVec;
use crate::kernel::BlurKernel;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_len(c, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Builds a matrix whose columns are `cols`.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            check_len(r, col.len())?;
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
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

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `selfᵀ x` without materializing the transpose.
    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
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

/// The n×n transfer matrix T: entry `(j, i)` is the fraction of pixel i's
/// intensity that lands in pixel j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlurMatrix {
    entries: Matrix,
}

impl BlurMatrix {
    /// Wraps an arbitrary square matrix. Columns must be finite; column sums
    /// are not enforced here (see [`BlurMatrix::column_sums`]).
    pub fn from_matrix(entries: Matrix) -> Result<Self> {
        if entries.rows() != entries.cols() || entries.rows() == 0 {
            return Err(DeblurError::InvalidDimension(format!(
                "blurring matrix must be square and nonempty, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if entries.data.iter().any(|v| !v.is_finite()) {
            return Err(DeblurError::InvalidParameter(
                "blurring matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.entries[(j, i)]
    }

    /// q_i = Σ_j T_ji.
    pub fn column_sums(&self) -> Vec<f64> {
        self.entries.transpose_mul_vec(&vec![1.0; self.n()])
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.entries.mul_vec(x)
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        self.entries.transpose_mul_vec(x)
    }
}

/// Expands `kernel` into the circulant matrix with `T[j][i] = w[(j - i) mod n]`.
pub fn make_circulant_matrix(kernel: &BlurKernel, n: usize) -> Result<BlurMatrix> {
    kernel.check_dimension(n)?;
    let w = kernel.residue_weights(n);
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for (r, &wr) in w.iter().enumerate() {
            m[((i + r) % n, i)] = wr;
        }
    }
    Ok(BlurMatrix { entries: m })
}

/// g = T F.
pub fn blur(t: &BlurMatrix, f: &ImageVec) -> Result<ImageVec> {
    check_len(t.n(), f.len())?;
    Ok(ImageVec::from_vec_unchecked(t.apply(f)))
}
