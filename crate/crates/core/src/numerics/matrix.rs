//! Small dense matrices (statistic covariances, m ≤ 8) and the
//! eigendecomposition-based Moore-Penrose pseudo-inverse.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Dense row-major matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Matrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Matrix("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Max absolute asymmetry |a_ij − a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// y = M x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// C = A B.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
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
        out
    }

    /// xᵀ M x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.rows, self.cols, self.data.iter().copied())
    }

    /// Validate a correlation matrix: square, symmetric, unit diagonal,
    /// off-diagonals in [−1, 1] (all within `tol`).
    pub fn validate_correlation(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Matrix("correlation matrix must be square".into()));
        }
        if self.asymmetry() > tol {
            return Err(Error::Matrix(format!(
                "correlation matrix asymmetry {} exceeds tolerance",
                self.asymmetry()
            )));
        }
        for i in 0..self.rows {
            if (self[(i, i)] - 1.0).abs() > tol {
                return Err(Error::Matrix(format!("diagonal entry {} is not 1", self[(i, i)])));
            }
            for j in 0..self.cols {
                if self[(i, j)].abs() > 1.0 + tol {
                    return Err(Error::Matrix(format!(
                        "correlation entry {} outside [-1, 1]",
                        self[(i, j)]
                    )));
                }
            }
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix via its
/// eigendecomposition. Eigenvalues below `rank_tol` times the largest are
/// treated as zero; the second return is the retained rank.
pub fn pseudo_inverse(m: &Matrix, rank_tol: f64) -> Result<(Matrix, usize)> {
    if !m.is_square() {
        return Err(Error::Matrix("pseudo_inverse requires a square matrix".into()));
    }
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(1.0f64, f64::max);
    if m.asymmetry() > 1e-8 * scale {
        return Err(Error::Matrix(format!(
            "pseudo_inverse requires a symmetric matrix (asymmetry {})",
            m.asymmetry()
        )));
    }
    let eig = m.to_nalgebra().symmetric_eigen();
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if eig.eigenvalues.iter().any(|&v| v < -1e-8 * max_abs.max(1.0)) {
        return Err(Error::Matrix("matrix is not positive semidefinite within tolerance".into()));
    }
    let cut = rank_tol * max_abs;
    let mut rank = 0;
    let mut out = Matrix::zeros(n, n);
    for k in 0..n {
        let lambda = eig.eigenvalues[k];
        if lambda <= cut {
            continue;
        }
        rank += 1;
        let v = eig.eigenvectors.column(k);
        let inv = 1.0 / lambda;
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += inv * v[i] * v[j];
            }
        }
    }
    Ok((out, rank))
}

/// Lower-triangular factor C with C Cᵀ = A for a symmetric PSD matrix,
/// tolerating exactly singular input: columns whose residual pivot falls at or
/// below zero (within `−psd_tol·scale`) get a zero diagonal.
pub fn cholesky_psd(a: &Matrix, psd_tol: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Matrix("cholesky requires a square matrix".into()));
    }
    let n = a.nrows();
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(1.0f64, f64::max);
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        let mut s = a[(j, j)];
        for k in 0..j {
            s -= c[(j, k)] * c[(j, k)];
        }
        if s < -psd_tol * scale {
            return Err(Error::Matrix(format!(
                "matrix is not positive semidefinite (pivot {s} at column {j})"
            )));
        }
        let d = s.max(0.0).sqrt();
        c[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= c[(i, k)] * c[(j, k)];
            }
            c[(i, j)] = if d > 0.0 { s / d } else { 0.0 };
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn pinv_identity() {
        let (p, rank) = pseudo_inverse(&Matrix::identity(3), 1e-10).unwrap();
        assert_eq!(rank, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(p[(i, j)], if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pinv_rank_one() {
        // [[1,1],[1,1]] has the single eigenpair (2, (1,1)/√2), so the
        // pseudo-inverse is the same projector scaled by 1/2: all entries 1/4.
        let m = Matrix::from_rows(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let (p, rank) = pseudo_inverse(&m, 1e-10).unwrap();
        assert_eq!(rank, 1);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(p[(i, j)], 0.25, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pinv_singular_diagonal() {
        let m = Matrix::from_rows(2, 2, vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        let (p, rank) = pseudo_inverse(&m, 1e-10).unwrap();
        assert_eq!(rank, 1);
        assert_abs_diff_eq!(p[(0, 0)], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[(1, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pinv_rejects_asymmetric() {
        let m = Matrix::from_rows(2, 2, vec![1.0, 0.5, 0.0, 1.0]).unwrap();
        assert!(pseudo_inverse(&m, 1e-10).is_err());
    }

    fn random_psd(n: usize, rank: usize, rng: &mut impl Rng) -> Matrix {
        // A = B Bᵀ with B an n×rank factor.
        let mut b = vec![0.0; n * rank];
        for v in &mut b {
            *v = rng.random::<f64>() * 2.0 - 1.0;
        }
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..rank {
                    s += b[i * rank + k] * b[j * rank + k];
                }
                a[(i, j)] = s;
            }
        }
        // Symmetrize exactly.
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    #[test]
    fn moore_penrose_identities_on_random_psd() {
        let mut rng = crate::RngStream::new(31, 0).rng();
        for trial in 0..60 {
            let n = 2 + (trial % 5);
            let rank = 1 + (trial % n);
            let a = random_psd(n, rank, &mut rng);
            let (p, r) = pseudo_inverse(&a, 1e-10).unwrap();
            assert!(r <= n);
            let apa = a.mul(&p).mul(&a);
            let pap = p.mul(&a).mul(&p);
            let ap = a.mul(&p);
            let pa = p.mul(&a);
            for i in 0..n {
                for j in 0..n {
                    assert_abs_diff_eq!(apa[(i, j)], a[(i, j)], epsilon = 1e-8);
                    assert_abs_diff_eq!(pap[(i, j)], p[(i, j)], epsilon = 1e-8);
                    assert_abs_diff_eq!(ap[(i, j)], ap[(j, i)], epsilon = 1e-8);
                    assert_abs_diff_eq!(pa[(i, j)], pa[(j, i)], epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = Matrix::from_rows(3, 3, vec![4.0, 2.0, 0.4, 2.0, 2.0, 0.5, 0.4, 0.5, 1.0]).unwrap();
        let c = cholesky_psd(&a, 1e-8).unwrap();
        let mut rec = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    rec[(i, j)] += c[(i, k)] * c[(j, k)];
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(rec[(i, j)], a[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_handles_singular_correlation() {
        let a = Matrix::from_rows(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let c = cholesky_psd(&a, 1e-8).unwrap();
        assert_abs_diff_eq!(c[(0, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[(1, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[(1, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(cholesky_psd(&a, 1e-8).is_err());
    }
}
