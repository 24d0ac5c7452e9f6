//! Dense row-major matrices and the few operations the network calculus needs.
//!
//! Everything is `f64` and dense: parameter counts deliberately include zero
//! entries, so sparse storage would only obscure the accounting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Both dimensions must be positive.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

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
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// `k` identity blocks of size `n` stacked vertically (a `k*n x n` matrix).
    pub fn stacked_identities(k: usize, n: usize) -> Self {
        let mut m = Self::zeros(k * n, n);
        for b in 0..k {
            for i in 0..n {
                m.data[(b * n + i) * n + i] = 1.0;
            }
        }
        m
    }

    /// Row of scaled identity blocks `(h_1 I_n, ..., h_k I_n)`, an `n x k*n` matrix.
    pub fn scaled_identity_row(weights: &[f64], n: usize) -> Self {
        let k = weights.len();
        let mut m = Self::zeros(n, k * n);
        for (b, &h) in weights.iter().enumerate() {
            for i in 0..n {
                m.data[i * (k * n) + b * n + i] = h;
            }
        }
        m
    }

    /// Block-diagonal assembly of the given matrices.
    pub fn block_diag(parts: &[&Matrix]) -> Self {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for part in parts {
            for r in 0..part.rows {
                let src = &part.data[r * part.cols..(r + 1) * part.cols];
                let dst = (r0 + r) * cols + c0;
                out.data[dst..dst + part.cols].copy_from_slice(src);
            }
            r0 += part.rows;
            c0 += part.cols;
        }
        out
    }

    /// Vertical concatenation; all parts must share a column count.
    pub fn vstack(parts: &[&Matrix]) -> Result<Self> {
        let cols = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("vstack of no matrices".into()))?
            .cols;
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::DimensionMismatch(
                "vstack parts disagree on column count".into(),
            ));
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for part in parts {
            data.extend_from_slice(&part.data);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// Number of stored entries (zeros included).
    pub fn entry_count(&self) -> u64 {
        (self.rows as u64) * (self.cols as u64)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o = acc;
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs_offdiag(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c {
                    worst = worst.max(self.data[r * self.cols + c].abs());
                }
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in (r + 1)..self.cols.min(self.rows) {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns `(v, lambda)` with the eigenvectors in the columns of `v` and
/// `v * diag(lambda) * v^T` reconstructing the input. Sweeps stop once every
/// off-diagonal entry is below `offdiag_tol` relative to the largest diagonal
/// magnitude.
pub fn sym_eigen(a: &Matrix, offdiag_tol: f64) -> Result<(Matrix, Vec<f64>)> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);

    let scale = (0..n)
        .map(|i| m.get(i, i).abs())
        .fold(f64::MIN_POSITIVE, f64::max)
        .max(m.max_abs_offdiag());
    let tol = offdiag_tol * scale;

    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        if m.max_abs_offdiag() <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() <= tol {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/columns p and q
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let lambda = (0..n).map(|i| m.get(i, i)).collect();
    Ok((v, lambda))
}

/// Symmetric factor of twice a symmetric positive definite matrix.
///
/// For SPD input `A`, returns the symmetric `S` with `S * S = 2A`. Diagonal
/// inputs are rooted entrywise; everything else goes through [`sym_eigen`].
pub fn diffusion_sqrt(a: &Matrix) -> Result<Matrix> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch(format!(
            "diffusion matrix must be square, got {}x{}",
            a.rows, a.cols
        )));
    }
    let scale = a.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if a.symmetry_defect() > 1e-12 * scale.max(1.0) {
        return Err(Error::NotSymmetric(format!(
            "off-symmetric defect {:.3e}",
            a.symmetry_defect()
        )));
    }
    let n = a.rows;
    if a.max_abs_offdiag() == 0.0 {
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            let d = a.get(i, i);
            if d <= 0.0 {
                return Err(Error::NotSpd(format!("diagonal entry {i} is {d}")));
            }
            out.set(i, i, (2.0 * d).sqrt());
        }
        return Ok(out);
    }
    let (v, lambda) = sym_eigen(a, 1e-13)?;
    let max_eig = lambda.iter().fold(f64::MIN_POSITIVE, |acc, &l| acc.max(l));
    for (i, &l) in lambda.iter().enumerate() {
        if l <= 1e-12 * max_eig {
            return Err(Error::NotSpd(format!("eigenvalue {i} is {l:.6e}")));
        }
    }
    let roots: Vec<f64> = lambda.iter().map(|&l| (2.0 * l).sqrt()).collect();
    let vd = v.matmul(&Matrix::diag(&roots))?;
    let s = vd.matmul(&v.transpose())?;
    // the product is symmetric up to rounding; symmetrize so callers can rely on it
    let mut out = s.clone();
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, 0.5 * (s.get(r, c) + s.get(c, r)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn matvec_and_matmul_agree_with_hand_values() {
        let m = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.matvec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        let id = Matrix::identity(3);
        assert_eq!(m.matmul(&id).unwrap(), m);
    }

    #[test]
    fn rejects_zero_dimensions_and_bad_data_length() {
        assert!(Matrix::new(0, 3, vec![]).is_err());
        assert!(Matrix::new(2, 2, vec![1.0]).is_err());
    }

    #[test]
    fn block_diag_and_stacks() {
        let a = Matrix::identity(2);
        let b = Matrix::new(1, 1, vec![3.0]).unwrap();
        let d = Matrix::block_diag(&[&a, &b]);
        assert_eq!(d.rows(), 3);
        assert_eq!(d.cols(), 3);
        assert_eq!(d.get(2, 2), 3.0);
        assert_eq!(d.get(0, 2), 0.0);

        let s = Matrix::stacked_identities(3, 2);
        assert_eq!(s.rows(), 6);
        assert_eq!(s.cols(), 2);
        assert_eq!(
            s.matvec(&[1.0, -1.0]).unwrap(),
            vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]
        );

        let row = Matrix::scaled_identity_row(&[0.5, -0.5], 2);
        assert_eq!(row.rows(), 2);
        assert_eq!(row.cols(), 4);
        assert_eq!(
            row.matvec(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            vec![0.5 - 1.5, 1.0 - 2.0]
        );
    }

    #[test]
    fn diffusion_sqrt_identity_scaled() {
        // A = I/2 has factor I
        let a = Matrix::identity(3).scale(0.5);
        let s = diffusion_sqrt(&a).unwrap();
        assert_eq!(s, Matrix::identity(3));
    }

    #[test]
    fn diffusion_sqrt_diagonal() {
        let a = Matrix::diag(&[2.0, 8.0]);
        let s = diffusion_sqrt(&a).unwrap();
        assert_eq!(s, Matrix::diag(&[2.0, 4.0]));
    }

    #[test]
    fn diffusion_sqrt_random_spd_reconstructs() {
        let mut rng = CounterRng::new(0x5eed);
        for n in [2usize, 3, 5, 8] {
            // build SPD as Q diag(positive) Q^T from a random rotation-ish matrix
            let raw = Matrix::new(
                n,
                n,
                (0..n * n).map(|_| rng.standard_normal()).collect(),
            )
            .unwrap();
            let spd_seed = raw.matmul(&raw.transpose()).unwrap();
            let mut a = spd_seed.clone();
            for i in 0..n {
                a.set(i, i, a.get(i, i) + 0.5 + rng.uniform());
            }
            // symmetrize exactly
            let mut sym = a.clone();
            for r in 0..n {
                for c in 0..n {
                    sym.set(r, c, 0.5 * (a.get(r, c) + a.get(c, r)));
                }
            }
            let s = diffusion_sqrt(&sym).unwrap();
            assert!(s.symmetry_defect() <= 1e-12 * s.frobenius_norm().max(1.0));
            let back = s.matmul(&s).unwrap();
            let two_a = sym.scale(2.0);
            let mut diff = 0.0f64;
            for (x, y) in back.data().iter().zip(two_a.data()) {
                diff += (x - y) * (x - y);
            }
            assert!(
                diff.sqrt() <= 1e-10 * two_a.frobenius_norm(),
                "reconstruction defect {:.3e} at n={n}",
                diff.sqrt()
            );
        }
    }

    #[test]
    fn diffusion_sqrt_rejects_bad_input() {
        let asym = Matrix::new(2, 2, vec![1.0, 0.5, 0.0, 1.0]).unwrap();
        assert!(matches!(
            diffusion_sqrt(&asym),
            Err(Error::NotSymmetric(_))
        ));
        let negdef = Matrix::diag(&[1.0, -0.5]);
        assert!(matches!(diffusion_sqrt(&negdef), Err(Error::NotSpd(_))));
        // indefinite with off-diagonal part hits the eigenvalue check
        let indef = Matrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(diffusion_sqrt(&indef), Err(Error::NotSpd(_))));
    }
}
