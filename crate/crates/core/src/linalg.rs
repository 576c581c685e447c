//! Dense column-major matrices and a Householder QR least-squares solver.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns<C: AsRef<[T]>>(rows: usize, columns: &[C]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::LengthMismatch { expected: rows, actual: c.len() });
            }
            data.extend_from_slice(c);
        }
        Ok(Self { rows, cols: columns.len(), data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate().take(self.cols) {
            for (o, &a) in out.iter_mut().zip(self.column(j)) {
                *o = *o + a * xj;
            }
        }
        out
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Result of a least-squares fit.
#[derive(Debug, Clone)]
pub struct LeastSquares<T> {
    pub coefficients: Vec<T>,
    pub residuals: Vec<T>,
    /// Upper-triangular factor `R` (n x n, column-major) of `A = QR`.
    r: Matrix<T>,
}

impl<T: Scalar> LeastSquares<T> {
    pub fn residual_sum_of_squares(&self) -> T {
        dot(&self.residuals, &self.residuals)
    }

    /// Diagonal of `(AᵀA)⁻¹ = R⁻¹R⁻ᵀ`, i.e. squared row norms of `R⁻¹`.
    pub fn inverse_gram_diagonal(&self) -> Vec<T> {
        let n = self.r.cols();
        // Invert R column by column with back substitution.
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            for i in (0..=j).rev() {
                let mut s = e[i];
                for k in i + 1..=j {
                    s = s - self.r.get(i, k) * inv.get(k, j);
                }
                inv.set(i, j, s / self.r.get(i, i));
            }
        }
        (0..n).map(|i| (0..n).map(|j| inv.get(i, j).powi(2)).sum()).collect()
    }
}

/// Solves `min ||A x - b||₂` with Householder QR.
///
/// Returns [`Error::SingularFit`] when a diagonal entry of `R` falls below
/// `eps * max(m, n) * max|R_jj|`.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<LeastSquares<T>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::LengthMismatch { expected: m, actual: b.len() });
    }
    if n == 0 {
        return Err(Error::EmptyStructure);
    }
    if m < n {
        return Err(Error::SingularFit);
    }
    let mut qr = a.clone();
    let mut qtb = b.to_vec();
    let mut diag = vec![T::zero(); n];
    let two = T::lit(2.0);

    for j in 0..n {
        let col = &qr.column(j)[j..];
        let alpha = norm(col);
        if alpha == T::zero() {
            return Err(Error::SingularFit);
        }
        let alpha = if col[0] > T::zero() { -alpha } else { alpha };
        // v = x - alpha e1, stored in place of the column tail.
        let mut v = col.to_vec();
        v[0] = v[0] - alpha;
        let vtv = dot(&v, &v);
        diag[j] = alpha;
        if vtv > T::zero() {
            let beta = two / vtv;
            for k in j + 1..n {
                let ck = &mut qr.column_mut(k)[j..];
                let s = dot(&v, ck) * beta;
                for (c, &vi) in ck.iter_mut().zip(&v) {
                    *c = *c - s * vi;
                }
            }
            let tail = &mut qtb[j..];
            let s = dot(&v, tail) * beta;
            for (c, &vi) in tail.iter_mut().zip(&v) {
                *c = *c - s * vi;
            }
        }
    }

    let max_diag = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    let tol = T::epsilon() * T::from_usize_lossy(m.max(n)) * max_diag;
    if diag.iter().any(|d| d.abs() <= tol) {
        return Err(Error::SingularFit);
    }

    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            r.set(i, j, qr.get(i, j));
        }
        r.set(j, j, diag[j]);
    }

    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for k in i + 1..n {
            s = s - r.get(i, k) * x[k];
        }
        x[i] = s / r.get(i, i);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularFit);
    }

    let fitted = a.mul_vec(&x);
    let residuals = b.iter().zip(&fitted).map(|(&bi, &fi)| bi - fi).collect();
    Ok(LeastSquares { coefficients: x, residuals, r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_square_system() {
        // [2 1; 1 3] x = [3; 5] -> x = [0.8, 1.4]
        let a = Matrix::from_columns(2, &[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let ls = least_squares(&a, &[3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(ls.coefficients[0], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(ls.coefficients[1], 1.4, epsilon = 1e-12);
    }

    #[test]
    fn overdetermined_line_fit() {
        // y = 1 + 2x sampled exactly
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ones = vec![1.0; 5];
        let a = Matrix::from_columns(5, &[ones, xs.to_vec()]).unwrap();
        let b: Vec<f64> = xs.iter().map(|x| 1.0 + 2.0 * x).collect();
        let ls = least_squares(&a, &b).unwrap();
        assert_abs_diff_eq!(ls.coefficients[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ls.coefficients[1], 2.0, epsilon = 1e-12);
        assert!(ls.residual_sum_of_squares() < 1e-20);
    }

    #[test]
    fn collinear_columns_are_singular() {
        let c = vec![1.0, 2.0, 3.0];
        let a = Matrix::from_columns(3, &[c.clone(), c.iter().map(|v| 2.0 * v).collect()]).unwrap();
        assert_eq!(least_squares(&a, &[1.0, 1.0, 1.0]).unwrap_err(), Error::SingularFit);
    }

    #[test]
    fn inverse_gram_matches_closed_form() {
        // A = [1 0; 1 1; 1 2]: AᵀA = [3 3; 3 5], inverse diag = [5/6, 3/6]
        let a = Matrix::from_columns(3, &[vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let ls = least_squares(&a, &[0.0, 1.0, 1.0]).unwrap();
        let d = ls.inverse_gram_diagonal();
        assert_abs_diff_eq!(d[0], 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::from_columns(3, &[vec![1.0f32, 1.0, 1.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let ls = least_squares(&a, &[1.0f32, 3.0, 5.0]).unwrap();
        assert!((ls.coefficients[0] - 1.0).abs() < 1e-5);
        assert!((ls.coefficients[1] - 2.0).abs() < 1e-5);
    }
}
