use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use super::HilbertError;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, HilbertError> {
        if rows == 0 || cols == 0 {
            return Err(HilbertError::DimensionMismatch(format!(
                "matrix shape {rows}x{cols} has a zero dimension"
            )));
        }
        if data.len() != rows * cols {
            return Err(HilbertError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<(), HilbertError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(HilbertError::DimensionMismatch(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, HilbertError> {
        self.same_shape(other, "add")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, HilbertError> {
        self.same_shape(other, "sub")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix { data, ..*self })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            data: self.data.iter().map(|a| a * s).collect(),
            ..*self
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, HilbertError> {
        if self.cols != other.rows {
            return Err(HilbertError::DimensionMismatch(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, HilbertError> {
        if v.len() != self.cols {
            return Err(HilbertError::DimensionMismatch(format!(
                "apply: {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64, HilbertError> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(HilbertError::DimensionMismatch(format!(
                "trace_product: {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = Complex64::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        Ok(acc)
    }

    /// Kronecker product with row-major blocks:
    /// entry `(i·rows_b + k, j·cols_b + l)` is `a[i,j]·b[k,l]`.
    pub fn kron(&self, b: &Self) -> Self {
        let (rb, cb) = (b.rows, b.cols);
        Self::from_fn(self.rows * rb, self.cols * cb, |r, c| {
            self.get(r / rb, c / cb) * b.get(r % rb, c % cb)
        })
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, HilbertError> {
        self.same_shape(other, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i..self.cols).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol)
            })
    }

    /// Numerical rank by Gaussian elimination with complete pivoting. Pivots
    /// below `tol · max(1, max|a_ij|)` count as zero.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.data.clone();
        let (m, n) = (self.rows, self.cols);
        let threshold = tol * self.max_abs().max(1.0);
        let threshold_sqr = threshold * threshold;
        let mut rank = 0;
        let mut col_perm: Vec<usize> = (0..n).collect();
        while rank < m.min(n) {
            let mut best = (0.0, rank, rank);
            for i in rank..m {
                for j in rank..n {
                    let v = a[i * n + col_perm[j]].norm_sqr();
                    if v > best.0 {
                        best = (v, i, j);
                    }
                }
            }
            if best.0 <= threshold_sqr {
                break;
            }
            let (_, pi, pj) = best;
            if pi != rank {
                for j in 0..n {
                    a.swap(pi * n + j, rank * n + j);
                }
            }
            col_perm.swap(pj, rank);
            let pc = col_perm[rank];
            let pivot = a[rank * n + pc];
            for i in rank + 1..m {
                let factor = a[i * n + pc] / pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let upper = a[rank * n + j];
                    a[i * n + j] -= factor * upper;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, HilbertError> {
        if !self.is_square() {
            return Err(HilbertError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        // Symmetrize first so rounding noise in the lower triangle is ignored.
        let herm = self.add(&self.adjoint())?.scale(Complex64::new(0.5, 0.0));
        let m = DMatrix::from_row_slice(self.rows, self.cols, &herm.data);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn diag_kron_identity() {
        let d = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let got = d.kron(&ComplexMatrix::identity(2));
        assert_eq!(
            got,
            ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 2.0, 2.0])
        );
    }

    #[test]
    fn kron_block_convention() {
        let a = ComplexMatrix::new(1, 2, vec![c(1.0), c(2.0)]).unwrap();
        let b = ComplexMatrix::new(2, 1, vec![c(3.0), c(5.0)]).unwrap();
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k.as_slice(), &[c(3.0), c(6.0), c(5.0), c(10.0)]);
    }

    #[test]
    fn kron_is_associative() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| Complex64::new(i as f64 + 1.0, j as f64));
        let b = ComplexMatrix::from_fn(3, 2, |i, j| Complex64::new(j as f64 - 1.0, i as f64));
        let cm = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new((i * j) as f64, 1.0));
        let left = a.kron(&b).kron(&cm);
        let right = a.kron(&b.kron(&cm));
        assert!(left.max_abs_diff(&right).unwrap() < 1e-15);
    }

    #[test]
    fn shape_validation() {
        assert!(ComplexMatrix::new(2, 2, vec![c(1.0); 3]).is_err());
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(a.matmul(&b).is_err());
        assert!(a.add(&b).is_err());
        assert!(a.max_abs_diff(&b).is_err());
    }

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(ComplexMatrix::identity(5).rank(1e-10), 5);
        assert_eq!(ComplexMatrix::zeros(3, 3).rank(1e-10), 0);
        let v = [c(1.0), Complex64::new(0.0, 2.0), c(-1.0)];
        assert_eq!(ComplexMatrix::outer(&v, &v).rank(1e-10), 1);
        let m = ComplexMatrix::from_fn(3, 4, |i, j| c((i + j) as f64));
        assert_eq!(m.rank(1e-10), 2);
    }

    #[test]
    fn hermitian_eigenvalues_of_diag() {
        let d = ComplexMatrix::from_real_diagonal(&[3.0, -1.0, 2.0]);
        let ev = d.hermitian_eigenvalues().unwrap();
        assert!(
            (ev[0] + 1.0).abs() < 1e-12
                && (ev[1] - 2.0).abs() < 1e-12
                && (ev[2] - 3.0).abs() < 1e-12
        );
    }

    #[test]
    fn trace_product_matches_matmul() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64 + 0.5));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64, -1.0));
        let direct = a.matmul(&b).unwrap().trace();
        assert!((a.trace_product(&b).unwrap() - direct).norm() < 1e-12);
    }
}
