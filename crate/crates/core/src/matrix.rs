//! Dense complex matrices and the special matrices built on them.
//!
//! Everything in the crate is carried by [`ComplexMatrix`], a dense column-major
//! matrix of `Complex64`. Indexing is 0-based throughout.
//!
//! # Cycles
//!
//! The full-cycle permutation `C` has `C(p, q) = 1` exactly when `p ≡ q + 1 (mod n)`,
//! i.e. the block form `[[0, 1], [I, 0]]`. The `k`-th cycle of a matrix is the set of
//! `n` entries supported on `C^k`: positions `(p, q)` with `p ≡ q + k`. It consists of
//! a lower diagonal of length `n - k` starting at `(k, 0)` and a wrapped upper diagonal
//! of length `k` starting at `(0, n - k)`.
//!
//! A cycle is stored as a [`DiagonalVector`] read from the head of its longer
//! constituent diagonal: for `2k <= n` entry `t` sits at `(t + k, t)`, otherwise at
//! `(t, t + n - k)` (indices mod `n`). For the order-3 magic square this gives
//! `(8, 5, 2)`, `(3, 9, 6)` and `(1, 7, 4)` for cycles 0, 1 and 2. Norms, DFT
//! magnitudes and every quantity derived from them do not depend on where the
//! traversal starts; [`cycle_position`] is the single source of truth for it.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, column-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.data[c * rows + r] = f(r, c);
            }
        }
        m
    }

    /// Real matrix from row-major data.
    pub fn from_real_rows(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        Ok(Self::from_fn(rows, cols, |r, c| {
            Complex64::new(values[r * cols + c], 0.0)
        }))
    }

    pub fn from_row_major(rows: usize, cols: usize, values: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        Ok(Self::from_fn(rows, cols, |r, c| values[r * cols + c]))
    }

    pub fn from_column_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Diagonal matrix with the given diagonal.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Circulant matrix with `R(p, q) = first_row[(q - p) mod n]`.
    pub fn circulant(first_row: &[Complex64]) -> Self {
        let n = first_row.len();
        Self::from_fn(n, n, |p, q| first_row[(q + n - p) % n])
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Column-major storage.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn column(&self, c: usize) -> &[Complex64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn column_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn row(&self, r: usize) -> Vec<Complex64> {
        (0..self.cols).map(|c| self[(r, c)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    /// `self * diag(d)`: scales column `q` by `d[q]`.
    pub fn scale_columns(&self, d: &[Complex64]) -> Result<Self> {
        if d.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: d.len(),
            });
        }
        let mut out = self.clone();
        for (c, &s) in d.iter().enumerate() {
            for v in out.column_mut(c) {
                *v *= s;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        let mut y = vec![ZERO; self.rows];
        for (c, &xc) in x.iter().enumerate() {
            if xc == ZERO {
                continue;
            }
            for (yr, &a) in y.iter_mut().zip(self.column(c)) {
                *yr += a * xc;
            }
        }
        Ok(y)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for c in 0..other.cols {
            let col = self.mul_vec(other.column(c))?;
            out.column_mut(c).copy_from_slice(&col);
        }
        Ok(out)
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `||self - other||_F / ||other||_F`, or the absolute difference when `other` is zero.
    pub fn relative_error(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let denom = other.frobenius_norm();
        Ok(if denom > 0.0 { diff / denom } else { diff })
    }

    /// Largest `|A(i,j) - conj(A(j,i))|`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for c in 0..self.cols {
            for r in 0..=c {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian up to `rel_tol` times the largest entry.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_column_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        ComplexMatrix {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.as_slice().to_vec(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[c * self.rows + r]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[c * self.rows + r]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(8) {
                let v = self[(r, c)];
                write!(f, "{:>9.4}{:+.4}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// # Panics
    /// On shape mismatch.
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in addition");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// # Panics
    /// On shape mismatch.
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in subtraction");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// # Panics
    /// On incompatible shapes.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("incompatible shapes in multiplication")
    }
}

/// The diagonal of a diagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiagonalVector {
    values: Vec<Complex64>,
}

impl DiagonalVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        DiagonalVector { values }
    }

    pub fn zeros(n: usize) -> Self {
        DiagonalVector {
            values: vec![ZERO; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Euclidean norm, equal to the Frobenius norm of the diagonal matrix.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.values)
    }
}

impl From<Vec<Complex64>> for DiagonalVector {
    fn from(values: Vec<Complex64>) -> Self {
        DiagonalVector { values }
    }
}

impl Index<usize> for DiagonalVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.values[i]
    }
}

/// A cycle (power of `C`) index, `0 <= k < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleIndex(usize);

impl CycleIndex {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < n {
            Ok(CycleIndex(k))
        } else {
            Err(Error::CycleOutOfRange { k, n })
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// The cycle `n - k` (with `0` fixed).
    pub fn reflect(self, n: usize) -> Self {
        CycleIndex((n - self.0) % n)
    }
}

impl fmt::Display for CycleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Column of the first stored entry of cycle `k`.
fn cycle_offset(n: usize, k: usize) -> usize {
    if 2 * k <= n {
        0
    } else {
        n - k
    }
}

/// Matrix position `(row, col)` of entry `t` of cycle `k` in an `n x n` matrix.
#[inline]
pub fn cycle_position(n: usize, k: usize, t: usize) -> (usize, usize) {
    let col = (t + cycle_offset(n, k)) % n;
    ((col + k) % n, col)
}

/// Index `t` within its cycle of the entry at `(row, col)`; the cycle is `(row - col) mod n`.
#[inline]
pub fn cycle_slot(n: usize, row: usize, col: usize) -> (usize, usize) {
    let k = (row + n - col) % n;
    (k, (col + n - cycle_offset(n, k)) % n)
}

/// The cycle read in row order, `v[p] = A(p, p - k)`, i.e. the `Λ` in `A ∘ C^k = Λ C^k`.
pub fn cycle_row_ordered(cycle: &[Complex64], k: usize) -> Vec<Complex64> {
    let n = cycle.len();
    let shift = (k + cycle_offset(n, k)) % n;
    (0..n).map(|p| cycle[(p + n - shift) % n]).collect()
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroDimension)
    } else {
        Ok(())
    }
}

/// The full-cycle permutation `C = [[0, 1], [I_{n-1}, 0]]`, with `C(p, q) = 1` iff `p ≡ q + 1`.
pub fn full_cycle_matrix(n: usize) -> Result<ComplexMatrix> {
    check_dim(n)?;
    Ok(ComplexMatrix::from_fn(n, n, |p, q| {
        if p == (q + 1) % n {
            ONE
        } else {
            ZERO
        }
    }))
}

/// The flipped identity `J(i, n - 1 - i) = 1`.
pub fn flip_matrix(n: usize) -> Result<ComplexMatrix> {
    check_dim(n)?;
    Ok(ComplexMatrix::from_fn(n, n, |p, q| {
        if p + q == n - 1 {
            ONE
        } else {
            ZERO
        }
    }))
}

/// The unitary Fourier matrix `W(p, q) = exp(-i 2π p q / n) / sqrt(n)`.
pub fn fourier_matrix(n: usize) -> Result<ComplexMatrix> {
    check_dim(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |p, q| {
        Complex64::from_polar(scale, -2.0 * PI * ((p * q) % n) as f64 / n as f64)
    }))
}

/// Diagonal of the relaxation `D_k(q, q) = exp(+i 2π k q / n)`.
pub fn relaxation_diagonal(n: usize, k: usize) -> Result<DiagonalVector> {
    check_dim(n)?;
    CycleIndex::new(k, n)?;
    Ok(DiagonalVector::new(
        (0..n)
            .map(|q| Complex64::from_polar(1.0, 2.0 * PI * ((k * q) % n) as f64 / n as f64))
            .collect(),
    ))
}

/// `<A, B> = Σ conj(A(i,j)) B(i,j)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    a.check_same_shape(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Entries of `A` supported on `C^k`, in the traversal order described in the module docs.
pub fn apply_cycle_mask(a: &ComplexMatrix, k: usize) -> Result<DiagonalVector> {
    let n = a.dim()?;
    CycleIndex::new(k, n)?;
    Ok(DiagonalVector::new(
        (0..n).map(|t| a[cycle_position(n, k, t)]).collect(),
    ))
}

/// Writes a cycle back into the positions of `C^k`, overwriting them.
pub fn place_cycle(m: &mut ComplexMatrix, k: usize, cycle: &[Complex64]) -> Result<()> {
    let n = m.dim()?;
    CycleIndex::new(k, n)?;
    if cycle.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: cycle.len(),
        });
    }
    for (t, &v) in cycle.iter().enumerate() {
        m[cycle_position(n, k, t)] = v;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    pub(crate) fn magic_square() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(3, 3, &[8., 1., 6., 3., 5., 7., 4., 9., 2.]).unwrap()
    }

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let d = a.max_abs_diff(b).unwrap();
        assert!(d < tol, "max diff {d:e} >= {tol:e}");
    }

    #[test]
    fn cycle_orientation_matches_magic_square() {
        // Both orientations of C, masked against the magic square: only the block
        // form puts {3, 9, 6} on C^1.
        let a = magic_square();
        let c = full_cycle_matrix(3).unwrap();
        let masked = a.hadamard(&c).unwrap();
        let mut support: Vec<f64> = masked.as_slice().iter().map(|v| v.re).filter(|&v| v != 0.0).collect();
        support.sort_by(f64::total_cmp);
        assert_eq!(support, vec![3.0, 6.0, 9.0]);

        let ct = c.transpose();
        let masked = a.hadamard(&ct).unwrap();
        let mut support: Vec<f64> = masked.as_slice().iter().map(|v| v.re).filter(|&v| v != 0.0).collect();
        support.sort_by(f64::total_cmp);
        assert_eq!(support, vec![1.0, 4.0, 7.0]);
    }

    #[test]
    fn magic_square_cycles() {
        let a = magic_square();
        let vals = |k| -> Vec<f64> {
            apply_cycle_mask(&a, k).unwrap().values().iter().map(|v| v.re).collect()
        };
        assert_eq!(vals(0), vec![8.0, 5.0, 2.0]);
        assert_eq!(vals(1), vec![3.0, 9.0, 6.0]);
        assert_eq!(vals(2), vec![1.0, 7.0, 4.0]);
    }

    #[test]
    fn small_cycles() {
        assert_eq!(full_cycle_matrix(1).unwrap(), ComplexMatrix::identity(1));
        let c2 = full_cycle_matrix(2).unwrap();
        assert_eq!(&c2 * &c2, ComplexMatrix::identity(2));
        assert!(matches!(full_cycle_matrix(0), Err(Error::ZeroDimension)));
        assert!(flip_matrix(0).is_err());
        assert!(fourier_matrix(0).is_err());
    }

    #[test]
    fn flip_is_symmetric_involution() {
        let j2 = flip_matrix(2).unwrap();
        assert_eq!(j2, ComplexMatrix::from_real_rows(2, 2, &[0., 1., 1., 0.]).unwrap());
        for n in 1..7 {
            let j = flip_matrix(n).unwrap();
            assert_eq!(j.transpose(), j);
            assert_eq!(&j * &j, ComplexMatrix::identity(n));
        }
    }

    #[test]
    fn fourier_is_unitary_and_squares_to_cj() {
        for n in 1..=64 {
            let w = fourier_matrix(n).unwrap();
            let wwh = &w * &w.adjoint();
            assert_close(&wwh, &ComplexMatrix::identity(n), 1e-12);
            let cj = &full_cycle_matrix(n).unwrap() * &flip_matrix(n).unwrap();
            assert_close(&(&w * &w), &cj, 1e-12);
        }
        assert_eq!(fourier_matrix(1).unwrap(), ComplexMatrix::identity(1));
    }

    #[test]
    fn relaxation_values() {
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let d1 = relaxation_diagonal(3, 1).unwrap();
        let d2 = relaxation_diagonal(3, 2).unwrap();
        for (got, want) in d1.values().iter().zip([c(1.0), w, w * w]) {
            assert!((got - want).norm() < 1e-15);
        }
        for (got, want) in d2.values().iter().zip([c(1.0), w * w, w]) {
            assert!((got - want).norm() < 1e-15);
        }
        assert!(relaxation_diagonal(5, 0).unwrap().values().iter().all(|&v| v == c(1.0)));
        assert!(matches!(
            relaxation_diagonal(3, 3),
            Err(Error::CycleOutOfRange { k: 3, n: 3 })
        ));
    }

    #[test]
    fn fourier_conjugates_relaxations_to_cycles() {
        let n = 8;
        let w = fourier_matrix(n).unwrap();
        let c = full_cycle_matrix(n).unwrap();
        let mut ck = ComplexMatrix::identity(n);
        for k in 0..n {
            let d = relaxation_diagonal(n, k).unwrap().to_matrix();
            let wdw = &(&w * &d) * &w.adjoint();
            assert_close(&wdw, &ck, 1e-12);
            ck = &ck * &c;
        }
    }

    #[test]
    fn relaxations_are_orthogonal() {
        let n = 6;
        for i in 0..n {
            for j in 0..n {
                let di = relaxation_diagonal(n, i).unwrap().to_matrix();
                let dj = relaxation_diagonal(n, j).unwrap().to_matrix();
                let ip = frobenius_inner(&di, &dj).unwrap();
                let want = if i == j { n as f64 } else { 0.0 };
                assert!((ip - c(want)).norm() < 1e-12, "<D{i},D{j}> = {ip}");
            }
        }
    }

    #[test]
    fn frobenius_of_magic_square() {
        let a = magic_square();
        assert_eq!(frobenius_inner(&a, &a).unwrap(), c(285.0));
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            frobenius_inner(&a, &b),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn cycle_position_round_trips() {
        for n in 1..12 {
            let mut seen = vec![false; n * n];
            for k in 0..n {
                for t in 0..n {
                    let (r, c) = cycle_position(n, k, t);
                    assert_eq!((r + n - c) % n, k);
                    assert_eq!(cycle_slot(n, r, c), (k, t));
                    assert!(!seen[r * n + c]);
                    seen[r * n + c] = true;
                }
            }
            assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn row_ordered_cycle_matches_hadamard_identity() {
        // A ∘ C^k = diag(v) C^k for the row-ordered reading.
        let a = ComplexMatrix::from_fn(7, 7, |r, c| Complex64::new(r as f64, c as f64 * 0.5));
        let c1 = full_cycle_matrix(7).unwrap();
        let mut ck = ComplexMatrix::identity(7);
        for k in 0..7 {
            let cycle = apply_cycle_mask(&a, k).unwrap();
            let v = cycle_row_ordered(cycle.values(), k);
            let lhs = a.hadamard(&ck).unwrap();
            let rhs = &ComplexMatrix::from_diagonal(&v) * &ck;
            assert_eq!(lhs, rhs);
            ck = &ck * &c1;
        }
    }

    #[test]
    fn place_cycle_inverts_mask() {
        let a = ComplexMatrix::from_fn(5, 5, |r, c| Complex64::new((r * 5 + c) as f64, 1.0));
        let mut b = ComplexMatrix::zeros(5, 5);
        for k in 0..5 {
            place_cycle(&mut b, k, apply_cycle_mask(&a, k).unwrap().values()).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn circulant_layout() {
        let r = ComplexMatrix::circulant(&[c(5.0), c(4.0), c(6.0)]);
        let want = ComplexMatrix::from_real_rows(3, 3, &[5., 4., 6., 6., 5., 4., 4., 6., 5.]).unwrap();
        assert_eq!(r, want);
    }
}
