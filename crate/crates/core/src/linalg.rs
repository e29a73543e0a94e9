//! Dense eigenvalues, singular values and LU solves, backed by nalgebra.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, LU, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Relative tolerance for routing Hermitian input to the Hermitian solver.
const HERMITIAN_TOL: f64 = 1e-12;

fn schur(m: &ComplexMatrix) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = m.dim()?;
    let s = Schur::try_new(m.to_nalgebra(), f64::EPSILON, 200 * n.max(10))
        .ok_or(Error::EigenSolverFailed)?;
    Ok(s.unpack())
}

fn is_real(m: &ComplexMatrix) -> bool {
    m.as_slice().iter().all(|v| v.im == 0.0)
}

fn real_part(m: &ComplexMatrix) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_iterator(n, m.ncols(), m.as_slice().iter().map(|v| v.re))
}

/// All eigenvalues of a general square matrix, in Schur order.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if m.dim()? == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let (_, t) = schur(m)?;
    let ev: Vec<Complex64> = t.diagonal().iter().copied().collect();
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolverFailed);
    }
    Ok(ev)
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.dim()?;
    let mut ev: Vec<f64> = if is_real(m) {
        SymmetricEigen::try_new(real_part(m), f64::EPSILON, 0)
            .ok_or(Error::EigenSolverFailed)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        SymmetricEigen::try_new(m.to_nalgebra(), f64::EPSILON, 0)
            .ok_or(Error::EigenSolverFailed)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenvalues and unit-norm eigenvectors (columns of `X`) with `M X = X diag(λ)`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
    /// True when computed by the Hermitian solver, so `X` is unitary.
    pub hermitian: bool,
}

/// Full eigendecomposition. Hermitian input goes to the Hermitian solver; anything
/// else is reduced to complex Schur form and the eigenvectors are back-substituted.
pub fn eigen_decomposition(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.dim()?;
    if m.is_hermitian(HERMITIAN_TOL) {
        let e = SymmetricEigen::try_new(m.to_nalgebra(), f64::EPSILON, 0)
            .ok_or(Error::EigenSolverFailed)?;
        return Ok(EigenDecomposition {
            values: e.eigenvalues.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            vectors: ComplexMatrix::from_nalgebra(&e.eigenvectors),
            hermitian: true,
        });
    }
    let (q, t) = schur(m)?;
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let lj = t[(j, j)];
        y[(j, j)] = Complex64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let s: Complex64 = (i + 1..=j).map(|l| t[(i, l)] * y[(l, j)]).sum();
            let mut d = t[(i, i)] - lj;
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            y[(i, j)] = -s / d;
        }
    }
    let mut x = q * y;
    for mut col in x.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= Complex64::new(nrm, 0.0);
        }
    }
    Ok(EigenDecomposition {
        values: t.diagonal().iter().copied().collect(),
        vectors: ComplexMatrix::from_nalgebra(&x),
        hermitian: false,
    })
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.dim()?;
    let mut sv: Vec<f64> = if is_real(m) {
        SVD::try_new(real_part(m), false, false, f64::EPSILON, 0)
            .ok_or(Error::EigenSolverFailed)?
            .singular_values
            .iter()
            .copied()
            .collect()
    } else {
        SVD::try_new(m.to_nalgebra(), false, false, f64::EPSILON, 0)
            .ok_or(Error::EigenSolverFailed)?
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `‖M‖₂`.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?[0])
}

/// `σ_max / σ_min`; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    let sv = singular_values(m)?;
    let min = *sv.last().expect("nonempty");
    Ok(if min == 0.0 { f64::INFINITY } else { sv[0] / min })
}

/// Partial-pivoting LU factorization of a square matrix.
#[derive(Debug, Clone)]
pub struct LuFactor {
    n: usize,
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl LuFactor {
    /// Fails with [`Error::Singular`] when a pivot is exactly zero or the factor is not finite.
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let n = m.dim()?;
        Self::from_nalgebra(m.to_nalgebra(), n)
    }

    pub(crate) fn from_nalgebra(m: DMatrix<Complex64>, n: usize) -> Result<Self> {
        let lu = LU::new(m);
        if !lu.is_invertible() || !lu.u().iter().all(|v| v.is_finite()) {
            return Err(Error::Singular(format!("zero pivot in {n}x{n} LU factorization")));
        }
        Ok(LuFactor { n, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: b.len(),
            });
        }
        let mut v = DVector::from_column_slice(b);
        if !self.lu.solve_mut(&mut v) {
            return Err(Error::Singular("LU solve failed".into()));
        }
        b.copy_from_slice(v.as_slice());
        Ok(())
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}
