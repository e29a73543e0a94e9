//! Preconditioners built in the transformed domain, and preconditioned CG.
//!
//! Both preconditioners have the form `M = W† P W` for a sparse `P` taken from
//! `B = W A W†`, so `M⁻¹ v = W† P⁻¹ W v` costs two FFTs and one solve with `P`.
//!
//! * [`CyclePreconditioner`]: `P` is a few dominant cycles of `B`. The cycles are
//!   factorized per coset block (see [`SparseCycleMatrix::coset_blocks`]).
//! * [`TChanPreconditioner`]: `P` is the diagonal of `B` with its trailing `s x s`
//!   corner kept dense. With `s = 1` this is the optimal circulant preconditioner.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{similarity_transform, CycleSelection, DftPlan, Direction, Normalization};
use crate::linalg::LuFactor;
use crate::matrix::{apply_cycle_mask, ComplexMatrix};
use crate::sparse::{select_by_norm, sparsify, SparseCycleMatrix};

/// Relative tolerance for the Hermitian check in [`pcg_solve`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// The true residual replaces the recurrence every this many iterations.
pub const RESIDUAL_REFRESH: usize = 50;

/// Setup and usage counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecondStats {
    pub factorizations: usize,
    pub applies: u64,
}

/// An approximate inverse `v -> M⁻¹ v`.
pub trait Preconditioner: Send + Sync {
    fn dim(&self) -> usize;
    /// Stored entries of the transformed-domain matrix `P`.
    fn nnz(&self) -> usize;
    fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>>;
    fn stats(&self) -> PrecondStats;
}

fn check_len(n: usize, v: &[Complex64]) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: n,
            actual: v.len(),
        })
    }
}

/// `M = I`.
#[derive(Debug, Default)]
pub struct IdentityPreconditioner {
    n: usize,
    applies: AtomicU64,
}

impl IdentityPreconditioner {
    pub fn new(n: usize) -> Self {
        IdentityPreconditioner {
            n,
            applies: AtomicU64::new(0),
        }
    }
}

impl Preconditioner for IdentityPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn nnz(&self) -> usize {
        0
    }

    fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.n, v)?;
        self.applies.fetch_add(1, Ordering::Relaxed);
        Ok(v.to_vec())
    }

    fn stats(&self) -> PrecondStats {
        PrecondStats {
            factorizations: 0,
            applies: self.applies.load(Ordering::Relaxed),
        }
    }
}

/// `W` and `W†` as FFT plans.
#[derive(Debug, Clone)]
struct FourierPair {
    w: DftPlan,
    w_adj: DftPlan,
}

impl FourierPair {
    fn new(n: usize) -> Result<Self> {
        Ok(FourierPair {
            w: DftPlan::new(n, Direction::Inverse, Normalization::OverSqrtN)?,
            w_adj: DftPlan::new(n, Direction::Forward, Normalization::OverSqrtN)?,
        })
    }

    fn sandwich(&self, v: &[Complex64], solve: impl FnOnce(&mut [Complex64]) -> Result<()>) -> Result<Vec<Complex64>> {
        let mut y = v.to_vec();
        self.w.process(&mut y)?;
        solve(&mut y)?;
        self.w_adj.process(&mut y)?;
        Ok(y)
    }
}

/// `M = W† B̃ W` for a few cycles `B̃` of `B = W A W†`.
#[derive(Debug)]
pub struct CyclePreconditioner {
    sparse: SparseCycleMatrix,
    stride: usize,
    blocks: Vec<LuFactor>,
    fourier: FourierPair,
    applies: AtomicU64,
}

/// Cycle norms of `b`, averaged over `k` and `n - k` when `hermitian`.
fn selection_norms(b: &ComplexMatrix, hermitian: bool) -> Result<Vec<f64>> {
    let n = b.dim()?;
    let norms = (0..n)
        .map(|k| apply_cycle_mask(b, k).map(|c| c.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(if hermitian {
        (0..n).map(|k| 0.5 * (norms[k] + norms[(n - k) % n])).collect()
    } else {
        norms
    })
}

/// Selects the `k_cycles` dominant cycles of `W A W†` and factorizes them.
///
/// For Hermitian `A` the norms of cycles `k` and `n - k` coincide up to rounding and
/// are averaged so pairs stay together. The selection is kept closed under
/// `k -> n - k`, which keeps `B̃` Hermitian; an even `k_cycles` may lose one cycle.
pub fn build_cycle_preconditioner(a: &ComplexMatrix, k_cycles: usize) -> Result<CyclePreconditioner> {
    let b = similarity_transform(a)?;
    let hermitian = a.is_hermitian(HERMITIAN_TOLERANCE);
    let sel = preconditioner_selection(&selection_norms(&b, hermitian)?, k_cycles, hermitian)?;
    CyclePreconditioner::from_transform(&b, &sel)
}

/// The `k_cycles` largest norms; for Hermitian input a cycle whose reflection missed
/// the cut is dropped, or its reflection added if nothing else would remain.
fn preconditioner_selection(norms: &[f64], k_cycles: usize, hermitian: bool) -> Result<CycleSelection> {
    let sel = select_by_norm(norms, k_cycles)?;
    if !hermitian || sel.is_reflection_closed() {
        return Ok(sel);
    }
    let n = sel.dim();
    let paired: Vec<usize> = sel.iter().filter(|&k| sel.contains((n - k) % n)).collect();
    if paired.is_empty() {
        CycleSelection::new(n, sel.iter().chain(sel.reflect().iter()).collect::<std::collections::BTreeSet<_>>())
    } else {
        CycleSelection::new(n, paired)
    }
}

impl CyclePreconditioner {
    /// Uses the given cycles of an already transformed `B`.
    pub fn from_transform(b: &ComplexMatrix, sel: &CycleSelection) -> Result<Self> {
        Self::from_sparse(sparsify(b, sel)?)
    }

    pub fn from_sparse(sparse: SparseCycleMatrix) -> Result<Self> {
        let n = sparse.dim();
        let stride = sparse.coset_stride();
        let blocks = sparse
            .coset_blocks()
            .into_par_iter()
            .map(|blk| LuFactor::new(&blk))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::Singular(_) => Error::Singular(format!(
                    "cycles {:?} give a singular preconditioner",
                    sparse.selection().indices()
                )),
                other => other,
            })?;
        Ok(CyclePreconditioner {
            stride,
            blocks,
            fourier: FourierPair::new(n)?,
            sparse,
            applies: AtomicU64::new(0),
        })
    }

    pub fn selection(&self) -> &CycleSelection {
        self.sparse.selection()
    }

    pub fn sparse(&self) -> &SparseCycleMatrix {
        &self.sparse
    }

    /// Solves `B̃ y = x` in place.
    fn solve_transformed(&self, y: &mut [Complex64]) -> Result<()> {
        let g = self.stride;
        let m = y.len() / g;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (r, lu) in self.blocks.iter().enumerate() {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = y[r + i * g];
            }
            lu.solve_in_place(&mut buf)?;
            for (i, b) in buf.iter().enumerate() {
                y[r + i * g] = *b;
            }
        }
        Ok(())
    }
}

impl Preconditioner for CyclePreconditioner {
    fn dim(&self) -> usize {
        self.sparse.dim()
    }

    fn nnz(&self) -> usize {
        self.sparse.nnz()
    }

    fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.dim(), v)?;
        self.applies.fetch_add(1, Ordering::Relaxed);
        self.fourier.sandwich(v, |y| self.solve_transformed(y))
    }

    fn stats(&self) -> PrecondStats {
        PrecondStats {
            factorizations: self.blocks.len(),
            applies: self.applies.load(Ordering::Relaxed),
        }
    }
}

/// `M = W† (B ∘ Q) W` where `Q` keeps the diagonal and the trailing `s x s` block.
#[derive(Debug)]
pub struct TChanPreconditioner {
    budget: usize,
    s: usize,
    diagonal: Vec<Complex64>,
    corner: LuFactor,
    fourier: FourierPair,
    applies: AtomicU64,
}

/// Largest `s` in `1..=n` with `(n - s) + s² <= budget`.
pub fn tchan_block_size(n: usize, budget: usize) -> Result<usize> {
    if budget < n {
        return Err(Error::InvalidArgument(format!(
            "budget {budget} is below the dimension {n}"
        )));
    }
    Ok((1..=n).take_while(|&s| n - s + s * s <= budget).last().unwrap_or(1))
}

/// Generalized T. Chan preconditioner for a budget of stored entries.
pub fn build_tchan_preconditioner(a: &ComplexMatrix, nnz_budget: usize) -> Result<TChanPreconditioner> {
    let b = similarity_transform(a)?;
    TChanPreconditioner::from_transform(&b, nnz_budget)
}

impl TChanPreconditioner {
    pub fn from_transform(b: &ComplexMatrix, nnz_budget: usize) -> Result<Self> {
        let n = b.dim()?;
        let s = tchan_block_size(n, nnz_budget)?;
        let head = n - s;
        let diagonal: Vec<Complex64> = (0..head).map(|i| b[(i, i)]).collect();
        if let Some(i) = diagonal.iter().position(|d| d.norm() == 0.0) {
            return Err(Error::Singular(format!("diagonal entry {i} of the transformed matrix is zero")));
        }
        let block = ComplexMatrix::from_fn(s, s, |p, q| b[(head + p, head + q)]);
        let corner = LuFactor::new(&block)
            .map_err(|_| Error::Singular(format!("{s}x{s} corner block is singular")))?;
        Ok(TChanPreconditioner {
            budget: nnz_budget,
            s,
            diagonal,
            corner,
            fourier: FourierPair::new(n)?,
            applies: AtomicU64::new(0),
        })
    }

    pub fn block_size(&self) -> usize {
        self.s
    }

    pub fn budget(&self) -> usize {
        self.budget
    }
}

impl Preconditioner for TChanPreconditioner {
    fn dim(&self) -> usize {
        self.diagonal.len() + self.s
    }

    fn nnz(&self) -> usize {
        self.diagonal.len() + self.s * self.s
    }

    fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.dim(), v)?;
        self.applies.fetch_add(1, Ordering::Relaxed);
        self.fourier.sandwich(v, |y| {
            let (head, tail) = y.split_at_mut(self.diagonal.len());
            for (x, d) in head.iter_mut().zip(&self.diagonal) {
                *x /= d;
            }
            self.corner.solve_in_place(tail)
        })
    }

    fn stats(&self) -> PrecondStats {
        PrecondStats {
            factorizations: 1,
            applies: self.applies.load(Ordering::Relaxed),
        }
    }
}

/// Outcome of [`pcg_solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcgReport {
    pub iterations: usize,
    /// `‖b - A x_i‖ / ‖b‖`; entry 0 is the starting residual.
    pub relative_residuals: Vec<f64>,
    pub converged: bool,
    pub tolerance: f64,
}

impl PcgReport {
    pub fn final_residual(&self) -> f64 {
        *self.relative_residuals.last().expect("starting residual is always recorded")
    }
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.par_iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.par_iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `A x`, parallel over row blocks.
pub fn dense_matvec(a: &ComplexMatrix, x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(a.ncols(), x)?;
    const ROWS: usize = 128;
    let mut y = vec![Complex64::new(0.0, 0.0); a.nrows()];
    y.par_chunks_mut(ROWS).enumerate().for_each(|(blk, out)| {
        let r0 = blk * ROWS;
        for (c, &xc) in x.iter().enumerate() {
            let col = &a.column(c)[r0..r0 + out.len()];
            for (o, &v) in out.iter_mut().zip(col) {
                *o += v * xc;
            }
        }
    });
    Ok(y)
}

/// Preconditioned conjugate gradient from `x₀ = 0` for Hermitian positive definite `A`.
pub fn pcg_solve(
    a: &ComplexMatrix,
    b: &[Complex64],
    m: &dyn Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, PcgReport)> {
    let n = a.dim()?;
    check_len(n, b)?;
    check_len(n, &vec![Complex64::default(); m.dim()])?;
    let asym = a.hermitian_defect();
    if asym > HERMITIAN_TOLERANCE * a.max_abs() {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let bnorm = norm(b);
    let mut report = PcgReport {
        iterations: 0,
        relative_residuals: vec![if bnorm == 0.0 { 0.0 } else { 1.0 }],
        converged: bnorm == 0.0,
        tolerance: tol,
    };
    if report.converged {
        return Ok((x, report));
    }
    let mut r = b.to_vec();
    let mut z = m.apply(&r)?;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = dense_matvec(a, &p)?;
        let curvature = dot(&p, &ap).re;
        if !(curvature > 0.0) {
            return Err(Error::Breakdown {
                iteration: it,
                curvature,
            });
        }
        let alpha = rz / curvature;
        x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        if it % RESIDUAL_REFRESH == 0 {
            let ax = dense_matvec(a, &x)?;
            r.par_iter_mut().zip(b).zip(&ax).for_each(|((ri, bi), axi)| *ri = bi - axi);
        } else {
            r.par_iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= alpha * api);
        }
        let rel = norm(&r) / bnorm;
        report.relative_residuals.push(rel);
        report.iterations = it;
        if rel < tol {
            report.converged = true;
            break;
        }
        z = m.apply(&r)?;
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        p.par_iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    Ok((x, report))
}

/// One row of a preconditioner comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    /// `identity`, `tchan` or `cycles`.
    pub method: String,
    /// Entry budget of the preconditioner; `0` for the identity.
    pub budget: usize,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
}

/// Column names of [`BenchmarkRow`], in order.
pub const BENCHMARK_HEADER: [&str; 5] = ["method", "budget", "iterations", "converged", "final_residual"];

fn row(method: &str, budget: usize, report: &PcgReport) -> BenchmarkRow {
    BenchmarkRow {
        method: method.into(),
        budget,
        iterations: report.iterations,
        converged: report.converged,
        final_residual: report.final_residual(),
    }
}

/// CG iteration counts without preconditioning, then with the T. Chan and cycle
/// preconditioners at each budget (`budget / n` cycles for the latter).
pub fn precond_benchmark(
    a: &ComplexMatrix,
    b: &[Complex64],
    budgets: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<BenchmarkRow>> {
    let n = a.dim()?;
    let transformed = similarity_transform(a)?;
    let hermitian = a.is_hermitian(HERMITIAN_TOLERANCE);
    let norms = selection_norms(&transformed, hermitian)?;

    let (_, rep) = pcg_solve(a, b, &IdentityPreconditioner::new(n), tol, max_iter)?;
    let mut rows = vec![row("identity", 0, &rep)];
    for &budget in budgets {
        let tchan = TChanPreconditioner::from_transform(&transformed, budget)?;
        let (_, rep) = pcg_solve(a, b, &tchan, tol, max_iter)?;
        rows.push(row("tchan", budget, &rep));
    }
    for &budget in budgets {
        let k = (budget / n).clamp(1, n);
        let sel = preconditioner_selection(&norms, k, hermitian)?;
        let cyc = CyclePreconditioner::from_transform(&transformed, &sel)?;
        let (_, rep) = pcg_solve(a, b, &cyc, tol, max_iter)?;
        rows.push(row("cycles", budget, &rep));
    }
    Ok(rows)
}
