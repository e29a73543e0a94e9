//! Sparsification of `B = W A W†` to a few cycles, and what the sparse matrix says
//! about the spectrum of `A`.
//!
//! A [`SparseCycleMatrix`] keeps a subset of the cycles of `B`. Its eigenvalues are
//! computed block by block: if every selected cycle index is a multiple of `g`, then
//! `B̃(p, q) != 0` only when `p ≡ q (mod g)` and the residue classes decouple.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::CycleSelection;
use crate::linalg::{eigen_decomposition, eigenvalues, hermitian_eigenvalues, singular_values, spectral_norm, LuFactor};
use crate::matrix::{apply_cycle_mask, cycle_position, ComplexMatrix, DiagonalVector};

/// Magnitude below which a reference eigenvalue is left out of relative statistics.
pub const TINY_EIGENVALUE: f64 = 1e-14;

/// Above this size eigenvalue matching is greedy instead of optimal.
pub const HUNGARIAN_LIMIT: usize = 512;

/// Eigenvector condition numbers above this are treated as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e15;

/// A subset of the cycles of an `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCycleMatrix {
    selection: CycleSelection,
    cycles: Vec<DiagonalVector>,
}

#[derive(Serialize, Deserialize)]
struct CycleJson {
    k: usize,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SparseJson {
    n: usize,
    cycles: Vec<CycleJson>,
}

impl Serialize for SparseCycleMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SparseJson {
            n: self.dim(),
            cycles: self
                .selection
                .iter()
                .zip(&self.cycles)
                .map(|(k, c)| CycleJson {
                    k,
                    values: c.values().to_vec(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseCycleMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SparseJson::deserialize(d)?;
        let (ks, cycles): (Vec<usize>, Vec<DiagonalVector>) = raw
            .cycles
            .into_iter()
            .map(|c| (c.k, DiagonalVector::new(c.values)))
            .unzip();
        let sel = CycleSelection::new(raw.n, ks.clone()).map_err(serde::de::Error::custom)?;
        if ks != sel.indices() {
            return Err(serde::de::Error::custom("cycles must be listed in increasing k"));
        }
        SparseCycleMatrix::new(sel, cycles).map_err(serde::de::Error::custom)
    }
}

impl SparseCycleMatrix {
    /// One cycle per selected index, in the selection's order.
    pub fn new(selection: CycleSelection, cycles: Vec<DiagonalVector>) -> Result<Self> {
        if cycles.len() != selection.len() {
            return Err(Error::LengthMismatch {
                expected: selection.len(),
                actual: cycles.len(),
            });
        }
        let n = selection.dim();
        if let Some(c) = cycles.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: c.len(),
            });
        }
        Ok(SparseCycleMatrix { selection, cycles })
    }

    pub fn dim(&self) -> usize {
        self.selection.dim()
    }

    pub fn selection(&self) -> &CycleSelection {
        &self.selection
    }

    pub fn cycles(&self) -> &[DiagonalVector] {
        &self.cycles
    }

    pub fn cycle(&self, k: usize) -> Option<&DiagonalVector> {
        self.selection
            .indices()
            .binary_search(&k)
            .ok()
            .map(|i| &self.cycles[i])
    }

    /// Stored entries, `n` per selected cycle.
    pub fn nnz(&self) -> usize {
        self.selection.len() * self.dim()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.cycles.iter().map(DiagonalVector::norm_sqr).sum()
    }

    /// Entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n = self.dim();
        self.selection.iter().zip(&self.cycles).flat_map(move |(k, c)| {
            c.values().iter().enumerate().map(move |(t, &v)| {
                let (r, col) = cycle_position(n, k, t);
                (r, col, v)
            })
        })
    }

    pub fn densify(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// `B̃ x` in `O(nnz)`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for (r, c, v) in self.entries() {
            y[r] += v * x[c];
        }
        Ok(y)
    }

    /// `Δ = B - B̃`.
    pub fn residual(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.dim()? != self.dim() {
            return Err(Error::ShapeMismatch {
                left: b.shape(),
                right: (self.dim(), self.dim()),
            });
        }
        let mut d = b.clone();
        for (r, c, _) in self.entries() {
            d[(r, c)] = Complex64::new(0.0, 0.0);
        }
        Ok(d)
    }

    /// gcd of `n` and every selected index.
    pub fn coset_stride(&self) -> usize {
        self.selection.iter().fold(self.dim(), gcd)
    }

    /// The independent diagonal blocks: block `r` holds rows and columns `r, r + g, …`.
    pub fn coset_blocks(&self) -> Vec<ComplexMatrix> {
        let n = self.dim();
        let g = self.coset_stride();
        let m = n / g;
        let mut blocks = vec![ComplexMatrix::zeros(m, m); g];
        for (r, c, v) in self.entries() {
            blocks[r % g][(r / g, c / g)] = v;
        }
        blocks
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The `k` cycles of `b` with the largest 2-norm, ties toward the smaller index.
pub fn select_dominant_cycles(b: &ComplexMatrix, k: usize) -> Result<CycleSelection> {
    let n = b.dim()?;
    let norms = (0..n)
        .map(|j| apply_cycle_mask(b, j).map(|c| c.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    select_by_norm(&norms, k)
}

/// The `k` largest entries of `norms` as a selection, ties toward the smaller index.
pub fn select_by_norm(norms: &[f64], k: usize) -> Result<CycleSelection> {
    let n = norms.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cycle count {k} outside 1..={n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    CycleSelection::new(n, order.into_iter().take(k))
}

/// Keeps the selected cycles of `b`.
pub fn sparsify(b: &ComplexMatrix, sel: &CycleSelection) -> Result<SparseCycleMatrix> {
    let n = b.dim()?;
    if sel.dim() != n {
        return Err(Error::InvalidSelection(format!(
            "selection is for dimension {}, matrix is {n}",
            sel.dim()
        )));
    }
    let cycles = sel
        .iter()
        .map(|k| apply_cycle_mask(b, k))
        .collect::<Result<_>>()?;
    SparseCycleMatrix::new(sel.clone(), cycles)
}

/// Keeps the `nnz` entries of largest magnitude, ties toward row-major order.
pub fn direct_sparsify(a: &ComplexMatrix, nnz: usize) -> Result<ComplexMatrix> {
    let (rows, cols) = a.shape();
    if nnz > rows * cols {
        return Err(Error::InvalidArgument(format!(
            "nnz {nnz} exceeds {} entries",
            rows * cols
        )));
    }
    let mut order: Vec<(usize, usize)> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .collect();
    order.sort_by(|&x, &y| a[y].norm().total_cmp(&a[x].norm()));
    let mut out = ComplexMatrix::zeros(rows, cols);
    for &pos in &order[..nnz] {
        out[pos] = a[pos];
    }
    Ok(out)
}

/// Eigenvalues of `B̃`, grouped by coset block and in block order.
pub fn approx_eigenvalues(sparse: &SparseCycleMatrix) -> Result<Vec<Complex64>> {
    if sparse.selection().is_empty() {
        return Err(Error::InvalidSelection("empty selection".into()));
    }
    let blocks = sparse.coset_blocks();
    let per_block = blocks
        .par_iter()
        .map(|b| {
            if b.nrows() == 1 {
                Ok(vec![b[(0, 0)]])
            } else if b.is_hermitian(1e-12) {
                hermitian_eigenvalues(b).map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            } else {
                eigenvalues(b)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_block.into_iter().flatten().collect())
}

/// Matched eigenvalue errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenApproxResult {
    pub approx_eigenvalues: Vec<Complex64>,
    pub reference_eigenvalues: Option<Vec<Complex64>>,
    /// `matching[i]` is the index in `approx_eigenvalues` paired with reference `i`.
    pub matching: Vec<usize>,
    /// `|λ_i - λ̃_{matching[i]}| / |λ_i|`, `None` where `|λ_i| < 1e-14`.
    pub relative_errors: Vec<Option<f64>>,
    pub mean_relative_error: f64,
    /// Population standard deviation.
    pub std_relative_error: f64,
    pub max_abs_error: f64,
    /// Pairs left out of the relative statistics.
    pub excluded: usize,
    /// `‖Δ‖_F`, when the sparsified matrix is known.
    pub delta_frobenius: Option<f64>,
    /// `‖Δ‖₂`, when computed.
    pub delta_spectral: Option<f64>,
    /// True when the matching is an optimal assignment.
    pub optimal_matching: bool,
}

/// Pairs `approx` with `reference` and summarizes the relative errors.
pub fn eigen_error_report(approx: &[Complex64], reference: &[Complex64]) -> Result<EigenApproxResult> {
    if approx.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            actual: approx.len(),
        });
    }
    let real = reference.iter().chain(approx).all(|v| v.im == 0.0);
    let optimal = real || reference.len() <= HUNGARIAN_LIMIT;
    let matching = if real {
        sorted_match(reference, approx)
    } else if optimal {
        hungarian(reference, approx)
    } else {
        greedy_match(reference, approx)
    };
    let mut max_abs_error: f64 = 0.0;
    let relative_errors: Vec<Option<f64>> = reference
        .iter()
        .zip(&matching)
        .map(|(l, &j)| {
            let e = (l - approx[j]).norm();
            max_abs_error = max_abs_error.max(e);
            (l.norm() >= TINY_EIGENVALUE).then(|| e / l.norm())
        })
        .collect();
    let kept: Vec<f64> = relative_errors.iter().flatten().copied().collect();
    let (mean, std) = mean_std(&kept);
    Ok(EigenApproxResult {
        approx_eigenvalues: approx.to_vec(),
        reference_eigenvalues: Some(reference.to_vec()),
        matching,
        excluded: relative_errors.len() - kept.len(),
        relative_errors,
        mean_relative_error: mean,
        std_relative_error: std,
        max_abs_error,
        delta_frobenius: None,
        delta_spectral: None,
        optimal_matching: optimal,
    })
}

/// Mean and population standard deviation; `(0, 0)` for an empty slice.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Pairs real spectra in sorted order, which is optimal on the line and also
/// minimizes the largest pairwise distance.
fn sorted_match(reference: &[Complex64], approx: &[Complex64]) -> Vec<usize> {
    let order = |xs: &[Complex64]| {
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|&a, &b| xs[a].re.total_cmp(&xs[b].re).then(a.cmp(&b)));
        idx
    };
    let (r, a) = (order(reference), order(approx));
    let mut matching = vec![0; reference.len()];
    for (&i, &j) in r.iter().zip(&a) {
        matching[i] = j;
    }
    matching
}

/// Minimum-cost perfect matching on `|r_i - a_j|` (Kuhn–Munkres with potentials).
fn hungarian(reference: &[Complex64], approx: &[Complex64]) -> Vec<usize> {
    let n = reference.len();
    let cost = |i: usize, j: usize| (reference[i] - approx[j]).norm();
    // 1-based rows/columns with a virtual column 0.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut matching = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            matching[p[j] - 1] = j - 1;
        }
    }
    matching
}

/// Pairs globally closest first; not optimal in general.
fn greedy_match(reference: &[Complex64], approx: &[Complex64]) -> Vec<usize> {
    let n = reference.len();
    let mut pairs: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ((reference[i] - approx[j]).norm(), i, j))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut matching = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in pairs {
        if matching[i] == usize::MAX && !taken[j] {
            matching[i] = j;
            taken[j] = true;
        }
    }
    matching
}

/// Eigenvalues of `B` (dense) against those of `B̃`, with residual norms.
pub fn compare_spectra(b: &ComplexMatrix, sparse: &SparseCycleMatrix) -> Result<EigenApproxResult> {
    let reference = if b.is_hermitian(1e-12) {
        hermitian_eigenvalues(b)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    } else {
        eigenvalues(b)?
    };
    let approx = approx_eigenvalues(sparse)?;
    let delta = sparse.residual(b)?;
    let mut report = eigen_error_report(&approx, &reference)?;
    report.delta_frobenius = Some(delta.frobenius_norm());
    report.delta_spectral = Some(if delta.max_abs() == 0.0 { 0.0 } else { spectral_norm(&delta)? });
    Ok(report)
}

/// `κ(X) ‖Δ‖₂` and, when `B` is invertible, `κ(X) ‖B⁻¹ Δ‖₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BauerFikeReport {
    /// 2-norm condition number of the unit-column eigenvector matrix of `B`.
    pub kappa: f64,
    pub delta_spectral: f64,
    pub bound: f64,
    /// `None` when `B` is singular.
    pub relative_bound: Option<f64>,
}

/// Bauer–Fike bound for the eigenvalues of `B̃` as perturbations of those of `B`.
pub fn bauer_fike_bound(b: &ComplexMatrix, sparse: &SparseCycleMatrix) -> Result<BauerFikeReport> {
    let n = b.dim()?;
    let delta = sparse.residual(b)?;
    let e = eigen_decomposition(b)?;
    let kappa = if e.hermitian {
        1.0
    } else {
        let sv = singular_values(&e.vectors)?;
        let min = sv[n - 1];
        if min == 0.0 { f64::INFINITY } else { sv[0] / min }
    };
    if !kappa.is_finite() || kappa > DEFECTIVE_CONDITION {
        return Err(Error::Defective { condition: kappa });
    }
    if delta.max_abs() == 0.0 {
        return Ok(BauerFikeReport {
            kappa,
            delta_spectral: 0.0,
            bound: 0.0,
            relative_bound: Some(0.0),
        });
    }
    let delta_spectral = spectral_norm(&delta)?;
    let relative_bound = match LuFactor::new(b) {
        Ok(lu) => {
            let mut cols = delta.clone();
            for c in 0..n {
                lu.solve_in_place(cols.column_mut(c))?;
            }
            let r = spectral_norm(&cols)?;
            r.is_finite().then_some(kappa * r)
        }
        Err(Error::Singular(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(BauerFikeReport {
        kappa,
        delta_spectral,
        bound: kappa * delta_spectral,
        relative_bound,
    })
}

/// Outcome of the diagonal-dominance test for positive definiteness of `B̃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdCheckReport {
    pub holds: bool,
    /// Position attaining the margin.
    pub worst_pair: Option<(usize, usize)>,
    /// `min sqrt(B(p,p) B(q,q)) / |T| - |B(p,q)|` over stored positions; diagonal
    /// positions contribute `B(p,p) / |T|`. `-inf` when a precondition fails.
    pub margin: f64,
    /// `|T|`, the number of selected cycles including the diagonal.
    pub divisor: usize,
    /// Why the test could not be applied.
    pub reason: Option<String>,
}

impl PdCheckReport {
    fn failed(reason: String, divisor: usize) -> Self {
        PdCheckReport {
            holds: false,
            worst_pair: None,
            margin: f64::NEG_INFINITY,
            divisor,
            reason: Some(reason),
        }
    }
}

/// Sufficient condition for `B̃` to be positive (semi)definite: a Hermitian selection
/// closed under `a -> n - a`, containing the diagonal, whose every stored entry
/// satisfies `|B(p,q)| <= sqrt(B(p,p) B(q,q)) / |T|`.
pub fn pd_sufficient_check(sparse: &SparseCycleMatrix) -> PdCheckReport {
    let sel = sparse.selection();
    let t = sel.len();
    let Some(diag) = sparse.cycle(0) else {
        return PdCheckReport::failed("diagonal cycle 0 not selected".into(), t);
    };
    if !sel.is_reflection_closed() {
        return PdCheckReport::failed("selection is not closed under k -> n - k".into(), t);
    }
    // Cycle 0 is stored in row order, so `diag[p] = B(p, p)`.
    let scale = sparse.cycles().iter().flat_map(|c| c.values()).map(|v| v.norm()).fold(0.0, f64::max);
    if let Some(p) = diag
        .values()
        .iter()
        .position(|v| !(v.re > 0.0) || v.im.abs() > 1e-12 * scale)
    {
        return PdCheckReport::failed(format!("diagonal entry {p} is not positive real"), t);
    }
    let dense = sparse.densify();
    if dense.hermitian_defect() > 1e-10 * scale {
        return PdCheckReport::failed("sparse matrix is not Hermitian".into(), t);
    }
    let d: Vec<f64> = diag.values().iter().map(|v| v.re).collect();
    let tf = t as f64;
    let mut margin = f64::INFINITY;
    let mut worst = None;
    for (r, c, v) in sparse.entries() {
        let m = if r == c {
            d[r] / tf
        } else {
            (d[r] * d[c]).sqrt() / tf - v.norm()
        };
        if m < margin {
            margin = m;
            worst = Some((r, c));
        }
    }
    PdCheckReport {
        holds: margin >= 0.0,
        worst_pair: worst,
        margin,
        divisor: t,
        reason: None,
    }
}
