//! Cycle and circulant decompositions, weights, partial energies and the Toeplitz
//! closed forms.
//!
//! Every square `A` splits two ways:
//!
//! * into cycles, `A = Σ_k Λ_k C^k` ([`cycle_decompose`]), a pure permutation of entries;
//! * into circulant components, `A = Σ_k R_k D_k` ([`circulant_decompose_recursive`],
//!   [`circulant_decompose_via_transform`]), which are mutually orthogonal in the
//!   Frobenius inner product.
//!
//! The two are linked by `B = W A W†`: cycle `k` of `B` is the image of `R_k D_k`.
//!
//! Toeplitz entries use `A(p, q) = a_{q - p}`, so the first row is `a_0, …, a_{n-1}`
//! and the first column is `a_0, a_{-1}, …, a_{-(n-1)}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{dft, dft_forward, similarity_transform, CycleSelection, DftPlan, Direction, Normalization};
use crate::matrix::{
    apply_cycle_mask, cycle_row_ordered, frobenius_inner, place_cycle, relaxation_diagonal,
    ComplexMatrix, DiagonalVector,
};

/// Tolerance of the internal dominance cross-check.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// `A = Σ_k Λ_k C^k`, one [`DiagonalVector`] per cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    n: usize,
    cycles: Vec<DiagonalVector>,
}

impl CycleDecomposition {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[DiagonalVector] {
        &self.cycles
    }

    pub fn cycle(&self, k: usize) -> Option<&DiagonalVector> {
        self.cycles.get(k)
    }

    /// Squared 2-norm of every cycle.
    pub fn norms_sqr(&self) -> Vec<f64> {
        self.cycles.iter().map(DiagonalVector::norm_sqr).collect()
    }

    /// Places every cycle back; bit-exact inverse of [`cycle_decompose`].
    pub fn recompose(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for (k, c) in self.cycles.iter().enumerate() {
            place_cycle(&mut m, k, c.values()).expect("cycle lengths match");
        }
        m
    }
}

pub fn cycle_decompose(a: &ComplexMatrix) -> Result<CycleDecomposition> {
    let n = a.dim()?;
    let cycles = (0..n)
        .map(|k| apply_cycle_mask(a, k))
        .collect::<Result<_>>()?;
    Ok(CycleDecomposition { n, cycles })
}

/// The term `R_k D_k`: a circulant given by its first row, times the relaxation `D_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantComponent {
    pub k: usize,
    pub first_row: Vec<Complex64>,
}

impl CirculantComponent {
    pub fn dim(&self) -> usize {
        self.first_row.len()
    }

    /// The circulant `R_k` alone.
    pub fn circulant(&self) -> ComplexMatrix {
        ComplexMatrix::circulant(&self.first_row)
    }

    /// The product `R_k D_k`.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let d = relaxation_diagonal(self.dim(), self.k)?;
        self.circulant().scale_columns(d.values())
    }

    /// `‖R_k D_k‖_F = sqrt(n) ‖first_row‖`.
    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self.first_row.iter().map(Complex64::norm_sqr).sum();
        (s * self.dim() as f64).sqrt()
    }
}

/// Circulant components by repeated averaging:
/// `R_k(0, j) = mean_p A_k(p, p + j)` and `A_{k+1} = (A_k - R_k) D_{n-1}`.
pub fn circulant_decompose_recursive(a: &ComplexMatrix) -> Result<Vec<CirculantComponent>> {
    let n = a.dim()?;
    let shift = relaxation_diagonal(n, n - 1)?;
    let inv_n = 1.0 / n as f64;
    let mut residual = a.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let first_row: Vec<Complex64> = (0..n)
            .map(|j| (0..n).map(|p| residual[(p, (p + j) % n)]).sum::<Complex64>() * inv_n)
            .collect();
        for q in 0..n {
            for p in 0..n {
                let r = first_row[(q + n - p) % n];
                residual[(p, q)] = (residual[(p, q)] - r) * shift[q];
            }
        }
        out.push(CirculantComponent { k, first_row });
    }
    Ok(out)
}

/// Circulant components from the cycles of `W A W†`:
/// `R_k(0, j) = (1/n) Σ_p B(p, p - k) exp(-i 2π p j / n)`.
pub fn circulant_decompose_via_transform(a: &ComplexMatrix) -> Result<Vec<CirculantComponent>> {
    let n = a.dim()?;
    let b = similarity_transform(a)?;
    let plan = DftPlan::new(n, Direction::Inverse, Normalization::OverN)?;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let cycle = apply_cycle_mask(&b, k)?;
            let first_row = dft(&cycle_row_ordered(cycle.values(), k), &plan)?;
            Ok(CirculantComponent { k, first_row })
        })
        .collect()
}

/// `Σ_k R_k D_k`. An empty list yields the zero matrix.
pub fn recompose(components: &[CirculantComponent], n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for c in components {
        if c.dim() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: c.dim(),
            });
        }
        out = &out + &c.to_matrix()?;
    }
    Ok(out)
}

/// Largest normalized cross inner product `|<R_i D_i, R_j D_j>| / (‖R_i D_i‖ ‖R_j D_j‖ + ε)`
/// over distinct pairs, with `ε = 1e-300`.
pub fn orthogonality_check(components: &[CirculantComponent]) -> Result<f64> {
    if components.len() < 2 {
        return Err(Error::InvalidArgument(
            "orthogonality needs at least two components".into(),
        ));
    }
    let mats = components
        .iter()
        .map(CirculantComponent::to_matrix)
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = mats.iter().map(ComplexMatrix::frobenius_norm).collect();
    let pairs: Vec<(usize, usize)> = (0..mats.len())
        .flat_map(|i| (i + 1..mats.len()).map(move |j| (i, j)))
        .collect();
    let worst = pairs
        .par_iter()
        .map(|&(i, j)| {
            frobenius_inner(&mats[i], &mats[j])
                .map(|ip| ip.norm() / (norms[i] * norms[j] + 1e-300))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(worst)
}

/// `w_i = ‖Λ_i‖² / ‖B‖_F²` over the cycles of `b`.
///
/// Meant for `B = W A W†`, where `w_i` is the weight of `R_i D_i` in `A`, but defined
/// for any nonzero square matrix.
pub fn cycle_weights(b: &ComplexMatrix) -> Result<Vec<f64>> {
    let total = b.frobenius_norm_sqr();
    if total == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(cycle_decompose(b)?
        .norms_sqr()
        .into_iter()
        .map(|x| x / total)
        .collect())
}

/// Fraction of the DFT energy of `cycle` lying on the frequencies in `freq_set`.
pub fn partial_energy(cycle: &DiagonalVector, freq_set: &CycleSelection) -> Result<f64> {
    if freq_set.dim() != cycle.len() {
        return Err(Error::LengthMismatch {
            expected: cycle.len(),
            actual: freq_set.dim(),
        });
    }
    let gamma = dft_forward(cycle.values())?;
    let total: f64 = gamma.iter().map(Complex64::norm_sqr).sum();
    if total == 0.0 {
        return Err(Error::ZeroCycle);
    }
    let part: f64 = freq_set.iter().map(|j| gamma[j].norm_sqr()).sum();
    Ok(part / total)
}

/// `a -> n - a`, fixing `0`.
pub fn index_reflect(set: &CycleSelection) -> CycleSelection {
    set.reflect()
}

/// Weights, energies and relative magnitude for one frequency set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    /// `w_i` of every cycle of `A`.
    pub weights: Vec<f64>,
    /// `E_i` of every cycle of `A` over the frequency set; `0` for empty cycles.
    pub partial_energies: Vec<f64>,
    /// `s`, measured on the reflected cycles of `W A W†`.
    pub relative_magnitude: f64,
    /// `Σ w_i E_i`.
    pub weighted_sum: f64,
    pub frequency_set: CycleSelection,
    pub cycle_set: CycleSelection,
}

/// Measures `s` on `B = W A W†` and checks it against `Σ w_i E_i`.
pub fn dominance_relation(a: &ComplexMatrix, freq_set: &CycleSelection) -> Result<DominanceReport> {
    let n = a.dim()?;
    if freq_set.dim() != n {
        return Err(Error::InvalidSelection(format!(
            "frequency set is for dimension {}, matrix is {n}",
            freq_set.dim()
        )));
    }
    let total = a.frobenius_norm_sqr();
    if total == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let cycles = cycle_decompose(a)?;
    let weights: Vec<f64> = cycles.norms_sqr().iter().map(|x| x / total).collect();
    let partial_energies = cycles
        .cycles()
        .par_iter()
        .map(|c| match partial_energy(c, freq_set) {
            Err(Error::ZeroCycle) => Ok(0.0),
            other => other,
        })
        .collect::<Result<Vec<f64>>>()?;
    let weighted_sum: f64 = weights.iter().zip(&partial_energies).map(|(w, e)| w * e).sum();

    let b = similarity_transform(a)?;
    let cycle_set = index_reflect(freq_set);
    let captured: f64 = cycle_set
        .iter()
        .map(|j| apply_cycle_mask(&b, j).map(|c| c.norm_sqr()))
        .sum::<Result<f64>>()?;
    let relative_magnitude = captured / b.frobenius_norm_sqr();

    if (relative_magnitude - weighted_sum).abs() > DOMINANCE_TOLERANCE {
        return Err(Error::DominanceMismatch {
            direct: relative_magnitude,
            weighted: weighted_sum,
        });
    }
    Ok(DominanceReport {
        weights,
        partial_energies,
        relative_magnitude,
        weighted_sum,
        frequency_set: freq_set.clone(),
        cycle_set,
    })
}

/// Entries `a_{-(n-1)}, …, a_{n-1}` of an `n x n` Toeplitz matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzEntries {
    n: usize,
    values: Vec<Complex64>,
}

impl ToeplitzEntries {
    /// `values` lists `a_{-(n-1)}` first and `a_{n-1}` last.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() || values.len() % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "Toeplitz entries need an odd, positive count, got {}",
                values.len()
            )));
        }
        Ok(ToeplitzEntries {
            n: values.len().div_ceil(2),
            values,
        })
    }

    /// From `a(d)` for every offset `d` in `-(n-1)..=n-1`.
    pub fn from_fn(n: usize, mut f: impl FnMut(isize) -> Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let m = n as isize;
        Self::new((-(m - 1)..m).map(&mut f).collect())
    }

    /// From the first row `a_0..a_{n-1}` and first column `a_0, a_{-1}, …`.
    pub fn from_row_col(row: &[Complex64], col: &[Complex64]) -> Result<Self> {
        if row.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if row.len() != col.len() {
            return Err(Error::LengthMismatch {
                expected: row.len(),
                actual: col.len(),
            });
        }
        Self::from_fn(row.len(), |d| {
            if d >= 0 {
                row[d as usize]
            } else {
                col[(-d) as usize]
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `a_d` for `|d| < n`.
    pub fn get(&self, d: isize) -> Complex64 {
        self.values[(d + self.n as isize - 1) as usize]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |p, q| self.get(q as isize - p as isize))
    }

    /// `Σ_d (n - |d|) |a_d|²`.
    pub fn frobenius_norm_sqr(&self) -> f64 {
        let n = self.n as isize;
        (-(n - 1)..n)
            .map(|d| (n - d.abs()) as f64 * self.get(d).norm_sqr())
            .sum()
    }
}

/// Weight of cycle 0 of `W A W†` for Toeplitz `A`:
/// `Σ_i |(n - i) a_{-i} + i a_{n-i}|² / (n ‖A‖_F²)`.
pub fn toeplitz_s0(entries: &ToeplitzEntries) -> Result<f64> {
    let n = entries.dim();
    let norm = entries.frobenius_norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let sum: f64 = (0..n)
        .map(|i| {
            let lower = entries.get(-(i as isize)) * (n - i) as f64;
            let upper = if i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                entries.get((n - i) as isize) * i as f64
            };
            (lower + upper).norm_sqr()
        })
        .sum();
    Ok(sum / (n as f64 * norm))
}

/// Dirichlet ratio `|sin(π m k / n) / sin(π k / n)|²`, continuous at removable zeros.
fn dirichlet_sqr(m: usize, k: usize, n: usize) -> f64 {
    let x = std::f64::consts::PI * k as f64 / n as f64;
    let den = x.sin();
    if den.abs() < 1e-12 {
        return (m * m) as f64;
    }
    let r = (m as f64 * x).sin() / den;
    r * r
}

/// `E^k_i`, the energy of cycle `i` of Toeplitz `A` at frequency `k`:
/// `|a_{-i} - a_{n-i}|² / (n((n-i)|a_{-i}|² + i|a_{n-i}|²)) · |sin(π(n-i)k/n) / sin(πk/n)|²`.
pub fn toeplitz_partial_energy(entries: &ToeplitzEntries, i: usize, k: usize) -> Result<f64> {
    let n = entries.dim();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "frequency {k} outside 1..{n}"
        )));
    }
    if i == 0 || i >= n {
        return Err(Error::CycleOutOfRange { k: i, n });
    }
    let lo = entries.get(-(i as isize));
    let hi = entries.get((n - i) as isize);
    let den = n as f64 * ((n - i) as f64 * lo.norm_sqr() + i as f64 * hi.norm_sqr());
    if den == 0.0 {
        return Err(Error::ZeroCycle);
    }
    Ok((lo - hi).norm_sqr() / den * dirichlet_sqr(n - i, k, n))
}

/// Frequencies `S_m = {j n / m}` and cycles `T_m = reflect(S_m)` of interest for
/// block size `m`, both sorted.
pub fn block_toeplitz_frequency_sets(n: usize, m: usize) -> Result<(CycleSelection, CycleSelection)> {
    if n == 0 || m == 0 {
        return Err(Error::ZeroDimension);
    }
    if n % m != 0 {
        return Err(Error::InvalidArgument(format!(
            "block size {m} does not divide {n}"
        )));
    }
    let s = CycleSelection::new(n, (0..m).map(|j| j * (n / m)))?;
    let t = s.reflect();
    Ok((s, t))
}
