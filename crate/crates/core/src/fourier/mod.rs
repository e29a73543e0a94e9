//! Discrete Fourier transforms and the similarity transform `B = W A W†`.
//!
//! Sign conventions: [`dft`] in the [`Direction::Forward`] direction uses the
//! positive-exponent kernel `X(k) = Σ x(p) exp(+i 2π p k / n)`. The Fourier matrix
//! `W` uses the conjugate kernel with `1/sqrt(n)` scaling. Applying `W` to a column is
//! therefore an *inverse*-direction DFT divided by `sqrt(n)`.
//!
//! `B = W A W†` is computed as a column pass with the negative kernel followed by a
//! row pass with the positive kernel, scaled by `1/n`. [`extract_cycles`] keeps the
//! full column pass and prunes the row pass down to the outputs lying on the selected
//! cycles.

mod pruned;

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

pub use pruned::{PrunedFft, PrunedScratch};

use crate::error::{Error, Result};
use crate::matrix::{apply_cycle_mask, cycle_slot, ComplexMatrix, DiagonalVector};
use crate::sparse::SparseCycleMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Positive exponent kernel.
    Forward,
    /// Negative exponent kernel.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    /// Divide by `n`.
    OverN,
    /// Divide by `sqrt(n)`.
    OverSqrtN,
}

impl Normalization {
    fn factor(self, n: usize) -> f64 {
        match self {
            Normalization::None => 1.0,
            Normalization::OverN => 1.0 / n as f64,
            Normalization::OverSqrtN => 1.0 / (n as f64).sqrt(),
        }
    }
}

/// A reusable DFT of fixed length, direction and normalization.
#[derive(Clone)]
pub struct DftPlan {
    n: usize,
    direction: Direction,
    normalization: Normalization,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan")
            .field("n", &self.n)
            .field("direction", &self.direction)
            .field("normalization", &self.normalization)
            .finish()
    }
}

impl DftPlan {
    pub fn new(n: usize, direction: Direction, normalization: Normalization) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut planner = FftPlanner::new();
        let fft = match direction {
            Direction::Forward => planner.plan_fft_inverse(n),
            Direction::Inverse => planner.plan_fft_forward(n),
        };
        Ok(DftPlan {
            n,
            direction,
            normalization,
            fft,
        })
    }

    /// Forward, unnormalized.
    pub fn forward(n: usize) -> Result<Self> {
        Self::new(n, Direction::Forward, Normalization::None)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// In-place transform of a buffer of exactly `n` values.
    pub fn process(&self, buf: &mut [Complex64]) -> Result<()> {
        if buf.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: buf.len(),
            });
        }
        self.fft.process(buf);
        let s = self.normalization.factor(self.n);
        if s != 1.0 {
            buf.iter_mut().for_each(|v| *v *= s);
        }
        Ok(())
    }
}

/// Transforms `x` according to `plan`.
pub fn dft(x: &[Complex64], plan: &DftPlan) -> Result<Vec<Complex64>> {
    let mut buf = x.to_vec();
    plan.process(&mut buf)?;
    Ok(buf)
}

/// Positive-kernel, unnormalized DFT of `x`.
pub fn dft_forward(x: &[Complex64]) -> Result<Vec<Complex64>> {
    dft(x, &DftPlan::forward(x.len())?)
}

/// A set of cycle (or frequency) indices for dimension `n`, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleSelection {
    n: usize,
    indices: Vec<usize>,
}

impl CycleSelection {
    /// Accepts indices in any order; rejects duplicates and out-of-range values.
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if let Some(&k) = indices.iter().find(|&&k| k >= n) {
            return Err(Error::CycleOutOfRange { k, n });
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSelection(format!(
                "duplicate indices in {indices:?}"
            )));
        }
        Ok(CycleSelection { n, indices })
    }

    pub fn all(n: usize) -> Self {
        CycleSelection {
            n,
            indices: (0..n).collect(),
        }
    }

    pub fn single(n: usize, k: usize) -> Result<Self> {
        Self::new(n, [k])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.binary_search(&k).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// Maps every `a` to `n - a`, keeping `0`.
    pub fn reflect(&self) -> Self {
        let mut indices: Vec<usize> = self.indices.iter().map(|&a| (self.n - a) % self.n).collect();
        indices.sort_unstable();
        CycleSelection { n: self.n, indices }
    }

    /// True when the set is closed under [`reflect`](Self::reflect).
    pub fn is_reflection_closed(&self) -> bool {
        self.indices.iter().all(|&a| self.contains((self.n - a) % self.n))
    }

    pub fn complement(&self) -> Self {
        CycleSelection {
            n: self.n,
            indices: (0..self.n).filter(|&k| !self.contains(k)).collect(),
        }
    }
}

/// Operation counts gathered by [`extract_cycles_counted`].
#[derive(Debug, Default)]
pub struct OpCounter {
    combines: AtomicU64,
    modulations: AtomicU64,
    vectors: AtomicU64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Butterfly combines (one complex multiply and add each) in the pruned pass.
    pub fn combines(&self) -> u64 {
        self.combines.load(Ordering::Relaxed)
    }

    /// Complex multiplies spent shifting rows onto a common output set.
    pub fn modulations(&self) -> u64 {
        self.modulations.load(Ordering::Relaxed)
    }

    /// Number of row vectors pushed through the pruned pass.
    pub fn vectors(&self) -> u64 {
        self.vectors.load(Ordering::Relaxed)
    }

    /// Combines plus modulations, averaged over vectors.
    pub fn ops_per_vector(&self) -> f64 {
        let v = self.vectors();
        if v == 0 {
            0.0
        } else {
            (self.combines() + self.modulations()) as f64 / v as f64
        }
    }

    fn record(&self, combines: u64, modulations: u64) {
        self.combines.fetch_add(combines, Ordering::Relaxed);
        self.modulations.fetch_add(modulations, Ordering::Relaxed);
        self.vectors.fetch_add(1, Ordering::Relaxed);
    }
}

fn transpose_square(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(c, col)| {
        for (r, v) in col.iter_mut().enumerate() {
            *v = data[r * n + c];
        }
    });
    out
}

fn fft_columns(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(n).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, col| fft.process_with_scratch(col, scratch),
    );
}

/// Column pass with `col_fft`, row pass with `row_fft`, scaled by `1/n`.
fn two_pass(
    a: &ComplexMatrix,
    col_fft: &Arc<dyn Fft<f64>>,
    row_fft: &Arc<dyn Fft<f64>>,
) -> ComplexMatrix {
    let n = a.nrows();
    let mut data = a.as_slice().to_vec();
    fft_columns(&mut data, n, col_fft);
    let mut t = transpose_square(&data, n);
    fft_columns(&mut t, n, row_fft);
    let mut out = transpose_square(&t, n);
    let s = 1.0 / n as f64;
    out.par_iter_mut().for_each(|v| *v *= s);
    ComplexMatrix::from_column_major(n, n, out).expect("square buffer")
}

/// `B = W A W†`, via two passes of column FFTs.
pub fn similarity_transform(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim()?;
    let mut planner = FftPlanner::new();
    let neg = planner.plan_fft_forward(n);
    let pos = planner.plan_fft_inverse(n);
    Ok(two_pass(a, &neg, &pos))
}

/// `A = W† B W`, the exact inverse of [`similarity_transform`].
pub fn inverse_similarity_transform(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = b.dim()?;
    let mut planner = FftPlanner::new();
    let neg = planner.plan_fft_forward(n);
    let pos = planner.plan_fft_inverse(n);
    Ok(two_pass(b, &pos, &neg))
}

/// The selected cycles of `W A W†`.
///
/// For power-of-two `n` only the outputs lying on the selected cycles are computed in
/// the row pass. Other lengths fall back to the full transform followed by masking.
pub fn extract_cycles(a: &ComplexMatrix, sel: &CycleSelection) -> Result<SparseCycleMatrix> {
    extract_cycles_counted(a, sel, None)
}

/// [`extract_cycles`] with optional operation counting of the pruned pass.
pub fn extract_cycles_counted(
    a: &ComplexMatrix,
    sel: &CycleSelection,
    counter: Option<&OpCounter>,
) -> Result<SparseCycleMatrix> {
    let n = a.dim()?;
    if sel.dim() != n {
        return Err(Error::InvalidSelection(format!(
            "selection is for dimension {}, matrix is {n}",
            sel.dim()
        )));
    }
    if !n.is_power_of_two() {
        let b = similarity_transform(a)?;
        let cycles = sel
            .iter()
            .map(|k| apply_cycle_mask(&b, k))
            .collect::<Result<Vec<_>>>()?;
        return SparseCycleMatrix::new(sel.clone(), cycles);
    }

    // Column pass: X = F_-(A), then rows of X made contiguous.
    let mut data = a.as_slice().to_vec();
    let neg = FftPlanner::new().plan_fft_forward(n);
    fft_columns(&mut data, n, &neg);
    let rows = transpose_square(&data, n);

    // Row p needs B(p, p - k) = (1/n) Σ_r X(p, r) e^{+i2π(p-k)r/n}. Modulating the row by
    // e^{+i2πpr/n} turns every row's request into the same outputs {-k mod n}.
    let outputs: Vec<usize> = sel.iter().map(|k| (n - k) % n).collect();
    let plan = PrunedFft::new(n, &outputs, 1.0)?;
    let roots: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64))
        .collect();
    let scale = 1.0 / n as f64;

    let per_row: Vec<Vec<Complex64>> = rows
        .par_chunks(n)
        .enumerate()
        .map_init(
            || (PrunedScratch::default(), vec![Complex64::default(); n]),
            |(scratch, buf), (p, row)| {
                for (r, (b, &x)) in buf.iter_mut().zip(row).enumerate() {
                    *b = x * roots[(p * r) % n];
                }
                let mut out = vec![Complex64::default(); outputs.len()];
                let ops = plan.process(buf, &mut out, scratch).expect("sized buffers");
                if let Some(c) = counter {
                    c.record(ops, n as u64);
                }
                out.iter_mut().for_each(|v| *v *= scale);
                out
            },
        )
        .collect();

    let mut cycles: Vec<DiagonalVector> = sel.iter().map(|_| DiagonalVector::zeros(n)).collect();
    for (p, values) in per_row.into_iter().enumerate() {
        for ((cycle, k), v) in cycles.iter_mut().zip(sel.iter()).zip(values) {
            let q = (p + n - k) % n;
            let (_, t) = cycle_slot(n, p, q);
            cycle.values_mut()[t] = v;
        }
    }
    SparseCycleMatrix::new(sel.clone(), cycles)
}
