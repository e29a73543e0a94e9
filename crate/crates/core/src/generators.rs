//! Test-matrix families: random Toeplitz, block-Toeplitz and quasi-periodic matrices,
//! the geometric Toeplitz system of [`gen_example1`], and Toeplitz matrices generated
//! by a symbol `a(e^{iθ}) = Σ a_k e^{ikθ}`.
//!
//! Randomness comes from `Pcg32` (PCG-XSH-RR, 64-bit state) seeded with
//! `seed_from_u64(spec.seed)`, and standard normals from the ziggurat sampler of
//! `rand_distr`. A spec therefore determines its matrix bit for bit within a build.
//!
//! Toeplitz matrices use `A(p, q) = a_{q - p}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_distr::weighted::WeightedIndex;
use rand_distr::StandardNormal;
use rand_pcg::Pcg32;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::decomposition::ToeplitzEntries;
use crate::error::{Error, Result};
use crate::fourier::dft_forward;
use crate::linalg::hermitian_eigenvalues;
use crate::matrix::ComplexMatrix;

/// Condition number targeted by the positive definite block-Toeplitz generator.
pub const DEFAULT_TARGET_CONDITION: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Toeplitz,
    BlockToeplitz,
    QuasiPeriodic,
    Example1,
    SymbolToeplitz,
}

/// A reproducible description of a generated matrix; the JSON form of `--spec` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredMatrixSpec {
    pub kind: MatrixKind,
    pub n: usize,
    /// Block size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Candidate diagonal periods.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub periods: Vec<usize>,
    /// Selection weights of `periods`; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub symmetric: bool,
    /// Shift a symmetric block-Toeplitz matrix to condition number `target_condition`.
    #[serde(default)]
    pub positive_definite: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_condition: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
}

impl StructuredMatrixSpec {
    fn base(kind: MatrixKind, n: usize) -> Self {
        StructuredMatrixSpec {
            kind,
            n,
            m: None,
            periods: Vec::new(),
            period_weights: None,
            symmetric: false,
            positive_definite: false,
            target_condition: None,
            seed: 0,
            symbol: None,
        }
    }

    pub fn toeplitz(n: usize, seed: u64) -> Self {
        Self::base(MatrixKind::Toeplitz, n).with_seed(seed)
    }

    pub fn block_toeplitz(n: usize, m: usize, seed: u64) -> Self {
        StructuredMatrixSpec {
            m: Some(m),
            ..Self::base(MatrixKind::BlockToeplitz, n).with_seed(seed)
        }
    }

    pub fn quasi_periodic(n: usize, periods: Vec<usize>, seed: u64) -> Self {
        StructuredMatrixSpec {
            periods,
            ..Self::base(MatrixKind::QuasiPeriodic, n).with_seed(seed)
        }
    }

    pub fn example1(n: usize) -> Self {
        Self::base(MatrixKind::Example1, n)
    }

    pub fn symbol_toeplitz(n: usize, symbol: SymbolSpec) -> Self {
        StructuredMatrixSpec {
            symbol: Some(symbol),
            ..Self::base(MatrixKind::SymbolToeplitz, n)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_symmetric(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn with_positive_definite(mut self, pd: bool) -> Self {
        self.positive_definite = pd;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        match self.kind {
            MatrixKind::BlockToeplitz => match self.m {
                None | Some(0) => return bad("block_toeplitz needs a positive block size m".into()),
                Some(m) if self.n % m != 0 => {
                    return bad(format!("block size {m} does not divide n = {}", self.n))
                }
                _ => {}
            },
            MatrixKind::QuasiPeriodic => {
                if self.periods.is_empty() || self.periods.contains(&0) {
                    return bad("quasi_periodic needs a nonempty list of positive periods".into());
                }
                if let Some(w) = &self.period_weights {
                    if w.len() != self.periods.len() {
                        return bad("period_weights must match periods in length".into());
                    }
                }
            }
            MatrixKind::SymbolToeplitz if self.symbol.is_none() => {
                return bad("symbol_toeplitz needs a symbol".into())
            }
            _ => {}
        }
        if self.positive_definite && !(self.kind == MatrixKind::BlockToeplitz && self.symmetric) {
            return bad("positive_definite is only supported for symmetric block_toeplitz".into());
        }
        if let Some(c) = self.target_condition {
            if !(c > 1.0) {
                return bad(format!("target_condition must exceed 1, got {c}"));
            }
        }
        Ok(())
    }

    fn rng(&self) -> Pcg32 {
        Pcg32::seed_from_u64(self.seed)
    }
}

/// Side information recorded while generating.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationNotes {
    /// `α` in `A + α I`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pd_shift: Option<f64>,
    /// Condition number after the shift.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_number: Option<f64>,
    /// Smallest `A(i,i) - Σ_{j≠i} |A(i,j)|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gershgorin_margin: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub matrix: ComplexMatrix,
    /// Right-hand side shipped with the family, if any.
    pub rhs: Option<Vec<Complex64>>,
    pub notes: GenerationNotes,
}

/// Dispatches on `spec.kind`.
pub fn generate(spec: &StructuredMatrixSpec) -> Result<Generated> {
    spec.validate()?;
    let plain = |matrix| Generated {
        matrix,
        rhs: None,
        notes: GenerationNotes::default(),
    };
    Ok(match spec.kind {
        MatrixKind::Toeplitz => plain(gen_toeplitz(spec)?),
        MatrixKind::QuasiPeriodic => plain(gen_quasi_periodic(spec)?),
        MatrixKind::SymbolToeplitz => plain(gen_symbol_toeplitz(spec.symbol.as_ref().expect("validated"), spec.n)?),
        MatrixKind::BlockToeplitz => {
            let (matrix, shift) = gen_block_toeplitz(spec)?;
            Generated {
                matrix,
                rhs: None,
                notes: GenerationNotes {
                    pd_shift: shift.map(|s| s.alpha),
                    condition_number: shift.map(|s| s.condition_number),
                    gershgorin_margin: None,
                },
            }
        }
        MatrixKind::Example1 => {
            let (matrix, rhs) = gen_example1(spec.n)?;
            Generated {
                matrix,
                rhs: Some(rhs),
                notes: GenerationNotes {
                    gershgorin_margin: Some(example1_gershgorin_margin(spec.n)),
                    ..Default::default()
                },
            }
        }
    })
}

fn normal(rng: &mut Pcg32) -> f64 {
    rng.sample(StandardNormal)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Random Toeplitz matrix with `N(0, 1)` entries.
///
/// Draws `a_0, …, a_{n-1}` and then, unless symmetric, `a_{-1}, …, a_{-(n-1)}`.
pub fn gen_toeplitz(spec: &StructuredMatrixSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = spec.rng();
    let upper: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let lower: Vec<f64> = if spec.symmetric {
        upper.clone()
    } else {
        std::iter::once(upper[0])
            .chain((1..n).map(|_| normal(&mut rng)))
            .collect()
    };
    let entries = ToeplitzEntries::from_fn(n, |d| {
        real(if d >= 0 { upper[d as usize] } else { lower[(-d) as usize] })
    })?;
    Ok(entries.to_matrix())
}

/// First row `2, -1/2, -1/4, …, -1/2^{n-1}`, symmetric, with right-hand side `(1, …, n)`.
pub fn gen_example1(n: usize) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let entries = ToeplitzEntries::from_fn(n, |d| {
        real(if d == 0 { 2.0 } else { -(0.5f64).powi(d.unsigned_abs() as i32) })
    })?;
    let rhs = (1..=n).map(|i| real(i as f64)).collect();
    Ok((entries.to_matrix(), rhs))
}

/// Row `i` has margin `2^{-i} + 2^{-(n-1-i)}`; the middle row attains the minimum.
fn example1_gershgorin_margin(n: usize) -> f64 {
    (0..n)
        .map(|i| 0.5f64.powi(i as i32) + 0.5f64.powi((n - 1 - i) as i32))
        .fold(f64::INFINITY, f64::min)
}

/// The diagonal shift applied by the positive definite block-Toeplitz generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdShift {
    pub alpha: f64,
    pub condition_number: f64,
}

/// Block-Toeplitz matrix with `m x m` blocks of `N(0, 1)` entries.
///
/// Blocks `A_0, …, A_{M-1}` and then `A_{-1}, …, A_{-(M-1)}` are drawn in row-major
/// order, `M = n / m`. When symmetric, every block is symmetric (upper triangle drawn)
/// and `A_{-j} = A_j`. With `positive_definite` the result is shifted by `α I` so that
/// its condition number equals the target (default `1e4`).
pub fn gen_block_toeplitz(spec: &StructuredMatrixSpec) -> Result<(ComplexMatrix, Option<PdShift>)> {
    spec.validate()?;
    if spec.kind != MatrixKind::BlockToeplitz {
        return Err(Error::InvalidSpec("expected kind block_toeplitz".into()));
    }
    let n = spec.n;
    let m = spec.m.expect("validated");
    let count = n / m;
    let mut rng = spec.rng();
    let draw_block = |rng: &mut Pcg32| -> Vec<f64> {
        let mut b = vec![0.0; m * m];
        for r in 0..m {
            for c in 0..m {
                if spec.symmetric && c < r {
                    b[r * m + c] = b[c * m + r];
                } else {
                    b[r * m + c] = normal(rng);
                }
            }
        }
        b
    };
    let upper: Vec<Vec<f64>> = (0..count).map(|_| draw_block(&mut rng)).collect();
    let lower: Vec<Vec<f64>> = if spec.symmetric {
        upper.clone()
    } else {
        std::iter::once(upper[0].clone())
            .chain((1..count).map(|_| draw_block(&mut rng)))
            .collect()
    };
    let mut a = ComplexMatrix::from_fn(n, n, |p, q| {
        let (bp, bq) = (p / m, q / m);
        let blk = if bq >= bp { &upper[bq - bp] } else { &lower[bp - bq] };
        real(blk[(p % m) * m + q % m])
    });
    if !spec.positive_definite {
        return Ok((a, None));
    }
    let target = spec.target_condition.unwrap_or(DEFAULT_TARGET_CONDITION);
    let ev = hermitian_eigenvalues(&a)?;
    let (lo, hi) = (ev[0], ev[n - 1]);
    if hi <= lo {
        return Err(Error::InvalidSpec("matrix is a multiple of the identity".into()));
    }
    let alpha = (hi - target * lo) / (target - 1.0);
    for i in 0..n {
        a[(i, i)] += alpha;
    }
    Ok((
        a,
        Some(PdShift {
            alpha,
            condition_number: (hi + alpha) / (lo + alpha),
        }),
    ))
}

/// Every one of the `2n - 1` diagonals gets a period drawn from `spec.periods` and that
/// many `N(0, 1)` values, tiled from the head of the diagonal.
///
/// Diagonals are visited as `0, 1, …, n-1, -1, …, -(n-1)`; with `symmetric` only the
/// first `n` are drawn and mirrored.
pub fn gen_quasi_periodic(spec: &StructuredMatrixSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    if spec.kind != MatrixKind::QuasiPeriodic {
        return Err(Error::InvalidSpec("expected kind quasi_periodic".into()));
    }
    let n = spec.n;
    let weights = spec
        .period_weights
        .clone()
        .unwrap_or_else(|| vec![1.0; spec.periods.len()]);
    let picker = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidSpec(format!("bad period weights: {e}")))?;
    let mut rng = spec.rng();
    let draw = |rng: &mut Pcg32| -> Vec<f64> {
        let p = spec.periods[rng.sample(&picker)];
        (0..p).map(|_| normal(rng)).collect()
    };
    let upper: Vec<Vec<f64>> = (0..n).map(|_| draw(&mut rng)).collect();
    let lower: Vec<Vec<f64>> = if spec.symmetric {
        upper.clone()
    } else {
        std::iter::once(upper[0].clone())
            .chain((1..n).map(|_| draw(&mut rng)))
            .collect()
    };
    Ok(ComplexMatrix::from_fn(n, n, |p, q| {
        // position along the diagonal, counted from its head
        let (pattern, t) = if q >= p { (&upper[q - p], p) } else { (&lower[p - q], q) };
        real(pattern[t % pattern.len()])
    }))
}

/// A symbol `a(e^{iθ})`.
///
/// `poly` lists coefficients of a polynomial in `θ` (constant first) and `trig` lists
/// `(k, a_k)` terms of `Σ a_k e^{ikθ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    /// `poly(θ) · trig(θ)`.
    Product {
        poly: Vec<Complex64>,
        trig: Vec<(i32, Complex64)>,
        /// Largest `|k|` kept from the Fourier series; `n - 1` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncation: Option<usize>,
        /// Quadrature points; the smallest power of two `>= 16 n` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    /// `poly(θ) + trig(θ)`.
    Sum {
        poly: Vec<Complex64>,
        trig: Vec<(i32, Complex64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncation: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    /// A trigonometric polynomial with the listed Fourier coefficients.
    Banded { coefficients: Vec<(i32, Complex64)> },
}

fn horner(poly: &[Complex64], x: f64) -> Complex64 {
    poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn trig(terms: &[(i32, Complex64)], theta: f64) -> Complex64 {
    terms
        .iter()
        .map(|&(k, a)| a * Complex64::from_polar(1.0, k as f64 * theta))
        .sum()
}

impl SymbolSpec {
    /// `(1 + θ) e^{iθ}`.
    pub fn case1() -> Self {
        SymbolSpec::Product {
            poly: vec![real(1.0), real(1.0)],
            trig: vec![(1, real(1.0))],
            truncation: None,
            resolution: None,
        }
    }

    /// `θ / 2π + i (θ - π)² / π² + e^{2iθ}`.
    pub fn case3() -> Self {
        let i = Complex64::new(0.0, 1.0);
        SymbolSpec::Sum {
            poly: vec![i, real(0.5 / PI) - i * (2.0 / PI), i / (PI * PI)],
            trig: vec![(2, real(1.0))],
            truncation: None,
            resolution: None,
        }
    }

    pub fn banded(coefficients: Vec<(i32, Complex64)>) -> Self {
        SymbolSpec::Banded { coefficients }
    }

    /// Evaluation without the range check, so that `θ = 2π` is allowed.
    fn value(&self, theta: f64) -> Complex64 {
        match self {
            SymbolSpec::Product { poly, trig: t, .. } => horner(poly, theta) * trig(t, theta),
            SymbolSpec::Sum { poly, trig: t, .. } => horner(poly, theta) + trig(t, theta),
            SymbolSpec::Banded { coefficients } => trig(coefficients, theta),
        }
    }

    /// Fourier coefficients `a_{-order}, …, a_{order}`.
    ///
    /// Banded symbols return their coefficients exactly. Other forms use the trapezoidal
    /// rule on `[0, 2π]` with `resolution` intervals, evaluated by one FFT.
    pub fn fourier_coefficients(&self, order: usize, resolution: usize) -> Result<Vec<Complex64>> {
        let len = 2 * order + 1;
        if let SymbolSpec::Banded { coefficients } = self {
            let mut out = vec![Complex64::new(0.0, 0.0); len];
            for &(k, a) in coefficients {
                if k.unsigned_abs() as usize <= order {
                    out[(k as isize + order as isize) as usize] += a;
                }
            }
            return Ok(out);
        }
        if resolution <= 2 * order {
            return Err(Error::InvalidArgument(format!(
                "resolution {resolution} cannot resolve order {order}"
            )));
        }
        let m = resolution;
        let h = 2.0 * PI / m as f64;
        let mut samples: Vec<Complex64> = (0..m).map(|j| self.value(j as f64 * h)).collect();
        let endpoint = 0.5 * (self.value(2.0 * PI) - samples[0]);
        FftPlanner::new().plan_fft_forward(m).process(&mut samples);
        let scale = 1.0 / m as f64;
        Ok((0..len)
            .map(|i| {
                let k = i as isize - order as isize;
                (samples[k.rem_euclid(m as isize) as usize] + endpoint) * scale
            })
            .collect())
    }
}

/// `a(e^{iθ})` for `θ` in `[0, 2π)`.
pub fn eval_symbol(sym: &SymbolSpec, theta: f64) -> Result<Complex64> {
    if !(0.0..2.0 * PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside [0, 2π)")));
    }
    Ok(sym.value(theta))
}

/// Default quadrature size for dimension `n`.
pub fn default_resolution(n: usize) -> usize {
    (16 * n).next_power_of_two()
}

/// The `n x n` Toeplitz matrix `A(p, q) = a_{q - p}` of a symbol.
pub fn gen_symbol_toeplitz(sym: &SymbolSpec, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let (truncation, resolution) = match sym {
        SymbolSpec::Product { truncation, resolution, .. } | SymbolSpec::Sum { truncation, resolution, .. } => {
            (*truncation, *resolution)
        }
        SymbolSpec::Banded { .. } => (None, None),
    };
    let order = truncation.unwrap_or(n - 1);
    if order > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "truncation {order} exceeds n - 1 = {}",
            n - 1
        )));
    }
    let coeffs = sym.fourier_coefficients(n - 1, resolution.unwrap_or_else(|| default_resolution(n)))?;
    let entries = ToeplitzEntries::from_fn(n, |d| {
        if d.unsigned_abs() <= order {
            coeffs[(d + n as isize - 1) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    Ok(entries.to_matrix())
}

/// Diagonal of `W A W†` for the banded Toeplitz matrix with first row `a_0..a_l` and
/// first column `a_0..a_{-m}`: the positive-kernel DFT of
/// `(a_0, (n-1)/n a_1, …, (n-l)/n a_l, 0, …, 0, (n-m)/n a_{-m}, …, (n-1)/n a_{-1})`.
pub fn banded_diag_sequence(first_row: &[Complex64], first_col: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if first_row.is_empty() || first_col.is_empty() {
        return Err(Error::InvalidArgument("band needs at least a_0".into()));
    }
    if first_row[0] != first_col[0] {
        return Err(Error::InvalidArgument("first row and column disagree on a_0".into()));
    }
    let (l, m) = (first_row.len() - 1, first_col.len() - 1);
    if l + m > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "band of width {} does not fit in dimension {n}",
            l + m + 1
        )));
    }
    let w = |d: usize| (n - d) as f64 / n as f64;
    let mut seq = vec![Complex64::new(0.0, 0.0); n];
    seq[0] = first_row[0];
    for d in 1..=l {
        seq[d] = first_row[d] * w(d);
    }
    for d in 1..=m {
        seq[n - d] = first_col[d] * w(d);
    }
    dft_forward(&seq)
}
