//! Output-pruned radix-2 decimation-in-time FFT.
//!
//! A size-`L` sub-transform of the DIT recursion only has to produce the outputs
//! `k mod L` for the requested `k`. Working bottom-up, a stage of length `L` evaluates
//! `n / L` sub-transforms, each at `|{k mod L}|` points, with one twiddle multiply and
//! one add per point. Once `L` is at most the number of requested outputs every point
//! is needed and the stage costs `n`, so the total is about `(n - k) + n log2 k`
//! combines for `k` outputs.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Stage {
    len: usize,
    /// `k mod len` for the requested outputs, sorted and deduplicated.
    needed: Vec<usize>,
    /// Position of `k mod len/2` in the previous stage's `needed`.
    src: Vec<usize>,
    twiddle: Vec<Complex64>,
}

/// Plan computing a fixed subset of outputs of `X(k) = Σ x(r) exp(sign · i 2π r k / n)`.
#[derive(Debug, Clone)]
pub struct PrunedFft {
    n: usize,
    outputs: Vec<usize>,
    /// For each entry of `outputs`, its position in the final stage.
    output_slot: Vec<usize>,
    stages: Vec<Stage>,
}

/// Reusable buffers for [`PrunedFft::process`].
#[derive(Debug, Default)]
pub struct PrunedScratch {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl PrunedFft {
    /// `n` must be a power of two; `outputs` may be in any order and must be `< n`.
    /// `sign` is `+1.0` for the positive-exponent kernel, `-1.0` otherwise.
    pub fn new(n: usize, outputs: &[usize], sign: f64) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "pruned FFT needs a power-of-two length, got {n}"
            )));
        }
        if let Some(&k) = outputs.iter().find(|&&k| k >= n) {
            return Err(Error::CycleOutOfRange { k, n });
        }
        let mut stages = Vec::new();
        let mut prev_needed = vec![0usize];
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let mut needed: Vec<usize> = outputs.iter().map(|&k| k % len).collect();
            needed.sort_unstable();
            needed.dedup();
            let src = needed
                .iter()
                .map(|&k| prev_needed.binary_search(&(k % half)).expect("needed set closed under mod"))
                .collect();
            let twiddle = needed
                .iter()
                .map(|&k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / len as f64))
                .collect();
            prev_needed = needed.clone();
            stages.push(Stage {
                len,
                needed,
                src,
                twiddle,
            });
            len *= 2;
        }
        let output_slot = outputs
            .iter()
            .map(|&k| prev_needed.binary_search(&k).unwrap())
            .collect();
        Ok(PrunedFft {
            n,
            outputs: outputs.to_vec(),
            output_slot,
            stages,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Number of twiddle-multiply-and-add combines one call performs.
    pub fn ops_per_vector(&self) -> u64 {
        self.stages
            .iter()
            .map(|s| ((self.n / s.len) * s.needed.len()) as u64)
            .sum()
    }

    /// Writes `X(outputs[i])` to `out[i]` and returns the number of combines performed.
    pub fn process(
        &self,
        input: &[Complex64],
        out: &mut [Complex64],
        scratch: &mut PrunedScratch,
    ) -> Result<u64> {
        if input.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: input.len(),
            });
        }
        if out.len() != self.outputs.len() {
            return Err(Error::LengthMismatch {
                expected: self.outputs.len(),
                actual: out.len(),
            });
        }
        let PrunedScratch { a: prev, b: cur } = scratch;
        prev.clear();
        prev.extend_from_slice(input);
        let mut prev_width = 1;
        let mut ops = 0u64;
        for stage in &self.stages {
            let count = self.n / stage.len;
            let width = stage.needed.len();
            cur.clear();
            cur.resize(count * width, Complex64::new(0.0, 0.0));
            for r in 0..count {
                let even = &prev[r * prev_width..(r + 1) * prev_width];
                let odd = &prev[(r + count) * prev_width..(r + count + 1) * prev_width];
                let dst = &mut cur[r * width..(r + 1) * width];
                for ((d, &s), &w) in dst.iter_mut().zip(&stage.src).zip(&stage.twiddle) {
                    *d = even[s] + w * odd[s];
                }
            }
            ops += (count * width) as u64;
            std::mem::swap(prev, cur);
            prev_width = width;
        }
        for (o, &slot) in out.iter_mut().zip(&self.output_slot) {
            *o = prev[slot];
        }
        Ok(ops)
    }
}
