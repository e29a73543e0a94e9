use std::f64::consts::PI;

use cspc::decomposition::{circulant_decompose_recursive, circulant_decompose_via_transform};
use cspc::fourier::{similarity_transform, CycleSelection};
use cspc::generators::{banded_diag_sequence, eval_symbol, generate, StructuredMatrixSpec, SymbolSpec};
use cspc::linalg::{eigenvalues, hermitian_eigenvalues};
use cspc::matrix::{apply_cycle_mask, cycle_position, ComplexMatrix};
use cspc::precond::{precond_benchmark, BENCHMARK_HEADER};
use cspc::sparse::{approx_eigenvalues, direct_sparsify, eigen_error_report, mean_std, select_by_norm, sparsify};
use cspc::Complex64;
use rayon::prelude::*;

use crate::output::{Cell, Table};
use crate::CliError;

pub const CYCLE_NORMS_HEADER: &[&str] = &["cycle_index", "folded_index", "l2_norm"];
pub const EIG_ERRORS_HEADER: &[&str] =
    &["k_cycles", "mean_rel_err", "std_rel_err", "frob_residual_ratio", "std_across_trials"];
pub const EIG_VS_N_HEADER: &[&str] = &["n", "mean_rel_err", "std_rel_err", "frob_residual_ratio", "std_across_trials"];
pub const POINTS_HEADER: &[&str] = &["trial", "set", "index", "re", "im"];
pub const SYMBOL_HEADER: &[&str] = &["set", "index", "re", "im"];
pub const HEATMAP_HEADER: &[&str] = &["row", "col", "normalized_magnitude"];
pub const DECOMPOSE_HEADER: &[&str] = &["k", "j", "re", "im"];

/// Largest dimension accepted by `heatmap`.
pub const HEATMAP_LIMIT: usize = 1024;

fn cycle_norms_sqr(b: &ComplexMatrix) -> Result<Vec<f64>, CliError> {
    let n = b.dim()?;
    Ok((0..n)
        .into_par_iter()
        .map(|k| apply_cycle_mask(b, k).map(|c| c.norm_sqr()))
        .collect::<cspc::Result<_>>()?)
}

fn reference_spectrum(b: &ComplexMatrix) -> Result<Vec<Complex64>, CliError> {
    Ok(if b.is_hermitian(1e-12) {
        hermitian_eigenvalues(b)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    } else {
        eigenvalues(b)?
    })
}

pub fn cycle_norms(spec: &StructuredMatrixSpec) -> Result<Table, CliError> {
    let a = generate(spec)?.matrix;
    let b = similarity_transform(&a)?;
    let n = a.nrows();
    let mut table = Table::new(CYCLE_NORMS_HEADER);
    for (k, sq) in cycle_norms_sqr(&b)?.into_iter().enumerate() {
        let folded = if k == 0 { n } else { k };
        table.push(vec![k.into(), folded.into(), sq.sqrt().into()]);
    }
    Ok(table)
}

/// `(mean, within-matrix std, ‖Δ‖_F / ‖B‖_F)` for one matrix and each selection.
fn errors_for(b: &ComplexMatrix, selections: &[CycleSelection]) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let reference = reference_spectrum(b)?;
    let total = b.frobenius_norm();
    selections
        .iter()
        .map(|sel| {
            let sparse = sparsify(b, sel)?;
            let report = eigen_error_report(&approx_eigenvalues(&sparse)?, &reference)?;
            let delta = sparse.residual(b)?.frobenius_norm();
            Ok((report.mean_relative_error, report.std_relative_error, delta / total))
        })
        .collect()
}

/// Aggregates per-trial results in trial order.
fn aggregate(per_trial: &[Vec<(f64, f64, f64)>], slot: usize) -> [f64; 4] {
    let means: Vec<f64> = per_trial.iter().map(|t| t[slot].0).collect();
    let stds: Vec<f64> = per_trial.iter().map(|t| t[slot].1).collect();
    let frobs: Vec<f64> = per_trial.iter().map(|t| t[slot].2).collect();
    let (mean, across) = mean_std(&means);
    [mean, mean_std(&stds).0, mean_std(&frobs).0, across]
}

fn trial_spec(spec: &StructuredMatrixSpec, t: usize) -> StructuredMatrixSpec {
    spec.clone().with_seed(spec.seed.wrapping_add(t as u64))
}

pub fn default_cycle_sweep(n: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|&k| k < n).collect();
    ks.push(n);
    ks
}

pub fn eig_errors(spec: &StructuredMatrixSpec, cycles: &[usize], trials: usize) -> Result<Table, CliError> {
    let n = spec.n;
    if let Some(&bad) = cycles.iter().find(|&&k| k == 0 || k > n) {
        return Err(CliError::Config(format!("cycle count {bad} outside 1..={n}")));
    }
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = generate(&trial_spec(spec, t))?.matrix;
            let b = similarity_transform(&a)?;
            let norms = cycle_norms_sqr(&b)?;
            let sels = cycles
                .iter()
                .map(|&k| select_by_norm(&norms, k))
                .collect::<cspc::Result<Vec<_>>>()?;
            errors_for(&b, &sels)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(EIG_ERRORS_HEADER);
    for (slot, &k) in cycles.iter().enumerate() {
        let [mean, std, frob, across] = aggregate(&per_trial, slot);
        table.push(vec![k.into(), mean.into(), std.into(), frob.into(), across.into()]);
    }
    Ok(table)
}

pub fn eig_vs_n(spec: &StructuredMatrixSpec, sizes: &[usize], trials: usize) -> Result<Table, CliError> {
    let mut table = Table::new(EIG_VS_N_HEADER);
    for &n in sizes {
        let sized = StructuredMatrixSpec { n, ..spec.clone() };
        sized.validate()?;
        let sel = CycleSelection::new(n, if n == 1 { vec![0] } else { vec![0, n / 2] })?;
        let per_trial = (0..trials)
            .into_par_iter()
            .map(|t| {
                let a = generate(&trial_spec(&sized, t))?.matrix;
                errors_for(&similarity_transform(&a)?, std::slice::from_ref(&sel))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let [mean, std, frob, across] = aggregate(&per_trial, 0);
        table.push(vec![n.into(), mean.into(), std.into(), frob.into(), across.into()]);
    }
    Ok(table)
}

fn push_points(table: &mut Table, trial: usize, set: &str, values: &[Complex64]) {
    for (i, v) in values.iter().enumerate() {
        table.push(vec![trial.into(), set.into(), i.into(), v.re.into(), v.im.into()]);
    }
}

pub fn sparsifier_compare(spec: &StructuredMatrixSpec, k: usize, trials: usize) -> Result<(Table, f64, f64), CliError> {
    let n = spec.n;
    if k == 0 || k > n {
        return Err(CliError::Config(format!("cycle count {k} outside 1..={n}")));
    }
    let spectra = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = generate(&trial_spec(spec, t))?.matrix;
            let b = similarity_transform(&a)?;
            let sel = select_by_norm(&cycle_norms_sqr(&b)?, k)?;
            let sparse = sparsify(&b, &sel)?;
            let circ = approx_eigenvalues(&sparse)?;
            let direct = eigenvalues(&direct_sparsify(&a, sparse.nnz())?)?;
            Ok((reference_spectrum(&b)?, circ, direct))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(POINTS_HEADER);
    let mean_abs = |v: &[Complex64]| v.iter().map(|z| z.norm()).sum::<f64>() / v.len() as f64;
    let (mut circ_mean, mut direct_mean) = (0.0, 0.0);
    for (t, (exact, circ, direct)) in spectra.iter().enumerate() {
        push_points(&mut table, t, "exact", exact);
        push_points(&mut table, t, "circulant", circ);
        push_points(&mut table, t, "direct", direct);
        circ_mean += mean_abs(circ) / trials as f64;
        direct_mean += mean_abs(direct) / trials as f64;
    }
    Ok((table, circ_mean, direct_mean))
}

pub fn precond_table(spec: &StructuredMatrixSpec, budgets: &[usize], tol: f64, max_iter: usize) -> Result<Table, CliError> {
    let generated = generate(spec)?;
    let n = spec.n;
    let rhs = generated
        .rhs
        .unwrap_or_else(|| (1..=n).map(|i| Complex64::new(i as f64, 0.0)).collect());
    let rows = precond_benchmark(&generated.matrix, &rhs, budgets, tol, max_iter)?;
    let mut table = Table::new(&BENCHMARK_HEADER);
    for r in rows {
        table.push(vec![
            r.method.into(),
            r.budget.into(),
            r.iterations.into(),
            r.converged.into(),
            r.final_residual.into(),
        ]);
    }
    Ok(table)
}

/// Band with seven nonzero entries per row.
pub fn default_banded_symbol() -> SymbolSpec {
    let r = |x: f64| Complex64::new(x, 0.0);
    SymbolSpec::banded(vec![
        (-3, r(0.5)),
        (-2, r(-1.0)),
        (-1, r(2.0)),
        (0, r(4.0)),
        (1, r(-1.5)),
        (2, r(1.0)),
        (3, Complex64::new(0.0, 0.25)),
    ])
}

pub fn symbol_compare(spec: &StructuredMatrixSpec, samples: usize) -> Result<Table, CliError> {
    let sym = spec
        .symbol
        .as_ref()
        .ok_or_else(|| CliError::Config("symbol-compare needs a symbol_toeplitz spec".into()))?;
    if samples == 0 {
        return Err(CliError::Config("--samples must be positive".into()));
    }
    let n = spec.n;
    let a = generate(spec)?.matrix;
    let b = similarity_transform(&a)?;
    let mut table = Table::new(SYMBOL_HEADER);
    let mut push = |set: &str, values: &[Complex64]| {
        for (i, v) in values.iter().enumerate() {
            table.push(vec![set.into(), i.into(), v.re.into(), v.im.into()]);
        }
    };
    let curve = (0..samples)
        .map(|j| eval_symbol(sym, 2.0 * PI * j as f64 / samples as f64))
        .collect::<cspc::Result<Vec<_>>>()?;
    push("symbol", &curve);
    push("diagonal", &b.diagonal());
    push("eigenvalue", &eigenvalues(&a)?);
    if let SymbolSpec::Banded { coefficients } = sym {
        let width = coefficients.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let coef = |d: i32| -> Complex64 { coefficients.iter().filter(|(k, _)| *k == d).map(|(_, v)| v).sum() };
        let upper = coefficients.iter().map(|(k, _)| *k).max().unwrap_or(0).max(0) as usize;
        let lower = coefficients.iter().map(|(k, _)| -*k).max().unwrap_or(0).max(0) as usize;
        if width < n && upper + lower < n {
            let row: Vec<Complex64> = (0..=upper as i32).map(coef).collect();
            let col: Vec<Complex64> = (0..=lower as i32).map(|d| coef(-d)).collect();
            push("banded_sequence", &banded_diag_sequence(&row, &col, n)?);
        }
    }
    Ok(table)
}

pub fn heatmap(spec: &StructuredMatrixSpec) -> Result<Table, CliError> {
    let n = spec.n;
    if n > HEATMAP_LIMIT {
        return Err(CliError::Config(format!("heatmap is limited to n <= {HEATMAP_LIMIT}, got {n}")));
    }
    let b = similarity_transform(&generate(spec)?.matrix)?;
    let mut grid = vec![0.0; n * n];
    for k in 0..n {
        let cycle = apply_cycle_mask(&b, k)?;
        let max = cycle.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        for (t, v) in cycle.values().iter().enumerate() {
            let (r, c) = cycle_position(n, k, t);
            grid[r * n + c] = v.norm() / max;
        }
    }
    let mut table = Table::new(HEATMAP_HEADER);
    for r in 0..n {
        for c in 0..n {
            table.push(vec![r.into(), c.into(), grid[r * n + c].into()]);
        }
    }
    Ok(table)
}

pub fn decompose(spec: &StructuredMatrixSpec, recursive: bool) -> Result<Table, CliError> {
    let a = generate(spec)?.matrix;
    let comps = if recursive {
        circulant_decompose_recursive(&a)?
    } else {
        circulant_decompose_via_transform(&a)?
    };
    let mut table = Table::new(DECOMPOSE_HEADER);
    for comp in &comps {
        for (j, v) in comp.first_row.iter().enumerate() {
            table.push(vec![comp.k.into(), j.into(), Cell::from(v.re), Cell::from(v.im)]);
        }
    }
    table.json = Some(serde_json::to_string_pretty(&comps)?);
    Ok(table)
}
