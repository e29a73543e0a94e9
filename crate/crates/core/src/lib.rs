//! Circulant decomposition and sparse spectra of dense square matrices.
//!
//! Every `n x n` matrix `A` splits into `n` relaxed circulants `R_k D_k`, and the
//! similarity transform `B = W A W†` maps each of them onto one cyclic diagonal of `B`.
//! Matrices with periodic diagonals concentrate their mass on a few of these cycles,
//! which this crate exploits for eigenvalue approximation and for preconditioning.
//!
//! ```
//! use cspc::fourier::{similarity_transform, CycleSelection};
//! use cspc::generators::{generate, StructuredMatrixSpec};
//! use cspc::sparse::{compare_spectra, sparsify};
//!
//! let a = generate(&StructuredMatrixSpec::block_toeplitz(40, 4, 7)).unwrap().matrix;
//! let b = similarity_transform(&a).unwrap();
//! // block size 4 puts the dominant cycles at multiples of 40 / 4
//! let sel = CycleSelection::new(40, [0, 10, 20, 30]).unwrap();
//! let report = compare_spectra(&b, &sparsify(&b, &sel).unwrap()).unwrap();
//! assert!(report.delta_frobenius.unwrap() < b.frobenius_norm());
//! ```
//!
//! Modules:
//! - [`matrix`]: dense storage, cycles, relaxation diagonals and the Fourier matrix.
//! - [`fourier`]: DFTs, the similarity transform and pruned cycle extraction.
//! - [`decomposition`]: cycle and circulant decompositions, dominance, Toeplitz closed forms.
//! - [`sparse`]: sparsified transforms, approximate eigenvalues, error bounds.
//! - [`precond`]: cycle and T. Chan preconditioners with PCG.
//! - [`generators`]: reproducible test matrices and symbols.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod error;
pub mod fourier;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod precond;
pub mod sparse;

pub use decomposition::{CirculantComponent, CycleDecomposition, DominanceReport, ToeplitzEntries};
pub use error::{Error, Result};
pub use fourier::CycleSelection;
pub use generators::{StructuredMatrixSpec, SymbolSpec};
pub use matrix::{ComplexMatrix, DiagonalVector};
pub use num_complex::Complex64;
pub use precond::{PcgReport, Preconditioner};
pub use sparse::{EigenApproxResult, SparseCycleMatrix};

/// Crate version, recorded in CLI manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cycles.md")]
    mod cycles {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/dominance.md")]
    mod dominance {}
    #[doc = include_str!("../../../book/src/sparse.md")]
    mod sparse {}
    #[doc = include_str!("../../../book/src/preconditioners.md")]
    mod preconditioners {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
