//! Spectra of one-dimensional polynomial oscillators in a truncated
//! harmonic-oscillator basis.
//!
//! The basis length scale is chosen by minimising the energy of a single
//! pivot level, the Hamiltonian is assembled as a band matrix from
//! normal-ordered ladder operators, and the dense symmetric eigenproblem is
//! solved directly. On top of that sit field scans, low-order perturbative
//! coefficients and avoided-crossing analysis for the double well
//! `αq²/2 + βq⁴/4 − pq`.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the usual `f64` choice.
//!
//! ```
//! use anharm::{DoubleWellParams, FieldFamily, Model, PivotRule};
//!
//! let params = DoubleWellParams::<f64>::new(-2.0, 1.0, 0.0).unwrap();
//! let model = Model::double_well(&params, 1.0, 1.0).unwrap();
//! let family = FieldFamily::new(model, 40, PivotRule::Half).unwrap();
//! let result = family.spectrum(0.0).unwrap();
//! assert!((result.eigenvalues()[0] + 0.299521367416).abs() < 1e-9);
//! ```

// `!(x > 0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod perturbation;
pub mod report;
pub mod scalar;
pub mod scan;
pub mod search;
pub mod wavefunction;

pub use basis::{optimize_r, BasisSpec, PivotRule};
pub use eigen::{eigh, solve, Eigendecomposition, SpectralResult};
pub use error::{Error, Result};
pub use hamiltonian::{assemble, position_operator, SymmetricBandMatrix};
pub use model::{DoubleWellParams, Model};
pub use perturbation::{
    asymptotic_fit, find_avoided_crossing, fit_response_a, local_models, second_order_c1, AsymptoticFit,
    CrossingAnalysis, LocalModels, ResponseCoefficients,
};
pub use report::Report;
pub use scalar::Scalar;
pub use scan::{convergence_study, scan_field, ConvergenceTable, FieldFamily, FieldScan, FitWindow, ScanConfig};
pub use wavefunction::{position_matrix, GridSpec, PositionGrid, PositionMatrix};

pub type Model64 = Model<f64>;
pub type DoubleWell64 = DoubleWellParams<f64>;
pub type BasisSpec64 = BasisSpec<f64>;
pub type BandMatrix64 = SymmetricBandMatrix<f64>;
pub type SpectralResult64 = SpectralResult<f64>;
pub type FieldFamily64 = FieldFamily<f64>;
pub type FieldScan64 = FieldScan<f64>;

pub type Model32 = Model<f32>;
pub type SpectralResult32 = SpectralResult<f32>;
