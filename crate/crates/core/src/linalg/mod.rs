//! Dense complex-matrix kernel: Hermitian eigensolver, functional calculus,
//! polar decomposition, spectra and Loewner-order comparison.

pub mod dd;
pub mod eig;
pub mod funcs;
pub mod matrix;
pub mod order;
pub mod psd;
pub mod spectrum;
pub mod svd;
pub mod tolerance;

pub use eig::{eig_hermitian, eigenvalues_desc, hermitian_norm, EigenDecomposition};
pub use funcs::{frac_power, matrix_function, pinv_sqrt, sqrt_psd, Interval};
pub use matrix::{ComplexMatrix, HermitianMatrix, C64};
pub use order::{align_witness, loewner_leq, unitary_conjugate, LoewnerComparison, WitnessCertificate, WitnessKind};
pub use psd::PsdMatrix;
pub use spectrum::{weak_log_majorizes, SpectrumList};
pub use svd::{op_norm, operator_abs, polar_decompose, singular_values_desc, trace_norm, PolarDecomposition};
pub use tolerance::ToleranceConfig;
