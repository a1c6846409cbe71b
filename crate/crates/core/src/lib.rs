//! Distinguishability of single-mode Gaussian states by homodyne detection.
//!
//! The crate compares the quantum fidelity `F` of two Gaussian states with
//! the Bhattacharyya overlap `I_φ` of their homodyne outcome distributions,
//! finds `min_φ I_φ`, and decides in closed form when that minimum reaches
//! `F` (homodyne detection is then an optimal measurement).
//!
//! Units: the covariance matrix `Γ` is normalized so the vacuum has `Γ = I`,
//! and the mean is the coherent amplitude `(Re α, Im α)`. The quadrature
//! `X_φ = (a e^{−iφ} + a† e^{iφ})/2` has vacuum variance 1/4.
//!
//! The closed-form layers ([`gaussian`], [`fidelity`], [`homodyne`],
//! [`optimality`], [`povm`]) are generic over [`Scalar`] (`f64` and `f32`).
//! The number-basis oracle ([`fock`]) and the quadrature checks
//! ([`quadrature`]) are `f64` only.

// `!(x <= tol)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fidelity;
pub mod fock;
pub mod gaussian;
pub mod homodyne;
pub mod io;
pub mod mat2;
pub mod optimality;
pub mod povm;
pub mod quadrature;
pub mod scalar;

pub use error::{GdistError, Result};
pub use fidelity::{
    check_fidelity_properties, fidelity_gaussian, fidelity_same_mean, squeeze_coupling, FidelityProperty,
    FidelityReport, PropertyReport, PropertyViolation,
};
pub use fock::{build_state, fidelity_fock, marginal_fock, overlap_fock, FockOperator};
pub use gaussian::{
    apply_symplectic, characteristic_fn, covariance_from_params, is_physical, params_from_covariance, wigner_fn,
    CovarianceState, GaussianParams, SymplecticMap,
};
pub use homodyne::{marginal, overlap_at, overlap_from_ratio, overlap_profile, MarginalSpec, OverlapProfile};
pub use mat2::Mat2;
pub use optimality::{
    build_equality_equation, check_condition_general, check_condition_s1_unity, check_different_mean_symmetric,
    classify, minimize_overlap, minimize_overlap_general, minimize_overlap_scan, solve_equality_phi,
    solve_s2_for_optimality, HarmonicEquation, OptimalityClass, OptimalityEquation, OptimalityVerdict, OverlapMinimum,
    S2Root,
};
pub use povm::{
    conjecture_scan, povm_distribution, povm_overlap, ConjectureTable, PlaneGaussian, PovmFamilySpec, PovmKind,
};
pub use scalar::Scalar;

pub type GaussianParams64 = GaussianParams<f64>;
pub type GaussianParams32 = GaussianParams<f32>;
pub type CovarianceState64 = CovarianceState<f64>;
pub type CovarianceState32 = CovarianceState<f32>;
pub type SymplecticMap64 = SymplecticMap<f64>;
pub type Mat2f64 = Mat2<f64>;
pub type FidelityReport64 = FidelityReport<f64>;
pub type MarginalSpec64 = MarginalSpec<f64>;
pub type OptimalityVerdict64 = OptimalityVerdict<f64>;
pub type PovmFamilySpec64 = PovmFamilySpec<f64>;
