//! Quantumness and partial-transpose separability of two-party Gaussian
//! states in a noncommutative phase space.
//!
//! The phase space carries commutators `[z_i, z_j] = i Ω_ij` deformed by a
//! position-position parameter `θ` and a momentum-momentum parameter `η`.
//! A covariance matrix `Σ` describes a physical state when the smallest
//! eigenvalue `ν₋` of `2iΩ⁻¹Σ` is at least one, and passes the partial
//! transpose test when the same holds with `Ω` replaced by
//! `Ω' = Diag[Ω^A, -Ω^B]`.
//!
//! ```
//! use ncps::{build_omega, transform_omega_ppt, classify, covariance_for};
//! use ncps::{Class, GammaFamily, ModeLayout, NcParams, StateParams};
//!
//! let sigma = covariance_for(GammaFamily::First, StateParams::weak_m(0.2)?)?;
//! let omega = build_omega(NcParams::new(0.125, 0.6)?, ModeLayout::TWO_BY_TWO)?;
//! let omega_prime = transform_omega_ppt(&omega)?;
//! let verdict = classify(&sigma, &omega, &omega_prime)?;
//! assert_eq!(verdict.class, Class::Entangled);
//! # Ok::<(), ncps::Error>(())
//! ```

// `!(x > y)` is used on purpose so NaN takes the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod algebra;
pub mod error;
pub mod spectra;
pub mod states;
pub mod sweep;

pub use algebra::{
    build_darboux, build_omega, ppt_reflection, standard_symplectic, transform_covariance,
    transform_omega_ppt, DarbouxMap, ModeLayout, NcParams, StructureKind, StructureMatrix,
};
pub use error::{Error, ErrorCategory, Result};
pub use spectra::{
    classify, nc_williamson_spectrum, rsup_holds, uncertainty_min_eigenvalue, Class, StateClass,
    SymplecticSpectrum,
};
pub use states::{
    build_covariance, build_gamma, closed_form_invariants_family1, covariance_for, wigner_value,
    CovarianceMatrix, GammaFamily, Invariants, StateParams,
};
pub use sweep::{run_sweep, Axis, NamedSweep, Preset, RowClass, SweepRow, SweepSpec};
