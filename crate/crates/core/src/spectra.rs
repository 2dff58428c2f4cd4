//! NC Williamson invariants and the quantumness/separability decision.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};

use crate::algebra::StructureMatrix;
use crate::error::{Error, Result};
use crate::states::CovarianceMatrix;

/// Largest tolerated `|λ_i + λ_{2n+1-i}|` relative to the spectral radius.
pub const PAIRING_TOLERANCE: f64 = 1e-8;

/// Threshold on the smallest eigenvalue of `Σ + (i/2)Ω`.
pub const HERMITIAN_THRESHOLD: f64 = -1e-10;

/// Positive half of the spectrum of `2iΩ⁻¹Σ`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
    residual: f64,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest invariant `ν₋`.
    pub fn nu_minus(&self) -> f64 {
        self.values[0]
    }

    /// Pairing defect of the underlying ± eigenvalue pairs.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

fn check_dims(sigma: &CovarianceMatrix, omega: &StructureMatrix) -> Result<()> {
    if sigma.dim() != omega.dim() {
        return Err(Error::Shape {
            expected: omega.dim(),
            rows: sigma.dim(),
            cols: sigma.dim(),
        });
    }
    Ok(())
}

fn hermitian_eigenvalues(h: DMatrix<Complex<f64>>) -> Vec<f64> {
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues of `2iΩ⁻¹Σ`, computed through the Hermitian matrix
/// `2i Σ^{1/2} Ω⁻¹ Σ^{1/2}` which is similar to it.
pub fn nc_williamson_spectrum(
    sigma: &CovarianceMatrix,
    omega: &StructureMatrix,
) -> Result<SymplecticSpectrum> {
    check_dims(sigma, omega)?;
    let omega_inv = omega.inverse()?;
    let root = sigma.sqrt();
    let k = root * omega_inv * root;
    let k = (&k - k.transpose()) * 0.5;
    let h = k.map(|v| Complex::new(0.0, 2.0 * v));
    let eigenvalues = hermitian_eigenvalues(h);

    let dim = eigenvalues.len();
    let residual = (0..dim / 2)
        .map(|i| (eigenvalues[i] + eigenvalues[dim - 1 - i]).abs())
        .fold(0.0, f64::max);
    let scale = eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let limit = PAIRING_TOLERANCE * scale;
    if residual > limit {
        return Err(Error::Pairing { residual, limit });
    }
    let values = eigenvalues[dim / 2..].to_vec();
    if values[0] <= 0.0 {
        return Err(Error::Numerical(format!(
            "non-positive symplectic eigenvalue {}",
            values[0]
        )));
    }
    Ok(SymplecticSpectrum { values, residual })
}

/// Smallest eigenvalue of the Hermitian matrix `Σ + (i/2)Ω`.
pub fn uncertainty_min_eigenvalue(
    sigma: &CovarianceMatrix,
    omega: &StructureMatrix,
) -> Result<f64> {
    check_dims(sigma, omega)?;
    let h = DMatrix::from_fn(sigma.dim(), sigma.dim(), |r, c| {
        Complex::new(sigma.entries()[(r, c)], 0.5 * omega.entries()[(r, c)])
    });
    Ok(hermitian_eigenvalues(h)[0])
}

/// Whether `Σ` obeys the uncertainty principle for `Ω` (`ν₋ ≥ 1`).
pub fn rsup_holds(sigma: &CovarianceMatrix, omega: &StructureMatrix) -> Result<bool> {
    let nu = nc_williamson_spectrum(sigma, omega)?.nu_minus();
    let holds = nu >= 1.0;
    if cfg!(debug_assertions) && (nu - 1.0).abs() > 1e-8 {
        let direct = uncertainty_min_eigenvalue(sigma, omega)? >= HERMITIAN_THRESHOLD;
        debug_assert_eq!(holds, direct, "nu_minus = {nu}");
    }
    Ok(holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    Nonphysical,
    Separable,
    Entangled,
}

impl Class {
    pub fn token(&self) -> &'static str {
        match self {
            Class::Nonphysical => "NONPHYSICAL",
            Class::Separable => "SEPARABLE",
            Class::Entangled => "ENTANGLED",
        }
    }

    /// Three-way rule on raw invariants; `ν = 1` counts as satisfying.
    pub fn from_invariants(nu_minus: f64, nu_minus_prime: f64) -> Self {
        if !(nu_minus >= 1.0) {
            Class::Nonphysical
        } else if nu_minus_prime >= 1.0 {
            Class::Separable
        } else {
            Class::Entangled
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NONPHYSICAL" => Ok(Class::Nonphysical),
            "SEPARABLE" => Ok(Class::Separable),
            "ENTANGLED" => Ok(Class::Entangled),
            other => Err(Error::Parse {
                what: "class",
                detail: format!("unknown token {other:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateClass {
    pub class: Class,
    pub nu_minus: f64,
    pub nu_minus_prime: f64,
}

/// `SEPARABLE` here means "not detected by the partial-transpose test".
pub fn classify(
    sigma: &CovarianceMatrix,
    omega: &StructureMatrix,
    omega_prime: &StructureMatrix,
) -> Result<StateClass> {
    let nu_minus = nc_williamson_spectrum(sigma, omega)?.nu_minus();
    let nu_minus_prime = nc_williamson_spectrum(sigma, omega_prime)?.nu_minus();
    Ok(StateClass {
        class: Class::from_invariants(nu_minus, nu_minus_prime),
        nu_minus,
        nu_minus_prime,
    })
}
