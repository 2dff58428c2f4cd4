//! Two-party Gaussian states `Σ = (b/2) [[I₄, γᵀ], [γ, I₄]]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::algebra::NcParams;
use crate::error::{Error, Result};

/// Correlation strength `(m, n)` of a state, with the derived
/// `R = sqrt(m² + n²)` and `b = (1 + R) / (1 - R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateParams {
    m: f64,
    n_corr: f64,
    r: f64,
    b: f64,
}

impl StateParams {
    pub fn new(m: f64, n_corr: f64) -> Result<Self> {
        if !m.is_finite() || !n_corr.is_finite() {
            return Err(Error::Domain(format!(
                "m and n must be finite (got m={m}, n={n_corr})"
            )));
        }
        let r = m.hypot(n_corr);
        if r >= 1.0 {
            return Err(Error::Domain(format!(
                "R = sqrt(m^2 + n^2) must be < 1 (got R={r})"
            )));
        }
        Ok(Self {
            m,
            n_corr,
            r,
            b: (1.0 + r) / (1.0 - r),
        })
    }

    /// `m = R/10`, `n = 3 sqrt(11) R / 10`.
    pub fn weak_m(r: f64) -> Result<Self> {
        Self::new(r / 10.0, 3.0 * 11f64.sqrt() * r / 10.0)
    }

    /// `m = 3 sqrt(11) R / 10`, `n = R/10`.
    pub fn weak_n(r: f64) -> Result<Self> {
        Self::new(3.0 * 11f64.sqrt() * r / 10.0, r / 10.0)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn n_corr(&self) -> f64 {
        self.n_corr
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// The two off-diagonal correlation patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaFamily {
    First,
    Second,
}

impl GammaFamily {
    pub fn number(&self) -> u8 {
        match self {
            GammaFamily::First => 1,
            GammaFamily::Second => 2,
        }
    }
}

impl fmt::Display for GammaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for GammaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(GammaFamily::First),
            "2" => Ok(GammaFamily::Second),
            other => Err(Error::Parse {
                what: "family",
                detail: format!("expected 1 or 2, got {other:?}"),
            }),
        }
    }
}

#[rustfmt::skip]
pub fn build_gamma(family: GammaFamily, m: f64, n_corr: f64) -> Matrix4<f64> {
    let n = n_corr;
    match family {
        GammaFamily::First => Matrix4::new(
            n, 0.0, m, 0.0,
            0.0, n, 0.0, -m,
            m, 0.0, -n, 0.0,
            0.0, -m, 0.0, -n,
        ),
        GammaFamily::Second => Matrix4::new(
            n, 0.0, 0.0, -m,
            0.0, n, m, 0.0,
            0.0, m, -n, 0.0,
            -m, 0.0, 0.0, -n,
        ),
    }
}

/// Real symmetric positive-definite covariance matrix.
///
/// The symmetric square root and the spectrum are computed once here since
/// every invariant downstream needs them.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
    sqrt: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    origin: Option<(GammaFamily, StateParams)>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim || dim == 0 {
            return Err(Error::Shape {
                expected: dim.max(entries.ncols()),
                rows: dim,
                cols: entries.ncols(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("covariance has non-finite entries".into()));
        }
        let scale = entries.amax();
        let asymmetry = (&entries - entries.transpose()).amax();
        if asymmetry > 1e-12 * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }

        let eig = entries.clone().symmetric_eigen();
        let min_eigenvalue = eig.eigenvalues.min();
        let floor = 1e-13 * entries.trace();
        if !(min_eigenvalue > floor) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        let roots = eig.eigenvalues.map(f64::sqrt);
        let sqrt =
            &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();
        let sqrt = (&sqrt + sqrt.transpose()) * 0.5;
        Ok(Self {
            entries,
            sqrt,
            eigenvalues: eig.eigenvalues,
            origin: None,
        })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Symmetric positive square root `Σ^{1/2}`.
    pub fn sqrt(&self) -> &DMatrix<f64> {
        &self.sqrt
    }

    /// Ordinary eigenvalues of `Σ` (unsorted).
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn family(&self) -> Option<GammaFamily> {
        self.origin.map(|(f, _)| f)
    }

    pub fn params(&self) -> Option<StateParams> {
        self.origin.map(|(_, p)| p)
    }

    /// `cΣ` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!(
                "scale factor must be positive (got {c})"
            )));
        }
        Self::new(&self.entries * c)
    }

    pub fn determinant(&self) -> f64 {
        self.eigenvalues.iter().product()
    }
}

pub fn build_covariance(family: GammaFamily, m: f64, n_corr: f64) -> Result<CovarianceMatrix> {
    covariance_for(family, StateParams::new(m, n_corr)?)
}

pub fn covariance_for(family: GammaFamily, params: StateParams) -> Result<CovarianceMatrix> {
    let gamma = build_gamma(family, params.m, params.n_corr);
    let mut entries = DMatrix::identity(8, 8);
    entries.view_mut((4, 0), (4, 4)).copy_from(&gamma);
    entries
        .view_mut((0, 4), (4, 4))
        .copy_from(&gamma.transpose());
    entries *= params.b / 2.0;
    let mut sigma = CovarianceMatrix::new(entries)?;
    sigma.origin = Some((family, params));
    Ok(sigma)
}

/// Smallest NC Williamson invariants of `Σ` and of its partial transpose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub nu_minus: f64,
    pub nu_minus_prime: f64,
}

/// Radicands this close below zero are rounding residue at double roots.
const RADICAND_CLAMP: f64 = 1e-12;

/// Closed forms of `ν₋` and `ν₋'` for the first family.
///
/// Valid for `m, n ≥ 0`; the closed forms do not track the spectrum for
/// negative correlation parameters, so those are rejected.
pub fn closed_form_invariants_family1(params: NcParams, m: f64, n_corr: f64) -> Result<Invariants> {
    let state = StateParams::new(m, n_corr)?;
    if m < 0.0 || n_corr < 0.0 {
        return Err(Error::Domain(format!(
            "closed forms need m >= 0 and n >= 0 (got m={m}, n={n_corr})"
        )));
    }
    let (theta, eta) = (params.theta(), params.eta());
    let r = state.r;
    let one_minus = 1.0 - eta * theta;
    let c = (1.0 - r * r).powi(2) * one_minus.powi(2);
    let prefactor = state.b / one_minus;

    let nu = |omega: f64| -> Result<f64> {
        let mut radicand = omega * omega / 4.0 - c;
        if radicand < 0.0 {
            if radicand < -RADICAND_CLAMP {
                return Err(Error::Numerical(format!(
                    "negative radicand {radicand:e} in closed-form invariant"
                )));
            }
            radicand = 0.0;
        }
        // ω/2 - sqrt(ω²/4 - c) rewritten as c / (ω/2 + sqrt(...)) to avoid cancellation.
        let inner = if omega > 0.0 {
            c / (omega / 2.0 + radicand.sqrt())
        } else {
            omega / 2.0 - radicand.sqrt()
        };
        if inner < 0.0 {
            return Err(Error::Numerical(format!(
                "negative inner radicand {inner:e} in closed-form invariant"
            )));
        }
        Ok(prefactor * inner.sqrt())
    };

    Ok(Invariants {
        nu_minus: nu(omega_minus(theta, eta, m, n_corr))?,
        nu_minus_prime: nu(omega_plus(theta, eta, m, n_corr))?,
    })
}

/// `ω₊`: the `|η² - θ²|` term drops out and the `(η + θ)` term survives.
fn omega_plus(theta: f64, eta: f64, m: f64, n: f64) -> f64 {
    2.0 * (1.0 + n * n)
        + (1.0 - n * n) * (eta * eta + theta * theta)
        + 2.0 * m * m * (1.0 + eta * theta)
        + 4.0 * m * (eta + theta)
}

/// `ω₋`: the `(η + θ)` term drops out and the `|η² - θ²|` term survives.
fn omega_minus(theta: f64, eta: f64, m: f64, n: f64) -> f64 {
    2.0 * (1.0 - n * n) + (1.0 + n * n) * (eta * eta + theta * theta)
        - 2.0 * m * m * (1.0 + eta * theta)
        + 2.0 * n * (eta * eta - theta * theta).abs()
}

/// Gaussian phase-space density `exp(-zᵀ Σ⁻¹ z) / (π^{d/2} sqrt(det Σ))`.
pub fn wigner_value(sigma: &CovarianceMatrix, z: &DVector<f64>) -> Result<f64> {
    let dim = sigma.dim();
    if z.len() != dim {
        return Err(Error::Shape {
            expected: dim,
            rows: z.len(),
            cols: 1,
        });
    }
    let chol = sigma
        .entries()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: sigma.eigenvalues().min(),
        })?;
    let quad = z.dot(&chol.solve(z));
    let det = chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d * d)
        .product::<f64>();
    Ok((-quad).exp() / (PI.powf(dim as f64 / 2.0) * det.sqrt()))
}
