//! Structure matrices of the deformed Heisenberg-Weyl algebra.
//!
//! Phase-space coordinates are ordered party by party, A before B, and
//! within a party as `(x_1, ..., x_n, p_1, ..., p_n)`. The commutators
//! `[z_i, z_j] = i Ω_ij` are encoded in a block-diagonal, skew-symmetric
//! matrix `Ω = Diag[Ω^A, Ω^B]` with
//!
//! ```text
//! Ω^K = [[ θ ε,  I  ],
//!        [ -I,  η ε ]]
//! ```
//!
//! where `ε` is the 2x2 antisymmetric symbol with `ε_12 = +1`. At
//! `θ = η = 0` this is the standard symplectic matrix `J`.

use std::fmt;

use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::states::CovarianceMatrix;

/// Position-position (`theta`) and momentum-momentum (`eta`) deformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcParams {
    theta: f64,
    eta: f64,
}

impl NcParams {
    pub const COMMUTATIVE: NcParams = NcParams {
        theta: 0.0,
        eta: 0.0,
    };

    pub fn new(theta: f64, eta: f64) -> Result<Self> {
        if !theta.is_finite() || !eta.is_finite() {
            return Err(Error::Domain(format!(
                "theta and eta must be finite (got theta={theta}, eta={eta})"
            )));
        }
        if theta < 0.0 || eta < 0.0 {
            return Err(Error::Domain(format!(
                "theta and eta must be non-negative (got theta={theta}, eta={eta})"
            )));
        }
        if theta * eta >= 1.0 {
            return Err(Error::Domain(format!(
                "theta*eta must be < 1 (got theta={theta}, eta={eta})"
            )));
        }
        Ok(Self { theta, eta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Same deformation with the roles of θ and η exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            theta: self.eta,
            eta: self.theta,
        }
    }

    /// `(1 + sqrt(1 - θη)) / 2`, the value the Darboux scales must multiply to.
    pub fn darboux_product(&self) -> f64 {
        (1.0 + (1.0 - self.theta * self.eta).sqrt()) / 2.0
    }
}

/// Number of modes held by each party.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeLayout {
    n_a: usize,
    n_b: usize,
}

impl ModeLayout {
    /// Two modes per party; the 8-dimensional phase space every builder supports.
    pub const TWO_BY_TWO: ModeLayout = ModeLayout { n_a: 2, n_b: 2 };

    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(Error::Domain(format!(
                "each party needs at least one mode (got {n_a}, {n_b})"
            )));
        }
        Ok(Self { n_a, n_b })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Total number of modes.
    pub fn modes(&self) -> usize {
        self.n_a + self.n_b
    }

    /// Phase-space dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.modes()
    }

    fn require_two_by_two(&self) -> Result<()> {
        if *self != Self::TWO_BY_TWO {
            return Err(Error::UnsupportedLayout {
                n_a: self.n_a,
                n_b: self.n_b,
            });
        }
        Ok(())
    }
}

impl Default for ModeLayout {
    fn default() -> Self {
        Self::TWO_BY_TWO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    /// Deformed structure `Ω`.
    Omega,
    /// Standard symplectic `J`.
    J,
    /// Partially transposed structure `Ω' = Diag[Ω^A, -Ω^B]`.
    OmegaPrime,
}

impl StructureKind {
    pub fn name(&self) -> &'static str {
        match self {
            StructureKind::Omega => "OMEGA",
            StructureKind::J => "J",
            StructureKind::OmegaPrime => "OMEGA_PRIME",
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real skew-symmetric, block-diagonal commutator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrix {
    entries: DMatrix<f64>,
    kind: StructureKind,
    layout: ModeLayout,
}

impl StructureMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.entries
            .clone()
            .try_inverse()
            .ok_or(Error::SingularStructure)
    }
}

/// Antisymmetric symbol with `ε_12 = +1`.
fn epsilon(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Writes one party's `[[Θ, I], [-I, Υ]]` block at `offset`.
fn write_party_block(
    m: &mut DMatrix<f64>,
    offset: usize,
    modes: usize,
    theta: impl Fn(usize, usize) -> f64,
    eta: impl Fn(usize, usize) -> f64,
) {
    for i in 0..modes {
        for j in 0..modes {
            m[(offset + i, offset + j)] = theta(i, j);
            m[(offset + modes + i, offset + modes + j)] = eta(i, j);
        }
        m[(offset + i, offset + modes + i)] = 1.0;
        m[(offset + modes + i, offset + i)] = -1.0;
    }
}

/// `J = Diag[J^A, J^B]` with `J^K = [[0, I], [-I, 0]]`.
pub fn standard_symplectic(layout: ModeLayout) -> StructureMatrix {
    let dim = layout.dim();
    let mut entries = DMatrix::zeros(dim, dim);
    write_party_block(&mut entries, 0, layout.n_a, |_, _| 0.0, |_, _| 0.0);
    write_party_block(
        &mut entries,
        2 * layout.n_a,
        layout.n_b,
        |_, _| 0.0,
        |_, _| 0.0,
    );
    StructureMatrix {
        entries,
        kind: StructureKind::J,
        layout,
    }
}

/// `Ω = Diag[Ω^A, Ω^B]` with `Θ = θε` and `Υ = ηε` in both parties.
pub fn build_omega(params: NcParams, layout: ModeLayout) -> Result<StructureMatrix> {
    layout.require_two_by_two()?;
    let dim = layout.dim();
    let mut entries = DMatrix::zeros(dim, dim);
    for offset in [0, 4] {
        write_party_block(
            &mut entries,
            offset,
            2,
            |i, j| params.theta * epsilon(i, j),
            |i, j| params.eta * epsilon(i, j),
        );
    }
    Ok(StructureMatrix {
        entries,
        kind: StructureKind::Omega,
        layout,
    })
}

/// `Ω' = Diag[Ω^A, -Ω^B]`, the structure seen by a state after Bob's
/// momenta are mirrored.
pub fn transform_omega_ppt(omega: &StructureMatrix) -> Result<StructureMatrix> {
    if omega.kind != StructureKind::Omega {
        return Err(Error::Kind {
            expected: StructureKind::Omega.name(),
            found: omega.kind.name(),
        });
    }
    let start = 2 * omega.layout.n_a;
    let dim = omega.dim();
    let mut entries = omega.entries.clone();
    entries
        .view_mut((start, start), (dim - start, dim - start))
        .neg_mut();
    Ok(StructureMatrix {
        entries,
        kind: StructureKind::OmegaPrime,
        layout: omega.layout,
    })
}

/// Linear Darboux map `S = Diag[S^A, S^B]` with `Ω = S J Sᵀ`.
///
/// Each block sends canonical `(q, k)` to deformed `(x, p)` via
/// `x_i = λ q_i - (θ/2λ) ε_ij k_j` and `p_i = μ k_i + (η/2μ) ε_ij q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxMap {
    block: Matrix4<f64>,
    lambda: f64,
    mu: f64,
    params: NcParams,
    layout: ModeLayout,
}

impl DarbouxMap {
    /// Builds the map for an explicit scale `lambda`; `mu` follows from
    /// `λμ = (1 + sqrt(1 - θη)) / 2`.
    pub fn with_lambda(params: NcParams, layout: ModeLayout, lambda: f64) -> Result<Self> {
        layout.require_two_by_two()?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Domain(format!(
                "Darboux scale lambda must be positive and finite (got {lambda})"
            )));
        }
        let mu = params.darboux_product() / lambda;
        let (theta, eta) = (params.theta, params.eta);
        #[rustfmt::skip]
        let block = Matrix4::new(
            lambda, 0.0, 0.0, -theta / (2.0 * lambda),
            0.0, lambda, theta / (2.0 * lambda), 0.0,
            0.0, eta / (2.0 * mu), mu, 0.0,
            -eta / (2.0 * mu), 0.0, 0.0, mu,
        );
        Ok(Self {
            block,
            lambda,
            mu,
            params,
            layout,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn params(&self) -> NcParams {
        self.params
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    /// The per-party block `S^A = S^B`.
    pub fn block(&self) -> &Matrix4<f64> {
        &self.block
    }

    /// Inverse of the per-party block.
    ///
    /// `S^A` decouples into the pairs `(x_1, p_2) <- (q_1, k_2)` and
    /// `(x_2, p_1) <- (q_2, k_1)`, each a 2x2 map with determinant
    /// `λμ - θη/(4λμ) = sqrt(1 - θη)`, so the inverse is written out directly.
    pub fn block_inverse(&self) -> Result<Matrix4<f64>> {
        let a = self.params.theta / (2.0 * self.lambda);
        let b = self.params.eta / (2.0 * self.mu);
        let det = self.lambda * self.mu - a * b;
        if !(det.abs() > 1e-14) {
            return Err(Error::SingularMap);
        }
        let (l, m) = (self.lambda / det, self.mu / det);
        let (a, b) = (a / det, b / det);
        #[rustfmt::skip]
        let inv = Matrix4::new(
            m, 0.0, 0.0, a,
            0.0, m, -a, 0.0,
            0.0, -b, l, 0.0,
            b, 0.0, 0.0, l,
        );
        Ok(inv)
    }

    /// Full 8x8 block-diagonal matrix.
    pub fn entries(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(8, 8);
        s.view_mut((0, 0), (4, 4)).copy_from(&self.block);
        s.view_mut((4, 4), (4, 4)).copy_from(&self.block);
        s
    }
}

/// Darboux map in the symmetric gauge `λ = μ = sqrt((1 + sqrt(1 - θη)) / 2)`.
pub fn build_darboux(params: NcParams, layout: ModeLayout) -> Result<DarbouxMap> {
    DarbouxMap::with_lambda(params, layout, params.darboux_product().sqrt())
}

/// `D = S Λ S⁻¹ = Diag[I, S^B Λ^B (S^B)⁻¹]` where `Λ^B` flips the sign of
/// Bob's momenta. `D` is an involution.
pub fn ppt_reflection(darboux: &DarbouxMap) -> Result<DMatrix<f64>> {
    let s_b = darboux.block;
    let s_b_inv = darboux.block_inverse()?;
    let mirror = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, -1.0));
    let mut d = DMatrix::identity(8, 8);
    d.view_mut((4, 4), (4, 4))
        .copy_from(&(s_b * mirror * s_b_inv));
    Ok(d)
}

/// `M Σ Mᵀ`, symmetrized.
pub fn transform_covariance(
    sigma: &CovarianceMatrix,
    map: &DMatrix<f64>,
) -> Result<CovarianceMatrix> {
    let dim = sigma.dim();
    if map.nrows() != dim || map.ncols() != dim {
        return Err(Error::Shape {
            expected: dim,
            rows: map.nrows(),
            cols: map.ncols(),
        });
    }
    let x = map * sigma.entries() * map.transpose();
    let symmetric = (&x + x.transpose()) * 0.5;
    CovarianceMatrix::new(symmetric)
}
