//! End-to-end checks shared by the `acceptance` test target and the
//! `selftest` subcommand.
//!
//! Every check is deterministic: random inputs come from fixed seeds.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    build_darboux, build_omega, ppt_reflection, standard_symplectic, transform_covariance,
    transform_omega_ppt, ModeLayout, NcParams,
};
use crate::error::Result;
use crate::spectra::{
    classify, nc_williamson_spectrum, rsup_holds, uncertainty_min_eigenvalue, Class,
    HERMITIAN_THRESHOLD,
};
use crate::states::{closed_form_invariants_family1, covariance_for, GammaFamily, StateParams};
use crate::sweep::{class_fraction, render_csv, run_sweep, Axis, Preset, RowClass, SweepSpec};

pub const COMMUTATIVE_TOL: f64 = 1e-9;
pub const CLOSED_FORM_REL_TOL: f64 = 1e-9;
pub const STRUCTURE_TOL: f64 = 1e-12;
pub const PPT_EQUIVALENCE_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const ASYMMETRY_MIN: f64 = 1e-6;

/// Random (θ, η) are drawn from `[0, PARAM_MAX]²` and kept when `θη < 1`.
pub const PARAM_MAX: f64 = 2.0;
/// Random correlation radii are drawn from `[0, RADIUS_MAX)`.
pub const RADIUS_MAX: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

pub struct Check {
    pub id: u8,
    pub name: &'static str,
    run: fn() -> Result<(bool, String)>,
}

impl Check {
    pub fn run(&self) -> CheckOutcome {
        let (passed, detail) = match (self.run)() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        CheckOutcome {
            id: self.id,
            name: self.name,
            passed,
            detail,
        }
    }
}

pub const CHECKS: [Check; 10] = [
    Check {
        id: 1,
        name: "commutative-limit formulas",
        run: commutative_limit,
    },
    Check {
        id: 2,
        name: "separability at zero deformation",
        run: zero_deformation_separable,
    },
    Check {
        id: 3,
        name: "closed form vs numerical spectrum",
        run: closed_form_agreement,
    },
    Check {
        id: 4,
        name: "deformation-induced entanglement",
        run: induced_entanglement,
    },
    Check {
        id: 5,
        name: "structural identities",
        run: structural_identities,
    },
    Check {
        id: 6,
        name: "partial-transpose form equivalence",
        run: ppt_equivalence,
    },
    Check {
        id: 7,
        name: "uncertainty principle iff",
        run: williamson_iff,
    },
    Check {
        id: 8,
        name: "theta/eta symmetry contrast",
        run: symmetry_contrast,
    },
    Check {
        id: 9,
        name: "entanglement suppression in family 2",
        run: suppression,
    },
    Check {
        id: 10,
        name: "sweep determinism",
        run: determinism,
    },
];

pub fn check(id: u8) -> &'static Check {
    CHECKS
        .iter()
        .find(|c| c.id == id)
        .expect("unknown check id")
}

pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS.iter().map(Check::run).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample_params(rng: &mut ChaCha8Rng) -> NcParams {
    loop {
        let theta = rng.random_range(0.0..PARAM_MAX);
        let eta = rng.random_range(0.0..PARAM_MAX);
        if let Ok(p) = NcParams::new(theta, eta) {
            return p;
        }
    }
}

/// Radius in `[0, RADIUS_MAX)`, angle in `[0, max_angle)`.
fn sample_state(rng: &mut ChaCha8Rng, max_angle: f64) -> StateParams {
    let r = rng.random_range(0.0..RADIUS_MAX);
    let phi = rng.random_range(0.0..max_angle);
    StateParams::new(r * phi.cos(), r * phi.sin()).expect("radius below one")
}

fn sample_family(rng: &mut ChaCha8Rng) -> GammaFamily {
    if rng.random_bool(0.5) {
        GammaFamily::First
    } else {
        GammaFamily::Second
    }
}

fn structures(params: NcParams) -> Result<(crate::StructureMatrix, crate::StructureMatrix)> {
    let omega = build_omega(params, ModeLayout::TWO_BY_TWO)?;
    let prime = transform_omega_ppt(&omega)?;
    Ok((omega, prime))
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn commutative_limit() -> Result<(bool, String)> {
    let (omega, prime) = structures(NcParams::COMMUTATIVE)?;
    let mut worst: f64 = 0.0;
    for i in 1..=9 {
        let r = i as f64 / 10.0;
        let expected_nu = (1.0 + r).powf(1.5) / (1.0 - r).sqrt();
        let expected_prime = 1.0 + r;
        for angle in [0.0, 0.3, 0.7, 1.1, FRAC_PI_2] {
            let state = StateParams::new(r * f64::cos(angle), r * f64::sin(angle))?;
            let sigma = covariance_for(GammaFamily::First, state)?;
            let nu = nc_williamson_spectrum(&sigma, &omega)?.nu_minus();
            let nu_p = nc_williamson_spectrum(&sigma, &prime)?.nu_minus();
            worst = worst
                .max((nu - expected_nu).abs())
                .max((nu_p - expected_prime).abs());
        }
        for state in [StateParams::weak_m(r)?, StateParams::weak_n(r)?] {
            let sigma = covariance_for(GammaFamily::First, state)?;
            let nu = nc_williamson_spectrum(&sigma, &omega)?.nu_minus();
            let nu_p = nc_williamson_spectrum(&sigma, &prime)?.nu_minus();
            worst = worst
                .max((nu - expected_nu).abs())
                .max((nu_p - expected_prime).abs());
        }
    }
    Ok((
        worst <= COMMUTATIVE_TOL,
        format!("R in 0.1..0.9, max abs error {worst:.3e} (tol {COMMUTATIVE_TOL:e})"),
    ))
}

fn zero_deformation_separable() -> Result<(bool, String)> {
    let (omega, prime) = structures(NcParams::COMMUTATIVE)?;
    let mut total = 0;
    let mut bad = Vec::new();
    for i in 0..20 {
        let r = i as f64 * 0.05;
        for k in 0..8 {
            // full circle of m/n signs
            let angle = k as f64 * std::f64::consts::PI / 4.0 + 0.1;
            let state = StateParams::new(r * angle.cos(), r * angle.sin())?;
            let sigma = covariance_for(GammaFamily::First, state)?;
            let c = classify(&sigma, &omega, &prime)?;
            total += 1;
            if c.class != Class::Separable {
                bad.push(format!("R={r} angle={angle:.3} -> {}", c.class));
            }
        }
    }
    let r = 0.999;
    let sigma = covariance_for(GammaFamily::First, StateParams::weak_m(r)?)?;
    let c = classify(&sigma, &omega, &prime)?;
    total += 1;
    if c.class != Class::Separable {
        bad.push(format!("R={r} -> {}", c.class));
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("{total} points with R in [0, 0.999] all SEPARABLE")
        } else {
            format!(
                "{} of {total} points not SEPARABLE: {}",
                bad.len(),
                bad.join("; ")
            )
        },
    ))
}

fn closed_form_agreement() -> Result<(bool, String)> {
    let mut rng = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let params = sample_params(&mut rng);
        // closed forms hold for m, n >= 0
        let state = sample_state(&mut rng, FRAC_PI_2);
        let sigma = covariance_for(GammaFamily::First, state)?;
        let (omega, prime) = structures(params)?;
        let cf = closed_form_invariants_family1(params, state.m(), state.n_corr())?;
        let nu = nc_williamson_spectrum(&sigma, &omega)?.nu_minus();
        let nu_p = nc_williamson_spectrum(&sigma, &prime)?.nu_minus();
        worst = worst
            .max((nu - cf.nu_minus).abs() / cf.nu_minus)
            .max((nu_p - cf.nu_minus_prime).abs() / cf.nu_minus_prime);
    }
    Ok((
        worst <= CLOSED_FORM_REL_TOL,
        format!("500 tuples, max rel error {worst:.3e} (tol {CLOSED_FORM_REL_TOL:e})"),
    ))
}

fn induced_entanglement() -> Result<(bool, String)> {
    let spec = SweepSpec {
        family: GammaFamily::First,
        state: StateParams::weak_m(0.5)?,
        theta: Axis::fixed(0.125)?,
        eta: Axis::new(0.0, 0.6, 241)?,
    };
    let rows = run_sweep(&spec, 1)?;
    let entangled = rows
        .iter()
        .filter(|r| r.class == RowClass::Entangled)
        .count();
    let lowest = rows
        .iter()
        .min_by(|a, b| a.nu_minus_prime.total_cmp(&b.nu_minus_prime))
        .expect("non-empty sweep");
    Ok((
        entangled > 0,
        format!(
            "R=1/2, theta=1/8, eta in [0,0.6] x241: {entangled} ENTANGLED; \
             min nu'_- = {:.6} at eta = {}",
            lowest.nu_minus_prime, lowest.eta
        ),
    ))
}

fn structural_identities() -> Result<(bool, String)> {
    let mut rng = rng(5);
    let j = standard_symplectic(ModeLayout::TWO_BY_TWO);
    let id = DMatrix::<f64>::identity(8, 8);
    let (mut darboux, mut involution, mut reflected) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..200 {
        let params = sample_params(&mut rng);
        let (omega, prime) = structures(params)?;
        let s = build_darboux(params, ModeLayout::TWO_BY_TWO)?;
        let se = s.entries();
        darboux = darboux.max(max_abs_diff(
            &(&se * j.entries() * se.transpose()),
            omega.entries(),
        ));
        let d = ppt_reflection(&s)?;
        involution = involution.max(max_abs_diff(&(&d * &d), &id));
        let d_inv = d.clone().try_inverse().ok_or(crate::Error::SingularMap)?;
        let mapped = &d_inv * omega.entries() * d_inv.transpose();
        reflected = reflected.max(max_abs_diff(&mapped, prime.entries()));
    }
    let worst = darboux.max(involution).max(reflected);
    Ok((
        worst <= STRUCTURE_TOL,
        format!(
            "200 (theta, eta): |SJS^T - Omega| {darboux:.2e}, |D^2 - I| {involution:.2e}, \
             |D^-1 Omega D^-T - Omega'| {reflected:.2e} (tol {STRUCTURE_TOL:e})"
        ),
    ))
}

fn ppt_equivalence() -> Result<(bool, String)> {
    let mut rng = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let params = sample_params(&mut rng);
        let family = sample_family(&mut rng);
        let state = sample_state(&mut rng, 2.0 * std::f64::consts::PI);
        let sigma = covariance_for(family, state)?;
        let (omega, prime) = structures(params)?;
        let d = ppt_reflection(&build_darboux(params, ModeLayout::TWO_BY_TWO)?)?;
        let reflected = transform_covariance(&sigma, &d)?;
        let a = nc_williamson_spectrum(&reflected, &omega)?;
        let b = nc_williamson_spectrum(&sigma, &prime)?;
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok((
        worst <= PPT_EQUIVALENCE_TOL,
        format!("200 inputs, max abs difference {worst:.3e} (tol {PPT_EQUIVALENCE_TOL:e})"),
    ))
}

fn williamson_iff() -> Result<(bool, String)> {
    let mut rng = rng(7);
    let (mut agree, mut physical, mut nonphysical) = (0, 0, 0);
    let mut disagreements = Vec::new();
    for i in 0..500 {
        let params = sample_params(&mut rng);
        let family = sample_family(&mut rng);
        let state = sample_state(&mut rng, 2.0 * std::f64::consts::PI);
        let mut sigma = covariance_for(family, state)?;
        if i % 2 == 1 {
            let shrink = rng.random_range(0.05..1.0);
            sigma = sigma.scaled(shrink)?;
        }
        let (omega, _) = structures(params)?;
        let holds = rsup_holds(&sigma, &omega)?;
        let direct = uncertainty_min_eigenvalue(&sigma, &omega)? >= HERMITIAN_THRESHOLD;
        if holds {
            physical += 1;
        } else {
            nonphysical += 1;
        }
        if holds == direct {
            agree += 1;
        } else {
            disagreements.push(i);
        }
    }
    Ok((
        agree == 500 && physical > 0 && nonphysical > 0,
        format!(
            "{agree}/500 agree ({physical} physical, {nonphysical} nonphysical){}",
            if disagreements.is_empty() {
                String::new()
            } else {
                format!("; disagreements at {disagreements:?}")
            }
        ),
    ))
}

/// Family-2 point where exchanging θ and η moves `ν₋'`.
pub const ASYMMETRY_WITNESS: (f64, f64) = (0.125, 0.5);

fn symmetry_contrast() -> Result<(bool, String)> {
    let mut sym_worst: f64 = 0.0;
    for state in [StateParams::weak_m(0.5)?, StateParams::weak_n(0.2)?] {
        let sigma = covariance_for(GammaFamily::First, state)?;
        for i in 0..10 {
            for k in 0..5 {
                let theta = 0.6 * i as f64 / 9.0;
                let eta = 0.05 + 0.1 * k as f64;
                let (o, p) = structures(NcParams::new(theta, eta)?)?;
                let (os, ps) = structures(NcParams::new(eta, theta)?)?;
                let a = nc_williamson_spectrum(&sigma, &o)?.nu_minus();
                let b = nc_williamson_spectrum(&sigma, &os)?.nu_minus();
                let ap = nc_williamson_spectrum(&sigma, &p)?.nu_minus();
                let bp = nc_williamson_spectrum(&sigma, &ps)?.nu_minus();
                sym_worst = sym_worst.max((a - b).abs()).max((ap - bp).abs());
            }
        }
    }
    let (theta, eta) = ASYMMETRY_WITNESS;
    let sigma = covariance_for(GammaFamily::Second, StateParams::weak_m(0.5)?)?;
    let (_, p) = structures(NcParams::new(theta, eta)?)?;
    let (_, ps) = structures(NcParams::new(eta, theta)?)?;
    let gap = (nc_williamson_spectrum(&sigma, &p)?.nu_minus()
        - nc_williamson_spectrum(&sigma, &ps)?.nu_minus())
    .abs();
    Ok((
        sym_worst <= SYMMETRY_TOL && gap > ASYMMETRY_MIN,
        format!(
            "family 1 max |nu(theta,eta) - nu(eta,theta)| {sym_worst:.2e} over 50-point grid \
             (tol {SYMMETRY_TOL:e}); family 2 nu'_- gap {gap:.6} at (theta, eta) = (1/8, 1/2), R=1/2, m=R/10"
        ),
    ))
}

fn suppression() -> Result<(bool, String)> {
    let mut counts = [[0usize; 2]; 2];
    let mut cells = 0;
    let mut parts = Vec::new();
    for (fi, preset) in [Preset::Fig2, Preset::Fig4].into_iter().enumerate() {
        for (si, sweep) in preset
            .sweeps(crate::sweep::DEFAULT_STEPS)?
            .into_iter()
            .filter(|s| (s.spec.state.r() - 0.5).abs() < 1e-12)
            .enumerate()
        {
            let rows = run_sweep(&sweep.spec, jobs())?;
            let n = rows
                .iter()
                .filter(|r| r.class == RowClass::Entangled)
                .count();
            counts[fi][si] = n;
            if fi == 0 {
                cells += rows.len();
            }
            parts.push(format!(
                "{} {:.4}",
                sweep.name,
                class_fraction(&rows, RowClass::Entangled)
            ));
        }
    }
    let f1: usize = counts[0].iter().sum();
    let f2: usize = counts[1].iter().sum();
    let per_split_ok = counts[1][0] <= counts[0][0] && counts[1][1] <= counts[0][1];
    let frac = |n: usize| n as f64 / cells as f64;
    Ok((
        f2 < f1 && per_split_ok,
        format!(
            "R=1/2, 241x241: family 1 ENTANGLED fraction {:.4}, family 2 {:.4} ({})",
            frac(f1),
            frac(f2),
            parts.join(", ")
        ),
    ))
}

fn determinism() -> Result<(bool, String)> {
    let spec = SweepSpec {
        family: GammaFamily::First,
        state: StateParams::weak_n(0.5)?,
        theta: Axis::new(0.0, 2.0, 121)?,
        eta: Axis::new(0.0, 2.0, 121)?,
    };
    let first = render_csv(&run_sweep(&spec, 1)?);
    let runs = [
        render_csv(&run_sweep(&spec, 1)?),
        render_csv(&run_sweep(&spec, jobs().max(2))?),
        render_csv(&run_sweep(&spec, 3)?),
    ];
    let identical = runs.iter().all(|r| *r == first);
    Ok((
        identical,
        format!(
            "121x121 grid over [0,2]^2 incl. OUT_OF_DOMAIN cells, {} bytes, serial x2 + parallel x2 {}",
            first.len(),
            if identical { "identical" } else { "DIFFER" }
        ),
    ))
}
