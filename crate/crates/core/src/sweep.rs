//! Rectangular (θ, η) sweeps and their CSV representation.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::algebra::{build_omega, transform_omega_ppt, ModeLayout, NcParams};
use crate::error::{Error, Result};
use crate::spectra::{classify, Class};
use crate::states::{covariance_for, CovarianceMatrix, GammaFamily, StateParams};

pub const CSV_HEADER: &str = "theta,eta,nu_minus,nu_minus_prime,class";

/// Default resolution of region sweeps.
pub const DEFAULT_STEPS: usize = 241;

/// One grid axis: `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min < 0.0 || min > max {
            return Err(Error::Domain(format!(
                "axis needs 0 <= min <= max (got {min}:{max})"
            )));
        }
        if steps == 0 || (steps == 1 && min != max) {
            return Err(Error::Domain(format!(
                "axis {min}:{max} needs at least 2 steps (a single step only for min == max)"
            )));
        }
        Ok(Self { min, max, steps })
    }

    /// A single fixed value.
    pub fn fixed(value: f64) -> Result<Self> {
        Self::new(value, value, 1)
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 || i == 0 {
            self.min
        } else if i + 1 == self.steps {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.steps)
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `MIN:MAX:STEPS`
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |detail: String| Error::Parse {
            what: "range",
            detail,
        };
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(parse_err(format!("expected MIN:MAX:STEPS, got {s:?}")));
        }
        let min = parts[0]
            .trim()
            .parse::<f64>()
            .map_err(|e| parse_err(format!("{:?}: {e}", parts[0])))?;
        let max = parts[1]
            .trim()
            .parse::<f64>()
            .map_err(|e| parse_err(format!("{:?}: {e}", parts[1])))?;
        let steps = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| parse_err(format!("{:?}: {e}", parts[2])))?;
        Axis::new(min, max, steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: GammaFamily,
    pub state: StateParams,
    pub theta: Axis,
    pub eta: Axis,
}

impl SweepSpec {
    pub fn len(&self) -> usize {
        self.theta.steps * self.eta.steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point for row index `idx` (θ outer, η inner).
    pub fn point(&self, idx: usize) -> (f64, f64) {
        (
            self.theta.value(idx / self.eta.steps),
            self.eta.value(idx % self.eta.steps),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowClass {
    Nonphysical,
    Separable,
    Entangled,
    OutOfDomain,
}

impl RowClass {
    pub fn token(&self) -> &'static str {
        match self {
            RowClass::Nonphysical => "NONPHYSICAL",
            RowClass::Separable => "SEPARABLE",
            RowClass::Entangled => "ENTANGLED",
            RowClass::OutOfDomain => "OUT_OF_DOMAIN",
        }
    }
}

impl From<Class> for RowClass {
    fn from(c: Class) -> Self {
        match c {
            Class::Nonphysical => RowClass::Nonphysical,
            Class::Separable => RowClass::Separable,
            Class::Entangled => RowClass::Entangled,
        }
    }
}

impl fmt::Display for RowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for RowClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "OUT_OF_DOMAIN" {
            return Ok(RowClass::OutOfDomain);
        }
        s.parse::<Class>().map(RowClass::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub eta: f64,
    pub nu_minus: f64,
    pub nu_minus_prime: f64,
    pub class: RowClass,
}

impl SweepRow {
    fn out_of_domain(theta: f64, eta: f64) -> Self {
        Self {
            theta,
            eta,
            nu_minus: f64::NAN,
            nu_minus_prime: f64::NAN,
            class: RowClass::OutOfDomain,
        }
    }

    /// Class implied by the row's own ν columns and coordinates.
    pub fn recomputed_class(&self) -> RowClass {
        if !(self.theta * self.eta < 1.0) {
            RowClass::OutOfDomain
        } else {
            Class::from_invariants(self.nu_minus, self.nu_minus_prime).into()
        }
    }

    pub fn is_consistent(&self) -> bool {
        let class_ok = self.recomputed_class() == self.class;
        let sentinels_ok = match self.class {
            RowClass::OutOfDomain => self.nu_minus.is_nan() && self.nu_minus_prime.is_nan(),
            _ => self.nu_minus.is_finite() && self.nu_minus_prime.is_finite(),
        };
        class_ok && sentinels_ok
    }
}

/// Classifies one grid point; points with θη ≥ 1 become `OUT_OF_DOMAIN` rows.
pub fn evaluate_point(sigma: &CovarianceMatrix, theta: f64, eta: f64) -> Result<SweepRow> {
    let params = match NcParams::new(theta, eta) {
        Ok(p) => p,
        Err(Error::Domain(_)) if theta * eta >= 1.0 => {
            return Ok(SweepRow::out_of_domain(theta, eta))
        }
        Err(e) => return Err(e),
    };
    let omega = build_omega(params, ModeLayout::TWO_BY_TWO)?;
    let prime = transform_omega_ppt(&omega)?;
    let c = classify(sigma, &omega, &prime)?;
    Ok(SweepRow {
        theta,
        eta,
        nu_minus: c.nu_minus,
        nu_minus_prime: c.nu_minus_prime,
        class: c.class.into(),
    })
}

/// Runs the sweep on `jobs` worker threads (`jobs <= 1` runs serially).
/// Rows come back in grid order regardless of `jobs`.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>> {
    let sigma = covariance_for(spec.family, spec.state)?;
    let eval = |idx: usize| {
        let (theta, eta) = spec.point(idx);
        evaluate_point(&sigma, theta, eta)
    };
    if jobs <= 1 {
        return (0..spec.len()).map(eval).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))?;
    pool.install(|| (0..spec.len()).into_par_iter().map(eval).collect())
}

/// Shortest decimal that round-trips to the same `f64`; `NaN` for sentinels.
fn fmt_float(out: &mut String, v: f64) {
    write!(out, "{v}").unwrap();
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        for v in [row.theta, row.eta, row.nu_minus, row.nu_minus_prime] {
            fmt_float(&mut out, v);
            out.push(',');
        }
        out.push_str(row.class.token());
        out.push('\n');
    }
    out
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    w.write_all(render_csv(rows).as_bytes())?;
    w.flush()
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => {
            return Err(Error::Parse {
                what: "csv header",
                detail: format!("expected {CSV_HEADER:?}, got {other:?}"),
            })
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let row_err = |detail: String| Error::Parse {
                what: "csv row",
                detail: format!("line {}: {detail}", i + 2),
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(row_err(format!("expected 5 fields, got {}", fields.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| row_err(format!("{s:?}: {e}")));
            Ok(SweepRow {
                theta: num(fields[0])?,
                eta: num(fields[1])?,
                nu_minus: num(fields[2])?,
                nu_minus_prime: num(fields[3])?,
                class: fields[4]
                    .parse()
                    .map_err(|e: Error| row_err(e.to_string()))?,
            })
        })
        .collect()
}

/// Fraction of rows in the given class.
pub fn class_fraction(rows: &[SweepRow], class: RowClass) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().filter(|r| r.class == class).count() as f64 / rows.len() as f64
}

/// A sweep with a file-friendly name, as produced by the figure presets.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSweep {
    pub name: String,
    pub spec: SweepSpec,
}

/// Correlation radii of the region figures.
pub const PRESET_RADII: [f64; 3] = [0.1, 0.2, 0.5];

/// Fixed deformation values of the curve figures.
pub const PRESET_FIXED: [f64; 3] = [0.0, 0.125, 0.25];

const PRESET_AXIS_MAX: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Family 1 curves: θ (or η) fixed, the other on [0, 0.6].
    Fig1,
    /// Family 1 region maps over [0, 0.6]² for each radius and m/n split.
    Fig2,
    /// Family 2 curves.
    Fig3,
    /// Family 2 region maps.
    Fig4,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            other => Err(Error::Parse {
                what: "preset",
                detail: format!("expected fig1..fig4, got {other:?}"),
            }),
        }
    }
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    pub fn family(&self) -> GammaFamily {
        match self {
            Preset::Fig1 | Preset::Fig2 => GammaFamily::First,
            Preset::Fig3 | Preset::Fig4 => GammaFamily::Second,
        }
    }

    /// Expands the preset into its sweeps, `steps` points per varying axis.
    pub fn sweeps(&self, steps: usize) -> Result<Vec<NamedSweep>> {
        let family = self.family();
        let span = Axis::new(0.0, PRESET_AXIS_MAX, steps)?;
        let mut out = Vec::new();
        match self {
            Preset::Fig1 | Preset::Fig3 => {
                for r in PRESET_RADII {
                    let state = StateParams::weak_m(r)?;
                    for fixed in PRESET_FIXED {
                        out.push(NamedSweep {
                            name: format!("{}_R{r}_theta{fixed}", self.name()),
                            spec: SweepSpec {
                                family,
                                state,
                                theta: Axis::fixed(fixed)?,
                                eta: span,
                            },
                        });
                        out.push(NamedSweep {
                            name: format!("{}_R{r}_eta{fixed}", self.name()),
                            spec: SweepSpec {
                                family,
                                state,
                                theta: span,
                                eta: Axis::fixed(fixed)?,
                            },
                        });
                    }
                }
            }
            Preset::Fig2 | Preset::Fig4 => {
                for (split, make) in [
                    (
                        "weak_m",
                        StateParams::weak_m as fn(f64) -> Result<StateParams>,
                    ),
                    ("weak_n", StateParams::weak_n),
                ] {
                    for r in PRESET_RADII {
                        out.push(NamedSweep {
                            name: format!("{}_{split}_R{r}", self.name()),
                            spec: SweepSpec {
                                family,
                                state: make(r)?,
                                theta: span,
                                eta: span,
                            },
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}
