//! Measures on the unit circle and their Cauchy transforms.
//!
//! A [`CircleMeasure`] is a finite list of atoms plus a density with respect
//! to normalized arc length `m`, sampled at the equispaced angles `2πj/M`.
//! The density term of `K(fτ)(z) = ∫ f(ξ) dτ(ξ)/(1 - ξ̄z)` is evaluated from
//! the Fourier coefficients of `f·w`: inside the disk it is the power series
//! `Σ_{n≥0} c_n z^n`, outside it is `-Σ_{n≥1} c_{-n} z^{-n}`. Near the circle
//! this stays accurate where a direct quadrature of the kernel would need
//! `M ≫ 1/(1 - |z|)` points.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::fourier;

/// Distance from the circle below which transforms refuse to evaluate.
pub const ON_CIRCLE_TOL: f64 = 1e-12;
/// Smallest admissible `|Kτ(z)|` in the normalized transform.
pub const DENOMINATOR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleAtom {
    pub angle: f64,
    pub w: f64,
}

impl CircleAtom {
    pub fn point(&self) -> C64 {
        C64::from_polar(1.0, self.angle)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct CircleMeasureDoc {
    #[serde(default)]
    atoms: Vec<CircleAtom>,
    #[serde(default)]
    density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircleMeasureDoc", into = "CircleMeasureDoc")]
pub struct CircleMeasure {
    atoms: Vec<CircleAtom>,
    density: Vec<f64>,
}

impl TryFrom<CircleMeasureDoc> for CircleMeasure {
    type Error = SpectraError;
    fn try_from(doc: CircleMeasureDoc) -> Result<Self> {
        Self::new(doc.atoms, doc.density)
    }
}

impl From<CircleMeasure> for CircleMeasureDoc {
    fn from(m: CircleMeasure) -> Self {
        CircleMeasureDoc {
            atoms: m.atoms,
            density: m.density,
        }
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl CircleMeasure {
    pub fn new(atoms: Vec<CircleAtom>, density: Vec<f64>) -> Result<Self> {
        let mut atoms: Vec<CircleAtom> = atoms
            .into_iter()
            .map(|a| CircleAtom {
                angle: wrap_angle(a.angle),
                w: a.w,
            })
            .collect();
        if atoms
            .iter()
            .any(|a| !a.angle.is_finite() || !(a.w > 0.0) || !a.w.is_finite())
        {
            return Err(SpectraError::InvalidMeasure(
                "atom weights must be positive and finite".into(),
            ));
        }
        atoms.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        if atoms.windows(2).any(|w| w[0].angle == w[1].angle) {
            return Err(SpectraError::InvalidMeasure("atom angles must be distinct".into()));
        }
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(SpectraError::InvalidMeasure(
                "density samples must be finite and nonnegative".into(),
            ));
        }
        let m = Self { atoms, density };
        if !(m.total_mass() > 0.0) {
            return Err(SpectraError::EmptyMeasure);
        }
        Ok(m)
    }

    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let atoms = atoms.iter().map(|&(angle, w)| CircleAtom { angle, w }).collect();
        Self::new(atoms, Vec::new())
    }

    /// Normalized arc length sampled on `samples` points.
    pub fn uniform(samples: usize) -> Self {
        Self {
            atoms: Vec::new(),
            density: vec![1.0; samples.max(1)],
        }
    }

    pub fn atoms(&self) -> &[CircleAtom] {
        &self.atoms
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn resolution(&self) -> usize {
        self.density.len()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// `∫ w dm`, by the equal-weight rule on the sample grid.
    pub fn ac_mass(&self) -> f64 {
        if self.density.is_empty() {
            0.0
        } else {
            self.density.iter().sum::<f64>() / self.density.len() as f64
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass() + self.ac_mass()
    }

    /// `∫ ξ^j dτ(ξ)` for any integer `j`.
    pub fn moment(&self, j: i64) -> C64 {
        let mut acc: C64 = self.atoms.iter().map(|a| a.w * a.point().powi(j as i32)).sum();
        let m = self.density.len();
        if m > 0 {
            // ∫ ξ^j w dm is the Fourier coefficient of w at frequency -j.
            let jj = j.rem_euclid(m as i64) as usize;
            let s: C64 = self
                .density
                .iter()
                .enumerate()
                .map(|(k, &d)| d * C64::from_polar(1.0, fourier::grid_angle((k * jj) % m, m)))
                .sum();
            acc += s / m as f64;
        }
        acc
    }

    /// Moments `∫ ξ^j dτ`, `j = 0..=jmax`, sharing one FFT of the density.
    pub fn moments(&self, jmax: usize) -> Vec<C64> {
        let mut out: Vec<C64> = (0..=jmax)
            .map(|j| self.atoms.iter().map(|a| a.w * a.point().powi(j as i32)).sum())
            .collect();
        let m = self.density.len();
        if m > 0 {
            let c = fourier::coefficients(&self.density.iter().map(|&d| C64::new(d, 0.0)).collect::<Vec<_>>());
            for (j, o) in out.iter_mut().enumerate() {
                *o += c[(m - j % m) % m];
            }
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        let density = match (self.density.len(), other.density.len()) {
            (0, _) => other.density.clone(),
            (_, 0) => self.density.clone(),
            (a, b) if a == b => self.density.iter().zip(&other.density).map(|(x, y)| x + y).collect(),
            (a, b) => return Err(SpectraError::SampleMismatch { expected: a, got: b }),
        };
        let mut atoms = self.atoms.clone();
        for b in &other.atoms {
            match atoms.iter_mut().find(|a| a.angle == b.angle) {
                Some(a) => a.w += b.w,
                None => atoms.push(*b),
            }
        }
        Self::new(atoms, density)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(SpectraError::InvalidMeasure("scale must be positive".into()));
        }
        Self::new(
            self.atoms
                .iter()
                .map(|a| CircleAtom {
                    angle: a.angle,
                    w: a.w * c,
                })
                .collect(),
            self.density.iter().map(|d| d * c).collect(),
        )
    }

    /// Precomputes `K(fτ)` for repeated evaluation.
    pub fn cauchy(&self, f: &CircleFunction) -> Result<CauchyTransform> {
        if f.at_atoms.len() != self.atoms.len() {
            return Err(SpectraError::SampleMismatch {
                expected: self.atoms.len(),
                got: f.at_atoms.len(),
            });
        }
        if !self.density.is_empty() && f.on_grid.len() != self.density.len() {
            return Err(SpectraError::SampleMismatch {
                expected: self.density.len(),
                got: f.on_grid.len(),
            });
        }
        let atoms = self
            .atoms
            .iter()
            .zip(&f.at_atoms)
            .map(|(a, fa)| (a.point().conj(), a.w * fa))
            .collect();
        let coeffs = if self.density.is_empty() {
            Vec::new()
        } else {
            let prod: Vec<C64> = self.density.iter().zip(&f.on_grid).map(|(w, fv)| w * fv).collect();
            fourier::coefficients(&prod)
        };
        Ok(CauchyTransform { atoms, coeffs })
    }

    /// `K(fτ)` and `Kτ` together, for normalized transforms.
    pub fn normalized_cauchy(&self, f: &CircleFunction) -> Result<NormalizedCauchy> {
        Ok(NormalizedCauchy {
            num: self.cauchy(f)?,
            den: self.cauchy(&CircleFunction::constant(self, C64::new(1.0, 0.0)))?,
        })
    }
}

/// A function on the circle given by its values at the atoms and at the
/// density grid of a particular measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    pub at_atoms: Vec<C64>,
    pub on_grid: Vec<C64>,
}

impl CircleFunction {
    pub fn from_fn(tau: &CircleMeasure, f: impl Fn(C64) -> C64) -> Self {
        let at_atoms = tau.atoms.iter().map(|a| f(a.point())).collect();
        let on_grid = fourier::circle_grid(tau.density.len()).into_iter().map(f).collect();
        Self { at_atoms, on_grid }
    }

    pub fn constant(tau: &CircleMeasure, c: C64) -> Self {
        Self {
            at_atoms: vec![c; tau.atoms.len()],
            on_grid: vec![c; tau.density.len()],
        }
    }
}

#[derive(Debug, Clone)]
pub struct CauchyTransform {
    /// `(ζ̄, w f(ζ))` per atom.
    atoms: Vec<(C64, C64)>,
    /// Fourier coefficients of `f·w` in FFT slot order.
    coeffs: Vec<C64>,
}

impl CauchyTransform {
    pub fn eval(&self, z: C64) -> Result<C64> {
        let r = z.norm();
        if !r.is_finite() || (r - 1.0).abs() < ON_CIRCLE_TOL {
            return Err(SpectraError::OnCircle);
        }
        let mut acc: C64 = self.atoms.iter().map(|(zc, wf)| wf / (1.0 - zc * z)).sum();
        if !self.coeffs.is_empty() {
            if r < 1.0 {
                acc += fourier::eval_analytic_part(&self.coeffs, z);
            } else {
                acc -= fourier::eval_antianalytic_part(&self.coeffs, z.inv());
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone)]
pub struct NormalizedCauchy {
    num: CauchyTransform,
    den: CauchyTransform,
}

impl NormalizedCauchy {
    pub fn eval(&self, z: C64) -> Result<C64> {
        let d = self.den.eval(z)?;
        if d.norm() < DENOMINATOR_TOL {
            return Err(SpectraError::VanishingDenominator);
        }
        Ok(self.num.eval(z)? / d)
    }
}

/// `∫ f(ξ) dτ(ξ)/(1 - ξ̄z)` for `|z| ≠ 1`.
pub fn cauchy_transform_circle(f: &CircleFunction, tau: &CircleMeasure, z: C64) -> Result<C64> {
    tau.cauchy(f)?.eval(z)
}

/// `K(fτ)(z)/Kτ(z)`.
pub fn normalized_cauchy(f: &CircleFunction, tau: &CircleMeasure, z: C64) -> Result<C64> {
    tau.normalized_cauchy(f)?.eval(z)
}
