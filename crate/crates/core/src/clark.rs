//! Rational Schur functions and their Clark measures.
//!
//! For `|γ| = 1` the Clark measure `μ_γ` is the probability measure on the
//! circle with `(γ + θ(z))/(γ - θ(z)) = ∫ (ξ + z)/(ξ - z) dμ_γ(ξ)`. Its ac
//! density is `(1 - |θ|²)/|γ - θ|²` on the boundary, and its atoms sit at
//! the boundary solutions of `θ(ξ) = γ`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::fourier;
use crate::measure::{radial_limit, BoundaryLimitSchedule, CircleAtom, CircleFunction, CircleMeasure};
use crate::poly;

/// Boundary resolution used for validation and for sampled densities.
pub const DEFAULT_RESOLUTION: usize = 4096;
/// Slack allowed on `|θ| ≤ 1` and on denominator roots outside the disk.
pub const SCHUR_SLACK: f64 = 1e-10;
/// `1 - |θ|²` below this is treated as zero.
pub const UNIMODULAR_CLAMP: f64 = 1e-12;
/// Mass deficit beyond which a reconstruction is rejected.
pub const MASS_DEFICIT_TOL: f64 = 1e-3;
/// Roots of `θ = γ` this close to the circle are treated as boundary roots.
pub const BOUNDARY_ROOT_TOL: f64 = 1e-6;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum SchurDoc {
    Rational {
        num: Vec<C64>,
        den: Vec<C64>,
    },
    Blaschke {
        zeros: Vec<C64>,
        #[serde(rename = "const")]
        constant: C64,
    },
}

/// `θ = num/den` with `den(0) = 1`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchurDoc", into = "SchurDoc")]
pub struct SchurFunction {
    num: Vec<C64>,
    den: Vec<C64>,
}

impl TryFrom<SchurDoc> for SchurFunction {
    type Error = SpectraError;
    fn try_from(doc: SchurDoc) -> Result<Self> {
        match doc {
            SchurDoc::Rational { num, den } => Self::rational(num, den),
            SchurDoc::Blaschke { zeros, constant } => Self::blaschke(&zeros, constant),
        }
    }
}

impl From<SchurFunction> for SchurDoc {
    fn from(t: SchurFunction) -> Self {
        SchurDoc::Rational { num: t.num, den: t.den }
    }
}

impl SchurFunction {
    pub fn rational(num: Vec<C64>, den: Vec<C64>) -> Result<Self> {
        let num = poly::trim(num, 0.0);
        let den = poly::trim(den, 0.0);
        if den.is_empty() {
            return Err(SpectraError::InvalidSchur("zero denominator".into()));
        }
        if num.iter().chain(&den).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SpectraError::InvalidSchur("non-finite coefficient".into()));
        }
        if den[0] == C64::new(0.0, 0.0) {
            return Err(SpectraError::InvalidSchur("denominator vanishes at 0".into()));
        }
        if num.first().is_some_and(|c| *c != C64::new(0.0, 0.0)) {
            return Err(SpectraError::InvalidSchur("theta(0) must be 0".into()));
        }
        for r in poly::roots(&den)? {
            if r.norm() <= 1.0 + SCHUR_SLACK {
                return Err(SpectraError::InvalidSchur(format!(
                    "denominator root {r} inside the closed disk"
                )));
            }
        }
        let d0 = den[0];
        let t = Self {
            num: num.iter().map(|c| c / d0).collect(),
            den: den.iter().map(|c| c / d0).collect(),
        };
        let sup = t
            .boundary_values(DEFAULT_RESOLUTION)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if sup > 1.0 + SCHUR_SLACK {
            return Err(SpectraError::InvalidSchur(format!(
                "sup of |theta| on the circle is {sup}"
            )));
        }
        Ok(t)
    }

    /// `c · Π (z - a)/(1 - ā z)`; one of the zeros must be 0.
    pub fn blaschke(zeros: &[C64], constant: C64) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return Err(SpectraError::InvalidSchur(
                "Blaschke constant must be unimodular".into(),
            ));
        }
        if zeros.iter().any(|a| !(a.norm() < 1.0)) {
            return Err(SpectraError::InvalidSchur(
                "Blaschke zeros must lie in the open disk".into(),
            ));
        }
        let num = poly::scale(&poly::from_roots(zeros), constant);
        let den = zeros
            .iter()
            .fold(vec![ONE], |acc, a| poly::mul(&acc, &[ONE, -a.conj()]));
        Self::rational(num, den)
    }

    /// `θ(z) = c z^d`.
    pub fn monomial(d: usize, c: C64) -> Result<Self> {
        let mut num = vec![C64::new(0.0, 0.0); d + 1];
        num[d] = c;
        Self::rational(num, vec![ONE])
    }

    /// `θ ≡ 0`.
    pub fn zero() -> Self {
        Self {
            num: Vec::new(),
            den: vec![ONE],
        }
    }

    pub fn numerator(&self) -> &[C64] {
        &self.num
    }

    pub fn denominator(&self) -> &[C64] {
        &self.den
    }

    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        poly::degree(&self.num).max(poly::degree(&self.den))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        poly::eval(&self.num, z) / poly::eval(&self.den, z)
    }

    pub fn derivative(&self, z: C64) -> C64 {
        let (n, dn) = poly::eval_with_derivative(&self.num, z);
        let (d, dd) = poly::eval_with_derivative(&self.den, z);
        (dn * d - n * dd) / (d * d)
    }

    /// `θ` at `exp(2πij/m)`, `j = 0..m`.
    pub fn boundary_values(&self, m: usize) -> Vec<C64> {
        fourier::circle_grid(m).into_iter().map(|z| self.eval(z)).collect()
    }

    /// `Δ = (1 - |θ|²)^{1/2}` at the same points, with `1 - |θ|²` below
    /// [`UNIMODULAR_CLAMP`] set to zero.
    pub fn delta_values(&self, m: usize) -> Vec<f64> {
        self.boundary_values(m).iter().map(|t| delta_of(*t)).collect()
    }

    /// Largest `| |θ| - 1 |` over `m` boundary points.
    pub fn unimodular_deviation(&self, m: usize) -> f64 {
        self.boundary_values(m)
            .iter()
            .map(|t| (t.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_inner(&self) -> bool {
        !self.is_zero() && self.unimodular_deviation(DEFAULT_RESOLUTION) < 1e-10
    }

    /// `γ̄θ`, the function whose Clark measure at 1 is `μ_γ` of `θ`.
    pub fn rotated(&self, gamma: C64) -> Self {
        Self {
            num: poly::scale(&self.num, gamma.conj()),
            den: self.den.clone(),
        }
    }
}

pub fn delta_of(theta: C64) -> f64 {
    let s = 1.0 - theta.norm_sqr();
    if s < UNIMODULAR_CLAMP {
        0.0
    } else {
        s.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClarkFamilyPoint {
    theta: SchurFunction,
    gamma: C64,
}

impl ClarkFamilyPoint {
    pub fn new(theta: SchurFunction, gamma: C64) -> Result<Self> {
        let r = gamma.norm();
        if !((r - 1.0).abs() <= 1e-12) {
            return Err(SpectraError::NonUnimodular(r));
        }
        Ok(Self { theta, gamma })
    }

    pub fn theta(&self) -> &SchurFunction {
        &self.theta
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }
}

/// `(1 - |θ(ξ)|²)/|γ - θ(ξ)|²`; `+∞` where `γ - θ` vanishes but `|θ| < 1`.
pub fn clark_density(point: &ClarkFamilyPoint, xi: C64) -> f64 {
    density_from_value(point.gamma, point.theta.eval(xi))
}

fn density_from_value(gamma: C64, t: C64) -> f64 {
    let mut num = 1.0 - t.norm_sqr();
    if num.abs() < UNIMODULAR_CLAMP {
        num = 0.0;
    }
    let den = (gamma - t).norm_sqr();
    if den.sqrt() < 1e-14 {
        return if t.norm() < 1.0 && num > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    (num / den).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomReport {
    pub angle: f64,
    pub mass: f64,
    /// Last increment of the radial extrapolation.
    pub increment: f64,
    pub converged: bool,
    /// `1/|θ'(ζ)|`, the angular-derivative value of the same mass.
    pub angular_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HerglotzReport {
    pub atoms: Vec<AtomReport>,
    pub ac_mass: f64,
    pub total_mass: f64,
}

/// Clark measure `μ_γ` with its ac density sampled on `resolution` points.
pub fn herglotz_measure(point: &ClarkFamilyPoint, resolution: usize) -> Result<CircleMeasure> {
    herglotz_measure_with_report(point, resolution, &BoundaryLimitSchedule::default()).map(|(m, _)| m)
}

pub fn herglotz_measure_with_report(
    point: &ClarkFamilyPoint,
    resolution: usize,
    schedule: &BoundaryLimitSchedule,
) -> Result<(CircleMeasure, HerglotzReport)> {
    let theta = &point.theta;
    let gamma = point.gamma;
    let m = resolution.max(1);

    let mut density: Vec<f64> = theta
        .boundary_values(m)
        .iter()
        .map(|&t| density_from_value(gamma, t))
        .collect();
    // an atom sitting exactly on a grid point leaves a 0/0 (or +∞) sample
    for j in 0..m {
        if !density[j].is_finite() {
            let l = density[(j + m - 1) % m];
            let r = density[(j + 1) % m];
            density[j] = match (l.is_finite(), r.is_finite()) {
                (true, true) => 0.5 * (l + r),
                (true, false) => l,
                (false, true) => r,
                _ => 0.0,
            };
        }
    }

    // θ = γ  ⇔  p = num - γ·den = 0
    let p = poly::trim(poly::add(&theta.num, &poly::scale(&theta.den, -gamma)), 0.0);
    let all_roots = poly::roots(&p)?;
    let lead = *p.last().ok_or(SpectraError::AtomLocationFailed)?;
    let mut atoms = Vec::new();
    let mut reports = Vec::new();
    for r in all_roots.iter().filter(|r| (r.norm() - 1.0).abs() < BOUNDARY_ROOT_TOL) {
        let zeta = r / r.norm();
        let others: Vec<C64> = all_roots.iter().filter(|o| !std::ptr::eq(*o, r)).copied().collect();
        // γ - θ(w) = -p(w)/den(w) with p in product form: accurate near ζ
        let h = |w: C64| -> Result<C64> {
            let pw = lead * (w - zeta) * others.iter().map(|o| w - o).product::<C64>();
            let dw = poly::eval(&theta.den, w);
            let nw = poly::eval(&theta.num, w);
            let ratio = (gamma * dw + nw) / (-pw);
            Ok(C64::new(0.5 * (1.0 - w.norm()) * ratio.re, 0.0))
        };
        let est = radial_limit(h, zeta, schedule)?;
        let mass = est.value.re;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(SpectraError::AtomLocationFailed);
        }
        let angle = crate::measure::circle::wrap_angle(zeta.arg());
        atoms.push(CircleAtom { angle, w: mass });
        reports.push(AtomReport {
            angle,
            mass,
            increment: est.increment,
            converged: est.converged,
            angular_mass: 1.0 / theta.derivative(zeta).norm(),
        });
    }

    let ac_mass = density.iter().sum::<f64>() / m as f64;
    let total = ac_mass + atoms.iter().map(|a| a.w).sum::<f64>();
    if (total - 1.0).abs() > MASS_DEFICIT_TOL {
        return Err(SpectraError::ReconstructionInconsistent((1.0 - total).abs()));
    }
    let keep_density = density.iter().any(|&d| d > 0.0);
    let measure = CircleMeasure::new(atoms, if keep_density { density } else { Vec::new() })?;
    Ok((
        measure,
        HerglotzReport {
            atoms: reports,
            ac_mass,
            total_mass: total,
        },
    ))
}

/// `z · K(ξ̄μ)(z)/Kμ(z)`, evaluated repeatedly for one measure.
#[derive(Debug, Clone)]
pub struct CharacteristicFromMeasure {
    inner: crate::measure::NormalizedCauchy,
}

impl CharacteristicFromMeasure {
    pub fn new(mu: &CircleMeasure) -> Result<Self> {
        let f = CircleFunction::from_fn(mu, |x| x.conj());
        Ok(Self {
            inner: mu.normalized_cauchy(&f)?,
        })
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if !(z.norm() < 1.0) {
            return Err(SpectraError::OnCircle);
        }
        if z == C64::new(0.0, 0.0) {
            return Ok(z);
        }
        Ok(z * self.inner.eval(z)?)
    }
}

pub fn characteristic_from_measure(mu: &CircleMeasure, z: C64) -> Result<C64> {
    CharacteristicFromMeasure::new(mu)?.eval(z)
}

/// `max |θ(z) - γ z C_{ξ̄μ_γ}(z)|` over the given `γ` and `z`.
pub fn aleksandrov_consistency(theta: &SchurFunction, gammas: &[C64], zs: &[C64], resolution: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for &g in gammas {
        let mu = herglotz_measure(&ClarkFamilyPoint::new(theta.clone(), g)?, resolution)?;
        let ch = CharacteristicFromMeasure::new(&mu)?;
        for &z in zs {
            worst = worst.max((theta.eval(z) - g * ch.eval(z)?).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn point(theta: SchurFunction, gamma: C64) -> ClarkFamilyPoint {
        ClarkFamilyPoint::new(theta, gamma).unwrap()
    }

    #[test]
    fn validation() {
        assert!(SchurFunction::rational(vec![c(0.5, 0.0), c(0.1, 0.0)], vec![ONE]).is_err());
        assert!(SchurFunction::rational(vec![c(0.0, 0.0), c(1.5, 0.0)], vec![ONE]).is_err());
        assert!(SchurFunction::rational(vec![c(0.0, 0.0), c(0.1, 0.0)], vec![ONE, c(-1.0, 0.0)]).is_err());
        assert!(SchurFunction::blaschke(&[c(0.3, 0.0)], ONE).is_err());
        assert!(ClarkFamilyPoint::new(SchurFunction::zero(), c(1.0, 1.0)).is_err());
        let b = SchurFunction::blaschke(&[c(0.0, 0.0), c(0.5, 0.2)], c(0.0, 1.0)).unwrap();
        assert!(b.is_inner());
        assert_eq!(b.degree(), 2);
    }

    #[test]
    fn json_forms() {
        let t: SchurFunction =
            serde_json::from_str(r#"{"type":"rational","num":[[0,0],[0.5,0]],"den":[[1,0]]}"#).unwrap();
        assert!((t.eval(c(0.2, 0.0)) - 0.1).norm() < 1e-15);
        let b: SchurFunction = serde_json::from_str(r#"{"type":"blaschke","zeros":[[0,0]],"const":[1,0]}"#).unwrap();
        assert!((b.eval(c(0.3, 0.4)) - c(0.3, 0.4)).norm() < 1e-15);
        assert!(serde_json::from_str::<SchurFunction>(r#"{"type":"rational","num":[[1,0]],"den":[[1,0]]}"#).is_err());
    }

    #[test]
    fn density_examples() {
        let p = point(SchurFunction::monomial(1, c(0.5, 0.0)).unwrap(), ONE);
        assert!((clark_density(&p, ONE) - 3.0).abs() < 1e-12);
        let z2 = point(SchurFunction::monomial(2, ONE).unwrap(), ONE);
        assert_eq!(clark_density(&z2, C64::from_polar(1.0, 0.7)), 0.0);
        let zero = point(SchurFunction::zero(), c(0.0, 1.0));
        assert_eq!(clark_density(&zero, C64::from_polar(1.0, 2.0)), 1.0);
    }

    #[test]
    fn herglotz_of_monomials() {
        let mu = herglotz_measure(&point(SchurFunction::monomial(1, ONE).unwrap(), ONE), 256).unwrap();
        assert_eq!(mu.atoms().len(), 1);
        assert!((mu.atoms()[0].w - 1.0).abs() < 1e-9);
        assert!(mu.density().is_empty());

        let mu = herglotz_measure(&point(SchurFunction::monomial(2, ONE).unwrap(), ONE), 256).unwrap();
        let mut a = mu.atoms().to_vec();
        a.sort_by(|x, y| x.angle.total_cmp(&y.angle));
        assert_eq!(a.len(), 2);
        assert!(a[0].angle.abs() < 1e-12 && (a[1].angle - PI).abs() < 1e-12);
        assert!((a[0].w - 0.5).abs() < 1e-9 && (a[1].w - 0.5).abs() < 1e-9);

        let mu = herglotz_measure(&point(SchurFunction::zero(), ONE), 64).unwrap();
        assert!(mu.atoms().is_empty());
        assert!(mu.density().iter().all(|&d| d == 1.0));
    }

    #[test]
    fn radial_masses_match_angular_derivative() {
        let b = SchurFunction::blaschke(&[c(0.0, 0.0), c(0.4, -0.3), c(-0.2, 0.6)], ONE).unwrap();
        for g in [ONE, c(0.0, 1.0), C64::from_polar(1.0, 2.5)] {
            let (mu, rep) =
                herglotz_measure_with_report(&point(b.clone(), g), 512, &BoundaryLimitSchedule::default()).unwrap();
            assert_eq!(rep.atoms.len(), 3);
            for a in &rep.atoms {
                assert!((a.mass - a.angular_mass).abs() < 1e-8, "{a:?}");
            }
            assert!((mu.total_mass() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn characteristic_examples() {
        let m = CircleMeasure::uniform(64);
        assert!(characteristic_from_measure(&m, c(0.3, 0.2)).unwrap().norm() < 1e-14);
        let d1 = CircleMeasure::from_atoms(&[(0.0, 1.0)]).unwrap();
        assert!((characteristic_from_measure(&d1, c(0.3, 0.2)).unwrap() - c(0.3, 0.2)).norm() < 1e-14);
        let pair = CircleMeasure::from_atoms(&[(0.0, 0.5), (PI, 0.5)]).unwrap();
        let z = c(-0.4, 0.5);
        assert!((characteristic_from_measure(&pair, z).unwrap() - z * z).norm() < 1e-14);
    }

    #[test]
    fn consistency_examples() {
        let z2 = SchurFunction::monomial(2, ONE).unwrap();
        let gs = [ONE, c(0.0, 1.0), c(-1.0, 0.0)];
        assert!(aleksandrov_consistency(&z2, &gs, &[c(0.4, 0.0)], 256).unwrap() < 1e-8);
        let half = SchurFunction::monomial(1, c(0.5, 0.0)).unwrap();
        let zs: Vec<C64> = (0..10)
            .map(|k| C64::from_polar(0.1 * k as f64 % 0.95, 0.7 * k as f64))
            .collect();
        assert!(aleksandrov_consistency(&half, &[ONE, c(-1.0, 0.0)], &zs, 4096).unwrap() < 1e-6);
        assert!(aleksandrov_consistency(&SchurFunction::zero(), &[ONE], &zs, 64).unwrap() < 1e-14);
    }

    #[test]
    fn mixed_measure_has_atom_and_density() {
        // θ = z(1 + z)/2 touches 1 only at ξ = 1
        let t = SchurFunction::rational(vec![c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)], vec![ONE]).unwrap();
        let (mu, rep) =
            herglotz_measure_with_report(&point(t.clone(), ONE), 4096, &BoundaryLimitSchedule::default()).unwrap();
        assert_eq!(rep.atoms.len(), 1);
        assert!((rep.atoms[0].mass - 1.0 / 1.5).abs() < 1e-8);
        assert!((mu.total_mass() - 1.0).abs() < 1e-6);
        let ch = CharacteristicFromMeasure::new(&mu).unwrap();
        let z = c(0.3, -0.5);
        assert!((ch.eval(z).unwrap() - t.eval(z)).norm() < 1e-6);
    }
}
