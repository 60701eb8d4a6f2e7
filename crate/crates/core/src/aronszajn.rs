//! Self-adjoint rank-one families `A_α = A + α(·,φ)φ` in the spectral
//! representation of `A` with respect to the cyclic vector `φ`.
//!
//! Everything is computed from the base measure `μ` through
//! `F(z) = ∫ dμ(t)/(t - z)` and `G(x) = ∫ dμ(t)/(t - x)²`:
//! the ac density of `μ_α` is `π⁻¹ Im F/|1 + αF|²` at the boundary, and the
//! atoms outside the support of `μ` are the roots of `1 + αF(x) = 0`, each
//! of mass `1/(α² G(x))`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SpectraError};
use crate::measure::{extrapolate, BoundaryLimitSchedule, LimitEstimate, RealLineMeasure};

/// Bisection stops once the bracket is this short (relative to `max(1, |x|)`).
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationFamily {
    base: RealLineMeasure,
    alpha: f64,
}

impl PerturbationFamily {
    pub fn new(base: RealLineMeasure, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(SpectraError::InvalidMeasure("coupling must be finite".into()));
        }
        Ok(Self { base, alpha })
    }

    pub fn base(&self) -> &RealLineMeasure {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `[min - |α|·mass - 1, max + |α|·mass + 1]` around the support.
    pub fn search_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support_hint();
        let pad = self.alpha.abs() * self.base.total_mass() + 1.0;
        (lo - pad, hi + pad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub pos: f64,
    pub w: f64,
    /// `|1 + αF(x)|` at the returned position.
    pub residual: f64,
    pub g: f64,
}

/// Boundary value of the ac density of `μ_α` at `x`.
pub fn ac_density(fam: &PerturbationFamily, x: f64, schedule: &BoundaryLimitSchedule) -> Result<LimitEstimate> {
    let alpha = fam.alpha;
    let values = schedule
        .epsilons()
        .iter()
        .map(|&eps| {
            let f = fam.base.borel_transform(C64::new(x, eps))?;
            let d = (1.0 + alpha * f).norm_sqr();
            Ok(C64::new(f.im / (PI * d), 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut est = extrapolate(schedule, &values);
    est.value = C64::new(est.value.re.max(0.0), 0.0);
    Ok(est)
}

/// Closed pieces of the support: atoms as degenerate intervals plus maximal
/// runs of positive density, merged where they overlap.
fn support_pieces(mu: &RealLineMeasure) -> Vec<(f64, f64)> {
    let mut pieces: Vec<(f64, f64)> = mu.atoms().iter().map(|a| (a.pos, a.pos)).collect();
    pieces.extend(mu.density_support());
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for p in pieces {
        match merged.last_mut() {
            Some(last) if p.0 <= last.1 => last.1 = last.1.max(p.1),
            _ => merged.push(p),
        }
    }
    merged
}

/// Atoms of `μ_α` outside the support of `μ`.
///
/// Each gap of the support (and the two outer rays, cut at `search`) is
/// scanned for a sign change of `1 + αF`, which is monotone there because
/// `F' = G > 0`. Roots inside the ac support are not searched for.
pub fn find_eigenvalues(fam: &PerturbationFamily, search: Option<(f64, f64)>) -> Result<Vec<Eigenvalue>> {
    let alpha = fam.alpha;
    if alpha == 0.0 {
        return Err(SpectraError::Unperturbed);
    }
    let (lo, hi) = search.unwrap_or_else(|| fam.search_interval());
    let target = -1.0 / alpha;
    let mu = &fam.base;
    let pieces = support_pieces(mu);
    let h = |x: f64| mu.borel_real(x).map(|f| f - target);

    let mut gaps: Vec<(Endpoint, Endpoint)> = Vec::new();
    if let (Some(first), Some(last)) = (pieces.first(), pieces.last()) {
        if lo < first.0 {
            gaps.push((Endpoint::Point(lo), Endpoint::Support(first.0)));
        }
        for w in pieces.windows(2) {
            gaps.push((Endpoint::Support(w[0].1), Endpoint::Support(w[1].0)));
        }
        if hi > last.1 {
            gaps.push((Endpoint::Support(last.1), Endpoint::Point(hi)));
        }
    }

    let mut out = Vec::new();
    for (left, right) in gaps {
        let (a, b) = (left.x(), right.x());
        let Some((mut x_lo, mut x_hi)) = bracket(&h, left, right) else {
            continue;
        };
        for _ in 0..200 {
            if x_hi - x_lo <= ROOT_TOL * x_lo.abs().max(x_hi.abs()).max(1.0) {
                break;
            }
            let mid = 0.5 * (x_lo + x_hi);
            match h(mid) {
                Some(v) if v < 0.0 => x_lo = mid,
                Some(_) => x_hi = mid,
                None => break,
            }
        }
        let mut x = 0.5 * (x_lo + x_hi);
        if let Some(v) = h(x) {
            let g = mu.g_function(x);
            if g.is_finite() && g > 0.0 {
                let polished = x - v / g;
                if polished > a && polished < b {
                    if let Some(vp) = h(polished) {
                        if vp.abs() <= v.abs() {
                            x = polished;
                        }
                    }
                }
            }
        }
        let g = mu.g_function(x);
        let Some(f) = mu.borel_real(x) else { continue };
        if !g.is_finite() {
            continue;
        }
        out.push(Eigenvalue {
            pos: x,
            w: 1.0 / (alpha * alpha * g),
            residual: (1.0 + alpha * f).abs(),
            g,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
enum Endpoint {
    /// A plain evaluation point (end of the search interval).
    Point(f64),
    /// Edge of the support, approached from inside the gap.
    Support(f64),
}

impl Endpoint {
    fn x(self) -> f64 {
        match self {
            Endpoint::Point(x) | Endpoint::Support(x) => x,
        }
    }
}

/// Finds `x_lo < x_hi` in the open gap with `h(x_lo) < 0 ≤ h(x_hi)`.
fn bracket(h: &impl Fn(f64) -> Option<f64>, left: Endpoint, right: Endpoint) -> Option<(f64, f64)> {
    let (a, b) = (left.x(), right.x());
    if !(b > a) {
        return None;
    }
    // approach each end geometrically; a plain endpoint is evaluated directly
    let probe = |end: Endpoint, toward: f64, want_negative: bool| -> Option<f64> {
        match end {
            Endpoint::Point(x) => {
                let v = h(x)?;
                ((v < 0.0) == want_negative).then_some(x)
            }
            Endpoint::Support(x) => {
                for k in 1..=60 {
                    let p = x + (toward - x) * 0.5f64.powi(k);
                    if p == x {
                        break;
                    }
                    if let Some(v) = h(p) {
                        if (v < 0.0) == want_negative {
                            return Some(p);
                        }
                    }
                }
                None
            }
        }
    };
    let x_lo = probe(left, b, true)?;
    let x_hi = probe(right, a, false)?;
    (x_lo < x_hi).then_some((x_lo, x_hi))
}

/// Atoms of `μ_α` regardless of coupling (the base atoms when `α = 0`).
pub fn point_spectrum(fam: &PerturbationFamily) -> Result<Vec<Eigenvalue>> {
    if fam.alpha == 0.0 {
        return Ok(fam
            .base
            .atoms()
            .iter()
            .map(|a| Eigenvalue {
                pos: a.pos,
                w: a.w,
                residual: 0.0,
                g: f64::INFINITY,
            })
            .collect());
    }
    find_eigenvalues(fam, None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySamples {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionDiagnostics {
    /// Largest final increment of the boundary extrapolation over the grid.
    pub max_increment: f64,
    /// Grid points where the extrapolation did not settle.
    pub unconverged: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    pub alpha: f64,
    pub atoms: Vec<Eigenvalue>,
    pub density: DensitySamples,
    pub diagnostics: DecompositionDiagnostics,
}

impl SpectralDecomposition {
    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// Trapezoid mass of the sampled ac density.
    pub fn ac_mass(&self) -> f64 {
        let g = &self.density.grid;
        let v = &self.density.values;
        (1..g.len()).map(|i| 0.5 * (g[i] - g[i - 1]) * (v[i] + v[i - 1])).sum()
    }
}

/// Atoms and ac density of `μ_α` sampled on `grid`.
///
/// Off the closed density support of `μ` the ac density of `μ_α` vanishes
/// and is written as an exact zero, as it is everywhere for a purely atomic
/// base.
pub fn perturbed_measure(
    fam: &PerturbationFamily,
    grid: &[f64],
    schedule: &BoundaryLimitSchedule,
) -> Result<SpectralDecomposition> {
    let atoms = point_spectrum(fam)?;
    let support = fam.base.density_support();
    let inside = |x: f64| support.iter().any(|&(a, b)| x >= a && x <= b);
    let mut values = Vec::with_capacity(grid.len());
    let mut max_increment = 0.0f64;
    let mut unconverged = Vec::new();
    for &x in grid {
        if !inside(x) {
            values.push(0.0);
            continue;
        }
        if fam.alpha == 0.0 {
            values.push(fam.base.density_at(x));
            continue;
        }
        let est = ac_density(fam, x, schedule)?;
        max_increment = max_increment.max(est.increment);
        if !est.converged {
            unconverged.push(x);
        }
        values.push(est.value.re);
    }
    Ok(SpectralDecomposition {
        alpha: fam.alpha,
        atoms,
        density: DensitySamples {
            grid: grid.to_vec(),
            values,
        },
        diagnostics: DecompositionDiagnostics {
            max_increment,
            unconverged,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub alpha: f64,
    pub beta: f64,
    pub atoms_alpha: Vec<f64>,
    pub atoms_beta: Vec<f64>,
    /// `+∞` when either atom set is empty.
    pub min_separation: f64,
    pub pass: bool,
}

/// Smallest separation allowed between atoms of `μ_α` and `μ_β`.
pub const SEPARATION_TOL: f64 = 1e-9;

/// Compares the atoms of `μ_α` and `μ_β` for a common base.
pub fn mutual_singularity_check(fa: &PerturbationFamily, fb: &PerturbationFamily) -> Result<SingularityReport> {
    if fa.base != fb.base {
        return Err(SpectraError::InvalidMeasure(
            "families must share the base measure".into(),
        ));
    }
    if fa.alpha == fb.alpha {
        return Err(SpectraError::IdenticalCouplings);
    }
    let xa: Vec<f64> = point_spectrum(fa)?.iter().map(|e| e.pos).collect();
    let xb: Vec<f64> = point_spectrum(fb)?.iter().map(|e| e.pos).collect();
    let mut min_separation = f64::INFINITY;
    for a in &xa {
        for b in &xb {
            min_separation = min_separation.min((a - b).abs());
        }
    }
    Ok(SingularityReport {
        alpha: fa.alpha,
        beta: fb.alpha,
        atoms_alpha: xa,
        atoms_beta: xb,
        min_separation,
        pass: min_separation > SEPARATION_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Divergence {
    Diverges,
    Converges,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RearrangementReport {
    /// `(δ, ∫_δ^ε x⁻² w*(x) dx)` with `ε` the first schedule entry.
    pub partial_integrals: Vec<(f64, f64)>,
    /// Slope of `log P(δ)` against `log(1/δ)` over the resolved tail.
    pub exponent: f64,
    pub indicator: Divergence,
}

/// Fitted exponent above which the partial integrals are declared divergent.
pub const DIVERGENCE_EXPONENT: f64 = 0.25;
/// Fitted exponent below which they are declared convergent.
pub const CONVERGENCE_EXPONENT: f64 = 0.05;

/// Tests `∫_0^ε x⁻² w*_I(x) dx = ∞` for density samples `w` taken with
/// equal weights on an interval of length `len`.
///
/// The increasing rearrangement is the sorted step function with step
/// `len/n`; only offsets `δ ≥ 4·len/n` enter the fit, since below that the
/// step function no longer resolves `w*`.
pub fn rearrangement_condition(w: &[f64], len: f64, epsilons: &[f64]) -> Result<RearrangementReport> {
    if w.iter().any(|v| !(*v >= 0.0)) {
        return Err(SpectraError::NotADensity);
    }
    if w.is_empty() || !(len > 0.0) {
        return Err(SpectraError::InvalidMeasure("empty sample set".into()));
    }
    if epsilons.len() < 2 || epsilons.windows(2).any(|p| !(p[1] < p[0])) || !(epsilons[epsilons.len() - 1] > 0.0) {
        return Err(SpectraError::InvalidSchedule(
            "offsets must be positive and strictly decreasing".into(),
        ));
    }
    let mut sorted = w.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = len / sorted.len() as f64;
    let eps = epsilons[0];
    let integral = |delta: f64| -> f64 {
        let mut acc = 0.0;
        for (i, &v) in sorted.iter().enumerate() {
            let lo = (i as f64 * h).max(delta);
            let hi = ((i + 1) as f64 * h).min(eps);
            if hi > lo && v > 0.0 {
                acc += v * (1.0 / lo - 1.0 / hi);
            }
        }
        acc
    };
    let partial_integrals: Vec<(f64, f64)> = epsilons[1..].iter().map(|&d| (d, integral(d))).collect();
    let resolved: Vec<(f64, f64)> = partial_integrals
        .iter()
        .copied()
        .filter(|&(d, _)| d >= 4.0 * h)
        .collect();
    if resolved.iter().all(|&(_, p)| p == 0.0) && resolved.len() >= 2 {
        return Ok(RearrangementReport {
            partial_integrals,
            exponent: 0.0,
            indicator: Divergence::Converges,
        });
    }
    let pts: Vec<(f64, f64)> = resolved
        .iter()
        .filter(|&&(_, p)| p > 0.0)
        .map(|&(d, p)| ((1.0 / d).ln(), p.ln()))
        .collect();
    // fit over the smaller-δ half, where the asymptotics dominate
    let tail = &pts[pts.len() / 2..];
    if tail.len() < 2 {
        return Ok(RearrangementReport {
            partial_integrals,
            exponent: f64::NAN,
            indicator: Divergence::Inconclusive,
        });
    }
    let exponent = slope(tail);
    let indicator = if exponent > DIVERGENCE_EXPONENT {
        Divergence::Diverges
    } else if exponent < CONVERGENCE_EXPONENT {
        Divergence::Converges
    } else {
        Divergence::Inconclusive
    };
    Ok(RearrangementReport {
        partial_integrals,
        exponent,
        indicator,
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector, SymmetricEigen};

    fn delta_one(alpha: f64) -> PerturbationFamily {
        PerturbationFamily::new(RealLineMeasure::from_atoms(&[(1.0, 1.0)]).unwrap(), alpha).unwrap()
    }

    #[test]
    fn single_atom_moves_by_alpha() {
        let e = find_eigenvalues(&delta_one(0.7), None).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0].pos - 1.7).abs() < 1e-12);
        assert!((e[0].w - 1.0).abs() < 1e-12);
        assert!(e[0].residual < 1e-10);
    }

    #[test]
    fn unperturbed_is_rejected() {
        assert_eq!(find_eigenvalues(&delta_one(0.0), None), Err(SpectraError::Unperturbed));
    }

    #[test]
    fn two_atoms_against_matrix() {
        let base = RealLineMeasure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let fam = PerturbationFamily::new(base, 1.0).unwrap();
        let e = find_eigenvalues(&fam, None).unwrap();
        let v = DVector::from_vec(vec![0.5f64.sqrt(), 0.5f64.sqrt()]);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0])) + &v * v.transpose();
        let eig = SymmetricEigen::new(m);
        let mut expect: Vec<(f64, f64)> = (0..2)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).dot(&v).powi(2)))
            .collect();
        expect.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(e.len(), 2);
        for (got, want) in e.iter().zip(&expect) {
            assert!((got.pos - want.0).abs() < 1e-10);
            assert!((got.w - want.1).abs() < 1e-10);
        }
    }

    #[test]
    fn lebesgue_eigenvalue_above_band() {
        let fam = PerturbationFamily::new(RealLineMeasure::lebesgue(0.0, 1.0, 201).unwrap(), 1.0).unwrap();
        let e = find_eigenvalues(&fam, None).unwrap();
        assert_eq!(e.len(), 1);
        let exact = 1.0 / (1.0 - (-1.0f64).exp());
        assert!((e[0].pos - exact).abs() < 1e-10);
    }

    #[test]
    fn ac_density_of_atomic_base_vanishes() {
        let s = BoundaryLimitSchedule::default();
        let est = ac_density(&delta_one(0.3), 0.4, &s).unwrap();
        assert!(est.value.re.abs() < 1e-12);
    }

    #[test]
    fn ac_density_lebesgue_matches_log_oracle() {
        let s = BoundaryLimitSchedule::default();
        let fam = PerturbationFamily::new(RealLineMeasure::lebesgue(0.0, 1.0, 101).unwrap(), 1.0).unwrap();
        let got = ac_density(&fam, 0.5, &s).unwrap();
        let oracle: Vec<C64> = s
            .epsilons()
            .iter()
            .map(|&e| {
                let z = C64::new(0.5, e);
                let f = ((z - 1.0) / z).ln();
                C64::new(f.im / (PI * (1.0 + f).norm_sqr()), 0.0)
            })
            .collect();
        let want = extrapolate(&s, &oracle).value.re;
        assert!((got.value.re - want).abs() < 1e-6);
        // F(1/2 + i0) = iπ
        assert!((want - 1.0 / (1.0 + PI * PI)).abs() < 1e-6);
    }

    #[test]
    fn unperturbed_density_is_base_density() {
        let base = RealLineMeasure::from_density_fn(-1.0, 1.0, 41, |x| 0.75 * (1.0 - x * x)).unwrap();
        let fam = PerturbationFamily::new(base.clone(), 0.0).unwrap();
        let grid: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let dec = perturbed_measure(&fam, &grid, &BoundaryLimitSchedule::default()).unwrap();
        for (x, v) in grid.iter().zip(&dec.density.values) {
            assert_eq!(*v, base.density_at(*x));
        }
        assert!(dec.atoms.is_empty());
    }

    #[test]
    fn mutual_singularity_examples() {
        let base = RealLineMeasure::from_atoms(&[(1.0, 1.0)]).unwrap();
        let a = PerturbationFamily::new(base.clone(), 0.3).unwrap();
        let b = PerturbationFamily::new(base, 0.7).unwrap();
        let r = mutual_singularity_check(&a, &b).unwrap();
        assert!(r.pass);
        assert!((r.min_separation - 0.4).abs() < 1e-10);
        assert_eq!(mutual_singularity_check(&a, &a), Err(SpectraError::IdenticalCouplings));
    }

    #[test]
    fn rearrangement_flat_density_diverges() {
        let eps: Vec<f64> = (1..=12).map(|k| 0.5f64.powi(k)).collect();
        let r = rearrangement_condition(&vec![2.0; 1 << 16], 1.0, &eps).unwrap();
        assert_eq!(r.indicator, Divergence::Diverges);
        for &(d, p) in &r.partial_integrals {
            assert!((p - 2.0 * (1.0 / d - 1.0 / eps[0])).abs() < 1e-9 * p);
        }
    }

    #[test]
    fn rearrangement_cubic_converges() {
        let n = 1 << 16;
        let w: Vec<f64> = (0..n).map(|i| ((i as f64 + 0.5) / n as f64).powi(3)).collect();
        let eps: Vec<f64> = (1..=12).map(|k| 0.5f64.powi(k)).collect();
        let r = rearrangement_condition(&w, 1.0, &eps).unwrap();
        assert_eq!(r.indicator, Divergence::Converges);
    }

    #[test]
    fn rearrangement_half_gap() {
        let n = 1000;
        let w: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let eps = [0.75, 0.6, 0.55, 0.5, 0.3, 0.1];
        let r = rearrangement_condition(&w, 1.0, &eps).unwrap();
        // w* = 0 on [0, 1/2), 1 on [1/2, 1]: ∫_δ^0.75 x⁻² w* = 1/max(δ,½) - 1/0.75
        for &(d, p) in &r.partial_integrals {
            let want = 1.0 / d.max(0.5) - 1.0 / 0.75;
            assert!((p - want).abs() < 1e-12, "δ={d} p={p} want={want}");
        }
        assert_eq!(r.indicator, Divergence::Converges);
        assert_eq!(
            rearrangement_condition(&[1.0, -1.0], 1.0, &eps),
            Err(SpectraError::NotADensity)
        );
    }
}
