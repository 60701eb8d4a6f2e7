//! Measures on the real line: atoms plus a density sampled on a grid.
//!
//! The density is the piecewise-linear interpolant of its samples and
//! vanishes outside the grid. Its mass is therefore the composite trapezoid
//! sum, and Cauchy-type integrals against it are computed panel by panel
//! with the kernel integrated in closed form. This keeps `F(x + iε)` accurate
//! for arbitrarily small `ε`, where a plain quadrature of the kernel would
//! need a grid finer than `ε`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub pos: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct LineMeasureDoc {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    grid: Vec<f64>,
    #[serde(default)]
    density: Vec<f64>,
}

/// Spectral measure on ℝ: finitely many atoms plus an absolutely continuous
/// part with density sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LineMeasureDoc", into = "LineMeasureDoc")]
pub struct RealLineMeasure {
    atoms: Vec<Atom>,
    grid: Vec<f64>,
    density: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<LineMeasureDoc> for RealLineMeasure {
    type Error = SpectraError;
    fn try_from(doc: LineMeasureDoc) -> Result<Self> {
        Self::new(doc.atoms, doc.grid, doc.density)
    }
}

impl From<RealLineMeasure> for LineMeasureDoc {
    fn from(m: RealLineMeasure) -> Self {
        LineMeasureDoc {
            atoms: m.atoms,
            grid: m.grid,
            density: m.density,
        }
    }
}

/// Composite trapezoid weights for a strictly increasing grid.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = grid[i + 1] - grid[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

impl RealLineMeasure {
    pub fn new(mut atoms: Vec<Atom>, grid: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if atoms
            .iter()
            .any(|a| !a.pos.is_finite() || !(a.w > 0.0) || !a.w.is_finite())
        {
            return Err(SpectraError::InvalidMeasure(
                "atom weights must be positive and finite".into(),
            ));
        }
        atoms.sort_by(|a, b| a.pos.total_cmp(&b.pos));
        if atoms.windows(2).any(|w| w[0].pos == w[1].pos) {
            return Err(SpectraError::InvalidMeasure("atom positions must be distinct".into()));
        }
        if grid.len() != density.len() {
            return Err(SpectraError::InvalidMeasure(format!(
                "grid has {} nodes but density has {} samples",
                grid.len(),
                density.len()
            )));
        }
        if grid.len() == 1 {
            return Err(SpectraError::InvalidMeasure(
                "a density grid needs at least two nodes".into(),
            ));
        }
        if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SpectraError::InvalidMeasure(
                "grid must be finite and strictly increasing".into(),
            ));
        }
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(SpectraError::InvalidMeasure(
                "density samples must be finite and nonnegative".into(),
            ));
        }
        let weights = trapezoid_weights(&grid);
        let m = Self {
            atoms,
            grid,
            density,
            weights,
        };
        if !(m.total_mass() > 0.0) {
            return Err(SpectraError::EmptyMeasure);
        }
        Ok(m)
    }

    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let atoms = atoms.iter().map(|&(pos, w)| Atom { pos, w }).collect();
        Self::new(atoms, Vec::new(), Vec::new())
    }

    /// Absolutely continuous measure with density `f` sampled at `n` equispaced
    /// nodes of `[a, b]`.
    pub fn from_density_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = linspace(a, b, n);
        let density = grid.iter().map(|&x| f(x)).collect();
        Self::new(Vec::new(), grid, density)
    }

    /// Lebesgue measure restricted to `[a, b]`.
    pub fn lebesgue(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::from_density_fn(a, b, n, |_| 1.0)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn quadrature_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn has_density(&self) -> bool {
        self.density.iter().any(|&d| d > 0.0)
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    pub fn density_mass(&self) -> f64 {
        self.weights.iter().zip(&self.density).map(|(w, d)| w * d).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass() + self.density_mass()
    }

    /// Smallest closed interval containing atoms and the density grid.
    pub fn support_hint(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in &self.atoms {
            lo = lo.min(a.pos);
            hi = hi.max(a.pos);
        }
        if let (Some(&g0), Some(&g1)) = (self.grid.first(), self.grid.last()) {
            lo = lo.min(g0);
            hi = hi.max(g1);
        }
        (lo, hi)
    }

    /// Maximal closed intervals on which the interpolated density is not
    /// identically zero.
    pub fn density_support(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for i in 0..self.grid.len().saturating_sub(1) {
            if self.density[i] > 0.0 || self.density[i + 1] > 0.0 {
                let (a, b) = (self.grid[i], self.grid[i + 1]);
                match out.last_mut() {
                    Some(last) if last.1 == a => last.1 = b,
                    _ => out.push((a, b)),
                }
            }
        }
        out
    }

    /// Interpolated density at `x` (zero off the grid).
    pub fn density_at(&self, x: f64) -> f64 {
        let g = &self.grid;
        if g.is_empty() || x < g[0] || x > g[g.len() - 1] {
            return 0.0;
        }
        let i = match g.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.density[i],
            Err(i) => i - 1,
        };
        let t = (x - g[i]) / (g[i + 1] - g[i]);
        self.density[i] * (1.0 - t) + self.density[i + 1] * t
    }

    fn panels(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.grid.len().saturating_sub(1)).filter_map(move |i| {
            let (ra, rb) = (self.density[i], self.density[i + 1]);
            (ra > 0.0 || rb > 0.0).then(|| (self.grid[i], self.grid[i + 1], ra, rb))
        })
    }

    /// Borel transform `F(z) = ∫ dμ(t)/(t - z)`, `Im z ≠ 0`.
    pub fn borel_transform(&self, z: C64) -> Result<C64> {
        if z.im == 0.0 {
            return Err(SpectraError::RealArgument);
        }
        let mut acc: C64 = self.atoms.iter().map(|a| a.w / (a.pos - z)).sum();
        for (a, b, ra, rb) in self.panels() {
            acc += panel_cauchy(a, b, ra, rb, z);
        }
        Ok(acc)
    }

    /// `F(x)` for real `x` off the support (atoms and density panels).
    /// Returns `None` when `x` touches the support.
    pub fn borel_real(&self, x: f64) -> Option<f64> {
        let mut acc = 0.0;
        for a in &self.atoms {
            if a.pos == x {
                return None;
            }
            acc += a.w / (a.pos - x);
        }
        for (a, b, ra, rb) in self.panels() {
            if x >= a && x <= b {
                return None;
            }
            acc += panel_cauchy(a, b, ra, rb, C64::new(x, 0.0)).re;
        }
        Some(acc)
    }

    /// `G(x) = ∫ dμ(t)/(t - x)^2`. Divergence is returned as `f64::INFINITY`.
    pub fn g_function(&self, x: f64) -> f64 {
        const OVERFLOW: f64 = 1e300;
        let mut acc = 0.0;
        for a in &self.atoms {
            let d = a.pos - x;
            if d == 0.0 {
                return f64::INFINITY;
            }
            acc += a.w / (d * d);
        }
        for (a, b, ra, rb) in self.panels() {
            if x >= a && x <= b {
                return f64::INFINITY;
            }
            acc += panel_second_moment(a, b, ra, rb, x);
        }
        if !acc.is_finite() || acc > OVERFLOW {
            f64::INFINITY
        } else {
            acc
        }
    }

    /// Sum of two measures sharing the same density grid (or without density).
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (grid, density) = match (self.grid.is_empty(), other.grid.is_empty()) {
            (true, _) => (other.grid.clone(), other.density.clone()),
            (_, true) => (self.grid.clone(), self.density.clone()),
            _ if self.grid == other.grid => (
                self.grid.clone(),
                self.density.iter().zip(&other.density).map(|(a, b)| a + b).collect(),
            ),
            _ => {
                return Err(SpectraError::InvalidMeasure(
                    "cannot add densities on different grids".into(),
                ))
            }
        };
        let mut atoms = self.atoms.clone();
        for b in &other.atoms {
            match atoms.iter_mut().find(|a| a.pos == b.pos) {
                Some(a) => a.w += b.w,
                None => atoms.push(*b),
            }
        }
        Self::new(atoms, grid, density)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(SpectraError::InvalidMeasure("scale must be positive".into()));
        }
        let atoms = self.atoms.iter().map(|a| Atom { pos: a.pos, w: a.w * c }).collect();
        let density = self.density.iter().map(|d| d * c).collect();
        Self::new(atoms, self.grid.clone(), density)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect()
}

/// `∫_a^b ρ(t)/(t - z) dt` for linear `ρ` with `ρ(a) = ra`, `ρ(b) = rb`.
fn panel_cauchy(a: f64, b: f64, ra: f64, rb: f64, z: C64) -> C64 {
    let h = b - a;
    let s = (rb - ra) / h;
    let c = 0.5 * (a + b);
    let rc = 0.5 * (ra + rb);
    let d = C64::new(c, 0.0) - z;
    let q = 0.5 * h / d;
    if q.norm() < 0.25 {
        // 1/(t - z) = (1/d) Σ (-τ/d)^k with t = c + τ; odd moments of τ vanish.
        let mut acc = C64::new(0.0, 0.0);
        let mut dpow = d; // d^{k+1}
        let half = 0.5 * h;
        for k in 0..40 {
            let even_k = k % 2 == 0;
            // ∫ τ^k dτ over [-h/2, h/2]
            let mk = |p: usize| -> f64 {
                if p % 2 == 1 {
                    0.0
                } else {
                    2.0 * half.powi(p as i32 + 1) / (p as f64 + 1.0)
                }
            };
            let sign = if even_k { 1.0 } else { -1.0 };
            let term = (rc * mk(k) + s * mk(k + 1)) * sign / dpow;
            acc += term;
            if k > 2 && q.norm().powi(k as i32) < 1e-18 {
                break;
            }
            dpow *= d;
        }
        return acc;
    }
    let rho_z = C64::new(ra, 0.0) + s * (z - a);
    let log_ratio = if z.im == 0.0 {
        C64::new(((b - z.re) / (a - z.re)).ln(), 0.0)
    } else {
        (b - z).ln() - (a - z).ln()
    };
    rho_z * log_ratio + s * h
}

/// `∫_a^b ρ(t)/(t - x)^2 dt` for linear `ρ` and real `x` outside `[a, b]`.
fn panel_second_moment(a: f64, b: f64, ra: f64, rb: f64, x: f64) -> f64 {
    let h = b - a;
    let s = (rb - ra) / h;
    let c = 0.5 * (a + b);
    let rc = 0.5 * (ra + rb);
    let d = c - x;
    let q = 0.5 * h / d;
    if q.abs() < 0.25 {
        // 1/(d + τ)^2 = Σ (k+1)(-τ)^k / d^{k+2}
        let half = 0.5 * h;
        let mk = |p: usize| -> f64 {
            if p % 2 == 1 {
                0.0
            } else {
                2.0 * half.powi(p as i32 + 1) / (p as f64 + 1.0)
            }
        };
        let mut acc = 0.0;
        for k in 0..40 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * (k as f64 + 1.0) * (rc * mk(k) + s * mk(k + 1)) / d.powi(k as i32 + 2);
            acc += term;
            if k > 2 && q.abs().powi(k as i32) < 1e-18 {
                break;
            }
        }
        return acc;
    }
    let (ua, ub) = (a - x, b - x);
    let rho_x = ra + s * (x - a);
    rho_x * (1.0 / ua - 1.0 / ub) + s * (ub / ua).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn single_atom_closed_form() {
        let mu = RealLineMeasure::from_atoms(&[(1.0, 1.0)]).unwrap();
        let z = C64::new(0.0, 0.5);
        let f = mu.borel_transform(z).unwrap();
        assert!(close(f, 1.0 / (C64::new(1.0, 0.0) - z), 1e-15));
    }

    #[test]
    fn symmetric_pair_at_i() {
        let mu = RealLineMeasure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let f = mu.borel_transform(C64::new(0.0, 1.0)).unwrap();
        // ½((−1+i)/2 + (1+i)/2) = i/2
        assert!(close(f, C64::new(0.0, 0.5), 1e-15));
    }

    #[test]
    fn real_argument_rejected() {
        let mu = RealLineMeasure::lebesgue(0.0, 1.0, 11).unwrap();
        assert_eq!(mu.borel_transform(C64::new(1.5, 0.0)), Err(SpectraError::RealArgument));
    }

    #[test]
    fn lebesgue_matches_logarithm() {
        let mu = RealLineMeasure::lebesgue(0.0, 1.0, 101).unwrap();
        for z in [
            C64::new(1.5, 1e-6),
            C64::new(0.5, 1e-9),
            C64::new(0.3, -0.2),
            C64::new(-4.0, 2.0),
            C64::new(0.0, 1e-3),
        ] {
            let exact = ((z - 1.0) / z).ln();
            let f = mu.borel_transform(z).unwrap();
            assert!(close(f, exact, 1e-12), "z={z} f={f} exact={exact}");
        }
    }

    #[test]
    fn g_function_examples() {
        let d1 = RealLineMeasure::from_atoms(&[(1.0, 1.0)]).unwrap();
        assert_eq!(d1.g_function(0.0), 1.0);
        assert!(d1.g_function(1.0).is_infinite());
        let pair = RealLineMeasure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!((pair.g_function(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_function_of_lebesgue_outside_band() {
        let mu = RealLineMeasure::lebesgue(0.0, 1.0, 51).unwrap();
        // ∫_0^1 dt/(t - x)^2 = 1/(x-1) - 1/x for x > 1
        for x in [1.2, 2.0, 30.0, -0.5] {
            let exact = 1.0 / (x - 1.0) - 1.0 / x;
            assert!((mu.g_function(x) - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
        assert!(mu.g_function(0.5).is_infinite());
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(RealLineMeasure::from_atoms(&[(1.0, -1.0)]).is_err());
        assert!(RealLineMeasure::from_atoms(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert_eq!(RealLineMeasure::from_atoms(&[]), Err(SpectraError::EmptyMeasure));
        assert!(RealLineMeasure::new(vec![], vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(RealLineMeasure::new(vec![], vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn trapezoid_weights_sum_to_length() {
        let grid = vec![0.0, 0.1, 0.35, 0.9, 2.0];
        let w = trapezoid_weights(&grid);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12 * 2.0);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn json_shape() {
        let mu = RealLineMeasure::from_atoms(&[(1.0, 1.0)]).unwrap();
        let s = serde_json::to_string(&mu).unwrap();
        assert_eq!(s, r#"{"atoms":[{"pos":1.0,"w":1.0}],"grid":[],"density":[]}"#);
        let back: RealLineMeasure = serde_json::from_str(r#"{"atoms":[{"pos":1.0,"w":1.0}]}"#).unwrap();
        assert_eq!(back, mu);
        assert!(serde_json::from_str::<RealLineMeasure>(r#"{"atoms":[{"pos":1.0,"w":0.0}]}"#).is_err());
    }
}
