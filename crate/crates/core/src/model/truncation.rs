//! Finite truncation of the model space `K_θ = (H² ⊕ clos ΔL²) ⊖ (θ, Δ)H²`.
//!
//! Both components of a model-space vector are stored as samples on an
//! `M`-point boundary grid, with inner product `(1/M) Σ (f ū + g v̄)`.
//! The orthogonal projection onto `K_θ` is applied exactly through
//! `P_θ(f, g) = (f - θh, g - Δh)`, `h = P_+(θ̄f + Δg)`: since
//! `|θ|² + Δ² = 1` pointwise, `h ↦ (θh, Δh)` is an isometry on the grid too.
//!
//! The truncation `K_θ(N)` is the image under `P_θ` of the ambient space of
//! pairs `(f, Δp)` with `f` a polynomial of degree `≤ N` and `p` a
//! trigonometric polynomial of degree `≤ N`. Its kernel inside the ambient
//! space is spanned by `(θz^k, Δz^k)` scaled by the denominator of `θ`, so
//! `dim K_θ(N) = ambient - (N - d + 1)`.

use nalgebra::SVD;
use num_complex::Complex64 as C64;

use crate::clark::{delta_of, SchurFunction};
use crate::error::{Result, SpectraError};
use crate::fourier;
use crate::linalg::{op_norm, spectral_measure, CMatrix, CVector, SpectralAtom};

/// Singular values of the projected ambient generators below this are
/// treated as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Grid refinement stops once the upper half of the Fourier spectrum of
/// `θ` and `Δ` is below this.
pub const ALIAS_TOL: f64 = 1e-16;
pub const MAX_RESOLUTION: usize = 4096;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A pair `(f, g)` sampled on the boundary grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelVector {
    pub f: Vec<C64>,
    pub g: Vec<C64>,
}

impl ModelVector {
    pub fn zeros(m: usize) -> Self {
        Self {
            f: vec![ZERO; m],
            g: vec![ZERO; m],
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `⟨self, other⟩`, linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        let s: C64 = self
            .f
            .iter()
            .zip(&other.f)
            .chain(self.g.iter().zip(&other.g))
            .map(|(a, b)| a * b.conj())
            .sum();
        s / self.len() as f64
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn second_norm(&self) -> f64 {
        (self.g.iter().map(|x| x.norm_sqr()).sum::<f64>() / self.len() as f64).sqrt()
    }

    pub fn axpy(&mut self, a: C64, x: &Self) {
        for (s, v) in self.f.iter_mut().zip(&x.f) {
            *s += a * v;
        }
        for (s, v) in self.g.iter_mut().zip(&x.g) {
            *s += a * v;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-ONE, other);
        out
    }

    pub fn scaled(&self, a: C64) -> Self {
        Self {
            f: self.f.iter().map(|v| a * v).collect(),
            g: self.g.iter().map(|v| a * v).collect(),
        }
    }
}

fn boundary_data(theta: &SchurFunction, m: usize) -> (Vec<C64>, Vec<C64>) {
    let t = theta.boundary_values(m);
    let d = t.iter().map(|&v| C64::new(delta_of(v), 0.0)).collect();
    (t, d)
}

/// Largest Fourier coefficient with `|k| ≥ m/4`.
fn aliasing_tail(samples: &[C64]) -> f64 {
    let m = samples.len();
    let c = fourier::coefficients(samples);
    (0..m)
        .filter(|&i| fourier::signed_frequency(i, m).unsigned_abs() as usize >= m / 4)
        .map(|i| c[i].norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct ModelSpaceTruncation {
    theta: SchurFunction,
    order: usize,
    degree: usize,
    grid: Vec<C64>,
    theta_b: Vec<C64>,
    delta_b: Vec<C64>,
    /// Orthonormal columns in stacked, `1/√M`-scaled coordinates.
    basis: CMatrix,
    ambient_dim: usize,
    /// Smallest kept and largest discarded singular value.
    rank_gap: (f64, f64),
}

impl ModelSpaceTruncation {
    pub fn build(theta: &SchurFunction, n: usize) -> Result<Self> {
        let d = theta.degree();
        if n < d || n == 0 {
            return Err(SpectraError::DegreeTooSmall);
        }
        let mut m = 4 * (n.max(2 * d) + 1);
        let (mut theta_b, mut delta_b) = boundary_data(theta, m);
        while m < MAX_RESOLUTION && (aliasing_tail(&theta_b) > ALIAS_TOL || aliasing_tail(&delta_b) > ALIAS_TOL) {
            m *= 2;
            (theta_b, delta_b) = boundary_data(theta, m);
        }
        let grid = fourier::circle_grid(m);
        let has_delta = delta_b.iter().any(|x| x.re > 0.0);

        let mut t = Self {
            theta: theta.clone(),
            order: n,
            degree: d,
            grid,
            theta_b,
            delta_b,
            basis: CMatrix::zeros(2 * m, 0),
            ambient_dim: 0,
            rank_gap: (f64::INFINITY, 0.0),
        };

        let mut generators = Vec::new();
        for k in 0..=n as i32 {
            let mut v = ModelVector::zeros(m);
            v.f = t.grid.iter().map(|z| z.powi(k)).collect();
            generators.push(v);
        }
        if has_delta {
            for j in -(n as i32)..=n as i32 {
                let mut v = ModelVector::zeros(m);
                v.g = t.grid.iter().zip(&t.delta_b).map(|(z, dl)| dl * z.powi(j)).collect();
                generators.push(v);
            }
        }
        t.ambient_dim = generators.len();
        let cols: Vec<CVector> = generators.iter().map(|v| t.stack(&t.project(v))).collect();
        let a = CMatrix::from_columns(&cols);
        let svd = SVD::new(a, true, false);
        let u = svd.u.ok_or_else(|| SpectraError::InvalidMatrix("SVD failed".into()))?;
        let sv = &svd.singular_values;
        let rank = sv.iter().filter(|&&s| s > RANK_TOL).count();
        let expected = t.ambient_dim - (n - d + 1);
        if rank != expected {
            return Err(SpectraError::InvalidMatrix(format!(
                "numerical rank {rank} of the projected ambient space differs from {expected}"
            )));
        }
        t.rank_gap = (
            if rank > 0 { sv[rank - 1] } else { f64::INFINITY },
            if rank < sv.len() { sv[rank] } else { 0.0 },
        );
        t.basis = u.columns(0, rank).into_owned();
        Ok(t)
    }

    pub fn theta(&self) -> &SchurFunction {
        &self.theta
    }

    /// Truncation degree `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Degree `d` of `θ`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of boundary samples `M`.
    pub fn resolution(&self) -> usize {
        self.grid.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank_gap(&self) -> (f64, f64) {
        self.rank_gap
    }

    pub fn grid(&self) -> &[C64] {
        &self.grid
    }

    pub fn theta_samples(&self) -> &[C64] {
        &self.theta_b
    }

    pub fn delta_samples(&self) -> &[C64] {
        &self.delta_b
    }

    /// Orthonormal basis in stacked coordinates (`2M × dim`).
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> ModelVector {
        self.unstack(&self.basis.column(i).into_owned())
    }

    pub fn stack(&self, v: &ModelVector) -> CVector {
        let s = 1.0 / (self.resolution() as f64).sqrt();
        CVector::from_iterator(2 * v.len(), v.f.iter().chain(&v.g).map(|x| x * s))
    }

    pub fn unstack(&self, c: &CVector) -> ModelVector {
        let m = self.resolution();
        let s = (m as f64).sqrt();
        ModelVector {
            f: c.rows(0, m).iter().map(|x| x * s).collect(),
            g: c.rows(m, m).iter().map(|x| x * s).collect(),
        }
    }

    pub fn coords(&self, v: &ModelVector) -> CVector {
        self.basis.adjoint() * self.stack(v)
    }

    pub fn from_coords(&self, c: &CVector) -> ModelVector {
        self.unstack(&(&self.basis * c))
    }

    /// Norm of the part of `v` outside `K_θ(N)`.
    pub fn truncation_residual(&self, v: &ModelVector) -> f64 {
        let s = self.stack(v);
        let inside = &self.basis * (self.basis.adjoint() * &s);
        (s - inside).norm()
    }

    /// `h = P_+(θ̄f + Δg)`, the `(θ, Δ)H²` coordinate of `v`.
    fn lift(&self, v: &ModelVector) -> Vec<C64> {
        let w: Vec<C64> = (0..self.resolution())
            .map(|j| self.theta_b[j].conj() * v.f[j] + self.delta_b[j] * v.g[j])
            .collect();
        fourier::riesz_plus(&w)
    }

    /// Orthogonal projection onto `K_θ`.
    pub fn project(&self, v: &ModelVector) -> ModelVector {
        let h = self.lift(v);
        ModelVector {
            f: (0..h.len()).map(|j| v.f[j] - self.theta_b[j] * h[j]).collect(),
            g: (0..h.len()).map(|j| v.g[j] - self.delta_b[j] * h[j]).collect(),
        }
    }

    /// `P_θ` after replacing the first component by its analytic part.
    pub fn project_analytic(&self, v: &ModelVector) -> ModelVector {
        self.project(&ModelVector {
            f: fourier::riesz_plus(&v.f),
            g: v.g.clone(),
        })
    }

    /// Multiplication by the variable on both components.
    pub fn shift(&self, v: &ModelVector) -> ModelVector {
        ModelVector {
            f: v.f.iter().zip(&self.grid).map(|(a, z)| a * z).collect(),
            g: v.g.iter().zip(&self.grid).map(|(a, z)| a * z).collect(),
        }
    }

    /// Adjoint of multiplication by the variable on `H² ⊕ L²`: backward
    /// shift on the first component, `ξ̄` on the second. It leaves `K_θ`
    /// invariant and agrees there with `T_θ*`.
    pub fn backward_shift(&self, v: &ModelVector) -> ModelVector {
        let f: Vec<C64> = v.f.iter().zip(&self.grid).map(|(a, z)| a * z.conj()).collect();
        ModelVector {
            f: fourier::riesz_plus(&f),
            g: v.g.iter().zip(&self.grid).map(|(a, z)| a * z.conj()).collect(),
        }
    }

    /// `T_θ v = P_θ(z v)`.
    pub fn apply_t(&self, v: &ModelVector) -> ModelVector {
        self.project(&self.shift(v))
    }

    pub fn apply_t_adjoint(&self, v: &ModelVector) -> ModelVector {
        self.backward_shift(v)
    }

    /// `x = (1, 0)`.
    pub fn defect_x(&self) -> ModelVector {
        ModelVector {
            f: vec![ONE; self.resolution()],
            g: vec![ZERO; self.resolution()],
        }
    }

    /// `y = (z̄θ, z̄Δ)`.
    pub fn defect_y(&self) -> ModelVector {
        ModelVector {
            f: self.grid.iter().zip(&self.theta_b).map(|(z, t)| z.conj() * t).collect(),
            g: self.grid.iter().zip(&self.delta_b).map(|(z, d)| z.conj() * d).collect(),
        }
    }

    /// Matrix of `T_θ` compressed to `K_θ(N)`, with the largest truncation
    /// residual of `T_θ q` over basis vectors `q`.
    pub fn t_matrix(&self) -> (CMatrix, f64) {
        let mut residual = 0.0f64;
        let cols: Vec<CVector> = (0..self.dim())
            .map(|i| {
                let tv = self.apply_t(&self.basis_vector(i));
                residual = residual.max(self.truncation_residual(&tv));
                self.coords(&tv)
            })
            .collect();
        let n = self.dim();
        let mat = if cols.is_empty() {
            CMatrix::zeros(0, 0)
        } else {
            CMatrix::from_columns(&cols)
        };
        debug_assert_eq!(mat.nrows(), n);
        (mat, residual)
    }

    /// Matrix of `Ũ_γ = T_θ + γ(·, y)x` on `K_θ(N)`.
    pub fn u_gamma_matrix(&self, gamma: C64) -> Result<UGammaMatrix> {
        let r = gamma.norm();
        if !((r - 1.0).abs() <= 1e-12) {
            return Err(SpectraError::NonUnimodular(r));
        }
        let (t, t_residual) = self.t_matrix();
        let x = self.defect_x();
        let y = self.defect_y();
        let cx = self.coords(&x);
        let cy = self.coords(&y);
        let matrix = t + (&cx * cy.adjoint()) * gamma;
        let n = matrix.nrows();
        let unitarity_defect = op_norm(&(matrix.adjoint() * &matrix - CMatrix::identity(n, n)));
        Ok(UGammaMatrix {
            matrix,
            truncation_residual: t_residual
                .max(self.truncation_residual(&x))
                .max(self.truncation_residual(&y)),
            unitarity_defect,
        })
    }

    /// Spectral measure of `Ũ_γ` with respect to `x = (1, 0)`.
    pub fn u_gamma_spectral_measure(&self, gamma: C64) -> Result<(Vec<SpectralAtom>, f64)> {
        let u = self.u_gamma_matrix(gamma)?;
        spectral_measure(&u.matrix, &self.coords(&self.defect_x()), 1e-9)
    }

    /// Matrix of the discrete projection `P_θ` on the stacked sample space.
    pub fn projection_matrix(&self) -> CMatrix {
        let m = self.resolution();
        let cols: Vec<CVector> = (0..2 * m)
            .map(|i| {
                let mut e = CVector::zeros(2 * m);
                e[i] = ONE;
                self.stack(&self.project(&self.unstack(&e)))
            })
            .collect();
        CMatrix::from_columns(&cols)
    }

    /// Largest `|⟨q, (θz^k, Δz^k)⟩|` over basis vectors and `0 ≤ k ≤ N - d`.
    pub fn generator_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..=(self.order - self.degree) as i32 {
            let gen = ModelVector {
                f: self
                    .grid
                    .iter()
                    .zip(&self.theta_b)
                    .map(|(z, t)| t * z.powi(k))
                    .collect(),
                g: self
                    .grid
                    .iter()
                    .zip(&self.delta_b)
                    .map(|(z, d)| d * z.powi(k))
                    .collect(),
            };
            let c = self.basis.adjoint() * self.stack(&gen);
            worst = worst.max(c.iter().map(|x| x.norm()).fold(0.0, f64::max));
        }
        worst
    }

    /// `‖Q*Q - I‖`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        op_norm(&(self.basis.adjoint() * &self.basis - CMatrix::identity(n, n)))
    }
}

#[derive(Debug, Clone)]
pub struct UGammaMatrix {
    pub matrix: CMatrix,
    /// Largest norm of components leaving `K_θ(N)` (of `T_θ q`, `x`, `y`).
    pub truncation_residual: f64,
    /// `‖Ũ*Ũ - I‖`.
    pub unitarity_defect: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clark::{herglotz_measure, ClarkFamilyPoint};

    fn mono(d: usize, c: f64) -> SchurFunction {
        SchurFunction::monomial(d, C64::new(c, 0.0)).unwrap()
    }

    #[test]
    fn z_gives_constants() {
        let k = ModelSpaceTruncation::build(&mono(1, 1.0), 1).unwrap();
        assert_eq!(k.dim(), 1);
        let (t, res) = k.t_matrix();
        assert!(t[(0, 0)].norm() < 1e-14 && res < 1e-14);
        let q = k.basis_vector(0);
        assert!((q.f[0].norm() - 1.0).abs() < 1e-13);
        assert!(q.f.iter().all(|v| (v - q.f[0]).norm() < 1e-13));
    }

    #[test]
    fn z_squared_is_nilpotent() {
        let k = ModelSpaceTruncation::build(&mono(2, 1.0), 4).unwrap();
        assert_eq!(k.dim(), 2);
        let (t, _) = k.t_matrix();
        assert!((&t * &t).norm() < 1e-13);
        assert!((op_norm(&t) - 1.0).abs() < 1e-13);
        // the basis spans {1, z}
        let one = k.defect_x();
        let z = ModelVector {
            f: k.grid().to_vec(),
            g: vec![ZERO; k.resolution()],
        };
        assert!(k.truncation_residual(&one) < 1e-13);
        assert!(k.truncation_residual(&z) < 1e-13);
    }

    #[test]
    fn zero_theta_dimension() {
        let k = ModelSpaceTruncation::build(&SchurFunction::zero(), 2).unwrap();
        assert_eq!(k.ambient_dim(), 3 + 5);
        assert_eq!(k.dim(), 5);
    }

    #[test]
    fn projection_invariants() {
        for theta in [mono(2, 1.0), mono(1, 0.5), SchurFunction::zero()] {
            let k = ModelSpaceTruncation::build(&theta, 3).unwrap();
            let p = k.projection_matrix();
            assert!(op_norm(&(&p * &p - &p)) < 1e-10);
            assert!(op_norm(&(&p - p.adjoint())) < 1e-10);
            assert!(k.orthonormality_defect() < 1e-10);
            assert!(k.generator_overlap() < 1e-10);
        }
    }

    #[test]
    fn half_z_is_a_strict_contraction_on_polynomials() {
        let k = ModelSpaceTruncation::build(&mono(1, 0.5), 6).unwrap();
        let (t, _) = k.t_matrix();
        assert!(op_norm(&t) <= 1.0 + 1e-10);
    }

    #[test]
    fn u_gamma_for_z() {
        let k = ModelSpaceTruncation::build(&mono(1, 1.0), 1).unwrap();
        let g = C64::from_polar(1.0, 0.9);
        let u = k.u_gamma_matrix(g).unwrap();
        assert!((u.matrix[(0, 0)] - g).norm() < 1e-13);
        assert!(k.u_gamma_matrix(C64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn u_gamma_matches_clark_measure() {
        let theta = SchurFunction::blaschke(&[ZERO, C64::new(0.3, 0.4), C64::new(-0.5, 0.1)], ONE).unwrap();
        let k = ModelSpaceTruncation::build(&theta, 6).unwrap();
        for gamma in [ONE, C64::new(0.0, 1.0)] {
            let u = k.u_gamma_matrix(gamma).unwrap();
            assert!(u.unitarity_defect < 1e-10);
            let (atoms, off) = k.u_gamma_spectral_measure(gamma).unwrap();
            assert!(off < 1e-8);
            let mu = herglotz_measure(&ClarkFamilyPoint::new(theta.clone(), gamma).unwrap(), 512).unwrap();
            assert_eq!(atoms.len(), mu.atoms().len());
            for a in mu.atoms() {
                let hit = atoms
                    .iter()
                    .find(|s| (s.point - a.point()).norm() < 1e-8)
                    .expect("atom");
                assert!((hit.w - a.w).abs() < 1e-8);
            }
        }
    }
}
