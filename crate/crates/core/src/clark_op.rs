//! The adjoint `V: L²(μ) → K_θ` of the Clark operator for `γ = 1`.
//!
//! `V` is determined by `V1 = x = (1, 0)`, `Vξ̄ = y = (z̄θ, z̄Δ)` and the
//! intertwining `T_θ V = V[M_ξ - (·, ξ̄)1]`. Monomials are available three
//! ways: the recursions that follow from intertwining,
//!
//! * `Vξⁿ = T_θⁿx + Σ_{k<n} m_{k+1} T_θ^{n-k-1}x`,
//! * `Vξ̄ⁿ = Σ_{k<n} m̄_k (T_θ*)^{n-1-k} y`,
//!
//! and the closed form `Vξⁿ = P_θ[qₙ·(1 - θ, -Δ)]` with
//! `qₙ(z) = zⁿ + Σ_{k<n} m_{k+1} z^{n-1-k}`. For general `f`,
//! [`adjoint_clark_apply`] evaluates
//! `P_θ[(P_+f(z) + ∫ ξ(f(ξ) - f(z))/(ξ - z) dμ(ξ))·(1 - θ, -Δ)]`, with the
//! analytic part of the product taken in the first component.
//!
//! Here `m_j = ∫ ξ^j dμ`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::clark::{herglotz_measure, ClarkFamilyPoint, SchurFunction, DEFAULT_RESOLUTION};
use crate::error::{Result, SpectraError};
use crate::fourier;
use crate::linalg::CVector;
use crate::measure::CircleMeasure;
use crate::model::{ModelSpaceTruncation, ModelVector};

/// Truncation residual above which a closed-form evaluation is rejected.
pub const OVERFLOW_TOL: f64 = 1e-6;
/// Defect residual above which the defect vectors are rejected.
pub const DEFECT_TOL: f64 = 1e-6;
/// Distance below which a kernel node and an evaluation point coincide.
pub const DIAGONAL_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectResiduals {
    pub norm_x: f64,
    pub norm_y: f64,
    /// `‖T_θ* x‖`.
    pub t_adjoint_x: f64,
    /// `‖T_θ y‖`.
    pub t_y: f64,
    /// `‖x + P_θ(z ŷ)‖` with `ŷ = (z̄(θ - 1), z̄Δ)`, a representative of `y`.
    pub x_plus_zy: f64,
    /// `|m_0 - 1|`.
    pub mass: f64,
}

#[derive(Debug, Clone)]
pub struct ClarkOperatorContext {
    trunc: ModelSpaceTruncation,
    mu: CircleMeasure,
    moments: Vec<C64>,
    x: ModelVector,
    y: ModelVector,
    residuals: DefectResiduals,
}

impl ClarkOperatorContext {
    /// Context for `θ` at `γ = 1` with truncation degree `n`.
    pub fn new(theta: &SchurFunction, n: usize) -> Result<Self> {
        let trunc = ModelSpaceTruncation::build(theta, n)?;
        let mu = herglotz_measure(&ClarkFamilyPoint::new(theta.clone(), ONE)?, DEFAULT_RESOLUTION)?;
        Self::from_parts(trunc, mu)
    }

    /// The operator for `μ_γ` of `θ` is the `γ = 1` operator of `γ̄θ`.
    pub fn with_gamma(theta: &SchurFunction, gamma: C64, n: usize) -> Result<Self> {
        let r = gamma.norm();
        if !((r - 1.0).abs() <= 1e-12) {
            return Err(SpectraError::NonUnimodular(r));
        }
        Self::new(&theta.rotated(gamma), n)
    }

    pub fn from_parts(trunc: ModelSpaceTruncation, mu: CircleMeasure) -> Result<Self> {
        let moments = mu.moments(2 * trunc.order());
        let (x, y, residuals) = defect_vectors(&trunc, moments[0])?;
        Ok(Self {
            trunc,
            mu,
            moments,
            x,
            y,
            residuals,
        })
    }

    pub fn truncation(&self) -> &ModelSpaceTruncation {
        &self.trunc
    }

    pub fn measure(&self) -> &CircleMeasure {
        &self.mu
    }

    /// `m_j = ∫ ξ^j dμ`, `j = 0..=2N`.
    pub fn moments(&self) -> &[C64] {
        &self.moments
    }

    pub fn x(&self) -> &ModelVector {
        &self.x
    }

    pub fn y(&self) -> &ModelVector {
        &self.y
    }

    pub fn defect_residuals(&self) -> DefectResiduals {
        self.residuals
    }

    fn moment(&self, j: usize) -> Result<C64> {
        self.moments.get(j).copied().ok_or(SpectraError::MomentTable {
            needed: j,
            available: self.moments.len().saturating_sub(1),
        })
    }

    /// Coordinates in the orthonormal basis of `K_θ(N)` and the norm of the
    /// part outside it.
    pub fn coordinates(&self, v: &ModelVector) -> (CVector, f64) {
        (self.trunc.coords(v), self.trunc.truncation_residual(v))
    }
}

/// `x = (1, 0)` and `y = (z̄θ, z̄Δ)` with the defect identities they satisfy.
pub fn defect_vectors(trunc: &ModelSpaceTruncation, m0: C64) -> Result<(ModelVector, ModelVector, DefectResiduals)> {
    let x = trunc.defect_x();
    let y = trunc.defect_y();
    let m = trunc.resolution();
    let y_hat = ModelVector {
        f: (0..m)
            .map(|j| trunc.grid()[j].conj() * (trunc.theta_samples()[j] - ONE))
            .collect(),
        g: y.g.clone(),
    };
    let mut sum = trunc.project(&trunc.shift(&y_hat));
    sum.axpy(ONE, &x);
    let r = DefectResiduals {
        norm_x: x.norm(),
        norm_y: y.norm(),
        t_adjoint_x: trunc.apply_t_adjoint(&x).norm(),
        t_y: trunc.apply_t(&y).norm(),
        x_plus_zy: sum.norm(),
        mass: (m0 - 1.0).norm(),
    };
    let worst = [
        (r.norm_x - 1.0).abs(),
        (r.norm_y - 1.0).abs(),
        r.t_adjoint_x,
        r.t_y,
        r.x_plus_zy,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if !(worst <= DEFECT_TOL) {
        return Err(SpectraError::DefectIdentification(worst));
    }
    Ok((x, y, r))
}

/// `Vξⁿ` from the forward recursion.
pub fn v_monomial_recursive(ctx: &ClarkOperatorContext, n: usize) -> Result<ModelVector> {
    let t = &ctx.trunc;
    // Horner form: v ← T v + m_{k+1} x
    let mut v = ctx.x.clone();
    for k in 0..n {
        v = t.apply_t(&v);
        v.axpy(ctx.moment(k + 1)?, &ctx.x);
    }
    Ok(v)
}

/// `Vξⁿ` from the closed form `P_θ[qₙ·(1 - θ, -Δ)]`.
pub fn v_monomial_closed(ctx: &ClarkOperatorContext, n: usize) -> Result<ModelVector> {
    let mut q = vec![ZERO; n + 1];
    q[n] = ONE;
    for k in 0..n {
        q[n - 1 - k] += ctx.moment(k + 1)?;
    }
    let t = &ctx.trunc;
    let qv: Vec<C64> = t.grid().iter().map(|&z| crate::poly::eval(&q, z)).collect();
    let m = t.resolution();
    let f: Vec<C64> = (0..m).map(|j| qv[j] * (ONE - t.theta_samples()[j])).collect();
    let g: Vec<C64> = (0..m).map(|j| -qv[j] * t.delta_samples()[j]).collect();
    let (f, dropped) = truncate_analytic(&f, t.order());
    if dropped > OVERFLOW_TOL {
        return Err(SpectraError::DegreeOverflow(dropped));
    }
    Ok(t.project(&ModelVector { f, g }))
}

/// Keeps Fourier modes `0..=n`; returns the samples and the dropped norm.
fn truncate_analytic(samples: &[C64], n: usize) -> (Vec<C64>, f64) {
    let m = samples.len();
    let mut c = fourier::coefficients(samples);
    let mut dropped = 0.0;
    for (i, ci) in c.iter_mut().enumerate() {
        let k = fourier::signed_frequency(i, m);
        if k < 0 || k as usize > n {
            dropped += ci.norm_sqr();
            *ci = ZERO;
        }
    }
    (fourier::samples(&c), dropped.sqrt())
}

/// `Vξ̄ⁿ` for `n ≥ 1` from the adjoint recursion `Vξ̄^{n+1} = T_θ*Vξ̄ⁿ + m̄ₙ y`.
pub fn v_monomial_negative(ctx: &ClarkOperatorContext, n: usize) -> Result<ModelVector> {
    if n == 0 {
        return Ok(ctx.x.clone());
    }
    let t = &ctx.trunc;
    let mut v = ctx.y.clone();
    for k in 1..n {
        v = t.apply_t_adjoint(&v);
        v.axpy(ctx.moment(k)?.conj(), &ctx.y);
    }
    Ok(v)
}

/// `Vξ̄ⁿ` from the closed form `P_θ[Σ_{k<n} m̄_k P_+(z̄^{n-1-k} ŷ)]`, the
/// kernel integral `∫ ξ(ξ̄ⁿ - z̄ⁿ)/(ξ - z) dμ = -Σ_{k<n} m̄_k z̄^{n-k}`
/// multiplying `(1 - θ, -Δ)`.
pub fn v_monomial_negative_closed(ctx: &ClarkOperatorContext, n: usize) -> Result<ModelVector> {
    if n == 0 {
        return Ok(ctx.x.clone());
    }
    let t = &ctx.trunc;
    let m = t.resolution();
    let mut kernel = vec![ZERO; m];
    for k in 0..n {
        let mk = ctx.moment(k)?.conj();
        for (j, z) in t.grid().iter().enumerate() {
            kernel[j] -= mk * z.conj().powi((n - k) as i32);
        }
    }
    let f: Vec<C64> = (0..m).map(|j| kernel[j] * (ONE - t.theta_samples()[j])).collect();
    let g: Vec<C64> = (0..m).map(|j| -kernel[j] * t.delta_samples()[j]).collect();
    Ok(t.project_analytic(&ModelVector { f, g }))
}

/// `V` applied to a trigonometric polynomial `Σ c_j ξ^j` given as
/// `(j, c_j)` pairs, through the monomial recursions.
pub fn v_trig_polynomial(ctx: &ClarkOperatorContext, coeffs: &[(i64, C64)]) -> Result<ModelVector> {
    let mut out = ModelVector::zeros(ctx.trunc.resolution());
    for &(j, c) in coeffs {
        let v = if j >= 0 {
            v_monomial_recursive(ctx, j as usize)?
        } else {
            v_monomial_negative(ctx, j.unsigned_abs() as usize)?
        };
        out.axpy(c, &v);
    }
    Ok(out)
}

/// Values of `f` (and optionally `df/dξ`) on the context's sample grid and
/// at the atoms of `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    pub grid: Vec<C64>,
    pub atoms: Vec<C64>,
    pub grid_prime: Option<Vec<C64>>,
    pub atoms_prime: Option<Vec<C64>>,
}

impl ClarkOperatorContext {
    /// Resolution of the grid on which `f` is sampled: the density grid of
    /// `μ`, or [`DEFAULT_RESOLUTION`] when `μ` is purely atomic.
    pub fn sample_resolution(&self) -> usize {
        if self.mu.resolution() > 0 {
            self.mu.resolution()
        } else {
            DEFAULT_RESOLUTION
        }
    }

    pub fn samples(&self, f: impl Fn(C64) -> C64, fprime: Option<&dyn Fn(C64) -> C64>) -> BoundarySamples {
        let grid = fourier::circle_grid(self.sample_resolution());
        let atoms: Vec<C64> = self.mu.atoms().iter().map(|a| a.point()).collect();
        BoundarySamples {
            grid: grid.iter().map(|&z| f(z)).collect(),
            atoms: atoms.iter().map(|&z| f(z)).collect(),
            grid_prime: fprime.map(|d| grid.iter().map(|&z| d(z)).collect()),
            atoms_prime: fprime.map(|d| atoms.iter().map(|&z| d(z)).collect()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdjointApplication {
    pub value: ModelVector,
    /// Norm of the Fourier content lost when moving from the sample grid to
    /// the model grid.
    pub resampling_residual: f64,
}

/// `V f` from the integral representation.
///
/// The kernel `ξ(f(ξ) - f(z))/(ξ - z)` is evaluated at every sample point
/// `z`; where a node of `μ` coincides with `z` its limit `z f'(z)` is used,
/// which requires derivative samples.
pub fn adjoint_clark_apply(ctx: &ClarkOperatorContext, f: &BoundarySamples) -> Result<AdjointApplication> {
    let r = ctx.sample_resolution();
    let mu = &ctx.mu;
    if f.grid.len() != r {
        return Err(SpectraError::SampleMismatch {
            expected: r,
            got: f.grid.len(),
        });
    }
    if f.atoms.len() != mu.atoms().len() {
        return Err(SpectraError::SampleMismatch {
            expected: mu.atoms().len(),
            got: f.atoms.len(),
        });
    }
    let zs = fourier::circle_grid(r);
    let density = mu.density();
    let atoms: Vec<(C64, f64)> = mu.atoms().iter().map(|a| (a.point(), a.w)).collect();

    let derivative_at = |j: usize| -> Result<C64> {
        let d = f
            .grid_prime
            .as_ref()
            .and_then(|p| p.get(j).copied())
            .ok_or_else(|| SpectraError::MissingDerivative(format!("grid point {j}")))?;
        if !d.re.is_finite() || !d.im.is_finite() {
            return Err(SpectraError::MissingDerivative(format!("grid point {j}")));
        }
        Ok(d)
    };

    let plus = fourier::riesz_plus(&f.grid);
    let mut b = vec![ZERO; r];
    for j in 0..r {
        let z = zs[j];
        let fz = f.grid[j];
        let mut acc = plus[j];
        for (a, &(zeta, w)) in atoms.iter().enumerate() {
            if (zeta - z).norm() < DIAGONAL_TOL {
                let d = match f.atoms_prime.as_ref().and_then(|p| p.get(a).copied()) {
                    Some(d) if d.re.is_finite() && d.im.is_finite() => d,
                    _ => derivative_at(j)?,
                };
                acc += w * z * d;
            } else {
                acc += w * zeta * (f.atoms[a] - fz) / (zeta - z);
            }
        }
        if !density.is_empty() {
            let mut s = ZERO;
            for (i, &w) in density.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                if i == j {
                    s += w * z * derivative_at(j)?;
                } else {
                    let xi = zs[i];
                    s += w * xi * (f.grid[i] - fz) / (xi - z);
                }
            }
            acc += s / r as f64;
        }
        b[j] = acc;
    }

    let t = &ctx.trunc;
    let m = t.resolution();
    let theta_r: Vec<C64> = t.theta().boundary_values(r);
    let first: Vec<C64> = (0..r).map(|j| b[j] * (ONE - theta_r[j])).collect();
    let second: Vec<C64> = (0..r).map(|j| -b[j] * crate::clark::delta_of(theta_r[j])).collect();
    let band = m / 2 - 1;
    let (first_m, d1) = fourier::resample(&fourier::riesz_plus(&first), m, band);
    let (second_m, d2) = fourier::resample(&second, m, band);
    let value = t.project_analytic(&ModelVector {
        f: first_m,
        g: second_m,
    });
    Ok(AdjointApplication {
        value,
        resampling_residual: d1.hypot(d2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramReport {
    /// `⟨Vξⁿ, Vξᵐ⟩ - m_{n-m}` for `0 ≤ n, m ≤ nmax`.
    pub deviation: Vec<Vec<f64>>,
    pub max_deviation: f64,
    /// Largest norm outside `K_θ(N)` among the vectors involved.
    pub truncation_residual: f64,
}

/// Compares the Gram matrix of `Vξⁿ` with the moment matrix of `μ`.
pub fn unitarity_check(ctx: &ClarkOperatorContext, nmax: usize) -> Result<GramReport> {
    let vs = (0..=nmax)
        .map(|n| v_monomial_closed(ctx, n))
        .collect::<Result<Vec<_>>>()?;
    let mut deviation = vec![vec![0.0; nmax + 1]; nmax + 1];
    let mut max_deviation = 0.0f64;
    for n in 0..=nmax {
        for k in 0..=nmax {
            let want = if n >= k {
                ctx.moment(n - k)?
            } else {
                ctx.moment(k - n)?.conj()
            };
            let dev = (vs[n].inner(&vs[k]) - want).norm();
            deviation[n][k] = dev;
            max_deviation = max_deviation.max(dev);
        }
    }
    let truncation_residual = vs.iter().map(|v| ctx.trunc.truncation_residual(v)).fold(0.0, f64::max);
    Ok(GramReport {
        deviation,
        max_deviation,
        truncation_residual,
    })
}

/// `max_n ‖T_θ(Vξⁿ) - (Vξ^{n+1} - m_{n+1}x)‖` over `n ≤ nmax`.
pub fn intertwining_check(ctx: &ClarkOperatorContext, nmax: usize) -> Result<Vec<f64>> {
    (0..=nmax)
        .map(|n| {
            let lhs = ctx.trunc.apply_t(&v_monomial_closed(ctx, n)?);
            let mut rhs = v_monomial_closed(ctx, n + 1)?;
            rhs.axpy(-ctx.moment(n + 1)?, &ctx.x);
            Ok(lhs.sub(&rhs).norm())
        })
        .collect()
}

/// `‖V f - V σ_k f‖` for the Fejér means `σ_k f`, `k = 1..=kmax`, with
/// `V f` from the integral representation and `V σ_k f` from the monomial
/// recursions.
pub fn fejer_diagnostic(ctx: &ClarkOperatorContext, f: &BoundarySamples, kmax: usize) -> Result<Vec<f64>> {
    let vf = adjoint_clark_apply(ctx, f)?.value;
    let c = fourier::coefficients(&f.grid);
    let r = f.grid.len();
    (1..=kmax)
        .map(|k| {
            let coeffs: Vec<(i64, C64)> = (-(k as i64)..=k as i64)
                .filter_map(|j| {
                    let s = fourier::slot(j, r)?;
                    let weight = 1.0 - j.unsigned_abs() as f64 / (k as f64 + 1.0);
                    Some((j, c[s] * weight))
                })
                .collect();
            let approx = v_trig_polynomial(ctx, &coeffs)?;
            Ok(vf.sub(&approx).norm())
        })
        .collect()
}
