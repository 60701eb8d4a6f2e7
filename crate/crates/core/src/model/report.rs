//! Numerical indicators for the equivalent characterizations of an inner
//! characteristic function: decay of `(U*)^k`, collapse of the second model
//! component, unimodular boundary values, and vanishing ac part of the
//! unitary perturbations.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::clark::{herglotz_measure, ClarkFamilyPoint, SchurFunction, DEFAULT_RESOLUTION};
use crate::error::Result;
use crate::fourier;
use crate::linalg::{op_norm, CMatrix, CVector};
use crate::model::{ContractionMatrix, ModelSpaceTruncation};

/// Indicator values below this count as "inner-like".
pub const INNER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Indicator {
    pub value: f64,
    pub inner_like: bool,
}

impl Indicator {
    fn new(value: f64, tol: f64) -> Self {
        Self {
            value,
            inner_like: value < tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourStatementReport {
    /// `max_v ‖(U*)^k v‖` over basis vectors, `k = 0..=nmax`.
    pub decay: Vec<f64>,
    /// Extrapolated limit of `decay` (see [`decay_limit`]).
    pub power_decay: Indicator,
    /// Largest second-component norm among basis vectors (scalar case).
    pub second_component: Option<Indicator>,
    /// `max | |θ| - 1 |` or `max ‖I - Θ*Θ‖` on the boundary grid.
    pub boundary_unitarity: Indicator,
    /// Largest ac mass of `μ_γ` over the sampled `γ` (scalar case).
    pub ac_mass: Option<Indicator>,
    pub consistent: bool,
    pub inner: bool,
}

impl FourStatementReport {
    /// The same indicator values judged against `tol` instead of [`INNER_TOL`].
    pub fn rethreshold(&self, tol: f64) -> Self {
        finish(
            self.decay.clone(),
            self.second_component.as_ref().map(|i| i.value),
            self.boundary_unitarity.value,
            self.ac_mass.as_ref().map(|i| i.value),
            tol,
        )
    }
}

/// Limit of the decay sequence: Aitken's Δ² on the last three values, kept
/// within `[0, last]`. A sequence that has stalled is its own limit.
pub fn decay_limit(decay: &[f64]) -> f64 {
    let n = decay.len();
    let Some(&last) = decay.last() else {
        return f64::INFINITY;
    };
    if n < 3 || last < f64::EPSILON {
        return last;
    }
    let (a, b, c) = (decay[n - 3], decay[n - 2], last);
    let d2 = c - 2.0 * b + a;
    if !(c < b && b < a) || d2.abs() <= 1e-12 * a {
        return last;
    }
    (c - (c - b).powi(2) / d2).clamp(0.0, last)
}

fn finish(decay: Vec<f64>, second: Option<f64>, boundary: f64, ac: Option<f64>, tol: f64) -> FourStatementReport {
    let power_decay = Indicator::new(decay_limit(&decay), tol);
    let second_component = second.map(|v| Indicator::new(v, tol));
    let boundary_unitarity = Indicator::new(boundary, tol);
    let ac_mass = ac.map(|v| Indicator::new(v, tol));
    let flags: Vec<bool> = [
        Some(&power_decay),
        second_component.as_ref(),
        Some(&boundary_unitarity),
        ac_mass.as_ref(),
    ]
    .into_iter()
    .flatten()
    .map(|i| i.inner_like)
    .collect();
    let consistent = flags.iter().all(|&f| f == flags[0]);
    FourStatementReport {
        decay,
        power_decay,
        second_component,
        boundary_unitarity,
        ac_mass,
        consistent,
        inner: consistent && flags[0],
    }
}

/// Default sample of unimodular parameters for the ac-mass indicator.
pub fn default_gammas() -> Vec<C64> {
    (0..4)
        .map(|k| C64::from_polar(1.0, 0.5 * std::f64::consts::PI * k as f64))
        .collect()
}

/// Report for a rational scalar `θ`, using the truncation of degree `n`.
pub fn four_statement_report_scalar(
    theta: &SchurFunction,
    n: usize,
    nmax: usize,
    boundary_points: usize,
    gammas: &[C64],
) -> Result<FourStatementReport> {
    let k = ModelSpaceTruncation::build(theta, n.max(theta.degree()).max(1))?;
    let mut vs: Vec<_> = (0..k.dim()).map(|i| k.basis_vector(i)).collect();
    let second = vs.iter().map(|v| v.second_norm()).fold(0.0, f64::max);
    let mut decay = Vec::with_capacity(nmax + 1);
    for step in 0..=nmax {
        if step > 0 {
            vs = vs.iter().map(|v| k.apply_t_adjoint(v)).collect();
        }
        decay.push(vs.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let boundary = theta.unimodular_deviation(boundary_points);
    let mut ac = 0.0f64;
    for &g in gammas {
        let mu = herglotz_measure(&ClarkFamilyPoint::new(theta.clone(), g)?, DEFAULT_RESOLUTION)?;
        ac = ac.max(mu.ac_mass());
    }
    Ok(finish(decay, Some(second), boundary, Some(ac), INNER_TOL))
}

/// Report for a matrix contraction through its characteristic function.
pub fn four_statement_report_matrix(
    u: &ContractionMatrix,
    nmax: usize,
    boundary_points: usize,
) -> Result<FourStatementReport> {
    let n = u.dim();
    let ustar = u.matrix().adjoint();
    let mut power = CMatrix::identity(n, n);
    let mut decay = Vec::with_capacity(nmax + 1);
    for step in 0..=nmax {
        if step > 0 {
            power = &ustar * power;
        }
        let worst = (0..n)
            .map(|i| {
                let e = CVector::from_fn(n, |r, _| if r == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
                (&power * e).norm()
            })
            .fold(0.0, f64::max);
        decay.push(worst);
    }
    let mut boundary = 0.0f64;
    for xi in fourier::circle_grid(boundary_points) {
        let dev = match u.characteristic_any(xi) {
            Ok(th) => {
                let r = th.ncols();
                op_norm(&(CMatrix::identity(r, r) - th.adjoint() * th))
            }
            Err(_) => f64::INFINITY,
        };
        boundary = boundary.max(dev);
    }
    Ok(finish(decay, None, boundary, None, INNER_TOL))
}
