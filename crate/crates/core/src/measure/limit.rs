//! Finite schedules standing in for `lim_{ε↓0}` and radial boundary limits.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SpectraError};

/// Decreasing sequence of offsets `ε_k` from the boundary, plus the order of
/// the polynomial extrapolation to `ε = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLimitSchedule {
    epsilons: Vec<f64>,
    order: usize,
    tol: f64,
}

impl Default for BoundaryLimitSchedule {
    /// `ε_k = 2^{-k}` for `k = 4..=20`, quadratic extrapolation.
    fn default() -> Self {
        let epsilons = (4..=20).map(|k| 0.5f64.powi(k)).collect();
        Self {
            epsilons,
            order: 2,
            tol: 1e-6,
        }
    }
}

impl BoundaryLimitSchedule {
    pub fn new(epsilons: Vec<f64>, order: usize) -> Result<Self> {
        if epsilons.len() < order + 2 {
            return Err(SpectraError::InvalidSchedule(format!(
                "need at least {} offsets for order {order}",
                order + 2
            )));
        }
        if epsilons.windows(2).any(|w| !(w[1] < w[0])) || epsilons[0] <= 0.0 {
            return Err(SpectraError::InvalidSchedule(
                "offsets must be positive and strictly decreasing".into(),
            ));
        }
        let last = *epsilons.last().unwrap();
        if last <= f64::EPSILON.sqrt() {
            return Err(SpectraError::InvalidSchedule(format!(
                "last offset {last:e} is below sqrt(machine epsilon)"
            )));
        }
        Ok(Self {
            epsilons,
            order,
            tol: 1e-6,
        })
    }

    /// Geometric schedule `ε_k = ratio^k · start` with `count` entries.
    pub fn geometric(start: f64, ratio: f64, count: usize, order: usize) -> Result<Self> {
        let eps = (0..count).map(|k| start * ratio.powi(k as i32)).collect();
        Self::new(eps, order)
    }

    /// Same range as the default but twice as many offsets.
    pub fn doubled() -> Self {
        let epsilons = (8..=40).map(|k| 0.5f64.powf(k as f64 / 2.0)).collect();
        Self {
            epsilons,
            order: 2,
            tol: 1e-6,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Radii `1 - ε_k` for radial approach to the circle.
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.epsilons.iter().map(|e| 1.0 - e)
    }
}

/// Extrapolated limit with its convergence diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub value: C64,
    /// Difference between the last two extrapolants.
    pub increment: f64,
    pub converged: bool,
}

/// Neville evaluation at 0 of the interpolant through `(x_i, y_i)`.
fn neville_at_zero(xs: &[f64], ys: &[C64]) -> C64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (p[i] * (-xj) - p[i + 1] * (-xi)) / (xi - xj);
        }
    }
    p[0]
}

/// Polynomial extrapolation to `ε = 0` of values sampled along a schedule.
pub fn extrapolate(schedule: &BoundaryLimitSchedule, values: &[C64]) -> LimitEstimate {
    let eps = schedule.epsilons();
    let k = schedule.order + 1;
    let n = values.len().min(eps.len());
    let mut extrapolants = Vec::with_capacity(n);
    for end in k..=n {
        extrapolants.push(neville_at_zero(&eps[end - k..end], &values[end - k..end]));
    }
    let (value, increment) = match extrapolants.len() {
        0 => (values.last().copied().unwrap_or_default(), f64::INFINITY),
        1 => (extrapolants[0], (values[n - 1] - values[n - 2]).norm()),
        m => (extrapolants[m - 1], (extrapolants[m - 1] - extrapolants[m - 2]).norm()),
    };
    let finite = value.re.is_finite() && value.im.is_finite() && increment.is_finite();
    let converged = finite && increment <= schedule.tol * value.norm().max(1.0);
    LimitEstimate {
        value,
        increment,
        converged,
    }
}

/// Radial limit of `evaluator` at the unimodular point `xi`.
///
/// Divergence is reported through `converged = false`, not as an error;
/// only failures of the evaluator itself propagate.
pub fn radial_limit<F>(evaluator: F, xi: C64, schedule: &BoundaryLimitSchedule) -> Result<LimitEstimate>
where
    F: Fn(C64) -> Result<C64>,
{
    let values = schedule
        .radii()
        .map(|r| evaluator(xi * r))
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate(schedule, &values))
}
