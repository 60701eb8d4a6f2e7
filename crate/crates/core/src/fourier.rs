//! Equispaced boundary grids on the unit circle and FFT helpers.
//!
//! A sample vector of length `m` holds values at `exp(2πi j/m)`. Fourier
//! index `k < m/2` is the nonnegative frequency `k`; the upper half holds
//! the negative frequencies `k - m` (the Nyquist slot counts as negative).

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unimodular grid points `exp(2πi j/m)`.
pub fn circle_grid(m: usize) -> Vec<C64> {
    (0..m).map(|j| C64::from_polar(1.0, grid_angle(j, m))).collect()
}

pub fn grid_angle(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

/// Signed frequency stored at FFT slot `index`.
pub fn signed_frequency(index: usize, m: usize) -> i64 {
    if index < m / 2 {
        index as i64
    } else {
        index as i64 - m as i64
    }
}

/// FFT slot holding signed frequency `k`, if it is resolvable on `m` points.
pub fn slot(k: i64, m: usize) -> Option<usize> {
    let half = (m / 2) as i64;
    if k >= 0 && k < half {
        Some(k as usize)
    } else if k < 0 && k >= -(m as i64 - half) {
        Some((k + m as i64) as usize)
    } else {
        None
    }
}

/// Fourier coefficients `c_k = (1/m) Σ_j g_j ξ_j^{-k}` in FFT slot order.
pub fn coefficients(samples: &[C64]) -> Vec<C64> {
    let m = samples.len();
    let mut buf = samples.to_vec();
    if m == 0 {
        return buf;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(m).process(&mut buf));
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`coefficients`].
pub fn samples(coeffs: &[C64]) -> Vec<C64> {
    let m = coeffs.len();
    let mut buf = coeffs.to_vec();
    if m == 0 {
        return buf;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m).process(&mut buf));
    buf
}

/// Riesz projection onto nonnegative frequencies, sample in, sample out.
pub fn riesz_plus(values: &[C64]) -> Vec<C64> {
    let m = values.len();
    let mut c = coefficients(values);
    for (i, ci) in c.iter_mut().enumerate() {
        if signed_frequency(i, m) < 0 {
            *ci = C64::new(0.0, 0.0);
        }
    }
    samples(&c)
}

/// Resamples a band-limited signal onto a grid of a different size, keeping
/// frequencies `-band..=band`. Returns the new samples and the l2 norm of the
/// discarded coefficients.
pub fn resample(values: &[C64], target: usize, band: usize) -> (Vec<C64>, f64) {
    let m = values.len();
    let c = coefficients(values);
    let mut out = vec![C64::new(0.0, 0.0); target];
    let mut dropped = 0.0;
    for (i, ci) in c.iter().enumerate() {
        let k = signed_frequency(i, m);
        if k.unsigned_abs() as usize <= band {
            if let Some(s) = slot(k, target) {
                out[s] = *ci;
                continue;
            }
        }
        dropped += ci.norm_sqr();
    }
    (samples(&out), dropped.sqrt())
}

/// Evaluates `Σ_k c_k z^k` for the nonnegative-frequency slots of `coeffs`.
pub fn eval_analytic_part(coeffs: &[C64], z: C64) -> C64 {
    let m = coeffs.len();
    let top = m / 2;
    let mut acc = C64::new(0.0, 0.0);
    for k in (0..top).rev() {
        acc = acc * z + coeffs[k];
    }
    acc
}

/// Evaluates `Σ_{k≥1} c_{-k} w^k` for the negative-frequency slots.
pub fn eval_antianalytic_part(coeffs: &[C64], w: C64) -> C64 {
    let m = coeffs.len();
    let count = m - m / 2;
    let mut acc = C64::new(0.0, 0.0);
    for k in (1..=count).rev() {
        acc = acc * w + coeffs[m - k];
    }
    acc * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_of_monomial() {
        let g = circle_grid(16);
        let v: Vec<C64> = g.iter().map(|z| z.powi(3) + z.inv()).collect();
        let c = coefficients(&v);
        assert!((c[3] - 1.0).norm() < 1e-14);
        assert!((c[slot(-1, 16).unwrap()] - 1.0).norm() < 1e-14);
        let back = samples(&c);
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn riesz_kills_negative_modes() {
        let g = circle_grid(32);
        let v: Vec<C64> = g.iter().map(|z| 2.0 * z + z.inv().powi(2)).collect();
        let p = riesz_plus(&v);
        for (z, pv) in g.iter().zip(&p) {
            assert!((pv - 2.0 * z).norm() < 1e-13);
        }
    }

    #[test]
    fn analytic_and_antianalytic_evaluation() {
        let g = circle_grid(32);
        let v: Vec<C64> = g.iter().map(|z| 1.0 + 3.0 * z + 5.0 * z.inv()).collect();
        let c = coefficients(&v);
        let z = C64::new(0.3, 0.1);
        assert!((eval_analytic_part(&c, z) - (1.0 + 3.0 * z)).norm() < 1e-13);
        assert!((eval_antianalytic_part(&c, z) - 5.0 * z).norm() < 1e-13);
    }

    #[test]
    fn resample_between_grids() {
        let g = circle_grid(64);
        let v: Vec<C64> = g.iter().map(|z| z.powi(2) - 0.5 * z.inv().powi(3)).collect();
        let (w, dropped) = resample(&v, 16, 4);
        assert!(dropped < 1e-13);
        for (z, wv) in circle_grid(16).iter().zip(&w) {
            assert!((wv - (z.powi(2) - 0.5 * z.inv().powi(3))).norm() < 1e-13);
        }
    }
}
