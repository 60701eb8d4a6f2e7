//! Dense complex polynomials in ascending coefficient order and a
//! simultaneous (Aberth–Ehrlich) root finder.

use num_complex::Complex64 as C64;

use crate::error::{Result, SpectraError};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(ZERO, |acc, &ck| acc * z + ck)
}

/// Value and first derivative together.
pub fn eval_with_derivative(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

pub fn derivative(c: &[C64]) -> Vec<C64> {
    c.iter().enumerate().skip(1).map(|(k, &ck)| ck * k as f64).collect()
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(ZERO) + b.get(k).copied().unwrap_or(ZERO))
        .collect()
}

pub fn scale(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|&x| x * s).collect()
}

/// Drops trailing coefficients with modulus at most `tol`.
pub fn trim(mut c: Vec<C64>, tol: f64) -> Vec<C64> {
    while c.last().is_some_and(|x| x.norm() <= tol) {
        c.pop();
    }
    c
}

/// Degree after trimming exact zeros; the zero polynomial has degree 0.
pub fn degree(c: &[C64]) -> usize {
    c.iter().rposition(|x| *x != ZERO).unwrap_or(0)
}

/// Monic-free product `Π (z - r_k)`.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    roots
        .iter()
        .fold(vec![C64::new(1.0, 0.0)], |acc, &r| mul(&acc, &[-r, C64::new(1.0, 0.0)]))
}

/// All roots of `c`, repeated by multiplicity.
///
/// Exact zero roots are split off first; the rest run through Aberth–Ehrlich
/// iteration followed by one Newton step on the original polynomial.
pub fn roots(c: &[C64]) -> Result<Vec<C64>> {
    let c = trim(c.to_vec(), 0.0);
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let zeros = c.iter().position(|x| *x != ZERO).unwrap_or(0);
    let p: Vec<C64> = c[zeros..].to_vec();
    let n = p.len() - 1;
    let mut out = vec![ZERO; zeros];
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        out.push(-p[0] / p[1]);
        return Ok(out);
    }
    let lead = p[n];
    // Cauchy bound on root moduli; start on a circle inside it
    let bound = 1.0 + p[..n].iter().map(|x| (x / lead).norm()).fold(0.0, f64::max);
    let radius = {
        let geo = (p[0] / lead).norm().powf(1.0 / n as f64);
        if geo > 0.0 && geo.is_finite() {
            geo.min(bound)
        } else {
            bound * 0.5
        }
    };
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (v, dv) = eval_with_derivative(&p, z[k]);
            if v == ZERO {
                continue;
            }
            let ratio = v / dv;
            let s: C64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        // accept if residuals are at rounding level anyway
        let scale_at = |w: C64| p.iter().map(|x| x.norm()).sum::<f64>() * w.norm().max(1.0).powi(n as i32);
        if z.iter().any(|&w| eval(&p, w).norm() > 1e-10 * scale_at(w)) {
            return Err(SpectraError::AtomLocationFailed);
        }
    }
    for w in z.iter_mut() {
        let (v, dv) = eval_with_derivative(&p, *w);
        if dv != ZERO {
            let cand = *w - v / dv;
            if eval(&p, cand).norm() <= v.norm() {
                *w = cand;
            }
        }
    }
    out.extend(z);
    Ok(out)
}
