//! Localization observables: eigenvalues, inverse participation ratios,
//! consecutive-gap ratios, site spectral measures and Krylov ranks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AndersonRealization, CsrMatrix, LatticeConfig};
use crate::error::{Result, SpectraError};
use crate::measure::RealLineMeasure;

/// Largest dimension diagonalized densely.
pub const DENSE_LIMIT: usize = 4096;
/// Eigenvalues closer than this (relative to `max(1, |λ|)`) form one atom.
pub const CLUSTER_TOL: f64 = 1e-12;
/// Site weights at or below this are treated as exact zeros.
pub const WEIGHT_FLOOR: f64 = 1e-14;
/// Relative cutoff for the Krylov rank.
pub const KRYLOV_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LocalizationDiagnostics {
    /// All eigenvalues (dense case) or the two extremal Ritz values.
    pub eigenvalues: Vec<f64>,
    pub ipr: Vec<f64>,
    pub site: usize,
    pub site_measure: Option<RealLineMeasure>,
    pub spacing_ratios: Vec<f64>,
    pub krylov_rank: Option<usize>,
}

/// Interval `[-c, 4d + c]` that must contain the spectrum.
pub fn spectrum_bounds(config: &LatticeConfig) -> (f64, f64) {
    let c = config.disorder.strength();
    (-c, 4.0 * config.d as f64 + c)
}

pub fn inverse_participation_ratio(psi: &[f64]) -> f64 {
    let (s2, s4) = psi.iter().fold((0.0, 0.0), |(a, b), &x| {
        let x2 = x * x;
        (a + x2, b + x2 * x2)
    });
    s4 / (s2 * s2)
}

/// `r_n = min(s_n, s_{n+1}) / max(s_n, s_{n+1})` over consecutive gaps of
/// sorted eigenvalues; pairs of zero gaps are skipped.
pub fn spacing_ratios(eigenvalues: &[f64]) -> Vec<f64> {
    let gaps: Vec<f64> = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.windows(2)
        .filter(|g| g[0].max(g[1]) > 0.0)
        .map(|g| g[0].min(g[1]) / g[0].max(g[1]))
        .collect()
}

/// Eigenvalues in increasing order with matching eigenvector columns.
pub fn dense_eigen(h: &CsrMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if h.dim() > DENSE_LIMIT {
        return Err(SpectraError::ExceedsDeskScale);
    }
    let eig = SymmetricEigen::new(h.to_dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(h.dim(), h.dim(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

fn site_measure_from_eigen(vals: &[f64], vecs: &DMatrix<f64>, site: usize) -> Result<RealLineMeasure> {
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (k, &lambda) in vals.iter().enumerate() {
        let w = vecs[(site, k)].powi(2);
        match atoms.last_mut() {
            Some(last) if (lambda - last.0).abs() <= CLUSTER_TOL * lambda.abs().max(1.0) => last.1 += w,
            _ => atoms.push((lambda, w)),
        }
    }
    atoms.retain(|&(_, w)| w > WEIGHT_FLOOR);
    RealLineMeasure::from_atoms(&atoms)
}

/// `Σ_k |ψ_k(site)|² δ_{λ_k}`. Eigenvalue clusters within [`CLUSTER_TOL`]
/// are merged with summed weights and eigenvectors orthogonal to the site
/// (weight at most [`WEIGHT_FLOOR`]) are dropped.
pub fn spectral_measure_at_site(real: &AndersonRealization, site: usize) -> Result<RealLineMeasure> {
    check_site(real.hamiltonian.dim(), site)?;
    let (vals, vecs) = dense_eigen(&real.hamiltonian)?;
    site_measure_from_eigen(&vals, &vecs, site)
}

fn check_site(sites: usize, site: usize) -> Result<()> {
    if site >= sites {
        return Err(SpectraError::SiteOutOfRange { site, sites });
    }
    Ok(())
}

/// Dimension of the cyclic subspace generated by `δ_site`: the number of
/// Lanczos steps (with full reorthogonalization) before the new direction
/// drops below `tol · ‖H‖`.
pub fn krylov_rank(h: &CsrMatrix, site: usize, tol: f64) -> Result<usize> {
    check_site(h.dim(), site)?;
    if h.dim() > DENSE_LIMIT {
        return Err(SpectraError::ExceedsDeskScale);
    }
    let (lo, hi) = h.gershgorin();
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let n = h.dim();
    let mut basis: Vec<DVector<f64>> = vec![DVector::from_fn(n, |i, _| if i == site { 1.0 } else { 0.0 })];
    while basis.len() < n {
        let mut w = DVector::from_vec(h.mul_vec(basis.last().unwrap().as_slice()));
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let beta = w.norm();
        if beta <= tol * scale {
            break;
        }
        basis.push(w / beta);
    }
    Ok(basis.len())
}

/// Extremal Ritz values after `steps` Lanczos iterations from a fixed
/// pseudo-random start vector.
pub fn lanczos_extremes(h: &CsrMatrix, steps: usize) -> (f64, f64) {
    let n = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= norm);
    let mut prev = vec![0.0; n];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for _ in 0..steps.min(n).max(1) {
        let mut w = h.mul_vec(&q);
        let a: f64 = w.iter().zip(&q).map(|(x, y)| x * y).sum();
        let b_prev = betas.last().copied().unwrap_or(0.0);
        for i in 0..n {
            w[i] -= a * q[i] + b_prev * prev[i];
        }
        alphas.push(a);
        let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if b < 1e-12 {
            break;
        }
        betas.push(b);
        prev = std::mem::replace(&mut q, w.into_iter().map(|x| x / b).collect());
    }
    let k = alphas.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j || j + 1 == i {
            betas[i.min(j)]
        } else {
            0.0
        }
    });
    let ev = SymmetricEigen::new(t).eigenvalues;
    (ev.min(), ev.max())
}

/// Full diagnostics when the box is small enough for dense
/// diagonalization, extremal eigenvalues only otherwise.
pub fn diagnose(real: &AndersonRealization, site: usize) -> Result<LocalizationDiagnostics> {
    let h = &real.hamiltonian;
    check_site(h.dim(), site)?;
    if h.dim() > DENSE_LIMIT {
        let (lo, hi) = lanczos_extremes(h, 200);
        return Ok(LocalizationDiagnostics {
            eigenvalues: vec![lo, hi],
            ipr: Vec::new(),
            site,
            site_measure: None,
            spacing_ratios: Vec::new(),
            krylov_rank: None,
        });
    }
    let (vals, vecs) = dense_eigen(h)?;
    let ipr = (0..vals.len())
        .map(|k| inverse_participation_ratio(vecs.column(k).as_slice()))
        .collect();
    Ok(LocalizationDiagnostics {
        spacing_ratios: spacing_ratios(&vals),
        site_measure: Some(site_measure_from_eigen(&vals, &vecs, site)?),
        krylov_rank: Some(krylov_rank(h, site, KRYLOV_TOL)?),
        ipr,
        site,
        eigenvalues: vals,
    })
}
