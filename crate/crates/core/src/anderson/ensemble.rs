//! Seeded ensembles of Anderson realizations.
//!
//! Trial `t` uses seed `seed + t` (wrapping). Trials run on a rayon pool
//! whose size is capped by `SPECTRA_THREADS`; results are merged by trial
//! index, so the table does not depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use super::diagnostics::{dense_eigen, inverse_participation_ratio, lanczos_extremes, spacing_ratios, spectrum_bounds};
use super::{build_hamiltonian, LatticeConfig, DENSE_LIMIT};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Ipr,
    SpacingRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Spectrum inside `[-c, 4d + c]`.
    pub contained: bool,
    pub median_ipr: Option<f64>,
    pub mean_ipr: Option<f64>,
    pub mean_spacing_ratio: Option<f64>,
    #[serde(skip)]
    pub ipr: Vec<f64>,
    #[serde(skip)]
    pub spacing_ratios: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    /// Linear interpolation between order statistics; `None` when empty.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let i = h.floor() as usize;
            let j = (i + 1).min(v.len() - 1);
            v[i] + (h - i as f64) * (v[j] - v[i])
        };
        Some(Self {
            q1: at(0.25),
            median: at(0.5),
            q3: at(0.75),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub trials: usize,
    pub sites: usize,
    /// Over all eigenvectors of all trials.
    pub ipr: Option<Quartiles>,
    /// Over all consecutive-gap ratios of all trials.
    pub spacing_ratio: Option<Quartiles>,
    pub all_contained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleTable {
    pub config: LatticeConfig,
    pub rows: Vec<TrialRow>,
    pub summary: EnsembleSummary,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn run_trial(config: &LatticeConfig, trial: usize, observables: &[Observable]) -> Result<TrialRow> {
    let seed = config.seed.wrapping_add(trial as u64);
    let real = build_hamiltonian(&config.with_seed(seed))?;
    let h = &real.hamiltonian;
    let (lo, hi) = spectrum_bounds(config);
    let (eigs, ipr) = if h.dim() <= DENSE_LIMIT {
        let (vals, vecs) = dense_eigen(h)?;
        let ipr = if observables.contains(&Observable::Ipr) {
            (0..vals.len())
                .map(|k| inverse_participation_ratio(vecs.column(k).as_slice()))
                .collect()
        } else {
            Vec::new()
        };
        (vals, ipr)
    } else {
        let (a, b) = lanczos_extremes(h, 200);
        (vec![a, b], Vec::new())
    };
    let ratios = if observables.contains(&Observable::SpacingRatio) && h.dim() <= DENSE_LIMIT {
        spacing_ratios(&eigs)
    } else {
        Vec::new()
    };
    let min_eigenvalue = eigs[0];
    let max_eigenvalue = *eigs.last().unwrap();
    Ok(TrialRow {
        trial,
        seed,
        min_eigenvalue,
        max_eigenvalue,
        contained: min_eigenvalue >= lo - 1e-9 && max_eigenvalue <= hi + 1e-9,
        median_ipr: Quartiles::of(&ipr).map(|q| q.median),
        mean_ipr: mean(&ipr),
        mean_spacing_ratio: mean(&ratios),
        ipr,
        spacing_ratios: ratios,
    })
}

/// Thread cap from `SPECTRA_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SPECTRA_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

pub fn ensemble_run(config: &LatticeConfig, trials: usize, observables: &[Observable]) -> Result<EnsembleTable> {
    config.validate()?;
    let trials = trials.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap().unwrap_or(0))
        .build()
        .expect("thread pool");
    let rows = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| run_trial(config, t, observables))
            .collect::<Result<Vec<_>>>()
    })?;
    let pooled =
        |f: fn(&TrialRow) -> &Vec<f64>| -> Vec<f64> { rows.iter().flat_map(|r| f(r).iter().copied()).collect() };
    let summary = EnsembleSummary {
        trials,
        sites: config.sites(),
        ipr: Quartiles::of(&pooled(|r| &r.ipr)),
        spacing_ratio: Quartiles::of(&pooled(|r| &r.spacing_ratios)),
        all_contained: rows.iter().all(|r| r.contained),
    };
    Ok(EnsembleTable {
        config: *config,
        rows,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anderson::{diagnose, Boundary, Disorder};

    fn cfg() -> LatticeConfig {
        LatticeConfig {
            d: 1,
            l: 40,
            boundary: Boundary::Periodic,
            disorder: Disorder::Uniform { c: 1.5 },
            seed: 99,
        }
    }

    const ALL: [Observable; 2] = [Observable::Ipr, Observable::SpacingRatio];

    #[test]
    fn single_trial_matches_diagnose() {
        let t = ensemble_run(&cfg(), 1, &ALL).unwrap();
        let d = diagnose(&build_hamiltonian(&cfg()).unwrap(), 0).unwrap();
        assert_eq!(t.rows[0].ipr, d.ipr);
        assert_eq!(t.rows[0].spacing_ratios, d.spacing_ratios);
        assert_eq!(t.rows[0].min_eigenvalue, d.eigenvalues[0]);
    }

    #[test]
    fn reruns_are_identical() {
        let a = ensemble_run(&cfg(), 10, &ALL).unwrap();
        let b = ensemble_run(&cfg(), 10, &ALL).unwrap();
        assert_eq!(a, b);
        assert!(a.summary.all_contained);
        assert_eq!(a.rows[3].seed, 102);
    }

    #[test]
    fn quartiles_interpolate() {
        let q = Quartiles::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((q.q1, q.median, q.q3), (2.0, 3.0, 4.0));
        assert_eq!(Quartiles::of(&[1.0, 2.0]).unwrap().median, 1.5);
        assert!(Quartiles::of(&[]).is_none());
    }
}
