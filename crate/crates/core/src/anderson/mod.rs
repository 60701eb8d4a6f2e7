//! Discrete random Schrödinger operators on finite boxes of `ℤ^d` and
//! Anderson-type Hamiltonians `A + Σ ω_n (·, φ_n) φ_n`.
//!
//! The lattice operator is `(Hu)(j) = -Σ_{|n|=1} (u(j+n) - u(j)) + ω_j u(j)`.
//! With Dirichlet boundary `u` vanishes outside the box, so every diagonal
//! entry is `2d + ω_j`; with periodic boundary the box is a torus.

pub mod diagnostics;
pub mod ensemble;
pub mod sparse;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};

pub use diagnostics::{
    diagnose, inverse_participation_ratio, krylov_rank, lanczos_extremes, spacing_ratios, spectral_measure_at_site,
    spectrum_bounds, LocalizationDiagnostics, DENSE_LIMIT,
};
pub use ensemble::{ensemble_run, EnsembleSummary, EnsembleTable, Observable, Quartiles, TrialRow};
pub use sparse::CsrMatrix;

/// Largest number of sites accepted.
pub const MAX_SITES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Disorder {
    /// i.i.d. uniform on `[-c, c)`.
    Uniform { c: f64 },
    /// i.i.d. `±1` with equal probability.
    Bernoulli,
}

impl Disorder {
    /// Bound on `|ω_j|`.
    pub fn strength(&self) -> f64 {
        match *self {
            Disorder::Uniform { c } => c,
            Disorder::Bernoulli => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub boundary: Boundary,
    pub disorder: Disorder,
    pub seed: u64,
}

impl LatticeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(SpectraError::InvalidLattice(format!(
                "d = {} not in {{1, 2, 3}}",
                self.d
            )));
        }
        if self.l < 2 {
            return Err(SpectraError::InvalidLattice(format!("L = {} < 2", self.l)));
        }
        if let Disorder::Uniform { c } = self.disorder {
            if !(c > 0.0 && c.is_finite()) {
                return Err(SpectraError::InvalidLattice(format!(
                    "uniform disorder needs c > 0, got {c}"
                )));
            }
        }
        match self.l.checked_pow(self.d as u32) {
            Some(n) if n <= MAX_SITES => Ok(()),
            _ => Err(SpectraError::ExceedsDeskScale),
        }
    }

    pub fn sites(&self) -> usize {
        self.l.pow(self.d as u32)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    /// The potential `ω` drawn from ChaCha8 seeded with `seed`, one draw per
    /// site in index order.
    pub fn sample_potential(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.sites();
        Ok(match self.disorder {
            Disorder::Uniform { c } => (0..n).map(|_| rng.random_range(-c..c)).collect(),
            Disorder::Bernoulli => (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect(),
        })
    }
}

/// Nearest-neighbour pairs `(i, j)` with `i` the site and `j` a neighbour,
/// one entry per direction; on a periodic box of side 2 both directions
/// reach the same site and the pair appears twice.
pub fn neighbours(d: usize, l: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let n = l.pow(d as u32);
    let mut out = Vec::with_capacity(2 * d * n);
    for i in 0..n {
        let mut stride = 1;
        for _ in 0..d {
            let coord = (i / stride) % l;
            for step in [-1i64, 1] {
                let c = coord as i64 + step;
                let c = match boundary {
                    Boundary::Dirichlet if c < 0 || c >= l as i64 => continue,
                    Boundary::Dirichlet => c as usize,
                    Boundary::Periodic => c.rem_euclid(l as i64) as usize,
                };
                out.push((i, i - coord * stride + c * stride));
            }
            stride *= l;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AndersonRealization {
    pub config: LatticeConfig,
    pub potential: Vec<f64>,
    pub hamiltonian: CsrMatrix,
}

/// The realization for `config.seed`.
pub fn build_hamiltonian(config: &LatticeConfig) -> Result<AndersonRealization> {
    let potential = config.sample_potential()?;
    build_with_potential(config, potential)
}

/// The lattice operator with a prescribed potential.
pub fn build_with_potential(config: &LatticeConfig, potential: Vec<f64>) -> Result<AndersonRealization> {
    config.validate()?;
    let n = config.sites();
    if potential.len() != n {
        return Err(SpectraError::InvalidLattice(format!(
            "potential has {} entries for {n} sites",
            potential.len()
        )));
    }
    let diag = 2.0 * config.d as f64;
    let mut triplets: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, diag + potential[i])).collect();
    triplets.extend(
        neighbours(config.d, config.l, config.boundary)
            .into_iter()
            .map(|(i, j)| (i, j, -1.0)),
    );
    Ok(AndersonRealization {
        config: *config,
        potential,
        hamiltonian: CsrMatrix::from_triplets(n, triplets),
    })
}

/// `A + Σ ω_n φ_n φ_nᵀ` for orthonormal columns `φ_n` of `phis`.
pub fn anderson_type_hamiltonian(a: &DMatrix<f64>, phis: &DMatrix<f64>, omegas: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(SpectraError::InvalidMatrix(format!("A is {}x{}", n, a.ncols())));
    }
    if (0..n).any(|i| (0..i).any(|j| a[(i, j)] != a[(j, i)])) {
        return Err(SpectraError::InvalidMatrix("A is not symmetric".into()));
    }
    if phis.nrows() != n || phis.ncols() != omegas.len() {
        return Err(SpectraError::InvalidMatrix(format!(
            "{}x{} coupling columns for a {n}x{n} operator and {} couplings",
            phis.nrows(),
            phis.ncols(),
            omegas.len()
        )));
    }
    let gram = phis.transpose() * phis;
    let dev = (0..gram.nrows())
        .flat_map(|i| (0..gram.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    if dev > 1e-10 {
        return Err(SpectraError::NotOrthonormal(dev));
    }
    let mut h = a.clone();
    for (k, &w) in omegas.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let phi = phis.column(k);
        for i in 0..n {
            if phi[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                h[(i, j)] += w * (phi[i] * phi[j]);
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, l: usize, boundary: Boundary) -> LatticeConfig {
        LatticeConfig {
            d,
            l,
            boundary,
            disorder: Disorder::Uniform { c: 1.0 },
            seed: 11,
        }
    }

    #[test]
    fn two_site_dirichlet_laplacian() {
        let r = build_with_potential(&cfg(1, 2, Boundary::Dirichlet), vec![0.0; 2]).unwrap();
        assert_eq!(
            r.hamiltonian.to_dense(),
            DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0])
        );
    }

    #[test]
    fn periodic_square_has_four_neighbours() {
        let c = cfg(2, 3, Boundary::Periodic);
        let r = build_hamiltonian(&c).unwrap();
        let h = &r.hamiltonian;
        assert!(h.is_symmetric());
        for i in 0..9 {
            assert_eq!(h.row(i).filter(|&(j, v)| j != i && v == -1.0).count(), 4);
            assert_eq!(h.get(i, i), 4.0 + r.potential[i]);
        }
        assert_eq!(build_hamiltonian(&c).unwrap(), r);
        assert_ne!(build_hamiltonian(&c.with_seed(12)).unwrap().potential, r.potential);
    }

    #[test]
    fn dirichlet_keeps_full_diagonal() {
        let r = build_with_potential(&cfg(3, 3, Boundary::Dirichlet), vec![0.0; 27]).unwrap();
        assert!(r.hamiltonian.diagonal().iter().all(|&d| d == 6.0));
        assert_eq!(r.hamiltonian.row(0).count(), 4);
        assert_eq!(r.hamiltonian.row(13).count(), 7);
    }

    #[test]
    fn desk_scale_and_validation() {
        assert_eq!(
            cfg(3, 101, Boundary::Dirichlet).validate(),
            Err(SpectraError::ExceedsDeskScale)
        );
        assert!(cfg(1, 1, Boundary::Dirichlet).validate().is_err());
        let mut c = cfg(1, 4, Boundary::Dirichlet);
        c.disorder = Disorder::Uniform { c: 0.0 };
        assert!(c.validate().is_err());
    }

    #[test]
    fn bernoulli_takes_two_values() {
        let mut c = cfg(1, 200, Boundary::Dirichlet);
        c.disorder = Disorder::Bernoulli;
        let w = c.sample_potential().unwrap();
        assert!(w.iter().all(|&x| x == 1.0 || x == -1.0));
        assert!(w.contains(&1.0) && w.contains(&-1.0));
    }

    #[test]
    fn standard_basis_couplings_reproduce_lattice() {
        let c = cfg(2, 4, Boundary::Dirichlet);
        let r = build_hamiltonian(&c).unwrap();
        let a = build_with_potential(&c, vec![0.0; 16]).unwrap().hamiltonian.to_dense();
        let h = anderson_type_hamiltonian(&a, &DMatrix::identity(16, 16), &r.potential).unwrap();
        assert_eq!(h, r.hamiltonian.to_dense());
        assert_eq!(
            anderson_type_hamiltonian(&a, &DMatrix::identity(16, 16), &[0.0; 16]).unwrap(),
            a
        );
        let bad = DMatrix::from_element(16, 1, 1.0);
        assert!(matches!(
            anderson_type_hamiltonian(&a, &bad, &[1.0]),
            Err(SpectraError::NotOrthonormal(_))
        ));
    }

    #[test]
    fn config_json_shape() {
        let c: LatticeConfig = serde_json::from_str(
            r#"{"d":2,"L":5,"boundary":"periodic","disorder":{"type":"uniform","c":2.5},"seed":3}"#,
        )
        .unwrap();
        assert_eq!(c.disorder, Disorder::Uniform { c: 2.5 });
        let b: Disorder = serde_json::from_str(r#"{"type":"bernoulli"}"#).unwrap();
        assert_eq!(b, Disorder::Bernoulli);
    }
}
