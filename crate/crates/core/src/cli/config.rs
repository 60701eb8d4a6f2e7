//! Configuration files of the subcommands.
//!
//! Defaults (overridable in the file, and by `--tol` where noted):
//!
//! | key | subcommand | default |
//! |---|---|---|
//! | `tol` (radial-limit increment) | `ad`, `clark` | `1e-6` |
//! | `grid_points` (atomic base) | `ad` | `257` |
//! | `resolution` | `clark` | `4096` |
//! | `n`, `nmax`, `boundary_points` | `model` | `8`, `32`, `512` |
//! | `tol` (inner-like threshold) | `model` | `1e-8` |
//! | `n`, `nmax`, `fejer_kmax` | `clark-op` | `24`, `10`, `16` |
//! | `tol` (residual threshold) | `clark-op` | `1e-8` |
//! | `gram_tol_non_inner` | `clark-op` | `1e-6` |
//! | `trials` | `anderson` | `1` |
//! | `tol` (spectrum containment slack) | `anderson` | `1e-9` |

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::anderson::{LatticeConfig, Observable};
use crate::clark::SchurFunction;
use crate::measure::{CircleMeasure, RealLineMeasure};

pub const DEFAULT_CLARK_OP_CORPUS: &str = include_str!("../../corpus/clark_op_default.json");

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdConfig {
    pub measure: RealLineMeasure,
    pub alpha: f64,
    /// Where the ac density is sampled; defaults to the base density grid.
    pub grid: Option<GridSpec>,
    pub search: Option<[f64; 2]>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    pub tol: Option<f64>,
}

fn default_grid_points() -> usize {
    257
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClarkConfig {
    pub theta: SchurFunction,
    #[serde(default = "one")]
    pub gamma: C64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    pub tol: Option<f64>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn default_resolution() -> usize {
    crate::clark::DEFAULT_RESOLUTION
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub theta: Option<SchurFunction>,
    /// Row-major `[re, im]` entries of a contraction.
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default = "default_model_n")]
    pub n: usize,
    #[serde(default = "default_model_nmax")]
    pub nmax: usize,
    #[serde(default = "default_boundary_points")]
    pub boundary_points: usize,
    pub gammas: Option<Vec<C64>>,
    pub tol: Option<f64>,
}

fn default_model_n() -> usize {
    8
}

fn default_model_nmax() -> usize {
    32
}

fn default_boundary_points() -> usize {
    512
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    pub theta: SchurFunction,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClarkOpConfig {
    pub corpus: Vec<CorpusEntry>,
    #[serde(default = "default_op_n")]
    pub n: usize,
    #[serde(default = "default_op_nmax")]
    pub nmax: usize,
    #[serde(default = "default_fejer")]
    pub fejer_kmax: usize,
    pub tol: Option<f64>,
    #[serde(default = "default_gram_non_inner")]
    pub gram_tol_non_inner: f64,
}

fn default_op_n() -> usize {
    24
}

fn default_op_nmax() -> usize {
    10
}

fn default_fejer() -> usize {
    16
}

fn default_gram_non_inner() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
pub struct AndersonConfig {
    #[serde(flatten)]
    pub lattice: LatticeConfig,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    pub tol: Option<f64>,
}

fn default_trials() -> usize {
    1
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Ipr, Observable::SpacingRatio]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureInfoConfig {
    pub measure: Option<RealLineMeasure>,
    pub circle_measure: Option<CircleMeasure>,
}
