//! The subcommands: each turns a parsed configuration into in-memory
//! artifacts and a verdict. Nothing touches the file system here.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::config::*;
use super::output::{csv, fmt_f64, fmt_opt, histogram, line_plot, Artifact};
use super::CliError;
use crate::anderson::{ensemble_run, spectrum_bounds, EnsembleTable};
use crate::aronszajn::{find_eigenvalues, perturbed_measure, PerturbationFamily, SpectralDecomposition};
use crate::clark::{herglotz_measure_with_report, ClarkFamilyPoint, HerglotzReport, SchurFunction};
use crate::clark_op::{
    fejer_diagnostic, intertwining_check, unitarity_check, v_monomial_closed, v_monomial_negative,
    v_monomial_negative_closed, v_monomial_recursive, ClarkOperatorContext, DefectResiduals, GramReport,
};
use crate::fourier::grid_angle;
use crate::linalg::{from_rows, to_rows, SpectralAtom};
use crate::measure::line::linspace;
use crate::measure::{BoundaryLimitSchedule, CircleMeasure};
use crate::model::{
    default_gammas, four_statement_report_matrix, four_statement_report_scalar, ContractionMatrix, FourStatementReport,
    ModelSpaceTruncation, INNER_TOL,
};

/// Artifacts plus `Err(message)` when a verification threshold was missed.
pub type Outcome = (Vec<Artifact>, std::result::Result<(), String>);

fn schedule(tol: Option<f64>) -> BoundaryLimitSchedule {
    let s = BoundaryLimitSchedule::default();
    match tol {
        Some(t) => s.with_tolerance(t),
        None => s,
    }
}

#[derive(Serialize)]
struct AdReport {
    #[serde(flatten)]
    decomposition: SpectralDecomposition,
    atom_mass: f64,
    ac_mass: f64,
}

pub fn ad(cfg: AdConfig, tol: Option<f64>) -> Result<Outcome, CliError> {
    let grid = match cfg.grid {
        Some(g) => linspace(g.a, g.b, g.n),
        None if cfg.measure.has_density() => cfg.measure.grid().to_vec(),
        None => {
            let (a, b) = cfg.measure.support_hint();
            let pad = if b > a { 0.0 } else { 1.0 };
            linspace(a - pad, b + pad, cfg.grid_points)
        }
    };
    let fam = PerturbationFamily::new(cfg.measure, cfg.alpha)?;
    let mut decomposition = perturbed_measure(&fam, &grid, &schedule(tol.or(cfg.tol)))?;
    if let Some([lo, hi]) = cfg.search {
        decomposition.atoms = find_eigenvalues(&fam, Some((lo, hi)))?;
    }
    let d = &decomposition.density;
    let table = csv(
        &["x", "ac_density"],
        d.grid
            .iter()
            .zip(&d.values)
            .map(|(&x, &v)| vec![fmt_f64(x), fmt_f64(v)]),
    );
    let curve: Vec<(f64, f64)> = d.grid.iter().copied().zip(d.values.iter().copied()).collect();
    let stems: Vec<(f64, f64)> = decomposition.atoms.iter().map(|a| (a.pos, a.w)).collect();
    let svg = line_plot(&format!("perturbed measure, alpha = {}", cfg.alpha), &curve, &stems);
    let report = AdReport {
        atom_mass: decomposition.atom_mass(),
        ac_mass: decomposition.ac_mass(),
        decomposition,
    };
    Ok((
        vec![
            Artifact::json("decomposition.json", &report),
            Artifact::csv("density.csv", table),
            Artifact::svg("density.svg", svg),
        ],
        Ok(()),
    ))
}

#[derive(Serialize)]
struct ClarkReport<'a> {
    gamma: C64,
    measure: &'a CircleMeasure,
    report: HerglotzReport,
}

pub fn clark(cfg: ClarkConfig, tol: Option<f64>) -> Result<Outcome, CliError> {
    let point = ClarkFamilyPoint::new(cfg.theta, cfg.gamma)?;
    let (mu, report) = herglotz_measure_with_report(&point, cfg.resolution, &schedule(tol.or(cfg.tol)))?;
    let m = mu.resolution();
    let mut rows: Vec<Vec<String>> = mu
        .atoms()
        .iter()
        .map(|a| vec!["atom".into(), fmt_f64(a.angle), fmt_f64(a.w)])
        .collect();
    rows.extend(
        mu.density()
            .iter()
            .enumerate()
            .map(|(j, &w)| vec!["density".into(), fmt_f64(grid_angle(j, m)), fmt_f64(w)]),
    );
    let curve: Vec<(f64, f64)> = mu
        .density()
        .iter()
        .enumerate()
        .map(|(j, &w)| (grid_angle(j, m), w))
        .collect();
    let stems: Vec<(f64, f64)> = mu.atoms().iter().map(|a| (a.angle, a.w)).collect();
    let svg = line_plot("Clark measure (angle)", &curve, &stems);
    let out = ClarkReport {
        gamma: cfg.gamma,
        measure: &mu,
        report,
    };
    Ok((
        vec![
            Artifact::json("clark_measure.json", &out),
            Artifact::csv("clark_measure.csv", csv(&["kind", "angle", "value"], rows)),
            Artifact::svg("clark_measure.svg", svg),
        ],
        Ok(()),
    ))
}

#[derive(Serialize)]
struct UGammaSummary {
    gamma: C64,
    atoms: Vec<SpectralAtom>,
    normality_defect: f64,
    unitarity_defect: f64,
    truncation_residual: f64,
}

#[derive(Serialize)]
struct ModelReport {
    report: FourStatementReport,
    dim: Option<usize>,
    u_gamma: Vec<UGammaSummary>,
    characteristic_at_half: Option<Vec<Vec<[f64; 2]>>>,
}

pub fn model(cfg: ModelConfig, tol: Option<f64>) -> Result<Outcome, CliError> {
    let tol = tol.or(cfg.tol).unwrap_or(INNER_TOL);
    let out = match (cfg.theta, cfg.matrix) {
        (Some(theta), None) => {
            let gammas = cfg.gammas.unwrap_or_else(default_gammas);
            let report = four_statement_report_scalar(&theta, cfg.n, cfg.nmax, cfg.boundary_points, &gammas)?;
            let k = ModelSpaceTruncation::build(&theta, cfg.n.max(theta.degree()).max(1))?;
            let u_gamma = gammas
                .iter()
                .map(|&g| {
                    let u = k.u_gamma_matrix(g)?;
                    let (atoms, normality_defect) = k.u_gamma_spectral_measure(g)?;
                    Ok(UGammaSummary {
                        gamma: g,
                        atoms,
                        normality_defect,
                        unitarity_defect: u.unitarity_defect,
                        truncation_residual: u.truncation_residual,
                    })
                })
                .collect::<crate::Result<Vec<_>>>()?;
            ModelReport {
                report: report.rethreshold(tol),
                dim: Some(k.dim()),
                u_gamma,
                characteristic_at_half: None,
            }
        }
        (None, Some(rows)) => {
            let u = ContractionMatrix::new(from_rows(&rows)?)?;
            let report = four_statement_report_matrix(&u, cfg.nmax, cfg.boundary_points)?;
            ModelReport {
                report: report.rethreshold(tol),
                dim: Some(u.dim()),
                u_gamma: Vec::new(),
                characteristic_at_half: Some(to_rows(&u.characteristic(C64::new(0.5, 0.0))?)),
            }
        }
        _ => {
            return Err(CliError::Config(
                "model: give exactly one of `theta` and `matrix`".into(),
            ))
        }
    };
    let decay = &out.report.decay;
    let table = csv(
        &["k", "max_norm"],
        decay.iter().enumerate().map(|(k, &v)| vec![k.to_string(), fmt_f64(v)]),
    );
    let curve: Vec<(f64, f64)> = decay.iter().enumerate().map(|(k, &v)| (k as f64, v)).collect();
    let svg = line_plot("max norm of (U*)^k on basis vectors", &curve, &[]);
    Ok((
        vec![
            Artifact::json("model_report.json", &out),
            Artifact::csv("model_decay.csv", table),
            Artifact::svg("model_decay.svg", svg),
        ],
        Ok(()),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Serialize)]
struct EntryReport {
    name: String,
    theta: SchurFunction,
    inner: bool,
    dim: usize,
    resolution: usize,
    defect_residuals: DefectResiduals,
    /// `‖closed - recursive‖` for `Vξⁿ`, `n = 0..=nmax`.
    oracle_positive: Vec<f64>,
    /// `‖closed - recursive‖` for `Vξ̄ⁿ`, `n = 1..=nmax`.
    oracle_negative: Vec<f64>,
    gram: GramReport,
    intertwining: Vec<f64>,
    fejer: Vec<f64>,
    checks: Vec<Check>,
    pass: bool,
}

#[derive(Serialize)]
struct ClarkOpReport {
    n: usize,
    nmax: usize,
    tol: f64,
    gram_tol_non_inner: f64,
    entries: Vec<EntryReport>,
    pass: bool,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn check(name: &str, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value,
        threshold,
        pass: value <= threshold,
    }
}

fn verify_entry(entry: &CorpusEntry, cfg: &ClarkOpConfig, tol: f64) -> crate::Result<EntryReport> {
    let ctx = ClarkOperatorContext::new(&entry.theta, cfg.n)?;
    let diff = |a: crate::model::ModelVector, b: crate::model::ModelVector| a.sub(&b).norm();
    let oracle_positive = (0..=cfg.nmax)
        .map(|n| Ok(diff(v_monomial_closed(&ctx, n)?, v_monomial_recursive(&ctx, n)?)))
        .collect::<crate::Result<Vec<_>>>()?;
    let oracle_negative = (1..=cfg.nmax)
        .map(|n| {
            Ok(diff(
                v_monomial_negative_closed(&ctx, n)?,
                v_monomial_negative(&ctx, n)?,
            ))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let gram = unitarity_check(&ctx, cfg.nmax)?;
    let intertwining = intertwining_check(&ctx, cfg.nmax)?;
    let f = ctx.samples(
        |z| C64::new(z.re.exp(), 0.0),
        Some(&|z: C64| 0.5 * (C64::new(1.0, 0.0) - z.conj() * z.conj()) * z.re.exp()),
    );
    let fejer = fejer_diagnostic(&ctx, &f, cfg.fejer_kmax)?;
    let inner = entry.theta.is_inner();
    let r = ctx.defect_residuals();
    let rises = fejer.windows(2).filter(|w| !(w[1] < w[0])).count();
    let checks = vec![
        check("oracle_positive", max_of(&oracle_positive), tol),
        check("oracle_negative", max_of(&oracle_negative), tol),
        check(
            "gram",
            gram.max_deviation,
            if inner { tol } else { cfg.gram_tol_non_inner },
        ),
        check("intertwining", max_of(&intertwining), tol),
        check("defect_norms", (r.norm_x - 1.0).abs().max((r.norm_y - 1.0).abs()), tol),
        check("defect_kernels", r.t_adjoint_x.max(r.t_y), tol),
        check("defect_x_plus_zy", r.x_plus_zy, tol),
        check("mass", r.mass, 1e-6),
        check("fejer_increases", rises as f64, 0.0),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let trunc = ctx.truncation();
    Ok(EntryReport {
        name: entry.name.clone(),
        theta: entry.theta.clone(),
        inner,
        dim: trunc.dim(),
        resolution: trunc.resolution(),
        defect_residuals: r,
        oracle_positive,
        oracle_negative,
        gram,
        intertwining,
        fejer,
        checks,
        pass,
    })
}

pub fn clark_op(cfg: ClarkOpConfig, tol: Option<f64>) -> Result<Outcome, CliError> {
    let tol = tol.or(cfg.tol).unwrap_or(1e-8);
    let entries = cfg
        .corpus
        .iter()
        .map(|e| verify_entry(e, &cfg, tol))
        .collect::<crate::Result<Vec<_>>>()?;
    let failed: Vec<String> = entries
        .iter()
        .flat_map(|e| {
            e.checks
                .iter()
                .filter(|c| !c.pass)
                .map(move |c| format!("{}/{} = {:.3e} > {:.1e}", e.name, c.name, c.value, c.threshold))
        })
        .collect();
    let mut rows = Vec::new();
    for e in &entries {
        for c in &e.checks {
            rows.push(vec![
                e.name.clone(),
                c.name.clone(),
                fmt_f64(c.value),
                fmt_f64(c.threshold),
                c.pass.to_string(),
            ]);
        }
    }
    let mut svg_curve = Vec::new();
    if let Some(e) = entries.first() {
        svg_curve = e.fejer.iter().enumerate().map(|(k, &v)| ((k + 1) as f64, v)).collect();
    }
    let title = format!("Fejer diagnostic, {}", entries.first().map_or("", |e| e.name.as_str()));
    let report = ClarkOpReport {
        n: cfg.n,
        nmax: cfg.nmax,
        tol,
        gram_tol_non_inner: cfg.gram_tol_non_inner,
        pass: failed.is_empty(),
        entries,
    };
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(format!("clark-op verification failed: {}", failed.join("; ")))
    };
    Ok((
        vec![
            Artifact::json("clark_op_report.json", &report),
            Artifact::csv(
                "clark_op_checks.csv",
                csv(&["entry", "check", "value", "threshold", "pass"], rows),
            ),
            Artifact::svg("clark_op_fejer.svg", line_plot(&title, &svg_curve, &[])),
        ],
        verdict,
    ))
}

#[derive(Serialize)]
struct AndersonSummary<'a> {
    #[serde(flatten)]
    table: &'a EnsembleTable,
    containment_slack: f64,
}

pub fn anderson(mut cfg: AndersonConfig, seed: Option<u64>, tol: Option<f64>) -> Result<Outcome, CliError> {
    if let Some(s) = seed {
        cfg.lattice.seed = s;
    }
    if cfg.trials == 0 {
        return Err(CliError::Config("anderson: trials must be at least 1".into()));
    }
    let slack = tol.or(cfg.tol).unwrap_or(1e-9);
    let mut table = ensemble_run(&cfg.lattice, cfg.trials, &cfg.observables)?;
    let (lo, hi) = spectrum_bounds(&cfg.lattice);
    for r in &mut table.rows {
        r.contained = r.min_eigenvalue >= lo - slack && r.max_eigenvalue <= hi + slack;
    }
    table.summary.all_contained = table.rows.iter().all(|r| r.contained);
    let rows = table.rows.iter().map(|r| {
        vec![
            r.trial.to_string(),
            r.seed.to_string(),
            fmt_f64(r.min_eigenvalue),
            fmt_f64(r.max_eigenvalue),
            r.contained.to_string(),
            fmt_opt(r.median_ipr),
            fmt_opt(r.mean_ipr),
            fmt_opt(r.mean_spacing_ratio),
        ]
    });
    let text = csv(
        &[
            "trial",
            "seed",
            "min_eigenvalue",
            "max_eigenvalue",
            "contained",
            "median_ipr",
            "mean_ipr",
            "mean_spacing_ratio",
        ],
        rows,
    );
    let pooled: Vec<f64> = table.rows.iter().flat_map(|r| r.ipr.iter().copied()).collect();
    let svg = histogram("inverse participation ratios (all trials)", &pooled, 30);
    let verdict = if table.summary.all_contained {
        Ok(())
    } else {
        Err(format!("anderson: spectrum leaves [{lo}, {hi}] in some trial"))
    };
    let summary = AndersonSummary {
        table: &table,
        containment_slack: slack,
    };
    Ok((
        vec![
            Artifact::csv("anderson_trials.csv", text),
            Artifact::json("anderson_summary.json", &summary),
            Artifact::svg("ipr_histogram.svg", svg),
        ],
        verdict,
    ))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MeasureInfo {
    Line {
        total_mass: f64,
        atom_mass: f64,
        density_mass: f64,
        atoms: usize,
        support_hint: (f64, f64),
        density_support: Vec<(f64, f64)>,
    },
    Circle {
        total_mass: f64,
        atom_mass: f64,
        ac_mass: f64,
        atoms: usize,
        resolution: usize,
        /// `∫ ξ^j dμ`, `j = 0..=4`.
        moments: Vec<C64>,
    },
}

pub fn measure_info(cfg: MeasureInfoConfig) -> Result<Outcome, CliError> {
    let info = match (cfg.measure, cfg.circle_measure) {
        (Some(m), None) => MeasureInfo::Line {
            total_mass: m.total_mass(),
            atom_mass: m.atom_mass(),
            density_mass: m.density_mass(),
            atoms: m.atoms().len(),
            support_hint: m.support_hint(),
            density_support: m.density_support(),
        },
        (None, Some(m)) => MeasureInfo::Circle {
            total_mass: m.total_mass(),
            atom_mass: m.atom_mass(),
            ac_mass: m.ac_mass(),
            atoms: m.atoms().len(),
            resolution: m.resolution(),
            moments: m.moments(4),
        },
        _ => {
            return Err(CliError::Config(
                "measure-info: give exactly one of `measure` and `circle_measure`".into(),
            ))
        }
    };
    Ok((vec![Artifact::json("measure_info.json", &info)], Ok(())))
}
