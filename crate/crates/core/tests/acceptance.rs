//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles here are independent of the code paths they check
//! (dense eigensolves, closed forms, hand values, numpy artifacts).

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectra::anderson::{
    anderson_type_hamiltonian, build_hamiltonian, build_with_potential, ensemble_run, spectrum_bounds, Boundary,
    Disorder, LatticeConfig, Observable,
};
use spectra::aronszajn::{mutual_singularity_check, point_spectrum, PerturbationFamily};
use spectra::clark::{aleksandrov_consistency, clark_density, herglotz_measure, ClarkFamilyPoint, SchurFunction};
use spectra::clark_op::{
    fejer_diagnostic, intertwining_check, unitarity_check, v_monomial_closed, v_monomial_recursive,
    ClarkOperatorContext,
};
use spectra::measure::{radial_limit, BoundaryLimitSchedule, CircleFunction, CircleMeasure, RealLineMeasure};
use spectra::model::{four_statement_report_matrix, four_statement_report_scalar, truncated_shift, ContractionMatrix};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn poly(coeffs: &[f64]) -> SchurFunction {
    SchurFunction::rational(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(), vec![ONE]).unwrap()
}

fn mono(d: usize) -> SchurFunction {
    SchurFunction::monomial(d, ONE).unwrap()
}

fn theta_corpus() -> Vec<(&'static str, SchurFunction)> {
    vec![
        ("z", mono(1)),
        ("z^2", mono(2)),
        ("z^3", mono(3)),
        ("z^4", mono(4)),
        ("z^5", mono(5)),
        ("z^6", mono(6)),
        ("z/2", poly(&[0.0, 0.5])),
        ("(z+z^2)/3", poly(&[0.0, 1.0 / 3.0, 1.0 / 3.0])),
    ]
}

fn random_atomic(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let n = rng.random_range(1..=12);
    let mut pos: Vec<f64> = Vec::new();
    while pos.len() < n {
        let p = rng.random_range(-5.0..5.0);
        if pos.iter().all(|&q: &f64| (q - p).abs() > 1e-3) {
            pos.push(p);
        }
    }
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    pos.into_iter().zip(w.into_iter().map(|x| x / total)).collect()
}

fn random_coupling(rng: &mut ChaCha8Rng) -> f64 {
    let a = rng.random_range(0.1..5.0);
    if rng.random_bool(0.5) {
        a
    } else {
        -a
    }
}

/// Spectral measure of `diag(pos) + α v vᵀ` with respect to `v = √w`.
fn eigensolve_oracle(atoms: &[(f64, f64)], alpha: f64) -> Vec<(f64, f64)> {
    let n = atoms.len();
    let v = DVector::from_iterator(n, atoms.iter().map(|a| a.1.sqrt()));
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { atoms[i].0 } else { 0.0 }) + alpha * &v * v.transpose();
    let eig = SymmetricEigen::new(m);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).dot(&v).powi(2)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut mismatched = 0;
    for _ in 0..25 {
        let atoms = random_atomic(&mut rng);
        let base = RealLineMeasure::from_atoms(&atoms).unwrap();
        for _ in 0..4 {
            let alpha = random_coupling(&mut rng);
            let found = point_spectrum(&PerturbationFamily::new(base.clone(), alpha).unwrap()).unwrap();
            let want = eigensolve_oracle(&atoms, alpha);
            if found.len() != want.len() {
                mismatched += 1;
                continue;
            }
            for (e, (p, w)) in found.iter().zip(&want) {
                worst = worst.max((e.pos - p).abs()).max((e.w - w).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatched == 0 && worst <= 1e-8 && secs < 5.0,
        format!("max deviation {worst:.2e} (tol 1e-8), count mismatches {mismatched}, {secs:.2} s (limit 5 s)"),
    )
}

fn criterion_2() -> Outcome {
    let fam = PerturbationFamily::new(RealLineMeasure::lebesgue(0.0, 1.0, 2).unwrap(), 1.0).unwrap();
    let atoms = point_spectrum(&fam).unwrap();
    let want = 1.0 / (1.0 - (-1.0f64).exp());
    let err = atoms.iter().map(|a| (a.pos - want).abs()).fold(f64::INFINITY, f64::min);
    outcome(
        atoms.len() == 1 && err <= 1e-6,
        format!("{} atom(s), |x - 1/(1-e^-1)| = {err:.2e} (tol 1e-6)", atoms.len()),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let corpus: Vec<RealLineMeasure> = (0..10)
        .map(|_| RealLineMeasure::from_atoms(&random_atomic(&mut rng)).unwrap())
        .collect();
    let mut min_sep = f64::INFINITY;
    let mut failures = 0;
    for k in 0..100 {
        let base = &corpus[k % corpus.len()];
        let alpha = random_coupling(&mut rng);
        let mut beta = random_coupling(&mut rng);
        while beta == alpha {
            beta = random_coupling(&mut rng);
        }
        let r = mutual_singularity_check(
            &PerturbationFamily::new(base.clone(), alpha).unwrap(),
            &PerturbationFamily::new(base.clone(), beta).unwrap(),
        )
        .unwrap();
        min_sep = min_sep.min(r.min_separation);
        failures += usize::from(!r.pass);
    }
    outcome(
        failures == 0 && min_sep > 1e-9,
        format!("min separation {min_sep:.2e} over 100 pairs (must exceed 1e-9), {failures} failures"),
    )
}

fn criterion_4() -> Outcome {
    let thetas = [
        mono(1),
        mono(2),
        mono(3),
        poly(&[0.0, 0.5]),
        poly(&[0.0, 1.0 / 3.0, 1.0 / 3.0]),
    ];
    let gammas = [ONE, I, -ONE];
    let zs: Vec<C64> = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .flat_map(|&r| (0..5).map(move |k| C64::from_polar(r, 0.4 + 1.2 * k as f64)))
        .collect();
    let mut worst = 0.0f64;
    let mut mass = 0.0f64;
    for t in &thetas {
        worst = worst.max(aleksandrov_consistency(t, &gammas, &zs, 4096).unwrap());
        for &g in &gammas {
            let mu = herglotz_measure(&ClarkFamilyPoint::new(t.clone(), g).unwrap(), 4096).unwrap();
            mass = mass.max((mu.total_mass() - 1.0).abs());
        }
    }
    outcome(
        worst <= 1e-6 && mass <= 1e-6,
        format!("max |theta - reconstruction| {worst:.2e} (tol 1e-6), max |mass - 1| {mass:.2e} (tol 1e-6)"),
    )
}

fn criterion_5() -> Outcome {
    let p = ClarkFamilyPoint::new(poly(&[0.0, 0.5]), ONE).unwrap();
    let w1 = clark_density(&p, ONE);
    let mass = herglotz_measure(&p, 4096).unwrap().ac_mass();
    outcome(
        (w1 - 3.0).abs() <= 1e-10 && (mass - 1.0).abs() <= 1e-8,
        format!(
            "|w(1) - 3| = {:.2e} (tol 1e-10), |∫w dm - 1| = {:.2e} (tol 1e-8)",
            (w1 - 3.0).abs(),
            (mass - 1.0).abs()
        ),
    )
}

fn criterion_6() -> Outcome {
    let gammas = spectra::model::default_gammas();
    let inner_thetas = [
        mono(1),
        mono(2),
        mono(3),
        SchurFunction::blaschke(&[C64::new(0.0, 0.0), C64::new(0.5, 0.0)], ONE).unwrap(),
    ];
    let mut ok = true;
    for t in &inner_thetas {
        let r = four_statement_report_scalar(t, 8, 12, 512, &gammas).unwrap();
        ok &= r.consistent && r.inner;
    }
    let non_inner = four_statement_report_scalar(&poly(&[0.0, 0.5]), 8, 12, 512, &gammas).unwrap();
    ok &= non_inner.consistent && !non_inner.inner;
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let u = ContractionMatrix::new(truncated_shift(n)).unwrap();
        let th = u.characteristic(C64::new(0.5, 0.0)).unwrap();
        worst = worst.max((th[(0, 0)].norm() - 0.5f64.powi(n as i32)).abs());
        let r = four_statement_report_matrix(&u, n + 2, 256).unwrap();
        ok &= r.consistent && r.inner;
    }
    outcome(
        ok && worst <= 1e-10,
        format!("indicators agree: {ok}; max ||Theta(0.5)| - 0.5^N| = {worst:.2e} (tol 1e-10, N <= 8)"),
    )
}

fn criterion_7() -> Outcome {
    let mut oracle = 0.0f64;
    let mut gram_inner = 0.0f64;
    let mut gram_non_inner = 0.0f64;
    let mut inter = 0.0f64;
    let mut lemma = 0.0f64;
    let mut monotone = true;
    for (_, t) in theta_corpus() {
        let ctx = ClarkOperatorContext::new(&t, 24).unwrap();
        for n in 0..=10 {
            let d = v_monomial_closed(&ctx, n)
                .unwrap()
                .sub(&v_monomial_recursive(&ctx, n).unwrap())
                .norm();
            oracle = oracle.max(d);
        }
        let g = unitarity_check(&ctx, 10).unwrap().max_deviation;
        if t.is_inner() {
            gram_inner = gram_inner.max(g);
        } else {
            gram_non_inner = gram_non_inner.max(g);
        }
        inter = inter.max(intertwining_check(&ctx, 10).unwrap().into_iter().fold(0.0, f64::max));
        let r = ctx.defect_residuals();
        lemma = lemma
            .max((r.norm_x - 1.0).abs())
            .max((r.norm_y - 1.0).abs())
            .max(r.t_adjoint_x)
            .max(r.t_y)
            .max(r.x_plus_zy);
        let f = ctx.samples(
            |z| C64::new(z.re.exp(), 0.0),
            Some(&|z: C64| 0.5 * (ONE - z.conj() * z.conj()) * z.re.exp()),
        );
        let fejer = fejer_diagnostic(&ctx, &f, 16).unwrap();
        monotone &= fejer.windows(2).all(|w| w[1] < w[0]);
    }
    let pass =
        oracle <= 1e-8 && gram_inner <= 1e-8 && gram_non_inner <= 1e-6 && inter <= 1e-8 && lemma <= 1e-10 && monotone;
    outcome(
        pass,
        format!(
            "closed vs recursive {oracle:.2e} (1e-8), Gram inner {gram_inner:.2e} (1e-8), Gram non-inner {gram_non_inner:.2e} (1e-6), \
             intertwining {inter:.2e} (1e-8), defect identities {lemma:.2e} (1e-10), Fejer monotone {monotone}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mu = CircleMeasure::uniform(1024)
        .scale(0.5)
        .unwrap()
        .sum(&CircleMeasure::from_atoms(&[(0.0, 0.5)]).unwrap())
        .unwrap();
    let nc = mu
        .normalized_cauchy(&CircleFunction::from_fn(&mu, |x| C64::new(x.re, 0.0)))
        .unwrap();
    let at = |s: &BoundaryLimitSchedule| radial_limit(|z| nc.eval(z), ONE, s).unwrap().value;
    let e1 = (at(&BoundaryLimitSchedule::default()) - 1.0).norm();
    let e2 = (at(&BoundaryLimitSchedule::doubled()) - 1.0).norm();
    outcome(
        e1 <= 0.05 && e2 <= 0.005,
        format!("|limit - f(1)| default {e1:.2e} (tol 0.05), doubled {e2:.2e} (tol 0.005)"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut contained = true;
    let mut deterministic = true;
    for k in 0..50 {
        let d = 1 + k % 2;
        let cfg = LatticeConfig {
            d,
            l: if d == 1 {
                rng.random_range(8..200)
            } else {
                rng.random_range(3..14)
            },
            boundary: if rng.random_bool(0.5) {
                Boundary::Dirichlet
            } else {
                Boundary::Periodic
            },
            disorder: if k % 5 == 4 {
                Disorder::Bernoulli
            } else {
                Disorder::Uniform {
                    c: rng.random_range(0.1..6.0),
                }
            },
            seed: rng.random(),
        };
        let r = build_hamiltonian(&cfg).unwrap();
        deterministic &= build_hamiltonian(&cfg).unwrap() == r && r.hamiltonian.is_symmetric();
        let eig = SymmetricEigen::new(r.hamiltonian.to_dense()).eigenvalues;
        let (lo, hi) = spectrum_bounds(&cfg);
        contained &= eig.iter().all(|&e| e >= lo - 1e-9 && e <= hi + 1e-9);
    }

    let cfg = LatticeConfig {
        d: 2,
        l: 5,
        boundary: Boundary::Periodic,
        disorder: Disorder::Uniform { c: 1.0 },
        seed: 77,
    };
    let r = build_hamiltonian(&cfg).unwrap();
    let (site, alpha) = (7, 0.625);
    let mut shifted = r.potential.clone();
    shifted[site] += alpha;
    let direct = build_with_potential(&cfg, shifted).unwrap().hamiltonian.to_dense();
    let e = DMatrix::from_fn(25, 1, |i, _| if i == site { 1.0 } else { 0.0 });
    let bridged = anderson_type_hamiltonian(&r.hamiltonian.to_dense(), &e, &[alpha]).unwrap();
    let bridge = bridged == direct;

    let median = |c: f64| {
        let cfg = LatticeConfig {
            d: 1,
            l: 512,
            boundary: Boundary::Dirichlet,
            disorder: Disorder::Uniform { c },
            seed: 2024,
        };
        ensemble_run(&cfg, 50, &[Observable::Ipr])
            .unwrap()
            .summary
            .ipr
            .unwrap()
            .median
    };
    let (strong, weak) = (median(4.0), median(0.5));
    outcome(
        contained && deterministic && bridge && strong > weak,
        format!(
            "containment {contained}, bitwise determinism {deterministic}, rank-one bridge entrywise {bridge}, \
             median IPR c=4 {strong:.4} > c=0.5 {weak:.4}"
        ),
    )
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_spectra")
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn run(args: &[&str], out: &Path) -> i32 {
    Command::new(bin())
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn spectra")
        .status
        .code()
        .unwrap_or(-1)
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dir = |n: &str| tmp.path().join(n);
    let mut notes = Vec::new();
    let mut ok = true;

    let code = run(&["clark-op"], &dir("op"));
    ok &= code == 0;
    notes.push(format!("clark-op default exit {code}"));

    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{\"measure\": ").unwrap();
    let code = run(&["ad", "--config", bad.to_str().unwrap()], &dir("bad"));
    ok &= code == 2 && !dir("bad").exists();
    notes.push(format!("malformed exit {code}"));

    let nonunimodular = tmp.path().join("gamma.json");
    std::fs::write(
        &nonunimodular,
        r#"{"theta": {"type": "rational", "num": [[0,0],[1,0]], "den": [[1,0]]}, "gamma": [2, 0]}"#,
    )
    .unwrap();
    let code = run(&["clark", "--config", nonunimodular.to_str().unwrap()], &dir("gamma"));
    ok &= code == 3;
    notes.push(format!("module error exit {code}"));

    let cfg = corpus("anderson_small.json");
    let a = run(&["anderson", "--config", cfg.to_str().unwrap()], &dir("a1"));
    let b = run(&["anderson", "--config", cfg.to_str().unwrap()], &dir("a2"));
    let same = ["anderson_trials.csv", "anderson_summary.json", "ipr_histogram.svg"]
        .iter()
        .all(|f| std::fs::read(dir("a1").join(f)).ok() == std::fs::read(dir("a2").join(f)).ok());
    ok &= a == 0 && b == 0 && same;
    notes.push(format!("anderson reruns byte-identical {same}"));

    let code = run(
        &["ad", "--config", corpus("jacobi8.json").to_str().unwrap()],
        &dir("j8"),
    );
    let got: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir("j8").join("decomposition.json")).unwrap_or_default())
            .unwrap_or_default();
    let want: serde_json::Value =
        serde_json::from_slice(&std::fs::read(corpus("jacobi8_oracle.json")).unwrap()).unwrap();
    let pairs = |v: &serde_json::Value| -> Vec<(f64, f64)> {
        v["atoms"]
            .as_array()
            .map(|a| {
                a.iter()
                    .map(|x| (x["pos"].as_f64().unwrap(), x["w"].as_f64().unwrap()))
                    .collect()
            })
            .unwrap_or_default()
    };
    let (g, w) = (pairs(&got), pairs(&want));
    let dev = if g.len() == w.len() {
        g.iter()
            .zip(&w)
            .map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs()))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    ok &= code == 0 && dev <= 1e-8;
    notes.push(format!("jacobi8 vs numpy oracle {dev:.2e} (tol 1e-8)"));

    outcome(ok, notes.join(", "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("rank-one atoms vs dense eigensolves", criterion_1),
        ("Lebesgue base closed-form eigenvalue", criterion_2),
        ("mutual singularity of atom sets", criterion_3),
        ("Clark measure round trip", criterion_4),
        ("Clark density of z/2", criterion_5),
        ("inner-function indicator agreement", criterion_6),
        ("adjoint Clark operator verification", criterion_7),
        ("normalized Cauchy limit at an atom", criterion_8),
        ("Anderson model properties", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "{} [{}] {name}: {} ({:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
