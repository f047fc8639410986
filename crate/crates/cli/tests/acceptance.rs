//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use igk_core::dombrowski::{flow_isometry_residual, kahler_structure_at, omega_closedness_residual};
use igk_core::geometry::{cross_duality_residual, curvature_tensor, duality_residual};
use igk_core::linalg::inner;
use igk_core::oscillator::oscillator_expectation_residual;
use igk_core::projective::{
    cramer_rao_residual, deck_shift, eigenmanifold_projection, pullback_scaling_check, spectral_decompose,
    spectrum_and_probabilities, tau, PROJECTIVE_TOL,
};
use igk_core::spin::{
    casimir, commutator_residual, pi_sphere, psi_embedding, q_matrix, sphere_from_tangent, spin_probabilities,
};
use igk_core::{
    CMatrix, ExponentialFamilySpec, KahlerObservableCP, Observable, PlaneKahlerFunction, PlanePoint, ProjectivePoint,
    SphereKahlerFunction, SpherePoint, SplitTangentVector, TangentBundlePoint, C64,
};

type Outcome = Result<String, String>;

/// Running maximum that keeps NaN.
#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn add(&mut self, r: f64) {
        if r.is_nan() || r > self.0 {
            self.0 = r;
        }
    }

    /// Formats `name = value < tol` and fails unless the maximum is below `tol`.
    fn below(&self, name: &str, tol: f64) -> Outcome {
        let line = format!("{name} = {:.3e} (< {tol:.0e})", self.0);
        if self.0 < tol {
            Ok(line)
        } else {
            Err(line)
        }
    }
}

fn join(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(Result::is_ok);
    let text = parts
        .into_iter()
        .map(|p| p.unwrap_or_else(|e| format!("{e} FAILED")))
        .collect::<Vec<_>>()
        .join("; ");
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x1_9c00 + criterion)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn random_sphere_function(rng: &mut ChaCha8Rng) -> SphereKahlerFunction {
    SphereKahlerFunction::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&m + m.adjoint()).unscale(2.0)
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> ProjectivePoint {
    ProjectivePoint::new(igk_core::CVector::from_fn(n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }))
    .expect("nonzero state")
}

fn random_probability(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

fn centered(rng: &mut ChaCha8Rng, p: &[f64], scale: f64) -> Vec<f64> {
    let raw: Vec<f64> = p.iter().map(|_| rng.random_range(-scale..scale)).collect();
    let mean: f64 = p.iter().zip(&raw).map(|(p, r)| p * r).sum();
    raw.iter().map(|r| r - mean).collect()
}

fn builtins() -> Vec<ExponentialFamilySpec> {
    ExponentialFamilySpec::builtin_names()
        .iter()
        .map(|n| ExponentialFamilySpec::builtin(n).expect("builtin family"))
        .collect()
}

/// Interior natural parameter from `u` in `[0,1)^n`. The normal family is
/// sampled through `mu` in `[-2,2]` and `sigma` in `[0.5,2]`.
fn theta_from_unit(spec: &ExponentialFamilySpec, unit: &[f64]) -> Vec<f64> {
    if spec.name() == "normal" {
        let mu = -2.0 + 4.0 * unit[0];
        let sigma = 0.5 + 1.5 * unit[1];
        vec![mu / (sigma * sigma), -0.5 / (sigma * sigma)]
    } else {
        unit.iter().map(|u| -2.0 + 4.0 * u).collect()
    }
}

/// A 20-point tensor grid, or a 20-point line for one-dimensional families.
fn grid20(spec: &ExponentialFamilySpec) -> Vec<Vec<f64>> {
    let n = spec.dim();
    (0..20)
        .map(|k| {
            let unit: Vec<f64> = (0..n)
                .map(|i| {
                    let (a, b) = if n == 1 {
                        (k, 20)
                    } else if i == 0 {
                        (k % 5, 5)
                    } else {
                        (k / 5 + i, 4 + i)
                    };
                    (a as f64 + 0.5) / b as f64
                })
                .collect();
            theta_from_unit(spec, &unit)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let (mut fit, mut total) = (Worst::default(), Worst::default());
    for n in [1, 2, 3, 10] {
        for theta in [0.0, PI / 6.0, PI / 3.0, PI / 2.0, PI] {
            let s = SpherePoint::new(theta.sin(), 0.0, theta.cos()).map_err(|e| e.to_string())?;
            let law = spin_probabilities(n, SphereKahlerFunction::Z, s).map_err(|e| e.to_string())?;
            let (c2, s2) = ((0.5 * theta).cos().powi(2), (0.5 * theta).sin().powi(2));
            for (k, p) in law.probabilities.iter().enumerate() {
                fit.add((p - binom(n, k) * c2.powi(k as i32) * s2.powi((n - k) as i32)).abs());
            }
            total.add((law.probabilities.iter().sum::<f64>() - 1.0).abs());
        }
    }
    join(vec![
        fit.below("max |P - closed form|", 1e-12),
        total.below("max |sum P - 1|", 1e-12),
    ])
}

fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    let mut comm = Worst::default();
    for k in 0..100 {
        let n = 1 + k % 5;
        let (f, g) = (random_sphere_function(&mut rng), random_sphere_function(&mut rng));
        comm.add(commutator_residual(n, f, g).map_err(|e| e.to_string())?);
    }
    let mut expectation = Worst::default();
    for k in 0..100 {
        let n = 1 + k % 5;
        let f = random_sphere_function(&mut rng);
        let (a, b) = (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
        let psi = psi_embedding(n, a, b);
        let q = q_matrix(n, f).map_err(|e| e.to_string())?;
        expectation.add((f.eval(SpherePoint::from_angles(a, b)) - inner(&psi, &(&q.q * &psi)).re).abs());
    }
    let mut cas = Worst::default();
    for n in 1..=10 {
        let c = casimir(n).map_err(|e| e.to_string())?;
        let scalar = c[(0, 0)];
        let defect = c - CMatrix::identity(n + 1, n + 1) * scalar;
        cas.add(defect.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    join(vec![
        comm.below("commutator", 1e-8),
        expectation.below("expectation", 1e-10),
        cas.below("Casimir defect", 1e-8),
    ])
}

fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    let mut worst = Worst::default();
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let obs = spectral_decompose(&random_hermitian(&mut rng, n)).map_err(|e| e.to_string())?;
        let z = random_state(&mut rng, n);
        worst.add(cramer_rao_residual(&obs, &z));
    }
    worst.below("|V - |grad f|^2/4|", 1e-5)
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let mut worst = Worst::default();
    for k in 0..100 {
        let n = rng.random_range(2..=6);
        let base = spectral_decompose(&random_hermitian(&mut rng, n)).map_err(|e| e.to_string())?;
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        if k % 2 == 0 {
            x[n - 1] = x[0];
        }
        let obs = KahlerObservableCP::new(x, base.unitary().clone()).map_err(|e| e.to_string())?;
        let z = random_state(&mut rng, n);
        let report = spectrum_and_probabilities(&obs, &z);
        for (lambda, p) in report.eigenvalues.iter().zip(&report.probabilities) {
            let (_, d) = eigenmanifold_projection(&obs, *lambda, &z).map_err(|e| e.to_string())?;
            worst.add((d.cos().powi(2) - p).abs());
        }
    }
    worst.below("|cos^2 d - P|", 1e-10)
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let (mut pullback, mut deck) = (Worst::default(), Worst::default());
    for n in [3, 4] {
        for _ in 0..20 {
            let p = random_probability(&mut rng, n);
            let u = centered(&mut rng, &p, 3.0);
            let vector = |rng: &mut ChaCha8Rng| SplitTangentVector::new(centered(rng, &p, 1.0), centered(rng, &p, 1.0));
            let pairs: Vec<_> = (0..4).map(|_| (vector(&mut rng), vector(&mut rng))).collect();
            let r = pullback_scaling_check(&p, &u, &pairs).map_err(|e| e.to_string())?;
            pullback.add(r.metric.max(r.symplectic));
        }
        for _ in 0..20 {
            let p = random_probability(&mut rng, n);
            let u = centered(&mut rng, &p, 5.0);
            let m: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
            let a = tau(&p, &u).map_err(|e| e.to_string())?;
            let b = tau(&p, &deck_shift(&p, &u, &m)).map_err(|e| e.to_string())?;
            deck.add(1.0 - inner(a.homog(), b.homog()).norm());
        }
    }
    join(vec![
        pullback.below("pullback", 1e-5),
        deck.below("deck 1 - |<a,b>|", PROJECTIVE_TOL),
    ])
}

fn criterion_6() -> Outcome {
    let (mut curvature, mut duality, mut cross) = (Worst::default(), Worst::default(), Worst::default());
    for spec in builtins() {
        for theta in grid20(&spec) {
            for alpha in [1.0, -1.0] {
                curvature.add(
                    curvature_tensor(&spec, &theta, alpha)
                        .map_err(|e| e.to_string())?
                        .max_abs(),
                );
            }
            for alpha in [0.0, 0.5, 1.0] {
                duality.add(duality_residual(&spec, &theta, alpha).map_err(|e| e.to_string())?);
            }
            cross.add(cross_duality_residual(&spec, &theta).map_err(|e| e.to_string())?);
        }
    }
    join(vec![
        curvature.below("|R^(+-1)|", 1e-5),
        duality.below("duality", 1e-5),
        cross.below("cross-duality", 1e-7),
    ])
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let (mut j2, mut compat, mut closed, mut flow) =
        (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for spec in builtins() {
        for _ in 0..100 {
            let unit: Vec<f64> = (0..spec.dim()).map(|_| rng.random::<f64>()).collect();
            let fiber = (0..spec.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let point =
                TangentBundlePoint::new(&spec, theta_from_unit(&spec, &unit), fiber).map_err(|e| e.to_string())?;
            let s = kahler_structure_at(&spec, &point).map_err(|e| e.to_string())?;
            j2.add(s.j_squared_residual());
            compat.add(s.compatibility_residual());
            closed.add(omega_closedness_residual(&spec, &point).map_err(|e| e.to_string())?);
            let coef: Vec<f64> = (0..=spec.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let x = Observable::Affine(coef);
            let t = rng.random_range(-1.0..1.0);
            flow.add(flow_isometry_residual(&spec, |p| x.eval(&spec, p), &point, t).map_err(|e| e.to_string())?);
        }
    }
    join(vec![
        j2.below("J^2 + I", 1e-12),
        compat.below("omega - g(J.,.)", 1e-12),
        closed.below("d omega", 1e-6),
        flow.below("flow isometry", 1e-8),
    ])
}

fn criterion_8() -> Outcome {
    let mut worst = Worst::default();
    let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let functions = [
        PlaneKahlerFunction::ONE,
        PlaneKahlerFunction::X,
        PlaneKahlerFunction::Y,
        PlaneKahlerFunction::R,
        PlaneKahlerFunction::new(0.3, -1.2, 0.7, 1.5),
    ];
    for x in grid {
        for y in grid {
            for hbar in [0.5, 1.0, 2.0] {
                for f in functions {
                    worst.add(
                        oscillator_expectation_residual(hbar, f, PlanePoint::new(x, y)).map_err(|e| e.to_string())?,
                    );
                }
            }
        }
    }
    worst.below("|f - <Psi, Q Psi>|", 1e-7)
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9);
    let mut worst = Worst::default();
    let mut poles = true;
    for n in 1..=10 {
        let spec = ExponentialFamilySpec::binomial(n).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let theta = rng.random_range(-8.0..8.0);
            let p = pi_sphere(n, sphere_from_tangent(theta, rng.random_range(-6.0..6.0)));
            for (k, pk) in p.iter().enumerate() {
                worst.add((pk - spec.density(&[theta], k as f64).map_err(|e| e.to_string())?).abs());
            }
        }
        let dirac = |at: usize| (0..=n).map(|k| if k == at { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
        let north = pi_sphere(n, SpherePoint::new(1.0, 0.0, 0.0).map_err(|e| e.to_string())?);
        let south = pi_sphere(n, SpherePoint::new(-1.0, 0.0, 0.0).map_err(|e| e.to_string())?);
        poles &= north == dirac(n) && south == dirac(0);
    }
    let pole_line = if poles {
        Ok("poles exact".to_string())
    } else {
        Err("poles not exact".to_string())
    };
    join(vec![worst.below("|pi o tau - binomial|", 1e-12), pole_line])
}

fn criterion_10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_igk"))
            .args(["verify", "--suite", "all", "--seed", "1"])
            .env_remove("IGK_TOL_PROFILE")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    let codes = (a.status.code(), b.status.code());
    let identical = a.stdout == b.stdout;
    let line = format!(
        "exit codes {:?}/{:?}, {} report bytes, identical: {identical}",
        codes.0,
        codes.1,
        a.stdout.len()
    );
    if codes == (Some(0), Some(0)) && identical && !a.stdout.is_empty() {
        Ok(line)
    } else {
        Err(line)
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("spin law", criterion_1),
        ("representation identities", criterion_2),
        ("Cramer-Rao equality", criterion_3),
        ("cos^2 law", criterion_4),
        ("covering-map geometry", criterion_5),
        ("dual flatness", criterion_6),
        ("Kahler axioms on TM", criterion_7),
        ("oscillator identity", criterion_8),
        ("binomial Kahlerification", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = run();
        let elapsed = start.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status} {name}: {detail} [{elapsed:.2}s]", k + 1);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
