//! Seeded invariant suites over every module.
//!
//! Each check owns a ChaCha8 generator seeded from the suite seed and the
//! check identifier, so checks can run concurrently while the report stays
//! byte-for-byte reproducible.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dombrowski::{
    flow_isometry_residual, kahler_structure_at, omega_closedness_residual, Observable, TangentBundlePoint,
};
use crate::error::{Error, Result};
use crate::families::ExponentialFamilySpec;
use crate::geometry::{cross_duality_residual, curvature_tensor, duality_residual, fisher_metric};
use crate::linalg::{cmax_abs, inner, CMatrix, CVector, C64};
use crate::oscillator::{
    coherent_norm_sq, oscillator_expectation_residual, plane_bracket, plane_bracket_fd, PlaneKahlerFunction, PlanePoint,
};
use crate::projective::{
    cramer_rao_residual, deck_shift, eigenmanifold_projection, fs_poisson_bracket_fd, pi_projection,
    pullback_scaling_check, spectral_decompose, spectrum_and_probabilities, tau, xi_a, KahlerObservableCP,
    ProjectivePoint,
};
use crate::spin::{
    casimir, hat_bracket_residual, pi_sphere, psi_embedding, q_matrix, sphere_bracket_fd, sphere_from_tangent,
    spin_probabilities, stern_gerlach_transition, SphereKahlerFunction, SpherePoint,
};

/// Generator recorded in every report header.
pub const PRNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.9/seed_from_u64";
/// Report format version.
pub const REPORT_VERSION: u32 = 1;
/// Multiplier applied to finite-difference tolerances under [`TolProfile::Fd`].
pub const FD_PROFILE_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Geometry,
    Dombrowski,
    Projective,
    Spin,
    Oscillator,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["geometry", "dombrowski", "projective", "spin", "oscillator", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Dombrowski => "dombrowski",
            Suite::Projective => "projective",
            Suite::Spin => "spin",
            Suite::Oscillator => "oscillator",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "geometry" => Suite::Geometry,
            "dombrowski" => Suite::Dombrowski,
            "projective" => Suite::Projective,
            "spin" => Suite::Spin,
            "oscillator" => Suite::Oscillator,
            "all" => Suite::All,
            other => return Err(Error::InvalidInput(format!("unknown suite '{other}'"))),
        })
    }
}

/// Tolerance profile. `Fd` loosens checks whose residual is dominated by
/// finite-difference truncation by [`FD_PROFILE_FACTOR`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TolProfile {
    #[default]
    Strict,
    Fd,
}

impl FromStr for TolProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(TolProfile::Strict),
            "fd" => Ok(TolProfile::Fd),
            other => Err(Error::InvalidInput(format!("unknown tolerance profile '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    pub profile: TolProfile,
    /// Added to the `(0, 1)` entry of every representation matrix; a test hook.
    pub q_perturbation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub description: &'static str,
    pub samples: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: u32,
    pub prng: &'static str,
    pub seed: u64,
    pub suite: Suite,
    pub profile: TolProfile,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Ctx {
    q_perturbation: f64,
}

type CheckFn = fn(&mut ChaCha8Rng, &Ctx) -> Result<(f64, usize)>;

struct Check {
    id: &'static str,
    suite: Suite,
    description: &'static str,
    tolerance: f64,
    fd_based: bool,
    run: CheckFn,
}

const CHECKS: &[Check] = &[
    Check {
        id: "geometry.curvature_dual_flat",
        suite: Suite::Geometry,
        description: "max |R^(+1)|, |R^(-1)| over builtin families on a 20-point grid",
        tolerance: 1e-5,
        fd_based: true,
        run: geometry_curvature,
    },
    Check {
        id: "geometry.duality",
        suite: Suite::Geometry,
        description: "d h(Y,Z) = h(D_X Y, Z) + h(Y, D*_X Z) for alpha in {0.5, 1}",
        tolerance: 1e-5,
        fd_based: true,
        run: geometry_duality,
    },
    Check {
        id: "geometry.cross_duality",
        suite: Suite::Geometry,
        description: "h(d/dtheta_i, d/deta_j) = delta_ij",
        tolerance: 1e-7,
        fd_based: true,
        run: geometry_cross_duality,
    },
    Check {
        id: "geometry.fisher_spd",
        suite: Suite::Geometry,
        description: "Fisher metric symmetric and positive definite",
        tolerance: 1e-12,
        fd_based: false,
        run: geometry_fisher_spd,
    },
    Check {
        id: "dombrowski.j_squared",
        suite: Suite::Dombrowski,
        description: "J^2 = -I at 100 random tangent-bundle points per family",
        tolerance: 1e-12,
        fd_based: false,
        run: dombrowski_j_squared,
    },
    Check {
        id: "dombrowski.compatibility",
        suite: Suite::Dombrowski,
        description: "omega = g(J., .) and g(J., J.) = g",
        tolerance: 1e-12,
        fd_based: false,
        run: dombrowski_compatibility,
    },
    Check {
        id: "dombrowski.omega_closed",
        suite: Suite::Dombrowski,
        description: "d omega = 0",
        tolerance: 1e-6,
        fd_based: true,
        run: dombrowski_closed,
    },
    Check {
        id: "dombrowski.flow_isometry",
        suite: Suite::Dombrowski,
        description: "Hamiltonian flows of A_E observables preserve g",
        tolerance: 1e-8,
        fd_based: true,
        run: dombrowski_flow,
    },
    Check {
        id: "projective.cramer_rao",
        suite: Suite::Projective,
        description: "V(X) = (1/4)|grad f|^2 on 100 random (A, z), n <= 6",
        tolerance: 1e-5,
        fd_based: true,
        run: projective_cramer_rao,
    },
    Check {
        id: "projective.cos_squared",
        suite: Suite::Projective,
        description: "P(lambda) = cos^2 d(z, M_lambda) on 100 random instances",
        tolerance: 1e-10,
        fd_based: false,
        run: projective_cos_squared,
    },
    Check {
        id: "projective.pullback",
        suite: Suite::Projective,
        description: "tau^* g_FS = g/4 and tau^* omega_FS = omega/4 at 20 base points of P3 and P4",
        tolerance: 1e-5,
        fd_based: true,
        run: projective_pullback,
    },
    Check {
        id: "projective.deck_invariance",
        suite: Suite::Projective,
        description: "1 - |<tau(p,u), tau(p,u + 4 pi (m - E m))>| under 20 integer shifts",
        tolerance: 1e-12,
        fd_based: false,
        run: projective_deck,
    },
    Check {
        id: "projective.tau_section",
        suite: Suite::Projective,
        description: "pi(tau(p, u)) = p",
        tolerance: 1e-14,
        fd_based: false,
        run: projective_tau_section,
    },
    Check {
        id: "projective.xi_morphism",
        suite: Suite::Projective,
        description: "xi^[A,B] = {xi^A, xi^B}",
        tolerance: 1e-8,
        fd_based: true,
        run: projective_xi_morphism,
    },
    Check {
        id: "spin.law",
        suite: Suite::Spin,
        description: "spin probabilities vs C(n,k) cos^2k sin^2(n-k), n in {1,2,3,10}",
        tolerance: 1e-12,
        fd_based: false,
        run: spin_law,
    },
    Check {
        id: "spin.commutator",
        suite: Suite::Spin,
        description: "Q({f,g}) = -(i/2)[Q(f), Q(g)] on 100 random pairs, n <= 5",
        tolerance: 1e-8,
        fd_based: true,
        run: spin_commutator,
    },
    Check {
        id: "spin.expectation",
        suite: Suite::Spin,
        description: "f = <Psi, Q(f) Psi> at 100 random sphere points",
        tolerance: 1e-10,
        fd_based: false,
        run: spin_expectation,
    },
    Check {
        id: "spin.casimir",
        suite: Suite::Spin,
        description: "Q(x)^2 + Q(y)^2 + Q(z)^2 is scalar",
        tolerance: 1e-8,
        fd_based: false,
        run: spin_casimir,
    },
    Check {
        id: "spin.hat_scaling",
        suite: Suite::Spin,
        description: "{f,g}^ = (1/4){f^, g^}_FS",
        tolerance: 1e-8,
        fd_based: true,
        run: spin_hat_scaling,
    },
    Check {
        id: "spin.binomial_consistency",
        suite: Suite::Spin,
        description: "pi_sphere o sphere_from_tangent = binomial density; poles give Dirac masses",
        tolerance: 1e-12,
        fd_based: false,
        run: spin_binomial,
    },
    Check {
        id: "spin.stern_gerlach",
        suite: Suite::Spin,
        description: "maximum-spin transition rows reproduce the spin law",
        tolerance: 1e-10,
        fd_based: false,
        run: spin_stern_gerlach,
    },
    Check {
        id: "oscillator.expectation",
        suite: Suite::Oscillator,
        description: "f(z) = <Psi(z), Q(f) Psi(z)> on the 5x5x3 (x, y, hbar) grid",
        tolerance: 1e-7,
        fd_based: false,
        run: oscillator_expectation_grid,
    },
    Check {
        id: "oscillator.bracket",
        suite: Suite::Oscillator,
        description: "bracket table vs finite differences on 50 random pairs",
        tolerance: 1e-6,
        fd_based: true,
        run: oscillator_bracket,
    },
    Check {
        id: "oscillator.normalization",
        suite: Suite::Oscillator,
        description: "|Psi(z)| = 1 at 20 random points",
        tolerance: 1e-8,
        fd_based: false,
        run: oscillator_normalization,
    },
];

/// Identifiers of the checks in a suite, sorted.
pub fn check_ids(suite: Suite) -> Vec<&'static str> {
    let mut ids: Vec<_> = CHECKS
        .iter()
        .filter(|c| suite.includes(c.suite))
        .map(|c| c.id)
        .collect();
    ids.sort_unstable();
    ids
}

fn check_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a, fixed so that reports are stable across platforms and releases.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed
}

/// Runs a suite; checks execute concurrently and are reported sorted by id.
pub fn run_suite(suite: Suite, options: &VerifyOptions) -> VerifyReport {
    let ctx = Ctx {
        q_perturbation: options.q_perturbation,
    };
    let selected: Vec<&Check> = CHECKS.iter().filter(|c| suite.includes(c.suite)).collect();
    let mut checks: Vec<CheckResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|check| {
                let ctx = &ctx;
                scope.spawn(move || run_check(check, options, ctx))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification check panicked"))
            .collect()
    });
    checks.sort_by(|a, b| a.id.cmp(b.id));
    VerifyReport {
        version: REPORT_VERSION,
        prng: PRNG_NAME,
        seed: options.seed,
        suite,
        profile: options.profile,
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

fn run_check(check: &Check, options: &VerifyOptions, ctx: &Ctx) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(check_seed(options.seed, check.id));
    let tolerance = if check.fd_based && options.profile == TolProfile::Fd {
        check.tolerance * FD_PROFILE_FACTOR
    } else {
        check.tolerance
    };
    let (residual, samples, error) = match (check.run)(&mut rng, ctx) {
        Ok((r, s)) => (r, s, None),
        Err(e) => (f64::INFINITY, 0, Some(e.to_string())),
    };
    CheckResult {
        id: check.id,
        description: check.description,
        samples,
        residual,
        tolerance,
        pass: error.is_none() && residual <= tolerance,
        error,
    }
}

/// Running maximum that propagates NaN.
#[derive(Default)]
struct Worst {
    value: f64,
    count: usize,
}

impl Worst {
    fn add(&mut self, r: f64) {
        self.count += 1;
        if !self.value.is_nan() && (r.is_nan() || r > self.value) {
            self.value = r;
        }
    }

    fn finish(self) -> Result<(f64, usize)> {
        Ok((self.value, self.count))
    }
}

// ---------------------------------------------------------------------------
// Sampling helpers

fn builtins() -> Vec<ExponentialFamilySpec> {
    ExponentialFamilySpec::builtin_names()
        .iter()
        .map(|n| ExponentialFamilySpec::builtin(n).expect("builtin family"))
        .collect()
}

/// Maps `u` in `[0,1)^n` to an interior natural parameter.
fn theta_from_unit(spec: &ExponentialFamilySpec, unit: &[f64]) -> Vec<f64> {
    if spec.name() == "normal" {
        let mu = -2.0 + 4.0 * unit[0];
        let sigma = 0.5 + 1.5 * unit[1];
        vec![mu / (sigma * sigma), -0.5 / (sigma * sigma)]
    } else {
        unit.iter().map(|u| -2.0 + 4.0 * u).collect()
    }
}

/// Deterministic low-discrepancy grid of natural parameters.
fn theta_grid(spec: &ExponentialFamilySpec, count: usize) -> Vec<Vec<f64>> {
    const STEPS: [f64; 4] = [
        0.618_033_988_749_895,
        0.414_213_562_373_095,
        0.732_050_807_568_877,
        0.236_067_977_499_79,
    ];
    (0..count)
        .map(|k| {
            let unit: Vec<f64> = (0..spec.dim())
                .map(|i| (0.5 + k as f64 * STEPS[i % STEPS.len()]).fract())
                .collect();
            theta_from_unit(spec, &unit)
        })
        .collect()
}

fn random_theta(spec: &ExponentialFamilySpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let unit: Vec<f64> = (0..spec.dim()).map(|_| rng.random::<f64>()).collect();
    theta_from_unit(spec, &unit)
}

fn random_tangent_point(spec: &ExponentialFamilySpec, rng: &mut ChaCha8Rng) -> Result<TangentBundlePoint> {
    let base = random_theta(spec, rng);
    let fiber = (0..spec.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
    TangentBundlePoint::new(spec, base, fiber)
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Result<ProjectivePoint> {
    ProjectivePoint::new(CVector::from_fn(n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }))
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&m + m.adjoint()).unscale(2.0)
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

fn random_sphere_function(rng: &mut ChaCha8Rng) -> SphereKahlerFunction {
    SphereKahlerFunction::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

fn random_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// ---------------------------------------------------------------------------
// geometry

fn geometry_curvature(_: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for spec in builtins() {
        for theta in theta_grid(&spec, 20) {
            for alpha in [1.0, -1.0] {
                worst.add(curvature_tensor(&spec, &theta, alpha)?.max_abs());
            }
        }
    }
    worst.finish()
}

fn geometry_duality(_: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for spec in builtins() {
        for theta in theta_grid(&spec, 20) {
            for alpha in [0.5, 1.0] {
                worst.add(duality_residual(&spec, &theta, alpha)?);
            }
        }
    }
    worst.finish()
}

fn geometry_cross_duality(_: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for spec in builtins() {
        for theta in theta_grid(&spec, 20) {
            worst.add(cross_duality_residual(&spec, &theta)?);
        }
    }
    worst.finish()
}

fn geometry_fisher_spd(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for spec in builtins() {
        for _ in 0..20 {
            let h = fisher_metric(&spec, &random_theta(&spec, rng))?;
            worst.add(if h.is_positive_definite() {
                h.asymmetry()
            } else {
                f64::INFINITY
            });
        }
    }
    worst.finish()
}

// ---------------------------------------------------------------------------
// dombrowski

fn each_tangent_point(
    rng: &mut ChaCha8Rng,
    mut f: impl FnMut(&ExponentialFamilySpec, &TangentBundlePoint, &mut ChaCha8Rng) -> Result<f64>,
) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for spec in builtins() {
        for _ in 0..100 {
            let point = random_tangent_point(&spec, rng)?;
            worst.add(f(&spec, &point, rng)?);
        }
    }
    worst.finish()
}

fn dombrowski_j_squared(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    each_tangent_point(rng, |spec, point, _| {
        Ok(kahler_structure_at(spec, point)?.j_squared_residual())
    })
}

fn dombrowski_compatibility(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    each_tangent_point(rng, |spec, point, _| {
        let s = kahler_structure_at(spec, point)?;
        Ok(s.compatibility_residual()
            .max(s.j_isometry_residual())
            .max(s.omega_antisymmetry()))
    })
}

fn dombrowski_closed(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    each_tangent_point(rng, |spec, point, _| omega_closedness_residual(spec, point))
}

fn dombrowski_flow(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    each_tangent_point(rng, |spec, point, rng| {
        let coef: Vec<f64> = (0..=spec.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x = Observable::Affine(coef);
        let t = rng.random_range(-1.0..1.0);
        flow_isometry_residual(spec, |p| x.eval(spec, p), point, t)
    })
}

// ---------------------------------------------------------------------------
// projective

fn projective_cramer_rao(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let obs = spectral_decompose(&random_hermitian(rng, n))?;
        let z = random_state(rng, n)?;
        worst.add(cramer_rao_residual(&obs, &z));
    }
    worst.finish()
}

fn projective_cos_squared(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for k in 0..100 {
        let n = rng.random_range(2..=6);
        let base = spectral_decompose(&random_hermitian(rng, n))?;
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        if k % 2 == 0 {
            // Degenerate eigenvalue.
            x[n - 1] = x[0];
        }
        let obs = KahlerObservableCP::new(x, base.unitary().clone())?;
        let z = random_state(rng, n)?;
        let report = spectrum_and_probabilities(&obs, &z);
        for (lambda, p) in report.eigenvalues.iter().zip(&report.probabilities) {
            let (_, d) = eigenmanifold_projection(&obs, *lambda, &z)?;
            worst.add((d.cos().powi(2) - p).abs());
        }
    }
    worst.finish()
}

fn projective_pullback(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    use crate::dombrowski::SplitTangentVector;
    let mut worst = Worst::default();
    for n in [3, 4] {
        for _ in 0..20 {
            let p = random_probability(rng, n);
            let u = centered(rng, &p, 3.0);
            let vector = |rng: &mut ChaCha8Rng| SplitTangentVector::new(centered(rng, &p, 1.0), centered(rng, &p, 1.0));
            let pairs: Vec<_> = (0..4).map(|_| (vector(rng), vector(rng))).collect();
            let r = pullback_scaling_check(&p, &u, &pairs)?;
            worst.add(r.metric.max(r.symplectic));
        }
    }
    worst.finish()
}

fn projective_deck(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for n in [3, 4] {
        for _ in 0..20 {
            let p = random_probability(rng, n);
            let u = centered(rng, &p, 5.0);
            let m: Vec<i64> = (0..n).map(|_| rng.random_range(-5..=5)).collect();
            let a = tau(&p, &u)?;
            let b = tau(&p, &deck_shift(&p, &u, &m))?;
            worst.add(1.0 - inner(a.homog(), b.homog()).norm());
        }
    }
    worst.finish()
}

fn projective_tau_section(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        let p = random_probability(rng, n);
        let u = centered(rng, &p, 10.0);
        let back = pi_projection(&tau(&p, &u)?);
        worst.add(back.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    worst.finish()
}

fn projective_xi_morphism(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    let i = C64::new(0.0, 1.0);
    for _ in 0..20 {
        let n = rng.random_range(2..=5);
        let a = random_hermitian(rng, n) * i;
        let b = random_hermitian(rng, n) * i;
        let z = random_state(rng, n)?;
        let lhs = xi_a(&(&a * &b - &b * &a), &z)?;
        let fa = |w: &CVector| (i * 0.5 * inner(w, &(&a * w))).re;
        let fb = |w: &CVector| (i * 0.5 * inner(w, &(&b * w))).re;
        worst.add((lhs - fs_poisson_bracket_fd(&fa, &fb, &z)).abs());
    }
    worst.finish()
}

// ---------------------------------------------------------------------------
// spin

fn q_of(ctx: &Ctx, n: usize, f: SphereKahlerFunction) -> Result<CMatrix> {
    let mut q = q_matrix(n, f)?.q;
    q[(0, 1)] += C64::new(ctx.q_perturbation, 0.0);
    Ok(q)
}

fn spin_law(_: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for n in [1, 2, 3, 10] {
        for theta in [0.0, PI / 6.0, PI / 3.0, PI / 2.0, PI] {
            let s = SpherePoint::new(theta.sin(), 0.0, theta.cos())?;
            let law = spin_probabilities(n, SphereKahlerFunction::Z, s)?;
            let (c2, s2) = ((0.5 * theta).cos().powi(2), (0.5 * theta).sin().powi(2));
            for (k, p) in law.probabilities.iter().enumerate() {
                worst.add((p - binom(n, k) * c2.powi(k as i32) * s2.powi((n - k) as i32)).abs());
            }
            worst.add((law.probabilities.iter().sum::<f64>() - 1.0).abs());
        }
    }
    worst.finish()
}

fn spin_commutator(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for k in 0..100 {
        let n = 1 + k % 5;
        let f = random_sphere_function(rng);
        let g = random_sphere_function(rng);
        let (qf, qg) = (q_of(ctx, n, f)?, q_of(ctx, n, g)?);
        let bracket = q_of(ctx, n, sphere_bracket_fd(n, f, g))?;
        let comm = &qf * &qg - &qg * &qf;
        worst.add(cmax_abs(&(bracket + comm * C64::new(0.0, 0.5))));
    }
    worst.finish()
}

fn spin_expectation(rng: &mut ChaCha8Rng, ctx: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for k in 0..100 {
        let n = 1 + k % 5;
        let f = random_sphere_function(rng);
        let (a, b) = random_angles(rng);
        let psi = psi_embedding(n, a, b);
        let value = inner(&psi, &(q_of(ctx, n, f)? * &psi)).re;
        worst.add((f.eval(SpherePoint::from_angles(a, b)) - value).abs());
    }
    worst.finish()
}

fn spin_casimir(_: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for n in 1..=10 {
        let c = casimir(n)?;
        let scalar = c[(0, 0)];
        worst.add(cmax_abs(&(c - CMatrix::identity(n + 1, n + 1) * scalar)));
    }
    worst.finish()
}

fn spin_hat_scaling(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for k in 0..20 {
        let n = 1 + k % 5;
        let f = random_sphere_function(rng);
        let g = random_sphere_function(rng);
        let z = random_state(rng, n + 1)?;
        worst.add(hat_bracket_residual(n, f, g, &z)?);
    }
    worst.finish()
}

fn spin_binomial(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for n in 1..=10 {
        let spec = ExponentialFamilySpec::binomial(n)?;
        for _ in 0..50 {
            let theta = rng.random_range(-8.0..8.0);
            let p = pi_sphere(n, sphere_from_tangent(theta, rng.random_range(-6.0..6.0)));
            for (k, pk) in p.iter().enumerate() {
                worst.add((pk - spec.density(&[theta], k as f64)?).abs());
            }
        }
        let north = pi_sphere(n, SpherePoint::new(1.0, 0.0, 0.0)?);
        let south = pi_sphere(n, SpherePoint::new(-1.0, 0.0, 0.0)?);
        let dirac = |at: usize| (0..=n).map(|k| if k == at { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
        worst.add(if north == dirac(n) && south == dirac(0) {
            0.0
        } else {
            f64::INFINITY
        });
    }
    worst.finish()
}

fn spin_stern_gerlach(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for k in 0..20 {
        let n = 1 + k % 6;
        let f1 = random_sphere_function(rng);
        let f2 = random_sphere_function(rng);
        let row = stern_gerlach_transition(n, f1, n, f2)?;
        let axis = f1.axis().normalize();
        let law = spin_probabilities(n, f2, SpherePoint::new(axis[0], axis[1], axis[2])?)?;
        for (a, b) in row.iter().zip(&law.probabilities) {
            worst.add((a - b).abs());
        }
    }
    worst.finish()
}

// ---------------------------------------------------------------------------
// oscillator

fn oscillator_expectation_grid(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    let generic = PlaneKahlerFunction::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    );
    let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    for x in grid {
        for y in grid {
            for hbar in [0.5, 1.0, 2.0] {
                for f in [
                    PlaneKahlerFunction::ONE,
                    PlaneKahlerFunction::X,
                    PlaneKahlerFunction::Y,
                    PlaneKahlerFunction::R,
                    generic,
                ] {
                    worst.add(oscillator_expectation_residual(hbar, f, PlanePoint::new(x, y))?);
                }
            }
        }
    }
    worst.finish()
}

fn oscillator_bracket(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    let random = |rng: &mut ChaCha8Rng| {
        PlaneKahlerFunction::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
    };
    for _ in 0..50 {
        let f = random(rng);
        let g = random(rng);
        let z = PlanePoint::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        worst.add((plane_bracket(f, g).eval(z) - plane_bracket_fd(&|p| f.eval(p), &|p| g.eval(p), z)).abs());
    }
    worst.finish()
}

fn oscillator_normalization(rng: &mut ChaCha8Rng, _: &Ctx) -> Result<(f64, usize)> {
    let mut worst = Worst::default();
    for _ in 0..20 {
        let z = PlanePoint::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        worst.add((coherent_norm_sq(rng.random_range(0.3..3.0), z)? - 1.0).abs());
    }
    worst.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_prefixed_by_suite() {
        let ids = check_ids(Suite::All);
        let mut dedup = ids.clone();
        dedup.dedup();
        assert_eq!(ids, dedup);
        for c in CHECKS {
            assert!(c.id.starts_with(c.suite.name()));
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!("fd".parse::<TolProfile>().unwrap(), TolProfile::Fd);
    }

    #[test]
    fn spin_suite_passes_and_is_deterministic() {
        let options = VerifyOptions {
            seed: 7,
            ..Default::default()
        };
        let a = run_suite(Suite::Spin, &options);
        let b = run_suite(Suite::Spin, &options);
        assert!(a.pass, "{:?}", a.failures().collect::<Vec<_>>());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.check("spin.commutator").unwrap().residual < 1e-8);
    }

    #[test]
    fn perturbed_q_fails_named_checks() {
        let options = VerifyOptions {
            seed: 7,
            q_perturbation: 1e-3,
            ..Default::default()
        };
        let report = run_suite(Suite::Spin, &options);
        assert!(!report.pass);
        let failed: Vec<_> = report.failures().map(|c| c.id).collect();
        assert!(failed.contains(&"spin.commutator"));
        assert!(failed.contains(&"spin.expectation"));
    }

    #[test]
    fn fd_profile_loosens_only_fd_checks() {
        let strict = run_suite(Suite::Oscillator, &VerifyOptions::default());
        let fd = run_suite(
            Suite::Oscillator,
            &VerifyOptions {
                profile: TolProfile::Fd,
                ..Default::default()
            },
        );
        for (a, b) in strict.checks.iter().zip(&fd.checks) {
            let factor = if CHECKS.iter().find(|c| c.id == a.id).unwrap().fd_based {
                FD_PROFILE_FACTOR
            } else {
                1.0
            };
            assert_eq!(b.tolerance, a.tolerance * factor);
        }
    }
}
