//! Complex projective space as the Kählerification of the finite simplex.
//!
//! Points are unit vectors up to phase. Tangent computations use the affine
//! chart `xi -> [u + xi]`, `xi` orthogonal to `u`, centered at the evaluation
//! point, where the Fubini–Study metric is `Re<xi1, xi2>` and the symplectic
//! form is `Im<xi1, xi2>`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::dombrowski::{kahler_structure_at, SplitTangentVector, TangentBundlePoint};
use crate::error::{Error, Result};
use crate::families::ExponentialFamilySpec;
use crate::linalg::{cmax_abs, hermitian_defect, hermitian_eigen, inner, CMatrix, CVector, C64};

/// Tolerance for projective equality `|<z, w>| >= 1 - tol`.
pub const PROJECTIVE_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are merged into one spectral value.
pub const EIGEN_GROUP_TOL: f64 = 1e-9;
/// Step of the chart finite differences.
pub const CHART_STEP: f64 = 1e-5;

/// Normalization of the Fubini–Study structure. `Quadrupled` multiplies metric
/// and symplectic form by 4, which makes the covering map `tau` an isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FsScale {
    #[default]
    Standard,
    Quadrupled,
}

impl FsScale {
    pub fn factor(self) -> f64 {
        match self {
            FsScale::Standard => 1.0,
            FsScale::Quadrupled => 4.0,
        }
    }
}

/// A point of `P(C^n)`, stored as a unit representative.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    homog: CVector,
}

impl ProjectivePoint {
    pub fn new(z: CVector) -> Result<Self> {
        let norm = z.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidInput(
                "homogeneous coordinates must be finite and nonzero".into(),
            ));
        }
        Ok(Self { homog: z.unscale(norm) })
    }

    pub fn from_slice(z: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(z))
    }

    pub fn homog(&self) -> &CVector {
        &self.homog
    }

    pub fn dim(&self) -> usize {
        self.homog.len()
    }

    /// Representative-free equality.
    pub fn approx_eq(&self, other: &Self) -> bool {
        inner(&self.homog, &other.homog).norm() >= 1.0 - PROJECTIVE_TOL
    }
}

/// `tau(p, u) = [sqrt(p_k) e^{i u_k / 2}]` for a probability vector `p` and an
/// exponential-representation vector `u` with `sum p_k u_k = 0`.
pub fn tau(p: &[f64], u: &[f64]) -> Result<ProjectivePoint> {
    check_base(p)?;
    if u.len() != p.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            got: u.len(),
        });
    }
    let mean: f64 = p.iter().zip(u).map(|(p, u)| p * u).sum();
    if mean.abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("E_p(u) = {mean:e} must vanish")));
    }
    Ok(tau_unchecked(p, u))
}

fn tau_unchecked(p: &[f64], u: &[f64]) -> ProjectivePoint {
    ProjectivePoint {
        homog: CVector::from_iterator(
            p.len(),
            p.iter().zip(u).map(|(&p, &u)| C64::from_polar(p.sqrt(), 0.5 * u)),
        ),
    }
}

fn check_base(p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::InvalidInput("need at least two outcomes".into()));
    }
    if p.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::InvalidInput("probabilities must be strictly positive".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
    }
    Ok(())
}

/// Deck transformation `u -> u + 4 pi (m - E_p(m))` for an integer vector `m`.
pub fn deck_shift(p: &[f64], u: &[f64], m: &[i64]) -> Vec<f64> {
    let mean: f64 = p.iter().zip(m).map(|(p, &m)| p * m as f64).sum();
    u.iter()
        .zip(m)
        .map(|(u, &m)| u + 4.0 * PI * (m as f64 - mean))
        .collect()
}

/// `pi([z])_k = |z_k|^2 / <z, z>`.
pub fn pi_projection(z: &ProjectivePoint) -> Vec<f64> {
    z.homog.iter().map(|c| c.norm_sqr()).collect()
}

/// Geodesic distance `arccos |<z, w>|` in `[0, pi/2]` (times `sqrt(scale)`).
pub fn fubini_study_distance(z: &ProjectivePoint, w: &ProjectivePoint) -> f64 {
    fubini_study_distance_scaled(z, w, FsScale::Standard)
}

pub fn fubini_study_distance_scaled(z: &ProjectivePoint, w: &ProjectivePoint, scale: FsScale) -> f64 {
    scale.factor().sqrt() * inner(&z.homog, &w.homog).norm().min(1.0).acos()
}

/// `xi^A([z]) = (i/2) <z, A z> / <z, z>` for skew-Hermitian `A`.
pub fn xi_a(a: &CMatrix, z: &ProjectivePoint) -> Result<f64> {
    let defect = cmax_abs(&(a + a.adjoint()));
    if defect > 1e-10 {
        return Err(Error::NotSkewHermitian(defect));
    }
    Ok(xi_a_unchecked(a, &z.homog))
}

fn xi_a_unchecked(a: &CMatrix, z: &CVector) -> f64 {
    (C64::new(0.0, 0.5) * inner(z, &(a * z))).re / z.norm_squared()
}

/// Orthonormal basis of the complex orthogonal complement of a unit vector.
fn complement_basis(z: &CVector) -> Vec<CVector> {
    let n = z.len();
    let pivot = (0..n).max_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm())).unwrap_or(0);
    let mut m = CMatrix::zeros(n, n);
    m.set_column(0, z);
    for (col, k) in (1..).zip((0..n).filter(|&k| k != pivot)) {
        m[(k, col)] = C64::new(1.0, 0.0);
    }
    let q = m.qr().q();
    (1..n).map(|j| q.column(j).into_owned()).collect()
}

/// A chart centered at a point: `(a, b) -> [z + sum (a_j + i b_j) e_j]`.
struct CenteredChart {
    center: CVector,
    basis: Vec<CVector>,
}

impl CenteredChart {
    fn at(z: &ProjectivePoint) -> Self {
        Self {
            center: z.homog.clone(),
            basis: complement_basis(&z.homog),
        }
    }

    /// Number of real coordinates.
    fn real_dim(&self) -> usize {
        2 * self.basis.len()
    }

    /// Unit representative of the point with real coordinate `k` set to `t`.
    fn point(&self, k: usize, t: f64) -> CVector {
        let coef = if k.is_multiple_of(2) {
            C64::new(t, 0.0)
        } else {
            C64::new(0.0, t)
        };
        let v = &self.center + &self.basis[k / 2] * coef;
        let norm = v.norm();
        v.unscale(norm)
    }

    /// Central-difference gradient of `f` in the real coordinates `(a_1, b_1, ..)`.
    fn gradient(&self, f: &dyn Fn(&CVector) -> f64) -> Vec<f64> {
        let h = CHART_STEP;
        (0..self.real_dim())
            .map(|k| (f(&self.point(k, h)) - f(&self.point(k, -h))) / (2.0 * h))
            .collect()
    }
}

/// Poisson bracket `omega_FS(X_f, X_g)` of two functions on unit vectors,
/// computed from chart gradients: `sum_j (d_a f d_b g - d_b f d_a g)`.
pub fn fs_poisson_bracket_fd(f: &dyn Fn(&CVector) -> f64, g: &dyn Fn(&CVector) -> f64, z: &ProjectivePoint) -> f64 {
    let chart = CenteredChart::at(z);
    let df = chart.gradient(f);
    let dg = chart.gradient(g);
    df.chunks(2)
        .zip(dg.chunks(2))
        .map(|(a, b)| a[0] * b[1] - a[1] * b[0])
        .sum()
}

/// Squared Fubini–Study norm of the gradient of `f` at `z`, by chart differences.
pub fn fs_gradient_norm_sq(f: &dyn Fn(&CVector) -> f64, z: &ProjectivePoint, scale: FsScale) -> f64 {
    let chart = CenteredChart::at(z);
    chart.gradient(f).iter().map(|d| d * d).sum::<f64>() / scale.factor()
}

/// A Kähler function `f([z]) = sum_k X_k |(U z)_k|^2` on `P(C^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerObservableCP {
    x: Vec<f64>,
    u: CMatrix,
}

impl KahlerObservableCP {
    pub fn new(x: Vec<f64>, u: CMatrix) -> Result<Self> {
        let n = x.len();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: u.nrows(),
            });
        }
        let defect = cmax_abs(&(&u * u.adjoint() - CMatrix::identity(n, n)));
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { x, u })
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The Hermitian matrix `A = U* diag(X) U` with `f([z]) = <z, A z>`.
    pub fn hermitian(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            self.dim(),
            self.x.iter().map(|&v| C64::new(v, 0.0)),
        ));
        self.u.adjoint() * d * &self.u
    }

    /// Probability vector `|(U z)_k|^2` pushed forward to the sample space.
    pub fn pushed_probabilities(&self, z: &CVector) -> Vec<f64> {
        let w = &self.u * z;
        let norm = z.norm_squared();
        w.iter().map(|c| c.norm_sqr() / norm).collect()
    }

    /// `f([z])`.
    pub fn value(&self, z: &CVector) -> f64 {
        self.pushed_probabilities(z)
            .iter()
            .zip(&self.x)
            .map(|(p, x)| p * x)
            .sum()
    }

    /// Variance of `X` under the pushed-forward probability.
    pub fn variance(&self, z: &CVector) -> f64 {
        let p = self.pushed_probabilities(z);
        let mean: f64 = p.iter().zip(&self.x).map(|(p, x)| p * x).sum();
        p.iter().zip(&self.x).map(|(p, x)| p * (x - mean).powi(2)).sum()
    }

    /// Eigenvector `U* e_k`, the point where the outcome `k` is certain.
    pub fn eigenpoint(&self, k: usize) -> ProjectivePoint {
        ProjectivePoint {
            homog: self.u.row(k).adjoint(),
        }
    }

    /// Indices grouped by (approximately) equal values of `X`, ascending.
    fn groups(&self) -> Vec<(f64, Vec<usize>)> {
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| self.x[a].total_cmp(&self.x[b]));
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for k in order {
            match groups.last_mut() {
                Some((first, members)) if (self.x[k] - *first).abs() <= EIGEN_GROUP_TOL => members.push(k),
                _ => groups.push((self.x[k], vec![k])),
            }
        }
        groups
            .into_iter()
            .map(|(_, members)| {
                let mean = members.iter().map(|&k| self.x[k]).sum::<f64>() / members.len() as f64;
                (mean, members)
            })
            .collect()
    }
}

/// Decomposes a Hermitian matrix as `A = U* diag(X) U`, ascending `X`.
pub fn spectral_decompose(a: &CMatrix) -> Result<KahlerObservableCP> {
    let defect = hermitian_defect(a);
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let (values, vectors) = hermitian_eigen(a);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence {
            what: "Hermitian eigensolver",
            residual: f64::NAN,
        });
    }
    KahlerObservableCP::new(values, vectors.adjoint())
}

/// Spectrum, multiplicities and outcome probabilities at a state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub probabilities: Vec<f64>,
}

impl SpectralReport {
    pub fn probability_of(&self, lambda: f64) -> Option<f64> {
        self.eigenvalues
            .iter()
            .position(|&e| (e - lambda).abs() <= EIGEN_GROUP_TOL)
            .map(|i| self.probabilities[i])
    }
}

pub fn spectrum_and_probabilities(obs: &KahlerObservableCP, z: &ProjectivePoint) -> SpectralReport {
    let p = obs.pushed_probabilities(&z.homog);
    let groups = obs.groups();
    SpectralReport {
        eigenvalues: groups.iter().map(|(v, _)| *v).collect(),
        multiplicities: groups.iter().map(|(_, m)| m.len()).collect(),
        probabilities: groups.iter().map(|(_, m)| m.iter().map(|&k| p[k]).sum()).collect(),
    }
}

/// `|V(X) - (1/4) |grad f|^2|` with the gradient taken by chart differences.
pub fn cramer_rao_residual(obs: &KahlerObservableCP, z: &ProjectivePoint) -> f64 {
    cramer_rao_residual_scaled(obs, z, FsScale::Standard)
}

/// As [`cramer_rao_residual`] for a rescaled metric, where the identity reads
/// `V = (scale / 4) |grad f|^2_scaled`.
pub fn cramer_rao_residual_scaled(obs: &KahlerObservableCP, z: &ProjectivePoint, scale: FsScale) -> f64 {
    let grad_sq = fs_gradient_norm_sq(&|w| obs.value(w), z, scale);
    (obs.variance(&z.homog) - 0.25 * scale.factor() * grad_sq).abs()
}

/// Nearest point of the eigenmanifold of `lambda` and its distance to `z`.
pub fn eigenmanifold_projection(
    obs: &KahlerObservableCP,
    lambda: f64,
    z: &ProjectivePoint,
) -> Result<(ProjectivePoint, f64)> {
    let (_, members) = obs
        .groups()
        .into_iter()
        .find(|(v, _)| (v - lambda).abs() <= EIGEN_GROUP_TOL)
        .ok_or(Error::NotAnEigenvalue(lambda))?;
    let w = &obs.u * &z.homog;
    let mut proj = CVector::zeros(obs.dim());
    for k in members {
        proj += obs.u.row(k).adjoint() * w[k];
    }
    if proj.norm() <= 1e-12 {
        return Err(Error::UndefinedProjection);
    }
    let point = ProjectivePoint::new(proj)?;
    let d = fubini_study_distance(z, &point);
    Ok((point, d))
}

/// Residuals of the pullback identities `tau^* g_FS = g / 4` and `tau^* omega_FS = omega / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackResidual {
    pub metric: f64,
    pub symplectic: f64,
}

/// Tangent vector `(v, w)` at `[u]_p` in exponential representation.
fn tau_pushforward(p: &[f64], u: &[f64], v: &[f64], w: &[f64], z0: &CVector) -> CVector {
    let h = 1e-6;
    let curve = |t: f64| -> CVector {
        let weights: Vec<f64> = p.iter().zip(v).map(|(p, v)| p * (t * v).exp()).collect();
        let total: f64 = weights.iter().sum();
        let pt: Vec<f64> = weights.iter().map(|x| x / total).collect();
        let shifted: Vec<f64> = u.iter().zip(w).map(|(u, w)| u + t * w).collect();
        let mean: f64 = pt.iter().zip(&shifted).map(|(p, s)| p * s).sum();
        let ut: Vec<f64> = shifted.iter().map(|s| s - mean).collect();
        tau_unchecked(&pt, &ut).homog
    };
    let zdot = (curve(h) - curve(-h)) / C64::new(2.0 * h, 0.0);
    // Differential of the chart centered at z0.
    &zdot - z0 * inner(z0, &zdot)
}

/// Compares `g_FS(tau_* a, tau_* b)` with `g(a, b) / 4` (and likewise for
/// `omega`) on the given pairs. Vectors are `(v, w)` in exponential
/// representation, each with `sum p_k v_k = sum p_k w_k = 0`; `g` is the
/// tangent-bundle structure of the categorical family.
pub fn pullback_scaling_check(
    p: &[f64],
    u: &[f64],
    pairs: &[(SplitTangentVector, SplitTangentVector)],
) -> Result<PullbackResidual> {
    let z0 = tau(p, u)?;
    let n = p.len();
    let spec = ExponentialFamilySpec::categorical(n)?;
    let to_theta = |x: &[f64]| -> Vec<f64> { x[..n - 1].iter().map(|xi| xi - x[n - 1]).collect() };
    let theta: Vec<f64> = p[..n - 1].iter().map(|pi| (pi / p[n - 1]).ln()).collect();
    let point = TangentBundlePoint::new(&spec, theta, to_theta(u))?;
    let structure = kahler_structure_at(&spec, &point)?;
    let mut residual = PullbackResidual {
        metric: 0.0,
        symplectic: 0.0,
    };
    for (a, b) in pairs {
        for x in [a, b] {
            for part in [&x.horizontal, &x.vertical] {
                if part.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: part.len(),
                    });
                }
                let mean: f64 = p.iter().zip(part.iter()).map(|(p, v)| p * v).sum();
                if mean.abs() > 1e-10 {
                    return Err(Error::InvalidInput("tangent vectors need E_p(v) = 0".into()));
                }
            }
        }
        let xa = tau_pushforward(p, u, &a.horizontal, &a.vertical, &z0.homog);
        let xb = tau_pushforward(p, u, &b.horizontal, &b.vertical, &z0.homog);
        let h = inner(&xa, &xb);
        let ta = SplitTangentVector::new(to_theta(&a.horizontal), to_theta(&a.vertical));
        let tb = SplitTangentVector::new(to_theta(&b.horizontal), to_theta(&b.vertical));
        residual.metric = residual.metric.max((h.re - 0.25 * structure.metric(&ta, &tb)).abs());
        residual.symplectic = residual
            .symplectic
            .max((h.im - 0.25 * structure.symplectic(&ta, &tb)).abs());
    }
    Ok(residual)
}

/// Real symmetric embedding `[[Re A, -Im A], [Im A, Re A]]` of a Hermitian matrix;
/// each eigenvalue of `A` appears twice in it.
pub fn real_embedding(a: &CMatrix) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let c = a[(i, j)];
            m[(i, j)] = c.re;
            m[(i, j + n)] = -c.im;
            m[(i + n, j)] = c.im;
            m[(i + n, j + n)] = c.re;
        }
    }
    m
}
