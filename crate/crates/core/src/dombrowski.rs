//! Kähler structure on the tangent bundle of an exponential family.
//!
//! Everything is expressed in the natural chart, which is affine for the
//! exponential connection, so the horizontal/vertical splitting of `T(TM)` is
//! the coordinate splitting `(d theta, d theta_dot)`. In that frame
//! `g = diag(h, h)`, `J(v, w) = (-w, v)` and `omega(a, b) = g(Ja, b)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::families::{ExponentialFamilySpec, NaturalPoint};
use crate::geometry::{fisher_metric, metric_derivatives, FD_STEP};
use crate::linalg::{max_abs, spd_inverse};

/// Least-squares residual above which a variable is not in `span{1, F}`.
pub const SPAN_TOL: f64 = 1e-9;

/// A point `(theta, theta_dot)` of the tangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBundlePoint {
    pub base: NaturalPoint,
    pub fiber: Vec<f64>,
}

impl TangentBundlePoint {
    pub fn new(spec: &ExponentialFamilySpec, base: Vec<f64>, fiber: Vec<f64>) -> Result<Self> {
        if !spec.in_domain(&base) {
            return Err(Error::OutsideDomain { point: base });
        }
        if fiber.len() != base.len() {
            return Err(Error::Dimension {
                expected: base.len(),
                got: fiber.len(),
            });
        }
        Ok(Self { base, fiber })
    }
}

/// A tangent vector to `TM` split into horizontal and vertical parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTangentVector {
    pub horizontal: Vec<f64>,
    pub vertical: Vec<f64>,
}

impl SplitTangentVector {
    pub fn new(horizontal: Vec<f64>, vertical: Vec<f64>) -> Self {
        assert_eq!(horizontal.len(), vertical.len(), "split parts must agree in dimension");
        Self { horizontal, vertical }
    }

    fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(
            2 * self.horizontal.len(),
            self.horizontal.iter().chain(&self.vertical).copied(),
        )
    }
}

/// Metric, symplectic form and complex structure at a point of `TM`, as
/// `2n x 2n` matrices in the (base, fiber) block basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentKahlerStructure {
    pub g: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    pub j: DMatrix<f64>,
}

impl TangentKahlerStructure {
    pub fn metric(&self, a: &SplitTangentVector, b: &SplitTangentVector) -> f64 {
        a.stacked().dot(&(&self.g * b.stacked()))
    }

    pub fn symplectic(&self, a: &SplitTangentVector, b: &SplitTangentVector) -> f64 {
        a.stacked().dot(&(&self.omega * b.stacked()))
    }

    /// `max |J^2 + I|`.
    pub fn j_squared_residual(&self) -> f64 {
        let n = self.j.nrows();
        max_abs(&(&self.j * &self.j + DMatrix::identity(n, n)))
    }

    /// `max |Omega - J^T G|`, i.e. how far `omega(a, b) = g(Ja, b)` is from holding.
    pub fn compatibility_residual(&self) -> f64 {
        max_abs(&(&self.omega - self.j.transpose() * &self.g))
    }

    /// `max |G - J^T G J|`.
    pub fn j_isometry_residual(&self) -> f64 {
        max_abs(&(&self.g - self.j.transpose() * &self.g * &self.j))
    }

    /// `max |Omega + Omega^T|`.
    pub fn omega_antisymmetry(&self) -> f64 {
        max_abs(&(&self.omega + self.omega.transpose()))
    }
}

/// The structure `(g, omega, J)` at `point`.
pub fn kahler_structure_at(spec: &ExponentialFamilySpec, point: &TangentBundlePoint) -> Result<TangentKahlerStructure> {
    let h = fisher_metric(spec, &point.base)?.entries;
    let n = h.nrows();
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&h);
    g.view_mut((n, n), (n, n)).copy_from(&h);
    omega.view_mut((0, n), (n, n)).copy_from(&h);
    omega.view_mut((n, 0), (n, n)).copy_from(&(-&h));
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    Ok(TangentKahlerStructure { g, omega, j })
}

/// `max |d_i h_jk - d_j h_ik|`; vanishes exactly when `d omega = 0`.
pub fn omega_closedness_residual(spec: &ExponentialFamilySpec, point: &TangentBundlePoint) -> Result<f64> {
    let n = spec.dim();
    let dh = metric_derivatives(spec, &point.base)?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..i {
            for k in 0..n {
                worst = worst.max((dh[(i * n + j) * n + k] - dh[(j * n + i) * n + k]).abs());
            }
        }
    }
    Ok(worst)
}

/// A random variable on the sample space, given either by its values on a
/// finite space or as an affine combination `a_0 + sum a_i F_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Values(Vec<f64>),
    Affine(Vec<f64>),
}

impl Observable {
    /// Evaluates the variable at a sample point.
    pub fn eval(&self, spec: &ExponentialFamilySpec, x: f64) -> f64 {
        match self {
            Observable::Values(v) => {
                let support = spec.support().expect("value observables need a finite space");
                let k = support
                    .iter()
                    .position(|&s| s == x)
                    .expect("sample point outside the support");
                v[k]
            }
            Observable::Affine(a) => a[0] + spec.statistics(x).iter().zip(&a[1..]).map(|(f, c)| f * c).sum::<f64>(),
        }
    }
}

/// Coefficients `(a_0, .., a_n)` with `X = a_0 + sum a_i F_i`, or a not-Kähler
/// error when the least-squares residual exceeds [`SPAN_TOL`].
pub fn affine_coefficients(spec: &ExponentialFamilySpec, x: &Observable) -> Result<Vec<f64>> {
    let n = spec.dim();
    match x {
        Observable::Affine(a) => {
            if a.len() != n + 1 {
                return Err(Error::Dimension {
                    expected: n + 1,
                    got: a.len(),
                });
            }
            Ok(a.clone())
        }
        Observable::Values(values) => {
            let support = spec
                .support()
                .ok_or_else(|| Error::InvalidInput("value observables need a finite sample space".into()))?;
            if values.len() != support.len() {
                return Err(Error::Dimension {
                    expected: support.len(),
                    got: values.len(),
                });
            }
            let mut design = DMatrix::zeros(support.len(), n + 1);
            for (r, &p) in support.iter().enumerate() {
                design[(r, 0)] = 1.0;
                for (c, f) in spec.statistics(p).into_iter().enumerate() {
                    design[(r, c + 1)] = f;
                }
            }
            let rhs = DVector::from_column_slice(values);
            let coef = design
                .clone()
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let residual = (design * &coef - &rhs).amax();
            let scale = rhs.amax().max(1.0);
            if residual > SPAN_TOL * scale {
                return Err(Error::NotKahler { residual });
            }
            Ok(coef.iter().copied().collect())
        }
    }
}

/// Fisher gradient of `theta -> E_theta(X)` in the natural frame, computed from
/// the identity `d_i E(X) = Cov(X, F_i)`. Valid for any integrable `X`.
pub fn expectation_gradient(spec: &ExponentialFamilySpec, theta: &[f64], x: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let n = spec.dim();
    let eta = spec.natural_to_expectation(theta)?;
    // Any shift of X leaves the covariance unchanged; shifting by a sample value
    // makes constants give an exactly zero gradient.
    let shift = x(spec.support().map_or(0.0, |s| s[0]));
    let cov = spec.expect(theta, n, |p, f, out| {
        let d = x(p) - shift;
        for i in 0..n {
            out[i] = d * (f[i] - eta[i]);
        }
    })?;
    let hinv = spd_inverse(&fisher_metric(spec, theta)?.entries)?;
    Ok((hinv * DVector::from_vec(cov)).iter().copied().collect())
}

/// Gradient of the Kähler function `E(X)` for `X` in `span{1, F}`.
pub fn kahler_gradient_field(spec: &ExponentialFamilySpec, x: &Observable, theta: &[f64]) -> Result<Vec<f64>> {
    affine_coefficients(spec, x)?;
    expectation_gradient(spec, theta, |p| x.eval(spec, p))
}

/// The Hamiltonian vector field of `E(X) o pi` at a point, in the split frame.
pub fn hamiltonian_vector(
    spec: &ExponentialFamilySpec,
    x: &Observable,
    point: &TangentBundlePoint,
) -> Result<SplitTangentVector> {
    let grad = kahler_gradient_field(spec, x, &point.base)?;
    Ok(SplitTangentVector::new(
        vec![0.0; grad.len()],
        grad.iter().map(|g| -g).collect(),
    ))
}

/// Poisson bracket `omega(X_f, X_g)` of two Kähler functions.
pub fn poisson_bracket(
    spec: &ExponentialFamilySpec,
    f: &Observable,
    g: &Observable,
    point: &TangentBundlePoint,
) -> Result<f64> {
    let s = kahler_structure_at(spec, point)?;
    Ok(s.symplectic(
        &hamiltonian_vector(spec, f, point)?,
        &hamiltonian_vector(spec, g, point)?,
    ))
}

/// Time-`t` Hamiltonian flow: the fiber moves by `-t grad`, the base is fixed.
pub fn hamiltonian_flow_step(
    spec: &ExponentialFamilySpec,
    x: &Observable,
    point: &TangentBundlePoint,
    t: f64,
) -> Result<TangentBundlePoint> {
    let grad = kahler_gradient_field(spec, x, &point.base)?;
    Ok(TangentBundlePoint {
        base: point.base.clone(),
        fiber: point.fiber.iter().zip(&grad).map(|(u, g)| u - t * g).collect(),
    })
}

/// `max |dPhi^T G dPhi - G|` for the fiber-translation map generated by `E(X)`,
/// where `dPhi = [[I, 0], [-t d(grad)/d theta, I]]`. The variable need not be
/// Kähler; for variables outside `span{1, F}` the residual is generically nonzero.
pub fn flow_isometry_residual(
    spec: &ExponentialFamilySpec,
    x: impl Fn(f64) -> f64,
    point: &TangentBundlePoint,
    t: f64,
) -> Result<f64> {
    let theta = &point.base;
    spec.check_interior(theta, FD_STEP)?;
    let n = spec.dim();
    let mut dgrad = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = FD_STEP * theta[j].abs().max(1.0);
        let mut up = theta.clone();
        up[j] += h;
        let mut down = theta.clone();
        down[j] -= h;
        let gu = expectation_gradient(spec, &up, &x)?;
        let gd = expectation_gradient(spec, &down, &x)?;
        for i in 0..n {
            dgrad[(i, j)] = (gu[i] - gd[i]) / (2.0 * h);
        }
    }
    let mut dphi = DMatrix::identity(2 * n, 2 * n);
    dphi.view_mut((n, 0), (n, n)).copy_from(&(-t * dgrad));
    let grad = expectation_gradient(spec, theta, &x)?;
    let flowed = TangentBundlePoint {
        base: theta.clone(),
        fiber: point.fiber.iter().zip(&grad).map(|(u, g)| u - t * g).collect(),
    };
    let g_here = kahler_structure_at(spec, point)?.g;
    let g_there = kahler_structure_at(spec, &flowed)?.g;
    Ok(max_abs(&(dphi.transpose() * g_there * &dphi - g_here)))
}
