//! Exponential families `p(x; theta) = exp{C(x) + sum theta_i F_i(x) - psi(theta)}`
//! with their natural (`theta`) and expectation (`eta`) charts.

mod spec_file;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg;
use crate::quadrature::gauss_hermite;

/// Coordinates in the natural chart.
pub type NaturalPoint = Vec<f64>;
/// Coordinates in the expectation chart.
pub type ExpectationPoint = Vec<f64>;

/// Default Gauss–Hermite order for real-line families.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

const QUADRATURE_TOL: f64 = 1e-9;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 100;

/// The sample space together with its reference measure.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasuredSpace {
    /// Counting measure on finitely many labelled real points.
    Finite { labels: Vec<String>, values: Vec<f64> },
    /// Lebesgue measure on the real line.
    RealLine { quadrature_order: usize },
}

#[derive(Debug, Clone)]
enum Model {
    Categorical,
    Binomial(usize),
    Normal,
    NormalFixedSigma,
    Custom(Box<CustomModel>),
}

#[derive(Debug, Clone)]
struct CustomModel {
    carrier: Expr,
    statistics: Vec<Expr>,
    psi: Expr,
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
}

/// An exponential family: sample space, sufficient statistics, carrier,
/// log-partition function and natural-parameter domain.
#[derive(Debug, Clone)]
pub struct ExponentialFamilySpec {
    name: String,
    space: MeasuredSpace,
    dim: usize,
    model: Model,
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

impl ExponentialFamilySpec {
    /// Looks up `categorical:N`, `binomial:N`, `normal` or `normal_fixed_sigma`.
    pub fn builtin(name: &str) -> Result<Self> {
        let parse_n = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad size in family name '{name}'")))
        };
        match name.split_once(':') {
            Some(("categorical", n)) => Self::categorical(parse_n(n)?),
            Some(("binomial", n)) => Self::binomial(parse_n(n)?),
            None if name == "normal" => Ok(Self::normal()),
            None if name == "normal_fixed_sigma" => Ok(Self::normal_fixed_sigma()),
            _ => Err(Error::InvalidInput(format!("unknown family '{name}'"))),
        }
    }

    /// Names of the builtin families used by tests and suites.
    pub fn builtin_names() -> &'static [&'static str] {
        &[
            "categorical:2",
            "categorical:3",
            "categorical:4",
            "binomial:1",
            "binomial:2",
            "binomial:3",
            "binomial:10",
            "normal",
            "normal_fixed_sigma",
        ]
    }

    /// All points `x_1..x_n` with `theta_i` attached to `x_i` and `x_n` as reference.
    pub fn categorical(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("categorical family needs n >= 2".into()));
        }
        Ok(Self {
            name: format!("categorical:{n}"),
            space: MeasuredSpace::Finite {
                labels: (1..=n).map(|i| format!("x{i}")).collect(),
                values: (1..=n).map(|i| i as f64).collect(),
            },
            dim: n - 1,
            model: Model::Categorical,
        })
    }

    /// Number of successes in `n` trials, `theta = ln(q / (1 - q))`.
    pub fn binomial(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("binomial family needs n >= 1".into()));
        }
        Ok(Self {
            name: format!("binomial:{n}"),
            space: MeasuredSpace::Finite {
                labels: (0..=n).map(|k| k.to_string()).collect(),
                values: (0..=n).map(|k| k as f64).collect(),
            },
            dim: 1,
            model: Model::Binomial(n),
        })
    }

    /// `N(mu, sigma^2)` with `theta = (mu / sigma^2, -1 / (2 sigma^2))`.
    pub fn normal() -> Self {
        Self {
            name: "normal".into(),
            space: MeasuredSpace::RealLine {
                quadrature_order: DEFAULT_QUADRATURE_ORDER,
            },
            dim: 2,
            model: Model::Normal,
        }
    }

    /// `N(mu, 1)` with `theta = mu`.
    pub fn normal_fixed_sigma() -> Self {
        Self {
            name: "normal_fixed_sigma".into(),
            space: MeasuredSpace::RealLine {
                quadrature_order: DEFAULT_QUADRATURE_ORDER,
            },
            dim: 1,
            model: Model::NormalFixedSigma,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> &MeasuredSpace {
        &self.space
    }

    /// Point values of a finite sample space.
    pub fn support(&self) -> Option<&[f64]> {
        match &self.space {
            MeasuredSpace::Finite { values, .. } => Some(values),
            MeasuredSpace::RealLine { .. } => None,
        }
    }

    /// Binomial trial count, if this is a binomial family.
    pub fn binomial_trials(&self) -> Option<usize> {
        match self.model {
            Model::Binomial(n) => Some(n),
            _ => None,
        }
    }

    /// Whether the sample space is `{x_1..x_n}` with the categorical statistics.
    pub fn is_categorical(&self) -> bool {
        matches!(self.model, Model::Categorical)
    }

    /// Human-readable description of the natural-parameter domain.
    pub fn domain_description(&self) -> String {
        match &self.model {
            Model::Categorical | Model::Binomial(_) | Model::NormalFixedSigma => {
                format!("R^{}", self.dim)
            }
            Model::Normal => "R x (-inf, 0)".into(),
            Model::Custom(m) => m
                .lower
                .iter()
                .zip(&m.upper)
                .map(|(lo, hi)| {
                    let lo = lo.map_or("-inf".to_string(), |v| v.to_string());
                    let hi = hi.map_or("inf".to_string(), |v| v.to_string());
                    format!("({lo}, {hi})")
                })
                .collect::<Vec<_>>()
                .join(" x "),
        }
    }

    /// Human-readable description of the expectation-parameter domain.
    pub fn expectation_domain_description(&self) -> String {
        match &self.model {
            Model::Categorical => format!("{{eta in R^{}: eta_i > 0, sum eta_i < 1}}", self.dim),
            Model::Binomial(n) => format!("(0, {n})"),
            Model::Normal => "{(eta1, eta2): eta2 > eta1^2}".into(),
            Model::NormalFixedSigma => "R".into(),
            Model::Custom(_) => "image of grad psi".into(),
        }
    }

    fn check_dim(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// Euclidean distance from `theta` to the boundary of the domain
    /// (infinite for unbounded directions).
    pub fn boundary_distance(&self, theta: &[f64]) -> f64 {
        match &self.model {
            Model::Normal => -theta[1],
            Model::Custom(m) => {
                let mut d = f64::INFINITY;
                for (i, &t) in theta.iter().enumerate() {
                    if let Some(lo) = m.lower[i] {
                        d = d.min(t - lo);
                    }
                    if let Some(hi) = m.upper[i] {
                        d = d.min(hi - t);
                    }
                }
                d
            }
            _ => f64::INFINITY,
        }
    }

    pub fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim && theta.iter().all(|t| t.is_finite()) && self.boundary_distance(theta) > 0.0
    }

    fn check_domain(&self, theta: &[f64]) -> Result<()> {
        self.check_dim(theta)?;
        if !self.in_domain(theta) {
            return Err(Error::OutsideDomain { point: theta.to_vec() });
        }
        Ok(())
    }

    /// Errors unless a stencil of half-width `step` around `theta` fits in the domain.
    pub fn check_interior(&self, theta: &[f64], step: f64) -> Result<()> {
        self.check_domain(theta)?;
        let distance = self.boundary_distance(theta);
        let required = 2.0 * step * theta.iter().fold(1.0_f64, |a, t| a.max(t.abs()));
        if distance <= required {
            return Err(Error::BoundaryProximity { distance, required });
        }
        Ok(())
    }

    /// A fixed interior point of the domain.
    pub fn default_theta(&self) -> NaturalPoint {
        match &self.model {
            Model::Normal => vec![0.0, -0.5],
            Model::Custom(m) => m
                .lower
                .iter()
                .zip(&m.upper)
                .map(|(lo, hi)| match (lo, hi) {
                    (Some(a), Some(b)) => 0.5 * (a + b),
                    (Some(a), None) => a + 1.0,
                    (None, Some(b)) => b - 1.0,
                    (None, None) => 0.0,
                })
                .collect(),
            _ => vec![0.0; self.dim],
        }
    }

    fn finite_index(&self, x: f64) -> Result<usize> {
        match &self.space {
            MeasuredSpace::Finite { values, .. } => values
                .iter()
                .position(|&v| (v - x).abs() <= 1e-12 * v.abs().max(1.0))
                .ok_or(Error::NotInSupport { value: x }),
            MeasuredSpace::RealLine { .. } => Ok(0),
        }
    }

    /// Carrier term `C(x)`.
    pub fn carrier(&self, x: f64) -> f64 {
        match &self.model {
            Model::Categorical => 0.0,
            Model::Binomial(n) => ln_binomial(*n, x.round() as usize),
            Model::Normal => 0.0,
            Model::NormalFixedSigma => -0.5 * x * x,
            Model::Custom(m) => m.carrier.eval(&[x]),
        }
    }

    /// Sufficient statistics `(F_1(x), .., F_n(x))`.
    pub fn statistics(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.statistics_into(x, &mut out);
        out
    }

    fn statistics_into(&self, x: f64, out: &mut [f64]) {
        match &self.model {
            Model::Categorical => {
                out.iter_mut().for_each(|v| *v = 0.0);
                let k = x.round() as usize;
                if k >= 1 && k <= self.dim {
                    out[k - 1] = 1.0;
                }
            }
            Model::Binomial(_) | Model::NormalFixedSigma => out[0] = x,
            Model::Normal => {
                out[0] = x;
                out[1] = x * x;
            }
            Model::Custom(m) => {
                for (o, f) in out.iter_mut().zip(&m.statistics) {
                    *o = f.eval(&[x]);
                }
            }
        }
    }

    /// Log-partition function `psi(theta)`.
    pub fn log_partition(&self, theta: &[f64]) -> Result<f64> {
        self.check_domain(theta)?;
        Ok(self.psi_unchecked(theta))
    }

    fn psi_unchecked(&self, theta: &[f64]) -> f64 {
        match &self.model {
            Model::Categorical => {
                let m = theta.iter().fold(0.0_f64, |a, &b| a.max(b));
                m + ((-m).exp() + theta.iter().map(|t| (t - m).exp()).sum::<f64>()).ln()
            }
            Model::Binomial(n) => *n as f64 * softplus(theta[0]),
            Model::Normal => {
                let (t1, t2) = (theta[0], theta[1]);
                -t1 * t1 / (4.0 * t2) + 0.5 * (-std::f64::consts::PI / t2).ln()
            }
            Model::NormalFixedSigma => 0.5 * theta[0] * theta[0] + 0.5 * (2.0 * std::f64::consts::PI).ln(),
            Model::Custom(m) => {
                if theta.len() == 1 {
                    m.psi.eval(&[theta[0], theta[0]])
                } else {
                    m.psi.eval(theta)
                }
            }
        }
    }

    /// `ln p(x; theta)`.
    pub fn log_density(&self, theta: &[f64], x: f64) -> Result<f64> {
        self.check_domain(theta)?;
        self.finite_index(x)?;
        Ok(self.log_density_unchecked(theta, x, self.psi_unchecked(theta)))
    }

    fn log_density_unchecked(&self, theta: &[f64], x: f64, psi: f64) -> f64 {
        let f = self.statistics(x);
        self.carrier(x) + theta.iter().zip(&f).map(|(t, f)| t * f).sum::<f64>() - psi
    }

    /// Density `p(x; theta)` with respect to the reference measure.
    pub fn density(&self, theta: &[f64], x: f64) -> Result<f64> {
        self.log_density(theta, x).map(f64::exp)
    }

    fn closed_gradient(&self, theta: &[f64]) -> Option<Vec<f64>> {
        match &self.model {
            Model::Categorical => {
                let m = theta.iter().fold(0.0_f64, |a, &b| a.max(b));
                let e: Vec<f64> = theta.iter().map(|t| (t - m).exp()).collect();
                let z = (-m).exp() + e.iter().sum::<f64>();
                Some(e.iter().map(|v| v / z).collect())
            }
            Model::Binomial(n) => Some(vec![*n as f64 * sigmoid(theta[0])]),
            Model::Normal => {
                let (t1, t2) = (theta[0], theta[1]);
                Some(vec![-t1 / (2.0 * t2), t1 * t1 / (4.0 * t2 * t2) - 1.0 / (2.0 * t2)])
            }
            Model::NormalFixedSigma => Some(vec![theta[0]]),
            Model::Custom(_) => None,
        }
    }

    fn closed_hessian(&self, theta: &[f64]) -> Option<DMatrix<f64>> {
        match &self.model {
            Model::Categorical => {
                let eta = DVector::from_vec(self.closed_gradient(theta)?);
                Some(DMatrix::from_diagonal(&eta) - &eta * eta.transpose())
            }
            Model::Binomial(n) => {
                let s = sigmoid(theta[0]);
                Some(DMatrix::from_element(1, 1, *n as f64 * s * (1.0 - s)))
            }
            Model::Normal => {
                let (t1, t2) = (theta[0], theta[1]);
                let off = t1 / (2.0 * t2 * t2);
                Some(DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        -1.0 / (2.0 * t2),
                        off,
                        off,
                        -t1 * t1 / (2.0 * t2.powi(3)) + 1.0 / (2.0 * t2 * t2),
                    ],
                ))
            }
            Model::NormalFixedSigma => Some(DMatrix::from_element(1, 1, 1.0)),
            Model::Custom(_) => None,
        }
    }

    /// Whether `psi` has closed-form derivatives (otherwise finite differences are used).
    pub fn has_closed_form(&self) -> bool {
        !matches!(self.model, Model::Custom(_))
    }

    /// `eta = grad psi(theta)`.
    pub fn natural_to_expectation(&self, theta: &[f64]) -> Result<ExpectationPoint> {
        self.check_domain(theta)?;
        if let Some(g) = self.closed_gradient(theta) {
            return Ok(g);
        }
        let steps: Vec<f64> = theta.iter().map(|t| 1e-5 * t.abs().max(1.0)).collect();
        let reach = steps.iter().fold(0.0_f64, |a, &b| a.max(b));
        if self.boundary_distance(theta) <= reach {
            return Err(Error::BoundaryProximity {
                distance: self.boundary_distance(theta),
                required: reach,
            });
        }
        let mut t = theta.to_vec();
        Ok((0..self.dim)
            .map(|i| {
                t[i] = theta[i] + steps[i];
                let up = self.psi_unchecked(&t);
                t[i] = theta[i] - steps[i];
                let down = self.psi_unchecked(&t);
                t[i] = theta[i];
                (up - down) / (2.0 * steps[i])
            })
            .collect())
    }

    /// Hessian of `psi` at `theta`.
    pub fn log_partition_hessian(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        self.check_domain(theta)?;
        if let Some(h) = self.closed_hessian(theta) {
            return Ok((&h + h.transpose()) * 0.5);
        }
        let steps: Vec<f64> = theta.iter().map(|t| 1e-4 * t.abs().max(1.0)).collect();
        self.check_interior(theta, 1e-4)?;
        let f = |t: &[f64]| self.psi_unchecked(t);
        let n = self.dim;
        let mut h = DMatrix::zeros(n, n);
        let mut t = theta.to_vec();
        let center = f(theta);
        for i in 0..n {
            t[i] = theta[i] + steps[i];
            let up = f(&t);
            t[i] = theta[i] - steps[i];
            let down = f(&t);
            t[i] = theta[i];
            h[(i, i)] = (up - 2.0 * center + down) / (steps[i] * steps[i]);
            for j in 0..i {
                let mut corner = |si: f64, sj: f64| {
                    t[i] = theta[i] + si * steps[i];
                    t[j] = theta[j] + sj * steps[j];
                    let v = f(&t);
                    t[i] = theta[i];
                    t[j] = theta[j];
                    v
                };
                let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                    / (4.0 * steps[i] * steps[j]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(h)
    }

    /// Inverse of [`Self::natural_to_expectation`] by damped Newton iteration.
    pub fn expectation_to_natural(&self, eta: &[f64]) -> Result<NaturalPoint> {
        self.check_dim(eta)?;
        let target = DVector::from_column_slice(eta);
        let residual_at = |theta: &[f64]| -> Result<(DVector<f64>, f64)> {
            let r = target.clone() - DVector::from_vec(self.natural_to_expectation(theta)?);
            let norm = r.norm();
            Ok((r, norm))
        };
        let tol = NEWTON_TOL * target.norm().max(1.0);
        let mut theta = self.default_theta();
        let (mut r, mut norm) = residual_at(&theta)?;
        for _ in 0..NEWTON_MAX_ITER {
            if norm <= tol {
                return Ok(theta);
            }
            let hess = self.log_partition_hessian(&theta)?;
            let Some(step) = hess.lu().solve(&r) else {
                break;
            };
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + lambda * s).collect();
                if self.in_domain(&trial) {
                    if let Ok((r_new, n_new)) = residual_at(&trial) {
                        if n_new < norm {
                            accepted = Some((trial, r_new, n_new));
                            break;
                        }
                    }
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((t, r_new, n_new)) => {
                    theta = t;
                    r = r_new;
                    norm = n_new;
                }
                None => break,
            }
        }
        // Finite-difference gradients cannot reach the closed-form tolerance.
        if norm <= tol || (!self.has_closed_form() && norm <= 1e-8 * target.norm().max(1.0)) {
            return Ok(theta);
        }
        Err(Error::NoConvergence {
            what: "expectation-to-natural Newton iteration",
            residual: norm,
        })
    }

    /// Frame (mean, standard deviation) used to standardize real-line quadrature.
    fn quadrature_frame(&self, theta: &[f64], order: usize) -> Result<(f64, f64)> {
        match &self.model {
            Model::Normal => Ok((-theta[0] / (2.0 * theta[1]), (-0.5 / theta[1]).sqrt())),
            Model::NormalFixedSigma => Ok((theta[0], 1.0)),
            _ => {
                let psi = self.psi_unchecked(theta);
                let rule = gauss_hermite(order);
                let (mut mean, mut sd) = (0.0, 1.0);
                for _ in 0..50 {
                    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
                    for (x, t, w) in rule.line_points(mean, sd) {
                        let p = w * (self.log_density_unchecked(theta, x, psi) + t * t).exp();
                        z += p;
                        m1 += p * x;
                        m2 += p * x * x;
                    }
                    if !(z.is_finite() && z > 0.0) {
                        return Err(Error::Quadrature {
                            order,
                            doubled: 2 * order,
                            low: z,
                            high: f64::NAN,
                        });
                    }
                    let new_mean = m1 / z;
                    let new_sd = (m2 / z - new_mean * new_mean).max(1e-300).sqrt();
                    let done = (new_mean - mean).abs() <= 1e-12 * new_sd && (new_sd / sd - 1.0).abs() <= 1e-12;
                    mean = new_mean;
                    sd = new_sd;
                    if done {
                        break;
                    }
                }
                Ok((mean, sd))
            }
        }
    }

    /// Sample points with their probability weights at a given quadrature order.
    fn weighted_points(&self, theta: &[f64], order: usize) -> Result<Vec<(f64, f64)>> {
        let psi = self.psi_unchecked(theta);
        match &self.space {
            MeasuredSpace::Finite { values, .. } => Ok(values
                .iter()
                .map(|&x| (x, self.log_density_unchecked(theta, x, psi).exp()))
                .collect()),
            MeasuredSpace::RealLine { .. } => {
                let (mean, sd) = self.quadrature_frame(theta, order)?;
                Ok(gauss_hermite(order)
                    .line_points(mean, sd)
                    .map(|(x, t, w)| (x, w * (self.log_density_unchecked(theta, x, psi) + t * t).exp()))
                    .collect())
            }
        }
    }

    /// `E_theta[g]` for a vector-valued integrand of length `width`. The integrand
    /// receives the sample point and its sufficient statistics. On the real line
    /// the result is accepted only if doubling the quadrature order agrees.
    pub fn expect(&self, theta: &[f64], width: usize, g: impl Fn(f64, &[f64], &mut [f64])) -> Result<Vec<f64>> {
        self.check_domain(theta)?;
        let run = |order: usize| -> Result<Vec<f64>> {
            let mut acc = vec![0.0; width];
            let mut buf = vec![0.0; width];
            let mut stats = vec![0.0; self.dim];
            for (x, w) in self.weighted_points(theta, order)? {
                self.statistics_into(x, &mut stats);
                buf.iter_mut().for_each(|b| *b = 0.0);
                g(x, &stats, &mut buf);
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += w * b;
                }
            }
            Ok(acc)
        };
        match self.space {
            MeasuredSpace::Finite { .. } => run(0),
            MeasuredSpace::RealLine { quadrature_order } => {
                let low = run(quadrature_order)?;
                let high = run(2 * quadrature_order)?;
                for (l, h) in low.iter().zip(&high) {
                    if l.is_nan() || h.is_nan() || (l - h).abs() > QUADRATURE_TOL * h.abs().max(1.0) {
                        return Err(Error::Quadrature {
                            order: quadrature_order,
                            doubled: 2 * quadrature_order,
                            low: *l,
                            high: *h,
                        });
                    }
                }
                Ok(high)
            }
        }
    }

    /// Total mass of the density (1 for a correctly normalized family).
    pub fn normalization(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.expect(theta, 1, |_, _, out| out[0] = 1.0)?[0])
    }

    /// `E_theta[F]` by summation or quadrature.
    pub fn expectation_by_integration(&self, theta: &[f64]) -> Result<ExpectationPoint> {
        self.expect(theta, self.dim, |_, f, out| out.copy_from_slice(f))
    }

    /// Mean and variance of a random variable under `p_theta`.
    pub fn mean_and_variance(&self, theta: &[f64], x: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let mean = self.expect(theta, 1, |p, _, out| out[0] = x(p))?[0];
        let var = self.expect(theta, 1, |p, _, out| out[0] = (x(p) - mean).powi(2))?[0];
        Ok((mean, var.max(0.0)))
    }

    /// Rank of the evaluation matrix of `(1, F_1, .., F_n)`; errors unless it is `n + 1`.
    pub fn rank_check(&self) -> Result<usize> {
        let points: Vec<f64> = match &self.space {
            MeasuredSpace::Finite { values, .. } => values.clone(),
            MeasuredSpace::RealLine { .. } => {
                let m = 2 * self.dim + 3;
                (0..m).map(|i| -2.0 + 4.0 * i as f64 / (m - 1) as f64).collect()
            }
        };
        let mut a = DMatrix::zeros(points.len(), self.dim + 1);
        for (r, &x) in points.iter().enumerate() {
            a[(r, 0)] = 1.0;
            for (c, f) in self.statistics(x).into_iter().enumerate() {
                a[(r, c + 1)] = f;
            }
        }
        let rank = linalg::rank(&a, 1e-10);
        if rank != self.dim + 1 {
            return Err(Error::Spec(format!(
                "statistics are not affinely independent: rank {rank}, expected {}",
                self.dim + 1
            )));
        }
        Ok(rank)
    }
}
