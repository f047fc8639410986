//! Fisher metric, alpha-connections and their curvature.
//!
//! Christoffel symbols of the first kind are computed from their defining
//! expectation `E[(d_i d_j ln p + (1 - alpha)/2 d_i ln p d_j ln p) d_k ln p]`,
//! either in the natural chart or in the expectation chart. Curvature is
//! obtained from central differences of the symbols of the second kind.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::Result;
use crate::families::ExponentialFamilySpec;
use crate::linalg::{max_abs, spd_inverse};

/// Central-difference step used for derivatives of geometric quantities.
pub const FD_STEP: f64 = 1e-4;

/// Which affine chart a coordinate expression refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Natural,
    Expectation,
}

/// The Fisher metric at a point of a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    pub entries: DMatrix<f64>,
    pub chart: Chart,
}

impl MetricMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Deviation from symmetry.
    pub fn asymmetry(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.transpose()))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.entries.clone().cholesky().is_some()
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        spd_inverse(&self.entries)
    }
}

/// Christoffel symbols of the first kind `Gamma_{ij,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelTensor {
    n: usize,
    entries: Vec<f64>,
    pub alpha: f64,
    pub chart: Chart,
}

impl ChristoffelTensor {
    fn zeros(n: usize, alpha: f64, chart: Chart) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n * n],
            alpha,
            chart,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Gamma_{ij,k}`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Largest `|Gamma_{ij,k} - Gamma_{ji,k}|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Symbols of the second kind `Gamma^l_{ij} = h^{lk} Gamma_{ij,k}`, flattened as `[(i, j, l)]`.
    pub fn raised(&self, metric_inverse: &DMatrix<f64>) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    out[(i * n + j) * n + l] = (0..n).map(|k| metric_inverse[(l, k)] * self.get(i, j, k)).sum();
                }
            }
        }
        out
    }
}

/// Riemann curvature `R(d_i, d_j) d_k = sum_l R[i][j][k][l] d_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    entries: Vec<f64>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.entries[((i * n + j) * n + k) * n + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Components in another chart, given `d(old)/d(new)` and its inverse.
    pub fn change_chart(&self, old_by_new: &DMatrix<f64>, new_by_old: &DMatrix<f64>) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n.pow(4)];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = 0.0;
                        for i in 0..n {
                            for j in 0..n {
                                for k in 0..n {
                                    let w = old_by_new[(i, a)] * old_by_new[(j, b)] * old_by_new[(k, c)];
                                    if w == 0.0 {
                                        continue;
                                    }
                                    for l in 0..n {
                                        s += w * self.get(i, j, k, l) * new_by_old[(d, l)];
                                    }
                                }
                            }
                        }
                        entries[((a * n + b) * n + c) * n + d] = s;
                    }
                }
            }
        }
        Self { n, entries }
    }
}

/// Fisher metric `E[d_i ln p d_j ln p]` in the natural chart, by summation or quadrature.
pub fn fisher_metric(spec: &ExponentialFamilySpec, theta: &[f64]) -> Result<MetricMatrix> {
    let n = spec.dim();
    let eta = spec.natural_to_expectation(theta)?;
    let flat = spec.expect(theta, n * n, |_, f, out| {
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (f[i] - eta[i]) * (f[j] - eta[j]);
            }
        }
    })?;
    Ok(MetricMatrix {
        entries: DMatrix::from_row_slice(n, n, &flat),
        chart: Chart::Natural,
    })
}

/// Hessian of the log-partition function, the closed-form counterpart of [`fisher_metric`].
pub fn psi_hessian(spec: &ExponentialFamilySpec, theta: &[f64]) -> Result<MetricMatrix> {
    Ok(MetricMatrix {
        entries: spec.log_partition_hessian(theta)?,
        chart: Chart::Natural,
    })
}

/// Fisher metric in the expectation chart at `eta`: the inverse of the natural-chart metric.
pub fn fisher_metric_expectation(spec: &ExponentialFamilySpec, eta: &[f64]) -> Result<MetricMatrix> {
    let theta = spec.expectation_to_natural(eta)?;
    Ok(MetricMatrix {
        entries: fisher_metric(spec, &theta)?.inverse()?,
        chart: Chart::Expectation,
    })
}

/// Alpha-connection symbols `Gamma^{(alpha)}_{ij,k}` in the natural chart.
pub fn christoffel_alpha(spec: &ExponentialFamilySpec, theta: &[f64], alpha: f64) -> Result<ChristoffelTensor> {
    let n = spec.dim();
    let eta = spec.natural_to_expectation(theta)?;
    let hess = spec.log_partition_hessian(theta)?;
    let c = 0.5 * (1.0 - alpha);
    let flat = spec.expect(theta, n * n * n, |_, f, out| {
        for i in 0..n {
            let si = f[i] - eta[i];
            for j in 0..n {
                let second = -hess[(i, j)] + c * (si * (f[j] - eta[j]));
                for k in 0..n {
                    out[(i * n + j) * n + k] = second * (f[k] - eta[k]);
                }
            }
        }
    })?;
    Ok(ChristoffelTensor {
        n,
        entries: flat,
        alpha,
        chart: Chart::Natural,
    })
}

/// `d theta / d eta` at the natural point corresponding to `eta`.
fn theta_jacobian(spec: &ExponentialFamilySpec, eta: &[f64]) -> Result<DMatrix<f64>> {
    let theta = spec.expectation_to_natural(eta)?;
    spd_inverse(&spec.log_partition_hessian(&theta)?)
}

/// Alpha-connection symbols in the expectation chart at `eta`. The second
/// derivatives of `theta(eta)` are taken by central differences.
pub fn christoffel_alpha_expectation(
    spec: &ExponentialFamilySpec,
    eta: &[f64],
    alpha: f64,
) -> Result<ChristoffelTensor> {
    let n = spec.dim();
    let theta = spec.expectation_to_natural(eta)?;
    let d1 = theta_jacobian(spec, eta)?;
    // d2[b][(i, a)] = d^2 theta_i / d eta_a d eta_b
    let mut d2 = Vec::with_capacity(n);
    for b in 0..n {
        // Richardson-extrapolated central difference.
        let central = |h: f64| -> Result<DMatrix<f64>> {
            let mut up = eta.to_vec();
            up[b] += h;
            let mut down = eta.to_vec();
            down[b] -= h;
            Ok((theta_jacobian(spec, &up)? - theta_jacobian(spec, &down)?) / (2.0 * h))
        };
        let h = FD_STEP * eta[b].abs().max(1.0);
        d2.push((central(0.5 * h)? * 4.0 - central(h)?) / 3.0);
    }
    let c = 0.5 * (1.0 - alpha);
    let flat = spec.expect(&theta, n * n * n, |_, f, out| {
        let centered: Vec<f64> = f.iter().zip(eta).map(|(f, e)| f - e).collect();
        let score: Vec<f64> = (0..n).map(|a| (0..n).map(|i| d1[(i, a)] * centered[i]).sum()).collect();
        for a in 0..n {
            for b in 0..n {
                let second: f64 = (0..n).map(|i| d2[b][(i, a)] * centered[i]).sum::<f64>() - d1[(b, a)];
                let inner = second + c * (score[a] * score[b]);
                for k in 0..n {
                    out[(a * n + b) * n + k] = inner * score[k];
                }
            }
        }
    })?;
    let mut out = ChristoffelTensor::zeros(n, alpha, Chart::Expectation);
    out.entries = flat;
    Ok(out)
}

fn raised_christoffel(spec: &ExponentialFamilySpec, theta: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let inv = fisher_metric(spec, theta)?.inverse()?;
    Ok(christoffel_alpha(spec, theta, alpha)?.raised(&inv))
}

/// Curvature of the alpha-connection in the natural chart.
pub fn curvature_tensor(spec: &ExponentialFamilySpec, theta: &[f64], alpha: f64) -> Result<CurvatureTensor> {
    spec.check_interior(theta, FD_STEP)?;
    let n = spec.dim();
    let gamma = raised_christoffel(spec, theta, alpha)?;
    let g = |i: usize, j: usize, l: usize| gamma[(i * n + j) * n + l];
    // dgamma[m][(i, j, l)] = d_m Gamma^l_{ij}
    let mut dgamma = Vec::with_capacity(n);
    for m in 0..n {
        dgamma.push(richardson(theta, m, |t| raised_christoffel(spec, t, alpha))?);
    }
    let dg = |m: usize, i: usize, j: usize, l: usize| dgamma[m][(i * n + j) * n + l];
    let mut entries = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = dg(i, j, k, l) - dg(j, i, k, l);
                    for m in 0..n {
                        r += g(j, k, m) * g(i, m, l) - g(i, k, m) * g(j, m, l);
                    }
                    entries[((i * n + j) * n + k) * n + l] = r;
                }
            }
        }
    }
    Ok(CurvatureTensor { n, entries })
}

/// Central-difference derivatives `d_i h_{jk}` of the Fisher metric, flattened as `[(i, j, k)]`.
pub(crate) fn metric_derivatives(spec: &ExponentialFamilySpec, theta: &[f64]) -> Result<Vec<f64>> {
    spec.check_interior(theta, FD_STEP)?;
    let n = spec.dim();
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        let d = richardson(theta, i, |t| {
            Ok(fisher_metric(spec, t)?.entries.transpose().as_slice().to_vec())
        })?;
        out[i * n * n..(i + 1) * n * n].copy_from_slice(&d);
    }
    Ok(out)
}

/// Richardson-extrapolated central difference of a vector-valued function along `theta_m`.
fn richardson(theta: &[f64], m: usize, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let central = |h: f64| -> Result<Vec<f64>> {
        let mut up = theta.to_vec();
        up[m] += h;
        let mut down = theta.to_vec();
        down[m] -= h;
        Ok(f(&up)?
            .iter()
            .zip(&f(&down)?)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect())
    };
    let h = FD_STEP * theta[m].abs().max(1.0);
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect())
}

/// `max |d_i h_{jk} - Gamma^{(alpha)}_{ij,k} - Gamma^{(-alpha)}_{ik,j}|`.
pub fn duality_residual(spec: &ExponentialFamilySpec, theta: &[f64], alpha: f64) -> Result<f64> {
    let n = spec.dim();
    let dh = metric_derivatives(spec, theta)?;
    let g = christoffel_alpha(spec, theta, alpha)?;
    let gd = christoffel_alpha(spec, theta, -alpha)?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = dh[(i * n + j) * n + k] - g.get(i, j, k) - gd.get(i, k, j);
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// `max |h(theta) J^{-1} - I|` with `J = d eta / d theta` by extrapolated central differences.
pub fn cross_duality_residual(spec: &ExponentialFamilySpec, theta: &[f64]) -> Result<f64> {
    spec.check_interior(theta, FD_STEP)?;
    let n = spec.dim();
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let column = richardson(theta, j, |t| spec.natural_to_expectation(t))?;
        jac.set_column(j, &DVector::from_vec(column));
    }
    let jinv = jac.try_inverse().ok_or(crate::Error::NotPositiveDefinite)?;
    let product = fisher_metric(spec, theta)?.entries * jinv;
    Ok(max_abs(&(product - DMatrix::identity(n, n))))
}

/// `max |h(R(X,Y)Z, W) + h(R*(X,Y)W, Z)|` over coordinate fields, where `R*`
/// is the curvature of the dual connection `-alpha`.
pub fn skew_duality_residual(spec: &ExponentialFamilySpec, theta: &[f64], alpha: f64) -> Result<f64> {
    let n = spec.dim();
    let h = fisher_metric(spec, theta)?.entries;
    let r = curvature_tensor(spec, theta, alpha)?;
    let rd = curvature_tensor(spec, theta, -alpha)?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for w in 0..n {
                    let lhs: f64 = (0..n).map(|l| r.get(i, j, k, l) * h[(l, w)]).sum();
                    let rhs: f64 = (0..n).map(|l| rd.get(i, j, w, l) * h[(l, k)]).sum();
                    worst = worst.max((lhs + rhs).abs());
                }
            }
        }
    }
    Ok(worst)
}
