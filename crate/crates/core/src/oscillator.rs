//! The normal family with unit variance, its Kählerification `C`, and the
//! harmonic-oscillator quantization of Kähler functions on the plane.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, CMatrix, CVector, C64};
use crate::quadrature::gauss_hermite;

/// Gauss–Hermite order for coherent-state integrals; doubled once as a convergence gate.
pub const EXPECTATION_ORDER: usize = 96;
pub const EXPECTATION_TOL: f64 = 1e-9;
/// Default truncation of the Hermite-basis matrix.
pub const DEFAULT_TRUNCATION: usize = 64;
const FD_STEP: f64 = 1e-5;

/// `z = x + i y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// `f = c1 + cx x + cy y + cr (x^2 + y^2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PlaneKahlerFunction {
    pub c1: f64,
    pub cx: f64,
    pub cy: f64,
    pub cr: f64,
}

impl PlaneKahlerFunction {
    pub const fn new(c1: f64, cx: f64, cy: f64, cr: f64) -> Self {
        Self { c1, cx, cy, cr }
    }

    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const X: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const R: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub fn eval(&self, z: PlanePoint) -> f64 {
        self.c1 + self.cx * z.x + self.cy * z.y + self.cr * 0.5 * (z.x * z.x + z.y * z.y)
    }
}

/// Bracket from the table `{x,y} = 1`, `{x,r} = y`, `{y,r} = -x`, `{1,.} = 0`.
pub fn plane_bracket(f: PlaneKahlerFunction, g: PlaneKahlerFunction) -> PlaneKahlerFunction {
    PlaneKahlerFunction {
        c1: f.cx * g.cy - f.cy * g.cx,
        cx: f.cr * g.cy - f.cy * g.cr,
        cy: f.cx * g.cr - f.cr * g.cx,
        cr: 0.0,
    }
}

/// `f_x g_y - f_y g_x` by central differences (flat structure `dx ^ dy`).
pub fn plane_bracket_fd(f: &dyn Fn(PlanePoint) -> f64, g: &dyn Fn(PlanePoint) -> f64, z: PlanePoint) -> f64 {
    let h = FD_STEP;
    let grad = |func: &dyn Fn(PlanePoint) -> f64| {
        (
            (func(PlanePoint::new(z.x + h, z.y)) - func(PlanePoint::new(z.x - h, z.y))) / (2.0 * h),
            (func(PlanePoint::new(z.x, z.y + h)) - func(PlanePoint::new(z.x, z.y - h))) / (2.0 * h),
        )
    };
    let (fx, fy) = grad(f);
    let (gx, gy) = grad(g);
    fx * gy - fy * gx
}

/// Outcome law of a linear Kähler function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaussianLaw {
    /// Spectrum `R`, normal density.
    Continuous { mean: f64, variance: f64 },
    /// Spectrum `{value}`.
    Dirac { value: f64 },
}

impl GaussianLaw {
    /// Density for the continuous case; `None` for a point mass.
    pub fn density(&self, xi: f64) -> Option<f64> {
        match *self {
            GaussianLaw::Continuous { mean, variance } => {
                Some((-(xi - mean).powi(2) / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt())
            }
            GaussianLaw::Dirac { .. } => None,
        }
    }
}

pub fn gaussian_spectrum_probability(f: PlaneKahlerFunction, z: PlanePoint) -> Result<GaussianLaw> {
    if f.cr != 0.0 {
        return Err(Error::NotDecomposable);
    }
    let variance = f.cx * f.cx + f.cy * f.cy;
    Ok(if variance == 0.0 {
        GaussianLaw::Dirac { value: f.c1 }
    } else {
        GaussianLaw::Continuous {
            mean: f.eval(z),
            variance,
        }
    })
}

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
    }
    Ok(())
}

/// `Psi(z)(xi)` together with its first and second derivatives in `xi`.
fn coherent_jet(hbar: f64, z: PlanePoint, xi: f64) -> [C64; 3] {
    let amplitude = (-(xi - z.x).powi(2) / 4.0).exp() / (2.0 * std::f64::consts::PI).powf(0.25);
    let psi = C64::from_polar(amplitude, -z.y * xi / hbar);
    let log_derivative = C64::new(-(xi - z.x) / 2.0, -z.y / hbar);
    let d1 = psi * log_derivative;
    let d2 = psi * (log_derivative * log_derivative - 0.5);
    [psi, d1, d2]
}

/// `Psi(z)(xi) = (2 pi)^(-1/4) exp(-(xi - x)^2 / 4) exp(-i y xi / hbar)`.
pub fn coherent_state(hbar: f64, z: PlanePoint, xi: f64) -> Result<C64> {
    check_hbar(hbar)?;
    Ok(coherent_jet(hbar, z, xi)[0])
}

/// `(Q(f) Psi)(xi)` from the analytic derivatives of `Psi`.
fn apply_q(hbar: f64, f: PlaneKahlerFunction, z: PlanePoint, xi: f64) -> (C64, C64) {
    let [psi, d1, d2] = coherent_jet(hbar, z, xi);
    let i_hbar = C64::new(0.0, hbar);
    let oscillator = d2 * (-0.5 * hbar * hbar) + psi * (0.5 * xi * xi - (hbar * hbar / 8.0 + 0.5));
    let q_psi = psi * (f.c1 + f.cx * xi) + i_hbar * d1 * f.cy + oscillator * f.cr;
    (psi, q_psi)
}

fn integrate_line(order: usize, mean: f64, integrand: impl Fn(f64) -> C64) -> C64 {
    gauss_hermite(order)
        .line_points(mean, 1.0)
        .map(|(xi, t, w)| integrand(xi) * (w * (t * t).exp()))
        .sum()
}

/// `<Psi(z), Q(f) Psi(z)>` by Gauss–Hermite quadrature, with an order-doubling gate.
pub fn oscillator_expectation(hbar: f64, f: PlaneKahlerFunction, z: PlanePoint) -> Result<f64> {
    check_hbar(hbar)?;
    let integrand = |xi: f64| {
        let (psi, q_psi) = apply_q(hbar, f, z, xi);
        psi.conj() * q_psi
    };
    let low = integrate_line(EXPECTATION_ORDER, z.x, integrand);
    let high = integrate_line(2 * EXPECTATION_ORDER, z.x, integrand);
    if (high - low).norm() > EXPECTATION_TOL * high.norm().max(1.0) {
        return Err(Error::Quadrature {
            order: EXPECTATION_ORDER,
            doubled: 2 * EXPECTATION_ORDER,
            low: low.re,
            high: high.re,
        });
    }
    Ok(high.re)
}

/// `|f(z) - <Psi(z), Q(f) Psi(z)>|`.
pub fn oscillator_expectation_residual(hbar: f64, f: PlaneKahlerFunction, z: PlanePoint) -> Result<f64> {
    Ok((f.eval(z) - oscillator_expectation(hbar, f, z)?).abs())
}

/// `∫ |Psi(z)|^2` by the same quadrature.
pub fn coherent_norm_sq(hbar: f64, z: PlanePoint) -> Result<f64> {
    oscillator_expectation(hbar, PlaneKahlerFunction::ONE, z)
}

/// Truncated matrix of `Q(f)` in the Hermite functions `phi_k` with
/// `phi_0 = Psi(0)`. The `y` generator `i hbar d/dxi` makes it complex Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorOperator {
    pub hbar: f64,
    pub matrix: CMatrix,
}

/// `phi_k(xi)` for `k < n`, normalized in `L^2(d xi)`.
fn hermite_functions(n: usize, xi: f64) -> Vec<f64> {
    let t = xi / std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp();
    for k in 0..n {
        out.push(cur * 2f64.powf(-0.25));
        let next = (2.0 / (k + 1) as f64).sqrt() * t * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

impl OscillatorOperator {
    pub fn new(hbar: f64, f: PlaneKahlerFunction, truncation: usize) -> Result<Self> {
        check_hbar(hbar)?;
        if truncation == 0 {
            return Err(Error::InvalidInput("truncation must be positive".into()));
        }
        // Build one size larger so that squared operators are exact on the kept block.
        let m = truncation + 1;
        let mut position = CMatrix::zeros(m, m);
        let mut derivative = CMatrix::zeros(m, m);
        for k in 0..m - 1 {
            let s = ((k + 1) as f64).sqrt();
            position[(k, k + 1)] = C64::new(s, 0.0);
            position[(k + 1, k)] = C64::new(s, 0.0);
            derivative[(k, k + 1)] = C64::new(0.5 * s, 0.0);
            derivative[(k + 1, k)] = C64::new(-0.5 * s, 0.0);
        }
        let identity = CMatrix::identity(m, m);
        let oscillator = &derivative * &derivative * C64::new(-0.5 * hbar * hbar, 0.0)
            + &position * &position * C64::new(0.5, 0.0)
            - &identity * C64::new(hbar * hbar / 8.0 + 0.5, 0.0);
        let full = &identity * C64::new(f.c1, 0.0)
            + &position * C64::new(f.cx, 0.0)
            + &derivative * C64::new(0.0, hbar * f.cy)
            + oscillator * C64::new(f.cr, 0.0);
        Ok(Self {
            hbar,
            matrix: full.view((0, 0), (truncation, truncation)).into_owned(),
        })
    }

    pub fn truncation(&self) -> usize {
        self.matrix.nrows()
    }

    /// Coefficients `<phi_k, Psi(z)>` by quadrature.
    pub fn coherent_coefficients(&self, z: PlanePoint) -> CVector {
        let n = self.truncation();
        let mut c = CVector::zeros(n);
        for (xi, t, w) in gauss_hermite(2 * EXPECTATION_ORDER).line_points(0.5 * z.x, std::f64::consts::SQRT_2) {
            let psi = coherent_jet(self.hbar, z, xi)[0];
            let scale = w * (t * t).exp();
            for (k, phi) in hermite_functions(n, xi).into_iter().enumerate() {
                c[k] += psi * (phi * scale);
            }
        }
        c
    }

    /// `<c, Q c>` for the truncated coherent state.
    pub fn expectation(&self, z: PlanePoint) -> f64 {
        let c = self.coherent_coefficients(z);
        inner(&c, &(&self.matrix * &c)).re
    }
}
