//! Spin systems from the binomial family.
//!
//! The Kählerification of `binomial:n` is the sphere with weight-`n` structure.
//! Kähler functions are `f = u0 + u x + v y + w z`; their quantization is the
//! tridiagonal matrix `Q(f)` acting on `C^{n+1}` through the embedding `Psi`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::ln_binomial;
use crate::linalg::{cmax_abs, hermitian_defect, hermitian_eigen, inner, CMatrix, CVector, C64};
use crate::projective::{fs_poisson_bracket_fd, ProjectivePoint};

/// Unit-norm tolerance for sphere points.
pub const SPHERE_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > SPHERE_TOL {
            return Err(Error::InvalidInput(format!("sphere point has norm {norm}")));
        }
        Ok(Self { x, y, z })
    }

    /// Projects a nonzero vector radially onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// `(cos a, sin a cos b, sin a sin b)` for colatitude `a` measured from the x-axis.
    pub fn from_angles(alpha: f64, beta: f64) -> Self {
        Self {
            x: alpha.cos(),
            y: alpha.sin() * beta.cos(),
            z: alpha.sin() * beta.sin(),
        }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    fn from_vector(v: Vector3<f64>) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
        }
    }
}

/// `f = u0 + u x + v y + w z`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SphereKahlerFunction {
    pub u0: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl SphereKahlerFunction {
    pub const fn new(u0: f64, u: f64, v: f64, w: f64) -> Self {
        Self { u0, u, v, w }
    }

    pub const X: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const Z: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub fn axis(&self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.w)
    }

    pub fn eval(&self, s: SpherePoint) -> f64 {
        self.u0 + self.axis().dot(&s.to_vector())
    }

    fn from_parts(u0: f64, axis: Vector3<f64>) -> Self {
        Self::new(u0, axis[0], axis[1], axis[2])
    }
}

/// Point of the sphere over a tangent vector of the binomial family.
pub fn sphere_from_tangent(theta: f64, theta_dot: f64) -> SpherePoint {
    let sech = 1.0 / (0.5 * theta).cosh();
    SpherePoint {
        x: (0.5 * theta).tanh(),
        y: (0.5 * theta_dot).cos() * sech,
        z: (0.5 * theta_dot).sin() * sech,
    }
}

/// `C(n,k) q^k (1-q)^(n-k)` for `k = 0..=n`, accumulated in log space with `0^0 = 1`.
fn binomial_law(n: usize, q: f64) -> Vec<f64> {
    let q = q.clamp(0.0, 1.0);
    let (lq, lr) = (q.ln(), (1.0 - q).ln());
    (0..=n)
        .map(|k| {
            let a = if k == 0 { 0.0 } else { k as f64 * lq };
            let b = if k == n { 0.0 } else { (n - k) as f64 * lr };
            (ln_binomial(n, k) + a + b).exp()
        })
        .collect()
}

/// Distribution on `{0..n}` at a sphere point: binomial with `q = (1 + x) / 2`.
pub fn pi_sphere(n: usize, s: SpherePoint) -> Vec<f64> {
    binomial_law(n, 0.5 * (1.0 + s.x))
}

/// `X(k) = alpha + beta k` together with the rotation taking `axis` to the x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereDecomposition {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub axis: [f64; 3],
}

impl SphereDecomposition {
    /// The other decomposition `(alpha + n beta, -beta, -axis)` of the same function.
    pub fn alternative(&self) -> Self {
        Self {
            n: self.n,
            alpha: self.alpha + self.n as f64 * self.beta,
            beta: -self.beta,
            axis: self.axis.map(|a| -a),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.alpha + self.beta * k as f64).collect()
    }

    /// A rotation whose first row is the axis.
    pub fn rotation(&self) -> Matrix3<f64> {
        let a = Vector3::from(self.axis);
        let helper = if a[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let b = (helper - a * a.dot(&helper)).normalize();
        let c = a.cross(&b);
        Matrix3::from_rows(&[a.transpose(), b.transpose(), c.transpose()])
    }

    /// Image of `s` under [`rotation`](Self::rotation): its x-coordinate is `axis . s`.
    pub fn rotate(&self, s: SpherePoint) -> SpherePoint {
        SpherePoint::from_vector(self.rotation() * s.to_vector())
    }

    /// `sum_k X(k) pi(rotated s)(k)`.
    pub fn resynthesize(&self, s: SpherePoint) -> f64 {
        pi_sphere(self.n, self.rotate(s))
            .iter()
            .zip(self.values())
            .map(|(p, x)| p * x)
            .sum()
    }
}

pub fn decompose_sphere_function(n: usize, f: SphereKahlerFunction) -> Result<SphereDecomposition> {
    check_n(n)?;
    let r = f.axis().norm();
    if r == 0.0 {
        return Ok(SphereDecomposition {
            n,
            alpha: f.u0,
            beta: 0.0,
            axis: [0.0, 0.0, 1.0],
        });
    }
    let axis = f.axis() / r;
    Ok(SphereDecomposition {
        n,
        alpha: f.u0 - r,
        beta: 2.0 * r / n as f64,
        axis: [axis[0], axis[1], axis[2]],
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("spin family size n must be at least 1".into()));
    }
    Ok(())
}

/// Distinct eigenvalues `u0 + (2/n) |(u,v,w)| (k - n/2)`, ascending.
pub fn spin_spectrum(n: usize, f: SphereKahlerFunction) -> Result<Vec<f64>> {
    check_n(n)?;
    let r = f.axis().norm();
    if r == 0.0 {
        return Ok(vec![f.u0]);
    }
    Ok((0..=n)
        .map(|k| f.u0 + 2.0 * r / n as f64 * (k as f64 - 0.5 * n as f64))
        .collect())
}

/// Eigenvalues and their probabilities at a state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinLaw {
    pub eigenvalues: Vec<f64>,
    pub probabilities: Vec<f64>,
}

pub fn spin_probabilities(n: usize, f: SphereKahlerFunction, s: SpherePoint) -> Result<SpinLaw> {
    let eigenvalues = spin_spectrum(n, f)?;
    let r = f.axis().norm();
    if r == 0.0 {
        return Ok(SpinLaw {
            eigenvalues,
            probabilities: vec![1.0],
        });
    }
    let c = (f.axis().dot(&s.to_vector()) / r).clamp(-1.0, 1.0);
    Ok(SpinLaw {
        eigenvalues,
        probabilities: binomial_law(n, 0.5 * (1.0 + c)),
    })
}

/// `Psi_k = sqrt(C(n,k)) cos(a/2)^k sin(a/2)^(n-k) e^{i b k}`.
pub fn psi_embedding(n: usize, alpha: f64, beta: f64) -> CVector {
    let (c, s) = ((0.5 * alpha).cos(), (0.5 * alpha).sin());
    CVector::from_iterator(
        n + 1,
        (0..=n).map(|k| {
            let modulus = (0.5 * ln_binomial(n, k)).exp() * c.powi(k as i32) * s.powi((n - k) as i32);
            C64::from_polar(modulus, beta * k as f64)
        }),
    )
}

/// Hermitian tridiagonal representation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RepMatrix {
    pub n: usize,
    pub q: CMatrix,
}

impl RepMatrix {
    /// `<psi, Q psi>` for a unit vector.
    pub fn expectation(&self, psi: &CVector) -> f64 {
        inner(psi, &(&self.q * psi)).re
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.q)
    }

    /// Largest modulus outside the three central diagonals.
    pub fn off_band(&self) -> f64 {
        let m = self.q.nrows();
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                if i.abs_diff(j) > 1 {
                    worst = worst.max(self.q[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// `Q(f)` with diagonal `u0 - u (2/n)(n/2 - k)` and superdiagonal
/// `(1/n) sqrt((n-l)(l+1)) (v - i w)`.
pub fn q_matrix(n: usize, f: SphereKahlerFunction) -> Result<RepMatrix> {
    check_n(n)?;
    let nf = n as f64;
    let mut q = CMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        q[(k, k)] = C64::new(f.u0 - f.u * (2.0 / nf) * (0.5 * nf - k as f64), 0.0);
    }
    let off = C64::new(f.v, -f.w);
    for l in 0..n {
        let e = off * (((n - l) * (l + 1)) as f64).sqrt() / nf;
        q[(l, l + 1)] = e;
        q[(l + 1, l)] = e.conj();
    }
    Ok(RepMatrix { n, q })
}

/// Closed form of the weight-`n` bracket: `{f, g}(r) = -(1/n) (a_f x a_g) . r`.
pub fn sphere_bracket(n: usize, f: SphereKahlerFunction, g: SphereKahlerFunction) -> SphereKahlerFunction {
    SphereKahlerFunction::from_parts(0.0, -f.axis().cross(&g.axis()) / n as f64)
}

/// Poisson bracket on `(S^2, n omega)` by central differences in the chart
/// `(a, b) -> (cos a, sin a cos b, sin a sin b)`. The orientation is the one for
/// which `Q({f,g}) = -(i/2)[Q(f), Q(g)]`, i.e. `omega = -sin a da ^ db` here and
/// `{x, y} = -z / n`.
pub fn sphere_poisson_bracket_fd(
    n: usize,
    f: &dyn Fn(SpherePoint) -> f64,
    g: &dyn Fn(SpherePoint) -> f64,
    alpha: f64,
    beta: f64,
) -> f64 {
    let h = FD_STEP;
    let d = |func: &dyn Fn(SpherePoint) -> f64| {
        let da = (func(SpherePoint::from_angles(alpha + h, beta)) - func(SpherePoint::from_angles(alpha - h, beta)))
            / (2.0 * h);
        let db = (func(SpherePoint::from_angles(alpha, beta + h)) - func(SpherePoint::from_angles(alpha, beta - h)))
            / (2.0 * h);
        (da, db)
    };
    let (fa, fb) = d(f);
    let (ga, gb) = d(g);
    (fb * ga - fa * gb) / (n as f64 * alpha.sin())
}

/// Chart points away from the poles used to recover bracket coefficients.
const FIT_POINTS: [(f64, f64); 6] = [(1.0, 0.3), (2.1, 0.3), (1.0, 2.4), (2.1, 2.4), (1.3, 4.4), (1.8, 5.5)];

/// The bracket `{f, g}` as a Kähler function, fitted to finite-difference values.
pub fn sphere_bracket_fd(n: usize, f: SphereKahlerFunction, g: SphereKahlerFunction) -> SphereKahlerFunction {
    let design = DMatrix::from_fn(FIT_POINTS.len(), 4, |i, j| {
        let s = SpherePoint::from_angles(FIT_POINTS[i].0, FIT_POINTS[i].1);
        [1.0, s.x, s.y, s.z][j]
    });
    let rhs = DVector::from_iterator(
        FIT_POINTS.len(),
        FIT_POINTS
            .iter()
            .map(|&(a, b)| sphere_poisson_bracket_fd(n, &|s| f.eval(s), &|s| g.eval(s), a, b)),
    );
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .expect("SVD with both factors");
    SphereKahlerFunction::new(coef[0], coef[1], coef[2], coef[3])
}

/// `|| Q({f,g}) + (i/2) [Q(f), Q(g)] ||_inf` with `{f,g}` from finite differences.
pub fn commutator_residual(n: usize, f: SphereKahlerFunction, g: SphereKahlerFunction) -> Result<f64> {
    let qf = q_matrix(n, f)?.q;
    let qg = q_matrix(n, g)?.q;
    let bracket = q_matrix(n, sphere_bracket_fd(n, f, g))?.q;
    let comm = &qf * &qg - &qg * &qf;
    Ok(cmax_abs(&(bracket + comm * C64::new(0.0, 0.5))))
}

/// `| (1/4){f^, g^}_FS(z) - {f,g}^(z) |` where `f^(z) = <z, Q(f) z>` on `P(C^{n+1})`
/// carries the standard Fubini–Study structure.
pub fn hat_bracket_residual(
    n: usize,
    f: SphereKahlerFunction,
    g: SphereKahlerFunction,
    z: &ProjectivePoint,
) -> Result<f64> {
    let qf = q_matrix(n, f)?;
    let qg = q_matrix(n, g)?;
    let qfg = q_matrix(n, sphere_bracket(n, f, g))?;
    if z.dim() != n + 1 {
        return Err(Error::Dimension {
            expected: n + 1,
            got: z.dim(),
        });
    }
    let fs = fs_poisson_bracket_fd(&|w| qf.expectation(w), &|w| qg.expectation(w), z);
    Ok((0.25 * fs - qfg.expectation(z.homog())).abs())
}

/// Skew-Hermitian images `-(1/2i) Q` of `x`, `y`, `z`.
pub fn su2_generators(n: usize) -> Result<[CMatrix; 3]> {
    let scale = C64::new(0.0, 0.5);
    Ok([
        q_matrix(n, SphereKahlerFunction::X)?.q * scale,
        q_matrix(n, SphereKahlerFunction::Y)?.q * scale,
        q_matrix(n, SphereKahlerFunction::Z)?.q * scale,
    ])
}

/// `Q(x)^2 + Q(y)^2 + Q(z)^2`, which equals `(n+2)/n` times the identity.
pub fn casimir(n: usize) -> Result<CMatrix> {
    let mut sum = CMatrix::zeros(n + 1, n + 1);
    for f in [
        SphereKahlerFunction::X,
        SphereKahlerFunction::Y,
        SphereKahlerFunction::Z,
    ] {
        let q = q_matrix(n, f)?.q;
        sum += &q * &q;
    }
    Ok(sum)
}

/// Outcome distribution for a measurement of `f2` on the `m1`-th eigenstate of `Q(f1)`.
pub fn stern_gerlach_transition(
    n: usize,
    f1: SphereKahlerFunction,
    m1: usize,
    f2: SphereKahlerFunction,
) -> Result<Vec<f64>> {
    check_n(n)?;
    if f1.axis().norm() == 0.0 || f2.axis().norm() == 0.0 {
        return Err(Error::InvalidInput("Stern-Gerlach axes must be nonzero".into()));
    }
    if m1 > n {
        return Err(Error::InvalidInput(format!("eigenvalue index {m1} exceeds {n}")));
    }
    let (l1, v1) = hermitian_eigen(&q_matrix(n, f1)?.q);
    let (l2, v2) = hermitian_eigen(&q_matrix(n, f2)?.q);
    for l in [&l1, &l2] {
        assert!(
            l.windows(2).all(|w| w[1] - w[0] > 1e-9),
            "spectrum of Q is simple for a nonzero axis"
        );
    }
    let incoming = v1.column(m1).into_owned();
    Ok((0..=n)
        .map(|m2| inner(&v2.column(m2).into_owned(), &incoming).norm_sqr())
        .collect())
}
