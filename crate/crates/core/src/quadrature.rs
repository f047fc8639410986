//! Gauss–Hermite quadrature.
//!
//! Nodes and weights for the weight function `exp(-t^2)` are computed by Newton
//! iteration on the orthonormal Hermite recurrence and cached per order.
//! Integrals against densities on the real line are taken in a standardized
//! variable `xi = mean + sqrt(2) * sd * t`, so a Gaussian-shaped integrand with
//! a matching frame is integrated exactly up to polynomial degree `2 * order - 1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A Gauss–Hermite rule for `∫ g(t) exp(-t^2) dt`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds a rule of the given order. Prefer [`gauss_hermite`], which caches.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Hermite order must be at least 1");
        const PI_M4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0_f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 1.0;
            for _ in 0..100 {
                let mut p1 = PI_M4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let w = 2.0 / (pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[m - 1] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ g(t) exp(-t^2) dt`.
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)).sum()
    }

    /// Sample points and probability weights for the measure `N(mean, sd^2)`.
    /// The weights sum to one.
    pub fn normal_points(&self, mean: f64, sd: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = std::f64::consts::SQRT_2 * sd;
        let norm = std::f64::consts::PI.sqrt().recip();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mean + scale * t, w * norm))
    }

    /// `∫ h(xi) dxi` for an integrand that decays like `exp(-(xi - mean)^2 / (2 sd^2))`.
    /// Returns the sample point, the standardized node `t` and the weight that
    /// multiplies `h(xi) * exp(t^2)`.
    pub fn line_points(&self, mean: f64, sd: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let scale = std::f64::consts::SQRT_2 * sd;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mean + scale * t, t, w * scale))
    }
}

/// Cached rule of the given order; safe to call from any thread.
pub fn gauss_hermite(order: usize) -> Arc<GaussHermite> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&order) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(GaussHermite::new(order));
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .entry(order)
        .or_insert(rule)
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Double factorial moments of the standard normal: E[xi^(2k)] = (2k-1)!!.
    fn normal_moment(k: u32) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        (1..k).step_by(2).map(f64::from).product()
    }

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for order in [1, 2, 5, 16, 64, 96, 128, 192] {
            let rule = GaussHermite::new(order);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - std::f64::consts::PI.sqrt()).abs() < 1e-13, "order {order}: {s}");
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted_descending_in_first_half() {
        let rule = GaussHermite::new(64);
        for i in 0..32 {
            assert_eq!(rule.nodes()[i], -rule.nodes()[63 - i]);
            if i > 0 {
                assert!(rule.nodes()[i] < rule.nodes()[i - 1]);
            }
        }
    }

    #[test]
    fn standard_normal_moments_are_exact() {
        let rule = gauss_hermite(64);
        for k in 0..=12 {
            let m: f64 = rule.normal_points(0.0, 1.0).map(|(x, w)| w * x.powi(k as i32)).sum();
            let expected = normal_moment(k);
            assert!(
                (m - expected).abs() < 1e-10 * expected.max(1.0),
                "k={k}: {m} vs {expected}"
            );
        }
    }

    #[test]
    fn shifted_frame_integrates_gaussian_density() {
        let rule = gauss_hermite(32);
        let (mu, sd) = (1.7, 0.4);
        let total: f64 = rule
            .line_points(mu, sd)
            .map(|(x, t, w)| {
                let pdf = (-(x - mu).powi(2) / (2.0 * sd * sd)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * sd);
                w * pdf * (t * t).exp()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn cache_returns_same_rule() {
        let a = gauss_hermite(48);
        let b = gauss_hermite(48);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.order(), 48);
    }
}
