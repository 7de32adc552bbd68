//! Composite Gauss–Legendre quadrature.
//!
//! Every range is cut at its structural break points (truncation endpoints
//! are always panel boundaries, never interior nodes) and each piece is then
//! split into panels no wider than [`PANEL_WIDTH_SCALES`] times the finest
//! feature of the integrand. Each panel carries `quad_nodes` nodes.

use std::f64::consts::PI;

/// Panel width, in units of the narrowest posterior standard deviation.
pub const PANEL_WIDTH_SCALES: f64 = 50.0;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, z);
                deriv = dp;
                let step = p / dp;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, z);
            if dp.is_finite() {
                deriv = dp;
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * deriv * deriv);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// A quadrature rule on a finite union of intervals: ∫ g ≈ Σ wᵢ g(xᵢ).
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Composite rule over `[breaks[0], breaks[last]]` with panels never
    /// straddling a break and never wider than `PANEL_WIDTH_SCALES · scale`.
    pub fn composite(breaks: &[f64], scale: f64, base: &GaussLegendre) -> Self {
        let mut rule = Rule::default();
        let max_width = PANEL_WIDTH_SCALES * scale;
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
            let h = (b - a) / panels as f64;
            for k in 0..panels {
                let lo = a + k as f64 * h;
                let half = 0.5 * h;
                let mid = lo + half;
                for (x, w) in base.nodes.iter().zip(&base.weights) {
                    rule.nodes.push(mid + half * x);
                    rule.weights.push(half * w);
                }
            }
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// max and Σ exp(xᵢ − max); the pair (m, s) represents e^m · s.
pub fn scaled_sum_exp(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return (m, 0.0);
    }
    (m, xs.iter().map(|x| (x - m).exp()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_rules_match_tables() {
        let g = GaussLegendre::new(3);
        assert_abs_diff_eq!(g.nodes[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.nodes[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights[0], 5.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.weights[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn high_order_rule_is_exact_for_polynomials() {
        let g = GaussLegendre::new(401);
        let total: f64 = g.weights.iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
        let x8: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(8)).sum();
        assert_abs_diff_eq!(x8, 2.0 / 9.0, epsilon = 1e-12);
        assert!(g.nodes.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn composite_rule_integrates_gaussian_and_respects_breaks() {
        let g = GaussLegendre::new(21);
        let rule = Rule::composite(&[-12.0, 0.3, 12.0], 0.05, &g);
        let v = rule.integrate(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt());
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-13);
        assert!(!rule.nodes.contains(&0.3));
        let left = rule.integrate(|x| if x < 0.3 { 1.0 } else { 0.0 });
        assert_abs_diff_eq!(left, 12.3, epsilon = 1e-12);
    }
}
