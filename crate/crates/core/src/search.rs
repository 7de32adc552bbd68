//! One-dimensional maximisation: a coarse log-spaced scan followed by
//! golden-section refinement of the best bracket.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` points spaced evenly in log between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Outcome of a bounded maximisation against an unbounded benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumResult {
    /// Maximiser; `None` means the unbounded policy is optimal.
    pub optimum: Option<f64>,
    pub utility_at_opt: f64,
    pub utility_uncensored: f64,
    pub is_finite: bool,
    pub bracket: (f64, f64),
}

/// Scan `f` over `grid`, refine, and compare against `u_inf = f(∞)`.
pub(crate) fn optimize_against_unbounded(
    f: impl Fn(f64) -> Result<f64> + Sync,
    grid: &[f64],
    u_inf: f64,
    tol: f64,
    refine_iters: usize,
) -> Result<OptimumResult> {
    let ys = grid.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let n = ys.len();
    let best = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unbounded = |bracket| OptimumResult {
        optimum: None,
        utility_at_opt: u_inf,
        utility_uncensored: u_inf,
        is_finite: false,
        bracket,
    };
    let last = n - 1;
    let hi = grid[last];
    if ys[last] >= best {
        if u_inf - ys[last] >= -tol {
            return Ok(unbounded((hi, f64::INFINITY)));
        }
        return Err(Error::ScanBoundTooSmall { bound: hi });
    }

    let mut candidates = Vec::new();
    for i in 0..last {
        let left_ok = i == 0 || ys[i] >= ys[i - 1];
        if left_ok && ys[i] >= ys[i + 1] && ys[i] >= best - tol {
            candidates.push(i);
        }
    }
    let mut chosen: Option<(f64, f64, (f64, f64))> = None;
    for i in candidates {
        let (a, b) = (grid[i.saturating_sub(1)], grid[i + 1]);
        let (x, y) = golden_section_max(&f, a, b, refine_iters)?;
        let (x, y) = if ys[i] > y { (grid[i], ys[i]) } else { (x, y) };
        chosen = match chosen {
            Some(c) if c.1 >= y - tol => Some(c),
            _ => Some((x, y, (a, b))),
        };
    }
    let (x, y, bracket) = chosen.expect("global maximum is a candidate");
    if y > u_inf + tol {
        Ok(OptimumResult {
            optimum: Some(x),
            utility_at_opt: y,
            utility_uncensored: u_inf,
            is_finite: true,
            bracket,
        })
    } else {
        Ok(unbounded(bracket))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_ends() {
        let g = log_grid(0.1, 10.0, 3);
        assert_abs_diff_eq!(g[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 1.0, epsilon = 1e-12);
        assert_eq!(g[2], 10.0);
    }

    #[test]
    fn golden_parabola() {
        let (x, y) = golden_section_max(|x| Ok(-(x - 1.3) * (x - 1.3)), 0.0, 3.0, 80).unwrap();
        assert_abs_diff_eq!(x, 1.3, epsilon = 1e-7);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn interior_beats_benchmark() {
        let g = log_grid(0.05, 50.0, 80);
        let f = |x: f64| Ok(-(x.ln() - 1.0f64.ln()).powi(2) - 1.0 + 0.5 * (1.0 - (-x).exp()));
        let r = optimize_against_unbounded(f, &g, -1.0, 1e-9, 60).unwrap();
        assert!(r.is_finite);
        assert!(r.utility_at_opt > r.utility_uncensored);
    }

    #[test]
    fn increasing_to_limit_is_unbounded() {
        let g = log_grid(0.05, 50.0, 40);
        let r = optimize_against_unbounded(|x: f64| Ok(-(-x).exp()), &g, 0.0, 1e-9, 60).unwrap();
        assert!(!r.is_finite);
        assert_eq!(r.optimum, None);
    }

    #[test]
    fn boundary_above_limit_errors() {
        let g = log_grid(0.05, 5.0, 40);
        let r = optimize_against_unbounded(|x: f64| Ok(x), &g, 0.0, 1e-9, 60);
        assert!(matches!(r, Err(Error::ScanBoundTooSmall { .. })));
    }
}
