//! Numerical settings shared by every quadrature, search and simulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Log-spaced radius scan. `hi = None` means "derive from the parameters"
/// (ten ex-ante standard deviations of a low-quality signal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    pub lo: f64,
    pub hi: Option<f64>,
    pub steps: usize,
}

impl Default for RadiusGrid {
    fn default() -> Self {
        Self {
            lo: 0.05,
            hi: None,
            steps: 160,
        }
    }
}

impl RadiusGrid {
    pub fn upper(&self, params: &ModelParams) -> f64 {
        self.hi.unwrap_or_else(|| params.default_scan_bound())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    /// Half-width of every integration range, in standard deviations.
    pub support_halfwidth_sd: f64,
    /// Gauss-Legendre nodes per panel.
    pub quad_nodes: usize,
    pub abs_tol: f64,
    pub invariant_tol: f64,
    pub radius_grid: RadiusGrid,
    /// Golden-section iterations after the coarse scan.
    pub refine_iters: usize,
    pub mc_seed: u64,
    pub mc_n: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            support_halfwidth_sd: 10.0,
            quad_nodes: 401,
            abs_tol: 1e-8,
            invariant_tol: 1e-6,
            radius_grid: RadiusGrid::default(),
            refine_iters: 60,
            mc_seed: 20_240_601,
            mc_n: 1_000_000,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.support_halfwidth_sd.is_finite() && self.support_halfwidth_sd > 0.0) {
            return bad("support_halfwidth_sd must be positive");
        }
        if self.quad_nodes < 3 {
            return bad("quad_nodes must be at least 3");
        }
        if !(self.abs_tol > 0.0 && self.invariant_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        let g = &self.radius_grid;
        if !(g.lo.is_finite() && g.lo > 0.0) {
            return bad("radius grid lower end must be positive");
        }
        if let Some(hi) = g.hi {
            if !(hi.is_finite() && hi > g.lo) {
                return bad("radius grid needs lo < hi");
            }
        }
        if g.steps < 3 {
            return bad("radius grid needs at least 3 steps");
        }
        if self.refine_iters == 0 {
            return bad("refine_iters must be positive");
        }
        if self.mc_n == 0 {
            return bad("mc_n must be positive");
        }
        Ok(())
    }

    /// Same settings with every quadrature rule twice as dense.
    pub fn with_doubled_nodes(&self) -> Self {
        Self {
            quad_nodes: self.quad_nodes * 2,
            ..self.clone()
        }
    }
}
