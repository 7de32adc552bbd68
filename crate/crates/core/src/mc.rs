//! Seeded simulation of the generative process, Monte Carlo estimates, and a
//! discretised Bayes-rule oracle that shares no code with the quadrature path.
//!
//! Draws are produced in fixed-size chunks; chunk `c` uses a ChaCha8 stream
//! keyed by `(seed, c)`, so results do not depend on how many threads run.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::inference::Posterior;
use crate::interp::Pchip;
use crate::law::SignalLaw;
use crate::model::{ModelParams, Quality, Radius, SamplingPolicy, SamplingVariance};

pub const CHUNK: usize = 16_384;
/// Attempts allowed for a single accepted draw before giving up.
pub const MAX_ATTEMPTS_PER_DRAW: u64 = 10_000_000_000;
/// Proposals in the acceptance-rate probe run before simulating.
pub const PILOT_PROPOSALS: usize = 1_000_000;
pub const MIN_ACCEPTANCE_RATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    pub omega: f64,
    pub quality: Quality,
    pub signal: f64,
    pub accepted: bool,
}

/// Accepted draws in generation order. Rejected proposals are counted in
/// `attempts` but not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawSet {
    pub n: usize,
    pub seed: u64,
    pub records: Vec<DrawRecord>,
    pub attempts: u64,
}

impl DrawSet {
    pub fn acceptance_rate(&self) -> f64 {
        self.records.len() as f64 / self.attempts as f64
    }

    /// SHA-256 over the raw bytes of every record, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update(self.seed.to_le_bytes());
        h.update(self.attempts.to_le_bytes());
        for r in &self.records {
            h.update(r.omega.to_bits().to_le_bytes());
            h.update(r.signal.to_bits().to_le_bytes());
            h.update([r.quality as u8, r.accepted as u8]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_effective: usize,
}

impl McEstimate {
    /// |value − target| in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.std_error
    }
}

enum Accept {
    All,
    Window { center: f64, radius: f64 },
    Gauss { mean: f64, var: f64 },
}

impl Accept {
    fn new(params: &ModelParams, policy: &SamplingPolicy) -> Result<Self> {
        Ok(match *policy {
            SamplingPolicy::Radius(Radius::Unbounded) => Accept::All,
            SamplingPolicy::Radius(Radius::Finite(r)) => {
                if r.is_nan() || r <= 0.0 {
                    return Err(Error::DegenerateRadius(r));
                }
                if r.is_infinite() {
                    Accept::All
                } else {
                    Accept::Window {
                        center: params.prior_mean(),
                        radius: r,
                    }
                }
            }
            SamplingPolicy::NormalWeight { var: SamplingVariance::Unbounded, .. } => Accept::All,
            SamplingPolicy::NormalWeight { mean, var: SamplingVariance::Finite(v) } => {
                if v.is_nan() || v <= 0.0 || !mean.is_finite() {
                    return Err(Error::InvalidParams(format!(
                        "normal sampling needs finite mean and positive variance, got ({mean}, {v})"
                    )));
                }
                Accept::Gauss { mean, var: v }
            }
        })
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn propose(
    rng: &mut ChaCha8Rng,
    z: &Normal,
    omega: f64,
    h: f64,
    (sdh, sdl): (f64, f64),
    accept: &Accept,
) -> (Quality, f64, bool) {
    let quality = if uniform(rng) < h {
        Quality::High
    } else {
        Quality::Low
    };
    let sd = if quality == Quality::High { sdh } else { sdl };
    let signal = omega + sd * z.inverse_cdf(uniform(rng));
    let ok = match *accept {
        Accept::All => true,
        Accept::Window { center, radius } => (signal - center).abs() < radius,
        Accept::Gauss { mean, var } => {
            let d = signal - mean;
            uniform(rng) < (-d * d / (2.0 * var)).exp()
        }
    };
    (quality, signal, ok)
}

/// Unconditional acceptance rate over fresh (ω, q, s) proposals, on a
/// stream no chunk uses.
fn pilot_rate(params: &ModelParams, accept: &Accept, seed: u64) -> f64 {
    let z = Normal::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let sd0 = params.prior_var().sqrt();
    let sds = (params.high_var().sqrt(), params.low_var().sqrt());
    let hits = (0..PILOT_PROPOSALS)
        .filter(|_| {
            let omega = params.prior_mean() + sd0 * z.inverse_cdf(uniform(&mut rng));
            propose(&mut rng, &z, omega, params.high_share(), sds, accept).2
        })
        .count();
    hits as f64 / PILOT_PROPOSALS as f64
}

struct Chunk {
    records: Vec<DrawRecord>,
    attempts: u64,
}

fn simulate_chunk(
    params: &ModelParams,
    accept: &Accept,
    seed: u64,
    index: usize,
    count: usize,
) -> Result<Chunk> {
    let z = Normal::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let sd0 = params.prior_var().sqrt();
    let (sdh, sdl) = (params.high_var().sqrt(), params.low_var().sqrt());
    let h = params.high_share();
    let mut records = Vec::with_capacity(count);
    let mut attempts = 0u64;
    for _ in 0..count {
        let omega = params.prior_mean() + sd0 * z.inverse_cdf(uniform(&mut rng));
        let mut tries = 0u64;
        loop {
            tries += 1;
            let (quality, signal, ok) = propose(&mut rng, &z, omega, h, (sdh, sdl), accept);
            if ok {
                records.push(DrawRecord {
                    omega,
                    quality,
                    signal,
                    accepted: true,
                });
                break;
            }
            if tries >= MAX_ATTEMPTS_PER_DRAW {
                return Err(Error::RejectionStall {
                    rate: 1.0 / tries as f64,
                });
            }
        }
        attempts += tries;
    }
    Ok(Chunk { records, attempts })
}

/// `n` accepted draws of (ω, q, s) under `policy`: ω from the prior, q from
/// the share, s from the type-q noise, re-drawing (q, s) until accepted.
pub fn simulate_draws(params: &ModelParams, policy: &SamplingPolicy, n: usize, seed: u64) -> Result<DrawSet> {
    if n == 0 {
        return Err(Error::InvalidConfig("draw count must be positive".into()));
    }
    let accept = Accept::new(params, policy)?;
    if !matches!(accept, Accept::All) {
        let rate = pilot_rate(params, &accept, seed);
        if rate < MIN_ACCEPTANCE_RATE {
            return Err(Error::RejectionStall { rate });
        }
    }
    let chunks = n.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| simulate_chunk(params, &accept, seed, c, CHUNK.min(n - c * CHUNK)))
        .collect::<Result<Vec<_>>>()?;
    let attempts = parts.iter().map(|c| c.attempts).sum::<u64>();
    Ok(DrawSet {
        n,
        seed,
        records: parts.into_iter().flat_map(|c| c.records).collect(),
        attempts,
    })
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn of(xs: impl Iterator<Item = f64>) -> Self {
        let mut m = Moments { n: 0, mean: 0.0, m2: 0.0 };
        for x in xs {
            m.n += 1;
            let d = x - m.mean;
            m.mean += d / m.n as f64;
            m.m2 += d * (x - m.mean);
        }
        m
    }

    fn merge(self, o: Self) -> Self {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    fn estimate(self) -> McEstimate {
        let n = self.n.max(1) as f64;
        let var = if self.n > 1 { self.m2 / (n - 1.0) } else { 0.0 };
        let se = (var / n).sqrt();
        McEstimate {
            value: self.mean,
            std_error: if se > 0.0 { se } else { 1.0 / n },
            n_effective: self.n,
        }
    }
}

/// Sample mean of a per-record statistic with a chunk-ordered reduction.
pub fn mc_mean(draws: &DrawSet, stat: impl Fn(&DrawRecord) -> f64 + Sync) -> McEstimate {
    draws
        .records
        .par_chunks(CHUNK)
        .map(|c| Moments::of(c.iter().filter(|r| r.accepted).map(&stat)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Moments { n: 0, mean: 0.0, m2: 0.0 }, Moments::merge)
        .estimate()
}

/// Mean of −(ω − a(s))² over accepted draws.
pub fn mc_expected_utility(draws: &DrawSet, action_map: impl Fn(f64) -> f64 + Sync) -> McEstimate {
    mc_mean(draws, |r| {
        let d = r.omega - action_map(r.signal);
        -d * d
    })
}

/// Share of high-quality sources among signals accepted by radius `r`.
pub fn mc_high_prob_within_radius(params: &ModelParams, r: f64, n: usize, seed: u64) -> Result<McEstimate> {
    let draws = simulate_draws(params, &SamplingPolicy::radius(r), n, seed)?;
    Ok(mc_mean(&draws, |d| (d.quality == Quality::High) as u8 as f64))
}

/// Optimal action tabulated on a uniform signal grid and interpolated
/// monotonically, for evaluating many simulated signals cheaply.
#[derive(Debug, Clone)]
pub struct ActionTable {
    interp: Pchip,
}

impl ActionTable {
    pub const DEFAULT_POINTS: usize = 2001;

    pub fn new(params: &ModelParams, policy: &SamplingPolicy, cfg: &NumericsConfig, points: usize) -> Result<Self> {
        let post = Posterior::new(params, policy, cfg)?;
        let (lo, hi) = match post.law().radius() {
            Some(r) => {
                let c = params.prior_mean();
                let pad = r * 1e-9;
                (c - r + pad, c + r - pad)
            }
            None => {
                let (b, _) = post.law().signal_breaks(cfg);
                (b[0], b[b.len() - 1])
            }
        };
        let n = points.max(2);
        let xs: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let ys = xs
            .par_iter()
            .map(|&s| post.action(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            interp: Pchip::new(xs, ys),
        })
    }

    pub fn action(&self, s: f64) -> f64 {
        self.interp.eval(s)
    }
}

/// Posterior mean and variance of the state by Bayes' rule on a uniform grid
/// over ω₀ ± 12σ₀, evaluated directly from normal pdfs and cdfs.
pub fn grid_posterior_oracle(
    s: f64,
    policy: &SamplingPolicy,
    params: &ModelParams,
    grid_points: usize,
) -> Result<(f64, f64)> {
    if grid_points < 1001 {
        return Err(Error::InvalidConfig(format!(
            "grid oracle needs at least 1001 points, got {grid_points}"
        )));
    }
    let law = SignalLaw::new(params, policy)?;
    law.check_signal(s)?;
    let w0 = params.prior_mean();
    let sd0 = params.prior_var().sqrt();
    let prior = Normal::new(w0, sd0).expect("validated");
    let h = params.high_share();
    let comps = [
        (h, params.high_var().sqrt()),
        (1.0 - h, params.low_var().sqrt()),
    ];
    let half = 12.0 * sd0;
    let step = 2.0 * half / (grid_points - 1) as f64;
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..grid_points {
        let omega = w0 - half + step * i as f64;
        let mut like = 0.0;
        let mut norm = 0.0;
        for &(share, sd) in &comps {
            if share == 0.0 {
                continue;
            }
            let noise = Normal::new(omega, sd).expect("validated");
            like += share * noise.pdf(s);
            norm += share
                * match *policy {
                    SamplingPolicy::Radius(_) => match law.radius() {
                        None => 1.0,
                        Some(r) => {
                            let (a, b) = (w0 - r, w0 + r);
                            if a > omega {
                                noise.sf(a) - noise.sf(b)
                            } else {
                                noise.cdf(b) - noise.cdf(a)
                            }
                        }
                    },
                    SamplingPolicy::NormalWeight { mean, var } => match var {
                        SamplingVariance::Unbounded => 1.0,
                        SamplingVariance::Finite(v) => Normal::new(mean, (v + sd * sd).sqrt())
                            .expect("validated")
                            .pdf(omega),
                    },
                };
        }
        if norm <= 0.0 {
            continue;
        }
        let w = prior.pdf(omega) * like / norm;
        m0 += w;
        m1 += w * omega;
        m2 += w * omega * omega;
    }
    let mean = m1 / m0;
    Ok((mean, (m2 / m0 - mean * mean).max(0.0)))
}
