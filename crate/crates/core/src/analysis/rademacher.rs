use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::pairwise_sum;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RademacherConfig {
    /// Number of data points `x_j`, uniform on `[−1,1]^d`.
    pub n: usize,
    pub d: usize,
    /// Radius of the norm ball.
    pub q: f64,
    pub sigma_draws: usize,
    /// Largest shell index `K`; shells run over `k ∈ {−1, …, K}`.
    pub shells: i32,
    pub candidates_per_shell: usize,
    pub seed: u64,
}

impl RademacherConfig {
    pub fn new(n: usize, d: usize, q: f64, seed: u64) -> Self {
        RademacherConfig { n, d, q, sigma_draws: 64, shells: 10, candidates_per_shell: 16, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.sigma_draws == 0 || self.candidates_per_shell == 0 {
            return Err(Error::param("n, d, sigma_draws and candidates_per_shell must be >= 1"));
        }
        if self.shells < 1 {
            return Err(Error::param(format!("shells must be >= 1, got {}", self.shells)));
        }
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return Err(Error::param(format!("Q must be >= 0, got {}", self.q)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RademacherEstimate {
    /// Candidate-restricted supremum, so a lower bound on the true quantity.
    pub estimate: f64,
    /// `Q·√(d/n)` with the unknown constant taken as 1.
    pub bound: f64,
}

const TAG: u64 = 0x4ADE_3AC8;

/// Frequencies with `‖ξ‖₁` uniform in `[2^k, 2^{k+1})` and Gaussian direction.
fn shell_candidates(cfg: &RademacherConfig, k: i32) -> Vec<Vec<f64>> {
    let mut rng = rng::substream(cfg.seed, &[TAG, 1, (k + 1) as u64, cfg.d as u64]);
    let lo = 2f64.powi(k);
    (0..cfg.candidates_per_shell)
        .map(|_| {
            let radius = rng.random_range(lo..2.0 * lo);
            let dir: Vec<f64> = (0..cfg.d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let l1: f64 = dir.iter().map(|v| v.abs()).sum();
            dir.iter().map(|v| radius * v / l1).collect()
        })
        .collect()
}

/// Monte-Carlo estimate of the empirical Rademacher complexity of the
/// `Q`-ball, restricted to `ξ = 0` plus random candidates on dyadic shells.
pub fn rademacher_estimate(cfg: &RademacherConfig) -> Result<RademacherEstimate> {
    cfg.validate()?;
    let (n, d) = (cfg.n, cfg.d);
    let mut data_rng = rng::substream(cfg.seed, &[TAG, 0, d as u64, n as u64]);
    let xs: Vec<f64> = (0..n * d).map(|_| data_rng.random_range(-1.0..=1.0)).collect();

    let mut freqs = vec![vec![0.0; d]];
    for k in -1..=cfg.shells {
        freqs.extend(shell_candidates(cfg, k));
    }
    // per candidate: weight 1/log₂(2+‖ξ‖₁) and the features e^{2πiξ·x_j}
    let features: Vec<(f64, Vec<f64>, Vec<f64>)> = freqs
        .par_iter()
        .map(|xi| {
            let l1: f64 = xi.iter().map(|v| v.abs()).sum();
            let (mut re, mut im) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for x in xs.chunks_exact(d) {
                let (s, c) = (2.0 * PI * crate::spectral::dot(xi, x)).sin_cos();
                re.push(c);
                im.push(s);
            }
            (1.0 / (2.0 + l1).log2(), re, im)
        })
        .collect();

    let sups: Vec<f64> = (0..cfg.sigma_draws)
        .into_par_iter()
        .map(|draw| {
            let mut rng = rng::substream(cfg.seed, &[TAG, 2, draw as u64, n as u64]);
            let sigma: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            features
                .iter()
                .map(|(w, re, im)| {
                    let (mut a, mut b) = (0.0, 0.0);
                    for ((s, c), v) in sigma.iter().zip(re).zip(im) {
                        a += s * c;
                        b += s * v;
                    }
                    w * a.hypot(b) / n as f64
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let mean = pairwise_sum(&sups) / cfg.sigma_draws as f64;
    Ok(RademacherEstimate { estimate: cfg.q * mean, bound: cfg.q * (d as f64 / n as f64).sqrt() })
}
