//! Exactness suite behind the `verify` subcommand.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::metrics::verify_cos_lemma;
use crate::network::{beta, build_beta, build_beta_chain, build_gamma_tail_with_bias_fault, gamma, mod1, ReluNetwork, Workspace};
use crate::rng;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyOptions {
    /// Added to the output bias of every γ tail; nonzero only for fault injection.
    pub gamma_fault: f64,
    pub cos_points: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { gamma_fault: 0.0, cos_points: 100_000, seed: rng::default_seed() }
    }
}

fn check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Result<CheckResult> {
    let start = Instant::now();
    let dev = f()?;
    Ok(CheckResult {
        name: name.into(),
        max_deviation: dev,
        tolerance,
        passed: dev <= tolerance,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

pub fn run_checks(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    out.push(check("beta network", 1e-12, || {
        let net = build_beta();
        let mut dev = 0.0f64;
        for t in grid(10_000) {
            dev = dev.max((net.eval_scalar(&[t])? - beta(t)).abs());
        }
        Ok(dev)
    })?);
    out.push(check("gamma tail", 1e-12, || {
        let mut dev = 0.0f64;
        for r in grid(101).map(|u| u - 0.5) {
            let net = build_gamma_tail_with_bias_fault(r, opts.gamma_fault)?;
            for t in grid(100) {
                dev = dev.max((net.eval_scalar(&[t])? - gamma(t, r)).abs());
            }
        }
        Ok(dev)
    })?);
    out.push(check("composition law L=1..10", 1e-9, || {
        let mut rng = rng::substream(opts.seed, &[0x7E51F1]);
        let rs: Vec<f64> = (0..100).map(|_| rng.random_range(-0.5..=0.5)).collect();
        let mut ws = Workspace::default();
        let mut dev = 0.0f64;
        for l in 1..=10 {
            let chain = build_beta_chain(l);
            let n = (1u64 << l) as f64;
            for &r in &rs {
                let net = ReluNetwork::compose(&build_gamma_tail_with_bias_fault(r, opts.gamma_fault)?, &chain)?;
                for t in grid(10_000) {
                    dev = dev.max((net.eval_with(&[t], &mut ws)[0] - gamma(mod1(n * t), r)).abs());
                }
            }
        }
        Ok(dev)
    })?);
    out.push(check("cosine representation n=1..64", 1e-8, || {
        let ns: Vec<u64> = (1..=64).collect();
        let ts: Vec<f64> = (1..=512).map(|i| i as f64 / 513.0).collect();
        verify_cos_lemma(&ns, &ts, opts.cos_points)
    })?);
    out.push(check("log2 sub-multiplicativity", 0.0, || {
        // positive part of log2(2+ct) − log2(2+c)·log2(2+t)
        let mut dev = 0.0f64;
        for c in grid(100).map(|u| 100.0 * u) {
            for t in grid(100).map(|u| 100.0 * u) {
                dev = dev.max((2.0 + c * t).log2() - (2.0 + c).log2() * (2.0 + t).log2());
            }
        }
        Ok(dev.max(0.0))
    })?);
    Ok(out)
}
