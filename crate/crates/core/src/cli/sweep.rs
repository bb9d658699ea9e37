//! Convergence sweeps over dimension, sample count and seed.

use std::collections::BTreeMap;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{fmt_g, loglog_svg, Series};
use crate::constructor::{build, BuildConfig};
use crate::error::{Error, Result};
use crate::metrics::{slope_fit, QuadratureSpec, SlopeFit};
use crate::network::Variant;
use crate::rng;
use crate::spectral::synth_target;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub variant: Variant,
    pub dims: Vec<usize>,
    pub ms: Vec<usize>,
    pub seeds: Vec<u64>,
    pub n_modes: usize,
    pub log_exponent: f64,
    /// One synthetic target per dimension is drawn from this seed.
    pub target_seed: u64,
    pub quad_points: usize,
    pub max_retries: usize,
    pub error_slack: f64,
    pub svg: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let base = rng::default_seed();
        SweepConfig {
            variant: Variant::L2,
            dims: vec![4],
            ms: vec![16, 64, 256],
            seeds: (0..5).map(|i| base + i).collect(),
            n_modes: 64,
            log_exponent: 3.0,
            target_seed: base,
            quad_points: 4096,
            max_retries: 16,
            error_slack: 1.0,
            svg: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.ms.is_empty() || self.seeds.is_empty() {
            return Err(Error::param("dims, ms and seeds must be nonempty"));
        }
        if self.dims.contains(&0) || self.ms.contains(&0) {
            return Err(Error::param("dims and ms must be positive"));
        }
        Ok(())
    }
}

/// One CSV row; bound constituents are kept so rows can be re-checked offline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub m: usize,
    pub seed: u64,
    pub variant: Variant,
    pub error: f64,
    pub std_err: f64,
    pub error_bound: f64,
    pub total_depth: usize,
    pub depth_bound: f64,
    pub retries: usize,
    pub accepted: bool,
    pub c_factor: f64,
}

pub const SWEEP_HEADER: &str =
    "d,m,seed,variant,error,std_err,error_bound,total_depth,depth_bound,retries,accepted,C_factor";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.m,
            self.seed,
            self.variant,
            fmt_g(self.error, 12),
            fmt_g(self.std_err, 12),
            fmt_g(self.error_bound, 12),
            self.total_depth,
            fmt_g(self.depth_bound, 12),
            self.retries,
            self.accepted,
            fmt_g(self.c_factor, 12)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeRow {
    pub d: usize,
    pub variant: Variant,
    /// `(m, median error)`; the median is over accepted builds when any exist.
    pub medians: Vec<(usize, f64)>,
    pub fit: Option<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub slopes: Vec<SlopeRow>,
}

fn cell_seed(seed: u64, d: usize, m: usize) -> u64 {
    rng::substream(seed, &[0x5EE9, d as u64, m as u64]).next_u64()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let targets: BTreeMap<usize, _> = cfg
        .dims
        .iter()
        .map(|&d| synth_target(d, cfg.n_modes, cfg.log_exponent, cfg.target_seed).map(|t| (d, t)))
        .collect::<Result<_>>()?;
    let mut cells: Vec<(usize, usize, u64)> = Vec::new();
    for &d in targets.keys() {
        for &m in &cfg.ms {
            for &s in &cfg.seeds {
                cells.push((d, m, s));
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    // largest builds first keeps the worker pool busy
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(cells[i].1 * cells[i].0));
    let mut built: Vec<(usize, SweepRow)> = order
        .into_par_iter()
        .map(|i| {
            let (d, m, s) = cells[i];
            let seed = cell_seed(s, d, m);
            let bc = BuildConfig {
                m,
                variant: cfg.variant,
                seed,
                max_retries: cfg.max_retries,
                quad: QuadratureSpec::monte_carlo(cfg.quad_points, seed ^ 0x0000_9AD5_EED0),
                error_slack: cfg.error_slack,
            };
            let (_, rep) = build(&targets[&d], &bc)?;
            Ok((
                i,
                SweepRow {
                    d,
                    m,
                    seed: s,
                    variant: cfg.variant,
                    error: rep.error_estimate,
                    std_err: rep.error_std_err,
                    error_bound: rep.error_bound,
                    total_depth: rep.total_depth,
                    depth_bound: rep.depth_bound,
                    retries: rep.retries_used,
                    accepted: rep.accepted,
                    c_factor: rep.c_factor,
                },
            ))
        })
        .collect::<Result<_>>()?;
    built.sort_by_key(|(i, _)| *i);
    let rows: Vec<SweepRow> = built.into_iter().map(|(_, r)| r).collect();

    let mut slopes = Vec::new();
    for &d in targets.keys() {
        let mut medians = Vec::new();
        for &m in &cfg.ms {
            let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.d == d && r.m == m).collect();
            let mut errs: Vec<f64> = cell.iter().filter(|r| r.accepted).map(|r| r.error).collect();
            if errs.is_empty() {
                errs = cell.iter().map(|r| r.error).collect();
            }
            if !medians.iter().any(|(mm, _)| *mm == m) {
                medians.push((m, median(&mut errs)));
            }
        }
        medians.sort_by_key(|p| p.0);
        let pts: Vec<(f64, f64)> = medians.iter().map(|&(m, e)| (m as f64, e)).collect();
        slopes.push(SlopeRow { d, variant: cfg.variant, medians, fit: slope_fit(&pts).ok() });
    }
    Ok(SweepResult { rows, slopes })
}

impl SweepResult {
    pub fn csv(&self) -> String {
        let mut s = String::from(SWEEP_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("d,variant,slope,intercept,r2,points\n");
        for row in &self.slopes {
            let (a, b, c) = row.fit.map_or((f64::NAN, f64::NAN, f64::NAN), |f| (f.slope, f.intercept, f.r2));
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.d,
                row.variant,
                fmt_g(a, 12),
                fmt_g(b, 12),
                fmt_g(c, 12),
                row.medians.len()
            ));
        }
        s
    }

    pub fn svg(&self) -> String {
        let series: Vec<Series> = self
            .slopes
            .iter()
            .map(|r| Series {
                label: format!("d={}", r.d),
                points: r.medians.iter().map(|&(m, e)| (m as f64, e)).collect(),
            })
            .collect();
        let variant = self.slopes.first().map_or(Variant::L2, |r| r.variant);
        loglog_svg(&format!("median {variant} error vs m"), "m", "error", &series)
    }
}
