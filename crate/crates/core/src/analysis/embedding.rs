use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShellConstruction {
    /// Coefficients `c_k = 2^{−(d/2+s)k}/k` on Euclidean shells.
    Prop42,
    /// Spikes `m_k = k^p 2^k` on sets of measure `k^{−2p} 2^{−k}`; needs `p > 2`.
    Prop43 { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpectrum {
    pub d: usize,
    pub s: f64,
    pub construction: ShellConstruction,
    /// Largest shell index `K`.
    pub k_max: usize,
}

impl ShellSpectrum {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::param("d must be >= 1"));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::param(format!("s must be >= 0, got {}", self.s)));
        }
        if self.k_max < 1 {
            return Err(Error::param("K must be >= 1"));
        }
        if let ShellConstruction::Prop43 { p } = self.construction {
            if !(p > 2.0 && p.is_finite()) {
                return Err(Error::param(format!("construction needs p > 2, got {p}")));
            }
        }
        Ok(())
    }
}

/// One shell; all quantities are base-2 logarithms so that nothing overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub k: usize,
    pub log2_hs_increment: f64,
    pub log2_hs_partial: f64,
    pub log2_blog_increment: f64,
    pub log2_blog_partial: f64,
}

/// Tail diagnostics of one partial-sum sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBehavior {
    /// Last increment below `1e−9` times the running sum.
    pub strict_cauchy: bool,
    /// Ratio of the last two increments.
    pub last_ratio: f64,
    /// Local power-law exponent of the increments between `K/2` and `K`.
    pub tail_exponent: f64,
    pub geometric_growth: bool,
    /// Increments decay faster than `1/k` (power-law exponent below −1.1).
    pub convergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTable {
    pub spec: ShellSpectrum,
    pub rows: Vec<SeriesRow>,
    pub hs: SeriesBehavior,
    pub blog: SeriesBehavior,
}

impl SeriesTable {
    /// Ratio of consecutive H^s increments at shell `k`.
    pub fn hs_ratio_at(&self, k: usize) -> Option<f64> {
        let i = self.rows.iter().position(|r| r.k == k)?;
        (i > 0).then(|| (self.rows[i].log2_hs_increment - self.rows[i - 1].log2_hs_increment).exp2())
    }
}

fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// Volume of the Euclidean unit ball in ℝ^d.
pub(crate) fn unit_ball_volume(d: usize) -> f64 {
    let mut v = if d.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

fn behavior(log_inc: &[f64], log_partial: &[f64]) -> SeriesBehavior {
    let k = log_inc.len();
    let last = log_inc[k - 1];
    let strict_cauchy = last < log_partial[k - 1] + 1e-9f64.log2();
    if k < 2 {
        return SeriesBehavior {
            strict_cauchy,
            last_ratio: f64::NAN,
            tail_exponent: f64::NAN,
            geometric_growth: false,
            convergent: strict_cauchy,
        };
    }
    let last_ratio = (last - log_inc[k - 2]).exp2();
    let half = k.div_ceil(2);
    let tail_exponent = (last - log_inc[half - 1]) / (k as f64 / half as f64).log2();
    SeriesBehavior {
        strict_cauchy,
        last_ratio,
        tail_exponent,
        geometric_growth: last_ratio > 1.01,
        convergent: tail_exponent < -1.1,
    }
}

/// Partial sums of the per-shell norm bounds for shells `k = 1, …, K`.
pub fn embedding_series(spec: &ShellSpectrum) -> Result<SeriesTable> {
    spec.validate()?;
    let d = spec.d as f64;
    let s = spec.s;
    let mut rows = Vec::with_capacity(spec.k_max);
    let (mut hs, mut blog) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in 1..=spec.k_max {
        let kf = k as f64;
        let (lh, lb) = match spec.construction {
            ShellConstruction::Prop42 => {
                // vol(A_k) = V_d (2^d − 1) 2^{dk}, c_k = 2^{−(d/2+s)k}/k
                let log_vol = unit_ball_volume(spec.d).log2() + (d.exp2() - 1.0).log2() + d * kf;
                let log_c = -(d / 2.0 + s) * kf - kf.log2();
                (2.0 * s * kf + 2.0 * log_c + log_vol, kf.log2() + log_c + log_vol)
            }
            ShellConstruction::Prop43 { p } => {
                // m_k = k^p 2^k, |E_k| = k^{−2p} 2^{−k}
                let log_m = p * kf.log2() + kf;
                let log_e = -2.0 * p * kf.log2() - kf;
                let hs_inc = s * (2.0 / d.sqrt()).log2() + s * kf + 2.0 * log_m + log_e;
                (hs_inc, 1.0 + kf.log2() + log_m + log_e)
            }
        };
        hs = log2_add(hs, lh);
        blog = log2_add(blog, lb);
        rows.push(SeriesRow {
            k,
            log2_hs_increment: lh,
            log2_hs_partial: hs,
            log2_blog_increment: lb,
            log2_blog_partial: blog,
        });
    }
    let col = |f: fn(&SeriesRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let hs_b = behavior(&col(|r| r.log2_hs_increment), &col(|r| r.log2_hs_partial));
    let blog_b = behavior(&col(|r| r.log2_blog_increment), &col(|r| r.log2_blog_partial));
    Ok(SeriesTable { spec: *spec, rows, hs: hs_b, blog: blog_b })
}
