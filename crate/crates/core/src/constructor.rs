//! Randomised construction of deep narrow networks from a spectral target.
//!
//! Each build samples `m` pairs `(ξᵢ, rᵢ)`, turns every pair into a width-3
//! sub-network, merges them into one width-`(d+4)` network computing their
//! mean, and checks the result against the error and depth budgets. Failed
//! draws are resampled from the next RNG substream.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{h1_error, l2_error, ErrorEstimate, QuadratureSpec};
use crate::network::{build_subnetwork, merge, ReluNetwork, SubNetworkSpec, Variant};
use crate::rng;
use crate::spectral::{wrap_phase, FourierMode, ModeSampler, NormKind, SpectralTarget};

/// `θ = phase + k` with `k = ⌈Σ_{ξ_j<0} |ξ_j| − phase⌉`, so that
/// `ξ·x + θ ∈ [0, ‖ξ‖₁ + 1]` for every `x ∈ [0,1]^d`.
pub fn compute_theta(mode: &FourierMode) -> f64 {
    let neg: f64 = mode.xi.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
    mode.phase + (neg - mode.phase).ceil()
}

/// `x ↦ x/scale + shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: Vec<f64>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        AffineMap { scale: 1.0, shift: vec![0.0; dim] }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1.0 && self.shift.iter().all(|b| *b == 0.0)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).map(|(v, b)| v / self.scale + b).collect()
    }

    /// The map as a single affine layer.
    pub fn to_network(&self) -> ReluNetwork {
        let d = self.shift.len();
        let w = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 / self.scale } else { 0.0 }).collect())
            .collect();
        ReluNetwork::affine(w, self.shift.clone()).expect("square affine map")
    }
}

/// Rescale a target on a general box to `g(y) = f(c(y − b))` on a domain
/// inside `[0,1]^d`, with `c = diam(Ω)` and `b = −lo/c`.
///
/// Targets already inside the unit cube come back unchanged with the identity map.
pub fn rescale_to_unit(target: &SpectralTarget) -> Result<(SpectralTarget, AffineMap)> {
    rescale_to_unit_with(target, 0.0)
}

/// As [`rescale_to_unit`] but with `c = max(min_scale, diam(Ω))`.
pub fn rescale_to_unit_with(target: &SpectralTarget, min_scale: f64) -> Result<(SpectralTarget, AffineMap)> {
    let dom = target.domain();
    let diam = dom.diameter();
    if !(diam > 0.0) {
        return Err(Error::DegenerateDomain(format!("domain diameter is {diam}")));
    }
    if dom.within_unit_cube() {
        return Ok((target.clone(), AffineMap::identity(target.dim())));
    }
    let c = diam.max(min_scale);
    let shift: Vec<f64> = dom.lo.iter().map(|l| (0.0 - l) / c).collect();
    let modes = target
        .modes()
        .iter()
        .map(|m| {
            let xi: Vec<f64> = m.xi.iter().map(|v| c * v).collect();
            // φ − cξ·b with b = −lo/c is φ + ξ·lo
            let shifted = m.phase + m.xi.iter().zip(&dom.lo).map(|(x, l)| x * l).sum::<f64>();
            FourierMode::new(xi, m.amplitude, wrap_phase(shifted))
        })
        .collect::<Result<Vec<_>>>()?;
    let lo = vec![0.0; target.dim()];
    let hi: Vec<f64> = dom.edges().map(|e| (e / c).min(1.0)).collect();
    let g = SpectralTarget::new(target.dim(), crate::spectral::DomainBox::new(lo, hi)?, modes)?;
    Ok((g, AffineMap { scale: c, shift }))
}

/// Draw `m` i.i.d. pairs `(mode index, r)`: indices follow the variant's
/// weighting, `r` is uniform on `[−1/2, 1/2]`.
pub fn sample_pairs<R: Rng + ?Sized>(
    target: &SpectralTarget,
    m: usize,
    variant: Variant,
    rng: &mut R,
) -> Result<Vec<(usize, f64)>> {
    if m == 0 {
        return Err(Error::param("m must be >= 1"));
    }
    let sampler = ModeSampler::new(target, variant.sampling_weight())?;
    Ok((0..m)
        .map(|_| {
            let idx = sampler.sample(rng);
            (idx, rng.random_range(-0.5..=0.5))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub m: usize,
    pub variant: Variant,
    pub seed: u64,
    pub max_retries: usize,
    pub quad: QuadratureSpec,
    /// Multiplier on the theorem's error bound used for acceptance.
    pub error_slack: f64,
}

impl BuildConfig {
    pub fn new(m: usize, variant: Variant, seed: u64) -> Self {
        BuildConfig {
            m,
            variant,
            seed,
            max_retries: 16,
            quad: QuadratureSpec::monte_carlo(4096, seed),
            error_slack: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("m must be >= 1"));
        }
        if self.max_retries == 0 {
            return Err(Error::param("max_retries must be >= 1"));
        }
        if !(self.error_slack >= 1.0 && self.error_slack.is_finite()) {
            return Err(Error::param(format!("error_slack must be >= 1, got {}", self.error_slack)));
        }
        Ok(())
    }
}

/// One sampled atom as recorded in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledPair {
    pub mode_index: usize,
    pub r: f64,
    pub depth_l: usize,
}

/// Barron-type norms of the original target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetNorms {
    pub b0: f64,
    pub blog: f64,
    pub b1: f64,
    pub b1log: f64,
}

impl TargetNorms {
    pub fn of(f: &SpectralTarget) -> Self {
        TargetNorms {
            b0: f.norm(NormKind::B0),
            blog: f.norm(NormKind::Blog),
            b1: f.norm(NormKind::Bs(1.0)),
            b1log: f.norm(NormKind::BsLog(1.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub variant: Variant,
    pub m: usize,
    pub seed: u64,
    pub error_estimate: f64,
    pub error_std_err: f64,
    /// Theorem right-hand side, including the domain factor.
    pub error_bound: f64,
    pub error_slack: f64,
    /// `error_slack·error_bound + 2·error_std_err`.
    pub error_threshold: f64,
    /// `Σ Lᵢ` over the sampled atoms.
    pub total_depth: usize,
    pub depth_bound: f64,
    /// Number of hidden layers of the merged network.
    pub hidden_layers: usize,
    /// `6m` times the depth ratio and domain factor.
    pub hidden_layers_bound: f64,
    pub width: usize,
    pub param_count: usize,
    pub retries_used: usize,
    pub accepted: bool,
    pub rescale: AffineMap,
    pub norms: TargetNorms,
    pub domain_volume: f64,
    /// `C₁` (L2) or `C₂` (H1) for general domains, 1 on the unit cube.
    pub c_factor: f64,
    /// Factor applied to the depth budget for general domains.
    pub depth_factor: f64,
    pub quad: QuadratureSpec,
    pub samples: Vec<SampledPair>,
}

impl BuildReport {
    /// Re-evaluates the acceptance inequalities from the stored fields.
    pub fn satisfies_bounds(&self) -> bool {
        self.error_estimate <= self.error_slack * self.error_bound + 2.0 * self.error_std_err
            && self.total_depth as f64 <= self.depth_bound
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `2π²/√m · |Ω|^{1/2} · ‖f‖_{B⁰}`.
pub fn l2_error_bound(m: usize, volume: f64, b0: f64) -> f64 {
    2.0 * PI * PI / (m as f64).sqrt() * volume.sqrt() * b0
}

/// `4π²/√m · |Ω|^{1/2} · ‖f‖_{B¹}`.
pub fn h1_error_bound(m: usize, volume: f64, b1: f64) -> f64 {
    4.0 * PI * PI / (m as f64).sqrt() * volume.sqrt() * b1
}

/// `5m · ratio`, where the ratio is `‖f‖_{B^log}/‖f‖_{B⁰}` or its `B¹` analogue.
pub fn depth_budget(m: usize, ratio: f64) -> f64 {
    5.0 * m as f64 * ratio
}

struct Attempt {
    net: ReluNetwork,
    err: ErrorEstimate,
    samples: Vec<SampledPair>,
    total_depth: usize,
    score: f64,
    accepted: bool,
}

/// Builds toward the L² guarantee.
pub fn build_l2(target: &SpectralTarget, config: &BuildConfig) -> Result<(ReluNetwork, BuildReport)> {
    build(target, &BuildConfig { variant: Variant::L2, ..config.clone() })
}

/// Builds toward the H¹ guarantee.
pub fn build_h1(target: &SpectralTarget, config: &BuildConfig) -> Result<(ReluNetwork, BuildReport)> {
    build(target, &BuildConfig { variant: Variant::H1, ..config.clone() })
}

/// Dispatches on `config.variant`.
pub fn build(target: &SpectralTarget, config: &BuildConfig) -> Result<(ReluNetwork, BuildReport)> {
    config.validate()?;
    config.quad.validate(target.dim())?;
    let variant = config.variant;
    let unit = target.domain().within_unit_cube();
    let (g, map) = match variant {
        Variant::L2 => rescale_to_unit(target)?,
        Variant::H1 => rescale_to_unit_with(target, 1.0)?,
    };
    let diam = target.domain().diameter();
    let (c_factor, depth_factor) = match (unit, variant) {
        (true, _) => (1.0, 1.0),
        (false, Variant::L2) => {
            let c1 = (2.0 + diam).log2();
            (c1, c1)
        }
        (false, Variant::H1) => {
            let c2 = diam.max(1.0);
            (c2, c2 * (2.0 + c2).log2())
        }
    };

    let norms = TargetNorms::of(target);
    let volume = target.domain().volume();
    let m = config.m;
    let (error_bound, ratio) = match variant {
        Variant::L2 => (l2_error_bound(m, volume, norms.b0), norms.blog / norms.b0),
        Variant::H1 => (c_factor * h1_error_bound(m, volume, norms.b1), norms.b1log / norms.b1),
    };
    if !ratio.is_finite() {
        return Err(Error::DegenerateSpectrum);
    }
    let depth_bound = depth_factor * depth_budget(m, ratio);
    let offset = 2.0 * PI * PI * g.norm(variant.sampling_weight());
    let pre = (!map.is_identity()).then(|| map.to_network());

    let mut best: Option<Attempt> = None;
    let mut attempts = 0;
    for attempt in 0..config.max_retries {
        attempts = attempt + 1;
        let mut rng = rng::substream(config.seed, &[0xB11D, attempt as u64]);
        let pairs = sample_pairs(&g, m, variant, &mut rng)?;
        let mut samples = Vec::with_capacity(m);
        let mut subnets = Vec::with_capacity(m);
        for &(idx, r) in &pairs {
            let spec = SubNetworkSpec::new(&g, idx, r, variant)?;
            samples.push(SampledPair { mode_index: idx, r, depth_l: spec.depth_l });
            subnets.push(build_subnetwork(&g, &spec)?);
        }
        let merged = merge(&subnets, offset, g.domain())?;
        drop(subnets);
        let net = match &pre {
            Some(p) => ReluNetwork::compose(&merged, p)?,
            None => merged,
        };
        let err = match variant {
            Variant::L2 => l2_error(target, &net, &config.quad)?,
            Variant::H1 => h1_error(target, &net, &config.quad)?,
        };
        let total_depth: usize = samples.iter().map(|s| s.depth_l).sum();
        let threshold = config.error_slack * error_bound + 2.0 * err.std_err;
        let score = (err.estimate / threshold).max(total_depth as f64 / depth_bound);
        let accepted = err.estimate <= threshold && total_depth as f64 <= depth_bound;
        let current = Attempt { net, err, samples, total_depth, score, accepted };
        if accepted {
            best = Some(current);
            break;
        }
        if best.as_ref().is_none_or(|b| current.score < b.score) {
            best = Some(current);
        }
    }
    let best = best.expect("max_retries >= 1");
    let report = BuildReport {
        variant,
        m,
        seed: config.seed,
        error_estimate: best.err.estimate,
        error_std_err: best.err.std_err,
        error_bound,
        error_slack: config.error_slack,
        error_threshold: config.error_slack * error_bound + 2.0 * best.err.std_err,
        total_depth: best.total_depth,
        depth_bound,
        hidden_layers: best.net.hidden_layers(),
        hidden_layers_bound: 6.0 * m as f64 * ratio * depth_factor,
        width: best.net.width(),
        param_count: best.net.param_count(),
        retries_used: attempts - 1,
        accepted: best.accepted,
        rescale: map,
        norms,
        domain_volume: volume,
        c_factor,
        depth_factor,
        quad: config.quad,
        samples: best.samples,
    };
    Ok((best.net, report))
}
