use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{build_beta_chain, build_gamma_tail, ReluNetwork};
use crate::constructor::compute_theta;
use crate::error::{Error, Result};
use crate::spectral::{NormKind, SpectralTarget};

/// Which error norm the construction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    L2,
    H1,
}

impl Variant {
    /// Weighting of the sampling measure over atoms.
    pub fn sampling_weight(self) -> NormKind {
        match self {
            Variant::L2 => NormKind::B0,
            Variant::H1 => NormKind::Bs(1.0),
        }
    }

    /// Norm whose log-weighted counterpart controls the depth budget.
    pub fn depth_norm(self) -> NormKind {
        match self {
            Variant::L2 => NormKind::Blog,
            Variant::H1 => NormKind::BsLog(1.0),
        }
    }

    /// Per-atom amplitude normaliser: `‖f‖_{B⁰}` or `‖f‖_{B¹}/(1 + ‖ξ‖₁)`.
    pub fn amplitude_norm(self, target_norm: f64, l1: f64) -> f64 {
        match self {
            Variant::L2 => target_norm,
            Variant::H1 => target_norm / (1.0 + l1),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::L2 => "L2",
            Variant::H1 => "H1",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "L2" => Ok(Variant::L2),
            "H1" => Ok(Variant::H1),
            _ => Err(Error::param(format!("unknown variant '{s}' (expected L2 or H1)"))),
        }
    }
}

/// Parameters of one sampled sub-network `F(x; ξ, r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubNetworkSpec {
    pub mode_index: usize,
    pub r: f64,
    /// `⌈log₂(2 + ‖ξ‖₁)⌉`; the sub-network holds this many β layers.
    pub depth_l: usize,
    pub theta: f64,
    /// Output coefficient `−2π²·Norm·cos(2πr)`.
    pub scale: f64,
}

impl SubNetworkSpec {
    pub fn new(target: &SpectralTarget, mode_index: usize, r: f64, variant: Variant) -> Result<Self> {
        let mode = target
            .modes()
            .get(mode_index)
            .ok_or_else(|| Error::param(format!("mode index {mode_index} out of range")))?;
        if !(r.abs() <= 0.5) {
            return Err(Error::param(format!("r must satisfy |r| <= 1/2, got {r}")));
        }
        let norm = target.norm(variant.sampling_weight());
        let amp = variant.amplitude_norm(norm, mode.l1());
        Ok(SubNetworkSpec {
            mode_index,
            r,
            depth_l: mode.depth_units(),
            theta: compute_theta(mode),
            scale: -2.0 * PI * PI * amp * (2.0 * PI * r).cos(),
        })
    }

    /// `n_ξ = 2^{L_ξ}`.
    pub fn n_xi(&self) -> f64 {
        (1u64 << self.depth_l) as f64
    }
}

/// Width-3 network computing `scale · γ(n_ξ·t_ξ(x) mod 1, r)` with
/// `t_ξ(x) = (ξ·x + θ)/n_ξ`.
///
/// Layout: the input affine map is fused into the first of `depth_l` β layers,
/// followed by one γ layer and the scaled output, so the network has
/// `depth_l + 1` hidden layers.
pub fn build_subnetwork(target: &SpectralTarget, spec: &SubNetworkSpec) -> Result<ReluNetwork> {
    let mode = target
        .modes()
        .get(spec.mode_index)
        .ok_or_else(|| Error::param(format!("mode index {} out of range", spec.mode_index)))?;
    if !target.domain().within_unit_cube() {
        return Err(Error::Precondition(
            "sub-networks need a domain inside [0,1]^d; rescale the target first".into(),
        ));
    }
    if spec.depth_l != mode.depth_units() {
        return Err(Error::Precondition(format!(
            "depth_l = {} but mode {} needs {}",
            spec.depth_l,
            spec.mode_index,
            mode.depth_units()
        )));
    }
    let n = spec.n_xi();
    let domain = target.domain();
    let (mut lo, mut hi) = (spec.theta, spec.theta);
    for ((&x, &a), &b) in mode.xi.iter().zip(&domain.lo).zip(&domain.hi) {
        lo += (x * a).min(x * b);
        hi += (x * a).max(x * b);
    }
    let tol = 1e-12 * (1.0 + mode.l1());
    if lo < -tol || hi > n + tol {
        return Err(Error::Precondition(format!(
            "t_xi leaves [0,1] on the domain: xi.x + theta spans [{lo}, {hi}] with n_xi = {n}"
        )));
    }

    let input = ReluNetwork::affine(
        vec![mode.xi.iter().map(|v| v / n).collect()],
        vec![spec.theta / n],
    )?;
    let chain = ReluNetwork::compose(&build_beta_chain(spec.depth_l), &input)?;
    let net = ReluNetwork::compose(&build_gamma_tail(spec.r)?, &chain)?;
    net.scale_output(spec.scale, 0.0)
}
