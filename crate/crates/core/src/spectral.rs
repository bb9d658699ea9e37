//! Spectral targets: finite sums of Fourier modes and their Barron-type norms.
//!
//! A target is stored in amplitude/phase cosine form,
//!
//! ```text
//! f(x) = Σ_j A_j cos(2π(ξ_j·x + φ_j))
//! ```
//!
//! with frequencies in cycles per unit length and phases in turns. Conjugate
//! frequency pairs are implicit, so every target is real-valued.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng;

/// Axis-aligned box `[lo_1, hi_1] × … × [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let domain = DomainBox { lo, hi };
        domain.validate()?;
        Ok(domain)
    }

    /// The unit cube `[0,1]^d`.
    pub fn unit(dim: usize) -> Self {
        DomainBox { lo: vec![0.0; dim], hi: vec![1.0; dim] }
    }

    fn validate(&self) -> Result<()> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() {
            return Err(Error::InvalidTarget(format!(
                "domain bounds have lengths {} and {}",
                self.lo.len(),
                self.hi.len()
            )));
        }
        for (i, (&a, &b)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !a.is_finite() || !b.is_finite() || b <= a {
                return Err(Error::InvalidTarget(format!(
                    "domain axis {i} is [{a}, {b}]; need finite lo < hi"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = f64> + '_ {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a)
    }

    /// Lebesgue measure `|Ω|`.
    pub fn volume(&self) -> f64 {
        self.edges().product()
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        self.edges().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&v, (&a, &b))| v >= a && v <= b)
    }

    pub fn within_unit_cube(&self) -> bool {
        self.lo.iter().all(|&a| a >= 0.0) && self.hi.iter().all(|&b| b <= 1.0)
    }

    /// All `2^d` corners. Only sensible for small `d`.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] })
                    .collect()
            })
            .collect()
    }

    /// Map a point of the unit cube onto the box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&t, (&a, &b))| a + t * (b - a))
            .collect()
    }
}

/// One atom of the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub xi: Vec<f64>,
    pub amplitude: f64,
    /// Phase in turns, in `[0, 1)`.
    pub phase: f64,
}

/// Reduce a phase in turns to `[0, 1)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(1.0);
    if p >= 1.0 {
        0.0
    } else {
        p
    }
}

impl FourierMode {
    pub fn new(xi: Vec<f64>, amplitude: f64, phase: f64) -> Result<Self> {
        let mode = FourierMode { xi, amplitude, phase };
        mode.validate()?;
        Ok(mode)
    }

    fn validate(&self) -> Result<()> {
        if self.xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTarget("non-finite frequency component".into()));
        }
        if !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(Error::InvalidTarget(format!(
                "amplitude must be finite and nonnegative, got {}",
                self.amplitude
            )));
        }
        if !(0.0..1.0).contains(&self.phase) {
            return Err(Error::InvalidTarget(format!("phase {} outside [0, 1)", self.phase)));
        }
        Ok(())
    }

    pub fn l1(&self) -> f64 {
        self.xi.iter().map(|v| v.abs()).sum()
    }

    /// `⌈log₂(2 + ‖ξ‖₁)⌉`, the number of β layers the mode needs.
    pub fn depth_units(&self) -> usize {
        depth_units(self.l1())
    }

    fn argument(&self, x: &[f64]) -> f64 {
        2.0 * PI * (dot(&self.xi, x) + self.phase)
    }
}

/// `⌈log₂(2 + t)⌉` for `t ≥ 0`, computed exactly as the smallest `L` with `2^L ≥ 2 + t`.
pub fn depth_units(l1: f64) -> usize {
    let target = 2.0 + l1;
    let mut level = 1;
    let mut pow = 2.0;
    while pow < target {
        pow *= 2.0;
        level += 1;
    }
    level
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Which Barron-type weight to apply to each atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "s")]
pub enum NormKind {
    /// `Σ A_j`
    B0,
    /// `Σ (1 + ‖ξ_j‖₁^s) A_j`
    Bs(f64),
    /// `Σ log₂(2 + ‖ξ_j‖₁) A_j`
    Blog,
    /// `Σ (1 + ‖ξ_j‖₁^s) log₂(2 + ‖ξ_j‖₁) A_j`
    BsLog(f64),
}

impl NormKind {
    pub fn weight(self, l1: f64) -> f64 {
        match self {
            NormKind::B0 => 1.0,
            NormKind::Bs(s) => 1.0 + l1.powf(s),
            NormKind::Blog => (2.0 + l1).log2(),
            NormKind::BsLog(s) => (1.0 + l1.powf(s)) * (2.0 + l1).log2(),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            NormKind::Bs(s) | NormKind::BsLog(s) if !(s > 0.0 && s.is_finite()) => {
                Err(Error::param(format!("norm order must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::B0 => write!(f, "B0"),
            NormKind::Bs(s) => write!(f, "B{s}"),
            NormKind::Blog => write!(f, "Blog"),
            NormKind::BsLog(s) => write!(f, "B{s}log"),
        }
    }
}

#[derive(Deserialize)]
struct RawTarget {
    dim: usize,
    domain: DomainBox,
    modes: Vec<FourierMode>,
}

/// A function given by a finite list of Fourier modes on a box domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTarget")]
pub struct SpectralTarget {
    dim: usize,
    domain: DomainBox,
    modes: Vec<FourierMode>,
}

impl TryFrom<RawTarget> for SpectralTarget {
    type Error = Error;

    fn try_from(raw: RawTarget) -> Result<Self> {
        SpectralTarget::new(raw.dim, raw.domain, raw.modes)
    }
}

impl SpectralTarget {
    pub fn new(dim: usize, domain: DomainBox, modes: Vec<FourierMode>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTarget("dimension must be positive".into()));
        }
        if modes.is_empty() {
            return Err(Error::InvalidTarget("target needs at least one mode".into()));
        }
        domain.validate()?;
        if domain.dim() != dim {
            return Err(Error::InvalidTarget(format!(
                "domain has dimension {}, target has {dim}",
                domain.dim()
            )));
        }
        for (j, m) in modes.iter().enumerate() {
            if m.xi.len() != dim {
                return Err(Error::InvalidTarget(format!(
                    "mode {j} has {} frequency components, expected {dim}",
                    m.xi.len()
                )));
            }
            m.validate()?;
        }
        Ok(SpectralTarget { dim, domain, modes })
    }

    /// Target on the unit cube.
    pub fn on_unit_cube(modes: Vec<FourierMode>) -> Result<Self> {
        let dim = modes.first().map(|m| m.xi.len()).unwrap_or(0);
        Self::new(dim, DomainBox::unit(dim), modes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn modes(&self) -> &[FourierMode] {
        &self.modes
    }

    pub fn with_domain(&self, domain: DomainBox) -> Result<Self> {
        Self::new(self.dim, domain, self.modes.clone())
    }

    /// `f(x) = Σ A_j cos(2π(ξ_j·x + φ_j))`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        self.modes.iter().map(|m| m.amplitude * m.argument(x).cos()).sum()
    }

    /// `∂f/∂x_i = −2π Σ_j A_j ξ_j^(i) sin(2π(ξ_j·x + φ_j))`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok(self.gradient_unchecked(x))
    }

    pub(crate) fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for m in &self.modes {
            let c = -2.0 * PI * m.amplitude * m.argument(x).sin();
            for (gi, xi) in g.iter_mut().zip(&m.xi) {
                *gi += c * xi;
            }
        }
        g
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        self.modes.iter().map(|m| kind.weight(m.l1()) * m.amplitude).sum()
    }

    /// Concatenate the mode lists of two targets on the same domain.
    pub fn concat(&self, other: &SpectralTarget) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Self::new(self.dim, self.domain.clone(), modes)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

/// Categorical sampler over the atoms, weighted by `w(ξ_j)·A_j`.
#[derive(Debug, Clone)]
pub struct ModeSampler {
    cumulative: Vec<f64>,
}

impl ModeSampler {
    pub fn new(target: &SpectralTarget, weighting: NormKind) -> Result<Self> {
        weighting.validate()?;
        let mut acc = 0.0;
        let cumulative: Vec<f64> = target
            .modes
            .iter()
            .map(|m| {
                acc += weighting.weight(m.l1()) * m.amplitude;
                acc
            })
            .collect();
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(Error::DegenerateSpectrum);
        }
        Ok(ModeSampler { cumulative })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total();
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = (c - prev) / total;
                prev = c;
                p
            })
            .collect()
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().expect("sampler has at least one mode")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total();
        // first index whose cumulative weight exceeds u; zero-weight atoms are never chosen
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Draw one mode index with probability proportional to `w(ξ_j)·A_j`.
pub fn sample_frequency<R: Rng + ?Sized>(
    target: &SpectralTarget,
    weighting: NormKind,
    rng: &mut R,
) -> Result<usize> {
    Ok(ModeSampler::new(target, weighting)?.sample(rng))
}

pub const SYNTH_RADIUS_MIN: f64 = 0.5;
pub const SYNTH_RADIUS_MAX: f64 = 4096.0;
pub const SYNTH_LATTICE: f64 = 0.5;

/// Decay envelope `(1 + ‖ξ‖₁^d)^{-1} · log₂(2 + ‖ξ‖₁)^{-p}` of the synthetic family.
pub fn envelope_amplitude(l1: f64, dim: usize, log_exponent: f64) -> f64 {
    1.0 / (1.0 + l1.powi(dim as i32)) / (2.0 + l1).log2().powf(log_exponent)
}

/// Synthetic target on `[0,1]^d` with `n_modes` atoms under the decay envelope.
///
/// Frequencies have an ℓ1 radius drawn log-uniformly from
/// `[SYNTH_RADIUS_MIN, SYNTH_RADIUS_MAX]`, a Gaussian direction, and are
/// rounded to the `SYNTH_LATTICE` grid (never to the zero vector). Phases are
/// uniform.
pub fn synth_target(d: usize, n_modes: usize, log_exponent: f64, seed: u64) -> Result<SpectralTarget> {
    if d == 0 || n_modes == 0 {
        return Err(Error::param("synth_target needs d >= 1 and n_modes >= 1"));
    }
    if !(log_exponent > 1.0) || !log_exponent.is_finite() {
        return Err(Error::param(format!("log_exponent must exceed 1, got {log_exponent}")));
    }
    let mut rng = rng::substream(seed, &[0x5EED_7A26, d as u64, n_modes as u64]);
    let (lo, hi) = (SYNTH_RADIUS_MIN.ln(), SYNTH_RADIUS_MAX.ln());
    let modes = (0..n_modes)
        .map(|_| {
            let radius = (lo + (hi - lo) * rng.random::<f64>()).exp();
            let dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm1: f64 = dir.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
            let mut xi: Vec<f64> = dir
                .iter()
                .map(|v| (v / norm1 * radius / SYNTH_LATTICE).round() * SYNTH_LATTICE)
                .collect();
            if xi.iter().all(|&v| v == 0.0) {
                let (k, &v) = dir
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .expect("d >= 1");
                xi[k] = SYNTH_LATTICE.copysign(v);
            }
            let l1: f64 = xi.iter().map(|v| v.abs()).sum();
            let phase = wrap_phase(rng.random::<f64>());
            FourierMode { xi, amplitude: envelope_amplitude(l1, d, log_exponent), phase }
        })
        .collect();
    SpectralTarget::new(d, DomainBox::unit(d), modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(xi: Vec<f64>, a: f64, phase: f64) -> SpectralTarget {
        SpectralTarget::on_unit_cube(vec![FourierMode::new(xi, a, phase).unwrap()]).unwrap()
    }

    /// Independent summation oracle written against the raw formula.
    fn oracle_value(modes: &[(Vec<f64>, f64, f64)], x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (xi, a, p) in modes {
            let mut arg = *p;
            for k in 0..x.len() {
                arg += xi[k] * x[k];
            }
            total += a * (std::f64::consts::TAU * arg).cos();
        }
        total
    }

    #[test]
    fn evaluate_single_mode() {
        let f = single(vec![2.0, 0.0], 0.5, 0.0);
        assert_eq!(f.evaluate(&[0.0, 0.0]).unwrap(), 0.5);
        assert!((f.evaluate(&[0.25, 0.7]).unwrap() + 0.5).abs() < 1e-15);
        assert!(matches!(f.evaluate(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn evaluate_matches_summation_oracle() {
        let f = synth_target(2, 64, 3.0, 11).unwrap();
        let raw: Vec<_> = f.modes().iter().map(|m| (m.xi.clone(), m.amplitude, m.phase)).collect();
        let mut rng = rng::stream(3);
        for _ in 0..10 {
            let x: Vec<f64> = (0..2).map(|_| rng.random()).collect();
            let got = f.evaluate(&x).unwrap();
            assert!((got - oracle_value(&raw, &x)).abs() <= 1e-12, "{got}");
        }
    }

    #[test]
    fn gradient_examples() {
        let f = single(vec![2.0, 0.0], 0.5, 0.0);
        let g = f.gradient(&[0.0, 0.0]).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));
        let f = single(vec![1.0], 1.0, 0.0);
        let g = f.gradient(&[0.25]).unwrap();
        assert!((g[0] + 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut modes = Vec::new();
        let mut rng = rng::stream(5);
        for _ in 0..6 {
            let xi: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            modes.push(FourierMode::new(xi, rng.random_range(0.1..1.0), rng.random()).unwrap());
        }
        let f = SpectralTarget::on_unit_cube(modes).unwrap();
        let h = 1e-5;
        for _ in 0..20 {
            let x: Vec<f64> = (0..8).map(|_| rng.random()).collect();
            let g = f.gradient(&x).unwrap();
            let scale = g.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
            for i in 0..8 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (f.evaluate(&xp).unwrap() - f.evaluate(&xm).unwrap()) / (2.0 * h);
                assert!((fd - g[i]).abs() / scale <= 1e-6, "axis {i}: {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn norm_single_atom_arithmetic() {
        let f = single(vec![2.0, 0.0], 0.5, 0.0);
        assert_eq!(f.norm(NormKind::B0), 0.5);
        assert_eq!(f.norm(NormKind::Blog), 1.0);
        assert_eq!(f.norm(NormKind::Bs(1.0)), 1.5);
        assert_eq!(f.norm(NormKind::BsLog(1.0)), 3.0);
        let c = single(vec![0.0, 0.0], 1.0, 0.0);
        assert_eq!(c.norm(NormKind::Blog), 1.0);
    }

    #[test]
    fn norm_ordering_on_random_targets() {
        for seed in 0..8 {
            let f = synth_target(8, 64, 3.0, seed).unwrap();
            let b0 = f.norm(NormKind::B0);
            assert!(f.norm(NormKind::Blog) >= b0);
            assert!(f.norm(NormKind::BsLog(1.0)) >= f.norm(NormKind::Bs(1.0)));
            assert!(f.norm(NormKind::Bs(1.0)) >= b0);
        }
    }

    #[test]
    fn envelope_arithmetic() {
        // ‖ξ‖₁ = 2, d = 2: (1/5)·(1/2³)
        assert!((envelope_amplitude(2.0, 2, 3.0) - 0.025).abs() < 1e-15);
    }

    #[test]
    fn synth_is_deterministic_and_valid() {
        let a = synth_target(8, 64, 3.0, 42).unwrap();
        let b = synth_target(8, 64, 3.0, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, synth_target(8, 64, 3.0, 43).unwrap());
        for m in a.modes() {
            assert!(m.l1() >= SYNTH_LATTICE);
            assert!(m.xi.iter().all(|v| (v / SYNTH_LATTICE).fract() == 0.0));
            assert!((m.amplitude - envelope_amplitude(m.l1(), 8, 3.0)).abs() < 1e-18);
        }
        let ratio = a.norm(NormKind::Blog) / a.norm(NormKind::B0);
        assert!(ratio.is_finite() && ratio > 1.0);
        assert!(synth_target(2, 4, 1.0, 0).is_err());
        assert!(synth_target(0, 4, 2.0, 0).is_err());
    }

    #[test]
    fn synth_single_mode_follows_envelope() {
        let f = synth_target(2, 1, 3.0, 9).unwrap();
        let m = &f.modes()[0];
        assert_eq!(m.amplitude, envelope_amplitude(m.l1(), 2, 3.0));
    }

    #[test]
    fn sampler_degenerate_and_weighted() {
        let f = SpectralTarget::on_unit_cube(vec![
            FourierMode::new(vec![1.0], 1.0, 0.0).unwrap(),
            FourierMode::new(vec![2.0], 0.0, 0.0).unwrap(),
        ])
        .unwrap();
        let mut rng = rng::stream(1);
        for _ in 0..1000 {
            assert_eq!(sample_frequency(&f, NormKind::B0, &mut rng).unwrap(), 0);
        }
        let g = SpectralTarget::on_unit_cube(vec![
            FourierMode::new(vec![0.0], 1.0, 0.0).unwrap(),
            FourierMode::new(vec![3.0], 1.0, 0.0).unwrap(),
        ])
        .unwrap();
        let p = ModeSampler::new(&g, NormKind::Bs(1.0)).unwrap().probabilities();
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        let z = SpectralTarget::on_unit_cube(vec![FourierMode::new(vec![1.0], 0.0, 0.0).unwrap()])
            .unwrap();
        assert!(matches!(ModeSampler::new(&z, NormKind::B0), Err(Error::DegenerateSpectrum)));
    }

    #[test]
    fn sampler_law_of_large_numbers() {
        let f = SpectralTarget::on_unit_cube(vec![
            FourierMode::new(vec![1.0, 0.0], 1.0, 0.0).unwrap(),
            FourierMode::new(vec![0.0, -1.0], 1.0, 0.5).unwrap(),
        ])
        .unwrap();
        let s = ModeSampler::new(&f, NormKind::B0).unwrap();
        let mut rng = rng::stream(77);
        let n = 100_000;
        let hits = (0..n).filter(|_| s.sample(&mut rng) == 0).count();
        assert!((hits as f64 / n as f64 - 0.5).abs() <= 0.01);
    }

    #[test]
    fn json_rejects_invalid_documents() {
        let ok = r#"{"dim":1,"domain":{"lo":[0],"hi":[1]},"modes":[{"xi":[2],"amplitude":0.5,"phase":0.25}]}"#;
        let f = SpectralTarget::from_json_str(ok).unwrap();
        assert_eq!(SpectralTarget::from_json_str(&f.to_json_string().unwrap()).unwrap(), f);
        for bad in [
            r#"{"dim":1,"domain":{"lo":[0],"hi":[1]},"modes":[]}"#,
            r#"{"dim":2,"domain":{"lo":[0],"hi":[1]},"modes":[{"xi":[2],"amplitude":0.5,"phase":0}]}"#,
            r#"{"dim":1,"domain":{"lo":[0],"hi":[1]},"modes":[{"xi":[2],"amplitude":-1,"phase":0}]}"#,
            r#"{"dim":1,"domain":{"lo":[0],"hi":[1]},"modes":[{"xi":[2],"amplitude":1,"phase":1.0}]}"#,
            r#"{"dim":1,"domain":{"lo":[1],"hi":[1]},"modes":[{"xi":[2],"amplitude":1,"phase":0}]}"#,
            r#"{"dim":1,"domain":{"lo":[0],"hi":[1]},"modes":[{"xi":[NaN],"amplitude":1,"phase":0}]}"#,
            r#"{"dim":1,"domain":{"lo":[0],"hi":[1e999]},"modes":[{"xi":[1],"amplitude":1,"phase":0}]}"#,
        ] {
            assert!(SpectralTarget::from_json_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn depth_units_at_powers_of_two() {
        assert_eq!(depth_units(0.0), 1);
        assert_eq!(depth_units(2.0), 2);
        assert_eq!(depth_units(5.0), 3);
        assert_eq!(depth_units(6.0), 3);
        assert_eq!(depth_units(6.5), 4);
    }
}
