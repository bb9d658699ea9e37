//! Quadrature-based error norms, the cosine-representation check and
//! log-log rate fitting.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::network::{gamma, mod1, ReluNetwork, Workspace};
use crate::rng;
use crate::spectral::{DomainBox, SpectralTarget};

/// A real-valued function on ℝ^d with an (almost everywhere) gradient.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);
}

impl ScalarField for SpectralTarget {
    fn dim(&self) -> usize {
        SpectralTarget::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_unchecked(x)
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value_unchecked(x), self.gradient_unchecked(x))
    }
}

impl ScalarField for ReluNetwork {
    fn dim(&self) -> usize {
        self.input_dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut ws = Workspace::default();
        self.eval_with(x, &mut ws)[0]
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        ReluNetwork::value_and_grad(self, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadKind {
    /// Midpoint rule on a tensor grid; only for `d ≤ 3`.
    TensorGrid,
    /// Uniform i.i.d. points on the domain.
    MonteCarlo,
}

/// How integrals over the domain are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub kind: QuadKind,
    pub n_points: usize,
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn monte_carlo(n_points: usize, seed: u64) -> Self {
        QuadratureSpec { kind: QuadKind::MonteCarlo, n_points, seed }
    }

    pub fn tensor_grid(n_points: usize) -> Self {
        QuadratureSpec { kind: QuadKind::TensorGrid, n_points, seed: 0 }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.n_points < 16 {
            return Err(Error::param(format!("quadrature needs at least 16 points, got {}", self.n_points)));
        }
        if self.kind == QuadKind::TensorGrid && dim > 3 {
            return Err(Error::param(format!("tensor-grid quadrature is limited to d <= 3, got d = {dim}")));
        }
        Ok(())
    }

    /// Quadrature nodes on `domain`. All nodes carry equal weight `|Ω|/n`.
    pub fn points(&self, domain: &DomainBox) -> Result<Vec<Vec<f64>>> {
        let d = domain.dim();
        self.validate(d)?;
        Ok(match self.kind {
            QuadKind::MonteCarlo => {
                let mut rng = rng::substream(self.seed, &[0x0_9ADu64, d as u64]);
                (0..self.n_points)
                    .map(|_| {
                        let u: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                        domain.from_unit(&u)
                    })
                    .collect()
            }
            QuadKind::TensorGrid => {
                let per_axis = ((self.n_points as f64).powf(1.0 / d as f64).round() as usize).max(2);
                let total = per_axis.pow(d as u32);
                (0..total)
                    .map(|mut k| {
                        let u: Vec<f64> = (0..d)
                            .map(|_| {
                                let i = k % per_axis;
                                k /= per_axis;
                                (i as f64 + 0.5) / per_axis as f64
                            })
                            .collect();
                        domain.from_unit(&u)
                    })
                    .collect()
            }
        })
    }
}

/// An error norm estimate with its quadrature standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub estimate: f64,
    pub std_err: f64,
}

/// Pairwise (cascade) summation; the reduction order depends only on the length.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

fn integrate_norm(values: &[f64], volume: f64, kind: QuadKind) -> ErrorEstimate {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let squared = volume * mean;
    let se_squared = match kind {
        QuadKind::TensorGrid => 0.0,
        QuadKind::MonteCarlo => {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            let var = pairwise_sum(&dev) / (n - 1.0).max(1.0);
            volume * (var / n).sqrt()
        }
    };
    let estimate = squared.max(0.0).sqrt();
    // delta method for the square root
    let std_err = if estimate > 0.0 { se_squared / (2.0 * estimate) } else { se_squared.sqrt() };
    ErrorEstimate { estimate, std_err }
}

fn check_fields<F: ScalarField + ?Sized, G: ScalarField + ?Sized>(f: &F, g: &G, domain: &DomainBox) -> Result<()> {
    check_dim(f.dim(), g.dim())?;
    check_dim(f.dim(), domain.dim())
}

/// `‖f − F‖_{L²(Ω)}` over the target's domain.
pub fn l2_error<F: ScalarField + ?Sized>(f: &SpectralTarget, approx: &F, quad: &QuadratureSpec) -> Result<ErrorEstimate> {
    l2_error_on(f, approx, f.domain(), quad)
}

/// `‖f − F‖_{H¹(Ω)}`, the square root of the squared L² error plus the
/// squared L² errors of every partial derivative.
pub fn h1_error<F: ScalarField + ?Sized>(f: &SpectralTarget, approx: &F, quad: &QuadratureSpec) -> Result<ErrorEstimate> {
    h1_error_on(f, approx, f.domain(), quad)
}

pub fn l2_error_on<F: ScalarField + ?Sized, G: ScalarField + ?Sized>(
    f: &F,
    approx: &G,
    domain: &DomainBox,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    check_fields(f, approx, domain)?;
    let pts = quad.points(domain)?;
    let values: Vec<f64> = pts
        .par_iter()
        .map(|x| {
            let e = f.value(x) - approx.value(x);
            e * e
        })
        .collect();
    Ok(integrate_norm(&values, domain.volume(), quad.kind))
}

pub fn h1_error_on<F: ScalarField + ?Sized, G: ScalarField + ?Sized>(
    f: &F,
    approx: &G,
    domain: &DomainBox,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    check_fields(f, approx, domain)?;
    let pts = quad.points(domain)?;
    let values: Vec<f64> = pts
        .par_iter()
        .map(|x| {
            let (fv, fg) = f.value_and_gradient(x);
            let (av, ag) = approx.value_and_gradient(x);
            let e = fv - av;
            e * e + fg.iter().zip(&ag).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        })
        .collect();
    Ok(integrate_norm(&values, domain.volume(), quad.kind))
}

/// Composite Simpson rule for `cos(2πr)·(a + b·r)` on `[lo, hi]` with `k` (even) panels.
fn simpson_cos_linear(lo: f64, hi: f64, k: usize, a: f64, b: f64) -> f64 {
    let h = (hi - lo) / k as f64;
    let g = |r: f64| (2.0 * PI * r).cos() * (a + b * r);
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..k {
        let v = g(lo + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (g(lo) + g(hi) + 4.0 * odd + 2.0 * even)
}

/// `−2π² ∫_{−1/2}^{1/2} cos(2πr) γ(t', r) dr` by kink-split composite Simpson
/// with about `points` nodes in total.
///
/// As a function of `r`, `γ(t', ·)` is linear between the kinks
/// `{−s, 0, s}` with `s = min(t', 1 − t')`, so each piece is integrated
/// separately.
pub fn cos_lemma_integral(t_prime: f64, points: usize) -> f64 {
    let s = t_prime.min(1.0 - t_prime);
    let breaks = [-0.5, -s, 0.0, s, 0.5];
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        // γ is linear on the piece: recover it from the endpoints
        let (ga, gb) = (gamma(t_prime, lo), gamma(t_prime, hi));
        let slope = (gb - ga) / (hi - lo);
        let intercept = ga - slope * lo;
        let mut k = ((points as f64) * (hi - lo)).round() as usize;
        k = (k + k % 2).max(2);
        total += simpson_cos_linear(lo, hi, k, intercept, slope);
    }
    -2.0 * PI * PI * total
}

/// Maximum over `n ∈ n_values` and `t ∈ t_grid` of
/// `|−2π² ∫ cos(2πr) γ_{,n}(t, r) dr − cos(2πnt)|`.
pub fn verify_cos_lemma(n_values: &[u64], t_grid: &[f64], r_quad_points: usize) -> Result<f64> {
    if n_values.is_empty() || t_grid.is_empty() {
        return Err(Error::param("cosine check needs nonempty n and t grids"));
    }
    if n_values.contains(&0) {
        return Err(Error::param("n must be >= 1"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::param(format!("t = {t} outside (0, 1)")));
    }
    if r_quad_points < 1000 {
        return Err(Error::param(format!("need at least 1000 r points, got {r_quad_points}")));
    }
    // the integral depends on (n, t) only through t' = n·t mod 1
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut worst = 0.0f64;
    for &n in n_values {
        for &t in t_grid {
            let tp = mod1(n as f64 * t);
            let integral = *cache.entry(tp.to_bits()).or_insert_with(|| cos_lemma_integral(tp, r_quad_points));
            worst = worst.max((integral - (2.0 * PI * n as f64 * t).cos()).abs());
        }
    }
    Ok(worst)
}

/// Ordinary least squares fit of `log err` against `log m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::param(format!("slope fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(m, e)| !(*m > 0.0 && *e > 0.0)) {
        return Err(Error::param(format!("slope fit needs positive m and err, got {p:?}")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("slope fit needs at least two distinct m values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Layer;
    use crate::network::Activation;
    use crate::spectral::FourierMode;

    fn zero_net(d: usize) -> ReluNetwork {
        let hidden = Layer::new(vec![vec![0.0; d]], vec![0.0], Activation::Relu).unwrap();
        let out = Layer::new(vec![vec![0.0]], vec![0.0], Activation::None).unwrap();
        ReluNetwork::new(d, vec![hidden, out]).unwrap()
    }

    #[test]
    fn identical_functions_have_zero_error() {
        let f = crate::spectral::synth_target(3, 8, 3.0, 2).unwrap();
        let q = QuadratureSpec::monte_carlo(4096, 1);
        assert_eq!(l2_error(&f, &f, &q).unwrap().estimate, 0.0);
        assert_eq!(h1_error(&f, &f, &q).unwrap().estimate, 0.0);
    }

    #[test]
    fn single_cosine_against_zero() {
        // ∫_{[0,1]^2} A² cos²(2π ξ·x) = A²/2 for nonzero integer ξ
        let f = SpectralTarget::on_unit_cube(vec![FourierMode::new(vec![1.0, 2.0], 0.8, 0.0).unwrap()])
            .unwrap();
        let z = zero_net(2);
        let grid = l2_error(&f, &z, &QuadratureSpec::tensor_grid(4096)).unwrap();
        assert!((grid.estimate - 0.8 / 2f64.sqrt()).abs() < 1e-12);
        let mc = l2_error(&f, &z, &QuadratureSpec::monte_carlo(100_000, 3)).unwrap();
        assert!((mc.estimate - 0.8 / 2f64.sqrt()).abs() < 4.0 * mc.std_err);
    }

    #[test]
    fn constant_target_h1_equals_amplitude() {
        let f = SpectralTarget::on_unit_cube(vec![FourierMode::new(vec![0.0; 4], 1.7, 0.0).unwrap()])
            .unwrap();
        let e = h1_error(&f, &zero_net(4), &QuadratureSpec::monte_carlo(256, 0)).unwrap();
        assert!((e.estimate - 1.7).abs() < 1e-12);
    }

    #[test]
    fn independent_seeds_agree() {
        let f = crate::spectral::synth_target(4, 16, 3.0, 4).unwrap();
        let z = zero_net(4);
        let a = l2_error(&f, &z, &QuadratureSpec::monte_carlo(100_000, 10)).unwrap();
        let b = l2_error(&f, &z, &QuadratureSpec::monte_carlo(100_000, 11)).unwrap();
        let combined = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
        assert!((a.estimate - b.estimate).abs() <= 3.0 * combined);
    }

    #[test]
    fn quadrature_validation() {
        let dom = DomainBox::unit(4);
        assert!(QuadratureSpec::tensor_grid(64).points(&dom).is_err());
        assert!(QuadratureSpec::monte_carlo(8, 0).points(&dom).is_err());
        let pts = QuadratureSpec::monte_carlo(64, 5).points(&dom).unwrap();
        assert_eq!(pts, QuadratureSpec::monte_carlo(64, 5).points(&dom).unwrap());
        assert!(pts.iter().all(|p| dom.contains(p)));
        let f = SpectralTarget::on_unit_cube(vec![FourierMode::new(vec![1.0], 1.0, 0.0).unwrap()]).unwrap();
        assert!(matches!(
            l2_error(&f, &zero_net(2), &QuadratureSpec::monte_carlo(64, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cos_lemma_limits() {
        // t → 0⁺: −2π² ∫ cos(2πr) max(0, r) dr = −2π²·(−1/(2π²)) = 1
        assert!((cos_lemma_integral(1e-12, 100_000) - 1.0).abs() < 1e-9);
        assert!(cos_lemma_integral(0.25, 100_000).abs() < 1e-12);
        let dev = verify_cos_lemma(&[1], &[0.25], 1000).unwrap();
        assert!(dev < 1e-10);
    }

    #[test]
    fn cos_lemma_simpson_rate() {
        let t = 0.3141;
        let exact = (2.0 * PI * t).cos();
        let errs: Vec<f64> = [40, 80, 160].iter().map(|&k| (cos_lemma_integral(t, k) - exact).abs()).collect();
        assert!(errs[0] / errs[1] >= 8.0, "{errs:?}");
        assert!(errs[1] / errs[2] >= 8.0, "{errs:?}");
    }

    #[test]
    fn cos_lemma_rejects_bad_grids() {
        assert!(verify_cos_lemma(&[0], &[0.5], 1000).is_err());
        assert!(verify_cos_lemma(&[1], &[1.0], 1000).is_err());
        assert!(verify_cos_lemma(&[1], &[0.5], 10).is_err());
        assert!(verify_cos_lemma(&[], &[0.5], 1000).is_err());
    }

    #[test]
    fn slope_fit_examples() {
        let s = slope_fit(&[(1.0, 1.0), (4.0, 0.5), (16.0, 0.25)]).unwrap();
        assert!((s.slope + 0.5).abs() < 1e-12 && (s.r2 - 1.0).abs() < 1e-12);
        let c = slope_fit(&[(1.0, 3.0), (4.0, 3.0), (16.0, 3.0)]).unwrap();
        assert!(c.slope.abs() < 1e-12);
        assert!(slope_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(slope_fit(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn slope_fit_with_noise() {
        let mut rng = rng::stream(99);
        let pts: Vec<(f64, f64)> = [16.0, 64.0, 256.0, 1024.0, 4096.0]
            .iter()
            .map(|&m: &f64| (m, m.powf(-0.5) * (1.0 + 0.05 * rng.random_range(-1.0..1.0))))
            .collect();
        let s = slope_fit(&pts).unwrap();
        assert!((-0.55..=-0.45).contains(&s.slope));
    }
}
