use std::f64::consts::PI;

use barronforge::analysis::{embedding_series, rademacher_estimate, RademacherConfig, ShellConstruction, ShellSpectrum};
use barronforge::constructor::{compute_theta, rescale_to_unit, sample_pairs};
use barronforge::metrics::{h1_error, l2_error, QuadratureSpec};
use barronforge::network::{build_subnetwork, merge, SubNetworkSpec, Variant};
use barronforge::rng;
use barronforge::spectral::{ModeSampler, NormKind};
use barronforge::{DomainBox, FourierMode, ReluNetwork, SpectralTarget};
use proptest::prelude::*;
use rand::Rng;

fn mode_strategy(d: usize) -> impl Strategy<Value = FourierMode> {
    (prop::collection::vec(-12.0f64..12.0, d), 0.01f64..2.0, 0.0f64..1.0)
        .prop_map(|(xi, a, p)| FourierMode::new(xi, a, p).unwrap())
}

fn target_strategy() -> impl Strategy<Value = SpectralTarget> {
    (1usize..5).prop_flat_map(|d| {
        prop::collection::vec(mode_strategy(d), 1..6).prop_map(|m| SpectralTarget::on_unit_cube(m).unwrap())
    })
}

fn point(d: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed);
    (0..d).map(|_| r.random()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_ordered(f in target_strategy(), s in 0.1f64..3.0) {
        let b0 = f.norm(NormKind::B0);
        let bs = f.norm(NormKind::Bs(s));
        prop_assert!(f.norm(NormKind::Blog) >= b0);
        prop_assert!(bs >= b0);
        prop_assert!(f.norm(NormKind::BsLog(s)) >= bs);
    }

    #[test]
    fn frequency_scaling_law(f in target_strategy(), c in 0.0f64..50.0) {
        let modes = f.modes().iter()
            .map(|m| FourierMode::new(m.xi.iter().map(|v| c * v).collect(), m.amplitude, m.phase).unwrap())
            .collect();
        let g = SpectralTarget::on_unit_cube(modes).unwrap();
        let b0 = f.norm(NormKind::B0);
        prop_assert!((g.norm(NormKind::B0) - b0).abs() <= 1e-12 * b0);
        prop_assert!(g.norm(NormKind::Blog) <= (2.0 + c).log2() * f.norm(NormKind::Blog) * (1.0 + 1e-12));
    }

    #[test]
    fn evaluation_is_linear_in_mode_lists(f in target_strategy(), seed in any::<u64>()) {
        let d = f.dim();
        let g = SpectralTarget::on_unit_cube(vec![FourierMode::new(vec![1.5; d], 0.7, 0.3).unwrap()]).unwrap();
        let x = point(d, seed);
        let sum = f.concat(&g).unwrap().evaluate(&x).unwrap();
        let parts = f.evaluate(&x).unwrap() + g.evaluate(&x).unwrap();
        prop_assert!((sum - parts).abs() <= 1e-12 * (1.0 + f.norm(NormKind::B0)));
    }

    #[test]
    fn theta_keeps_the_argument_in_range(m in (1usize..6).prop_flat_map(mode_strategy)) {
        let th = compute_theta(&m);
        let dom = DomainBox::unit(m.xi.len());
        for c in dom.corners() {
            let v: f64 = m.xi.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() + th;
            prop_assert!(v >= -1e-12 && v <= m.l1() + 1.0 + 1e-12);
        }
    }

    #[test]
    fn subnetworks_stay_within_amplitude_bound(f in target_strategy(), seed in any::<u64>(), h1 in any::<bool>()) {
        let variant = if h1 { Variant::H1 } else { Variant::L2 };
        let pairs = sample_pairs(&f, 4, variant, &mut rng::stream(seed)).unwrap();
        let norm = f.norm(variant.sampling_weight());
        for (i, (idx, r)) in pairs.into_iter().enumerate() {
            let net = build_subnetwork(&f, &SubNetworkSpec::new(&f, idx, r, variant).unwrap()).unwrap();
            for k in 0..20 {
                let x = point(f.dim(), seed ^ (i * 100 + k) as u64);
                let y = net.eval_scalar(&x).unwrap();
                prop_assert!(y.is_finite());
                prop_assert!(y.abs() <= PI * PI * norm * (1.0 + 1e-12));
                prop_assert!(net.grad_scalar(&x).unwrap().iter().all(|g| g.is_finite()));
            }
        }
    }

    #[test]
    fn merged_network_is_the_mean(f in target_strategy(), seed in any::<u64>(), m in 1usize..12) {
        let pairs = sample_pairs(&f, m, Variant::L2, &mut rng::stream(seed)).unwrap();
        let subs: Vec<ReluNetwork> = pairs.iter()
            .map(|&(i, r)| build_subnetwork(&f, &SubNetworkSpec::new(&f, i, r, Variant::L2).unwrap()).unwrap())
            .collect();
        let merged = merge(&subs, 2.0 * PI * PI * f.norm(NormKind::B0), f.domain()).unwrap();
        prop_assert_eq!(merged.width(), f.dim() + 4);
        for k in 0..20 {
            let x = point(f.dim(), seed.wrapping_add(k));
            let mean = subs.iter().map(|s| s.eval_scalar(&x).unwrap()).sum::<f64>() / m as f64;
            prop_assert!((merged.eval_scalar(&x).unwrap() - mean).abs() <= 1e-9);
        }
    }

    #[test]
    fn h1_dominates_l2(f in target_strategy(), seed in any::<u64>()) {
        let pairs = sample_pairs(&f, 8, Variant::L2, &mut rng::stream(seed)).unwrap();
        let subs: Vec<ReluNetwork> = pairs.iter()
            .map(|&(i, r)| build_subnetwork(&f, &SubNetworkSpec::new(&f, i, r, Variant::L2).unwrap()).unwrap())
            .collect();
        let net = merge(&subs, 2.0 * PI * PI * f.norm(NormKind::B0), f.domain()).unwrap();
        let q = QuadratureSpec::monte_carlo(256, seed);
        prop_assert!(h1_error(&f, &net, &q).unwrap().estimate >= l2_error(&f, &net, &q).unwrap().estimate);
    }

    #[test]
    fn rescale_round_trip(lo in prop::collection::vec(-5.0f64..5.0, 2), edge in prop::collection::vec(0.1f64..6.0, 2), seed in any::<u64>()) {
        let hi: Vec<f64> = lo.iter().zip(&edge).map(|(a, e)| a + e).collect();
        let dom = DomainBox::new(lo.clone(), hi).unwrap();
        let f = SpectralTarget::new(2, dom.clone(), vec![
            FourierMode::new(vec![0.5, -1.0], 1.0, 0.2).unwrap(),
            FourierMode::new(vec![2.0, 0.25], 0.3, 0.9).unwrap(),
        ]).unwrap();
        let (g, map) = rescale_to_unit(&f).unwrap();
        prop_assert!(g.domain().within_unit_cube());
        let mut r = rng::stream(seed);
        for _ in 0..20 {
            let x = dom.from_unit(&[r.random(), r.random()]);
            let y = map.apply(&x);
            prop_assert!(g.domain().contains(&y));
            prop_assert!((f.evaluate(&x).unwrap() - g.evaluate(&y).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn rademacher_is_linear_in_q(seed in any::<u64>(), q in 0.0f64..10.0) {
        let base = RademacherConfig { sigma_draws: 8, shells: 3, candidates_per_shell: 3, ..RademacherConfig::new(32, 2, q, seed) };
        let a = rademacher_estimate(&base).unwrap().estimate;
        let b = rademacher_estimate(&RademacherConfig { q: 2.0 * q, ..base.clone() }).unwrap().estimate;
        prop_assert_eq!(b, 2.0 * a);
        let c = rademacher_estimate(&RademacherConfig { candidates_per_shell: 6, ..base }).unwrap().estimate;
        prop_assert!(c >= a);
    }

    #[test]
    fn prop42_hs_increments_decay_like_inverse_square(d in 1usize..8, s in 0.0f64..6.0) {
        let t = embedding_series(&ShellSpectrum { d, s, construction: ShellConstruction::Prop42, k_max: 50 }).unwrap();
        let c = t.rows[0].log2_hs_increment.exp2();
        for r in &t.rows {
            prop_assert!(r.log2_hs_increment.exp2() <= c / (r.k * r.k) as f64 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn prop43_ratio_converges(d in 1usize..10, s in 0.0f64..4.0) {
        let t = embedding_series(&ShellSpectrum { d, s, construction: ShellConstruction::Prop43 { p: 3.0 }, k_max: 30 }).unwrap();
        let ratio = t.hs_ratio_at(30).unwrap();
        prop_assert!((ratio / 2f64.powf(s + 1.0) - 1.0).abs() < 0.01);
    }
}

#[test]
fn sampler_passes_chi_square() {
    let f = barronforge::spectral::synth_target(3, 6, 3.0, 17).unwrap();
    let sampler = ModeSampler::new(&f, NormKind::Bs(1.0)).unwrap();
    let p = sampler.probabilities();
    let n = 100_000;
    let mut counts = vec![0usize; p.len()];
    let mut r = rng::stream(5);
    for _ in 0..n {
        counts[sampler.sample(&mut r)] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(&p)
        .map(|(&c, &pi)| {
            let e = pi * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    // 0.999 quantile of chi-square with 5 degrees of freedom
    assert!(chi2 < 20.515, "chi2 = {chi2}");
}

#[test]
fn subnetwork_average_is_unbiased() {
    let f = barronforge::spectral::synth_target(3, 8, 3.0, 23).unwrap();
    let x = [0.31, 0.77, 0.45];
    let n = 100_000;
    let pairs = sample_pairs(&f, n, Variant::L2, &mut rng::stream(8)).unwrap();
    let vals: Vec<f64> = pairs
        .iter()
        .map(|&(i, r)| build_subnetwork(&f, &SubNetworkSpec::new(&f, i, r, Variant::L2).unwrap()).unwrap().eval_scalar(&x).unwrap())
        .collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - f.evaluate(&x).unwrap()).abs() <= 4.0 * se, "mean {mean} vs {}", f.evaluate(&x).unwrap());
}

#[test]
fn h1_subnetwork_average_is_unbiased() {
    let f = barronforge::spectral::synth_target(2, 5, 3.0, 29).unwrap();
    let x = [0.6, 0.2];
    let n = 100_000;
    let pairs = sample_pairs(&f, n, Variant::H1, &mut rng::stream(9)).unwrap();
    let vals: Vec<f64> = pairs
        .iter()
        .map(|&(i, r)| build_subnetwork(&f, &SubNetworkSpec::new(&f, i, r, Variant::H1).unwrap()).unwrap().eval_scalar(&x).unwrap())
        .collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - f.evaluate(&x).unwrap()).abs() <= 4.0 * (var / n as f64).sqrt());
}

#[test]
fn doubling_quadrature_points_is_consistent() {
    let f = barronforge::spectral::synth_target(3, 8, 3.0, 31).unwrap();
    let pairs = sample_pairs(&f, 16, Variant::L2, &mut rng::stream(1)).unwrap();
    let subs: Vec<ReluNetwork> = pairs
        .iter()
        .map(|&(i, r)| build_subnetwork(&f, &SubNetworkSpec::new(&f, i, r, Variant::L2).unwrap()).unwrap())
        .collect();
    let net = merge(&subs, 2.0 * PI * PI * f.norm(NormKind::B0), f.domain()).unwrap();
    let mut agree = 0;
    for rep in 0..100u64 {
        let a = l2_error(&f, &net, &QuadratureSpec::monte_carlo(1024, 2 * rep)).unwrap();
        let b = l2_error(&f, &net, &QuadratureSpec::monte_carlo(2048, 2 * rep + 1)).unwrap();
        if (a.estimate - b.estimate).abs() < 3.0 * a.std_err.hypot(b.std_err) {
            agree += 1;
        }
    }
    assert!(agree >= 95, "{agree}/100");
}
