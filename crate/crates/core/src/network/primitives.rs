//! The two piecewise-linear building blocks and their exact ReLU realisations.
//!
//! * `β(t) = ReLU(2t) − 2·ReLU(2t − 1)`, the triangle map on `[0,1]`.
//! * `γ(t, r)`, the kernel whose `r`-integral against `cos(2πr)` reproduces a
//!   cosine. On `[0,1]` it is realised with a single hidden layer of three units:
//!
//! ```text
//! γ(t, r) = max{0, r} + ReLU(t − |r|) − 2·ReLU(t − 1/2) + ReLU(t − 1 + |r|)
//! ```

use super::{Activation, Layer, ReluNetwork};
use crate::error::{Error, Result};

#[inline]
fn relu(v: f64) -> f64 {
    v.max(0.0)
}

/// `z mod 1 ∈ [0, 1)`.
#[inline]
pub fn mod1(z: f64) -> f64 {
    let f = z - z.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Closed-form triangle map.
#[inline]
pub fn beta(t: f64) -> f64 {
    relu(2.0 * t) - 2.0 * relu(2.0 * t - 1.0)
}

/// `β` applied `depth` times.
pub fn beta_chain(t: f64, depth: usize) -> f64 {
    (0..depth).fold(t, |s, _| beta(s))
}

/// Three-branch definition of `γ(t, r)` for `t ∈ [0,1]`, `|r| ≤ 1/2`.
pub fn gamma(t: f64, r: f64) -> f64 {
    if t > 0.5 {
        return gamma(1.0 - t, r);
    }
    if t <= r.abs() {
        r.max(0.0)
    } else {
        t - (-r).max(0.0)
    }
}

/// `γ_{,n}(t, r) = γ(n·t mod 1, r)`.
pub fn gamma_n(t: f64, r: f64, n: f64) -> f64 {
    gamma(mod1(n * t), r)
}

/// Exact network for `β`: one hidden layer of width 2, depth 2.
pub fn build_beta() -> ReluNetwork {
    let hidden = Layer::new(vec![vec![2.0], vec![2.0]], vec![0.0, -1.0], Activation::Relu)
        .expect("static shape");
    let out = Layer::new(vec![vec![1.0, -2.0]], vec![0.0], Activation::None).expect("static shape");
    ReluNetwork::new(1, vec![hidden, out]).expect("static shape")
}

/// `β ∘ β ∘ … ∘ β` (`depth` copies); the identity on ℝ for `depth == 0`.
pub fn build_beta_chain(depth: usize) -> ReluNetwork {
    let beta = build_beta();
    (0..depth).fold(ReluNetwork::identity(1), |acc, _| {
        ReluNetwork::compose(&beta, &acc).expect("scalar chain")
    })
}

/// Exact network for `t ↦ γ(t, r)` on `[0,1]`: width 3, depth 2.
pub fn build_gamma_tail(r: f64) -> Result<ReluNetwork> {
    build_gamma_tail_with_bias_fault(r, 0.0)
}

/// [`build_gamma_tail`] with `fault` added to the output bias. Only useful for
/// checking that the verification suite notices a broken primitive.
pub fn build_gamma_tail_with_bias_fault(r: f64, fault: f64) -> Result<ReluNetwork> {
    if !(r.abs() <= 0.5) {
        return Err(Error::param(format!("gamma tail needs |r| <= 1/2, got {r}")));
    }
    let a = r.abs();
    let hidden = Layer::new(
        vec![vec![1.0], vec![1.0], vec![1.0]],
        vec![-a, -0.5, -(1.0 - a)],
        Activation::Relu,
    )?;
    let out = Layer::new(vec![vec![1.0, -2.0, 1.0]], vec![r.max(0.0) + fault], Activation::None)?;
    ReluNetwork::new(1, vec![hidden, out])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    #[test]
    fn beta_values_and_shape() {
        let b = build_beta();
        assert_eq!(b.depth(), 2);
        assert_eq!(b.width(), 2);
        assert_eq!(b.eval_scalar(&[0.0]).unwrap(), 0.0);
        assert_eq!(b.eval_scalar(&[0.25]).unwrap(), 0.5);
        assert_eq!(b.eval_scalar(&[0.5]).unwrap(), 1.0);
        assert_eq!(b.eval_scalar(&[0.75]).unwrap(), 0.5);
        assert_eq!(b.grad_scalar(&[0.25]).unwrap(), vec![2.0]);
        assert_eq!(b.grad_scalar(&[0.75]).unwrap(), vec![-2.0]);
    }

    #[test]
    fn beta_network_is_bit_exact_on_grid() {
        let b = build_beta();
        for i in 0..=10_000 {
            let t = i as f64 / 10_000.0;
            assert_eq!(b.eval_scalar(&[t]).unwrap().to_bits(), beta(t).to_bits(), "t = {t}");
        }
    }

    #[test]
    fn gamma_branches() {
        assert!((gamma(0.05, 0.1) - 0.1).abs() < 1e-15);
        assert!((gamma(0.3, -0.1) - 0.2).abs() < 1e-15);
        let mut rng = rng::stream(2);
        for _ in 0..100 {
            let r = rng.random_range(-0.5..=0.5);
            assert!((gamma(0.8, r) - gamma(0.2, r)).abs() < 1e-15);
            let net = build_gamma_tail(r).unwrap();
            assert!((net.eval_scalar(&[0.8]).unwrap() - net.eval_scalar(&[0.2]).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_tail_matches_piecewise_definition_on_grid() {
        for j in 0..=200 {
            let r = -0.5 + j as f64 / 200.0;
            let net = build_gamma_tail(r).unwrap();
            assert_eq!(net.width(), 3);
            assert_eq!(net.depth(), 2);
            for i in 0..2000 {
                let t = i as f64 / 1999.0;
                let got = net.eval_scalar(&[t]).unwrap();
                assert!((got - gamma(t, r)).abs() <= 1e-12, "t={t} r={r}: {got} vs {}", gamma(t, r));
            }
        }
        assert!(build_gamma_tail(0.51).is_err());
        assert!(build_gamma_tail(f64::NAN).is_err());
    }

    #[test]
    fn beta_squared_is_beta_2() {
        let bb = build_beta_chain(2);
        for (t, want) in [(0.1, 0.4), (0.3, 0.8), (0.6, 0.4), (0.9, 0.4)] {
            let oracle = beta(mod1(2.0 * t));
            assert!((oracle - want).abs() < 1e-12);
            assert!((bb.eval_scalar(&[t]).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn composition_law_gamma_after_beta_chain() {
        let mut rng = rng::stream(3);
        for depth in 1..=10 {
            let chain = build_beta_chain(depth);
            assert_eq!(chain.depth(), depth + 1);
            let n = (1u64 << depth) as f64;
            for _ in 0..100 {
                let r = rng.random_range(-0.5..=0.5);
                let net = ReluNetwork::compose(&build_gamma_tail(r).unwrap(), &chain).unwrap();
                for i in 0..10_000 {
                    let t = i as f64 / 9_999.0;
                    let got = net.eval_scalar(&[t]).unwrap();
                    assert!((got - gamma_n(t, r, n)).abs() <= 1e-9);
                }
            }
        }
    }
}
