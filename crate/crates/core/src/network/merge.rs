//! Stacking `m` scalar networks into one deep network of width `d + N + 1`
//! that outputs their arithmetic mean.
//!
//! Channel layout of every hidden layer:
//!
//! ```text
//! [ x (d pass-through) | sub-network units (N) | accumulator (1) ]
//! ```
//!
//! Sub-network `i` runs in the middle block. The layer that starts
//! sub-network `i + 1` also adds `(1/m)·F_i` to the accumulator, so the
//! merged network has exactly `Σ hidden_layers(F_i)` hidden layers. The
//! accumulator is carried through ReLU, so it starts at `offset` and the
//! output layer subtracts it again; `offset` must dominate every partial
//! average on the domain.

use super::{Activation, Layer, ReluNetwork};
use crate::error::{Error, Result};
use crate::spectral::DomainBox;

struct Dense {
    rows: usize,
    cols: usize,
    w: Vec<f64>,
    b: Vec<f64>,
}

impl Dense {
    fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, w: vec![0.0; rows * cols], b: vec![0.0; rows] }
    }

    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.w[r * self.cols + c] = v;
    }

    fn add(&mut self, r: usize, c: usize, v: f64) {
        self.w[r * self.cols + c] += v;
    }

    fn into_layer(self, activation: Activation) -> Result<Layer> {
        Layer::from_flat(self.rows, self.cols, self.w, self.b, activation)
    }
}

/// Merge scalar sub-networks so that the result equals `(1/m) Σ F_i(x)` for
/// every `x` in `domain`.
pub fn merge(subnets: &[ReluNetwork], offset: f64, domain: &DomainBox) -> Result<ReluNetwork> {
    let first = subnets.first().ok_or_else(|| Error::param("merge needs at least one network"))?;
    let d = first.input_dim();
    if domain.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: domain.dim() });
    }
    if domain.lo.iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition(
            "pass-through channels need a nonnegative domain; map it into [0,1]^d first".into(),
        ));
    }
    if !(offset >= 0.0) || !offset.is_finite() {
        return Err(Error::param(format!("accumulator offset must be finite and >= 0, got {offset}")));
    }
    for (i, f) in subnets.iter().enumerate() {
        if f.input_dim() != d || f.output_dim() != 1 {
            return Err(Error::InvalidNetwork(format!(
                "network {i} maps R^{} to R^{}; expected R^{d} to R",
                f.input_dim(),
                f.output_dim()
            )));
        }
        if f.hidden_layers() == 0 {
            return Err(Error::InvalidNetwork(format!("network {i} has no hidden layer")));
        }
    }

    let m = subnets.len() as f64;
    let n = subnets.iter().map(ReluNetwork::width).max().unwrap_or(0);
    let width = d + n + 1;
    let acc = d + n;
    let mut layers = Vec::with_capacity(subnets.iter().map(ReluNetwork::hidden_layers).sum::<usize>() + 1);

    // Output layer of the previous sub-network, still to be added to the accumulator.
    let mut pending: Option<&Layer> = None;

    for f in subnets {
        let hidden = &f.layers()[..f.hidden_layers()];
        for (j, l) in hidden.iter().enumerate() {
            let cols = if layers.is_empty() { d } else { width };
            let mut dense = Dense::zeros(width, cols);
            for k in 0..d {
                dense.set(k, k, 1.0);
            }
            // sub-network block reads x for its first layer, its own units afterwards
            let src = if j == 0 { 0 } else { d };
            for r in 0..l.rows() {
                for c in 0..l.cols() {
                    dense.set(d + r, src + c, l.weight(r, c));
                }
                dense.b[d + r] = l.bias()[r];
            }
            if cols == width {
                dense.set(acc, acc, 1.0);
            } else {
                dense.b[acc] = offset;
            }
            if let Some(out) = pending.take() {
                for c in 0..out.cols() {
                    dense.add(acc, d + c, out.weight(0, c) / m);
                }
                dense.b[acc] += out.bias()[0] / m;
            }
            layers.push(dense.into_layer(Activation::Relu)?);
        }
        pending = f.layers().last();
    }

    let mut out = Dense::zeros(1, width);
    out.set(0, acc, 1.0);
    out.b[0] = -offset;
    let last = pending.expect("at least one network");
    for c in 0..last.cols() {
        out.add(0, d + c, last.weight(0, c) / m);
    }
    out.b[0] += last.bias()[0] / m;
    layers.push(out.into_layer(Activation::None)?);

    ReluNetwork::new(d, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_subnetwork, SubNetworkSpec, Variant};
    use crate::rng;
    use crate::spectral::{synth_target, NormKind, SpectralTarget};
    use rand::Rng;
    use std::f64::consts::PI;

    fn random_subnets(f: &SpectralTarget, m: usize, seed: u64) -> Vec<ReluNetwork> {
        let mut rng = rng::stream(seed);
        (0..m)
            .map(|_| {
                let idx = rng.random_range(0..f.modes().len());
                let r = rng.random_range(-0.5..=0.5);
                build_subnetwork(f, &SubNetworkSpec::new(f, idx, r, Variant::L2).unwrap()).unwrap()
            })
            .collect()
    }

    #[test]
    fn single_summand_is_identity() {
        let f = synth_target(3, 8, 3.0, 1).unwrap();
        let subs = random_subnets(&f, 1, 2);
        let offset = 2.0 * PI * PI * f.norm(NormKind::B0);
        let merged = merge(&subs, offset, f.domain()).unwrap();
        let mut rng = rng::stream(3);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random()).collect();
            let a = merged.eval_scalar(&x).unwrap();
            let b = subs[0].eval_scalar(&x).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn merged_equals_mean_and_has_expected_shape() {
        for d in [2, 8] {
            let f = synth_target(d, 16, 3.0, d as u64).unwrap();
            let subs = random_subnets(&f, 8, 5);
            let offset = 2.0 * PI * PI * f.norm(NormKind::B0);
            let merged = merge(&subs, offset, f.domain()).unwrap();
            assert_eq!(merged.width(), d + 4);
            assert_eq!(
                merged.hidden_layers(),
                subs.iter().map(ReluNetwork::hidden_layers).sum::<usize>()
            );
            let mut rng = rng::stream(6);
            for _ in 0..1000 {
                let x: Vec<f64> = (0..d).map(|_| rng.random()).collect();
                let mean = subs.iter().map(|s| s.eval_scalar(&x).unwrap()).sum::<f64>() / 8.0;
                assert!((merged.eval_scalar(&x).unwrap() - mean).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn param_count_is_affine_in_number_of_identical_subnets() {
        let f = synth_target(4, 4, 3.0, 9).unwrap();
        let one = random_subnets(&f, 1, 10);
        let offset = 2.0 * PI * PI * f.norm(NormKind::B0);
        let count = |k: usize| merge(&vec![one[0].clone(); k], offset, f.domain()).unwrap().param_count() as isize;
        let (c1, c2, c4) = (count(1), count(2), count(4));
        assert_eq!(c4 - c2, 2 * (c2 - c1));
        // extrapolated zero-network baseline: first-layer shape deficit plus the output row
        let (d, w) = (4isize, 8isize);
        let per_layer = w * w + w;
        let hidden = one[0].hidden_layers() as isize;
        let baseline = 2 * c2 - c4;
        assert_eq!(c2 - baseline, 2 * hidden * per_layer);
        assert_eq!(baseline, w * d - w * w + w + 1);
    }

    #[test]
    fn rejects_negative_domains_and_bad_shapes() {
        let f = synth_target(2, 4, 3.0, 1).unwrap();
        let subs = random_subnets(&f, 2, 1);
        let neg = DomainBox::new(vec![-0.5, 0.0], vec![0.5, 1.0]).unwrap();
        assert!(matches!(merge(&subs, 1.0, &neg), Err(Error::Precondition(_))));
        assert!(merge(&[], 1.0, f.domain()).is_err());
        assert!(merge(&subs, -1.0, f.domain()).is_err());
        assert!(merge(&[ReluNetwork::identity(2)], 1.0, f.domain()).is_err());
    }
}
