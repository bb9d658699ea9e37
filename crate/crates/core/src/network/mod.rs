//! Explicit feed-forward ReLU networks.
//!
//! A network is a chain of affine maps. Every map but the last is followed by
//! a ReLU; the last one is the output layer. `depth` counts affine maps, so a
//! network with one hidden layer has depth 2.

mod merge;
mod primitives;
mod subnet;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

pub use merge::merge;
pub use primitives::{
    beta, beta_chain, build_beta, build_beta_chain, build_gamma_tail, build_gamma_tail_with_bias_fault,
    gamma, gamma_n, mod1,
};
pub use subnet::{build_subnetwork, SubNetworkSpec, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    None,
}

/// CSR view of a weight matrix; only used to speed up evaluation.
#[derive(Debug, Clone, Default)]
struct Sparse {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Sparse {
    fn from_dense(rows: usize, cols: usize, w: &[f64]) -> Self {
        let mut s = Sparse { row_ptr: Vec::with_capacity(rows + 1), ..Default::default() };
        s.row_ptr.push(0);
        for r in 0..rows {
            for c in 0..cols {
                let v = w[r * cols + c];
                if v != 0.0 {
                    s.cols.push(c);
                    s.vals.push(v);
                }
            }
            s.row_ptr.push(s.cols.len());
        }
        s
    }

    #[inline]
    fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }
}

/// One affine map `z ↦ W z + b`, optionally followed by ReLU.
#[derive(Debug, Clone)]
pub struct Layer {
    rows: usize,
    cols: usize,
    weight: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
    sparse: Sparse,
}

impl PartialEq for Layer {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.weight == other.weight
            && self.bias == other.bias
            && self.activation == other.activation
    }
}

impl Layer {
    /// Build from a row-major weight matrix.
    pub fn new(weight: Vec<Vec<f64>>, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        let rows = weight.len();
        let cols = weight.first().map(Vec::len).unwrap_or(0);
        if weight.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidNetwork("ragged weight matrix".into()));
        }
        Self::from_flat(rows, cols, weight.concat(), bias, activation)
    }

    pub fn from_flat(
        rows: usize,
        cols: usize,
        weight: Vec<f64>,
        bias: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidNetwork("layer with an empty weight matrix".into()));
        }
        if weight.len() != rows * cols || bias.len() != rows {
            return Err(Error::InvalidNetwork(format!(
                "layer shapes disagree: {rows}x{cols} weight with {} entries, bias of length {}",
                weight.len(),
                bias.len()
            )));
        }
        if weight.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::InvalidNetwork("non-finite weight or bias".into()));
        }
        let sparse = Sparse::from_dense(rows, cols, &weight);
        Ok(Layer { rows, cols, weight, bias, activation, sparse })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weight(&self, r: usize, c: usize) -> f64 {
        self.weight[r * self.cols + c]
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weight.chunks(self.cols)
    }

    /// `out = W z + b` (no activation).
    #[inline]
    fn affine_into(&self, z: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.rows).map(|r| {
            self.sparse.row(r).fold(self.bias[r], |acc, (c, w)| acc + w * z[c])
        }));
    }
}

/// Layered affine-plus-ReLU computation graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    input_dim: usize,
    layers: Vec<Layer>,
}

#[derive(Serialize, Deserialize)]
struct LayerJson {
    w: Vec<Vec<f64>>,
    b: Vec<f64>,
    activation: Activation,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    input_dim: usize,
    layers: Vec<LayerJson>,
}

impl Serialize for ReluNetwork {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NetworkJson {
            input_dim: self.input_dim,
            layers: self
                .layers
                .iter()
                .map(|l| LayerJson {
                    w: l.weight_rows().map(<[f64]>::to_vec).collect(),
                    b: l.bias.clone(),
                    activation: l.activation,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ReluNetwork {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = NetworkJson::deserialize(deserializer)?;
        let layers = raw
            .layers
            .into_iter()
            .map(|l| Layer::new(l.w, l.b, l.activation))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        ReluNetwork::new(raw.input_dim, layers).map_err(serde::de::Error::custom)
    }
}

/// Scratch buffers for allocation-free forward passes.
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ReluNetwork {
    /// Checks that shapes chain, hidden layers use ReLU and the last layer is affine.
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        if input_dim == 0 || layers.is_empty() {
            return Err(Error::InvalidNetwork("network needs an input and at least one layer".into()));
        }
        let mut width = input_dim;
        let last = layers.len() - 1;
        for (i, l) in layers.iter().enumerate() {
            if l.cols != width {
                return Err(Error::InvalidNetwork(format!(
                    "layer {i} expects {} inputs but receives {width}",
                    l.cols
                )));
            }
            let expected = if i == last { Activation::None } else { Activation::Relu };
            if l.activation != expected {
                return Err(Error::InvalidNetwork(format!(
                    "layer {i} has activation {:?}, expected {expected:?}",
                    l.activation
                )));
            }
            width = l.rows;
        }
        Ok(ReluNetwork { input_dim, layers })
    }

    /// Single affine map `x ↦ W x + b`.
    pub fn affine(weight: Vec<Vec<f64>>, bias: Vec<f64>) -> Result<Self> {
        let layer = Layer::new(weight, bias, Activation::None)?;
        Self::new(layer.cols, vec![layer])
    }

    pub fn identity(dim: usize) -> Self {
        let w = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::affine(w, vec![0.0; dim]).expect("identity is well formed")
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("nonempty").rows
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Number of affine maps.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    /// Largest hidden-layer width (0 for a purely affine network).
    pub fn width(&self) -> usize {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.rows).max().unwrap_or(0)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.rows * l.cols + l.rows).sum()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim, x.len())?;
        let mut ws = Workspace::default();
        Ok(self.eval_with(x, &mut ws).to_vec())
    }

    /// Forward pass of a scalar-output network.
    pub fn eval_scalar(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.input_dim, x.len())?;
        check_dim(1, self.output_dim())?;
        let mut ws = Workspace::default();
        Ok(self.eval_with(x, &mut ws)[0])
    }

    /// Forward pass reusing `ws`. The caller guarantees `x.len() == input_dim`.
    pub fn eval_with<'w>(&self, x: &[f64], ws: &'w mut Workspace) -> &'w [f64] {
        debug_assert_eq!(x.len(), self.input_dim);
        ws.a.clear();
        ws.a.extend_from_slice(x);
        for l in &self.layers {
            l.affine_into(&ws.a, &mut ws.b);
            if l.activation == Activation::Relu {
                for v in &mut ws.b {
                    *v = v.max(0.0);
                }
            }
            std::mem::swap(&mut ws.a, &mut ws.b);
        }
        &ws.a
    }

    /// Jacobian (`output_dim × input_dim`) with the convention `ReLU'(0) = 0`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_dim(self.input_dim, x.len())?;
        let masks = self.activation_masks(x);
        Ok((0..self.output_dim()).map(|o| self.backprop(&masks, o)).collect())
    }

    /// Gradient of a scalar-output network.
    pub fn grad_scalar(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim, x.len())?;
        check_dim(1, self.output_dim())?;
        let masks = self.activation_masks(x);
        Ok(self.backprop(&masks, 0))
    }

    /// Value and gradient of a scalar-output network in one pass.
    pub(crate) fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut a = x.to_vec();
        let mut b = Vec::new();
        let mut masks = Vec::with_capacity(self.layers.len() - 1);
        for l in &self.layers {
            l.affine_into(&a, &mut b);
            if l.activation == Activation::Relu {
                masks.push(b.iter().map(|&v| v > 0.0).collect::<Vec<_>>());
                for v in &mut b {
                    *v = v.max(0.0);
                }
            }
            std::mem::swap(&mut a, &mut b);
        }
        (a[0], self.backprop(&masks, 0))
    }

    fn activation_masks(&self, x: &[f64]) -> Vec<Vec<bool>> {
        let mut a = x.to_vec();
        let mut b = Vec::new();
        let mut masks = Vec::with_capacity(self.layers.len() - 1);
        for l in &self.layers[..self.layers.len() - 1] {
            l.affine_into(&a, &mut b);
            masks.push(b.iter().map(|&v| v > 0.0).collect());
            for v in &mut b {
                *v = v.max(0.0);
            }
            std::mem::swap(&mut a, &mut b);
        }
        masks
    }

    fn backprop(&self, masks: &[Vec<bool>], output: usize) -> Vec<f64> {
        let last = self.layers.last().expect("nonempty");
        let mut v: Vec<f64> = (0..last.cols).map(|c| last.weight(output, c)).collect();
        for (l, mask) in self.layers[..self.layers.len() - 1].iter().zip(masks).rev() {
            let mut next = vec![0.0; l.cols];
            for r in 0..l.rows {
                if !mask[r] || v[r] == 0.0 {
                    continue;
                }
                let g = v[r];
                for (c, w) in l.sparse.row(r) {
                    next[c] += g * w;
                }
            }
            v = next;
        }
        v
    }

    /// Euclidean distance from `x` to the nearest ReLU kink, under the local
    /// linearisation of every hidden pre-activation. Units whose pre-activation
    /// does not depend on `x` are ignored. Returns `f64::INFINITY` if there are none.
    pub fn kink_distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.input_dim, x.len())?;
        let d = self.input_dim;
        // forward mode: each unit carries its value and its gradient w.r.t. x
        let mut val = x.to_vec();
        let mut tan: Vec<f64> = (0..d * d).map(|k| if k / d == k % d { 1.0 } else { 0.0 }).collect();
        let mut best = f64::INFINITY;
        for l in &self.layers[..self.layers.len() - 1] {
            let mut nval = Vec::with_capacity(l.rows);
            let mut ntan = vec![0.0; l.rows * d];
            for r in 0..l.rows {
                let mut z = l.bias[r];
                for (c, w) in l.sparse.row(r) {
                    z += w * val[c];
                    for k in 0..d {
                        ntan[r * d + k] += w * tan[c * d + k];
                    }
                }
                let g = &mut ntan[r * d..(r + 1) * d];
                let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if gn > 0.0 {
                    best = best.min(z.abs() / gn);
                }
                if z <= 0.0 {
                    g.iter_mut().for_each(|v| *v = 0.0);
                }
                nval.push(z.max(0.0));
            }
            val = nval;
            tan = ntan;
        }
        Ok(best)
    }

    /// `outer ∘ inner`, fusing the final affine map of `inner` into the first
    /// layer of `outer`. Depth is `depth(outer) + depth(inner) − 1`.
    pub fn compose(outer: &ReluNetwork, inner: &ReluNetwork) -> Result<ReluNetwork> {
        check_dim(outer.input_dim, inner.output_dim())?;
        let tail = inner.layers.last().expect("nonempty");
        let head = &outer.layers[0];
        let (rows, mid, cols) = (head.rows, head.cols, tail.cols);
        let mut w = vec![0.0; rows * cols];
        let mut b = head.bias.clone();
        for r in 0..rows {
            for k in 0..mid {
                let h = head.weight(r, k);
                if h == 0.0 {
                    continue;
                }
                b[r] += h * tail.bias[k];
                for c in 0..cols {
                    w[r * cols + c] += h * tail.weight(k, c);
                }
            }
        }
        let fused = Layer::from_flat(rows, cols, w, b, head.activation)?;
        let mut layers: Vec<Layer> = inner.layers[..inner.layers.len() - 1].to_vec();
        layers.push(fused);
        layers.extend(outer.layers[1..].iter().cloned());
        ReluNetwork::new(inner.input_dim, layers)
    }

    /// Multiply every output by `factor` and add `shift`.
    pub fn scale_output(&self, factor: f64, shift: f64) -> Result<ReluNetwork> {
        let out = self.output_dim();
        let w = (0..out)
            .map(|i| (0..out).map(|j| if i == j { factor } else { 0.0 }).collect())
            .collect();
        let post = ReluNetwork::affine(w, vec![shift; out])?;
        ReluNetwork::compose(&post, self)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
