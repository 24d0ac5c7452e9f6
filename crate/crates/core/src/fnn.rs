//! Feedforward networks as plain parameter tuples, with the structural
//! calculus on them: composition, parallelization, matrix multiplication,
//! and weighted sums.
//!
//! A network is a list of `(weight, bias)` layers. Realization alternates
//! affine maps with a componentwise activation; the final layer stays affine.
//! The complexity of a network counts every weight and bias entry, zeros
//! included, so each operation below comes with an exact parameter count.

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// One affine layer: `x -> W x + B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    weight: Matrix,
    bias: Vec<f64>,
}

impl Layer {
    pub fn new(weight: Matrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weight.rows() {
            return Err(Error::DimensionMismatch(format!(
                "bias length {} does not match weight rows {}",
                bias.len(),
                weight.rows()
            )));
        }
        Ok(Self { weight, bias })
    }

    pub fn weight(&self) -> &Matrix {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// `W x + B`.
    pub fn affine(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.weight.matvec(x)?;
        for (v, b) in y.iter_mut().zip(&self.bias) {
            *v += b;
        }
        Ok(y)
    }

    fn out_dim(&self) -> usize {
        self.weight.rows()
    }

    fn in_dim(&self) -> usize {
        self.weight.cols()
    }
}

/// A feedforward network: a non-empty chain of affine layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Fnn {
    layers: Vec<Layer>,
}

impl Fnn {
    /// Validates layer chaining and builds the network.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::DimensionMismatch(
                "a network needs at least one layer".into(),
            ));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(Error::DimensionMismatch(format!(
                    "layer {} outputs {} values but layer {} expects {}",
                    k,
                    pair[0].out_dim(),
                    k + 1,
                    pair[1].in_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Convenience constructor from `(weight, bias)` pairs.
    pub fn from_pairs(pairs: Vec<(Matrix, Vec<f64>)>) -> Result<Self> {
        let layers = pairs
            .into_iter()
            .map(|(w, b)| Layer::new(w, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    /// Single-layer affine network `x -> W x + B`.
    pub fn affine(weight: Matrix, bias: Vec<f64>) -> Result<Self> {
        Self::new(vec![Layer::new(weight, bias)?])
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Number of layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    /// Layer sizes `(l_0, l_1, ..., l_L)`.
    pub fn arch(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.layers.len() + 1);
        dims.push(self.input_dim());
        dims.extend(self.layers.iter().map(|l| l.out_dim()));
        dims
    }

    /// Size of layer `n`, or 0 when `n` exceeds the depth.
    pub fn dim_at(&self, n: usize) -> usize {
        if n == 0 {
            self.input_dim()
        } else if n <= self.depth() {
            self.layers[n - 1].out_dim()
        } else {
            0
        }
    }

    /// Total parameter count: all weight and bias entries of every layer.
    pub fn complexity(&self) -> u64 {
        self.layers
            .iter()
            .map(|l| l.weight.entry_count() + l.bias.len() as u64)
            .sum()
    }

    /// Evaluates the network. The activation acts componentwise after every
    /// layer except the last, which stays affine.
    pub fn realize(&self, activation: &Activation, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "input length {} does not match input dimension {}",
                x.len(),
                self.input_dim()
            )));
        }
        let last = self.layers.len() - 1;
        let mut state = self.layers[0].affine(x)?;
        if last > 0 {
            activation.apply_slice(&mut state);
            for (k, layer) in self.layers.iter().enumerate().skip(1) {
                state = layer.affine(&state)?;
                if k < last {
                    activation.apply_slice(&mut state);
                }
            }
        }
        Ok(state)
    }

    /// Composition `self . inner`: feeds the output of `inner` into `self`.
    ///
    /// The last layer of `inner` and the first layer of `self` fuse into a
    /// single affine layer, so the result has depth
    /// `inner.depth() + self.depth() - 1`.
    pub fn compose(&self, inner: &Fnn) -> Result<Fnn> {
        if self.input_dim() != inner.output_dim() {
            return Err(Error::DimensionMismatch(format!(
                "composition: inner outputs {} values, outer expects {}",
                inner.output_dim(),
                self.input_dim()
            )));
        }
        let mut layers: Vec<Layer> = inner.layers[..inner.depth() - 1].to_vec();
        let inner_last = &inner.layers[inner.depth() - 1];
        let outer_first = &self.layers[0];
        let fused_w = outer_first.weight.matmul(&inner_last.weight)?;
        let mut fused_b = outer_first.weight.matvec(&inner_last.bias)?;
        for (v, b) in fused_b.iter_mut().zip(&outer_first.bias) {
            *v += b;
        }
        layers.push(Layer::new(fused_w, fused_b)?);
        layers.extend_from_slice(&self.layers[1..]);
        Fnn::new(layers)
    }

    /// Parallelization of networks with equal depth: block-diagonal weights
    /// and stacked biases, realizing the tuple of the individual networks.
    pub fn parallelize(nets: &[&Fnn]) -> Result<Fnn> {
        let first = *nets
            .first()
            .ok_or_else(|| Error::InvalidArgument("parallelization of no networks".into()))?;
        let depth = first.depth();
        if let Some(bad) = nets.iter().find(|n| n.depth() != depth) {
            return Err(Error::DepthMismatch(format!(
                "expected depth {depth}, found {}",
                bad.depth()
            )));
        }
        let mut layers = Vec::with_capacity(depth);
        for k in 0..depth {
            let weights: Vec<&Matrix> = nets.iter().map(|n| &n.layers[k].weight).collect();
            let weight = Matrix::block_diag(&weights);
            let mut bias = Vec::new();
            for n in nets {
                bias.extend_from_slice(&n.layers[k].bias);
            }
            layers.push(Layer::new(weight, bias)?);
        }
        Fnn::new(layers)
    }

    /// Left matrix multiplication: the realization becomes `x -> M f(x)`.
    /// Only the last layer changes; the depth is preserved.
    pub fn matmul_left(m: &Matrix, net: &Fnn) -> Result<Fnn> {
        if m.cols() != net.output_dim() {
            return Err(Error::DimensionMismatch(format!(
                "left factor has {} columns, network outputs {}",
                m.cols(),
                net.output_dim()
            )));
        }
        let mut layers = net.layers.clone();
        let last = layers.len() - 1;
        let w = m.matmul(&layers[last].weight)?;
        let b = m.matvec(&layers[last].bias)?;
        layers[last] = Layer::new(w, b)?;
        Fnn::new(layers)
    }

    /// Right matrix multiplication: the realization becomes `x -> f(M x)`.
    /// Only the first weight changes; bias and depth are preserved.
    pub fn matmul_right(net: &Fnn, m: &Matrix) -> Result<Fnn> {
        if m.rows() != net.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "right factor has {} rows, network expects {}",
                m.rows(),
                net.input_dim()
            )));
        }
        let mut layers = net.layers.clone();
        let w = layers[0].weight.matmul(m)?;
        let b = layers[0].bias.clone();
        layers[0] = Layer::new(w, b)?;
        Fnn::new(layers)
    }

    /// Network realizing the weighted sum `x -> sum_m h_m f_m(x)` of networks
    /// with identical architecture.
    ///
    /// Built as `A2 . P(nets) . A1` with `A1` stacked identities and `A2` a
    /// row of scaled identities, which keeps the parameter count within
    /// `M^2` times the count of a single summand.
    pub fn weighted_sum(weights: &[f64], nets: &[&Fnn]) -> Result<Fnn> {
        let first = *nets
            .first()
            .ok_or_else(|| Error::InvalidArgument("weighted sum of no networks".into()))?;
        if weights.len() != nets.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} networks",
                weights.len(),
                nets.len()
            )));
        }
        let arch = first.arch();
        if let Some(bad) = nets.iter().find(|n| n.arch() != arch) {
            return Err(Error::ArchMismatch(format!(
                "expected architecture {arch:?}, found {:?}",
                bad.arch()
            )));
        }
        let a1 = Matrix::stacked_identities(nets.len(), first.input_dim());
        let a2 = Matrix::scaled_identity_row(weights, first.output_dim());
        let stacked = Fnn::parallelize(nets)?;
        let pulled = Fnn::matmul_right(&stacked, &a1)?;
        Fnn::matmul_left(&a2, &pulled)
    }
}

// --- JSON document form ----------------------------------------------------
//
// {"type":"fnn","arch":[l0,...,lL],"layers":[{"W":[row-major],"B":[...]}, ...]}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    #[serde(rename = "W")]
    w: Vec<f64>,
    #[serde(rename = "B")]
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FnnDoc {
    #[serde(rename = "type")]
    kind: String,
    arch: Vec<usize>,
    layers: Vec<LayerDoc>,
}

impl FnnDoc {
    pub(crate) fn encode(net: &Fnn) -> FnnDoc {
        FnnDoc {
            kind: "fnn".into(),
            arch: net.arch(),
            layers: net
                .layers
                .iter()
                .map(|l| LayerDoc {
                    w: l.weight.data().to_vec(),
                    b: l.bias.clone(),
                })
                .collect(),
        }
    }

    pub(crate) fn decode(self) -> Result<Fnn> {
        if self.kind != "fnn" {
            return Err(Error::ConfigParse(format!(
                "expected document type 'fnn', got '{}'",
                self.kind
            )));
        }
        if self.arch.len() != self.layers.len() + 1 {
            return Err(Error::ConfigParse(format!(
                "arch lists {} sizes but there are {} layers",
                self.arch.len(),
                self.layers.len()
            )));
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        for (k, doc) in self.layers.into_iter().enumerate() {
            let (rows, cols) = (self.arch[k + 1], self.arch[k]);
            let weight = Matrix::new(rows, cols, doc.w).map_err(|e| {
                Error::ConfigParse(format!("layer {k} weight does not match arch: {e}"))
            })?;
            if doc.b.len() != rows {
                return Err(Error::ConfigParse(format!(
                    "layer {k} bias has length {}, arch says {rows}",
                    doc.b.len()
                )));
            }
            layers.push(Layer::new(weight, doc.b)?);
        }
        Fnn::new(layers)
    }
}

impl Fnn {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FnnDoc::encode(self)).expect("fnn document serializes")
    }

    pub fn from_json(text: &str) -> Result<Fnn> {
        let doc: FnnDoc =
            serde_json::from_str(text).map_err(|e| Error::ConfigParse(format!("fnn json: {e}")))?;
        doc.decode()
    }
}
