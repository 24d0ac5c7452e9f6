//! Residual networks: chains of `(shortcut, block)` pairs where each step
//! adds a linear projection of the previous state to the block output.
//!
//! The state update is `x_i = Gamma_i x_{i-1} + f_i(x_{i-1})` with `f_i` the
//! realization of the i-th block. Because the signal enters the next block
//! without an extra activation, compositions concatenate and the parameter
//! count is exactly additive, which is what makes the calculus below cheap
//! to account for.

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::fnn::{Fnn, FnnDoc};
use crate::linalg::Matrix;

/// One residual step: shortcut matrix plus a feedforward block.
///
/// The shortcut spans exactly one block; its shape must match the block's
/// output and input dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct ResBlock {
    shortcut: Matrix,
    body: Fnn,
}

impl ResBlock {
    pub fn new(shortcut: Matrix, body: Fnn) -> Result<Self> {
        if shortcut.rows() != body.output_dim() || shortcut.cols() != body.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "shortcut is {}x{} but block maps {} -> {}",
                shortcut.rows(),
                shortcut.cols(),
                body.input_dim(),
                body.output_dim()
            )));
        }
        Ok(Self { shortcut, body })
    }

    pub fn shortcut(&self) -> &Matrix {
        &self.shortcut
    }

    pub fn body(&self) -> &Fnn {
        &self.body
    }
}

/// A residual network: a non-empty chain of residual steps.
#[derive(Clone, Debug, PartialEq)]
pub struct ResNet {
    blocks: Vec<ResBlock>,
}

impl ResNet {
    pub fn new(blocks: Vec<ResBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::DimensionMismatch(
                "a residual network needs at least one block".into(),
            ));
        }
        for (k, pair) in blocks.windows(2).enumerate() {
            if pair[1].body.input_dim() != pair[0].body.output_dim() {
                return Err(Error::DimensionMismatch(format!(
                    "block {} outputs {} values but block {} expects {}",
                    k,
                    pair[0].body.output_dim(),
                    k + 1,
                    pair[1].body.input_dim()
                )));
            }
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[ResBlock] {
        &self.blocks
    }

    /// Number of residual steps.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn input_dim(&self) -> usize {
        self.blocks[0].body.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.blocks[self.blocks.len() - 1].body.output_dim()
    }

    /// State dimensions `(d_0, d_1, ..., d_n)`.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.blocks.len() + 1);
        dims.push(self.input_dim());
        dims.extend(self.blocks.iter().map(|b| b.body.output_dim()));
        dims
    }

    /// Total parameter count: every block's parameters plus every shortcut entry.
    pub fn complexity(&self) -> u64 {
        self.blocks
            .iter()
            .map(|b| b.body.complexity() + b.shortcut.entry_count())
            .sum()
    }

    /// Runs the residual recursion and returns the final state.
    pub fn realize(&self, activation: &Activation, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "input length {} does not match input dimension {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut state = x.to_vec();
        for block in &self.blocks {
            let mut next = block.shortcut.matvec(&state)?;
            let branch = block.body.realize(activation, &state)?;
            for (n, b) in next.iter_mut().zip(&branch) {
                *n += b;
            }
            state = next;
        }
        Ok(state)
    }

    /// Composition `self . first`: runs `first`, then `self`. The block lists
    /// concatenate, so the complexity is exactly additive.
    pub fn compose(&self, first: &ResNet) -> Result<ResNet> {
        if first.output_dim() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "composition: first network outputs {} values, second expects {}",
                first.output_dim(),
                self.input_dim()
            )));
        }
        let mut blocks = first.blocks.clone();
        blocks.extend_from_slice(&self.blocks);
        ResNet::new(blocks)
    }

    /// Appends a feedforward network as a final block with an all-zero
    /// shortcut, so the result realizes `phi` after the network.
    pub fn append_fnn(&self, phi: &Fnn) -> Result<ResNet> {
        if phi.input_dim() != self.output_dim() {
            return Err(Error::DimensionMismatch(format!(
                "appended network expects {} inputs, network outputs {}",
                phi.input_dim(),
                self.output_dim()
            )));
        }
        let zero = Matrix::zeros(phi.output_dim(), phi.input_dim());
        let mut blocks = self.blocks.clone();
        blocks.push(ResBlock::new(zero, phi.clone())?);
        ResNet::new(blocks)
    }

    fn check_same_shape(nets: &[&ResNet]) -> Result<()> {
        let first = nets[0];
        for net in &nets[1..] {
            if net.len() != first.len() {
                return Err(Error::ArchMismatch(format!(
                    "lengths differ: {} vs {}",
                    first.len(),
                    net.len()
                )));
            }
            for (i, (a, b)) in first.blocks.iter().zip(&net.blocks).enumerate() {
                if a.body.arch() != b.body.arch() {
                    return Err(Error::ArchMismatch(format!(
                        "block {i} architectures differ: {:?} vs {:?}",
                        a.body.arch(),
                        b.body.arch()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parallelization of networks whose blocks share architectures index by
    /// index: block-diagonal shortcuts and parallelized blocks, realizing the
    /// tuple of the individual networks.
    pub fn parallelize(nets: &[&ResNet]) -> Result<ResNet> {
        if nets.is_empty() {
            return Err(Error::InvalidArgument(
                "parallelization of no networks".into(),
            ));
        }
        Self::check_same_shape(nets)?;
        let n = nets[0].len();
        let mut blocks = Vec::with_capacity(n);
        for i in 0..n {
            let shortcuts: Vec<&Matrix> = nets.iter().map(|t| &t.blocks[i].shortcut).collect();
            let bodies: Vec<&Fnn> = nets.iter().map(|t| &t.blocks[i].body).collect();
            blocks.push(ResBlock::new(
                Matrix::block_diag(&shortcuts),
                Fnn::parallelize(&bodies)?,
            )?);
        }
        ResNet::new(blocks)
    }

    /// Network realizing `x -> sum_j h_j f_j(x)` for networks with identical
    /// blockwise architecture.
    ///
    /// The parallelization is pre-multiplied by stacked identities on the
    /// first block and post-multiplied by a row of scaled identities on the
    /// last, folding the fan-out and the weighted fan-in into the existing
    /// blocks. The parameter count stays within `u^2` times a single summand.
    /// With a single block both foldings land on the same block.
    pub fn weighted_sum(weights: &[f64], nets: &[&ResNet]) -> Result<ResNet> {
        if nets.is_empty() {
            return Err(Error::InvalidArgument("weighted sum of no networks".into()));
        }
        if weights.len() != nets.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} networks",
                weights.len(),
                nets.len()
            )));
        }
        Self::check_same_shape(nets)?;
        let n = nets[0].len();
        let d0 = nets[0].input_dim();
        let dn = nets[0].output_dim();
        let fan_out = Matrix::stacked_identities(nets.len(), d0);
        let fan_in = Matrix::scaled_identity_row(weights, dn);

        let mut blocks = Vec::with_capacity(n);
        for i in 0..n {
            let shortcuts: Vec<&Matrix> = nets.iter().map(|t| &t.blocks[i].shortcut).collect();
            let bodies: Vec<&Fnn> = nets.iter().map(|t| &t.blocks[i].body).collect();
            let mut shortcut = Matrix::block_diag(&shortcuts);
            let mut body = Fnn::parallelize(&bodies)?;
            if i == 0 {
                shortcut = shortcut.matmul(&fan_out)?;
                body = Fnn::matmul_right(&body, &fan_out)?;
            }
            if i == n - 1 {
                shortcut = fan_in.matmul(&shortcut)?;
                body = Fnn::matmul_left(&fan_in, &body)?;
            }
            blocks.push(ResBlock::new(shortcut, body)?);
        }
        ResNet::new(blocks)
    }
}

// --- JSON document form ----------------------------------------------------
//
// {"type":"resnet","blocks":[{"gamma":{"rows":..,"cols":..,"data":[..]},
//                             "fnn":{..fnn document..}}, ...]}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BlockDoc {
    gamma: MatrixDoc,
    fnn: FnnDoc,
}

#[derive(Serialize, Deserialize)]
struct ResnetDoc {
    #[serde(rename = "type")]
    kind: String,
    blocks: Vec<BlockDoc>,
}

impl ResNet {
    pub fn to_json(&self) -> String {
        let doc = ResnetDoc {
            kind: "resnet".into(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    gamma: MatrixDoc {
                        rows: b.shortcut.rows(),
                        cols: b.shortcut.cols(),
                        data: b.shortcut.data().to_vec(),
                    },
                    fnn: FnnDoc::encode(&b.body),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("resnet document serializes")
    }

    pub fn from_json(text: &str) -> Result<ResNet> {
        let doc: ResnetDoc = serde_json::from_str(text)
            .map_err(|e| Error::ConfigParse(format!("resnet json: {e}")))?;
        if doc.kind != "resnet" {
            return Err(Error::ConfigParse(format!(
                "expected document type 'resnet', got '{}'",
                doc.kind
            )));
        }
        let mut blocks = Vec::with_capacity(doc.blocks.len());
        for (i, b) in doc.blocks.into_iter().enumerate() {
            let gamma = Matrix::new(b.gamma.rows, b.gamma.cols, b.gamma.data)
                .map_err(|e| Error::ConfigParse(format!("block {i} gamma: {e}")))?;
            let body = b.fnn.decode()?;
            blocks.push(ResBlock::new(gamma, body)?);
        }
        ResNet::new(blocks)
    }
}
