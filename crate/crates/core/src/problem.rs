//! Problem description: dimension, horizon, growth constants, diffusion
//! matrix, the network families standing in for the drift and the initial
//! condition, and the measure the approximation error is taken under.

use crate::activation::Activation;
use crate::bounds::GrowthParams;
use crate::error::{Error, Result};
use crate::fnn::Fnn;
use crate::linalg::{diffusion_sqrt, Matrix};
use crate::rng::CounterRng;

/// A length-`d` vector given either as a fill value (usable at any dimension)
/// or as explicit entries (fixed dimension).
#[derive(Clone, Debug)]
pub enum VecSpec {
    Fill(f64),
    Values(Vec<f64>),
}

impl VecSpec {
    pub fn materialize(&self, d: usize) -> Result<Vec<f64>> {
        match self {
            VecSpec::Fill(v) => Ok(vec![*v; d]),
            VecSpec::Values(vals) => {
                if vals.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "vector has {} entries, dimension is {d}",
                        vals.len()
                    )));
                }
                Ok(vals.clone())
            }
        }
    }
}

/// Constant diffusion matrix, in one of the shapes the loader accepts.
#[derive(Clone, Debug)]
pub enum DiffusionSpec {
    /// `scale * I`.
    ScaledIdentity(f64),
    Diag(VecSpec),
    Dense(Matrix),
}

impl DiffusionSpec {
    pub fn matrix(&self, d: usize) -> Result<Matrix> {
        match self {
            DiffusionSpec::ScaledIdentity(s) => Ok(Matrix::identity(d).scale(*s)),
            DiffusionSpec::Diag(spec) => Ok(Matrix::diag(&spec.materialize(d)?)),
            DiffusionSpec::Dense(m) => {
                if m.rows() != d || m.cols() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "diffusion matrix is {}x{}, dimension is {d}",
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(m.clone())
            }
        }
    }
}

/// Sampling measure for evaluation points.
#[derive(Clone, Debug)]
pub enum Measure {
    StandardGaussian,
    UniformCube { lo: f64, hi: f64 },
}

impl Measure {
    pub fn validate(&self) -> Result<()> {
        if let Measure::UniformCube { lo, hi } = self {
            if !(hi > lo) {
                return Err(Error::InvalidArgument(format!(
                    "uniform cube needs lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn sample(&self, d: usize, rng: &mut CounterRng) -> Vec<f64> {
        match self {
            Measure::StandardGaussian => (0..d).map(|_| rng.standard_normal()).collect(),
            Measure::UniformCube { lo, hi } => {
                (0..d).map(|_| lo + (hi - lo) * rng.uniform()).collect()
            }
        }
    }
}

/// A family of networks indexed by dimension and accuracy parameter.
///
/// The built-in members are accuracy-independent; `Fixed` wraps an explicit
/// network (for example one loaded from a document).
#[derive(Clone, Debug)]
pub enum FnnFamily {
    /// The zero vector field: one layer, all parameters zero, `d -> d`.
    ZeroField,
    /// `x -> diag(g) x` as a single layer, `d -> d`.
    LinearField { diag: VecSpec },
    /// `x -> <c, x> + b` as a single layer, `d -> 1`.
    AffineFunctional { coeffs: VecSpec, offset: f64 },
    /// One hidden relu unit realizing `x -> relu(x)`, `1 -> 1`. Exact only
    /// under the relu activation.
    ReluUnit,
    Fixed(Fnn),
}

impl FnnFamily {
    /// Concrete network at dimension `d` and accuracy parameter `delta`.
    /// The built-in families do not vary with `delta`.
    pub fn instantiate(&self, d: usize, _delta: f64) -> Result<Fnn> {
        match self {
            FnnFamily::ZeroField => Fnn::affine(Matrix::zeros(d, d), vec![0.0; d]),
            FnnFamily::LinearField { diag } => {
                Fnn::affine(Matrix::diag(&diag.materialize(d)?), vec![0.0; d])
            }
            FnnFamily::AffineFunctional { coeffs, offset } => {
                Fnn::affine(Matrix::new(1, d, coeffs.materialize(d)?)?, vec![*offset])
            }
            FnnFamily::ReluUnit => {
                if d != 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "the relu unit is one-dimensional, dimension is {d}"
                    )));
                }
                Fnn::from_pairs(vec![
                    (Matrix::new(1, 1, vec![1.0])?, vec![0.0]),
                    (Matrix::new(1, 1, vec![1.0])?, vec![0.0]),
                ])
            }
            FnnFamily::Fixed(net) => Ok(net.clone()),
        }
    }

    pub fn complexity_at(&self, d: usize, delta: f64) -> Result<u64> {
        Ok(self.instantiate(d, delta)?.complexity())
    }
}

/// Full problem description for the estimator construction.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub horizon: f64,
    pub kappa: f64,
    pub eta: f64,
    pub p: f64,
    pub diffusion: DiffusionSpec,
    /// Family approximating the drift coefficient, `d -> d`.
    pub drift: FnnFamily,
    /// Family approximating the initial condition, `d -> 1`.
    pub initial: FnnFamily,
    pub measure: Measure,
    pub activation: Activation,
}

impl ProblemSpec {
    pub fn iota(&self) -> f64 {
        self.kappa.max(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(self.kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be nonnegative, got {}",
                self.kappa
            )));
        }
        if !(self.eta >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "eta must be at least 1, got {}",
                self.eta
            )));
        }
        if !(self.p > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "p must be positive, got {}",
                self.p
            )));
        }
        self.measure.validate()?;
        // symmetry and positive definiteness are enforced by the factorization
        self.diffusion_factor()?;
        let drift = self.drift.instantiate(self.dimension, 1.0)?;
        if drift.input_dim() != self.dimension || drift.output_dim() != self.dimension {
            return Err(Error::DimensionMismatch(format!(
                "drift network maps {} -> {}, expected {dim} -> {dim}",
                drift.input_dim(),
                drift.output_dim(),
                dim = self.dimension
            )));
        }
        let initial = self.initial.instantiate(self.dimension, 1.0)?;
        if initial.input_dim() != self.dimension || initial.output_dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "initial-condition network maps {} -> {}, expected {} -> 1",
                initial.input_dim(),
                initial.output_dim(),
                self.dimension
            )));
        }
        Ok(())
    }

    pub fn diffusion_matrix(&self) -> Result<Matrix> {
        self.diffusion.matrix(self.dimension)
    }

    /// Symmetric factor driving the noise: `S` with `S S = 2 A`.
    pub fn diffusion_factor(&self) -> Result<Matrix> {
        diffusion_sqrt(&self.diffusion_matrix()?)
    }

    pub fn drift_net(&self, delta: f64) -> Result<Fnn> {
        self.drift.instantiate(self.dimension, delta)
    }

    pub fn initial_net(&self, delta: f64) -> Result<Fnn> {
        self.initial.instantiate(self.dimension, delta)
    }

    /// Constants for the accuracy formulas. The drift magnitude at the origin
    /// is read off the drift network (at accuracy parameter 1), standing in
    /// for the unknown true drift.
    pub fn growth_params(&self) -> Result<GrowthParams> {
        let drift = self.drift_net(1.0)?;
        let at_zero = drift.realize(&self.activation, &vec![0.0; self.dimension])?;
        let norm = at_zero.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(GrowthParams {
            kappa: self.kappa,
            eta: self.eta,
            p: self.p,
            horizon: self.horizon,
            f1_norm_at_zero: norm,
        })
    }

    /// Same problem at a different dimension (families permitting).
    pub fn with_dimension(&self, d: usize) -> ProblemSpec {
        ProblemSpec {
            dimension: d,
            ..self.clone()
        }
    }

    /// Sampled check of the growth conditions on the supplied families: the
    /// functional family must stay locally Lipschitz against
    /// `kappa d^kappa (1 + |x|^kappa + |y|^kappa)` and the field family
    /// bounded by `kappa (d^kappa + |x|)`. Violations come back as warnings
    /// rather than errors.
    pub fn sampled_growth_warnings(&self, samples: usize, seed: u64) -> Result<Vec<String>> {
        let d = self.dimension;
        let mut warnings = Vec::new();
        let drift = self.drift_net(1.0)?;
        let initial = self.initial_net(1.0)?;
        let bound_scale = self.kappa * (d as f64).powf(self.kappa);
        let mut rng = CounterRng::from_parts(&[seed, 0x6772_6f77, d as u64]);
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..samples {
            let x: Vec<f64> = (0..d).map(|_| 2.0 * rng.standard_normal()).collect();
            let y: Vec<f64> = (0..d).map(|_| 2.0 * rng.standard_normal()).collect();
            let fx = drift.realize(&self.activation, &x)?;
            if norm(&fx) > self.kappa * ((d as f64).powf(self.kappa) + norm(&x)) + 1e-12 {
                warnings.push(format!(
                    "drift family exceeds the linear growth bound at |x|={:.3}",
                    norm(&x)
                ));
            }
            let gx = initial.realize(&self.activation, &x)?[0];
            let gy = initial.realize(&self.activation, &y)?[0];
            let dxy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let allowed = bound_scale
                * (1.0 + norm(&x).powf(self.kappa) + norm(&y).powf(self.kappa))
                * norm(&dxy);
            if (gx - gy).abs() > allowed + 1e-12 {
                warnings.push(format!(
                    "initial-condition family exceeds the local Lipschitz bound at |x-y|={:.3}",
                    norm(&dxy)
                ));
            }
            if warnings.len() >= 8 {
                break;
            }
        }
        Ok(warnings)
    }
}
