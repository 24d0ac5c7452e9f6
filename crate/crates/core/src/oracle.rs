//! Independent ground truth: direct Euler-Maruyama simulation, plain Monte
//! Carlo estimation, closed-form reference solutions, and Monte Carlo
//! measurement of L^p approximation errors.
//!
//! Nothing in this module goes through the network constructions; the
//! simulation loop below is the yardstick the built networks are checked
//! against.

use crate::brownian::BrownianPath;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::Matrix;
use crate::problem::Measure;
use crate::rng::CounterRng;

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// Runs the explicit Euler-Maruyama loop
/// `y <- y + length * drift(y) + S * dW` over every interval of the path,
/// including the trailing partial one, and returns the final state.
pub fn em_simulate<F>(
    drift: F,
    diffusion_factor: &Matrix,
    start: &[f64],
    horizon: f64,
    grid: &TimeGrid,
    path: &BrownianPath,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let full = grid.full_steps(horizon)?;
    if path.len() as u64 != full + 1 {
        return Err(Error::DimensionMismatch(format!(
            "path has {} increments, grid expects {}",
            path.len(),
            full + 1
        )));
    }
    if path.dim() != start.len() {
        return Err(Error::DimensionMismatch(format!(
            "path dimension {} does not match state dimension {}",
            path.dim(),
            start.len()
        )));
    }
    let remainder = grid.remainder(horizon)?;
    let mut state = start.to_vec();
    for (i, increment) in path.increments().iter().enumerate() {
        let length = if (i as u64) < full {
            grid.step()
        } else {
            remainder
        };
        let pull = drift(&state);
        if pull.len() != state.len() {
            return Err(Error::DimensionMismatch(format!(
                "drift returned {} values for a state of dimension {}",
                pull.len(),
                state.len()
            )));
        }
        let noise = diffusion_factor.matvec(increment)?;
        for ((s, p), n) in state.iter_mut().zip(&pull).zip(&noise) {
            *s += length * p + n;
        }
    }
    Ok(state)
}

/// Plain Monte Carlo estimate of `E[f0(Y_T)]` for the simulated chain started
/// at `x`, with the standard error of the mean.
#[allow(clippy::too_many_arguments)]
pub fn mc_estimate_u<F0, F1>(
    f0: F0,
    drift: F1,
    diffusion_factor: &Matrix,
    start: &[f64],
    horizon: f64,
    grid: &TimeGrid,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)>
where
    F0: Fn(&[f64]) -> f64,
    F1: Fn(&[f64]) -> Vec<f64>,
{
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "need at least two samples for a standard error".into(),
        ));
    }
    let d = start.len();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for m in 1..=samples {
        let path = BrownianPath::sample(d, horizon, grid, m, seed)?;
        let end = em_simulate(&drift, diffusion_factor, start, horizon, grid, &path)?;
        let v = f0(&end);
        sum += v;
        sumsq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Linear drift coefficient of a reference solution.
#[derive(Clone, Debug)]
pub enum DriftForm {
    Diag(Vec<f64>),
    /// Kept for completeness; closed forms for non-diagonal drift are not
    /// shipped and evaluate to `UnsupportedKind`.
    Dense(Matrix),
}

/// Closed-form solutions used as references in tests and studies.
#[derive(Clone, Debug)]
pub enum Reference {
    /// Zero drift, affine functional: `u(T, x) = <c, x> + b` for any
    /// constant diffusion.
    AffineNoDrift { coeffs: Vec<f64>, offset: f64 },
    /// Drift `x -> G x`, affine functional: `u(T, x) = <c, e^{G T} x> + b`.
    AffineLinearDrift {
        coeffs: Vec<f64>,
        offset: f64,
        drift: DriftForm,
    },
    /// Zero drift, one dimension, `f0 = relu`, noise scale `sigma`:
    /// `u(T, x) = x Phi(x / (sigma sqrt(T))) + sigma sqrt(T) phi(...)`.
    ReluGaussian1d { sigma: f64 },
    /// Exact mean of the discrete chain with drift `x -> G x` and affine
    /// functional, at the given step parameter: the recursion
    /// `mu <- (I + length G) mu` over the grid intervals.
    DiscreteAffineRecursion {
        coeffs: Vec<f64>,
        offset: f64,
        drift: DriftForm,
        delta: f64,
    },
}

impl Reference {
    pub fn dimension(&self) -> usize {
        match self {
            Reference::AffineNoDrift { coeffs, .. } => coeffs.len(),
            Reference::AffineLinearDrift { coeffs, .. } => coeffs.len(),
            Reference::ReluGaussian1d { .. } => 1,
            Reference::DiscreteAffineRecursion { coeffs, .. } => coeffs.len(),
        }
    }
}

fn diag_of(form: &DriftForm) -> Result<&[f64]> {
    match form {
        DriftForm::Diag(g) => Ok(g),
        DriftForm::Dense(_) => Err(Error::UnsupportedKind(
            "closed forms are shipped for diagonal drift only".into(),
        )),
    }
}

/// Evaluates a reference solution at time `horizon` and point `x`.
pub fn closed_form(reference: &Reference, horizon: f64, x: &[f64]) -> Result<f64> {
    if x.len() != reference.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "reference is {}-dimensional, point has length {}",
            reference.dimension(),
            x.len()
        )));
    }
    match reference {
        Reference::AffineNoDrift { coeffs, offset } => {
            Ok(coeffs.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + offset)
        }
        Reference::AffineLinearDrift {
            coeffs,
            offset,
            drift,
        } => {
            let g = diag_of(drift)?;
            let acc = coeffs
                .iter()
                .zip(x)
                .zip(g)
                .map(|((c, v), gi)| c * (gi * horizon).exp() * v)
                .sum::<f64>();
            Ok(acc + offset)
        }
        Reference::ReluGaussian1d { sigma } => {
            if !(*sigma > 0.0) || !(horizon > 0.0) {
                return Err(Error::InvalidArgument(
                    "relu reference needs positive sigma and horizon".into(),
                ));
            }
            let s = sigma * horizon.sqrt();
            let z = x[0] / s;
            Ok(x[0] * normal_cdf(z) + s * normal_pdf(z))
        }
        Reference::DiscreteAffineRecursion {
            coeffs,
            offset,
            drift,
            delta,
        } => {
            let g = diag_of(drift)?;
            let grid = TimeGrid::new(*delta)?;
            let full = grid.full_steps(horizon)?;
            let remainder = grid.remainder(horizon)?;
            let mut mean = x.to_vec();
            for step in 0..=full {
                let length = if step < full { grid.step() } else { remainder };
                for (m, gi) in mean.iter_mut().zip(g) {
                    *m += length * gi * *m;
                }
            }
            Ok(coeffs.iter().zip(&mean).map(|(c, v)| c * v).sum::<f64>() + offset)
        }
    }
}

/// Monte Carlo estimate of the L^p error `(E_nu |f(x) - g(x)|^p)^{1/p}`
/// between two functions, with a percentile-bootstrap half-width.
pub fn lp_error<F, G>(
    f: F,
    reference: G,
    measure: &Measure,
    dim: usize,
    p: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "error exponent must be positive, got {p}"
        )));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument(
            "need at least two sample points".into(),
        ));
    }
    let mut rng = CounterRng::from_parts(&[seed, 0x6d65_6173, dim as u64]);
    let powered: Vec<f64> = (0..n_samples)
        .map(|_| {
            let x = measure.sample(dim, &mut rng);
            (f(&x) - reference(&x)).abs().powf(p)
        })
        .collect();
    let estimate = mean(&powered).powf(1.0 / p);

    const RESAMPLES: usize = 1000;
    let mut boot = CounterRng::from_parts(&[seed, 0x626f_6f74, dim as u64]);
    let mut resampled = Vec::with_capacity(RESAMPLES);
    for _ in 0..RESAMPLES {
        let mut acc = 0.0;
        for _ in 0..n_samples {
            let idx = (boot.next_u64() % n_samples as u64) as usize;
            acc += powered[idx];
        }
        resampled.push((acc / n_samples as f64).powf(1.0 / p));
    }
    resampled.sort_by(|a, b| a.total_cmp(b));
    let lo = resampled[(0.025 * (RESAMPLES - 1) as f64).round() as usize];
    let hi = resampled[(0.975 * (RESAMPLES - 1) as f64).round() as usize];
    Ok((estimate, 0.5 * (hi - lo)))
}

/// Bootstrap standard error of the mean of `values`.
pub fn bootstrap_se(values: &[f64], resamples: usize, seed: u64) -> f64 {
    let n = values.len();
    let mut rng = CounterRng::from_parts(&[seed, 0x6273_6572]);
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut acc = 0.0;
        for _ in 0..n {
            acc += values[(rng.next_u64() % n as u64) as usize];
        }
        means.push(acc / n as f64);
    }
    let m = mean(&means);
    (means.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (resamples as f64 - 1.0)).sqrt()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_drift(x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }

    #[test]
    fn zero_drift_telescopes() {
        let grid = TimeGrid::new(0.5).unwrap();
        let path = BrownianPath::sample(3, 0.9, &grid, 1, 11).unwrap();
        let x = [1.0, -2.0, 0.5];
        let y = em_simulate(zero_drift, &Matrix::identity(3), &x, 0.9, &grid, &path).unwrap();
        for i in 0..3 {
            let total: f64 = path.increments().iter().map(|inc| inc[i]).sum();
            assert!((y[i] - (x[i] + total)).abs() < 1e-14);
        }
    }

    #[test]
    fn single_step_unrolls_by_hand() {
        // horizon = step: one live interval plus a zero trailing one
        let grid = TimeGrid::new(0.5).unwrap();
        let path = BrownianPath::sample(1, 0.25, &grid, 3, 5).unwrap();
        assert_eq!(path.len(), 2);
        assert_eq!(path.increments()[1], vec![0.0]);
        let drift = |x: &[f64]| vec![2.0 * x[0] + 1.0];
        let s = Matrix::new(1, 1, vec![1.5]).unwrap();
        let y = em_simulate(drift, &s, &[3.0], 0.25, &grid, &path).unwrap();
        let dw = path.increments()[0][0];
        let after_one = 3.0 + 0.25 * (2.0 * 3.0 + 1.0) + 1.5 * dw;
        // trailing interval has length 0 and zero noise: the state passes through
        assert!((y[0] - after_one).abs() < 1e-14);
    }

    #[test]
    fn mismatched_path_is_rejected() {
        let grid = TimeGrid::new(0.5).unwrap();
        let path = BrownianPath::sample(1, 1.0, &grid, 1, 5).unwrap();
        let wrong = TimeGrid::new(0.25).unwrap();
        assert!(
            em_simulate(zero_drift, &Matrix::identity(1), &[0.0], 1.0, &wrong, &path).is_err()
        );
    }

    #[test]
    fn mc_constant_functional_has_zero_error() {
        let grid = TimeGrid::new(0.5).unwrap();
        let (mean, se) = mc_estimate_u(
            |_: &[f64]| 4.25,
            zero_drift,
            &Matrix::identity(1),
            &[0.0],
            1.0,
            &grid,
            64,
            7,
        )
        .unwrap();
        assert_eq!(mean, 4.25);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn mc_affine_is_unbiased_within_three_se() {
        let grid = TimeGrid::new(0.5).unwrap();
        let x = [0.7, -0.3];
        let (mean, se) = mc_estimate_u(
            |y: &[f64]| y[0] + y[1] + 1.0,
            zero_drift,
            &Matrix::identity(2),
            &x,
            1.0,
            &grid,
            4096,
            99,
        )
        .unwrap();
        let exact = x[0] + x[1] + 1.0;
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "mean {mean} vs {exact} (3se = {})",
            3.0 * se
        );
    }

    #[test]
    fn mc_matches_relu_closed_form() {
        let grid = TimeGrid::new(0.5).unwrap();
        let reference = Reference::ReluGaussian1d { sigma: 1.0 };
        for x in [-1.0, 0.0, 1.5] {
            let (mean, se) = mc_estimate_u(
                |y: &[f64]| y[0].max(0.0),
                zero_drift,
                &Matrix::identity(1),
                &[x],
                1.0,
                &grid,
                4096,
                1234,
            )
            .unwrap();
            let exact = closed_form(&reference, 1.0, &[x]).unwrap();
            assert!(
                (mean - exact).abs() <= 3.0 * se,
                "x={x}: mean {mean} vs {exact} (3se = {})",
                3.0 * se
            );
        }
    }

    #[test]
    fn closed_form_hand_values() {
        // driftless affine martingale: u(T, x) = x at every horizon
        let mart = Reference::AffineNoDrift {
            coeffs: vec![1.0],
            offset: 0.0,
        };
        assert_eq!(closed_form(&mart, 2.0, &[0.75]).unwrap(), 0.75);

        // mean-reverting linear drift: u(T, x) = e^{-T} <1, x>
        let ou = Reference::AffineLinearDrift {
            coeffs: vec![1.0, 1.0],
            offset: 0.0,
            drift: DriftForm::Diag(vec![-1.0, -1.0]),
        };
        let got = closed_form(&ou, 1.0, &[2.0, 3.0]).unwrap();
        assert!((got - 5.0 * (-1.0f64).exp()).abs() < 1e-14);

        // four-step discrete recursion: (1 - 0.25)^4 = 0.31640625
        let disc = Reference::DiscreteAffineRecursion {
            coeffs: vec![1.0],
            offset: 0.0,
            drift: DriftForm::Diag(vec![-1.0]),
            delta: 0.5,
        };
        let got = closed_form(&disc, 1.0, &[1.0]).unwrap();
        assert_eq!(got, 0.31640625);
    }

    #[test]
    fn dense_drift_is_unsupported() {
        let r = Reference::AffineLinearDrift {
            coeffs: vec![1.0, 0.0],
            offset: 0.0,
            drift: DriftForm::Dense(Matrix::identity(2)),
        };
        assert!(matches!(
            closed_form(&r, 1.0, &[0.0, 0.0]),
            Err(Error::UnsupportedKind(_))
        ));
    }

    #[test]
    fn relu_closed_form_matches_adaptive_quadrature() {
        // E[relu(x + z)] over a standard Gaussian z, by adaptive Simpson on
        // the live part of the integrand
        #[allow(clippy::too_many_arguments)]
        fn simpson<F: Fn(f64) -> f64 + Copy>(
            f: F,
            a: f64,
            b: f64,
            fa: f64,
            fb: f64,
            fm: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(f, a, m, fa, fm, flm, tol / 2.0, depth - 1)
                    + simpson(f, m, b, fm, fb, frm, tol / 2.0, depth - 1)
            }
        }
        let reference = Reference::ReluGaussian1d { sigma: 1.0 };
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let integrand = move |z: f64| (x + z).max(0.0) * normal_pdf(z);
            let (a, b) = ((-x).max(-12.0), 12.0 + x.abs());
            let q = simpson(
                integrand,
                a,
                b,
                integrand(a),
                integrand(b),
                integrand(0.5 * (a + b)),
                1e-13,
                40,
            );
            let cf = closed_form(&reference, 1.0, &[x]).unwrap();
            assert!(
                (q - cf).abs() <= 1e-10,
                "x={x}: quadrature {q} vs closed form {cf}"
            );
        }
    }

    #[test]
    fn lp_error_zero_and_constant_offset() {
        let measure = Measure::StandardGaussian;
        let f = |x: &[f64]| x[0] * 2.0;
        let (e, hw) = lp_error(f, f, &measure, 1, 2.0, 200, 3).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(hw, 0.0);
        for p in [0.5, 1.0, 2.0, 4.0] {
            let g = |x: &[f64]| x[0] * 2.0 + 0.75;
            let (e, _) = lp_error(g, f, &measure, 1, p, 200, 3).unwrap();
            assert!((e - 0.75).abs() < 1e-12, "p={p}: {e}");
        }
    }

    #[test]
    fn lp_error_is_monotone_in_p_on_shared_samples() {
        let measure = Measure::StandardGaussian;
        let f = |x: &[f64]| x[0].sin();
        let zero = |_: &[f64]| 0.0;
        let mut last = 0.0;
        for p in [0.5, 1.0, 2.0, 3.0] {
            // same seed => same sample set for every exponent
            let (e, _) = lp_error(f, zero, &measure, 1, p, 500, 42).unwrap();
            assert!(e >= last - 1e-12, "p={p}: {e} < {last}");
            last = e;
        }
    }

    #[test]
    fn mc_z_scores_against_the_discrete_recursion() {
        // 200 repetitions of a mean-reverting chain estimate; at least 99% of
        // the z-scores against the exact chain mean must stay within 4
        let grid = TimeGrid::new(0.5).unwrap();
        let disc = Reference::DiscreteAffineRecursion {
            coeffs: vec![1.0],
            offset: 0.0,
            drift: DriftForm::Diag(vec![-1.0]),
            delta: 0.5,
        };
        let exact = closed_form(&disc, 1.0, &[2.0]).unwrap();
        let drift = |x: &[f64]| vec![-x[0]];
        let mut bad = 0;
        for trial in 0..200u64 {
            let (mean, se) = mc_estimate_u(
                |y: &[f64]| y[0],
                drift,
                &Matrix::identity(1),
                &[2.0],
                1.0,
                &grid,
                256,
                1000 + trial,
            )
            .unwrap();
            if ((mean - exact) / se).abs() > 4.0 {
                bad += 1;
            }
        }
        assert!(bad <= 2, "{bad} of 200 z-scores exceeded 4");
    }
}
