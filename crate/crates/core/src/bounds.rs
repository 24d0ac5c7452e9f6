//! Sample-count and step-size formulas with their a-priori bounds, evaluated
//! in log-space arithmetic.
//!
//! The quantities here involve factors like `e^{kappa^2 T}` raised to further
//! powers, which overflow `f64` already for moderate constants, so every
//! nonnegative quantity is carried as its natural logarithm. Products and
//! powers become sums and scalings; additions use log-sum-exp. Only when a
//! value is needed as a concrete integer (a sample count small enough to
//! build) is it folded back to `f64`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative number stored as its natural logarithm (`-inf` encodes zero).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogFloat {
    ln: f64,
}

pub const ZERO: LogFloat = LogFloat { ln: f64::NEG_INFINITY };
pub const ONE: LogFloat = LogFloat { ln: 0.0 };

impl LogFloat {
    pub fn from_f64(x: f64) -> LogFloat {
        debug_assert!(x >= 0.0, "log-space values must be nonnegative, got {x}");
        LogFloat { ln: x.ln() }
    }

    /// The value `e^x` without ever forming it.
    pub fn exp_of(x: f64) -> LogFloat {
        LogFloat { ln: x }
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// Folds back to `f64`; infinite when the value overflows.
    pub fn to_f64(&self) -> f64 {
        self.ln.exp()
    }

    /// The value as a finite `f64` if it fits.
    pub fn as_finite_f64(&self) -> Option<f64> {
        let v = self.ln.exp();
        v.is_finite().then_some(v)
    }

    pub fn mul(&self, other: LogFloat) -> LogFloat {
        LogFloat { ln: self.ln + other.ln }
    }

    pub fn div(&self, other: LogFloat) -> LogFloat {
        LogFloat { ln: self.ln - other.ln }
    }

    pub fn recip(&self) -> LogFloat {
        LogFloat { ln: -self.ln }
    }

    pub fn powf(&self, e: f64) -> LogFloat {
        if e == 0.0 {
            return ONE; // covers the 0^0 = 1 convention used by the formulas
        }
        LogFloat { ln: e * self.ln }
    }

    pub fn sqrt(&self) -> LogFloat {
        self.powf(0.5)
    }

    pub fn add(&self, other: LogFloat) -> LogFloat {
        if self.ln == f64::NEG_INFINITY {
            return other;
        }
        if other.ln == f64::NEG_INFINITY {
            return *self;
        }
        let (hi, lo) = if self.ln >= other.ln {
            (self.ln, other.ln)
        } else {
            (other.ln, self.ln)
        };
        LogFloat {
            ln: hi + (1.0 + (lo - hi).exp()).ln(),
        }
    }

    pub fn max(&self, other: LogFloat) -> LogFloat {
        if self.ln >= other.ln {
            *self
        } else {
            other
        }
    }

    pub fn min(&self, other: LogFloat) -> LogFloat {
        if self.ln <= other.ln {
            *self
        } else {
            other
        }
    }

    /// `self <= other` with a relative slack on the logarithms, for checks
    /// where both sides went through long product chains.
    pub fn le_with_slack(&self, other: LogFloat, slack: f64) -> bool {
        self.ln <= other.ln + slack * other.ln.abs().max(1.0)
    }

    /// Serializable snapshot: base-10 logarithm plus the value when finite.
    pub fn snapshot(&self) -> WideValue {
        WideValue {
            log10: self.log10(),
            value: self.as_finite_f64(),
        }
    }
}

/// JSON-friendly view of a [`LogFloat`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WideValue {
    pub log10: f64,
    pub value: Option<f64>,
}

/// Constants governing the accuracy formulas: the growth constant `kappa`,
/// the moment constant `eta`, the error exponent `p`, the time horizon, and
/// the drift magnitude at the origin.
#[derive(Clone, Copy, Debug)]
pub struct GrowthParams {
    pub kappa: f64,
    pub eta: f64,
    pub p: f64,
    pub horizon: f64,
    pub f1_norm_at_zero: f64,
}

impl GrowthParams {
    pub fn validate(&self) -> Result<()> {
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
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(self.f1_norm_at_zero >= 0.0) {
            return Err(Error::InvalidArgument(
                "drift norm at the origin must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn iota(&self) -> f64 {
        self.kappa.max(1.0)
    }

    /// The error exponent the accuracy formulas run with. Exponents below 2
    /// are served by the p = 2 guarantee, so the formulas clamp there.
    pub fn p_eff(&self) -> f64 {
        self.p.max(2.0)
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "accuracy must lie in (0, 1], got {eps}"
        )));
    }
    Ok(())
}

/// Monte Carlo sample count guaranteeing the target accuracy, with the
/// closed-form upper bound it stays below.
#[derive(Clone, Copy, Debug)]
pub struct SampleCount {
    /// Exact formula value before rounding up.
    pub value: LogFloat,
    /// Smallest admissible integer count, when it fits in a `u64`.
    pub count: Option<u64>,
    /// Closed-form upper bound on the count.
    pub upper_bound: LogFloat,
}

/// Smallest integer number of Monte Carlo samples admitted by the accuracy
/// formula at accuracy `eps` and dimension `d`.
pub fn sample_count(g: &GrowthParams, d: u64, eps: f64) -> Result<SampleCount> {
    g.validate()?;
    check_epsilon(eps)?;
    let (kappa, eta, t) = (g.kappa, g.eta, g.horizon);
    let p = g.p_eff();
    let iota = g.iota();
    let lf = LogFloat::from_f64;
    let d_lf = lf(d as f64);

    // ((2^{kappa+4} p kappa d^kappa e^{kappa^2 T}) / eps)^2
    let lead = lf(2.0)
        .powf(kappa + 4.0)
        .mul(lf(p))
        .mul(lf(kappa))
        .mul(d_lf.powf(kappa))
        .mul(LogFloat::exp_of(kappa * kappa * t))
        .div(lf(eps))
        .powf(2.0);

    // [1 + (kappa d^kappa T + sqrt(2 (p iota - 1) kappa d^kappa T))^{p kappa} + eta d^eta]^{2/p}
    let kdk_t = lf(kappa).mul(d_lf.powf(kappa)).mul(lf(t));
    let root = lf(2.0 * (p * iota - 1.0)).mul(kdk_t).sqrt();
    let base = kdk_t.add(root);
    let bracket = ONE.add(base.powf(p * kappa)).add(lf(eta).mul(d_lf.powf(eta)));
    let value = lead.mul(bracket.powf(2.0 / p));

    // upper bound: 2^{2(kappa+4)} p^2 iota^2 e^{2 kappa^2 T}
    //              [2 + |2 p iota max{1,T}|^{p kappa} + eta] d^{p kappa iota + eta + 2 kappa} eps^{-2}
    let upper = lf(2.0)
        .powf(2.0 * (kappa + 4.0))
        .mul(lf(p).powf(2.0))
        .mul(lf(iota).powf(2.0))
        .mul(LogFloat::exp_of(2.0 * kappa * kappa * t))
        .mul(
            lf(2.0)
                .add(lf(2.0 * p * iota * t.max(1.0)).powf(p * kappa))
                .add(lf(eta)),
        )
        .mul(d_lf.powf(p * kappa * iota + eta + 2.0 * kappa))
        .mul(lf(eps).powf(-2.0));

    let count = value.as_finite_f64().and_then(|v| {
        let n = v.ceil().max(1.0);
        (n < 9.0e18).then_some(n as u64)
    });
    Ok(SampleCount {
        value,
        count,
        upper_bound: upper,
    })
}

/// Step-size parameter guaranteeing the target accuracy, with its closed-form
/// lower bound.
#[derive(Clone, Copy, Debug)]
pub struct StepParameter {
    pub value: LogFloat,
    /// Closed-form lower bound on the value.
    pub lower_bound: LogFloat,
}

/// Step parameter admitted by the accuracy formula; always lies in (0, 1].
pub fn step_parameter(g: &GrowthParams, d: u64, eps: f64) -> Result<StepParameter> {
    g.validate()?;
    check_epsilon(eps)?;
    let (kappa, eta, t) = (g.kappa, g.eta, g.horizon);
    let p = g.p_eff();
    let iota = g.iota();
    let lf = LogFloat::from_f64;
    let d_lf = lf(d as f64);
    let dk = d_lf.powf(kappa);
    let kdk = lf(kappa).mul(dk);

    let front = lf(2.0 * kappa).mul(dk).max(ONE).add(lf(t).powf(-0.5)).recip();
    let exp_term = LogFloat::exp_of(-(3.0 + 3.0 * kappa + (kappa * kappa + 2.0 * kappa * iota + 2.0) * t));
    let mid = ONE.max(lf(2.0 * kappa * (kappa + 1.0)).mul(dk)).recip();
    let pow2 = lf(2.0).powf(-(2.0 * iota + 1.0));
    let inner = lf(2.0)
        .add(ONE.max(kdk).max(lf(g.f1_norm_at_zero)).mul(lf(t.max(1.0))))
        .add(lf(2.0 * (2.0 * iota - 1.0)).mul(kdk).mul(lf(t)).sqrt());
    let tail = inner.powf(p * iota + p * kappa).add(lf(eta).mul(d_lf.powf(eta))).powf(-1.0 / p);
    let value = lf(eps).mul(front).mul(exp_term).mul(mid).mul(pow2).mul(tail);

    // lower bound: min{1, sqrt(T)} e^{-(3 iota^2 + 3)(T+1)} iota^{-3} 2^{-(2 iota + 5)}
    //              ([6 iota max{1,T}]^{p iota + p kappa} + eta)^{-1/p}
    //              d^{-(2 kappa + kappa (kappa + iota) + eta)} eps
    let lower = ONE
        .min(lf(t).sqrt())
        .mul(LogFloat::exp_of(-(3.0 * iota * iota + 3.0) * (t + 1.0)))
        .mul(lf(iota).powf(-3.0))
        .mul(lf(2.0).powf(-(2.0 * iota + 5.0)))
        .mul(
            lf(6.0 * iota * t.max(1.0))
                .powf(p * iota + p * kappa)
                .add(lf(eta))
                .powf(-1.0 / p),
        )
        .mul(d_lf.powf(-(2.0 * kappa + kappa * (kappa + iota) + eta)))
        .mul(lf(eps));

    Ok(StepParameter {
        value,
        lower_bound: lower,
    })
}

/// Exponent of the dimension in the final complexity bound.
pub fn dimension_exponent(g: &GrowthParams) -> f64 {
    let (kappa, eta) = (g.kappa, g.eta);
    let p = g.p_eff();
    let iota = g.iota();
    2.0 * (p * kappa * iota + eta + 2.0 * kappa + iota)
        + (kappa * (2.0 + kappa + iota) + eta) * (kappa + 2.0)
}

/// Exponent of the accuracy in the final complexity bound.
pub fn accuracy_exponent(g: &GrowthParams) -> f64 {
    -(g.kappa + 6.0)
}

/// Closed-form complexity bound `C(kappa, p, T, eta) d^{e_d} eps^{-(kappa+6)}`.
pub fn final_bound(g: &GrowthParams, d: u64, eps: f64) -> Result<LogFloat> {
    g.validate()?;
    check_epsilon(eps)?;
    let (kappa, eta, t) = (g.kappa, g.eta, g.horizon);
    let p = g.p_eff();
    let iota = g.iota();
    let lf = LogFloat::from_f64;

    let m_const = lf(2.0)
        .powf(2.0 * (kappa + 4.0))
        .mul(lf(p).powf(2.0))
        .mul(lf(iota).powf(2.0))
        .mul(LogFloat::exp_of(2.0 * kappa * kappa * t))
        .mul(
            lf(2.0)
                .add(lf(2.0 * p * iota * t.max(1.0)).powf(p * kappa))
                .add(lf(eta)),
        );
    let d_const = ONE
        .min(lf(t).sqrt())
        .mul(LogFloat::exp_of(-(3.0 * iota * iota + 3.0) * (t + 1.0)))
        .mul(lf(iota).powf(-3.0))
        .mul(lf(2.0).powf(-(2.0 * iota + 5.0)))
        .mul(
            lf(6.0 * iota * t.max(1.0))
                .powf(p * iota + p * kappa)
                .add(lf(eta))
                .powf(-1.0 / p),
        );
    let constant = m_const
        .powf(2.0)
        .mul(lf(3.0 * iota))
        .mul(lf(t + 1.0))
        .mul(d_const.powf(-(kappa + 2.0)));
    Ok(constant
        .mul(lf(d as f64).powf(dimension_exponent(g)))
        .mul(lf(eps).powf(accuracy_exponent(g))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_rel(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn logfloat_arithmetic_matches_f64_in_range() {
        let xs = [1e-12, 0.5, 1.0, 3.25, 7e11];
        for &a in &xs {
            for &b in &xs {
                let (la, lb) = (LogFloat::from_f64(a), LogFloat::from_f64(b));
                assert!(close_rel(la.mul(lb).to_f64(), a * b, 1e-12));
                assert!(close_rel(la.div(lb).to_f64(), a / b, 1e-12));
                assert!(close_rel(la.add(lb).to_f64(), a + b, 1e-12));
                assert!(close_rel(la.powf(1.75).to_f64(), a.powf(1.75), 1e-12));
            }
        }
        assert_eq!(ZERO.add(LogFloat::from_f64(2.0)).to_f64(), 2.0);
        assert_eq!(ZERO.mul(LogFloat::from_f64(2.0)), ZERO);
        assert_eq!(ZERO.powf(0.0), ONE);
    }

    #[test]
    fn logfloat_survives_extreme_products() {
        let huge = LogFloat::exp_of(5000.0); // e^5000 overflows f64
        let v = huge.powf(3.0).mul(LogFloat::from_f64(2.0));
        assert!((v.ln() - (15000.0 + 2.0f64.ln())).abs() < 1e-9);
        assert!(v.as_finite_f64().is_none());
    }

    fn reference_params() -> GrowthParams {
        GrowthParams {
            kappa: 1.0,
            eta: 1.0,
            p: 2.0,
            horizon: 1.0,
            f1_norm_at_zero: 0.0,
        }
    }

    #[test]
    fn sample_count_spot_value() {
        // independently computed with 60-digit arithmetic
        let sc = sample_count(&reference_params(), 1, 1.0).unwrap();
        assert!(
            close_rel(sc.value.to_f64(), 236931.838734909317, 1e-9),
            "value {}",
            sc.value.to_f64()
        );
        assert_eq!(sc.count, Some(236_932));
        assert!(close_rel(sc.upper_bound.to_f64(), 575045.901843178923, 1e-9));
        assert!(sc.value.le_with_slack(sc.upper_bound, 1e-12));
    }

    #[test]
    fn sample_count_monotone_in_accuracy() {
        let g = reference_params();
        let mut last = None;
        for eps in [1.0, 0.5, 0.25, 0.125, 0.01] {
            let sc = sample_count(&g, 2, eps).unwrap();
            let n = sc.count.unwrap();
            if let Some(prev) = last {
                assert!(n >= prev, "count must not drop as accuracy tightens");
            }
            last = Some(n);
        }
    }

    #[test]
    fn sample_count_accepts_kappa_zero() {
        let g = GrowthParams { kappa: 0.0, ..reference_params() };
        let sc = sample_count(&g, 4, 0.5).unwrap();
        assert_eq!(sc.value, ZERO);
        assert_eq!(sc.count, Some(1));
    }

    #[test]
    fn step_parameter_spot_value_and_bounds() {
        let sp = step_parameter(&reference_params(), 1, 1.0).unwrap();
        assert!(
            close_rel(sp.value.to_f64(), 8.91685303697253570e-9, 1e-9),
            "value {}",
            sp.value.to_f64()
        );
        assert!(close_rel(sp.lower_bound.to_f64(), 1.33286529338963834e-9, 1e-9));
        assert!(sp.lower_bound.le_with_slack(sp.value, 1e-12));
    }

    #[test]
    fn step_parameter_never_exceeds_one_and_is_linear_in_accuracy() {
        let g = GrowthParams {
            kappa: 2.0,
            eta: 1.5,
            p: 3.0,
            horizon: 0.7,
            f1_norm_at_zero: 4.0,
        };
        for d in [1u64, 2, 8, 64] {
            for eps in [1.0, 0.5, 0.125] {
                let sp = step_parameter(&g, d, eps).unwrap();
                assert!(sp.value.ln() <= 0.0, "step parameter must stay within (0,1]");
                assert!(sp.lower_bound.le_with_slack(sp.value, 1e-12));
                let half = step_parameter(&g, d, eps / 2.0).unwrap();
                assert!(
                    close_rel(half.value.ln(), sp.value.ln() + (0.5f64).ln(), 1e-12),
                    "halving the accuracy halves the step parameter"
                );
            }
        }
    }

    #[test]
    fn exponents() {
        let g = reference_params();
        assert_eq!(accuracy_exponent(&g), -7.0);
        // kappa=1, p=2, eta=1, iota=1: 2(2+1+2+1) + (1*(2+1+1)+1)*3 = 12 + 15 = 27
        assert_eq!(dimension_exponent(&g), 27.0);
    }

    #[test]
    fn final_bound_scales_exactly_with_the_printed_exponents() {
        for kappa in [0.0, 1.0, 2.0] {
            let g = GrowthParams { kappa, ..reference_params() };
            let d = 4u64;
            let b1 = final_bound(&g, d, 0.5).unwrap();
            let b2 = final_bound(&g, d, 0.25).unwrap();
            // halving eps multiplies the bound by 2^{kappa+6}
            let ratio = b2.ln() - b1.ln();
            assert!(
                (ratio - (kappa + 6.0) * 2.0f64.ln()).abs() < 1e-9,
                "accuracy exponent mismatch at kappa={kappa}"
            );
            let bd1 = final_bound(&g, 2, 0.5).unwrap();
            let bd2 = final_bound(&g, 4, 0.5).unwrap();
            let dratio = bd2.ln() - bd1.ln();
            assert!(
                (dratio - dimension_exponent(&g) * 2.0f64.ln()).abs() < 1e-9,
                "dimension exponent mismatch at kappa={kappa}"
            );
        }
    }

    #[test]
    fn rejects_invalid_arguments() {
        let g = reference_params();
        assert!(sample_count(&g, 1, 0.0).is_err());
        assert!(sample_count(&g, 1, 1.5).is_err());
        let bad = GrowthParams { eta: 0.5, ..g };
        assert!(step_parameter(&bad, 1, 0.5).is_err());
        let bad = GrowthParams { kappa: -1.0, ..g };
        assert!(sample_count(&bad, 1, 0.5).is_err());
    }
}
