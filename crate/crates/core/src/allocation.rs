//! Closed-form optimal allocation fractions and asymptotic relative
//! efficiency (ARE) against balanced allocation.
//!
//! Every optimum here minimizes the variance of a linear contrast of arm
//! means. For two arms with (weighted) standard deviations `a` (control) and
//! `b` (treatment) the objective is `a²/h + b²/(1−h)`, minimized at
//! `h = a/(a+b)` with ARE `2(a²+b²)/(a+b)²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Contrast, DesignSpec, EvalPoint, Margin, TrialKind};

/// Allocation of a multi-arm superiority design; `fractions[0]` is control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperiorityAllocation {
    pub k: usize,
    pub fractions: Vec<f64>,
    pub are_vs_balanced: f64,
}

/// Optimal allocation of any supported design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    /// Control share of the total sample, h (or c₁).
    pub control_fraction: f64,
    /// Per-arm shares, control first; sums to one.
    pub fractions: Vec<f64>,
    /// Total experimental over control, (1−h)/h.
    pub ratio_treatment_to_control: f64,
    /// Each experimental arm's size relative to control.
    pub ratios_to_control: Vec<f64>,
    pub are_vs_balanced: f64,
    /// Parameter point used for variance evaluation (non-inferiority only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_eval_point: Option<EvalPoint>,
}

impl AllocationPlan {
    fn from_fractions(fractions: Vec<f64>, are: f64, point: Option<EvalPoint>) -> Self {
        let control = fractions[0];
        AllocationPlan {
            control_fraction: control,
            ratio_treatment_to_control: (1.0 - control) / control,
            ratios_to_control: fractions[1..].iter().map(|c| c / control).collect(),
            fractions,
            are_vs_balanced: are,
            variance_eval_point: point,
        }
    }
}

/// Control fraction `a/(a+b)` minimizing `a²/h + b²/(1−h)`.
pub fn two_arm_fraction(sd_control: f64, sd_treatment: f64) -> f64 {
    sd_control / (sd_control + sd_treatment)
}

/// ARE of `a/(a+b)` over `h = 1/2`, written as `1 + ((a−b)/(a+b))²`, which
/// equals `2(a²+b²)/(a+b)²` and never rounds below one.
pub fn two_arm_are(sd_control: f64, sd_treatment: f64) -> f64 {
    let t = (sd_control - sd_treatment) / (sd_control + sd_treatment);
    1.0 + t * t
}

/// Equal-variance superiority design with `k` arms including control.
pub fn superiority_equal_variance(k: usize) -> Result<SuperiorityAllocation> {
    if k < 2 {
        return Err(Error::validation(
            "k",
            "need at least two arms including control",
        ));
    }
    let kf = k as f64;
    let root = (kf - 1.0).sqrt();
    // k = 2 is the 0/0 limit of the general expression.
    let control = if k == 2 {
        0.5
    } else {
        (-1.0 + root) / (kf - 2.0)
    };
    let other = (1.0 - control) / (kf - 1.0);
    let mut fractions = vec![other; k];
    fractions[0] = control;
    let are = 2.0 * kf * (kf - 1.0) / (root + kf - 1.0).powi(2);
    Ok(SuperiorityAllocation {
        k,
        fractions,
        are_vs_balanced: are,
    })
}

/// Superiority design with per-arm standard deviations, control first.
///
/// Falls back to [`superiority_equal_variance`] when all σ are equal so the
/// two agree exactly.
pub fn superiority_unequal_variance(sigmas: &[f64]) -> Result<SuperiorityAllocation> {
    let k = sigmas.len();
    if k < 2 {
        return Err(Error::validation(
            "sigmas",
            "need at least two arms including control",
        ));
    }
    if let Some(i) = sigmas.iter().position(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::validation(
            format!("sigmas[{i}]"),
            "standard deviation must be positive and finite",
        ));
    }
    if sigmas.iter().all(|s| *s == sigmas[0]) {
        return superiority_equal_variance(k);
    }
    let kf = k as f64;
    let root = (kf - 1.0).sqrt();
    let rest: f64 = sigmas[1..].iter().sum();
    let denom = sigmas[0] * root + rest;
    let mut fractions: Vec<f64> = sigmas.iter().map(|s| s / denom).collect();
    fractions[0] = sigmas[0] * root / denom;

    let rest_sq: f64 = sigmas[1..].iter().map(|s| s * s).sum();
    let are = (kf * (kf - 1.0) * sigmas[0].powi(2) + kf * rest_sq) / (denom * denom);
    Ok(SuperiorityAllocation {
        k,
        fractions,
        are_vs_balanced: are,
    })
}

fn check_sds(sigma_c: f64, sigma_t: f64) -> Result<()> {
    if !(sigma_c > 0.0 && sigma_c.is_finite()) {
        return Err(Error::validation(
            "sigma_c",
            "standard deviation must be positive and finite",
        ));
    }
    if !(sigma_t > 0.0 && sigma_t.is_finite()) {
        return Err(Error::validation(
            "sigma_t",
            "standard deviation must be positive and finite",
        ));
    }
    Ok(())
}

/// Weighted standard deviations for the statistic `X̄_C − X̄_T` (additive)
/// or `X̄_C − ΔX̄_T` (multiplicative).
fn margin_sds(margin: &Margin, sigma_c: f64, sigma_t: f64) -> Result<(f64, f64)> {
    margin.validate("margin", false)?;
    check_sds(sigma_c, sigma_t)?;
    let contrast = Contrast::new(*margin, model::Direction::HigherFavorable);
    Ok(contrast.weighted_sds(sigma_c, sigma_t))
}

/// Optimal control fraction for a two-arm non-inferiority design:
/// `σ_C/(σ_C+σ_T)` (additive) or `σ_C/(σ_C+Δσ_T)` (multiplicative).
pub fn ni_optimal_fraction(margin: &Margin, sigma_c: f64, sigma_t: f64) -> Result<f64> {
    let (a, b) = margin_sds(margin, sigma_c, sigma_t)?;
    Ok(two_arm_fraction(a, b))
}

/// ARE of [`ni_optimal_fraction`] over balanced allocation.
pub fn ni_are(margin: &Margin, sigma_c: f64, sigma_t: f64) -> Result<f64> {
    let (a, b) = margin_sds(margin, sigma_c, sigma_t)?;
    Ok(two_arm_are(a, b))
}

/// Weighted arm standard deviations of a non-inferiority spec at `point`.
pub(crate) fn spec_weighted_sds(spec: &DesignSpec, point: EvalPoint) -> Result<(f64, f64)> {
    let (control, treatment) = spec.arms_at(point)?;
    Ok(spec
        .contrast()?
        .weighted_sds(control.stddev(), treatment.stddev()))
}

/// Optimal control fraction of a non-inferiority spec, with arm variances
/// V(μ) from the family at the spec's evaluation point (default: null
/// boundary).
pub fn ni_optimal_fraction_glm(spec: &DesignSpec) -> Result<f64> {
    let spec = model::validate(spec)?;
    if !spec.is_noninferiority() {
        return Err(Error::validation(
            "trial_kind",
            "expected a non-inferiority design",
        ));
    }
    let point = spec.variance_eval_point.unwrap_or(EvalPoint::NullBoundary);
    let (a, b) = spec_weighted_sds(&spec, point)?;
    Ok(two_arm_fraction(a, b))
}

/// Optimal allocation plan for any validated design.
pub fn allocate(spec: &DesignSpec) -> Result<AllocationPlan> {
    let spec = model::validate(spec)?;
    match spec.trial_kind {
        TrialKind::NoninferiorityTwoArm => {
            let point = spec.variance_eval_point.unwrap_or(EvalPoint::NullBoundary);
            let (a, b) = spec_weighted_sds(&spec, point)?;
            let h = two_arm_fraction(a, b);
            Ok(AllocationPlan::from_fractions(
                vec![h, 1.0 - h],
                two_arm_are(a, b),
                Some(point),
            ))
        }
        TrialKind::SuperiorityMultiarm => {
            let sigmas: Vec<f64> = spec.superiority_arms().iter().map(|a| a.stddev()).collect();
            let plan = superiority_unequal_variance(&sigmas)?;
            Ok(AllocationPlan::from_fractions(
                plan.fractions,
                plan.are_vs_balanced,
                None,
            ))
        }
    }
}
