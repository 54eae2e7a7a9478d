//! Sample sizes and power for two-arm non-inferiority trials under the
//! normal approximation.
//!
//! With control fraction `h`, weighted arm standard deviations `a`, `b` and
//! design gap `g` (the test estimand at the assumed true parameters),
//!
//! ```text
//! N = (z_{1−α} + z_{1−β})² · (a²/h + b²/(1−h)) / g²
//! ```
//!
//! Per-arm counts are the ceilings of `hN` and `(1−h)N`.

use serde::{Deserialize, Serialize};

use crate::allocation::{spec_weighted_sds, two_arm_fraction};
use crate::error::{Error, Result};
use crate::model::{self, DesignSpec, EvalPoint, Margin};
use crate::normal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeResult {
    pub n_control: u64,
    pub n_treatment: u64,
    pub n_total: u64,
    /// Real-valued total before per-arm rounding.
    pub n_total_unrounded: f64,
    pub h_used: f64,
    pub nominal_power: f64,
    pub margin: Margin,
    /// Variance at balanced allocation over variance at `h_used`.
    pub are_vs_balanced: f64,
    pub variance_eval_point: EvalPoint,
}

// Largest total we report; beyond this the design is practically infinite.
const MAX_TOTAL: f64 = 1e15;

fn ni_spec(spec: &DesignSpec) -> Result<DesignSpec> {
    let spec = model::validate(spec)?;
    if !spec.is_noninferiority() {
        return Err(Error::validation(
            "trial_kind",
            "expected a non-inferiority design",
        ));
    }
    Ok(spec)
}

/// Design gap at the assumed true parameters; zero at the null boundary.
fn design_gap(spec: &DesignSpec) -> Result<(f64, f64)> {
    let (control, treatment) = spec.arms_at(EvalPoint::Alternative)?;
    let contrast = spec.contrast()?;
    let gap = contrast.estimand(control.mean(), treatment.mean());
    let scale = (contrast.weight_treatment * treatment.mean()).abs()
        + (contrast.weight_control * control.mean()).abs()
        + contrast.offset.abs();
    Ok((gap, scale))
}

/// Per-arm and total sample sizes at control fraction `h` (default: the
/// fraction minimizing N for the same variances).
pub fn sample_size_ni(spec: &DesignSpec, h: Option<f64>) -> Result<SampleSizeResult> {
    let spec = ni_spec(spec)?;
    let (gap, scale) = design_gap(&spec)?;
    if gap.abs() <= 1e-12 * scale {
        return Err(Error::domain(
            "design gap is zero: the assumed true effect lies on the null boundary",
        ));
    }
    if gap < 0.0 {
        return Err(Error::domain(
            "assumed true parameters lie inside the null region; no sample size reaches the target power",
        ));
    }

    let point = spec.variance_eval_point.unwrap_or(EvalPoint::Alternative);
    let (a, b) = spec_weighted_sds(&spec, point)?;
    let h = match h {
        Some(h) if !(h > 0.0 && h < 1.0) => {
            return Err(Error::validation(
                "h",
                "allocation fraction must lie strictly in (0,1)",
            ))
        }
        Some(h) => h,
        None => two_arm_fraction(a, b),
    };

    let z = spec.rates.z_alpha() + spec.rates.z_beta();
    let unit_variance = a * a / h + b * b / (1.0 - h);
    let total = z * z * unit_variance / (gap * gap);
    if !(total.is_finite() && total <= MAX_TOTAL) {
        return Err(Error::domain(format!(
            "required sample size {total:e} exceeds {MAX_TOTAL:e}"
        )));
    }
    let n_control = (h * total).ceil().max(1.0) as u64;
    let n_treatment = ((1.0 - h) * total).ceil().max(1.0) as u64;
    Ok(SampleSizeResult {
        n_control,
        n_treatment,
        n_total: n_control + n_treatment,
        n_total_unrounded: total,
        h_used: h,
        nominal_power: spec.rates.power,
        margin: spec.ni_margin()?,
        are_vs_balanced: 2.0 * (a * a + b * b) / unit_variance,
        variance_eval_point: point,
    })
}

/// Normal-approximation power of the one-sided test with the given arm
/// sizes. Equals α when the assumed truth lies on the null boundary.
pub fn achieved_power(spec: &DesignSpec, n_control: u64, n_treatment: u64) -> Result<f64> {
    let spec = ni_spec(spec)?;
    if n_control == 0 {
        return Err(Error::validation("n_control", "arm size must be positive"));
    }
    if n_treatment == 0 {
        return Err(Error::validation(
            "n_treatment",
            "arm size must be positive",
        ));
    }
    let (gap, _) = design_gap(&spec)?;
    let point = spec.variance_eval_point.unwrap_or(EvalPoint::Alternative);
    let (a, b) = spec_weighted_sds(&spec, point)?;
    let se = (a * a / n_control as f64 + b * b / n_treatment as f64).sqrt();
    Ok(normal::cdf(gap / se - spec.rates.z_alpha()))
}
