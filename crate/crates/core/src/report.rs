//! Relative-efficiency curves and their CSV and table renderings.
//!
//! For a two-arm design with weighted standard deviations `a` (control) and
//! `b` (treatment), the contrast variance at treatment:control ratio `r` is
//! proportional to `V(r) = (1+r)(a² + b²/r)`, minimized at `r* = b/a` with
//! `V(r*) = (a+b)²`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::allocation::{spec_weighted_sds, two_arm_are};
use crate::error::{Error, Result};
use crate::model::{self, DesignSpec, EvalPoint, Margin, MarginKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub ratio: f64,
    pub relative_efficiency: f64,
}

/// Efficiency relative to the optimal allocation over a range of ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCurve {
    pub points: Vec<CurvePoint>,
    pub optimal_ratio: f64,
    pub spec: DesignSpec,
}

impl EfficiencyCurve {
    /// Grid point with the smallest relative efficiency.
    pub fn minimum(&self) -> CurvePoint {
        *self
            .points
            .iter()
            .min_by(|a, b| a.relative_efficiency.total_cmp(&b.relative_efficiency))
            .expect("curves have at least two points")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArePoint {
    pub delta: f64,
    pub are: f64,
}

/// ARE of optimal over balanced allocation as a function of the margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreCurve {
    pub kind: MarginKind,
    pub sigma_c: f64,
    pub sigma_t: f64,
    pub points: Vec<ArePoint>,
}

fn curve_sds(spec: &DesignSpec) -> Result<(f64, f64)> {
    let spec = model::validate(spec)?;
    if !spec.is_noninferiority() {
        return Err(Error::validation(
            "trial_kind",
            "expected a non-inferiority design",
        ));
    }
    spec_weighted_sds(
        &spec,
        spec.variance_eval_point.unwrap_or(EvalPoint::NullBoundary),
    )
}

fn relative_efficiency(a: f64, b: f64, r: f64) -> f64 {
    // V(r)/V(r*) − 1 = (a√r − b/√r)² / (a+b)²
    let root = r.sqrt();
    let t = (a * root - b / root) / (a + b);
    1.0 + t * t
}

/// `V(r)/V(r*)` for treatment:control ratio `r`.
pub fn efficiency_at_ratio(spec: &DesignSpec, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::validation(
            "ratio",
            "ratio must be positive and finite",
        ));
    }
    let (a, b) = curve_sds(spec)?;
    Ok(relative_efficiency(a, b, r))
}

/// Optimal treatment:control ratio `r* = (1−h)/h`.
pub fn optimal_ratio(spec: &DesignSpec) -> Result<f64> {
    let (a, b) = curve_sds(spec)?;
    Ok(b / a)
}

/// Efficiency on `points` log-spaced ratios from `r_min` to `r_max`.
pub fn efficiency_curve(
    spec: &DesignSpec,
    r_min: f64,
    r_max: f64,
    points: usize,
) -> Result<EfficiencyCurve> {
    if !(r_min > 0.0 && r_min.is_finite()) {
        return Err(Error::validation("r_min", "must be positive and finite"));
    }
    if !(r_max > r_min && r_max.is_finite()) {
        return Err(Error::validation(
            "r_max",
            "must be finite and exceed r_min",
        ));
    }
    if points < 2 {
        return Err(Error::validation("points", "need at least two points"));
    }
    let (a, b) = curve_sds(spec)?;
    let (lo, hi) = (r_min.ln(), r_max.ln());
    let n = points;
    let last = (n - 1) as f64;
    let points = (0..n)
        .map(|i| {
            let ratio = if i + 1 == n {
                r_max
            } else {
                (lo + (hi - lo) * i as f64 / last).exp()
            };
            CurvePoint {
                ratio,
                relative_efficiency: relative_efficiency(a, b, ratio),
            }
        })
        .collect();
    Ok(EfficiencyCurve {
        points,
        optimal_ratio: b / a,
        spec: spec.clone(),
    })
}

/// `points` evenly spaced margins from `lower` to `upper` inclusive.
pub fn delta_grid(lower: f64, upper: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::validation("points", "need at least two points"));
    }
    if !(lower.is_finite() && upper.is_finite() && upper > lower) {
        return Err(Error::validation(
            "delta_max",
            "must be finite and exceed delta_min",
        ));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| lower + (upper - lower) * i as f64 / last)
        .collect())
}

/// ARE at each margin in `deltas`.
pub fn are_vs_delta_curve(
    kind: MarginKind,
    sigma_c: f64,
    sigma_t: f64,
    deltas: &[f64],
) -> Result<AreCurve> {
    if deltas.is_empty() {
        return Err(Error::validation("deltas", "grid is empty"));
    }
    if !(sigma_c > 0.0 && sigma_c.is_finite()) {
        return Err(Error::validation(
            "sigma_c",
            "standard deviation must be positive",
        ));
    }
    if !(sigma_t > 0.0 && sigma_t.is_finite()) {
        return Err(Error::validation(
            "sigma_t",
            "standard deviation must be positive",
        ));
    }
    let points = deltas
        .iter()
        .enumerate()
        .map(|(i, &delta)| {
            let margin = Margin { kind, value: delta };
            margin
                .validate(&format!("deltas[{i}]"), false)
                .map_err(|e| Error::validation(format!("deltas[{i}]"), e.message()))?;
            let weight = match kind {
                MarginKind::Additive => 1.0,
                MarginKind::Multiplicative => delta,
            };
            Ok(ArePoint {
                delta,
                are: two_arm_are(sigma_c, weight * sigma_t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AreCurve {
        kind,
        sigma_c,
        sigma_t,
        points,
    })
}

/// Formats to six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        format!("{:.*}", (5 - magnitude) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

pub const EFFICIENCY_CSV_HEADER: &str = "ratio,relative_efficiency";
pub const ARE_CSV_HEADER: &str = "delta,are";

pub fn efficiency_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from(EFFICIENCY_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{}", sig6(p.ratio), sig6(p.relative_efficiency));
    }
    out
}

pub fn are_csv(curve: &AreCurve) -> String {
    let mut out = String::from(ARE_CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        let _ = writeln!(out, "{},{}", sig6(p.delta), sig6(p.are));
    }
    out
}

/// Parses a two-column numeric CSV with the given header.
pub fn parse_csv(text: &str, header: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(Error::validation(
            "csv",
            format!("expected header {header}"),
        ));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let parse = |s: Option<&str>| {
                s.and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::validation(format!("csv line {}", i + 2), "bad number"))
            };
            let mut cols = line.split(',');
            Ok((parse(cols.next())?, parse(cols.next())?))
        })
        .collect()
}

/// Two-decimal table of ratio against relative efficiency.
pub fn efficiency_table(points: &[CurvePoint]) -> String {
    let mut out = String::from("ratio (k:1)  relative efficiency\n");
    for p in points {
        let _ = writeln!(out, "{:>11.2}  {:>19.2}", p.ratio, p.relative_efficiency);
    }
    out
}

pub fn are_table(curve: &AreCurve) -> String {
    let mut out = String::from("   delta      ARE\n");
    for p in &curve.points {
        let _ = writeln!(out, "{:>8.2}  {:>7.2}", p.delta, p.are);
    }
    out
}
