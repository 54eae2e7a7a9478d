//! Shared domain types for trial designs.
//!
//! The JSON encoding of [`DesignSpec`] is the canonical file and wire format
//! for both the CLI (`--spec`) and the HTTP API.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;

/// Outcome distribution of one arm together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum OutcomeFamily {
    Normal {
        #[serde(default)]
        mean: f64,
        sd: f64,
    },
    Binomial {
        prob: f64,
    },
    Poisson {
        rate: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Normal,
    Binomial,
    Poisson,
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FamilyTag::Normal => "normal",
            FamilyTag::Binomial => "binomial",
            FamilyTag::Poisson => "poisson",
        })
    }
}

impl OutcomeFamily {
    pub fn tag(&self) -> FamilyTag {
        match self {
            OutcomeFamily::Normal { .. } => FamilyTag::Normal,
            OutcomeFamily::Binomial { .. } => FamilyTag::Binomial,
            OutcomeFamily::Poisson { .. } => FamilyTag::Poisson,
        }
    }

    /// Location parameter: μ, π or λ.
    pub fn mean(&self) -> f64 {
        match *self {
            OutcomeFamily::Normal { mean, .. } => mean,
            OutcomeFamily::Binomial { prob } => prob,
            OutcomeFamily::Poisson { rate } => rate,
        }
    }

    /// Same family with a new location parameter. A normal arm keeps its σ.
    pub fn with_mean(&self, value: f64) -> OutcomeFamily {
        match *self {
            OutcomeFamily::Normal { sd, .. } => OutcomeFamily::Normal { mean: value, sd },
            OutcomeFamily::Binomial { .. } => OutcomeFamily::Binomial { prob: value },
            OutcomeFamily::Poisson { .. } => OutcomeFamily::Poisson { rate: value },
        }
    }

    /// Per-observation variance V(μ).
    pub fn variance(&self) -> f64 {
        match *self {
            OutcomeFamily::Normal { sd, .. } => sd * sd,
            OutcomeFamily::Binomial { prob } => prob * (1.0 - prob),
            OutcomeFamily::Poisson { rate } => rate,
        }
    }

    /// Per-observation standard deviation: σ, √(π(1−π)) or √λ.
    pub fn stddev(&self) -> f64 {
        match *self {
            OutcomeFamily::Normal { sd, .. } => sd,
            _ => self.variance().sqrt(),
        }
    }

    /// Checks the family invariants, reporting errors under `path`.
    pub fn validate(&self, path: &str) -> Result<()> {
        match *self {
            OutcomeFamily::Normal { mean, sd } => {
                if !mean.is_finite() {
                    return Err(Error::validation(
                        format!("{path}.mean"),
                        "mean must be finite",
                    ));
                }
                if !(sd > 0.0 && sd.is_finite()) {
                    return Err(Error::validation(
                        format!("{path}.sd"),
                        "standard deviation must be positive and finite",
                    ));
                }
            }
            OutcomeFamily::Binomial { prob } => {
                if !(prob > 0.0 && prob < 1.0) {
                    return Err(Error::validation(
                        format!("{path}.prob"),
                        "probability must lie strictly in (0,1)",
                    ));
                }
            }
            OutcomeFamily::Poisson { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::validation(
                        format!("{path}.rate"),
                        "rate must be positive and finite",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Per-observation standard deviation of a validated family.
pub fn stddev(family: &OutcomeFamily) -> f64 {
    family.stddev()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginKind {
    Additive,
    Multiplicative,
}

/// Non-inferiority margin Δ on the difference or ratio scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Margin {
    pub kind: MarginKind,
    pub value: f64,
}

impl Margin {
    pub fn additive(value: f64) -> Self {
        Margin {
            kind: MarginKind::Additive,
            value,
        }
    }

    pub fn multiplicative(value: f64) -> Self {
        Margin {
            kind: MarginKind::Multiplicative,
            value,
        }
    }

    /// Δ = 1 is accepted for multiplicative margins unless `strict` is set.
    pub fn validate(&self, path: &str, strict: bool) -> Result<()> {
        let field = format!("{path}.value");
        if !self.value.is_finite() {
            return Err(Error::validation(field, "margin must be finite"));
        }
        match self.kind {
            MarginKind::Additive if self.value <= 0.0 => {
                Err(Error::validation(field, "additive margin requires Δ > 0"))
            }
            MarginKind::Multiplicative if strict && self.value <= 1.0 => Err(Error::validation(
                field,
                "multiplicative margin requires Δ > 1 in strict non-inferiority mode",
            )),
            MarginKind::Multiplicative if self.value < 1.0 => Err(Error::validation(
                field,
                "multiplicative margin requires Δ ≥ 1",
            )),
            _ => Ok(()),
        }
    }
}

/// One-sided type-I error rate and target power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorRates {
    pub alpha: f64,
    pub power: f64,
}

impl Default for ErrorRates {
    fn default() -> Self {
        ErrorRates {
            alpha: 0.025,
            power: 0.9,
        }
    }
}

impl ErrorRates {
    pub fn new(alpha: f64, power: f64) -> Result<Self> {
        let rates = ErrorRates { alpha, power };
        rates.validate("rates")?;
        Ok(rates)
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::validation(
                format!("{path}.alpha"),
                "alpha must lie strictly in (0,0.5)",
            ));
        }
        if !(self.power > 0.5 && self.power < 1.0) {
            return Err(Error::validation(
                format!("{path}.power"),
                "power must lie strictly in (0.5,1)",
            ));
        }
        Ok(())
    }

    /// z_{1−α}
    pub fn z_alpha(&self) -> f64 {
        normal::quantile(1.0 - self.alpha)
    }

    /// z_{1−β}
    pub fn z_beta(&self) -> f64 {
        normal::quantile(self.power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    SuperiorityMultiarm,
    NoninferiorityTwoArm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    HigherFavorable,
    LowerFavorable,
}

/// Parameter point at which per-arm variances are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPoint {
    NullBoundary,
    Alternative,
}

/// A complete trial design question.
///
/// For non-inferiority designs `treatment` holds the assumed true treatment
/// parameters; it may be omitted when only null-boundary quantities are
/// needed. Superiority designs list their experimental arms in `arms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub trial_kind: TrialKind,
    pub control: OutcomeFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub treatment: Option<OutcomeFamily>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arms: Vec<OutcomeFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<Margin>,
    #[serde(default)]
    pub rates: ErrorRates,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_eval_point: Option<EvalPoint>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub strict_ni: bool,
}

impl DesignSpec {
    /// Two-arm non-inferiority design with default rates and direction.
    pub fn noninferiority(
        control: OutcomeFamily,
        treatment: Option<OutcomeFamily>,
        margin: Margin,
    ) -> Self {
        DesignSpec {
            trial_kind: TrialKind::NoninferiorityTwoArm,
            control,
            treatment,
            arms: Vec::new(),
            margin: Some(margin),
            rates: ErrorRates::default(),
            direction: Direction::HigherFavorable,
            variance_eval_point: None,
            strict_ni: false,
        }
    }

    /// Multi-arm superiority design: `control` plus experimental `arms`.
    pub fn superiority(control: OutcomeFamily, arms: Vec<OutcomeFamily>) -> Self {
        DesignSpec {
            trial_kind: TrialKind::SuperiorityMultiarm,
            control,
            treatment: None,
            arms,
            margin: None,
            rates: ErrorRates::default(),
            direction: Direction::HigherFavorable,
            variance_eval_point: None,
            strict_ni: false,
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_rates(mut self, rates: ErrorRates) -> Self {
        self.rates = rates;
        self
    }

    pub fn with_eval_point(mut self, point: EvalPoint) -> Self {
        self.variance_eval_point = Some(point);
        self
    }

    pub fn is_noninferiority(&self) -> bool {
        self.trial_kind == TrialKind::NoninferiorityTwoArm
    }

    /// The margin of a non-inferiority design.
    pub fn ni_margin(&self) -> Result<Margin> {
        self.margin
            .ok_or_else(|| Error::validation("margin", "required for non-inferiority designs"))
    }

    /// Test contrast of a non-inferiority design.
    pub fn contrast(&self) -> Result<Contrast> {
        Ok(Contrast::new(self.ni_margin()?, self.direction))
    }

    /// Control and treatment arm parameters at `point`.
    ///
    /// At the null boundary the treatment location is derived from the
    /// control; a normal treatment arm keeps its own σ when one is given.
    pub fn arms_at(&self, point: EvalPoint) -> Result<(OutcomeFamily, OutcomeFamily)> {
        let margin = self.ni_margin()?;
        match point {
            EvalPoint::Alternative => {
                let treatment = self.treatment.ok_or_else(|| {
                    Error::validation(
                        "treatment",
                        "true treatment parameters are required at the alternative point",
                    )
                })?;
                Ok((self.control, treatment))
            }
            EvalPoint::NullBoundary => {
                let boundary = null_boundary(&self.control, &margin, self.direction)?;
                let boundary = match (boundary, self.treatment) {
                    (
                        OutcomeFamily::Normal { mean, .. },
                        Some(OutcomeFamily::Normal { sd, .. }),
                    ) => OutcomeFamily::Normal { mean, sd },
                    (b, _) => b,
                };
                Ok((self.control, boundary))
            }
        }
    }

    /// All arms of a superiority design, control first.
    pub fn superiority_arms(&self) -> Vec<OutcomeFamily> {
        std::iter::once(self.control)
            .chain(self.arms.iter().copied())
            .collect()
    }
}

/// Returns the spec unchanged if every invariant holds, else the first
/// violation with its field path.
pub fn validate(spec: &DesignSpec) -> Result<DesignSpec> {
    spec.control.validate("control")?;
    let tag = spec.control.tag();
    let same_family = |family: &OutcomeFamily, path: &str| -> Result<()> {
        family.validate(path)?;
        if family.tag() != tag {
            return Err(Error::validation(
                format!("{path}.family"),
                format!(
                    "arm family {} does not match control family {tag}",
                    family.tag()
                ),
            ));
        }
        Ok(())
    };
    match spec.trial_kind {
        TrialKind::NoninferiorityTwoArm => {
            let margin = spec.ni_margin()?;
            margin.validate("margin", spec.strict_ni)?;
            if !spec.arms.is_empty() {
                return Err(Error::validation(
                    "arms",
                    "non-inferiority designs have exactly two arms; use treatment",
                ));
            }
            if let Some(treatment) = &spec.treatment {
                same_family(treatment, "treatment")?;
            }
        }
        TrialKind::SuperiorityMultiarm => {
            if spec.arms.is_empty() {
                return Err(Error::validation(
                    "arms",
                    "superiority designs need at least one experimental arm",
                ));
            }
            if spec.treatment.is_some() {
                return Err(Error::validation(
                    "treatment",
                    "superiority designs list experimental arms under arms",
                ));
            }
            for (i, arm) in spec.arms.iter().enumerate() {
                same_family(arm, &format!("arms[{i}]"))?;
            }
        }
    }
    spec.rates.validate("rates")?;
    Ok(spec.clone())
}

/// Treatment parameters at the null boundary of the non-inferiority
/// hypothesis, given the control arm.
pub fn null_boundary(
    control: &OutcomeFamily,
    margin: &Margin,
    direction: Direction,
) -> Result<OutcomeFamily> {
    let c = control.mean();
    let delta = margin.value;
    let boundary = match (margin.kind, direction) {
        (MarginKind::Additive, Direction::HigherFavorable) => c - delta,
        (MarginKind::Additive, Direction::LowerFavorable) => c + delta,
        (MarginKind::Multiplicative, Direction::HigherFavorable) => c / delta,
        (MarginKind::Multiplicative, Direction::LowerFavorable) => c * delta,
    };
    let family = control.with_mean(boundary);
    family.validate("treatment").map_err(|e| {
        Error::domain(format!(
            "null-boundary treatment parameter {boundary} leaves the {} domain: {}",
            control.tag(),
            e.message()
        ))
    })?;
    Ok(family)
}

/// Linear test contrast of a two-arm non-inferiority design.
///
/// The estimand is `sign · (w_T·μ_T − w_C·μ_C) + offset`, positive under the
/// alternative and zero at the null boundary. With higher-favorable outcomes
/// the multiplicative statistic is `Δ·X̄_T − X̄_C`, whose variance weights the
/// treatment arm by Δ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contrast {
    pub sign: f64,
    pub weight_control: f64,
    pub weight_treatment: f64,
    pub offset: f64,
}

impl Contrast {
    pub fn new(margin: Margin, direction: Direction) -> Self {
        let sign = match direction {
            Direction::HigherFavorable => 1.0,
            Direction::LowerFavorable => -1.0,
        };
        match (margin.kind, direction) {
            (MarginKind::Additive, _) => Contrast {
                sign,
                weight_control: 1.0,
                weight_treatment: 1.0,
                offset: margin.value,
            },
            (MarginKind::Multiplicative, Direction::HigherFavorable) => Contrast {
                sign,
                weight_control: 1.0,
                weight_treatment: margin.value,
                offset: 0.0,
            },
            (MarginKind::Multiplicative, Direction::LowerFavorable) => Contrast {
                sign,
                weight_control: margin.value,
                weight_treatment: 1.0,
                offset: 0.0,
            },
        }
    }

    /// Value of the estimand at the given arm means.
    pub fn estimand(&self, control_mean: f64, treatment_mean: f64) -> f64 {
        self.sign * (self.weight_treatment * treatment_mean - self.weight_control * control_mean)
            + self.offset
    }

    /// Arm standard deviations scaled by their contrast weights.
    pub fn weighted_sds(&self, sd_control: f64, sd_treatment: f64) -> (f64, f64) {
        (
            self.weight_control * sd_control,
            self.weight_treatment * sd_treatment,
        )
    }

    /// Variance of the contrast estimate with arm sizes `n_control`, `n_treatment`.
    pub fn variance(
        &self,
        var_control: f64,
        var_treatment: f64,
        n_control: f64,
        n_treatment: f64,
    ) -> f64 {
        self.weight_control.powi(2) * var_control / n_control
            + self.weight_treatment.powi(2) * var_treatment / n_treatment
    }
}
