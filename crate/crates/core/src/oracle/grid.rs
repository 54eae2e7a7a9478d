//! Exhaustive grid minimization of allocation objectives.
//!
//! The objectives are written out as raw variance (or event-count)
//! expressions and never call into the closed-form solvers, so agreement
//! between the two is a meaningful check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, DesignSpec, ErrorRates, EvalPoint, Margin, MarginKind, TrialKind};

/// Evenly spaced grid `lower, lower + step, …, ≤ upper` inside (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::with_step(1e-4)
    }
}

impl GridSpec {
    /// Grid covering `[step, 1 − step]`.
    pub fn with_step(step: f64) -> Self {
        GridSpec {
            lower: step,
            upper: 1.0 - step,
            step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower > 0.0 && self.lower < 1.0) {
            return Err(Error::validation(
                "grid.lower",
                "must lie strictly in (0,1)",
            ));
        }
        if !(self.upper > 0.0 && self.upper < 1.0) {
            return Err(Error::validation(
                "grid.upper",
                "must lie strictly in (0,1)",
            ));
        }
        if self.lower >= self.upper {
            return Err(Error::validation("grid.upper", "must exceed grid.lower"));
        }
        if self.step.is_nan() || self.step <= 0.0 {
            return Err(Error::validation("grid.step", "must be positive"));
        }
        if self.len() < 10 {
            return Err(Error::validation(
                "grid.step",
                "grid must have at least 10 points",
            ));
        }
        Ok(())
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        ((self.upper - self.lower) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.step
    }
}

/// A function of the control fraction (or of the full fraction vector for
/// multi-arm designs) to be minimized.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `var_control/h + var_treatment/(1−h)`.
    TwoArm {
        var_control: f64,
        var_treatment: f64,
    },
    /// `(k−1)σ₁²/c₁ + Σ_{i≥2} σᵢ²/cᵢ` over the simplex.
    MultiArm { sigmas: Vec<f64> },
    /// Jung event count as a function of the control fraction.
    JungEvents {
        delta0: f64,
        z_alpha: f64,
        z_beta: f64,
    },
    /// Chow event count as a function of the control fraction.
    ChowEvents {
        delta0: f64,
        z_alpha: f64,
        z_beta: f64,
    },
}

impl Objective {
    /// Variance of `X̄_C − X̄_T` (additive) or `X̄_C − ΔX̄_T` (multiplicative).
    pub fn from_margin(margin: &Margin, sigma_c: f64, sigma_t: f64) -> Result<Self> {
        margin.validate("margin", false)?;
        if !(sigma_c > 0.0 && sigma_t > 0.0 && sigma_c.is_finite() && sigma_t.is_finite()) {
            return Err(Error::validation(
                "sigma",
                "standard deviations must be positive",
            ));
        }
        let weight = match margin.kind {
            MarginKind::Additive => 1.0,
            MarginKind::Multiplicative => margin.value,
        };
        Ok(Objective::TwoArm {
            var_control: sigma_c * sigma_c,
            var_treatment: weight * weight * sigma_t * sigma_t,
        })
    }

    /// Objective implied by a design: the contrast variance of a
    /// non-inferiority design at its evaluation point (default: null
    /// boundary), or the summed comparison variance of a superiority design.
    pub fn from_spec(spec: &DesignSpec) -> Result<Self> {
        let spec = model::validate(spec)?;
        match spec.trial_kind {
            TrialKind::SuperiorityMultiarm => Ok(Objective::MultiArm {
                sigmas: spec.superiority_arms().iter().map(|a| a.stddev()).collect(),
            }),
            TrialKind::NoninferiorityTwoArm => {
                let point = spec.variance_eval_point.unwrap_or(EvalPoint::NullBoundary);
                let (control, treatment) = spec.arms_at(point)?;
                let contrast = spec.contrast()?;
                Ok(Objective::TwoArm {
                    var_control: contrast.weight_control.powi(2) * control.variance(),
                    var_treatment: contrast.weight_treatment.powi(2) * treatment.variance(),
                })
            }
        }
    }

    pub fn superiority(sigmas: &[f64]) -> Result<Self> {
        if sigmas.len() < 2 {
            return Err(Error::validation(
                "sigmas",
                "need at least two arms including control",
            ));
        }
        if sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::validation(
                "sigmas",
                "standard deviations must be positive",
            ));
        }
        Ok(Objective::MultiArm {
            sigmas: sigmas.to_vec(),
        })
    }

    pub fn jung(delta0: f64, rates: &ErrorRates) -> Result<Self> {
        rates.validate("rates")?;
        Ok(Objective::JungEvents {
            delta0,
            z_alpha: rates.z_alpha(),
            z_beta: rates.z_beta(),
        })
    }

    pub fn chow(delta0: f64, rates: &ErrorRates) -> Result<Self> {
        rates.validate("rates")?;
        Ok(Objective::ChowEvents {
            delta0,
            z_alpha: rates.z_alpha(),
            z_beta: rates.z_beta(),
        })
    }

    /// Value at control fraction `h` for scalar objectives.
    pub fn eval_fraction(&self, h: f64) -> f64 {
        match self {
            Objective::TwoArm {
                var_control,
                var_treatment,
            } => var_control / h + var_treatment / (1.0 - h),
            Objective::JungEvents {
                delta0,
                z_alpha,
                z_beta,
            } => {
                let top = delta0.sqrt() * z_alpha + (h + (1.0 - h) * delta0) * z_beta;
                top * top / (h * (1.0 - h) * (delta0 - 1.0) * (delta0 - 1.0))
            }
            Objective::ChowEvents {
                delta0,
                z_alpha,
                z_beta,
            } => {
                let top = z_alpha + z_beta;
                let log = delta0.ln();
                top * top / (h * (1.0 - h) * log * log)
            }
            Objective::MultiArm { sigmas } => {
                let k = sigmas.len() as f64;
                let rest = (1.0 - h) / (k - 1.0);
                self.eval_simplex(
                    &std::iter::once(h)
                        .chain(std::iter::repeat_n(rest, sigmas.len() - 1))
                        .collect::<Vec<_>>(),
                )
            }
        }
    }

    /// Value at a full fraction vector (multi-arm objectives).
    pub fn eval_simplex(&self, fractions: &[f64]) -> f64 {
        match self {
            Objective::MultiArm { sigmas } => {
                let k = sigmas.len() as f64;
                let mut total = (k - 1.0) * sigmas[0] * sigmas[0] / fractions[0];
                for (s, c) in sigmas[1..].iter().zip(&fractions[1..]) {
                    total += s * s / c;
                }
                total
            }
            _ => self.eval_fraction(fractions[0]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridArgmin {
    Fraction(f64),
    Simplex(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub argmin: GridArgmin,
    pub value: f64,
}

impl GridMinimum {
    pub fn control_fraction(&self) -> f64 {
        match &self.argmin {
            GridArgmin::Fraction(h) => *h,
            GridArgmin::Simplex(c) => c[0],
        }
    }
}

/// Grid point minimizing `objective`; the first minimizer wins ties.
///
/// Multi-arm objectives are searched over the simplex lattice with spacing
/// `grid.step`: an exhaustive coarse pass followed by successively halved
/// box searches of radius three cells until the lattice spacing is reached.
pub fn grid_minimize_fraction(objective: &Objective, grid: &GridSpec) -> Result<GridMinimum> {
    grid.validate()?;
    let best = match objective {
        Objective::MultiArm { sigmas } => {
            let units = (1.0 / grid.step).round() as i64;
            if units < sigmas.len() as i64 {
                return Err(Error::validation(
                    "grid.step",
                    "too coarse for the number of arms",
                ));
            }
            simplex_search(objective, sigmas.len(), units).map(|(n, value)| GridMinimum {
                argmin: GridArgmin::Simplex(n.iter().map(|&u| u as f64 / units as f64).collect()),
                value,
            })
        }
        _ => {
            let mut best: Option<(f64, f64)> = None;
            for i in 0..grid.len() {
                let h = grid.point(i);
                let value = objective.eval_fraction(h);
                if value.is_finite() && best.is_none_or(|(_, v)| value < v) {
                    best = Some((h, value));
                }
            }
            best.map(|(h, value)| GridMinimum {
                argmin: GridArgmin::Fraction(h),
                value,
            })
        }
    };
    best.ok_or_else(|| Error::domain("objective is not finite anywhere on the grid"))
}

/// Simplex lattice with `units` cells per unit mass; coordinates are
/// integer cell counts, each at least one.
struct Lattice<'a> {
    objective: &'a Objective,
    units: i64,
    buf: Vec<f64>,
    best: Option<(Vec<i64>, f64)>,
}

impl Lattice<'_> {
    /// Evaluates the point whose first k−1 coordinates are `free`.
    fn consider(&mut self, free: &[i64]) {
        if free.iter().any(|&n| n < 1) {
            return;
        }
        let last = self.units - free.iter().sum::<i64>();
        if last < 1 {
            return;
        }
        self.buf.clear();
        let units = self.units as f64;
        self.buf.extend(free.iter().map(|&n| n as f64 / units));
        self.buf.push(last as f64 / units);
        let value = self.objective.eval_simplex(&self.buf);
        if value.is_finite() && self.best.as_ref().is_none_or(|(_, v)| value < *v) {
            let mut counts = free.to_vec();
            counts.push(last);
            self.best = Some((counts, value));
        }
    }

    fn best_free(&self) -> Option<Vec<i64>> {
        self.best.as_ref().map(|(c, _)| c[..c.len() - 1].to_vec())
    }
}

/// Advances `digits` (each in `lo..=hi`) like an odometer; false on wrap.
fn advance(digits: &mut [i64], lo: i64, hi: i64) -> bool {
    for d in digits.iter_mut() {
        if *d < hi {
            *d += 1;
            return true;
        }
        *d = lo;
    }
    false
}

fn simplex_search(objective: &Objective, k: usize, units: i64) -> Option<(Vec<i64>, f64)> {
    const RADIUS: i64 = 3;
    let free_dims = k - 1;
    let mut lattice = Lattice {
        objective,
        units,
        buf: Vec::with_capacity(k),
        best: None,
    };

    // Exhaustive pass on a coarse sub-lattice.
    let mut step = (units / 16).max(1);
    let cells = units / step;
    let mut digits = vec![1; free_dims];
    loop {
        if digits.iter().sum::<i64>() < cells {
            let free: Vec<i64> = digits.iter().map(|d| d * step).collect();
            lattice.consider(&free);
        }
        if !advance(&mut digits, 1, cells) {
            break;
        }
    }

    // Box searches around the incumbent, halving the spacing once the
    // incumbent stops moving.
    loop {
        loop {
            let center = lattice.best_free()?;
            let mut offset = vec![-RADIUS; free_dims];
            loop {
                let free: Vec<i64> = center
                    .iter()
                    .zip(&offset)
                    .map(|(c, o)| c + o * step)
                    .collect();
                lattice.consider(&free);
                if !advance(&mut offset, -RADIUS, RADIUS) {
                    break;
                }
            }
            if lattice.best_free()? == center {
                break;
            }
        }
        if step == 1 {
            return lattice.best;
        }
        step = (step / 2).max(1);
    }
}
