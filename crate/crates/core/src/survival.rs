//! Required event counts for two-sample log-rank non-inferiority designs
//! under proportional hazards, with hazard-ratio margin Δ₀.
//!
//! `p` is the control share of the allocation. Two event-count formulas are
//! available: [`events_required_jung`], whose optimum is generally unequal,
//! and [`events_required_chow`], which assumes similar survival curves and
//! is always optimized at `p = 1/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ErrorRates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalMethod {
    #[default]
    Jung,
    Chow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalDesign {
    pub delta0: f64,
    #[serde(flatten)]
    pub rates: ErrorRates,
    pub p: f64,
    pub d_events: u64,
    pub method: SurvivalMethod,
}

fn check_margin(delta0: f64, allow_unit: bool) -> Result<()> {
    if !(delta0.is_finite() && delta0 >= 1.0) {
        return Err(Error::validation(
            "delta0",
            "hazard-ratio margin must be finite and at least 1",
        ));
    }
    if !allow_unit && delta0 == 1.0 {
        return Err(Error::domain(
            "margin must exceed 1 for the event-count formula",
        ));
    }
    Ok(())
}

fn check_fraction(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::validation(
            "p",
            "allocation fraction must lie strictly in (0,1)",
        ))
    }
}

/// Control fraction minimizing [`jung_events_exact`]:
///
/// `p = (√Δ₀ z_{1−α} + Δ₀ z_{1−β}) / ((Δ₀+1) z_{1−β} + 2√Δ₀ z_{1−α})`
pub fn optimal_event_fraction(delta0: f64, rates: &ErrorRates) -> Result<f64> {
    check_margin(delta0, true)?;
    rates.validate("rates")?;
    if delta0 == 1.0 {
        return Ok(0.5);
    }
    let (za, zb) = (rates.z_alpha(), rates.z_beta());
    let a = delta0.sqrt() * za;
    Ok((a + delta0 * zb) / ((delta0 + 1.0) * zb + 2.0 * a))
}

/// Second stationary point of the Jung event count, which lies above one
/// for every Δ₀ > 1 and is therefore never the optimum.
pub fn rejected_stationary_point(delta0: f64, rates: &ErrorRates) -> Result<f64> {
    check_margin(delta0, false)?;
    rates.validate("rates")?;
    let (za, zb) = (rates.z_alpha(), rates.z_beta());
    Ok((delta0.sqrt() * za + delta0 * zb) / (zb * (delta0 - 1.0)))
}

/// Real-valued Jung event count
/// `{√Δ₀ z_{1−α} + (p + (1−p)Δ₀) z_{1−β}}² / (p(1−p)(Δ₀−1)²)`.
pub fn jung_events_exact(delta0: f64, rates: &ErrorRates, p: f64) -> Result<f64> {
    check_margin(delta0, false)?;
    rates.validate("rates")?;
    check_fraction(p)?;
    Ok(jung_objective(delta0, rates.z_alpha(), rates.z_beta(), p))
}

pub(crate) fn jung_objective(delta0: f64, za: f64, zb: f64, p: f64) -> f64 {
    let numerator = delta0.sqrt() * za + (p + (1.0 - p) * delta0) * zb;
    numerator * numerator / (p * (1.0 - p) * (delta0 - 1.0).powi(2))
}

/// Real-valued Chow event count `(z_{1−α} + z_{1−β})² / (p(1−p)(ln Δ₀)²)`.
pub fn chow_events_exact(delta0: f64, rates: &ErrorRates, p: f64) -> Result<f64> {
    check_margin(delta0, false)?;
    rates.validate("rates")?;
    check_fraction(p)?;
    Ok(chow_objective(delta0, rates.z_alpha(), rates.z_beta(), p))
}

pub(crate) fn chow_objective(delta0: f64, za: f64, zb: f64, p: f64) -> f64 {
    let z = za + zb;
    z * z / (p * (1.0 - p) * delta0.ln().powi(2))
}

fn ceil_events(d: f64) -> Result<u64> {
    if !(d.is_finite() && d < 1e15) {
        return Err(Error::domain(format!("required events {d:e} out of range")));
    }
    Ok(d.ceil().max(1.0) as u64)
}

/// Required events (ceiling) by the Jung formula.
pub fn events_required_jung(delta0: f64, rates: &ErrorRates, p: f64) -> Result<u64> {
    ceil_events(jung_events_exact(delta0, rates, p)?)
}

/// Required events (ceiling) by the Chow formula.
pub fn events_required_chow(delta0: f64, rates: &ErrorRates, p: f64) -> Result<u64> {
    ceil_events(chow_events_exact(delta0, rates, p)?)
}

/// Full survival design. When `p` is absent it is the method's optimum:
/// the closed form for Jung, one half for Chow.
pub fn design_events(
    delta0: f64,
    rates: &ErrorRates,
    method: SurvivalMethod,
    p: Option<f64>,
) -> Result<SurvivalDesign> {
    check_margin(delta0, false)?;
    let p = match (p, method) {
        (Some(p), _) => p,
        (None, SurvivalMethod::Jung) => optimal_event_fraction(delta0, rates)?,
        (None, SurvivalMethod::Chow) => 0.5,
    };
    let d_events = match method {
        SurvivalMethod::Jung => events_required_jung(delta0, rates, p)?,
        SurvivalMethod::Chow => events_required_chow(delta0, rates, p)?,
    };
    Ok(SurvivalDesign {
        delta0,
        rates: *rates,
        p,
        d_events,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(alpha: f64, power: f64) -> ErrorRates {
        ErrorRates::new(alpha, power).unwrap()
    }

    #[test]
    fn balanced_at_unit_margin() {
        assert_eq!(
            optimal_event_fraction(1.0, &rates(0.025, 0.9)).unwrap(),
            0.5
        );
        assert_eq!(optimal_event_fraction(1.0, &rates(0.1, 0.6)).unwrap(), 0.5);
    }

    // Expected p and D below were obtained by minimizing the Jung count on
    // a 1e−5 grid over (0,1) and evaluating the formula at the argmin.
    #[test]
    fn jung_examples() {
        let r = rates(0.025, 0.9);
        let p = optimal_event_fraction(1.5, &r).unwrap();
        assert!((p - 0.5400).abs() < 5e-5);
        assert_eq!(events_required_jung(1.5, &r, p).unwrap(), 255);

        let r = rates(0.05, 0.8);
        let p = optimal_event_fraction(2.0, &r).unwrap();
        assert!((p - 0.5586).abs() < 5e-5);
        assert_eq!(events_required_jung(2.0, &r, p).unwrap(), 51);
    }

    #[test]
    fn chow_example() {
        assert_eq!(
            events_required_chow(1.5, &rates(0.025, 0.9), 0.5).unwrap(),
            256
        );
    }

    #[test]
    fn singular_margin_errors() {
        let r = rates(0.025, 0.9);
        assert!(matches!(
            events_required_jung(1.0, &r, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            events_required_chow(1.0, &r, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            events_required_jung(0.8, &r, 0.5),
            Err(Error::Validation { .. })
        ));
        assert!(optimal_event_fraction(0.99, &r).is_err());
    }

    #[test]
    fn bad_fraction_rejected() {
        let r = rates(0.025, 0.9);
        assert!(events_required_jung(1.5, &r, 0.0).is_err());
        assert!(events_required_chow(1.5, &r, 1.0).is_err());
    }

    #[test]
    fn rejected_root_above_one() {
        let r = rates(0.025, 0.9);
        for delta0 in [1.01, 1.2, 1.5, 2.0, 3.0] {
            assert!(rejected_stationary_point(delta0, &r).unwrap() > 1.0);
        }
    }

    #[test]
    fn design_defaults() {
        let r = rates(0.025, 0.9);
        let d = design_events(1.5, &r, SurvivalMethod::Jung, None).unwrap();
        assert_eq!(d.d_events, 255);
        let d = design_events(1.5, &r, SurvivalMethod::Chow, None).unwrap();
        assert_eq!((d.p, d.d_events), (0.5, 256));
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(json["method"], "chow");
        assert_eq!(json["alpha"], 0.025);
    }
}
