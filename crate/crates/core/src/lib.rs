//! Optimal randomization for clinical trial design.
//!
//! Closed-form optimal allocation fractions and asymptotic relative
//! efficiencies for multi-arm superiority and two-arm non-inferiority
//! designs (normal, binomial and Poisson outcomes; additive and
//! multiplicative margins), sample sizes and power, required event counts
//! for log-rank non-inferiority designs, and an independent verification
//! engine (grid search and seeded Monte-Carlo simulation).
//!
//! ```
//! use trialalloc::{allocate, DesignSpec, Direction, Margin, OutcomeFamily};
//!
//! // Rare-event mortality endpoint, additive margin of 0.4 percentage points.
//! let spec = DesignSpec::noninferiority(
//!     OutcomeFamily::Binomial { prob: 0.008 },
//!     None,
//!     Margin::additive(0.004),
//! )
//! .with_direction(Direction::LowerFavorable);
//! let plan = allocate(&spec).unwrap();
//! assert!((plan.ratio_treatment_to_control - 1.22).abs() < 0.005);
//! ```

pub mod allocation;
pub mod api;
pub mod error;
pub mod model;
pub mod normal;
pub mod oracle;
pub mod report;
pub mod sample_size;
pub mod survival;

pub use allocation::{
    allocate, ni_are, ni_optimal_fraction, ni_optimal_fraction_glm, superiority_equal_variance,
    superiority_unequal_variance, AllocationPlan, SuperiorityAllocation,
};
pub use error::{Error, Result};
pub use model::{
    null_boundary, stddev, validate, DesignSpec, Direction, ErrorRates, EvalPoint, FamilyTag,
    Margin, MarginKind, OutcomeFamily, TrialKind,
};
pub use oracle::{
    grid_minimize_fraction, simulate_rejection_rate, GridSpec, Objective, SimulationReport, Truth,
};
pub use report::{
    are_vs_delta_curve, efficiency_at_ratio, efficiency_curve, AreCurve, EfficiencyCurve,
};
pub use sample_size::{achieved_power, sample_size_ni, SampleSizeResult};
pub use survival::{
    events_required_chow, events_required_jung, optimal_event_fraction, SurvivalDesign,
    SurvivalMethod,
};
