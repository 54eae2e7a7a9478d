//! Independent verification: exhaustive grid minimization of the allocation
//! objectives and seeded Monte-Carlo estimation of test operating
//! characteristics.

pub mod grid;
pub mod sim;

pub use grid::{grid_minimize_fraction, GridArgmin, GridMinimum, GridSpec, Objective};
pub use sim::{
    simulate_rejection_rate, simulate_with_workers, SimulationReport, Truth, MIN_REPLICATIONS,
};
