//! Seeded Monte-Carlo estimation of the rejection rate of the one-sided
//! normal-approximation non-inferiority test.
//!
//! Stream derivation: the 64-bit seed is expanded to a ChaCha8 key with
//! `ChaCha8Rng::seed_from_u64(seed)`; replicate `i` draws from that key with
//! stream id `i`, starting at word position zero. Each replicate therefore
//! owns an independent substream and the rejection count is identical for
//! any partitioning of replicates across workers.
//!
//! Per replicate each arm contributes its sample mean: normal arms draw the
//! mean directly (`μ + σ/√n · Z`) and use the known σ; binomial and Poisson
//! arms draw the event total and use the plug-in variance of the estimated
//! mean. Totals with mean below [`INVERSION_MEAN_LIMIT`] are drawn by exact
//! inverse-transform sampling, larger ones with `rand_distr`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Contrast, DesignSpec, EvalPoint, OutcomeFamily};

pub const MIN_REPLICATIONS: u64 = 1000;

/// Event totals with expectation below this are sampled by inversion.
pub const INVERSION_MEAN_LIMIT: f64 = 30.0;

/// Parameter point the data are generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    NullBoundary,
    Alternative,
}

impl From<Truth> for EvalPoint {
    fn from(t: Truth) -> Self {
        match t {
            Truth::NullBoundary => EvalPoint::NullBoundary,
            Truth::Alternative => EvalPoint::Alternative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub estimate: f64,
    pub rejections: u64,
    pub replications: u64,
    pub seed: u64,
    pub standard_error: f64,
    pub truth: Truth,
}

impl SimulationReport {
    fn new(rejections: u64, replications: u64, seed: u64, truth: Truth) -> Self {
        let estimate = rejections as f64 / replications as f64;
        SimulationReport {
            estimate,
            rejections,
            replications,
            seed,
            standard_error: (estimate * (1.0 - estimate) / replications as f64).sqrt(),
            truth,
        }
    }
}

/// Rejection frequency of the design's test with the given arm sizes, using
/// rayon's global pool.
pub fn simulate_rejection_rate(
    spec: &DesignSpec,
    n_control: u64,
    n_treatment: u64,
    truth: Truth,
    reps: u64,
    seed: u64,
) -> Result<SimulationReport> {
    simulate_with_workers(spec, n_control, n_treatment, truth, reps, seed, None)
}

/// As [`simulate_rejection_rate`] on a dedicated pool of `workers` threads
/// (`None`: global pool). The result does not depend on `workers`.
pub fn simulate_with_workers(
    spec: &DesignSpec,
    n_control: u64,
    n_treatment: u64,
    truth: Truth,
    reps: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<SimulationReport> {
    let spec = model::validate(spec)?;
    if !spec.is_noninferiority() {
        return Err(Error::validation(
            "trial_kind",
            "expected a non-inferiority design",
        ));
    }
    if n_control == 0 {
        return Err(Error::validation("n_control", "arm size must be positive"));
    }
    if n_treatment == 0 {
        return Err(Error::validation(
            "n_treatment",
            "arm size must be positive",
        ));
    }
    if reps < MIN_REPLICATIONS {
        return Err(Error::validation(
            "reps",
            format!("insufficient replications: need at least {MIN_REPLICATIONS}"),
        ));
    }
    let (control, treatment) = spec.arms_at(truth.into())?;
    let experiment = Experiment {
        control: Arm::new(control, n_control),
        treatment: Arm::new(treatment, n_treatment),
        contrast: spec.contrast()?,
        critical: spec.rates.z_alpha(),
        key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
    };

    let count = || {
        (0..reps)
            .into_par_iter()
            .filter(|&i| experiment.rejects(i))
            .count() as u64
    };
    let rejections = match workers {
        None => count(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?
            .install(count),
    };
    Ok(SimulationReport::new(rejections, reps, seed, truth))
}

struct Arm {
    family: OutcomeFamily,
    n: u64,
}

impl Arm {
    fn new(family: OutcomeFamily, n: u64) -> Self {
        Arm { family, n }
    }

    /// Sample mean and the variance estimate used by the test statistic.
    fn draw<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let n = self.n as f64;
        match self.family {
            OutcomeFamily::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                (mean + sd / n.sqrt() * z, sd * sd)
            }
            OutcomeFamily::Binomial { prob } => {
                let p_hat = binomial_total(rng, self.n, prob) as f64 / n;
                (p_hat, p_hat * (1.0 - p_hat))
            }
            OutcomeFamily::Poisson { rate } => {
                let rate_hat = poisson_total(rng, n * rate) as f64 / n;
                (rate_hat, rate_hat)
            }
        }
    }
}

struct Experiment {
    control: Arm,
    treatment: Arm,
    contrast: Contrast,
    critical: f64,
    key: [u8; 32],
}

impl Experiment {
    fn rejects(&self, replicate: u64) -> bool {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(replicate);
        let (mean_c, var_c) = self.control.draw(&mut rng);
        let (mean_t, var_t) = self.treatment.draw(&mut rng);
        let se = self
            .contrast
            .variance(var_c, var_t, self.control.n as f64, self.treatment.n as f64)
            .sqrt();
        // A zero plug-in variance gives no usable statistic; count it as a
        // non-rejection.
        se > 0.0 && self.contrast.estimand(mean_c, mean_t) / se > self.critical
    }
}

/// Binomial(n, p) total.
fn binomial_total<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    let (q, flipped) = if p > 0.5 { (1.0 - p, true) } else { (p, false) };
    let successes = if n as f64 * q < INVERSION_MEAN_LIMIT {
        invert_binomial(rng, n, q)
    } else {
        Binomial::new(n, q)
            .expect("binomial parameters validated")
            .sample(rng)
    };
    if flipped {
        n - successes
    } else {
        successes
    }
}

fn invert_binomial<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    let u: f64 = rng.random();
    let ratio = p / (1.0 - p);
    let mut pmf = (n as f64 * (-p).ln_1p()).exp();
    let mut cdf = pmf;
    let mut k = 0;
    while u > cdf && k < n {
        pmf *= ratio * (n - k) as f64 / (k + 1) as f64;
        cdf += pmf;
        k += 1;
    }
    k
}

/// Poisson(mean) total.
fn poisson_total<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean < INVERSION_MEAN_LIMIT {
        let u: f64 = rng.random();
        let mut pmf = (-mean).exp();
        let mut cdf = pmf;
        let mut k = 0u64;
        // Upper cap only matters when u exceeds the rounded total mass.
        while u > cdf && k < 10_000 {
            k += 1;
            pmf *= mean / k as f64;
            cdf += pmf;
        }
        k
    } else {
        Poisson::new(mean)
            .expect("poisson mean validated")
            .sample(rng) as u64
    }
}
