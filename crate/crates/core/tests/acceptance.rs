//! Acceptance gate. Runs every primary criterion at its stated tolerance and
//! prints one PASS/FAIL line per criterion; exits non-zero if any fails.
//!
//! Run with `cargo test -p trialalloc --test acceptance --release` for
//! representative timings (the runtime limits are checked in either profile).

mod common;

use std::time::{Duration, Instant};

use rand::Rng;

use trialalloc::oracle::{
    grid_minimize_fraction, simulate_with_workers, GridSpec, Objective, Truth,
};
use trialalloc::report::efficiency_at_ratio;
use trialalloc::survival::{jung_events_exact, optimal_event_fraction};
use trialalloc::{
    allocate, events_required_jung, sample_size_ni, superiority_equal_variance, DesignSpec,
    Direction, ErrorRates, EvalPoint, Margin, OutcomeFamily,
};

use common::*;

/// Fixed before the first run; never changed to make a criterion pass.
const SEED: u64 = 20_240_601;

struct Outcome {
    name: &'static str,
    pass: bool,
    details: Vec<String>,
}

struct Criterion {
    name: &'static str,
    details: Vec<String>,
    pass: bool,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion {
            name,
            details: Vec::new(),
            pass: true,
        }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        let detail = detail.into();
        if ok {
            self.details.push(detail);
        } else {
            self.pass = false;
            self.details.push(format!("FAILED: {detail}"));
        }
    }

    /// Diagnostic line that does not affect the verdict.
    fn note(&mut self, detail: impl Into<String>) {
        self.details.push(format!("note: {}", detail.into()));
    }

    fn timed(&mut self, elapsed: Duration, limit: Duration) {
        self.check(
            elapsed < limit,
            format!(
                "runtime {:.3} s (limit {} s)",
                elapsed.as_secs_f64(),
                limit.as_secs()
            ),
        );
    }

    fn done(self) -> Outcome {
        Outcome {
            name: self.name,
            pass: self.pass,
            details: self.details,
        }
    }
}

fn cport_reproduction() -> Outcome {
    let mut c = Criterion::new("CPORT optimal ratio and relative-efficiency table");
    let start = Instant::now();
    let spec = DesignSpec::noninferiority(
        OutcomeFamily::Binomial { prob: 0.008 },
        Some(OutcomeFamily::Binomial { prob: 0.008 }),
        Margin::additive(0.004),
    )
    .with_direction(Direction::LowerFavorable)
    .with_eval_point(EvalPoint::NullBoundary);
    let plan = allocate(&spec).unwrap();
    let r = plan.ratio_treatment_to_control;
    c.check(
        (r - 1.22).abs() <= 0.005,
        format!("optimal ratio {r:.5} (want 1.22 ± 0.005)"),
    );

    // The 0.33 row is the 1:3 design.
    for (label, ratio, want) in [
        ("1:3", 1.0 / 3.0, 1.48),
        ("1", 1.0, 1.01),
        ("1.22", 1.22, 1.00),
        ("3", 3.0, 1.21),
    ] {
        let e = efficiency_at_ratio(&spec, ratio).unwrap();
        c.check(
            (e - want).abs() <= 0.005,
            format!("RE at r={label}: {e:.5} (want {want:.2} ± 0.005)"),
        );
    }
    c.timed(start.elapsed(), Duration::from_secs(1));
    c.done()
}

fn oracle_agreement(draws: &[Draw]) -> Outcome {
    let mut c = Criterion::new("closed form vs grid oracle");
    let start = Instant::now();
    let grid = GridSpec::default();
    let mut worst = 0.0_f64;
    let mut worst_independent = 0.0_f64;
    let mut counts = std::collections::BTreeMap::new();
    let mut failures = 0;
    for d in draws {
        let oracle =
            grid_minimize_fraction(&Objective::from_spec(&d.spec).unwrap(), &grid).unwrap();
        let grid_fractions = match oracle.argmin {
            trialalloc::oracle::GridArgmin::Fraction(h) => vec![h, 1.0 - h],
            trialalloc::oracle::GridArgmin::Simplex(v) => v,
        };
        let diff = d
            .fractions
            .iter()
            .zip(&grid_fractions)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
        if diff > 2e-4 {
            failures += 1;
        }

        if d.spec.is_noninferiority() {
            // Objective rebuilt from the model, searched exhaustively.
            let point = d
                .spec
                .variance_eval_point
                .unwrap_or(EvalPoint::NullBoundary);
            let (vc, vt) = weighted_variances(&d.spec, point);
            let h = exhaustive_argmin(10_000, |h| vc / h + vt / (1.0 - h));
            let diff = (h - d.fractions[0]).abs();
            worst_independent = worst_independent.max(diff);
            if diff > 2e-4 {
                failures += 1;
            }
            let m = d.spec.margin.unwrap();
            *counts
                .entry(format!("{}/{:?}", tag(&d.spec), m.kind))
                .or_insert(0) += 1;
        } else {
            // The closed form must beat every point the lattice search visits.
            let sigmas: Vec<f64> = d
                .spec
                .superiority_arms()
                .iter()
                .map(|a| a.stddev())
                .collect();
            let closed = superiority_objective(&sigmas, &d.fractions);
            let found = superiority_objective(&sigmas, &grid_fractions);
            if closed > found * (1.0 + 1e-12) {
                failures += 1;
            }
            *counts
                .entry(format!("superiority/k={}", sigmas.len()))
                .or_insert(0) += 1;
        }
    }
    c.check(draws.len() >= 1000, format!("{} random draws", draws.len()));
    let combos = FAMILIES
        .iter()
        .flat_map(|f| ["Additive", "Multiplicative"].map(move |k| format!("{f}/{k}")))
        .all(|key| counts.get(&key).is_some_and(|&n| n > 0));
    c.check(combos, format!("coverage {counts:?}"));
    c.check(
        failures == 0,
        format!("max |closed − grid| = {worst:.2e} (library oracle), {worst_independent:.2e} (independent grid); limit 2e-4; {failures} failures"),
    );
    c.timed(start.elapsed(), Duration::from_secs(30));
    c.done()
}

fn are_bound(draws: &[Draw]) -> Outcome {
    let mut c = Criterion::new("ARE lower bound and equality cases");
    let min = draws.iter().map(|d| d.are).fold(f64::INFINITY, f64::min);
    c.check(
        min >= 1.0 - 1e-12,
        format!("min ARE over {} draws = {min:.15}", draws.len()),
    );

    let k2 = superiority_equal_variance(2).unwrap().are_vs_balanced;
    c.check((k2 - 1.0).abs() <= 1e-12, format!("k = 2: ARE = {k2}"));

    let mut rng = rng(SEED ^ 3);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let sd = rng.random_range(0.1..10.0);
        let mean = rng.random_range(0.5..10.0);
        let prob = rng.random_range(0.01..0.99);
        let rate = rng.random_range(0.1..30.0);
        for (control, treatment) in [
            (
                OutcomeFamily::Normal { mean, sd },
                OutcomeFamily::Normal { mean, sd },
            ),
            (
                OutcomeFamily::Binomial { prob },
                OutcomeFamily::Binomial { prob },
            ),
            (
                OutcomeFamily::Poisson { rate },
                OutcomeFamily::Poisson { rate },
            ),
        ] {
            for direction in [Direction::HigherFavorable, Direction::LowerFavorable] {
                for point in [EvalPoint::NullBoundary, EvalPoint::Alternative] {
                    let spec = DesignSpec::noninferiority(
                        control,
                        Some(treatment),
                        Margin::multiplicative(1.0),
                    )
                    .with_direction(direction)
                    .with_eval_point(point);
                    let are = allocate(&spec).unwrap().are_vs_balanced;
                    worst = worst.max((are - 1.0).abs());
                }
            }
        }
    }
    c.check(
        worst <= 1e-12,
        format!("Δ = 1 with equal σ: max |ARE − 1| = {worst:.1e}"),
    );
    c.done()
}

fn survival() -> Outcome {
    let mut c = Criterion::new("survival event-count optimum");
    let mut rng = rng(SEED ^ 4);
    let mut exact = true;
    for _ in 0..100 {
        let rates =
            ErrorRates::new(rng.random_range(0.001..0.2), rng.random_range(0.6..0.99)).unwrap();
        exact &= optimal_event_fraction(1.0, &rates).unwrap() == 0.5;
    }
    c.check(
        exact,
        "optimal_event_fraction(1, ·, ·) == 0.5 for 100 rate pairs",
    );

    let rates = ErrorRates::new(0.025, 0.9).unwrap();
    let (za, zb) = (rates.z_alpha(), rates.z_beta());
    let p = optimal_event_fraction(1.5, &rates).unwrap();
    let grid_p = exhaustive_argmin(100_000, |q| jung_d(1.5, za, zb, q));
    c.check(
        (p - grid_p).abs() <= 2e-5,
        format!("Δ₀ = 1.5: closed-form p = {p:.6}, 1e-5 grid argmin = {grid_p:.5}"),
    );
    let direct = jung_d(1.5, za, zb, p);
    let library = jung_events_exact(1.5, &rates, p).unwrap();
    let d = events_required_jung(1.5, &rates, p).unwrap();
    c.check(
        d == 255 && direct.ceil() == 255.0 && (direct - library).abs() <= 1e-9 * direct,
        format!("D(p*) = {d} (direct formula {direct:.4})"),
    );

    let mut chow_ok = true;
    for _ in 0..50 {
        let delta0 = rng.random_range(1.0001..5.0);
        let h = exhaustive_argmin(10_000, |q| chow_d(delta0, za, zb, q));
        let lib = grid_minimize_fraction(
            &Objective::chow(delta0, &rates).unwrap(),
            &GridSpec::default(),
        )
        .unwrap()
        .control_fraction();
        chow_ok &= h == 0.5 && (lib - 0.5).abs() < 1e-12;
    }
    c.check(chow_ok, "Chow grid argmin = 0.5 for 50 random Δ₀ > 1");
    c.done()
}

fn normal_design() -> DesignSpec {
    DesignSpec::noninferiority(
        OutcomeFamily::Normal { mean: 0.0, sd: 1.0 },
        Some(OutcomeFamily::Normal { mean: 0.0, sd: 1.0 }),
        Margin::additive(0.5),
    )
    .with_rates(ErrorRates::new(0.025, 0.9).unwrap())
}

fn monte_carlo_calibration() -> Outcome {
    let mut c = Criterion::new("Monte-Carlo calibration of power and type-I error");
    let start = Instant::now();
    let spec = normal_design();
    let n = sample_size_ni(&spec, None).unwrap();
    let reps = 100_000;
    let power = simulate_with_workers(
        &spec,
        n.n_control,
        n.n_treatment,
        Truth::Alternative,
        reps,
        SEED,
        None,
    )
    .unwrap();
    let size = simulate_with_workers(
        &spec,
        n.n_control,
        n.n_treatment,
        Truth::NullBoundary,
        reps,
        SEED,
        None,
    )
    .unwrap();
    let analytic = trialalloc::achieved_power(&spec, n.n_control, n.n_treatment).unwrap();
    c.check(
        (power.estimate - 0.9).abs() <= 3.0 * power.standard_error,
        format!(
            "power at N = {}/{}: {:.5} ± {:.5} (target 0.90, within 3 SE = {:.5}; analytic power at this N {:.5})",
            n.n_control,
            n.n_treatment,
            power.estimate,
            power.standard_error,
            3.0 * power.standard_error,
            analytic
        ),
    );
    c.check(
        (size.estimate - 0.025).abs() <= 3.0 * size.standard_error,
        format!(
            "type-I at the null boundary: {:.5} ± {:.5} (target 0.025)",
            size.estimate, size.standard_error
        ),
    );
    let z = (power.estimate - analytic) / power.standard_error;
    c.note(format!(
        "simulated power is {z:+.2} SE from the analytic power at the rounded N; \
         rounding each arm up from {:.2} total lifts the exact power above 0.90",
        n.n_total_unrounded
    ));
    c.check(
        power.replications == reps && size.replications == reps,
        format!("{reps} replications each"),
    );
    c.timed(start.elapsed(), Duration::from_secs(60));
    c.done()
}

fn determinism() -> Outcome {
    let mut c = Criterion::new("bit-identical simulation across runs and worker counts");
    let designs = [
        normal_design(),
        DesignSpec::noninferiority(
            OutcomeFamily::Binomial { prob: 0.008 },
            Some(OutcomeFamily::Binomial { prob: 0.008 }),
            Margin::additive(0.004),
        )
        .with_direction(Direction::LowerFavorable),
        DesignSpec::noninferiority(
            OutcomeFamily::Poisson { rate: 4.0 },
            Some(OutcomeFamily::Poisson { rate: 4.0 }),
            Margin::multiplicative(1.3),
        ),
    ];
    for spec in &designs {
        let n = sample_size_ni(spec, None).unwrap();
        let (nc, nt) = (n.n_control.min(4000), n.n_treatment.min(4000));
        for truth in [Truth::Alternative, Truth::NullBoundary] {
            let reference =
                simulate_with_workers(spec, nc, nt, truth, 20_000, SEED, Some(1)).unwrap();
            let same = [None, Some(1), Some(2), Some(3), Some(8)].iter().all(|&w| {
                let r = simulate_with_workers(spec, nc, nt, truth, 20_000, SEED, w).unwrap();
                r == reference && r.estimate.to_bits() == reference.estimate.to_bits()
            });
            c.check(
                same,
                format!(
                    "{} {truth:?}: {} rejections at workers 1, 2, 3, 8, all",
                    tag(spec),
                    reference.rejections
                ),
            );
        }
    }
    c.done()
}

fn property_suite() -> Outcome {
    let mut c = Criterion::new("property suite");
    const CASES: usize = 500;
    let mut rng = rng(SEED ^ 7);
    let mut run = |name: &str,
                   c: &mut Criterion,
                   f: &mut dyn FnMut(&mut rand_chacha::ChaCha8Rng) -> Check| {
        let mut failures = Vec::new();
        for _ in 0..CASES {
            if let Err(e) = f(&mut rng) {
                failures.push(e);
            }
        }
        c.check(
            failures.is_empty(),
            format!(
                "{name}: {CASES} cases, {} failures{}",
                failures.len(),
                failures
                    .first()
                    .map(|e| format!(" (first: {e})"))
                    .unwrap_or_default()
            ),
        );
    };
    let sd = |r: &mut rand_chacha::ChaCha8Rng| r.random_range(0.01..100.0);
    run("symmetry", &mut c, &mut |r| {
        prop_symmetry(sd(r), sd(r), r.random_range(0.01..10.0))
    });
    run("reduction", &mut c, &mut |r| {
        prop_reduction(r.random_range(2..=20), sd(r))
    });
    run("monotonicity", &mut c, &mut |r| {
        let d1 = r.random_range(1.0..5.0);
        prop_monotonicity(sd(r), sd(r), d1, d1 + r.random_range(1e-3..3.0))
    });
    run("scale invariance", &mut c, &mut |r| {
        let margin = if r.random_bool(0.5) {
            Margin::additive(r.random_range(0.01..10.0))
        } else {
            Margin::multiplicative(r.random_range(1.0..5.0))
        };
        prop_scale_invariance(sd(r), sd(r), margin, r.random_range(1e-3..1e3))
    });
    run("round-trip power", &mut c, &mut |r| {
        prop_round_trip(&random_ni_design(r))
    });
    c.done()
}

struct Draw {
    spec: DesignSpec,
    fractions: Vec<f64>,
    are: f64,
}

fn draws() -> Vec<Draw> {
    let mut rng = rng(SEED);
    let mut out = Vec::new();
    for i in 0..1200 {
        let spec = if i % 5 == 4 {
            superiority_spec(&random_superiority_sigmas(&mut rng))
        } else {
            random_ni_design(&mut rng)
        };
        let plan = allocate(&spec).unwrap();
        out.push(Draw {
            spec,
            fractions: plan.fractions,
            are: plan.are_vs_balanced,
        });
    }
    out
}

fn main() {
    // Keep `cargo test -- --list` and filters from running the full gate.
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }

    let start = Instant::now();
    let draws = draws();
    let outcomes = [
        cport_reproduction(),
        oracle_agreement(&draws),
        are_bound(&draws),
        survival(),
        monte_carlo_calibration(),
        determinism(),
        property_suite(),
    ];

    let mut failed = 0;
    for (i, o) in outcomes.iter().enumerate() {
        println!(
            "{} {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.name
        );
        for d in &o.details {
            println!("       {d}");
        }
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1} s)",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
