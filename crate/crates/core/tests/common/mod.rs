//! Random design generators and reference formulas written out directly
//! from the model, independent of the library's contrast and grid code.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trialalloc::{
    achieved_power, allocate, model, sample_size_ni, superiority_equal_variance,
    superiority_unequal_variance, DesignSpec, Direction, EvalPoint, Margin, MarginKind,
    OutcomeFamily,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const FAMILIES: [&str; 3] = ["normal", "binomial", "poisson"];

fn family(name: &str, mean: f64, sd: f64) -> OutcomeFamily {
    match name {
        "normal" => OutcomeFamily::Normal { mean, sd },
        "binomial" => OutcomeFamily::Binomial { prob: mean },
        _ => OutcomeFamily::Poisson { rate: mean },
    }
}

/// A random valid two-arm non-inferiority design. The treatment effect lies
/// strictly inside the alternative region, so sample sizes exist.
pub fn random_ni_design(rng: &mut ChaCha8Rng) -> DesignSpec {
    loop {
        let name = FAMILIES[rng.random_range(0..3)];
        let kind = if rng.random_bool(0.5) {
            MarginKind::Additive
        } else {
            MarginKind::Multiplicative
        };
        let direction = if rng.random_bool(0.5) {
            Direction::HigherFavorable
        } else {
            Direction::LowerFavorable
        };
        let mean_c = match name {
            "normal" => rng.random_range(0.5..20.0),
            "binomial" => rng.random_range(0.005..0.95),
            _ => rng.random_range(0.05..30.0),
        };
        let sd_c = rng.random_range(0.2..5.0);
        let sd_t = if rng.random_bool(0.3) {
            sd_c
        } else {
            rng.random_range(0.2..5.0)
        };
        let value: f64 = match kind {
            MarginKind::Additive => mean_c * rng.random_range(0.02..0.6_f64),
            MarginKind::Multiplicative => rng.random_range(1.0..2.5),
        };
        // Fraction of the way from "no difference" to the null boundary.
        let u = rng.random_range(0.0..0.8);
        let mean_t = match (kind, direction) {
            (MarginKind::Additive, Direction::HigherFavorable) => mean_c - u * value,
            (MarginKind::Additive, Direction::LowerFavorable) => mean_c + u * value,
            (MarginKind::Multiplicative, Direction::HigherFavorable) => mean_c / value.powf(u),
            (MarginKind::Multiplicative, Direction::LowerFavorable) => mean_c * value.powf(u),
        };
        let point = if rng.random_bool(0.5) {
            EvalPoint::NullBoundary
        } else {
            EvalPoint::Alternative
        };
        let spec = DesignSpec::noninferiority(
            family(name, mean_c, sd_c),
            Some(family(name, mean_t, sd_t)),
            Margin { kind, value },
        )
        .with_direction(direction)
        .with_eval_point(point);
        // Redraw designs whose null boundary leaves the family's domain or
        // whose effect is numerically on the boundary.
        if model::validate(&spec).is_ok()
            && allocate(&spec).is_ok()
            && sample_size_ni(&spec, None).is_ok()
        {
            return spec;
        }
    }
}

pub fn random_superiority_sigmas(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let k = rng.random_range(2..=6);
    (0..k).map(|_| rng.random_range(0.3..3.0)).collect()
}

pub fn superiority_spec(sigmas: &[f64]) -> DesignSpec {
    let arm = |sd: f64| OutcomeFamily::Normal { mean: 0.0, sd };
    DesignSpec::superiority(
        arm(sigmas[0]),
        sigmas[1..].iter().map(|&s| arm(s)).collect(),
    )
}

pub fn tag(spec: &DesignSpec) -> &'static str {
    match spec.control {
        OutcomeFamily::Normal { .. } => "normal",
        OutcomeFamily::Binomial { .. } => "binomial",
        OutcomeFamily::Poisson { .. } => "poisson",
    }
}

/// Location of the treatment arm on the null boundary.
pub fn boundary_mean(mean_c: f64, margin: &Margin, direction: Direction) -> f64 {
    match (margin.kind, direction) {
        (MarginKind::Additive, Direction::HigherFavorable) => mean_c - margin.value,
        (MarginKind::Additive, Direction::LowerFavorable) => mean_c + margin.value,
        (MarginKind::Multiplicative, Direction::HigherFavorable) => mean_c / margin.value,
        (MarginKind::Multiplicative, Direction::LowerFavorable) => mean_c * margin.value,
    }
}

fn variance(arm: &OutcomeFamily, mean: f64) -> f64 {
    match arm {
        OutcomeFamily::Normal { sd, .. } => sd * sd,
        OutcomeFamily::Binomial { .. } => mean * (1.0 - mean),
        OutcomeFamily::Poisson { .. } => mean,
    }
}

/// `(w_C² σ_C², w_T² σ_T²)` of the non-inferiority statistic at `point`.
/// Higher-favorable multiplicative designs test `X̄_C − ΔX̄_T`, lower-favorable
/// ones `ΔX̄_C − X̄_T`.
pub fn weighted_variances(spec: &DesignSpec, point: EvalPoint) -> (f64, f64) {
    let margin = spec.margin.expect("non-inferiority design");
    let mean_c = spec.control.mean();
    let treatment = spec.treatment.as_ref().unwrap_or(&spec.control);
    let mean_t = match point {
        EvalPoint::NullBoundary => boundary_mean(mean_c, &margin, spec.direction),
        EvalPoint::Alternative => treatment.mean(),
    };
    let (wc, wt) = match (margin.kind, spec.direction) {
        (MarginKind::Additive, _) => (1.0, 1.0),
        (MarginKind::Multiplicative, Direction::HigherFavorable) => (1.0, margin.value),
        (MarginKind::Multiplicative, Direction::LowerFavorable) => (margin.value, 1.0),
    };
    (
        wc * wc * variance(&spec.control, mean_c),
        wt * wt * variance(treatment, mean_t),
    )
}

/// Exhaustive argmin of `f` over `h = i / units`, `0 < i < units`; the first
/// minimizer wins.
pub fn exhaustive_argmin(units: u32, f: impl Fn(f64) -> f64) -> f64 {
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 1..units {
        let h = i as f64 / units as f64;
        let v = f(h);
        if v < best.1 {
            best = (h, v);
        }
    }
    best.0
}

/// Sum over treatment arms of `Var(X̄_i − X̄_0)` per unit total size.
pub fn superiority_objective(sigmas: &[f64], fractions: &[f64]) -> f64 {
    let control = sigmas[0] * sigmas[0] / fractions[0];
    sigmas[1..]
        .iter()
        .zip(&fractions[1..])
        .map(|(s, c)| control + s * s / c)
        .sum()
}

pub fn jung_d(delta0: f64, za: f64, zb: f64, p: f64) -> f64 {
    let n = delta0.sqrt() * za + (p + (1.0 - p) * delta0) * zb;
    n * n / (p * (1.0 - p) * (delta0 - 1.0).powi(2))
}

pub fn chow_d(delta0: f64, za: f64, zb: f64, p: f64) -> f64 {
    (za + zb).powi(2) / (p * (1.0 - p) * delta0.ln().powi(2))
}

// ---------------------------------------------------------------------------
// Property checks shared by the proptest suite and the acceptance harness.

pub type Check = Result<(), String>;

fn ni(margin: Margin, sc: f64, st: f64) -> (f64, f64) {
    (
        trialalloc::ni_optimal_fraction(&margin, sc, st).unwrap(),
        trialalloc::ni_are(&margin, sc, st).unwrap(),
    )
}

pub fn prop_symmetry(sc: f64, st: f64, delta: f64) -> Check {
    let m = Margin::additive(delta);
    let (h1, are1) = ni(m, sc, st);
    let (h2, are2) = ni(m, st, sc);
    if (h1 - (1.0 - h2)).abs() > 1e-12 || (are1 - are2).abs() > 1e-12 {
        return Err(format!("σ=({sc},{st}): h={h1} vs 1−{h2}"));
    }
    Ok(())
}

pub fn prop_reduction(k: usize, sigma: f64) -> Check {
    let eq = superiority_equal_variance(k).unwrap();
    let un = superiority_unequal_variance(&vec![sigma; k]).unwrap();
    let worst = eq
        .fractions
        .iter()
        .zip(&un.fractions)
        .map(|(a, b)| (a - b).abs())
        .fold((eq.are_vs_balanced - un.are_vs_balanced).abs(), f64::max);
    if worst > 1e-12 {
        return Err(format!("k={k} σ={sigma}: max diff {worst:e}"));
    }
    Ok(())
}

pub fn prop_monotonicity(sc: f64, st: f64, d1: f64, d2: f64) -> Check {
    assert!(d1 < d2);
    let (h1, _) = ni(Margin::multiplicative(d1), sc, st);
    let (h2, _) = ni(Margin::multiplicative(d2), sc, st);
    if h2 >= h1 {
        return Err(format!("h not decreasing: h({d1})={h1}, h({d2})={h2}"));
    }
    let (_, a1) = ni(Margin::multiplicative(d1), sc, sc);
    let (_, a2) = ni(Margin::multiplicative(d2), sc, sc);
    if d1 > 1.0 && a2 <= a1 {
        return Err(format!("ARE not increasing: {a1} at {d1}, {a2} at {d2}"));
    }
    Ok(())
}

pub fn prop_scale_invariance(sc: f64, st: f64, margin: Margin, t: f64) -> Check {
    let (h1, a1) = ni(margin, sc, st);
    let (h2, a2) = ni(margin, t * sc, t * st);
    if (h1 - h2).abs() > 1e-12 || (a1 - a2).abs() > 1e-12 * a1 {
        return Err(format!("t={t}: h {h1}→{h2}, ARE {a1}→{a2}"));
    }
    Ok(())
}

/// Round-trip power, optimal-h dominance and balanced/optimal consistency.
pub fn prop_round_trip(spec: &DesignSpec) -> Check {
    let n = sample_size_ni(spec, None).map_err(|e| e.to_string())?;
    let power = achieved_power(spec, n.n_control, n.n_treatment).map_err(|e| e.to_string())?;
    if power < spec.rates.power - 1e-12 {
        return Err(format!(
            "power {power} < {} at {}/{}",
            spec.rates.power, n.n_control, n.n_treatment
        ));
    }
    for i in 1..100 {
        let h = i as f64 / 100.0;
        let other = sample_size_ni(spec, Some(h)).map_err(|e| e.to_string())?;
        if other.n_total_unrounded < n.n_total_unrounded * (1.0 - 1e-12) {
            return Err(format!("h={h} beats the optimum"));
        }
        if i == 50 {
            let ratio = other.n_total_unrounded / n.n_total_unrounded;
            if (ratio - n.are_vs_balanced).abs() > 1e-9 {
                return Err(format!("N ratio {ratio} vs ARE {}", n.are_vs_balanced));
            }
        }
    }
    Ok(())
}
