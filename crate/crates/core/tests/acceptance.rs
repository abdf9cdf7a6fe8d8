//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints a PASS/FAIL line; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use awi_core::config::{DriveStrength, RunConfig, ScanSpec};
use awi_core::doppler::{DopplerConfig, velocity_average};
use awi_core::rates::build_rate_set;
use awi_core::steady::high_pressure_coefficient;
use awi_core::threshold::{GainSearch, ThresholdKind, VaporCell, log_grid, minimize_threshold, optimize_gain};
use awi_core::transient::PROBE_EPSILON;
use awi_core::validation::{
    DEFAULT_SEED, DrawRanges, closed_form_sweep, critical_bracketing, linear_response_sweep, lorentzian_sum_rule,
    predicate_consistency, random_draws, sum_rule_sweep, threshold_ordering, transient_population_sweep,
    transient_ranges,
};
use awi_core::{Result, SpeciesCatalog};

const SPECIES: [&str; 3] = ["K", "Na", "Rb"];
const P_RANGE: (f64, f64) = (0.1, 3000.0);

type Criterion = fn(&SpeciesCatalog) -> Result<Outcome>;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            passed: true,
            lines: vec![],
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "MISS" }));
    }
}

fn within_factor(x: f64, target: f64, factor: f64) -> bool {
    x > 0.0 && x / target <= factor && target / x <= factor
}

fn cell(catalog: &SpeciesCatalog, species: &str) -> Result<VaporCell> {
    Ok(VaporCell::new(
        catalog.atom(species)?.clone(),
        catalog.bath("He", 1.0, 550.0)?,
    ))
}

fn threshold_minima(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    let reference = [(92.0, 3.1), (848.0, 12.4), (4971.0, 640.5)];
    let mut found = vec![];
    for (name, (k, p)) in SPECIES.iter().zip(reference) {
        let m = minimize_threshold(ThresholdKind::Awi, &cell(cat, name)?, P_RANGE)?;
        o.check(
            within_factor(m.kappa0, k, 2.0) && within_factor(m.pressure, p, 2.0),
            format!(
                "{name}: kappa0 {:.1} at {:.2} Torr (ref {k}, {p} Torr)",
                m.kappa0, m.pressure
            ),
        );
        found.push(m.kappa0);
    }
    o.check(
        found[0] < found[1] && found[1] < found[2],
        format!(
            "ordering K < Na < Rb: {:.1} < {:.1} < {:.1}",
            found[0], found[1], found[2]
        ),
    );
    Ok(o)
}

fn populations_at_minimum(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    let reference = [(0.28, 0.50, 0.22), (0.264, 0.51, 0.226), (0.324, 0.462, 0.214)];
    for (name, (a, b, c)) in SPECIES.iter().zip(reference) {
        let cell = cell(cat, name)?;
        let m = minimize_threshold(ThresholdKind::Awi, &cell, P_RANGE)?;
        let r = cell.populations(m.pressure, m.kappa0)?;
        let ok = (r.r1 - a).abs() <= 0.05 && (r.r2 - b).abs() <= 0.05 && (r.r3 - c).abs() <= 0.05;
        o.check(
            ok,
            format!("{name}: ({:.3}, {:.3}, {:.3}) vs ({a}, {b}, {c})", r.r1, r.r2, r.r3),
        );
    }
    Ok(o)
}

fn optimal_gains(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    let reference = [(0.01, 3e-4), (0.002, 2e-5), (1.3e-4, 1.2e-4)];
    for (name, (gain, diff)) in SPECIES.iter().zip(reference) {
        let op = optimize_gain(&cell(cat, name)?, &GainSearch::default())?;
        o.check(
            within_factor(op.peak_gain, gain, 2.0),
            format!(
                "{name}: peak gain {:.3e} (ref {gain:e}) at kappa0 {:.0}, {:.1} Torr",
                op.peak_gain, op.kappa0, op.pressure
            ),
        );
        o.check(
            op.pop_diff_13 > 0.0 && within_factor(op.pop_diff_13, diff, 10.0),
            format!("{name}: R1/g1 - R3/g3 = {:.2e} (ref {diff:e})", op.pop_diff_13),
        );
    }
    Ok(o)
}

fn rate_estimates(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    let atom = cat.atom("Na")?;
    let rates = build_rate_set(atom, &cat.bath("He", 760.0, 550.0)?);
    o.check(
        within_factor(rates.w23, 7.5e9, 1.5),
        format!("w23 = {:.3e} s^-1 (ref 7.5e9)", rates.w23),
    );
    o.check(
        within_factor(rates.gamma21, 5e10, 1.5),
        format!("Gamma21 = {:.3e} s^-1 (ref 5e10)", rates.gamma21),
    );
    let x = atom.boltzmann_exponent(550.0);
    o.check(
        (x / 4.3e-2 - 1.0).abs() <= 0.03,
        format!("DeltaE/kBT = {x:.4e} (ref 4.3e-2 +- 3%)"),
    );
    let c = high_pressure_coefficient(x);
    o.check(
        (c / 1.3e-2 - 1.0).abs() <= 0.15,
        format!("high-pressure coefficient = {c:.4e} (ref 1.3e-2 +- 15%)"),
    );
    Ok(o)
}

fn doppler_halfwidths(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    for (name, expected) in [("Na", 5.6e9), ("K", 3.1e9), ("Rb", 2.15e9)] {
        let w = DopplerConfig::thermal(cat.atom(name)?, 550.0).halfwidth;
        o.check(
            (w / expected - 1.0).abs() <= 0.10,
            format!("{name}: {w:.3e} s^-1 (ref {expected:e})"),
        );
    }
    Ok(o)
}

fn sum_rule(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    let draws = random_draws(cat, &DrawRanges::default(), 100, DEFAULT_SEED);
    let worst = sum_rule_sweep(cat, &draws)?;
    o.check(
        worst < 1e-2,
        format!("100 random draws: worst relative residual {worst:.3e} (< 1e-2)"),
    );
    let lor = lorentzian_sum_rule(cat)?;
    o.check(lor < 1e-6, format!("Lorentzian: relative residual {lor:.3e} (< 1e-6)"));
    Ok(o)
}

fn oracle_equivalence(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    let draws = random_draws(cat, &transient_ranges(), 20, DEFAULT_SEED ^ 1);
    let pops = transient_population_sweep(cat, &draws)?;
    o.check(
        pops < 1e-8,
        format!("transient populations: worst relative {pops:.3e} (< 1e-8)"),
    );
    let lr = linear_response_sweep(cat, &draws, PROBE_EPSILON)?;
    o.check(
        lr < 1e-5,
        format!("linear-response f, 20 draws: worst relative {lr:.3e} (< 1e-5)"),
    );
    let cf = closed_form_sweep(cat, &random_draws(cat, &DrawRanges::default(), 1000, DEFAULT_SEED ^ 3))?;
    o.check(
        cf < 1e-12,
        format!("degenerate closed form vs LU, 1000 draws: {cf:.3e} (< 1e-12)"),
    );
    Ok(o)
}

fn predicate_checks(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();
    let pressures = log_grid(0.5, 3000.0, 24);
    let n = predicate_consistency(cat, &pressures)?;
    o.check(
        n == 0,
        format!("sign of resonant Im f vs gain predicate: {n} disagreements"),
    );
    let v = threshold_ordering(cat, &pressures)?;
    o.check(
        v.is_empty(),
        format!("awi threshold <= inversion threshold: violations {v:?}"),
    );
    let v = critical_bracketing(cat)?;
    o.check(
        v.is_empty(),
        format!("critical pressure brackets inversion onset at 0.9x/1.1x: violations {v:?}"),
    );
    Ok(o)
}

fn doppler_gain(cat: &SpeciesCatalog) -> Result<Outcome> {
    let mut o = Outcome::new();

    let base = RunConfig {
        drive: Some(DriveStrength::Kappa0(3400.0)),
        ..Default::default()
    };
    let r = base.resolve(cat)?;
    let dc = base.doppler_config(&r);
    let g31 = r.rates.gamma31;
    let near: Vec<f64> = ScanSpec {
        min: -0.5,
        max: 0.5,
        n: 11,
    }
    .grid()
    .iter()
    .map(|x| x * g31)
    .collect();
    let s = velocity_average(&near, &r.drive, &r.rates, &r.atom, &dc)?;
    let worst = s.iter().map(|x| x.absorption()).fold(f64::NEG_INFINITY, f64::max);
    o.check(
        worst < 0.0,
        format!(
            "kappa0 3400, delta 0: Im f < 0 across |delta_p| <= Gamma31/2 (max {worst:.3e}, {} nodes)",
            dc.n_nodes
        ),
    );

    let halfwidth = dc.halfwidth;
    let shifted = RunConfig {
        drive: Some(DriveStrength::Kappa0(6e4)),
        delta: 3.0 * halfwidth,
        ..Default::default()
    };
    let r = shifted.resolve(cat)?;
    let dc = shifted.doppler_config(&r);
    let delta = r.drive.delta;
    let grid: Vec<f64> = ScanSpec {
        min: -2.0,
        max: 2.0,
        n: 801,
    }
    .grid()
    .iter()
    .map(|x| x * delta)
    .collect();
    let s = velocity_average(&grid, &r.drive, &r.rates, &r.atom, &dc)?;
    let best = s
        .iter()
        .min_by(|a, b| a.absorption().total_cmp(&b.absorption()))
        .expect("non-empty scan");
    let at = best.delta_p;
    o.check(
        best.absorption() < 0.0 && (at - delta).abs() < at.abs() && at > 0.5 * delta,
        format!(
            "kappa0 6e4, delta = 3 halfwidths: strongest gain {:.3e} at delta_p/delta = {:.3}",
            -best.absorption(),
            at / delta
        ),
    );
    Ok(o)
}

fn main() -> ExitCode {
    let cat = SpeciesCatalog::builtin();
    let criteria: [(&str, Criterion); 9] = [
        ("threshold minima", threshold_minima),
        ("populations at threshold minimum", populations_at_minimum),
        ("optimal gains", optimal_gains),
        ("rate estimates", rate_estimates),
        ("Doppler halfwidths", doppler_halfwidths),
        ("sum rule", sum_rule),
        ("oracle equivalence", oracle_equivalence),
        ("predicate consistency", predicate_checks),
        ("velocity-averaged gain", doppler_gain),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (passed, lines) = match run(&cat) {
            Ok(o) => (o.passed, o.lines),
            Err(e) => (false, vec![format!("error: {e}")]),
        };
        println!(
            "criterion {}: {} {name} ({:.2} s)",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        for l in lines {
            println!("    {l}");
        }
        failed += usize::from(!passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
