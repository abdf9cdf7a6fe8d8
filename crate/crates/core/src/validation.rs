//! Cross-checks between independent routes to the same quantity: the line
//! area sum rule, time-domain integration against closed forms, the direct
//! population solve against its closed form, and threshold bracketing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::Result;
use crate::rates::{DriveField, RateSet, build_rate_set_with, kappa_prime, rabi_from_kappa0, saturation_kappa};
use crate::species::{AtomSystem, SpeciesCatalog};
use crate::steady::{
    PopulationState, SumRuleConfig, awi_predicate, populations_degenerate, populations_degenerate_closed_form,
    populations_for_drive, populations_nondegenerate, sum_rule_residual, susceptibility,
};
use crate::threshold::{
    ThresholdKind, VaporCell, awi_threshold, critical_density, find_threshold, inversion_threshold, log_grid,
};
use crate::transient::{DensityState, IntegratorOptions, TransientParams, integrate_to_steady, linear_response_f};

pub const DEFAULT_SEED: u64 = 0x005e_eda1_ca11;

/// One randomly drawn physical operating condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub species: String,
    pub pressure: f64,
    pub temperature: f64,
    pub kappa0: f64,
    /// Drive detuning in units of Γ21.
    pub delta: f64,
    /// Probe detuning in units of Γ31.
    pub delta_p: f64,
    pub chi_raman: f64,
}

/// A draw bound to catalog data.
#[derive(Debug, Clone)]
pub struct Realised {
    pub atom: AtomSystem,
    pub rates: RateSet,
    pub drive: DriveField,
    pub delta_p: f64,
}

/// Ranges for [`random_draws`].
#[derive(Debug, Clone, Copy)]
pub struct DrawRanges {
    pub pressure: (f64, f64),
    pub kappa0: (f64, f64),
    pub detuning: f64,
    pub chi_raman: f64,
}

impl Default for DrawRanges {
    fn default() -> Self {
        DrawRanges {
            pressure: (0.1, 3000.0),
            kappa0: (1e-2, 1e5),
            detuning: 3.0,
            chi_raman: 2.0,
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Reproducible random draws over the catalog's species.
pub fn random_draws(catalog: &SpeciesCatalog, ranges: &DrawRanges, n: usize, seed: u64) -> Vec<Draw> {
    let names: Vec<String> = catalog.species_names().map(str::to_string).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Draw {
            species: names[rng.gen_range(0..names.len())].clone(),
            pressure: log_uniform(&mut rng, ranges.pressure),
            temperature: rng.gen_range(400.0..700.0),
            kappa0: log_uniform(&mut rng, ranges.kappa0),
            delta: rng.gen_range(-ranges.detuning..ranges.detuning),
            delta_p: rng.gen_range(-ranges.detuning..ranges.detuning),
            chi_raman: if rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen_range(0.0..ranges.chi_raman)
            },
        })
        .collect()
}

impl Draw {
    pub fn realise(&self, catalog: &SpeciesCatalog) -> Result<Realised> {
        let atom = catalog.atom(&self.species)?.clone();
        let bath = catalog.bath("He", self.pressure, self.temperature)?;
        let rates = build_rate_set_with(&atom, &bath, self.chi_raman);
        let drive = DriveField::new(rabi_from_kappa0(self.kappa0, atom.a21), self.delta * rates.gamma21);
        Ok(Realised {
            delta_p: self.delta_p * rates.gamma31,
            atom,
            rates,
            drive,
        })
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    fn below(name: &'static str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed: value < limit,
            value,
            limit,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed: false,
            value: f64::NAN,
            limit: f64::NAN,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {:<34} {:>12.3e} (limit {:.1e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.limit,
            self.detail
        )
    }
}

fn violations<T: std::fmt::Debug>(v: &[T]) -> String {
    if v.is_empty() {
        "violations".into()
    } else {
        format!("violations at {v:?}")
    }
}

/// Largest relative sum-rule residual over random draws (degenerate
/// populations).
pub fn sum_rule_sweep(catalog: &SpeciesCatalog, draws: &[Draw]) -> Result<f64> {
    let residuals = draws
        .par_iter()
        .map(|d| {
            let r = d.realise(catalog)?;
            let pops = populations_for_drive(&r.drive, &r.rates, r.atom.degeneracies)?;
            Ok(sum_rule_residual(&r.drive, &r.rates, &pops, &SumRuleConfig::default())?.residual)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// Undriven line: the area must be exactly πΓ31.
pub fn lorentzian_sum_rule(catalog: &SpeciesCatalog) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for name in ["Na", "K", "Rb"] {
        let atom = catalog.atom(name)?;
        let rates = build_rate_set_with(atom, &catalog.bath("He", 20.0, 550.0)?, 0.0);
        let rep = sum_rule_residual(
            &DriveField::resonant(0.0),
            &rates,
            &PopulationState::ground(),
            &SumRuleConfig::default(),
        )?;
        worst = worst.max(rep.residual);
    }
    Ok(worst)
}

/// Draw ranges where the explicit integrator stays cheap.
pub fn transient_ranges() -> DrawRanges {
    DrawRanges {
        pressure: (0.5, 300.0),
        kappa0: (0.1, 1e3),
        detuning: 2.0,
        chi_raman: 1.0,
    }
}

/// Largest relative population mismatch between integration (no probe) and
/// the non-degenerate closed form.
pub fn transient_population_sweep(catalog: &SpeciesCatalog, draws: &[Draw]) -> Result<f64> {
    let errs = draws
        .par_iter()
        .map(|d| {
            let r = d.realise(catalog)?;
            let params = TransientParams {
                g_probe: 0.0,
                drive: r.drive,
                delta_p: r.delta_p,
                rates: r.rates,
            };
            let (s, _) = integrate_to_steady(DensityState::ground(), &params, &IntegratorOptions::default())?;
            let kp = kappa_prime(saturation_kappa(&r.drive, &r.rates), &r.rates)?;
            let c = populations_nondegenerate(kp, &r.rates);
            Ok([(s.r1(), c.r1), (s.r2, c.r2), (s.r3, c.r3)]
                .into_iter()
                .map(|(a, b)| if b == 0.0 { a.abs() } else { ((a - b) / b).abs() })
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Largest relative mismatch between the weak-probe integration and the
/// closed-form line shape.
pub fn linear_response_sweep(catalog: &SpeciesCatalog, draws: &[Draw], epsilon: f64) -> Result<f64> {
    let errs = draws
        .par_iter()
        .map(|d| {
            let r = d.realise(catalog)?;
            let f = linear_response_f(r.delta_p, &r.drive, &r.rates, epsilon, &IntegratorOptions::default())?;
            let kp = kappa_prime(saturation_kappa(&r.drive, &r.rates), &r.rates)?;
            let pops = populations_nondegenerate(kp, &r.rates);
            let e = susceptibility(r.delta_p, &r.drive, &r.rates, &pops);
            Ok((f - e).norm() / e.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Largest difference between the direct population solve and the closed
/// form, relative to the larger of the two.
pub fn closed_form_sweep(catalog: &SpeciesCatalog, draws: &[Draw]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for d in draws {
        let r = d.realise(catalog)?;
        let kappa = saturation_kappa(&r.drive, &r.rates);
        let a = populations_degenerate(kappa, &r.rates, r.atom.degeneracies)?;
        let b = populations_degenerate_closed_form(kappa, &r.rates, r.atom.degeneracies)?;
        for (x, y) in [(a.r1, b.r1), (a.r2, b.r2), (a.r3, b.r3)] {
            let scale = x.abs().max(y.abs());
            if scale > 0.0 {
                worst = worst.max((x - y).abs() / scale);
            }
        }
    }
    Ok(worst)
}

fn cells(catalog: &SpeciesCatalog, chi_raman: f64) -> Result<Vec<VaporCell>> {
    catalog
        .species_names()
        .map(|n| {
            let mut c = VaporCell::new(catalog.atom(n)?.clone(), catalog.bath("He", 1.0, 550.0)?);
            c.chi_raman = chi_raman;
            Ok(c)
        })
        .collect()
}

/// Resonant Im f changes sign exactly where the gain predicate does: just
/// below the gain threshold both say "absorbing", just above both say "gain".
/// Returns the number of disagreements.
pub fn predicate_consistency(catalog: &SpeciesCatalog, pressures: &[f64]) -> Result<usize> {
    let mut bad = 0;
    for cell in cells(catalog, 0.0)? {
        for &p in pressures {
            let Some(k) = awi_threshold(&cell, p)? else { continue };
            let rates = cell.rates_at(p);
            for (factor, expect_gain) in [(1.0 - 1e-6, false), (1.0 + 1e-6, true)] {
                let drive = cell.drive(k * factor);
                let pops = populations_for_drive(&drive, &rates, cell.atom.degeneracies)?;
                let gain = susceptibility(0.0, &drive, &rates, &pops).im < 0.0;
                let predicate = awi_predicate(rates.raman_saturation(drive.g), &pops);
                if gain != expect_gain || predicate != expect_gain {
                    bad += 1;
                }
            }
        }
    }
    Ok(bad)
}

/// Pressures (per species) where the gain threshold exceeds the inversion
/// threshold, or inversion exists without gain.
pub fn threshold_ordering(catalog: &SpeciesCatalog, pressures: &[f64]) -> Result<Vec<(String, f64)>> {
    let mut bad = Vec::new();
    for cell in cells(catalog, 0.0)? {
        for &p in pressures {
            let inv = inversion_threshold(&cell, p)?;
            let awi = awi_threshold(&cell, p)?;
            match (inv, awi) {
                (Some(i), Some(a)) if a > i => bad.push((cell.atom.name.clone(), p)),
                (Some(_), None) => bad.push((cell.atom.name.clone(), p)),
                _ => {}
            }
        }
    }
    Ok(bad)
}

/// Species whose inversion threshold does not switch on between 0.9× and
/// 1.1× the critical pressure.
pub fn critical_bracketing(catalog: &SpeciesCatalog) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for cell in cells(catalog, 0.0)? {
        let Some(crit) = critical_density(&cell.atom, &cell.bath) else {
            continue;
        };
        let below = inversion_threshold(&cell, 0.9 * crit.pressure)?;
        let above = inversion_threshold(&cell, 1.1 * crit.pressure)?;
        if below.is_some() || above.is_none() {
            bad.push(cell.atom.name.clone());
        }
    }
    Ok(bad)
}

/// Largest |defining function| at the bisected thresholds.
pub fn threshold_residuals(catalog: &SpeciesCatalog, pressures: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for cell in cells(catalog, 0.0)? {
        for &p in pressures {
            for kind in [ThresholdKind::Inversion, ThresholdKind::Awi] {
                if let Some(k) = find_threshold(kind, &cell, p)? {
                    let r = crate::threshold::threshold_function(kind, &cell, p, k)?;
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    Ok(worst)
}

fn capture(name: &'static str, limit: f64, r: Result<f64>, detail: &str) -> Check {
    match r {
        Ok(v) => Check::below(name, v, limit, detail),
        Err(e) => Check::failed(name, e.to_string()),
    }
}

/// The full suite run by `awi validate`.
pub fn run_all(catalog: &SpeciesCatalog) -> Vec<Check> {
    let seed = DEFAULT_SEED;
    let general = random_draws(catalog, &DrawRanges::default(), 100, seed);
    let stiff_free = random_draws(catalog, &transient_ranges(), 20, seed ^ 1);
    let wide_chi: Vec<Draw> = random_draws(catalog, &DrawRanges::default(), 20, seed ^ 2)
        .into_iter()
        .map(|d| Draw { chi_raman: 1e3, ..d })
        .collect();
    let pressures = log_grid(0.5, 3000.0, 24);

    let mut out = vec![
        capture(
            "sum rule, undriven line",
            1e-6,
            lorentzian_sum_rule(catalog),
            "relative",
        ),
        capture(
            "sum rule, 100 random draws",
            1e-2,
            sum_rule_sweep(catalog, &general),
            "worst relative",
        ),
        capture(
            "sum rule, chi_raman = 1e3",
            1e-2,
            sum_rule_sweep(catalog, &wide_chi),
            "worst relative",
        ),
        capture(
            "integrated populations",
            1e-8,
            transient_population_sweep(catalog, &stiff_free),
            "worst relative, 20 draws",
        ),
        capture(
            "weak-probe line shape",
            1e-5,
            linear_response_sweep(catalog, &stiff_free, crate::transient::PROBE_EPSILON),
            "worst relative, 20 draws",
        ),
        capture(
            "closed form vs linear solve",
            1e-12,
            closed_form_sweep(catalog, &random_draws(catalog, &DrawRanges::default(), 1000, seed ^ 3)),
            "worst relative, 1000 draws",
        ),
        capture(
            "threshold root residual",
            1e-8,
            threshold_residuals(catalog, &pressures),
            "worst absolute",
        ),
    ];
    out.push(match predicate_consistency(catalog, &pressures) {
        Ok(n) => Check::below("gain sign vs predicate", n as f64, 0.5, "disagreements"),
        Err(e) => Check::failed("gain sign vs predicate", e.to_string()),
    });
    out.push(match threshold_ordering(catalog, &pressures) {
        Ok(v) => Check::below("awi <= inversion threshold", v.len() as f64, 0.5, violations(&v)),
        Err(e) => Check::failed("awi <= inversion threshold", e.to_string()),
    });
    out.push(match critical_bracketing(catalog) {
        Ok(v) => Check::below("critical pressure bracketing", v.len() as f64, 0.5, violations(&v)),
        Err(e) => Check::failed("critical pressure bracketing", e.to_string()),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible() {
        let cat = SpeciesCatalog::builtin();
        let a = random_draws(&cat, &DrawRanges::default(), 10, 7);
        let b = random_draws(&cat, &DrawRanges::default(), 10, 7);
        assert_eq!(a, b);
        assert_ne!(a, random_draws(&cat, &DrawRanges::default(), 10, 8));
        for d in &a {
            assert!((0.1..3000.0).contains(&d.pressure));
            d.realise(&cat).unwrap();
        }
    }

    #[test]
    fn bracketing_and_ordering_hold() {
        let cat = SpeciesCatalog::builtin();
        assert!(critical_bracketing(&cat).unwrap().is_empty());
        let grid = log_grid(1.0, 2000.0, 12);
        assert!(threshold_ordering(&cat, &grid).unwrap().is_empty());
        assert_eq!(predicate_consistency(&cat, &grid).unwrap(), 0);
    }

    #[test]
    fn check_lines() {
        let c = Check::below("x", 0.5, 1.0, "d");
        assert!(c.passed && c.line().starts_with("[PASS]"));
        assert!(!Check::failed("y", "boom").passed);
    }
}
