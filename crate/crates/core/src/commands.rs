//! The analyses behind each `awi` subcommand. Each returns CSV tables (and
//! optionally charts) rather than touching the file system.

use crate::Result;
use crate::config::{Resolved, RunConfig};
use crate::doppler::velocity_average;
use crate::output::{Axis, Chart, Csv, Series, rates_header};
use crate::rates::{kappa_prime, saturation_kappa};
use crate::species::SpeciesCatalog;
use crate::steady::{
    PopulationState, SpectrumSample, degenerate_kappa_prime, populations_for_drive, populations_high_pressure,
    populations_nondegenerate, spectrum_scan,
};
use crate::threshold::{ThresholdKind, VaporCell, critical_density, log_grid, minimize_threshold, threshold_curve};
use crate::validation::{Check, run_all};

/// One named output: `<name>.csv`, plus `<name>.svg` when charted.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: &'static str,
    pub csv: Csv,
    pub chart: Option<Chart>,
    /// Non-fatal remarks for stderr.
    pub warnings: Vec<String>,
}

fn config_header(csv: &mut Csv, cfg: &RunConfig, r: &Resolved) {
    csv.note(format!("species = {}", r.atom.name))
        .note(format!("buffer = {}", r.bath.buffer))
        .param("pressure [Torr]", r.bath.pressure)
        .param("temperature [K]", r.bath.temperature)
        .param("g [s^-1]", r.drive.g)
        .param("kappa0", r.kappa0)
        .param("delta [s^-1]", r.drive.delta)
        .param("chi_raman", cfg.chi_raman)
        .note(format!(
            "catalog = {}",
            cfg.catalog
                .as_ref()
                .map_or("builtin".into(), |p| p.display().to_string())
        ));
    rates_header(csv, &r.rates);
}

fn populations_header(csv: &mut Csv, r: &Resolved, pops: &PopulationState) -> Result<()> {
    let kappa = saturation_kappa(&r.drive, &r.rates);
    csv.param("R1", pops.r1)
        .param("R2", pops.r2)
        .param("R3", pops.r3)
        .param("R1/g1 - R2/g2", pops.diff_12())
        .param("R1/g1 - R3/g3", pops.diff_13())
        .param("S", r.rates.raman_saturation(r.drive.g))
        .param("kappa", kappa)
        .param(
            "kappa_prime",
            degenerate_kappa_prime(kappa, &r.rates, r.atom.degeneracies)?,
        );
    Ok(())
}

fn spectrum_table(samples: &[SpectrumSample], gamma31: f64) -> Csv {
    let mut csv = Csv::new(&["delta_p_over_Gamma31", "Im_f", "Re_f"]);
    for s in samples {
        csv.push_numbers(&[s.delta_p / gamma31, s.f.im, s.f.re]);
    }
    csv
}

fn spectrum_chart(title: String, samples: &[SpectrumSample], gamma31: f64) -> Chart {
    Chart {
        title,
        x_label: "delta_p / Gamma31".into(),
        y_label: "f (scaled to undriven peak)".into(),
        x_axis: Axis::Linear,
        y_axis: Axis::Linear,
        series: vec![
            Series {
                label: "Im f".into(),
                points: samples.iter().map(|s| (s.delta_p / gamma31, s.f.im)).collect(),
            },
            Series {
                label: "Re f".into(),
                points: samples.iter().map(|s| (s.delta_p / gamma31, s.f.re)).collect(),
            },
        ],
    }
}

/// Probe spectrum for a single velocity class, or velocity-averaged when
/// `cfg.doppler` is set.
pub fn spectrum(cfg: &RunConfig, catalog: &SpeciesCatalog) -> Result<Artifact> {
    if cfg.doppler {
        let mut a = doppler(cfg, catalog)?;
        a.name = "spectrum";
        return Ok(a);
    }
    let r = cfg.resolve(catalog)?;
    let pops = populations_for_drive(&r.drive, &r.rates, r.atom.degeneracies)?;
    let grid: Vec<f64> = cfg.scan.grid().iter().map(|x| x * r.rates.gamma31).collect();
    let samples = spectrum_scan(&grid, &r.drive, &r.rates, &pops);
    let mut csv = spectrum_table(&samples, r.rates.gamma31);
    csv.note("awi spectrum: normalised probe susceptibility f, Im f = absorption (negative: gain)");
    config_header(&mut csv, cfg, &r);
    populations_header(&mut csv, &r, &pops)?;
    csv.note("abscissa = probe detuning in units of Gamma31");
    Ok(Artifact {
        name: "spectrum",
        chart: Some(spectrum_chart(
            format!("{} probe spectrum", r.atom.name),
            &samples,
            r.rates.gamma31,
        )),
        csv,
        warnings: vec![],
    })
}

/// Velocity-averaged spectrum.
pub fn doppler(cfg: &RunConfig, catalog: &SpeciesCatalog) -> Result<Artifact> {
    let r = cfg.resolve(catalog)?;
    let dc = cfg.doppler_config(&r);
    let mut warnings = vec![];
    if r.rates.gamma21 >= dc.halfwidth {
        warnings.push(format!(
            "Gamma21 = {:.3e} s^-1 is not below the Doppler halfwidth {:.3e} s^-1; averaging changes little",
            r.rates.gamma21, dc.halfwidth
        ));
    }
    let grid: Vec<f64> = cfg.scan.grid().iter().map(|x| x * r.rates.gamma31).collect();
    let samples = velocity_average(&grid, &r.drive, &r.rates, &r.atom, &dc)?;
    let mut csv = spectrum_table(&samples, r.rates.gamma31);
    csv.note("awi doppler: velocity-averaged probe susceptibility, scaled to the averaged undriven peak");
    config_header(&mut csv, cfg, &r);
    csv.param("doppler halfwidth [s^-1]", dc.halfwidth)
        .note(format!("velocity nodes = {}", dc.n_nodes))
        .param("k_probe/k_drive", dc.k_ratio)
        .note("geometry = copropagating")
        .note("abscissa = probe detuning in units of Gamma31");
    Ok(Artifact {
        name: "doppler",
        chart: Some(spectrum_chart(
            format!("{} velocity-averaged probe spectrum", r.atom.name),
            &samples,
            r.rates.gamma31,
        )),
        csv,
        warnings,
    })
}

/// The three population models side by side.
pub fn populations(cfg: &RunConfig, catalog: &SpeciesCatalog) -> Result<Artifact> {
    let r = cfg.resolve(catalog)?;
    let kappa = saturation_kappa(&r.drive, &r.rates);
    let s = r.rates.raman_saturation(r.drive.g);
    let kp_nd = kappa_prime(kappa, &r.rates)?;
    let nd = populations_nondegenerate(kp_nd, &r.rates);
    let x = r.atom.boltzmann_exponent(r.bath.temperature);
    let hp = populations_high_pressure(&r.drive, r.rates.gamma21, r.atom.a21, x);
    let dg = populations_for_drive(&r.drive, &r.rates, r.atom.degeneracies)?;
    let kp_dg = degenerate_kappa_prime(kappa, &r.rates, r.atom.degeneracies)?;

    let mut csv = Csv::new(&[
        "model",
        "R1",
        "R2",
        "R3",
        "sum",
        "R1/g1-R2/g2",
        "R1/g1-R3/g3",
        "kappa",
        "kappa_prime",
        "S",
    ]);
    csv.note("awi populations: steady-state level populations under three models");
    config_header(&mut csv, cfg, &r);
    csv.param("DeltaE/kBT", x);
    for (name, p, kp) in [
        ("nondegenerate", nd, kp_nd),
        ("high_pressure", hp.populations, hp.kappa_prime),
        ("degenerate", dg, kp_dg),
    ] {
        let mut row = vec![name.to_string()];
        row.extend([p.r1, p.r2, p.r3, p.total(), p.diff_12(), p.diff_13(), kappa, kp, s].map(crate::output::num));
        csv.push(row);
    }
    Ok(Artifact {
        name: "populations",
        csv,
        chart: None,
        warnings: vec![],
    })
}

/// Pressure range for the threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureSweep {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Default for PressureSweep {
    fn default() -> Self {
        PressureSweep {
            min: 0.1,
            max: 3000.0,
            n: 64,
        }
    }
}

/// Inversion and gain thresholds against pressure, with their minima.
pub fn thresholds(cfg: &RunConfig, sweep: &PressureSweep, catalog: &SpeciesCatalog) -> Result<Artifact> {
    cfg.validate()?;
    if !(sweep.min > 0.0 && sweep.max > sweep.min && sweep.max.is_finite()) {
        return Err(crate::Error::config(
            "p-min/p-max",
            "need 0 < p-min < p-max, both finite",
        ));
    }
    if sweep.n < 2 {
        return Err(crate::Error::config("p-n", "need at least 2 points"));
    }
    let atom = catalog.atom(&cfg.species)?.clone();
    let bath = catalog.bath(&cfg.buffer, cfg.pressure, cfg.temperature)?;
    let mut cell = VaporCell::new(atom, bath);
    cell.chi_raman = cfg.chi_raman;
    let grid = log_grid(sweep.min, sweep.max, sweep.n);
    let inv = threshold_curve(ThresholdKind::Inversion, &cell, &grid)?;
    let awi = threshold_curve(ThresholdKind::Awi, &cell, &grid)?;

    let mut csv = Csv::new(&[
        "pressure_torr",
        "kappa0_inversion",
        "kappa0_awi",
        "inversion_present",
        "awi_present",
    ]);
    csv.note("awi thresholds: threshold kappa0 = 4|g|^2/A21^2 at delta = delta_p = 0, atoms at rest")
        .note(format!("species = {}", cell.atom.name))
        .note(format!("buffer = {}", cell.bath.buffer))
        .param("temperature [K]", cell.bath.temperature)
        .param("chi_raman", cfg.chi_raman)
        .note("absent thresholds are written as nan with present = 0");
    match critical_density(&cell.atom, &cell.bath) {
        Some(c) => {
            csv.param("critical density [cm^-3]", c.density)
                .param("critical pressure [Torr]", c.pressure);
        }
        None => {
            csv.note("critical density = none (g2*sigma23 <= g3*sigma32)");
        }
    }
    for kind in [ThresholdKind::Inversion, ThresholdKind::Awi] {
        match minimize_threshold(kind, &cell, (sweep.min, sweep.max)) {
            Ok(m) => {
                csv.note(format!(
                    "minimum {} = kappa0 {} at {} Torr",
                    kind.label(),
                    crate::output::num(m.kappa0),
                    crate::output::num(m.pressure)
                ));
            }
            Err(crate::Error::NoMinimum) => {
                csv.note(format!("minimum {} = absent", kind.label()));
            }
            Err(e) => return Err(e),
        }
    }
    for (i, &p) in grid.iter().enumerate() {
        let a = inv.kappa0[i];
        let b = awi.kappa0[i];
        csv.push(vec![
            crate::output::num(p),
            crate::output::num(a.unwrap_or(f64::NAN)),
            crate::output::num(b.unwrap_or(f64::NAN)),
            (a.is_some() as u8).to_string(),
            (b.is_some() as u8).to_string(),
        ]);
    }
    let series = |label: &str, c: &crate::threshold::ThresholdCurve| Series {
        label: label.into(),
        points: c
            .pressures
            .iter()
            .zip(&c.kappa0)
            .map(|(&p, k)| (p, k.unwrap_or(f64::NAN)))
            .collect(),
    };
    Ok(Artifact {
        name: "thresholds",
        chart: Some(Chart {
            title: format!("{} thresholds vs He pressure", cell.atom.name),
            x_label: "pressure [Torr]".into(),
            y_label: "kappa0".into(),
            x_axis: Axis::Log,
            y_axis: Axis::Log,
            series: vec![series("a: inversion", &inv), series("b: awi", &awi)],
        }),
        csv,
        warnings: vec![],
    })
}

/// Run the cross-check suite.
pub fn validate(catalog: &SpeciesCatalog) -> Vec<Check> {
    run_all(catalog)
}
