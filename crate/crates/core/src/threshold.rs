//! Inversion and gain thresholds in the drive saturation κ₀ versus buffer
//! pressure, their minima, the critical density for inversion and the
//! optimal-gain operating point. All of it uses the degenerate population
//! model at δ = δp = 0 unless stated otherwise.

use rayon::prelude::*;

use crate::constants::{BOLTZMANN, TORR};
use crate::rates::{
    DriveField, RateSet, build_rate_set_with, mean_relative_speed, number_density, rabi_from_kappa0,
    transfer_denominator,
};
use crate::species::{AtomSystem, BathConditions};
use crate::steady::{PopulationState, populations_for_drive, susceptibility};
use crate::{Error, Result};

/// Search bracket for thresholds in κ₀.
pub const KAPPA0_BRACKET: (f64, f64) = (1e-6, 1e12);
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// An atom in a buffer gas at fixed temperature; pressure is the free knob.
#[derive(Debug, Clone, PartialEq)]
pub struct VaporCell {
    pub atom: AtomSystem,
    pub bath: BathConditions,
    pub chi_raman: f64,
}

impl VaporCell {
    pub fn new(atom: AtomSystem, bath: BathConditions) -> Self {
        VaporCell {
            atom,
            bath,
            chi_raman: 0.0,
        }
    }

    pub fn rates_at(&self, pressure: f64) -> RateSet {
        build_rate_set_with(&self.atom, &self.bath.with_pressure(pressure), self.chi_raman)
    }

    pub fn drive(&self, kappa0: f64) -> DriveField {
        DriveField::resonant(rabi_from_kappa0(kappa0, self.atom.a21))
    }

    pub fn populations(&self, pressure: f64, kappa0: f64) -> Result<PopulationState> {
        let rates = self.rates_at(pressure);
        populations_for_drive(&self.drive(kappa0), &rates, self.atom.degeneracies)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdKind {
    /// R1/g1 − R3/g3 = 0.
    Inversion,
    /// [R1/g1 − R3/g3] − [R1/g1 − R2/g2] S = 0.
    Awi,
}

impl ThresholdKind {
    pub fn label(self) -> &'static str {
        match self {
            ThresholdKind::Inversion => "inversion",
            ThresholdKind::Awi => "awi",
        }
    }
}

/// Defining function of a threshold, scaled by g1 so that it equals 1 with
/// the drive off. Positive below threshold.
pub fn threshold_function(kind: ThresholdKind, cell: &VaporCell, pressure: f64, kappa0: f64) -> Result<f64> {
    let rates = cell.rates_at(pressure);
    let drive = cell.drive(kappa0);
    let pops = populations_for_drive(&drive, &rates, cell.atom.degeneracies)?;
    let g1 = cell.atom.degeneracies.g1 as f64;
    Ok(match kind {
        ThresholdKind::Inversion => g1 * pops.diff_13(),
        ThresholdKind::Awi => g1 * (pops.diff_13() - pops.diff_12() * rates.raman_saturation(drive.g)),
    })
}

/// Threshold κ₀ at one pressure, by bisection in log κ₀; `None` when the
/// defining function keeps its sign over the whole bracket.
pub fn find_threshold(kind: ThresholdKind, cell: &VaporCell, pressure: f64) -> Result<Option<f64>> {
    if !(pressure.is_finite() && pressure >= 0.0) {
        return Err(Error::config("pressure", "must be finite and >= 0"));
    }
    let h = |ln_k: f64| threshold_function(kind, cell, pressure, ln_k.exp());
    let (mut lo, mut hi) = (KAPPA0_BRACKET.0.ln(), KAPPA0_BRACKET.1.ln());
    if h(hi)? >= 0.0 {
        return Ok(None);
    }
    if h(lo)? <= 0.0 {
        return Ok(Some(KAPPA0_BRACKET.0));
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((0.5 * (lo + hi)).exp()))
}

pub fn inversion_threshold(cell: &VaporCell, pressure: f64) -> Result<Option<f64>> {
    find_threshold(ThresholdKind::Inversion, cell, pressure)
}

pub fn awi_threshold(cell: &VaporCell, pressure: f64) -> Result<Option<f64>> {
    find_threshold(ThresholdKind::Awi, cell, pressure)
}

/// Threshold from the explicit root of the (linear-fractional) defining
/// function; used to cross-check the bisection.
pub fn threshold_closed_form(kind: ThresholdKind, cell: &VaporCell, pressure: f64) -> Result<Option<f64>> {
    let r = cell.rates_at(pressure);
    let [g1, g2, g3] = cell.atom.degeneracies.as_f64();
    let a = r.w23 / r.gamma3;
    let b = 1.0 + g2 / g1 * (1.0 + a);
    let d = transfer_denominator(&r)?;
    // κ′ = q|g|² at δ = 0, and g1(R1/g1 − R3/g3) = (1 + cκ′)/(1 + κ′).
    let q = 2.0 * b / (r.gamma2 * r.gamma21 * d);
    let c = (1.0 - g2 * a / g3) / b;
    let g_sq = match kind {
        ThresholdKind::Inversion => {
            if c >= 0.0 {
                return Ok(None);
            }
            -1.0 / (c * q)
        }
        ThresholdKind::Awi => {
            let den = 1.0 / (r.gamma21 * r.gamma32) - c * q;
            if den <= 0.0 {
                return Ok(None);
            }
            1.0 / den
        }
    };
    let kappa0 = 4.0 * g_sq / cell.atom.a21.powi(2);
    Ok((kappa0 <= KAPPA0_BRACKET.1).then_some(kappa0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub kind: ThresholdKind,
    pub species: String,
    pub pressures: Vec<f64>,
    /// `None` where no threshold exists.
    pub kappa0: Vec<Option<f64>>,
}

pub fn threshold_curve(kind: ThresholdKind, cell: &VaporCell, pressures: &[f64]) -> Result<ThresholdCurve> {
    let kappa0 = pressures
        .par_iter()
        .map(|&p| find_threshold(kind, cell, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve {
        kind,
        species: cell.atom.name.clone(),
        pressures: pressures.to_vec(),
        kappa0,
    })
}

/// `n` log-spaced points spanning [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Golden-section search for the minimum of `f` on [a, b].
fn golden_min<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Index of the smallest finite value, or `None`.
fn argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdMinimum {
    pub kappa0: f64,
    pub pressure: f64,
}

pub const PRESSURE_GRID: usize = 64;

/// Minimum of a threshold curve over log pressure: grid scan, then golden
/// section between the neighbours of the best grid point.
pub fn minimize_threshold(kind: ThresholdKind, cell: &VaporCell, p_range: (f64, f64)) -> Result<ThresholdMinimum> {
    let (lo, hi) = p_range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::config("pressure range", "need 0 < min < max, both finite"));
    }
    let grid = log_grid(lo, hi, PRESSURE_GRID);
    let curve = threshold_curve(kind, cell, &grid)?;
    let values: Vec<f64> = curve.kappa0.iter().map(|k| k.unwrap_or(f64::INFINITY)).collect();
    let i = argmin(&values).ok_or(Error::NoMinimum)?;
    let a = grid[i.saturating_sub(1)].ln();
    let b = grid[(i + 1).min(grid.len() - 1)].ln();
    let (x, v) = golden_min(
        |ln_p| Ok(find_threshold(kind, cell, ln_p.exp())?.unwrap_or(f64::INFINITY)),
        a,
        b,
        1e-4,
    )?;
    Ok(if v <= values[i] {
        ThresholdMinimum {
            kappa0: v,
            pressure: x.exp(),
        }
    } else {
        ThresholdMinimum {
            kappa0: values[i],
            pressure: grid[i],
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalDensity {
    /// Buffer density N_b (cm⁻³) above which inversion becomes possible.
    pub density: f64,
    /// The same at the cell temperature, in Torr.
    pub pressure: f64,
}

/// N_b = g3 A31 / (v̄ (g2σ23 − g3σ32)); `None` unless g2σ23 > g3σ32.
pub fn critical_density(atom: &AtomSystem, bath: &BathConditions) -> Option<CriticalDensity> {
    let [_, g2, g3] = atom.degeneracies.as_f64();
    let excess = (g2 * atom.sigma_23 - g3 * atom.sigma_32) * 1e4;
    if excess <= 0.0 {
        return None;
    }
    let v = mean_relative_speed(atom.mass, bath.buffer_mass, bath.temperature);
    let density = g3 * atom.a31 / (v * excess);
    let per_torr = number_density(&bath.with_pressure(1.0));
    debug_assert!((per_torr - TORR / (BOLTZMANN * bath.temperature) * 1e-6).abs() <= 1e-9 * per_torr);
    Some(CriticalDensity {
        density,
        pressure: density / per_torr,
    })
}

/// Search box and resolution for [`optimize_gain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSearch {
    pub p_range: (f64, f64),
    pub kappa0_range: (f64, f64),
    /// Stay this fraction below the inversion threshold.
    pub inversion_margin: f64,
    pub p_points: usize,
    pub kappa0_points: usize,
}

impl Default for GainSearch {
    fn default() -> Self {
        GainSearch {
            p_range: (0.1, 3000.0),
            kappa0_range: (1.0, 1e6),
            inversion_margin: 0.01,
            p_points: PRESSURE_GRID,
            kappa0_points: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub pressure: f64,
    pub kappa0: f64,
    pub g: f64,
    /// −min Im f over the probe detuning.
    pub peak_gain: f64,
    /// Probe detuning (s⁻¹, ≥ 0) at which the gain peaks.
    pub delta_p: f64,
    /// R1/g1 − R3/g3.
    pub pop_diff_13: f64,
    pub populations: PopulationState,
}

/// Largest −Im f over δp ≥ 0 at resonant drive, with the detuning.
pub fn peak_gain(rates: &RateSet, drive: &DriveField, pops: &PopulationState) -> Result<(f64, f64)> {
    let w = rates.gamma31.min(rates.gamma32);
    let span = (20.0 * rates.gamma31).max(3.0 * drive.g);
    let mut grid: Vec<f64> = (0..=200).map(|i| span * i as f64 / 200.0).collect();
    for centre in [0.0, drive.g] {
        grid.extend(
            (-40..=40)
                .map(|i| centre + 0.25 * w * i as f64)
                .filter(|x| *x >= 0.0 && *x <= span),
        );
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let im = |x: f64| susceptibility(x, drive, rates, pops).im;
    let values: Vec<f64> = grid.iter().map(|&x| im(x)).collect();
    let i = argmin(&values).ok_or(Error::NoGain)?;
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(grid.len() - 1)];
    let (x, v) = golden_min(|x| Ok(im(x)), a, b, 1e-6 * w)?;
    let (x, v) = if v <= values[i] { (x, v) } else { (grid[i], values[i]) };
    Ok((-v, x))
}

struct KappaBest {
    kappa0: f64,
    gain: f64,
}

fn best_over_kappa(cell: &VaporCell, pressure: f64, search: &GainSearch) -> Result<Option<KappaBest>> {
    let (lo, mut hi) = search.kappa0_range;
    if let Some(k_inv) = inversion_threshold(cell, pressure)? {
        hi = hi.min((1.0 - search.inversion_margin) * k_inv);
    }
    if hi <= lo {
        return Ok(None);
    }
    let rates = cell.rates_at(pressure);
    let objective = |ln_k: f64| -> Result<f64> {
        let k = ln_k.exp();
        let drive = cell.drive(k);
        let pops = populations_for_drive(&drive, &rates, cell.atom.degeneracies)?;
        Ok(-peak_gain(&rates, &drive, &pops)?.0)
    };
    let grid = log_grid(lo, hi, search.kappa0_points.max(3));
    let values = grid.iter().map(|k| objective(k.ln())).collect::<Result<Vec<_>>>()?;
    let i = argmin(&values).ok_or(Error::NoGain)?;
    let a = grid[i.saturating_sub(1)].ln();
    let b = grid[(i + 1).min(grid.len() - 1)].ln();
    let (x, v) = golden_min(objective, a, b, 1e-4)?;
    let (k, v) = if v <= values[i] {
        (x.exp(), v)
    } else {
        (grid[i], values[i])
    };
    Ok(Some(KappaBest { kappa0: k, gain: -v }))
}

/// Pressure and drive strength maximising the line-centre-region gain at
/// resonant drive, constrained to stay below the inversion threshold.
pub fn optimize_gain(cell: &VaporCell, search: &GainSearch) -> Result<OperatingPoint> {
    let (lo, hi) = search.p_range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::config("pressure range", "need 0 < min < max, both finite"));
    }
    let (klo, khi) = search.kappa0_range;
    if !(klo > 0.0 && khi > klo && khi.is_finite()) {
        return Err(Error::config("kappa0 range", "need 0 < min < max, both finite"));
    }
    if !(0.0..1.0).contains(&search.inversion_margin) {
        return Err(Error::config("inversion margin", "must lie in [0, 1)"));
    }
    let grid = log_grid(lo, hi, search.p_points.max(3));
    let neg_gain = |p: f64| -> Result<f64> {
        Ok(match best_over_kappa(cell, p, search)? {
            Some(b) => -b.gain,
            None => f64::INFINITY,
        })
    };
    let values = grid.par_iter().map(|&p| neg_gain(p)).collect::<Result<Vec<_>>>()?;
    let i = argmin(&values).ok_or(Error::NoGain)?;
    let a = grid[i.saturating_sub(1)].ln();
    let b = grid[(i + 1).min(grid.len() - 1)].ln();
    let (x, v) = golden_min(|ln_p| neg_gain(ln_p.exp()), a, b, 1e-3)?;
    let pressure = if v <= values[i] { x.exp() } else { grid[i] };

    let best = best_over_kappa(cell, pressure, search)?.ok_or(Error::NoGain)?;
    if best.gain.is_nan() || best.gain <= 0.0 {
        return Err(Error::NoGain);
    }
    let rates = cell.rates_at(pressure);
    let drive = cell.drive(best.kappa0);
    let populations = populations_for_drive(&drive, &rates, cell.atom.degeneracies)?;
    let (peak, delta_p) = peak_gain(&rates, &drive, &populations)?;
    Ok(OperatingPoint {
        pressure,
        kappa0: best.kappa0,
        g: drive.g,
        peak_gain: peak,
        delta_p,
        pop_diff_13: populations.diff_13(),
        populations,
    })
}
