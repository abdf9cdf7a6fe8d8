//! Steady-state populations and the linear-probe line shape.
//!
//! The normalised susceptibility on the |1>-|3> probe transition is
//!
//! ```text
//! f(δp) = iΓ31 { [Γ23 − i(δp−δ)](r1−r3) − |g|²(r1−r2)/(Γ21 + iδ) }
//!              / { [Γ23 − i(δp−δ)](Γ31 − iδp) + |g|² }
//! ```
//!
//! with Im f the absorption (negative: gain) and Re f the dispersion, both in
//! units of the drive-off peak absorption. For degenerate levels the r_i are
//! per-sublevel populations R_i/g_i, rescaled by g1 so that the undriven line
//! still peaks at 1 (see [`PopulationState::probe_populations`]).

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::quad;
use crate::rates::{DriveField, RateSet, saturation_kappa, transfer_denominator};
use crate::{Error, Result};

pub use crate::species::Degeneracies;

/// Population differences closer to zero than this count as zero.
pub const ZERO_DIFFERENCE: f64 = 1e-10;

/// Level populations (R1, R2, R3), summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationState {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub degeneracies: Degeneracies,
}

impl PopulationState {
    pub fn ground() -> Self {
        Self::nondegenerate(1.0, 0.0, 0.0)
    }

    pub fn nondegenerate(r1: f64, r2: f64, r3: f64) -> Self {
        PopulationState {
            r1,
            r2,
            r3,
            degeneracies: Degeneracies::NONE,
        }
    }

    pub fn total(&self) -> f64 {
        self.r1 + self.r2 + self.r3
    }

    /// Per-sublevel populations R_i/g_i.
    pub fn sublevel(&self) -> [f64; 3] {
        let [g1, g2, g3] = self.degeneracies.as_f64();
        [self.r1 / g1, self.r2 / g2, self.r3 / g3]
    }

    /// Populations entering the line shape: per-sublevel values scaled by g1,
    /// so an undriven ground state gives (1, 0, 0).
    pub fn probe_populations(&self) -> [f64; 3] {
        let g1 = self.degeneracies.g1 as f64;
        self.sublevel().map(|r| r * g1)
    }

    /// R1/g1 − R2/g2.
    pub fn diff_12(&self) -> f64 {
        let s = self.sublevel();
        s[0] - s[1]
    }

    /// R1/g1 − R3/g3; negative means inversion on the probe transition.
    pub fn diff_13(&self) -> f64 {
        let s = self.sublevel();
        s[0] - s[2]
    }
}

/// One point of a probe spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    /// Probe detuning ω_p − ω31 (s⁻¹).
    pub delta_p: f64,
    pub f: Complex64,
}

impl SpectrumSample {
    pub fn absorption(&self) -> f64 {
        self.f.im
    }

    pub fn dispersion(&self) -> f64 {
        self.f.re
    }
}

/// Non-degenerate closed form: r2 = Γ3/(2Γ3+w23)·κ′/(1+κ′), r3 = (w23/Γ3) r2.
pub fn populations_nondegenerate(kprime: f64, rates: &RateSet) -> PopulationState {
    let kprime = kprime.max(0.0);
    let sat = kprime / (1.0 + kprime);
    let r2 = rates.gamma3 / (2.0 * rates.gamma3 + rates.w23) * sat;
    let r3 = rates.w23 / rates.gamma3 * r2;
    PopulationState::nondegenerate(1.0 - r2 - r3, r2, r3)
}

/// Coefficient (1 − e^{−x})/(1 + 2e^{−x}) multiplying κ′ in the high-pressure
/// probe population difference, x = ΔE/k_BT.
pub fn high_pressure_coefficient(x: f64) -> f64 {
    let e = (-x).exp();
    (1.0 - e) / (1.0 + 2.0 * e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighPressurePopulations {
    pub r1_minus_r3: f64,
    pub kappa_prime: f64,
    /// Individual levels in the same limit: r1 − r2 = 1/(1+κ′), r3 = e^{x} r2.
    pub populations: PopulationState,
}

/// High-pressure limit (w ≫ A, w32 = w23 e^{−x}, A31 ≈ A21).
pub fn populations_high_pressure(drive: &DriveField, gamma21: f64, a21: f64, x: f64) -> HighPressurePopulations {
    let e = (-x).exp();
    let kappa_prime =
        (1.0 + 2.0 * e) / (1.0 + e) * 2.0 * drive.g.powi(2) * gamma21 / (a21 * (gamma21.powi(2) + drive.delta.powi(2)));
    let r2 = kappa_prime / ((2.0 + x.exp()) * (1.0 + kappa_prime));
    let r1 = r2 + 1.0 / (1.0 + kappa_prime);
    HighPressurePopulations {
        r1_minus_r3: (1.0 - kappa_prime * high_pressure_coefficient(x)) / (1.0 + kappa_prime),
        kappa_prime,
        populations: PopulationState::nondegenerate(r1, r2, 1.0 - r1 - r2),
    }
}

/// Effective saturation for degenerate levels,
/// κ′ = κ[1 + (g2/g1)(1 + w23/Γ3)]/(1 − w32w23/Γ3Γ2).
///
/// Reduces to the non-degenerate κ′ when all g_i = 1.
pub fn degenerate_kappa_prime(kappa: f64, rates: &RateSet, deg: Degeneracies) -> Result<f64> {
    let gamma = deg.g2 as f64 / deg.g1 as f64;
    let a = rates.w23 / rates.gamma3;
    Ok(kappa * (1.0 + gamma * (1.0 + a)) / transfer_denominator(rates)?)
}

/// Degenerate-level populations from a direct solve of the balance equations
///
/// ```text
/// Γ2 R2 = κΓ2 (g2/g1 R1 − R2) + w32 R3
/// Γ3 R3 = w23 R2
/// R1 + R2 + R3 = 1
/// ```
pub fn populations_degenerate(kappa: f64, rates: &RateSet, deg: Degeneracies) -> Result<PopulationState> {
    let gamma = deg.g2 as f64 / deg.g1 as f64;
    let mut m = Matrix3::new(
        kappa * gamma,
        -(1.0 + kappa),
        rates.w32 / rates.gamma2,
        0.0,
        rates.w23 / rates.gamma3,
        -1.0,
        1.0,
        1.0,
        1.0,
    );
    // Row equilibration: the drive row grows like κ and would otherwise cost
    // log10(κ) digits. The right-hand side is zero in the rescaled rows.
    for i in 0..2 {
        let r = m.row(i).amax();
        if r > 0.0 {
            m.row_mut(i).scale_mut(1.0 / r);
        }
    }
    let lu = m.full_piv_lu();
    let u = lu.u();
    let scale = m.amax();
    let pivot = (0..3).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if pivot.is_nan() || pivot <= 1e-13 * scale {
        return Err(Error::SingularSystem { pivot });
    }
    let x = lu
        .solve(&Vector3::new(0.0, 0.0, 1.0))
        .ok_or(Error::SingularSystem { pivot })?;
    Ok(PopulationState {
        r1: x[0],
        r2: x[1],
        r3: x[2],
        degeneracies: deg,
    })
}

/// Degenerate-model populations for a given drive field.
pub fn populations_for_drive(drive: &DriveField, rates: &RateSet, deg: Degeneracies) -> Result<PopulationState> {
    populations_degenerate(saturation_kappa(drive, rates), rates, deg)
}

/// Degenerate-level populations from the closed-form solution in κ′.
pub fn populations_degenerate_closed_form(kappa: f64, rates: &RateSet, deg: Degeneracies) -> Result<PopulationState> {
    let kp = degenerate_kappa_prime(kappa, rates, deg)?;
    let gamma = deg.g2 as f64 / deg.g1 as f64;
    let a = rates.w23 / rates.gamma3;
    let b = 1.0 + gamma * (1.0 + a);
    let r2 = gamma / b * kp / (1.0 + kp);
    let r3 = a * r2;
    let r1 = (1.0 + kp / b) / (1.0 + kp);
    Ok(PopulationState {
        r1,
        r2,
        r3,
        degeneracies: deg,
    })
}

/// Closed-form per-sublevel differences (R1/g1 − R2/g2, R1/g1 − R3/g3).
pub fn degenerate_differences(kappa: f64, rates: &RateSet, deg: Degeneracies) -> Result<(f64, f64)> {
    let kp = degenerate_kappa_prime(kappa, rates, deg)?;
    let [g1, g2, g3] = deg.as_f64();
    let a = rates.w23 / rates.gamma3;
    let b = 1.0 + g2 / g1 * (1.0 + a);
    let d12 = 1.0 / (g1 * (1.0 + kp));
    let d13 = (1.0 + (1.0 - g2 * a / g3) * kp / b) / (g1 * (1.0 + kp));
    Ok((d12, d13))
}

/// Normalised susceptibility for explicit line populations (r1, r2, r3).
pub fn susceptibility_raw(delta_p: f64, drive: &DriveField, rates: &RateSet, line: [f64; 3]) -> Complex64 {
    let [r1, r2, r3] = line;
    let g2 = drive.g * drive.g;
    let raman = Complex64::new(rates.gamma32, -(delta_p - drive.delta));
    let probe = Complex64::new(rates.gamma31, -delta_p);
    let coherence = Complex64::new(rates.gamma21, drive.delta);
    let num = raman * (r1 - r3) - g2 * (r1 - r2) / coherence;
    let den = raman * probe + g2;
    Complex64::i() * rates.gamma31 * num / den
}

pub fn susceptibility(delta_p: f64, drive: &DriveField, rates: &RateSet, pops: &PopulationState) -> Complex64 {
    susceptibility_raw(delta_p, drive, rates, pops.probe_populations())
}

/// Line shape with the interference (r21) term removed: saturation and level
/// splitting only.
pub fn susceptibility_without_interference(
    delta_p: f64,
    drive: &DriveField,
    rates: &RateSet,
    pops: &PopulationState,
) -> Complex64 {
    let [r1, _, r3] = pops.probe_populations();
    let g2 = drive.g * drive.g;
    let raman = Complex64::new(rates.gamma32, -(delta_p - drive.delta));
    let probe = Complex64::new(rates.gamma31, -delta_p);
    Complex64::i() * rates.gamma31 * raman * (r1 - r3) / (raman * probe + g2)
}

/// Line-centre value f(0) = [(r1−r3) − (r1−r2)S]/(1+S) at δ = δp = 0, with a
/// single S in numerator and denominator (exact when Γ21 = Γ31).
pub fn resonant_f(s: f64, pops: &PopulationState) -> f64 {
    let [r1, r2, r3] = pops.probe_populations();
    ((r1 - r3) - (r1 - r2) * s) / (1.0 + s)
}

/// Exact line-centre value: the numerator carries S = |g|²/Γ21Γ32, the
/// denominator |g|²/Γ31Γ32.
pub fn resonant_f_exact(g: f64, rates: &RateSet, pops: &PopulationState) -> f64 {
    let [r1, r2, r3] = pops.probe_populations();
    let s = rates.raman_saturation(g);
    let s_probe = g * g / (rates.gamma31 * rates.gamma32);
    ((r1 - r3) - (r1 - r2) * s) / (1.0 + s_probe)
}

/// Gain at line centre: (r1 − r2) S > r1 − r3.
pub fn awi_predicate(s: f64, pops: &PopulationState) -> bool {
    let snap = |d: f64| if d.abs() < ZERO_DIFFERENCE { 0.0 } else { d };
    let d12 = snap(pops.diff_12());
    let d13 = snap(pops.diff_13());
    d12 * s > d13
}

/// Integration settings for the line-area check.
#[derive(Debug, Clone, Copy)]
pub struct SumRuleConfig {
    /// Half-range in units of max(Γ31, Γ32, |g|, |δ|); at least 50.
    pub half_range: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for SumRuleConfig {
    fn default() -> Self {
        SumRuleConfig {
            half_range: 50.0,
            rel_tol: 1e-10,
            max_panels: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SumRuleReport {
    /// ∫ Im f dδp including the fitted tails.
    pub absorption_area: f64,
    /// ∫ Re f dδp over the symmetric window (no tail).
    pub dispersion_area: f64,
    /// πΓ31(r1 − r3).
    pub expected: f64,
    pub residual: f64,
}

/// Tail integral ∫_L^∞ of C/x² + D/x³ + E/x⁴ fitted through x = L, L/2, L/4.
fn tail_area(values: [f64; 3], l: f64) -> f64 {
    // Unknowns (C, D, E) scaled as (C/L², D/L³, E/L⁴) so the system is O(1).
    let xs: [f64; 3] = [1.0, 0.5, 0.25];
    let m = Matrix3::from_fn(|i, j| (1.0 / xs[i]).powi(j as i32 + 2));
    let c = m
        .lu()
        .solve(&Vector3::from(values))
        .expect("tail fit matrix is regular");
    l * (c[0] + c[1] / 2.0 + c[2] / 3.0)
}

/// Relative residual of ∫ Im f dδp = πΓ31(r1 − r3).
pub fn sum_rule_residual(
    drive: &DriveField,
    rates: &RateSet,
    pops: &PopulationState,
    cfg: &SumRuleConfig,
) -> Result<SumRuleReport> {
    if cfg.half_range < 50.0 {
        return Err(Error::config("half_range", "must be at least 50 line widths"));
    }
    let scale = rates.gamma31.max(rates.gamma32).max(drive.g).max(drive.delta.abs());
    let l = cfg.half_range * scale;
    let f = |x: f64| susceptibility(x, drive, rates, pops);

    // Break points at the features of the line: centre, the two-photon
    // resonance and the dressed-state splitting.
    let w = rates.gamma31.min(rates.gamma32);
    let mut breaks = vec![-l, l];
    for c in [
        0.0,
        drive.delta,
        drive.g,
        -drive.g,
        drive.delta + drive.g,
        drive.delta - drive.g,
    ] {
        for k in [-4.0, -1.0, 0.0, 1.0, 4.0] {
            let x = c + k * w;
            if x > -l && x < l {
                breaks.push(x);
            }
        }
    }
    let mut x = 10.0 * w;
    while x < l {
        breaks.push(x);
        breaks.push(-x);
        x *= 2.0;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * l);

    let [r1, _, r3] = pops.probe_populations();
    let expected = std::f64::consts::PI * rates.gamma31 * (r1 - r3);
    let abs_tol = 1e-12 * std::f64::consts::PI * rates.gamma31;
    let window = quad::integrate(f, &breaks, abs_tol, cfg.rel_tol, cfg.max_panels)?;

    let right = tail_area([l, 0.5 * l, 0.25 * l].map(|x| f(x).im), l);
    let left = tail_area([-l, -0.5 * l, -0.25 * l].map(|x| f(x).im), l);
    let absorption_area = window.value.im + right + left;
    let norm = std::f64::consts::PI * rates.gamma31 * (r1 - r3).abs().max(1e-6);
    Ok(SumRuleReport {
        absorption_area,
        dispersion_area: window.value.re,
        expected,
        residual: (absorption_area - expected).abs() / norm,
    })
}

/// Evaluate the line shape on a grid of probe detunings (s⁻¹).
pub fn spectrum_scan(grid: &[f64], drive: &DriveField, rates: &RateSet, pops: &PopulationState) -> Vec<SpectrumSample> {
    grid.par_iter()
        .map(|&delta_p| SpectrumSample {
            delta_p,
            f: susceptibility(delta_p, drive, rates, pops),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{build_rate_set, kappa_prime};
    use crate::species::SpeciesCatalog;
    use approx::assert_relative_eq;

    fn na_rates(p: f64) -> RateSet {
        let cat = SpeciesCatalog::builtin();
        build_rate_set(cat.atom("Na").unwrap(), &cat.bath("He", p, 550.0).unwrap())
    }

    #[test]
    fn undriven_is_ground() {
        let r = na_rates(100.0);
        let p = populations_nondegenerate(0.0, &r);
        assert_eq!((p.r1, p.r2, p.r3), (1.0, 0.0, 0.0));
        let d = populations_degenerate(0.0, &r, Degeneracies::ALKALI).unwrap();
        assert!((d.r1 - 1.0).abs() < 1e-15 && d.r2.abs() < 1e-15 && d.r3.abs() < 1e-15);
    }

    #[test]
    fn nondegenerate_matches_printed_forms() {
        let r = na_rates(300.0);
        for kp in [0.01, 0.5, 3.0, 70.0, 1e4] {
            let p = populations_nondegenerate(kp, &r);
            assert_relative_eq!(p.r1 - p.r2, 1.0 / (1.0 + kp), max_relative = 1e-12);
            let r1 = (1.0 + r.gamma3 * kp / (2.0 * r.gamma3 + r.w23)) / (1.0 + kp);
            assert_relative_eq!(p.r1, r1, max_relative = 1e-12);
            let d13 = (1.0 + (r.gamma3 - r.w23) / (2.0 * r.gamma3 + r.w23) * kp) / (1.0 + kp);
            assert!((p.r1 - p.r3 - d13).abs() < 1e-12);
            assert!((p.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nondegenerate_probe_difference_root() {
        // w ≫ A with Boltzmann ratio: r1 − r3 = 0 at κ′ = (1+2e^{−x})/(1−e^{−x}).
        let x: f64 = 0.043;
        let w = 1e10;
        let r = RateSet::from_parts(1.0, 1.0, w, w * (-x).exp(), 1e10, 1e10, 1e10).unwrap();
        let root = (1.0 + 2.0 * (-x).exp()) / (1.0 - (-x).exp());
        assert!((root - 69.0).abs() < 1.0, "{root}");
        let below = populations_nondegenerate(root * 0.99, &r);
        let above = populations_nondegenerate(root * 1.01, &r);
        assert!(below.r1 > below.r3 && above.r1 < above.r3);
    }

    #[test]
    fn high_pressure_examples() {
        let drive = DriveField::resonant(0.0);
        let hp = populations_high_pressure(&drive, 1e10, 6e7, 0.043);
        assert_eq!(hp.r1_minus_r3, 1.0);
        let c = high_pressure_coefficient(4.3e-2);
        assert!((c / 1.3e-2 - 1.0).abs() < 0.15, "{c}");
        // x → ∞: bracket coefficient → 1.
        let drive = DriveField::resonant(1e9);
        let hp = populations_high_pressure(&drive, 1e10, 6e7, 800.0);
        let k = hp.kappa_prime;
        assert_relative_eq!(hp.r1_minus_r3, (1.0 - k) / (1.0 + k), max_relative = 1e-12);
        let hp = populations_high_pressure(&drive, 1e10, 6e7, 0.043);
        let p = hp.populations;
        assert!((p.r1 - p.r3 - hp.r1_minus_r3).abs() < 1e-14);
        assert!((p.r3 / p.r2 - 0.043f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_reduces_to_nondegenerate() {
        let r = na_rates(200.0);
        for kappa in [0.0, 0.1, 1.0, 30.0] {
            let kp = kappa_prime(kappa, &r).unwrap();
            assert_relative_eq!(
                degenerate_kappa_prime(kappa, &r, Degeneracies::NONE).unwrap(),
                kp,
                max_relative = 1e-14
            );
            let a = populations_nondegenerate(kp, &r);
            let b = populations_degenerate(kappa, &r, Degeneracies::NONE).unwrap();
            for (x, y) in [(a.r1, b.r1), (a.r2, b.r2), (a.r3, b.r3)] {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn degenerate_sublevel_identity() {
        let r = na_rates(40.0);
        let deg = Degeneracies::ALKALI;
        for kappa in [0.05, 0.7, 12.0] {
            let p = populations_degenerate(kappa, &r, deg).unwrap();
            let kp = degenerate_kappa_prime(kappa, &r, deg).unwrap();
            assert_relative_eq!(p.diff_12(), 0.5 / (1.0 + kp), max_relative = 1e-12);
            let (d12, d13) = degenerate_differences(kappa, &r, deg).unwrap();
            assert_relative_eq!(p.diff_12(), d12, max_relative = 1e-12);
            assert!((p.diff_13() - d13).abs() < 1e-12);
        }
    }

    #[test]
    fn lorentzian_limit() {
        let r = na_rates(50.0);
        let drive = DriveField::resonant(0.0);
        let p = PopulationState::ground();
        assert_relative_eq!(susceptibility(0.0, &drive, &r, &p).im, 1.0, max_relative = 1e-14);
        for s in [-1.0, 1.0] {
            let f = susceptibility(s * r.gamma31, &drive, &r, &p);
            assert_relative_eq!(f.im, 0.5, max_relative = 1e-14);
        }
        let dp = 0.37 * r.gamma31;
        let f = susceptibility(dp, &drive, &r, &p);
        let l = Complex64::i() * r.gamma31 / Complex64::new(r.gamma31, -dp);
        assert!((f - l).norm() < 1e-14);
    }

    #[test]
    fn line_centre_matches_resonant_formula() {
        let r = na_rates(80.0);
        let pops = PopulationState::nondegenerate(0.5, 0.3, 0.2);
        for g in [1e8, 1e9, 5e9] {
            let drive = DriveField::resonant(g);
            let f = susceptibility(0.0, &drive, &r, &pops);
            assert_relative_eq!(f.im, resonant_f_exact(g, &r, &pops), max_relative = 1e-12);
            let equal = RateSet {
                gamma31: r.gamma21,
                ..r
            };
            let f = susceptibility(0.0, &drive, &equal, &pops);
            let s = equal.raman_saturation(g);
            assert_relative_eq!(f.im, resonant_f(s, &pops), max_relative = 1e-12);
            assert!(f.re.abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_f_examples() {
        let p = PopulationState::nondegenerate(0.5, 0.3, 0.4);
        assert_relative_eq!(resonant_f(0.0, &p), 0.1, max_relative = 1e-14);
        let q = PopulationState::nondegenerate(0.5, 0.3, 0.4);
        assert_relative_eq!(resonant_f(1.0, &q), (0.1 - 0.2) / 2.0, max_relative = 1e-12);
        let z = PopulationState::nondegenerate(0.4, 0.2, 0.4);
        assert!(resonant_f(3.0, &z) <= 0.0);
    }

    #[test]
    fn predicate_examples() {
        let p = PopulationState::nondegenerate(0.5, 0.3, 0.4);
        assert!(!awi_predicate(0.0, &p));
        assert!(awi_predicate(1.0, &p));
        // Equal populations on the probe line: no gain at S = 0.
        let q = PopulationState::nondegenerate(0.4, 0.2, 0.4 + 1e-12);
        assert!(!awi_predicate(0.0, &q));
    }

    #[test]
    fn lorentzian_sum_rule() {
        let r = na_rates(20.0);
        let rep = sum_rule_residual(
            &DriveField::resonant(0.0),
            &r,
            &PopulationState::ground(),
            &SumRuleConfig::default(),
        )
        .unwrap();
        assert!(rep.residual < 1e-6, "{rep:?}");
    }

    #[test]
    fn strong_drive_sum_rule() {
        let r = na_rates(100.0);
        let g = (10.0 * r.gamma21 * r.gamma32).sqrt();
        let drive = DriveField::resonant(g);
        let kp = kappa_prime(saturation_kappa(&drive, &r), &r).unwrap();
        let pops = populations_nondegenerate(kp, &r);
        let rep = sum_rule_residual(&drive, &r, &pops, &SumRuleConfig::default()).unwrap();
        assert!(rep.residual < 1e-2, "{rep:?}");
        assert!(rep.dispersion_area.abs() < 0.01 * std::f64::consts::PI * r.gamma31);
    }

    #[test]
    fn short_window_is_rejected() {
        let cfg = SumRuleConfig {
            half_range: 10.0,
            ..Default::default()
        };
        let r = na_rates(20.0);
        let err = sum_rule_residual(&DriveField::resonant(0.0), &r, &PopulationState::ground(), &cfg);
        assert!(matches!(err, Err(Error::Config { .. })));
    }

    #[test]
    fn scan_shape() {
        let r = na_rates(20.0);
        let drive = DriveField::resonant(1e9);
        assert!(spectrum_scan(&[], &drive, &r, &PopulationState::ground()).is_empty());
        let grid: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.2 * r.gamma31).collect();
        let pops = PopulationState::nondegenerate(0.6, 0.3, 0.1);
        let a = spectrum_scan(&grid, &drive, &r, &pops);
        let b = spectrum_scan(&grid, &drive, &r, &pops);
        assert_eq!(a, b);
        for (s, &x) in a.iter().zip(&grid) {
            assert_eq!(s.delta_p, x);
        }
    }

    #[test]
    fn symmetric_at_resonant_drive() {
        let r = na_rates(60.0);
        let drive = DriveField::resonant(2e9);
        let pops = PopulationState::nondegenerate(0.45, 0.35, 0.2);
        for i in 1..40 {
            let x = i as f64 * 0.3 * r.gamma31;
            let a = susceptibility_without_interference(x, &drive, &r, &pops).im;
            let b = susceptibility_without_interference(-x, &drive, &r, &pops).im;
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    proptest::proptest! {
        #[test]
        fn populations_close_and_saturate(kappa in 0.0f64..1e4, p in 0.0f64..3000.0) {
            let r = na_rates(p);
            let deg = Degeneracies::ALKALI;
            let pops = populations_degenerate(kappa, &r, deg).unwrap();
            proptest::prop_assert!((pops.total() - 1.0).abs() < 1e-12);
            for x in [pops.r1, pops.r2, pops.r3] {
                proptest::prop_assert!((-1e-15..=1.0 + 1e-15).contains(&x));
            }
            proptest::prop_assert!(pops.diff_12() > 0.0);
            let more = populations_degenerate(kappa * 1.5 + 1e-3, &r, deg).unwrap();
            proptest::prop_assert!(more.diff_12() < pops.diff_12());

            let kp = kappa_prime(kappa, &r).unwrap();
            let nd = populations_nondegenerate(kp, &r);
            proptest::prop_assert!((nd.total() - 1.0).abs() < 1e-12);
            proptest::prop_assert!(nd.r1 - nd.r2 >= 0.0);
        }

        #[test]
        fn closed_form_matches_linear_solve(kappa in 0.0f64..1e5, p in 0.0f64..3000.0) {
            let r = na_rates(p);
            let deg = Degeneracies::ALKALI;
            let a = populations_degenerate(kappa, &r, deg).unwrap();
            let b = populations_degenerate_closed_form(kappa, &r, deg).unwrap();
            for (x, y) in [(a.r1, b.r1), (a.r2, b.r2), (a.r3, b.r3)] {
                proptest::prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300) + 1e-15);
            }
        }
    }
}
