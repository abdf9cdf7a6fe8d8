//! Relaxation, transfer and dephasing rates derived from the buffer-gas
//! conditions, and the dimensionless saturation parameters of the drive.
//!
//! Collision helpers work in cgs (cm⁻³, cm/s, cm²) since that is how the
//! cross-section data are quoted; every rate leaves this module in s⁻¹.

use std::f64::consts::PI;

use crate::constants::{BOLTZMANN, HBAR, PLANCK, SPEED_OF_LIGHT, TORR};
use crate::species::{AtomSystem, BathConditions};
use crate::{Error, Result};

/// Strong field on the |1>-|2> transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveField {
    /// Rabi frequency |g| = |μ₂₁E₀|/2ħ (s⁻¹).
    pub g: f64,
    /// Detuning ω − ω₂₁ (s⁻¹).
    pub delta: f64,
}

impl DriveField {
    pub fn new(g: f64, delta: f64) -> Self {
        DriveField { g: g.abs(), delta }
    }

    pub fn resonant(g: f64) -> Self {
        Self::new(g, 0.0)
    }

    pub fn from_kappa0(kappa0: f64, a21: f64, delta: f64) -> Self {
        Self::new(rabi_from_kappa0(kappa0, a21), delta)
    }
}

/// All population and coherence decay rates, in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma21: f64,
    pub gamma31: f64,
    pub gamma32: f64,
    pub w23: f64,
    pub w32: f64,
    pub a21: f64,
    pub a31: f64,
}

impl RateSet {
    /// Assemble a rate set from its independent parts; Γ₂ and Γ₃ follow from
    /// the spontaneous and transfer rates.
    pub fn from_parts(
        a21: f64,
        a31: f64,
        w23: f64,
        w32: f64,
        gamma21: f64,
        gamma31: f64,
        gamma32: f64,
    ) -> Result<Self> {
        for (field, v) in [("A21", a21), ("A31", a31), ("w23", w23), ("w32", w32)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invariant(field, format!("must be >= 0, got {v}")));
            }
        }
        for (field, v) in [("Gamma21", gamma21), ("Gamma31", gamma31), ("Gamma32", gamma32)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invariant(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(RateSet {
            gamma2: a21 + w23,
            gamma3: a31 + w32,
            gamma21,
            gamma31,
            gamma32,
            w23,
            w32,
            a21,
            a31,
        })
    }

    /// Raman saturation parameter S = |g|²/(Γ₂₁Γ₃₂).
    pub fn raman_saturation(&self, g: f64) -> f64 {
        g * g / (self.gamma21 * self.gamma32)
    }
}

/// Buffer-gas number density P/(k_B T) in cm⁻³.
pub fn number_density(bath: &BathConditions) -> f64 {
    bath.pressure * TORR / (BOLTZMANN * bath.temperature) * 1e-6
}

/// Maxwell mean relative speed sqrt(8 k_B T / (π μ)) in cm/s.
pub fn mean_relative_speed(m_a: f64, m_b: f64, temperature: f64) -> f64 {
    let mu = m_a * m_b / (m_a + m_b);
    (8.0 * BOLTZMANN * temperature / (PI * mu)).sqrt() * 100.0
}

/// Fine-structure transfer rates (w₂₃, w₃₂) = N v̄ (σ₂₃, σ₃₂).
pub fn transfer_rates(density: f64, vbar: f64, atom: &AtomSystem) -> (f64, f64) {
    let flux = density * vbar;
    (flux * atom.sigma_23 * 1e4, flux * atom.sigma_32 * 1e4)
}

pub fn build_rate_set(atom: &AtomSystem, bath: &BathConditions) -> RateSet {
    build_rate_set_with(atom, bath, 0.0)
}

/// Rate set with an extra pure dephasing of the |2>-|3> coherence,
/// `chi_raman * N v̄ (σ_b21 + σ_b31)/2`, on top of (Γ₂ + Γ₃)/2.
pub fn build_rate_set_with(atom: &AtomSystem, bath: &BathConditions, chi_raman: f64) -> RateSet {
    let n = number_density(bath);
    let v = mean_relative_speed(atom.mass, bath.buffer_mass, bath.temperature);
    let (w23, w32) = transfer_rates(n, v, atom);
    let flux = n * v * 1e4;
    let gamma2 = atom.a21 + w23;
    let gamma3 = atom.a31 + w32;
    RateSet {
        gamma2,
        gamma3,
        gamma21: 0.5 * gamma2 + flux * atom.sigma_b21,
        gamma31: 0.5 * gamma3 + flux * atom.sigma_b31,
        gamma32: 0.5 * (gamma2 + gamma3) + chi_raman.max(0.0) * flux * 0.5 * (atom.sigma_b21 + atom.sigma_b31),
        w23,
        w32,
        a21: atom.a21,
        a31: atom.a31,
    }
}

/// κ = 2Γ₂₁|g|²/(Γ₂(Γ₂₁² + δ²)).
pub fn saturation_kappa(drive: &DriveField, rates: &RateSet) -> f64 {
    let g2 = drive.g * drive.g;
    2.0 * rates.gamma21 * g2 / (rates.gamma2 * (rates.gamma21.powi(2) + drive.delta.powi(2)))
}

/// Non-degenerate effective saturation κ′ = κ(2 + w₂₃/Γ₃)/(1 − w₃₂w₂₃/Γ₃Γ₂).
pub fn kappa_prime(kappa: f64, rates: &RateSet) -> Result<f64> {
    let denom = transfer_denominator(rates)?;
    Ok(kappa * (2.0 + rates.w23 / rates.gamma3) / denom)
}

/// 1 − w₃₂w₂₃/(Γ₃Γ₂), the share of |2> decay that does not come back.
pub(crate) fn transfer_denominator(rates: &RateSet) -> Result<f64> {
    let d = 1.0 - rates.w32 * rates.w23 / (rates.gamma3 * rates.gamma2);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::DegenerateDenominator { value: d })
    }
}

/// κ₀ = 4|g|²/A₂₁².
pub fn kappa0_collisionless(g: f64, a21: f64) -> f64 {
    4.0 * g * g / (a21 * a21)
}

pub fn rabi_from_kappa0(kappa0: f64, a21: f64) -> f64 {
    0.5 * a21 * kappa0.max(0.0).sqrt()
}

/// Two-level saturation intensity π h c A₂₁/(3λ³) of the drive line (W/m²).
pub fn saturation_intensity(atom: &AtomSystem) -> f64 {
    PI * PLANCK * SPEED_OF_LIGHT * atom.a21 / (3.0 * atom.lambda_drive.powi(3))
}

/// Drive Rabi frequency |g| (s⁻¹) for an intensity in W/cm²:
/// |g| = (A₂₁/2) sqrt(I/(2 I_sat)).
pub fn rabi_from_intensity(intensity: f64, atom: &AtomSystem) -> f64 {
    let i_si = intensity.max(0.0) * 1e4;
    0.5 * atom.a21 * (i_si / (2.0 * saturation_intensity(atom))).sqrt()
}

/// Transition dipole |μ₂₁| implied by A₂₁ (C·m); used for audit output.
pub fn drive_dipole(atom: &AtomSystem) -> f64 {
    let eps0 = 8.854_187_812_8e-12;
    let omega = 2.0 * PI * SPEED_OF_LIGHT / atom.lambda_drive;
    (3.0 * PI * eps0 * HBAR * SPEED_OF_LIGHT.powi(3) * atom.a21 / omega.powi(3)).sqrt()
}

/// Transfer-rate ratio against the Boltzmann expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetailedBalance {
    /// w₃₂/w₂₃ from the cross-sections.
    pub rate_ratio: f64,
    /// (g₂/g₃) exp(−ΔE/k_BT).
    pub boltzmann_ratio: f64,
}

impl DetailedBalance {
    pub fn relative_mismatch(&self) -> f64 {
        (self.rate_ratio / self.boltzmann_ratio - 1.0).abs()
    }
}

pub fn detailed_balance(atom: &AtomSystem, temperature: f64) -> DetailedBalance {
    let d = atom.degeneracies;
    DetailedBalance {
        rate_ratio: atom.sigma_32 / atom.sigma_23,
        boltzmann_ratio: d.g2 as f64 / d.g3 as f64 * (-atom.boltzmann_exponent(temperature)).exp(),
    }
}
