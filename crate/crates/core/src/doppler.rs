//! Maxwell–Boltzmann velocity averaging of the probe line shape.
//!
//! Velocity classes are labelled by the drive Doppler shift s = k·v, whose
//! distribution is Gaussian with half-width at half-maximum `halfwidth`. A
//! class sees the drive at δ − s and the probe at δp − (k_p/k)s (copropagating
//! beams), and its populations are solved for its own detuning.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::BOLTZMANN;
use crate::rates::{DriveField, RateSet};
use crate::species::AtomSystem;
use crate::steady::{PopulationState, SpectrumSample, populations_for_drive, susceptibility};
use crate::{Error, Result};

/// Quadrature rule over the velocity distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityRule {
    #[default]
    GaussHermite,
    /// Equally spaced nodes on ±6 standard widths of the Gaussian.
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerConfig {
    /// Δω_D/2 of the drive line (s⁻¹, HWHM).
    pub halfwidth: f64,
    pub n_nodes: usize,
    /// Probe and drive travel the same way.
    pub copropagating: bool,
    /// k_p/k.
    pub k_ratio: f64,
    pub rule: VelocityRule,
}

pub const DEFAULT_NODES: usize = 64;

impl DopplerConfig {
    /// Copropagating beams at temperature `t` with the default node count.
    pub fn thermal(atom: &AtomSystem, t: f64) -> Self {
        DopplerConfig {
            halfwidth: doppler_halfwidth(atom, t, atom.lambda_drive),
            n_nodes: DEFAULT_NODES,
            copropagating: true,
            k_ratio: atom.k_ratio(),
            rule: VelocityRule::GaussHermite,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.halfwidth.is_finite() && self.halfwidth >= 0.0) {
            return Err(Error::config("halfwidth", "must be finite and >= 0"));
        }
        if self.n_nodes < 8 {
            return Err(Error::config("nodes", "at least 8 velocity nodes are required"));
        }
        if !(self.k_ratio.is_finite() && self.k_ratio > 0.0) {
            return Err(Error::config("k_ratio", "must be > 0"));
        }
        Ok(())
    }

    /// Probe-side shift per unit drive shift, signed by the geometry.
    fn probe_factor(&self) -> f64 {
        if self.copropagating {
            self.k_ratio
        } else {
            -self.k_ratio
        }
    }
}

/// Doppler HWHM (2π/λ) sqrt(2 ln2 k_B T/m), in s⁻¹.
pub fn doppler_halfwidth(atom: &AtomSystem, temperature: f64, lambda: f64) -> f64 {
    2.0 * PI / lambda * (2.0 * LN_2 * BOLTZMANN * temperature / atom.mass).sqrt()
}

/// Nodes and weights for ∫ e^{−x²} f(x) dx / √π, weights summing to one.
///
/// Golub–Welsch: the nodes are the eigenvalues of the Jacobi matrix of the
/// Hermite recurrence and each weight is the squared first component of its
/// eigenvector. Only those components are tracked, so the cost is O(n²).
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 2000 {
        return Err(Error::config("nodes", "Gauss-Hermite supports 1..=2000 nodes"));
    }
    let mut d = vec![0.0; n];
    let mut e: Vec<f64> = (1..=n)
        .map(|i| if i < n { (i as f64 / 2.0).sqrt() } else { 0.0 })
        .collect();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrise: the rule is exactly even.
    for k in 0..n / 2 {
        let (lo, hi) = (pairs[k], pairs[n - 1 - k]);
        let x = 0.5 * (hi.0 - lo.0);
        let w = 0.5 * (hi.1 + lo.1);
        pairs[k] = (-x, w);
        pairs[n - 1 - k] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(pairs.into_iter().map(|(x, w)| (x, w / total)).unzip())
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix
/// (diagonal `d`, off-diagonal `e[i]` between rows i and i+1). On return `d`
/// holds the eigenvalues and `z` the first row of the eigenvector matrix.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence(format!("tridiagonal QL stalled at row {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zi1 = z[i + 1];
                z[i + 1] = s * z[i] + c * zi1;
                z[i] = c * z[i] - s * zi1;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Equally spaced nodes on [−6, 6] for the same weight function.
pub fn trapezoid_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 12.0 / (n - 1) as f64;
    let x: Vec<f64> = (0..n).map(|i| -6.0 + i as f64 * h).collect();
    let mut w: Vec<f64> = x.iter().map(|v| (-v * v).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    (x, w)
}

/// Velocity classes as drive shifts s (s⁻¹) with normalised weights.
pub fn velocity_nodes(config: &DopplerConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    config.validate()?;
    let (x, w) = match config.rule {
        VelocityRule::GaussHermite => gauss_hermite(config.n_nodes)?,
        VelocityRule::Trapezoid => trapezoid_nodes(config.n_nodes),
    };
    let scale = config.halfwidth / LN_2.sqrt();
    Ok((x.iter().map(|v| v * scale).collect(), w))
}

/// Weighted sum Σ w_j f(s_j), accumulated in node order.
pub fn average_over<F: Fn(f64) -> Complex64>(shifts: &[f64], weights: &[f64], f: F) -> Complex64 {
    shifts
        .iter()
        .zip(weights)
        .fold(Complex64::new(0.0, 0.0), |acc, (&s, &w)| acc + w * f(s))
}

/// Largest probe-frequency gap between neighbouring velocity nodes within
/// three Doppler widths of line centre.
pub fn max_node_spacing(config: &DopplerConfig) -> Result<f64> {
    let (shifts, _) = velocity_nodes(config)?;
    Ok(spacing_of(&shifts, config))
}

fn spacing_of(shifts: &[f64], config: &DopplerConfig) -> f64 {
    let core = 3.0 * config.halfwidth / LN_2.sqrt();
    shifts
        .windows(2)
        .filter(|p| p[0].abs() <= core && p[1].abs() <= core)
        .map(|p| (p[1] - p[0]) * config.k_ratio)
        .fold(0.0, f64::max)
}

/// Velocity-averaged line shape on `grid`, normalised so that the averaged
/// undriven absorption at δp = 0 equals one.
pub fn velocity_average(
    grid: &[f64],
    drive: &DriveField,
    rates: &RateSet,
    atom: &AtomSystem,
    config: &DopplerConfig,
) -> Result<Vec<SpectrumSample>> {
    let (shifts, weights) = velocity_nodes(config)?;
    let spacing = spacing_of(&shifts, config);
    if spacing > rates.gamma31 {
        return Err(Error::QuadratureDegeneracy {
            spacing,
            width: rates.gamma31,
        });
    }
    let kp = config.probe_factor();

    let classes: Vec<(DriveField, PopulationState)> = shifts
        .par_iter()
        .map(|&s| {
            let d = DriveField::new(drive.g, drive.delta - s);
            populations_for_drive(&d, rates, atom.degeneracies).map(|p| (d, p))
        })
        .collect::<Result<_>>()?;

    let dark = DriveField::resonant(0.0);
    let ground = PopulationState::ground();
    let reference = average_over(&shifts, &weights, |s| susceptibility(-kp * s, &dark, rates, &ground)).im;

    Ok(grid
        .par_iter()
        .map(|&delta_p| {
            let f = shifts
                .iter()
                .zip(&weights)
                .zip(&classes)
                .fold(Complex64::new(0.0, 0.0), |acc, ((&s, &w), (d, p))| {
                    acc + w * susceptibility(delta_p - kp * s, d, rates, p)
                });
            SpectrumSample {
                delta_p,
                f: f / reference,
            }
        })
        .collect())
}
