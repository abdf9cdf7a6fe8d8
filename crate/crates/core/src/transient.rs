//! Time-domain integration of the non-degenerate density-matrix equations,
//! used as an independent check of the closed-form steady states and of the
//! linear-probe line shape.
//!
//! Rotating frame, real Rabi frequencies g (drive, |1>-|2>) and g_p (probe,
//! |1>-|3>):
//!
//! ```text
//! dr31/dt = i g_p (r1 − r3) − (Γ31 − iδp) r31 − i g r32
//! dr32/dt = −(Γ32 − i(δp − δ)) r32 − i g r31 + i g_p r21*
//! dr21/dt = i g (r1 − r2) − (Γ21 − iδ) r21 − i g_p r32*
//! dr2/dt  = 2g Im r21 − Γ2 r2 + w32 r3
//! dr3/dt  = 2g_p Im r31 − Γ3 r3 + w23 r2
//! dr1/dt  = −2g Im r21 − 2g_p Im r31 + A21 r2 + A31 r3
//! ```
//!
//! In steady state r21 = ig(r1−r2)/(Γ21−iδ) and Γ31 r31/g_p reproduces the
//! susceptibility of [`crate::steady`] to first order in g_p.

use num_complex::Complex64;

use crate::rates::{DriveField, RateSet};
use crate::{Error, Result};

/// Coherences and excited-state populations; r1 follows from r1+r2+r3 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState {
    pub r31: Complex64,
    pub r32: Complex64,
    pub r21: Complex64,
    pub r2: f64,
    pub r3: f64,
}

impl DensityState {
    pub fn ground() -> Self {
        DensityState {
            r31: Complex64::new(0.0, 0.0),
            r32: Complex64::new(0.0, 0.0),
            r21: Complex64::new(0.0, 0.0),
            r2: 0.0,
            r3: 0.0,
        }
    }

    /// Equal populations, no coherence.
    pub fn uniform() -> Self {
        DensityState {
            r2: 1.0 / 3.0,
            r3: 1.0 / 3.0,
            ..Self::ground()
        }
    }

    pub fn r1(&self) -> f64 {
        1.0 - self.r2 - self.r3
    }

    /// Largest excess of |r_ij|² over r_i r_j (≤ 0 for a physical state).
    pub fn coherence_excess(&self) -> f64 {
        let r1 = self.r1();
        [
            self.r31.norm_sqr() - self.r3 * r1,
            self.r32.norm_sqr() - self.r3 * self.r2,
            self.r21.norm_sqr() - self.r2 * r1,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }

    fn to_array(self) -> [f64; 8] {
        [
            self.r31.re,
            self.r31.im,
            self.r32.re,
            self.r32.im,
            self.r21.re,
            self.r21.im,
            self.r2,
            self.r3,
        ]
    }

    fn from_array(y: &[f64; 8]) -> Self {
        DensityState {
            r31: Complex64::new(y[0], y[1]),
            r32: Complex64::new(y[2], y[3]),
            r21: Complex64::new(y[4], y[5]),
            r2: y[6],
            r3: y[7],
        }
    }
}

/// Everything the right-hand side needs besides the state.
#[derive(Debug, Clone, Copy)]
pub struct TransientParams {
    pub g_probe: f64,
    pub drive: DriveField,
    pub delta_p: f64,
    pub rates: RateSet,
}

/// Time derivative of the state.
pub fn rhs(s: &DensityState, p: &TransientParams) -> DensityState {
    let i = Complex64::i();
    let (g, gp) = (p.drive.g, p.g_probe);
    let r = &p.rates;
    let r1 = s.r1();
    let d_r31 = i * gp * (r1 - s.r3) - Complex64::new(r.gamma31, -p.delta_p) * s.r31 - i * g * s.r32;
    let d_r32 =
        -Complex64::new(r.gamma32, -(p.delta_p - p.drive.delta)) * s.r32 - i * g * s.r31 + i * gp * s.r21.conj();
    let d_r21 = i * g * (r1 - s.r2) - Complex64::new(r.gamma21, -p.drive.delta) * s.r21 - i * gp * s.r32.conj();
    DensityState {
        r31: d_r31,
        r32: d_r32,
        r21: d_r21,
        r2: 2.0 * g * s.r21.im - r.gamma2 * s.r2 + r.w32 * s.r3,
        r3: 2.0 * gp * s.r31.im - r.gamma3 * s.r3 + r.w23 * s.r2,
    }
}

/// dr1/dt written out from its own equation rather than by closure.
pub fn ground_rate(s: &DensityState, p: &TransientParams) -> f64 {
    -2.0 * p.drive.g * s.r21.im - 2.0 * p.g_probe * s.r31.im + p.rates.a21 * s.r2 + p.rates.a31 * s.r3
}

/// d(r1 + r2 + r3)/dt relative to the size of the individual terms.
pub fn trace_drift(s: &DensityState, p: &TransientParams) -> f64 {
    let d = rhs(s, p);
    let d1 = ground_rate(s, p);
    let scale = d1.abs().max(d.r2.abs()).max(d.r3.abs()).max(f64::MIN_POSITIVE);
    (d1 + d.r2 + d.r3).abs() / scale
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    /// Convergence: relative change per characteristic time below this.
    pub tol: f64,
    /// Local error tolerance of each step.
    pub step_tol: f64,
    /// Minimum integration time in units of 1/min(A21, A31).
    pub horizon: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            tol: 1e-11,
            step_tol: 1e-12,
            horizon: 50.0,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub time: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Relative change over the last characteristic time.
    pub last_change: f64,
    /// Worst population excursion outside [0, 1] seen on accepted steps.
    pub population_excursion: f64,
    /// Worst |r_ij|² − r_i r_j seen on accepted steps.
    pub coherence_excess: f64,
    /// Worst relative trace drift of the right-hand side.
    pub trace_drift: f64,
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a> {
    p: &'a TransientParams,
    scale: [f64; 8],
    step_tol: f64,
}

impl Stepper<'_> {
    fn f(&self, y: &[f64; 8]) -> [f64; 8] {
        rhs(&DensityState::from_array(y), self.p).to_array()
    }

    /// One trial step; returns the 5th-order solution and the scaled error.
    fn trial(&self, y: &[f64; 8], h: f64) -> ([f64; 8], f64) {
        let mut k = [[0.0; 8]; 7];
        k[0] = self.f(y);
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for n in 0..8 {
                        ys[n] += h * a * kj[n];
                    }
                }
            }
            k[s] = self.f(&ys);
        }
        let mut y5 = *y;
        let mut err: f64 = 0.0;
        for n in 0..8 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][n];
                d4 += B4[s] * k[s][n];
            }
            y5[n] += h * d5;
            let sc = self.step_tol * (self.scale[n] + y[n].abs().max(y5[n].abs()));
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        (y5, err)
    }
}

/// Integrate from `initial` until the state stops changing.
///
/// Changes are measured per group (probe coherences, drive coherence,
/// populations), each relative to its own magnitude, over successive windows
/// of 1/min(A21, A31).
pub fn integrate_to_steady(
    initial: DensityState,
    params: &TransientParams,
    opts: &IntegratorOptions,
) -> Result<(DensityState, ConvergenceReport)> {
    if !(opts.tol > 1e-14 && opts.tol < 1e-3) {
        return Err(Error::config("tol", "must lie in (1e-14, 1e-3)"));
    }
    let r = &params.rates;
    let tau = 1.0 / r.a21.min(r.a31).max(f64::MIN_POSITIVE);
    let fastest = [
        r.gamma21,
        r.gamma31,
        r.gamma32,
        r.gamma2,
        r.gamma3,
        params.drive.g,
        params.g_probe,
        params.delta_p.abs(),
        params.drive.delta.abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    // Absolute floors keep the error norm meaningful for components that
    // start (or stay) at zero.
    let probe_floor = (params.g_probe / r.gamma31).max(1e-300) * 1e-6;
    let drive_floor = 1e-6 * (params.drive.g / r.gamma21).clamp(1e-300, 1.0);
    let stepper = Stepper {
        p: params,
        scale: [
            probe_floor,
            probe_floor,
            probe_floor,
            probe_floor,
            drive_floor,
            drive_floor,
            1e-9,
            1e-9,
        ],
        step_tol: opts.step_tol,
    };

    let mut y = initial.to_array();
    let mut t = 0.0;
    let mut h = 0.01 / fastest.max(1.0 / tau);
    let mut report = ConvergenceReport {
        time: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
        last_change: f64::INFINITY,
        population_excursion: 0.0,
        coherence_excess: f64::NEG_INFINITY,
        trace_drift: 0.0,
    };
    let mut window_start = y;
    let mut window_end = tau;

    loop {
        if report.accepted_steps + report.rejected_steps >= opts.max_steps {
            return Err(Error::NonConvergence(format!(
                "density-matrix integration: {} steps, last change {:e}",
                opts.max_steps, report.last_change
            )));
        }
        let h_try = h.min(window_end - t);
        let (y_new, err) = stepper.trial(&y, h_try);
        if !err.is_finite() {
            return Err(Error::NonConvergence("density-matrix integration diverged".into()));
        }
        if err <= 1.0 {
            t += h_try;
            y = y_new;
            report.accepted_steps += 1;
            let s = DensityState::from_array(&y);
            let excursion = [s.r1(), s.r2, s.r3]
                .into_iter()
                .map(|v| (-v).max(v - 1.0).max(0.0))
                .fold(0.0, f64::max);
            report.population_excursion = report.population_excursion.max(excursion);
            report.coherence_excess = report.coherence_excess.max(s.coherence_excess());
            report.trace_drift = report.trace_drift.max(trace_drift(&s, params));
        } else {
            report.rejected_steps += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = h_try * factor;

        if t >= window_end {
            report.last_change = group_change(&window_start, &y);
            let done = t >= opts.horizon * tau * (1.0 - 1e-12) && report.last_change < opts.tol;
            if done || report.last_change == 0.0 {
                report.time = t;
                return Ok((DensityState::from_array(&y), report));
            }
            window_start = y;
            window_end = t + tau;
        }
    }
}

fn group_change(a: &[f64; 8], b: &[f64; 8]) -> f64 {
    let rel = |idx: &[usize]| {
        let d: f64 = idx.iter().map(|&i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        let m: f64 = idx.iter().map(|&i| b[i].powi(2)).sum::<f64>().sqrt();
        if d == 0.0 { 0.0 } else { d / m.max(1e-300) }
    };
    let pops = ((a[6] - b[6]).abs()).max((a[7] - b[7]).abs());
    rel(&[0, 1, 2, 3]).max(rel(&[4, 5])).max(pops)
}

/// Default probe strength relative to Γ31 for [`linear_response_f`].
pub const PROBE_EPSILON: f64 = 1e-6;

/// Normalised susceptibility read off the integrated steady state with a
/// weak probe g_p = ε Γ31: f = Γ31 r31 / g_p.
pub fn linear_response_f(
    delta_p: f64,
    drive: &DriveField,
    rates: &RateSet,
    epsilon: f64,
    opts: &IntegratorOptions,
) -> Result<Complex64> {
    let g_probe = epsilon * rates.gamma31;
    let params = TransientParams {
        g_probe,
        drive: *drive,
        delta_p,
        rates: *rates,
    };
    let (s, _) = integrate_to_steady(DensityState::ground(), &params, opts)?;
    Ok(s.r31 * rates.gamma31 / g_probe)
}
