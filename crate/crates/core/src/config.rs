//! Run configuration for the command-line tool, and its resolution against
//! a species catalog into rates and a drive field.

use std::path::PathBuf;

use crate::doppler::{DEFAULT_NODES, DopplerConfig};
use crate::rates::{
    DriveField, RateSet, build_rate_set_with, kappa0_collisionless, rabi_from_intensity, rabi_from_kappa0,
};
use crate::species::{AtomSystem, BathConditions, SpeciesCatalog};
use crate::{Error, Result};

/// How the drive strength was given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveStrength {
    /// Collisionless resonant saturation 4|g|²/A21².
    Kappa0(f64),
    /// |g| in s⁻¹.
    Rabi(f64),
    /// W/cm².
    Intensity(f64),
}

impl DriveStrength {
    /// Pick the single supplied option.
    pub fn from_options(kappa0: Option<f64>, rabi: Option<f64>, intensity: Option<f64>) -> Result<Option<Self>> {
        let given: Vec<DriveStrength> = [
            kappa0.map(DriveStrength::Kappa0),
            rabi.map(DriveStrength::Rabi),
            intensity.map(DriveStrength::Intensity),
        ]
        .into_iter()
        .flatten()
        .collect();
        match given.as_slice() {
            [] => Ok(None),
            [one] => Ok(Some(*one)),
            _ => Err(Error::config("drive", "give only one of --kappa0, --rabi, --intensity")),
        }
    }

    fn value(&self) -> (&'static str, f64) {
        match *self {
            DriveStrength::Kappa0(v) => ("kappa0", v),
            DriveStrength::Rabi(v) => ("rabi", v),
            DriveStrength::Intensity(v) => ("intensity", v),
        }
    }
}

/// Probe-detuning scan in units of Γ31.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            min: -10.0,
            max: 10.0,
            n: 401,
        }
    }
}

impl ScanSpec {
    /// Grid in units of Γ31.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub species: String,
    pub buffer: String,
    /// Torr.
    pub pressure: f64,
    /// K.
    pub temperature: f64,
    pub drive: Option<DriveStrength>,
    /// Drive detuning δ (s⁻¹).
    pub delta: f64,
    pub scan: ScanSpec,
    pub doppler: bool,
    /// Velocity nodes; `None` picks enough nodes for the line width.
    pub nodes: Option<usize>,
    pub chi_raman: f64,
    pub catalog: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            species: "K".into(),
            buffer: "He".into(),
            pressure: 16.0,
            temperature: 550.0,
            drive: None,
            delta: 0.0,
            scan: ScanSpec::default(),
            doppler: false,
            nodes: None,
            chi_raman: 0.0,
            catalog: None,
            out: None,
            plot: false,
        }
    }
}

/// A configuration bound to catalog data.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub atom: AtomSystem,
    pub bath: BathConditions,
    pub rates: RateSet,
    pub drive: DriveField,
    pub kappa0: f64,
}

fn finite(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite, got {v}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        finite("pressure-torr", self.pressure)?;
        if self.pressure < 0.0 {
            return Err(Error::config("pressure-torr", "must be >= 0"));
        }
        finite("temperature-k", self.temperature)?;
        if self.temperature <= 0.0 {
            return Err(Error::config("temperature-k", "must be > 0"));
        }
        finite("delta", self.delta)?;
        finite("chi-raman", self.chi_raman)?;
        if self.chi_raman < 0.0 {
            return Err(Error::config("chi-raman", "must be >= 0"));
        }
        if let Some(d) = self.drive {
            let (field, v) = d.value();
            finite(field, v)?;
            if v < 0.0 {
                return Err(Error::config(field, "must be >= 0"));
            }
        }
        finite("scan-min", self.scan.min)?;
        finite("scan-max", self.scan.max)?;
        if self.scan.n < 2 {
            return Err(Error::config("scan-n", "need at least 2 points"));
        }
        if self.scan.max <= self.scan.min {
            return Err(Error::config("scan-max", "must exceed scan-min"));
        }
        if let Some(n) = self.nodes
            && n < 8
        {
            return Err(Error::config("nodes", "at least 8 velocity nodes are required"));
        }
        if self.plot && self.out.is_none() {
            return Err(Error::config("plot", "--plot needs --out <dir>"));
        }
        Ok(())
    }

    pub fn load_catalog(&self) -> Result<SpeciesCatalog> {
        match &self.catalog {
            Some(p) => crate::species::load_catalog(p),
            None => Ok(SpeciesCatalog::builtin()),
        }
    }

    pub fn resolve(&self, catalog: &SpeciesCatalog) -> Result<Resolved> {
        self.validate()?;
        let atom = catalog.atom(&self.species)?.clone();
        let bath = catalog.bath(&self.buffer, self.pressure, self.temperature)?;
        let rates = build_rate_set_with(&atom, &bath, self.chi_raman);
        let g = match self.drive {
            None => {
                return Err(Error::config(
                    "drive",
                    "one of --kappa0, --rabi, --intensity is required",
                ));
            }
            Some(DriveStrength::Kappa0(k)) => rabi_from_kappa0(k, atom.a21),
            Some(DriveStrength::Rabi(g)) => g,
            Some(DriveStrength::Intensity(i)) => rabi_from_intensity(i, &atom),
        };
        Ok(Resolved {
            kappa0: kappa0_collisionless(g, atom.a21),
            drive: DriveField::new(g, self.delta),
            atom,
            bath,
            rates,
        })
    }

    /// Velocity-averaging settings; without an explicit node count the
    /// default is doubled until the node spacing resolves Γ31.
    pub fn doppler_config(&self, r: &Resolved) -> DopplerConfig {
        let base = DopplerConfig::thermal(&r.atom, self.temperature);
        match self.nodes {
            Some(n) => DopplerConfig { n_nodes: n, ..base },
            None => {
                let mut n = DEFAULT_NODES;
                while n < 2000 && !base_resolves(&base, n, r.rates.gamma31) {
                    n *= 2;
                }
                DopplerConfig {
                    n_nodes: n.min(2000),
                    ..base
                }
            }
        }
    }
}

fn base_resolves(base: &DopplerConfig, n: usize, width: f64) -> bool {
    let cfg = DopplerConfig { n_nodes: n, ..*base };
    crate::doppler::max_node_spacing(&cfg).is_ok_and(|s| s <= width)
}
