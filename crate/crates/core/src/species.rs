//! Atomic and collision data, catalog ingestion and unit conversion.
//!
//! The catalog file is TOML: one `[species.<name>]` table per alkali and one
//! `[buffer.<name>]` table per buffer gas. Values are kept in the file's units
//! ([`SpeciesEntry`]) so that tabulated numbers survive a round trip unchanged;
//! [`AtomSystem`] holds the same data converted to SI.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{ANGSTROM2_IN_M2, ATOMIC_MASS_UNIT, BOLTZMANN, NM, PLANCK, SPEED_OF_LIGHT, TORR};
use crate::{Error, Result};

/// Reference catalog shipped with the crate (Na, K, Rb with helium).
pub const DEFAULT_CATALOG: &str = include_str!("../data/species.toml");

/// `h c w` for a wavenumber `w` in cm⁻¹, in joules.
pub fn energy_from_wavenumber(w: f64) -> f64 {
    debug_assert!(w >= 0.0);
    PLANCK * SPEED_OF_LIGHT * (w * 100.0)
}

pub fn pressure_to_pascal(p: f64) -> f64 {
    debug_assert!(p >= 0.0);
    p * TORR
}

/// Zeeman degeneracies of the ground, drive-upper and probe-upper levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degeneracies {
    pub g1: u32,
    pub g2: u32,
    pub g3: u32,
}

impl Degeneracies {
    /// S1/2, P3/2, P1/2.
    pub const ALKALI: Degeneracies = Degeneracies { g1: 2, g2: 4, g3: 2 };
    pub const NONE: Degeneracies = Degeneracies { g1: 1, g2: 1, g3: 1 };

    pub fn as_f64(&self) -> [f64; 3] {
        [self.g1 as f64, self.g2 as f64, self.g3 as f64]
    }
}

/// One catalog row in file units (nm, s⁻¹, cm⁻¹, amu, Å²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesEntry {
    pub lambda_probe: f64,
    pub lambda_drive: f64,
    #[serde(rename = "A21")]
    pub a21: f64,
    #[serde(rename = "A31")]
    pub a31: f64,
    #[serde(rename = "delta_E")]
    pub delta_e: f64,
    pub mass: f64,
    pub g1: u32,
    pub g2: u32,
    pub g3: u32,
    pub sigma_23: f64,
    pub sigma_32: f64,
    pub sigma_b21: f64,
    pub sigma_b31: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferEntry {
    /// amu
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[serde(default)]
    buffer: BTreeMap<String, BufferEntry>,
    #[serde(default)]
    species: BTreeMap<String, SpeciesEntry>,
}

/// Three-level parameters of one alkali species, in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSystem {
    pub name: String,
    /// D1 wavelength (m).
    pub lambda_probe: f64,
    /// D2 wavelength (m).
    pub lambda_drive: f64,
    /// Spontaneous decay P3/2 -> S (s⁻¹).
    pub a21: f64,
    /// Spontaneous decay P1/2 -> S (s⁻¹).
    pub a31: f64,
    /// Fine-structure splitting E2 - E3 (J).
    pub delta_e: f64,
    /// kg
    pub mass: f64,
    pub degeneracies: Degeneracies,
    /// Transfer cross-sections P3/2 -> P1/2 and back (m²).
    pub sigma_23: f64,
    pub sigma_32: f64,
    /// Broadening cross-sections of the D2 and D1 lines (m²).
    pub sigma_b21: f64,
    pub sigma_b31: f64,
}

impl AtomSystem {
    pub fn from_entry(name: &str, e: &SpeciesEntry) -> Result<Self> {
        let bad = |field: &'static str, reason: String| Error::Invariant {
            species: Some(name.to_string()),
            field,
            reason,
        };
        let positive = [
            ("lambda_probe", e.lambda_probe),
            ("lambda_drive", e.lambda_drive),
            ("A21", e.a21),
            ("A31", e.a31),
            ("delta_E", e.delta_e),
            ("mass", e.mass),
            ("sigma_23", e.sigma_23),
            ("sigma_32", e.sigma_32),
            ("sigma_b21", e.sigma_b21),
            ("sigma_b31", e.sigma_b31),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(field, format!("must be finite and > 0, got {v}")));
            }
        }
        for (field, g) in [("g1", e.g1), ("g2", e.g2), ("g3", e.g3)] {
            if g == 0 {
                return Err(bad(field, "degeneracy must be a positive integer".into()));
            }
        }
        if e.lambda_drive >= e.lambda_probe {
            return Err(bad(
                "lambda_drive",
                format!(
                    "drive (D2) wavelength {} nm must be shorter than probe (D1) {} nm",
                    e.lambda_drive, e.lambda_probe
                ),
            ));
        }
        Ok(AtomSystem {
            name: name.to_string(),
            lambda_probe: e.lambda_probe * NM,
            lambda_drive: e.lambda_drive * NM,
            a21: e.a21,
            a31: e.a31,
            delta_e: energy_from_wavenumber(e.delta_e),
            mass: e.mass * ATOMIC_MASS_UNIT,
            degeneracies: Degeneracies {
                g1: e.g1,
                g2: e.g2,
                g3: e.g3,
            },
            sigma_23: e.sigma_23 * ANGSTROM2_IN_M2,
            sigma_32: e.sigma_32 * ANGSTROM2_IN_M2,
            sigma_b21: e.sigma_b21 * ANGSTROM2_IN_M2,
            sigma_b31: e.sigma_b31 * ANGSTROM2_IN_M2,
        })
    }

    /// Probe-to-drive wavevector ratio k_p/k.
    pub fn k_ratio(&self) -> f64 {
        self.lambda_drive / self.lambda_probe
    }

    /// ΔE/(k_B T).
    pub fn boltzmann_exponent(&self, temperature: f64) -> f64 {
        self.delta_e / (BOLTZMANN * temperature)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathConditions {
    pub buffer: String,
    /// kg
    pub buffer_mass: f64,
    /// Torr
    pub pressure: f64,
    /// K
    pub temperature: f64,
}

impl BathConditions {
    pub fn new(buffer: impl Into<String>, buffer_mass: f64, pressure: f64, temperature: f64) -> Result<Self> {
        if !(buffer_mass.is_finite() && buffer_mass > 0.0) {
            return Err(Error::invariant("buffer_mass", "must be > 0"));
        }
        if !(pressure.is_finite() && pressure >= 0.0) {
            return Err(Error::invariant("pressure", format!("must be >= 0, got {pressure}")));
        }
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::invariant(
                "temperature",
                format!("must be > 0, got {temperature}"),
            ));
        }
        Ok(BathConditions {
            buffer: buffer.into(),
            buffer_mass,
            pressure,
            temperature,
        })
    }

    pub fn with_pressure(&self, pressure: f64) -> Self {
        BathConditions {
            pressure,
            ..self.clone()
        }
    }
}

/// Immutable set of species and buffer gases.
#[derive(Debug, Clone)]
pub struct SpeciesCatalog {
    entries: BTreeMap<String, SpeciesEntry>,
    atoms: BTreeMap<String, AtomSystem>,
    buffers: BTreeMap<String, BufferEntry>,
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<SpeciesCatalog> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SpeciesCatalog::from_toml_str(&text)
}

impl SpeciesCatalog {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })?;
        let mut atoms = BTreeMap::new();
        for (name, entry) in &file.species {
            atoms.insert(name.clone(), AtomSystem::from_entry(name, entry)?);
        }
        for (name, b) in &file.buffer {
            if !(b.mass.is_finite() && b.mass > 0.0) {
                return Err(Error::Invariant {
                    species: Some(name.clone()),
                    field: "mass",
                    reason: format!("buffer mass must be > 0, got {}", b.mass),
                });
            }
        }
        Ok(SpeciesCatalog {
            entries: file.species,
            atoms,
            buffers: file.buffer,
        })
    }

    /// The catalog bundled with the crate.
    pub fn builtin() -> Self {
        Self::from_toml_str(DEFAULT_CATALOG).expect("bundled catalog is valid")
    }

    pub fn to_toml_string(&self) -> String {
        let file = CatalogFile {
            buffer: self.buffers.clone(),
            species: self.entries.clone(),
        };
        toml::to_string(&file).expect("catalog serializes")
    }

    pub fn species_names(&self) -> impl Iterator<Item = &str> {
        self.atoms.keys().map(String::as_str)
    }

    pub fn atom(&self, name: &str) -> Result<&AtomSystem> {
        self.atoms
            .get(name)
            .ok_or_else(|| Error::UnknownSpecies(name.to_string()))
    }

    /// Raw catalog row, in file units.
    pub fn entry(&self, name: &str) -> Result<&SpeciesEntry> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::UnknownSpecies(name.to_string()))
    }

    /// Buffer-gas mass in kg.
    pub fn buffer_mass(&self, name: &str) -> Result<f64> {
        self.buffers
            .get(name)
            .map(|b| b.mass * ATOMIC_MASS_UNIT)
            .ok_or_else(|| Error::UnknownBuffer(name.to_string()))
    }

    pub fn bath(&self, buffer: &str, pressure: f64, temperature: f64) -> Result<BathConditions> {
        BathConditions::new(buffer, self.buffer_mass(buffer)?, pressure, temperature)
    }
}
