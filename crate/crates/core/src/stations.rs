//! Station registry: identity and geography of the analyzed sites.
//!
//! The bundled registry covers the 11 Omani stations the toolkit ships
//! reference results for; users can extend or override it with a TOML
//! file (one `[[station]]` table per site).

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identity and geography of a weather station.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationMeta {
    /// Short unique identifier used in observation files.
    pub key: String,
    pub name: String,
    pub governorate: String,
    pub coastal: bool,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub altitude_m: f64,
    pub icao: String,
    #[serde(default)]
    pub wmo: Option<u32>,
}

#[derive(Debug, Deserialize)]
struct RegistryFile {
    #[serde(rename = "station")]
    stations: Vec<StationMeta>,
}

/// An ordered, key-unique collection of stations.
#[derive(Debug, Clone)]
pub struct Registry {
    stations: Vec<StationMeta>,
}

macro_rules! station {
    ($key:literal, $name:literal, $gov:literal, $coastal:literal,
     $lat:literal, $lon:literal, $alt:literal, $icao:literal, $wmo:expr) => {
        StationMeta {
            key: $key.to_string(),
            name: $name.to_string(),
            governorate: $gov.to_string(),
            coastal: $coastal,
            latitude_deg: $lat,
            longitude_deg: $lon,
            altitude_m: $alt,
            icao: $icao.to_string(),
            wmo: $wmo,
        }
    };
}

impl Registry {
    /// The bundled Omani station set.
    pub fn builtin() -> Self {
        let stations = vec![
            station!(
                "seeb",
                "Seeb",
                "Muscat",
                true,
                23.595,
                58.298,
                8.0,
                "OOMS",
                Some(41256)
            ),
            station!(
                "salalah",
                "Salalah",
                "Dhofar",
                true,
                17.044,
                54.102,
                20.0,
                "OOSA",
                Some(41316)
            ),
            station!(
                "buraimi",
                "Buraimi",
                "Al Buraimi",
                false,
                24.241,
                55.785,
                299.0,
                "OOBR",
                Some(41244)
            ),
            station!(
                "masirah",
                "Masirah",
                "Ash Sharqiyah South",
                true,
                20.672,
                58.889,
                19.0,
                "OOMA",
                Some(41288)
            ),
            station!(
                "thumrait",
                "Thumrait",
                "Dhofar",
                false,
                17.681,
                54.024,
                467.0,
                "OOTH",
                Some(41314)
            ),
            station!(
                "sur",
                "Sur",
                "Ash Sharqiyah South",
                true,
                22.538,
                59.479,
                14.0,
                "OOSR",
                Some(41268)
            ),
            station!(
                "khasab",
                "Khasab",
                "Musandam",
                true,
                26.211,
                56.244,
                3.0,
                "OOKB",
                Some(41240)
            ),
            station!(
                "majis",
                "Majis",
                "Sohar",
                true,
                24.467,
                56.644,
                4.0,
                "OOSH",
                Some(41246)
            ),
            station!(
                "fahud",
                "Fahud",
                "Az Zahirah",
                false,
                22.348,
                56.49,
                170.0,
                "OOFD",
                Some(41262)
            ),
            station!(
                "saiq",
                "Saiq",
                "Ad Dakhiliyah",
                false,
                23.074,
                57.646,
                1755.0,
                "OOSQ",
                Some(41254)
            ),
            station!("duqm", "Duqm", "Al Wusta", true, 19.5, 57.65, 111.0, "OODQ", None),
        ];
        Self { stations }
    }

    /// Parse a registry from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: RegistryFile =
            toml::from_str(text).map_err(|e| Error::Schema(format!("station registry: {e}")))?;
        let registry = Self {
            stations: file.stations,
        };
        registry.validate()?;
        Ok(registry)
    }

    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Bundled stations with user entries layered on top; a user station
    /// with a known key replaces the bundled one.
    pub fn with_overrides(mut self, overrides: Registry) -> Result<Self> {
        for station in overrides.stations {
            match self.stations.iter_mut().find(|s| s.key == station.key) {
                Some(slot) => *slot = station,
                None => self.stations.push(station),
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for s in &self.stations {
            if s.key.is_empty() {
                return Err(Error::Schema("station with empty key".to_string()));
            }
            if !seen.insert(s.key.as_str()) {
                return Err(Error::Schema(format!("duplicate station key '{}'", s.key)));
            }
            if !(-90.0..=90.0).contains(&s.latitude_deg) {
                return Err(Error::Schema(format!(
                    "station '{}': latitude {} outside [-90, 90]",
                    s.key, s.latitude_deg
                )));
            }
            if !(-180.0..=180.0).contains(&s.longitude_deg) {
                return Err(Error::Schema(format!(
                    "station '{}': longitude {} outside [-180, 180]",
                    s.key, s.longitude_deg
                )));
            }
            if !(s.altitude_m >= 0.0) {
                return Err(Error::Schema(format!(
                    "station '{}': altitude {} must be >= 0",
                    s.key, s.altitude_m
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&StationMeta> {
        self.stations.iter().find(|s| s.key == key)
    }

    pub fn stations(&self) -> &[StationMeta] {
        &self.stations
    }
}
