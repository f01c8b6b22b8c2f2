//! Run configuration: a TOML document mirrored by [`RunConfig`], with CLI
//! flags layered on top by the binary.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::traveltime::{ModeSpeeds, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderChoice {
    Synthetic,
    Live,
}

impl ProviderChoice {
    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "synthetic" => Some(ProviderChoice::Synthetic),
            "live" => Some(ProviderChoice::Live),
            _ => None,
        }
    }
}

/// How the FQHC-only scenario derives its neighbor structure: recompute the
/// k nearest neighbors on the filtered set (default), or induce the full-set
/// edges onto the filtered set (sensitivity analysis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborMode {
    Recompute,
    Induced,
}

/// Which finite deaths feed the scenario comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeathPool {
    /// Finite H0 deaths only (default: connectivity is what the comparison
    /// is about).
    H0,
    /// Finite H0 and H1 deaths pooled.
    Pooled,
}

fn default_k() -> usize {
    35
}
fn default_trim() -> f64 {
    15.0
}
fn default_death_filter() -> f64 {
    150.0
}
fn default_concurrency() -> usize {
    4
}
fn default_provider() -> ProviderChoice {
    ProviderChoice::Synthetic
}
fn default_neighbor_mode() -> NeighborMode {
    NeighborMode::Recompute
}
fn default_death_pool() -> DeathPool {
    DeathPool::H0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Facility table, CSV with header `id,name,kind,lat,lon,county`.
    pub facilities: PathBuf,
    /// County table, CSV with header `county,population,registered_vehicles`.
    pub counties: PathBuf,
    /// Travel cache, JSON Lines; created by `fetch` if absent.
    pub cache: PathBuf,
    /// Directory for all output artifacts.
    pub out_dir: PathBuf,

    #[serde(default = "default_provider")]
    pub provider: ProviderChoice,
    /// Default scenario for `analyze` when no `--scenario` flag is given.
    #[serde(default)]
    pub scenario: Option<Scenario>,
    /// Neighbor count for the k-nearest-neighbor restriction.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Deaths at or below this many minutes are trimmed before testing.
    #[serde(default = "default_trim")]
    pub trim_threshold: f64,
    /// Minimum death in minutes for the map export.
    #[serde(default = "default_death_filter")]
    pub death_filter: f64,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default = "default_neighbor_mode")]
    pub neighbor_mode: NeighborMode,
    #[serde(default = "default_death_pool")]
    pub deaths: DeathPool,
    /// Also write the filtration debug dump during analyze.
    #[serde(default)]
    pub dump_filtration: bool,
    /// Synthetic provider speed overrides, km/h.
    #[serde(default)]
    pub speeds: ModeSpeeds,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_path(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.k < 1 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.trim_threshold < 0.0 {
            return Err(Error::Config("trim_threshold must be >= 0".into()));
        }
        if self.death_filter < 0.0 {
            return Err(Error::Config("death_filter must be >= 0".into()));
        }
        if self.concurrency < 1 {
            return Err(Error::Config("concurrency must be at least 1".into()));
        }
        let positive = [
            ("car_kmh", self.speeds.car_kmh),
            ("transit_kmh", self.speeds.transit_kmh),
            ("walk_kmh", self.speeds.walk_kmh),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("speeds.{name} must be positive")));
            }
        }
        Ok(())
    }
}
