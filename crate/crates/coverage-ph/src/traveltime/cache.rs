//! Persistent cache of one-way provider results.
//!
//! The cache exists so that billed routing queries are issued at most once:
//! every fetched leg (including "no route for this mode") is recorded and
//! replayed on later runs. The on-disk format is JSON Lines, one record per
//! directed leg and mode:
//!
//! ```text
//! {"o":"f1","d":"f2","mode":"car","seconds":1234.5,"provider":"synthetic","fetched":"2026-01-01T00:00:00Z"}
//! ```
//!
//! `seconds` is `null` when the provider reported no route. Records are kept
//! in key order so that a loaded cache re-serializes byte-identically.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::TravelTimeError;

use super::provider::Mode;

/// One cached leg: origin facility id, destination facility id, mode.
pub type CacheKey = (String, String, Mode);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub o: String,
    pub d: String,
    pub mode: Mode,
    /// One-way duration in seconds; `None` when the mode has no route.
    pub seconds: Option<f64>,
    pub provider: String,
    pub fetched: String,
}

impl CacheRecord {
    fn key(&self) -> CacheKey {
        (self.o.clone(), self.d.clone(), self.mode)
    }
}

/// In-memory view of the travel cache.
#[derive(Debug, Clone, Default)]
pub struct TravelCache {
    entries: BTreeMap<CacheKey, CacheRecord>,
}

impl TravelCache {
    pub fn new() -> Self {
        TravelCache::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Raw seconds for a directed leg. Outer `None` means the leg was never
    /// fetched; inner `None` means it was fetched and has no route.
    pub fn get_seconds(&self, o: &str, d: &str, mode: Mode) -> Option<Option<f64>> {
        self.entries
            .get(&(o.to_string(), d.to_string(), mode))
            .map(|r| r.seconds)
    }

    /// Same as [`get_seconds`](Self::get_seconds) converted to minutes.
    /// Seconds are stored raw and converted on read, so there is no
    /// double-rounding between runs.
    pub fn get_minutes(&self, o: &str, d: &str, mode: Mode) -> Option<Option<f64>> {
        self.get_seconds(o, d, mode)
            .map(|s| s.map(|seconds| seconds / 60.0))
    }

    pub fn contains(&self, o: &str, d: &str, mode: Mode) -> bool {
        self.entries
            .contains_key(&(o.to_string(), d.to_string(), mode))
    }

    /// Insert a record. Re-inserting an identical value is a no-op
    /// (last-write-wins); a different value for the same key is a conflict.
    pub fn insert(&mut self, record: CacheRecord) -> Result<(), TravelTimeError> {
        match self.entries.get(&record.key()) {
            Some(existing) if existing.seconds != record.seconds => {
                Err(TravelTimeError::CacheConflict {
                    origin: record.o,
                    dest: record.d,
                    mode: record.mode.as_str().to_string(),
                    existing: existing.seconds,
                    incoming: record.seconds,
                })
            }
            Some(_) => Ok(()),
            None => {
                self.entries.insert(record.key(), record);
                Ok(())
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &CacheRecord> {
        self.entries.values()
    }

    /// Load a JSONL cache file. A missing file is an empty cache.
    pub fn load(path: &Path) -> Result<Self, TravelTimeError> {
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Ok(TravelCache::new());
            }
            Err(e) => {
                return Err(TravelTimeError::CacheParse {
                    path: path.to_path_buf(),
                    line: 0,
                    message: e.to_string(),
                })
            }
        };
        let mut cache = TravelCache::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| TravelTimeError::CacheParse {
                path: path.to_path_buf(),
                line: lineno,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: CacheRecord =
                serde_json::from_str(&line).map_err(|e| TravelTimeError::CacheParse {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: e.to_string(),
                })?;
            cache.insert(record)?;
        }
        Ok(cache)
    }

    /// Serialize to JSONL in key order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in self.entries.values() {
            out.push_str(&serde_json::to_string(record).expect("cache record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), std::io::Error> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_jsonl().as_bytes())
    }
}
