//! Facility and county datasets, plus the geographic k-nearest-neighbor
//! structure that bounds all downstream pairwise work.
//!
//! Input formats:
//! - `facilities.csv` with header `id,name,kind,lat,lon,county`
//! - `counties.csv` with header `county,population,registered_vehicles`
//!
//! County keys are matched case-insensitively after trimming whitespace.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::IngestError;

/// Mean Earth radius in kilometers, used by [`haversine_km`].
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Facility kind. PPHC sites are the ones removed in the defunding scenario;
/// FQHC sites are retained in both scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacilityKind {
    #[serde(rename = "PPHC")]
    Pphc,
    #[serde(rename = "FQHC")]
    Fqhc,
}

impl FacilityKind {
    pub fn parse(token: &str) -> Option<FacilityKind> {
        match token.trim() {
            "PPHC" => Some(FacilityKind::Pphc),
            "FQHC" => Some(FacilityKind::Fqhc),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FacilityKind::Pphc => "PPHC",
            FacilityKind::Fqhc => "FQHC",
        }
    }
}

/// A healthcare site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facility {
    pub id: String,
    pub name: String,
    pub kind: FacilityKind,
    /// Latitude in degrees, [-90, 90].
    pub lat: f64,
    /// Longitude in degrees, [-180, 180].
    pub lon: f64,
    /// Key into the county table (matched case-insensitively, trimmed).
    pub county: String,
}

/// Population and registered-vehicle count for one county.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountyStats {
    pub county: String,
    pub population: u64,
    pub registered_vehicles: u64,
}

/// County table keyed by normalized (trimmed, lowercased) county name.
#[derive(Debug, Clone, Default)]
pub struct CountyTable {
    by_key: BTreeMap<String, CountyStats>,
}

fn normalize_county(key: &str) -> String {
    key.trim().to_lowercase()
}

impl CountyTable {
    pub fn get(&self, county: &str) -> Option<&CountyStats> {
        self.by_key.get(&normalize_county(county))
    }

    pub fn len(&self) -> usize {
        self.by_key.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_key.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CountyStats> {
        self.by_key.values()
    }

    fn insert(&mut self, stats: CountyStats) -> Result<(), IngestError> {
        let key = normalize_county(&stats.county);
        if self.by_key.contains_key(&key) {
            return Err(IngestError::DuplicateCounty(stats.county));
        }
        self.by_key.insert(key, stats);
        Ok(())
    }
}

/// Per-facility lists of the k geographically nearest other facilities.
///
/// Lists are sorted ascending by haversine distance, ties broken by ascending
/// facility id so the structure is identical across platforms. Indices refer
/// to the facility slice the graph was built from.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    pub k: usize,
    pub adjacency: Vec<Vec<usize>>,
}

impl NeighborGraph {
    /// Undirected edge set: {i,j} present if either endpoint lists the other.
    /// Pairs are canonical (i < j) and sorted.
    pub fn union_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = std::collections::BTreeSet::new();
        for (i, neighbors) in self.adjacency.iter().enumerate() {
            for &j in neighbors {
                edges.insert((i.min(j), i.max(j)));
            }
        }
        edges.into_iter().collect()
    }
}

/// Great-circle distance in kilometers between two (lat, lon) points in degrees.
pub fn haversine_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = lon2 - lon1;
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

fn header_index(headers: &csv::StringRecord, name: &str) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
}

/// Parse the facility table from delimiter-separated text with a header row
/// naming `id,name,kind,lat,lon,county`. Row order is preserved.
pub fn parse_facilities<R: Read>(reader: R) -> Result<Vec<Facility>, IngestError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers()?.clone();
    let col_id = header_index(&headers, "id")?;
    let col_name = header_index(&headers, "name")?;
    let col_kind = header_index(&headers, "kind")?;
    let col_lat = header_index(&headers, "lat")?;
    let col_lon = header_index(&headers, "lon")?;
    let col_county = header_index(&headers, "county")?;

    let mut facilities = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, record) in csv.records().enumerate() {
        let row = idx + 2; // 1-based, after the header
        let record = record?;
        let field = |col: usize, name: &str| -> Result<String, IngestError> {
            record
                .get(col)
                .map(str::to_string)
                .ok_or_else(|| IngestError::InvalidRow {
                    row,
                    message: format!("missing field {name}"),
                })
        };
        let id = field(col_id, "id")?;
        if id.is_empty() {
            return Err(IngestError::InvalidRow {
                row,
                message: "empty facility id".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateFacility(id));
        }
        let kind_token = field(col_kind, "kind")?;
        let kind = FacilityKind::parse(&kind_token).ok_or_else(|| IngestError::InvalidRow {
            row,
            message: format!("unknown kind {kind_token:?} (expected PPHC or FQHC)"),
        })?;
        let lat: f64 = field(col_lat, "lat")?
            .parse()
            .map_err(|e| IngestError::InvalidRow {
                row,
                message: format!("bad latitude: {e}"),
            })?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(IngestError::InvalidRow {
                row,
                message: format!("latitude out of range: {lat}"),
            });
        }
        let lon: f64 = field(col_lon, "lon")?
            .parse()
            .map_err(|e| IngestError::InvalidRow {
                row,
                message: format!("bad longitude: {e}"),
            })?;
        if !(-180.0..=180.0).contains(&lon) {
            return Err(IngestError::InvalidRow {
                row,
                message: format!("longitude out of range: {lon}"),
            });
        }
        facilities.push(Facility {
            id,
            name: field(col_name, "name")?,
            kind,
            lat,
            lon,
            county: field(col_county, "county")?,
        });
    }
    Ok(facilities)
}

/// Parse the county table from text with a header row naming
/// `county,population,registered_vehicles`.
pub fn parse_counties<R: Read>(reader: R) -> Result<CountyTable, IngestError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers()?.clone();
    let col_county = header_index(&headers, "county")?;
    let col_pop = header_index(&headers, "population")?;
    let col_veh = header_index(&headers, "registered_vehicles")?;

    let mut table = CountyTable::default();
    for (idx, record) in csv.records().enumerate() {
        let row = idx + 2;
        let record = record?;
        let county = record
            .get(col_county)
            .unwrap_or_default()
            .to_string();
        if county.is_empty() {
            return Err(IngestError::InvalidRow {
                row,
                message: "empty county key".into(),
            });
        }
        let population: i64 = record
            .get(col_pop)
            .unwrap_or_default()
            .parse()
            .map_err(|e| IngestError::InvalidRow {
                row,
                message: format!("bad population: {e}"),
            })?;
        if population <= 0 {
            return Err(IngestError::InvalidRow {
                row,
                message: format!("population must be positive, got {population}"),
            });
        }
        let registered_vehicles: u64 = record
            .get(col_veh)
            .unwrap_or_default()
            .parse()
            .map_err(|e| IngestError::InvalidRow {
                row,
                message: format!("bad registered_vehicles: {e}"),
            })?;
        table.insert(CountyStats {
            county,
            population: population as u64,
            registered_vehicles,
        })?;
    }
    Ok(table)
}

/// Check that every facility's county key resolves in the table.
pub fn validate_counties(facilities: &[Facility], counties: &CountyTable) -> Result<(), IngestError> {
    for f in facilities {
        if counties.get(&f.county).is_none() {
            return Err(IngestError::UnknownCounty {
                facility: f.id.clone(),
                county: f.county.clone(),
            });
        }
    }
    Ok(())
}

/// Build the k-nearest-neighbor graph by haversine distance.
///
/// Each list has exactly `min(k, n-1)` entries, sorted ascending by distance
/// with ties broken by ascending facility id.
pub fn k_nearest(facilities: &[Facility], k: usize) -> Result<NeighborGraph, IngestError> {
    let n = facilities.len();
    if n < 2 {
        return Err(IngestError::TooFewFacilities(n));
    }
    let take = k.min(n - 1);
    let mut adjacency = Vec::with_capacity(n);
    for (i, f) in facilities.iter().enumerate() {
        let mut others: Vec<(f64, &str, usize)> = facilities
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(j, g)| (haversine_km((f.lat, f.lon), (g.lat, g.lon)), g.id.as_str(), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        adjacency.push(others.into_iter().take(take).map(|(_, _, j)| j).collect());
    }
    Ok(NeighborGraph { k, adjacency })
}
