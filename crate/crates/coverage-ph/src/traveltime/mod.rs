//! Travel-time dissimilarity over facility pairs.
//!
//! The pairwise value fed to the filtration is built in three steps:
//! round-trip per-mode times `t_mode = t(x,y) + t(y,x)`, the origin-weighted
//! time
//!
//! ```text
//! d~(x,y) = V(C(x)) * min{t_car, t_transit, t_walk}
//!         + (1 - V(C(x))) * min{t_transit, t_walk}
//! ```
//!
//! where `V(C(x))` is the county's vehicle-access ratio, and finally the
//! population-weighted symmetrization
//!
//! ```text
//! d = (P_x * d~(x,y) + P_y * d~(y,x)) / (P_x + P_y).
//! ```
//!
//! `d` is symmetric but deliberately not a metric: no triangle inequality is
//! assumed or asserted anywhere downstream. Pairs outside the union of the
//! k-nearest-neighbor lists are simply absent (treated as infinitely far; no
//! edge ever forms).

mod cache;
mod provider;

pub use cache::{CacheKey, CacheRecord, TravelCache};
pub use provider::{
    synthetic_mode_time, HttpRoutesProvider, Mode, ModeSpeeds, RoutingProvider, SyntheticProvider,
    DEFAULT_ROUTES_ENDPOINT,
};

use std::collections::BTreeMap;
use std::sync::mpsc;
use std::sync::Mutex;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::TravelTimeError;
use crate::ingest::{CountyStats, CountyTable, Facility, FacilityKind, NeighborGraph};

/// Which facilities participate in an analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// PPHCs and FQHCs together.
    All,
    /// FQHCs only: the facility set after the modeled PPHC closures.
    #[serde(rename = "fqhc")]
    FqhcOnly,
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::All => "all",
            Scenario::FqhcOnly => "fqhc",
        }
    }

    pub fn parse(token: &str) -> Option<Scenario> {
        match token {
            "all" => Some(Scenario::All),
            "fqhc" | "fqhc_only" | "fqhc-only" => Some(Scenario::FqhcOnly),
            _ => None,
        }
    }

    pub fn filter(&self, facilities: &[Facility]) -> Vec<Facility> {
        match self {
            Scenario::All => facilities.to_vec(),
            Scenario::FqhcOnly => facilities
                .iter()
                .filter(|f| f.kind == FacilityKind::Fqhc)
                .cloned()
                .collect(),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Round-trip minutes per mode; `None` means the mode has no route in at
/// least one direction.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModeTimes {
    pub car: Option<f64>,
    pub transit: Option<f64>,
    pub walk: Option<f64>,
}

impl ModeTimes {
    fn min_all(&self) -> Option<f64> {
        [self.car, self.transit, self.walk]
            .into_iter()
            .flatten()
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
    }

    fn min_carless(&self) -> Option<f64> {
        [self.transit, self.walk]
            .into_iter()
            .flatten()
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
    }
}

/// Proportion of the county population with car access, clamped to [0, 1].
/// Registration counts can exceed population (fleets, multi-car households);
/// without the clamp the carless weight would go negative.
pub fn vehicle_access_ratio(county: &CountyStats) -> f64 {
    (county.registered_vehicles as f64 / county.population as f64).min(1.0)
}

/// Round-trip time for one mode: sum of the two one-way legs, absent if
/// either leg is absent.
pub fn round_trip_mode_time(leg_xy: Option<f64>, leg_yx: Option<f64>) -> Option<f64> {
    match (leg_xy, leg_yx) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    }
}

/// Origin-weighted travel time from the round-trip mode times and the origin
/// county's vehicle-access ratio. Minima range over present modes only.
/// Returns `None` when both transit and walk are absent: the carless share of
/// the population has no way to make the trip, which callers surface as a
/// hard error rather than silently assuming car access.
pub fn origin_weighted_time(round_trips: &ModeTimes, vehicle_access: f64) -> Option<f64> {
    let carless = round_trips.min_carless()?;
    let best = round_trips.min_all().unwrap_or(carless);
    Some(vehicle_access * best + (1.0 - vehicle_access) * carless)
}

/// Population-weighted average of the two directed times.
pub fn symmetrized_dissimilarity(d_xy: f64, d_yx: f64, pop_x: u64, pop_y: u64) -> f64 {
    let px = pop_x as f64;
    let py = pop_y as f64;
    (px * d_xy + py * d_yx) / (px + py)
}

/// Full per-pair computation: vehicle-access ratios for both origin counties,
/// both directed origin-weighted times, then the symmetrized value.
pub fn pair_dissimilarity(
    x: &Facility,
    y: &Facility,
    round_trips: &ModeTimes,
    counties: &CountyTable,
) -> Result<f64, TravelTimeError> {
    let county_of = |f: &Facility| {
        counties.get(&f.county).ok_or_else(|| TravelTimeError::UnknownCounty {
            facility: f.id.clone(),
            county: f.county.clone(),
        })
    };
    let cx = county_of(x)?;
    let cy = county_of(y)?;
    let stranded = || TravelTimeError::Stranded {
        a: x.id.clone(),
        b: y.id.clone(),
    };
    let d_xy = origin_weighted_time(round_trips, vehicle_access_ratio(cx)).ok_or_else(stranded)?;
    let d_yx = origin_weighted_time(round_trips, vehicle_access_ratio(cy)).ok_or_else(stranded)?;
    Ok(symmetrized_dissimilarity(d_xy, d_yx, cx.population, cy.population))
}

/// Sparse symmetric dissimilarity matrix in minutes. Entries exist exactly
/// for pairs inside the k-nearest-neighbor union; everything else is treated
/// as infinitely dissimilar.
#[derive(Debug, Clone)]
pub struct DissimilarityMatrix {
    pub n: usize,
    pub scenario: Scenario,
    entries: BTreeMap<(usize, usize), f64>,
}

impl DissimilarityMatrix {
    pub fn new(n: usize, scenario: Scenario) -> Self {
        DissimilarityMatrix {
            n,
            scenario,
            entries: BTreeMap::new(),
        }
    }

    fn canonical(i: usize, j: usize) -> (usize, usize) {
        (i.min(j), i.max(j))
    }

    pub fn insert(&mut self, i: usize, j: usize, minutes: f64) {
        assert!(i != j, "no self-pairs");
        self.entries.insert(Self::canonical(i, j), minutes);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries.get(&Self::canonical(i, j)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical (i, j) order, i < j.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

/// All directed legs the cache must contain to analyze a facility set with
/// this neighbor graph: both directions of every union k-NN pair, for every
/// mode.
pub fn required_legs(graph: &NeighborGraph) -> Vec<(usize, usize, Mode)> {
    let mut legs = Vec::new();
    for (i, j) in graph.union_edges() {
        for mode in Mode::ALL {
            legs.push((i, j, mode));
            legs.push((j, i, mode));
        }
    }
    legs.sort();
    legs
}

fn call_with_retries(
    provider: &dyn RoutingProvider,
    origin: &Facility,
    dest: &Facility,
    mode: Mode,
    attempts: usize,
) -> Result<Option<f64>, TravelTimeError> {
    let attempts = attempts.max(1);
    let mut last_error = String::new();
    for attempt in 0..attempts {
        if attempt > 0 {
            std::thread::sleep(std::time::Duration::from_millis(100 * attempt as u64));
        }
        match provider.one_way_seconds(origin, dest, mode) {
            Ok(seconds) => return Ok(seconds),
            Err(message) => last_error = message,
        }
    }
    Err(TravelTimeError::ProviderFailure {
        provider: provider.name().to_string(),
        origin: origin.id.clone(),
        dest: dest.id.clone(),
        mode: mode.as_str().to_string(),
        message: last_error,
    })
}

fn now_rfc3339() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Cache-first one-way fetch in minutes. A cache hit performs zero provider
/// calls; a miss queries the provider (with bounded retries) and records the
/// result, including "no route" absences.
pub fn fetch_one_way(
    provider: &dyn RoutingProvider,
    cache: &mut TravelCache,
    origin: &Facility,
    dest: &Facility,
    mode: Mode,
    attempts: usize,
) -> Result<Option<f64>, TravelTimeError> {
    if let Some(seconds) = cache.get_seconds(&origin.id, &dest.id, mode) {
        return Ok(seconds.map(|s| s / 60.0));
    }
    let seconds = call_with_retries(provider, origin, dest, mode, attempts)?;
    cache.insert(CacheRecord {
        o: origin.id.clone(),
        d: dest.id.clone(),
        mode,
        seconds,
        provider: provider.name().to_string(),
        fetched: now_rfc3339(),
    })?;
    Ok(seconds.map(|s| s / 60.0))
}

#[derive(Debug, Clone, Copy)]
pub struct FetchOptions {
    /// Bound on in-flight provider requests.
    pub concurrency: usize,
    /// Attempts per leg before recording a failure.
    pub attempts: usize,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions {
            concurrency: 4,
            attempts: 3,
        }
    }
}

#[derive(Debug, Default)]
pub struct FetchReport {
    pub fetched: usize,
    pub cached: usize,
    pub failures: Vec<TravelTimeError>,
}

type LegOutcome = ((usize, usize, Mode), Result<Option<f64>, TravelTimeError>);

/// Fetch every missing leg for the facility set, bounded-concurrently.
///
/// Provider failures do not abort the run: successful legs are still merged
/// into the cache (so a partial cache can be persisted) and the failures are
/// returned for the caller to summarize. Results are merged in key order, so
/// the cache contents are independent of worker scheduling.
pub fn fetch_missing(
    provider: &dyn RoutingProvider,
    cache: &mut TravelCache,
    facilities: &[Facility],
    graph: &NeighborGraph,
    options: FetchOptions,
) -> Result<FetchReport, TravelTimeError> {
    let legs = required_legs(graph);
    let missing: Vec<(usize, usize, Mode)> = legs
        .iter()
        .copied()
        .filter(|&(i, j, mode)| !cache.contains(&facilities[i].id, &facilities[j].id, mode))
        .collect();
    let cached = legs.len() - missing.len();
    if missing.is_empty() {
        return Ok(FetchReport {
            fetched: 0,
            cached,
            failures: Vec::new(),
        });
    }

    let fetched_at = now_rfc3339();
    let queue = Mutex::new(missing.clone().into_iter().collect::<Vec<_>>());
    let (tx, rx) = mpsc::channel();
    let workers = options.concurrency.clamp(1, missing.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || loop {
                let leg = {
                    let mut q = queue.lock().expect("fetch queue lock");
                    q.pop()
                };
                let Some((i, j, mode)) = leg else { break };
                let result =
                    call_with_retries(provider, &facilities[i], &facilities[j], mode, options.attempts);
                if tx.send(((i, j, mode), result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });

    let mut results: Vec<LegOutcome> = rx.into_iter().collect();
    results.sort_by_key(|((i, j, mode), _)| (*i, *j, *mode));

    let mut report = FetchReport {
        fetched: 0,
        cached,
        failures: Vec::new(),
    };
    for ((i, j, mode), result) in results {
        match result {
            Ok(seconds) => {
                cache.insert(CacheRecord {
                    o: facilities[i].id.clone(),
                    d: facilities[j].id.clone(),
                    mode,
                    seconds,
                    provider: provider.name().to_string(),
                    fetched: fetched_at.clone(),
                })?;
                report.fetched += 1;
            }
            Err(e) => report.failures.push(e),
        }
    }
    Ok(report)
}

/// Assemble the sparse dissimilarity matrix for an already-filtered facility
/// set from a complete cache. Missing legs make the whole build fail with the
/// full list, so an interrupted fetch is diagnosed in one pass.
pub fn build_dissimilarity_matrix(
    facilities: &[Facility],
    counties: &CountyTable,
    graph: &NeighborGraph,
    cache: &TravelCache,
    scenario: Scenario,
) -> Result<DissimilarityMatrix, TravelTimeError> {
    let mut matrix = DissimilarityMatrix::new(facilities.len(), scenario);
    let mut missing = Vec::new();
    for (i, j) in graph.union_edges() {
        let x = &facilities[i];
        let y = &facilities[j];
        let mut leg = |o: &Facility, d: &Facility, mode: Mode| -> Option<Option<f64>> {
            let cached = cache.get_minutes(&o.id, &d.id, mode);
            if cached.is_none() {
                missing.push(format!("{}->{} ({})", o.id, d.id, mode));
            }
            cached
        };
        let mut round_trips = ModeTimes::default();
        let mut complete = true;
        for mode in Mode::ALL {
            let xy = leg(x, y, mode);
            let yx = leg(y, x, mode);
            match (xy, yx) {
                (Some(a), Some(b)) => {
                    let rt = round_trip_mode_time(a, b);
                    match mode {
                        Mode::Car => round_trips.car = rt,
                        Mode::Transit => round_trips.transit = rt,
                        Mode::Walk => round_trips.walk = rt,
                    }
                }
                _ => complete = false,
            }
        }
        if !complete {
            continue;
        }
        let d = pair_dissimilarity(x, y, &round_trips, counties)?;
        matrix.insert(i, j, d);
    }
    if !missing.is_empty() {
        return Err(TravelTimeError::CacheIncomplete { missing });
    }
    Ok(matrix)
}
