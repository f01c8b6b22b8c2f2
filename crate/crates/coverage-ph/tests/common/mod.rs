#![allow(dead_code)] // each test target compiles this module separately

//! Shared oracles and fixtures for the integration and acceptance suites.
//!
//! Everything in here is deliberately implemented independently of the
//! library's production paths: the Kruskal oracle relabels components with a
//! plain array, the naive reduction uses set-based columns with no clearing,
//! the Mann-Whitney oracle enumerates rank assignments, and the
//! Brunner-Munzel oracle counts placements pairwise without ever ranking.

use std::collections::{BTreeSet, HashMap, HashSet};

use coverage_ph::ingest::{CountyTable, Facility, FacilityKind};
use coverage_ph::traveltime::{DissimilarityMatrix, Scenario};
use itertools::Itertools;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Minimum-spanning-forest oracle
// ---------------------------------------------------------------------------

/// Kruskal by explicit component relabeling. Returns the accepted edge
/// weights, ascending.
pub fn kruskal_msf_weights(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut label: Vec<usize> = (0..n).collect();
    let mut sorted = edges.to_vec();
    sorted.sort_by(|a, b| a.2.total_cmp(&b.2).then_with(|| (a.0, a.1).cmp(&(b.0, b.1))));
    let mut weights = Vec::new();
    for (u, v, w) in sorted {
        let (lu, lv) = (label[u], label[v]);
        if lu != lv {
            for l in label.iter_mut() {
                if *l == lv {
                    *l = lu;
                }
            }
            weights.push(w);
        }
    }
    weights.sort_by(f64::total_cmp);
    weights
}

// ---------------------------------------------------------------------------
// Naive boundary-matrix reduction oracle
// ---------------------------------------------------------------------------

/// Plain left-to-right reduction over every column in index order, columns as
/// sets. No clearing, no dimension ordering.
pub fn naive_reduction(columns: &[Vec<usize>]) -> (Vec<(usize, usize)>, Vec<usize>) {
    let n = columns.len();
    let mut reduced: Vec<BTreeSet<usize>> = columns
        .iter()
        .map(|c| c.iter().copied().collect())
        .collect();
    let mut owner_of_low: HashMap<usize, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for j in 0..n {
        while let Some(&low) = reduced[j].iter().next_back() {
            let Some(&k) = owner_of_low.get(&low) else {
                break;
            };
            let other = reduced[k].clone();
            reduced[j] = reduced[j].symmetric_difference(&other).copied().collect();
        }
        if let Some(&low) = reduced[j].iter().next_back() {
            owner_of_low.insert(low, j);
            pairs.push((low, j));
        }
    }
    let destroyers: HashSet<usize> = pairs.iter().map(|&(_, d)| d).collect();
    let creators: HashSet<usize> = pairs.iter().map(|&(c, _)| c).collect();
    let essential = (0..n)
        .filter(|x| !destroyers.contains(x) && !creators.contains(x))
        .collect();
    pairs.sort_unstable();
    (pairs, essential)
}

// ---------------------------------------------------------------------------
// Rank-test oracles
// ---------------------------------------------------------------------------

/// Exact one-tailed Mann-Whitney p for "a stochastically less than b" by
/// enumerating every way to choose a's rank positions. Tie-free input only.
pub fn mann_whitney_enumeration_p(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len();
    let n = b.len();
    let u_observed: usize = a
        .iter()
        .map(|&x| b.iter().filter(|&&y| x > y).count())
        .sum();
    let total_ranks: Vec<usize> = (1..=m + n).collect();
    let mut at_most = 0usize;
    let mut total = 0usize;
    for combo in total_ranks.iter().combinations(m) {
        let rank_sum: usize = combo.into_iter().sum();
        let u = rank_sum - m * (m + 1) / 2;
        total += 1;
        if u <= u_observed {
            at_most += 1;
        }
    }
    at_most as f64 / total as f64
}

/// Brunner-Munzel statistic recomputed from pairwise placement counts: no
/// ranking at all. `place_b(x)` counts b-values below x (ties count half);
/// the statistic is m*n*(p_hat - 1/2) / sqrt(m*v_a + n*v_b) with v_a, v_b the
/// sample variances of the placements.
pub fn brunner_munzel_statistic_oracle(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() as f64;
    let n = b.len() as f64;
    let place = |values: &[f64], x: f64| -> f64 {
        values
            .iter()
            .map(|&y| {
                if y < x {
                    1.0
                } else if y == x {
                    0.5
                } else {
                    0.0
                }
            })
            .sum()
    };
    let place_b: Vec<f64> = a.iter().map(|&x| place(b, x)).collect();
    let place_a: Vec<f64> = b.iter().map(|&y| place(a, y)).collect();
    let mean_pb = place_b.iter().sum::<f64>() / m;
    let mean_pa = place_a.iter().sum::<f64>() / n;
    let v_a = place_b.iter().map(|p| (p - mean_pb).powi(2)).sum::<f64>() / (m - 1.0);
    let v_b = place_a.iter().map(|p| (p - mean_pa).powi(2)).sum::<f64>() / (n - 1.0);
    let p_hat = mean_pa / m;
    m * n * (p_hat - 0.5) / (m * v_a + n * v_b).sqrt()
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Complete symmetric matrix with values uniform in (1, 100).
pub fn random_complete_matrix(rng: &mut ChaCha8Rng, n: usize) -> DissimilarityMatrix {
    let mut m = DissimilarityMatrix::new(n, Scenario::All);
    for i in 0..n {
        for j in (i + 1)..n {
            m.insert(i, j, rng.random_range(1.0..100.0));
        }
    }
    m
}

/// Sparse symmetric matrix: each pair kept with probability `keep`.
pub fn random_sparse_matrix(rng: &mut ChaCha8Rng, n: usize, keep: f64) -> DissimilarityMatrix {
    let mut m = DissimilarityMatrix::new(n, Scenario::All);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_range(0.0..1.0) < keep {
                m.insert(i, j, rng.random_range(1.0..100.0));
            }
        }
    }
    m
}

/// The unit-square fixture: sides 1, diagonals sqrt(2).
pub fn square_matrix() -> DissimilarityMatrix {
    let s = std::f64::consts::SQRT_2;
    let mut m = DissimilarityMatrix::new(4, Scenario::All);
    for &(i, j, v) in &[
        (0usize, 1usize, 1.0),
        (1, 2, 1.0),
        (2, 3, 1.0),
        (0, 3, 1.0),
        (0, 2, s),
        (1, 3, s),
    ] {
        m.insert(i, j, v);
    }
    m
}

// ---------------------------------------------------------------------------
// Synthetic datasets
// ---------------------------------------------------------------------------

pub fn facility(id: &str, kind: FacilityKind, lat: f64, lon: f64, county: &str) -> Facility {
    Facility {
        id: id.to_string(),
        name: id.to_string(),
        kind,
        lat,
        lon,
        county: county.to_string(),
    }
}

/// Degrees of longitude per kilometer along the equator.
pub fn km_to_equator_degrees(km: f64) -> f64 {
    (km / coverage_ph::ingest::EARTH_RADIUS_KM).to_degrees()
}

/// Corridor fixture for the removal comparison: a mainline of FQHCs with a
/// PPHC at every midpoint, plus a remote FQHC cluster reachable only through
/// a PPHC bridge. Removing the PPHCs roughly doubles every mainline gap and
/// disconnects the remote cluster. All facilities sit on the equator so that
/// travel time is proportional to the longitude gap; with every county fully
/// motorized the synthetic round-trip car time for a gap of g km is
/// 2*g/65*60 minutes, so the minimum-spanning-tree structure (and hence the
/// finite H0 deaths) is known by construction.
pub fn pphc_removal_fixture() -> (Vec<Facility>, CountyTable) {
    let mut facilities = Vec::new();
    let mut lon_km = 0.0;
    let mainline_fqhcs = 40;
    for i in 0..mainline_fqhcs {
        facilities.push(facility(
            &format!("mf{i:02}"),
            FacilityKind::Fqhc,
            0.0,
            km_to_equator_degrees(lon_km),
            "Main",
        ));
        if i + 1 < mainline_fqhcs {
            let gap = 18.0 + (i % 8) as f64; // 18..25 km
            facilities.push(facility(
                &format!("mp{i:02}"),
                FacilityKind::Pphc,
                0.0,
                km_to_equator_degrees(lon_km + gap / 2.0),
                "Main",
            ));
            lon_km += gap;
        }
    }
    // Bridge of PPHCs every 20 km across a 300 km gap.
    for i in 1..=14 {
        facilities.push(facility(
            &format!("bp{i:02}"),
            FacilityKind::Pphc,
            0.0,
            km_to_equator_degrees(lon_km + 20.0 * i as f64),
            "Main",
        ));
    }
    // Remote FQHC cluster: 6 facilities spaced 10 km.
    let cluster_start = lon_km + 300.0;
    for i in 0..6 {
        facilities.push(facility(
            &format!("rf{i:02}"),
            FacilityKind::Fqhc,
            0.0,
            km_to_equator_degrees(cluster_start + 10.0 * i as f64),
            "Main",
        ));
    }
    let counties = coverage_ph::ingest::parse_counties(
        "county,population,registered_vehicles\nMain,100000,120000\n".as_bytes(),
    )
    .unwrap();
    (facilities, counties)
}

/// Seeded random dataset: facilities scattered over a bounding box with a
/// PPHC/FQHC mix and a handful of counties with different vehicle ratios.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Facility>, CountyTable) {
    let county_rows = [
        ("Alder", 250_000u64, 190_000u64),
        ("Briar", 1_200_000, 800_000),
        ("Cinder", 90_000, 95_000),
        ("Dune", 400_000, 120_000),
    ];
    let facilities = (0..n)
        .map(|i| {
            let kind = if rng.random_range(0.0..1.0) < 0.35 {
                FacilityKind::Pphc
            } else {
                FacilityKind::Fqhc
            };
            let county = county_rows[rng.random_range(0..county_rows.len())].0;
            facility(
                &format!("s{i:03}"),
                kind,
                rng.random_range(32.0..41.0),
                rng.random_range(-124.0..-114.0),
                county,
            )
        })
        .collect();
    let mut csv = String::from("county,population,registered_vehicles\n");
    for (name, pop, veh) in county_rows {
        csv.push_str(&format!("{name},{pop},{veh}\n"));
    }
    let counties = coverage_ph::ingest::parse_counties(csv.as_bytes()).unwrap();
    (facilities, counties)
}

/// Serialize facilities back to the CSV interface format.
pub fn facilities_csv(facilities: &[Facility]) -> String {
    let mut out = String::from("id,name,kind,lat,lon,county\n");
    for f in facilities {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            f.id,
            f.name,
            f.kind.as_str(),
            f.lat,
            f.lon,
            f.county
        ));
    }
    out
}

/// Serialize a county table back to the CSV interface format.
pub fn counties_csv(counties: &CountyTable) -> String {
    let mut out = String::from("county,population,registered_vehicles\n");
    for c in counties.iter() {
        out.push_str(&format!(
            "{},{},{}\n",
            c.county, c.population, c.registered_vehicles
        ));
    }
    out
}
