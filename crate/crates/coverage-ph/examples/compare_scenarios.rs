//! Compare coverage with and without PPHC facilities: compute both diagrams,
//! trim short deaths, log-transform, and run the one-tailed Mann-Whitney and
//! Brunner-Munzel tests with the alternative "full-network deaths are
//! stochastically smaller".
//!
//! The dataset is a corridor of FQHCs with a PPHC at most midpoints (every
//! fourth gap has none), so the removal roughly doubles most merge times
//! while leaving the distributions with some overlap.
//!
//! ```text
//! cargo run --example compare_scenarios
//! ```

use coverage_ph::filtration::build_filtration;
use coverage_ph::ingest::{k_nearest, parse_counties, Facility, FacilityKind};
use coverage_ph::persistence::Diagram;
use coverage_ph::stats::{
    brunner_munzel_one_sided, log_transform, mann_whitney_one_sided, trim_short_deaths,
    Alternative,
};
use coverage_ph::traveltime::{
    build_dissimilarity_matrix, fetch_missing, FetchOptions, Scenario, SyntheticProvider,
    TravelCache,
};

fn corridor() -> Vec<Facility> {
    let km = |k: f64| (k / coverage_ph::ingest::EARTH_RADIUS_KM).to_degrees();
    let mut facilities = Vec::new();
    let mut lon_km = 0.0;
    for i in 0..24 {
        facilities.push(Facility {
            id: format!("f{i:02}"),
            name: format!("Clinic {i}"),
            kind: FacilityKind::Fqhc,
            lat: 0.0,
            lon: km(lon_km),
            county: "Corridor".into(),
        });
        if i < 23 {
            let gap = 18.0 + (i % 6) as f64;
            if i % 4 != 3 {
                facilities.push(Facility {
                    id: format!("p{i:02}"),
                    name: format!("PPHC {i}"),
                    kind: FacilityKind::Pphc,
                    lat: 0.0,
                    lon: km(lon_km + gap / 2.0),
                    county: "Corridor".into(),
                });
            }
            lon_km += gap;
        }
    }
    facilities
}

fn scenario_deaths(
    facilities: &[Facility],
    counties: &coverage_ph::ingest::CountyTable,
    scenario: Scenario,
) -> Result<Vec<f64>, coverage_ph::Error> {
    let subset = scenario.filter(facilities);
    let graph = k_nearest(&subset, 5)?;
    let provider = SyntheticProvider::default();
    let mut cache = TravelCache::new();
    fetch_missing(&provider, &mut cache, &subset, &graph, FetchOptions::default())?;
    let matrix = build_dissimilarity_matrix(&subset, counties, &graph, &cache, scenario)?;
    let diagram = Diagram::compute(&build_filtration(&matrix)?, scenario.label());
    let deaths = diagram.finite_deaths(0);
    println!(
        "scenario {:4}: {} facilities, mean finite H0 death {:.2} min, horizon {:.2} min",
        scenario.label(),
        subset.len(),
        diagram.summary().mean_finite_death_h0.unwrap(),
        diagram.connectivity_horizon().unwrap()
    );
    Ok(deaths)
}

fn main() -> Result<(), coverage_ph::Error> {
    let facilities = corridor();
    let counties = parse_counties(
        "county,population,registered_vehicles\nCorridor,150000,140000\n".as_bytes(),
    )?;

    let deaths_all = scenario_deaths(&facilities, &counties, Scenario::All)?;
    let deaths_fqhc = scenario_deaths(&facilities, &counties, Scenario::FqhcOnly)?;

    let trim = 15.0;
    let sample_all = trim_short_deaths(&deaths_all, trim, "all")?;
    let sample_fqhc = trim_short_deaths(&deaths_fqhc, trim, "fqhc")?;
    println!(
        "\npost-trim (> {trim} min): {} vs {} observations",
        sample_all.len(),
        sample_fqhc.len()
    );

    let log_all = log_transform(&sample_all)?;
    let log_fqhc = log_transform(&sample_fqhc)?;
    for result in [
        mann_whitney_one_sided(&log_all, &log_fqhc, Alternative::Less)?,
        brunner_munzel_one_sided(&log_all, &log_fqhc, Alternative::Less)?,
    ] {
        println!(
            "{:15} statistic {:10.4}  one-tailed p {:.3e}   ({})",
            result.name, result.statistic, result.p_one_tailed, result.alternative
        );
    }
    Ok(())
}
