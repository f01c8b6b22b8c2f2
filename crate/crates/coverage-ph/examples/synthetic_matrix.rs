//! Build the travel-time dissimilarity matrix with the offline synthetic
//! provider, showing each ingredient: per-mode round trips, vehicle-access
//! weighting, and the population-weighted symmetrization.
//!
//! ```text
//! cargo run --example synthetic_matrix
//! ```

use coverage_ph::export::dissimilarity_csv;
use coverage_ph::ingest::{k_nearest, parse_counties, parse_facilities};
use coverage_ph::traveltime::{
    build_dissimilarity_matrix, fetch_missing, origin_weighted_time, round_trip_mode_time,
    vehicle_access_ratio, FetchOptions, Mode, ModeTimes, Scenario, SyntheticProvider, TravelCache,
};

const FACILITIES_CSV: &str = "\
id,name,kind,lat,lon,county
a,North Clinic,FQHC,36.20,-119.00,Rural
b,Mid Clinic,PPHC,36.00,-119.00,Metro
c,South Clinic,FQHC,35.80,-119.00,Rural
d,East Clinic,FQHC,36.00,-118.70,Metro
";

const COUNTIES_CSV: &str = "\
county,population,registered_vehicles
Rural,80000,32000
Metro,2400000,2100000
";

fn main() -> Result<(), coverage_ph::Error> {
    let facilities = parse_facilities(FACILITIES_CSV.as_bytes())?;
    let counties = parse_counties(COUNTIES_CSV.as_bytes())?;
    for county in counties.iter() {
        println!(
            "county {:6} vehicle access V = {:.3}",
            county.county,
            vehicle_access_ratio(county)
        );
    }

    let graph = k_nearest(&facilities, 3)?;
    let provider = SyntheticProvider::default();
    let mut cache = TravelCache::new();
    let report = fetch_missing(&provider, &mut cache, &facilities, &graph, FetchOptions::default())?;
    println!(
        "\nsynthetic provider: {} one-way legs cached ({} modes x 2 directions per pair)",
        report.fetched,
        Mode::ALL.len()
    );

    // Walk one pair through the formula by hand.
    let (x, y) = (&facilities[0], &facilities[1]);
    let leg = |o: &coverage_ph::ingest::Facility, d: &coverage_ph::ingest::Facility, mode| {
        cache.get_minutes(&o.id, &d.id, mode).unwrap()
    };
    let round_trips = ModeTimes {
        car: round_trip_mode_time(leg(x, y, Mode::Car), leg(y, x, Mode::Car)),
        transit: round_trip_mode_time(leg(x, y, Mode::Transit), leg(y, x, Mode::Transit)),
        walk: round_trip_mode_time(leg(x, y, Mode::Walk), leg(y, x, Mode::Walk)),
    };
    println!(
        "\npair {}-{}: round trips car {:.1} min, transit {:.1} min, walk {:.1} min",
        x.id,
        y.id,
        round_trips.car.unwrap(),
        round_trips.transit.unwrap(),
        round_trips.walk.unwrap()
    );
    let vx = vehicle_access_ratio(counties.get(&x.county).unwrap());
    let vy = vehicle_access_ratio(counties.get(&y.county).unwrap());
    println!(
        "directed times: d~({},{}) = {:.1} min (V={vx:.3}), d~({},{}) = {:.1} min (V={vy:.3})",
        x.id,
        y.id,
        origin_weighted_time(&round_trips, vx).unwrap(),
        y.id,
        x.id,
        origin_weighted_time(&round_trips, vy).unwrap(),
    );

    let matrix = build_dissimilarity_matrix(&facilities, &counties, &graph, &cache, Scenario::All)?;
    println!("\nsymmetrized sparse matrix ({} entries):", matrix.len());
    print!("{}", dissimilarity_csv(&matrix, &facilities));
    Ok(())
}
