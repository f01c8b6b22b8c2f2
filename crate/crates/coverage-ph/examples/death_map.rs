//! Geolocate coverage gaps: compute persistence for a small network and
//! export the death simplices as GeoJSON (H0 deaths as the merging edge, H1
//! deaths as the filling triangle). Pipe the output into any GIS viewer.
//!
//! ```text
//! cargo run --example death_map > gaps.geojson
//! ```

use coverage_ph::export::death_geojson;
use coverage_ph::filtration::build_filtration;
use coverage_ph::ingest::{k_nearest, parse_counties, parse_facilities};
use coverage_ph::persistence::{extract_death_simplices, Diagram};
use coverage_ph::traveltime::{
    build_dissimilarity_matrix, fetch_missing, FetchOptions, Scenario, SyntheticProvider,
    TravelCache,
};

// Two towns and an isolated outpost: the outpost's merge is the big gap.
const FACILITIES_CSV: &str = "\
id,name,kind,lat,lon,county
t1a,Town One A,FQHC,36.00,-120.00,Plain
t1b,Town One B,FQHC,36.05,-120.05,Plain
t1c,Town One C,PPHC,36.10,-119.95,Plain
t2a,Town Two A,FQHC,36.60,-119.40,Plain
t2b,Town Two B,FQHC,36.65,-119.35,Plain
t2c,Town Two C,FQHC,36.55,-119.45,Plain
far1,Outpost,FQHC,37.90,-121.50,Plain
";

const COUNTIES_CSV: &str = "county,population,registered_vehicles\nPlain,500000,350000\n";

fn main() -> Result<(), coverage_ph::Error> {
    let facilities = parse_facilities(FACILITIES_CSV.as_bytes())?;
    let counties = parse_counties(COUNTIES_CSV.as_bytes())?;
    let graph = k_nearest(&facilities, 4)?;
    let provider = SyntheticProvider::default();
    let mut cache = TravelCache::new();
    fetch_missing(&provider, &mut cache, &facilities, &graph, FetchOptions::default())?;
    let matrix = build_dissimilarity_matrix(&facilities, &counties, &graph, &cache, Scenario::All)?;
    let filtration = build_filtration(&matrix)?;
    let diagram = Diagram::compute(&filtration, "all");

    // Keep gaps that take at least an hour of round-trip travel to close.
    let min_death = 60.0;
    let features = extract_death_simplices(&diagram.pairs, &facilities, min_death);
    eprintln!(
        "{} of {} finite classes die at or above {min_death} minutes",
        features.len(),
        diagram.pairs.iter().filter(|p| !p.is_essential()).count()
    );
    for f in &features {
        eprintln!(
            "  H{} death {:.1} min at [{}]",
            f.dim,
            f.death,
            f.facility_ids.join(", ")
        );
    }

    println!(
        "{}",
        serde_json::to_string_pretty(&death_geojson(&features)).expect("geojson serializes")
    );
    Ok(())
}
