//! Load a facility table and build the geographic k-nearest-neighbor
//! structure that bounds all pairwise travel-time work.
//!
//! ```text
//! cargo run --example neighbors
//! ```

use coverage_ph::ingest::{haversine_km, k_nearest, parse_facilities};

const FACILITIES_CSV: &str = "\
id,name,kind,lat,lon,county
lax1,Downtown Clinic,FQHC,34.0522,-118.2437,Los Angeles
lax2,Hollywood Health,PPHC,34.0928,-118.3287,Los Angeles
lax3,Long Beach Center,FQHC,33.7701,-118.1937,Los Angeles
sd1,San Diego Central,FQHC,32.7157,-117.1611,San Diego
sd2,Chula Vista Care,PPHC,32.6401,-117.0842,San Diego
sf1,Mission Clinic,FQHC,37.7599,-122.4148,San Francisco
sf2,Oakland Health,FQHC,37.8044,-122.2712,Alameda
fresno1,Valley Care,FQHC,36.7378,-119.7871,Fresno
";

fn main() -> Result<(), coverage_ph::Error> {
    let facilities = parse_facilities(FACILITIES_CSV.as_bytes())?;
    println!("loaded {} facilities", facilities.len());

    let k = 3;
    let graph = k_nearest(&facilities, k)?;
    for (i, neighbors) in graph.adjacency.iter().enumerate() {
        let origin = &facilities[i];
        println!("\n{} ({}, {})", origin.id, origin.name, origin.kind.as_str());
        for &j in neighbors {
            let n = &facilities[j];
            let km = haversine_km((origin.lat, origin.lon), (n.lat, n.lon));
            println!("  -> {:10} {:7.1} km  {}", n.id, km, n.name);
        }
    }

    let edges = graph.union_edges();
    println!(
        "\nunion of the directed lists: {} undirected pairs (these are the only \
         pairs ever queried or connected)",
        edges.len()
    );
    Ok(())
}
