//! The whole pipeline end to end on a generated dataset: write the input
//! CSVs and a TOML config, fetch synthetic travel times into the cache,
//! analyze both scenarios, and compare them. Everything lands in
//! `target/full-pipeline-demo/` (or a directory given as the first argument).
//!
//! ```text
//! cargo run --example full_pipeline
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use coverage_ph::config::RunConfig;
use coverage_ph::pipeline::{cmd_compare, cmd_fetch};

fn generate_dataset(dir: &std::path::Path) -> std::io::Result<()> {
    // A deterministic scatter: facility positions from a simple recurrence,
    // no RNG needed for a demo.
    let mut facilities = String::from("id,name,kind,lat,lon,county\n");
    let counties = ["North", "Central", "South"];
    let mut state = 0x2545F491u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for i in 0..100 {
        let lat = 33.0 + next() * 7.0;
        let lon = -123.0 + next() * 8.0;
        let kind = if next() < 0.35 { "PPHC" } else { "FQHC" };
        let county = counties[i % counties.len()];
        writeln!(facilities, "fac{i:03},Site {i},{kind},{lat:.5},{lon:.5},{county}").unwrap();
    }
    std::fs::write(dir.join("facilities.csv"), facilities)?;
    std::fs::write(
        dir.join("counties.csv"),
        "county,population,registered_vehicles\n\
         North,800000,560000\nCentral,2500000,2300000\nSouth,300000,330000\n",
    )?;
    Ok(())
}

fn main() -> Result<(), coverage_ph::Error> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/full-pipeline-demo"));
    std::fs::create_dir_all(&dir).map_err(|e| coverage_ph::Error::io(&dir, e))?;
    generate_dataset(&dir).map_err(|e| coverage_ph::Error::io(&dir, e))?;

    let toml = format!(
        "facilities = {:?}\ncounties = {:?}\ncache = {:?}\nout_dir = {:?}\nk = 12\n",
        dir.join("facilities.csv"),
        dir.join("counties.csv"),
        dir.join("travel_cache.jsonl"),
        dir.join("out"),
    );
    std::fs::write(dir.join("run.toml"), &toml).map_err(|e| coverage_ph::Error::io(&dir, e))?;
    let config = RunConfig::from_toml_str(&toml)?;

    println!("== fetch ==");
    for summary in cmd_fetch(&config)? {
        println!(
            "scenario {}: {} fetched, {} cached",
            summary.scenario, summary.fetched, summary.cached
        );
    }

    println!("\n== analyze + compare ==");
    let output = cmd_compare(&config)?;
    for analysis in [&output.all, &output.fqhc] {
        let s = &analysis.summary;
        println!(
            "scenario {:4}: {} H0 / {} H1 classes, mean finite H0 death {:.1} min, horizon {:.1} min",
            analysis.scenario,
            s.h0_total,
            s.h1_total,
            s.mean_finite_death_h0.unwrap_or(f64::NAN),
            s.connectivity_horizon.unwrap_or(f64::NAN),
        );
    }
    println!(
        "\npost-trim samples: {} (all) vs {} (fqhc), threshold {} min",
        output.report.n_a, output.report.n_b, output.report.trim_threshold
    );
    for test in &output.report.tests {
        println!(
            "{:15} statistic {:10.4}  one-tailed p {:.4}",
            test.name, test.statistic, test.p_one_tailed
        );
    }

    println!("\nartifacts under {}:", config.out_dir.display());
    let mut names: Vec<String> = std::fs::read_dir(&config.out_dir)
        .map_err(|e| coverage_ph::Error::io(&config.out_dir, e))?
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .collect();
    names.sort();
    for name in names {
        println!("  {name}");
    }
    println!("\nsame flow via the CLI:\n  coverage-ph fetch --config {0}\n  coverage-ph analyze --config {0} --scenario all\n  coverage-ph compare --config {0}", dir.join("run.toml").display());
    Ok(())
}
