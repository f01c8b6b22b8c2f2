//! End-to-end orchestration: fetch travel times into the cache, analyze a
//! scenario into its artifacts, and compare the two scenarios' death-time
//! distributions.

use std::path::PathBuf;

use crate::config::{DeathPool, NeighborMode, ProviderChoice, RunConfig};
use crate::error::Error;
use crate::export;
use crate::filtration::build_filtration;
use crate::ingest::{
    k_nearest, parse_counties, parse_facilities, validate_counties, CountyTable, Facility,
    NeighborGraph,
};
use crate::persistence::{extract_death_simplices, Diagram, DiagramSummary};
use crate::stats::{
    brunner_munzel_one_sided, log_transform, mann_whitney_one_sided, trim_short_deaths,
    Alternative, Sample,
};
use crate::traveltime::{
    build_dissimilarity_matrix, fetch_missing, FetchOptions, HttpRoutesProvider, RoutingProvider,
    Scenario, SyntheticProvider, TravelCache,
};

/// Validated inputs shared by all subcommands.
pub struct Datasets {
    pub facilities: Vec<Facility>,
    pub counties: CountyTable,
}

pub fn load_datasets(config: &RunConfig) -> Result<Datasets, Error> {
    let facilities_file =
        std::fs::File::open(&config.facilities).map_err(|e| Error::io(&config.facilities, e))?;
    let facilities = parse_facilities(facilities_file)?;
    let counties_file =
        std::fs::File::open(&config.counties).map_err(|e| Error::io(&config.counties, e))?;
    let counties = parse_counties(counties_file)?;
    validate_counties(&facilities, &counties)?;
    Ok(Datasets {
        facilities,
        counties,
    })
}

pub fn make_provider(config: &RunConfig) -> Result<Box<dyn RoutingProvider>, Error> {
    match config.provider {
        ProviderChoice::Synthetic => Ok(Box::new(SyntheticProvider::new(config.speeds))),
        ProviderChoice::Live => {
            let provider = HttpRoutesProvider::from_env().map_err(Error::Config)?;
            Ok(Box::new(provider))
        }
    }
}

/// Neighbor graph for a scenario's facility set. `Recompute` runs the
/// k-nearest-neighbor search on the filtered set; `Induced` restricts the
/// full-set lists to surviving facilities (lists may then be shorter than k).
pub fn scenario_graph(
    all_facilities: &[Facility],
    scenario_facilities: &[Facility],
    k: usize,
    mode: NeighborMode,
) -> Result<NeighborGraph, Error> {
    match mode {
        NeighborMode::Recompute => Ok(k_nearest(scenario_facilities, k)?),
        NeighborMode::Induced => {
            let full = k_nearest(all_facilities, k)?;
            let mut new_index = vec![None; all_facilities.len()];
            for (new, facility) in scenario_facilities.iter().enumerate() {
                let old = all_facilities
                    .iter()
                    .position(|f| f.id == facility.id)
                    .expect("scenario facility comes from the full set");
                new_index[old] = Some(new);
            }
            let adjacency = all_facilities
                .iter()
                .enumerate()
                .filter(|(old, _)| new_index[*old].is_some())
                .map(|(old, _)| {
                    full.adjacency[old]
                        .iter()
                        .filter_map(|&n| new_index[n])
                        .collect()
                })
                .collect();
            Ok(NeighborGraph { k, adjacency })
        }
    }
}

/// Outcome of `fetch` for one scenario's facility set.
pub struct FetchSummary {
    pub scenario: Scenario,
    pub fetched: usize,
    pub cached: usize,
    pub failures: Vec<String>,
}

/// Fetch travel times for both scenarios' neighbor structures into the cache.
///
/// The cache is persisted even when some legs fail, so a partial run is never
/// wasted; failures are reported per pair for the caller to summarize.
pub fn cmd_fetch(config: &RunConfig) -> Result<Vec<FetchSummary>, Error> {
    let data = load_datasets(config)?;
    let provider = make_provider(config)?;
    let mut cache = TravelCache::load(&config.cache)?;
    let options = FetchOptions {
        concurrency: config.concurrency,
        attempts: 3,
    };

    let mut summaries = Vec::new();
    for scenario in [Scenario::All, Scenario::FqhcOnly] {
        let facilities = scenario.filter(&data.facilities);
        if facilities.len() < 2 {
            continue;
        }
        let graph = scenario_graph(&data.facilities, &facilities, config.k, config.neighbor_mode)?;
        let report = match fetch_missing(provider.as_ref(), &mut cache, &facilities, &graph, options)
        {
            Ok(report) => report,
            Err(e) => {
                // Persist whatever made it into the cache before failing.
                save_cache(&cache, &config.cache)?;
                return Err(e.into());
            }
        };
        summaries.push(FetchSummary {
            scenario,
            fetched: report.fetched,
            cached: report.cached,
            failures: report.failures.iter().map(|e| e.to_string()).collect(),
        });
    }
    save_cache(&cache, &config.cache)?;
    Ok(summaries)
}

fn save_cache(cache: &TravelCache, path: &std::path::Path) -> Result<(), Error> {
    cache.save(path).map_err(|io| {
        crate::error::TravelTimeError::CacheWrite {
            path: path.to_path_buf(),
            message: io.to_string(),
        }
        .into()
    })
}

/// Artifacts and summary produced by analyzing one scenario.
#[derive(Debug)]
pub struct AnalyzeOutput {
    pub scenario: Scenario,
    pub diagram: Diagram,
    pub summary: DiagramSummary,
    pub artifacts: Vec<PathBuf>,
}

pub fn cmd_analyze(config: &RunConfig, scenario: Scenario) -> Result<AnalyzeOutput, Error> {
    let data = load_datasets(config)?;
    let facilities = scenario.filter(&data.facilities);
    if facilities.len() < 2 {
        return Err(crate::error::IngestError::TooFewFacilities(facilities.len()).into());
    }
    let graph = scenario_graph(&data.facilities, &facilities, config.k, config.neighbor_mode)?;
    let cache = TravelCache::load(&config.cache)?;
    let matrix = build_dissimilarity_matrix(&facilities, &data.counties, &graph, &cache, scenario)?;
    let filtration = build_filtration(&matrix)?;
    let diagram = Diagram::compute(&filtration, scenario.label());
    let summary = diagram.summary();
    let features = extract_death_simplices(&diagram.pairs, &facilities, config.death_filter);

    let label = scenario.label();
    let mut artifacts = Vec::new();
    let write = |name: String, contents: String| -> Result<PathBuf, Error> {
        let path = config.out_dir.join(name);
        export::write_text(&path, &contents)?;
        Ok(path)
    };
    artifacts.push(write(
        format!("pairs_{label}.csv"),
        export::pairs_csv(&diagram.pairs, &facilities),
    )?);
    artifacts.push(write(
        format!("dissimilarity_{label}.csv"),
        export::dissimilarity_csv(&matrix, &facilities),
    )?);
    artifacts.push(write(
        format!("death_simplices_{label}.geojson"),
        format!(
            "{}\n",
            serde_json::to_string_pretty(&export::death_geojson(&features))
                .expect("geojson serializes")
        ),
    )?);
    artifacts.push(write(
        format!("diagram_{label}.svg"),
        export::diagram_svg(&diagram),
    )?);
    if config.dump_filtration {
        artifacts.push(write(
            format!("filtration_{label}.csv"),
            export::filtration_csv(&filtration),
        )?);
    }

    Ok(AnalyzeOutput {
        scenario,
        diagram,
        summary,
        artifacts,
    })
}

/// Outcome of the scenario comparison.
pub struct CompareOutput {
    pub all: AnalyzeOutput,
    pub fqhc: AnalyzeOutput,
    pub sample_all: Sample,
    pub sample_fqhc: Sample,
    pub report: export::SignificanceReport,
    pub report_path: PathBuf,
    /// Test warnings (e.g. sample sizes below a test's comfortable regime);
    /// not part of the report schema.
    pub warnings: Vec<String>,
}

fn deaths_for_pool(diagram: &Diagram, pool: DeathPool) -> Vec<f64> {
    match pool {
        DeathPool::H0 => diagram.finite_deaths(0),
        DeathPool::Pooled => {
            let mut deaths = diagram.finite_deaths(0);
            deaths.extend(diagram.finite_deaths(1));
            deaths
        }
    }
}

/// Analyze both scenarios, trim and log-transform their death times, and run
/// the one-tailed Mann-Whitney and Brunner-Munzel tests with the alternative
/// "all-locations deaths stochastically smaller than FQHC-only deaths".
pub fn cmd_compare(config: &RunConfig) -> Result<CompareOutput, Error> {
    let all = cmd_analyze(config, Scenario::All)?;
    let fqhc = cmd_analyze(config, Scenario::FqhcOnly)?;

    let sample_all = trim_short_deaths(
        &deaths_for_pool(&all.diagram, config.deaths),
        config.trim_threshold,
        Scenario::All.label(),
    )?;
    let sample_fqhc = trim_short_deaths(
        &deaths_for_pool(&fqhc.diagram, config.deaths),
        config.trim_threshold,
        Scenario::FqhcOnly.label(),
    )?;

    let log_all = log_transform(&sample_all)?;
    let log_fqhc = log_transform(&sample_fqhc)?;
    let mw = mann_whitney_one_sided(&log_all, &log_fqhc, Alternative::Less)?;
    let bm = brunner_munzel_one_sided(&log_all, &log_fqhc, Alternative::Less)?;
    let warnings: Vec<String> = [&mw, &bm]
        .iter()
        .filter_map(|t| t.warning.as_ref().map(|w| format!("{}: {w}", t.name)))
        .collect();

    let report = export::SignificanceReport {
        scenario_a: Scenario::All.label().to_string(),
        scenario_b: Scenario::FqhcOnly.label().to_string(),
        n_a: sample_all.len(),
        n_b: sample_fqhc.len(),
        trim_threshold: config.trim_threshold,
        tests: vec![(&mw).into(), (&bm).into()],
    };
    let report_path = config.out_dir.join("significance_report.json");
    export::write_text(
        &report_path,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
    )?;

    Ok(CompareOutput {
        all,
        fqhc,
        sample_all,
        sample_fqhc,
        report,
        report_path,
        warnings,
    })
}
