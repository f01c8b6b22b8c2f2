//! Thin CLI over the library pipeline: `fetch`, `analyze`, `compare`.
//!
//! Exit codes: 0 success, 1 validation error, 2 provider/cache error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coverage_ph::config::{ProviderChoice, RunConfig};
use coverage_ph::error::Error;
use coverage_ph::pipeline::{cmd_analyze, cmd_compare, cmd_fetch, AnalyzeOutput};
use coverage_ph::traveltime::Scenario;

#[derive(Parser)]
#[command(
    name = "coverage-ph",
    about = "Facility coverage gap analysis via travel-time persistent homology",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured provider (live requires ROUTING_API_KEY).
    #[arg(long, value_parser = parse_provider)]
    provider: Option<ProviderChoice>,
    /// Override the neighbor count.
    #[arg(long)]
    k: Option<usize>,
    /// Override the trim threshold in minutes.
    #[arg(long)]
    trim: Option<f64>,
    /// Override the map death filter in minutes.
    #[arg(long)]
    death_filter: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch travel times for every k-NN pair and mode into the cache.
    Fetch {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build the dissimilarity matrix, compute persistence, write artifacts.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Scenario to analyze (defaults to the config's, then "all").
        #[arg(long, value_parser = parse_scenario)]
        scenario: Option<Scenario>,
    },
    /// Analyze both scenarios and compare death-time distributions.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn parse_scenario(token: &str) -> Result<Scenario, String> {
    Scenario::parse(token).ok_or_else(|| format!("unknown scenario {token:?} (all|fqhc)"))
}

fn parse_provider(token: &str) -> Result<ProviderChoice, String> {
    ProviderChoice::parse(token).ok_or_else(|| format!("unknown provider {token:?} (live|synthetic)"))
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let mut config = RunConfig::from_toml_path(&common.config)?;
    if let Some(provider) = common.provider {
        config.provider = provider;
    }
    if let Some(k) = common.k {
        config.k = k;
    }
    if let Some(trim) = common.trim {
        config.trim_threshold = trim;
    }
    if let Some(death_filter) = common.death_filter {
        config.death_filter = death_filter;
    }
    config.validate()?;
    Ok(config)
}

fn print_summary(output: &AnalyzeOutput) {
    let s = &output.summary;
    println!("scenario {}:", output.scenario);
    println!(
        "  H0: {} classes ({} finite, {} essential), H1: {} classes ({} finite, {} essential)",
        s.h0_total, s.h0_finite, s.h0_essential, s.h1_total, s.h1_finite, s.h1_essential
    );
    match s.mean_finite_death_h0 {
        Some(mean) => println!("  mean finite H0 death: {mean:.2} min"),
        None => println!("  mean finite H0 death: n/a"),
    }
    if let Some(mean) = s.mean_finite_death_h1 {
        println!("  mean finite H1 death: {mean:.2} min");
    }
    match s.connectivity_horizon {
        Some(h) => println!("  connectivity horizon (max finite H0 death): {h:.2} min"),
        None => println!("  connectivity horizon: n/a (no merges)"),
    }
    if s.h1_essential > 0 {
        println!(
            "  note: {} H1 class(es) never die within the sparse complex (k-NN artifact)",
            s.h1_essential
        );
    }
    for path in &output.artifacts {
        println!("  wrote {}", path.display());
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Fetch { common } => {
            let config = load_config(&common)?;
            let summaries = cmd_fetch(&config)?;
            let mut any_failure = false;
            for summary in &summaries {
                println!(
                    "scenario {}: {} fetched, {} cached",
                    summary.scenario, summary.fetched, summary.cached
                );
                for failure in &summary.failures {
                    any_failure = true;
                    eprintln!("  failed: {failure}");
                }
            }
            if any_failure {
                eprintln!("partial cache persisted; rerun fetch to retry failed legs");
            }
            Ok(!any_failure)
        }
        Command::Analyze { common, scenario } => {
            let config = load_config(&common)?;
            let scenario = scenario.or(config.scenario).unwrap_or(Scenario::All);
            let output = cmd_analyze(&config, scenario)?;
            print_summary(&output);
            Ok(true)
        }
        Command::Compare { common } => {
            let config = load_config(&common)?;
            let output = cmd_compare(&config)?;
            print_summary(&output.all);
            print_summary(&output.fqhc);
            println!(
                "post-trim deaths (> {} min): {} ({}), {} ({})",
                output.report.trim_threshold,
                output.report.n_a,
                output.report.scenario_a,
                output.report.n_b,
                output.report.scenario_b
            );
            println!(
                "mean post-trim death: {:.2} min ({}), {:.2} min ({})",
                output.sample_all.mean(),
                output.sample_all.label,
                output.sample_fqhc.mean(),
                output.sample_fqhc.label
            );
            for test in &output.report.tests {
                println!(
                    "{}: statistic {:.4}, one-tailed p {:.6} ({})",
                    test.name, test.statistic, test.p_one_tailed, test.alternative
                );
            }
            for warning in &output.warnings {
                eprintln!("warning: {warning}");
            }
            println!("wrote {}", output.report_path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors are validation errors (exit 1); help/version exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
