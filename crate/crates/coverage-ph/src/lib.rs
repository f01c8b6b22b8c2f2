//! Travel-time coverage gap analysis for facility networks.
//!
//! This library quantifies where a network of facilities leaves people far
//! from care, and how much worse it gets when a class of facilities closes.
//! It builds a travel-time dissimilarity over facility locations, computes
//! 0- and 1-dimensional persistent homology of the resulting sparse
//! Vietoris-Rips filtration, geolocates the death simplices (the edges and
//! triangles that close coverage gaps), and statistically compares death-time
//! distributions between the full network and the reduced one.
//!
//! # Pipeline
//!
//! 1. [`ingest`]: load facility and county tables, build the k-nearest
//!    neighbor structure that bounds all pairwise work.
//! 2. [`traveltime`]: per-mode round-trip times through a pluggable routing
//!    provider (offline synthetic model or a live routes API), combined into
//!    a population-weighted symmetric dissimilarity.
//! 3. [`filtration`]: the sparse Vietoris-Rips filtration, simplices of
//!    dimension at most 2.
//! 4. [`persistence`]: birth/death pairs via union-find (H0) and clearing
//!    boundary-matrix reduction (H1), plus geolocated death simplices.
//! 5. [`stats`]: trimming, log transform, and one-tailed Mann-Whitney and
//!    Brunner-Munzel comparisons between scenarios.
//! 6. [`pipeline`] + [`export`]: orchestration and the CSV/GeoJSON/SVG/JSON
//!    artifacts.
//!
//! # Where to start
//!
//! Each capability has a runnable example:
//!
//! ```text
//! cargo run --example neighbors           # ingest + k-nearest neighbors
//! cargo run --example synthetic_matrix    # dissimilarity matrix construction
//! cargo run --example square_persistence  # H0/H1 on a hand-checkable fixture
//! cargo run --example death_map           # GeoJSON death-simplex export
//! cargo run --example compare_scenarios   # trim + log + rank tests
//! cargo run --example full_pipeline       # fetch -> analyze -> compare
//! ```
//!
//! The same flow is available as a thin CLI, `coverage-ph`, with subcommands
//! `fetch`, `analyze`, and `compare`; see the README.
//!
//! # Quick taste
//!
//! ```
//! use coverage_ph::filtration::build_filtration;
//! use coverage_ph::persistence::Diagram;
//! use coverage_ph::traveltime::{DissimilarityMatrix, Scenario};
//!
//! // Four facilities on a unit square (minutes), diagonals sqrt(2).
//! let mut matrix = DissimilarityMatrix::new(4, Scenario::All);
//! for (i, j, minutes) in [
//!     (0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0),
//!     (0, 2, std::f64::consts::SQRT_2), (1, 3, std::f64::consts::SQRT_2),
//! ] {
//!     matrix.insert(i, j, minutes);
//! }
//! let filtration = build_filtration(&matrix).unwrap();
//! let diagram = Diagram::compute(&filtration, "demo");
//! // The square's hole is born when its sides connect and dies when the
//! // diagonals fill it in.
//! let hole = diagram.pairs_of_dim(1).next().unwrap();
//! assert_eq!(hole.birth, 1.0);
//! assert_eq!(hole.death, std::f64::consts::SQRT_2);
//! ```

pub mod config;
pub mod error;
pub mod export;
pub mod filtration;
pub mod ingest;
pub mod persistence;
pub mod pipeline;
pub mod stats;
pub mod traveltime;

pub use error::Error;
