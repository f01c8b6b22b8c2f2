//! Persistent homology on a hand-checkable fixture: four facilities on a
//! unit square. The three cheapest edges merge everything (H0 deaths = the
//! minimum spanning tree), the fourth side closes a loop at 1, and the
//! diagonals fill it at sqrt(2).
//!
//! ```text
//! cargo run --example square_persistence
//! ```

use coverage_ph::filtration::build_filtration;
use coverage_ph::persistence::Diagram;
use coverage_ph::traveltime::{DissimilarityMatrix, Scenario};

fn main() -> Result<(), coverage_ph::Error> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut matrix = DissimilarityMatrix::new(4, Scenario::All);
    for (i, j, minutes) in [
        (0, 1, 1.0),
        (1, 2, 1.0),
        (2, 3, 1.0),
        (0, 3, 1.0),
        (0, 2, sqrt2),
        (1, 3, sqrt2),
    ] {
        matrix.insert(i, j, minutes);
    }

    let filtration = build_filtration(&matrix)?;
    println!("filtration ({} simplices, faces before cofaces):", filtration.len());
    for (pos, simplex) in filtration.simplices().iter().enumerate() {
        println!(
            "  {pos:2}  dim {}  value {:.4}  vertices [{}]",
            simplex.dim(),
            simplex.value,
            simplex.vertices
        );
    }

    let diagram = Diagram::compute(&filtration, "square");
    println!("\npersistence pairs:");
    for pair in &diagram.pairs {
        let death = if pair.is_essential() {
            "inf".to_string()
        } else {
            format!("{:.4}", pair.death)
        };
        let killer = pair
            .death_simplex
            .map(|s| format!(" killed by [{s}]"))
            .unwrap_or_default();
        println!(
            "  H{}: birth {:.4}, death {}{}",
            pair.dim, pair.birth, death, killer
        );
    }

    let summary = diagram.summary();
    println!(
        "\nsummary: {} H0 classes ({} finite), {} H1 class(es); connectivity horizon {:.4}",
        summary.h0_total,
        summary.h0_finite,
        summary.h1_total,
        summary.connectivity_horizon.unwrap()
    );
    Ok(())
}
