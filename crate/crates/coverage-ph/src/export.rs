//! Artifact writers: persistence-pair CSV, dissimilarity CSV, filtration
//! dump, death-simplex GeoJSON, diagram SVG, and the significance report.
//!
//! Every writer is deterministic: identical inputs produce byte-identical
//! output. Floats are rendered with Rust's shortest-roundtrip formatting, so
//! values survive a parse round trip exactly.

use std::path::Path;

use serde::Serialize;

use crate::error::Error;
use crate::filtration::Filtration;
use crate::ingest::Facility;
use crate::persistence::{DeathFeature, Diagram, PersistencePair};
use crate::stats::TestResult;
use crate::traveltime::DissimilarityMatrix;

/// Token used for infinite deaths in CSV output.
pub const INF_TOKEN: &str = "inf";

fn vertex_ids(pair_vertices: &[usize], facilities: &[Facility]) -> String {
    pair_vertices
        .iter()
        .map(|&i| facilities[i].id.as_str())
        .collect::<Vec<_>>()
        .join(";")
}

/// `dim,birth,death,birth_vertices,death_vertices` with `inf` for essential
/// classes. Vertex fields hold facility ids joined by `;`.
pub fn pairs_csv(pairs: &[PersistencePair], facilities: &[Facility]) -> String {
    let mut out = String::from("dim,birth,death,birth_vertices,death_vertices\n");
    for pair in pairs {
        let death = if pair.is_essential() {
            INF_TOKEN.to_string()
        } else {
            format!("{}", pair.death)
        };
        let death_vertices = pair
            .death_simplex
            .map(|s| vertex_ids(&s.indices(), facilities))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            pair.dim,
            pair.birth,
            death,
            vertex_ids(&pair.birth_simplex.indices(), facilities),
            death_vertices,
        ));
    }
    out
}

/// `id_a,id_b,minutes` over the stored pairs, id_a < id_b lexicographically,
/// rows sorted by ids.
pub fn dissimilarity_csv(matrix: &DissimilarityMatrix, facilities: &[Facility]) -> String {
    let mut rows: Vec<(String, String, f64)> = matrix
        .iter()
        .map(|((i, j), minutes)| {
            let a = facilities[i].id.clone();
            let b = facilities[j].id.clone();
            if a <= b {
                (a, b, minutes)
            } else {
                (b, a, minutes)
            }
        })
        .collect();
    rows.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    let mut out = String::from("id_a,id_b,minutes\n");
    for (a, b, minutes) in rows {
        out.push_str(&format!("{a},{b},{minutes}\n"));
    }
    out
}

/// Debug dump: `position,dim,vertices,value` in filtration order.
pub fn filtration_csv(filtration: &Filtration) -> String {
    let mut out = String::from("position,dim,vertices,value\n");
    for (position, simplex) in filtration.simplices().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            position,
            simplex.dim(),
            simplex.vertices,
            simplex.value
        ));
    }
    out
}

fn shoelace_area(points: &[(f64, f64)]) -> f64 {
    let mut area = 0.0;
    for i in 0..points.len() {
        let (x1, y1) = points[i];
        let (x2, y2) = points[(i + 1) % points.len()];
        area += x1 * y2 - x2 * y1;
    }
    area / 2.0
}

/// GeoJSON FeatureCollection of death simplices: H0 deaths as LineStrings
/// over the killing edge, H1 deaths as the killing triangle's Polygon.
pub fn death_geojson(features: &[DeathFeature]) -> serde_json::Value {
    let features: Vec<serde_json::Value> = features
        .iter()
        .map(|f| {
            let mut points = f.coordinates.clone();
            // Exterior rings are counterclockwise per RFC 7946.
            if f.dim > 0 && shoelace_area(&points) < 0.0 {
                points.reverse();
            }
            let coords: Vec<serde_json::Value> = points
                .iter()
                .map(|(lon, lat)| serde_json::json!([lon, lat]))
                .collect();
            let geometry = match f.dim {
                0 => serde_json::json!({
                    "type": "LineString",
                    "coordinates": coords,
                }),
                _ => {
                    let mut ring = coords.clone();
                    ring.push(coords[0].clone());
                    serde_json::json!({
                        "type": "Polygon",
                        "coordinates": [ring],
                    })
                }
            };
            serde_json::json!({
                "type": "Feature",
                "geometry": geometry,
                "properties": {
                    "dim": f.dim,
                    "birth": f.birth,
                    "death": f.death,
                    "facilities": f.facility_ids,
                },
            })
        })
        .collect();
    serde_json::json!({
        "type": "FeatureCollection",
        "features": features,
    })
}

/// Entry of the significance report's `tests` array.
#[derive(Debug, Clone, Serialize)]
pub struct ReportTest {
    pub name: String,
    pub statistic: f64,
    pub p_one_tailed: f64,
    pub alternative: String,
}

impl From<&TestResult> for ReportTest {
    fn from(result: &TestResult) -> Self {
        ReportTest {
            name: result.name.clone(),
            statistic: result.statistic,
            p_one_tailed: result.p_one_tailed,
            alternative: result.alternative.clone(),
        }
    }
}

/// Schema of `significance_report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SignificanceReport {
    pub scenario_a: String,
    pub scenario_b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub trim_threshold: f64,
    pub tests: Vec<ReportTest>,
}

const SVG_SIZE: f64 = 640.0;
const SVG_MARGIN: f64 = 70.0;

/// Birth/death scatter as a standalone SVG: diagonal, per-dimension markers
/// (circles for H0, crosses for H1), a dashed guideline at the mean finite
/// death, and an infinity band for essential classes.
pub fn diagram_svg(diagram: &Diagram) -> String {
    let finite_max = diagram
        .pairs
        .iter()
        .filter(|p| !p.is_essential())
        .map(|p| p.death)
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    let scale_max = finite_max * 1.08;
    let plot = SVG_SIZE - 2.0 * SVG_MARGIN;
    let x_of = |v: f64| SVG_MARGIN + v / scale_max * plot;
    let y_of = |v: f64| SVG_SIZE - SVG_MARGIN - v / scale_max * plot;
    let inf_y = SVG_MARGIN * 0.55;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        SVG_SIZE
    ));
    svg.push_str(&format!(
        "  <rect width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n",
        SVG_SIZE
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">persistence diagram: {}</text>\n",
        SVG_SIZE / 2.0,
        diagram.scenario
    ));

    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{m:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n",
        m = SVG_MARGIN,
        b = SVG_SIZE - SVG_MARGIN,
        r = SVG_SIZE - SVG_MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m:.2}\" y1=\"{b:.2}\" x2=\"{m:.2}\" y2=\"{t:.2}\" stroke=\"black\"/>\n",
        m = SVG_MARGIN,
        b = SVG_SIZE - SVG_MARGIN,
        t = SVG_MARGIN
    ));
    for tick in 0..=4 {
        let v = scale_max * tick as f64 / 4.0;
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.0}</text>\n",
            x_of(v),
            SVG_SIZE - SVG_MARGIN + 18.0,
            v
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.0}</text>\n",
            SVG_MARGIN - 6.0,
            y_of(v) + 4.0,
            v
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">birth (minutes)</text>\n",
        SVG_SIZE / 2.0,
        SVG_SIZE - 18.0
    ));
    svg.push_str(&format!(
        "  <text x=\"20\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">death (minutes)</text>\n",
        SVG_SIZE / 2.0,
        SVG_SIZE / 2.0
    ));

    // Diagonal.
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n",
        x_of(0.0),
        y_of(0.0),
        x_of(scale_max),
        y_of(scale_max)
    ));

    // Mean finite death guideline.
    if let Some(mean) = diagram.summary().pooled_mean_finite_death {
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"purple\" stroke-dasharray=\"5,4\"/>\n",
            x_of(0.0),
            y_of(mean),
            x_of(scale_max),
            y_of(mean)
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"purple\">mean death {:.2}</text>\n",
            x_of(0.0) + 4.0,
            y_of(mean) - 4.0,
            mean
        ));
    }

    // Infinity band.
    if diagram.pairs.iter().any(|p| p.is_essential()) {
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{inf_y:.2}\" x2=\"{:.2}\" y2=\"{inf_y:.2}\" stroke=\"gray\" stroke-dasharray=\"1,4\"/>\n",
            SVG_MARGIN,
            SVG_SIZE - SVG_MARGIN,
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">inf</text>\n",
            SVG_SIZE - SVG_MARGIN + 8.0,
            inf_y + 4.0
        ));
    }

    for pair in &diagram.pairs {
        let y = if pair.is_essential() { inf_y } else { y_of(pair.death) };
        let x = x_of(pair.birth);
        match pair.dim {
            0 => svg.push_str(&format!(
                "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.2\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.4\"/>\n"
            )),
            _ => {
                let d = 3.2;
                svg.push_str(&format!(
                    "  <path d=\"M {x0:.2} {y0:.2} L {x1:.2} {y1:.2} M {x0:.2} {y1:.2} L {x1:.2} {y0:.2}\" stroke=\"#c23b22\" stroke-width=\"1.4\"/>\n",
                    x0 = x - d,
                    y0 = y - d,
                    x1 = x + d,
                    y1 = y + d,
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Write a string artifact, creating parent directories as needed.
pub fn write_text(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
