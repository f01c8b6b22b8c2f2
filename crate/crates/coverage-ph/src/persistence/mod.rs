//! 0- and 1-dimensional persistent homology of the travel-time filtration,
//! with geolocated death simplices.
//!
//! H0 is computed by union-find over edges in filtration order: every vertex
//! is born at 0, each merging edge kills the younger of the two components it
//! joins (elder rule), and the surviving components are reported as essential
//! classes with infinite death. The finite H0 deaths are exactly the
//! minimum-spanning-forest edge weights of the sparse graph, which is what
//! the test suite pins them against.
//!
//! H1 is computed by boundary-matrix reduction over the two-element field
//! with the clearing optimization (see [`reduction`]). Pairs whose birth and
//! death coincide never exist in any complex of the filtration and are not
//! reported. A cycle can stay open forever when the triangles that would fill
//! it need edges outside the k-nearest-neighbor union; such classes are
//! reported with infinite death and are an artifact of the sparse complex
//! (with a complete matrix they would die).

mod reduction;
mod union_find;

pub use reduction::{reduce_boundary_matrix, Reduction};
pub use union_find::UnionFind;

use crate::filtration::{Filtration, SimplexVertices};
use crate::ingest::Facility;

/// One homology class: birth/death values in minutes and the simplices that
/// created and killed it. `death` is `f64::INFINITY` for essential classes,
/// which have no death simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub birth_simplex: SimplexVertices,
    pub death_simplex: Option<SimplexVertices>,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Dimension-0 pairs: one class per vertex, elder-rule pairing.
pub fn compute_h0(filtration: &Filtration) -> Vec<PersistencePair> {
    let mut uf = UnionFind::new(filtration.n_vertices);
    let mut pairs = Vec::with_capacity(filtration.n_vertices);
    for simplex in filtration.simplices() {
        let SimplexVertices::Edge(a, b) = simplex.vertices else {
            continue;
        };
        let eldest_a = uf.eldest(a);
        let eldest_b = uf.eldest(b);
        if uf.union(a, b).is_some() {
            pairs.push(PersistencePair {
                dim: 0,
                birth: 0.0,
                death: simplex.value,
                birth_simplex: SimplexVertices::Vertex(eldest_a.max(eldest_b)),
                death_simplex: Some(simplex.vertices),
            });
        }
    }
    for root in uf.roots() {
        let eldest = uf.eldest(root);
        pairs.push(PersistencePair {
            dim: 0,
            birth: 0.0,
            death: f64::INFINITY,
            birth_simplex: SimplexVertices::Vertex(eldest),
            death_simplex: None,
        });
    }
    pairs
}

/// Dimension-1 pairs from the clearing-optimized reduction. Zero-persistence
/// pairs are dropped; unfilled cycles come back with infinite death.
pub fn compute_h1(filtration: &Filtration) -> Vec<PersistencePair> {
    let columns = filtration.boundary_columns();
    let dims = filtration.dims();
    let reduction = reduce_boundary_matrix(&columns, &dims);
    let simplices = filtration.simplices();

    let mut pairs = Vec::new();
    for &(creator, destroyer) in &reduction.pairs {
        if dims[creator] != 1 {
            continue;
        }
        let birth = simplices[creator].value;
        let death = simplices[destroyer].value;
        if death > birth {
            pairs.push(PersistencePair {
                dim: 1,
                birth,
                death,
                birth_simplex: simplices[creator].vertices,
                death_simplex: Some(simplices[destroyer].vertices),
            });
        }
    }
    for &position in &reduction.essential {
        if dims[position] != 1 {
            continue;
        }
        pairs.push(PersistencePair {
            dim: 1,
            birth: simplices[position].value,
            death: f64::INFINITY,
            birth_simplex: simplices[position].vertices,
            death_simplex: None,
        });
    }
    pairs
}

/// A labeled persistence diagram with summary accessors.
#[derive(Debug, Clone)]
pub struct Diagram {
    pub scenario: String,
    pub pairs: Vec<PersistencePair>,
}

/// Per-diagram summary statistics. Means are over finite deaths only.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramSummary {
    pub h0_total: usize,
    pub h0_finite: usize,
    pub h0_essential: usize,
    pub h1_total: usize,
    pub h1_finite: usize,
    pub h1_essential: usize,
    pub mean_finite_death_h0: Option<f64>,
    pub mean_finite_death_h1: Option<f64>,
    pub pooled_mean_finite_death: Option<f64>,
    /// Max finite H0 death: the travel time at which every facility in the
    /// sparse graph becomes mutually reachable.
    pub connectivity_horizon: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

impl Diagram {
    pub fn compute(filtration: &Filtration, scenario: impl Into<String>) -> Diagram {
        let mut pairs = compute_h0(filtration);
        pairs.extend(compute_h1(filtration));
        Diagram {
            scenario: scenario.into(),
            pairs,
        }
    }

    pub fn pairs_of_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Finite deaths of one dimension, in diagram order.
    pub fn finite_deaths(&self, dim: usize) -> Vec<f64> {
        self.pairs_of_dim(dim)
            .filter(|p| !p.is_essential())
            .map(|p| p.death)
            .collect()
    }

    pub fn mean_finite_death(&self, dim: usize) -> Option<f64> {
        mean(&self.finite_deaths(dim))
    }

    pub fn connectivity_horizon(&self) -> Option<f64> {
        self.finite_deaths(0)
            .into_iter()
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
    }

    pub fn summary(&self) -> DiagramSummary {
        let h0: Vec<&PersistencePair> = self.pairs_of_dim(0).collect();
        let h1: Vec<&PersistencePair> = self.pairs_of_dim(1).collect();
        let h0_finite = self.finite_deaths(0);
        let h1_finite = self.finite_deaths(1);
        let pooled: Vec<f64> = h0_finite.iter().chain(h1_finite.iter()).copied().collect();
        DiagramSummary {
            h0_total: h0.len(),
            h0_finite: h0_finite.len(),
            h0_essential: h0.len() - h0_finite.len(),
            h1_total: h1.len(),
            h1_finite: h1_finite.len(),
            h1_essential: h1.len() - h1_finite.len(),
            mean_finite_death_h0: mean(&h0_finite),
            mean_finite_death_h1: mean(&h1_finite),
            pooled_mean_finite_death: mean(&pooled),
            connectivity_horizon: self.connectivity_horizon(),
        }
    }
}

/// A death simplex placed on the map: the pair's values plus the facility ids
/// and (lon, lat) coordinates of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DeathFeature {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub facility_ids: Vec<String>,
    pub coordinates: Vec<(f64, f64)>,
}

/// Geolocate every finite pair with `death >= min_death`, sorted by death
/// descending (ties by dimension then vertices, for stable output).
pub fn extract_death_simplices(
    pairs: &[PersistencePair],
    facilities: &[Facility],
    min_death: f64,
) -> Vec<DeathFeature> {
    let mut features: Vec<(&PersistencePair, SimplexVertices)> = pairs
        .iter()
        .filter(|p| !p.is_essential() && p.death >= min_death)
        .filter_map(|p| p.death_simplex.map(|s| (p, s)))
        .collect();
    features.sort_by(|(a, sa), (b, sb)| {
        b.death
            .total_cmp(&a.death)
            .then_with(|| a.dim.cmp(&b.dim))
            .then_with(|| sa.cmp(sb))
    });
    features
        .into_iter()
        .map(|(pair, simplex)| {
            let indices = simplex.indices();
            DeathFeature {
                dim: pair.dim,
                birth: pair.birth,
                death: pair.death,
                facility_ids: indices.iter().map(|&i| facilities[i].id.clone()).collect(),
                coordinates: indices
                    .iter()
                    .map(|&i| (facilities[i].lon, facilities[i].lat))
                    .collect(),
            }
        })
        .collect()
}
