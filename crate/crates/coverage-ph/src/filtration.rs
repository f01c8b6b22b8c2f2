//! Sparse Vietoris-Rips filtration over a dissimilarity matrix, dimension 2
//! at most.
//!
//! Filtration values are travel times directly (diameter convention): an edge
//! enters at `d(x,y)` and a triangle at the maximum of its three edge values.
//! Texts that parameterize Vietoris-Rips complexes by a radius `r` with the
//! rule `d(x,y) < 2r` describe the same filtration with values halved; the
//! conversion is a single factor of two, see [`radius_for_value`].
//!
//! The simplex order is total and deterministic: ascending value, then
//! dimension, then lexicographic vertices. Faces always precede cofaces.

use std::collections::{BTreeSet, HashMap};

use crate::error::FiltrationError;
use crate::traveltime::DissimilarityMatrix;

/// Radius-convention scale for a diameter-convention filtration value.
pub fn radius_for_value(value: f64) -> f64 {
    value / 2.0
}

/// Vertex set of a simplex of dimension 0, 1, or 2. Components are strictly
/// ascending facility indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimplexVertices {
    Vertex(usize),
    Edge(usize, usize),
    Triangle(usize, usize, usize),
}

impl SimplexVertices {
    pub fn edge(a: usize, b: usize) -> Self {
        assert!(a != b);
        SimplexVertices::Edge(a.min(b), a.max(b))
    }

    pub fn triangle(a: usize, b: usize, c: usize) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        assert!(v[0] != v[1] && v[1] != v[2]);
        SimplexVertices::Triangle(v[0], v[1], v[2])
    }

    pub fn dim(&self) -> usize {
        match self {
            SimplexVertices::Vertex(_) => 0,
            SimplexVertices::Edge(..) => 1,
            SimplexVertices::Triangle(..) => 2,
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            SimplexVertices::Vertex(a) => vec![a],
            SimplexVertices::Edge(a, b) => vec![a, b],
            SimplexVertices::Triangle(a, b, c) => vec![a, b, c],
        }
    }

    /// Codimension-1 faces: endpoints of an edge, edges of a triangle.
    pub fn faces(&self) -> Vec<SimplexVertices> {
        match *self {
            SimplexVertices::Vertex(_) => vec![],
            SimplexVertices::Edge(a, b) => {
                vec![SimplexVertices::Vertex(a), SimplexVertices::Vertex(b)]
            }
            SimplexVertices::Triangle(a, b, c) => vec![
                SimplexVertices::Edge(a, b),
                SimplexVertices::Edge(a, c),
                SimplexVertices::Edge(b, c),
            ],
        }
    }
}

impl std::fmt::Display for SimplexVertices {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A simplex with its filtration value in minutes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    pub vertices: SimplexVertices,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.dim()
    }
}

/// The assembled filtration: simplices in their total order plus the inverse
/// index. Immutable once built.
#[derive(Debug, Clone)]
pub struct Filtration {
    pub n_vertices: usize,
    simplices: Vec<Simplex>,
    index: HashMap<SimplexVertices, usize>,
}

impl Filtration {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn position(&self, vertices: &SimplexVertices) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    /// Boundary columns in filtration order: for each simplex, the positions
    /// of its codimension-1 faces, ascending.
    pub fn boundary_columns(&self) -> Vec<Vec<usize>> {
        self.simplices
            .iter()
            .map(|s| {
                let mut faces: Vec<usize> = s
                    .vertices
                    .faces()
                    .iter()
                    .map(|f| self.index[f])
                    .collect();
                faces.sort_unstable();
                faces
            })
            .collect()
    }

    /// Dimensions in filtration order, parallel to [`boundary_columns`](Self::boundary_columns).
    pub fn dims(&self) -> Vec<usize> {
        self.simplices.iter().map(|s| s.dim()).collect()
    }
}

/// One edge per stored matrix entry, valued at the pair dissimilarity.
/// Absent pairs never produce an edge at any scale.
pub fn build_edges(matrix: &DissimilarityMatrix) -> Vec<Simplex> {
    matrix
        .iter()
        .map(|((i, j), value)| Simplex {
            vertices: SimplexVertices::edge(i, j),
            value,
        })
        .collect()
}

/// All triangles whose three edges exist in the sparse graph, valued at the
/// maximum edge value.
pub fn build_triangles(matrix: &DissimilarityMatrix, edges: &[Simplex]) -> Vec<Simplex> {
    let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); matrix.n];
    for edge in edges {
        if let SimplexVertices::Edge(a, b) = edge.vertices {
            neighbors[a].insert(b);
            neighbors[b].insert(a);
        }
    }
    let mut triangles = Vec::new();
    for edge in edges {
        let SimplexVertices::Edge(a, b) = edge.vertices else {
            continue;
        };
        // Common neighbors above b close a triangle exactly once per triple.
        for &c in neighbors[a].intersection(&neighbors[b]) {
            if c <= b {
                continue;
            }
            let d_ab = edge.value;
            let d_ac = matrix.get(a, c).expect("edge in neighbor set");
            let d_bc = matrix.get(b, c).expect("edge in neighbor set");
            triangles.push(Simplex {
                vertices: SimplexVertices::triangle(a, b, c),
                value: d_ab.max(d_ac).max(d_bc),
            });
        }
    }
    triangles
}

/// Merge vertices, edges, and triangles into the canonical total order and
/// verify face closure. A closure violation means a builder bug upstream, not
/// bad input data.
pub fn assemble_filtration(
    n_vertices: usize,
    edges: Vec<Simplex>,
    triangles: Vec<Simplex>,
) -> Result<Filtration, FiltrationError> {
    let mut simplices = Vec::with_capacity(n_vertices + edges.len() + triangles.len());
    for v in 0..n_vertices {
        simplices.push(Simplex {
            vertices: SimplexVertices::Vertex(v),
            value: 0.0,
        });
    }
    simplices.extend(edges);
    simplices.extend(triangles);
    simplices.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.dim().cmp(&b.dim()))
            .then_with(|| a.vertices.cmp(&b.vertices))
    });

    let mut index = HashMap::with_capacity(simplices.len());
    for (pos, simplex) in simplices.iter().enumerate() {
        index.insert(simplex.vertices, pos);
    }
    let filtration = Filtration {
        n_vertices,
        simplices,
        index,
    };
    validate_face_closure(&filtration)?;
    Ok(filtration)
}

fn validate_face_closure(filtration: &Filtration) -> Result<(), FiltrationError> {
    for (pos, simplex) in filtration.simplices.iter().enumerate() {
        for face in simplex.vertices.faces() {
            match filtration.position(&face) {
                Some(face_pos) if face_pos < pos => {}
                _ => {
                    return Err(FiltrationError::FaceClosure {
                        simplex: simplex.vertices.indices(),
                        face: face.indices(),
                        position: pos,
                    })
                }
            }
        }
    }
    Ok(())
}

/// Build the full filtration for a matrix in one call.
pub fn build_filtration(matrix: &DissimilarityMatrix) -> Result<Filtration, FiltrationError> {
    let edges = build_edges(matrix);
    let triangles = build_triangles(matrix, &edges);
    assemble_filtration(matrix.n, edges, triangles)
}
