//! Geometric simplicial complexes in the ambient simplex space over an index
//! set, with the ℓ₂ metric.
//!
//! Points live in `Σ(I) = {x ∈ ℓ₂(I) : x_i ≥ 0, Σx_i = 1}` and are stored
//! sparsely as (vertex, weight) pairs with strictly positive weights. A
//! complex is given by its maximal simplices (an antichain of vertex sets);
//! a sparse point is valid when its support is a face of some maximal
//! simplex. Distinct vertices are at distance `√2`, which is also the
//! diameter of the whole ambient simplex space.

mod conical;
mod extensor;
mod routing;
mod sphere;

pub use conical::{
    circle_points, conical_extend, fibonacci_sphere_points, lc_radial_bounds, polygon_radii,
    simplex_lc_factor, simplex_radii, wasserstein_circle_tightness, ConicalReport, TightnessReport,
};
pub use extensor::{
    barycentric_extensor, barycentric_grid, iterated_extension_bound, measure_extensor_constants,
    simplex_step_bound, skeletal_extend, BarycentricExtensor, SimplexConstantReport,
    SkeletalExtensor,
};
pub use routing::{quasiconvexity_probe, route_through_intersection, ProbeReport, RouteResult};
pub use sphere::sphere_constant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partition::PartitionOfUnity;
use crate::whitney::WhitneyCovering;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplicialError {
    #[error("vertex {vertex} out of bounds for complex on {count} vertices")]
    VertexOutOfBounds { vertex: usize, count: usize },
    #[error("support {support:?} is not a face of any maximal simplex")]
    NotAFace { support: Vec<usize> },
    #[error("barycentric weights must be positive and sum to 1; got sum {sum}")]
    InvalidWeights { sum: f64 },
    #[error("points belong to different complexes")]
    DifferentComplexes,
    #[error("the simplices are disjoint")]
    DisjointSimplices,
    #[error("complex is disconnected")]
    Disconnected,
    #[error("complex is not pure {expected}-dimensional: simplex {simplex:?}")]
    NotPure {
        expected: usize,
        simplex: Vec<usize>,
    },
    #[error("vertex {vertex} has no value")]
    MissingVertexValue { vertex: usize },
    #[error("target does not support this extension")]
    UnsupportedTarget,
    #[error("no samples supplied")]
    ZeroSamples,
    #[error("dimension {0} unsupported here")]
    UnsupportedDimension(usize),
    #[error("nerve dimension {dim} exceeds the covering multiplicity bound {bound}")]
    NerveTooDeep { dim: usize, bound: usize },
    #[error("geometry error: {0}")]
    Geometry(String),
}

/// A simplicial complex over vertices `0..vertex_count`, described by its
/// maximal simplices. Serializes as `{"vertices": [...], "maximal": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ComplexRepr", try_from = "ComplexRepr")]
pub struct SimplicialComplex {
    vertex_count: usize,
    maximal: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    vertices: Vec<usize>,
    maximal: Vec<Vec<usize>>,
}

impl From<SimplicialComplex> for ComplexRepr {
    fn from(c: SimplicialComplex) -> Self {
        ComplexRepr {
            vertices: (0..c.vertex_count).collect(),
            maximal: c.maximal,
        }
    }
}

impl TryFrom<ComplexRepr> for SimplicialComplex {
    type Error = SimplicialError;

    fn try_from(r: ComplexRepr) -> Result<Self, SimplicialError> {
        let expected: Vec<usize> = (0..r.vertices.len()).collect();
        if r.vertices != expected {
            return Err(SimplicialError::Geometry(
                "vertices must be the contiguous list 0..n".into(),
            ));
        }
        SimplicialComplex::new(r.vertices.len(), r.maximal)
    }
}

impl SimplicialComplex {
    /// Normalizes the given simplices (sorting, deduplication, removal of
    /// faces contained in others) and validates vertex bounds. Every vertex
    /// must appear in some simplex.
    pub fn new(vertex_count: usize, simplices: Vec<Vec<usize>>) -> Result<Self, SimplicialError> {
        let mut cleaned: Vec<Vec<usize>> = Vec::new();
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                return Err(SimplicialError::VertexOutOfBounds {
                    vertex: v,
                    count: vertex_count,
                });
            }
            if !s.is_empty() {
                cleaned.push(s);
            }
        }
        cleaned.sort();
        cleaned.dedup();
        // Keep only the antichain of maximal elements.
        let maximal: Vec<Vec<usize>> = cleaned
            .iter()
            .filter(|s| {
                !cleaned
                    .iter()
                    .any(|t| t.len() > s.len() && s.iter().all(|v| t.binary_search(v).is_ok()))
            })
            .cloned()
            .collect();
        let mut seen = vec![false; vertex_count];
        for s in &maximal {
            for &v in s {
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|&b| !b) {
            return Err(SimplicialError::VertexOutOfBounds {
                vertex: v,
                count: vertex_count,
            });
        }
        Ok(Self {
            vertex_count,
            maximal,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn maximal_simplices(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    pub fn dimension(&self) -> usize {
        self.maximal.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    /// True when every maximal simplex has exactly `n+1` vertices.
    pub fn is_pure(&self, n: usize) -> bool {
        self.maximal.iter().all(|s| s.len() == n + 1)
    }

    /// Whether a sorted vertex set is a face of the complex.
    pub fn contains_face(&self, face: &[usize]) -> bool {
        self.maximal
            .iter()
            .any(|s| face.iter().all(|v| s.binary_search(v).is_ok()))
    }

    /// All faces (of every dimension ≥ 0) of the maximal simplices.
    pub fn all_faces(&self) -> Vec<Vec<usize>> {
        let mut out: std::collections::BTreeSet<Vec<usize>> = Default::default();
        for s in &self.maximal {
            let k = s.len();
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k)
                    .filter(|&j| mask & (1 << j) != 0)
                    .map(|j| s[j])
                    .collect();
                out.insert(face);
            }
        }
        out.into_iter().collect()
    }
}

/// A point of the geometric realization: sparse positive barycentric
/// coordinates whose support is a face of the complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    /// (vertex, weight), sorted by vertex, weights > 0 summing to 1.
    pub coords: Vec<(usize, f64)>,
}

/// Tolerance for barycentric weight sums.
pub const COORD_TOL: f64 = 1e-12;

impl SimplexPoint {
    pub fn new(
        complex: &SimplicialComplex,
        mut coords: Vec<(usize, f64)>,
    ) -> Result<Self, SimplicialError> {
        coords.retain(|&(_, w)| w != 0.0);
        coords.sort_by_key(|&(v, _)| v);
        let sum: f64 = coords.iter().map(|&(_, w)| w).sum();
        if coords.iter().any(|&(_, w)| w < 0.0) || (sum - 1.0).abs() > COORD_TOL {
            return Err(SimplicialError::InvalidWeights { sum });
        }
        for w in coords.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SimplicialError::InvalidWeights { sum });
            }
        }
        let support: Vec<usize> = coords.iter().map(|&(v, _)| v).collect();
        if !complex.contains_face(&support) {
            return Err(SimplicialError::NotAFace { support });
        }
        Ok(Self { coords })
    }

    pub fn vertex(complex: &SimplicialComplex, v: usize) -> Result<Self, SimplicialError> {
        Self::new(complex, vec![(v, 1.0)])
    }

    pub fn support(&self) -> Vec<usize> {
        self.coords.iter().map(|&(v, _)| v).collect()
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.coords
            .binary_search_by_key(&v, |&(u, _)| u)
            .map(|i| self.coords[i].1)
            .unwrap_or(0.0)
    }
}

/// ℓ₂ distance between two sparse simplex points.
pub fn l2_distance(p: &SimplexPoint, q: &SimplexPoint) -> f64 {
    sparse_l2(&p.coords, &q.coords)
}

pub(crate) fn sparse_l2(p: &[(usize, f64)], q: &[(usize, f64)]) -> f64 {
    let mut i = 0;
    let mut j = 0;
    let mut acc = 0.0;
    while i < p.len() || j < q.len() {
        if j == q.len() || (i < p.len() && p[i].0 < q[j].0) {
            acc += p[i].1 * p[i].1;
            i += 1;
        } else if i == p.len() || q[j].0 < p[i].0 {
            acc += q[j].1 * q[j].1;
            j += 1;
        } else {
            let d = p[i].1 - q[j].1;
            acc += d * d;
            i += 1;
            j += 1;
        }
    }
    acc.sqrt()
}

/// The nerve of a Whitney covering under its partition of unity: one vertex
/// per block, one simplex per weight support arising at an exterior point.
/// The dimension cannot exceed the covering's multiplicity bound minus one.
pub fn nerve_of_cover(
    cover: &WhitneyCovering,
    pou: &PartitionOfUnity,
) -> Result<SimplicialComplex, SimplicialError> {
    let mut simplices = Vec::new();
    for x in cover.covering.covers.iter() {
        if let Ok(w) = pou.evaluate_weights(x) {
            if !w.is_empty() {
                simplices.push(w.iter().map(|&(i, _)| i).collect());
            }
        }
    }
    let complex = SimplicialComplex::new(cover.covering.blocks.len(), simplices)?;
    let bound = cover.multiplicity_param + 1;
    if complex.dimension() + 1 > bound {
        return Err(SimplicialError::NerveTooDeep {
            dim: complex.dimension(),
            bound,
        });
    }
    Ok(complex)
}

/// The weight vector of the nerve map as a validated point of the nerve.
pub fn nerve_point(
    complex: &SimplicialComplex,
    weights: &[(usize, f64)],
) -> Result<SimplexPoint, SimplicialError> {
    SimplexPoint::new(complex, weights.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::new(3, vec![vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn complex_normalizes_to_antichain() {
        let c = SimplicialComplex::new(3, vec![vec![0, 1], vec![1, 0, 2], vec![2]]).unwrap();
        assert_eq!(c.maximal_simplices(), &[vec![0, 1, 2]]);
        assert_eq!(c.dimension(), 2);
        assert!(c.is_pure(2));
    }

    #[test]
    fn vertex_coverage_is_required() {
        assert!(SimplicialComplex::new(3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn simplex_points_validate_support() {
        let c = triangle();
        let p = SimplexPoint::new(&c, vec![(0, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(p.support(), vec![0, 1]);
        let c2 = SimplicialComplex::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(SimplexPoint::new(&c2, vec![(0, 0.5), (2, 0.5)]).is_err());
        assert!(SimplexPoint::new(&c, vec![(0, 0.7), (1, 0.7)]).is_err());
    }

    #[test]
    fn vertex_distance_is_sqrt_two() {
        let c = triangle();
        let p = SimplexPoint::vertex(&c, 0).unwrap();
        let q = SimplexPoint::vertex(&c, 1).unwrap();
        assert!((l2_distance(&p, &q) - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(l2_distance(&p, &p), 0.0);
    }

    #[test]
    fn midpoints_of_disjoint_edges() {
        // Midpoints of edges {0,1} and {2,3}: difference has four coordinates
        // of magnitude 1/2, so the distance is 1.
        let c = SimplicialComplex::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let p = SimplexPoint::new(&c, vec![(0, 0.5), (1, 0.5)]).unwrap();
        let q = SimplexPoint::new(&c, vec![(2, 0.5), (3, 0.5)]).unwrap();
        assert!((l2_distance(&p, &q) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nerve_of_line_cover() {
        use crate::metric::{Norm, PointCloud, Subset};
        use crate::partition::build_partition;
        use crate::whitney::{build_whitney_cover, GridOracle};
        let pts: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let cloud = PointCloud::new(pts.iter().map(|&x| vec![x]).collect(), Norm::L2).unwrap();
        let space = cloud.to_space().unwrap();
        let a = Subset::new(&space, vec![0]).unwrap();
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        let nerve = nerve_of_cover(&cover, &pou).unwrap();
        assert_eq!(nerve.vertex_count(), cover.covering.blocks.len());
        assert!(nerve.dimension() <= cover.multiplicity_param);
        // Every exterior point's weights form a valid nerve point whose
        // support size is the containing simplex dimension + 1.
        for x in 1..=10usize {
            let w = pou.evaluate_weights(x).unwrap();
            let p = nerve_point(&nerve, w).unwrap();
            assert_eq!(p.support().len(), w.len());
        }
    }
}
