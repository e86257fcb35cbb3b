//! Extension of vertex maps over a simplicial complex: affine barycentric
//! extension, and skeleton-by-skeleton conical extension for targets with
//! linear segments.
//!
//! The barycentric extensor sends `Σ αᵢ vᵢ ↦ Σ αᵢ f(vᵢ)`; on a normed target
//! this coincides pointwise with pushing the barycentric weights through the
//! Dirac embedding and applying the measure barycenter. The skeletal extensor
//! interpolates edges linearly and then cones each `k`-simplex from an apex
//! placed at the average of its sampled boundary values — a discrete stand-in
//! for the pushforward barycenter — using the radial structure of the
//! simplex around its barycenter.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{sparse_l2, SimplexPoint, SimplicialComplex, SimplicialError};
use crate::metric::NormedSpace;

/// Affine extension of a vertex map to the whole complex.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricExtensor {
    pub target: NormedSpace,
    pub vertex_values: Vec<Vec<f64>>,
}

pub fn barycentric_extensor(
    complex: &SimplicialComplex,
    target: NormedSpace,
    vertex_values: Vec<Vec<f64>>,
) -> Result<BarycentricExtensor, SimplicialError> {
    if vertex_values.len() != complex.vertex_count() {
        return Err(SimplicialError::MissingVertexValue {
            vertex: vertex_values.len(),
        });
    }
    Ok(BarycentricExtensor {
        target,
        vertex_values,
    })
}

impl BarycentricExtensor {
    pub fn evaluate_coords(&self, coords: &[(usize, f64)]) -> Vec<f64> {
        let mut acc = vec![0.0; self.target.dim];
        for &(v, w) in coords {
            for (a, x) in acc.iter_mut().zip(&self.vertex_values[v]) {
                *a += w * x;
            }
        }
        acc
    }

    pub fn evaluate(&self, p: &SimplexPoint) -> Vec<f64> {
        self.evaluate_coords(&p.coords)
    }
}

/// Skeleton-by-skeleton conical extension for normed targets.
///
/// Apexes are computed bottom-up: the apex of a `k`-simplex is the mean of
/// the already-extended values over a barycentric grid on its boundary
/// facets. Evaluation walks the ray from the simplex barycenter through the
/// query point to the boundary and interpolates linearly from the apex.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletalExtensor {
    pub target: NormedSpace,
    pub vertex_values: Vec<Vec<f64>>,
    /// Apex per face (faces keyed by their sorted vertex list, dim ≥ 1).
    apexes: BTreeMap<Vec<usize>, Vec<f64>>,
}

/// Builds the skeletal extensor; `boundary_mesh` is the grid resolution used
/// when averaging boundary values into apexes.
pub fn skeletal_extend(
    complex: &SimplicialComplex,
    target: NormedSpace,
    vertex_values: Vec<Vec<f64>>,
    boundary_mesh: usize,
) -> Result<SkeletalExtensor, SimplicialError> {
    if vertex_values.len() != complex.vertex_count() {
        return Err(SimplicialError::MissingVertexValue {
            vertex: vertex_values.len(),
        });
    }
    // Apex averaging enumerates boundary grids of every face; the face count
    // and grid sizes grow too fast past dimension 6 to stay desk-scale.
    if complex.dimension() > 6 {
        return Err(SimplicialError::UnsupportedDimension(complex.dimension()));
    }
    let mut ext = SkeletalExtensor {
        target,
        vertex_values,
        apexes: BTreeMap::new(),
    };
    let mut faces = complex.all_faces();
    faces.sort_by_key(|f| f.len());
    for face in faces.into_iter().filter(|f| f.len() >= 2) {
        let mut acc = vec![0.0; ext.target.dim];
        let mut count = 0usize;
        for facet_skip in 0..face.len() {
            let facet: Vec<usize> = face
                .iter()
                .enumerate()
                .filter_map(|(i, &v)| (i != facet_skip).then_some(v))
                .collect();
            for weights in barycentric_grid(facet.len(), boundary_mesh) {
                let coords: Vec<(usize, f64)> = facet
                    .iter()
                    .zip(&weights)
                    .filter(|&(_, &w)| w > 0.0)
                    .map(|(&v, &w)| (v, w))
                    .collect();
                let val = ext.evaluate_coords(&coords);
                for (a, x) in acc.iter_mut().zip(&val) {
                    *a += x;
                }
                count += 1;
            }
        }
        for a in &mut acc {
            *a /= count as f64;
        }
        ext.apexes.insert(face, acc);
    }
    Ok(ext)
}

impl SkeletalExtensor {
    /// Evaluates the conical extension at sparse barycentric coordinates.
    pub fn evaluate_coords(&self, coords: &[(usize, f64)]) -> Vec<f64> {
        let mut coords: Vec<(usize, f64)> =
            coords.iter().copied().filter(|&(_, w)| w > 0.0).collect();
        coords.sort_by_key(|&(v, _)| v);
        if coords.len() == 1 {
            return self.vertex_values[coords[0].0].clone();
        }
        let support: Vec<usize> = coords.iter().map(|&(v, _)| v).collect();
        let apex = self.apexes.get(&support).expect("apex for every face");
        let b = 1.0 / support.len() as f64;
        // Largest multiplier keeping b + s·(p − b) inside the simplex.
        let mut s_star = f64::INFINITY;
        for &(_, w) in &coords {
            if w < b {
                s_star = s_star.min(b / (b - w));
            }
        }
        if !s_star.is_finite() {
            return apex.clone(); // p is the barycenter
        }
        let t = 1.0 / s_star;
        let boundary: Vec<(usize, f64)> = coords
            .iter()
            .map(|&(v, w)| (v, (b + s_star * (w - b)).max(0.0)))
            .filter(|&(_, w)| w > 1e-14)
            .collect();
        let total: f64 = boundary.iter().map(|&(_, w)| w).sum();
        let boundary: Vec<(usize, f64)> =
            boundary.into_iter().map(|(v, w)| (v, w / total)).collect();
        let inner = self.evaluate_coords(&boundary);
        apex.iter()
            .zip(&inner)
            .map(|(a, x)| a + t * (x - a))
            .collect()
    }

    pub fn evaluate(&self, p: &SimplexPoint) -> Vec<f64> {
        self.evaluate_coords(&p.coords)
    }
}

/// All barycentric weight vectors on `k` vertices with denominator `mesh`.
pub fn barycentric_grid(k: usize, mesh: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; k];
    fn rec(k: usize, left: usize, idx: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if idx == k - 1 {
            current[idx] = left;
            out.push(current.clone());
            return;
        }
        for take in 0..=left {
            current[idx] = take;
            rec(k, left - take, idx + 1, current, out);
        }
    }
    let mut raw = Vec::new();
    if k > 0 {
        rec(k, mesh, 0, &mut current, &mut raw);
    }
    for r in raw {
        out.push(r.into_iter().map(|c| c as f64 / mesh as f64).collect());
    }
    out
}

/// Per-simplex Lipschitz measurement of an extension against its vertex map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexConstantReport {
    pub simplex: Vec<usize>,
    /// Lipschitz constant of the vertex map on this simplex (ℓ₂ vertex
    /// distances are √2).
    pub lip_vertices: f64,
    /// Largest sampled difference quotient of the extension on the simplex.
    pub lip_measured: f64,
    /// `lip_measured / lip_vertices` (0 when the vertex map is constant).
    pub ratio: f64,
}

/// Samples each maximal simplex on a barycentric grid and measures the
/// extension's worst difference quotient against the vertex map's constant.
pub fn measure_extensor_constants(
    complex: &SimplicialComplex,
    target: &NormedSpace,
    vertex_values: &[Vec<f64>],
    evaluate: &dyn Fn(&[(usize, f64)]) -> Vec<f64>,
    mesh: usize,
    max_pairs: usize,
    seed: u64,
) -> Vec<SimplexConstantReport> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for simplex in complex.maximal_simplices() {
        let k = simplex.len();
        let mut lip_vertices = 0.0f64;
        for i in 0..k {
            for j in (i + 1)..k {
                let d = target.distance(&vertex_values[simplex[i]], &vertex_values[simplex[j]]);
                lip_vertices = lip_vertices.max(d / 2.0f64.sqrt());
            }
        }
        let grid: Vec<Vec<(usize, f64)>> = barycentric_grid(k, mesh)
            .into_iter()
            .map(|w| {
                simplex
                    .iter()
                    .zip(w)
                    .filter(|&(_, x)| x > 0.0)
                    .map(|(&v, x)| (v, x))
                    .collect()
            })
            .collect();
        let values: Vec<Vec<f64>> = grid.iter().map(|c| evaluate(c)).collect();
        let total_pairs = grid.len() * (grid.len() - 1) / 2;
        let mut lip_measured = 0.0f64;
        if total_pairs <= max_pairs {
            for i in 0..grid.len() {
                for j in (i + 1)..grid.len() {
                    let dy = target.distance(&values[i], &values[j]);
                    let dx = sparse_l2(&grid[i], &grid[j]);
                    if dx > 1e-12 {
                        lip_measured = lip_measured.max(dy / dx);
                    }
                }
            }
        } else {
            for _ in 0..max_pairs {
                let i = rng.random_range(0..grid.len());
                let j = rng.random_range(0..grid.len());
                if i == j {
                    continue;
                }
                let dy = target.distance(&values[i], &values[j]);
                let dx = sparse_l2(&grid[i], &grid[j]);
                if dx > 1e-12 {
                    lip_measured = lip_measured.max(dy / dx);
                }
            }
        }
        let ratio = if lip_vertices > 0.0 {
            lip_measured / lip_vertices
        } else {
            0.0
        };
        reports.push(SimplexConstantReport {
            simplex: simplex.clone(),
            lip_vertices,
            lip_measured,
            ratio,
        });
    }
    reports
}

/// The chained per-simplex constant of the iterated conical extension:
/// `λⁿ·(√2)^{n−1}·√n·(n!)²` for an `n`-dimensional complex (1 for n = 0).
pub fn iterated_extension_bound(n: usize, lambda: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    lambda.powi(n as i32) * 2.0f64.sqrt().powi(n as i32 - 1) * nf.sqrt() * factorial * factorial
}

/// The one-step bound for extending an `L`-Lipschitz boundary map over an
/// `n`-simplex: `√(2 + 2/(n−1))·n²·λ` (n ≥ 2).
pub fn simplex_step_bound(n: usize, lambda: f64) -> f64 {
    assert!(n >= 2);
    (2.0 + 2.0 / (n as f64 - 1.0)).sqrt() * (n as f64).powi(2) * lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Norm, TargetPoint, TargetSpace};
    use crate::transport::{barycenter, DiscreteMeasure};

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::new(3, vec![vec![0, 1, 2]]).unwrap()
    }

    fn plane() -> NormedSpace {
        NormedSpace::new(2, Norm::L2)
    }

    #[test]
    fn constant_vertex_values_give_constant_extensions() {
        let c = triangle();
        let vals = vec![vec![1.0, 2.0]; 3];
        let bary = barycentric_extensor(&c, plane(), vals.clone()).unwrap();
        let skel = skeletal_extend(&c, plane(), vals, 8).unwrap();
        let p = vec![(0, 0.2), (1, 0.3), (2, 0.5)];
        for v in [bary.evaluate_coords(&p), skel.evaluate_coords(&p)] {
            assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_midpoint_is_value_average() {
        let c = triangle();
        let vals = vec![vec![0.0, 0.0], vec![2.0, 4.0], vec![1.0, 1.0]];
        let bary = barycentric_extensor(&c, plane(), vals).unwrap();
        let mid = bary.evaluate_coords(&[(0, 0.5), (1, 0.5)]);
        assert_eq!(mid, vec![1.0, 2.0]);
    }

    #[test]
    fn missing_vertex_value_is_rejected() {
        let c = triangle();
        assert!(matches!(
            barycentric_extensor(&c, plane(), vec![vec![0.0, 0.0]]),
            Err(SimplicialError::MissingVertexValue { .. })
        ));
    }

    #[test]
    fn barycentric_agrees_with_measure_barycenter() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let c = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let vals: Vec<Vec<f64>> = (0..3)
            .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let bary = barycentric_extensor(&c, plane(), vals.clone()).unwrap();
        let t = TargetSpace::Normed(plane());
        for _ in 0..50 {
            let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let coords: Vec<(usize, f64)> = (0..3).map(|v| (v, raw[v] / s)).collect();
            let direct = bary.evaluate_coords(&coords);
            let mu = DiscreteMeasure::new(
                coords
                    .iter()
                    .map(|&(v, _)| TargetPoint::Vec(vals[v].clone()))
                    .collect(),
                coords.iter().map(|&(_, w)| w).collect(),
            )
            .unwrap();
            let via_measure = barycenter(&t, &mu).unwrap();
            let TargetPoint::Vec(via) = via_measure else {
                panic!("normed barycenter")
            };
            let d = plane().distance(&direct, &via);
            assert!(d < 1e-12, "disagree by {d}");
        }
    }

    #[test]
    fn skeletal_is_linear_on_edges() {
        // Coning an edge from its midpoint value reproduces linear
        // interpolation exactly.
        let c = SimplicialComplex::new(2, vec![vec![0, 1]]).unwrap();
        let vals = vec![vec![0.0, 0.0], vec![3.0, 1.0]];
        let skel = skeletal_extend(&c, plane(), vals, 8).unwrap();
        for t in [0.0, 0.25, 0.5, 0.8, 1.0] {
            let coords: Vec<(usize, f64)> = [(0usize, 1.0 - t), (1usize, t)]
                .into_iter()
                .filter(|&(_, w)| w > 0.0)
                .collect();
            let v = skel.evaluate_coords(&coords);
            assert!((v[0] - 3.0 * t).abs() < 1e-12);
            assert!((v[1] - t).abs() < 1e-12);
        }
    }

    #[test]
    fn skeletal_triangle_respects_step_bound() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let c = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let vals: Vec<Vec<f64>> = (0..3)
                .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                .collect();
            let skel = skeletal_extend(&c, plane(), vals.clone(), 8).unwrap();
            // Boundary constant: worst sampled quotient along the three edges.
            let mut edge_lip = 0.0f64;
            for (u, v) in [(0, 1), (0, 2), (1, 2)] {
                for i in 0..=16 {
                    for j in (i + 1)..=16 {
                        let mk = |t: f64| -> Vec<(usize, f64)> {
                            [(u, 1.0 - t), (v, t)]
                                .into_iter()
                                .filter(|&(_, w)| w > 0.0)
                                .collect()
                        };
                        let (p, q) = (mk(i as f64 / 16.0), mk(j as f64 / 16.0));
                        let dy =
                            plane().distance(&skel.evaluate_coords(&p), &skel.evaluate_coords(&q));
                        let dx = sparse_l2(&p, &q);
                        if dx > 1e-12 {
                            edge_lip = edge_lip.max(dy / dx);
                        }
                    }
                }
            }
            let eval = |c2: &[(usize, f64)]| skel.evaluate_coords(c2);
            let reports = measure_extensor_constants(&c, &plane(), &vals, &eval, 16, 20_000, 3);
            let bound = simplex_step_bound(2, 3.0f64.sqrt()) * edge_lip;
            for r in &reports {
                assert!(
                    r.lip_measured <= bound * (1.0 + 1e-9),
                    "measured {} vs step bound {bound}",
                    r.lip_measured
                );
            }
        }
    }

    #[test]
    fn barycentric_measured_constants_are_modest() {
        // Reported, not asserted against 1: the affine extension's ℓ₂
        // per-simplex ratio can exceed 1 slightly; it stays below the
        // chained bound by a wide margin.
        let c = SimplicialComplex::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let vals = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.5, 1.5],
        ];
        let bary = barycentric_extensor(&c, plane(), vals.clone()).unwrap();
        let eval = |c2: &[(usize, f64)]| bary.evaluate_coords(c2);
        let reports = measure_extensor_constants(&c, &plane(), &vals, &eval, 16, 20_000, 4);
        for r in reports {
            assert!(r.ratio <= iterated_extension_bound(2, 3.0f64.sqrt()));
        }
    }

    #[test]
    fn grid_enumerates_expected_count() {
        // Compositions of 16 into 3 parts: C(18, 2) = 153.
        assert_eq!(barycentric_grid(3, 16).len(), 153);
        assert_eq!(barycentric_grid(1, 7), vec![vec![1.0]]);
    }
}
