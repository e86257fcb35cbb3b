//! Lipschitz partitions of unity subordinated to Whitney neighborhoods, and
//! the induced nerve map.
//!
//! Given a verified Whitney covering with parameters `(n, α, δ, γ)`, the
//! weights are
//!
//! ```text
//! φ_i(x) = ψ_i(x) / Σ_j ψ_j(x),    ψ_i(x) = d(x, X ∖ U_i)^m,
//! ```
//!
//! where `U_i = N_{δ·r_i}(B_i)` and the exponent `m` is chosen per covering
//! kind: `log(3(n+1))` (natural log) for the basic construction and
//! `log₂(n+2)` for coverings with multiplicity bound `n+1`. Each block gets
//! an anchor `a_i`, a nearest point of `A`, with `d(a_i, B_i) = r_i` exactly.
//!
//! `lipschitz_sum_report` evaluates the finite-space analogue of the
//! Lipschitz-sum bound `Σ_i Lip φ_i(x) ≤ 6·m/(δ·r_j)`: it is an exact
//! assertion only on instances dense enough to resolve the weights' variation
//! (pairwise mesh at most 1% of the smallest `r_i`), and is reported
//! informationally otherwise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError, Subset};
use crate::whitney::{WhitneyCovering, WhitneyKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("point {point} is covered by no neighborhood; the covering is defective")]
    UncoveredPoint { point: usize },
    #[error("point {point} lies in the domain A; weights are defined off A only")]
    PointInDomain { point: usize },
    #[error("weights at point {point} sum to {sum}, not 1")]
    WeightSum { point: usize, sum: f64 },
    #[error("anchor distance mismatch on block {block}: {anchor_dist} != r_i = {r_i}")]
    AnchorMismatch {
        block: usize,
        anchor_dist: f64,
        r_i: f64,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A partition of unity subordinated to the open neighborhoods
/// `U_i = N_{δ·r_i}(B_i)` of a Whitney covering, with nearest-point anchors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    /// Exponent `m` of the cutoff powers.
    pub exponent: f64,
    /// Anchor `a_i ∈ A` per block (nearest point of `A` to `B_i`).
    pub anchors: Vec<usize>,
    /// `d(x, X∖U_i)` for every block `i` and point `x` (0 off `U_i`).
    depth: Vec<Vec<f64>>,
    /// Sparse normalized weights per point; empty inside `A`.
    weights: Vec<Vec<(usize, f64)>>,
    /// The domain `A`.
    pub domain: Subset,
}

/// Weight-sum tolerance (the weights are ratios of powered distances).
pub const SUM_TOL: f64 = 1e-9;

/// Builds the partition for a verified Whitney covering: exponent per the
/// covering kind, nearest-point anchors with `d(a_i, B_i) = r_i` checked
/// exactly, and weights precomputed at every exterior point with their sums
/// validated.
pub fn build_partition(
    space: &FiniteMetricSpace,
    cover: &WhitneyCovering,
) -> Result<PartitionOfUnity, PartitionError> {
    let exponent = match cover.kind {
        WhitneyKind::Basic { nagata_n, .. } => (3.0 * (nagata_n as f64 + 1.0)).ln(),
        WhitneyKind::Refined { .. } => (cover.multiplicity_param as f64 + 2.0).log2(),
    };
    let blocks = &cover.covering.blocks;
    let n_points = space.len();

    // Anchors: nearest point of A to each block, ties to the smaller index.
    let mut anchors = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for a in cover.domain.iter() {
            let d = b
                .iter()
                .map(|x| space.d(a, x))
                .fold(f64::INFINITY, f64::min);
            if d < best_d {
                best_d = d;
                best = a;
            }
        }
        let r_i = cover.block_dist(i);
        if best_d != r_i {
            return Err(PartitionError::AnchorMismatch {
                block: i,
                anchor_dist: best_d,
                r_i,
            });
        }
        anchors.push(best);
    }

    // Membership in U_i and distance to its complement, for every point.
    let mut depth = vec![vec![0.0f64; n_points]; blocks.len()];
    for (i, b) in blocks.iter().enumerate() {
        let radius = cover.delta * cover.block_dist(i);
        let in_u: Vec<bool> = (0..n_points)
            .map(|x| {
                b.iter()
                    .map(|y| space.d(x, y))
                    .fold(f64::INFINITY, f64::min)
                    < radius
            })
            .collect();
        let outside: Vec<usize> = (0..n_points).filter(|&x| !in_u[x]).collect();
        for x in 0..n_points {
            if !in_u[x] {
                continue;
            }
            depth[i][x] = if outside.is_empty() {
                // No outside points: cap at the neighborhood radius, the
                // largest value the weight analysis relies on.
                radius
            } else {
                outside
                    .iter()
                    .map(|&y| space.d(x, y))
                    .fold(f64::INFINITY, f64::min)
            };
        }
    }

    // Normalized weights at every exterior point.
    let exterior = cover.domain.complement(n_points);
    let mut weights = vec![Vec::new(); n_points];
    for x in exterior.iter() {
        let mut sparse: Vec<(usize, f64)> = Vec::new();
        let mut total = 0.0;
        for i in 0..blocks.len() {
            if depth[i][x] > 0.0 {
                let psi = depth[i][x].powf(exponent);
                sparse.push((i, psi));
                total += psi;
            }
        }
        if !(total > 0.0) {
            return Err(PartitionError::UncoveredPoint { point: x });
        }
        for w in &mut sparse {
            w.1 /= total;
        }
        let sum: f64 = sparse.iter().map(|w| w.1).sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(PartitionError::WeightSum { point: x, sum });
        }
        weights[x] = sparse;
    }

    Ok(PartitionOfUnity {
        exponent,
        anchors,
        depth,
        weights,
        domain: cover.domain.clone(),
    })
}

impl PartitionOfUnity {
    /// Sparse weight vector at an exterior point: nonnegative, sums to 1,
    /// supported on the blocks whose neighborhood contains `x`.
    pub fn evaluate_weights(&self, x: usize) -> Result<&[(usize, f64)], PartitionError> {
        if self.domain.contains(x) {
            return Err(PartitionError::PointInDomain { point: x });
        }
        Ok(&self.weights[x])
    }

    /// The weight vector viewed as a point of the ambient simplex over the
    /// block index set; its support names the nerve simplex containing it.
    pub fn nerve_map(&self, x: usize) -> Result<&[(usize, f64)], PartitionError> {
        self.evaluate_weights(x)
    }

    /// `φ_i(x)` for one block (0 when inactive or `x ∈ A`).
    pub fn weight(&self, x: usize, block: usize) -> f64 {
        self.weights[x]
            .iter()
            .find(|&&(i, _)| i == block)
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn block_count(&self) -> usize {
        self.depth.len()
    }

    /// `d(x, X∖U_i)` — the raw cutoff depth before powering (0 off `U_i`).
    pub fn neighborhood_depth(&self, block: usize, x: usize) -> f64 {
        self.depth[block][x]
    }

    /// Sparse `point,block,weight` rows for audit, 12 significant digits.
    pub fn weights_csv(&self) -> String {
        let mut out = String::from("point,block,weight\n");
        for (x, row) in self.weights.iter().enumerate() {
            for &(i, w) in row {
                out.push_str(&format!("{x},{i},{w:.11e}\n"));
            }
        }
        out
    }

    /// All exterior points with nonzero weight on `block`.
    pub fn support_of_block(&self, block: usize) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&x| self.weight(x, block) > 0.0)
            .collect()
    }
}

/// Per-point outcome of the Lipschitz-sum comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzSumPoint {
    pub point: usize,
    /// `S(x) = Σ_i max_{x'} |φ_i(x) − φ_i(x')| / d(x, x')`.
    pub sum: f64,
    /// `6·m/(δ·r_j)` for the containing block `j` of maximal `r_j`.
    pub bound: f64,
    pub margin: f64,
    /// The block `j(x)` used for the bound and its `r_j`.
    pub block: usize,
    pub r_block: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzSumReport {
    pub points: Vec<LipschitzSumPoint>,
    /// Largest nearest-neighbor spacing among exterior points.
    pub mesh: f64,
    /// `0.01 · min_i r_i`: the density below which the bound is asserted.
    pub mesh_threshold: f64,
    /// Whether the instance is dense enough for the bound to be binding.
    pub binding: bool,
    pub all_hold: bool,
}

/// Evaluates the finite-space Lipschitz-sum bound at every exterior point.
///
/// `S(x)` sums, over blocks, the worst difference quotient of each weight
/// against all other exterior points; the bound uses the containing block of
/// maximal `r_j`, for which the weight-floor estimate `ψ(x) ≥ (δ·r_j)^m`
/// holds. On instances with mesh above the threshold the result is
/// informational (`binding = false`).
pub fn lipschitz_sum_report(
    space: &FiniteMetricSpace,
    cover: &WhitneyCovering,
    pou: &PartitionOfUnity,
) -> LipschitzSumReport {
    let exterior = cover.domain.complement(space.len());
    let ext: Vec<usize> = exterior.iter().collect();
    let m = pou.exponent;
    let mut points = Vec::with_capacity(ext.len());
    let mut all_hold = true;
    for &x in &ext {
        let mut sum = 0.0;
        for i in 0..pou.block_count() {
            let wx = pou.weight(x, i);
            let mut worst: f64 = 0.0;
            for &y in &ext {
                if y == x {
                    continue;
                }
                let wy = pou.weight(y, i);
                worst = worst.max((wx - wy).abs() / space.d(x, y));
            }
            sum += worst;
        }
        // Containing block with the largest r_j.
        let (block, r_block) = cover
            .covering
            .blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.contains(x))
            .map(|(i, _)| (i, cover.block_dist(i)))
            .fold(
                (usize::MAX, 0.0f64),
                |acc, cur| if cur.1 > acc.1 { cur } else { acc },
            );
        let bound = 6.0 * m / (cover.delta * r_block);
        let holds = sum <= bound * (1.0 + 1e-9);
        all_hold &= holds;
        points.push(LipschitzSumPoint {
            point: x,
            sum,
            bound,
            margin: bound - sum,
            block,
            r_block,
            holds,
        });
    }
    let mesh = ext
        .iter()
        .map(|&x| {
            ext.iter()
                .filter(|&&y| y != x)
                .map(|&y| space.d(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    let min_r = (0..cover.covering.blocks.len())
        .map(|i| cover.block_dist(i))
        .fold(f64::INFINITY, f64::min);
    let mesh_threshold = 0.01 * min_r;
    LipschitzSumReport {
        points,
        mesh,
        mesh_threshold,
        binding: mesh <= mesh_threshold,
        all_hold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Norm, PointCloud};
    use crate::whitney::{build_whitney_cover, GridOracle};

    fn line_instance(points: &[f64], domain: &[usize]) -> (PointCloud, FiniteMetricSpace, Subset) {
        let cloud = PointCloud::new(points.iter().map(|&x| vec![x]).collect(), Norm::L2).unwrap();
        let space = cloud.to_space().unwrap();
        let a = Subset::from_unsorted(space.len(), domain.to_vec()).unwrap();
        (cloud, space, a)
    }

    #[test]
    fn single_block_gives_unit_weight() {
        let (cloud, space, a) = line_instance(&[0.0, 1.0], &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        let w = pou.evaluate_weights(1).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0].1 - 1.0).abs() < 1e-15);
        assert!(matches!(
            pou.evaluate_weights(0),
            Err(PartitionError::PointInDomain { point: 0 })
        ));
    }

    #[test]
    fn weights_sum_to_one_and_are_subordinated() {
        let pts: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let (cloud, space, a) = line_instance(&pts, &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        for x in 1..=10usize {
            let w = pou.evaluate_weights(x).unwrap();
            let sum: f64 = w.iter().map(|&(_, v)| v).sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum at {x} is {sum}");
            for &(i, v) in w {
                assert!(v > 0.0);
                // Subordination: positive weight means x is inside U_i.
                let d = crate::metric::dist_to_set(&space, x, &cover.covering.blocks[i]).unwrap();
                assert!(d < cover.delta * cover.block_dist(i));
            }
            // Support size within the covering's multiplicity bound.
            assert!(w.len() <= cover.multiplicity_param + 1);
        }
    }

    #[test]
    fn anchor_distances_equal_block_distances_exactly() {
        let pts: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let (cloud, space, a) = line_instance(&pts, &[0, 5]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        for (i, &anchor) in pou.anchors.iter().enumerate() {
            let d = cover.covering.blocks[i]
                .iter()
                .map(|x| space.d(anchor, x))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d, cover.block_dist(i));
        }
    }

    #[test]
    fn exponent_matches_covering_kind() {
        let (cloud, space, a) = line_instance(&[0.0, 1.0, 2.0], &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        // Grid oracle in dimension 1 certifies n = 1, so m = log 6.
        assert!((pou.exponent - 6.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_symmetric_blocks_split_evenly() {
        // A in the middle; two exterior points symmetric about it end up in
        // distinct blocks, and any point covered by both neighborhoods splits
        // the weight by symmetry. Here supports are disjoint, so just check
        // each side carries full weight.
        let (cloud, space, a) = line_instance(&[-1.0, 0.0, 1.0], &[1]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        let w_left = pou.evaluate_weights(0).unwrap();
        let w_right = pou.evaluate_weights(2).unwrap();
        let sum = |w: &[(usize, f64)]| w.iter().map(|&(_, v)| v).sum::<f64>();
        assert!((sum(w_left) - 1.0).abs() < 1e-12);
        assert!((sum(w_right) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_sum_trivial_single_block() {
        let (cloud, space, a) = line_instance(&[0.0, 1.0], &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        let report = lipschitz_sum_report(&space, &cover, &pou);
        // φ ≡ 1 on the only exterior point: S(x) = 0 ≤ bound, and the report
        // carries the audited block and r_j.
        assert_eq!(report.points.len(), 1);
        assert_eq!(report.points[0].sum, 0.0);
        assert!(report.points[0].holds);
        assert_eq!(report.points[0].r_block, 1.0);
        assert!(report.all_hold);
    }

    #[test]
    fn lipschitz_sum_binding_on_dense_segment() {
        // Dense 1-D cloud: exterior mesh 0.008 against min r_i ≈ 1, so the
        // bound is binding and must hold at every point.
        let mut pts = vec![0.0];
        let mut x = 1.0;
        while x <= 1.6 {
            pts.push(x);
            x += 0.008;
        }
        let (cloud, space, a) = line_instance(&pts, &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        let report = lipschitz_sum_report(&space, &cover, &pou);
        assert!(
            report.binding,
            "mesh {} vs threshold {}",
            report.mesh, report.mesh_threshold
        );
        assert!(
            report.all_hold,
            "worst margin {:?}",
            report
                .points
                .iter()
                .min_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap())
        );
    }

    #[test]
    fn cutoff_mass_floor_holds_for_containing_blocks() {
        // ψ(x) ≥ (δ·r_j)^m whenever x ∈ B_j: any point within δ·r_j of x is
        // inside U_j, so the depth at x is at least δ·r_j.
        let pts: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let (cloud, space, a) = line_instance(&pts, &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        for x in 1..=10usize {
            let psi: f64 = (0..pou.block_count())
                .map(|i| pou.neighborhood_depth(i, x).powf(pou.exponent))
                .sum();
            for (j, b) in cover.covering.blocks.iter().enumerate() {
                if b.contains(x) {
                    let floor = (cover.delta * cover.block_dist(j)).powf(pou.exponent);
                    assert!(psi >= floor * (1.0 - 1e-12), "psi {psi} < floor {floor}");
                }
            }
        }
    }

    #[test]
    fn weights_export_as_sparse_csv() {
        let (cloud, space, a) = line_instance(&[0.0, 1.0, 2.0], &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        let csv = pou.weights_csv();
        assert!(csv.starts_with("point,block,weight\n"));
        // One row per active (point, block) pair; domain points export none.
        let rows = csv.lines().skip(1).count();
        let expected: usize = (1..=2)
            .map(|x| pou.evaluate_weights(x).unwrap().len())
            .sum();
        assert_eq!(rows, expected);
        assert!(!csv.lines().any(|l| l.starts_with("0,")));
    }

    #[test]
    fn weights_vanish_off_neighborhoods() {
        let pts: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let (cloud, space, a) = line_instance(&pts, &[0]);
        let oracle = GridOracle::new(&cloud, a.clone());
        let cover = build_whitney_cover(&space, &a, 1.25, &oracle).unwrap();
        let pou = build_partition(&space, &cover).unwrap();
        for x in 1..=10usize {
            for i in 0..pou.block_count() {
                let d = crate::metric::dist_to_set(&space, x, &cover.covering.blocks[i]).unwrap();
                if d >= cover.delta * cover.block_dist(i) {
                    assert_eq!(pou.weight(x, i), 0.0);
                }
            }
        }
    }
}
