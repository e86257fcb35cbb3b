//! Construction and exact verification of Nagata coverings, colored
//! coverings, and padded decompositions by iterative ball partitioning.
//!
//! The central quantity is the *s-multiplicity* of a covering: the maximum,
//! over subsets `E` of diameter < `s`, of the number of covering members `E`
//! meets. A covering certifies `Nagata(n, c)` at scale `s` when its
//! s-multiplicity is at most `n+1` and every block has diameter at most
//! `c·s`. Both conditions are checked exactly here — the multiplicity by a
//! branch-and-bound search over block representatives, which is exhaustive at
//! desk scale.
//!
//! Iterative ball partitioning builds, for each permutation of the points,
//! the greedy partition into radius-`D` ball remainders. The blocks are
//! `2D`-bounded, and counting over all `n!` permutations gives the padded
//! ratio inequality checked by [`padded_ratio_check`] with exact integer
//! arithmetic: deep containment at radius `D/2` occurs at least as often,
//! proportionally, as `#B(x, D/2)/#B(x, 2D)`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{dist_to_set, FiniteMetricSpace, MetricError, PointCloud, Subset};
use crate::tol::{approx_le, REL_TOL};

/// Default cap on block count for exact multiplicity searches.
pub const DEFAULT_BLOCK_BUDGET: usize = 64;
/// Full permutation enumeration is capped at this many points (8! = 40320).
pub const MAX_ENUMERATE_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoveringError {
    #[error("covering has {blocks} blocks; exact search is budgeted to {budget}")]
    SearchBudgetExceeded { blocks: usize, budget: usize },
    #[error("base covering is not a valid Nagata cover at the required scale: {0}")]
    BaseNotNagata(String),
    #[error("point {point} landed in no output block; the construction guarantees coverage, so this is a bug")]
    InternalCoverGap { point: usize },
    #[error("full enumeration requires at most {max} points; got {got}")]
    EnumerationTooLarge { got: usize, max: usize },
    #[error("padded ratio counts require a fully enumerated partition")]
    NotEnumerated,
    #[error("covering failed its own output verification: {0}")]
    VerificationFailed(String),
    #[error("covering block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("blocks do not cover the target set: point {point} is uncovered")]
    Uncovered { point: usize },
    #[error("grid covers require the L2 norm")]
    GridNeedsL2,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// An indexed family of blocks covering a designated subset of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub blocks: Vec<Subset>,
    /// The set the blocks are required to cover (all of `X`, or `X∖A`).
    pub covers: Subset,
    #[serde(rename = "scale", skip_serializing_if = "Option::is_none")]
    pub scale_s: Option<f64>,
    /// One color per block, in `1..=n+1`, when the covering is colored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<usize>>,
    /// `r_i = d(B_i, A)` when built relative to a subset `A`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_dist_to_a: Option<Vec<f64>>,
}

impl Covering {
    pub fn new(blocks: Vec<Subset>, covers: Subset) -> Self {
        Self {
            blocks,
            covers,
            scale_s: None,
            colors: None,
            block_dist_to_a: None,
        }
    }

    /// Checks the structural invariants: blocks nonempty, union equals the
    /// covered set, and same-colored blocks separated by more than `scale_s`.
    pub fn validate(&self, space: &FiniteMetricSpace) -> Result<(), CoveringError> {
        let mut hit = vec![false; space.len()];
        for (i, b) in self.blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(CoveringError::EmptyBlock { block: i });
            }
            for x in b.iter() {
                if !self.covers.contains(x) {
                    return Err(CoveringError::VerificationFailed(format!(
                        "block {i} contains point {x} outside the covered set"
                    )));
                }
                hit[x] = true;
            }
        }
        for x in self.covers.iter() {
            if !hit[x] {
                return Err(CoveringError::Uncovered { point: x });
            }
        }
        if let (Some(colors), Some(s)) = (&self.colors, self.scale_s) {
            for i in 0..self.blocks.len() {
                for j in (i + 1)..self.blocks.len() {
                    if colors[i] != colors[j] {
                        continue;
                    }
                    let d =
                        crate::metric::dist_between_sets(space, &self.blocks[i], &self.blocks[j])?;
                    if d <= s {
                        return Err(CoveringError::VerificationFailed(format!(
                            "same-color blocks {i} and {j} are only {d} apart at scale {s}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn max_block_diameter(&self, space: &FiniteMetricSpace) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.diameter(space))
            .fold(0.0, f64::max)
    }
}

/// Exact s-multiplicity with a witness family of representatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub s: f64,
    pub multiplicity: usize,
    /// `(block index, representative point)` pairs realizing the maximum;
    /// representatives are pairwise at distance < `s` and lie in distinct
    /// blocks.
    pub witness: Vec<(usize, usize)>,
}

/// Exact maximum number of blocks met by a subset of diameter < `s`,
/// computed as the largest family of blocks admitting representatives with
/// pairwise distances < `s`.
pub fn s_multiplicity(
    space: &FiniteMetricSpace,
    covering: &Covering,
    s: f64,
) -> Result<MultiplicityReport, CoveringError> {
    s_multiplicity_with_budget(space, covering, s, DEFAULT_BLOCK_BUDGET)
}

pub fn s_multiplicity_with_budget(
    space: &FiniteMetricSpace,
    covering: &Covering,
    s: f64,
    budget: usize,
) -> Result<MultiplicityReport, CoveringError> {
    let nb = covering.blocks.len();
    if nb > budget {
        return Err(CoveringError::SearchBudgetExceeded { blocks: nb, budget });
    }
    // Greedy lower bound: scan blocks in order, keep the first compatible
    // representative.
    let mut best: Vec<(usize, usize)> = Vec::new();
    for (b, block) in covering.blocks.iter().enumerate() {
        if let Some(p) = block
            .iter()
            .find(|&p| best.iter().all(|&(_, q)| space.d(p, q) < s))
        {
            best.push((b, p));
        }
    }
    // Exhaustive branch and bound over (block, representative) choices.
    fn dfs(
        space: &FiniteMetricSpace,
        blocks: &[Subset],
        s: f64,
        k: usize,
        chosen: &mut Vec<(usize, usize)>,
        best: &mut Vec<(usize, usize)>,
    ) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        if k == blocks.len() || chosen.len() + (blocks.len() - k) <= best.len() {
            return;
        }
        for p in blocks[k].iter() {
            if chosen.iter().all(|&(_, q)| space.d(p, q) < s) {
                chosen.push((k, p));
                dfs(space, blocks, s, k + 1, chosen, best);
                chosen.pop();
            }
        }
        dfs(space, blocks, s, k + 1, chosen, best);
    }
    let mut chosen = Vec::new();
    dfs(space, &covering.blocks, s, 0, &mut chosen, &mut best);
    Ok(MultiplicityReport {
        s,
        multiplicity: best.len(),
        witness: best,
    })
}

/// Outcome of checking both Nagata conditions at scale `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NagataReport {
    pub holds: bool,
    pub multiplicity: MultiplicityReport,
    pub multiplicity_bound: usize,
    /// Blocks whose diameter exceeds `c·s`, with their diameters.
    pub oversize_blocks: Vec<(usize, f64)>,
    pub diameter_bound: f64,
}

/// True iff the covering has s-multiplicity ≤ n+1 and every block has
/// diameter ≤ c·s.
pub fn verify_nagata(
    space: &FiniteMetricSpace,
    covering: &Covering,
    s: f64,
    n: usize,
    c: f64,
) -> Result<NagataReport, CoveringError> {
    verify_nagata_with_budget(space, covering, s, n, c, DEFAULT_BLOCK_BUDGET)
}

pub fn verify_nagata_with_budget(
    space: &FiniteMetricSpace,
    covering: &Covering,
    s: f64,
    n: usize,
    c: f64,
    budget: usize,
) -> Result<NagataReport, CoveringError> {
    let multiplicity = s_multiplicity_with_budget(space, covering, s, budget)?;
    let diameter_bound = c * s;
    let oversize_blocks: Vec<(usize, f64)> = covering
        .blocks
        .iter()
        .enumerate()
        .filter_map(|(i, b)| {
            let d = b.diameter(space);
            (!approx_le(d, diameter_bound, REL_TOL)).then_some((i, d))
        })
        .collect();
    let holds = multiplicity.multiplicity <= n + 1 && oversize_blocks.is_empty();
    Ok(NagataReport {
        holds,
        multiplicity,
        multiplicity_bound: n + 1,
        oversize_blocks,
        diameter_bound,
    })
}

/// A covering together with the `(n, c)` pair it certifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedCover {
    pub covering: Covering,
    pub nagata_n: usize,
    pub nagata_c: f64,
}

/// Canonical witness that finite subsets of `(ℝ^d, L2)` satisfy
/// `Nagata(2^d − 1, √d·d)`: half-open axis-aligned cubes of side `s·d`.
///
/// A set of diameter < `s` has coordinate extent < `s` ≤ side in every axis,
/// so it meets at most two consecutive cubes per axis — `2^d` in total — and
/// each cube has diameter `√d · (s·d) = (√d·d)·s`.
pub fn grid_cover(cloud: &PointCloud, s: f64) -> Result<CertifiedCover, CoveringError> {
    grid_cover_subset(cloud, &Subset::full(cloud.len()), s)
}

/// Grid cover of a sub-cloud; blocks carry global point indices.
pub fn grid_cover_subset(
    cloud: &PointCloud,
    subset: &Subset,
    s: f64,
) -> Result<CertifiedCover, CoveringError> {
    if cloud.norm != crate::metric::Norm::L2 {
        return Err(CoveringError::GridNeedsL2);
    }
    let d = cloud.dim();
    let side = s * d as f64;
    let mut cells: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for p in subset.iter() {
        let key: Vec<i64> = cloud.coords[p]
            .iter()
            .map(|&x| (x / side).floor() as i64)
            .collect();
        cells.entry(key).or_default().push(p);
    }
    let blocks = cells
        .into_values()
        .map(|idx| Subset::with_bound(cloud.len(), idx).expect("grid indices sorted per cell"))
        .collect();
    let mut covering = Covering::new(blocks, subset.clone());
    covering.scale_s = Some(s);
    Ok(CertifiedCover {
        covering,
        nagata_n: (1usize << d) - 1,
        nagata_c: (d as f64).sqrt() * d as f64,
    })
}

/// Colored covering at target scale `s`: every block has diameter at most
/// `2(c+1)(n+2)·s`, blocks carry colors `1..=n+1`, and distinct same-colored
/// blocks are more than `s` apart. Both properties are verified exactly
/// before returning.
///
/// The construction maps each covered point through the cutoff functions
/// `φ_i(x) = max{σ − d(x, B_i), 0}` of a base Nagata cover and reads off the
/// maximal active cube vertex of the induced cubical complex; `σ = (n+2)·s`
/// is the internal scale at which the cubical argument yields the stated
/// output parameters, so the base must certify `Nagata(n, c)` at scale `2σ`.
pub fn colored_cover(
    space: &FiniteMetricSpace,
    s: f64,
    n: usize,
    c: f64,
    base: &Covering,
) -> Result<Covering, CoveringError> {
    let sigma = (n as f64 + 2.0) * s;
    let base_report = verify_nagata(space, base, 2.0 * sigma, n, c)?;
    if !base_report.holds {
        return Err(CoveringError::BaseNotNagata(format!(
            "needs {}-multiplicity <= {} (got {}) and diameter <= {} (got {} oversize blocks)",
            2.0 * sigma,
            n + 1,
            base_report.multiplicity.multiplicity,
            base_report.diameter_bound,
            base_report.oversize_blocks.len(),
        )));
    }
    base.validate(space)?;
    // Thresholds σ_k = (1 − k/(n+2))·σ for k = 1..=n+1.
    let threshold = |k: usize| (1.0 - k as f64 / (n as f64 + 2.0)) * sigma;
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for x in base.covers.iter() {
        let phi: Vec<(usize, f64)> = base
            .blocks
            .iter()
            .enumerate()
            .filter_map(|(i, b)| {
                let v = sigma - dist_to_set(space, x, b).expect("blocks nonempty");
                (v > 0.0).then_some((i, v))
            })
            .collect();
        // Maximal k with at least k coordinates above σ_k; at that k the
        // active set is exactly the coordinates above σ_k.
        let mut chosen: Option<Vec<usize>> = None;
        for k in (1..=n + 1).rev() {
            let tk = threshold(k);
            let active: Vec<usize> = phi
                .iter()
                .filter(|&&(_, v)| v > tk)
                .map(|&(i, _)| i)
                .collect();
            if active.len() >= k {
                chosen = Some(active);
                break;
            }
        }
        let Some(active) = chosen else {
            return Err(CoveringError::InternalCoverGap { point: x });
        };
        groups.entry(active).or_default().push(x);
    }
    let mut blocks = Vec::new();
    let mut colors = Vec::new();
    for (active, pts) in groups {
        colors.push(active.len());
        blocks.push(Subset::with_bound(space.len(), pts).expect("grouped in index order"));
    }
    let out = Covering {
        blocks,
        covers: base.covers.clone(),
        scale_s: Some(s),
        colors: Some(colors),
        block_dist_to_a: None,
    };
    // Verify the two stated output properties before returning.
    out.validate(space)?;
    let diam_bound = 2.0 * (c + 1.0) * (n as f64 + 2.0) * s;
    for (i, b) in out.blocks.iter().enumerate() {
        let diam = b.diameter(space);
        if !approx_le(diam, diam_bound, REL_TOL) {
            return Err(CoveringError::VerificationFailed(format!(
                "colored block {i} has diameter {diam} > {diam_bound}"
            )));
        }
    }
    Ok(out)
}

/// How permutations are drawn for iterative ball partitioning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionMode {
    /// All `n!` permutations; requires at most [`MAX_ENUMERATE_POINTS`] points.
    Enumerate,
    /// A seeded uniform sample of permutations.
    Sample { count: usize, seed: u64 },
}

/// The covering produced by iterative ball partitioning, with the
/// per-permutation partitions retained in enumerate mode for exact counting.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPartition {
    /// Deduplicated blocks over all realized permutations; covers the space.
    pub covering: Covering,
    /// Ball radius `D`; every block has diameter at most `2D`.
    pub radius: f64,
    pub permutations: usize,
    /// In enumerate mode: for each permutation, the block id of every point.
    assignments: Option<Vec<Vec<u16>>>,
}

impl BallPartition {
    pub fn is_enumerated(&self) -> bool {
        self.assignments.is_some()
    }

    /// Per-permutation block assignments (enumerate mode only).
    pub fn assignments(&self) -> Option<&[Vec<u16>]> {
        self.assignments.as_deref()
    }
}

/// For each permutation `π`, the recursive blocks
/// `B_π^k = B(x_{π(k)}, D) ∖ (B_π^1 ∪ … ∪ B_π^{k−1})`, empty blocks dropped.
/// Every block has diameter ≤ 2D and each point lies in exactly one block per
/// permutation.
pub fn iterative_ball_partition(
    space: &FiniteMetricSpace,
    d_radius: f64,
    mode: PartitionMode,
) -> Result<BallPartition, CoveringError> {
    let n = space.len();
    let mut distinct: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    let mut assignments: Option<Vec<Vec<u16>>> = None;
    let permutations;
    match mode {
        PartitionMode::Enumerate => {
            if n > MAX_ENUMERATE_POINTS {
                return Err(CoveringError::EnumerationTooLarge {
                    got: n,
                    max: MAX_ENUMERATE_POINTS,
                });
            }
            let mut all = Vec::new();
            let mut perm: Vec<usize> = (0..n).collect();
            enumerate_permutations(&mut perm, 0, &mut |p| {
                let assign = assign_blocks(space, d_radius, p);
                collect_blocks(&assign, p, &mut distinct);
                all.push(assign);
            });
            permutations = all.len();
            assignments = Some(all);
        }
        PartitionMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..n).collect();
            for _ in 0..count {
                perm.shuffle(&mut rng);
                let assign = assign_blocks(space, d_radius, &perm);
                collect_blocks(&assign, &perm, &mut distinct);
            }
            permutations = count;
        }
    }
    let blocks: Vec<Subset> = distinct
        .into_keys()
        .map(|idx| Subset::with_bound(n, idx).expect("sorted block"))
        .collect();
    let mut covering = Covering::new(blocks, Subset::full(n));
    covering.scale_s = Some(d_radius);
    covering.validate(space)?;
    Ok(BallPartition {
        covering,
        radius: d_radius,
        permutations,
        assignments,
    })
}

/// Block id per point for one permutation: point `y` belongs to the first
/// center (in permutation order) whose radius-`D` ball contains it.
fn assign_blocks(space: &FiniteMetricSpace, d_radius: f64, perm: &[usize]) -> Vec<u16> {
    let n = perm.len();
    assert!(
        n <= u16::MAX as usize,
        "partition supports at most 65535 points"
    );
    let mut assign = vec![u16::MAX; n];
    for (k, &center) in perm.iter().enumerate() {
        for y in 0..n {
            if assign[y] == u16::MAX && space.d(center, y) <= d_radius {
                assign[y] = k as u16;
            }
        }
    }
    debug_assert!(
        assign.iter().all(|&a| a != u16::MAX),
        "every point is in its own ball"
    );
    assign
}

fn collect_blocks(assign: &[u16], perm: &[usize], distinct: &mut BTreeMap<Vec<usize>, ()>) {
    for k in 0..perm.len() {
        let block: Vec<usize> = (0..assign.len())
            .filter(|&y| assign[y] == k as u16)
            .collect();
        if !block.is_empty() {
            distinct.insert(block, ());
        }
    }
}

fn enumerate_permutations(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        enumerate_permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Exact integer counts for one point in the padded ratio inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaddedPointReport {
    pub point: usize,
    /// Number of (permutation, block) incidences with `B(x, pad) ⊆ block`.
    pub deep_count: u64,
    /// Number of (permutation, block) incidences with `x ∈ block` (= n!).
    pub containing_count: u64,
    /// `#B(x, pad)`.
    pub ball_pad: u64,
    /// `#B(x, outer)`.
    pub ball_outer: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaddedReport {
    pub pad_radius: f64,
    pub outer_radius: f64,
    pub points: Vec<PaddedPointReport>,
    pub holds: bool,
}

/// Checks, with exact integer counts over the full permutation enumeration,
/// that every point is `D/2`-deep in at least a `#B(x, D/2)/#B(x, 2D)`
/// fraction of the blocks containing it.
///
/// The blocks of a radius-`D` partition are `2D`-bounded, so `(D/2, 2D)` is
/// the pad/outer pairing under which the deep-containment inequality holds
/// for every finite metric space: it compares the padded covering at its
/// boundedness parameter `2D` against the ball-count ratio at one quarter of
/// and exactly that parameter. Other pairings can fail; see the unit tests
/// for a three-point instance refuting `(D/4, D)`.
pub fn padded_ratio_check(
    space: &FiniteMetricSpace,
    partition: &BallPartition,
) -> Result<PaddedReport, CoveringError> {
    padded_ratio_check_with(
        space,
        partition,
        partition.radius / 2.0,
        2.0 * partition.radius,
    )
}

/// The padded count comparison at explicit pad/outer radii.
pub fn padded_ratio_check_with(
    space: &FiniteMetricSpace,
    partition: &BallPartition,
    pad_radius: f64,
    outer_radius: f64,
) -> Result<PaddedReport, CoveringError> {
    let Some(assignments) = &partition.assignments else {
        return Err(CoveringError::NotEnumerated);
    };
    let n = space.len();
    let mut points = Vec::with_capacity(n);
    let mut all_hold = true;
    for x in 0..n {
        let inner: Vec<usize> = (0..n).filter(|&y| space.d(x, y) <= pad_radius).collect();
        let ball_outer = (0..n).filter(|&y| space.d(x, y) <= outer_radius).count() as u64;
        let mut deep = 0u64;
        let mut containing = 0u64;
        for assign in assignments {
            let id = assign[x];
            containing += 1;
            if inner.iter().all(|&y| assign[y] == id) {
                deep += 1;
            }
        }
        let ball_pad = inner.len() as u64;
        // deep/containing ≥ ball_pad/ball_outer, cross-multiplied in integers.
        let holds = u128::from(deep) * u128::from(ball_outer)
            >= u128::from(ball_pad) * u128::from(containing);
        all_hold &= holds;
        points.push(PaddedPointReport {
            point: x,
            deep_count: deep,
            containing_count: containing,
            ball_pad,
            ball_outer,
            holds,
        });
    }
    Ok(PaddedReport {
        pad_radius,
        outer_radius,
        points,
        holds: all_hold,
    })
}
