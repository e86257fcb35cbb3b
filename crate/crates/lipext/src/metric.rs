//! Finite metric spaces, point clouds, subsets, partial maps, and exact
//! Lipschitz-constant certification.
//!
//! A [`FiniteMetricSpace`] is a validated distance matrix: symmetry,
//! nonnegativity, zero diagonal, distinct points, and the triangle inequality
//! are all checked at construction (relative tolerance
//! [`crate::tol::REL_TOL`]). Everything downstream relies on those
//! invariants, so there is no way to smuggle an invalid matrix past
//! [`FiniteMetricSpace::validate`].
//!
//! Lipschitz constants are certified globally: the certificate is the exact
//! maximum of `d_Y(F(x), F(x'))/d_X(x, x')` over all unordered pairs, together
//! with a witness pair attaining it. On a finite space this is the quantity
//! the extension theorems bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol::{approx_le, REL_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("non-finite distance at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("negative distance {value} at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("asymmetric matrix: d[{i}][{j}] = {forward} but d[{j}][{i}] = {backward}")]
    AsymmetricMatrix {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("nonzero diagonal entry d[{i}][{i}] = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("duplicate points: d[{i}][{j}] = 0 with {i} != {j}")]
    DuplicatePoints { i: usize, j: usize },
    #[error("triangle violation: d[{from}][{to}] = {direct} > d[{from}][{via}] + d[{via}][{to}] = {detour}")]
    TriangleViolation {
        from: usize,
        to: usize,
        via: usize,
        direct: f64,
        detour: f64,
    },
    #[error("point index {index} out of bounds for space of size {len}")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error("subset indices must be strictly increasing")]
    UnsortedIndices,
    #[error("subset is empty")]
    EmptySubset,
    #[error("point labels: expected {expected}, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("point cloud vectors must share one dimension: vector {index} has {len}, expected {expected}")]
    RaggedCloud {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("empty point cloud")]
    EmptyCloud,
    #[error(
        "value dimension mismatch: value {index} has {len} coordinates, target expects {expected}"
    )]
    ValueDimension {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("map has {values} values for {domain} domain points")]
    ValueCountMismatch { values: usize, domain: usize },
    #[error("target point kind does not match the target space")]
    TargetKindMismatch,
    #[error("midpoint table is not a valid midpoint map: {0}")]
    InvalidMidpointTable(String),
    #[error("map must be defined on every point: got {got} values for {expected} points")]
    NotTotal { got: usize, expected: usize },
}

/// The norms supported for vector-valued targets and point clouds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::Linf => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        }
    }
}

/// A finite metric space: opaque point labels plus a validated distance
/// matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    point_ids: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates a distance matrix and wraps it as a metric space, or reports
    /// the first violated axiom with the offending entries.
    ///
    /// Checks run in a fixed order (shape, finiteness, nonnegativity,
    /// symmetry, diagonal, distinctness, triangle inequality) so the reported
    /// violation is deterministic.
    pub fn validate(dist: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let ids = (0..dist.len()).map(|i| format!("p{i}")).collect();
        Self::validate_labelled(ids, dist)
    }

    pub fn validate_labelled(
        point_ids: Vec<String>,
        dist: Vec<Vec<f64>>,
    ) -> Result<Self, MetricError> {
        let n = dist.len();
        if point_ids.len() != n {
            return Err(MetricError::LabelCountMismatch {
                expected: n,
                got: point_ids.len(),
            });
        }
        for (row, r) in dist.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !dist[i][j].is_finite() {
                    return Err(MetricError::NonFinite { i, j });
                }
                if dist[i][j] < 0.0 {
                    return Err(MetricError::NegativeDistance {
                        i,
                        j,
                        value: dist[i][j],
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if dist[i][j] != dist[j][i] {
                    return Err(MetricError::AsymmetricMatrix {
                        i,
                        j,
                        forward: dist[i][j],
                        backward: dist[j][i],
                    });
                }
            }
        }
        for (i, row) in dist.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(MetricError::NonzeroDiagonal { i, value: row[i] });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if dist[i][j] == 0.0 {
                    return Err(MetricError::DuplicatePoints { i, j });
                }
            }
        }
        for from in 0..n {
            for to in (from + 1)..n {
                for via in 0..n {
                    if via == from || via == to {
                        continue;
                    }
                    let direct = dist[from][to];
                    let detour = dist[from][via] + dist[via][to];
                    if !approx_le(direct, detour, REL_TOL) {
                        return Err(MetricError::TriangleViolation {
                            from,
                            to,
                            via,
                            direct,
                            detour,
                        });
                    }
                }
            }
        }
        Ok(Self { point_ids, dist })
    }

    pub fn len(&self) -> usize {
        self.point_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_ids.is_empty()
    }

    /// Distance between points `i` and `j`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn point_ids(&self) -> &[String] {
        &self.point_ids
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                m = m.max(self.d(i, j));
            }
        }
        m
    }

    /// The sub-metric-space induced on `subset`, preserving labels.
    ///
    /// The restriction of a metric is a metric, so this skips re-validation.
    pub fn restriction(&self, subset: &Subset) -> FiniteMetricSpace {
        let ids = subset.iter().map(|i| self.point_ids[i].clone()).collect();
        let dist = subset
            .iter()
            .map(|i| subset.iter().map(|j| self.d(i, j)).collect())
            .collect();
        FiniteMetricSpace {
            point_ids: ids,
            dist,
        }
    }
}

/// A point cloud in `ℝ^d` under one of the supported norms; induces a
/// [`FiniteMetricSpace`] by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub coords: Vec<Vec<f64>>,
    pub norm: Norm,
}

impl PointCloud {
    pub fn new(coords: Vec<Vec<f64>>, norm: Norm) -> Result<Self, MetricError> {
        let Some(first) = coords.first() else {
            return Err(MetricError::EmptyCloud);
        };
        let d = first.len();
        for (index, v) in coords.iter().enumerate() {
            if v.len() != d {
                return Err(MetricError::RaggedCloud {
                    index,
                    len: v.len(),
                    expected: d,
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(MetricError::NonFinite { i: index, j: 0 });
            }
        }
        Ok(Self { coords, norm })
    }

    pub fn dim(&self) -> usize {
        self.coords[0].len()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The induced metric space. Duplicate coordinates are rejected by
    /// validation (distinct points are part of the space invariant).
    pub fn to_space(&self) -> Result<FiniteMetricSpace, MetricError> {
        let n = self.coords.len();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.norm.distance(&self.coords[i], &self.coords[j]);
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        FiniteMetricSpace::validate(dist)
    }
}

/// A subset of a space's points, stored as strictly increasing indices.
/// Serializes as a plain index array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Subset {
    indices: Vec<usize>,
}

impl From<Subset> for Vec<usize> {
    fn from(s: Subset) -> Self {
        s.indices
    }
}

impl TryFrom<Vec<usize>> for Subset {
    type Error = MetricError;

    fn try_from(indices: Vec<usize>) -> Result<Self, MetricError> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(MetricError::UnsortedIndices);
            }
        }
        Ok(Subset { indices })
    }
}

impl Subset {
    pub fn new(space: &FiniteMetricSpace, indices: Vec<usize>) -> Result<Self, MetricError> {
        Self::with_bound(space.len(), indices)
    }

    /// Validates indices against an explicit bound (used where the ambient
    /// space is implicit, e.g. deserialized coverings).
    pub fn with_bound(len: usize, indices: Vec<usize>) -> Result<Self, MetricError> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(MetricError::UnsortedIndices);
            }
        }
        if let Some(&max) = indices.last() {
            if max >= len {
                return Err(MetricError::IndexOutOfBounds { index: max, len });
            }
        }
        Ok(Self { indices })
    }

    /// Builds a subset from arbitrary (possibly unsorted, duplicated) indices.
    pub fn from_unsorted(len: usize, mut indices: Vec<usize>) -> Result<Self, MetricError> {
        indices.sort_unstable();
        indices.dedup();
        Self::with_bound(len, indices)
    }

    pub fn empty() -> Self {
        Self {
            indices: Vec::new(),
        }
    }

    pub fn full(len: usize) -> Self {
        Self {
            indices: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Indices of the ambient space not in this subset.
    pub fn complement(&self, len: usize) -> Subset {
        let indices = (0..len).filter(|i| !self.contains(*i)).collect();
        Subset { indices }
    }

    /// Membership mask over the ambient space.
    pub fn mask(&self, len: usize) -> Vec<bool> {
        let mut m = vec![false; len];
        for &i in &self.indices {
            m[i] = true;
        }
        m
    }

    pub fn diameter(&self, space: &FiniteMetricSpace) -> f64 {
        let mut m = 0.0f64;
        for (a, &i) in self.indices.iter().enumerate() {
            for &j in &self.indices[a + 1..] {
                m = m.max(space.d(i, j));
            }
        }
        m
    }
}

/// Closed ball `{y : d(center, y) ≤ radius}`.
pub fn ball(space: &FiniteMetricSpace, center: usize, radius: f64) -> Subset {
    let indices = (0..space.len())
        .filter(|&y| space.d(center, y) <= radius)
        .collect();
    Subset { indices }
}

/// Infimal distance from a point to a nonempty subset.
pub fn dist_to_set(space: &FiniteMetricSpace, x: usize, s: &Subset) -> Result<f64, MetricError> {
    if s.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    Ok(s.iter()
        .map(|y| space.d(x, y))
        .fold(f64::INFINITY, f64::min))
}

/// Infimal distance between two nonempty subsets.
pub fn dist_between_sets(
    space: &FiniteMetricSpace,
    a: &Subset,
    b: &Subset,
) -> Result<f64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    let mut m = f64::INFINITY;
    for i in a.iter() {
        for j in b.iter() {
            m = m.min(space.d(i, j));
        }
    }
    Ok(m)
}

/// Asymmetric Hausdorff distance `hd(B, A) = sup{ d(b, A) : b ∈ B }`.
pub fn hausdorff_to(space: &FiniteMetricSpace, b: &Subset, a: &Subset) -> Result<f64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    let mut m = 0.0f64;
    for x in b.iter() {
        m = m.max(dist_to_set(space, x, a)?);
    }
    Ok(m)
}

/// Greedy maximal `ε`-separated net of `subset`, scanning in index order: a
/// point is kept iff it is at distance ≥ `ε` from every point kept so far.
///
/// The output is ε-separated and maximal under inclusion, and the index-order
/// scan makes it deterministic.
pub fn greedy_separated_net(space: &FiniteMetricSpace, subset: &Subset, eps: f64) -> Subset {
    let mut kept: Vec<usize> = Vec::new();
    for x in subset.iter() {
        if kept.iter().all(|&k| space.d(x, k) >= eps) {
            kept.push(x);
        }
    }
    Subset { indices: kept }
}

/// Nearest point of `a` to `x`, ties broken by smallest index.
pub fn nearest_in(space: &FiniteMetricSpace, x: usize, a: &Subset) -> Result<usize, MetricError> {
    if a.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for y in a.iter() {
        let d = space.d(x, y);
        if d < best_d {
            best_d = d;
            best = y;
        }
    }
    Ok(best)
}

/// A normed vector target `(ℝ^dim, norm)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub dim: usize,
    pub norm: Norm,
}

impl NormedSpace {
    pub fn new(dim: usize, norm: Norm) -> Self {
        Self { dim, norm }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.norm.distance(a, b)
    }
}

/// A finite target encoded by an explicit midpoint table: `table[i][j]` is the
/// index of `m(y_i, y_j)` in the underlying space.
///
/// Validation checks the midpoint axioms on every triple: symmetry,
/// `m(y, y) = y`, and the contraction `d(m(x,y), m(x,z)) ≤ ½·d(y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointSpace {
    space: FiniteMetricSpace,
    table: Vec<Vec<usize>>,
}

impl MidpointSpace {
    pub fn validate(space: FiniteMetricSpace, table: Vec<Vec<usize>>) -> Result<Self, MetricError> {
        let n = space.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(MetricError::InvalidMidpointTable(format!(
                "table must be {n}x{n}"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if table[i][j] >= n {
                    return Err(MetricError::InvalidMidpointTable(format!(
                        "entry ({i},{j}) out of bounds"
                    )));
                }
                if table[i][j] != table[j][i] {
                    return Err(MetricError::InvalidMidpointTable(format!(
                        "not symmetric at ({i},{j})"
                    )));
                }
            }
            if table[i][i] != i {
                return Err(MetricError::InvalidMidpointTable(format!(
                    "m(y,y) != y at {i}"
                )));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = space.d(table[x][y], table[x][z]);
                    let rhs = 0.5 * space.d(y, z);
                    if !approx_le(lhs, rhs, REL_TOL) {
                        return Err(MetricError::InvalidMidpointTable(format!(
                            "contraction fails on triple ({x},{y},{z}): {lhs} > {rhs}"
                        )));
                    }
                }
            }
        }
        Ok(Self { space, table })
    }

    pub fn midpoint(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }
}

/// A target space for partial maps: either a normed vector space or a finite
/// midpoint-table space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TargetSpace {
    Normed(NormedSpace),
    Midpoint(MidpointSpace),
}

impl TargetSpace {
    pub fn normed(dim: usize, norm: Norm) -> Self {
        TargetSpace::Normed(NormedSpace::new(dim, norm))
    }

    pub fn real_line() -> Self {
        TargetSpace::normed(1, Norm::L2)
    }

    pub fn as_normed(&self) -> Option<&NormedSpace> {
        match self {
            TargetSpace::Normed(n) => Some(n),
            TargetSpace::Midpoint(_) => None,
        }
    }

    pub fn distance(&self, a: &TargetPoint, b: &TargetPoint) -> Result<f64, MetricError> {
        match (self, a, b) {
            (TargetSpace::Normed(n), TargetPoint::Vec(x), TargetPoint::Vec(y)) => {
                if x.len() != n.dim || y.len() != n.dim {
                    return Err(MetricError::ValueDimension {
                        index: 0,
                        len: x.len().min(y.len()),
                        expected: n.dim,
                    });
                }
                Ok(n.distance(x, y))
            }
            (TargetSpace::Midpoint(m), TargetPoint::Ref(i), TargetPoint::Ref(j)) => {
                Ok(m.space.d(*i, *j))
            }
            _ => Err(MetricError::TargetKindMismatch),
        }
    }
}

/// A point of a [`TargetSpace`]: a coordinate vector for normed targets, an
/// index for midpoint-table targets. Serializes untagged, so vector points
/// are plain arrays and reference points are plain integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetPoint {
    Ref(usize),
    Vec(Vec<f64>),
}

impl TargetPoint {
    pub fn as_vec(&self) -> Option<&Vec<f64>> {
        match self {
            TargetPoint::Vec(v) => Some(v),
            TargetPoint::Ref(_) => None,
        }
    }
}

/// A map `f : A → Y` defined on a subset `A` of a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialLipschitzMap {
    pub domain: Subset,
    pub values: Vec<TargetPoint>,
    pub target: TargetSpace,
}

impl PartialLipschitzMap {
    pub fn new(
        space: &FiniteMetricSpace,
        domain: Subset,
        values: Vec<TargetPoint>,
        target: TargetSpace,
    ) -> Result<Self, MetricError> {
        if let Some(&max) = domain.indices().last() {
            if max >= space.len() {
                return Err(MetricError::IndexOutOfBounds {
                    index: max,
                    len: space.len(),
                });
            }
        }
        if values.len() != domain.len() {
            return Err(MetricError::ValueCountMismatch {
                values: values.len(),
                domain: domain.len(),
            });
        }
        for (index, v) in values.iter().enumerate() {
            match (&target, v) {
                (TargetSpace::Normed(n), TargetPoint::Vec(x)) => {
                    if x.len() != n.dim {
                        return Err(MetricError::ValueDimension {
                            index,
                            len: x.len(),
                            expected: n.dim,
                        });
                    }
                }
                (TargetSpace::Midpoint(m), TargetPoint::Ref(i)) => {
                    if *i >= m.space.len() {
                        return Err(MetricError::IndexOutOfBounds {
                            index: *i,
                            len: m.space.len(),
                        });
                    }
                }
                _ => return Err(MetricError::TargetKindMismatch),
            }
        }
        Ok(Self {
            domain,
            values,
            target,
        })
    }

    /// Convenience constructor for vector-valued maps.
    pub fn from_vectors(
        space: &FiniteMetricSpace,
        domain: Subset,
        values: Vec<Vec<f64>>,
        target: NormedSpace,
    ) -> Result<Self, MetricError> {
        let values = values.into_iter().map(TargetPoint::Vec).collect();
        Self::new(space, domain, values, TargetSpace::Normed(target))
    }

    /// The value attached to global point index `x`, if `x ∈ A`.
    pub fn value_at(&self, x: usize) -> Option<&TargetPoint> {
        self.domain
            .indices()
            .binary_search(&x)
            .ok()
            .map(|pos| &self.values[pos])
    }

    /// Exact Lipschitz constant of `f` over all domain pairs.
    pub fn certify(&self, space: &FiniteMetricSpace) -> Result<LipschitzCertificate, MetricError> {
        let idx = self.domain.indices();
        let mut pair_dist = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let dy = self.target.distance(
                    self.value_at(i).expect("domain point"),
                    self.value_at(j).expect("domain point"),
                )?;
                pair_dist.push(((i, j), dy / space.d(i, j)));
            }
        }
        Ok(best_pair(pair_dist, idx.len()))
    }
}

/// An exact global Lipschitz certificate: the maximal distortion ratio over
/// all pairs, the pair attaining it, and how many pairs were enumerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCertificate {
    pub constant: f64,
    pub witness: (usize, usize),
    pub pair_count: usize,
}

fn best_pair(pairs: Vec<((usize, usize), f64)>, n_points: usize) -> LipschitzCertificate {
    let pair_count = pairs.len();
    let best = pairs
        .into_iter()
        .reduce(|a, b| {
            // Total order on (ratio, pair): max ratio, ties to the smaller
            // pair, so any reduction order gives the same witness.
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .unwrap_or(((0, 0), 0.0));
    let _ = n_points;
    LipschitzCertificate {
        constant: best.1,
        witness: best.0,
        pair_count,
    }
}

/// Certifies a total map `X → Y` given by a pairwise target-distance closure.
///
/// Pair enumeration is parallelized; the reduction is a max under a total
/// order, so the result (including the witness) is deterministic.
pub fn certify_lipschitz<F>(space: &FiniteMetricSpace, target_dist: F) -> LipschitzCertificate
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let n = space.len();
    if n < 2 {
        return LipschitzCertificate {
            constant: 0.0,
            witness: (0, 0),
            pair_count: 0,
        };
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let pair_count = pairs.len();
    let best = pairs
        .into_par_iter()
        .map(|(i, j)| ((i, j), target_dist(i, j) / space.d(i, j)))
        .reduce(
            || ((usize::MAX, usize::MAX), f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    LipschitzCertificate {
        constant: best.1,
        witness: best.0,
        pair_count,
    }
}

/// Certifies a total vector-valued map on `X`.
pub fn certify_values(
    space: &FiniteMetricSpace,
    target: &NormedSpace,
    values: &[Vec<f64>],
) -> Result<LipschitzCertificate, MetricError> {
    if values.len() != space.len() {
        return Err(MetricError::NotTotal {
            got: values.len(),
            expected: space.len(),
        });
    }
    for (index, v) in values.iter().enumerate() {
        if v.len() != target.dim {
            return Err(MetricError::ValueDimension {
                index,
                len: v.len(),
                expected: target.dim,
            });
        }
    }
    Ok(certify_lipschitz(space, |i, j| {
        target.distance(&values[i], &values[j])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_space(points: &[f64]) -> FiniteMetricSpace {
        let cloud = PointCloud::new(points.iter().map(|&x| vec![x]).collect(), Norm::L2).unwrap();
        cloud.to_space().unwrap()
    }

    #[test]
    fn validate_single_point() {
        let s = FiniteMetricSpace::validate(vec![vec![0.0]]).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn validate_two_points() {
        let s = FiniteMetricSpace::validate(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.d(0, 1), 1.0);
    }

    #[test]
    fn triangle_violation_reports_first_offending_triple() {
        // d(0,2) = 3 > d(0,1) + d(1,2) = 2.
        let err = FiniteMetricSpace::validate(vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ])
        .unwrap_err();
        match err {
            MetricError::TriangleViolation { from, to, via, .. } => {
                assert_eq!((from, to, via), (0, 2, 1));
            }
            other => panic!("expected triangle violation, got {other:?}"),
        }
    }

    #[test]
    fn asymmetry_and_negativity_detected() {
        let err = FiniteMetricSpace::validate(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, MetricError::AsymmetricMatrix { .. }));
        let err = FiniteMetricSpace::validate(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, MetricError::NegativeDistance { .. }));
    }

    #[test]
    fn duplicate_points_rejected() {
        let err = FiniteMetricSpace::validate(vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap_err();
        assert!(matches!(err, MetricError::DuplicatePoints { i: 0, j: 1 }));
    }

    #[test]
    fn certify_identity_and_constant() {
        let s = line_space(&[0.0, 1.0, 3.0]);
        let id = certify_lipschitz(&s, |i, j| s.d(i, j));
        assert_eq!(id.constant, 1.0);
        let c = certify_lipschitz(&s, |_, _| 0.0);
        assert_eq!(c.constant, 0.0);
        assert_eq!(c.pair_count, 3);
    }

    #[test]
    fn certify_scalar_example() {
        // X = {0,1,3}, f = (0,2,4): ratios 2/1, 4/3, 2/2 -> max 2 at (0,1).
        let s = line_space(&[0.0, 1.0, 3.0]);
        let target = NormedSpace::new(1, Norm::L2);
        let cert = certify_values(&s, &target, &[vec![0.0], vec![2.0], vec![4.0]]).unwrap();
        assert!((cert.constant - 2.0).abs() < 1e-15);
        assert_eq!(cert.witness, (0, 1));
    }

    #[test]
    fn single_point_certificate_is_zero() {
        let s = line_space(&[0.0]);
        let cert = certify_lipschitz(&s, |_, _| 1.0);
        assert_eq!(cert.constant, 0.0);
        assert_eq!(cert.witness, (0, 0));
    }

    #[test]
    fn dist_and_hausdorff_examples() {
        let s = line_space(&[0.0, 1.0, 2.0]);
        let a = Subset::new(&s, vec![0]).unwrap();
        let b = Subset::new(&s, vec![1, 2]).unwrap();
        // d(x, {x, y}) = 0.
        let both = Subset::new(&s, vec![0, 1]).unwrap();
        assert_eq!(dist_to_set(&s, 0, &both).unwrap(), 0.0);
        // hd(B, A) with B ⊂ A is 0.
        assert_eq!(hausdorff_to(&s, &a, &both).unwrap(), 0.0);
        // B = {1,2}, A = {0}: sup of {1,2} = 2.
        assert_eq!(hausdorff_to(&s, &b, &a).unwrap(), 2.0);
        assert!(dist_to_set(&s, 0, &Subset::empty()).is_err());
    }

    #[test]
    fn greedy_net_examples() {
        let s = line_space(&[0.0, 0.5, 1.0]);
        let all = Subset::full(3);
        // ε = 0.6 keeps 0, rejects 0.5, keeps 1.
        let net = greedy_separated_net(&s, &all, 0.6);
        assert_eq!(net.indices(), &[0, 2]);
        // ε beyond the diameter keeps only the first point.
        let net = greedy_separated_net(&s, &all, 10.0);
        assert_eq!(net.indices(), &[0]);
        let single = Subset::new(&s, vec![1]).unwrap();
        assert_eq!(greedy_separated_net(&s, &single, 0.1).indices(), &[1]);
    }

    #[test]
    fn nearest_in_tie_breaks_to_lower_index() {
        let s = line_space(&[0.0, 1.0, 2.0]);
        let a = Subset::new(&s, vec![0, 2]).unwrap();
        // x = 1 is equidistant to 0 and 2; the tie goes to index 0.
        assert_eq!(nearest_in(&s, 1, &a).unwrap(), 0);
        // x ∈ A returns x itself.
        assert_eq!(nearest_in(&s, 2, &a).unwrap(), 2);
    }

    #[test]
    fn nearest_in_strict_comparison() {
        let s = line_space(&[0.0, 1.5, 2.0]);
        let a = Subset::new(&s, vec![0, 2]).unwrap();
        assert_eq!(nearest_in(&s, 1, &a).unwrap(), 2);
    }

    #[test]
    fn ball_is_closed() {
        let s = line_space(&[0.0, 1.0, 2.0]);
        assert_eq!(ball(&s, 0, 1.0).indices(), &[0, 1]);
        assert_eq!(ball(&s, 0, 0.5).indices(), &[0]);
    }

    #[test]
    fn midpoint_table_validation() {
        // A single-point target is trivially a midpoint space.
        let one = FiniteMetricSpace::validate(vec![vec![0.0]]).unwrap();
        let m = MidpointSpace::validate(one, vec![vec![0]]).unwrap();
        assert_eq!(m.midpoint(0, 0), 0);

        // The contraction axiom forces m(x,y) to be an exact metric midpoint
        // (take z = x, then z = y, and apply the triangle inequality), so no
        // two-point table can validate: both candidate values of m(0,1) fail.
        let two = line_space(&[0.0, 1.0]);
        for choice in 0..2usize {
            let table = vec![vec![0, choice], vec![choice, 1]];
            assert!(MidpointSpace::validate(two.clone(), table).is_err());
        }

        // Even with the true midpoint m(0,2) = 1 present, the 3-point segment
        // fails on m(0,1), whose exact midpoint 0.5 is not a point.
        let y = line_space(&[0.0, 1.0, 2.0]);
        let table = vec![vec![0, 0, 1], vec![0, 1, 1], vec![1, 1, 2]];
        assert!(MidpointSpace::validate(y, table).is_err());
    }

    #[test]
    fn partial_map_validates_shapes() {
        let s = line_space(&[0.0, 1.0, 2.0]);
        let a = Subset::new(&s, vec![0, 2]).unwrap();
        let f = PartialLipschitzMap::from_vectors(
            &s,
            a.clone(),
            vec![vec![0.0], vec![2.0]],
            NormedSpace::new(1, Norm::L2),
        )
        .unwrap();
        assert_eq!(f.value_at(2), Some(&TargetPoint::Vec(vec![2.0])));
        assert_eq!(f.value_at(1), None);
        let bad = PartialLipschitzMap::from_vectors(
            &s,
            a,
            vec![vec![0.0]],
            NormedSpace::new(1, Norm::L2),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn restriction_preserves_distances() {
        let s = line_space(&[0.0, 1.0, 5.0]);
        let a = Subset::new(&s, vec![0, 2]).unwrap();
        let r = s.restriction(&a);
        assert_eq!(r.len(), 2);
        assert_eq!(r.d(0, 1), 5.0);
    }
}
