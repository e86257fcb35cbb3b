//! Discrete probability measures, exact Wasserstein-1 distance, and
//! barycenters for normed targets.
//!
//! `W₁` is computed on the primal side: an exact min-cost transport problem on
//! the bipartite support graph, solved by successive shortest paths with node
//! potentials. The optimal plan is returned as a witness so callers can check
//! the marginals and cost independently. For uniform measures over at most 8
//! atoms, [`w1_permutation`] recomputes the distance by brute-force
//! enumeration over the symmetric group — an independent oracle used by the
//! test suites.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricError, TargetPoint, TargetSpace};
use crate::tol::approx_le;

/// Tolerance for simplex membership of weight vectors.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Tolerance for transport-plan marginal checks.
pub const MARGINAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("weights must be nonnegative: weight {index} is {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights must sum to 1 (within {WEIGHT_TOL}); got {sum}")]
    WeightSum { sum: f64 },
    #[error("support and weights differ in length: {support} vs {weights}")]
    LengthMismatch { support: usize, weights: usize },
    #[error("empty support")]
    EmptySupport,
    #[error("measures live over different target kinds")]
    MixedTargetSpaces,
    #[error("w1_permutation requires uniform measures with equal-size supports")]
    NotUniform,
    #[error("w1_permutation enumerates S_N only for N <= {max}; got {got}")]
    TooLarge { max: usize, got: usize },
    #[error("barycenters are implemented for normed targets only; general midpoint-table targets have no constructive barycenter here")]
    UnsupportedTarget,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A finitely supported probability measure over a [`TargetSpace`].
///
/// Construction canonicalizes: equal support points are merged (weights
/// added), zero-weight atoms are dropped, the support is sorted, and weights
/// are renormalized when their sum is within [`WEIGHT_TOL`] of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    support: Vec<TargetPoint>,
    weights: Vec<f64>,
}

fn point_order(a: &TargetPoint, b: &TargetPoint) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a, b) {
        (TargetPoint::Ref(x), TargetPoint::Ref(y)) => x.cmp(y),
        (TargetPoint::Vec(x), TargetPoint::Vec(y)) => {
            for (u, v) in x.iter().zip(y.iter()) {
                match u.partial_cmp(v).unwrap_or(Ordering::Equal) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            x.len().cmp(&y.len())
        }
        (TargetPoint::Ref(_), TargetPoint::Vec(_)) => Ordering::Less,
        (TargetPoint::Vec(_), TargetPoint::Ref(_)) => Ordering::Greater,
    }
}

impl DiscreteMeasure {
    pub fn new(support: Vec<TargetPoint>, weights: Vec<f64>) -> Result<Self, TransportError> {
        if support.len() != weights.len() {
            return Err(TransportError::LengthMismatch {
                support: support.len(),
                weights: weights.len(),
            });
        }
        if support.is_empty() {
            return Err(TransportError::EmptySupport);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) {
                return Err(TransportError::NegativeWeight { index, value: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(TransportError::WeightSum { sum });
        }
        // Canonical order, merge exact duplicates, drop zero atoms, renormalize.
        let mut paired: Vec<(TargetPoint, f64)> = support.into_iter().zip(weights).collect();
        paired.sort_by(|a, b| point_order(&a.0, &b.0));
        let mut support = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (p, w) in paired {
            if let Some(last) = support.last() {
                if point_order(last, &p) == std::cmp::Ordering::Equal {
                    *weights.last_mut().expect("parallel vectors") += w;
                    continue;
                }
            }
            support.push(p);
            weights.push(w);
        }
        let keep: Vec<bool> = weights.iter().map(|&w| w > 0.0).collect();
        let support: Vec<TargetPoint> = support
            .into_iter()
            .zip(&keep)
            .filter_map(|(p, &k)| k.then_some(p))
            .collect();
        let mut weights: Vec<f64> = weights
            .into_iter()
            .zip(&keep)
            .filter_map(|(w, &k)| k.then_some(w))
            .collect();
        if support.is_empty() {
            return Err(TransportError::EmptySupport);
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(Self { support, weights })
    }

    pub fn dirac(point: TargetPoint) -> Self {
        Self {
            support: vec![point],
            weights: vec![1.0],
        }
    }

    /// Uniform measure over the listed points (duplicates merge).
    pub fn uniform(points: Vec<TargetPoint>) -> Result<Self, TransportError> {
        let n = points.len();
        let w = vec![1.0 / n as f64; n];
        Self::new(points, w)
    }

    pub fn from_vectors(support: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self, TransportError> {
        Self::new(support.into_iter().map(TargetPoint::Vec).collect(), weights)
    }

    pub fn support(&self) -> &[TargetPoint] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn check_space(&self, target: &TargetSpace) -> Result<(), TransportError> {
        for p in &self.support {
            match (target, p) {
                (TargetSpace::Normed(_), TargetPoint::Vec(_)) => {}
                (TargetSpace::Midpoint(_), TargetPoint::Ref(_)) => {}
                _ => return Err(TransportError::MixedTargetSpaces),
            }
        }
        Ok(())
    }
}

/// A primal witness for `W₁`: a feasible flow with its cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    /// `flow[i][j]` is the mass moved from `mu` atom `i` to `nu` atom `j`.
    pub flow: Vec<Vec<f64>>,
    pub cost: f64,
}

impl TransportPlan {
    /// Maximal absolute deviation of the plan's marginals from the inputs.
    pub fn marginal_error(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let mut err = 0.0f64;
        for (i, row) in self.flow.iter().enumerate() {
            err = err.max((row.iter().sum::<f64>() - mu.weights[i]).abs());
        }
        for j in 0..nu.weights.len() {
            let col: f64 = self.flow.iter().map(|r| r[j]).sum();
            err = err.max((col - nu.weights[j]).abs());
        }
        err
    }
}

/// Exact Wasserstein-1 distance between two measures over `target`, with an
/// optimal transport plan as witness.
pub fn w1_distance(
    target: &TargetSpace,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<(f64, TransportPlan), TransportError> {
    mu.check_space(target)?;
    nu.check_space(target)?;
    let n = mu.len();
    let m = nu.len();
    let mut cost = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            cost[i][j] = target.distance(&mu.support[i], &nu.support[j])?;
        }
    }
    let flow = min_cost_transport(mu.weights(), nu.weights(), &cost);
    let total: f64 = flow
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, f)| f * cost[i][j])
                .sum::<f64>()
        })
        .sum();
    let plan = TransportPlan { flow, cost: total };
    debug_assert!(plan.marginal_error(mu, nu) <= MARGINAL_TOL);
    Ok((total, plan))
}

/// Successive-shortest-paths transportation solver.
///
/// Costs must be nonnegative (they are distances here), so plain Dijkstra with
/// potentials applies from the first iteration. Each augmentation saturates a
/// source or a sink, so there are at most `n + m` rounds.
fn min_cost_transport(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Vec<Vec<f64>> {
    const EXHAUSTED: f64 = 1e-15;
    let n = supply.len();
    let m = demand.len();
    let mut rem_s = supply.to_vec();
    let mut rem_d = demand.to_vec();
    let mut flow = vec![vec![0.0; m]; n];
    // Potentials keep reduced costs nonnegative across rounds.
    let mut pot_row = vec![0.0f64; n];
    let mut pot_col = vec![0.0f64; m];

    let max_rounds = 64 * (n + m) + 4096;
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        assert!(rounds <= max_rounds, "transport solver failed to converge");
        let active_rows: Vec<usize> = (0..n).filter(|&i| rem_s[i] > EXHAUSTED).collect();
        if active_rows.is_empty() {
            break;
        }
        if !(0..m).any(|j| rem_d[j] > EXHAUSTED) {
            break;
        }
        // Dijkstra over the residual bipartite graph from all active rows.
        let mut dist_row = vec![f64::INFINITY; n];
        let mut dist_col = vec![f64::INFINITY; m];
        let mut done_col = vec![false; m];
        let mut parent_col = vec![usize::MAX; m]; // row feeding this column
        let mut parent_row = vec![usize::MAX; n]; // column feeding this row (reverse arc)
        for &i in &active_rows {
            dist_row[i] = 0.0;
        }
        // Dense Dijkstra with row/col relaxation interleaved: the graph is
        // bipartite, so alternate scanning rows and columns.
        let mut done_row = vec![false; n];
        loop {
            // Pick the unvisited node (row or column) of smallest distance.
            let mut best = f64::INFINITY;
            let mut best_node: Option<(bool, usize)> = None; // (is_row, idx)
            for i in 0..n {
                if !done_row[i] && dist_row[i] < best {
                    best = dist_row[i];
                    best_node = Some((true, i));
                }
            }
            for j in 0..m {
                if !done_col[j] && dist_col[j] < best {
                    best = dist_col[j];
                    best_node = Some((false, j));
                }
            }
            let Some((is_row, idx)) = best_node else {
                break;
            };
            if is_row {
                done_row[idx] = true;
                let base = dist_row[idx];
                for j in 0..m {
                    if done_col[j] {
                        continue;
                    }
                    let rc = (cost[idx][j] - pot_row[idx] - pot_col[j]).max(0.0);
                    if base + rc < dist_col[j] {
                        dist_col[j] = base + rc;
                        parent_col[j] = idx;
                    }
                }
            } else {
                done_col[idx] = true;
                if rem_d[idx] > EXHAUSTED {
                    // Columns with remaining demand terminate paths; no need
                    // to relax further once the cheapest one is settled, but
                    // settling all nodes keeps potential updates uniform.
                }
                let base = dist_col[idx];
                for i in 0..n {
                    if done_row[i] || flow[i][idx] <= EXHAUSTED {
                        continue;
                    }
                    let rc = (pot_row[i] + pot_col[idx] - cost[i][idx]).max(0.0);
                    if base + rc < dist_row[i] {
                        dist_row[i] = base + rc;
                        parent_row[i] = idx;
                    }
                }
            }
        }
        // Cheapest reachable column with unmet demand.
        let Some(sink) = (0..m)
            .filter(|&j| rem_d[j] > EXHAUSTED && dist_col[j] < f64::INFINITY)
            .min_by(|&a, &b| dist_col[a].partial_cmp(&dist_col[b]).expect("finite"))
        else {
            break;
        };
        // Bottleneck along the alternating path.
        let mut delta = rem_d[sink];
        let mut j = sink;
        let start_row;
        loop {
            let i = parent_col[j];
            if parent_row[i] == usize::MAX || dist_row[i] == 0.0 && rem_s[i] > EXHAUSTED {
                delta = delta.min(rem_s[i]);
                start_row = i;
                break;
            }
            let back = parent_row[i];
            delta = delta.min(flow[i][back]);
            j = back;
        }
        // Apply the augmentation.
        let mut j = sink;
        loop {
            let i = parent_col[j];
            flow[i][j] += delta;
            if i == start_row {
                break;
            }
            let back = parent_row[i];
            flow[i][back] -= delta;
            j = back;
        }
        rem_s[start_row] -= delta;
        rem_d[sink] -= delta;
        // Potential update keeps future reduced costs nonnegative.
        let d_sink = dist_col[sink];
        for i in 0..n {
            if dist_row[i] < f64::INFINITY {
                pot_row[i] += (d_sink - dist_row[i]).max(0.0);
            }
        }
        for j in 0..m {
            if dist_col[j] < f64::INFINITY {
                pot_col[j] -= (d_sink - dist_col[j]).max(0.0);
            }
        }
    }
    flow
}

/// Brute-force `W₁` for uniform measures: the minimum over permutations of
/// the average matched distance. Enumeration is exhaustive, so this is an
/// oracle independent of the flow solver.
pub fn w1_permutation(
    target: &TargetSpace,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<f64, TransportError> {
    let n = mu.len();
    if n != nu.len() {
        return Err(TransportError::NotUniform);
    }
    let w = 1.0 / n as f64;
    if mu
        .weights
        .iter()
        .chain(nu.weights.iter())
        .any(|&x| (x - w).abs() > WEIGHT_TOL)
    {
        return Err(TransportError::NotUniform);
    }
    w1_permutation_lists(target, mu.support(), nu.support())
}

/// Permutation oracle on raw point lists (duplicates allowed), matching the
/// explicit formula for uniform empirical measures.
pub fn w1_permutation_lists(
    target: &TargetSpace,
    ys: &[TargetPoint],
    zs: &[TargetPoint],
) -> Result<f64, TransportError> {
    const MAX_N: usize = 8;
    let n = ys.len();
    if n != zs.len() {
        return Err(TransportError::NotUniform);
    }
    if n == 0 {
        return Err(TransportError::EmptySupport);
    }
    if n > MAX_N {
        return Err(TransportError::TooLarge { max: MAX_N, got: n });
    }
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = target.distance(&ys[i], &zs[j])?;
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let total: f64 = p.iter().enumerate().map(|(i, &j)| d[i][j]).sum();
        if total < best {
            best = total;
        }
    });
    Ok(best / n as f64)
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Result of checking the total-variation bound
/// `W₁(Σαᵢδ_{xᵢ}, Σβᵢδ_{xᵢ}) ≤ (D/2)·Σ|αᵢ−βᵢ|` on a shared support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EspinolaReport {
    pub w1: f64,
    pub bound: f64,
    /// `bound - w1`; the inequality holds iff this is ≥ 0 (up to float slack).
    pub margin: f64,
    pub holds: bool,
}

/// Verifies the shared-support total-variation bound for `W₁` and returns the
/// margin. `alpha` and `beta` must lie in the standard simplex.
pub fn espinola_check(
    target: &TargetSpace,
    points: &[TargetPoint],
    alpha: &[f64],
    beta: &[f64],
) -> Result<EspinolaReport, TransportError> {
    if alpha.len() != beta.len() {
        return Err(TransportError::LengthMismatch {
            support: alpha.len(),
            weights: beta.len(),
        });
    }
    let mu = DiscreteMeasure::new(points.to_vec(), alpha.to_vec())?;
    let nu = DiscreteMeasure::new(points.to_vec(), beta.to_vec())?;
    let (w1, _) = w1_distance(target, &mu, &nu)?;
    let mut diam = 0.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            diam = diam.max(target.distance(&points[i], &points[j])?);
        }
    }
    let tv: f64 = alpha.iter().zip(beta).map(|(a, b)| (a - b).abs()).sum();
    let bound = 0.5 * diam * tv;
    Ok(EspinolaReport {
        w1,
        bound,
        margin: bound - w1,
        holds: approx_le(w1, bound, 1e-9),
    })
}

/// Barycenter of a measure over a normed target: the weighted average.
///
/// Midpoint-table targets are rejected: constructing barycenters on general
/// spaces of this kind is out of scope, and the error message says so.
pub fn barycenter(
    target: &TargetSpace,
    mu: &DiscreteMeasure,
) -> Result<TargetPoint, TransportError> {
    let normed = match target {
        TargetSpace::Normed(n) => n,
        TargetSpace::Midpoint(_) => return Err(TransportError::UnsupportedTarget),
    };
    mu.check_space(target)?;
    let mut acc = vec![0.0; normed.dim];
    for (p, &w) in mu.support().iter().zip(mu.weights()) {
        let v = p.as_vec().expect("checked normed support");
        for (a, x) in acc.iter_mut().zip(v) {
            *a += w * x;
        }
    }
    Ok(TargetPoint::Vec(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn real_line() -> TargetSpace {
        TargetSpace::normed(1, Norm::L2)
    }

    fn pt(x: f64) -> TargetPoint {
        TargetPoint::Vec(vec![x])
    }

    #[test]
    fn canonicalization_merges_and_sorts() {
        let mu =
            DiscreteMeasure::new(vec![pt(2.0), pt(0.0), pt(2.0)], vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(mu.len(), 2);
        assert_eq!(mu.support()[0], pt(0.0));
        assert_eq!(mu.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn dirac_to_dirac_is_ground_distance() {
        let t = real_line();
        let (d, plan) = w1_distance(
            &t,
            &DiscreteMeasure::dirac(pt(1.0)),
            &DiscreteMeasure::dirac(pt(4.0)),
        )
        .unwrap();
        assert!((d - 3.0).abs() < 1e-12);
        assert!((plan.flow[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_measures_have_zero_distance() {
        let t = real_line();
        let mu = DiscreteMeasure::from_vectors(vec![vec![0.0], vec![1.0]], vec![0.3, 0.7]).unwrap();
        let (d, _) = w1_distance(&t, &mu, &mu).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn zero_distance_iff_equal_after_canonicalization() {
        let t = real_line();
        // Listing an atom twice canonicalizes to the same measure (up to the
        // rounding of the merged weights): W₁ vanishes.
        let a = DiscreteMeasure::new(vec![pt(0.0), pt(0.0), pt(1.0)], vec![0.2, 0.1, 0.7]).unwrap();
        let b = DiscreteMeasure::from_vectors(vec![vec![0.0], vec![1.0]], vec![0.3, 0.7]).unwrap();
        assert_eq!(a.support(), b.support());
        let (d, _) = w1_distance(&t, &a, &b).unwrap();
        assert!(d.abs() < 1e-12);
        // Distinct canonical measures are at positive distance.
        let c = DiscreteMeasure::from_vectors(vec![vec![0.0], vec![1.0]], vec![0.4, 0.6]).unwrap();
        let (d, _) = w1_distance(&t, &b, &c).unwrap();
        assert!((d - 0.1).abs() < 1e-12, "moved mass 0.1 over distance 1, got {d}");
    }

    #[test]
    fn split_mass_example() {
        // μ = ½δ₀ + ½δ₂, ν = δ₁: each half moves distance 1, so W₁ = 1.
        let t = real_line();
        let mu = DiscreteMeasure::from_vectors(vec![vec![0.0], vec![2.0]], vec![0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::dirac(pt(1.0));
        let (d, plan) = w1_distance(&t, &mu, &nu).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!(plan.marginal_error(&mu, &nu) < MARGINAL_TOL);
    }

    #[test]
    fn permutation_oracle_trivial_cases() {
        let t = real_line();
        let mu = DiscreteMeasure::dirac(pt(0.0));
        let nu = DiscreteMeasure::dirac(pt(2.5));
        assert!((w1_permutation(&t, &mu, &nu).unwrap() - 2.5).abs() < 1e-12);
        let same = DiscreteMeasure::uniform(vec![pt(0.0), pt(1.0), pt(2.0)]).unwrap();
        assert!(w1_permutation(&t, &same, &same).unwrap().abs() < 1e-12);
    }

    #[test]
    fn permutation_oracle_rejects_nonuniform_and_large() {
        let t = real_line();
        let mu = DiscreteMeasure::from_vectors(vec![vec![0.0], vec![1.0]], vec![0.3, 0.7]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![pt(0.0), pt(1.0)]).unwrap();
        assert!(matches!(
            w1_permutation(&t, &mu, &nu),
            Err(TransportError::NotUniform)
        ));
        let big: Vec<TargetPoint> = (0..9).map(|i| pt(i as f64)).collect();
        assert!(matches!(
            w1_permutation_lists(&t, &big, &big),
            Err(TransportError::TooLarge { .. })
        ));
    }

    fn random_uniform_pair(
        rng: &mut ChaCha8Rng,
        dim: usize,
        n: usize,
    ) -> (TargetSpace, DiscreteMeasure, DiscreteMeasure) {
        let t = TargetSpace::normed(dim, Norm::L2);
        let points = |rng: &mut ChaCha8Rng| -> Vec<TargetPoint> {
            (0..n)
                .map(|_| TargetPoint::Vec((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect()))
                .collect()
        };
        let mu = DiscreteMeasure::uniform(points(rng)).unwrap();
        let nu = DiscreteMeasure::uniform(points(rng)).unwrap();
        (t, mu, nu)
    }

    #[test]
    fn flow_solver_matches_permutation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(1..=6);
            let dim = rng.random_range(1..=3);
            let (t, mu, nu) = random_uniform_pair(&mut rng, dim, n);
            let (d_flow, plan) = w1_distance(&t, &mu, &nu).unwrap();
            let d_perm = w1_permutation(&t, &mu, &nu).unwrap();
            assert!(
                (d_flow - d_perm).abs() < 1e-9,
                "flow {d_flow} vs permutation {d_perm}"
            );
            assert!(plan.marginal_error(&mu, &nu) < MARGINAL_TOL);
        }
    }

    #[test]
    fn rational_weights_reduce_to_uniform_expansion() {
        // A measure with weights k/N is the uniform measure over k-fold
        // repeated atoms, so the permutation oracle applies after expansion:
        // an independent check of the solver on non-uniform inputs.
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let t = TargetSpace::normed(2, Norm::L2);
        for _ in 0..40 {
            let denom = *[4usize, 6, 8].iter().choose(&mut rng).unwrap();
            let split = |rng: &mut ChaCha8Rng| -> Vec<usize> {
                // Random composition of `denom` into at most 3 parts.
                let cut1 = rng.random_range(1..=denom);
                let cut2 = rng.random_range(0..=denom - cut1);
                vec![cut1, cut2, denom - cut1 - cut2]
            };
            let atoms = |rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
                (0..3)
                    .map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
                    .collect()
            };
            let (pa, pb) = (atoms(&mut rng), atoms(&mut rng));
            let (wa, wb) = (split(&mut rng), split(&mut rng));
            let expand = |pts: &[Vec<f64>], w: &[usize]| -> Vec<TargetPoint> {
                pts.iter()
                    .zip(w)
                    .flat_map(|(p, &k)| std::iter::repeat_n(TargetPoint::Vec(p.clone()), k))
                    .collect()
            };
            let to_measure = |pts: &[Vec<f64>], w: &[usize]| {
                let kept: Vec<(Vec<f64>, f64)> = pts
                    .iter()
                    .zip(w)
                    .filter(|&(_, &k)| k > 0)
                    .map(|(p, &k)| (p.clone(), k as f64 / denom as f64))
                    .collect();
                DiscreteMeasure::from_vectors(
                    kept.iter().map(|(p, _)| p.clone()).collect(),
                    kept.iter().map(|&(_, w)| w).collect(),
                )
                .unwrap()
            };
            let mu = to_measure(&pa, &wa);
            let nu = to_measure(&pb, &wb);
            let (flow, _) = w1_distance(&t, &mu, &nu).unwrap();
            let perm = w1_permutation_lists(&t, &expand(&pa, &wa), &expand(&pb, &wb)).unwrap();
            assert!((flow - perm).abs() < 1e-9, "flow {flow} vs expanded oracle {perm}");
        }
    }

    #[test]
    fn w1_metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let t = TargetSpace::normed(2, Norm::L2);
            let mk = |rng: &mut ChaCha8Rng| {
                let n = rng.random_range(1..=5);
                let pts: Vec<Vec<f64>> = (0..n)
                    .map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
                    .collect();
                let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= s);
                DiscreteMeasure::from_vectors(pts, w).unwrap()
            };
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let d = |x: &DiscreteMeasure, y: &DiscreteMeasure| w1_distance(&t, x, y).unwrap().0;
            assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-9);
            assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
            assert!(d(&a, &a).abs() < 1e-9);
        }
    }

    #[test]
    fn espinola_trivial_and_forced_cases() {
        let t = real_line();
        let pts = vec![pt(0.0), pt(3.0)];
        // α = β gives 0 ≤ 0.
        let r = espinola_check(&t, &pts, &[0.4, 0.6], &[0.4, 0.6]).unwrap();
        assert!(r.holds && r.w1.abs() < 1e-12);
        // α = (1,0), β = (0,1): W₁ = d = 3 and the bound is (D/2)·2 = D = 3.
        let r = espinola_check(&t, &pts, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(r.holds);
        assert!((r.w1 - 3.0).abs() < 1e-12);
        assert!(r.margin.abs() < 1e-12);
    }

    #[test]
    fn barycenter_basics() {
        let t = TargetSpace::normed(2, Norm::L2);
        let x = TargetPoint::Vec(vec![1.0, 2.0]);
        let b = barycenter(&t, &DiscreteMeasure::dirac(x.clone())).unwrap();
        assert_eq!(b, x);
        let mu =
            DiscreteMeasure::from_vectors(vec![vec![0.0, 0.0], vec![2.0, 4.0]], vec![0.5, 0.5])
                .unwrap();
        let b = barycenter(&t, &mu).unwrap();
        assert_eq!(b, TargetPoint::Vec(vec![1.0, 2.0]));
    }

    #[test]
    fn barycenter_is_one_lipschitz_for_each_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for norm in [Norm::L1, Norm::L2, Norm::Linf] {
            let t = TargetSpace::normed(3, norm);
            for _ in 0..170 {
                let mk = |rng: &mut ChaCha8Rng| {
                    let n = rng.random_range(1..=4);
                    let pts: Vec<Vec<f64>> = (0..n)
                        .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
                        .collect();
                    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    w.iter_mut().for_each(|x| *x /= s);
                    DiscreteMeasure::from_vectors(pts, w).unwrap()
                };
                let (mu, nu) = (mk(&mut rng), mk(&mut rng));
                let (w1, _) = w1_distance(&t, &mu, &nu).unwrap();
                let bx = barycenter(&t, &mu).unwrap();
                let by = barycenter(&t, &nu).unwrap();
                let d = t.distance(&bx, &by).unwrap();
                assert!(d <= w1 + 1e-9, "barycenter moved {d} > W1 {w1}");
            }
        }
    }

    #[test]
    fn midpoint_targets_are_rejected_by_barycenter() {
        let one = crate::metric::FiniteMetricSpace::validate(vec![vec![0.0]]).unwrap();
        let m = crate::metric::MidpointSpace::validate(one, vec![vec![0]]).unwrap();
        let t = TargetSpace::Midpoint(m);
        let mu = DiscreteMeasure::dirac(TargetPoint::Ref(0));
        assert!(matches!(
            barycenter(&t, &mu),
            Err(TransportError::UnsupportedTarget)
        ));
    }
}
