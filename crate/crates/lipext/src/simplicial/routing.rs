//! Routing through intersecting simplices and the quasiconvexity probe.
//!
//! For `n`-simplices `Δ, Δ′` with a common face and points `x ∈ Δ`,
//! `y ∈ Δ′`, there is a `z` in the intersection with
//! `|x−z| + |z−y| ≤ 4√n·|x−y|`: move all of `x`'s private mass onto one
//! shared vertex. Chaining this through a path of pairwise-intersecting
//! simplices bounds the length metric of a pure connected complex against
//! its ℓ₂ metric.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sparse_l2, SimplicialComplex, SimplicialError};

/// The routed point and its detour statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteResult {
    pub z: Vec<(usize, f64)>,
    /// `|x−z| + |z−y|`.
    pub detour: f64,
    /// `|x−y|`.
    pub direct: f64,
    /// `4√n` for `n = max(dim Δ, dim Δ′)`.
    pub bound_factor: f64,
    pub holds: bool,
}

/// Routes `x ∈ Δ` to `y ∈ Δ′` through a point of `Δ ∩ Δ′`: the shared
/// coordinates of `x` are kept and its private mass is transferred onto the
/// smallest shared vertex. The returned point always lies in the
/// intersection, and the detour is checked against `4√n·|x−y|`.
pub fn route_through_intersection(
    delta: &[usize],
    delta_prime: &[usize],
    x: &[(usize, f64)],
    y: &[(usize, f64)],
) -> Result<RouteResult, SimplicialError> {
    let shared: Vec<usize> = delta
        .iter()
        .copied()
        .filter(|v| delta_prime.binary_search(v).is_ok())
        .collect();
    if shared.is_empty() {
        return Err(SimplicialError::DisjointSimplices);
    }
    let anchor = shared[0];
    let is_shared = |v: usize| shared.binary_search(&v).is_ok();
    let nu: f64 = x
        .iter()
        .filter(|&&(v, _)| !is_shared(v))
        .map(|&(_, w)| w)
        .sum();
    let mut z: Vec<(usize, f64)> = x.iter().copied().filter(|&(v, _)| is_shared(v)).collect();
    match z.binary_search_by_key(&anchor, |&(v, _)| v) {
        Ok(i) => z[i].1 += nu,
        Err(i) => {
            if nu > 0.0 {
                z.insert(i, (anchor, nu));
            }
        }
    }
    z.retain(|&(_, w)| w > 0.0);
    debug_assert!((z.iter().map(|&(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-9);
    let direct = sparse_l2(x, y);
    let detour = sparse_l2(x, &z) + sparse_l2(&z, y);
    let n = delta.len().max(delta_prime.len()).saturating_sub(1).max(1);
    let bound_factor = 4.0 * (n as f64).sqrt();
    let holds = if direct == 0.0 {
        detour <= 1e-12
    } else {
        detour <= bound_factor * direct * (1.0 + 1e-9)
    };
    Ok(RouteResult {
        z,
        detour,
        direct,
        bound_factor,
        holds,
    })
}

/// Outcome of the quasiconvexity probe on a pure complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub samples: usize,
    /// Largest observed (path length)/(ℓ₂ distance) over the sampled pairs.
    pub max_ratio: f64,
    /// `N^{10·log n}` for `N` maximal simplices — only meaningful for n ≥ 2.
    pub bound: Option<f64>,
    pub holds: bool,
}

/// Samples point pairs in a connected pure `n`-complex, joins them by chained
/// intersection routing along a breadth-first simplex path, and reports the
/// worst length-to-distance ratio. For `n ≥ 2` the ratio is compared against
/// `N^{10·log n}`.
pub fn quasiconvexity_probe(
    complex: &SimplicialComplex,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, SimplicialError> {
    let n = complex.dimension();
    if !complex.is_pure(n) {
        let bad = complex
            .maximal_simplices()
            .iter()
            .find(|s| s.len() != n + 1)
            .cloned()
            .unwrap_or_default();
        return Err(SimplicialError::NotPure {
            expected: n,
            simplex: bad,
        });
    }
    let sims = complex.maximal_simplices();
    let m = sims.len();
    // Adjacency by shared vertices; BFS parents from every source on demand.
    let adjacent =
        |a: usize, b: usize| -> bool { sims[a].iter().any(|v| sims[b].binary_search(v).is_ok()) };
    // Connectivity check from simplex 0.
    {
        let mut seen = vec![false; m];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(a) = queue.pop_front() {
            for b in 0..m {
                if !seen[b] && adjacent(a, b) {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(SimplicialError::Disconnected);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = if m == 1 { 1.0 } else { 0.0 };
    let mut used = 0usize;
    for _ in 0..samples {
        let sa = rng.random_range(0..m);
        let sb = rng.random_range(0..m);
        let x = random_point(&mut rng, &sims[sa]);
        let y = random_point(&mut rng, &sims[sb]);
        let direct = sparse_l2(&x, &y);
        if direct < 1e-9 {
            continue;
        }
        let chain = bfs_chain(sa, sb, m, &adjacent);
        let length = route_chain(sims, &chain, &x, &y)?;
        max_ratio = max_ratio.max(length / direct);
        used += 1;
    }
    let bound = (n >= 2).then(|| (m as f64).powf(10.0 * (n as f64).ln()));
    let holds = bound.map_or(true, |b| max_ratio <= b * (1.0 + 1e-9));
    Ok(ProbeReport {
        samples: used,
        max_ratio,
        bound,
        holds,
    })
}

fn random_point(rng: &mut ChaCha8Rng, simplex: &[usize]) -> Vec<(usize, f64)> {
    // Exponential spacings give the uniform distribution on the simplex.
    let raw: Vec<f64> = simplex
        .iter()
        .map(|_| -rng.random::<f64>().max(1e-12).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    simplex
        .iter()
        .zip(raw)
        .map(|(&v, w)| (v, w / total))
        .collect()
}

fn bfs_chain(
    from: usize,
    to: usize,
    m: usize,
    adjacent: &dyn Fn(usize, usize) -> bool,
) -> Vec<usize> {
    if from == to {
        return vec![from];
    }
    let mut parent = vec![usize::MAX; m];
    let mut queue = std::collections::VecDeque::from([from]);
    parent[from] = from;
    while let Some(a) = queue.pop_front() {
        for b in 0..m {
            if parent[b] == usize::MAX && adjacent(a, b) {
                parent[b] = a;
                if b == to {
                    queue.clear();
                    break;
                }
                queue.push_back(b);
            }
        }
    }
    let mut chain = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        chain.push(cur);
    }
    chain.reverse();
    chain
}

/// Length of the piecewise-linear path from `x` (in the first chain simplex)
/// to `y` (in the last) obtained by recursive halving through shared
/// vertices, with the coordinate formula on adjacent pairs.
fn route_chain(
    sims: &[Vec<usize>],
    chain: &[usize],
    x: &[(usize, f64)],
    y: &[(usize, f64)],
) -> Result<f64, SimplicialError> {
    match chain.len() {
        0 => unreachable!("chains are nonempty"),
        1 => Ok(sparse_l2(x, y)),
        2 => {
            let r = route_through_intersection(&sims[chain[0]], &sims[chain[1]], x, y)?;
            Ok(r.detour)
        }
        len => {
            let mid = len / 2;
            let (a, b) = (chain[mid - 1], chain[mid]);
            let shared_vertex = sims[a]
                .iter()
                .copied()
                .find(|v| sims[b].binary_search(v).is_ok())
                .ok_or(SimplicialError::DisjointSimplices)?;
            let z = vec![(shared_vertex, 1.0)];
            let left = route_chain(sims, &chain[..mid], x, &z)?;
            let right = route_chain(sims, &chain[mid..], &z, y)?;
            Ok(left + right)
        }
    }
}
