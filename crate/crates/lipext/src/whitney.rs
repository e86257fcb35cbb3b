//! Whitney-type coverings of `X∖A` and verification of the covering axioms.
//!
//! A covering of `X∖A` is a *Whitney covering* with parameters
//! `(n, α, δ, γ)` when, writing `r_i = d(B_i, A)`:
//!
//! 1. controlled diameter: `diam B_i ≤ α·r_i`;
//! 2. bounded multiplicity: every `x ∈ X∖A` lies in the open neighborhood
//!    `N_{δ·r_i}(B_i)` for at most `n+1` indices;
//! 3. controlled distance to the domain: `hd(B_i, A) ≤ γ·r_i`.
//!
//! [`build_whitney_cover`] realizes the basic construction from annuli
//! `r^k ≤ d(x, A) < r^{k+1}`, greedy separated nets, nearest-point anchors
//! into `A`, and a Nagata cover of `A` pulled back through the net. With
//! `ε = (r−1)/2r`, a level-`k` block has diameter at most
//! `(2(ε+r) + 2c(2ε+r))·r^k` and every member sits within `(ε+r)·r^k` of
//! `A`, while `r_i = d(B_i, A)` can dip as low as `(1−ε)·r^k`; the emitted
//! parameters are therefore `α = (2(ε+r) + 2c(2ε+r))/(1−ε)`, `δ = ε/2r`,
//! `γ = (r+ε)/(1−ε)`, with a multiplicity bound of `3(n+1)`.
//! [`build_refined_whitney_cover`] lowers the
//! multiplicity to `n+1` using colored covers on sub-annuli, at the price of
//! much larger `α, γ` and a lower bound on `r`. Every emitted parameter is
//! re-verified exactly on the finished covering before it is returned.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covering::{
    colored_cover, grid_cover_subset, verify_nagata, Covering, CoveringError, DEFAULT_BLOCK_BUDGET,
};
use crate::metric::{
    dist_between_sets, dist_to_set, nearest_in, FiniteMetricSpace, MetricError, PointCloud, Subset,
};
use crate::tol::{approx_le, REL_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WhitneyError {
    #[error("A covers the whole space; there is nothing to extend over")]
    EmptyComplement,
    #[error("domain subset A is empty")]
    EmptyDomain,
    #[error("oracle cover at scale {scale} failed Nagata verification: {detail}")]
    OracleNotNagata { scale: f64, detail: String },
    #[error("refined construction needs r > {min}; got {r}")]
    RTooSmall { r: f64, min: f64 },
    #[error("annulus ratio must exceed 1; got {r}")]
    RatioNotAboveOne { r: f64 },
    #[error("constructed covering failed verification: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Supplies, for any scale `s > 0`, a `c·s`-bounded cover of a fixed subset
/// `A` with `s`-multiplicity at most `n+1` (blocks in global point indices).
pub trait NagataOracle {
    fn nagata_n(&self) -> usize;
    fn nagata_c(&self) -> f64;
    fn domain(&self) -> &Subset;
    fn cover_at(&self, scale: f64) -> Result<Covering, WhitneyError>;
}

/// Grid oracle for subsets of a Euclidean point cloud: certifies
/// `Nagata(2^d − 1, √d·d)` by axis-aligned cubes at every scale.
pub struct GridOracle<'a> {
    cloud: &'a PointCloud,
    subset: Subset,
}

impl<'a> GridOracle<'a> {
    pub fn new(cloud: &'a PointCloud, subset: Subset) -> Self {
        Self { cloud, subset }
    }
}

impl NagataOracle for GridOracle<'_> {
    fn nagata_n(&self) -> usize {
        (1usize << self.cloud.dim()) - 1
    }

    fn nagata_c(&self) -> f64 {
        let d = self.cloud.dim() as f64;
        d.sqrt() * d
    }

    fn domain(&self) -> &Subset {
        &self.subset
    }

    fn cover_at(&self, scale: f64) -> Result<Covering, WhitneyError> {
        Ok(grid_cover_subset(self.cloud, &self.subset, scale)?.covering)
    }
}

/// Fallback oracle for arbitrary finite subsets: the cover by singletons
/// certifies `Nagata(|A|−1, 0)` at every scale (multiplicity can never exceed
/// the number of points, and singleton diameters are zero).
pub struct SingletonOracle {
    subset: Subset,
    ambient_len: usize,
}

impl SingletonOracle {
    pub fn new(space: &FiniteMetricSpace, subset: Subset) -> Self {
        Self {
            subset,
            ambient_len: space.len(),
        }
    }
}

impl NagataOracle for SingletonOracle {
    fn nagata_n(&self) -> usize {
        self.subset.len().saturating_sub(1)
    }

    fn nagata_c(&self) -> f64 {
        0.0
    }

    fn domain(&self) -> &Subset {
        &self.subset
    }

    fn cover_at(&self, scale: f64) -> Result<Covering, WhitneyError> {
        let blocks = self
            .subset
            .iter()
            .map(|i| Subset::with_bound(self.ambient_len, vec![i]).expect("singleton"))
            .collect();
        let mut cov = Covering::new(blocks, self.subset.clone());
        cov.scale_s = Some(scale);
        Ok(cov)
    }
}

/// Which construction produced a Whitney covering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WhitneyKind {
    /// Annulus construction with multiplicity bound `3(n+1)`.
    Basic {
        r: f64,
        nagata_n: usize,
        nagata_c: f64,
    },
    /// Colored sub-annulus construction with multiplicity bound `n+1` and the
    /// subset-multiplicity property.
    Refined { r: f64, n: usize, nagata_c: f64 },
}

/// Per-axiom verification outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyReport {
    pub diameter_ok: bool,
    pub multiplicity_ok: bool,
    pub distance_ok: bool,
    /// Blocks violating controlled diameter: `(block, diam, bound)`.
    pub diameter_violations: Vec<(usize, f64, f64)>,
    /// Points violating bounded multiplicity: `(point, active blocks)`.
    pub multiplicity_violations: Vec<(usize, Vec<usize>)>,
    /// Blocks violating controlled distance: `(block, hd, bound)`.
    pub distance_violations: Vec<(usize, f64, f64)>,
}

impl WhitneyReport {
    pub fn holds(&self) -> bool {
        self.diameter_ok && self.multiplicity_ok && self.distance_ok
    }
}

/// A verified Whitney covering of `X∖A` with its emitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyCovering {
    /// Blocks cover `X∖A`; `block_dist_to_a` holds the exact `r_i`.
    pub covering: Covering,
    pub domain: Subset,
    /// The `n` of `Whitney(n, α, δ, γ)`: neighborhood multiplicity ≤ `n+1`.
    pub multiplicity_param: usize,
    pub alpha: f64,
    pub delta: f64,
    pub gamma: f64,
    pub kind: WhitneyKind,
    /// Derivation level of each block: annulus `k` (basic) or `(k, i)`
    /// sub-annulus (refined), for bookkeeping checks.
    pub levels: Vec<(usize, i64)>,
    pub verified: WhitneyReport,
}

impl WhitneyCovering {
    pub fn block_dist(&self, i: usize) -> f64 {
        self.covering
            .block_dist_to_a
            .as_ref()
            .expect("whitney covers carry r_i")[i]
    }
}

/// Exact check of the three Whitney axioms against explicit parameters.
pub fn verify_whitney(
    space: &FiniteMetricSpace,
    blocks: &[Subset],
    block_dist: &[f64],
    a: &Subset,
    n: usize,
    alpha: f64,
    delta: f64,
    gamma: f64,
) -> Result<WhitneyReport, WhitneyError> {
    if a.is_empty() {
        return Err(WhitneyError::EmptyDomain);
    }
    let mut diameter_violations = Vec::new();
    let mut distance_violations = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let r_i = block_dist[i];
        let diam = b.diameter(space);
        if !approx_le(diam, alpha * r_i, REL_TOL) {
            diameter_violations.push((i, diam, alpha * r_i));
        }
        let hd = crate::metric::hausdorff_to(space, b, a)?;
        if !approx_le(hd, gamma * r_i, REL_TOL) {
            distance_violations.push((i, hd, gamma * r_i));
        }
    }
    let mut multiplicity_violations = Vec::new();
    for x in a.complement(space.len()).iter() {
        let active: Vec<usize> = blocks
            .iter()
            .enumerate()
            .filter_map(|(i, b)| {
                let d = dist_to_set(space, x, b).expect("blocks nonempty");
                (d < delta * block_dist[i]).then_some(i)
            })
            .collect();
        if active.len() > n + 1 {
            multiplicity_violations.push((x, active));
        }
    }
    Ok(WhitneyReport {
        diameter_ok: diameter_violations.is_empty(),
        multiplicity_ok: multiplicity_violations.is_empty(),
        distance_ok: distance_violations.is_empty(),
        diameter_violations,
        multiplicity_violations,
        distance_violations,
    })
}

/// The default annulus ratio for the basic construction.
pub fn default_basic_r() -> f64 {
    1.25
}

/// Smallest power of two exceeding `2(c+1)·4^{n+1}`, the refined
/// construction's lower bound on `r`.
pub fn default_refined_r(n: usize, c: f64) -> f64 {
    let min = 2.0 * (c + 1.0) * 4f64.powi(n as i32 + 1);
    let mut r = 2.0f64;
    while r <= min {
        r *= 2.0;
    }
    r
}

fn annulus_level(d: f64, r: f64) -> i64 {
    // Largest k with r^k ≤ d; float-adjusted so r^k ≤ d < r^{k+1} exactly.
    let mut k = (d.ln() / r.ln()).floor() as i64;
    while r.powi(k as i32 + 1) <= d {
        k += 1;
    }
    while r.powi(k as i32) > d {
        k -= 1;
    }
    k
}

/// Basic Whitney covering of `X∖A` from a Nagata oracle for `A`.
///
/// Per occupied annulus `R_k = {r^k ≤ d(x,A) < r^{k+1}}`: a greedy
/// `εr^k`-separated net `W`, the nearest-point map `ρ : W → A`, and the
/// pullback of the oracle's cover of `A` at scale `s = 2(2ε+r)r^k`. Emits
/// `α = (2(ε+r) + 2c(2ε+r))/(1−ε)`, `δ = ε/2r`, `γ = (r+ε)/(1−ε)`,
/// multiplicity `3(n+1)`; all three axioms and the annulus bookkeeping are
/// re-verified exactly before the covering is returned.
pub fn build_whitney_cover(
    space: &FiniteMetricSpace,
    a: &Subset,
    r: f64,
    oracle: &dyn NagataOracle,
) -> Result<WhitneyCovering, WhitneyError> {
    if a.is_empty() {
        return Err(WhitneyError::EmptyDomain);
    }
    let exterior = a.complement(space.len());
    if exterior.is_empty() {
        return Err(WhitneyError::EmptyComplement);
    }
    if !(r > 1.0) {
        return Err(WhitneyError::RatioNotAboveOne { r });
    }
    let eps = (r - 1.0) / (2.0 * r);
    let delta = eps / (2.0 * r);
    let n = oracle.nagata_n();
    let c = oracle.nagata_c();

    let d_to_a: Vec<f64> = (0..space.len())
        .map(|x| dist_to_set(space, x, a).expect("A nonempty"))
        .collect();
    // Occupied annuli in increasing order of k.
    let mut by_level: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for x in exterior.iter() {
        by_level
            .entry(annulus_level(d_to_a[x], r))
            .or_default()
            .push(x);
    }

    let mut blocks: Vec<Subset> = Vec::new();
    let mut levels: Vec<(usize, i64)> = Vec::new();
    let mut seen: std::collections::BTreeMap<Vec<usize>, ()> = Default::default();
    for (&k, ring) in &by_level {
        let rk = r.powi(k as i32);
        let eps_k = eps * rk;
        let ring_subset = Subset::with_bound(space.len(), ring.clone()).expect("ring sorted");
        let net = crate::metric::greedy_separated_net(space, &ring_subset, eps_k);
        let anchors: Vec<(usize, usize)> = net
            .iter()
            .map(|w| Ok((w, nearest_in(space, w, a)?)))
            .collect::<Result<_, MetricError>>()?;
        let s_scale = 2.0 * (2.0 * eps + r) * rk;
        let acover = oracle.cover_at(s_scale)?;
        let nag = verify_nagata(space, &acover, s_scale, n, c)?;
        if !nag.holds {
            return Err(WhitneyError::OracleNotNagata {
                scale: s_scale,
                detail: format!(
                    "multiplicity {} (bound {}), {} oversize blocks",
                    nag.multiplicity.multiplicity,
                    nag.multiplicity_bound,
                    nag.oversize_blocks.len()
                ),
            });
        }
        for ablock in &acover.blocks {
            let members: Vec<usize> = exterior
                .iter()
                .filter(|&x| {
                    anchors
                        .iter()
                        .any(|&(w, rho_w)| space.d(x, w) <= eps_k && ablock.contains(rho_w))
                })
                .collect();
            if members.is_empty() {
                continue;
            }
            if seen.insert(members.clone(), ()).is_none() {
                blocks.push(Subset::with_bound(space.len(), members).expect("sorted members"));
                levels.push((0, k));
            }
        }
    }

    let alpha = (2.0 * (eps + r) + 2.0 * c * (2.0 * eps + r)) / (1.0 - eps);
    let gamma = (r + eps) / (1.0 - eps);
    let multiplicity_param = 3 * (n + 1) - 1;
    finish_cover(
        space,
        a,
        blocks,
        levels,
        multiplicity_param,
        alpha,
        delta,
        gamma,
        WhitneyKind::Basic {
            r,
            nagata_n: n,
            nagata_c: c,
        },
        &d_to_a,
    )
}

/// Shared tail of both constructions: compute `r_i`, verify the axioms and
/// the per-level distance window, and assemble the covering.
#[allow(clippy::too_many_arguments)]
fn finish_cover(
    space: &FiniteMetricSpace,
    a: &Subset,
    blocks: Vec<Subset>,
    levels: Vec<(usize, i64)>,
    multiplicity_param: usize,
    alpha: f64,
    delta: f64,
    gamma: f64,
    kind: WhitneyKind,
    d_to_a: &[f64],
) -> Result<WhitneyCovering, WhitneyError> {
    let block_dist: Vec<f64> = blocks
        .iter()
        .map(|b| b.iter().map(|x| d_to_a[x]).fold(f64::INFINITY, f64::min))
        .collect();
    for (i, &r_i) in block_dist.iter().enumerate() {
        if !(r_i > 0.0) {
            return Err(WhitneyError::VerificationFailed(format!(
                "block {i} touches A (r_i = {r_i})"
            )));
        }
    }
    // Level bookkeeping: every member of a block built at annulus level k
    // has its distance to A inside the construction's window for that level.
    match &kind {
        WhitneyKind::Basic { r, .. } => {
            let eps = (r - 1.0) / (2.0 * r);
            for ((b, &(_, k)), _) in blocks.iter().zip(&levels).zip(0..) {
                let rk = r.powi(k as i32);
                for x in b.iter() {
                    let d = d_to_a[x];
                    if !approx_le((1.0 - eps) * rk, d, REL_TOL)
                        || !approx_le(d, (r + eps) * rk, REL_TOL)
                    {
                        return Err(WhitneyError::VerificationFailed(format!(
                            "point {x} with d(x,A) = {d} escapes the level-{k} window"
                        )));
                    }
                }
            }
        }
        WhitneyKind::Refined { r, n, .. } => {
            for ((b, &(k, i)), _) in blocks.iter().zip(&levels).zip(0..) {
                let lo = r.powf(i as f64 - 1.0 + k as f64 / *n as f64);
                let hi = r.powf(i as f64 + k as f64 / *n as f64);
                for x in b.iter() {
                    let d = d_to_a[x];
                    if !approx_le(lo, d, REL_TOL) || d >= hi * (1.0 + REL_TOL) {
                        return Err(WhitneyError::VerificationFailed(format!(
                            "point {x} with d(x,A) = {d} escapes sub-annulus (k={k}, i={i})"
                        )));
                    }
                }
            }
        }
    }
    let report = verify_whitney(
        space,
        &blocks,
        &block_dist,
        a,
        multiplicity_param,
        alpha,
        delta,
        gamma,
    )?;
    if !report.holds() {
        return Err(WhitneyError::VerificationFailed(format!(
            "axioms failed: diameter {:?}, multiplicity {:?}, distance {:?}",
            report.diameter_violations.first(),
            report.multiplicity_violations.first(),
            report.distance_violations.first(),
        )));
    }
    let mut covering = Covering::new(blocks, a.complement(space.len()));
    covering.block_dist_to_a = Some(block_dist);
    Ok(WhitneyCovering {
        covering,
        domain: a.clone(),
        multiplicity_param,
        alpha,
        delta,
        gamma,
        kind,
        levels,
        verified: report,
    })
}

/// Refined Whitney covering with multiplicity `n+1` (`n = oracle.n + 1`),
/// built from colored covers of `A` on sub-annuli
/// `R_k^i = {r^{i−1+k/n} ≤ d(x,A) < r^{i+k/n}}` and merged under the
/// equivalence generated by `d(B, B') ≤ r^{i+1}`.
///
/// Emits `α = 40r³(c+1)(n+1)`, `δ = 1/(8r²)`, `γ = r²`, and additionally
/// certifies the subset-multiplicity property: no `E ⊂ X∖A` with
/// `diam E ≤ r^{1/(2n)}·d(E, A)` meets more than `n+1` blocks (exhaustive
/// branch-and-bound search for a violating `E`).
pub fn build_refined_whitney_cover(
    space: &FiniteMetricSpace,
    a: &Subset,
    r: f64,
    oracle: &dyn NagataOracle,
) -> Result<WhitneyCovering, WhitneyError> {
    if a.is_empty() {
        return Err(WhitneyError::EmptyDomain);
    }
    let exterior = a.complement(space.len());
    if exterior.is_empty() {
        return Err(WhitneyError::EmptyComplement);
    }
    let nu = oracle.nagata_n(); // A satisfies Nagata(nu, c)
    let c = oracle.nagata_c();
    let n = nu + 1;
    let r_min = 2.0 * (c + 1.0) * 4f64.powi(n as i32 + 1);
    if r <= r_min {
        return Err(WhitneyError::RTooSmall { r, min: r_min });
    }

    let d_to_a: Vec<f64> = (0..space.len())
        .map(|x| dist_to_set(space, x, a).expect("A nonempty"))
        .collect();
    let rho: Vec<usize> = (0..space.len())
        .map(|x| nearest_in(space, x, a))
        .collect::<Result<_, MetricError>>()?;

    // Sub-annulus of each exterior point, per residue k.
    let sub_level = |d: f64, k: usize| -> i64 {
        let t = d.ln() / r.ln() - k as f64 / n as f64;
        let mut i = t.floor() as i64 + 1;
        while r.powf(i as f64 - 1.0 + k as f64 / n as f64) > d {
            i -= 1;
        }
        while r.powf(i as f64 + k as f64 / n as f64) <= d {
            i += 1;
        }
        i
    };

    let mut occupied: std::collections::BTreeMap<(usize, i64), Vec<usize>> = Default::default();
    for x in exterior.iter() {
        for k in 0..n {
            occupied
                .entry((k, sub_level(d_to_a[x], k)))
                .or_default()
                .push(x);
        }
    }
    // Colored covers of A at every needed order.
    let mut needed: std::collections::BTreeSet<i64> = Default::default();
    for &(_, i) in occupied.keys() {
        needed.insert(i);
        needed.insert(i + 1);
    }
    let mut colored: std::collections::BTreeMap<i64, Covering> = Default::default();
    for &i in &needed {
        let s_i = 4.0 * r.powf(i as f64 + 1.0);
        let base_scale = 2.0 * (nu as f64 + 2.0) * s_i;
        let base = oracle.cover_at(base_scale)?;
        let cover = colored_cover(space, s_i, nu, c, &base).map_err(|e| match e {
            CoveringError::BaseNotNagata(d) => WhitneyError::OracleNotNagata {
                scale: base_scale,
                detail: d,
            },
            other => WhitneyError::Covering(other),
        })?;
        colored.insert(i, cover);
    }

    let mut blocks: Vec<Subset> = Vec::new();
    let mut levels: Vec<(usize, i64)> = Vec::new();
    for (&(k, i), ring) in &occupied {
        // Raw pullback blocks from color class k of the covers at orders i
        // and i+1.
        let mut raw: Vec<Vec<usize>> = Vec::new();
        for j in [i, i + 1] {
            let cov = &colored[&j];
            let colors = cov.colors.as_ref().expect("colored cover");
            for (b, block) in cov.blocks.iter().enumerate() {
                if colors[b] != k + 1 {
                    continue;
                }
                let members: Vec<usize> = ring
                    .iter()
                    .copied()
                    .filter(|&x| block.contains(rho[x]))
                    .collect();
                if !members.is_empty() {
                    raw.push(members);
                }
            }
        }
        // Merge under the equivalence generated by d(B, B') ≤ r^{i+1}.
        let threshold = r.powf(i as f64 + 1.0);
        let raw_subsets: Vec<Subset> = raw
            .into_iter()
            .map(|m| Subset::from_unsorted(space.len(), m).expect("members in range"))
            .collect();
        let m = raw_subsets.len();
        let mut class: Vec<usize> = (0..m).collect();
        fn find(class: &mut Vec<usize>, x: usize) -> usize {
            if class[x] != x {
                let root = find(class, class[x]);
                class[x] = root;
            }
            class[x]
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let d = dist_between_sets(space, &raw_subsets[p], &raw_subsets[q])?;
                if d <= threshold {
                    let (rp, rq) = (find(&mut class, p), find(&mut class, q));
                    if rp != rq {
                        class[rp.max(rq)] = rp.min(rq);
                    }
                }
            }
        }
        let mut merged: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for p in 0..m {
            let root = find(&mut class, p);
            merged
                .entry(root)
                .or_default()
                .extend(raw_subsets[p].iter());
        }
        let merged_blocks: Vec<Subset> = merged
            .into_values()
            .map(|v| Subset::from_unsorted(space.len(), v).expect("members in range"))
            .collect();
        // Distinct classes must be separated beyond the merge threshold.
        for p in 0..merged_blocks.len() {
            for q in (p + 1)..merged_blocks.len() {
                let d = dist_between_sets(space, &merged_blocks[p], &merged_blocks[q])?;
                if d <= threshold {
                    return Err(WhitneyError::VerificationFailed(format!(
                        "merged classes at (k={k}, i={i}) are {d} apart, within the threshold {threshold}"
                    )));
                }
            }
        }
        for b in merged_blocks {
            blocks.push(b);
            levels.push((k, i));
        }
    }

    let alpha = 40.0 * r.powi(3) * (c + 1.0) * (n as f64 + 1.0);
    let delta = 1.0 / (8.0 * r * r);
    let gamma = r * r;
    let cover = finish_cover(
        space,
        a,
        blocks,
        levels,
        n,
        alpha,
        delta,
        gamma,
        WhitneyKind::Refined { r, n, nagata_c: c },
        &d_to_a,
    )?;
    // Subset-multiplicity: search for E with diam E ≤ r^{1/2n}·d(E, A)
    // meeting more than n+1 blocks.
    let search = subset_multiplicity_search(space, &cover, &d_to_a)?;
    if search.max_met > n + 1 {
        return Err(WhitneyError::VerificationFailed(format!(
            "subset-multiplicity violated: E = {:?} meets {} blocks",
            search.witness, search.max_met
        )));
    }
    Ok(cover)
}

/// Result of the exhaustive search for a subset meeting many blocks under
/// the refined diameter constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetMultiplicityReport {
    pub threshold_exponent: f64,
    pub max_met: usize,
    pub witness: Vec<(usize, usize)>,
}

/// Exhaustive branch-and-bound over block representatives: maximizes the
/// number of blocks met by a set `E` subject to
/// `diam E ≤ r^{1/(2n)}·d(E, A)`. Adding points only grows the diameter and
/// shrinks `d(E, A)`, so infeasible partial tuples prune soundly.
pub fn subset_multiplicity_search(
    space: &FiniteMetricSpace,
    cover: &WhitneyCovering,
    d_to_a: &[f64],
) -> Result<SubsetMultiplicityReport, WhitneyError> {
    let WhitneyKind::Refined { r, n, .. } = cover.kind else {
        return Err(WhitneyError::VerificationFailed(
            "subset-multiplicity search applies to refined covers".into(),
        ));
    };
    let blocks = &cover.covering.blocks;
    if blocks.len() > DEFAULT_BLOCK_BUDGET {
        return Err(CoveringError::SearchBudgetExceeded {
            blocks: blocks.len(),
            budget: DEFAULT_BLOCK_BUDGET,
        }
        .into());
    }
    let factor = r.powf(1.0 / (2.0 * n as f64));
    struct State<'s> {
        space: &'s FiniteMetricSpace,
        blocks: &'s [Subset],
        d_to_a: &'s [f64],
        factor: f64,
        best: Vec<(usize, usize)>,
    }
    fn dfs(st: &mut State, k: usize, chosen: &mut Vec<(usize, usize)>, diam: f64, min_d: f64) {
        if chosen.len() > st.best.len() {
            st.best = chosen.clone();
        }
        if k == st.blocks.len() || chosen.len() + (st.blocks.len() - k) <= st.best.len() {
            return;
        }
        for p in st.blocks[k].iter() {
            let mut nd = diam;
            for &(_, q) in chosen.iter() {
                nd = nd.max(st.space.d(p, q));
            }
            let nm = min_d.min(st.d_to_a[p]);
            if nd <= st.factor * nm {
                chosen.push((k, p));
                dfs(st, k + 1, chosen, nd, nm);
                chosen.pop();
            }
        }
        dfs(st, k + 1, chosen, diam, min_d);
    }
    let mut st = State {
        space,
        blocks,
        d_to_a,
        factor,
        best: Vec::new(),
    };
    let mut chosen = Vec::new();
    dfs(&mut st, 0, &mut chosen, 0.0, f64::INFINITY);
    Ok(SubsetMultiplicityReport {
        threshold_exponent: factor,
        max_met: st.best.len(),
        witness: st.best,
    })
}
