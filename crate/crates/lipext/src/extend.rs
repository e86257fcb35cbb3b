//! The four extension pipelines and their certificates.
//!
//! Every pipeline produces an [`ExtensionResult`]: total values on `X` that
//! agree with `f` on `A` bitwise, an exact global Lipschitz certificate, and
//! the explicit bound the construction guarantees for 1-Lipschitz input. All
//! pipelines are positively homogeneous in the map's values, so for general
//! input the certificate is compared against `bound · Lip f`.
//!
//! * [`mcshane_extend`] — the scalar infimal formula
//!   `F(x) = min_a [f(a) + L·d(a, x)]`, which preserves the Lipschitz
//!   constant exactly.
//! * [`whitney_extend`] — Whitney cover, partition of unity, nearest
//!   anchors, and the weighted average `F(x) = Σ φ_i(x)·f(a_i)`; certified
//!   against `1000·(c+1)·log₂(n+2)`.
//! * [`lee_naor_extend`] — the multiscale blend
//!   `F = (N+1)⁻¹ Σ_m ω_m·F_m` over padded covers of a finite domain;
//!   certified against `600·log n / log log n`.
//! * [`nerve_extend`] — factorization through the nerve complex,
//!   `F = Ψ∘Φ`, with a barycentric or skeletal simplicial extensor;
//!   certified against `100·C·α·δ⁻¹·γ·log₂(n+2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covering::{iterative_ball_partition, CoveringError, PartitionMode};
use crate::metric::{
    certify_values, dist_to_set, nearest_in, FiniteMetricSpace, LipschitzCertificate, MetricError,
    NormedSpace, PartialLipschitzMap, TargetPoint,
};
use crate::partition::{build_partition, PartitionError, PartitionOfUnity};
use crate::simplicial::{
    barycentric_extensor, measure_extensor_constants, nerve_of_cover, skeletal_extend,
    SimplexConstantReport, SimplicialError,
};
use crate::tol::{approx_le, CERT_SLACK, REL_TOL};
use crate::whitney::{
    build_whitney_cover, NagataOracle, WhitneyCovering, WhitneyError, WhitneyKind,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtendError {
    #[error("the scalar formula needs a 1-dimensional normed target")]
    NonScalarTarget,
    #[error("this pipeline needs a normed vector target")]
    NonNormedTarget,
    #[error("multiscale extension needs at least {min} domain points; got {got}")]
    DomainTooSmall { got: usize, min: usize },
    #[error("the covering's axioms are not verified")]
    CoverNotVerified,
    #[error("the covering was built for a different domain subset")]
    DomainMismatch,
    #[error("the partial map has an empty domain")]
    EmptyDomain,
    #[error("internal property violated: {0}")]
    PropertyViolated(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Whitney(#[from] WhitneyError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    McShane,
    Whitney,
    LeeNaor,
    Nerve,
}

/// A total extension with its exact certificate and the bound it is held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub method: Method,
    /// One target vector per point of `X`; equal to `f` on `A` bitwise.
    pub values: Vec<Vec<f64>>,
    pub certificate: LipschitzCertificate,
    /// Exact Lipschitz constant of the input `f` on `A`.
    pub lip_f: f64,
    /// The construction's certified constant for 1-Lipschitz input.
    pub bound_constant: f64,
    pub bound_label: String,
    /// `bound_constant · lip_f`: the bound for this input, by homogeneity.
    pub bound_effective: f64,
    pub within_bound: bool,
    /// Construction parameters used, for reproducibility.
    pub params: Vec<(String, f64)>,
}

impl ExtensionResult {
    /// Bitwise agreement with the partial map on its domain.
    pub fn extends(&self, f: &PartialLipschitzMap) -> bool {
        f.domain.iter().all(|a| match f.value_at(a) {
            Some(TargetPoint::Vec(v)) => &self.values[a] == v,
            _ => false,
        })
    }

    /// `certificate / lip_f`, the scale-free constant (0 for constant input).
    pub fn normalized_constant(&self) -> f64 {
        if self.lip_f > 0.0 {
            self.certificate.constant / self.lip_f
        } else {
            0.0
        }
    }
}

fn finish_result(
    space: &FiniteMetricSpace,
    method: Method,
    target: &NormedSpace,
    values: Vec<Vec<f64>>,
    lip_f: f64,
    bound_constant: f64,
    bound_label: &str,
    params: Vec<(String, f64)>,
) -> Result<ExtensionResult, ExtendError> {
    let certificate = certify_values(space, target, &values)?;
    let bound_effective = bound_constant * lip_f;
    let within_bound = certificate.constant <= bound_effective + CERT_SLACK;
    Ok(ExtensionResult {
        method,
        values,
        certificate,
        lip_f,
        bound_constant,
        bound_label: bound_label.to_string(),
        bound_effective,
        within_bound,
        params,
    })
}

fn normed_values(f: &PartialLipschitzMap) -> Result<(&NormedSpace, Vec<Vec<f64>>), ExtendError> {
    let normed = f.target.as_normed().ok_or(ExtendError::NonNormedTarget)?;
    let values = f
        .values
        .iter()
        .map(|p| p.as_vec().cloned().ok_or(ExtendError::NonNormedTarget))
        .collect::<Result<_, _>>()?;
    Ok((normed, values))
}

/// Scalar extension by the infimal formula, scaled to the certified constant:
/// `F(x) = min_a [f(a) + L·d(a, x)]` with `L = Lip f`. The result restricts
/// to `f` on `A` and satisfies `Lip F ≤ L`.
pub fn mcshane_extend(
    space: &FiniteMetricSpace,
    f: &PartialLipschitzMap,
) -> Result<ExtensionResult, ExtendError> {
    let (normed, fa) = normed_values(f)?;
    if normed.dim != 1 {
        return Err(ExtendError::NonScalarTarget);
    }
    if f.domain.is_empty() {
        return Err(ExtendError::EmptyDomain);
    }
    let lip_f = f.certify(space)?.constant;
    let mut values = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        if let Some(TargetPoint::Vec(v)) = f.value_at(x) {
            values.push(v.clone());
            continue;
        }
        let inf = f
            .domain
            .iter()
            .zip(&fa)
            .map(|(a, v)| v[0] + lip_f * space.d(a, x))
            .fold(f64::INFINITY, f64::min);
        values.push(vec![inf]);
    }
    finish_result(
        space,
        Method::McShane,
        normed,
        values,
        lip_f,
        1.0,
        "Lip F <= Lip f (infimal formula preserves the constant)",
        vec![("lip_f".into(), lip_f)],
    )
}

/// Exact per-pair check of the anchor-distance inequality
/// `d(a_i, x) ≤ (1 + α + δ)·r_i` over all exterior points and their active
/// blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorReport {
    pub pairs_checked: usize,
    /// Worst `d(a_i, x) / ((1+α+δ)·r_i)` observed.
    pub max_ratio: f64,
    pub holds: bool,
}

fn anchor_check(
    space: &FiniteMetricSpace,
    cover: &WhitneyCovering,
    pou: &PartitionOfUnity,
) -> Result<AnchorReport, ExtendError> {
    let factor = 1.0 + cover.alpha + cover.delta;
    let mut pairs_checked = 0;
    let mut max_ratio = 0.0f64;
    let mut holds = true;
    for x in cover.covering.covers.iter() {
        for &(i, _) in pou.evaluate_weights(x)? {
            let lhs = space.d(pou.anchors[i], x);
            let rhs = factor * cover.block_dist(i);
            pairs_checked += 1;
            max_ratio = max_ratio.max(lhs / rhs);
            holds &= approx_le(lhs, rhs, REL_TOL);
        }
    }
    Ok(AnchorReport {
        pairs_checked,
        max_ratio,
        holds,
    })
}

/// The Whitney pipeline bundled with its intermediate objects for audit.
/// `cover` and `pou` are absent in the degenerate case `A = X`, where no
/// covering of the (empty) complement exists and `F = f`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyExtension {
    pub result: ExtensionResult,
    pub cover: Option<WhitneyCovering>,
    pub pou: Option<PartitionOfUnity>,
    pub anchors: AnchorReport,
}

/// Whitney-type extension: cover of `X∖A`, partition of unity, nearest
/// anchors, and `F(x) = Σ_i φ_i(x)·f(a_i)` off `A` (the barycenter of the
/// weighted Dirac combination, for normed targets). Certified against
/// `1000·(c+1)·log₂(n+2)`.
pub fn whitney_extend(
    space: &FiniteMetricSpace,
    f: &PartialLipschitzMap,
    r: f64,
    oracle: &dyn NagataOracle,
) -> Result<WhitneyExtension, ExtendError> {
    let (normed, fa) = normed_values(f)?;
    if f.domain.is_empty() {
        return Err(ExtendError::EmptyDomain);
    }
    let lip_f = f.certify(space)?.constant;
    let n = oracle.nagata_n();
    let c = oracle.nagata_c();
    let bound_constant = 1000.0 * (c + 1.0) * (n as f64 + 2.0).log2();
    let label = "1000·(c+1)·log2(n+2)";
    if f.domain.len() == space.len() {
        // A = X: the extension is f itself.
        let result = finish_result(
            space,
            Method::Whitney,
            normed,
            fa,
            lip_f,
            bound_constant,
            label,
            vec![
                ("r".into(), r),
                ("nagata_n".into(), n as f64),
                ("nagata_c".into(), c),
            ],
        )?;
        return Ok(WhitneyExtension {
            result,
            cover: None,
            pou: None,
            anchors: AnchorReport {
                pairs_checked: 0,
                max_ratio: 0.0,
                holds: true,
            },
        });
    }
    let cover = build_whitney_cover(space, &f.domain, r, oracle)?;
    let pou = build_partition(space, &cover)?;
    let values = evaluate_partition_extension(space, f, normed, &pou)?;
    let anchors = anchor_check(space, &cover, &pou)?;
    let result = finish_result(
        space,
        Method::Whitney,
        normed,
        values,
        lip_f,
        bound_constant,
        label,
        vec![
            ("r".into(), r),
            ("nagata_n".into(), n as f64),
            ("nagata_c".into(), c),
            ("alpha".into(), cover.alpha),
            ("delta".into(), cover.delta),
            ("gamma".into(), cover.gamma),
            ("blocks".into(), cover.covering.blocks.len() as f64),
        ],
    )?;
    Ok(WhitneyExtension {
        result,
        cover: Some(cover),
        pou: Some(pou),
        anchors,
    })
}

fn evaluate_partition_extension(
    space: &FiniteMetricSpace,
    f: &PartialLipschitzMap,
    normed: &NormedSpace,
    pou: &PartitionOfUnity,
) -> Result<Vec<Vec<f64>>, ExtendError> {
    let anchor_value = |i: usize| -> &Vec<f64> {
        match f.value_at(pou.anchors[i]) {
            Some(TargetPoint::Vec(v)) => v,
            _ => unreachable!("anchors lie in the domain"),
        }
    };
    let mut values = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        if let Some(TargetPoint::Vec(v)) = f.value_at(x) {
            values.push(v.clone());
            continue;
        }
        let mut acc = vec![0.0; normed.dim];
        for &(i, w) in pou.evaluate_weights(x)? {
            for (a, y) in acc.iter_mut().zip(anchor_value(i)) {
                *a += w * y;
            }
        }
        values.push(acc);
    }
    Ok(values)
}

/// Diagnostics of the multiscale pipeline: the exactly-asserted identities
/// and the informational per-scale Lipschitz data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeeNaorDiagnostics {
    /// `N+1 = max(1, ⌊log₂ log n⌋)`.
    pub n_plus_one: usize,
    /// Scales `m` carrying nonzero cutoff weight somewhere.
    pub scales: Vec<i64>,
    /// Worst `|Σ_m ω_m(x) − (N+1)|` over exterior points.
    pub cutoff_sum_max_dev: f64,
    /// Worst `‖F_m(x) − f(a_x)‖ / 2^m` over scales and `x ∈ X_m`.
    pub anchor_drift_max_ratio: f64,
    /// Largest number of nonzero cutoffs at one point (≤ N+2).
    pub cutoff_support_max: usize,
    /// Informational: worst `Lip F_m(x) / (120·log ratio(x))` over the
    /// applicable deep points (sampled covers, so reported, not asserted).
    pub scale_lipschitz_max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeeNaorExtension {
    pub result: ExtensionResult,
    pub diagnostics: LeeNaorDiagnostics,
}

fn omega(t: f64, n_cap: i32) -> f64 {
    let top = (n_cap as f64).exp2();
    if t <= 0.5 || t > 2.0 * top {
        0.0
    } else if t <= 1.0 {
        2.0 * t - 1.0
    } else if t <= top {
        1.0
    } else {
        -t / top + 2.0
    }
}

/// Multiscale extension for a finite domain of `n ≥ 16` points:
/// `F(x) = (N+1)⁻¹·Σ_m ω_m(x)·F_m(x)`, with per-scale maps built from padded
/// coverings of `A` at radius `2^{m−1}` and cutoffs
/// `ω_m(x) = ω(2^m/(16·d(x,A)))`. The cutoff-sum identity
/// `Σ_m ω_m(x) = N+1` and the anchor drift `‖F_m(x) − f(a_x)‖ ≤ 2^m` are
/// asserted exactly; the certificate is compared to `600·log n/log log n`.
pub fn lee_naor_extend(
    space: &FiniteMetricSpace,
    f: &PartialLipschitzMap,
    seed: u64,
) -> Result<LeeNaorExtension, ExtendError> {
    const MIN_DOMAIN: usize = 16;
    const SAMPLED_PERMUTATIONS: usize = 2000;
    let (normed, _) = normed_values(f)?;
    let a = &f.domain;
    let n_dom = a.len();
    if n_dom < MIN_DOMAIN {
        return Err(ExtendError::DomainTooSmall {
            got: n_dom,
            min: MIN_DOMAIN,
        });
    }
    let lip_f = f.certify(space)?.constant;
    let n_plus_one = ((n_dom as f64).ln().log2().floor() as usize).max(1);
    let n_cap = n_plus_one as i32 - 1;

    let a_idx: Vec<usize> = a.iter().collect();
    let a_pos: std::collections::BTreeMap<usize, usize> =
        a_idx.iter().enumerate().map(|(p, &g)| (g, p)).collect();
    let a_space = space.restriction(a);
    let d_to_a: Vec<f64> = (0..space.len())
        .map(|x| dist_to_set(space, x, a).expect("A nonempty"))
        .collect();
    let a_x: Vec<usize> = (0..space.len())
        .map(|x| nearest_in(space, x, a))
        .collect::<Result<_, MetricError>>()?;
    let exterior = a.complement(space.len());
    if exterior.is_empty() {
        let (_, fa) = normed_values(f)?;
        let result = finish_result(
            space,
            Method::LeeNaor,
            normed,
            fa,
            lip_f,
            600.0 * (n_dom as f64).ln() / (n_dom as f64).ln().ln(),
            "600·log(n)/log(log(n))",
            vec![("n".into(), n_dom as f64), ("seed".into(), seed as f64)],
        )?;
        return Ok(LeeNaorExtension {
            result,
            diagnostics: LeeNaorDiagnostics {
                n_plus_one,
                scales: Vec::new(),
                cutoff_sum_max_dev: 0.0,
                anchor_drift_max_ratio: 0.0,
                cutoff_support_max: 0,
                scale_lipschitz_max_ratio: 0.0,
            },
        });
    }
    let d_min = exterior
        .iter()
        .map(|x| d_to_a[x])
        .fold(f64::INFINITY, f64::min);
    let d_max = exterior.iter().map(|x| d_to_a[x]).fold(0.0f64, f64::max);
    let m_lo = (8.0 * d_min).log2().floor() as i64 - 2;
    let m_hi = (d_max.log2() + 5.0 + n_cap as f64).ceil() as i64 + 2;
    let omega_at =
        |m: i64, x: usize| -> f64 { omega((m as f64).exp2() / (16.0 * d_to_a[x]), n_cap) };
    let scales: Vec<i64> = (m_lo..=m_hi)
        .filter(|&m| exterior.iter().any(|x| omega_at(m, x) > 0.0))
        .collect();

    let f_value = |global_a: usize| -> &Vec<f64> {
        match f.value_at(global_a) {
            Some(TargetPoint::Vec(v)) => v,
            _ => unreachable!("domain values are vectors"),
        }
    };

    let mut anchor_drift_max_ratio = 0.0f64;
    let mut scale_lipschitz_max_ratio = 0.0f64;
    // F_m values per scale, indexed by global point (None off X_m).
    let mut per_scale: Vec<Vec<Option<Vec<f64>>>> = Vec::with_capacity(scales.len());
    for (si, &m) in scales.iter().enumerate() {
        let two_m = (m as f64).exp2();
        let radius = two_m / 2.0;
        let seed_m = seed.wrapping_add((si as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let partition = iterative_ball_partition(
            &a_space,
            radius,
            PartitionMode::Sample {
                count: SAMPLED_PERMUTATIONS,
                seed: seed_m,
            },
        )?;
        // Blocks in A-local indices; anchors a_i = first member, globalized.
        let blocks: Vec<Vec<usize>> = partition
            .covering
            .blocks
            .iter()
            .map(|b| b.indices().to_vec())
            .collect();
        let block_anchor: Vec<usize> = blocks.iter().map(|b| a_idx[b[0]]).collect();
        let blocks_of: Vec<Vec<usize>> = {
            let mut by_point = vec![Vec::new(); n_dom];
            for (i, b) in blocks.iter().enumerate() {
                for &p in b {
                    by_point[p].push(i);
                }
            }
            by_point
        };
        let in_xm: Vec<bool> = (0..space.len()).map(|x| d_to_a[x] <= two_m).collect();
        let xm: Vec<usize> = (0..space.len()).filter(|&x| in_xm[x]).collect();
        // Per-point exponent from the ball-count ratio inside A.
        let ratio_of = |x: usize| -> f64 {
            let al = a_pos[&a_x[x]];
            let big = (0..n_dom).filter(|&y| a_space.d(al, y) <= two_m).count() as f64;
            let small = (0..n_dom)
                .filter(|&y| a_space.d(al, y) <= two_m / 4.0)
                .count() as f64;
            big / small
        };
        let mut fm: Vec<Option<Vec<f64>>> = vec![None; space.len()];
        for &x in &xm {
            let al = a_pos[&a_x[x]];
            let exponent = ratio_of(x).ln().max(1.0);
            let mut acc = vec![0.0; normed.dim];
            let mut total = 0.0;
            for &bi in &blocks_of[al] {
                // d(x, X_m ∖ B_i), where B_i = {y ∈ X_m : a_y ∈ A_i}.
                let mut dist = f64::INFINITY;
                for &y in &xm {
                    let yl = a_pos[&a_x[y]];
                    if !blocks[bi].contains(&yl) {
                        dist = dist.min(space.d(x, y));
                    }
                }
                if !dist.is_finite() {
                    dist = two_m / 16.0; // block swallows X_m: cap at δ·2^m
                }
                let psi = dist.powf(exponent);
                total += psi;
                for (acc_c, v) in acc.iter_mut().zip(f_value(block_anchor[bi])) {
                    *acc_c += psi * v;
                }
            }
            if !(total > 0.0) {
                return Err(ExtendError::PropertyViolated(format!(
                    "scale {m}: point {x} has empty cutoff support"
                )));
            }
            for acc_c in &mut acc {
                *acc_c /= total;
            }
            let drift = normed.distance(&acc, f_value(a_x[x]));
            anchor_drift_max_ratio = anchor_drift_max_ratio.max(drift / two_m);
            if !approx_le(drift, lip_f.max(1.0) * two_m, CERT_SLACK) {
                // For 1-Lipschitz f the drift bound is 2^m; it scales with
                // Lip f by homogeneity.
                return Err(ExtendError::PropertyViolated(format!(
                    "scale {m}: anchor drift {drift} exceeds {}",
                    lip_f.max(1.0) * two_m
                )));
            }
            fm[x] = Some(acc);
        }
        // Informational: per-scale pointwise Lipschitz against 120·log ratio.
        for &x in &xm {
            if d_to_a[x] > two_m / 16.0 {
                continue;
            }
            let log_ratio = ratio_of(x).ln();
            if log_ratio <= 0.0 {
                continue;
            }
            let fx = fm[x].as_ref().expect("x in X_m");
            let mut lip_here = 0.0f64;
            for &y in &xm {
                if y != x {
                    let fy = fm[y].as_ref().expect("y in X_m");
                    lip_here = lip_here.max(normed.distance(fx, fy) / space.d(x, y));
                }
            }
            let cap = 120.0 * lip_f.max(1.0) * log_ratio;
            scale_lipschitz_max_ratio = scale_lipschitz_max_ratio.max(lip_here / cap);
        }
        per_scale.push(fm);
    }

    // Blend with the cutoffs and assert the sum identity.
    let mut cutoff_sum_max_dev = 0.0f64;
    let mut cutoff_support_max = 0usize;
    let mut values = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        if let Some(TargetPoint::Vec(v)) = f.value_at(x) {
            values.push(v.clone());
            continue;
        }
        let mut acc = vec![0.0; normed.dim];
        let mut wsum = 0.0;
        let mut support = 0usize;
        for (si, &m) in scales.iter().enumerate() {
            let w = omega_at(m, x);
            if w == 0.0 {
                continue;
            }
            support += 1;
            wsum += w;
            let fmx = per_scale[si][x].as_ref().ok_or_else(|| {
                ExtendError::PropertyViolated(format!(
                    "cutoff active at scale {m} for point {x} outside X_m"
                ))
            })?;
            for (a_c, v) in acc.iter_mut().zip(fmx) {
                *a_c += w * v;
            }
        }
        let dev = (wsum - n_plus_one as f64).abs();
        cutoff_sum_max_dev = cutoff_sum_max_dev.max(dev);
        if dev > 1e-9 {
            return Err(ExtendError::PropertyViolated(format!(
                "cutoff sum at point {x} is {wsum}, expected {n_plus_one}"
            )));
        }
        if support > n_plus_one + 1 {
            return Err(ExtendError::PropertyViolated(format!(
                "point {x} has {support} active cutoffs, more than N+2"
            )));
        }
        cutoff_support_max = cutoff_support_max.max(support);
        for a_c in &mut acc {
            *a_c /= n_plus_one as f64;
        }
        values.push(acc);
    }

    let nf = n_dom as f64;
    let bound_constant = 600.0 * nf.ln() / nf.ln().ln();
    let result = finish_result(
        space,
        Method::LeeNaor,
        normed,
        values,
        lip_f,
        bound_constant,
        "600·log(n)/log(log(n))",
        vec![
            ("n".into(), n_dom as f64),
            ("n_plus_one".into(), n_plus_one as f64),
            ("seed".into(), seed as f64),
            ("scales".into(), scales.len() as f64),
            ("sampled_permutations".into(), SAMPLED_PERMUTATIONS as f64),
        ],
    )?;
    Ok(LeeNaorExtension {
        result,
        diagnostics: LeeNaorDiagnostics {
            n_plus_one,
            scales,
            cutoff_sum_max_dev,
            anchor_drift_max_ratio,
            cutoff_support_max,
            scale_lipschitz_max_ratio,
        },
    })
}

/// Which simplicial extensor closes the nerve pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensorKind {
    Barycentric,
    Skeletal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NerveExtension {
    pub result: ExtensionResult,
    pub nerve_dimension: usize,
    /// The extensor constant used in the bound: 1 for barycentric, the
    /// measured per-simplex maximum for skeletal.
    pub extensor_constant: f64,
    pub simplex_reports: Vec<SimplexConstantReport>,
    pub anchors: AnchorReport,
    /// Informational headline constant `3·10¹⁰·(c+1)¹⁰·(10⁵λ)^{n+1}·(n+1)^{6n}`
    /// with `λ = √3`, for comparison only (never binding).
    pub headline_bound: Option<f64>,
}

/// Nerve-complex extension `F = Ψ∘Φ`: the partition's weight map into the
/// nerve, closed by a simplicial extensor on the anchor values. Certified
/// against `100·C·α·δ⁻¹·γ·log₂(n+2)` with `C = 1` for the barycentric
/// extensor on normed targets (measured `C` reported for the skeletal one).
pub fn nerve_extend(
    space: &FiniteMetricSpace,
    f: &PartialLipschitzMap,
    cover: &WhitneyCovering,
    extensor: ExtensorKind,
) -> Result<NerveExtension, ExtendError> {
    let (normed, _) = normed_values(f)?;
    if !cover.verified.holds() {
        return Err(ExtendError::CoverNotVerified);
    }
    if cover.domain != f.domain {
        return Err(ExtendError::DomainMismatch);
    }
    let lip_f = f.certify(space)?.constant;
    let pou = build_partition(space, cover)?;
    let nerve = nerve_of_cover(cover, &pou)?;
    let vertex_values: Vec<Vec<f64>> = pou
        .anchors
        .iter()
        .map(|&a| match f.value_at(a) {
            Some(TargetPoint::Vec(v)) => v.clone(),
            _ => unreachable!("anchors lie in the domain"),
        })
        .collect();

    let evaluate: Box<dyn Fn(&[(usize, f64)]) -> Vec<f64>> = match extensor {
        ExtensorKind::Barycentric => {
            let bary = barycentric_extensor(&nerve, normed.clone(), vertex_values.clone())?;
            Box::new(move |w| bary.evaluate_coords(w))
        }
        ExtensorKind::Skeletal => {
            let skel = skeletal_extend(&nerve, normed.clone(), vertex_values.clone(), 8)?;
            Box::new(move |w| skel.evaluate_coords(w))
        }
    };
    let mesh = match nerve.dimension() {
        0..=2 => 16,
        3 => 8,
        4 => 6,
        _ => 5,
    };
    let simplex_reports =
        measure_extensor_constants(&nerve, normed, &vertex_values, &evaluate, mesh, 20_000, 71);
    let extensor_constant = match extensor {
        ExtensorKind::Barycentric => 1.0,
        ExtensorKind::Skeletal => simplex_reports
            .iter()
            .map(|r| r.ratio)
            .fold(1.0f64, f64::max),
    };

    let mut values = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        if let Some(TargetPoint::Vec(v)) = f.value_at(x) {
            values.push(v.clone());
            continue;
        }
        values.push(evaluate(pou.evaluate_weights(x)?));
    }
    let anchors = anchor_check(space, cover, &pou)?;
    let n_w = cover.multiplicity_param;
    let bound_constant = 100.0
        * extensor_constant
        * cover.alpha
        * (1.0 / cover.delta)
        * cover.gamma
        * (n_w as f64 + 2.0).log2();
    let headline_bound = match cover.kind {
        WhitneyKind::Basic {
            nagata_n, nagata_c, ..
        }
        | WhitneyKind::Refined {
            n: nagata_n,
            nagata_c,
            ..
        } => {
            let n = nagata_n as f64;
            let lambda = 3.0f64.sqrt();
            Some(
                3e10 * (nagata_c + 1.0).powi(10)
                    * (1e5 * lambda).powf(n + 1.0)
                    * (n + 1.0).powf(6.0 * n),
            )
        }
    };
    let result = finish_result(
        space,
        Method::Nerve,
        normed,
        values,
        lip_f,
        bound_constant,
        "100·C·α·δ⁻¹·γ·log2(n+2)",
        vec![
            ("alpha".into(), cover.alpha),
            ("delta".into(), cover.delta),
            ("gamma".into(), cover.gamma),
            ("multiplicity_param".into(), n_w as f64),
            ("extensor_constant".into(), extensor_constant),
        ],
    )?;
    Ok(NerveExtension {
        result,
        nerve_dimension: nerve.dimension(),
        extensor_constant,
        simplex_reports,
        anchors,
        headline_bound,
    })
}
