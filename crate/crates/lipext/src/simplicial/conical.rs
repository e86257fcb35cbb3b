//! Conical extension of sphere maps into targets with linear segments, and
//! the radial conversion constants between balls and convex bodies.
//!
//! Given `f` on the unit sphere and an apex `p`, the cone
//! `F(x) = p + |x|·(f(x/|x|) − p)` extends `f` to the ball with
//! `Lip F ≤ √(1 + R²)` where `R = sup d(p, f(x))` (for 1-Lipschitz `f`).
//! The bound is tight: mapping the circle into its own space of probability
//! measures by Dirac embedding, coned from the uniform measure, attains it.
//! [`wasserstein_circle_tightness`] reproduces that example on a discretized
//! circle with exact transport distances.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimplicialError;
use crate::metric::{Norm, NormedSpace, TargetPoint, TargetSpace};
use crate::transport::{w1_distance, DiscreteMeasure};

/// `n` equally spaced points on the unit circle.
pub fn circle_points(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// `n` Fibonacci-lattice points on the unit 2-sphere.
pub fn fibonacci_sphere_points(n: usize) -> Vec<Vec<f64>> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = 2.0 * std::f64::consts::PI * k as f64 / golden;
            vec![r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Result of a sampled conical extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicalReport {
    /// Lipschitz constant of the input samples before normalization.
    pub lip_f_raw: f64,
    /// `R = max_x d(apex, f(x))` after normalization to `Lip f = 1`.
    pub r_max: f64,
    /// Largest sampled difference quotient of `F` over ball-point pairs.
    pub lip_ball: f64,
    /// `√(1 + R²)`.
    pub bound: f64,
    pub holds: bool,
    pub pair_samples: usize,
    /// Ball sample points (radial grid times sphere samples, plus the apex
    /// at the origin) and the extension's values there.
    pub ball_points: Vec<Vec<f64>>,
    pub ball_values: Vec<Vec<f64>>,
}

/// Cones sphere samples from an apex over the unit ball, normalizing the
/// input map to unit Lipschitz constant on its samples, and certifies the
/// sampled extension against `√(1 + R²)`.
pub fn conical_extend(
    sphere_samples: &[Vec<f64>],
    f_values: &[Vec<f64>],
    target: &NormedSpace,
    apex: &[f64],
    radial_steps: usize,
    pair_samples: usize,
    seed: u64,
) -> Result<ConicalReport, SimplicialError> {
    if sphere_samples.is_empty() || f_values.len() != sphere_samples.len() {
        return Err(SimplicialError::ZeroSamples);
    }
    let ambient = sphere_samples[0].len();
    if sphere_samples.iter().any(|p| p.len() != ambient) {
        return Err(SimplicialError::Geometry(
            "sphere samples must share one dimension".into(),
        ));
    }
    if apex.len() != target.dim || f_values.iter().any(|v| v.len() != target.dim) {
        return Err(SimplicialError::Geometry(
            "apex and values must match the target dimension".into(),
        ));
    }
    let euclid = NormedSpace::new(ambient, Norm::L2);
    let mut lip_f_raw = 0.0f64;
    for i in 0..sphere_samples.len() {
        for j in (i + 1)..sphere_samples.len() {
            let dx = euclid.distance(&sphere_samples[i], &sphere_samples[j]);
            if dx > 1e-12 {
                lip_f_raw = lip_f_raw.max(target.distance(&f_values[i], &f_values[j]) / dx);
            }
        }
    }
    // Normalize around the apex so the certified bound applies to a
    // 1-Lipschitz map; constant maps are left as-is.
    let scale = if lip_f_raw > 0.0 {
        1.0 / lip_f_raw
    } else {
        1.0
    };
    let normalized: Vec<Vec<f64>> = f_values
        .iter()
        .map(|v| {
            v.iter()
                .zip(apex)
                .map(|(x, p)| p + scale * (x - p))
                .collect()
        })
        .collect();
    let r_max = normalized
        .iter()
        .map(|v| target.distance(v, apex))
        .fold(0.0, f64::max);

    let mut ball_points: Vec<Vec<f64>> = vec![vec![0.0; ambient]];
    let mut ball_values: Vec<Vec<f64>> = vec![apex.to_vec()];
    for (theta, fv) in sphere_samples.iter().zip(&normalized) {
        for step in 1..=radial_steps {
            let t = step as f64 / radial_steps as f64;
            ball_points.push(theta.iter().map(|x| t * x).collect());
            ball_values.push(apex.iter().zip(fv).map(|(p, y)| p + t * (y - p)).collect());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lip_ball = 0.0f64;
    let mut used = 0usize;
    while used < pair_samples {
        let i = rng.random_range(0..ball_points.len());
        let j = rng.random_range(0..ball_points.len());
        if i == j {
            continue;
        }
        let dx = euclid.distance(&ball_points[i], &ball_points[j]);
        if dx <= 1e-12 {
            continue;
        }
        lip_ball = lip_ball.max(target.distance(&ball_values[i], &ball_values[j]) / dx);
        used += 1;
    }
    let bound = (1.0 + r_max * r_max).sqrt();
    let holds = lip_ball <= bound * (1.0 + 1e-6);
    Ok(ConicalReport {
        lip_f_raw,
        r_max,
        lip_ball,
        bound,
        holds,
        pair_samples: used,
        ball_points,
        ball_values,
    })
}

/// Converting Lipschitz connectivity constants between the unit ball and a
/// convex body with inradius `r` and circumradius `R` (both measured from an
/// interior origin): the body's constant `λ_K` satisfies
/// `(r/R)·λ ≤ λ_K ≤ (R/r)²·λ`.
pub fn lc_radial_bounds(inradius: f64, circumradius: f64, lambda: f64) -> (f64, f64) {
    (
        inradius / circumradius * lambda,
        (circumradius / inradius).powi(2) * lambda,
    )
}

/// Inradius and circumradius (from the origin) of a convex polygon given by
/// its vertices in order. The origin must lie strictly inside.
pub fn polygon_radii(vertices: &[[f64; 2]]) -> Result<(f64, f64), SimplicialError> {
    let n = vertices.len();
    if n < 3 {
        return Err(SimplicialError::Geometry(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    // Convexity and origin-inside: consistent cross-product sign for edges,
    // and the origin strictly on the interior side of every edge.
    let mut orientation = 0.0f64;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if orientation == 0.0 {
            orientation = cross.signum();
        } else if cross * orientation < 0.0 {
            return Err(SimplicialError::Geometry("polygon is not convex".into()));
        }
    }
    let mut inr = f64::INFINITY;
    let mut circ = 0.0f64;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        circ = circ.max((a[0] * a[0] + a[1] * a[1]).sqrt());
        // Signed origin side of edge a→b must match the orientation.
        let side = a[0] * b[1] - a[1] * b[0];
        if side * orientation <= 0.0 {
            return Err(SimplicialError::Geometry(
                "origin is not strictly inside".into(),
            ));
        }
        inr = inr.min(segment_distance_to_origin(a, b));
    }
    Ok((inr, circ))
}

fn segment_distance_to_origin(a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (-(a[0] * ab[0] + a[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let p = [a[0] + t * ab[0], a[1] + t * ab[1]];
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

/// Inradius and circumradius of the standard `n`-simplex viewed in its
/// affine hull: `r = 1/√(n(n+1))`, `R = √(n/(n+1))`.
pub fn simplex_radii(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (1.0 / (nf * (nf + 1.0)).sqrt(), (nf / (nf + 1.0)).sqrt())
}

/// `(R/r)² = n²` for the standard simplex: the factor converting ball
/// extension constants to simplex extension constants.
pub fn simplex_lc_factor(n: usize) -> f64 {
    let (r, cr) = simplex_radii(n);
    (cr / r).powi(2)
}

/// Result of the tightness probe on the discretized measure-valued circle
/// example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub atoms: usize,
    /// `R` from the sampled sphere values (max transport distance from the
    /// uniform measure to a Dirac on the circle).
    pub r_max: f64,
    pub bound: f64,
    pub max_ratio: f64,
    /// Whether the sampled ratio reaches `√(1+R²) − slack`.
    pub achieved: bool,
    pub slack: f64,
}

/// Probes the equality case: the circle mapped into its measure space by
/// Dirac embedding, coned from the (discretized) uniform measure. Ratios are
/// exact transport distances divided by Euclidean ball distances; the
/// maximum is taken over a deterministic grid of near-extremal pairs.
pub fn wasserstein_circle_tightness(
    atoms: usize,
    direction_samples: usize,
    slack: f64,
) -> Result<TightnessReport, SimplicialError> {
    if atoms < 3 {
        return Err(SimplicialError::ZeroSamples);
    }
    let target = TargetSpace::normed(2, Norm::L2);
    let grid = circle_points(atoms);
    let uniform = DiscreteMeasure::uniform(grid.iter().cloned().map(TargetPoint::Vec).collect())
        .map_err(|e| SimplicialError::Geometry(e.to_string()))?;
    // R over sampled directions.
    let mut r_max = 0.0f64;
    for theta in circle_points(direction_samples.max(8)) {
        let (d, _) = w1_distance(
            &target,
            &uniform,
            &DiscreteMeasure::dirac(TargetPoint::Vec(theta)),
        )
        .map_err(|e| SimplicialError::Geometry(e.to_string()))?;
        r_max = r_max.max(d);
    }
    let bound = (1.0 + r_max * r_max).sqrt();
    // Near-extremal pairs: x = r·e(0), y = (r+ε)·e(φ) with φ ≈ ε/(r·R);
    // the ratio converges to √(1+R²) as ε → 0 along that direction.
    let cone = |radius: f64, angle: f64| -> Result<DiscreteMeasure, SimplicialError> {
        let dir = vec![angle.cos(), angle.sin()];
        let mut support: Vec<TargetPoint> = grid.iter().cloned().map(TargetPoint::Vec).collect();
        support.push(TargetPoint::Vec(dir));
        let mut weights = vec![(1.0 - radius) / atoms as f64; atoms];
        weights.push(radius);
        DiscreteMeasure::new(support, weights).map_err(|e| SimplicialError::Geometry(e.to_string()))
    };
    let mut max_ratio = 0.0f64;
    for &r in &[0.85, 0.9, 0.95] {
        for &eps in &[0.01, 0.02, 0.04] {
            for &factor in &[0.6, 1.0, 1.6] {
                let s = r + eps;
                if s > 1.0 {
                    continue;
                }
                let phi = factor * eps / (r * r_max);
                let mx = cone(r, 0.0)?;
                let my = cone(s, phi)?;
                let (w, _) = w1_distance(&target, &mx, &my)
                    .map_err(|e| SimplicialError::Geometry(e.to_string()))?;
                let x = [r, 0.0];
                let y = [s * phi.cos(), s * phi.sin()];
                let dx = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
                if dx > 1e-12 {
                    max_ratio = max_ratio.max(w / dx);
                }
            }
        }
    }
    Ok(TightnessReport {
        atoms,
        r_max,
        bound,
        max_ratio,
        achieved: max_ratio >= bound - slack,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_circle_cones_to_identity() {
        let samples = circle_points(256);
        let target = NormedSpace::new(2, Norm::L2);
        let report =
            conical_extend(&samples, &samples.clone(), &target, &[0.0, 0.0], 8, 4000, 5).unwrap();
        assert!((report.lip_f_raw - 1.0).abs() < 1e-9);
        assert!((report.r_max - 1.0).abs() < 1e-12);
        // F(x) = x has Lipschitz constant 1, well under √2.
        assert!(report.lip_ball <= 1.0 + 1e-9);
        assert!(report.holds);
    }

    #[test]
    fn constant_map_cones_to_constant() {
        let samples = circle_points(64);
        let target = NormedSpace::new(2, Norm::L2);
        let vals = vec![vec![0.7, -0.1]; samples.len()];
        let report = conical_extend(&samples, &vals, &target, &[0.7, -0.1], 4, 500, 6).unwrap();
        assert_eq!(report.lip_f_raw, 0.0);
        assert_eq!(report.r_max, 0.0);
        assert_eq!(report.lip_ball, 0.0);
        assert!(report.holds);
    }

    #[test]
    fn apex_in_image_stays_under_three() {
        // With the apex on the image, Lip F ≤ 3·Lip f.
        let samples = circle_points(128);
        let target = NormedSpace::new(2, Norm::L2);
        let apex = samples[0].clone();
        let report =
            conical_extend(&samples, &samples.clone(), &target, &apex, 8, 4000, 7).unwrap();
        assert!(report.lip_ball <= 3.0 * (1.0 + 1e-9));
    }

    #[test]
    fn sphere_samples_are_unit_norm() {
        for p in fibonacci_sphere_points(512) {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn radial_bounds_and_simplex_factor() {
        let (lo, hi) = lc_radial_bounds(1.0, 2.0, 3.0f64.sqrt());
        assert!((lo - 0.5 * 3.0f64.sqrt()).abs() < 1e-15);
        assert!((hi - 4.0 * 3.0f64.sqrt()).abs() < 1e-15);
        // Standard-simplex ratio (R/r)² is exactly n².
        for n in 1..=6 {
            assert!((simplex_lc_factor(n) - (n * n) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn polygon_radii_of_square() {
        let square = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        let (r, cr) = polygon_radii(&square).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!((cr - 2.0f64.sqrt()).abs() < 1e-12);
        // Origin outside: shift the square away.
        let shifted = [[3.0, 1.0], [1.0, 1.0], [1.0, -1.0], [3.0, -1.0]];
        assert!(polygon_radii(&shifted).is_err());
    }

    #[test]
    fn tightness_probe_reaches_the_bound() {
        let report = wasserstein_circle_tightness(96, 96, 0.05).unwrap();
        // R for the uniform measure on the circle is 4/π up to
        // discretization.
        assert!((report.r_max - 4.0 / std::f64::consts::PI).abs() < 0.01);
        assert!(
            report.achieved,
            "ratio {} vs bound {}",
            report.max_ratio, report.bound
        );
        // The sampled ratio can approach but must not exceed the bound.
        assert!(report.max_ratio <= report.bound * (1.0 + 1e-6));
    }
}
