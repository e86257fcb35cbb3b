//! Mean chordal distance on the unit n-sphere by adaptive quadrature.
//!
//! For a fixed `q ∈ Sⁿ`, the average of `|x − q|` over the sphere reduces to
//! a one-dimensional integral in the polar angle with density `sin^{n−1}θ`:
//!
//! ```text
//! c_n = ∫₀^π 2·sin(θ/2)·sin^{n−1}θ dθ / ∫₀^π sin^{n−1}θ dθ.
//! ```
//!
//! Closed forms: `c₁ = 4/π`, `c₂ = 4/3`, and `c_n ≤ √2` for every `n` (the
//! parallelogram law pairs antipodal contributions).

use super::SimplicialError;

/// Average chordal distance from a point of `Sⁿ` to the whole sphere, to
/// quadrature tolerance `1e-8`. Supported for `1 ≤ n ≤ 6`.
pub fn sphere_constant(n: usize) -> Result<f64, SimplicialError> {
    if !(1..=6).contains(&n) {
        return Err(SimplicialError::UnsupportedDimension(n));
    }
    let pow = (n - 1) as i32;
    let num = adaptive_simpson(
        &|t: f64| 2.0 * (t / 2.0).sin() * t.sin().powi(pow),
        0.0,
        std::f64::consts::PI,
        1e-9,
    );
    let den = adaptive_simpson(&|t: f64| t.sin().powi(pow), 0.0, std::f64::consts::PI, 1e-9);
    Ok(num / den)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, eps / 2.0, left, depth - 1) + rec(f, m, b, eps / 2.0, right, depth - 1)
        }
    }
    rec(f, a, b, eps, simpson(f, a, b), 32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_constant_is_four_over_pi() {
        let c1 = sphere_constant(1).unwrap();
        assert!((c1 - 4.0 / std::f64::consts::PI).abs() < 1e-6, "c1 = {c1}");
    }

    #[test]
    fn two_sphere_constant_is_four_thirds() {
        let c2 = sphere_constant(2).unwrap();
        assert!((c2 - 4.0 / 3.0).abs() < 1e-6, "c2 = {c2}");
    }

    #[test]
    fn constants_stay_below_sqrt_two() {
        for n in 1..=6 {
            let c = sphere_constant(n).unwrap();
            assert!(c <= 2.0f64.sqrt() + 1e-9, "c_{n} = {c}");
            assert!(c > 1.0);
        }
    }

    #[test]
    fn out_of_range_dimension_errors() {
        assert!(matches!(
            sphere_constant(0),
            Err(SimplicialError::UnsupportedDimension(0))
        ));
        assert!(matches!(
            sphere_constant(7),
            Err(SimplicialError::UnsupportedDimension(7))
        ));
    }

    #[test]
    fn quadrature_against_monte_carlo_on_s2() {
        // Independent check of the quadrature reduction: average chordal
        // distance over Fibonacci samples of S².
        let pts = super::super::fibonacci_sphere_points(20_000);
        let q = [0.0, 0.0, 1.0];
        let mean: f64 = pts
            .iter()
            .map(|p| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt())
            .sum::<f64>()
            / pts.len() as f64;
        let c2 = sphere_constant(2).unwrap();
        assert!(
            (mean - c2).abs() < 1e-3,
            "lattice mean {mean} vs quadrature {c2}"
        );
    }
}
