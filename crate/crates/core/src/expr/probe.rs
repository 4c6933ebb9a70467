//! Empirical differentiability probe.
//!
//! Checks that the worst remainder ratio `|e(p+v) - e(p) - g.v| / ||v||`
//! over sampled directions shrinks as the sampling radius shrinks, which is
//! what a correct (Fréchet) gradient produces. The verdict is advisory
//! evidence, never a proof, and it does not gate certificate computation.

use super::{evaluate, Expr, ExprError, Point};
use crate::rng::SplitMix64;

#[derive(Debug, Clone)]
pub struct FrechetReport {
    /// Sampling radii, strictly decreasing.
    pub radii: Vec<f64>,
    /// Worst remainder ratio observed at each radius.
    pub worst_ratio: Vec<f64>,
    /// Tolerance the smallest radius is held to.
    pub tolerance: f64,
    /// Ratios non-increasing and the final one at or below tolerance.
    pub pass: bool,
}

/// Sample `samples_per_radius` directions at each radius and measure the
/// remainder of the first-order model given by `candidate_gradient`.
pub fn frechet_probe(
    e: &Expr,
    p: &Point,
    candidate_gradient: &[f64],
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
    tolerance: f64,
) -> Result<FrechetReport, ExprError> {
    if candidate_gradient.len() != p.dim() {
        return Err(ExprError::DimensionMismatch {
            expected: p.dim(),
            got: candidate_gradient.len(),
        });
    }
    if radii.is_empty() || radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(ExprError::InvalidProbe("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ExprError::InvalidProbe(
            "radii must be strictly decreasing".into(),
        ));
    }
    if samples_per_radius == 0 {
        return Err(ExprError::InvalidProbe("need at least one sample".into()));
    }

    let base = evaluate(e, p)?;
    let mut rng = SplitMix64::new(seed);
    let mut worst_ratio = Vec::with_capacity(radii.len());
    for &radius in radii {
        let mut worst = 0.0f64;
        for _ in 0..samples_per_radius {
            let u = unit_direction(&mut rng, p.dim());
            let v: Vec<f64> = u.iter().map(|c| c * radius).collect();
            let moved = evaluate(e, &p.shifted(&v, 1.0)?)?;
            let linear: f64 = candidate_gradient.iter().zip(&v).map(|(g, d)| g * d).sum();
            let ratio = (moved - base - linear).abs() / radius;
            worst = worst.max(ratio);
        }
        worst_ratio.push(worst);
    }

    // Ratios must shrink with the radius, except below the tolerance where
    // the float roundoff floor (~eps/radius) legitimately grows again.
    let monotone = worst_ratio
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15 || w[1] <= tolerance);
    let pass = monotone && *worst_ratio.last().unwrap() <= tolerance;
    Ok(FrechetReport {
        radii: radii.to_vec(),
        worst_ratio,
        tolerance,
        pass,
    })
}

fn unit_direction(rng: &mut SplitMix64, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_expression;
    use super::*;

    fn expr(text: &str, names: &[&str]) -> Expr {
        let vars: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        parse_expression(text, &vars).unwrap()
    }

    const RADII: [f64; 3] = [1e-2, 1e-3, 1e-4];

    #[test]
    fn quadratic_remainder_scales_with_radius() {
        let e = expr("x^2", &["x"]);
        let p = Point::new([("x", 0.0)]).unwrap();
        let report = frechet_probe(&e, &p, &[0.0], &RADII, 16, 7, 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
        for (r, ratio) in report.radii.iter().zip(&report.worst_ratio) {
            // For x^2 at 0 the remainder ratio is exactly the radius.
            assert!((ratio - r).abs() < 1e-12, "ratio {ratio} at radius {r}");
        }
    }

    #[test]
    fn linear_function_has_zero_remainder() {
        let e = expr("x", &["x"]);
        let p = Point::new([("x", 0.0)]).unwrap();
        let report = frechet_probe(&e, &p, &[1.0], &RADII, 8, 3, 1e-3).unwrap();
        assert!(report.pass);
        assert!(report.worst_ratio.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn roundoff_floor_below_tolerance_still_passes() {
        // Away from the origin a linear function leaves ~eps-sized residue,
        // and the ratio eps/r grows as r shrinks; that must not fail the
        // probe while everything sits far below tolerance.
        let e = expr("x + y", &["x", "y"]);
        let p = Point::new([("x", 1.0), ("y", 1.0)]).unwrap();
        let g = super::super::gradient(&e, &p).unwrap();
        let report = frechet_probe(&e, &p, &g, &RADII, 16, 5, 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.worst_ratio.iter().all(|r| *r < 1e-10));
    }

    #[test]
    fn wrong_gradient_leaves_ratio_near_one() {
        let e = expr("x", &["x"]);
        let p = Point::new([("x", 0.0)]).unwrap();
        let report = frechet_probe(&e, &p, &[0.0], &RADII, 8, 3, 1e-3).unwrap();
        assert!(!report.pass);
        assert!(report.worst_ratio.iter().all(|r| (*r - 1.0).abs() < 1e-9));
    }

    #[test]
    fn ad_gradient_passes_on_a_smooth_mix() {
        let e = expr("exp(x)*sin(y) + x*y", &["x", "y"]);
        let p = Point::new([("x", 0.3), ("y", 0.8)]).unwrap();
        let g = super::super::gradient(&e, &p).unwrap();
        let report = frechet_probe(&e, &p, &g, &RADII, 32, 11, 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn domain_exit_is_an_error() {
        let e = expr("log(x)", &["x"]);
        let p = Point::new([("x", 1e-300)]).unwrap();
        assert!(frechet_probe(&e, &p, &[1e300], &[1e-2], 8, 1, 1e-3).is_err());
    }

    #[test]
    fn bad_setup_is_rejected() {
        let e = expr("x", &["x"]);
        let p = Point::new([("x", 0.0)]).unwrap();
        assert!(frechet_probe(&e, &p, &[1.0], &[1e-3, 1e-2], 4, 1, 1e-3).is_err());
        assert!(frechet_probe(&e, &p, &[1.0], &[], 4, 1, 1e-3).is_err());
        assert!(frechet_probe(&e, &p, &[1.0], &[1e-2], 0, 1, 1e-3).is_err());
    }
}
