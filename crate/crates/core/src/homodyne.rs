//! Homodyne marginals and their Bhattacharyya overlap.
//!
//! Measuring `X_φ = X cos φ + Y sin φ` on a Gaussian state gives a normal
//! distribution with mean `α_x cos φ + α_y sin φ` and variance `B/4`, where
//! `B = γ[s cos²(φ − θ) + s⁻¹ sin²(φ − θ)]`.

use serde::Serialize;

use crate::error::Result;
use crate::fidelity::{ensure_same_mean, fidelity_gaussian};
use crate::gaussian::{CovarianceState, GaussianParams};
use crate::scalar::Scalar;

/// Outcome distribution of a homodyne measurement at angle `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginalSpec<T> {
    /// `B`; the variance of the outcome is `B/4`.
    pub b_variance_scale: T,
    /// `α_φ = α_x cos φ + α_y sin φ`.
    pub mean_along: T,
    pub phi: T,
}

impl<T: Scalar> MarginalSpec<T> {
    pub fn variance(&self) -> T {
        self.b_variance_scale * T::lit(0.25)
    }

    pub fn std_dev(&self) -> T {
        self.variance().sqrt()
    }

    /// `p(x) = √(2/(πB)) exp(−2(x − α_φ)²/B)`.
    pub fn density(&self, x: T) -> T {
        let two = T::lit(2.0);
        let b = self.b_variance_scale;
        let d = x - self.mean_along;
        (two / (T::PI() * b)).sqrt() * (-two * d * d / b).exp()
    }
}

pub fn marginal<T: Scalar>(p: &GaussianParams<T>, phi: T) -> MarginalSpec<T> {
    let (sd, cd) = (phi - p.theta()).sin_cos();
    let b = p.gamma() * (p.s() * cd * cd + sd * sd / p.s());
    MarginalSpec { b_variance_scale: b, mean_along: mean_along(p.alpha(), phi), phi }
}

/// Marginal read directly off a covariance matrix: `B = uᵀΓu`, `u = (cos φ, sin φ)`.
pub fn marginal_of_covariance<T: Scalar>(c: &CovarianceState<T>, phi: T) -> MarginalSpec<T> {
    let (s, co) = phi.sin_cos();
    MarginalSpec { b_variance_scale: c.cov().quad_form([co, s]), mean_along: mean_along(c.mean(), phi), phi }
}

fn mean_along<T: Scalar>(alpha: [T; 2], phi: T) -> T {
    let (s, c) = phi.sin_cos();
    alpha[0] * c + alpha[1] * s
}

/// Bhattacharyya coefficient of two homodyne marginals:
/// `√(2/(B₁+B₂)) (B₁B₂)^{1/4} exp(−β_φ²/(B₁+B₂))`.
pub fn bhattacharyya<T: Scalar>(m1: &MarginalSpec<T>, m2: &MarginalSpec<T>) -> T {
    let (b1, b2) = (m1.b_variance_scale, m2.b_variance_scale);
    let sum = b1 + b2;
    let beta = m2.mean_along - m1.mean_along;
    // √(2√(B₁B₂)/(B₁+B₂)) with the geometric mean formed first for range.
    (T::lit(2.0) * (b1.sqrt() * b2.sqrt()) / sum).sqrt() * (-beta * beta / sum).exp()
}

/// `I_φ` for an arbitrary pair.
pub fn overlap_at<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>, phi: T) -> T {
    bhattacharyya(&marginal(p1, phi), &marginal(p2, phi))
}

/// `f(x) = √2 x^{1/4} / √(1 + x)`, the same-mean overlap as a function of
/// the variance ratio. Symmetric under `x → 1/x` and maximal (= 1) at `x = 1`.
pub fn overlap_from_ratio<T: Scalar>(x: T) -> T {
    // Written via the inverse-symmetric form 1/√cosh(ln(x)/2) so that
    // f(x) and f(1/x) agree up to the rounding of 1/x.
    let half_log = x.ln() * T::lit(0.5);
    half_log.cosh().sqrt().recip()
}

/// `I_φ = f(B₂/B₁)` for states sharing a mean.
pub fn overlap_same_mean<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>, phi: T) -> Result<T> {
    ensure_same_mean(p1, p2, T::default_tol())?;
    Ok(overlap_from_ratio(b_ratio(p1, p2, phi)))
}

/// `B₂/B₁ = γ₂(s₂₊ + s₂₋ cos 2(φ − θ₂)) / γ₁(s₁₊ + s₁₋ cos 2(φ − θ₁))`.
pub fn b_ratio<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>, phi: T) -> T {
    let two = T::lit(2.0);
    let term = |p: &GaussianParams<T>| {
        let (plus, minus) = (p.s() + p.s().recip(), p.s() - p.s().recip());
        p.gamma() * (plus + minus * (two * (phi - p.theta())).cos())
    };
    term(p2) / term(p1)
}

/// `I_φ` sampled on `[0, π)` with the fidelity as reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapProfile<T> {
    /// `(φ, I_φ)` pairs in increasing `φ`.
    pub samples: Vec<(T, T)>,
    pub min_overlap: T,
    pub argmin_phi: T,
    pub fidelity_ref: T,
}

/// Samples `I_φ` at `steps` equally spaced angles `kπ/steps`.
pub fn overlap_profile<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
    steps: usize,
) -> Result<OverlapProfile<T>> {
    let fidelity_ref = fidelity_gaussian(&p1.covariance(), &p2.covariance())?.fidelity;
    let steps = steps.max(1);
    let n = T::from_usize(steps).expect("step count fits the scalar");
    let samples: Vec<(T, T)> = (0..steps)
        .map(|k| {
            let phi = T::PI() * T::from_usize(k).expect("index fits the scalar") / n;
            (phi, overlap_at(p1, p2, phi))
        })
        .collect();
    let (argmin_phi, min_overlap) =
        samples.iter().copied().fold((T::zero(), T::infinity()), |best, s| if s.1 < best.1 { s } else { best });
    Ok(OverlapProfile { samples, min_overlap, argmin_phi, fidelity_ref })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

    fn p(g: f64, s: f64, t: f64) -> GaussianParams<f64> {
        GaussianParams::new(g, s, t, 0.0, 0.0).unwrap()
    }

    #[test]
    fn vacuum_marginal() {
        for phi in [0.0, 0.3, 2.0] {
            let m = marginal(&GaussianParams::<f64>::vacuum(), phi);
            assert_abs_diff_eq!(m.b_variance_scale, 1.0, epsilon = 1e-15);
            assert_eq!(m.mean_along, 0.0);
            assert_abs_diff_eq!(m.variance(), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn principal_axes() {
        let sq = p(1.0, 4.0, 0.0);
        assert_abs_diff_eq!(marginal(&sq, 0.0).b_variance_scale, 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(marginal(&sq, FRAC_PI_2).b_variance_scale, 0.25, epsilon = 1e-15);
        let mixed = p(2.0, 2.0, FRAC_PI_6);
        assert_abs_diff_eq!(marginal(&mixed, FRAC_PI_6).b_variance_scale, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn covariance_route_agrees() {
        let q = GaussianParams::new(2.5, 3.0, 1.1, 0.3, -0.7).unwrap();
        for phi in [0.0, 0.5, 1.9, 3.0] {
            let a = marginal(&q, phi);
            let b = marginal_of_covariance(&q.covariance(), phi);
            assert_abs_diff_eq!(a.b_variance_scale, b.b_variance_scale, epsilon = 1e-13);
            assert_abs_diff_eq!(a.mean_along, b.mean_along, epsilon = 1e-15);
        }
    }

    #[test]
    fn overlap_examples() {
        let a = p(1.7, 2.2, 0.4);
        for phi in [0.0, 1.0, 2.5] {
            assert_abs_diff_eq!(overlap_at(&a, &a, phi), 1.0, epsilon = 1e-15);
        }
        let sq = p(1.0, 4.0, 0.0);
        let vac = GaussianParams::vacuum();
        assert_abs_diff_eq!(overlap_at(&vac, &sq, 0.0), 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        let c0 = GaussianParams::vacuum();
        let c1 = GaussianParams::coherent(1.0, 0.0);
        assert_abs_diff_eq!(overlap_at(&c0, &c1, 0.0), (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(overlap_at(&c0, &c1, FRAC_PI_2), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ratio_function() {
        assert_eq!(overlap_from_ratio(1.0), 1.0);
        assert_abs_diff_eq!(overlap_from_ratio(4.0), 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        for x in [0.01f64, 0.3, 2.0, 17.0] {
            assert_abs_diff_eq!(overlap_from_ratio(x), overlap_from_ratio(1.0 / x), epsilon = 1e-15);
            let direct = 2f64.sqrt() * x.powf(0.25) / (1.0 + x).sqrt();
            assert_abs_diff_eq!(overlap_from_ratio(x), direct, epsilon = 1e-15);
        }
    }

    #[test]
    fn same_mean_overlap_requires_equal_means() {
        let a = GaussianParams::coherent(0.0, 0.0);
        let b = GaussianParams::coherent(0.0, 1e-6);
        assert!(overlap_same_mean(&a, &b, 0.3).is_err());
        let c = GaussianParams::coherent(0.0, 1e-12);
        assert!(overlap_same_mean(&a, &c, 0.3).is_ok());
    }

    #[test]
    fn ratio_extremes_with_round_first_state() {
        // s₁ = 1: B₂/B₁ ranges over [γ₂/(γ₁s₂), γ₂s₂/γ₁].
        let (a, b) = (p(1.5, 1.0, 0.0), p(3.0, 2.5, 0.7));
        let ratios: Vec<f64> = (0..2000).map(|k| b_ratio(&a, &b, PI * k as f64 / 2000.0)).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert_abs_diff_eq!(hi, 3.0 * 2.5 / 1.5, epsilon = 1e-5);
        assert_abs_diff_eq!(lo, 3.0 / (1.5 * 2.5), epsilon = 1e-5);
        assert_abs_diff_eq!(b_ratio(&a, &b, 0.7), 3.0 * 2.5 / 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(b_ratio(&a, &b, 0.7 + FRAC_PI_2), 3.0 / (1.5 * 2.5), epsilon = 1e-14);
    }

    #[test]
    fn ratio_extremes_aligned() {
        // θ̃ = 0: extremes γ₂s₂/(γ₁s₁) and γ₂s₁/(γ₁s₂).
        let (a, b) = (p(2.0, 3.0, 0.4), p(3.0, 1.5, 0.4));
        assert_abs_diff_eq!(b_ratio(&a, &b, 0.4), 3.0 * 1.5 / (2.0 * 3.0), epsilon = 1e-14);
        assert_abs_diff_eq!(b_ratio(&a, &b, 0.4 + FRAC_PI_2), 3.0 * 3.0 / (2.0 * 1.5), epsilon = 1e-14);
        assert_eq!(b_ratio(&a, &a, 1.3), 1.0);
    }

    #[test]
    fn profile_tracks_minimum() {
        let prof = overlap_profile(&p(1.0, 2.0, 0.0), &p(1.0, 3.0, 1.0), 360).unwrap();
        assert_eq!(prof.samples.len(), 360);
        assert!(prof.min_overlap >= prof.fidelity_ref - 1e-9);
        assert!(prof.samples.iter().all(|&(_, i)| i > 0.0 && i <= 1.0));
        assert!(prof.samples.iter().any(|&(phi, _)| phi == prof.argmin_phi));
    }

    /// Sign of f''(x), read off from f''/f = 5x² − 10x − 3 over 16x²(1+x)².
    /// Concave below the inflection point 1 + √1.6, convex above it.
    const INFLECTION: f64 = 2.264_911_064_067_352;

    fn log_grid() -> impl Iterator<Item = f64> {
        (0..=400).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 400.0))
    }

    #[test]
    fn ratio_function_concave_below_inflection() {
        for x in log_grid().filter(|&x| x < INFLECTION * 0.99) {
            let h = 1e-3 * x;
            let second = overlap_from_ratio(x - h) + overlap_from_ratio(x + h) - 2.0 * overlap_from_ratio(x);
            assert!(second <= 1e-15, "x = {x}: second difference {second}");
        }
    }

    #[test]
    fn ratio_function_convex_beyond_inflection() {
        // The literal second-difference test fails here; the endpoint
        // argument only needs f to rise on (0, 1) and fall on (1, ∞).
        for x in log_grid().filter(|&x| x > INFLECTION * 1.01) {
            let h = 1e-3 * x;
            let second = overlap_from_ratio(x - h) + overlap_from_ratio(x + h) - 2.0 * overlap_from_ratio(x);
            assert!(second > 0.0, "x = {x}");
        }
    }

    #[test]
    fn ratio_function_is_unimodal() {
        let xs: Vec<f64> = log_grid().collect();
        for w in xs.windows(2) {
            let (a, b) = (overlap_from_ratio(w[0]), overlap_from_ratio(w[1]));
            if w[1] <= 1.0 {
                assert!(b >= a);
            } else if w[0] >= 1.0 {
                assert!(b <= a);
            }
        }
    }

    fn arb_pair() -> impl Strategy<Value = (GaussianParams<f64>, GaussianParams<f64>)> {
        let one = (1.0..8.0f64, 1.0..8.0f64, 0.0..PI, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(g, s, t, x, y)| GaussianParams::new(g, s, t, x, y).unwrap());
        (one.clone(), one)
    }

    proptest! {
        #[test]
        fn fuchs_caves_bound((a, b) in arb_pair(), phi in 0.0..PI) {
            let f = fidelity_gaussian(&a.covariance(), &b.covariance()).unwrap().fidelity;
            let i = overlap_at(&a, &b, phi);
            prop_assert!(i >= f - 1e-9, "I = {i}, F = {f}");
            prop_assert!(i > 0.0 && i <= 1.0);
        }

        #[test]
        fn period_pi((a, b) in arb_pair(), phi in 0.0..PI) {
            prop_assert!((overlap_at(&a, &b, phi + PI) - overlap_at(&a, &b, phi)).abs() < 1e-14);
            let m = marginal(&a, phi);
            prop_assert!((marginal(&a, phi + PI).b_variance_scale - m.b_variance_scale).abs() < 1e-12);
        }

        #[test]
        fn b_scale_in_range((a, _b) in arb_pair(), phi in 0.0..PI) {
            let b = marginal(&a, phi).b_variance_scale;
            prop_assert!(b >= a.gamma() / a.s() * (1.0 - 1e-14));
            prop_assert!(b <= a.gamma() * a.s() * (1.0 + 1e-14));
        }

        #[test]
        fn ratio_matches_marginals((a, b) in arb_pair(), phi in 0.0..PI) {
            let direct = marginal(&b, phi).b_variance_scale / marginal(&a, phi).b_variance_scale;
            prop_assert!((b_ratio(&a, &b, phi) - direct).abs() < 1e-14 * direct.max(1.0));
            let same_b = b.with_alpha(a.alpha()[0], a.alpha()[1]);
            let general = overlap_at(&a, &same_b, phi);
            let reduced = overlap_same_mean(&a, &same_b, phi).unwrap();
            prop_assert!((general - reduced).abs() < 1e-14);
        }
    }
}
