//! Numerical integration used to validate the closed forms.
//!
//! Integration windows extend ±12 standard deviations around the pooled
//! mean, and are split at the peaks and shoulders of every density
//! involved so the double-exponential rule resolves narrow peaks inside
//! wide windows.

use num_complex::Complex;

use crate::gaussian::{wigner_fn, CovarianceState};
use crate::homodyne::MarginalSpec;

const WINDOW_SIGMAS: f64 = 12.0;
const TARGET_ERROR: f64 = 1e-14;

/// Integrates `f` over `[lo, hi]`, splitting at every breakpoint inside.
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breakpoints: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > lo && b < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    cuts.windows(2).map(|w| quadrature::integrate(&f, w[0], w[1], TARGET_ERROR).integral).sum()
}

fn window_and_cuts(marginals: &[&MarginalSpec<f64>]) -> (f64, f64, Vec<f64>) {
    let n = marginals.len() as f64;
    let pooled_mean = marginals.iter().map(|m| m.mean_along).sum::<f64>() / n;
    let sigma = marginals.iter().map(|m| m.std_dev()).fold(0.0, f64::max);
    let spread = marginals.iter().map(|m| (m.mean_along - pooled_mean).abs()).fold(0.0, f64::max);
    let half = WINDOW_SIGMAS * sigma + spread;
    let mut cuts = Vec::new();
    for m in marginals {
        for k in [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0] {
            cuts.push(m.mean_along + k * m.std_dev());
        }
    }
    (pooled_mean - half, pooled_mean + half, cuts)
}

/// `∫ p(x) dx` for a homodyne marginal.
pub fn marginal_normalization(m: &MarginalSpec<f64>) -> f64 {
    let (lo, hi, cuts) = window_and_cuts(&[m]);
    integrate_split(|x| m.density(x), lo, hi, &cuts)
}

/// `∫ √(p₁ p₂) dx`, the Bhattacharyya overlap by quadrature.
pub fn bhattacharyya_quadrature(m1: &MarginalSpec<f64>, m2: &MarginalSpec<f64>) -> f64 {
    let (lo, hi, cuts) = window_and_cuts(&[m1, m2]);
    integrate_split(|x| (m1.density(x) * m2.density(x)).sqrt(), lo, hi, &cuts)
}

/// `∫ W(β_φ, y) dy` along the line orthogonal to direction `phi` through
/// the point `x` on the `phi` axis: the homodyne marginal computed directly
/// from the Wigner function.
pub fn wigner_marginal(c: &CovarianceState<f64>, phi: f64, x: f64) -> f64 {
    let (s, co) = phi.sin_cos();
    let m = c.mean();
    // Orthogonal coordinate of the mean, and spread along that direction.
    let y0 = -m[0] * s + m[1] * co;
    let var_y = c.cov().quad_form([-s, co]) / 4.0;
    let sd = var_y.sqrt();
    let half = WINDOW_SIGMAS * sd;
    let cuts: Vec<f64> = [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0].iter().map(|k| y0 + k * sd).collect();
    integrate_split(
        |y| {
            let bx = x * co - y * s;
            let by = x * s + y * co;
            wigner_fn(c, Complex::new(bx, by))
        },
        y0 - half,
        y0 + half,
        &cuts,
    )
}

/// `∬ W(β) d²β` by nested quadrature.
pub fn wigner_normalization(c: &CovarianceState<f64>) -> f64 {
    let m = c.mean();
    let sx = (c.cov().m[0][0] / 4.0).sqrt();
    let half = WINDOW_SIGMAS * sx;
    let cuts: Vec<f64> = [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0].iter().map(|k| m[0] + k * sx).collect();
    integrate_split(|x| wigner_marginal(c, 0.0, x), m[0] - half, m[0] + half, &cuts)
}
