//! Coherent-state projections after a squeezing unitary.
//!
//! The family `E_α = U†|α⟩⟨α|U/π` with `U = S(r, θ_u)` interpolates between
//! heterodyne detection (`r = 0`) and homodyne detection of the `θ_u`
//! quadrature (`r → ∞`). Its outcome density over the α-plane is the
//! Husimi function of `UρU†`: a 2-D Gaussian with mean `M·α` and covariance
//! `(MΓMᵀ + I)/4`, where `M` stretches phase space by `e^r` along `θ_u`.
//!
//! Whether the `r → ∞` member is optimal whenever homodyne detection is
//! optimal is an open question; [`conjecture_scan`] only tabulates
//! numerical evidence.

use serde::Serialize;

use crate::error::{GdistError, Result};
use crate::fidelity::fidelity_gaussian;
use crate::gaussian::{GaussianParams, SymplecticMap};
use crate::homodyne::overlap_at;
use crate::mat2::Mat2;
use crate::optimality::minimize_overlap;
use crate::scalar::{wrap, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PovmKind {
    /// `r = 0`: the Q-distribution is measured.
    Heterodyne,
    Squeezed,
    /// `r → ∞`: homodyne detection of the `θ_u` quadrature.
    HomodyneLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PovmFamilySpec<T> {
    r: T,
    theta_u: T,
    kind: PovmKind,
}

impl<T: Scalar> PovmFamilySpec<T> {
    pub fn heterodyne() -> Self {
        PovmFamilySpec { r: T::zero(), theta_u: T::zero(), kind: PovmKind::Heterodyne }
    }

    /// `U = S(r, θ_u)`; `r = 0` yields the heterodyne member.
    pub fn squeezed(r: T, theta_u: T) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() || !theta_u.is_finite() {
            return Err(GdistError::InvalidParameter {
                name: "r",
                value: r.to_f64().unwrap_or(f64::NAN),
                reason: "squeezing must be finite and >= 0",
            });
        }
        if r == T::zero() {
            return Ok(Self::heterodyne());
        }
        Ok(PovmFamilySpec { r, theta_u: wrap(theta_u, T::PI()), kind: PovmKind::Squeezed })
    }

    pub fn homodyne_limit(theta_u: T) -> Self {
        PovmFamilySpec { r: T::infinity(), theta_u: wrap(theta_u, T::PI()), kind: PovmKind::HomodyneLimit }
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn theta_u(&self) -> T {
        self.theta_u
    }

    pub fn kind(&self) -> PovmKind {
        self.kind
    }
}

/// A normal density on the α-plane, `N(mean, cov)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneGaussian<T> {
    pub cov: Mat2<T>,
    pub mean: [T; 2],
}

impl<T: Scalar> PlaneGaussian<T> {
    pub fn density(&self, x: [T; 2]) -> T {
        let d = [x[0] - self.mean[0], x[1] - self.mean[1]];
        let det = self.cov.det();
        let inv = self.cov.inverse().expect("positive-definite covariance");
        let two = T::lit(2.0);
        (-inv.quad_form(d) / two).exp() / (two * T::PI() * det.sqrt())
    }
}

/// `BC = (det Σ₁ det Σ₂)^{1/4} / √det Σ · exp(−Δμᵀ Σ⁻¹ Δμ / 8)`,
/// `Σ = (Σ₁ + Σ₂)/2`.
pub fn bhattacharyya_2d<T: Scalar>(a: &PlaneGaussian<T>, b: &PlaneGaussian<T>) -> T {
    let pooled = a.cov.add(&b.cov).scale(T::lit(0.5));
    let det = pooled.det();
    let inv = pooled.inverse().expect("positive-definite covariance");
    let d = [b.mean[0] - a.mean[0], b.mean[1] - a.mean[1]];
    let pref = (a.cov.det().sqrt() * b.cov.det().sqrt()).sqrt() / det.sqrt();
    pref * (-inv.quad_form(d) / T::lit(8.0)).exp()
}

/// Outcome density of the POVM on `p`. Fails for the homodyne limit, whose
/// outcome space is one-dimensional.
pub fn povm_distribution<T: Scalar>(p: &GaussianParams<T>, spec: &PovmFamilySpec<T>) -> Result<PlaneGaussian<T>> {
    if spec.kind == PovmKind::HomodyneLimit {
        return Err(GdistError::InvalidParameter {
            name: "r",
            value: f64::INFINITY,
            reason: "the homodyne limit has no plane distribution",
        });
    }
    let m = SymplecticMap::squeeze_along(spec.r, spec.theta_u);
    let c = p.covariance();
    let quarter = T::lit(0.25);
    let cov = m.matrix().congruence(c.cov()).add(&Mat2::identity()).scale(quarter);
    Ok(PlaneGaussian { cov, mean: m.matrix().mul_vec(c.mean()) })
}

/// Distribution of `p` in coordinates aligned with `θ_u` and rescaled by
/// `e^{−r}` along it. The Bhattacharyya coefficient is unchanged by this
/// change of variables, and the entries stay bounded as `r` grows.
fn aligned_distribution<T: Scalar>(p: &GaussianParams<T>, r: T, theta_u: T) -> PlaneGaussian<T> {
    let c = p.covariance();
    let g = Mat2::rotation(-theta_u).congruence(c.cov());
    let mu = Mat2::rotation(-theta_u).mul_vec(c.mean());
    let e = (-r).exp();
    let e2 = e * e;
    let quarter = T::lit(0.25);
    let cov = Mat2::new(g.m[0][0] + e2, g.m[0][1] * e, g.m[1][0] * e, g.m[1][1] * e2 + T::one()).scale(quarter);
    PlaneGaussian { cov, mean: [mu[0], mu[1] * e] }
}

/// Bhattacharyya overlap of the two outcome densities.
pub fn povm_overlap<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>, spec: &PovmFamilySpec<T>) -> T {
    match spec.kind {
        PovmKind::HomodyneLimit => overlap_at(p1, p2, spec.theta_u),
        _ => bhattacharyya_2d(
            &aligned_distribution(p1, spec.r, spec.theta_u),
            &aligned_distribution(p2, spec.r, spec.theta_u),
        ),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConjectureRow<T> {
    pub r: T,
    /// `min over θ_u` of the POVM overlap at this `r`.
    pub min_overlap: T,
    pub argmin_theta: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureTable<T> {
    pub rows: Vec<ConjectureRow<T>>,
    /// `min_φ I_φ`, the `r → ∞` reference.
    pub homodyne_min: T,
    pub fidelity: T,
    /// Whether `min_overlap` is non-increasing along the `r` grid, as
    /// observed on this table.
    pub monotone_nonincreasing: bool,
}

/// Minimum over `θ_u` of the POVM overlap for each `r`: the grid minimum,
/// refined by golden-section search in its neighbourhood.
pub fn conjecture_scan<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
    r_grid: &[T],
    theta_grid: &[T],
) -> Result<ConjectureTable<T>> {
    if theta_grid.is_empty() {
        return Err(GdistError::InvalidParameter { name: "theta_grid", value: 0.0, reason: "must not be empty" });
    }
    let fidelity = fidelity_gaussian(&p1.covariance(), &p2.covariance())?.fidelity;
    let homodyne_min = minimize_overlap(p1, p2).overlap;
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let spec_at = |theta: T| PovmFamilySpec::squeezed(r, theta);
        // Validate r once; θ is always finite on the grid.
        spec_at(T::zero())?;
        let eval = |theta: T| povm_overlap(p1, p2, &spec_at(theta).expect("validated r"));
        let (k, best) =
            theta_grid
                .iter()
                .map(|&t| eval(t))
                .enumerate()
                .fold((0, T::infinity()), |b, (i, v)| if v < b.1 { (i, v) } else { b });
        let spacing = if theta_grid.len() > 1 { (theta_grid[1] - theta_grid[0]).abs() } else { T::PI() };
        let centre = theta_grid[k];
        let (theta, refined) = golden_min(&eval, centre - spacing, centre + spacing);
        let (argmin_theta, min_overlap) = if refined < best { (wrap(theta, T::PI()), refined) } else { (centre, best) };
        rows.push(ConjectureRow { r, min_overlap, argmin_theta });
    }
    let monotone_nonincreasing = rows.windows(2).all(|w| w[1].min_overlap <= w[0].min_overlap + T::roundoff_tol());
    Ok(ConjectureTable { rows, homodyne_min, fidelity, monotone_nonincreasing })
}

fn golden_min<T: Scalar, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let tol = T::lit(1e-10).max(T::epsilon().sqrt());
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn heterodyne_vacuum_is_isotropic() {
        let d = povm_distribution(&GaussianParams::vacuum(), &PovmFamilySpec::heterodyne()).unwrap();
        assert_eq!(d.cov, Mat2::diag(0.5, 0.5));
        let x = [0.3, -0.7];
        assert_abs_diff_eq!(d.density(x), (-(0.09f64 + 0.49)).exp() / PI, epsilon = 1e-15);
    }

    #[test]
    fn unsqueezing_gives_vacuum() {
        let s = 3.0f64;
        let theta = 0.4;
        let p = GaussianParams::new(1.0, s, theta, 0.0, 0.0).unwrap();
        let spec = PovmFamilySpec::squeezed(s.ln() / 2.0, theta + PI / 2.0).unwrap();
        let d = povm_distribution(&p, &spec).unwrap();
        assert!(d.cov.sub(&Mat2::diag(0.5, 0.5)).max_abs() < 1e-14);
    }

    #[test]
    fn coherent_pair_overlaps() {
        let (a, b) = (GaussianParams::vacuum(), GaussianParams::coherent(1.0, 0.0));
        let het = povm_overlap(&a, &b, &PovmFamilySpec::heterodyne());
        assert_abs_diff_eq!(het, (-0.25f64).exp(), epsilon = 1e-15);
        let f = (-0.5f64).exp();
        let mut prev = het;
        for r in [1.0, 2.0, 4.0, 10.0] {
            let v = povm_overlap(&a, &b, &PovmFamilySpec::squeezed(r, 0.0).unwrap());
            assert!(v < prev && v > f);
            prev = v;
        }
        assert!(prev - f < 1e-8);
        assert_abs_diff_eq!(povm_overlap(&a, &b, &PovmFamilySpec::homodyne_limit(0.0)), f, epsilon = 1e-15);
    }

    #[test]
    fn identical_states_overlap_one() {
        let p = GaussianParams::new(2.0, 3.0, 0.3, 1.0, -1.0).unwrap();
        let v = povm_overlap(&p, &p, &PovmFamilySpec::squeezed(1.5, 0.2).unwrap());
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn aligned_frame_matches_plane_distribution() {
        let a = GaussianParams::new(2.0, 3.0, 0.3, 0.5, -0.2).unwrap();
        let b = GaussianParams::new(1.5, 1.7, 1.9, -0.1, 0.4).unwrap();
        let spec = PovmFamilySpec::squeezed(0.8, 1.2).unwrap();
        let direct = bhattacharyya_2d(&povm_distribution(&a, &spec).unwrap(), &povm_distribution(&b, &spec).unwrap());
        assert_abs_diff_eq!(povm_overlap(&a, &b, &spec), direct, epsilon = 1e-13);
    }

    #[test]
    fn scan_pure_pure_reaches_fidelity() {
        let a = GaussianParams::new(1.0, 2.0, 0.0, 0.0, 0.0).unwrap();
        let b = GaussianParams::new(1.0, 3.0, 1.0, 0.0, 0.0).unwrap();
        let r: Vec<f64> = (0..=8).map(|k| k as f64).collect();
        let theta: Vec<f64> = (0..64).map(|k| PI * k as f64 / 64.0).collect();
        let t = conjecture_scan(&a, &b, &r, &theta).unwrap();
        assert_abs_diff_eq!(t.homodyne_min, t.fidelity, epsilon = 1e-8);
        assert!(t.monotone_nonincreasing);
        let last = t.rows.last().unwrap();
        assert!((last.min_overlap - t.homodyne_min).abs() < 1e-3);
        assert!(t.rows.iter().all(|row| row.min_overlap >= t.fidelity - 1e-9));
    }

    #[test]
    fn rejects_negative_r() {
        assert!(PovmFamilySpec::squeezed(-1.0, 0.0).is_err());
        assert!(povm_distribution(&GaussianParams::<f64>::vacuum(), &PovmFamilySpec::homodyne_limit(0.0)).is_err());
    }
}
