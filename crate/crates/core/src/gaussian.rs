//! Single-mode Gaussian states in parameter form and covariance form.
//!
//! Units: the covariance Γ is normalized so that the vacuum has Γ = I, and
//! the mean is stored as the complex amplitude `(α_x, α_y)` with
//! `⟨a⟩ = α_x + iα_y`. In these units the quadrature
//! `X_φ = (a e^{-iφ} + a† e^{iφ})/2` of the vacuum has variance 1/4, and the
//! Wigner function has covariance Γ/4.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{GdistError, Result};
use crate::mat2::Mat2;
use crate::scalar::{wrap, Scalar};

/// The five-parameter description `{γ, s, θ, α_x, α_y}` of a squeezed,
/// displaced thermal state.
///
/// Always canonical: `γ ≥ 1`, `s ≥ 1`, `θ ∈ [0, π)` and `θ = 0` when `s = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianParams<T> {
    gamma: T,
    s: T,
    theta: T,
    alpha: [T; 2],
}

impl<T: Scalar> GaussianParams<T> {
    /// Validates and canonicalizes a parameter set.
    ///
    /// `s < 1` is rewritten as `(1/s, θ + π/2)`. A `γ` within the default
    /// tolerance below 1 is clamped to 1 so round-tripped pure states are
    /// accepted.
    pub fn new(gamma: T, s: T, theta: T, alpha_x: T, alpha_y: T) -> Result<Self> {
        let bad = |name, value: T, reason| GdistError::InvalidParameter {
            name,
            value: value.to_f64().unwrap_or(f64::NAN),
            reason,
        };
        for (name, v) in [("gamma", gamma), ("s", s), ("theta", theta), ("alpha_x", alpha_x), ("alpha_y", alpha_y)] {
            if !v.is_finite() {
                return Err(bad(name, v, "must be finite"));
            }
        }
        if gamma < T::one() - T::default_tol() {
            return Err(bad("gamma", gamma, "thermal width must be >= 1"));
        }
        if s <= T::zero() {
            return Err(bad("s", s, "squeezing degree must be > 0"));
        }
        let gamma = gamma.max(T::one());
        let (s, theta) = if s < T::one() { (s.recip(), theta + T::FRAC_PI_2()) } else { (s, theta) };
        let theta = if s == T::one() { T::zero() } else { wrap(theta, T::PI()) };
        Ok(GaussianParams { gamma, s, theta, alpha: [alpha_x, alpha_y] })
    }

    pub fn vacuum() -> Self {
        Self::coherent(T::zero(), T::zero())
    }

    pub fn coherent(alpha_x: T, alpha_y: T) -> Self {
        GaussianParams { gamma: T::one(), s: T::one(), theta: T::zero(), alpha: [alpha_x, alpha_y] }
    }

    pub fn thermal(gamma: T) -> Result<Self> {
        Self::new(gamma, T::one(), T::zero(), T::zero(), T::zero())
    }

    /// Thermal width `γ = 2n̄ + 1`.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Squeezing degree `s = e^{2r}`.
    pub fn s(&self) -> T {
        self.s
    }

    /// Direction of the major axis, radians in `[0, π)`.
    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn alpha(&self) -> [T; 2] {
        self.alpha
    }

    /// Mean photon number of the underlying thermal state.
    pub fn mean_photons(&self) -> T {
        (self.gamma - T::one()) * T::lit(0.5)
    }

    /// Squeezing parameter `r = ln(s)/2`.
    pub fn squeeze_r(&self) -> T {
        self.s.ln() * T::lit(0.5)
    }

    pub fn is_pure(&self, tol: T) -> bool {
        self.gamma <= T::one() + tol
    }

    /// Same state with a different mean.
    pub fn with_alpha(&self, alpha_x: T, alpha_y: T) -> Self {
        GaussianParams { alpha: [alpha_x, alpha_y], ..*self }
    }

    pub fn covariance(&self) -> CovarianceState<T> {
        covariance_from_params(self)
    }
}

/// Covariance matrix Γ and mean `(α_x, α_y)` of a single-mode state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovarianceState<T> {
    cov: Mat2<T>,
    mean: [T; 2],
}

impl<T: Scalar> CovarianceState<T> {
    /// Accepts any finite symmetric matrix; use [`is_physical`] or
    /// [`CovarianceState::physical`] to enforce the uncertainty relation.
    pub fn new(cov: Mat2<T>, mean: [T; 2]) -> Result<Self> {
        if cov.m.iter().flatten().chain(mean.iter()).any(|v| !v.is_finite()) {
            return Err(GdistError::InvalidParameter {
                name: "cov",
                value: f64::NAN,
                reason: "entries must be finite",
            });
        }
        let asym = (cov.m[0][1] - cov.m[1][0]).abs();
        if asym > T::roundoff_tol() * T::one().max(cov.max_abs()) {
            return Err(GdistError::Asymmetric { asymmetry: asym.to_f64().unwrap_or(f64::NAN) });
        }
        let off = (cov.m[0][1] + cov.m[1][0]) * T::lit(0.5);
        let cov = Mat2::new(cov.m[0][0], off, off, cov.m[1][1]);
        Ok(CovarianceState { cov, mean })
    }

    /// Like [`CovarianceState::new`] but also rejects non-physical matrices.
    pub fn physical(cov: Mat2<T>, mean: [T; 2], tol: T) -> Result<Self> {
        let c = Self::new(cov, mean)?;
        c.ensure_physical(tol)?;
        Ok(c)
    }

    pub fn cov(&self) -> &Mat2<T> {
        &self.cov
    }

    pub fn mean(&self) -> [T; 2] {
        self.mean
    }

    pub fn det(&self) -> T {
        self.cov.det()
    }

    pub(crate) fn ensure_physical(&self, tol: T) -> Result<()> {
        if is_physical(self, tol) {
            Ok(())
        } else {
            Err(GdistError::NonPhysical {
                det: self.det().to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    pub fn params(&self) -> Result<GaussianParams<T>> {
        params_from_covariance(self, T::default_tol())
    }

    /// Largest entrywise difference in covariance and mean.
    pub fn distance(&self, other: &Self) -> T {
        let dm = (self.mean[0] - other.mean[0]).abs().max((self.mean[1] - other.mean[1]).abs());
        self.cov.sub(&other.cov).max_abs().max(dm)
    }
}

/// A 2×2 real map `S` with `S Σ Sᵀ = Σ` (equivalently `det S = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymplecticMap<T> {
    matrix: Mat2<T>,
}

impl<T: Scalar> SymplecticMap<T> {
    pub fn new(matrix: Mat2<T>, tol: T) -> Result<Self> {
        let residual = symplectic_residual(&matrix);
        if !(residual <= tol) {
            return Err(GdistError::NotSymplectic { residual: residual.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(SymplecticMap { matrix })
    }

    pub fn identity() -> Self {
        SymplecticMap { matrix: Mat2::identity() }
    }

    /// Phase-space rotation by `angle` (a phase shift of the mode).
    pub fn rotation(angle: T) -> Self {
        SymplecticMap { matrix: Mat2::rotation(angle) }
    }

    /// Squeezing of degree `s` along the x axis: `diag(√s, 1/√s)`.
    pub fn squeeze(s: T) -> Result<Self> {
        if !(s > T::zero()) || !s.is_finite() {
            return Err(GdistError::InvalidParameter {
                name: "s",
                value: s.to_f64().unwrap_or(f64::NAN),
                reason: "squeezing degree must be finite and > 0",
            });
        }
        let root = s.sqrt();
        Ok(SymplecticMap { matrix: Mat2::diag(root, root.recip()) })
    }

    /// Stretch by `e^r` along direction `theta` and compress by `e^{-r}`
    /// orthogonally to it. This is the phase-space action of the squeeze
    /// operator that produces a major axis at `theta`.
    pub fn squeeze_along(r: T, theta: T) -> Self {
        let rot = Mat2::rotation(theta);
        let d = Mat2::diag(r.exp(), (-r).exp());
        SymplecticMap { matrix: rot.congruence(&d) }
    }

    pub fn matrix(&self) -> &Mat2<T> {
        &self.matrix
    }

    pub fn then(&self, next: &Self) -> Self {
        SymplecticMap { matrix: next.matrix.mul(&self.matrix) }
    }
}

fn symplectic_residual<T: Scalar>(m: &Mat2<T>) -> T {
    let sigma = Mat2::symplectic_form();
    m.congruence(&sigma).sub(&sigma).max_abs()
}

/// `Γ = Φ(θ) S diag(γ, γ) Sᵀ Φ(θ)ᵀ` with `S = diag(√s, 1/√s)`.
pub fn covariance_from_params<T: Scalar>(p: &GaussianParams<T>) -> CovarianceState<T> {
    let rot = Mat2::rotation(p.theta);
    let cov = rot.congruence(&Mat2::diag(p.gamma * p.s, p.gamma / p.s));
    let off = (cov.m[0][1] + cov.m[1][0]) * T::lit(0.5);
    CovarianceState { cov: Mat2::new(cov.m[0][0], off, off, cov.m[1][1]), mean: p.alpha }
}

/// Inverse of [`covariance_from_params`]: `γ = √det Γ`, `s = λ_max/γ`, and
/// `θ` from the major-axis eigenvector. Degenerate eigenvalues give `θ = 0`.
pub fn params_from_covariance<T: Scalar>(c: &CovarianceState<T>, tol: T) -> Result<GaussianParams<T>> {
    c.ensure_physical(tol)?;
    let m = &c.cov.m;
    let gamma = c.det().max(T::one()).sqrt();
    let (hi, _) = c.cov.sym_eigenvalues();
    let s = (hi / gamma).max(T::one());
    let two_b = m[0][1] + m[1][0];
    let diff = m[0][0] - m[1][1];
    let scale = T::one().max(c.cov.max_abs());
    let theta = if diff.abs().max(two_b.abs()) <= T::roundoff_tol() * scale {
        T::zero()
    } else {
        wrap(two_b.atan2(diff) * T::lit(0.5), T::PI())
    };
    GaussianParams::new(gamma, s, theta, c.mean[0], c.mean[1])
}

/// Positive-definite and `det Γ ≥ 1 − tol`. For one mode this is the full
/// uncertainty relation `Γ + iΣ ≥ 0`.
pub fn is_physical<T: Scalar>(c: &CovarianceState<T>, tol: T) -> bool {
    let m = &c.cov.m;
    m[0][0] > T::zero() && m[1][1] > T::zero() && c.det() >= T::one() - tol
}

/// `Γ' = S Γ Sᵀ`, `mean' = S·mean + displacement`.
pub fn apply_symplectic<T: Scalar>(
    c: &CovarianceState<T>,
    map: &SymplecticMap<T>,
    displacement: [T; 2],
) -> Result<CovarianceState<T>> {
    let residual = symplectic_residual(&map.matrix);
    if residual > T::default_tol() {
        return Err(GdistError::NotSymplectic { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    let cov = map.matrix.congruence(&c.cov);
    let off = (cov.m[0][1] + cov.m[1][0]) * T::lit(0.5);
    let mean = map.matrix.mul_vec(c.mean);
    Ok(CovarianceState {
        cov: Mat2::new(cov.m[0][0], off, off, cov.m[1][1]),
        mean: [mean[0] + displacement[0], mean[1] + displacement[1]],
    })
}

/// `C(λ) = tr(ρ D(λ)) = exp(λα* − λ*α) · exp(−½ λ̃ Γ λ̃ᵀ)`, `λ̃ = (λ_y, −λ_x)`.
pub fn characteristic_fn<T: Scalar>(c: &CovarianceState<T>, lambda: Complex<T>) -> Complex<T> {
    let alpha = Complex::new(c.mean[0], c.mean[1]);
    let phase = lambda * alpha.conj() - lambda.conj() * alpha;
    let lt = [lambda.im, -lambda.re];
    let damping = -T::lit(0.5) * c.cov.quad_form(lt);
    Complex::new(damping, phase.im).exp()
}

/// `W(β) = 2/(π√det Γ) · exp(−2 (b − m)ᵀ Γ⁻¹ (b − m))`, normalized over the
/// plane `d²β = dβ_x dβ_y`.
pub fn wigner_fn<T: Scalar>(c: &CovarianceState<T>, beta: Complex<T>) -> T {
    let det = c.det();
    let inv = c.cov.inverse().expect("physical covariance is invertible");
    let d = [beta.re - c.mean[0], beta.im - c.mean[1]];
    let two = T::lit(2.0);
    two / (T::PI() * det.sqrt()) * (-two * inv.quad_form(d)).exp()
}
