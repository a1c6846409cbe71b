//! Quantum fidelity of two single-mode Gaussian states.

use serde::Serialize;

use crate::error::{GdistError, Result};
use crate::gaussian::{apply_symplectic, CovarianceState, GaussianParams, SymplecticMap};
use crate::scalar::Scalar;

/// Fidelity together with the intermediate quantities of its closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityReport<T> {
    pub fidelity: T,
    /// `Δ = det(Γ₁ + Γ₂)`.
    pub delta_cap: T,
    /// `δ = (det Γ₁ − 1)(det Γ₂ − 1)`.
    pub delta_low: T,
    /// `−βᵀ(Γ₁ + Γ₂)⁻¹β`, zero for equal means.
    pub exponent: T,
    /// Squared Bures distance `2(1 − F)`.
    pub bures_distance_sq: T,
    /// `arccos F`, in `[0, π/2]`.
    pub uhlmann_angle: T,
}

impl<T: Scalar> FidelityReport<T> {
    fn from_parts(delta_cap: T, delta_low: T, exponent: T) -> Self {
        // √(Δ+δ) − √δ = Δ / (√(Δ+δ) + √δ) avoids cancellation for large γ.
        let two = T::lit(2.0);
        let prefactor = (two * ((delta_cap + delta_low).sqrt() + delta_low.sqrt()) / delta_cap).sqrt();
        let fidelity = (prefactor * exponent.exp()).min(T::one()).max(T::zero());
        Self::with_fidelity(fidelity, delta_cap, delta_low, exponent)
    }

    fn with_fidelity(fidelity: T, delta_cap: T, delta_low: T, exponent: T) -> Self {
        FidelityReport {
            fidelity,
            delta_cap,
            delta_low,
            exponent,
            bures_distance_sq: T::lit(2.0) * (T::one() - fidelity),
            uhlmann_angle: fidelity.acos(),
        }
    }
}

/// Excess purity factor `det Γ − 1`, clamped at zero for physical states
/// whose determinant sits inside the tolerance band below 1.
fn mixedness<T: Scalar>(det: T) -> T {
    (det - T::one()).max(T::zero())
}

/// Clamps roundoff-negative δ (pure states) to exactly zero.
fn clamp_delta_low<T: Scalar>(delta_low: T) -> T {
    if delta_low < T::zero() && delta_low > -T::roundoff_tol() {
        T::zero()
    } else {
        delta_low.max(T::zero())
    }
}

/// `F = √(2/(√(Δ+δ) − √δ)) · exp(−βᵀ(Γ₁+Γ₂)⁻¹β)`.
pub fn fidelity_gaussian<T: Scalar>(a: &CovarianceState<T>, b: &CovarianceState<T>) -> Result<FidelityReport<T>> {
    a.ensure_physical(T::default_tol())?;
    b.ensure_physical(T::default_tol())?;
    let sum = a.cov().add(b.cov());
    let delta_cap = sum.det();
    let delta_low = clamp_delta_low(mixedness(a.det()) * mixedness(b.det()));
    if a == b {
        return Ok(FidelityReport::with_fidelity(T::one(), delta_cap, delta_low, T::zero()));
    }
    let (ma, mb) = (a.mean(), b.mean());
    let beta = [mb[0] - ma[0], mb[1] - ma[1]];
    let inv = sum.inverse().expect("sum of physical covariances is invertible");
    let exponent = -inv.quad_form(beta);
    Ok(FidelityReport::from_parts(delta_cap, delta_low, exponent))
}

/// Squeezing coupling `D(s₁, s₂, θ̃) = s₁₊s₂₊ − s₁₋s₂₋ cos 2θ̃` with
/// `sᵢ± = sᵢ ± sᵢ⁻¹`.
pub fn squeeze_coupling<T: Scalar>(s1: T, s2: T, theta_tilde: T) -> T {
    let (p1, m1) = (s1 + s1.recip(), s1 - s1.recip());
    let (p2, m2) = (s2 + s2.recip(), s2 - s2.recip());
    p1 * p2 - m1 * m2 * (T::lit(2.0) * theta_tilde).cos()
}

/// Same-mean fidelity in terms of the state parameters:
/// `Δ = γ₁² + γ₂² + ½γ₁γ₂D`, `δ = (γ₁² − 1)(γ₂² − 1)`.
pub fn fidelity_same_mean<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>) -> Result<FidelityReport<T>> {
    ensure_same_mean(p1, p2, T::default_tol())?;
    let (g1, g2) = (p1.gamma(), p2.gamma());
    let d = squeeze_coupling(p1.s(), p2.s(), p2.theta() - p1.theta());
    let delta_cap = g1 * g1 + g2 * g2 + T::lit(0.5) * g1 * g2 * d;
    let delta_low = clamp_delta_low(mixedness(g1 * g1) * mixedness(g2 * g2));
    if p1 == p2 {
        return Ok(FidelityReport::with_fidelity(T::one(), delta_cap, delta_low, T::zero()));
    }
    Ok(FidelityReport::from_parts(delta_cap, delta_low, T::zero()))
}

pub(crate) fn ensure_same_mean<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>, tol: T) -> Result<()> {
    let distance = mean_distance(p1, p2);
    if distance > tol {
        Err(GdistError::MeanMismatch { distance: distance.to_f64().unwrap_or(f64::NAN) })
    } else {
        Ok(())
    }
}

pub(crate) fn mean_distance<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>) -> T {
    let (a, b) = (p1.alpha(), p2.alpha());
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Fidelity property that a sample violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FidelityProperty {
    Symmetry,
    Range,
    UnitaryInvariance,
    TriangleInequality,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyViolation<T> {
    pub index: usize,
    pub property: FidelityProperty,
    /// Size of the violation (absolute deviation or excess).
    pub amount: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport<T> {
    pub checked: usize,
    pub violations: Vec<PropertyViolation<T>>,
}

impl<T> PropertyReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks symmetry, range, invariance under the shared map
/// (`transform`, `displacement`) and the triangle inequality of the angle
/// `arccos F` on every triple of the sample.
pub fn check_fidelity_properties<T: Scalar>(
    sample: &[[CovarianceState<T>; 3]],
    transform: &SymplecticMap<T>,
    displacement: [T; 2],
) -> Result<PropertyReport<T>> {
    let sym_tol = T::lit(1e-14).max(T::epsilon() * T::lit(8.0));
    let inv_tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    let tri_tol = T::lit(1e-10).max(T::epsilon().sqrt() * T::lit(4.0));
    let mut violations = Vec::new();
    let mut flag = |index, property, amount: T, tol: T| {
        if !(amount <= tol) {
            violations.push(PropertyViolation { index, property, amount });
        }
    };
    for (i, [a, b, c]) in sample.iter().enumerate() {
        let fab = fidelity_gaussian(a, b)?.fidelity;
        let fba = fidelity_gaussian(b, a)?.fidelity;
        let fbc = fidelity_gaussian(b, c)?.fidelity;
        let fac = fidelity_gaussian(a, c)?.fidelity;
        flag(i, FidelityProperty::Symmetry, (fab - fba).abs(), sym_tol);
        let out_of_range = (-fab).max(fab - T::one()).max(T::zero());
        flag(i, FidelityProperty::Range, out_of_range, T::zero());
        let ta = apply_symplectic(a, transform, displacement)?;
        let tb = apply_symplectic(b, transform, displacement)?;
        let ft = fidelity_gaussian(&ta, &tb)?.fidelity;
        flag(i, FidelityProperty::UnitaryInvariance, (ft - fab).abs(), inv_tol);
        let excess = fac.acos() - fab.acos() - fbc.acos();
        flag(i, FidelityProperty::TriangleInequality, excess.max(T::zero()), tri_tol);
    }
    Ok(PropertyReport { checked: sample.len(), violations })
}
