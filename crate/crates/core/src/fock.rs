//! Brute-force validator in a truncated number basis.
//!
//! States are built as `ρ = D(α) S(r, θ) ρ_T S†(r, θ) D†(α)` from the
//! operator exponentials of the ladder-operator generators, and the
//! fidelity and homodyne marginals are recomputed from the density matrix.
//! Nothing here calls the closed forms; the one exception is the choice of
//! integration window in [`overlap_fock`], which uses the Fock moments.
//!
//! The squeeze operator is `S(r, θ) = exp[(r/2)(e^{2iθ}a†² − e^{−2iθ}a²)]`,
//! which stretches the `θ` quadrature by `e^r`.
//!
//! Exponentials are applied to vectors (Taylor series with step splitting)
//! in a working space of twice the requested dimension, then cropped. The
//! mass lost to cropping is reported as leakage.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{GdistError, Result};
use crate::gaussian::GaussianParams;

/// Leakage above which [`build_state`] refuses a truncation.
pub const BUILD_LEAKAGE_LIMIT: f64 = 1e-6;
/// Leakage the automatic truncation aims for.
pub const TARGET_LEAKAGE: f64 = 1e-8;
/// Normalization deficit above which marginals are rejected.
pub const MARGINAL_DEFICIT_LIMIT: f64 = 1e-5;
/// Largest dimension [`auto_dim`] will double to.
pub const MAX_AUTO_DIM: usize = 1200;

/// Thermal weights below this are dropped; their mass counts as leakage.
const WEIGHT_FLOOR: f64 = 1e-20;
/// Generator norm handled by one Taylor step.
const STEP_NORM: f64 = 8.0;

/// A truncated density operator or observable.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<Complex64>,
    leakage: f64,
}

impl FockOperator {
    /// Wraps a square matrix. The matrix is not checked for hermiticity;
    /// see [`FockOperator::hermiticity_error`].
    pub fn new(matrix: DMatrix<Complex64>, leakage: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(GdistError::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        Ok(FockOperator { matrix, leakage })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Trace mass lost to truncation.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_part(&self.matrix).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `⟨n⟩`.
    pub fn mean_number(&self) -> f64 {
        self.matrix.diagonal().iter().enumerate().map(|(n, z)| n as f64 * z.re).sum()
    }

    /// `⟨a⟩ = Σ √(n+1) ρ_{n+1, n}`.
    pub fn mean_a(&self) -> Complex64 {
        (0..self.dim().saturating_sub(1)).map(|n| ((n + 1) as f64).sqrt() * self.matrix[(n + 1, n)]).sum()
    }

    /// `⟨a²⟩ = Σ √((n+1)(n+2)) ρ_{n+2, n}`.
    pub fn mean_a2(&self) -> Complex64 {
        (0..self.dim().saturating_sub(2)).map(|n| (((n + 1) * (n + 2)) as f64).sqrt() * self.matrix[(n + 2, n)]).sum()
    }

    /// `⟨ψ|ρ|ψ⟩` for a vector of the same dimension.
    pub fn expectation(&self, psi: &DVector<Complex64>) -> Result<f64> {
        if psi.len() != self.dim() {
            return Err(GdistError::DimensionMismatch(psi.len(), self.dim()));
        }
        Ok((psi.adjoint() * &self.matrix * psi)[(0, 0)].re)
    }
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `e^{h G} v` for a sparse anti-Hermitian `G`, with `‖G‖ ≤ norm`.
fn expm_action<G>(generator: G, norm: f64, v: &mut [Complex64])
where
    G: Fn(&[Complex64], &mut [Complex64]),
{
    if norm == 0.0 {
        return;
    }
    let steps = (norm / STEP_NORM).ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let n = v.len();
    let mut term = vec![Complex64::new(0.0, 0.0); n];
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..steps {
        term.copy_from_slice(v);
        let scale = inf_norm(v).max(f64::MIN_POSITIVE);
        for k in 1..=200 {
            generator(&term, &mut next);
            let c = h / k as f64;
            for (t, x) in term.iter_mut().zip(&next) {
                *t = x * c;
            }
            for (a, t) in v.iter_mut().zip(&term) {
                *a += t;
            }
            if inf_norm(&term) <= 1e-18 * scale {
                break;
            }
        }
    }
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `√n` for `n ≤ w`.
fn sqrt_table(w: usize) -> Vec<f64> {
    (0..=w).map(|n| (n as f64).sqrt()).collect()
}

/// Applies `D(α)` in place.
fn displace(v: &mut [Complex64], alpha: Complex64) {
    let w = v.len();
    let root = sqrt_table(w);
    let ac = alpha.conj();
    let norm = 2.0 * alpha.norm() * (w as f64).sqrt();
    expm_action(
        |x, out| {
            for n in 0..w {
                let mut acc = Complex64::new(0.0, 0.0);
                if n > 0 {
                    acc += alpha * (root[n] * x[n - 1]);
                }
                if n + 1 < w {
                    acc -= ac * (root[n + 1] * x[n + 1]);
                }
                out[n] = acc;
            }
        },
        norm,
        v,
    );
}

/// Applies `S(r, θ)` in place.
fn squeeze(v: &mut [Complex64], r: f64, theta: f64) {
    let w = v.len();
    let z = Complex64::from_polar(r * 0.5, 2.0 * theta);
    let zc = z.conj();
    // up[n] = √(n(n−1)) couples n−2 → n; down[n] = √((n+1)(n+2)) couples n+2 → n.
    let up: Vec<f64> = (0..w).map(|n| ((n * n.saturating_sub(1)) as f64).sqrt()).collect();
    let down: Vec<f64> = (0..w).map(|n| (((n + 1) * (n + 2)) as f64).sqrt()).collect();
    let norm = r.abs() * w as f64;
    expm_action(
        |x, out| {
            for n in 0..w {
                let mut acc = Complex64::new(0.0, 0.0);
                if n >= 2 {
                    acc += z * (up[n] * x[n - 2]);
                }
                if n + 2 < w {
                    acc -= zc * (down[n] * x[n + 2]);
                }
                out[n] = acc;
            }
        },
        norm,
        v,
    );
}

fn unit_vector(w: usize, n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); w];
    v[n] = Complex64::new(1.0, 0.0);
    v
}

/// `D(α) S(r, θ)|n⟩` in a space of dimension `w`.
fn transformed_number_state(p: &GaussianParams<f64>, n: usize, w: usize) -> Vec<Complex64> {
    let mut v = unit_vector(w, n);
    squeeze(&mut v, p.squeeze_r(), p.theta());
    let a = p.alpha();
    displace(&mut v, Complex64::new(a[0], a[1]));
    v
}

/// `20 + 8(n̄ + sinh²r + |α|²)`, rounded up.
pub fn heuristic_dim(p: &GaussianParams<f64>) -> usize {
    let sinh2 = p.squeeze_r().sinh().powi(2);
    let a = p.alpha();
    let load = p.mean_photons() + sinh2 + a[0] * a[0] + a[1] * a[1];
    (20.0 + 8.0 * load).ceil() as usize
}

/// Builds the state at the heuristic dimension, doubling until the leakage
/// is below [`TARGET_LEAKAGE`] or [`MAX_AUTO_DIM`] is reached.
pub fn auto_state(p: &GaussianParams<f64>) -> Result<FockOperator> {
    auto_state_from(p, heuristic_dim(p))
}

/// As [`auto_state`], starting from at least `min_dim`.
pub fn auto_state_from(p: &GaussianParams<f64>, min_dim: usize) -> Result<FockOperator> {
    auto_state_with_target(p, min_dim, TARGET_LEAKAGE)
}

/// As [`auto_state_from`] with a caller-chosen leakage target. Overlaps of
/// marginals go through a square root, so tail errors of `ε` in one density
/// can cost `O(√ε)`; comparisons at the 1e−6 level want a target well below
/// the default.
pub fn auto_state_with_target(p: &GaussianParams<f64>, min_dim: usize, target: f64) -> Result<FockOperator> {
    let mut dim = heuristic_dim(p).max(min_dim);
    loop {
        let op = build_unchecked(p, dim);
        if op.leakage < target || dim >= MAX_AUTO_DIM {
            return check_leakage(op);
        }
        dim = (dim * 2).min(MAX_AUTO_DIM);
    }
}

/// The dimension [`auto_state`] would settle on.
pub fn auto_dim(p: &GaussianParams<f64>) -> usize {
    auto_state(p).map(|op| op.dim()).unwrap_or(MAX_AUTO_DIM)
}

/// `ρ = D S ρ_T S† D†` truncated to `dim`.
pub fn build_state(p: &GaussianParams<f64>, dim: usize) -> Result<FockOperator> {
    if dim == 0 {
        return Err(GdistError::InvalidParameter { name: "dim", value: 0.0, reason: "must be positive" });
    }
    check_leakage(build_unchecked(p, dim))
}

fn check_leakage(op: FockOperator) -> Result<FockOperator> {
    if op.leakage > BUILD_LEAKAGE_LIMIT {
        return Err(GdistError::TruncationInadequate {
            leakage: op.leakage,
            dim: op.dim(),
            limit: BUILD_LEAKAGE_LIMIT,
        });
    }
    Ok(op)
}

fn build_unchecked(p: &GaussianParams<f64>, dim: usize) -> FockOperator {
    let w = 2 * dim;
    // ρ_T weights (1 − q) qⁿ with q = n̄/(n̄ + 1).
    let q = (p.gamma() - 1.0) / (p.gamma() + 1.0);
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut leakage = 0.0;
    let mut weight = 1.0 - q;
    let mut n = 0;
    while n < w && weight >= WEIGHT_FLOOR {
        let v = transformed_number_state(p, n, w);
        let kept = DVector::from_column_slice(&v[..dim]);
        let lost: f64 = v[dim..].iter().map(|z| z.norm_sqr()).sum();
        leakage += weight * lost;
        rho.gerc(Complex64::new(weight, 0.0), &kept, &kept, Complex64::new(1.0, 0.0));
        n += 1;
        weight *= q;
    }
    // Thermal tail Σ_{k ≥ n} (1 − q) q^k.
    if q > 0.0 {
        leakage += q.powi(n as i32);
    }
    FockOperator { matrix: hermitian_part(&rho), leakage }
}

/// `D(α) S(r, θ)|0⟩` truncated to `dim`, for pure parameter sets.
pub fn build_pure_vector(p: &GaussianParams<f64>, dim: usize) -> Result<DVector<Complex64>> {
    if !p.is_pure(1e-12) {
        return Err(GdistError::InvalidParameter {
            name: "gamma",
            value: p.gamma(),
            reason: "a state vector exists only for pure states",
        });
    }
    let v = transformed_number_state(p, 0, 2 * dim);
    Ok(DVector::from_column_slice(&v[..dim]))
}

/// Coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`.
pub fn coherent_vector(alpha: Complex64, dim: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        v[n] = c;
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// `S(r, θ) ρ S†(r, θ)`, computed in a doubled working space and cropped.
pub fn apply_squeeze(op: &FockOperator, r: f64, theta: f64) -> Result<FockOperator> {
    let dim = op.dim();
    let w = 2 * dim;
    // Columns of S ρ, then rows via (S (Sρ)†)†.
    let mut left = DMatrix::<Complex64>::zeros(w, dim);
    for j in 0..dim {
        let mut col = vec![Complex64::new(0.0, 0.0); w];
        col[..dim].copy_from_slice(op.matrix.column(j).as_slice());
        squeeze(&mut col, r, theta);
        left.set_column(j, &DVector::from_vec(col));
    }
    let left_adj = left.adjoint();
    let mut full = DMatrix::<Complex64>::zeros(w, w);
    for j in 0..w {
        let mut col = vec![Complex64::new(0.0, 0.0); w];
        for i in 0..dim {
            col[i] = left_adj[(i, j)];
        }
        squeeze(&mut col, r, theta);
        full.set_column(j, &DVector::from_vec(col));
    }
    let full = full.adjoint();
    let lost: f64 = (dim..w).map(|n| full[(n, n)].re).sum();
    let cropped = hermitian_part(&full.view((0, 0), (dim, dim)).into_owned());
    check_leakage(FockOperator { matrix: cropped, leakage: op.leakage + lost.max(0.0) })
}

/// `Q(α) = ⟨α|ρ|α⟩/π`.
pub fn husimi(op: &FockOperator, alpha: Complex64) -> f64 {
    let c = coherent_vector(alpha, op.dim());
    (c.adjoint() * &op.matrix * &c)[(0, 0)].re / std::f64::consts::PI
}

/// Eigenvalues below `dim · ε · λ_max` are roundoff from the build and are
/// clipped to zero together with the negative ones; their square roots
/// would otherwise add `O(√ε)` each to the trace.
fn noise_floor(eigenvalues: &DVector<f64>) -> f64 {
    let top = eigenvalues.iter().copied().fold(0.0, f64::max);
    eigenvalues.len() as f64 * f64::EPSILON * top
}

/// `tr √(√ρ₁ ρ₂ √ρ₁)`.
///
/// `√ρ₁` comes from the Hermitian eigendecomposition `ρ₁ = V Λ V†`, and
/// `√ρ₁ ρ₂ √ρ₁` is formed in that eigenbasis restricted to the eigenvalues
/// above the roundoff floor: `Λ^{1/2} V†ρ₂V Λ^{1/2}`. The nonzero spectrum is
/// unchanged, and spurious square roots of noise eigenvalues, each worth
/// `O(√ε)`, never enter the trace. Negative eigenvalues of the product are
/// clipped to zero.
pub fn fidelity_fock(a: &FockOperator, b: &FockOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(GdistError::DimensionMismatch(a.dim(), b.dim()));
    }
    let eig = hermitian_part(&a.matrix).symmetric_eigen();
    let floor = noise_floor(&eig.eigenvalues);
    let keep: Vec<usize> = (0..a.dim()).filter(|&i| eig.eigenvalues[i] > floor).collect();
    if keep.is_empty() {
        return Ok(0.0);
    }
    let mut support = DMatrix::<Complex64>::zeros(a.dim(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let root = eig.eigenvalues[i].sqrt();
        support.set_column(k, &(eig.eigenvectors.column(i) * Complex64::new(root, 0.0)));
    }
    let m = support.adjoint() * &b.matrix * &support;
    let ev = hermitian_part(&m).symmetric_eigenvalues();
    Ok(ev.iter().map(|l| l.max(0.0).sqrt()).sum())
}

/// Quadrature eigenfunctions `ψ_n(x)` for `n < dim`, scaled so the vacuum
/// variance is 1/4: `ψ_n(x) = 2^{1/4} h_n(√2 x)` with `h_n` the Hermite
/// functions.
pub fn quadrature_eigenfunctions(x: f64, dim: usize) -> Vec<f64> {
    let y = std::f64::consts::SQRT_2 * x;
    let mut out = Vec::with_capacity(dim);
    if dim == 0 {
        return out;
    }
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
    let pref = 2f64.powf(0.25);
    out.push(pref * h0);
    let (mut prev, mut cur) = (0.0, h0);
    for n in 0..dim - 1 {
        let next = (2.0 / (n + 1) as f64).sqrt() * y * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(pref * cur);
    }
    out
}

fn marginal_point(op: &FockOperator, phase: &[Complex64], x: f64) -> f64 {
    let psi = quadrature_eigenfunctions(x, op.dim());
    let w = DVector::from_iterator(op.dim(), psi.iter().zip(phase).map(|(p, e)| e * *p));
    (w.adjoint() * &op.matrix * &w)[(0, 0)].re
}

fn check_marginal(op: &FockOperator) -> Result<()> {
    if op.leakage > MARGINAL_DEFICIT_LIMIT {
        return Err(GdistError::TruncationInadequate {
            leakage: op.leakage,
            dim: op.dim(),
            limit: MARGINAL_DEFICIT_LIMIT,
        });
    }
    Ok(())
}

/// `p(x) = Σ ρ_{mn} ψ_m(x; φ) ψ_n*(x; φ)` at every grid point.
///
/// The exact normalization deficit of the truncated marginal equals the
/// trace leakage, which is what the deficit limit is checked against.
pub fn marginal_fock(op: &FockOperator, phi: f64, grid: &[f64]) -> Result<Vec<f64>> {
    check_marginal(op)?;
    let phase: Vec<Complex64> = (0..op.dim()).map(|n| Complex64::from_polar(1.0, n as f64 * phi)).collect();
    Ok(grid.iter().map(|&x| marginal_point(op, &phase, x)).collect())
}

/// Mean and variance of `X_φ` from the Fock moments.
pub fn quadrature_moments(op: &FockOperator, phi: f64) -> (f64, f64) {
    let e1 = Complex64::from_polar(1.0, -phi);
    let mean = (op.mean_a() * e1).re;
    let second = (2.0 * (op.mean_a2() * e1 * e1).re + 2.0 * op.mean_number() + op.trace()) / 4.0;
    (mean, (second - mean * mean).max(0.0))
}

/// Trapezoidal `∫ √(p₁ p₂) dx` of the two Fock marginals on a shared grid
/// spanning ±12 pooled standard deviations.
pub fn overlap_fock(a: &FockOperator, b: &FockOperator, phi: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(GdistError::DimensionMismatch(a.dim(), b.dim()));
    }
    check_marginal(a)?;
    check_marginal(b)?;
    let (m1, v1) = quadrature_moments(a, phi);
    let (m2, v2) = quadrature_moments(b, phi);
    let (s1, s2) = (v1.sqrt(), v2.sqrt());
    let centre = 0.5 * (m1 + m2);
    let half = 12.0 * s1.max(s2) + 0.5 * (m1 - m2).abs();
    let h = s1.min(s2).max(1e-3) / 4.0;
    let n = (2.0 * half / h).ceil() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|k| centre - half + 2.0 * half * k as f64 / (n - 1) as f64).collect();
    let pa = marginal_fock(a, phi, &grid)?;
    let pb = marginal_fock(b, phi, &grid)?;
    let step = 2.0 * half / (n - 1) as f64;
    let integrand: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| (x.max(0.0) * y.max(0.0)).sqrt()).collect();
    Ok(trapezoid(&integrand, step))
}

/// Trapezoidal rule on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(g: f64, s: f64, t: f64, ax: f64, ay: f64) -> GaussianParams<f64> {
        GaussianParams::new(g, s, t, ax, ay).unwrap()
    }

    #[test]
    fn vacuum_is_projector() {
        let op = build_state(&GaussianParams::vacuum(), 10).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let expect = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(op.matrix()[(i, j)].re, expect, epsilon = 1e-15);
                assert_abs_diff_eq!(op.matrix()[(i, j)].im, 0.0, epsilon = 1e-15);
            }
        }
        assert_eq!(op.leakage(), 0.0);
    }

    #[test]
    fn thermal_weights_are_geometric() {
        let op = build_state(&GaussianParams::thermal(3.0).unwrap(), 60).unwrap();
        for n in 0..60 {
            assert_abs_diff_eq!(op.matrix()[(n, n)].re, 0.5f64.powi(n as i32 + 1), epsilon = 1e-18);
        }
        assert!(op.leakage() < 1e-17, "{}", op.leakage());
    }

    #[test]
    fn coherent_state_is_poissonian() {
        let op = build_state(&GaussianParams::coherent(1.0, 0.0), 40).unwrap();
        let mut fact = 1.0;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            assert_abs_diff_eq!(op.matrix()[(n, n)].re, (-1.0f64).exp() / fact, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(op.mean_number(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(op.mean_a().re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn squeezed_vacuum_moments() {
        // s = 4 along θ = π/6: ⟨n⟩ = sinh² r = (s + 1/s − 2)/4.
        let p = params(1.0, 4.0, std::f64::consts::FRAC_PI_6, 0.0, 0.0);
        let op = build_state(&p, 80).unwrap();
        assert_abs_diff_eq!(op.mean_number(), 0.5625, epsilon = 1e-10);
        let (_, var) = quadrature_moments(&op, std::f64::consts::FRAC_PI_6);
        assert_abs_diff_eq!(var, 1.0, epsilon = 1e-10);
        let (_, var) = quadrature_moments(&op, std::f64::consts::FRAC_PI_6 + std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(var, 1.0 / 16.0, epsilon = 1e-10);
    }

    #[test]
    fn fidelity_examples() {
        let vac = build_state(&GaussianParams::vacuum(), 40).unwrap();
        let coh = build_state(&GaussianParams::coherent(1.0, 0.0), 40).unwrap();
        assert_abs_diff_eq!(fidelity_fock(&vac, &vac).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fidelity_fock(&vac, &coh).unwrap(), (-0.5f64).exp(), epsilon = 1e-10);
        let t3 = build_state(&GaussianParams::thermal(3.0).unwrap(), 120).unwrap();
        let t5 = build_state(&GaussianParams::thermal(5.0).unwrap(), 120).unwrap();
        assert_abs_diff_eq!(fidelity_fock(&t3, &t5).unwrap(), 0.965_925_826_289_068_3, epsilon = 1e-8);
        assert!(fidelity_fock(&t3, &vac).is_err());
    }

    #[test]
    fn vacuum_marginal_is_ground_state() {
        let op = build_state(&GaussianParams::vacuum(), 10).unwrap();
        let grid: Vec<f64> = (-30..=30).map(|k| k as f64 * 0.1).collect();
        let p = marginal_fock(&op, 0.7, &grid).unwrap();
        for (x, v) in grid.iter().zip(p) {
            let exact = (2.0 / std::f64::consts::PI).sqrt() * (-2.0 * x * x).exp();
            assert_abs_diff_eq!(v, exact, epsilon = 1e-10);
        }
    }

    #[test]
    fn eigenfunctions_are_orthonormal() {
        let h = 0.01;
        let grid: Vec<f64> = (-1000..=1000).map(|k| k as f64 * h).collect();
        let table: Vec<Vec<f64>> = grid.iter().map(|&x| quadrature_eigenfunctions(x, 30)).collect();
        for (m, n) in [(0, 0), (5, 5), (29, 29), (3, 4), (10, 12)] {
            let v: Vec<f64> = table.iter().map(|t| t[m] * t[n]).collect();
            let expect = if m == n { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(trapezoid(&v, h), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn marginal_rotates_with_state() {
        let a = build_state(&params(1.0, 3.0, std::f64::consts::FRAC_PI_4, 0.0, 0.0), 60).unwrap();
        let b = build_state(&params(1.0, 3.0, 0.0, 0.0, 0.0), 60).unwrap();
        let grid = [-1.0, -0.3, 0.0, 0.45, 1.2];
        let pa = marginal_fock(&a, std::f64::consts::FRAC_PI_4, &grid).unwrap();
        let pb = marginal_fock(&b, 0.0, &grid).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn identical_overlap_is_one() {
        let a = build_state(&params(2.0, 2.0, 0.4, 0.3, -0.2), 80).unwrap();
        assert_abs_diff_eq!(overlap_fock(&a, &a, 1.1).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn pure_vector_matches_density() {
        let p = params(1.0, 2.5, 0.9, 0.4, 0.1);
        let psi = build_pure_vector(&p, 60).unwrap();
        let rho = build_state(&p, 60).unwrap();
        assert_abs_diff_eq!(rho.expectation(&psi).unwrap(), 1.0, epsilon = 1e-10);
        assert!(build_pure_vector(&GaussianParams::thermal(2.0).unwrap(), 10).is_err());
    }

    #[test]
    fn squeeze_of_vacuum_matches_direct_build() {
        let vac = build_state(&GaussianParams::vacuum(), 60).unwrap();
        let sq = apply_squeeze(&vac, 0.5, 0.3).unwrap();
        let direct = build_state(&params(1.0, 1.0f64.exp(), 0.3, 0.0, 0.0), 60).unwrap();
        assert!((sq.matrix() - direct.matrix()).camax() < 1e-12);
    }

    #[test]
    fn truncation_error_is_reported() {
        let p = params(5.0, 5.0, 0.0, 2.0, 0.0);
        assert!(matches!(build_state(&p, 20), Err(GdistError::TruncationInadequate { .. })));
        let op = auto_state(&p).unwrap();
        assert!(op.leakage() < TARGET_LEAKAGE);
    }
}
