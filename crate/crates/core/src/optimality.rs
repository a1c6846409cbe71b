//! Minimization of the homodyne overlap over the measurement angle and
//! classification of state pairs by whether that minimum reaches the
//! fidelity.
//!
//! For states of equal mean, `I_φ = f(B₂/B₁)` with `f` increasing below 1 and
//! decreasing above it, so the minimum over φ sits at one of the two
//! extremes of the variance ratio. Those extremes are found in closed form:
//! writing `u = 2φ`, the stationarity condition of the ratio
//! `(a + b cos(u − t₂)) / (c + d cos(u − t₁))` reduces to
//! `P sin u + Q cos u + K = 0` with
//!
//! ```text
//! P = ad cos t₁ − bc cos t₂,   Q = bc sin t₂ − ad sin t₁,   K = bd sin(t₂ − t₁)
//! ```
//!
//! The equality `I_φ = F` has the same harmonic form: cross-multiplying the
//! ratio against a target `t` gives
//!
//! ```text
//! A₁ = γ₂s₂₋ sin 2θ₂ − tγ₁s₁₋ sin 2θ₁
//! A₂ = γ₂s₂₋ cos 2θ₂ − tγ₁s₁₋ cos 2θ₁
//! A₃ = γ₂s₂₊ − tγ₁s₁₊
//! ```
//!
//! and `A₁² + A₂² − A₃² = −2γ₂²(2Υ² − ΥD + 2)` with `Υ = tγ₁/γ₂`.

use serde::Serialize;

use crate::error::{GdistError, Result};
use crate::fidelity::{ensure_same_mean, fidelity_gaussian, fidelity_same_mean, mean_distance, squeeze_coupling};
use crate::gaussian::GaussianParams;
use crate::homodyne::{b_ratio, overlap_at, overlap_from_ratio};
use crate::scalar::{wrap, Scalar};

/// Default number of grid points for the scan minimizer.
pub const DEFAULT_SCAN_POINTS: usize = 4096;

/// `A₁ sin 2φ + A₂ cos 2φ + A₃ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HarmonicEquation<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
}

impl<T: Scalar> HarmonicEquation<T> {
    pub fn new(a1: T, a2: T, a3: T) -> Self {
        HarmonicEquation { a1, a2, a3 }
    }

    /// `A₁² + A₂² − A₃²`; the equation is solvable iff this is `≥ 0`.
    pub fn discriminant(&self) -> T {
        self.a1 * self.a1 + self.a2 * self.a2 - self.a3 * self.a3
    }

    /// All roots `φ ∈ [0, π)`, in increasing order.
    ///
    /// Uses `A₁ sin u + A₂ cos u = R sin(u + ψ)`. A discriminant within
    /// `roundoff_tol · (A₁² + A₂²)` of zero is a tangency and yields the
    /// single double root.
    pub fn roots(&self) -> Vec<T> {
        let r2 = self.a1 * self.a1 + self.a2 * self.a2;
        if r2 == T::zero() {
            return Vec::new();
        }
        let disc = self.discriminant();
        let band = T::roundoff_tol() * r2;
        if disc < -band {
            return Vec::new();
        }
        let r = r2.sqrt();
        let psi = self.a2.atan2(self.a1);
        let two_pi = T::PI() + T::PI();
        let half = T::lit(0.5);
        if disc <= band {
            let target = if self.a3 > T::zero() { -T::FRAC_PI_2() } else { T::FRAC_PI_2() };
            return vec![wrap(target - psi, two_pi) * half];
        }
        let base = (-self.a3 / r).max(-T::one()).min(T::one()).asin();
        let mut out = vec![wrap(base - psi, two_pi) * half, wrap(T::PI() - base - psi, two_pi) * half];
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        out
    }
}

/// One sign choice of `B₂/B₁ = [F⁻² ± (F⁻⁴ − 1)^{1/2}]²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EqualityBranch<T> {
    /// Target variance ratio `B₂/B₁` at which `I_φ = F`.
    pub target_ratio: T,
    /// `Υ = (γ₁/γ₂) · target_ratio`.
    pub upsilon: T,
    pub equation: HarmonicEquation<T>,
}

impl<T: Scalar> EqualityBranch<T> {
    pub fn discriminant(&self) -> T {
        self.equation.discriminant()
    }

    /// `2Υ² − ΥD + 2`; non-positive exactly when this branch is solvable.
    pub fn solvability(&self, coupling: T) -> T {
        let two = T::lit(2.0);
        two * self.upsilon * self.upsilon - self.upsilon * coupling + two
    }
}

/// The equality `I_φ = F` written as one harmonic equation per branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalityEquation<T> {
    pub plus: EqualityBranch<T>,
    pub minus: EqualityBranch<T>,
    /// `D(s₁, s₂, θ̃)`.
    pub coupling: T,
    pub fidelity: T,
}

impl<T: Scalar> OptimalityEquation<T> {
    pub fn upsilon_plus(&self) -> T {
        self.plus.upsilon
    }

    pub fn upsilon_minus(&self) -> T {
        self.minus.upsilon
    }

    /// Largest discriminant over the two branches.
    pub fn discriminant(&self) -> T {
        self.plus.discriminant().max(self.minus.discriminant())
    }
}

/// Builds the equality equation for a same-mean pair with fidelity `fidelity`.
pub fn build_equality_equation<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
    fidelity: T,
) -> Result<OptimalityEquation<T>> {
    ensure_same_mean(p1, p2, T::default_tol())?;
    if !(fidelity > T::zero()) || fidelity > T::one() {
        return Err(GdistError::InvalidParameter {
            name: "fidelity",
            value: fidelity.to_f64().unwrap_or(f64::NAN),
            reason: "must lie in (0, 1]",
        });
    }
    if fidelity >= T::one() - T::roundoff_tol() {
        return Err(GdistError::DegenerateFidelity);
    }
    let inv2 = (fidelity * fidelity).recip();
    let root = (inv2 * inv2 - T::one()).max(T::zero()).sqrt();
    let two = T::lit(2.0);
    let (g1, g2) = (p1.gamma(), p2.gamma());
    let parts = |p: &GaussianParams<T>| {
        let (plus, minus) = (p.s() + p.s().recip(), p.s() - p.s().recip());
        let (s2t, c2t) = (two * p.theta()).sin_cos();
        (plus, minus * s2t, minus * c2t)
    };
    let (p1p, p1s, p1c) = parts(p1);
    let (p2p, p2s, p2c) = parts(p2);
    let branch = |y: T| {
        let t = y * y;
        EqualityBranch {
            target_ratio: t,
            upsilon: g1 / g2 * t,
            equation: HarmonicEquation::new(g2 * p2s - t * g1 * p1s, g2 * p2c - t * g1 * p1c, g2 * p2p - t * g1 * p1p),
        }
    };
    // The two square roots multiply to 1; form the small one as a reciprocal.
    let big = inv2 + root;
    Ok(OptimalityEquation {
        plus: branch(big),
        minus: branch(big.recip()),
        coupling: squeeze_coupling(p1.s(), p2.s(), p2.theta() - p1.theta()),
        fidelity,
    })
}

/// All `φ ∈ [0, π)` at which `I_φ = F`, merged over both branches.
pub fn solve_equality_phi<T: Scalar>(eq: &OptimalityEquation<T>) -> Vec<T> {
    let mut roots: Vec<T> = eq.plus.equation.roots().into_iter().chain(eq.minus.equation.roots()).collect();
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= T::roundoff_tol());
    roots
}

/// Minimizing angle and minimal overlap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OverlapMinimum<T> {
    pub phi: T,
    pub overlap: T,
}

/// `min_φ I_φ` in closed form for same-mean pairs; pairs with different
/// means go to [`minimize_overlap_general`].
pub fn minimize_overlap<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>) -> OverlapMinimum<T> {
    if mean_distance(p1, p2) > T::default_tol() {
        return minimize_overlap_general(p1, p2);
    }
    match ratio_stationary_points(p1, p2) {
        Some(candidates) => candidates
            .into_iter()
            .map(|phi| OverlapMinimum { phi, overlap: overlap_from_ratio(b_ratio(p1, p2, phi)) })
            .filter(|m| m.overlap.is_finite())
            .fold(None, |best: Option<OverlapMinimum<T>>, m| match best {
                Some(b) if b.overlap <= m.overlap => Some(b),
                _ => Some(m),
            })
            .unwrap_or_else(|| minimize_overlap_scan(p1, p2, DEFAULT_SCAN_POINTS)),
        None => OverlapMinimum { phi: T::zero(), overlap: overlap_from_ratio(b_ratio(p1, p2, T::zero())) },
    }
}

/// Angles where `B₂/B₁` is stationary; `None` when the ratio is constant.
pub fn ratio_stationary_points<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>) -> Option<Vec<T>> {
    let two = T::lit(2.0);
    let (a, b) = (p2.s() + p2.s().recip(), p2.s() - p2.s().recip());
    let (c, d) = (p1.s() + p1.s().recip(), p1.s() - p1.s().recip());
    let (t1, t2) = (two * p1.theta(), two * p2.theta());
    let eq = HarmonicEquation::new(
        a * d * t1.cos() - b * c * t2.cos(),
        b * c * t2.sin() - a * d * t1.sin(),
        b * d * (t2 - t1).sin(),
    );
    let scale = (a * d).max(b * c);
    if eq.a1.hypot(eq.a2) <= T::roundoff_tol() * scale {
        return None;
    }
    Some(eq.roots())
}

/// Grid scan of `I_φ` over `[0, π)` followed by golden-section refinement
/// of the best grid cells. Valid for any pair, including different means.
pub fn minimize_overlap_scan<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
    points: usize,
) -> OverlapMinimum<T> {
    let n = points.max(8);
    let step = T::PI() / T::from_usize(n).expect("grid size fits the scalar");
    let values: Vec<T> = (0..n).map(|k| overlap_at(p1, p2, step * T::from_usize(k).expect("index fits"))).collect();
    // Local minima of the periodic grid, best first.
    let mut minima: Vec<usize> = (0..n)
        .filter(|&k| {
            let prev = values[(k + n - 1) % n];
            let next = values[(k + 1) % n];
            values[k] <= prev && values[k] <= next
        })
        .collect();
    minima.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite overlaps"));
    let mut best = OverlapMinimum { phi: T::zero(), overlap: T::infinity() };
    for &k in minima.iter().take(4) {
        let centre = step * T::from_usize(k).expect("index fits");
        let (phi, overlap) = golden_section(|phi| overlap_at(p1, p2, phi), centre - step, centre + step);
        if overlap < best.overlap {
            best = OverlapMinimum { phi: wrap(phi, T::PI()), overlap };
        }
    }
    best
}

/// Dense scan at [`DEFAULT_SCAN_POINTS`] with refinement to ~1e−10 in φ.
pub fn minimize_overlap_general<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>) -> OverlapMinimum<T> {
    minimize_overlap_scan(p1, p2, DEFAULT_SCAN_POINTS)
}

fn golden_section<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let tol = T::lit(1e-11).max(T::epsilon().sqrt());
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
    let x = (a + b) * T::lit(0.5);
    let fx = f(x);
    // Report the best point actually evaluated.
    [(x, fx), (c, fc), (d, fd)].into_iter().fold((x, fx), |best, p| if p.1 < best.1 { p } else { best })
}

/// `Γ₁₂ = (γ₂ − γ₂⁻¹)/(γ₁ − γ₁⁻¹) + (γ₁ − γ₁⁻¹)/(γ₂ − γ₂⁻¹)`; defined for
/// mixed states only.
pub fn gamma_coupling<T: Scalar>(g1: T, g2: T) -> T {
    let (m1, m2) = (g1 - g1.recip(), g2 - g2.recip());
    m2 / m1 + m1 / m2
}

/// Optimality when the first state is unsqueezed: both pure, or both mixed
/// with `s₂ + s₂⁻¹ = Γ₁₂`.
pub fn check_condition_s1_unity<T: Scalar>(g1: T, g2: T, s2: T, tol: T) -> bool {
    let pure1 = g1 <= T::one() + tol;
    let pure2 = g2 <= T::one() + tol;
    match (pure1, pure2) {
        (true, true) => true,
        (false, false) => {
            let target = gamma_coupling(g1, g2);
            ((s2 + s2.recip()) - target).abs() <= tol * target
        }
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OptimalityClass {
    PurePureAlwaysOptimal,
    PureMixedNeverOptimal,
    MixedMixedOptimal,
    MixedMixedNotOptimal,
    DifferentMeanSymmetricOptimal,
    DifferentMeanSymmetricNotOptimal,
    IdenticalStates,
}

impl OptimalityClass {
    /// True for the classes in which homodyne detection attains the fidelity.
    pub fn is_optimal(self) -> bool {
        matches!(
            self,
            OptimalityClass::PurePureAlwaysOptimal
                | OptimalityClass::MixedMixedOptimal
                | OptimalityClass::DifferentMeanSymmetricOptimal
                | OptimalityClass::IdenticalStates
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalityVerdict<T> {
    pub class: OptimalityClass,
    /// An angle with `I_φ = F`, present exactly for optimal classes.
    pub witness_phi: Option<T>,
    /// `min_φ I_φ − F`.
    pub gap: T,
    /// `D − 2Γ₁₂`, for mixed–mixed pairs.
    pub condition_residual: Option<T>,
    pub fidelity: T,
    pub min_overlap: T,
    /// Angle of the minimal overlap.
    pub min_phi: T,
}

/// Classifies a same-mean pair as pure–pure (always optimal), pure–mixed
/// (never optimal) or mixed–mixed (optimal iff `D = 2Γ₁₂`).
pub fn check_condition_general<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
) -> Result<OptimalityVerdict<T>> {
    check_condition_general_with_tol(p1, p2, T::default_tol())
}

pub fn check_condition_general_with_tol<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
    tol: T,
) -> Result<OptimalityVerdict<T>> {
    ensure_same_mean(p1, p2, tol)?;
    let fidelity = fidelity_same_mean(p1, p2)?.fidelity;
    let min = minimize_overlap(p1, p2);
    let gap = min.overlap - fidelity;
    let verdict = |class: OptimalityClass, residual| OptimalityVerdict {
        class,
        witness_phi: class.is_optimal().then_some(min.phi),
        gap,
        condition_residual: residual,
        fidelity,
        min_overlap: min.overlap,
        min_phi: min.phi,
    };
    if p1.covariance().distance(&p2.covariance()) <= tol {
        return Ok(verdict(OptimalityClass::IdenticalStates, None));
    }
    let (pure1, pure2) = (p1.is_pure(tol), p2.is_pure(tol));
    Ok(match (pure1, pure2) {
        (true, true) => verdict(OptimalityClass::PurePureAlwaysOptimal, None),
        (true, false) | (false, true) => verdict(OptimalityClass::PureMixedNeverOptimal, None),
        (false, false) => {
            let residual = condition_residual(p1, p2);
            let target = T::lit(2.0) * gamma_coupling(p1.gamma(), p2.gamma());
            let class = if residual.abs() <= tol * target {
                OptimalityClass::MixedMixedOptimal
            } else {
                OptimalityClass::MixedMixedNotOptimal
            };
            verdict(class, Some(residual))
        }
    })
}

/// `D(s₁, s₂, θ̃) − 2Γ₁₂`.
pub fn condition_residual<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>) -> T {
    let d = squeeze_coupling(p1.s(), p2.s(), p2.theta() - p1.theta());
    d - T::lit(2.0) * gamma_coupling(p1.gamma(), p2.gamma())
}

/// The aligned (`θ̃ = 0`) and crossed (`θ̃ = π/2`) forms of the mixed–mixed
/// condition: `s₂/s₁ + s₁/s₂ − Γ₁₂` and `s₁s₂ + 1/(s₁s₂) − Γ₁₂`. `None` for
/// any other relative angle.
pub fn special_case_residual<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>, tol: T) -> Option<T> {
    let rel = wrap(p2.theta() - p1.theta(), T::PI());
    let (s1, s2) = (p1.s(), p2.s());
    let g12 = gamma_coupling(p1.gamma(), p2.gamma());
    if rel <= tol || T::PI() - rel <= tol {
        Some(s2 / s1 + s1 / s2 - g12)
    } else if (rel - T::FRAC_PI_2()).abs() <= tol {
        Some(s1 * s2 + (s1 * s2).recip() - g12)
    } else {
        None
    }
}

/// A value of `s₂` satisfying the mixed–mixed equality condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct S2Root<T> {
    /// Canonical squeezing degree, `≥ 1`.
    pub s2: T,
    /// Relative angle to pair with `s2`; shifted by `π/2` when the raw root
    /// was below 1.
    pub theta_tilde: T,
    /// Root of the quadratic before canonicalization.
    pub raw_s2: T,
}

/// Solves `D(s₁, s₂, θ̃) = 2Γ₁₂` for `s₂`.
///
/// Multiplying through by `s₂` gives
/// `(s₁₊ − s₁₋c) s₂² − 2Γ₁₂ s₂ + (s₁₊ + s₁₋c) = 0` with `c = cos 2θ̃`.
pub fn solve_s2_for_optimality<T: Scalar>(g1: T, g2: T, s1: T, theta_tilde: T) -> Result<Vec<S2Root<T>>> {
    let tol = T::default_tol();
    for (name, g) in [("g1", g1), ("g2", g2)] {
        if !(g > T::one() + tol) || !g.is_finite() {
            return Err(GdistError::InvalidParameter {
                name,
                value: g.to_f64().unwrap_or(f64::NAN),
                reason: "the condition applies to mixed states (gamma > 1) only",
            });
        }
    }
    if !(s1 >= T::one()) || !s1.is_finite() {
        return Err(GdistError::InvalidParameter {
            name: "s1",
            value: s1.to_f64().unwrap_or(f64::NAN),
            reason: "must be >= 1",
        });
    }
    let (plus, minus) = (s1 + s1.recip(), s1 - s1.recip());
    let c = (T::lit(2.0) * theta_tilde).cos();
    let qa = plus - minus * c;
    let qc = plus + minus * c;
    let half_b = gamma_coupling(g1, g2);
    let quarter_disc = half_b * half_b - qa * qc;
    if quarter_disc < -T::roundoff_tol() * half_b * half_b {
        return Ok(Vec::new());
    }
    let q = half_b + quarter_disc.max(T::zero()).sqrt();
    let mut raws = vec![q / qa, qc / q];
    if (raws[0] - raws[1]).abs() <= T::roundoff_tol().sqrt() * raws[0] {
        raws.truncate(1);
    }
    let roots = raws
        .into_iter()
        .map(|raw| {
            if raw < T::one() {
                S2Root { s2: raw.recip(), theta_tilde: wrap(theta_tilde + T::FRAC_PI_2(), T::PI()), raw_s2: raw }
            } else {
                S2Root { s2: raw, theta_tilde, raw_s2: raw }
            }
        })
        .collect();
    Ok(roots)
}

/// Different means, both states unsqueezed: optimal iff `γ₁ = γ₂`, with the
/// witness angle along the mean difference.
pub fn check_different_mean_symmetric<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
) -> Result<OptimalityVerdict<T>> {
    check_different_mean_symmetric_with_tol(p1, p2, T::default_tol())
}

pub fn check_different_mean_symmetric_with_tol<T: Scalar>(
    p1: &GaussianParams<T>,
    p2: &GaussianParams<T>,
    tol: T,
) -> Result<OptimalityVerdict<T>> {
    for (name, p) in [("s1", p1), ("s2", p2)] {
        if p.s() > T::one() + tol {
            return Err(GdistError::InvalidParameter {
                name,
                value: p.s().to_f64().unwrap_or(f64::NAN),
                reason: "radially symmetric states (s = 1) only",
            });
        }
    }
    let fidelity = fidelity_gaussian(&p1.covariance(), &p2.covariance())?.fidelity;
    let min = minimize_overlap_general(p1, p2);
    let (a, b) = (p1.alpha(), p2.alpha());
    let beta = [b[0] - a[0], b[1] - a[1]];
    let class = if (p1.gamma() - p2.gamma()).abs() < tol {
        if beta[0].hypot(beta[1]) <= tol {
            OptimalityClass::IdenticalStates
        } else {
            OptimalityClass::DifferentMeanSymmetricOptimal
        }
    } else {
        OptimalityClass::DifferentMeanSymmetricNotOptimal
    };
    let witness_phi = match class {
        OptimalityClass::DifferentMeanSymmetricOptimal => Some(wrap(beta[1].atan2(beta[0]), T::PI())),
        OptimalityClass::IdenticalStates => Some(T::zero()),
        _ => None,
    };
    Ok(OptimalityVerdict {
        class,
        witness_phi,
        gap: min.overlap - fidelity,
        condition_residual: None,
        fidelity,
        min_overlap: min.overlap,
        min_phi: min.phi,
    })
}

/// Routes a pair to the applicable classifier: same-mean pairs to
/// [`check_condition_general`], unsqueezed pairs with different means to
/// [`check_different_mean_symmetric`].
pub fn classify<T: Scalar>(p1: &GaussianParams<T>, p2: &GaussianParams<T>, tol: T) -> Result<OptimalityVerdict<T>> {
    if mean_distance(p1, p2) <= tol {
        check_condition_general_with_tol(p1, p2, tol)
    } else if p1.s() <= T::one() + tol && p2.s() <= T::one() + tol {
        check_different_mean_symmetric_with_tol(p1, p2, tol)
    } else {
        Err(GdistError::Unclassifiable("different means are classified only for unsqueezed (s = 1) pairs"))
    }
}
