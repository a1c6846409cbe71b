//! Overlap surfaces `I_φ(s₂)` for the three fixed-parameter figures.

use std::f64::consts::{FRAC_PI_3, PI};
use std::io::{self, Write};

use gdist_core::{fidelity_same_mean, minimize_overlap, overlap_at, solve_s2_for_optimality, GaussianParams, Result};
use rayon::prelude::*;

use crate::{fmt_f64, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Two pure states: equality at some angle for every `s₂`.
    Fig2,
    /// Pure against mixed: a strictly positive surface.
    Fig3,
    /// Two mixed states: tangency at a single `s₂`.
    Fig4,
}

/// Parameters held fixed while `s₂` and `φ` vary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub s1: f64,
    pub theta_tilde: f64,
}

impl Figure {
    pub fn fixed(self) -> FixedParams {
        let (gamma1, gamma2) = match self {
            Figure::Fig2 => (1.0, 1.0),
            Figure::Fig3 => (1.0, 4.0),
            Figure::Fig4 => (2.0, 4.0),
        };
        FixedParams { gamma1, gamma2, s1: 2.0, theta_tilde: FRAC_PI_3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureRequest {
    pub which: Figure,
    /// `(lo, hi, steps)`; `steps` points including both ends.
    pub s2_range: (f64, f64, usize),
    /// Uniform points on `[0, π)`.
    pub phi_steps: usize,
    pub fixed: FixedParams,
}

impl FigureRequest {
    pub fn new(which: Figure) -> Self {
        FigureRequest { which, s2_range: (1.0, 5.0, 200), phi_steps: 720, fixed: which.fixed() }
    }

    /// Grid values of `s₂`, plus every equality root inside the range.
    pub fn s2_values(&self) -> Vec<f64> {
        let (lo, hi, steps) = self.s2_range;
        let mut v: Vec<f64> = match steps {
            0 => Vec::new(),
            1 => vec![lo],
            n => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        };
        let f = self.fixed;
        if let Ok(roots) = solve_s2_for_optimality(f.gamma1, f.gamma2, f.s1, f.theta_tilde) {
            // Only roots that keep the figure's relative angle belong on this slice.
            v.extend(roots.iter().filter(|r| r.raw_s2 >= 1.0 && r.s2 >= lo && r.s2 <= hi).map(|r| r.s2));
        }
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        v.dedup();
        v
    }

    pub fn states(&self, s2: f64) -> Result<(GaussianParams<f64>, GaussianParams<f64>)> {
        let f = self.fixed;
        Ok((
            GaussianParams::new(f.gamma1, f.s1, 0.0, 0.0, 0.0)?,
            GaussianParams::new(f.gamma2, s2, f.theta_tilde, 0.0, 0.0)?,
        ))
    }
}

/// One `s₂` row of the surface.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureRow {
    pub s2: f64,
    pub fidelity: f64,
    /// `(φ, I_φ)` in increasing `φ`.
    pub points: Vec<(f64, f64)>,
}

impl FigureRow {
    pub fn norm_diff(&self, overlap: f64) -> f64 {
        (overlap - self.fidelity) / self.fidelity
    }

    pub fn min_norm_diff(&self) -> f64 {
        self.points.iter().map(|&(_, i)| self.norm_diff(i)).fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the surface. The `φ` grid of every row also carries the exact
/// minimizing angle so the row minimum is resolved.
pub fn figure_rows(req: &FigureRequest) -> Result<Vec<FigureRow>> {
    req.s2_values()
        .par_iter()
        .map(|&s2| {
            let (a, b) = req.states(s2)?;
            let fidelity = fidelity_same_mean(&a, &b)?.fidelity;
            let mut phis: Vec<f64> = (0..req.phi_steps).map(|k| PI * k as f64 / req.phi_steps as f64).collect();
            phis.push(minimize_overlap(&a, &b).phi);
            phis.sort_by(|x, y| x.partial_cmp(y).expect("finite angles"));
            phis.dedup();
            let points = phis.into_iter().map(|phi| (phi, overlap_at(&a, &b, phi))).collect();
            Ok(FigureRow { s2, fidelity, points })
        })
        .collect()
}

pub const CSV_HEADER: &str = "s2,phi,I_phi,F,norm_diff";

/// CSV with columns `s2, phi, I_phi, F, norm_diff`, where
/// `norm_diff = (I_φ − F)/F`.
pub fn emit_figure_data(req: &FigureRequest, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let rows = figure_rows(req)?;
    write_rows(&rows, out)?;
    Ok(())
}

fn write_rows(rows: &[FigureRow], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let (s2, f) = (fmt_f64(row.s2), fmt_f64(row.fidelity));
        for &(phi, i) in &row.points {
            writeln!(out, "{s2},{},{},{f},{}", fmt_f64(phi), fmt_f64(i), fmt_f64(row.norm_diff(i)))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(which: Figure, lo: f64, hi: f64, steps: usize) -> FigureRequest {
        FigureRequest { s2_range: (lo, hi, steps), phi_steps: 90, ..FigureRequest::new(which) }
    }

    #[test]
    fn fig2_reaches_equality_on_every_row() {
        for row in figure_rows(&small(Figure::Fig2, 1.0, 5.0, 21)).unwrap() {
            assert!(row.min_norm_diff() <= 1e-8, "{} {}", row.s2, row.min_norm_diff());
        }
    }

    #[test]
    fn fig2_s2_two_crosses_zero() {
        let row = &figure_rows(&small(Figure::Fig2, 2.0, 2.0, 1)).unwrap()[0];
        assert!(row.min_norm_diff().abs() <= 1e-8);
        assert!(row.points.iter().any(|&(_, i)| row.norm_diff(i) > 1e-3));
    }

    #[test]
    fn fig3_is_strictly_positive() {
        for row in figure_rows(&small(Figure::Fig3, 1.0, 5.0, 21)).unwrap() {
            assert!(row.min_norm_diff() > 0.0, "{}", row.s2);
        }
    }

    #[test]
    fn fig4_grid_contains_the_root() {
        let v = small(Figure::Fig4, 1.0, 5.0, 200).s2_values();
        assert_eq!(v.len(), 201);
        let root = v.iter().copied().find(|s| (s - 1.4).abs() < 1e-9).unwrap();
        let row = &figure_rows(&small(Figure::Fig4, root, root, 1)).unwrap()[0];
        assert!(row.min_norm_diff() <= 1e-8);
        let touching = row.points.iter().filter(|&&(_, i)| row.norm_diff(i) <= 1e-8).count();
        assert_eq!(touching, 1);
    }
}
