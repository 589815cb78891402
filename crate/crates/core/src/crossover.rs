//! Locate the interaction strength where the two leading occupancies of the
//! ground state meet.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hamiltonian::ProblemSpec;
use crate::optimize;
use crate::orbitals;
use crate::solver::{self, OmegaChoice};

pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverOptions {
    pub threshold: f64,
    /// Bisection stops once `(hi − lo) ≤ rel_tol · hi`.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub omega: OmegaChoice,
}

impl Default for CrossoverOptions {
    fn default() -> Self {
        CrossoverOptions { threshold: DEFAULT_THRESHOLD, rel_tol: 1e-4, max_iter: 100, omega: OmegaChoice::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverResult {
    pub g_cr: f64,
    /// Final bracket `[lo, hi]` around `g_cr`.
    pub lo: f64,
    pub hi: f64,
    /// Every `(g, λ₀ − λ₁)` evaluated, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

/// `λ₀ − λ₁` of the ground state.
pub fn ground_gap(problem: &ProblemSpec, omega: OmegaChoice) -> Result<f64> {
    let result = solver::solve_with(problem, 1, omega)?;
    let basis = problem.basis(result.omega)?;
    let d = orbitals::schmidt(result.state(0), &basis)?;
    let l1 = d.occupancies.get(1).copied().unwrap_or(0.0);
    Ok(d.occupancies[0] - l1)
}

/// Bisection on `λ₀(g) − λ₁(g) = threshold` over `[g_lo, g_hi]`; the
/// split is geometric when the bracket is positive.
pub fn find_crossover(problem: &ProblemSpec, g_lo: f64, g_hi: f64, options: &CrossoverOptions) -> Result<CrossoverResult> {
    if g_lo.partial_cmp(&g_hi) != Some(core::cmp::Ordering::Less) || !g_lo.is_finite() || !g_hi.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("crossover bracket must satisfy lo < hi, got [{g_lo}, {g_hi}]")));
    }
    let mut evaluations = Vec::new();
    let geometric = g_lo > 0.0;
    let f = |g: f64| -> Result<f64> {
        let gap = ground_gap(&problem.with_g(g), options.omega)?;
        evaluations.push((g, gap));
        Ok(gap - options.threshold)
    };
    let mid = move |a: f64, b: f64| if geometric { (a * b).sqrt() } else { 0.5 * (a + b) };
    let (g_cr, lo, hi) = optimize::bisect(f, g_lo, g_hi, mid, options.rel_tol, options.max_iter).map_err(|e| match e {
        Error::Bracket { lo, hi, samples } => Error::Bracket {
            lo,
            hi,
            samples: samples.into_iter().map(|(g, v)| (g, v + options.threshold)).collect(),
        },
        other => other,
    })?;
    Ok(CrossoverResult { g_cr, lo, hi, evaluations })
}
