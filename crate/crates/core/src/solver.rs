//! Optimized Rayleigh–Ritz: choose `Ω` so that the trace of the truncated
//! Hamiltonian is stationary, then diagonalize.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hamiltonian::{self, HamiltonianParts, ProblemSpec};
use crate::linalg::{Matrix, SymmetricEigen};
use crate::optimize;

/// Bracket and tolerance for the `Ω` search. The search runs in `ln Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSearchConfig {
    pub lo: f64,
    pub hi: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Coarse log-spaced samples taken before refinement.
    pub scan_points: usize,
}

impl Default for OmegaSearchConfig {
    fn default() -> Self {
        OmegaSearchConfig { lo: 1e-3, hi: 1e3, rel_tol: 1e-8, max_iter: 200, scan_points: 61 }
    }
}

impl OmegaSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Omega bracket must satisfy 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidParameter("Omega tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaOptimum {
    pub omega: f64,
    /// Trace of the truncated Hamiltonian at `omega`.
    pub trace: f64,
    pub iterations: usize,
}

/// Stationary point of `Tr [H]_{D×D}` in `Ω`, located as the interior
/// minimum over the bracket.
pub fn optimize_omega(problem: &ProblemSpec, config: &OmegaSearchConfig) -> Result<OmegaOptimum> {
    config.validate()?;
    let objective = |ln_omega: f64| hamiltonian::trace_of_truncation(problem, ln_omega.exp());
    let (m, _) = optimize::scan_then_minimize(
        objective,
        config.lo.ln(),
        config.hi.ln(),
        config.scan_points,
        0.0,
        config.rel_tol,
        config.max_iter,
    )
    .map_err(|e| match e {
        Error::Bracket { samples, .. } => Error::Bracket {
            lo: config.lo,
            hi: config.hi,
            samples: samples.into_iter().map(|(x, t)| (x.exp(), t)).collect(),
        },
        other => other,
    })?;
    Ok(OmegaOptimum { omega: m.x.exp(), trace: m.value, iterations: m.iterations })
}

/// How `Ω` is chosen for a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaChoice {
    Optimize(OmegaSearchConfig),
    Fixed(f64),
}

impl Default for OmegaChoice {
    fn default() -> Self {
        OmegaChoice::Optimize(OmegaSearchConfig::default())
    }
}

/// Lowest eigenpairs of the truncated Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub omega: f64,
    pub cutoff: usize,
    pub dimension: usize,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Unit eigenvectors in the pair basis (length `D`).
    pub pair_vectors: Vec<Vec<f64>>,
    /// `a^{(s)}_ij`, symmetric `K × K`, one per state.
    pub coefficients: Vec<Matrix>,
    /// `‖H v − E v‖_∞ / ‖H‖_∞` per state.
    pub residuals: Vec<f64>,
    /// Iterations spent in the `Ω` search (0 for a fixed `Ω`).
    pub iterations: usize,
    /// `Tr [H]_{D×D}` at `omega`.
    pub trace: f64,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn state(&self, s: usize) -> &Matrix {
        &self.coefficients[s]
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Dense diagonalization at fixed `Ω`. For traps without odd powers the
/// Hamiltonian splits into blocks of even and odd `i + j`, which are
/// diagonalized separately.
pub fn diagonalize(problem: &ProblemSpec, omega: f64, n_states: usize) -> Result<SpectrumResult> {
    let parts = HamiltonianParts::new(problem, omega)?;
    let d = parts.pairs.len();
    if n_states == 0 || n_states > d {
        return Err(Error::InvalidParameter(format!("n_states must be in 1..={d}, got {n_states}")));
    }
    let blocks: Vec<Vec<usize>> = if problem.potential.is_even() {
        parts.pairs.parity_blocks().into_iter().filter(|b| !b.is_empty()).collect()
    } else {
        alloc::vec![(0..d).collect()]
    };

    struct Candidate {
        energy: f64,
        block: usize,
        local: usize,
    }
    let mut solved = Vec::with_capacity(blocks.len());
    let mut candidates = Vec::new();
    let mut h_norm = 0.0f64;
    for (bi, idx) in blocks.iter().enumerate() {
        let h = parts.block(idx);
        h_norm = h_norm.max(h.norm_inf());
        let eig = SymmetricEigen::new(&h).map_err(|e| {
            Error::Numerical(format!(
                "eigensolver failed on block {bi} of size {} (Omega = {omega}, ||H||_inf = {}): {e}",
                idx.len(),
                h.norm_inf()
            ))
        })?;
        for (local, &energy) in eig.values.iter().enumerate().take(n_states) {
            candidates.push(Candidate { energy, block: bi, local });
        }
        solved.push((h, eig));
    }
    candidates.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.block.cmp(&b.block)).then(a.local.cmp(&b.local)));
    candidates.truncate(n_states);

    let k = problem.cutoff;
    let mut energies = Vec::with_capacity(n_states);
    let mut pair_vectors = Vec::with_capacity(n_states);
    let mut coefficients = Vec::with_capacity(n_states);
    let mut residuals = Vec::with_capacity(n_states);
    for c in &candidates {
        let (h, eig) = &solved[c.block];
        let local = eig.vector(c.local);
        let hv = h.matvec(local);
        let res = hv.iter().zip(local).map(|(a, v)| (a - c.energy * v).abs()).fold(0.0, f64::max);
        residuals.push(res / h_norm.max(f64::MIN_POSITIVE));

        let mut full = alloc::vec![0.0; d];
        for (&gi, &v) in blocks[c.block].iter().zip(local) {
            full[gi] = v;
        }
        fix_sign(&mut full);
        let mut a = Matrix::zeros(k, k);
        for (idx, &v) in full.iter().enumerate() {
            let (i, j) = parts.pairs.pair(idx);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        energies.push(c.energy);
        pair_vectors.push(full);
        coefficients.push(a);
    }
    let trace = hamiltonian::trace_of_truncation(problem, omega)?;
    Ok(SpectrumResult {
        omega,
        cutoff: k,
        dimension: d,
        energies,
        pair_vectors,
        coefficients,
        residuals,
        iterations: 0,
        trace,
    })
}

/// Make the largest-magnitude component positive (first one on ties).
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Optimize `Ω`, then diagonalize.
pub fn solve(problem: &ProblemSpec, n_states: usize, config: &OmegaSearchConfig) -> Result<SpectrumResult> {
    solve_with(problem, n_states, OmegaChoice::Optimize(*config))
}

pub fn solve_with(problem: &ProblemSpec, n_states: usize, choice: OmegaChoice) -> Result<SpectrumResult> {
    match choice {
        OmegaChoice::Optimize(config) => {
            let opt = optimize_omega(problem, &config)?;
            let mut result = diagonalize(problem, opt.omega, n_states)?;
            result.iterations = opt.iterations;
            Ok(result)
        }
        OmegaChoice::Fixed(omega) => diagonalize(problem, omega, n_states),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PotentialSpec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn harmonic_noninteracting_optimum_is_trap_frequency() {
        for k in [1, 3, 8, 15] {
            let p = ProblemSpec::new(PotentialSpec::harmonic(), 0.0, k).unwrap();
            let opt = optimize_omega(&p, &OmegaSearchConfig::default()).unwrap();
            assert_abs_diff_eq!(opt.omega, 1.0, epsilon = 1e-6);
            if k == 1 {
                assert_abs_diff_eq!(opt.trace, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn narrow_bracket_without_minimum_is_an_error() {
        let p = ProblemSpec::new(PotentialSpec::harmonic(), 0.0, 4).unwrap();
        let cfg = OmegaSearchConfig { lo: 2.0, hi: 50.0, ..Default::default() };
        match optimize_omega(&p, &cfg) {
            Err(Error::Bracket { samples, .. }) => {
                assert!(!samples.is_empty());
                assert!((samples[0].0 - 2.0).abs() < 1e-12);
            }
            other => panic!("expected bracket error, got {other:?}"),
        }
        let bad = OmegaSearchConfig { lo: 3.0, hi: 1.0, ..Default::default() };
        assert!(matches!(optimize_omega(&p, &bad), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn harmonic_noninteracting_spectrum() {
        let p = ProblemSpec::new(PotentialSpec::harmonic(), 0.0, 5).unwrap();
        let r = diagonalize(&p, 1.0, 6).unwrap();
        let expect = [1.0, 2.0, 3.0, 3.0, 4.0, 4.0];
        for (e, x) in r.energies.iter().zip(expect) {
            assert_abs_diff_eq!(*e, x, epsilon = 1e-12);
        }
        let a = r.state(0);
        assert_abs_diff_eq!(a[(0, 0)], 1.0, epsilon = 1e-12);
        let rest: f64 = a.as_slice().iter().map(|x| x * x).sum::<f64>() - a[(0, 0)] * a[(0, 0)];
        assert!(rest < 1e-24);
    }

    #[test]
    fn residuals_and_normalization() {
        let p = ProblemSpec::new(PotentialSpec::triple_well(0.1).unwrap(), 1.0, 12).unwrap();
        let r = solve(&p, 5, &OmegaSearchConfig::default()).unwrap();
        assert!(r.energies.windows(2).all(|w| w[0] <= w[1]));
        for s in 0..5 {
            assert!(r.residuals[s] <= 1e-9, "residual {}", r.residuals[s]);
            let n: f64 = r.pair_vectors[s].iter().map(|x| x * x).sum();
            assert_abs_diff_eq!(n, 1.0, epsilon = 1e-12);
        }
        assert!(r.iterations > 0);
    }

    #[test]
    fn asymmetric_trap_uses_single_block() {
        let v = PotentialSpec::from_coefficients(alloc::vec![0.0, 0.3, 0.5, 0.0, 0.02]).unwrap();
        let p = ProblemSpec::new(v, 0.5, 8).unwrap();
        let r = diagonalize(&p, 1.0, 3).unwrap();
        let h = hamiltonian::assemble(&p, 1.0).unwrap();
        let all = crate::linalg::symmetric_eigenvalues(&h).unwrap();
        for (e, exact) in r.energies.iter().zip(&all) {
            assert_abs_diff_eq!(*e, *exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_state_count() {
        let p = ProblemSpec::new(PotentialSpec::harmonic(), 0.0, 2).unwrap();
        assert!(diagonalize(&p, 1.0, 0).is_err());
        assert!(diagonalize(&p, 1.0, 4).is_err());
    }
}
