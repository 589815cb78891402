//! Harmonic-oscillator basis of adjustable frequency `Ω`:
//!
//! ```text
//! φ_i(x) = (√Ω / (√π 2^i i!))^{1/2} H_i(√Ω x) exp(−Ω x² / 2)
//! ```
//!
//! together with Gauss–Hermite quadrature and exact one-body matrix
//! elements of the kinetic energy and of polynomial potentials.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::potentials::PotentialSpec;

/// Highest polynomial degree accepted by [`potential_matrix`].
pub const MAX_POTENTIAL_DEGREE: usize = 32;

/// One-particle basis `φ_0 … φ_{K−1}` of frequency `Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSet {
    omega: f64,
    size: usize,
}

impl BasisSet {
    pub fn new(omega: f64, size: usize) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("basis frequency must be positive, got {omega}")));
        }
        if size == 0 {
            return Err(Error::InvalidParameter("basis size must be at least 1".into()));
        }
        Ok(BasisSet { omega, size })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Oscillator length `Ω^{−1/2}`.
    pub fn length(&self) -> f64 {
        1.0 / self.omega.sqrt()
    }

    /// `φ_0(x) … φ_{K−1}(x)`.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        let mut out = hermite_functions(self.size, self.omega.sqrt() * x);
        let scale = self.omega.sqrt().sqrt();
        out.iter_mut().for_each(|v| *v *= scale);
        out
    }

    /// Default quadrature order for this basis.
    pub fn default_quadrature_order(&self) -> usize {
        2 * self.size + 2
    }
}

/// Physicists' Hermite polynomials `H_0(t) … H_{n_max}(t)`.
pub fn hermite_values(n_max: usize, t: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(1.0);
    if n_max >= 1 {
        h.push(2.0 * t);
    }
    for n in 1..n_max {
        let next = 2.0 * t * h[n] - 2.0 * n as f64 * h[n - 1];
        h.push(next);
    }
    h
}

/// Normalized Hermite functions `ψ_n(y) = (2^n n! √π)^{−1/2} H_n(y) e^{−y²/2}`
/// for `n < count`, by the three-term recurrence of the normalized
/// functions. No factorials or raw `H_n` are formed, so nothing overflows.
pub fn hermite_functions(count: usize, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * y * y).exp());
    if count > 1 {
        out.push(core::f64::consts::SQRT_2 * y * out[0]);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * y * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// `φ_i^Ω(x)`.
pub fn ho_eval(basis: &BasisSet, i: usize, x: f64) -> f64 {
    assert!(i < basis.size(), "basis index {i} out of range for size {}", basis.size());
    hermite_functions(i + 1, basis.omega().sqrt() * x)[i] * basis.omega().sqrt().sqrt()
}

/// Reference evaluation of `φ_i` with the normalization factor built from
/// `ln i!`; agrees with [`ho_eval`] wherever `H_i` does not overflow.
pub fn ho_eval_log_normalized(basis: &BasisSet, i: usize, x: f64) -> f64 {
    let omega = basis.omega();
    let t = omega.sqrt() * x;
    let h = hermite_values(i, t)[i];
    let ln_fact: f64 = (1..=i).map(|k| (k as f64).ln()).sum();
    let ln_norm = 0.5 * (0.5 * omega.ln() - 0.5 * PI.ln() - i as f64 * core::f64::consts::LN_2 - ln_fact);
    h * (ln_norm - 0.5 * omega * x * x).exp()
}

/// Gauss–Hermite rule for the weight `exp(−t²)`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `w_m · exp(t_m²)`; finite and O(1) even where `w_m` underflows.
    pub scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f(t) e^{−t²} dt`
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// `M`-point Gauss–Hermite rule (Golub–Welsch).
///
/// Nodes are the eigenvalues of the Jacobi matrix (zero diagonal,
/// off-diagonal `√(k/2)`), polished by one Newton step on `ψ_M`. Weights
/// come from the Christoffel function `1 / Σ_{n<M} p_n(t)²`, which keeps
/// full relative accuracy in the far tails.
pub fn gauss_hermite(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidParameter("quadrature order must be at least 1".into()));
    }
    let diag = vec![0.0; m];
    let off: Vec<f64> = (1..m).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut nodes = if m == 1 { vec![0.0] } else { linalg::tridiagonal_eigenvalues(&diag, &off)? };

    for t in nodes.iter_mut() {
        for _ in 0..2 {
            let psi = hermite_functions(m + 1, *t);
            let deriv = (2.0 * m as f64).sqrt() * psi[m - 1] - *t * psi[m];
            if deriv != 0.0 {
                *t -= psi[m] / deriv;
            }
        }
    }
    // exact symmetry
    for q in 0..m / 2 {
        let s = 0.5 * (nodes[m - 1 - q] - nodes[q]);
        nodes[q] = -s;
        nodes[m - 1 - q] = s;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }

    let scaled_weights: Vec<f64> = nodes
        .iter()
        .map(|&t| 1.0 / hermite_functions(m, t).iter().map(|p| p * p).sum::<f64>())
        .collect();
    let weights = nodes.iter().zip(&scaled_weights).map(|(&t, &w)| w * (-t * t).exp()).collect();
    Ok(QuadratureRule { nodes, weights, scaled_weights })
}

/// Kinetic energy `−½ d²/dx²` in the basis: tridiagonal in steps of two.
pub fn kinetic_matrix(basis: &BasisSet) -> Matrix {
    let k = basis.size();
    let q = basis.omega() / 4.0;
    let mut t = Matrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = q * (2 * i + 1) as f64;
        if i + 2 < k {
            let v = -q * (((i + 1) * (i + 2)) as f64).sqrt();
            t[(i, i + 2)] = v;
            t[(i + 2, i)] = v;
        }
    }
    t
}

/// Position operator `x` in an `n`-function basis of frequency `Ω`.
pub fn position_matrix(omega: f64, n: usize) -> Matrix {
    let mut x = Matrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        let v = ((i + 1) as f64 / (2.0 * omega)).sqrt();
        x[(i, i + 1)] = v;
        x[(i + 1, i)] = v;
    }
    x
}

/// Exact `⟨φ_i|V|φ_j⟩`.
///
/// `x^k` only couples indices `k` apart, so forming `Σ c_k X^k` in a basis
/// padded by the degree `p` and truncating back to `K × K` gives the exact
/// matrix elements.
pub fn potential_matrix(basis: &BasisSet, potential: &PotentialSpec) -> Result<Matrix> {
    let p = potential.degree();
    if p > MAX_POTENTIAL_DEGREE {
        return Err(Error::Configuration(format!(
            "potential degree {p} exceeds the supported maximum {MAX_POTENTIAL_DEGREE}"
        )));
    }
    let n = basis.size() + p;
    let x = position_matrix(basis.omega(), n);
    let coeffs = potential.coefficients();
    // Horner: V = (((c_p X + c_{p−1}) X + …) X + c_0)
    let mut acc = Matrix::zeros(n, n);
    for (step, &c) in coeffs.iter().rev().enumerate() {
        if step > 0 {
            acc = banded_product(&acc, &x);
        }
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    let mut v = acc.truncated(basis.size());
    symmetrize(&mut v);
    Ok(v)
}

/// `A · X` for tridiagonal `X`.
fn banded_product(a: &Matrix, x: &Matrix) -> Matrix {
    let n = a.rows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = a[(i, j)] * x[(j, j)];
            if j > 0 {
                s += a[(i, j - 1)] * x[(j - 1, j)];
            }
            if j + 1 < n {
                s += a[(i, j + 1)] * x[(j + 1, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

fn symmetrize(m: &mut Matrix) {
    let n = m.rows();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// One-body Hamiltonian `T + V` in the basis.
pub fn one_body_matrix(basis: &BasisSet, potential: &PotentialSpec) -> Result<Matrix> {
    let mut h = potential_matrix(basis, potential)?;
    h.add_scaled(1.0, &kinetic_matrix(basis));
    Ok(h)
}

/// Basis functions at the nodes of `rule` for the substitution
/// `t = √(scale·Ω) x`; row `q` holds `φ_0(x_q) … φ_{K−1}(x_q)`.
pub fn basis_at_nodes(basis: &BasisSet, rule: &QuadratureRule, scale: f64) -> Matrix {
    let k = basis.size();
    let denom = (scale * basis.omega()).sqrt();
    let mut out = Matrix::zeros(rule.len(), k);
    for (q, &t) in rule.nodes.iter().enumerate() {
        out.row_mut(q).copy_from_slice(&basis.eval_all(t / denom));
    }
    out
}

/// Gram matrix `∫ φ_i φ_j dx` by quadrature with `m` nodes.
pub fn overlap_by_quadrature(basis: &BasisSet, m: usize) -> Result<Matrix> {
    let rule = gauss_hermite(m)?;
    let phi = basis_at_nodes(basis, &rule, 1.0);
    let k = basis.size();
    let jac = 1.0 / basis.omega().sqrt();
    Ok(Matrix::from_fn(k, k, |i, j| {
        (0..rule.len())
            .map(|q| rule.scaled_weights[q] * phi[(q, i)] * phi[(q, j)])
            .sum::<f64>()
            * jac
    }))
}
