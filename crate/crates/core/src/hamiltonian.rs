//! Symmetrized two-boson pair basis and the truncated Hamiltonian
//!
//! ```text
//! H = −½∂₁² − ½∂₂² + V(x₁) + V(x₂) + g δ(x₂ − x₁)
//! ```
//!
//! in the basis `ψ_ij = b_ij [φ_i(x₁)φ_j(x₂) + φ_j(x₁)φ_i(x₂)]`, `i ≤ j < K`,
//! with `b_ii = 1/2` and `b_ij = 1/√2` otherwise.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ho_basis::{self, BasisSet};
use crate::linalg::Matrix;
use crate::potentials::PotentialSpec;

/// Above this cutoff the interaction tensor is evaluated on demand.
pub const PACKED_TENSOR_MAX_CUTOFF: usize = 80;

/// Physical problem: trap, contact strength and one-particle cutoff `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub potential: PotentialSpec,
    pub g: f64,
    pub cutoff: usize,
}

impl ProblemSpec {
    pub fn new(potential: PotentialSpec, g: f64, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidParameter("cutoff K must be at least 1".into()));
        }
        if !g.is_finite() {
            return Err(Error::InvalidParameter(format!("interaction strength must be finite, got {g}")));
        }
        Ok(ProblemSpec { potential, g, cutoff })
    }

    pub fn with_g(&self, g: f64) -> Self {
        ProblemSpec { g, ..self.clone() }
    }

    pub fn pair_dimension(&self) -> usize {
        pair_dimension(self.cutoff)
    }

    pub fn basis(&self, omega: f64) -> Result<BasisSet> {
        BasisSet::new(omega, self.cutoff)
    }
}

pub fn pair_dimension(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Symmetrization constant `b_ij`.
#[inline]
pub fn symmetrization(i: usize, j: usize) -> f64 {
    if i == j {
        0.5
    } else {
        core::f64::consts::FRAC_1_SQRT_2
    }
}

/// Pairs `(i, j)`, `0 ≤ i ≤ j < K`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairBasis {
    cutoff: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairBasis {
    pub fn new(cutoff: usize) -> Self {
        let mut pairs = Vec::with_capacity(pair_dimension(cutoff));
        for i in 0..cutoff {
            for j in i..cutoff {
                pairs.push((i, j));
            }
        }
        PairBasis { cutoff, pairs }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        self.pairs[index]
    }

    /// Linear index of the unordered pair `{i, j}`.
    pub fn pair_index(&self, i: usize, j: usize) -> Result<usize> {
        let k = self.cutoff;
        if i >= k || j >= k {
            return Err(Error::IndexOutOfRange { i, j, k });
        }
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        Ok(i * k - i * i.saturating_sub(1) / 2 + (j - i))
    }

    /// Indices of pairs with `i + j` even (`[0]`) and odd (`[1]`).
    pub fn parity_blocks(&self) -> [Vec<usize>; 2] {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for (idx, &(i, j)) in self.pairs.iter().enumerate() {
            if (i + j) % 2 == 0 {
                even.push(idx);
            } else {
                odd.push(idx);
            }
        }
        [even, odd]
    }
}

/// Contact-interaction integrals `W_ijmn = ∫ φ_i φ_j φ_m φ_n dx`.
#[derive(Debug, Clone)]
pub struct InteractionTensor {
    basis: BasisSet,
    storage: TensorStorage,
}

#[derive(Debug, Clone)]
enum TensorStorage {
    /// One value per sorted index quadruple.
    Packed(Vec<f64>),
    /// Basis values at the quadrature nodes, `phi[k][q]`, pre-multiplied by
    /// the fourth root of the scaled weight so a product of four factors
    /// carries exactly one weight.
    OnTheFly { phi: Vec<Vec<f64>> },
}

/// How to hold the interaction tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TensorMode {
    /// Packed up to [`PACKED_TENSOR_MAX_CUTOFF`], on demand beyond.
    #[default]
    Auto,
    Packed,
    OnTheFly,
}

impl InteractionTensor {
    pub fn new(basis: &BasisSet) -> Result<Self> {
        Self::with_options(basis, basis.default_quadrature_order(), TensorMode::Auto)
    }

    /// The quartic product carries `exp(−2Ωx²)`; with `t = √(2Ω) x` the rest
    /// is a polynomial of degree `4(K−1)`, integrated exactly by `M ≥ 2K+1`
    /// Gauss–Hermite nodes.
    pub fn with_options(basis: &BasisSet, order: usize, mode: TensorMode) -> Result<Self> {
        let k = basis.size();
        if order < 2 * k + 1 {
            return Err(Error::Configuration(format!(
                "interaction quadrature needs at least {} nodes for K = {k}, got {order}",
                2 * k + 1
            )));
        }
        let rule = ho_basis::gauss_hermite(order)?;
        let nodes = ho_basis::basis_at_nodes(basis, &rule, 2.0);
        let jac = 1.0 / (2.0 * basis.omega()).sqrt();
        let weight_root: Vec<f64> = rule.scaled_weights.iter().map(|w| (w * jac).sqrt().sqrt()).collect();
        let phi: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..rule.len()).map(|q| nodes[(q, i)] * weight_root[q]).collect())
            .collect();
        let packed = match mode {
            TensorMode::Packed => true,
            TensorMode::OnTheFly => false,
            TensorMode::Auto => k <= PACKED_TENSOR_MAX_CUTOFF,
        };
        let storage = if packed {
            TensorStorage::Packed(pack(&phi))
        } else {
            TensorStorage::OnTheFly { phi }
        };
        Ok(InteractionTensor { basis: *basis, storage })
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn is_packed(&self) -> bool {
        matches!(self.storage, TensorStorage::Packed(_))
    }

    /// `W_ijmn`, any index order.
    pub fn get(&self, i: usize, j: usize, m: usize, n: usize) -> f64 {
        if (i + j + m + n) % 2 == 1 {
            return 0.0;
        }
        match &self.storage {
            TensorStorage::Packed(values) => {
                let s = sort4([i, j, m, n]);
                values[packed_index(s)]
            }
            TensorStorage::OnTheFly { phi } => quartic(&phi[i], &phi[j], &phi[m], &phi[n]),
        }
    }
}

fn quartic(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    a.iter().zip(b).zip(c).zip(d).map(|(((a, b), c), d)| a * b * c * d).sum()
}

#[inline]
fn sort4(mut s: [usize; 4]) -> [usize; 4] {
    // five-comparator sorting network
    if s[0] > s[1] {
        s.swap(0, 1);
    }
    if s[2] > s[3] {
        s.swap(2, 3);
    }
    if s[0] > s[2] {
        s.swap(0, 2);
    }
    if s[1] > s[3] {
        s.swap(1, 3);
    }
    if s[1] > s[2] {
        s.swap(1, 2);
    }
    s
}

#[inline]
fn binomial_small(n: usize, k: usize) -> usize {
    match k {
        1 => n,
        2 => n * n.saturating_sub(1) / 2,
        3 => n * n.saturating_sub(1) * n.saturating_sub(2) / 6,
        4 => n * n.saturating_sub(1) * n.saturating_sub(2) * n.saturating_sub(3) / 24,
        _ => unreachable!(),
    }
}

/// Combinatorial index of a sorted quadruple `a ≤ b ≤ c ≤ d`.
#[inline]
fn packed_index([a, b, c, d]: [usize; 4]) -> usize {
    binomial_small(d + 3, 4) + binomial_small(c + 2, 3) + binomial_small(b + 1, 2) + a
}

fn pack(phi: &[Vec<f64>]) -> Vec<f64> {
    let k = phi.len();
    let mut values = alloc::vec![0.0; binomial_small(k + 3, 4)];
    let nq = phi.first().map_or(0, Vec::len);
    let mut cd = alloc::vec![0.0; nq];
    for d in 0..k {
        for c in 0..=d {
            for (q, x) in cd.iter_mut().enumerate() {
                *x = phi[c][q] * phi[d][q];
            }
            for b in 0..=c {
                for a in ((b + c + d) % 2..=b).step_by(2) {
                    let v: f64 = cd.iter().zip(&phi[a]).zip(&phi[b]).map(|((x, y), z)| x * y * z).sum();
                    values[packed_index([a, b, c, d])] = v;
                }
            }
        }
    }
    values
}

/// One-body matrix, pair basis and interaction tensor at a fixed `Ω`.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    pub basis: BasisSet,
    pub pairs: PairBasis,
    /// `T + V` in the one-particle basis.
    pub one_body: Matrix,
    pub tensor: InteractionTensor,
    pub g: f64,
}

impl HamiltonianParts {
    pub fn new(problem: &ProblemSpec, omega: f64) -> Result<Self> {
        Self::with_mode(problem, omega, TensorMode::Auto)
    }

    pub fn with_mode(problem: &ProblemSpec, omega: f64, mode: TensorMode) -> Result<Self> {
        let basis = problem.basis(omega)?;
        let one_body = ho_basis::one_body_matrix(&basis, &problem.potential)?;
        let tensor = InteractionTensor::with_options(&basis, basis.default_quadrature_order(), mode)?;
        Ok(HamiltonianParts { basis, pairs: PairBasis::new(problem.cutoff), one_body, tensor, g: problem.g })
    }

    /// Non-interacting part of `⟨ψ_nm|H|ψ_ij⟩`.
    #[inline]
    pub fn one_body_element(&self, (n, m): (usize, usize), (i, j): (usize, usize)) -> f64 {
        let h = &self.one_body;
        let mut s = 0.0;
        if m == j {
            s += h[(n, i)];
        }
        if m == i {
            s += h[(n, j)];
        }
        if n == j {
            s += h[(m, i)];
        }
        if n == i {
            s += h[(m, j)];
        }
        2.0 * symmetrization(n, m) * symmetrization(i, j) * s
    }

    /// `⟨ψ_nm|δ(x₂ − x₁)|ψ_ij⟩ = 4 b_nm b_ij W_nmij`.
    #[inline]
    pub fn contact_element(&self, (n, m): (usize, usize), (i, j): (usize, usize)) -> f64 {
        4.0 * symmetrization(n, m) * symmetrization(i, j) * self.tensor.get(n, m, i, j)
    }

    #[inline]
    pub fn element(&self, a: (usize, usize), b: (usize, usize)) -> f64 {
        let mut v = self.one_body_element(a, b);
        if self.g != 0.0 {
            v += self.g * self.contact_element(a, b);
        }
        v
    }

    /// Hamiltonian restricted to the listed pair indices (upper triangle
    /// computed, lower mirrored, so the result is exactly symmetric).
    pub fn block(&self, indices: &[usize]) -> Matrix {
        self.block_with(indices, |a, b| self.element(a, b))
    }

    /// Contact operator `⟨ψ|δ|ψ'⟩` on the listed pairs.
    pub fn contact_block(&self, indices: &[usize]) -> Matrix {
        self.block_with(indices, |a, b| self.contact_element(a, b))
    }

    fn block_with(&self, indices: &[usize], f: impl Fn((usize, usize), (usize, usize)) -> f64) -> Matrix {
        let d = indices.len();
        let mut h = Matrix::zeros(d, d);
        for r in 0..d {
            let a = self.pairs.pair(indices[r]);
            for c in r..d {
                let v = f(a, self.pairs.pair(indices[c]));
                h[(r, c)] = v;
                h[(c, r)] = v;
            }
        }
        h
    }

    pub fn full(&self) -> Matrix {
        let all: Vec<usize> = (0..self.pairs.len()).collect();
        self.block(&all)
    }
}

/// Truncated `D × D` Hamiltonian at frequency `Ω`.
pub fn assemble(problem: &ProblemSpec, omega: f64) -> Result<Matrix> {
    Ok(HamiltonianParts::new(problem, omega)?.full())
}

/// `Tr [H]_{D×D}` from the diagonal elements alone, `O(K² M)` work.
pub fn trace_of_truncation(problem: &ProblemSpec, omega: f64) -> Result<f64> {
    let basis = problem.basis(omega)?;
    let k = basis.size();
    let h = ho_basis::one_body_matrix(&basis, &problem.potential)?;
    let diag = h.diagonal();
    // Each h_ii appears in the K pairs containing i, and twice in (i, i).
    let one_body: f64 = diag.iter().map(|d| (k + 1) as f64 * d).sum();
    if problem.g == 0.0 {
        return Ok(one_body);
    }
    let order = basis.default_quadrature_order();
    let rule = ho_basis::gauss_hermite(order)?;
    let nodes = ho_basis::basis_at_nodes(&basis, &rule, 2.0);
    let jac = 1.0 / (2.0 * omega).sqrt();
    // sq[i][q] = φ_i(x_q)²
    let sq: Vec<Vec<f64>> = (0..k).map(|i| (0..rule.len()).map(|q| nodes[(q, i)] * nodes[(q, i)]).collect()).collect();
    let weights: Vec<f64> = rule.scaled_weights.iter().map(|w| w * jac).collect();
    let mut contact = 0.0;
    for i in 0..k {
        let wi: Vec<f64> = sq[i].iter().zip(&weights).map(|(a, w)| a * w).collect();
        for (j, sj) in sq.iter().enumerate().skip(i) {
            let w_iijj: f64 = wi.iter().zip(sj).map(|(a, b)| a * b).sum();
            // 4 b² = 1 on the diagonal, 2 off it
            contact += if i == j { w_iijj } else { 2.0 * w_iijj };
        }
    }
    Ok(one_body + problem.g * contact)
}
