//! Natural orbitals and occupancies of a two-boson CI state, densities and
//! entanglement entropy.
//!
//! With `A_mm = a_mm` and `A_mn = a_mn/√2` the CI wavefunction is
//! `φ(x₁, x₂) = Σ_mn A_mn φ_m(x₁) φ_n(x₂)`. Diagonalizing `A` gives the
//! Schmidt form `φ = Σ_l k_l v_l(x₁) v_l(x₂)` with `v_l = Σ_n p_n^{(l)} φ_n`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{DensityField, Grid, GridWavefunction2D};
use crate::ho_basis::BasisSet;
use crate::linalg::{Matrix, SymmetricEigen};
use crate::potentials::PotentialSpec;

/// Tolerance on `Σ_{i≤j} a_ij² = 1` for CI input.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Amplitude threshold used to fix the global sign of each orbital.
pub const SIGN_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Signed `k_l`, in the order of `occupancies`.
    pub coefficients: Vec<f64>,
    /// `λ_l = k_l²`, descending.
    pub occupancies: Vec<f64>,
    /// Unit vectors `p^{(l)}` over the oscillator basis.
    pub orbitals: Vec<Vec<f64>>,
    pub basis: BasisSet,
}

/// `A` from the symmetric CI coefficient matrix `a_ij`.
pub fn a_matrix(state: &Matrix) -> Result<Matrix> {
    let k = state.rows();
    if !state.is_square() || k == 0 {
        return Err(Error::Input(format!("coefficient matrix must be square, got {}x{}", state.rows(), state.cols())));
    }
    let asym = state.asymmetry();
    if asym > 1e-12 {
        return Err(Error::Input(format!("coefficient matrix is not symmetric (max |a_ij - a_ji| = {asym:e})")));
    }
    let mut norm = 0.0;
    for i in 0..k {
        for j in i..k {
            norm += state[(i, j)] * state[(i, j)];
        }
    }
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Input(format!("CI state is not normalized: sum a_ij^2 = {norm}")));
    }
    Ok(Matrix::from_fn(k, k, |m, n| if m == n { state[(m, m)] } else { FRAC_1_SQRT_2 * state[(m, n)] }))
}

/// Eigen-decomposition of `A`.
pub fn schmidt(state: &Matrix, basis: &BasisSet) -> Result<SchmidtDecomposition> {
    if state.rows() != basis.size() {
        return Err(Error::Input(format!(
            "coefficient matrix has size {} but the basis has {} functions",
            state.rows(),
            basis.size()
        )));
    }
    let a = a_matrix(state)?;
    let eig = SymmetricEigen::new(&a)?;
    let mut order: Vec<usize> = (0..eig.values.len()).collect();
    // occupancies equal to ~12 digits count as tied
    let key = |l: usize| ((eig.values[l] * eig.values[l]) * 1e12).round() as i64;
    order.sort_by(|&x, &y| {
        key(y).cmp(&key(x)).then(eig.values[y].total_cmp(&eig.values[x])).then(x.cmp(&y))
    });
    let sign_grid = sign_grid(basis);
    let mut coefficients = Vec::with_capacity(order.len());
    let mut occupancies = Vec::with_capacity(order.len());
    let mut orbitals = Vec::with_capacity(order.len());
    for &l in &order {
        let k = eig.values[l];
        let mut p = eig.vector(l).to_vec();
        if let Some(v) = sign_grid.iter().map(|phi| dot(&p, phi)).find(|v| v.abs() > SIGN_THRESHOLD) {
            if v < 0.0 {
                p.iter_mut().for_each(|c| *c = -*c);
            }
        }
        coefficients.push(k);
        occupancies.push(k * k);
        orbitals.push(p);
    }
    Ok(SchmidtDecomposition { coefficients, occupancies, orbitals, basis: *basis })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Basis samples on a fixed grid reaching past the classical turning point
/// of the highest basis function, used only to pick orbital signs.
fn sign_grid(basis: &BasisSet) -> Vec<Vec<f64>> {
    let half = ((2 * basis.size() + 1) as f64).sqrt() + 8.0;
    let grid = Grid::new(half * basis.length(), 2001).expect("positive width and odd count");
    grid.points().iter().map(|&x| basis.eval_all(x)).collect()
}

impl SchmidtDecomposition {
    pub fn len(&self) -> usize {
        self.occupancies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancies.is_empty()
    }

    pub fn omega(&self) -> f64 {
        self.basis.omega()
    }

    pub fn cutoff(&self) -> usize {
        self.basis.size()
    }

    pub fn occupancy_sum(&self) -> f64 {
        self.occupancies.iter().sum()
    }

    /// Largest `|p^{(l)}·p^{(m)} − δ_lm|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (l, pl) in self.orbitals.iter().enumerate() {
            for (m, pm) in self.orbitals.iter().enumerate().skip(l) {
                let target = if l == m { 1.0 } else { 0.0 };
                worst = worst.max((dot(pl, pm) - target).abs());
            }
        }
        worst
    }

    /// `v_l` sampled on `grid`.
    pub fn orbital_values(&self, l: usize, grid: &Grid) -> Vec<f64> {
        grid.points().iter().map(|&x| orbital_eval(self, l, x)).collect()
    }
}

/// `v_l(x) = Σ_n p_n^{(l)} φ_n(x)`.
pub fn orbital_eval(decomp: &SchmidtDecomposition, l: usize, x: f64) -> f64 {
    dot(&decomp.orbitals[l], &decomp.basis.eval_all(x))
}

/// `v_l(x)` for all `l` at once.
pub fn orbitals_at(decomp: &SchmidtDecomposition, x: f64) -> Vec<f64> {
    let phi = decomp.basis.eval_all(x);
    decomp.orbitals.iter().map(|p| dot(p, &phi)).collect()
}

/// `ρ(x, x) = Σ_l λ_l v_l(x)²`, normalized to one particle.
pub fn one_body_density(decomp: &SchmidtDecomposition, grid: &Grid) -> DensityField {
    let values = grid
        .points()
        .iter()
        .map(|&x| {
            orbitals_at(decomp, x).iter().zip(&decomp.occupancies).map(|(v, lam)| lam * v * v).sum()
        })
        .collect();
    DensityField::OneBody { grid: *grid, values }
}

/// Full one-body density matrix `ρ(x, x′)` on `grid × grid`.
pub fn one_body_density_matrix(decomp: &SchmidtDecomposition, grid: &Grid) -> Matrix {
    let v: Vec<Vec<f64>> = grid.points().iter().map(|&x| orbitals_at(decomp, x)).collect();
    let m = grid.len();
    Matrix::from_fn(m, m, |a, b| {
        v[a].iter().zip(&v[b]).zip(&decomp.occupancies).map(|((x, y), lam)| lam * x * y).sum()
    })
}

/// `φ(x₁, x₂) = Σ_ij a_ij ψ_ij(x₁, x₂)` on `grid × grid`.
pub fn reconstruct(state: &Matrix, basis: &BasisSet, grid: &Grid) -> Result<GridWavefunction2D> {
    let a = a_matrix(state)?;
    let phi = basis_on_grid(basis, grid);
    // (Φ A Φᵀ)_{ab} with Φ_{a m} = φ_m(x_a)
    let raw = phi.matmul(&a).matmul(&phi.transpose());
    // averaging makes the swap symmetry exact despite rounding order
    let values = Matrix::from_fn(raw.rows(), raw.cols(), |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    GridWavefunction2D::new(*grid, values)
}

/// `Φ_{a m} = φ_m(x_a)`.
pub fn basis_on_grid(basis: &BasisSet, grid: &Grid) -> Matrix {
    let m = grid.len();
    let k = basis.size();
    let mut out = Matrix::zeros(m, k);
    for a in 0..m {
        out.row_mut(a).copy_from_slice(&basis.eval_all(grid.x(a)));
    }
    out
}

/// `φ(x₁, x₂)` evaluated directly from the CI expansion.
pub fn ci_amplitude(state: &Matrix, basis: &BasisSet, x1: f64, x2: f64) -> f64 {
    let p1 = basis.eval_all(x1);
    let p2 = basis.eval_all(x2);
    let k = basis.size();
    let mut sum = 0.0;
    for i in 0..k {
        for j in i..k {
            let b = crate::hamiltonian::symmetrization(i, j);
            sum += state[(i, j)] * b * (p1[i] * p2[j] + p1[j] * p2[i]);
        }
    }
    sum
}

/// `Σ_l k_l v_l(x₁) v_l(x₂)`.
pub fn schmidt_amplitude(decomp: &SchmidtDecomposition, x1: f64, x2: f64) -> f64 {
    let v1 = orbitals_at(decomp, x1);
    let v2 = orbitals_at(decomp, x2);
    v1.iter().zip(&v2).zip(&decomp.coefficients).map(|((a, b), k)| k * a * b).sum()
}

/// `|φ(x₁, x₂)|²` on `grid × grid`.
pub fn pair_density(state: &Matrix, basis: &BasisSet, grid: &Grid) -> Result<DensityField> {
    Ok(reconstruct(state, basis, grid)?.density())
}

/// `S = −Σ λ ln λ`.
pub fn entanglement_entropy(decomp: &SchmidtDecomposition) -> f64 {
    entropy_of(&decomp.occupancies)
}

pub fn entropy_of(occupancies: &[f64]) -> f64 {
    occupancies.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum()
}

/// `x ∈ [−L, L]`, `L = 4 (x_outer + Ω^{−1/2})`, 401 points.
pub fn default_density_grid(potential: &PotentialSpec, omega: f64) -> Result<Grid> {
    Grid::new(4.0 * (potential.outermost_minimum() + 1.0 / omega.sqrt()), 401)
}

/// Trapezoid mass of a pair density where both particles sit on the same
/// side of `x = 0` (quadrants `x₁x₂ > 0`). Samples on the axes count half.
pub fn same_side_mass(field: &DensityField) -> Result<f64> {
    let DensityField::Pair { grid, values } = field else {
        return Err(Error::Input("same-side mass needs a pair density".into()));
    };
    let m = grid.len();
    let h = grid.spacing();
    let c = grid.center_index();
    let weight = |i: usize| if i == 0 || i == m - 1 { 0.5 * h } else { h };
    let side = |i: usize| (i as isize - c as isize).signum();
    let mut mass = 0.0;
    for a in 0..m {
        for b in 0..m {
            let same = match side(a) * side(b) {
                1 => 1.0,
                -1 => 0.0,
                _ => 0.5,
            };
            mass += weight(a) * weight(b) * same * values[(a, b)];
        }
    }
    Ok(mass)
}

/// Occupancies of the noninteracting product state `φ_0(x₁)φ_0(x₂)`.
pub fn product_state(k: usize) -> Matrix {
    let mut a = Matrix::zeros(k, k);
    a[(0, 0)] = 1.0;
    a
}

/// Check for definite parity of each orbital on `grid`; returns the largest
/// `||v_l(x)| − |v_l(−x)||`.
pub fn parity_defect(decomp: &SchmidtDecomposition, grid: &Grid) -> f64 {
    let m = grid.len();
    let values: Vec<Vec<f64>> = grid.points().iter().map(|&x| orbitals_at(decomp, x)).collect();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for (u, w) in values[a].iter().zip(&values[m - 1 - a]) {
            worst = worst.max((u.abs() - w.abs()).abs());
        }
    }
    worst
}
