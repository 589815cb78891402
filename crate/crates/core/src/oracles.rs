//! Brute-force grid references, independent of the oscillator basis.
//!
//! All operators use the three-point finite-difference Laplacian with
//! Dirichlet walls at `±L`, and a contact term of weight `1/h` on the
//! coincidence nodes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridWavefunction2D};
use crate::linalg::{self, Matrix, SymmetricEigen};
use crate::potentials::{PotentialSpec, TrapKind};

/// Edge amplitude above which a grid solution counts as contaminated by the
/// walls.
pub const BOUNDARY_THRESHOLD: f64 = 1e-6;

/// Eigenpairs of `−½ D₂ + V` on a grid.
#[derive(Debug, Clone)]
pub struct SingleParticleStates {
    pub grid: Grid,
    pub energies: Vec<f64>,
    /// `u_n(x_i)` on all grid nodes (zero at the walls), `h Σ u² = 1`.
    pub orbitals: Vec<Vec<f64>>,
    /// Largest `|u_n|` on the nodes next to the walls.
    pub edge_amplitude: f64,
}

impl SingleParticleStates {
    pub fn boundary_warning(&self) -> bool {
        self.edge_amplitude > BOUNDARY_THRESHOLD
    }
}

/// Lowest `n_states` levels of one particle. Even traps are split into even
/// and odd sectors so that tunnelling doublets never share a solve.
pub fn grid_single_particle(potential: &PotentialSpec, grid: &Grid, n_states: usize) -> Result<SingleParticleStates> {
    let m = grid.len();
    if m < 5 {
        return Err(Error::InvalidParameter("single-particle grid needs at least 5 points".into()));
    }
    let h = grid.spacing();
    let kin = 1.0 / (h * h);
    let diag_at = |i: usize| kin + potential.eval(grid.x(i));
    let off = -0.5 * kin;
    let interior = m - 2;
    let n_states = n_states.min(interior);

    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    if potential.is_even() {
        let c = grid.center_index();
        // even sector: nodes c..m-2, u_c scaled by 1/√2 to keep symmetry
        let de: Vec<f64> = (c..m - 1).map(diag_at).collect();
        let mut oe = vec![off; de.len() - 1];
        oe[0] = off * SQRT_2;
        let (ev, vecs) = linalg::tridiagonal_lowest(&de, &oe, n_states)?;
        for (e, w) in ev.into_iter().zip(vecs) {
            let mut u = vec![0.0; m];
            u[c] = SQRT_2 * w[0];
            for (s, &wi) in w.iter().enumerate().skip(1) {
                u[c + s] = wi;
                u[c - s] = wi;
            }
            found.push((e, u));
        }
        let d_o: Vec<f64> = (c + 1..m - 1).map(diag_at).collect();
        if !d_o.is_empty() {
            let oo = vec![off; d_o.len() - 1];
            let (ev, vecs) = linalg::tridiagonal_lowest(&d_o, &oo, n_states)?;
            for (e, w) in ev.into_iter().zip(vecs) {
                let mut u = vec![0.0; m];
                for (s, &wi) in w.iter().enumerate() {
                    u[c + 1 + s] = wi;
                    u[c - 1 - s] = -wi;
                }
                found.push((e, u));
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        found.truncate(n_states);
    } else {
        let d: Vec<f64> = (1..m - 1).map(diag_at).collect();
        let o = vec![off; d.len() - 1];
        let (ev, vecs) = linalg::tridiagonal_lowest(&d, &o, n_states)?;
        for (e, w) in ev.into_iter().zip(vecs) {
            let mut u = vec![0.0; m];
            u[1..m - 1].copy_from_slice(&w);
            found.push((e, u));
        }
    }

    let mut energies = Vec::with_capacity(found.len());
    let mut orbitals = Vec::with_capacity(found.len());
    let mut edge: f64 = 0.0;
    for (e, mut u) in found {
        let n = (h * u.iter().map(|x| x * x).sum::<f64>()).sqrt();
        u.iter_mut().for_each(|x| *x /= n);
        fix_first_sign(&mut u);
        edge = edge.max(u[1].abs()).max(u[m - 2].abs());
        energies.push(e);
        orbitals.push(u);
    }
    Ok(SingleParticleStates { grid: *grid, energies, orbitals, edge_amplitude: edge })
}

/// Positive at the first node where `|u| > 1e−6`.
fn fix_first_sign(u: &mut [f64]) {
    if let Some(&v) = u.iter().find(|v| v.abs() > 1e-6) {
        if v < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Extrapolate `E(h)` and `E(h/2)` assuming an error `∝ h^order`.
pub fn richardson(coarse: f64, fine: f64, order: i32) -> f64 {
    let f = 2f64.powi(order);
    (f * fine - coarse) / (f - 1.0)
}

/// Order of the leading grid error of the relative-coordinate oracle.
pub const RELATIVE_RICHARDSON_ORDER: i32 = 2;

/// Harmonic-trap reference from the separation into centre of mass and
/// relative motion.
#[derive(Debug, Clone)]
pub struct HarmonicExact {
    /// Lowest bosonic total energies after extrapolation.
    pub energies: Vec<f64>,
    /// Same levels at the working resolution, before extrapolation.
    pub energies_unextrapolated: Vec<f64>,
    /// Even relative levels at spacing `h_r` and `h_r/2`.
    pub relative_coarse: Vec<f64>,
    pub relative_fine: Vec<f64>,
    /// Ground state `Φ_com(R) χ_0(r)` on `grid × grid`.
    pub wavefunction: GridWavefunction2D,
}

pub fn is_harmonic(potential: &PotentialSpec) -> bool {
    potential.coefficients() == [0.0, 0.0, 0.5]
}

/// Even levels of `−½ d²/dr² + r²/2 + (g/√2) δ(r)` on `rgrid`.
fn relative_even_levels(g: f64, rgrid: &Grid, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = rgrid.len();
    let h = rgrid.spacing();
    let c = rgrid.center_index();
    let kin = 1.0 / (h * h);
    let mut d: Vec<f64> = (c..m - 1).map(|i| kin + 0.5 * rgrid.x(i) * rgrid.x(i)).collect();
    d[0] += g * FRAC_1_SQRT_2 / h;
    let mut o = vec![-0.5 * kin; d.len() - 1];
    o[0] *= SQRT_2;
    let (ev, vecs) = linalg::tridiagonal_lowest(&d, &o, count)?;
    let full = vecs
        .into_iter()
        .map(|w| {
            let mut u = vec![0.0; m];
            u[c] = SQRT_2 * w[0];
            for (s, &wi) in w.iter().enumerate().skip(1) {
                u[c + s] = wi;
                u[c - s] = wi;
            }
            u
        })
        .collect();
    Ok((ev, full))
}

/// Exact-separation oracle for the harmonic trap `V = x²/2`.
///
/// With `R = (x₁+x₂)/√2`, `r = (x₂−x₁)/√2` the centre of mass is a unit
/// oscillator and the relative motion sees `(g/√2) δ(r)`. The relative grid
/// has spacing `h/√2` and `2M−1` points, so every node `(x_a, x_b)` maps to
/// a node pair `(R, r)` and the 2D state needs no interpolation.
pub fn harmonic_exact_ground(potential: &PotentialSpec, g: f64, grid: &Grid, n_states: usize) -> Result<HarmonicExact> {
    if !is_harmonic(potential) {
        return Err(Error::Unsupported(format!(
            "exact-separation oracle needs the harmonic trap V = x^2/2, got {}",
            potential.kind().name()
        )));
    }
    if n_states == 0 {
        return Err(Error::InvalidParameter("n_states must be at least 1".into()));
    }
    let m = grid.len();
    let rgrid = Grid::new(grid.half_width() * SQRT_2, 2 * m - 1)?;
    let fine = rgrid.refined();
    let (coarse_levels, coarse_vecs) = relative_even_levels(g, &rgrid, n_states)?;
    let (fine_levels, _) = relative_even_levels(g, &fine, n_states)?;

    // total = (n + 1/2) + e_rel; bosons need even relative states
    let combine = |rel: &[f64]| {
        let mut all = Vec::new();
        for n in 0..n_states {
            for &e in rel {
                all.push(n as f64 + 0.5 + e);
            }
        }
        all.sort_by(f64::total_cmp);
        all.truncate(n_states);
        all
    };
    let extrapolated: Vec<f64> = coarse_levels
        .iter()
        .zip(&fine_levels)
        .map(|(&c, &f)| richardson(c, f, RELATIVE_RICHARDSON_ORDER))
        .collect();
    let chi = &coarse_vecs[0];
    let com = |idx: usize| {
        let r = rgrid.x(idx);
        PI.powf(-0.25) * (-0.5 * r * r).exp()
    };
    let values = Matrix::from_fn(m, m, |a, b| com(a + b) * chi[b + m - 1 - a]);
    let mut wavefunction = GridWavefunction2D::new(*grid, values)?;
    wavefunction.normalize();
    Ok(HarmonicExact {
        energies: combine(&extrapolated),
        energies_unextrapolated: combine(&coarse_levels),
        relative_coarse: coarse_levels,
        relative_fine: fine_levels,
        wavefunction,
    })
}

/// Tonks–Girardeau ground state `|u₀(x_a)u₁(x_b) − u₁(x_a)u₀(x_b)|/√2`.
pub fn tg_ground(potential: &PotentialSpec, grid: &Grid) -> Result<GridWavefunction2D> {
    let sp = grid_single_particle(potential, grid, 2)?;
    let (u0, u1) = (&sp.orbitals[0], &sp.orbitals[1]);
    let m = grid.len();
    let values = Matrix::from_fn(m, m, |a, b| FRAC_1_SQRT_2 * (u0[a] * u1[b] - u1[a] * u0[b]).abs());
    let mut psi = GridWavefunction2D::new(*grid, values)?;
    psi.normalize();
    Ok(psi)
}

/// Occupancies from the discretized kernel equation.
#[derive(Debug, Clone)]
pub struct KernelOccupancies {
    /// `λ = k²`, descending.
    pub occupancies: Vec<f64>,
    /// Signed `k`, in the same order.
    pub coefficients: Vec<f64>,
    /// Sum of all `λ` (before truncation to `n`).
    pub total: f64,
}

/// Eigenvalues `k` of `h Φ`, where `Φ_ab = φ(x_a, x_b)`; `λ = k²`.
pub fn kernel_occupancies(psi: &GridWavefunction2D, n: usize) -> Result<KernelOccupancies> {
    let norm = psi.norm_squared();
    if (norm - 1.0).abs() > 1e-3 {
        return Err(Error::Input(format!("kernel needs a normalized wavefunction, h^2 sum phi^2 = {norm}")));
    }
    let h = psi.grid.spacing();
    let m = psi.grid.len();
    let kernel = Matrix::from_fn(m, m, |a, b| 0.5 * h * (psi.values[(a, b)] + psi.values[(b, a)]));
    let ks = linalg::symmetric_eigenvalues(&kernel)?;
    let mut pairs: Vec<(f64, f64)> = ks.iter().map(|&k| (k * k, k)).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.total_cmp(&x.1)));
    let total = pairs.iter().map(|p| p.0).sum();
    pairs.truncate(n);
    Ok(KernelOccupancies {
        occupancies: pairs.iter().map(|p| p.0).collect(),
        coefficients: pairs.iter().map(|p| p.1).collect(),
        total,
    })
}

/// Bosonic eigenstates of the full 2D grid operator.
#[derive(Debug, Clone)]
pub struct TwoParticleStates {
    pub energies: Vec<f64>,
    pub wavefunctions: Vec<GridWavefunction2D>,
    /// `‖H x − E x‖₂` per state, in the flattened grid norm.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Convergence target for [`grid_two_particle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DavidsonOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_subspace: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        DavidsonOptions { tolerance: 1e-8, max_iterations: 400, max_subspace: 48 }
    }
}

/// Interior operator `H = h₁ ⊗ 1 + 1 ⊗ h₁ + (g/h) Σ_a |aa⟩⟨aa|` acting on
/// `n × n` arrays.
struct GridOperator {
    n: usize,
    diag: Vec<f64>,
    off: f64,
    contact: f64,
}

impl GridOperator {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let i = a * n + b;
                let mut s = (self.diag[a] + self.diag[b]) * x[i];
                if a > 0 {
                    s += self.off * x[i - n];
                }
                if a + 1 < n {
                    s += self.off * x[i + n];
                }
                if b > 0 {
                    s += self.off * x[i - 1];
                }
                if b + 1 < n {
                    s += self.off * x[i + 1];
                }
                if a == b {
                    s += self.contact * x[i];
                }
                y[i] = s;
            }
        }
    }
}

/// Which symmetry sector a Davidson run is confined to.
#[derive(Debug, Clone, Copy)]
struct Sector {
    /// `Some(±1)` imposes `x(−x_a, −x_b) = ±x(x_a, x_b)`.
    inversion: Option<f64>,
}

impl Sector {
    fn project(&self, n: usize, x: &mut [f64]) {
        for a in 0..n {
            for b in a + 1..n {
                let s = 0.5 * (x[a * n + b] + x[b * n + a]);
                x[a * n + b] = s;
                x[b * n + a] = s;
            }
        }
        if let Some(p) = self.inversion {
            let len = n * n;
            for i in 0..len / 2 + 1 {
                let j = len - 1 - i;
                if i > j {
                    break;
                }
                if i == j {
                    if p < 0.0 {
                        x[i] = 0.0;
                    }
                    continue;
                }
                let s = 0.5 * (x[i] + p * x[j]);
                x[i] = s;
                x[j] = p * s;
            }
        }
    }
}

/// `(H₀ − σ)⁻¹` through the eigenvectors of the 1D operator.
struct Preconditioner {
    n: usize,
    /// Row `k` holds the 1D eigenvector `k`.
    vectors: Matrix,
    values: Vec<f64>,
    shift: f64,
}

impl Preconditioner {
    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let n = self.n;
        let rm = Matrix::from_row_major(n, n, r.to_vec());
        let ut = self.vectors.transpose();
        let mut y = self.vectors.matmul(&rm).matmul(&ut);
        for a in 0..n {
            for b in 0..n {
                y[(a, b)] /= self.values[a] + self.values[b] - self.shift;
            }
        }
        ut.matmul(&y).matmul(&self.vectors).as_slice().to_vec()
    }
}

/// Lowest swap-symmetric eigenpairs of the discretized two-particle
/// Hamiltonian, by block Davidson with the noninteracting operator as
/// preconditioner.
pub fn grid_two_particle(potential: &PotentialSpec, g: f64, grid: &Grid, n_states: usize) -> Result<TwoParticleStates> {
    grid_two_particle_with(potential, g, grid, n_states, &DavidsonOptions::default())
}

pub fn grid_two_particle_with(
    potential: &PotentialSpec,
    g: f64,
    grid: &Grid,
    n_states: usize,
    options: &DavidsonOptions,
) -> Result<TwoParticleStates> {
    let m = grid.len();
    if m < 5 {
        return Err(Error::InvalidParameter("two-particle grid needs at least 5 points".into()));
    }
    if n_states == 0 {
        return Err(Error::InvalidParameter("n_states must be at least 1".into()));
    }
    let n = m - 2;
    let h = grid.spacing();
    let kin = 1.0 / (h * h);
    let diag: Vec<f64> = (1..m - 1).map(|i| kin + potential.eval(grid.x(i))).collect();
    let op = GridOperator { n, diag: diag.clone(), off: -0.5 * kin, contact: g / h };
    let one = linalg::tridiagonal_eigen(&diag, &vec![-0.5 * kin; n - 1])?;

    // The bosonic ground state is nodeless, hence even under inversion; the
    // odd sector only matters for excited states.
    let sectors: Vec<Sector> = if potential.is_even() {
        if n_states == 1 {
            vec![Sector { inversion: Some(1.0) }]
        } else {
            vec![Sector { inversion: Some(1.0) }, Sector { inversion: Some(-1.0) }]
        }
    } else {
        vec![Sector { inversion: None }]
    };

    let mut found: Vec<(f64, Vec<f64>, f64)> = Vec::new();
    let mut iterations = 0;
    for sector in sectors {
        let (vals, vecs, res, it) = davidson(&op, &one, sector, n_states, options)?;
        iterations += it;
        for ((e, v), r) in vals.into_iter().zip(vecs).zip(res) {
            found.push((e, v, r));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found.truncate(n_states);

    let mut energies = Vec::new();
    let mut wavefunctions = Vec::new();
    let mut residuals = Vec::new();
    for (e, v, r) in found {
        let mut values = Matrix::zeros(m, m);
        for a in 0..n {
            for b in 0..n {
                values[(a + 1, b + 1)] = v[a * n + b];
            }
        }
        let mut psi = GridWavefunction2D::new(*grid, values)?;
        psi.normalize();
        let slice = psi.values.as_slice();
        let big = slice.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if big < 0.0 {
            psi.values.scale(-1.0);
        }
        energies.push(e);
        wavefunctions.push(psi);
        residuals.push(r);
    }
    Ok(TwoParticleStates { energies, wavefunctions, residuals, iterations })
}

type DavidsonOutput = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, usize);

fn davidson(
    op: &GridOperator,
    one: &SymmetricEigen,
    sector: Sector,
    want: usize,
    options: &DavidsonOptions,
) -> Result<DavidsonOutput> {
    let n = op.n;
    let len = n * n;
    let block = (want + 2).min(len);
    let pre = Preconditioner {
        n,
        vectors: one.vectors.clone(),
        values: one.values.clone(),
        shift: 2.0 * one.values[0] - 1.0,
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let push = |mut v: Vec<f64>, basis: &mut Vec<Vec<f64>>, images: &mut Vec<Vec<f64>>| -> bool {
        sector.project(n, &mut v);
        for _ in 0..2 {
            for b in basis.iter() {
                let p = linalg::dot(b, &v);
                linalg::axpy(-p, b, &mut v);
            }
        }
        let nv = linalg::norm(&v);
        if nv.is_nan() || nv <= 1e-10 {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let mut w = vec![0.0; len];
        op.apply(&v, &mut w);
        basis.push(v);
        images.push(w);
        true
    };

    // symmetrized products of low 1D states as the starting block
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    let low = (2 * block + 2).min(n);
    for i in 0..low {
        for j in i..low {
            pairs.push((one.values[i] + one.values[j], i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for &(_, i, j) in &pairs {
        if basis.len() >= block {
            break;
        }
        let (ui, uj) = (one.vector(i), one.vector(j));
        let mut v = vec![0.0; len];
        for a in 0..n {
            for b in 0..n {
                v[a * n + b] = ui[a] * uj[b] + uj[a] * ui[b];
            }
        }
        push(v, &mut basis, &mut images);
    }
    if basis.is_empty() {
        return Err(Error::Numerical("no starting vectors survive the symmetry projection".into()));
    }

    let mut last_residuals = Vec::new();
    for iter in 0..options.max_iterations {
        let k = basis.len();
        let small = Matrix::from_fn(k, k, |i, j| {
            0.5 * (linalg::dot(&basis[i], &images[j]) + linalg::dot(&basis[j], &images[i]))
        });
        let eig = SymmetricEigen::new(&small)?;
        let take = block.min(k);
        let mut ritz = Vec::with_capacity(take);
        let mut ritz_images = Vec::with_capacity(take);
        let mut residuals = Vec::with_capacity(take);
        for s in 0..take {
            let c = eig.vector(s);
            let mut x = vec![0.0; len];
            let mut ax = vec![0.0; len];
            for (i, &ci) in c.iter().enumerate() {
                linalg::axpy(ci, &basis[i], &mut x);
                linalg::axpy(ci, &images[i], &mut ax);
            }
            let theta = eig.values[s];
            let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
            residuals.push(r);
            ritz.push(x);
            ritz_images.push(ax);
        }
        let norms: Vec<f64> = residuals.iter().map(|r| linalg::norm(r)).collect();
        let wanted = want.min(take);
        if norms[..wanted].iter().all(|&r| r <= options.tolerance) {
            return Ok((eig.values[..wanted].to_vec(), ritz[..wanted].to_vec(), norms[..wanted].to_vec(), iter));
        }
        last_residuals = norms.clone();

        if k + take > options.max_subspace {
            basis = Vec::new();
            images = Vec::new();
            for (x, ax) in ritz.iter().zip(&ritz_images) {
                // already orthonormal up to rounding; re-project to be safe
                let mut v = x.clone();
                for b in basis.iter() {
                    let p = linalg::dot(b, &v);
                    linalg::axpy(-p, b, &mut v);
                }
                let nv = linalg::norm(&v);
                v.iter_mut().for_each(|t| *t /= nv);
                let mut w = ax.clone();
                w.iter_mut().for_each(|t| *t /= nv);
                basis.push(v);
                images.push(w);
            }
        }
        let mut added = 0;
        for (s, r) in residuals.into_iter().enumerate() {
            if norms[s] <= options.tolerance {
                continue;
            }
            let t = pre.apply(&r);
            if push(t, &mut basis, &mut images) {
                added += 1;
            }
        }
        if added == 0 {
            break;
        }
    }
    Err(Error::Numerical(format!(
        "Davidson did not converge in {} iterations; residuals {:?}",
        options.max_iterations, last_residuals
    )))
}

/// Trapezoid one-body density `ρ(x) = ∫ |φ(x, y)|² dy` of a grid state.
pub fn grid_one_body_density(psi: &GridWavefunction2D) -> Vec<f64> {
    let m = psi.grid.len();
    (0..m)
        .map(|a| {
            let row: Vec<f64> = psi.values.row(a).iter().map(|v| v * v).collect();
            psi.grid.integrate(&row)
        })
        .collect()
}

/// Default grid for the oracles on a named trap, wide enough for the
/// outermost well.
pub fn default_oracle_grid(potential: &PotentialSpec) -> Result<Grid> {
    match potential.kind() {
        TrapKind::Harmonic => Grid::new(8.0, 801),
        _ => Grid::new(potential.outermost_minimum() + 6.0, 301),
    }
}
