//! The six subcommands. Each returns tables; nothing here touches files.

use pairci_core::crossover::{find_crossover, CrossoverOptions};
use pairci_core::oracles::{self, KernelOccupancies};
use pairci_core::orbitals::{self, NORMALIZATION_TOLERANCE};
use pairci_core::solver::{self, OmegaChoice};
use pairci_core::{DensityField, Grid, GridWavefunction2D, ProblemSpec, SchmidtDecomposition, SpectrumResult};
use rayon::prelude::*;

use crate::config::{OracleKind, RunConfig, Spacing};
use crate::error::{CliError, Result};
use crate::output::{Cell, Output, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Residual bound checked by the solver tests, relative to `‖H‖∞`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Columns carrying the leading occupancies.
const LAMBDA_COLUMNS: usize = 3;

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| crate::output::format_float(*x)).collect::<Vec<_>>().join(" ")
}

fn metadata(cfg: &RunConfig, command: &str) -> Vec<(String, Cell)> {
    let kind = cfg.potential.kind();
    let mut m: Vec<(String, Cell)> = vec![
        ("program".into(), "pairci".into()),
        ("version".into(), VERSION.into()),
        ("command".into(), command.into()),
        ("potential".into(), kind.name().into()),
        ("a".into(), kind.shape_parameter().into()),
        ("coefficients".into(), join_floats(cfg.potential.coefficients()).into()),
    ];
    match cfg.omega {
        OmegaChoice::Optimize(s) => {
            m.push(("omega_mode".into(), "auto".into()));
            m.push(("omega_lo".into(), s.lo.into()));
            m.push(("omega_hi".into(), s.hi.into()));
            m.push(("omega_rel_tol".into(), s.rel_tol.into()));
        }
        OmegaChoice::Fixed(w) => {
            m.push(("omega_mode".into(), "fixed".into()));
            m.push(("omega_fixed".into(), w.into()));
        }
    }
    m.push(("residual_tolerance".into(), RESIDUAL_TOLERANCE.into()));
    m.push(("normalization_tolerance".into(), NORMALIZATION_TOLERANCE.into()));
    m
}

fn push_basis_meta(m: &mut Vec<(String, Cell)>, r: &SpectrumResult) {
    m.push(("K".into(), r.cutoff.into()));
    m.push(("D".into(), r.dimension.into()));
    m.push(("omega".into(), r.omega.into()));
    m.push(("trace".into(), r.trace.into()));
    m.push(("omega_iterations".into(), r.iterations.into()));
}

fn lambda_cells(occupancies: &[f64]) -> Vec<Cell> {
    (0..LAMBDA_COLUMNS).map(|l| occupancies.get(l).copied().into()).collect()
}

fn lambda_names() -> Vec<String> {
    (0..LAMBDA_COLUMNS).map(|l| format!("lambda_{l}")).collect()
}

fn problem(cfg: &RunConfig, g: f64) -> Result<ProblemSpec> {
    Ok(ProblemSpec::new(cfg.potential.clone(), g, cfg.cutoff)?)
}

fn states_for(cfg: &RunConfig) -> usize {
    cfg.n_states.min(pairci_core::hamiltonian::pair_dimension(cfg.cutoff))
}

fn spectrum_table(name: &str, meta: Vec<(String, Cell)>) -> Table {
    let mut cols = vec!["state".to_string(), "energy".into(), "residual".into()];
    cols.extend(lambda_names());
    cols.push("entropy".into());
    Table { name: name.into(), metadata: meta, columns: cols, rows: Vec::new() }
}

fn occupancy_table(meta: Vec<(String, Cell)>) -> Table {
    Table::new("occupancies", meta, &["state", "l", "k", "lambda"])
}

fn solve_ci(cfg: &RunConfig, g: f64, n: usize) -> Result<(SpectrumResult, Vec<SchmidtDecomposition>)> {
    let p = problem(cfg, g)?;
    let r = solver::solve_with(&p, n, cfg.omega)?;
    let basis = p.basis(r.omega)?;
    let d = (0..r.len()).map(|s| orbitals::schmidt(r.state(s), &basis)).collect::<pairci_core::Result<Vec<_>>>()?;
    Ok((r, d))
}

pub fn run_solve(cfg: &RunConfig) -> Result<Output> {
    let g = cfg.require_g()?;
    let (r, decomps) = solve_ci(cfg, g, states_for(cfg))?;
    let mut meta = metadata(cfg, "solve");
    meta.push(("g".into(), g.into()));
    meta.push(("n_states".into(), r.len().into()));
    push_basis_meta(&mut meta, &r);

    let mut spectrum = spectrum_table("spectrum", meta.clone());
    let mut occ = occupancy_table(meta);
    for (s, d) in decomps.iter().enumerate() {
        let mut row: Vec<Cell> = vec![s.into(), r.energies[s].into(), r.residuals[s].into()];
        row.extend(lambda_cells(&d.occupancies));
        row.push(orbitals::entanglement_entropy(d).into());
        spectrum.push(row);
        for (l, (k, lam)) in d.coefficients.iter().zip(&d.occupancies).enumerate() {
            occ.push(vec![s.into(), l.into(), (*k).into(), (*lam).into()]);
        }
    }
    Ok(Output { tables: vec![spectrum, occ], warnings: Vec::new() })
}

/// One sweep point; failures end up in the status column.
fn sweep_row(cfg: &RunConfig, g: f64, n: usize) -> Vec<Cell> {
    let d = pairci_core::hamiltonian::pair_dimension(cfg.cutoff);
    let mut row: Vec<Cell> = vec![g.into()];
    match solve_ci(cfg, g, n) {
        Ok((r, decomps)) => {
            row.extend(r.energies.iter().map(|&e| Cell::from(e)));
            row.extend(lambda_cells(&decomps[0].occupancies));
            row.push(orbitals::entanglement_entropy(&decomps[0]).into());
            row.push(r.omega.into());
            row.extend([cfg.cutoff.into(), d.into(), "ok".into()]);
        }
        Err(e) => {
            row.extend((0..n + LAMBDA_COLUMNS + 2).map(|_| Cell::Empty));
            let msg = e.to_string().replace(['\n', '\r'], " ");
            row.extend([cfg.cutoff.into(), d.into(), format!("error: {msg}").into()]);
        }
    }
    row
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Output> {
    let gs = cfg.require_g_values()?;
    let n = states_for(cfg);
    let rows: Vec<Vec<Cell>> = match cfg.workers {
        Some(1) => gs.iter().map(|&g| sweep_row(cfg, g, n)).collect(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {w} workers: {e}")))?
            .install(|| gs.par_iter().map(|&g| sweep_row(cfg, g, n)).collect()),
        None => gs.par_iter().map(|&g| sweep_row(cfg, g, n)).collect(),
    };

    let mut meta = metadata(cfg, "sweep");
    meta.push(("K".into(), cfg.cutoff.into()));
    meta.push(("D".into(), pairci_core::hamiltonian::pair_dimension(cfg.cutoff).into()));
    meta.push(("n_states".into(), n.into()));
    meta.push(("points".into(), gs.len().into()));
    let spacing = match cfg.spacing {
        Spacing::Linear => "lin",
        Spacing::Log => "log",
    };
    meta.push(("spacing".into(), spacing.into()));
    let failed = rows.iter().filter(|r| !matches!(r.last(), Some(Cell::Text(s)) if s == "ok")).count();
    meta.push(("failed".into(), failed.into()));

    let mut cols = vec!["g".to_string()];
    cols.extend((0..n).map(|s| format!("E_{s}")));
    cols.extend(lambda_names());
    cols.extend(["entropy", "omega", "K", "D", "status"].map(String::from));
    let table = Table { name: "sweep".into(), metadata: meta, columns: cols, rows };
    let warnings = if failed > 0 { vec![format!("{failed} of {} sweep points failed", gs.len())] } else { Vec::new() };
    Ok(Output { tables: vec![table], warnings })
}

pub fn run_crossover(cfg: &RunConfig) -> Result<Output> {
    let (lo, hi) = cfg.require_bracket()?;
    let p = problem(cfg, lo)?;
    let options = CrossoverOptions { threshold: cfg.threshold, rel_tol: cfg.rel_tol, omega: cfg.omega, ..Default::default() };
    let r = find_crossover(&p, lo, hi, &options)?;

    let mut meta = metadata(cfg, "crossover");
    meta.push(("K".into(), cfg.cutoff.into()));
    meta.push(("D".into(), p.pair_dimension().into()));
    meta.push(("threshold".into(), cfg.threshold.into()));
    meta.push(("rel_tol".into(), cfg.rel_tol.into()));
    meta.push(("bracket_lo".into(), lo.into()));
    meta.push(("bracket_hi".into(), hi.into()));

    let mut summary = Table::new("crossover", meta.clone(), &["g_cr", "g_lo", "g_hi", "evaluations"]);
    summary.push(vec![r.g_cr.into(), r.lo.into(), r.hi.into(), r.evaluations.len().into()]);
    let mut evals = Table::new("crossover_evaluations", meta, &["g", "gap"]);
    for &(g, gap) in &r.evaluations {
        evals.push(vec![g.into(), gap.into()]);
    }
    Ok(Output { tables: vec![summary, evals], warnings: Vec::new() })
}

fn ground(cfg: &RunConfig) -> Result<(f64, ProblemSpec, SpectrumResult)> {
    let g = cfg.require_g()?;
    let p = problem(cfg, g)?;
    let r = solver::solve_with(&p, 1, cfg.omega)?;
    Ok((g, p, r))
}

pub fn run_density(cfg: &RunConfig) -> Result<Output> {
    let (g, p, r) = ground(cfg)?;
    let basis = p.basis(r.omega)?;
    let d = orbitals::schmidt(r.state(0), &basis)?;
    let grid = match cfg.grid {
        Some(grid) => grid,
        None => orbitals::default_density_grid(&cfg.potential, r.omega)?,
    };
    let rho = orbitals::one_body_density(&d, &grid);
    let pair = orbitals::pair_density(r.state(0), &basis, &grid)?;

    let mut meta = metadata(cfg, "density");
    meta.push(("g".into(), g.into()));
    push_basis_meta(&mut meta, &r);
    push_grid_meta(&mut meta, &grid);
    let mut warnings = Vec::new();
    let mut tables = Vec::new();
    for (name, field) in [("one_body_density", &rho), ("pair_density", &pair)] {
        let mut m = meta.clone();
        m.push(("integral".into(), field.integral().into()));
        if field.coarse_warning() {
            warnings.push(format!("{name} integrates to {:.6}; the grid is too coarse or too narrow", field.integral()));
        }
        tables.push(density_table(name, m, field));
    }
    if let Ok(mass) = orbitals::same_side_mass(&pair) {
        tables[1].metadata.push(("same_side_mass".into(), mass.into()));
    }
    Ok(Output { tables, warnings })
}

fn push_grid_meta(m: &mut Vec<(String, Cell)>, grid: &Grid) {
    m.push(("grid_half_width".into(), grid.half_width().into()));
    m.push(("grid_points".into(), grid.len().into()));
}

fn density_table(name: &str, meta: Vec<(String, Cell)>, field: &DensityField) -> Table {
    match field {
        DensityField::OneBody { grid, values } => {
            let mut t = Table::new(name, meta, &["x", "value"]);
            for (i, v) in values.iter().enumerate() {
                t.push(vec![grid.x(i).into(), (*v).into()]);
            }
            t
        }
        DensityField::Pair { grid, values } => {
            let mut t = Table::new(name, meta, &["x1", "x2", "value"]);
            for a in 0..grid.len() {
                for b in 0..grid.len() {
                    t.push(vec![grid.x(a).into(), grid.x(b).into(), values[(a, b)].into()]);
                }
            }
            t
        }
    }
}

pub fn run_orbitals(cfg: &RunConfig) -> Result<Output> {
    let (g, p, r) = ground(cfg)?;
    let d = orbitals::schmidt(r.state(0), &p.basis(r.omega)?)?;
    let grid = match cfg.grid {
        Some(grid) => grid,
        None => orbitals::default_density_grid(&cfg.potential, r.omega)?,
    };
    let count = cfg.count.min(d.len());
    let mut meta = metadata(cfg, "orbitals");
    meta.push(("g".into(), g.into()));
    push_basis_meta(&mut meta, &r);
    push_grid_meta(&mut meta, &grid);
    for l in 0..count {
        meta.push((format!("k_{l}"), d.coefficients[l].into()));
        meta.push((format!("lambda_{l}"), d.occupancies[l].into()));
    }
    let mut cols = vec!["x".to_string()];
    cols.extend((0..count).map(|l| format!("v_{l}")));
    let values: Vec<Vec<f64>> = (0..count).map(|l| d.orbital_values(l, &grid)).collect();
    let mut t = Table { name: "orbitals".into(), metadata: meta, columns: cols, rows: Vec::new() };
    for i in 0..grid.len() {
        let mut row: Vec<Cell> = vec![grid.x(i).into()];
        row.extend(values.iter().map(|v| Cell::from(v[i])));
        t.push(row);
    }
    Ok(Output { tables: vec![t], warnings: Vec::new() })
}

fn kernel_rows(spectrum: &mut Table, occ: &mut Table, s: usize, energy: f64, residual: Option<f64>, k: &KernelOccupancies, count: usize) {
    let mut row: Vec<Cell> = vec![s.into(), energy.into(), residual.into()];
    row.extend(lambda_cells(&k.occupancies));
    row.push(orbitals::entropy_of(&k.occupancies).into());
    spectrum.push(row);
    for (l, (kk, lam)) in k.coefficients.iter().zip(&k.occupancies).take(count).enumerate() {
        occ.push(vec![s.into(), l.into(), (*kk).into(), (*lam).into()]);
    }
}

fn all_occupancies(psi: &GridWavefunction2D) -> Result<KernelOccupancies> {
    Ok(oracles::kernel_occupancies(psi, psi.grid.len())?)
}

pub fn run_oracle(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.oracle.ok_or_else(|| CliError::Config("oracle needs --type (tg, exact-harmonic, grid2d, grid1d)".into()))?;
    let grid = match cfg.grid {
        Some(grid) => grid,
        None => oracles::default_oracle_grid(&cfg.potential)?,
    };
    let mut meta = metadata(cfg, "oracle");
    meta.retain(|(k, _)| !k.starts_with("omega"));
    meta.push(("oracle".into(), kind.name().into()));
    push_grid_meta(&mut meta, &grid);
    let mut warnings = Vec::new();

    if kind == OracleKind::Grid1d {
        let sp = oracles::grid_single_particle(&cfg.potential, &grid, cfg.n_states)?;
        meta.push(("edge_amplitude".into(), sp.edge_amplitude.into()));
        if sp.boundary_warning() {
            warnings.push(format!("orbitals reach the grid edge (amplitude {:.3e}); widen the grid", sp.edge_amplitude));
        }
        let mut t = Table::new("levels", meta, &["n", "energy"]);
        for (n, e) in sp.energies.iter().enumerate() {
            t.push(vec![n.into(), (*e).into()]);
        }
        return Ok(Output { tables: vec![t], warnings });
    }

    let g = match kind {
        OracleKind::Tg => None,
        _ => Some(cfg.require_g()?),
    };
    meta.push(("g".into(), g.into()));
    let mut spectrum = spectrum_table("spectrum", meta.clone());
    let mut occ = occupancy_table(meta);
    match kind {
        OracleKind::Tg => {
            let sp = oracles::grid_single_particle(&cfg.potential, &grid, 2)?;
            let psi = oracles::tg_ground(&cfg.potential, &grid)?;
            let k = all_occupancies(&psi)?;
            kernel_rows(&mut spectrum, &mut occ, 0, sp.energies[0] + sp.energies[1], None, &k, cfg.count);
        }
        OracleKind::ExactHarmonic => {
            let ex = oracles::harmonic_exact_ground(&cfg.potential, g.unwrap_or(0.0), &grid, cfg.n_states)?;
            let k = all_occupancies(&ex.wavefunction)?;
            kernel_rows(&mut spectrum, &mut occ, 0, ex.energies[0], None, &k, cfg.count);
            for (s, e) in ex.energies.iter().enumerate().skip(1) {
                let mut row: Vec<Cell> = vec![s.into(), (*e).into(), Cell::Empty];
                row.extend((0..LAMBDA_COLUMNS + 1).map(|_| Cell::Empty));
                spectrum.push(row);
            }
        }
        OracleKind::Grid2d => {
            let st = oracles::grid_two_particle(&cfg.potential, g.unwrap_or(0.0), &grid, cfg.n_states)?;
            for (s, psi) in st.wavefunctions.iter().enumerate() {
                let k = all_occupancies(psi)?;
                kernel_rows(&mut spectrum, &mut occ, s, st.energies[s], Some(st.residuals[s]), &k, cfg.count);
            }
        }
        OracleKind::Grid1d => unreachable!(),
    }
    Ok(Output { tables: vec![spectrum, occ], warnings })
}
