use serde::Serialize;

use super::config::{Source, TartanModeChoice};
use super::run::Sink;
use crate::classical::{chaos_game, push_measure_n, ChaosGameOptions, ClassicalIFS, EmpiricalMeasure, PhaseSpace};
use crate::error::{Error, Result};
use crate::io::{columns_csv, HusimiGrid};
use crate::linalg::pearson;
use crate::qstate::DensityMatrix;
use crate::torus::{excluded_mass, husimi_torus, tartan_invariant, TartanChannel, TartanMode, TartanOptions};

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    /// Hilbert-space dimension of the quantum side, if it has one.
    pub dim: Option<usize>,
    /// `Σ |a − b|` over cells of the two normalized grids.
    pub l1: f64,
    /// Pearson correlation of the position (row) marginals.
    pub profile_pearson: f64,
    pub classical_excluded: f64,
    pub quantum_excluded: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub resolution: usize,
    pub rows: Vec<CompareRow>,
    /// Whether the quantum excluded mass strictly decreases along `rows`.
    pub excluded_decreasing: bool,
}

/// Normalize a grid to unit total mass.
pub fn normalized(mut grid: HusimiGrid) -> HusimiGrid {
    let total: f64 = grid.values.iter().sum();
    if total > 0.0 {
        grid.values.iter_mut().for_each(|v| *v /= total);
    }
    grid
}

fn square_grid(values: Vec<f64>, m: usize, meta: serde_json::Value) -> HusimiGrid {
    HusimiGrid {
        rows: m,
        cols: m,
        row_label: "q".into(),
        row_range: (0.0, 1.0),
        col_label: "p".into(),
        col_range: (0.0, 1.0),
        values,
        meta,
    }
}

fn measure_grid(mu: &EmpiricalMeasure) -> HusimiGrid {
    square_grid(mu.normalized(), mu.resolution(), serde_json::json!({ "source": "classical" }))
}

fn check_square(ifs: &ClassicalIFS) -> Result<()> {
    if ifs.space() != PhaseSpace::Square {
        return Err(Error::Invalid("phase-space comparisons need a classical IFS on the unit square".into()));
    }
    Ok(())
}

fn needs_dim(s: &Source) -> bool {
    matches!(s, Source::Tartan { .. } | Source::MaximallyMixed)
}

/// Normalized mass grid of `source` at resolution `m`, dimension `dim` where relevant.
pub fn source_grid(source: &Source, m: usize, dim: Option<usize>, seed: u64) -> Result<HusimiGrid> {
    let need = || dim.ok_or_else(|| Error::Invalid("quantum sources need a list of dimensions".into()));
    Ok(match source {
        Source::ChaosGame { ifs, samples, burn_in } => {
            check_square(ifs)?;
            let opts = ChaosGameOptions { burn_in: *burn_in, resolution: m, streams: 1, keep_trajectory: 0 };
            let x0 = ifs.space().from_unit_coords([0.5, 0.5]);
            measure_grid(&chaos_game(ifs, &x0, *samples, seed, &opts)?.measure)
        }
        Source::Markov { ifs, steps } => {
            check_square(ifs)?;
            measure_grid(&push_measure_n(ifs, &EmpiricalMeasure::uniform(ifs.space(), m), *steps)?)
        }
        Source::Tartan { mode } => {
            let mode = match mode {
                TartanModeChoice::NonlinearNormalized => TartanMode::NonlinearNormalized,
                _ => TartanMode::LinearSpectral,
            };
            let inv = tartan_invariant(&TartanChannel::with_dim(need()?)?, mode, &TartanOptions::default())?;
            normalized(husimi_torus(&inv.state, m)?)
        }
        Source::MaximallyMixed => normalized(husimi_torus(&DensityMatrix::maximally_mixed(need()?), m)?),
        Source::TorusState { state } => normalized(husimi_torus(&state.density(seed)?, m)?),
    })
}

fn row_marginal(g: &HusimiGrid) -> Vec<f64> {
    (0..g.rows).map(|r| (0..g.cols).map(|k| g.get(r, k)).sum()).collect()
}

pub fn compare_grids(dim: Option<usize>, a: &HusimiGrid, b: &HusimiGrid) -> Result<CompareRow> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::Invalid("grids differ in shape".into()));
    }
    Ok(CompareRow {
        dim,
        l1: a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum(),
        profile_pearson: pearson(&row_marginal(a), &row_marginal(b)),
        classical_excluded: excluded_mass(a),
        quantum_excluded: excluded_mass(b),
    })
}

/// Compare two sources on an `m × m` grid, once per dimension in `dims`
/// when either side needs one.
pub(crate) fn compare_sources(
    classical: &Source,
    quantum: &Source,
    m: usize,
    dims: &[usize],
    seed: u64,
    sink: &mut Sink,
) -> Result<CompareReport> {
    let per_dim: Vec<Option<usize>> = if needs_dim(classical) || needs_dim(quantum) {
        if dims.is_empty() {
            return Err(Error::Invalid("quantum sources need a list of dimensions".into()));
        }
        dims.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let fixed_classical = if needs_dim(classical) { None } else { Some(source_grid(classical, m, None, seed)?) };
    if let Some(g) = &fixed_classical {
        sink.grid("classical", g)?;
    }
    let mut rows = Vec::with_capacity(per_dim.len());
    for dim in per_dim {
        let tag = dim.map_or(String::new(), |n| format!("-{n}"));
        let a = match &fixed_classical {
            Some(g) => g.clone(),
            None => {
                let g = source_grid(classical, m, dim, seed)?;
                sink.grid(&format!("classical{tag}"), &g)?;
                g
            }
        };
        let b = source_grid(quantum, m, dim, seed)?;
        sink.grid(&format!("quantum{tag}"), &b)?;
        rows.push(compare_grids(dim, &a, &b)?);
    }
    let col = |f: fn(&CompareRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let dims_col = rows.iter().map(|r| r.dim.map_or(f64::NAN, |n| n as f64)).collect();
    sink.csv(
        "compare.csv",
        columns_csv(
            &["dim", "l1", "profile_pearson", "classical_excluded", "quantum_excluded"],
            &[dims_col, col(|r| r.l1), col(|r| r.profile_pearson), col(|r| r.classical_excluded), col(|r| r.quantum_excluded)],
        )?,
    )?;
    let excluded_decreasing = rows.windows(2).all(|w| w[1].quantum_excluded < w[0].quantum_excluded);
    Ok(CompareReport { resolution: m, rows, excluded_decreasing })
}
