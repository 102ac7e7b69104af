use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::compare::compare_sources;
use super::config::{point, Experiment, ExperimentConfig, Format, InitialMeasure, InvariantMethod, StateSpec, SystemSpec};
use crate::classical::{
    box_counting_dimension, chaos_game, push_density, push_measure, ChaosGameOptions, ClassicalIFS, DensityGrid,
    EmpiricalMeasure,
};
use crate::error::{Error, Result};
use crate::invariant::{fixed_states_of, power_iteration, uniqueness_verdict, EIGENVALUE_TOL};
use crate::io::{columns_csv, measure_csv, write_json, write_pgm, HusimiGrid};
use crate::linalg::{linear_fit, max_abs, pearson};
use crate::qstate::{trace_distance, DensityMatrix, MatrixJson, PureState};
use crate::quantum::{mixed_barycenter, mixed_trajectory, pure_barycenter, pure_trajectory, BuiltQifs, DensityMap, PureQIFS};
use crate::spin::{husimi_sphere, latitude_probabilities, latitude_rotations, sphere_integral, Spin};
use crate::torus::{
    cantor_profile, excluded_mass, husimi_torus, matched_cantor_level, position_profile, tartan_invariant, TartanChannel,
    TartanOptions,
};

pub const TOOL: &str = "qifs";
pub const MANIFEST: &str = "manifest.json";

/// Trajectory points kept for the chaos-game CSV.
const KEPT_POINTS: usize = 1000;

/// Distances below this are left out of logarithmic fits.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub seed: u64,
    pub artifacts: Vec<String>,
    pub duration_seconds: f64,
    pub results: Value,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST))?)?)
    }
}

/// Artifact writer that honours the requested formats.
pub(crate) struct Sink<'a> {
    dir: &'a Path,
    cfg: &'a ExperimentConfig,
    hash: String,
    files: Vec<String>,
}

impl<'a> Sink<'a> {
    fn new(dir: &'a Path, cfg: &'a ExperimentConfig) -> Self {
        Self { dir, cfg, hash: cfg.hash(), files: vec![] }
    }

    fn wants(&self, f: Format) -> bool {
        self.cfg.output.wants(f)
    }

    pub(crate) fn csv(&mut self, name: &str, text: String) -> Result<()> {
        if self.wants(Format::Csv) {
            fs::write(self.dir.join(name), text)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub(crate) fn pgm(&mut self, stem: &str, values: &[f64], rows: usize, cols: usize) -> Result<()> {
        if self.wants(Format::Pgm) {
            let o = &self.cfg.output;
            self.files.extend(write_pgm(self.dir, stem, values, rows, cols, o.pgm_depth, o.pgm_encoding, &self.hash)?);
        }
        Ok(())
    }

    pub(crate) fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.wants(Format::Json) {
            write_json(&self.dir.join(name), value)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub(crate) fn grid(&mut self, stem: &str, grid: &HusimiGrid) -> Result<()> {
        self.csv(&format!("{stem}.csv"), grid.to_csv()?)?;
        self.pgm(stem, &grid.values, grid.rows, grid.cols)?;
        self.json(&format!("{stem}.json"), grid)
    }

    fn measure(&mut self, stem: &str, mu: &EmpiricalMeasure) -> Result<()> {
        self.csv(&format!("{stem}.csv"), measure_csv(mu)?)?;
        let (rows, cols) = mu.grid_shape();
        self.pgm(stem, &mu.normalized(), rows, cols)
    }
}

/// Run `cfg`, writing artifacts and `manifest.json` into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let mut sink = Sink::new(out, cfg);
    let results = execute(cfg, &mut sink)?;
    let mut artifacts = sink.files;
    artifacts.push(MANIFEST.to_string());
    let manifest = RunManifest {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        artifacts,
        duration_seconds: start.elapsed().as_secs_f64(),
        results,
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Output directory: explicit override, else the config's `out`, else
/// `runs/<name or kind>`, all below `root` when relative.
pub fn resolve_out(cfg: &ExperimentConfig, explicit: Option<&Path>, root: Option<&Path>) -> PathBuf {
    let rel = explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| Path::new("runs").join(cfg.name.clone().unwrap_or_else(|| cfg.experiment.kind().to_string())));
    match root {
        Some(r) if rel.is_relative() => r.join(rel),
        _ => rel,
    }
}

fn execute(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<Value> {
    let seed = cfg.seed;
    match &cfg.experiment {
        Experiment::ChaosGame { ifs, samples, resolution, start, burn_in, streams, dimension_scales } => {
            let opts = ChaosGameOptions {
                burn_in: *burn_in,
                resolution: *resolution,
                streams: *streams,
                keep_trajectory: KEPT_POINTS,
            };
            let res = chaos_game(ifs, &point(ifs, start)?, *samples, seed, &opts)?;
            sink.measure("histogram", &res.measure)?;
            let coords: Vec<Vec<f64>> = res.trajectory.iter().map(|p| p.coords()).collect();
            let axes = coords.first().map_or(0, Vec::len);
            let names = ["x", "y", "z"];
            let columns: Vec<Vec<f64>> = (0..axes).map(|a| coords.iter().map(|c| c[a]).collect()).collect();
            sink.csv("trajectory.csv", columns_csv(&names[..axes], &columns)?)?;
            let dimension = if dimension_scales.is_empty() {
                Value::Null
            } else {
                let est = box_counting_dimension(&res.measure, dimension_scales)?;
                sink.csv("box-counts.csv", box_counts_csv(&est.counts)?)?;
                serde_json::to_value(est)?
            };
            Ok(json!({ "samples": samples, "resolution": resolution, "dimension": dimension }))
        }
        Experiment::Dimension { ifs, samples, resolution, scales, burn_in, streams } => {
            let opts = ChaosGameOptions { burn_in: *burn_in, resolution: *resolution, streams: *streams, keep_trajectory: 0 };
            let res = chaos_game(ifs, &point(ifs, &None)?, *samples, seed, &opts)?;
            let est = box_counting_dimension(&res.measure, scales)?;
            sink.csv("box-counts.csv", box_counts_csv(&est.counts)?)?;
            sink.measure("histogram", &res.measure)?;
            Ok(json!({ "samples": samples, "dimension": est }))
        }
        Experiment::PushMeasure { ifs, resolution, steps, initial } => push_measure_run(ifs, *resolution, *steps, initial, sink),
        Experiment::PushDensity { ifs, grid, steps } => {
            let mut gamma = DensityGrid::uniform(*grid);
            let mut changes = Vec::with_capacity(*steps);
            for _ in 0..*steps {
                let next = push_density(ifs, &gamma)?;
                changes.push(l1(next.values(), gamma.values()) / *grid as f64);
                gamma = next;
            }
            let xs: Vec<f64> = (0..gamma.len()).map(|k| gamma.node(k)).collect();
            sink.csv("density.csv", columns_csv(&["x", "density"], &[xs, gamma.values().to_vec()])?)?;
            sink.csv("convergence.csv", steps_csv("l1_change", &changes)?)?;
            Ok(json!({
                "integral": gamma.integral(),
                "last_l1_change": changes.last(),
                "min": gamma.values().iter().cloned().fold(f64::INFINITY, f64::min),
                "max": gamma.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            }))
        }
        Experiment::InvariantState { qifs, method, start, max_steps, tol, history } => {
            let built = qifs.build()?;
            invariant_run(&built, *method, start.as_ref(), *max_steps, *tol, *history, seed, sink)
        }
        Experiment::Uniqueness { qifs, tol } => {
            let (probs, us) = qifs
                .unitary_family()?
                .ok_or_else(|| Error::Invalid("uniqueness needs a random external field (unitary family)".into()))?;
            let mut rng = crate::classical::chaos::stream_rng(seed, 0);
            let report = uniqueness_verdict(&probs, &us, *tol, &mut rng)?;
            if let Some(s) = &report.direct_sum_state {
                sink.json("direct-sum-state.json", &MatrixJson::from(s.clone()))?;
            }
            Ok(serde_json::to_value(&report)?)
        }
        Experiment::Trajectory { system, start, steps } => trajectory_run(system, start, *steps, seed, sink),
        Experiment::Barycenter { system, start, steps, burn_in } => {
            let (mean, reference) = match orbit_system(system)? {
                Orbit::Pure(q) => {
                    let ket = start.ket()?.ok_or_else(|| Error::Invalid("pure systems need a pure start".into()))?;
                    let mean = pure_barycenter(&q, &PureState::new(ket), *steps, *burn_in, seed)?;
                    (mean, fixed_state(&BuiltQifs::Channel(q.channel()?))?)
                }
                Orbit::Mixed(built) => {
                    let mean = mixed_barycenter(&built.mixed_system()?, &start.density(seed)?, *steps, *burn_in, seed)?;
                    (mean, fixed_state(&built)?)
                }
            };
            sink.json("barycenter.json", &MatrixJson::from(mean.clone()))?;
            let distance = match &reference {
                Some(r) => Some(trace_distance(&mean, r)?),
                None => None,
            };
            Ok(json!({ "steps": steps, "purity": mean.purity(), "trace_distance_to_fixed_state": distance }))
        }
        Experiment::HusimiSphere { state, rows, cols } => {
            let rho = state.density(seed)?;
            let grid = husimi_sphere(&rho, *rows, *cols)?;
            sink.grid("husimi-sphere", &grid)?;
            Ok(json!({ "dim": rho.dim(), "integral": sphere_integral(&grid, rho.dim()), "max": grid.max(), "min": grid.min() }))
        }
        Experiment::HusimiTorus { state, resolution } => {
            let rho = state.density(seed)?;
            let grid = husimi_torus(&rho, *resolution)?;
            sink.grid("husimi-torus", &grid)?;
            let mean = grid.values.iter().sum::<f64>() / grid.values.len() as f64;
            Ok(json!({ "dim": rho.dim(), "cell_mean": mean, "excluded_mass": excluded_mass(&grid), "max": grid.max() }))
        }
        Experiment::Tartan { dim, mode, resolution, tol, max_steps, damping, dense_dim } => {
            let opts = TartanOptions { tol: *tol, max_steps: *max_steps, damping: *damping, dense_dim: *dense_dim };
            tartan_run(*dim, mode.modes(), *resolution, &opts, sink)
        }
        Experiment::CompareClassicalQuantum { classical, quantum, resolution, dims } => {
            let report = compare_sources(classical, quantum, *resolution, dims, seed, sink)?;
            Ok(serde_json::to_value(report)?)
        }
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn box_counts_csv(counts: &[(usize, usize)]) -> Result<String> {
    let b: Vec<f64> = counts.iter().map(|c| c.0 as f64).collect();
    let n: Vec<f64> = counts.iter().map(|c| c.1 as f64).collect();
    columns_csv(&["boxes_per_axis", "occupied"], &[b, n])
}

fn steps_csv(label: &str, values: &[f64]) -> Result<String> {
    let steps = (1..=values.len()).map(|n| n as f64).collect();
    columns_csv(&["step", label], &[steps, values.to_vec()])
}

fn push_measure_run(ifs: &ClassicalIFS, resolution: usize, steps: usize, initial: &InitialMeasure, sink: &mut Sink) -> Result<Value> {
    let mut mu = match initial {
        InitialMeasure::Uniform => EmpiricalMeasure::uniform(ifs.space(), resolution),
        InitialMeasure::PointMass { at } => EmpiricalMeasure::point_mass(ifs.space(), resolution, &point(ifs, &Some(at.clone()))?),
    };
    let mut changes = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = push_measure(ifs, &mu)?;
        changes.push(next.l1_distance(&mu)?);
        mu = next;
    }
    sink.measure("measure", &mu)?;
    sink.csv("convergence.csv", steps_csv("l1_change", &changes)?)?;
    Ok(json!({ "steps": steps, "last_l1_change": changes.last() }))
}

/// Invariant state of the averaged map by the spectral route when it is linear.
fn fixed_state(built: &BuiltQifs) -> Result<Option<DensityMatrix>> {
    match built.superoperator() {
        Some(sup) => Ok(fixed_states_of(&sup, EIGENVALUE_TOL, true)?.state),
        None => Ok(None),
    }
}

#[allow(clippy::too_many_arguments)]
fn invariant_run(
    built: &BuiltQifs,
    method: InvariantMethod,
    start: Option<&StateSpec>,
    max_steps: usize,
    tol: f64,
    history: usize,
    seed: u64,
    sink: &mut Sink,
) -> Result<Value> {
    let n = built.dim();
    let rho0 = match start {
        Some(s) => s.density(seed)?,
        None => DensityMatrix::maximally_mixed(n),
    };
    let mut out = serde_json::Map::new();
    let mut target = None;
    if matches!(method, InvariantMethod::Spectral | InvariantMethod::Both) {
        let sup = built
            .superoperator()
            .ok_or_else(|| Error::Invalid("the averaged map is not linear; use the power method".into()))?;
        let report = fixed_states_of(&sup, EIGENVALUE_TOL, true)?;
        if let Some(s) = &report.state {
            sink.json("spectral-state.json", &MatrixJson::from(s.clone()))?;
        }
        target = report.state.clone();
        out.insert("spectral".into(), serde_json::to_value(&report)?);
    }
    if matches!(method, InvariantMethod::Power | InvariantMethod::Both) {
        let pi = power_iteration(built, &rho0, max_steps, tol)?;
        sink.json("power-state.json", &MatrixJson::from(pi.state.clone()))?;
        if let Some(t) = &target {
            out.insert("power_vs_spectral_trace_distance".into(), json!(trace_distance(&pi.state, t)?));
        }
        target.get_or_insert(pi.state.clone());
        out.insert("power".into(), serde_json::to_value(&pi)?);
    }
    if history > 0 {
        // unital maps are measured against 𝟙/N even when the fixed space is larger
        let unital = matches!(built, BuiltQifs::Channel(ch) if ch.unital().is_yes());
        let reference = if unital { DensityMatrix::maximally_mixed(n) } else { target.clone().expect("a method ran") };
        let mut rho = rho0.clone();
        let mut d = vec![trace_distance(&rho, &reference)?];
        for _ in 0..history {
            rho = built.apply(&rho)?;
            d.push(trace_distance(&rho, &reference)?);
        }
        let steps: Vec<f64> = (0..=history).map(|k| k as f64).collect();
        sink.csv("convergence.csv", columns_csv(&["step", "trace_distance"], &[steps, d.clone()])?)?;
        out.insert("convergence".into(), convergence_summary(&d, unital));
    }
    Ok(Value::Object(out))
}

/// Monotonicity and log-linear fit of `d[1..]`.
fn convergence_summary(d: &[f64], against_maximally_mixed: bool) -> Value {
    let tail = &d[1..];
    let max_increase = tail.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let (x, y): (Vec<f64>, Vec<f64>) =
        tail.iter().enumerate().filter(|(_, &v)| v > LOG_FLOOR).map(|(k, &v)| ((k + 1) as f64, v.ln())).unzip();
    let (slope, intercept, r2) = if x.len() >= 2 { linear_fit(&x, &y) } else { (f64::NAN, f64::NAN, f64::NAN) };
    json!({
        "reference": if against_maximally_mixed { "maximally-mixed" } else { "invariant-state" },
        "initial": d[0],
        "final": d[d.len() - 1],
        "max_increase": max_increase,
        "log_slope": slope,
        "log_intercept": intercept,
        "log_r_squared": r2,
    })
}

enum Orbit {
    Pure(PureQIFS),
    Mixed(BuiltQifs),
}

fn orbit_system(system: &SystemSpec) -> Result<Orbit> {
    Ok(match system {
        SystemSpec::Mixed { qifs } => Orbit::Mixed(qifs.build()?),
        SystemSpec::Pure { qifs } => Orbit::Pure(qifs.build()?.pure_system()?),
        SystemSpec::LatitudeRotations { j, theta1, theta2 } => Orbit::Pure(latitude_rotations(Spin::new(*j)?, *theta1, *theta2)?),
    })
}

fn trajectory_run(system: &SystemSpec, start: &StateSpec, steps: usize, seed: u64, sink: &mut Sink) -> Result<Value> {
    let mut out = serde_json::Map::new();
    let states: Vec<DensityMatrix> = match orbit_system(system)? {
        Orbit::Pure(q) => {
            let ket = start.ket()?.ok_or_else(|| Error::Invalid("pure systems need a pure start".into()))?;
            let phi0 = PureState::new(ket);
            if let SystemSpec::LatitudeRotations { j, .. } = system {
                let (p1, p2) = latitude_probabilities(Spin::new(*j)?, &phi0.to_density())?;
                out.insert("start_probabilities".into(), json!([p1, p2]));
            }
            pure_trajectory(&q, &phi0, steps, seed)?.iter().map(PureState::to_density).collect()
        }
        Orbit::Mixed(built) => mixed_trajectory(&built.mixed_system()?, &start.density(seed)?, steps, seed)?,
    };
    let first = states[0].matrix().clone();
    let dev: Vec<f64> = states.iter().map(|s| max_abs(&(s.matrix() - &first))).collect();
    let purity: Vec<f64> = states.iter().map(|s| s.purity()).collect();
    let mut headers = vec!["step", "purity", "max_deviation_from_start"];
    let mut columns = vec![(0..states.len()).map(|k| k as f64).collect(), purity, dev.clone()];
    if states[0].dim() == 2 {
        let bloch: Vec<[f64; 3]> = states.iter().map(|s| s.bloch_vector()).collect::<Result<_>>()?;
        headers.extend(["bloch_x", "bloch_y", "bloch_z"]);
        columns.extend((0..3).map(|a| bloch.iter().map(|b| b[a]).collect()));
    }
    sink.csv("trajectory.csv", columns_csv(&headers, &columns)?)?;
    out.insert("steps".into(), json!(steps));
    out.insert("max_projector_deviation".into(), json!(dev.iter().cloned().fold(0.0, f64::max)));
    Ok(Value::Object(out))
}

fn tartan_run(
    dim: usize,
    modes: Vec<crate::torus::TartanMode>,
    resolution: usize,
    opts: &TartanOptions,
    sink: &mut Sink,
) -> Result<Value> {
    let ch = TartanChannel::with_dim(dim)?;
    let level = matched_cantor_level(dim);
    let cantor = cantor_profile(dim, level);
    let mut per_mode = Vec::new();
    let mut states = Vec::new();
    for mode in modes {
        let inv = tartan_invariant(&ch, mode, opts)?;
        let tag = serde_json::to_value(mode)?.as_str().unwrap_or("mode").to_string();
        let grid = husimi_torus(&inv.state, resolution)?;
        sink.grid(&format!("husimi-{tag}"), &grid)?;
        let profile = position_profile(&inv.state);
        let q: Vec<f64> = (0..dim).map(|j| j as f64 / dim as f64).collect();
        sink.csv(&format!("profile-{tag}.csv"), columns_csv(&["q", "quantum", "cantor"], &[q, profile.clone(), cantor.clone()])?)?;
        sink.json(&format!("state-{tag}.json"), &MatrixJson::from(inv.state.clone()))?;
        per_mode.push(json!({
            "mode": mode,
            "method": inv.method,
            "steps": inv.steps,
            "residual": inv.residual,
            "growth": inv.growth,
            "excluded_mass": excluded_mass(&grid),
            "profile_pearson": pearson(&profile, &cantor),
        }));
        states.push(inv.state);
    }
    let mode_difference = match states.as_slice() {
        [a, b] => Some(2.0 * trace_distance(a, b)?),
        _ => None,
    };
    Ok(json!({ "dim": dim, "resolution": resolution, "cantor_level": level, "modes": per_mode, "mode_l1_difference": mode_difference }))
}
