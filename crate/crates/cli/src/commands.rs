// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use qsl_core::bounds::{
    bound_schedule_independent, closed_system_report, single_qubit_analysis, single_qubit_analytic_bound, BoundReport,
    ClosedSystemReport, NormKind, NumeratorConvention, SingleQubitAnalysis,
};
use qsl_core::check::{run_checks, CheckOptions, CheckReport};
use qsl_core::control::{
    derive_seed, find_min_time, uncontrolled_first_passage, FirstPassage, OptimizerConfig, Schedule, TimeSearchResult,
};
use qsl_core::lindblad::{propagate, ControlSystem};
use qsl_core::models::{pauli, ModelSpec};
use qsl_core::numerics::{ComplexMatrix, ComplexVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{status_tag, CliError, CliResult};
use crate::output::{float, opt_float, write_csv, write_json};

/// Thread pool for `jobs` workers; 0 picks the rayon default.
fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} worker threads: {e}")))
}

/// Bound emitted under `bound_paper_variant`: the unit-numerator closed form for the
/// damped qubit, the definitional bound for the other models.
pub fn paper_variant_bound(model: &ModelSpec, definitional: f64) -> qsl_core::Result<f64> {
    match model {
        ModelSpec::SingleQubit { omega, gamma } => {
            single_qubit_analytic_bound(*omega, *gamma, NumeratorConvention::Unit)
        }
        _ => Ok(definitional),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundSummary {
    pub model: ModelSpec,
    /// Certified bound with the `√d‖L‖₂→₂` denominator.
    pub definitional: BoundReport,
    /// Same numerator over the multistart `‖L‖₁→₁` estimate.
    pub estimated: BoundReport,
    pub paper_variant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_qubit: Option<SingleQubitAnalysis>,
}

pub fn cmd_bound(cfg: &ExperimentConfig) -> CliResult<BoundSummary> {
    let sys = cfg.model.build()?;
    let definitional = bound_schedule_independent(&sys, NormKind::SqrtDInduced22)?;
    let estimated = bound_schedule_independent(&sys, NormKind::Induced11Estimate)?;
    let paper_variant = paper_variant_bound(&cfg.model, definitional.bound)?;
    let single_qubit = match cfg.model {
        ModelSpec::SingleQubit { omega, gamma } => Some(single_qubit_analysis(omega, gamma)),
        _ => None,
    };
    Ok(BoundSummary { model: cfg.model.clone(), definitional, estimated, paper_variant, single_qubit })
}

/// One line of the sweep CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub param_name: String,
    pub param_value: f64,
    pub bound_definitional: Option<f64>,
    pub bound_paper_variant: Option<f64>,
    pub t_uncontrolled: Option<f64>,
    pub t_controlled: Option<f64>,
    pub achieved_distance: Option<f64>,
    pub restarts_used: Option<usize>,
    pub seed: u64,
    /// `ok`, or a tag naming the failure.
    pub status: String,
}

pub const SWEEP_COLUMNS: [&str; 10] = [
    "param_name",
    "param_value",
    "bound_definitional",
    "bound_paper_variant",
    "t_uncontrolled",
    "t_controlled",
    "achieved_distance",
    "restarts_used",
    "seed",
    "status",
];

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn record(&self) -> Vec<String> {
        vec![
            self.param_name.clone(),
            float(self.param_value),
            opt_float(self.bound_definitional),
            opt_float(self.bound_paper_variant),
            opt_float(self.t_uncontrolled),
            opt_float(self.t_controlled),
            opt_float(self.achieved_distance),
            self.restarts_used.map(|r| r.to_string()).unwrap_or_default(),
            self.seed.to_string(),
            self.status.clone(),
        ]
    }
}

fn sweep_point(index: usize, name: &str, value: f64, model: &ModelSpec, cfg: &ExperimentConfig) -> SweepRow {
    let seed = derive_seed(cfg.master_seed, index as u64);
    let mut row = SweepRow {
        index,
        param_name: name.to_owned(),
        param_value: value,
        bound_definitional: None,
        bound_paper_variant: None,
        t_uncontrolled: None,
        t_controlled: None,
        achieved_distance: None,
        restarts_used: None,
        seed,
        status: "ok".into(),
    };
    let outcome = (|| {
        let sys = model.build()?;
        let bound = bound_schedule_independent(&sys, NormKind::SqrtDInduced22)?.bound;
        row.bound_definitional = Some(bound);
        row.bound_paper_variant = Some(paper_variant_bound(model, bound)?);
        let optimizer = OptimizerConfig { seed, ..cfg.optimizer.clone() };
        let r = find_min_time(&sys, &optimizer)?;
        row.t_uncontrolled = Some(r.t_uncontrolled);
        row.t_controlled = Some(r.t_min);
        row.achieved_distance = Some(r.achieved_distance);
        row.restarts_used = Some(r.restarts_used());
        Ok::<_, qsl_core::Error>(())
    })();
    if let Err(e) = outcome {
        row.status = status_tag(&e).into();
    }
    row
}

/// Evaluates every sweep point on up to `jobs` threads. Rows come back in
/// sweep order whatever the scheduling.
pub fn run_sweep(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Vec<SweepRow>> {
    let points = cfg.sweep_points()?;
    let pool = pool(jobs)?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, (name, value, model))| sweep_point(i, name, *value, model, cfg))
            .collect()
    });
    rows.sort_by_key(|r| r.index);
    Ok(rows)
}

pub fn write_sweep(dir: &Path, rows: &[SweepRow]) -> CliResult<PathBuf> {
    let header: Vec<String> = SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect();
    let body: Vec<_> = rows.iter().map(SweepRow::record).collect();
    write_csv(dir, "sweep.csv", &header, &body)
}

#[derive(Clone, Debug, Serialize)]
pub struct MinTimeSummary {
    pub model: ModelSpec,
    pub bound: BoundReport,
    pub speedup: f64,
    pub result: TimeSearchResult,
}

fn single_run_optimizer(cfg: &ExperimentConfig) -> OptimizerConfig {
    OptimizerConfig { seed: cfg.master_seed, ..cfg.optimizer.clone() }
}

pub fn cmd_min_time(cfg: &ExperimentConfig, out: &Path) -> CliResult<(MinTimeSummary, PathBuf)> {
    let sys = cfg.model.build()?;
    let bound = bound_schedule_independent(&sys, NormKind::SqrtDInduced22)?;
    let result = find_min_time(&sys, &single_run_optimizer(cfg))?;
    let summary = MinTimeSummary { model: cfg.model.clone(), bound, speedup: result.speedup(), result };
    let path = write_json(out, "min_time.json", &summary)?;
    Ok((summary, path))
}

#[derive(Clone, Debug, Serialize)]
pub struct RelaxSummary {
    pub model: ModelSpec,
    pub target_distance: f64,
    pub first_passage: FirstPassage,
}

pub fn cmd_relax(cfg: &ExperimentConfig, out: &Path) -> CliResult<(RelaxSummary, PathBuf)> {
    let sys = cfg.model.build()?;
    let delta = cfg.optimizer.target_distance;
    let first_passage = uncontrolled_first_passage(&sys, delta, &cfg.optimizer.first_passage)?;
    let summary = RelaxSummary { model: cfg.model.clone(), target_distance: delta, first_passage };
    let path = write_json(out, "relax.json", &summary)?;
    Ok((summary, path))
}

/// Bloch components for a qubit, diagonal populations otherwise.
fn observable_names(model: &ModelSpec, dim: usize) -> Vec<String> {
    match model {
        ModelSpec::SingleQubit { .. } => ["sx", "sy", "sz"].map(String::from).to_vec(),
        _ => (0..dim).map(|k| format!("p{k}")).collect(),
    }
}

fn observables(model: &ModelSpec, rho: &ComplexMatrix) -> Vec<f64> {
    match model {
        ModelSpec::SingleQubit { .. } => {
            [pauli::x(), pauli::y(), pauli::z()].iter().map(|p| rho.trace_product(p).re).collect()
        }
        _ => (0..rho.rows()).map(|k| rho[(k, k)].re).collect(),
    }
}

fn trajectory_rows(
    model: &ModelSpec,
    sys: &ControlSystem,
    series: &str,
    schedule: &Schedule,
    samples: usize,
) -> CliResult<Vec<Vec<String>>> {
    let states = propagate(sys, schedule, samples)?;
    Ok(states
        .iter()
        .enumerate()
        .map(|(k, rho)| {
            let t = if k == samples { schedule.total_time() } else { schedule.total_time() * k as f64 / samples as f64 };
            let mut row = vec![series.to_owned(), float(t)];
            row.extend(observables(model, rho.matrix()).into_iter().map(float));
            row
        })
        .collect())
}

/// Writes `trajectory.csv` (uncontrolled series, plus the optimized one when
/// configured) and, for the controlled run, `schedule.csv`.
pub fn cmd_trajectory(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let sys = cfg.model.build()?;
    let spec = &cfg.trajectory;
    let opt = single_run_optimizer(cfg);
    let duration = match spec.duration {
        Some(t) => t,
        None => uncontrolled_first_passage(&sys, opt.target_distance, &opt.first_passage)?.time,
    };
    let free = Schedule::zero(duration, opt.intervals, sys.n_controls(), opt.amplitude_cap)?;
    let mut rows = trajectory_rows(&cfg.model, &sys, "uncontrolled", &free, spec.samples)?;
    let mut header = vec!["series".to_owned(), "t".to_owned()];
    header.extend(observable_names(&cfg.model, sys.dim()));
    let mut written = Vec::new();

    if spec.controlled {
        let search = find_min_time(&sys, &opt)?;
        rows.extend(trajectory_rows(&cfg.model, &sys, "controlled", &search.schedule, spec.samples)?);
        let s = &search.schedule;
        let mut sched_header = vec!["interval".to_owned(), "t_start".to_owned(), "t_end".to_owned()];
        sched_header.extend((0..s.n_controls()).map(|c| format!("u{c}")));
        let sched_rows: Vec<Vec<String>> = (0..s.intervals())
            .map(|j| {
                let mut row = vec![j.to_string(), float(j as f64 * s.dt()), float((j + 1) as f64 * s.dt())];
                row.extend(s.interval_amplitudes(j).iter().map(|&a| float(a)));
                row
            })
            .collect();
        written.push(write_csv(out, "schedule.csv", &sched_header, &sched_rows)?);
    }
    written.insert(0, write_csv(out, "trajectory.csv", &header, &rows)?);
    Ok(written)
}

pub fn cmd_check(seed: u64, corrupt_convention: bool) -> CliResult<CheckReport> {
    Ok(run_checks(&CheckOptions { seed, corrupt_convention })?)
}

fn haar_state(rng: &mut ChaCha8Rng, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let n = v.norm();
    v.unscale(n)
}

fn gue(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .hermitian_part()
}

pub const CLOSED_COLUMNS: [&str; 11] = [
    "dim",
    "instance",
    "trace_norm_distance",
    "bures_distance",
    "variance",
    "spectral_spread",
    "reference_bound",
    "norm_bound",
    "chain_holds",
    "popoviciu_holds",
    "comparison_holds",
];

/// Random pure-state instances comparing the Bures-angle limit with the
/// generator-norm bound. An empty `reference_bound` marks a divergent limit.
pub fn run_closed_compare(cfg: &ExperimentConfig) -> CliResult<Vec<(usize, ClosedSystemReport)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    let mut out = Vec::new();
    for &d in &cfg.closed_compare.dims {
        for _ in 0..cfg.closed_compare.instances {
            let psi0 = haar_state(&mut rng, d);
            let psi_t = haar_state(&mut rng, d);
            let h = gue(&mut rng, d);
            out.push((d, closed_system_report(&psi0, &psi_t, &h)?));
        }
    }
    Ok(out)
}

pub fn write_closed_compare(dir: &Path, reports: &[(usize, ClosedSystemReport)]) -> CliResult<PathBuf> {
    let header: Vec<String> = CLOSED_COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut counters = std::collections::BTreeMap::new();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|(d, r)| {
            let k = counters.entry(*d).or_insert(0usize);
            *k += 1;
            vec![
                d.to_string(),
                (*k - 1).to_string(),
                float(r.trace_norm_distance),
                float(r.bures_distance),
                float(r.variance),
                float(r.spectral_spread),
                opt_float(r.reference_bound),
                opt_float(r.norm_bound),
                r.chain_holds.to_string(),
                r.popoviciu_holds.to_string(),
                r.comparison_holds.to_string(),
            ]
        })
        .collect();
    write_csv(dir, "closed_compare.csv", &header, &rows)
}
