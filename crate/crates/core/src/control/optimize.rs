// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cost::CostModel;
use super::first_passage::FirstPassageOptions;
use super::Schedule;
use crate::error::{Error, Result};
use crate::lindblad::{ControlSystem, Propagator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Trace distance `δ` counted as reaching the target.
    pub target_distance: f64,
    pub intervals: usize,
    pub amplitude_cap: f64,
    /// Starts per duration: zero control, a down-ramp, then uniform random.
    pub restarts: usize,
    /// Quasi-Newton iterations per start.
    pub max_iterations: usize,
    /// Relative central-difference step.
    pub fd_step: f64,
    /// Stop a start once the projected gradient falls below this.
    pub gradient_tolerance: f64,
    /// Stop a start when the cost has fallen by less than this fraction over
    /// the last ten iterations.
    pub stall_tolerance: f64,
    /// Stop as soon as a start reaches `δ`.
    pub stop_at_target: bool,
    /// Bisection stops when the bracket is narrower than this fraction of its upper end.
    pub relative_bracket_width: f64,
    pub seed: u64,
    pub first_passage: FirstPassageOptions,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            target_distance: 0.1,
            intervals: 20,
            amplitude_cap: 20.0,
            restarts: 8,
            max_iterations: 100,
            fd_step: 1e-6,
            gradient_tolerance: 1e-9,
            stall_tolerance: 1e-4,
            stop_at_target: true,
            relative_bracket_width: 1e-2,
            seed: 0,
            first_passage: FirstPassageOptions::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.target_distance > 0.0 && self.target_distance < 1.0) {
            return bad(format!("target distance {} must lie in (0, 1)", self.target_distance));
        }
        if self.intervals == 0 || self.restarts == 0 || self.max_iterations == 0 {
            return bad("intervals, restarts and max_iterations must be positive".into());
        }
        if !(self.amplitude_cap > 0.0 && self.amplitude_cap.is_finite()) {
            return bad(format!("amplitude cap {} must be positive", self.amplitude_cap));
        }
        if !(self.fd_step > 0.0 && self.gradient_tolerance >= 0.0 && self.stall_tolerance >= 0.0) {
            return bad("finite-difference step must be positive, tolerances non-negative".into());
        }
        if !(self.relative_bracket_width > 0.0 && self.relative_bracket_width < 1.0) {
            return bad(format!("relative bracket width {} must lie in (0, 1)", self.relative_bracket_width));
        }
        self.first_passage.validate()
    }
}

/// Best schedule found for a fixed duration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub schedule: Schedule,
    pub cost: f64,
    /// Starts actually run (fewer than configured after an early stop).
    pub restarts_used: usize,
    pub cost_evaluations: usize,
}

impl OptimizeResult {
    pub fn reached(&self, delta: f64) -> bool {
        self.cost <= delta
    }
}

/// Mixes a master seed with an index (SplitMix64 finalizer), giving
/// well-separated seeds for sweep points, bisection steps and restarts.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn initial_point(cfg: &OptimizerConfig, n_controls: usize, restart: usize, seed: u64) -> Vec<f64> {
    let n = cfg.intervals;
    let cap = cfg.amplitude_cap;
    match restart {
        0 => vec![0.0; n * n_controls],
        1 => (0..n).flat_map(|j| std::iter::repeat(cap * (1.0 - j as f64 / n as f64)).take(n_controls)).collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, restart as u64));
            (0..n * n_controls).map(|_| rng.gen_range(-cap..=cap)).collect()
        }
    }
}

/// Minimizes the trace distance at duration `total_time` over piecewise-constant
/// amplitudes in `[−f_max, f_max]`, returning the best start.
pub fn optimize_schedule(sys: &ControlSystem, total_time: f64, cfg: &OptimizerConfig) -> Result<OptimizeResult> {
    optimize_with(&Propagator::new(sys), sys, total_time, cfg, cfg.seed)
}

pub(crate) fn optimize_with(
    prop: &Propagator,
    sys: &ControlSystem,
    total_time: f64,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<OptimizeResult> {
    cfg.validate()?;
    let model = CostModel::with_propagator(prop.clone(), sys, total_time, cfg.intervals, cfg.fd_step)?;
    let nc = sys.n_controls();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0;
    let mut restarts_used = 0;
    let starts = if nc == 0 { 1 } else { cfg.restarts };
    for r in 0..starts {
        restarts_used += 1;
        let x0 = initial_point(cfg, nc, r, seed);
        let (x, f, evals) = projected_bfgs(&model, x0, cfg);
        evaluations += evals;
        if best.as_ref().map_or(true, |b| f < b.1) {
            best = Some((x, f));
        }
        if cfg.stop_at_target && best.as_ref().is_some_and(|b| b.1 <= cfg.target_distance) {
            break;
        }
    }
    let (x, cost) = best.expect("at least one start");
    let schedule = Schedule::from_flat(total_time, cfg.intervals, nc, x, cfg.amplitude_cap)?;
    Ok(OptimizeResult { schedule, cost, restarts_used, cost_evaluations: evaluations })
}

/// Iterations over which progress is measured for the stall test.
const STALL_WINDOW: usize = 10;

fn clip(x: &mut DVector<f64>, cap: f64) {
    x.apply(|v| *v = v.clamp(-cap, cap));
}

/// Projected BFGS with Armijo backtracking. Directions that push an active
/// bound outward are zeroed; the inverse-Hessian estimate is reset to the
/// identity whenever a step fails to descend. A start ends at the iteration
/// budget, a vanishing projected gradient, or a stall.
fn projected_bfgs(model: &CostModel, x0: Vec<f64>, cfg: &OptimizerConfig) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let cap = cfg.amplitude_cap;
    if n == 0 {
        return (x0, model.cost(&[]), 1);
    }
    let mut x = DVector::from_vec(x0);
    clip(&mut x, cap);
    let (f0, g0) = model.cost_and_gradient(x.as_slice());
    let mut f = f0;
    let mut g = DVector::from_vec(g0);
    let mut evals = 1;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut trail = std::collections::VecDeque::with_capacity(STALL_WINDOW + 1);

    for _ in 0..cfg.max_iterations {
        if cfg.stop_at_target && f <= cfg.target_distance {
            break;
        }
        trail.push_back(f);
        if trail.len() > STALL_WINDOW {
            let old = trail.pop_front().expect("window is full");
            if old - f <= cfg.stall_tolerance * old {
                break;
            }
        }
        let mut projected = &x - &g;
        clip(&mut projected, cap);
        if (&x - projected).amax() <= cfg.gradient_tolerance {
            break;
        }
        let active = |x: &DVector<f64>, p: &mut DVector<f64>| {
            for i in 0..n {
                if (x[i] >= cap && p[i] > 0.0) || (x[i] <= -cap && p[i] < 0.0) {
                    p[i] = 0.0;
                }
            }
        };
        let mut p = -(&h * &g);
        active(&x, &mut p);
        if g.dot(&p) >= 0.0 {
            h.fill_with_identity();
            fresh = true;
            p = -g.clone();
            active(&x, &mut p);
            if g.dot(&p) >= 0.0 {
                break;
            }
        }
        let mut alpha = if fresh { (1.0 / p.amax()).min(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..30 {
            let mut trial = &x + &p * alpha;
            clip(&mut trial, cap);
            let step = &trial - &x;
            let ft = model.cost(trial.as_slice());
            evals += 1;
            if ft <= f + 1e-4 * g.dot(&step) && step.amax() > 0.0 {
                accepted = Some(trial);
                break;
            }
            alpha *= 0.5;
        }
        let Some(x_new) = accepted else {
            if fresh {
                break;
            }
            h.fill_with_identity();
            fresh = true;
            continue;
        };
        let (f_new, g_new) = model.cost_and_gradient(x_new.as_slice());
        evals += 1;
        let g_new = DVector::from_vec(g_new);
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if fresh {
                h.fill_with_identity();
                h *= sy / y.dot(&y);
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H ← H − ρ(s yᵀH + H y sᵀ) + (ρ² yᵀHy + ρ) s sᵀ
            h -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
            h += (&s * s.transpose()) * (rho * rho * yhy + rho);
            fresh = false;
        }
        x = x_new;
        f = f_new;
        g = g_new;
    }
    (x.as_slice().to_vec(), f, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{evaluate_cost, uncontrolled_first_passage};
    use crate::models::{make_bell, make_single_qubit};

    #[test]
    fn zero_duration_cost_is_initial_distance() {
        let sys = make_single_qubit(1.0, 1.0).unwrap();
        let c = evaluate_cost(&sys, &Schedule::zero(0.0, 20, 1, 20.0).unwrap()).unwrap();
        assert!((c - 0.5 * 2f64.sqrt()).abs() < 1e-14);
        let long = evaluate_cost(&sys, &Schedule::zero(40.0, 20, 1, 20.0).unwrap()).unwrap();
        assert!(long < 1e-12);
    }

    #[test]
    fn gradient_matches_independent_differences() {
        let sys = make_bell(1.0, 0.5, true).unwrap();
        let model = CostModel::new(&sys, 0.8, 5, 1e-6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..15).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (c, g) = model.cost_and_gradient(&x);
        assert_eq!(c, model.cost(&x));
        for i in 0..x.len() {
            let h = 1e-5;
            let mut p = x.clone();
            p[i] += h;
            let mut m = x.clone();
            m[i] -= h;
            let fd = (model.cost(&p) - model.cost(&m)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "component {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn starts_follow_documented_order() {
        let cfg = OptimizerConfig { intervals: 4, amplitude_cap: 8.0, ..Default::default() };
        assert_eq!(initial_point(&cfg, 1, 0, 1), vec![0.0; 4]);
        assert_eq!(initial_point(&cfg, 2, 1, 1), vec![8.0, 8.0, 6.0, 6.0, 4.0, 4.0, 2.0, 2.0]);
        let r = initial_point(&cfg, 1, 2, 1);
        assert!(r.iter().all(|a| a.abs() <= 8.0));
        assert_ne!(r, initial_point(&cfg, 1, 3, 1));
        assert_eq!(r, initial_point(&cfg, 1, 2, 1));
    }

    #[test]
    fn drift_enables_speedup() {
        let sys = make_single_qubit(1.0, 1.0).unwrap();
        let t_unc = uncontrolled_first_passage(&sys, 0.1, &FirstPassageOptions::default()).unwrap().time;
        let r = optimize_schedule(&sys, 0.8 * t_unc, &OptimizerConfig::default()).unwrap();
        assert!(r.cost <= 0.1);
        assert!(r.schedule.peak_amplitude() <= 20.0);
    }

    #[test]
    fn best_cost_never_exceeds_zero_control() {
        let sys = make_single_qubit(0.0, 1.0).unwrap();
        let cfg = OptimizerConfig { restarts: 3, stop_at_target: false, max_iterations: 20, ..Default::default() };
        let r = optimize_schedule(&sys, 1.0, &cfg).unwrap();
        let zero = evaluate_cost(&sys, &Schedule::zero(1.0, 20, 1, 20.0).unwrap()).unwrap();
        assert!(r.cost <= zero);
        assert_eq!(r.restarts_used, 3);
    }

    #[test]
    fn seeds_are_mixed() {
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(0, 1));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        assert!(OptimizerConfig { target_distance: 1.0, ..Default::default() }.validate().is_err());
        assert!(OptimizerConfig { restarts: 0, ..Default::default() }.validate().is_err());
    }
}
