// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::control::Schedule;
use crate::error::{Error, Result};
use crate::lindblad::{ControlSystem, Propagator, RealMatrix, RealVector};
use crate::norms::trace_norm_hermitian;
use crate::numerics::ComplexMatrix;

/// Trace distance `½‖ρ(T) − ρ_T‖₁` as a function of the flat amplitude
/// vector of a schedule with fixed duration and shape.
pub struct CostModel {
    prop: Propagator,
    target: ComplexMatrix,
    total_time: f64,
    intervals: usize,
    n_controls: usize,
    fd_step: f64,
}

impl CostModel {
    pub fn new(sys: &ControlSystem, total_time: f64, intervals: usize, fd_step: f64) -> Result<Self> {
        Self::with_propagator(Propagator::new(sys), sys, total_time, intervals, fd_step)
    }

    pub fn with_propagator(
        prop: Propagator,
        sys: &ControlSystem,
        total_time: f64,
        intervals: usize,
        fd_step: f64,
    ) -> Result<Self> {
        if !(total_time.is_finite() && total_time >= 0.0) || intervals == 0 {
            return Err(Error::InvalidSchedule(format!("duration {total_time} with {intervals} intervals")));
        }
        if !(fd_step > 0.0) {
            return Err(Error::InvalidParameter(format!("finite-difference step {fd_step} must be positive")));
        }
        Ok(Self {
            prop,
            target: sys.target.matrix().clone(),
            total_time,
            intervals,
            n_controls: sys.n_controls(),
            fd_step,
        })
    }

    pub fn parameters(&self) -> usize {
        self.intervals * self.n_controls
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    fn dt(&self) -> f64 {
        self.total_time / self.intervals as f64
    }

    fn distance(&self, x: &RealVector) -> f64 {
        0.5 * trace_norm_hermitian(&(&self.prop.lift(x) - &self.target))
    }

    fn interval<'a>(&self, amps: &'a [f64], j: usize) -> &'a [f64] {
        &amps[j * self.n_controls..(j + 1) * self.n_controls]
    }

    pub fn cost(&self, amps: &[f64]) -> f64 {
        let mut x = self.prop.initial_coords().clone();
        for j in 0..self.intervals {
            x = self.prop.interval_propagator(self.interval(amps, j), self.dt()) * x;
        }
        self.distance(&x)
    }

    /// Cost and central finite-difference gradient. Forward states and suffix
    /// products are cached, so perturbing one interval costs two exponentials
    /// and two matrix-vector products.
    pub fn cost_and_gradient(&self, amps: &[f64]) -> (f64, Vec<f64>) {
        let n = self.intervals;
        let dt = self.dt();
        let mut states = Vec::with_capacity(n + 1);
        let mut props = Vec::with_capacity(n);
        states.push(self.prop.initial_coords().clone());
        for j in 0..n {
            let u = self.prop.interval_propagator(self.interval(amps, j), dt);
            states.push(&u * &states[j]);
            props.push(u);
        }
        let cost = self.distance(&states[n]);

        // suffix[j] = U_{n−1} ⋯ U_{j+1}
        let r = self.prop.reduced_dim();
        let mut suffix = vec![RealMatrix::identity(r, r); n];
        for j in (0..n.saturating_sub(1)).rev() {
            suffix[j] = &suffix[j + 1] * &props[j + 1];
        }

        let mut grad = vec![0.0; amps.len()];
        let mut local = vec![0.0; self.n_controls];
        for j in 0..n {
            for c in 0..self.n_controls {
                let a = amps[j * self.n_controls + c];
                let h = self.fd_step * a.abs().max(1.0);
                local.copy_from_slice(self.interval(amps, j));
                let mut side = |shift: f64| {
                    local[c] = a + shift;
                    let x = self.prop.interval_propagator(&local, dt) * &states[j];
                    self.distance(&(&suffix[j] * x))
                };
                let plus = side(h);
                let minus = side(-h);
                grad[j * self.n_controls + c] = (plus - minus) / (2.0 * h);
            }
        }
        (cost, grad)
    }
}

/// `½‖ρ(T) − ρ_T‖₁` for a schedule.
pub fn evaluate_cost(sys: &ControlSystem, schedule: &Schedule) -> Result<f64> {
    schedule.validate()?;
    if schedule.n_controls() != sys.n_controls() {
        return Err(Error::InvalidSchedule("schedule and system disagree on the number of controls".into()));
    }
    let model = CostModel::new(sys, schedule.total_time(), schedule.intervals(), 1e-6)?;
    Ok(model.cost(schedule.flat()))
}
