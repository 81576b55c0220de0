// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time for the uncontrolled dynamics to come within `δ` of the target.
//!
//! The zero-control trajectory is sampled on a grid of spacing
//! `h = 1/(k σ_max(L))`. Grid points are skipped only when they are certified
//! to lie above `δ`: a CPTP semigroup contracts the trace norm of Hermitian
//! operators, so `‖Lρ(s)‖₁ ≤ ‖Lρ(t)‖₁` for `s ≥ t` and the distance can fall
//! by at most `½(t' − t)‖Lρ(t)‖₁` before `t'`. The first grid cell that
//! contains a crossing is then refined by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{
    dissipator_superoperator, hamiltonian_superoperator, ControlSystem, LindbladGenerator, Propagator, RealMatrix,
    RealVector,
};
use crate::norms::{induced_22, trace_norm_hermitian};
use crate::numerics::{commutator, ComplexMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FirstPassageOptions {
    /// Grid points per unit of `1/σ_max(L)`.
    pub points_per_inverse_norm: f64,
    /// Give up (no relaxation) past this time.
    pub horizon: f64,
    /// Absolute width of the final bisection bracket.
    pub tolerance: f64,
    /// When the dissipator commutes with `−i[H₀, ·]` and the target commutes
    /// with `H₀`, the distance to the target is the same as under the
    /// dissipator alone; propagate that instead.
    pub exploit_covariance: bool,
}

impl Default for FirstPassageOptions {
    fn default() -> Self {
        Self { points_per_inverse_norm: 1000.0, horizon: 1e9, tolerance: 1e-8, exploit_covariance: true }
    }
}

impl FirstPassageOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.points_per_inverse_norm >= 1.0 && self.horizon > 0.0 && self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("first-passage grid, horizon and tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstPassage {
    pub time: f64,
    /// Distance to the target at `time` (at most `δ`).
    pub distance: f64,
    /// Grid spacing used for the scan.
    pub grid_step: f64,
    /// Grid points actually evaluated.
    pub evaluations: usize,
    /// Whether the dissipator-only shortcut was used.
    pub covariant: bool,
}

/// Whether `[−i[H₀,·], D] = 0` and `[H₀, ρ_T] = 0` within round-off.
pub fn is_covariant(sys: &ControlSystem) -> bool {
    let h0 = sys.generator.drift();
    let scale = h0.max_abs().max(1.0);
    if commutator(h0, sys.target.matrix()).max_abs() > 1e-12 * scale {
        return false;
    }
    let mh = hamiltonian_superoperator(h0);
    let md = dissipator_superoperator(sys.generator.dissipator(), sys.dim());
    let c = &(&mh * &md) - &(&md * &mh);
    c.max_abs() <= 1e-12 * (mh.max_abs() * md.max_abs()).max(1.0)
}

struct Trajectory {
    prop: Propagator,
    target: ComplexMatrix,
    generator: RealMatrix,
    step: f64,
    /// `powers[k] = exp(2^k h A)`, filled on demand.
    powers: Vec<RealMatrix>,
}

impl Trajectory {
    fn distance(&self, x: &RealVector) -> f64 {
        0.5 * trace_norm_hermitian(&(&self.prop.lift(x) - &self.target))
    }

    fn speed(&self, x: &RealVector) -> f64 {
        0.5 * trace_norm_hermitian(&self.prop.lift(&(&self.generator * x)))
    }

    fn advance(&mut self, x: &RealVector, mut steps: u64) -> RealVector {
        let mut x = x.clone();
        let mut k = 0;
        while steps > 0 {
            if k == self.powers.len() {
                let t = self.step * (1u64 << k) as f64;
                self.powers.push((&self.generator * t).exp());
            }
            if steps & 1 == 1 {
                x = &self.powers[k] * x;
            }
            steps >>= 1;
            k += 1;
        }
        x
    }
}

/// First time the zero-control dynamics reach trace distance `δ` of the target.
pub fn uncontrolled_first_passage(sys: &ControlSystem, delta: f64, opts: &FirstPassageOptions) -> Result<FirstPassage> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("target distance {delta} must lie in (0, 1)")));
    }
    opts.validate()?;
    let sigma = induced_22(&sys.generator.superoperator()).value;
    let covariant = opts.exploit_covariance && is_covariant(sys);
    let generator = if covariant {
        LindbladGenerator::new(ComplexMatrix::zeros(sys.dim(), sys.dim()), sys.generator.dissipator().clone())?
    } else {
        sys.generator.clone()
    };
    let prop = Propagator::for_generator(&generator, &[], sys.initial.matrix());
    let x0 = prop.initial_coords().clone();
    let reduced = prop.generator_at(&[]);
    let mut traj =
        Trajectory { prop, target: sys.target.matrix().clone(), generator: reduced, step: 0.0, powers: Vec::new() };

    let d0 = traj.distance(&x0);
    if d0 <= delta {
        return Ok(FirstPassage { time: 0.0, distance: d0, grid_step: 0.0, evaluations: 1, covariant });
    }
    if sigma == 0.0 {
        return Err(Error::NoRelaxation { delta, horizon: opts.horizon });
    }
    let h = 1.0 / (opts.points_per_inverse_norm * sigma);
    traj.step = h;
    let last = (opts.horizon / h).ceil() as u64;

    let mut k: u64 = 0;
    let mut x = x0;
    let mut d = d0;
    let mut evaluations = 1;
    loop {
        if k >= last {
            return Err(Error::NoRelaxation { delta, horizon: opts.horizon });
        }
        let speed = traj.speed(&x);
        let certified = if speed > 0.0 { (d - delta) / (speed * h) } else { f64::INFINITY };
        let m = (certified.floor().min((last - k) as f64) as u64).max(1);
        let next = traj.advance(&x, m);
        let d_next = traj.distance(&next);
        evaluations += 1;
        if d_next <= delta {
            // every grid point before k + m is above δ; refine inside the last cell
            let x_lo = if m > 1 { traj.advance(&x, m - 1) } else { x };
            let lo = (k + m - 1) as f64 * h;
            let hi = (k + m) as f64 * h;
            let (time, distance) = bisect(&traj, x_lo, lo, hi, d_next, delta, opts.tolerance);
            return Ok(FirstPassage { time, distance, grid_step: h, evaluations, covariant });
        }
        x = next;
        d = d_next;
        k += m;
    }
}

fn bisect(
    traj: &Trajectory,
    mut x_lo: RealVector,
    mut lo: f64,
    mut hi: f64,
    mut d_hi: f64,
    delta: f64,
    tol: f64,
) -> (f64, f64) {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let x_mid = (&traj.generator * (mid - lo)).exp() * &x_lo;
        let d_mid = traj.distance(&x_mid);
        if d_mid <= delta {
            hi = mid;
            d_hi = d_mid;
        } else {
            lo = mid;
            x_lo = x_mid;
        }
    }
    (hi, d_hi)
}
