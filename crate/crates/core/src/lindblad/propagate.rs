// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact propagation under piecewise-constant controls.
//!
//! For amplitudes `f` the superoperator is `M(f) = M₀ + Σ_c f_c M_c`. Every
//! such map preserves Hermiticity, so states are carried in real coordinates
//! `r_k = Tr(E_k ρ)` over an orthonormal basis `{E_k}` of Hermitian matrices,
//! where `M(f)` acts as a real matrix. The state also never leaves the
//! smallest subspace that contains `ρ₀` and is invariant under `M₀` and every
//! `M_c`. [`Propagator`] computes an orthonormal basis `Q` of that subspace
//! once and propagates reduced coordinates `x` with `r = Q x`, each interval
//! by one real matrix exponential of `Δt · QᵀM(f)Q`. For the
//! permutation-symmetric Ising models this shrinks `d² = 256` to a few dozen
//! dimensions.

use nalgebra::{DMatrix, DVector};

use super::{build_superoperator, hamiltonian_superoperator, ControlSystem, DensityMatrix, LindbladGenerator};
use crate::control::Schedule;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, matrix_exp, unvec, vec, ComplexMatrix, C64};

pub type RealMatrix = DMatrix<f64>;
pub type RealVector = DVector<f64>;

/// Relative size below which a new Krylov direction counts as dependent.
const KRYLOV_TOL: f64 = 1e-10;
/// Relative invariance residual accepted for the reduced basis.
const INVARIANCE_TOL: f64 = 1e-8;

/// Coordinates `Tr(E_k X)` of a Hermitian `X`, indexed like `vec`: `k = i + j·d`
/// holds `X_ii` on the diagonal, `√2 Re X_ij` for `i < j` and `√2 Im X_ji`
/// for `i > j`. The anti-Hermitian part of `X` is dropped.
pub fn hermitian_coords(x: &ComplexMatrix) -> RealVector {
    let d = x.rows();
    let s = std::f64::consts::SQRT_2;
    RealVector::from_fn(d * d, |k, _| {
        let (i, j) = (k % d, k / d);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => x[(i, i)].re,
            // average both triangles so a slightly non-Hermitian input is projected
            std::cmp::Ordering::Less => s * 0.5 * (x[(i, j)].re + x[(j, i)].re),
            std::cmp::Ordering::Greater => s * 0.5 * (x[(j, i)].im - x[(i, j)].im),
        }
    })
}

/// Inverse of [`hermitian_coords`].
pub fn from_hermitian_coords(r: &RealVector, d: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(d, d, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => C64::new(r[i + i * d], 0.0),
        std::cmp::Ordering::Less => C64::new(s * r[i + j * d], s * r[j + i * d]),
        std::cmp::Ordering::Greater => C64::new(s * r[j + i * d], -s * r[i + j * d]),
    })
}

/// Real matrix of a Hermiticity-preserving superoperator in the coordinates
/// of [`hermitian_coords`].
pub fn real_superoperator(m: &ComplexMatrix, d: usize) -> RealMatrix {
    let d2 = d * d;
    let mut out = RealMatrix::zeros(d2, d2);
    for k in 0..d2 {
        let mut e = RealVector::zeros(d2);
        e[k] = 1.0;
        let image = unvec(&m.mul_vec(&vec(&from_hermitian_coords(&e, d))), d).expect("square superoperator");
        out.set_column(k, &hermitian_coords(&image));
    }
    out
}

#[derive(Clone, Debug)]
pub struct Propagator {
    dim: usize,
    basis: RealMatrix,
    drift: RealMatrix,
    controls: Vec<RealMatrix>,
    initial: RealVector,
}

impl Propagator {
    /// Reduced propagator on the invariant subspace generated from `ρ₀`.
    pub fn new(sys: &ControlSystem) -> Self {
        Self::for_generator(&sys.generator, &sys.controls, sys.initial.matrix())
    }

    /// Propagator on the full `d²`-dimensional space.
    pub fn unreduced(sys: &ControlSystem) -> Self {
        let (drift, controls) = real_parts(&sys.generator, &sys.controls);
        let d2 = sys.dim() * sys.dim();
        Self::with_basis(sys.dim(), RealMatrix::identity(d2, d2), &drift, &controls, &hermitian_coords(sys.initial.matrix()))
    }

    /// Reduced propagator for `generator` with control Hamiltonians `controls`,
    /// on the invariant subspace generated from the Hermitian operator `rho0`.
    pub fn for_generator(generator: &LindbladGenerator, controls: &[ComplexMatrix], rho0: &ComplexMatrix) -> Self {
        let (drift, full_controls) = real_parts(generator, controls);
        let v0 = hermitian_coords(rho0);
        let mut ops = vec![&drift];
        ops.extend(full_controls.iter());
        let basis = krylov_basis(&ops, &v0).unwrap_or_else(|| {
            let d2 = v0.len();
            RealMatrix::identity(d2, d2)
        });
        Self::with_basis(generator.dim(), basis, &drift, &full_controls, &v0)
    }

    fn with_basis(dim: usize, basis: RealMatrix, drift: &RealMatrix, controls: &[RealMatrix], v0: &RealVector) -> Self {
        let qt = basis.transpose();
        let reduce = |m: &RealMatrix| &qt * m * &basis;
        Self { dim, drift: reduce(drift), controls: controls.iter().map(reduce).collect(), initial: &qt * v0, basis }
    }

    /// Dimension of the Hilbert space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the invariant subspace actually propagated.
    pub fn reduced_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn initial_coords(&self) -> &RealVector {
        &self.initial
    }

    /// Reduced generator `QᵀM(f)Q`.
    pub fn generator_at(&self, amplitudes: &[f64]) -> RealMatrix {
        let mut m = self.drift.clone();
        for (mc, &f) in self.controls.iter().zip(amplitudes) {
            if f != 0.0 {
                m += mc * f;
            }
        }
        m
    }

    /// `exp(Δt · QᵀM(f)Q)`.
    pub fn interval_propagator(&self, amplitudes: &[f64], dt: f64) -> RealMatrix {
        (self.generator_at(amplitudes) * dt).exp()
    }

    /// Reduced coordinates of a Hermitian operator (its projection onto the subspace).
    pub fn coords_of(&self, rho: &ComplexMatrix) -> RealVector {
        self.basis.transpose() * hermitian_coords(rho)
    }

    /// Hermitian operator with reduced coordinates `x`.
    pub fn lift(&self, x: &RealVector) -> ComplexMatrix {
        from_hermitian_coords(&(&self.basis * x), self.dim)
    }

    /// `L ρ` in reduced coordinates, for zero control.
    pub fn drift_derivative(&self, x: &RealVector) -> RealVector {
        &self.drift * x
    }

    /// Final reduced state after the whole schedule.
    pub fn final_coords(&self, schedule: &Schedule) -> RealVector {
        self.final_coords_from(&self.initial, schedule)
    }

    pub fn final_coords_from(&self, x0: &RealVector, schedule: &Schedule) -> RealVector {
        let dt = schedule.dt();
        let mut x = x0.clone();
        for j in 0..schedule.intervals() {
            x = self.interval_propagator(schedule.interval_amplitudes(j), dt) * x;
        }
        x
    }

    pub fn final_state(&self, schedule: &Schedule) -> ComplexMatrix {
        self.lift(&self.final_coords(schedule))
    }

    /// Reduced states at `t_k = kT/samples`, `k = 0..=samples`.
    pub fn sample_coords(&self, x0: &RealVector, schedule: &Schedule, samples: usize) -> Vec<RealVector> {
        let n = schedule.intervals();
        let total = schedule.total_time();
        let dt = schedule.dt();
        let mut out = Vec::with_capacity(samples + 1);
        let mut x = x0.clone();
        let mut t = 0.0;
        let mut j = 0;
        out.push(x.clone());
        for k in 1..=samples {
            let t_next = if k == samples { total } else { total * k as f64 / samples as f64 };
            loop {
                let last = j + 1 == n;
                let end = if last { total } else { (j + 1) as f64 * dt };
                if last || t_next < end {
                    x = self.interval_propagator(schedule.interval_amplitudes(j), t_next - t) * x;
                    t = t_next;
                    break;
                }
                x = self.interval_propagator(schedule.interval_amplitudes(j), end - t) * x;
                t = end;
                j += 1;
                if t_next == end {
                    break;
                }
            }
            out.push(x.clone());
        }
        out
    }
}

fn real_parts(generator: &LindbladGenerator, controls: &[ComplexMatrix]) -> (RealMatrix, Vec<RealMatrix>) {
    let d = generator.dim();
    let drift = real_superoperator(&build_superoperator(generator), d);
    let controls = controls.iter().map(|h| real_superoperator(&hamiltonian_superoperator(h), d)).collect();
    (drift, controls)
}

/// Orthonormal basis of the smallest subspace containing `v0` and invariant
/// under every operator, or `None` when the closure fails verification.
fn krylov_basis(ops: &[&RealMatrix], v0: &RealVector) -> Option<RealMatrix> {
    let full = v0.len();
    let scales: Vec<f64> = ops.iter().map(|m| m.norm().max(f64::MIN_POSITIVE)).collect();
    let mut basis: Vec<RealVector> = vec![v0.unscale(v0.norm())];
    let mut k = 0;
    while k < basis.len() && basis.len() < full {
        for (op, &scale) in ops.iter().zip(&scales) {
            let mut w = *op * &basis[k];
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &basis {
                    let proj = q.dot(&w);
                    w -= q * proj;
                }
            }
            let norm = w.norm();
            if norm > KRYLOV_TOL * scale {
                basis.push(w.unscale(norm));
                if basis.len() == full {
                    break;
                }
            }
        }
        k += 1;
    }
    let q = RealMatrix::from_columns(&basis);
    let qt = q.transpose();
    for (op, &scale) in ops.iter().zip(&scales) {
        let mq = *op * &q;
        let residual = &mq - &q * (&qt * &mq);
        if residual.norm() > INVARIANCE_TOL * scale {
            return None;
        }
    }
    Some(q)
}

fn check_schedule(sys: &ControlSystem, schedule: &Schedule) -> Result<()> {
    schedule.validate()?;
    if schedule.n_controls() != sys.n_controls() {
        return Err(Error::InvalidSchedule(format!(
            "schedule drives {} controls, system has {}",
            schedule.n_controls(),
            sys.n_controls()
        )));
    }
    Ok(())
}

/// States at `t_k = kT/samples` for `k = 0..=samples` (so both `ρ₀` and `ρ(T)`).
pub fn propagate(sys: &ControlSystem, schedule: &Schedule, samples: usize) -> Result<Vec<DensityMatrix>> {
    propagate_from(sys, sys.initial.matrix(), schedule, samples)
}

/// As [`propagate`], starting from an arbitrary Hermitian operator `rho`.
pub fn propagate_from(
    sys: &ControlSystem,
    rho: &ComplexMatrix,
    schedule: &Schedule,
    samples: usize,
) -> Result<Vec<DensityMatrix>> {
    check_schedule(sys, schedule)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    if rho.rows() != sys.dim() || rho.cols() != sys.dim() {
        return Err(Error::Dimension(format!("initial operator must be {0}x{0}", sys.dim())));
    }
    let deviation = rho.hermiticity_defect();
    if deviation > 1e-12 * rho.max_abs().max(1.0) {
        return Err(Error::NotHermitian { what: "initial operator", deviation });
    }
    let prop = if rho == sys.initial.matrix() { Propagator::new(sys) } else { Propagator::unreduced(sys) };
    let x0 = prop.coords_of(rho);
    Ok(prop
        .sample_coords(&x0, schedule, samples)
        .iter()
        .map(|x| DensityMatrix::from_matrix_unchecked(prop.lift(x)))
        .collect())
}

/// Complete-positivity and trace-preservation diagnostics of the channel
/// generated by a schedule.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CptpReport {
    /// Smallest eigenvalue of the Choi matrix `Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub min_choi_eigenvalue: f64,
    /// `max |vec(I)† E − vec(I)†|`.
    pub trace_residual: f64,
}

impl CptpReport {
    pub fn is_cptp(&self, tol: f64) -> bool {
        self.min_choi_eigenvalue >= -tol && self.trace_residual <= tol
    }
}

/// End-to-end channel matrix of a schedule on the full `d²` space.
pub fn channel_matrix(sys: &ControlSystem, schedule: &Schedule) -> Result<ComplexMatrix> {
    check_schedule(sys, schedule)?;
    let dt = schedule.dt();
    let d2 = sys.dim() * sys.dim();
    let mut e = ComplexMatrix::identity(d2);
    for j in 0..schedule.intervals() {
        let m = build_superoperator(&sys.generator_at(schedule.interval_amplitudes(j))?);
        e = &matrix_exp(&m.scale_real(dt)) * &e;
    }
    Ok(e)
}

/// Choi matrix of a channel given by its superoperator matrix.
pub fn choi_matrix(channel: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut choi = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            // column i + j·d of the channel is vec(E(|i⟩⟨j|))
            let col = i + j * d;
            for b in 0..d {
                for a in 0..d {
                    choi[(i * d + a, j * d + b)] = channel[(a + b * d, col)];
                }
            }
        }
    }
    choi
}

pub fn channel_report(channel: &ComplexMatrix, d: usize) -> CptpReport {
    let choi = choi_matrix(channel, d);
    let min_choi_eigenvalue = hermitian_eigenvalues(&choi)[0];
    let vid = vec(&ComplexMatrix::identity(d));
    let row = vid.adjoint() * channel.as_inner();
    let trace_residual = row.iter().zip(vid.iter()).map(|(a, b)| (a - b.conj()).norm()).fold(0.0, f64::max);
    CptpReport { min_choi_eigenvalue, trace_residual }
}

pub fn is_cptp(sys: &ControlSystem, schedule: &Schedule) -> Result<CptpReport> {
    Ok(channel_report(&channel_matrix(sys, schedule)?, sys.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{Dissipator, DissipatorConvention, JumpTerm, LindbladGenerator};
    use crate::norms::trace_distance;
    use crate::numerics::{ComplexVector, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ket(v: &[C64]) -> ComplexVector {
        ComplexVector::from_column_slice(v)
    }

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn damped(omega: f64, gamma: f64) -> ControlSystem {
        let sm = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let g = LindbladGenerator::new(
            ComplexMatrix::from_real_diagonal(&[-omega, omega]),
            Dissipator::new(vec![JumpTerm::new(sm, gamma).unwrap()], DissipatorConvention::FactorTwo),
        )
        .unwrap();
        let minus = DensityMatrix::from_ket(&ket(&[ONE, -ONE])).unwrap();
        let ground = DensityMatrix::from_ket(&ket(&[ONE, ZERO])).unwrap();
        ControlSystem::new(g, vec![sx()], minus, ground).unwrap()
    }

    fn random_schedule(rng: &mut impl Rng, t: f64, n: usize, controls: usize) -> Schedule {
        let rows = (0..n).map(|_| (0..controls).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
        Schedule::new(t, rows, 3.0).unwrap()
    }

    fn random_hermitian(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .hermitian_part()
    }

    #[test]
    fn hermitian_coordinates_are_an_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for d in [1, 2, 3, 4] {
            let a = random_hermitian(&mut rng, d);
            let b = random_hermitian(&mut rng, d);
            let (ra, rb) = (hermitian_coords(&a), hermitian_coords(&b));
            assert!((&from_hermitian_coords(&ra, d) - &a).max_abs() < 1e-15);
            assert!((ra.dot(&rb) - a.trace_product(&b).re).abs() < 1e-12);
        }
    }

    #[test]
    fn real_superoperator_matches_complex_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let sys = damped(0.7, 0.3);
        let m = sys.generator.superoperator();
        let r = real_superoperator(&m, 2);
        let x = random_hermitian(&mut rng, 2);
        let direct = sys.generator.apply(&x).unwrap();
        assert!((&from_hermitian_coords(&(&r * hermitian_coords(&x)), 2) - &direct).max_abs() < 1e-14);
    }

    #[test]
    fn hermitian_operator_matches_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let sys = damped(1.0, 0.4);
        let sched = random_schedule(&mut rng, 1.2, 6, 1);
        let x = random_hermitian(&mut rng, 2);
        let got = propagate_from(&sys, &x, &sched, 1).unwrap().pop().unwrap();
        let want = unvec(&channel_matrix(&sys, &sched).unwrap().mul_vec(&vec(&x)), 2).unwrap();
        assert!((got.matrix() - &want).max_abs() < 1e-12);
        let raising = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(propagate_from(&sys, &raising, &sched, 1), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn zero_time_returns_initial_state() {
        let sys = damped(1.0, 0.3);
        let states = propagate(&sys, &Schedule::zero(0.0, 20, 1, 1.0).unwrap(), 3).unwrap();
        assert_eq!(states.len(), 4);
        for s in &states {
            assert!((s.matrix() - sys.initial.matrix()).frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn uncontrolled_decay_matches_closed_form() {
        let gamma = 0.4;
        let sys = damped(1.0, gamma);
        let t_end = 3.0;
        let states = propagate(&sys, &Schedule::zero(t_end, 20, 1, 1.0).unwrap(), 30).unwrap();
        for (k, s) in states.iter().enumerate() {
            let t = t_end * k as f64 / 30.0;
            let rho = s.matrix();
            assert!((rho[(1, 1)].re - 0.5 * (-2.0 * gamma * t).exp()).abs() < 1e-12);
            assert!((rho[(0, 1)].norm() - 0.5 * (-gamma * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_rabi_rotation() {
        let omega = 1.3;
        let g = LindbladGenerator::unitary(sx().scale_real(omega)).unwrap();
        let ground = DensityMatrix::from_ket(&ket(&[ONE, ZERO])).unwrap();
        let sys = ControlSystem::new(g, vec![], ground.clone(), ground).unwrap();
        let t_end = 2.1;
        let states = propagate(&sys, &Schedule::zero(t_end, 7, 0, 1.0).unwrap(), 10).unwrap();
        for (k, s) in states.iter().enumerate() {
            let t = t_end * k as f64 / 10.0;
            let exact = ket(&[C64::new((omega * t).cos(), 0.0), C64::new(0.0, -(omega * t).sin())]);
            let exact = ComplexMatrix::projector(&exact);
            assert!(trace_distance(s.matrix(), &exact) <= 1e-9);
        }
    }

    #[test]
    fn reduced_and_full_propagation_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let sys = damped(0.8, 0.25);
        let sched = random_schedule(&mut rng, 1.7, 20, 1);
        let reduced = Propagator::new(&sys);
        let full = Propagator::unreduced(&sys);
        let a = reduced.final_state(&sched);
        let b = full.final_state(&sched);
        assert!((&a - &b).frobenius_norm() < 1e-12);
    }

    #[test]
    fn composition_over_split_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let sys = damped(1.0, 0.5);
        let sched = random_schedule(&mut rng, 2.0, 20, 1);
        let whole = propagate(&sys, &sched, 1).unwrap().pop().unwrap();
        let (head, tail) = sched.split_at(10).unwrap();
        let mid = propagate(&sys, &head, 1).unwrap().pop().unwrap();
        let end = propagate_from(&sys, mid.matrix(), &tail, 1).unwrap().pop().unwrap();
        assert!((whole.matrix() - end.matrix()).frobenius_norm() <= 1e-9);
    }

    #[test]
    fn sample_times_inside_intervals() {
        // 3 intervals, 7 samples: sample points cut intervals unevenly
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let sys = damped(1.0, 0.2);
        let sched = random_schedule(&mut rng, 1.5, 3, 1);
        let states = propagate(&sys, &sched, 7).unwrap();
        let last = states.last().unwrap().matrix();
        let direct = Propagator::new(&sys).final_state(&sched);
        assert!((last - &direct).frobenius_norm() < 1e-12);
        assert_eq!(states.len(), 8);
    }

    #[test]
    fn rejects_mismatched_schedule() {
        let sys = damped(1.0, 0.2);
        let sched = Schedule::zero(1.0, 4, 2, 1.0).unwrap();
        assert!(matches!(propagate(&sys, &sched, 2), Err(Error::InvalidSchedule(_))));
        assert!(propagate(&sys, &Schedule::zero(1.0, 4, 1, 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn identity_channel_choi() {
        let report = channel_report(&ComplexMatrix::identity(4), 2);
        assert!(report.min_choi_eigenvalue.abs() < 1e-14);
        assert_eq!(report.trace_residual, 0.0);
    }

    #[test]
    fn random_schedules_generate_cptp_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let sys = damped(1.0, 0.1);
        for _ in 0..10 {
            let t = rng.gen_range(0.1..3.0);
            let sched = random_schedule(&mut rng, t, 20, 1);
            let r = is_cptp(&sys, &sched).unwrap();
            assert!(r.min_choi_eigenvalue >= -1e-8, "{r:?}");
            assert!(r.trace_residual < 1e-10);
        }
    }

    #[test]
    fn long_amplitude_damping_is_a_reset_channel() {
        let sys = damped(0.0, 1.0);
        let e = channel_matrix(&sys, &Schedule::zero(40.0, 1, 1, 1.0).unwrap()).unwrap();
        let reset = vec(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        let vid = vec(&ComplexMatrix::identity(2));
        // E(X) = Tr(X)|0⟩⟨0|
        let want = ComplexMatrix::from_inner(&reset * vid.adjoint());
        assert!((&e - &want).max_abs() < 1e-12);
        let r = channel_report(&e, 2);
        assert!(r.min_choi_eigenvalue >= -1e-12);
    }
}
