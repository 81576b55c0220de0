// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lower bounds on the time needed to steer `ρ₀` to `ρ_T`.
//!
//! Every bound has the form `T ≥ ‖ρ_T − ρ₀‖₁ / Λ`, where `Λ` is a norm of the
//! part of the generator that can move the initial state. When the controls
//! commute with `ρ₀` they can be subtracted out, leaving a denominator built
//! from the drift and the dissipator alone.

use serde::{Deserialize, Serialize};

use crate::control::Schedule;
use crate::error::{Error, Result};
use crate::lindblad::{ControlSystem, LindbladGenerator, COMMUTATION_TOL};
use crate::norms::{induced_11_estimate_with, induced_22, trace_norm, Induced11Options};
use crate::numerics::{commutator, hermitian_eig, ComplexMatrix, ComplexVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Multistart estimate of `‖L‖_{1→1}` (a lower bound on the norm, so the
    /// resulting time bound is not certified).
    Induced11Estimate,
    /// `√d · ‖L‖_{2→2}`, an upper bound on `‖L‖_{1→1}`.
    SqrtDInduced22,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// `‖ρ_T − ρ₀‖₁`.
    pub numerator: f64,
    pub denominator: f64,
    /// Lower bound on the preparation time.
    pub bound: f64,
    pub norm_kind: NormKind,
    pub notes: String,
}

impl BoundReport {
    fn new(numerator: f64, denominator: f64, norm_kind: NormKind, notes: String) -> Result<Self> {
        if !(denominator > 0.0) {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self { numerator, denominator, bound: numerator / denominator, norm_kind, notes })
    }
}

/// Norm of a generator's superoperator under `kind`.
pub fn generator_norm(g: &LindbladGenerator, kind: NormKind) -> f64 {
    let m = g.superoperator();
    match kind {
        NormKind::SqrtDInduced22 => (g.dim() as f64).sqrt() * induced_22(&m).value,
        NormKind::Induced11Estimate => induced_11_estimate_with(&m, &Induced11Options::default()).value,
    }
}

fn numerator(sys: &ControlSystem) -> f64 {
    trace_norm(&(sys.target.matrix() - sys.initial.matrix()))
}

/// `T ≥ ‖ρ_T − ρ₀‖₁ / ‖L‖` with `L = −i[H₀, ·] + D`: valid for every control
/// schedule because the controls commute with `ρ₀`.
pub fn bound_schedule_independent(sys: &ControlSystem, kind: NormKind) -> Result<BoundReport> {
    let denominator = generator_norm(&sys.generator, kind);
    BoundReport::new(numerator(sys), denominator, kind, "drift and dissipator, controls excluded".into())
}

/// Reference flow `L̃_t = −i g(t)[H̃, ·]` that leaves `ρ₀` fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceGenerator {
    pub hamiltonian: ComplexMatrix,
    /// `g` on each schedule interval.
    pub amplitudes: Vec<f64>,
}

impl ReferenceGenerator {
    /// `L̃ = 0`.
    pub fn zero(dim: usize, intervals: usize) -> Self {
        Self { hamiltonian: ComplexMatrix::zeros(dim, dim), amplitudes: vec![0.0; intervals] }
    }

    /// `L̃_t = −i f_c(t)[H_c, ·]` for control `c` of `sys` driven by `schedule`.
    pub fn following_control(sys: &ControlSystem, schedule: &Schedule, control: usize) -> Result<Self> {
        if control >= sys.n_controls() || schedule.n_controls() != sys.n_controls() {
            return Err(Error::Dimension(format!("control index {control} out of range")));
        }
        Ok(Self {
            hamiltonian: sys.controls[control].clone(),
            amplitudes: (0..schedule.intervals()).map(|j| schedule.amplitude(j, control)).collect(),
        })
    }
}

/// `H₀ + Σ_c f_c H_c − g H̃`, folding `H̃` into a control with the identical
/// operator so that exact cancellation reproduces `H₀` bit for bit.
fn residual_hamiltonian(sys: &ControlSystem, amps: &[f64], reference: &ComplexMatrix, g: f64) -> ComplexMatrix {
    let mut coefs: Vec<(f64, &ComplexMatrix)> = sys.controls.iter().zip(amps).map(|(h, &f)| (f, h)).collect();
    match coefs.iter_mut().find(|(_, h)| *h == reference) {
        Some(entry) => entry.0 -= g,
        None => coefs.push((-g, reference)),
    }
    let mut h = sys.generator.drift().clone();
    for (c, op) in coefs {
        if c != 0.0 {
            h += &op.scale_real(c);
        }
    }
    h
}

/// `T ≥ ‖ρ_T − ρ₀‖₁ / max_t ‖L_t − L̃_t‖` for a reference flow fixing `ρ₀`.
pub fn bound_general(
    sys: &ControlSystem,
    reference: &ReferenceGenerator,
    schedule: &Schedule,
    kind: NormKind,
) -> Result<BoundReport> {
    schedule.validate()?;
    if schedule.n_controls() != sys.n_controls() || reference.amplitudes.len() != schedule.intervals() {
        return Err(Error::Dimension("schedule, reference and system disagree".into()));
    }
    if reference.hamiltonian.rows() != sys.dim() || !reference.hamiltonian.is_square() {
        return Err(Error::Dimension("reference Hamiltonian has the wrong size".into()));
    }
    if !reference.hamiltonian.is_hermitian(1e-12 * reference.hamiltonian.max_abs().max(1.0)) {
        return Err(Error::NotHermitian { what: "reference Hamiltonian", deviation: reference.hamiltonian.hermiticity_defect() });
    }
    let defect = commutator(&reference.hamiltonian, sys.initial.matrix()).frobenius_norm();
    if defect > COMMUTATION_TOL {
        return Err(Error::Precondition(format!("reference flow moves the initial state (‖[H̃, ρ₀]‖ = {defect:.3e})")));
    }
    let mut denominator: f64 = 0.0;
    for j in 0..schedule.intervals() {
        let h = residual_hamiltonian(sys, schedule.interval_amplitudes(j), &reference.hamiltonian, reference.amplitudes[j]);
        denominator = denominator.max(generator_norm(&sys.generator.with_drift(h)?, kind));
    }
    BoundReport::new(numerator(sys), denominator, kind, "maximum over schedule intervals of ‖L_t − L̃_t‖".into())
}

/// `T ≥ ‖ρ_T − ρ₀‖₁ / ((1/T)∫‖L_t‖ dt)` with the full controlled generator,
/// using `√d · ‖L_t‖_{2→2}` on each interval.
pub fn bound_trajectory_avg(sys: &ControlSystem, schedule: &Schedule) -> Result<BoundReport> {
    schedule.validate()?;
    if schedule.n_controls() != sys.n_controls() {
        return Err(Error::Dimension("schedule and system disagree on the number of controls".into()));
    }
    let kind = NormKind::SqrtDInduced22;
    let n = schedule.intervals();
    let mut sum = 0.0;
    for j in 0..n {
        sum += generator_norm(&sys.generator_at(schedule.interval_amplitudes(j))?, kind);
    }
    BoundReport::new(numerator(sys), sum / n as f64, kind, "interval average of √d·‖L_t‖₂→₂".into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumeratorConvention {
    /// Numerator 1 for `|0⟩` versus `|−⟩`.
    Unit,
    /// `‖|0⟩⟨0| − |−⟩⟨−|‖₁ = √2`.
    Definitional,
}

/// `numerator / (√2 · √(γ² + 4ω²))` for the damped qubit.
pub fn single_qubit_analytic_bound(omega: f64, gamma: f64, convention: NumeratorConvention) -> Result<f64> {
    if !(omega >= 0.0 && gamma >= 0.0 && omega.is_finite() && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega = {omega}, gamma = {gamma} must be non-negative")));
    }
    if omega == 0.0 && gamma == 0.0 {
        return Err(Error::Divergent);
    }
    let numerator = match convention {
        NumeratorConvention::Unit => 1.0,
        NumeratorConvention::Definitional => 2f64.sqrt(),
    };
    Ok(numerator / (2f64.sqrt() * (gamma * gamma + 4.0 * omega * omega).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleQubitRegime {
    /// The coherence block `|γ + 2iω|` sets the largest singular value.
    Coherence,
    /// The population block `2√2γ` dominates (`γ > 2ω/√7`).
    Population,
}

/// Singular-value anatomy of the damped-qubit generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleQubitAnalysis {
    pub coherence_norm: f64,
    pub population_norm: f64,
    pub regime: SingleQubitRegime,
    /// `√2 · max(coherence, population)`, the `√d‖L‖₂→₂` denominator.
    pub denominator: f64,
    /// `√2 · √(γ² + 4ω²)`, the closed-form denominator.
    pub analytic_denominator: f64,
    /// `γ = 2ω/√7` where the two blocks cross.
    pub crossover_gamma: f64,
}

pub fn single_qubit_analysis(omega: f64, gamma: f64) -> SingleQubitAnalysis {
    let coherence_norm = (gamma * gamma + 4.0 * omega * omega).sqrt();
    let population_norm = 2.0 * 2f64.sqrt() * gamma;
    let regime =
        if population_norm > coherence_norm { SingleQubitRegime::Population } else { SingleQubitRegime::Coherence };
    SingleQubitAnalysis {
        coherence_norm,
        population_norm,
        regime,
        denominator: 2f64.sqrt() * coherence_norm.max(population_norm),
        analytic_denominator: 2f64.sqrt() * coherence_norm,
        crossover_gamma: 2.0 * omega / 7f64.sqrt(),
    }
}

/// Closed-system comparison between the Bures-angle speed limit and the
/// generator-norm bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedSystemReport {
    pub trace_norm_distance: f64,
    /// `√(2(1 − |⟨ψ_T|ψ₀⟩|))`.
    pub bures_distance: f64,
    /// `Var_{ψ_T}(H₀)`.
    pub variance: f64,
    /// `E_max − E_min`, which equals `‖L‖_{1→1}` for `L = −i[H₀, ·]`.
    pub spectral_spread: f64,
    /// `D_B / √Var`; `None` when the variance vanishes between distinct states.
    pub reference_bound: Option<f64>,
    /// `‖ρ_T − ρ₀‖₁ / (E_max − E_min)`; `None` when the spread vanishes between distinct states.
    pub norm_bound: Option<f64>,
    /// `‖ρ_T − ρ₀‖₁ ≤ 2D_B ≤ √2‖ρ_T − ρ₀‖₁`.
    pub chain_holds: bool,
    /// `√Var ≤ (E_max − E_min)/2`.
    pub popoviciu_holds: bool,
    /// `norm_bound ≤ reference_bound` (trivially true when the latter diverges).
    pub comparison_holds: bool,
}

impl ClosedSystemReport {
    pub fn reference_divergent(&self) -> bool {
        self.reference_bound.is_none()
    }

    pub fn all_hold(&self) -> bool {
        self.chain_holds && self.popoviciu_holds && self.comparison_holds
    }
}

/// Ratio `a/b` with `0/0 = 0` and `x/0 = None` for `x > 0`.
fn ratio(a: f64, b: f64) -> Option<f64> {
    if b > 0.0 {
        Some(a / b)
    } else if a == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

pub fn closed_system_report(
    psi0: &ComplexVector,
    psi_t: &ComplexVector,
    h0: &ComplexMatrix,
) -> Result<ClosedSystemReport> {
    let d = h0.rows();
    if psi0.len() != d || psi_t.len() != d {
        return Err(Error::Dimension("states and Hamiltonian differ in dimension".into()));
    }
    for psi in [psi0, psi_t] {
        if (psi.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("state vector has norm {}", psi.norm())));
        }
    }
    let spectrum = hermitian_eig(h0)?;
    let rho0 = ComplexMatrix::projector(psi0);
    let rho_t = ComplexMatrix::projector(psi_t);
    let trace_norm_distance = trace_norm(&(&rho_t - &rho0));
    let overlap = psi_t.dotc(psi0).norm().min(1.0);
    let bures_distance = (2.0 * (1.0 - overlap)).sqrt();
    let h_psi = h0.mul_vec(psi_t);
    let mean = psi_t.dotc(&h_psi).re;
    let variance = (h_psi.norm_squared() - mean * mean).max(0.0);
    let spectral_spread = spectrum.spread();
    let reference_bound = ratio(bures_distance, variance.sqrt());
    let norm_bound = ratio(trace_norm_distance, spectral_spread);

    let slack = 1e-12;
    let chain_holds = trace_norm_distance <= 2.0 * bures_distance + slack
        && 2.0 * bures_distance <= 2f64.sqrt() * trace_norm_distance + slack;
    let popoviciu_holds = variance.sqrt() <= 0.5 * spectral_spread + slack;
    let comparison_holds = match (norm_bound, reference_bound) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a <= b * (1.0 + slack) + slack,
    };
    Ok(ClosedSystemReport {
        trace_norm_distance,
        bures_distance,
        variance,
        spectral_spread,
        reference_bound,
        norm_bound,
        chain_holds,
        popoviciu_holds,
        comparison_holds,
    })
}
