// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad generators `L ρ = −i[H, ρ] + D(ρ)` and their superoperators.
//!
//! Two dissipator conventions are accepted. `FactorTwo` reads a term as
//! `γ(2LρL† − L†Lρ − ρL†L)`, `Half` as `γ(LρL† − ½{L†L, ρ})`. Internally
//! everything runs in the `Half` form, so a `FactorTwo` rate `γ` becomes
//! `2γ`.

mod propagate;

pub use propagate::{
    from_hermitian_coords, hermitian_coords, is_cptp, propagate, propagate_from, real_superoperator, CptpReport,
    Propagator, RealMatrix, RealVector,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    anticommutator, commutator, hermitian_eigenvalues, kron, ComplexMatrix, ComplexVector, C64, I,
};

pub const STATE_HERMITIAN_TOL: f64 = 1e-10;
pub const STATE_TRACE_TOL: f64 = 1e-10;
pub const STATE_POSITIVITY_TOL: f64 = 1e-8;
pub const DRIFT_HERMITIAN_TOL: f64 = 1e-12;
pub const COMMUTATION_TOL: f64 = 1e-10;

/// Validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("density matrix must be square, got {}x{}", m.rows(), m.cols())));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let defect = m.hermiticity_defect();
        if defect > STATE_HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {defect:.3e})")));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = hermitian_eigenvalues(&m)[0];
        if min_eig < -STATE_POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn from_ket(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("ket has zero or non-finite norm".into()));
        }
        let unit = psi.unscale(norm);
        Self::new(ComplexMatrix::projector(&unit))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// Wraps a matrix already known to be a state, symmetrizing rounding noise.
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// One dissipative channel: jump operator and its rate.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpTerm {
    pub operator: ComplexMatrix,
    pub rate: f64,
}

impl JumpTerm {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("jump rate {rate} must be finite and non-negative")));
        }
        if !operator.is_square() {
            return Err(Error::Dimension("jump operator must be square".into()));
        }
        Ok(Self { operator, rate })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipatorConvention {
    /// `γ(2LρL† − L†Lρ − ρL†L)`.
    FactorTwo,
    /// `γ(LρL† − ½{L†L, ρ})`.
    Half,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dissipator {
    pub terms: Vec<JumpTerm>,
    pub convention: DissipatorConvention,
}

impl Dissipator {
    pub fn new(terms: Vec<JumpTerm>, convention: DissipatorConvention) -> Self {
        Self { terms, convention }
    }

    pub fn none() -> Self {
        Self::new(Vec::new(), DissipatorConvention::Half)
    }

    /// Rate of a term in the `Half` convention.
    pub fn half_rate(&self, term: &JumpTerm) -> f64 {
        match self.convention {
            DissipatorConvention::FactorTwo => 2.0 * term.rate,
            DissipatorConvention::Half => term.rate,
        }
    }

    /// `(operator, Half-convention rate)` pairs.
    pub fn normalized_terms(&self) -> impl Iterator<Item = (&ComplexMatrix, f64)> + '_ {
        self.terms.iter().map(move |t| (&t.operator, self.half_rate(t)))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.rate == 0.0)
    }
}

/// Time-independent Lindblad generator `−i[H₀, ·] + D`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladGenerator {
    drift: ComplexMatrix,
    dissipator: Dissipator,
    dim: usize,
}

impl LindbladGenerator {
    pub fn new(drift: ComplexMatrix, dissipator: Dissipator) -> Result<Self> {
        if !drift.is_square() {
            return Err(Error::Dimension("drift Hamiltonian must be square".into()));
        }
        if !drift.is_finite() {
            return Err(Error::NonFinite("drift Hamiltonian"));
        }
        let deviation = drift.hermiticity_defect();
        if deviation > DRIFT_HERMITIAN_TOL * drift.max_abs().max(1.0) {
            return Err(Error::NotHermitian { what: "drift Hamiltonian", deviation });
        }
        let dim = drift.rows();
        for t in &dissipator.terms {
            if t.operator.rows() != dim {
                return Err(Error::Dimension(format!("jump operator is {}x{}, drift is {dim}x{dim}", t.operator.rows(), t.operator.cols())));
            }
        }
        Ok(Self { drift, dissipator, dim })
    }

    /// Closed-system generator `−i[H, ·]`.
    pub fn unitary(h: ComplexMatrix) -> Result<Self> {
        Self::new(h, Dissipator::none())
    }

    pub fn drift(&self) -> &ComplexMatrix {
        &self.drift
    }

    pub fn dissipator(&self) -> &Dissipator {
        &self.dissipator
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same dissipator, different Hamiltonian.
    pub fn with_drift(&self, drift: ComplexMatrix) -> Result<Self> {
        Self::new(drift, self.dissipator.clone())
    }

    /// Superoperator matrix acting on column-stacked `vec(ρ)`.
    pub fn superoperator(&self) -> ComplexMatrix {
        build_superoperator(self)
    }

    /// `L ρ`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply(self, rho)
    }
}

/// `−i(I ⊗ H − Hᵀ ⊗ I)`, the superoperator of `−i[H, ·]`.
pub fn hamiltonian_superoperator(h: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(h.rows());
    (&kron(&id, h) - &kron(&h.transpose(), &id)).scale(-I)
}

/// Superoperator of `L ↦ γ(LρL† − ½{L†L, ρ})`.
pub fn jump_superoperator(l: &ComplexMatrix, half_rate: f64) -> ComplexMatrix {
    let d = l.rows();
    let id = ComplexMatrix::identity(d);
    let ldl = &l.adjoint() * l;
    let mut m = kron(&l.conjugate(), l);
    let anti = &kron(&id, &ldl) + &kron(&ldl.transpose(), &id);
    m = &m - &anti.scale_real(0.5);
    m.scale_real(half_rate)
}

/// Superoperator of the dissipator alone.
pub fn dissipator_superoperator(dissipator: &Dissipator, dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim * dim, dim * dim);
    for (l, rate) in dissipator.normalized_terms() {
        if rate != 0.0 {
            m += &jump_superoperator(l, rate);
        }
    }
    m
}

/// `M` with `M vec(ρ) = vec(−i[H₀, ρ] + D(ρ))`.
pub fn build_superoperator(g: &LindbladGenerator) -> ComplexMatrix {
    let mut m = hamiltonian_superoperator(&g.drift);
    m += &dissipator_superoperator(&g.dissipator, g.dim);
    m
}

/// `dρ/dt = −i[H₀, ρ] + Σ γ(LρL† − ½{L†L, ρ})`, evaluated on operators.
pub fn apply(g: &LindbladGenerator, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.rows() != g.dim || rho.cols() != g.dim {
        return Err(Error::Dimension(format!("operator is {}x{}, generator acts on {}x{}", rho.rows(), rho.cols(), g.dim, g.dim)));
    }
    let mut out = commutator(&g.drift, rho).scale(-I);
    for (l, rate) in g.dissipator.normalized_terms() {
        if rate == 0.0 {
            continue;
        }
        let ldl = &l.adjoint() * l;
        let sandwich = &(l * rho) * &l.adjoint();
        let term = &sandwich - &anticommutator(&ldl, rho).scale_real(0.5);
        out += &term.scale_real(rate);
    }
    Ok(out)
}

/// Generator plus control directions, initial and target states.
#[derive(Clone, Debug)]
pub struct ControlSystem {
    pub generator: LindbladGenerator,
    pub controls: Vec<ComplexMatrix>,
    pub initial: DensityMatrix,
    pub target: DensityMatrix,
}

impl ControlSystem {
    /// Every control must commute with the initial state.
    pub fn new(
        generator: LindbladGenerator,
        controls: Vec<ComplexMatrix>,
        initial: DensityMatrix,
        target: DensityMatrix,
    ) -> Result<Self> {
        let d = generator.dim();
        if initial.dim() != d || target.dim() != d {
            return Err(Error::Dimension(format!("states must be {d}x{d}")));
        }
        for (k, h) in controls.iter().enumerate() {
            if h.rows() != d || h.cols() != d {
                return Err(Error::Dimension(format!("control {k} must be {d}x{d}")));
            }
            let deviation = h.hermiticity_defect();
            if deviation > DRIFT_HERMITIAN_TOL * h.max_abs().max(1.0) {
                return Err(Error::NotHermitian { what: "control Hamiltonian", deviation });
            }
            let residual = commutator(h, initial.matrix()).frobenius_norm();
            if residual > COMMUTATION_TOL {
                return Err(Error::Precondition(format!(
                    "control {k} does not commute with the initial state (‖[H, ρ₀]‖ = {residual:.3e})"
                )));
            }
        }
        Ok(Self { generator, controls, initial, target })
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    /// `H₀ + Σ_c f_c H_c`.
    pub fn hamiltonian_at(&self, amplitudes: &[f64]) -> ComplexMatrix {
        let mut h = self.generator.drift().clone();
        for (hc, &f) in self.controls.iter().zip(amplitudes) {
            if f != 0.0 {
                h += &hc.scale_real(f);
            }
        }
        h
    }

    /// Generator `L_t` for constant amplitudes.
    pub fn generator_at(&self, amplitudes: &[f64]) -> Result<LindbladGenerator> {
        self.generator.with_drift(self.hamiltonian_at(amplitudes))
    }

    /// Same system with another initial state (controls must still commute).
    pub fn with_initial(&self, initial: DensityMatrix) -> Result<Self> {
        Self::new(self.generator.clone(), self.controls.clone(), initial, self.target.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{hermitian_eig, largest_singular_value, vec, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    fn sz() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    fn damped_qubit(omega: f64, gamma: f64) -> LindbladGenerator {
        let d = Dissipator::new(vec![JumpTerm::new(sigma_minus(), gamma).unwrap()], DissipatorConvention::FactorTwo);
        LindbladGenerator::new(sz().scale_real(-omega), d).unwrap()
    }

    fn random_state(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let p = &a * &a.adjoint();
        let tr = p.trace().re;
        p.scale_real(1.0 / tr)
    }

    fn random_generator(rng: &mut impl Rng, d: usize) -> LindbladGenerator {
        let h = ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).hermitian_part();
        let terms = (0..2)
            .map(|_| {
                let l = ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                JumpTerm::new(l, rng.gen_range(0.0..1.0)).unwrap()
            })
            .collect();
        LindbladGenerator::new(h, Dissipator::new(terms, DissipatorConvention::Half)).unwrap()
    }

    #[test]
    fn unitary_qubit_superoperator_spectrum() {
        let m = build_superoperator(&LindbladGenerator::unitary(sz()).unwrap());
        // −i(I⊗σz − σzᵀ⊗I) is diagonal with entries 0, 2i, −2i, 0 in vec order
        let diag: Vec<C64> = (0..4).map(|k| m[(k, k)]).collect();
        assert_eq!(diag, vec![ZERO, C64::new(0.0, 2.0), C64::new(0.0, -2.0), ZERO]);
        assert!((largest_singular_value(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn damped_qubit_norm_matches_block_structure() {
        let (omega, gamma) = (1.0_f64, 0.1_f64);
        let sigma = largest_singular_value(&build_superoperator(&damped_qubit(omega, gamma)));
        let want = (gamma * gamma + 4.0 * omega * omega).sqrt().max(2.0 * 2f64.sqrt() * gamma);
        assert!((sigma - want).abs() < 1e-12);
        assert!((sigma - 4.01f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_generator_has_zero_superoperator() {
        let g = LindbladGenerator::unitary(ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(build_superoperator(&g), ComplexMatrix::zeros(9, 9));
    }

    #[test]
    fn amplitude_damping_action() {
        let gamma = 0.7;
        let g = LindbladGenerator::new(
            ComplexMatrix::zeros(2, 2),
            Dissipator::new(vec![JumpTerm::new(sigma_minus(), gamma).unwrap()], DissipatorConvention::FactorTwo),
        )
        .unwrap();
        let excited = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let got = apply(&g, &excited).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[2.0 * gamma, -2.0 * gamma]);
        assert!((&got - &want).frobenius_norm() < 1e-15);
        let ground = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(apply(&g, &ground).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn superoperator_agrees_with_direct_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2, 3, 4] {
            let g = random_generator(&mut rng, d);
            let m = build_superoperator(&g);
            let rho = random_state(&mut rng, d);
            let lhs = m.mul_vec(&vec(&rho));
            let rhs = vec(&apply(&g, &rho).unwrap());
            assert!((&lhs - &rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_and_hermiticity_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for d in [2, 3, 4] {
            let g = random_generator(&mut rng, d);
            let m = build_superoperator(&g);
            let vid = vec(&ComplexMatrix::identity(d));
            let row = vid.adjoint() * m.as_inner();
            assert!(row.iter().all(|z| z.norm() < 1e-10));
            let rho = random_state(&mut rng, d);
            let out = apply(&g, &rho).unwrap();
            assert!(out.trace().norm() < 1e-10);
            assert!(out.is_hermitian(1e-10));
        }
    }

    #[test]
    fn conventions_agree_after_rate_doubling() {
        let gamma = 0.37;
        let f2 = Dissipator::new(vec![JumpTerm::new(sigma_minus(), gamma).unwrap()], DissipatorConvention::FactorTwo);
        let half = Dissipator::new(vec![JumpTerm::new(sigma_minus(), 2.0 * gamma).unwrap()], DissipatorConvention::Half);
        let a = build_superoperator(&LindbladGenerator::new(sz(), f2).unwrap());
        let b = build_superoperator(&LindbladGenerator::new(sz(), half).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        let not_herm = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(LindbladGenerator::unitary(not_herm), Err(Error::NotHermitian { .. })));
        assert!(JumpTerm::new(sigma_minus(), -1.0).is_err());
        let g = damped_qubit(1.0, 0.1);
        assert!(matches!(apply(&g, &ComplexMatrix::identity(3)), Err(Error::Dimension(_))));
        let three = Dissipator::new(vec![JumpTerm::new(ComplexMatrix::identity(3), 1.0).unwrap()], DissipatorConvention::Half);
        assert!(LindbladGenerator::new(sz(), three).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5])).is_err());
        let psi = ComplexVector::from_vec(vec![ONE, ONE]);
        let rho = DensityMatrix::from_ket(&psi).unwrap();
        assert!((rho.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        let spec = hermitian_eig(DensityMatrix::maximally_mixed(4).matrix()).unwrap();
        assert!(spec.eigenvalues.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn control_system_requires_commuting_initial_state() {
        let g = damped_qubit(1.0, 0.1);
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let minus = DensityMatrix::from_ket(&ComplexVector::from_vec(vec![ONE, -ONE])).unwrap();
        let ground = DensityMatrix::from_ket(&ComplexVector::from_vec(vec![ONE, ZERO])).unwrap();
        assert!(ControlSystem::new(g.clone(), vec![sx.clone()], minus, ground.clone()).is_ok());
        let err = ControlSystem::new(g, vec![sx], ground.clone(), ground).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
