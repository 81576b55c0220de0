// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Concrete control systems: a damped qubit, dissipative Bell-state
//! preparation, and an Ising register thermalized by a Davies generator.
//!
//! Multi-qubit operators use the convention that qubit 1 is the leftmost
//! (most significant) Kronecker factor, so `|01⟩` is basis index 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{ControlSystem, DensityMatrix, Dissipator, DissipatorConvention, JumpTerm, LindbladGenerator};
use crate::numerics::{hermitian_eig, kron_all, ComplexMatrix, ComplexVector, C64, I, ONE, ZERO};

pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    /// `|0⟩⟨1|`.
    pub fn lowering() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    /// `op` acting on qubit `site` (0-based) of an `n`-qubit register.
    pub fn on_site(op: &ComplexMatrix, site: usize, n: usize) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> =
            (0..n).map(|k| if k == site { op.clone() } else { ComplexMatrix::identity(2) }).collect();
        kron_all(&factors)
    }
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::InvalidParameter(format!("{name} = {v} must be finite and non-negative")));
    }
    Ok(())
}

fn minus_ket() -> ComplexVector {
    ComplexVector::from_column_slice(&[ONE, -ONE]).unscale(2f64.sqrt())
}

/// `H = −ωσz + f(t)σx` with amplitude damping `γ·D[σ₋]` (factor-two form),
/// prepared in `|−⟩` and steered towards `|0⟩`.
pub fn make_single_qubit(omega: f64, gamma: f64) -> Result<ControlSystem> {
    check_rate("omega", omega)?;
    check_rate("gamma", gamma)?;
    let generator = LindbladGenerator::new(
        pauli::z().scale_real(-omega),
        Dissipator::new(vec![JumpTerm::new(pauli::lowering(), gamma)?], DissipatorConvention::FactorTwo),
    )?;
    let initial = DensityMatrix::from_ket(&minus_ket())?;
    let target = DensityMatrix::from_ket(&ComplexVector::from_column_slice(&[ONE, ZERO]))?;
    ControlSystem::new(generator, vec![pauli::x()], initial, target)
}

/// Bell basis: `β₀ = Φ⁺`, `β₁ = Ψ⁺`, `β₂ = Φ⁻`, `β₃ = Ψ⁻` (the singlet).
pub fn bell_state(k: usize) -> ComplexVector {
    let s = 1.0 / 2f64.sqrt();
    let amps: [f64; 4] = match k {
        0 => [s, 0.0, 0.0, s],
        1 => [0.0, s, s, 0.0],
        2 => [s, 0.0, 0.0, -s],
        3 => [0.0, s, -s, 0.0],
        _ => panic!("Bell index {k} out of range"),
    };
    ComplexVector::from_iterator(4, amps.iter().map(|&a| C64::new(a, 0.0)))
}

/// Where the Bell-model jumps `|x⟩⟨β_k|`, k = 0, 1, 2, deposit population.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellJumpTarget {
    /// `|x⟩ = |β₃⟩`: the singlet is the unique fixed point.
    #[default]
    Singlet,
    /// `|x⟩ = |00⟩`. The singlet then decouples from everything else (it is a
    /// drift eigenstate, annihilated by `σ₁ˣ + σ₂ˣ`, and never fed by a jump),
    /// so it cannot be reached from `|−−⟩` and a second fixed point appears.
    Vacuum,
}

/// Two qubits with `H₀ = ω(σ₁ˣσ₂ˣ + σ₁ᶻσ₂ᶻ)` and jumps `|β₃⟩⟨β_k|`, k = 0, 1, 2,
/// so that `|β₃⟩` is the unique fixed point. Controls are `σ₁ˣ + σ₂ˣ`, or the
/// three independent terms `σ₁ˣ, σ₂ˣ, σ₁ˣσ₂ˣ` when `extended_controls` is set.
pub fn make_bell(omega: f64, gamma: f64, extended_controls: bool) -> Result<ControlSystem> {
    make_bell_with(omega, gamma, extended_controls, BellJumpTarget::Singlet)
}

pub fn make_bell_with(omega: f64, gamma: f64, extended_controls: bool, jumps: BellJumpTarget) -> Result<ControlSystem> {
    check_rate("omega", omega)?;
    check_rate("gamma", gamma)?;
    let x1 = pauli::on_site(&pauli::x(), 0, 2);
    let x2 = pauli::on_site(&pauli::x(), 1, 2);
    let z1 = pauli::on_site(&pauli::z(), 0, 2);
    let z2 = pauli::on_site(&pauli::z(), 1, 2);
    let drift = (&(&x1 * &x2) + &(&z1 * &z2)).scale_real(omega);
    let sink = match jumps {
        BellJumpTarget::Singlet => bell_state(3),
        BellJumpTarget::Vacuum => ComplexVector::from_column_slice(&[ONE, ZERO, ZERO, ZERO]),
    };
    let terms = (0..3)
        .map(|k| JumpTerm::new(ComplexMatrix::outer(&sink, &bell_state(k)), gamma))
        .collect::<Result<Vec<_>>>()?;
    let generator = LindbladGenerator::new(drift, Dissipator::new(terms, DissipatorConvention::FactorTwo))?;
    let controls = if extended_controls { vec![x1.clone(), x2.clone(), &x1 * &x2] } else { vec![&x1 + &x2] };
    let minus = minus_ket();
    let initial = DensityMatrix::from_ket(&kron_vec(&minus, &minus))?;
    let target = DensityMatrix::from_ket(&bell_state(3))?;
    ControlSystem::new(generator, controls, initial, target)
}

fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

/// Longitudinal Ising register `H₀ = −Σ h_i σᶻ_i + Σ_{i,j} J_ij σᶻ_i σᶻ_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingSpec {
    pub n_spins: usize,
    pub fields: Vec<f64>,
    pub couplings: Vec<Vec<f64>>,
    /// Keep the `i = j` terms of the coupling sum (a constant shift).
    #[serde(default = "default_true")]
    pub include_diagonal: bool,
}

fn default_true() -> bool {
    true
}

pub const MAX_SPINS: usize = 4;

impl IsingSpec {
    /// All-to-all antiferromagnet with `h_i = 1`, `J_ij = 1/N`.
    pub fn extensive_antiferromagnet(n: usize) -> Self {
        Self {
            n_spins: n,
            fields: vec![1.0; n],
            couplings: vec![vec![1.0 / n as f64; n]; n],
            include_diagonal: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_spins;
        if n == 0 || n > MAX_SPINS {
            return Err(Error::InvalidParameter(format!("n_spins = {n} must lie in 1..={MAX_SPINS}")));
        }
        if self.fields.len() != n || self.couplings.len() != n || self.couplings.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("fields and couplings must be sized for {n} spins")));
        }
        if self.fields.iter().chain(self.couplings.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Ising parameters"));
        }
        for i in 0..n {
            for j in 0..i {
                if (self.couplings[i][j] - self.couplings[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!("couplings not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    /// Diagonal of `H₀` in the computational basis.
    pub fn energies(&self) -> Vec<f64> {
        let n = self.n_spins;
        (0..self.dim())
            .map(|s| {
                let z: Vec<f64> = (0..n).map(|i| if (s >> (n - 1 - i)) & 1 == 0 { 1.0 } else { -1.0 }).collect();
                let mut e = -(0..n).map(|i| self.fields[i] * z[i]).sum::<f64>();
                for i in 0..n {
                    for j in 0..n {
                        if i != j || self.include_diagonal {
                            e += self.couplings[i][j] * z[i] * z[j];
                        }
                    }
                }
                e
            })
            .collect()
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.energies())
    }

    /// Transverse control `−Σ σˣ_i`.
    pub fn control(&self) -> ComplexMatrix {
        let n = self.n_spins;
        let mut c = ComplexMatrix::zeros(self.dim(), self.dim());
        for k in 0..n {
            c += &pauli::on_site(&pauli::x(), k, n);
        }
        -&c
    }
}

/// Ohmic bath with exponential cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub beta: f64,
    #[serde(default = "default_omega_c")]
    pub omega_c: f64,
    #[serde(default = "default_eta_g2")]
    pub eta_g2: f64,
}

pub const DEFAULT_OMEGA_C: f64 = 8.0 * std::f64::consts::PI;
pub const DEFAULT_ETA_G2: f64 = 1e-3;

fn default_omega_c() -> f64 {
    DEFAULT_OMEGA_C
}

fn default_eta_g2() -> f64 {
    DEFAULT_ETA_G2
}

impl BathSpec {
    pub fn new(beta: f64) -> Self {
        Self { beta, omega_c: DEFAULT_OMEGA_C, eta_g2: DEFAULT_ETA_G2 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("omega_c", self.omega_c), ("eta_g2", self.eta_g2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("bath {name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// `γ(ω) = 2πω e^{−|ω|/ω_c} ηg² / (1 − e^{−βω})`, with the limit `2πηg²/β`
/// at `ω = 0`.
pub fn davies_rate(omega: f64, bath: &BathSpec) -> f64 {
    let bose = if omega == 0.0 { 1.0 / bath.beta } else { omega / -(-bath.beta * omega).exp_m1() };
    (2.0 * std::f64::consts::PI * bose * (-omega.abs() / bath.omega_c).exp() * bath.eta_g2).max(0.0)
}

/// Jump operators `L_{ω,k} = Σ_{ε_b − ε_a = ω} Π_a A_k Π_b` for a set of
/// coupling operators `A_k`, with `Π_a` the eigenprojectors of `H₀`.
#[derive(Clone, Debug)]
pub struct BohrDecomposition {
    /// Distinct Bohr frequencies, ascending.
    pub frequencies: Vec<f64>,
    /// `jump_ops[f][k]` is `L_{frequencies[f], k}`.
    pub jump_ops: Vec<Vec<ComplexMatrix>>,
}

/// Groups sorted values whose distance to the group's first member is within `tol`.
fn cluster(sorted: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[start] > tol {
            groups.push((start, i));
            start = i;
        }
    }
    groups
}

impl BohrDecomposition {
    pub fn new(h0: &ComplexMatrix, couplings: &[ComplexMatrix]) -> Result<Self> {
        let spec = hermitian_eig(h0)?;
        let tol = 1e-9 * spec.spread().max(1.0);
        let d = h0.rows();
        let levels = cluster(&spec.eigenvalues, tol);
        let energies: Vec<f64> =
            levels.iter().map(|&(a, b)| spec.eigenvalues[a..b].iter().sum::<f64>() / (b - a) as f64).collect();
        let projectors: Vec<ComplexMatrix> = levels
            .iter()
            .map(|&(a, b)| {
                let mut p = ComplexMatrix::zeros(d, d);
                for k in a..b {
                    p += &ComplexMatrix::projector(&spec.eigenvector(k));
                }
                p
            })
            .collect();

        let mut gaps: Vec<(f64, usize, usize)> = Vec::new();
        for a in 0..levels.len() {
            for b in 0..levels.len() {
                gaps.push((energies[b] - energies[a], a, b));
            }
        }
        gaps.sort_by(|x, y| x.0.total_cmp(&y.0));
        let values: Vec<f64> = gaps.iter().map(|g| g.0).collect();
        let mut frequencies = Vec::new();
        let mut jump_ops = Vec::new();
        for (lo, hi) in cluster(&values, tol) {
            let ops: Vec<ComplexMatrix> = couplings
                .iter()
                .map(|a_k| {
                    let mut l = ComplexMatrix::zeros(d, d);
                    for &(_, a, b) in &gaps[lo..hi] {
                        l += &(&(&projectors[a] * a_k) * &projectors[b]);
                    }
                    l
                })
                .collect();
            if ops.iter().any(|l| l.max_abs() > 1e-12) {
                frequencies.push(values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64);
                jump_ops.push(ops);
            }
        }
        Ok(Self { frequencies, jump_ops })
    }

    pub fn operator(&self, frequency: usize, site: usize) -> &ComplexMatrix {
        &self.jump_ops[frequency][site]
    }
}

/// Ising register coupled through `σˣ_k` to independent Ohmic baths, in the
/// Davies weak-coupling form, with the transverse-field control `−f(t)Σσˣ`.
/// Starts in `|−⟩^⊗N`; the target is the Gibbs state of `H₀`.
pub fn make_ising_davies(spec: &IsingSpec, bath: &BathSpec) -> Result<ControlSystem> {
    spec.validate()?;
    bath.validate()?;
    let n = spec.n_spins;
    let h0 = spec.hamiltonian();
    let couplings: Vec<ComplexMatrix> = (0..n).map(|k| pauli::on_site(&pauli::x(), k, n)).collect();
    let bohr = BohrDecomposition::new(&h0, &couplings)?;
    let mut terms = Vec::new();
    for (f, &omega) in bohr.frequencies.iter().enumerate() {
        let rate = davies_rate(omega, bath);
        for l in &bohr.jump_ops[f] {
            if l.max_abs() > 1e-12 {
                terms.push(JumpTerm::new(l.clone(), rate)?);
            }
        }
    }
    let generator = LindbladGenerator::new(h0.clone(), Dissipator::new(terms, DissipatorConvention::Half))?;
    let minus = minus_ket();
    let mut psi = minus.clone();
    for _ in 1..n {
        psi = kron_vec(&psi, &minus);
    }
    let initial = DensityMatrix::from_ket(&psi)?;
    let target = gibbs_state(&h0, bath.beta)?;
    ControlSystem::new(generator, vec![spec.control()], initial, target)
}

/// `e^{−βH₀} / Tr e^{−βH₀}`, computed from the spectrum with the ground
/// energy shifted to zero.
pub fn gibbs_state(h0: &ComplexMatrix, beta: f64) -> Result<DensityMatrix> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be finite and non-negative")));
    }
    let spec = hermitian_eig(h0)?;
    let e_min = spec.min();
    let z: f64 = spec.eigenvalues.iter().map(|e| (-beta * (e - e_min)).exp()).sum();
    DensityMatrix::new(spec.map(|e| (-beta * (e - e_min)).exp() / z))
}

/// Serializable model selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    SingleQubit {
        omega: f64,
        gamma: f64,
    },
    Bell {
        omega: f64,
        gamma: f64,
        #[serde(default)]
        extended_controls: bool,
        #[serde(default)]
        jumps: BellJumpTarget,
    },
    IsingDavies {
        ising: IsingSpec,
        bath: BathSpec,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<ControlSystem> {
        match self {
            Self::SingleQubit { omega, gamma } => make_single_qubit(*omega, *gamma),
            Self::Bell { omega, gamma, extended_controls, jumps } => make_bell_with(*omega, *gamma, *extended_controls, *jumps),
            Self::IsingDavies { ising, bath } => make_ising_davies(ising, bath),
        }
    }

    /// Names accepted by [`ModelSpec::with_parameter`].
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            Self::SingleQubit { .. } | Self::Bell { .. } => &["omega", "gamma"],
            Self::IsingDavies { .. } => &["beta", "temperature", "omega_c", "eta_g2"],
        }
    }

    /// Copy with one scalar parameter replaced. `temperature` sets `β = 1/T`.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut s = self.clone();
        match (&mut s, name) {
            (Self::SingleQubit { omega, .. } | Self::Bell { omega, .. }, "omega") => *omega = value,
            (Self::SingleQubit { gamma, .. } | Self::Bell { gamma, .. }, "gamma") => *gamma = value,
            (Self::IsingDavies { bath, .. }, "beta") => bath.beta = value,
            (Self::IsingDavies { bath, .. }, "temperature") => bath.beta = 1.0 / value,
            (Self::IsingDavies { bath, .. }, "omega_c") => bath.omega_c = value,
            (Self::IsingDavies { bath, .. }, "eta_g2") => bath.eta_g2 = value,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "model has no sweep parameter `{name}` (expected one of {:?})",
                    self.parameter_names()
                )))
            }
        }
        Ok(s)
    }
}
