// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Schatten norms of operators and induced norms of superoperators.
//!
//! Superoperators are `d² × d²` matrices acting on column-stacked operators.
//! The induced 2→2 norm is exact (largest singular value). The induced 1→1
//! norm has no closed form; [`induced_11_estimate`] returns a certified lower
//! bound from a multistart ascent over rank-one probes `|u⟩⟨v|`, which are the
//! extreme points of the trace-norm unit ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lindblad::LindbladGenerator;
use crate::numerics::{hermitian_eigenvalues, largest_singular_value, singular_values, svd, unvec, vec, ComplexMatrix, ComplexVector, C64};

/// `‖A‖₁ = Tr √(A†A)`, the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Trace norm of a Hermitian matrix, `Σ|λ_i|` (cheaper than the SVD).
pub fn trace_norm_hermitian(a: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(a).iter().map(|e| e.abs()).sum()
}

/// Hilbert-Schmidt norm `‖A‖₂`.
pub fn hilbert_schmidt_norm(a: &ComplexMatrix) -> f64 {
    a.frobenius_norm()
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    0.5 * trace_norm(&(rho - sigma))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Exact,
    Estimated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub value: f64,
    pub method: NormMethod,
    /// Probe restarts behind an estimate (0 when exact).
    pub probes: usize,
    /// Known upper bound, when one accompanies an estimate.
    pub upper_bound: Option<f64>,
}

/// Exact `‖M‖_{2→2}`.
pub fn induced_22(m: &ComplexMatrix) -> NormReport {
    NormReport { value: largest_singular_value(m), method: NormMethod::Exact, probes: 0, upper_bound: None }
}

pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x5eed_11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Induced11Options {
    pub restarts: usize,
    pub seed: u64,
    /// Ascent steps per restart.
    pub max_iterations: usize,
    /// Stop a restart once the relative gain per step drops below this.
    pub tolerance: f64,
}

impl Default for Induced11Options {
    fn default() -> Self {
        Self { restarts: DEFAULT_RESTARTS, seed: DEFAULT_SEED, max_iterations: 200, tolerance: 1e-12 }
    }
}

/// Estimated `‖L‖_{1→1}` for a generator's superoperator.
pub fn induced_11_estimate(g: &LindbladGenerator, restarts: usize) -> NormReport {
    let options = Induced11Options { restarts, ..Default::default() };
    induced_11_estimate_with(&g.superoperator(), &options)
}

/// Estimated `‖M‖_{1→1}` for a `d² × d²` superoperator matrix.
///
/// Each restart starts from a random `X = |u⟩⟨v|` and alternates: take the
/// polar factor `W` of `Y = M(X)` so that `‖Y‖₁ = Re⟨W, Y⟩`, pull it back
/// with `G = M†(W)`, and move to `X = |a⟩⟨b|` for the top singular pair of
/// `G`. Each step can only increase `‖M(X)‖₁`. Restart `r` draws from its own
/// ChaCha stream, so the best value is nondecreasing in the restart count and
/// independent of the order in which restarts run.
pub fn induced_11_estimate_with(m: &ComplexMatrix, options: &Induced11Options) -> NormReport {
    let d = (m.rows() as f64).sqrt().round() as usize;
    assert_eq!(d * d, m.rows(), "superoperator must be d² × d²");
    let restarts = options.restarts.max(1);
    let adjoint = m.adjoint();
    let best = (0..restarts)
        .into_par_iter()
        .map(|r| probe_ascent(m, &adjoint, d, options, r as u64))
        .reduce(|| 0.0, f64::max);
    let upper = (d as f64).sqrt() * largest_singular_value(m);
    NormReport { value: best, method: NormMethod::Estimated, probes: restarts, upper_bound: Some(upper) }
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v.unscale(n)
}

fn apply_super(m: &ComplexMatrix, x: &ComplexMatrix, d: usize) -> ComplexMatrix {
    unvec(&m.mul_vec(&vec(x)), d).expect("superoperator matches operator dimension")
}

fn probe_ascent(m: &ComplexMatrix, adjoint: &ComplexMatrix, d: usize, options: &Induced11Options, restart: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(restart);
    let u = random_unit(&mut rng, d);
    let v = random_unit(&mut rng, d);
    let mut x = ComplexMatrix::outer(&u, &v);
    let mut best = 0.0;
    for _ in 0..options.max_iterations {
        let y = apply_super(m, &x, d);
        let dec = svd(&y);
        let value: f64 = dec.singular_values.iter().sum();
        let gain = value - best;
        best = f64::max(best, value);
        if value == 0.0 || gain <= options.tolerance * value {
            break;
        }
        let w = &dec.u * &dec.v.adjoint();
        let g = apply_super(adjoint, &w, d);
        let top = svd(&g);
        x = ComplexMatrix::outer(&top.u.as_inner().column(0).into_owned(), &top.v.as_inner().column(0).into_owned());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{hamiltonian_superoperator, DensityMatrix};
    use crate::numerics::{ONE, ZERO};

    fn ket(v: &[C64]) -> ComplexVector {
        ComplexVector::from_column_slice(v)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn trace_norm_of_states_and_differences() {
        let zero = DensityMatrix::from_ket(&ket(&[ONE, ZERO])).unwrap();
        let minus = DensityMatrix::from_ket(&ket(&[ONE, -ONE])).unwrap();
        assert!((trace_norm(zero.matrix()) - 1.0).abs() < 1e-14);
        let diff = zero.matrix() - minus.matrix();
        assert!((trace_norm(&diff) - 2f64.sqrt()).abs() < 1e-14);
        assert!((trace_distance(zero.matrix(), minus.matrix()) - 0.5 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(trace_distance(zero.matrix(), zero.matrix()), 0.0);
    }

    #[test]
    fn trace_norm_of_hermitian_is_sum_of_abs_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..6 {
            let a = random_matrix(&mut rng, n);
            let h = a.hermitian_part();
            let expect: f64 = hermitian_eigenvalues(&h).iter().map(|e| e.abs()).sum();
            assert!((trace_norm(&h) - expect).abs() < 1e-12);
            assert!((trace_norm_hermitian(&h) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn schatten_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 3, 4, 8] {
            for _ in 0..20 {
                let a = random_matrix(&mut rng, n);
                let one = trace_norm(&a);
                let two = hilbert_schmidt_norm(&a);
                assert!(two <= one + 1e-12);
                assert!(one <= (n as f64).sqrt() * two + 1e-12);
            }
        }
    }

    #[test]
    fn identity_superoperator_has_unit_norms() {
        let id = ComplexMatrix::identity(9);
        assert_eq!(induced_22(&id).value, 1.0);
        let est = induced_11_estimate_with(&id, &Induced11Options { restarts: 4, ..Default::default() });
        assert!((est.value - 1.0).abs() < 1e-12);
        assert_eq!(est.method, NormMethod::Estimated);
        assert_eq!(est.probes, 4);
    }

    #[test]
    fn unitary_generator_reaches_spectral_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2, 3, 4] {
            let h = random_matrix(&mut rng, d).hermitian_part();
            let ev = hermitian_eigenvalues(&h);
            let spread = ev[d - 1] - ev[0];
            let m = hamiltonian_superoperator(&h);
            assert!((induced_22(&m).value - spread).abs() < 1e-10);
            let est = induced_11_estimate_with(&m, &Induced11Options::default());
            assert!((est.value - spread).abs() < 1e-6 * spread, "d={d} {} vs {spread}", est.value);
        }
    }

    #[test]
    fn estimate_is_monotone_in_restarts() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_matrix(&mut rng, 9);
        let mut last = 0.0;
        for restarts in 1..12 {
            let est = induced_11_estimate_with(&m, &Induced11Options { restarts, ..Default::default() });
            assert!(est.value >= last);
            assert!(est.value <= est.upper_bound.unwrap() + 1e-9);
            last = est.value;
        }
    }

    #[test]
    fn estimate_is_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_matrix(&mut rng, 16);
        let a = induced_11_estimate_with(&m, &Induced11Options::default());
        let b = induced_11_estimate_with(&m, &Induced11Options::default());
        assert_eq!(a, b);
    }
}
