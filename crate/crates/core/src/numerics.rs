// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] stores its entries column-major (the nalgebra layout),
//! which makes [`vec`] a plain copy of the storage: `vec(A)` stacks the
//! columns of `A`, so `vec(ABC) = (Cᵀ ⊗ A) vec(B)`. Every superoperator
//! matrix in this crate acts on vectors produced by [`vec`].
//!
//! Accuracy contracts:
//! - [`hermitian_eig`] reconstructs its input within `1e-10 · ‖H‖₂` and
//!   returns eigenvectors orthonormal within `1e-10`.
//! - [`largest_singular_value`] has relative accuracy `1e-10`.
//! - [`matrix_exp`] uses Padé scaling-and-squaring (Al-Mohy and Higham,
//!   orders 3 to 13), relative accuracy `1e-10` for `‖M‖₂ ≤ 50`.
//!   Superoperators are not normal, so no eigendecomposition is involved.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix, column-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) ", self.rows(), self.cols())?;
        f.debug_list().entries(self.0.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>())).finish()
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::Dimension("matrix must have positive dimensions".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::try_from_inner(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &ComplexVector, v: &ComplexVector) -> Self {
        Self(u * v.adjoint())
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &ComplexVector) -> Self {
        Self::outer(psi, psi)
    }

    pub fn try_from_inner(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Dimension("matrix must have positive dimensions".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self(m))
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    /// Hilbert-Schmidt (Frobenius) norm `‖A‖₂ = √Tr(A†A)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        &self.0 * v
    }

    /// Expectation value `Tr(A B)`, without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let n = self.rows();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Commutator `[A, B] = AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// Anticommutator `{A, B} = AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) + &(b * a)
}

/// Kronecker product; the block `(i, j)` of the result is `a[i,j] · b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut it = factors.iter();
    let first = it.next().cloned().unwrap_or_else(|| ComplexMatrix::identity(1));
    it.fold(first, |acc, f| kron(&acc, f))
}

/// Column-stacking vectorization.
pub fn vec(a: &ComplexMatrix) -> ComplexVector {
    DVector::from_column_slice(a.0.as_slice())
}

/// Inverse of [`vec`] for a `d × d` matrix.
pub fn unvec(v: &ComplexVector, d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d || d == 0 {
        return Err(Error::Dimension(format!("unvec: length {} is not {}² ", v.len(), d)));
    }
    Ok(ComplexMatrix(DMatrix::from_column_slice(d, d, v.as_slice())))
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors.0;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let s = C64::new(f(lam), 0.0);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `E_max − E_min`.
    pub fn spread(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn eigenvector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.0.column(k).into_owned()
    }
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before factorization, so deviations from Hermiticity up to rounding are
/// absorbed.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::Dimension(format!("hermitian_eig needs a square matrix, got {}x{}", h.rows(), h.cols())));
    }
    let sym = h.hermitian_part();
    let eig = sym.0.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = h.rows();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum { eigenvalues, eigenvectors: ComplexMatrix(eigenvectors) })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = h.hermitian_part().0.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.0.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `σ_max(M) = √λ_max(M†M)`, the induced 2-norm of `M`.
pub fn largest_singular_value(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Thin SVD `M = U Σ V†` with singular values in descending order.
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let s = m.0.clone().svd(true, true);
    let u = s.u.expect("requested U");
    let v_t = s.v_t.expect("requested V†");
    let k = s.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s.singular_values[b].total_cmp(&s.singular_values[a]));
    let u_sorted = DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, order[j])]);
    let v_sorted = DMatrix::from_fn(v_t.ncols(), k, |i, j| v_t[(order[j], i)].conj());
    Svd {
        u: ComplexMatrix(u_sorted),
        singular_values: order.iter().map(|&j| s.singular_values[j]).collect(),
        v: ComplexMatrix(v_sorted),
    }
}

/// Matrix exponential `e^M`.
pub fn matrix_exp(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "matrix_exp needs a square matrix");
    ComplexMatrix(m.0.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_matrix(rng: &mut impl Rng, r: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn sz() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).frobenius_norm()
    }

    #[test]
    fn kron_identity_and_diagonal_cases() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(kron(&sz(), &ComplexMatrix::identity(2)), expected);
    }

    #[test]
    fn kron_sigma_x_pair_is_antidiagonal() {
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(kron(&sx(), &sx()), expected);
        // vec(σx B σx) swaps both indices of B
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let lhs = vec(&(&(&sx() * &b) * &sx()));
        let rhs = kron(&sx().transpose(), &sx()).mul_vec(&vec(&b));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.as_slice(), &[c(4.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn vec_stacks_columns() {
        let (a, b, cc, d) = (c(1.0, 0.0), c(2.0, 0.5), c(3.0, 0.0), c(4.0, -1.0));
        let m = ComplexMatrix::from_rows(&[vec![a, cc], vec![b, d]]).unwrap();
        assert_eq!(vec(&m).as_slice(), &[a, b, cc, d]);
    }

    #[test]
    fn unvec_inverts_vec_and_rejects_bad_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng, 3, 3);
        assert_eq!(unvec(&vec(&m), 3).unwrap(), m);
        assert!(matches!(unvec(&vec(&m), 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn vec_kron_identity_holds_for_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(2..=4);
            let a = random_matrix(&mut rng, n, n);
            let b = random_matrix(&mut rng, n, n);
            let cm = random_matrix(&mut rng, n, n);
            let lhs = vec(&(&(&a * &b) * &cm));
            let rhs = kron(&cm.transpose(), &a).mul_vec(&vec(&b));
            assert!((&lhs - &rhs).norm() <= 1e-12 * lhs.norm());
        }
    }

    #[test]
    fn rejects_non_finite_and_ragged_input() {
        assert!(matches!(ComplexMatrix::from_real_rows(&[&[1.0, f64::NAN]]), Err(Error::NonFinite(_))));
        assert!(matches!(ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[1.0]]), Err(Error::Dimension(_))));
    }

    #[test]
    fn pauli_spectra() {
        let s = hermitian_eig(&sx()).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14 && (s.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = hermitian_eig(&sz()).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        // eigenvectors are the standard basis up to phase
        assert!((s.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((s.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_spin_ising_drift_spectrum() {
        // E(s1, s2) = −(s1 + s2) + ½ (s1 + s2)², enumerated by hand: {0, 0, 0, 4}
        let diag: Vec<f64> = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .map(|&(s1, s2): &(f64, f64)| -(s1 + s2) + 0.5 * (s1 + s2) * (s1 + s2))
            .collect();
        let s = hermitian_eig(&ComplexMatrix::from_real_diagonal(&diag)).unwrap();
        let expected = [0.0, 0.0, 0.0, 4.0];
        for (got, want) in s.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_reconstructs_and_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 3, 5, 8, 16] {
            let a = random_matrix(&mut rng, n, n);
            let h = a.hermitian_part();
            let s = hermitian_eig(&h).unwrap();
            let norm2 = largest_singular_value(&h);
            assert!(dist(&s.reconstruct(), &h) <= 1e-10 * norm2);
            let v = &s.eigenvectors;
            assert!(dist(&(&v.adjoint() * v), &ComplexMatrix::identity(n)) <= 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn hermitian_eig_rejects_rectangular() {
        assert!(matches!(hermitian_eig(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn largest_singular_value_examples() {
        assert!((largest_singular_value(&ComplexMatrix::identity(3)) - 1.0).abs() < 1e-14);
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, -2.0]]).unwrap();
        assert!((largest_singular_value(&m) - 8f64.sqrt()).abs() < 1e-10 * 8f64.sqrt());
        let m = ComplexMatrix::from_diagonal(&[c(0.0, 3.0), c(-2.0, 0.0)]);
        assert!((largest_singular_value(&m) - 3.0).abs() < 1e-13);
    }

    fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let h = random_matrix(rng, n, n).hermitian_part();
        matrix_exp(&h.scale(I))
    }

    #[test]
    fn singular_value_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 4, 9] {
            let m = random_matrix(&mut rng, n, n);
            let u = random_unitary(&mut rng, n);
            let v = random_unitary(&mut rng, n);
            let s0 = largest_singular_value(&m);
            let s1 = largest_singular_value(&(&(&u * &m) * &v));
            assert!((s0 - s1).abs() <= 1e-10 * s0);
        }
    }

    #[test]
    fn svd_factors_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 4, 4);
        let s = svd(&m);
        let sigma = ComplexMatrix::from_real_diagonal(&s.singular_values);
        let back = &(&s.u * &sigma) * &s.v.adjoint();
        assert!(dist(&back, &m) < 1e-12);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn exp_closed_forms() {
        assert_eq!(matrix_exp(&ComplexMatrix::zeros(3, 3)), ComplexMatrix::identity(3));
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(dist(&matrix_exp(&nil), &want) < 1e-15);
        let theta = 0.3;
        let got = matrix_exp(&sz().scale(c(0.0, -theta)));
        let want = ComplexMatrix::from_diagonal(&[c(0.0, -theta).exp(), c(0.0, theta).exp()]);
        assert!(dist(&got, &want) < 1e-15);
    }

    /// Taylor series with enough terms that truncation is far below 1e-10
    /// relative, after pre-scaling so the series converges monotonically.
    fn exp_by_taylor(m: &ComplexMatrix) -> ComplexMatrix {
        let n = m.rows();
        let norm = m.frobenius_norm();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let a = m.scale_real(0.5f64.powi(squarings as i32));
        let mut term = ComplexMatrix::identity(n);
        let mut sum = ComplexMatrix::identity(n);
        for k in 1..40 {
            term = (&term * &a).scale_real(1.0 / k as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn exp_matches_taylor_oracle_for_hermitian_generators() {
        // −iH has a unitary exponential, so the squared-Taylor oracle is well conditioned
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [2, 4, 9] {
            let h = random_matrix(&mut rng, n, n).hermitian_part().scale_real(10.0);
            let m = h.scale(-I);
            let got = matrix_exp(&m);
            let want = exp_by_taylor(&m);
            assert!(dist(&got, &want) <= 1e-10 * want.frobenius_norm(), "n={n}");
        }
    }

    #[test]
    fn exp_times_exp_of_negative_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(2..=6);
            let mut m = random_matrix(&mut rng, n, n);
            let s = largest_singular_value(&m);
            m = m.scale_real(rng.gen_range(0.1..10.0) / s);
            let prod = &matrix_exp(&m) * &matrix_exp(&(-&m));
            assert!(dist(&prod, &ComplexMatrix::identity(n)) <= 1e-9);
        }
    }

    #[test]
    fn commutator_of_paulis() {
        // [σx, σz] = −2iσy
        let sy = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        let got = commutator(&sx(), &sz());
        assert!(dist(&got, &sy.scale(c(0.0, -2.0))) < 1e-15);
    }
}
