// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Self-check suite: numerical invariants of the library, each reported with
//! its worst residual and tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    bound_general, bound_schedule_independent, closed_system_report, single_qubit_analysis, NormKind,
    ReferenceGenerator,
};
use crate::control::Schedule;
use crate::error::Result;
use crate::lindblad::{
    is_cptp, jump_superoperator, ControlSystem, Dissipator, DissipatorConvention, JumpTerm, LindbladGenerator,
};
use crate::models::{
    davies_rate, make_bell, make_ising_davies, make_single_qubit, pauli, BathSpec, BohrDecomposition, IsingSpec,
};
use crate::norms::{induced_11_estimate_with, induced_22, trace_norm, Induced11Options};
use crate::numerics::{hermitian_eigenvalues, ComplexMatrix, ComplexVector, C64};

#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub seed: u64,
    /// Test hook: builds the damped qubit with the wrong dissipator
    /// convention, which the suite must catch.
    pub corrupt_convention: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst residual over all instances (for boolean checks, failures count).
    pub residual: f64,
    pub tolerance: f64,
    /// Instances examined.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

struct Suite {
    outcomes: Vec<CheckOutcome>,
}

impl Suite {
    /// Records a residual check: passes when every residual is `≤ tolerance`.
    fn residual(&mut self, name: &'static str, tolerance: f64, residuals: impl IntoIterator<Item = f64>) {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        let mut finite = true;
        for r in residuals {
            finite &= r.is_finite();
            worst = worst.max(r);
            count += 1;
        }
        self.outcomes.push(CheckOutcome { name, passed: finite && worst <= tolerance, residual: worst, tolerance, count });
    }

    /// Records a boolean check: the residual is the number of failures.
    fn all(&mut self, name: &'static str, results: impl IntoIterator<Item = bool>) {
        let (mut count, mut failures) = (0, 0);
        for ok in results {
            count += 1;
            failures += usize::from(!ok);
        }
        self.outcomes.push(CheckOutcome { name, passed: failures == 0, residual: failures as f64, tolerance: 0.0, count });
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_generator(rng: &mut ChaCha8Rng, d: usize) -> LindbladGenerator {
    let h = random_matrix(rng, d).hermitian_part();
    let jumps = rng.gen_range(0..=3);
    let terms = (0..jumps).map(|_| JumpTerm::new(random_matrix(rng, d), rng.gen_range(0.0..2.0)).unwrap()).collect();
    LindbladGenerator::new(h, Dissipator::new(terms, DissipatorConvention::Half)).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v.unscale(n)
}

fn single_qubit(omega: f64, gamma: f64, corrupt: bool) -> Result<ControlSystem> {
    let mut sys = make_single_qubit(omega, gamma)?;
    if corrupt {
        let mut d = sys.generator.dissipator().clone();
        d.convention = DissipatorConvention::Half;
        sys.generator = LindbladGenerator::new(sys.generator.drift().clone(), d)?;
    }
    Ok(sys)
}

pub const APP_B_GENERATORS: usize = 200;

/// Runs every invariant check.
pub fn run_checks(opts: &CheckOptions) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut suite = Suite { outcomes: Vec::new() };
    let corrupt = opts.corrupt_convention;

    // induced 1→1 estimate never exceeds √d‖L‖₂→₂
    let probe = Induced11Options { restarts: 8, ..Default::default() };
    let mut excess = Vec::new();
    for k in 0..APP_B_GENERATORS {
        let d = 2 + k % 3;
        let m = random_generator(&mut rng, d).superoperator();
        let est = induced_11_estimate_with(&m, &probe);
        excess.push(est.value - (d as f64).sqrt() * induced_22(&m).value);
    }
    suite.residual("induced_11_within_sqrt_d_induced_22", 1e-9, excess);

    let mut spread = Vec::new();
    for k in 0..60 {
        let d = 2 + k % 3;
        let h = random_matrix(&mut rng, d).hermitian_part();
        let ev = hermitian_eigenvalues(&h);
        let g = LindbladGenerator::unitary(h).unwrap();
        spread.push((induced_22(&g.superoperator()).value - (ev[d - 1] - ev[0])).abs());
    }
    suite.residual("unitary_induced_22_equals_spread", 1e-10, spread);

    let mut chain = Vec::new();
    for k in 0..60 {
        let d = 2 + k % 7;
        let a = random_matrix(&mut rng, d);
        let (one, two) = (trace_norm(&a), a.frobenius_norm());
        chain.push(two <= one + 1e-12 && one <= (d as f64).sqrt() * two + 1e-12);
    }
    suite.all("schatten_chain", chain);

    // conventions: γ·(2LρL† − {L†L, ρ}) equals 2γ·(LρL† − ½{L†L, ρ})
    let gamma = 0.37;
    let damped = single_qubit(0.0, gamma, corrupt)?;
    let reference = jump_superoperator(&pauli::lowering(), 2.0 * gamma);
    suite.residual(
        "dissipator_convention_equivalence",
        1e-15,
        [(&damped.generator.superoperator() - &reference).max_abs()],
    );

    let mut sigma = Vec::new();
    for gamma in [0.01, 0.1, 0.5, 1.0, 3.0] {
        let sys = single_qubit(1.0, gamma, corrupt)?;
        let b = bound_schedule_independent(&sys, NormKind::SqrtDInduced22)?;
        sigma.push((b.denominator - single_qubit_analysis(1.0, gamma).denominator).abs());
    }
    suite.residual("single_qubit_singular_value_formula", 1e-10, sigma);

    let qubit = single_qubit(1.0, 0.5, corrupt)?;
    let bell = make_bell(1.0, 0.5, false)?;
    suite.residual(
        "fixed_points_qubit_and_bell",
        1e-10,
        [&qubit, &bell].map(|s| s.generator.apply(s.target.matrix()).unwrap().frobenius_norm()),
    );

    let mut gibbs = Vec::new();
    // relative residual of γ(−ω)/γ(ω) against e^{−βω}
    let mut kms = Vec::new();
    let mut completeness = Vec::new();
    for n in 2..=4 {
        let spec = IsingSpec::extensive_antiferromagnet(n);
        let couplings: Vec<_> = (0..n).map(|k| pauli::on_site(&pauli::x(), k, n)).collect();
        let bohr = BohrDecomposition::new(&spec.hamiltonian(), &couplings)?;
        for k in 0..n {
            let mut total = ComplexMatrix::zeros(spec.dim(), spec.dim());
            for f in 0..bohr.frequencies.len() {
                total += bohr.operator(f, k);
            }
            completeness.push((&total - &couplings[k]).max_abs());
        }
        for beta in [0.01, 0.1, 1.0, 10.0] {
            let bath = BathSpec::new(beta);
            let sys = make_ising_davies(&spec, &bath)?;
            gibbs.push(sys.generator.apply(sys.target.matrix())?.frobenius_norm());
            for &w in &bohr.frequencies {
                let up = davies_rate(w, &bath);
                if up > 0.0 {
                    kms.push((davies_rate(-w, &bath) / up / (-beta * w).exp() - 1.0).abs());
                }
            }
        }
    }
    suite.residual("gibbs_fixed_points", 1e-8, gibbs);
    suite.residual("kms_detailed_balance", 1e-12, kms);
    suite.residual("bohr_completeness", 1e-10, completeness);

    let mut closed = Vec::new();
    for d in [2, 4, 8] {
        for _ in 0..100 {
            let h = random_matrix(&mut rng, d).hermitian_part();
            let r = closed_system_report(&random_state(&mut rng, d), &random_state(&mut rng, d), &h)?;
            closed.push(r.all_hold());
        }
    }
    suite.all("closed_system_comparison", closed);

    let mut choi = Vec::new();
    for _ in 0..10 {
        let rows = (0..20).map(|_| vec![rng.gen_range(-20.0..20.0)]).collect();
        let sched = Schedule::new(rng.gen_range(0.1..3.0), rows, 20.0)?;
        let r = is_cptp(&qubit, &sched)?;
        choi.push((-r.min_choi_eigenvalue).max(r.trace_residual));
    }
    suite.residual("propagator_cptp", 1e-8, choi);

    let mut regression = Vec::new();
    for sys in [&qubit, &bell] {
        let rows = (0..20).map(|_| vec![rng.gen_range(-20.0..20.0)]).collect();
        let sched = Schedule::new(1.0, rows, 20.0)?;
        let reference = ReferenceGenerator::following_control(sys, &sched, 0)?;
        let general = bound_general(sys, &reference, &sched, NormKind::SqrtDInduced22)?;
        let indep = bound_schedule_independent(sys, NormKind::SqrtDInduced22)?;
        regression.push(general.bound.to_bits() == indep.bound.to_bits());
    }
    suite.all("general_bound_reduces_to_schedule_independent", regression);

    Ok(CheckReport { outcomes: suite.outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_suite_passes() {
        let report = run_checks(&CheckOptions::default()).unwrap();
        for o in &report.outcomes {
            assert!(o.passed, "{o:?}");
        }
        assert!(report.get("induced_11_within_sqrt_d_induced_22").unwrap().count >= 200);
    }

    #[test]
    fn corrupted_convention_is_caught() {
        let report = run_checks(&CheckOptions { corrupt_convention: true, ..Default::default() }).unwrap();
        assert!(!report.passed());
        assert!(!report.get("dissipator_convention_equivalence").unwrap().passed);
    }
}
