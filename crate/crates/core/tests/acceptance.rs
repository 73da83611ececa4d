//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use svp_core::analytic::constraints_for;
use svp_core::bench::{compare_experiment, table1_experiment, ExperimentConfig};
use svp_core::cyclotomic::totient;
use svp_core::hamiltonian::reduce_gram;
use svp_core::hnf::{determinant, hnf, kernel_basis, kernel_lattice, mat_mul, to_bigint_matrix};
use svp_core::lattice::{sample_basis, StructuredBasis, SymmetryKind};
use svp_core::spectral::{energy_via_spectrum, eigenvalues, fourier_basis};
use svp_core::vqe::{
    expectation, expectation_and_gradient, optimize, run_circuit, AnsatzSpec, Gate,
    OptimizerConfig, StateVector,
};

const KINDS: [SymmetryKind; 2] = [SymmetryKind::Cyclic, SymmetryKind::NegaCyclic];

fn report(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration, limit: Duration) {
    let timely = elapsed <= limit;
    let verdict = if pass && timely { "PASS" } else { "FAIL" };
    println!(
        "[criterion {id}] {verdict} {name}: {detail} ({:.2}s, limit {}s)",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(timely, "criterion {id} exceeded its time limit");
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

#[test]
fn criterion_1_worked_example() {
    let start = Instant::now();
    let generator = vec![0.010, -0.45, -0.50, -0.67, -0.36, -0.18];
    let basis = StructuredBasis::new(SymmetryKind::NegaCyclic, generator).unwrap();
    let gram = basis.gram();
    let fourier = fourier_basis(SymmetryKind::NegaCyclic, 6).unwrap();
    let principal = eigenvalues(&gram, &fourier).unwrap().principal;
    let mats = constraints_for(SymmetryKind::NegaCyclic, 6, principal).unwrap();
    let expected: Vec<Vec<i64>> = vec![
        vec![1, 0],
        vec![0, 1],
        vec![-1, 0],
        vec![0, -1],
        vec![1, 0],
        vec![0, 1],
    ];
    let matrix_ok = mats.len() == 1 && mats[0].to_rows() == expected.as_slice();
    let f00 = mats
        .first()
        .map(|a| reduce_gram(&gram, a).unwrap().form.quadratic_form(&[1, 0]))
        .unwrap_or(f64::NAN);
    let full = gram.vector_length_sq(&[2, -1, -1, 1, 0, 1]).unwrap();
    let checks = [
        ("q*=0", principal == 0),
        ("6x2 matrix", matrix_ok),
        ("m=(1,0) energy 0.21+-0.02", within(f00, 0.21, 0.02)),
        ("n=(2,-1,-1,1,0,1) energy 0.86+-0.02", within(full, 0.86, 0.02)),
    ];
    let detail = format!(
        "q*={principal}, matrix {}, F00={f00:.4}, n-energy={full:.4}, failing: [{}]",
        if matrix_ok { "exact" } else { "differs" },
        checks
            .iter()
            .filter(|c| !c.1)
            .map(|c| c.0)
            .collect::<Vec<_>>()
            .join(", ")
    );
    report(
        1,
        "worked example",
        checks.iter().all(|c| c.1),
        &detail,
        start.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_kernel_correctness() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut scanned = 0u64;
    let mut members = 0u64;
    for kind in KINDS {
        for n in 2..=8usize {
            let fourier = fourier_basis(kind, n).unwrap();
            for q in 0..n {
                let lattice = kernel_lattice(kind, n, q).unwrap();
                let row = fourier.row(q).to_vec();
                let tol = 1e-9 * n as f64;
                let mut v = vec![-4i64; n];
                loop {
                    scanned += 1;
                    let s: num_complex::Complex64 =
                        row.iter().zip(&v).map(|(u, &x)| u * x as f64).sum();
                    let numeric = s.norm() <= tol;
                    let exact = lattice.coordinates(&v).is_some();
                    members += u64::from(exact);
                    if numeric != exact && mismatches.len() < 5 {
                        mismatches.push(format!("{kind} N={n} q={q} n={v:?}"));
                    }
                    let mut i = 0;
                    while i < n {
                        v[i] += 1;
                        if v[i] <= 3 {
                            break;
                        }
                        v[i] = -4;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
                for a in constraints_for(kind, n, q).unwrap() {
                    for c in a.columns() {
                        if lattice.coordinates(&c).is_none() {
                            mismatches.push(format!("{kind} N={n} q={q} analytic column {c:?}"));
                        }
                    }
                }
            }
        }
    }
    report(
        2,
        "kernel correctness",
        mismatches.is_empty(),
        &format!("{scanned} box vectors, {members} kernel members, mismatches {mismatches:?}"),
        start.elapsed(),
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_3_dimension_laws() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 2..=24usize {
        for q in 1..n {
            if num_integer::gcd(n, q) == 1 {
                let m = kernel_basis(SymmetryKind::Cyclic, n, q).unwrap().cols() as u64;
                if m != n as u64 - totient(n as u64).unwrap() {
                    failures.push(format!("cyclic N={n} q={q} M={m}"));
                }
            }
        }
        let m = kernel_basis(SymmetryKind::NegaCyclic, n, 0).unwrap().cols() as u64;
        if m != n as u64 - totient(2 * n as u64).unwrap() {
            failures.push(format!("nega N={n} M={m}"));
        }
    }
    for n in [2usize, 4, 8, 16] {
        if kernel_basis(SymmetryKind::NegaCyclic, n, 0).unwrap().cols() != 0 {
            failures.push(format!("nega N={n} not empty"));
        }
    }
    report(
        3,
        "dimension laws",
        failures.is_empty(),
        &format!("failures {failures:?}"),
        start.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_4_energy_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_spectral = 0.0f64;
    for _ in 0..1000 {
        let kind = KINDS[rng.gen_range(0..2)];
        let n = rng.gen_range(2..=12);
        let gram = sample_basis(kind, rng.gen(), n).unwrap().gram();
        let fourier = fourier_basis(kind, n).unwrap();
        let spectrum = eigenvalues(&gram, &fourier).unwrap();
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let a = energy_via_spectrum(&spectrum, &fourier, &v).unwrap();
        let b = gram.quadratic_form(&v);
        worst_spectral = worst_spectral.max((a - b).abs() / b.abs());
    }
    let mut worst_reduced = 0.0f64;
    let mut instances = 0;
    while instances < 1000 {
        let kind = KINDS[rng.gen_range(0..2)];
        let n = rng.gen_range(2..=12);
        let q = rng.gen_range(0..n);
        let a = if rng.gen_bool(0.5) {
            match constraints_for(kind, n, q).unwrap().into_iter().next() {
                Some(a) => a,
                None => continue,
            }
        } else {
            kernel_basis(kind, n, q).unwrap()
        };
        if a.cols() == 0 {
            continue;
        }
        let gram = sample_basis(kind, rng.gen(), n).unwrap().gram();
        let f = reduce_gram(&gram, &a).unwrap();
        let m: Vec<i64> = (0..a.cols()).map(|_| rng.gen_range(-6..=6)).collect();
        let lhs = f.form.quadratic_form(&m);
        let rhs = gram.quadratic_form(&a.apply(&m).unwrap());
        if rhs.abs() > 1e-12 {
            worst_reduced = worst_reduced.max((lhs - rhs).abs() / rhs.abs());
        }
        instances += 1;
    }
    report(
        4,
        "energy identities",
        worst_spectral <= 1e-8 && worst_reduced <= 1e-8,
        &format!("max rel err spectral {worst_spectral:.2e}, reduced {worst_reduced:.2e}"),
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_5_table1_statistic() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(SymmetryKind::NegaCyclic, 6, 3, 200, 7);
    let out = table1_experiment(&cfg).unwrap();
    let fraction = out.summary.fraction_gamma_1;
    let p90 = out.summary.p90_gamma.unwrap_or(f64::INFINITY);
    report(
        5,
        "kernel statistic N=6 K=3",
        (0.25..=0.50).contains(&fraction) && p90 < 12.0,
        &format!(
            "fraction in kernel {fraction:.3}, P90 gamma {p90:.3}, skipped {}",
            out.summary.skipped
        ),
        start.elapsed(),
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_6_vqe_comparison() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(SymmetryKind::NegaCyclic, 6, 3, 30, 7);
    let out = compare_experiment(&cfg).unwrap();
    let s = &out.summary;
    let fraction = s.fraction_lambda_lt_1.unwrap_or(0.0);
    let median = s.median_lambda.unwrap_or(f64::INFINITY);
    let ratio = s.mean_qubit_ratio.unwrap_or(0.0);
    report(
        6,
        "variational comparison N=6 K=3",
        out.records.len() >= 30 && fraction >= 0.5 && median < 1.0 && ratio >= 2.0,
        &format!(
            "{} lattices, fraction lambda<1 {fraction:.3}, median lambda {median:.3}, mean qubit ratio {ratio:.3}",
            out.records.len()
        ),
        start.elapsed(),
        Duration::from_secs(7200),
    );
}

#[test]
fn criterion_7_simulator_suite() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for n in 1..=6usize {
        let spec = AnsatzSpec::new(n, 3).unwrap();
        let params: Vec<f64> = (0..spec.parameter_count()).map(|_| rng.gen_range(0.0..6.3)).collect();
        let mut state = StateVector::zero(n).unwrap();
        for gate in spec.gates(&params).unwrap() {
            state.apply(gate).unwrap();
            if (state.norm_sqr() - 1.0).abs() > 1e-12 {
                failures.push(format!("norm drift after {gate:?}"));
            }
        }
        for q in 0..n {
            for gate in [Gate::Ry(2.0 * std::f64::consts::PI, q), Gate::Rz(2.0 * std::f64::consts::PI, q)] {
                let mut t = state.clone();
                t.apply(gate).unwrap();
                if (state.inner(&t).norm() - 1.0).abs() > 1e-10 {
                    failures.push(format!("{gate:?} is not identity up to phase"));
                }
            }
        }
    }
    for n in 1..=10usize {
        let spec = AnsatzSpec::new(n, 3).unwrap();
        let s = run_circuit(&spec, &vec![0.0; spec.parameter_count()]).unwrap();
        if (s.amplitudes()[0].norm() - 1.0).abs() > 1e-12 {
            failures.push(format!("zero-parameter circuit on {n} qubits"));
        }
    }
    for n in 1..=6usize {
        let spec = AnsatzSpec::new(n, 3).unwrap();
        let params: Vec<f64> = (0..spec.parameter_count()).map(|_| rng.gen_range(0.0..6.3)).collect();
        let table: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let state = run_circuit(&spec, &params).unwrap();
        let dim = 1 << n;
        let h = nalgebra::DMatrix::<num_complex::Complex64>::from_fn(dim, dim, |i, j| {
            num_complex::Complex64::new(if i == j { table[i] } else { 0.0 }, 0.0)
        });
        let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
        let dense = (psi.adjoint() * &h * &psi)[(0, 0)].re;
        if (dense - expectation(&state, &table).unwrap()).abs() > 1e-10 {
            failures.push(format!("dense expectation mismatch on {n} qubits"));
        }
        let (value, _) = expectation_and_gradient(&spec, &params, &table).unwrap();
        if (value - dense).abs() > 1e-10 {
            failures.push(format!("gradient pass expectation mismatch on {n} qubits"));
        }
    }
    let spec = AnsatzSpec::new(6, 3).unwrap();
    let table: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..10.0)).collect();
    let cfg = OptimizerConfig::default();
    let a = serde_json::to_string(&optimize(&table, &spec, 11, 100, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&optimize(&table, &spec, 11, 100, &cfg).unwrap()).unwrap();
    if a != b {
        failures.push("optimizer output differs between identical runs".into());
    }
    report(
        7,
        "simulator suite",
        failures.is_empty(),
        &format!("failures {failures:?}"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_8_hnf_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    for trial in 0..500 {
        let rows = rng.gen_range(1..=16);
        let cols = rng.gen_range(1..=16);
        let x: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-50..=50)).collect())
            .collect();
        let x = to_bigint_matrix(&x);
        let r = hnf(&x);
        if mat_mul(&x, &r.u) != r.h {
            failures.push(format!("trial {trial}: H != XU"));
        }
        let det: BigInt = determinant(&r.u);
        if !det.abs().is_one() {
            failures.push(format!("trial {trial}: det U = {det}"));
        }
    }
    report(
        8,
        "HNF exactness",
        failures.is_empty(),
        &format!("500 matrices up to 16x16, failures {failures:?}"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}
