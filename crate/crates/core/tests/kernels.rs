use proptest::prelude::*;
use svp_core::analytic::{classify, constraints_for, Case};
use svp_core::hnf::{kernel_basis, kernel_lattice, reduction_matrix};
use svp_core::lattice::{sample_basis, SymmetryKind};
use svp_core::spectral::fourier_basis;

const KINDS: [SymmetryKind; 2] = [SymmetryKind::Cyclic, SymmetryKind::NegaCyclic];

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn analytic_columns_are_kernel_members_with_full_rank() {
    for kind in KINDS {
        for n in 2..=24 {
            let u = fourier_basis(kind, n).unwrap();
            for q in 0..n {
                for a in constraints_for(kind, n, q).unwrap() {
                    assert_eq!(a.rank(), a.cols(), "{kind} N={n} q={q} {}", a.origin);
                    for c in a.columns() {
                        let s = u.s_value(q, &c).unwrap().norm();
                        assert!(s <= 1e-9 * n as f64, "{kind} N={n} q={q} {} |s|={s}", a.origin);
                    }
                }
            }
        }
    }
}

#[test]
fn analytic_span_inside_hnf_span() {
    for kind in KINDS {
        for n in 2..=24 {
            for q in 0..n {
                let lat = kernel_lattice(kind, n, q).unwrap();
                for a in constraints_for(kind, n, q).unwrap() {
                    for c in a.columns() {
                        assert!(
                            lat.coordinates(&c).is_some(),
                            "{kind} N={n} q={q} {} column {c:?}",
                            a.origin
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn hnf_columns_are_kernel_members() {
    for kind in KINDS {
        for n in 2..=24 {
            let u = fourier_basis(kind, n).unwrap();
            for q in 0..n {
                let a = kernel_basis(kind, n, q).unwrap();
                assert_eq!(a.rank(), a.cols());
                for c in a.columns() {
                    assert!(u.s_value(q, &c).unwrap().norm() <= 1e-9 * n as f64);
                }
            }
        }
    }
}

#[test]
fn prime_dimension_closed_forms() {
    for n in (2..=23).filter(|&n| is_prime(n)) {
        for q in 1..n {
            let a = constraints_for(SymmetryKind::Cyclic, n, q).unwrap();
            assert_eq!(a.len(), 1);
            assert_eq!(a[0].columns(), vec![vec![1; n]]);
        }
        if n > 2 {
            let a = constraints_for(SymmetryKind::NegaCyclic, n, 0).unwrap();
            assert_eq!(a.len(), 1);
            let alt: Vec<i64> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
            assert_eq!(a[0].columns(), vec![alt]);
            assert_eq!(kernel_basis(SymmetryKind::NegaCyclic, n, 0).unwrap().cols(), 1);
        }
    }
}

#[test]
fn cyclic_kernels_depend_only_on_gcd() {
    for n in 2..=16 {
        for q in 1..n {
            for q2 in (q + 1)..n {
                if gcd(n, q) != gcd(n, q2) {
                    continue;
                }
                let a = kernel_lattice(SymmetryKind::Cyclic, n, q).unwrap();
                let b = kernel_lattice(SymmetryKind::Cyclic, n, q2).unwrap();
                for c in a.basis().columns() {
                    assert!(b.coordinates(&c).is_some());
                }
                for c in b.basis().columns() {
                    assert!(a.coordinates(&c).is_some());
                }
            }
        }
    }
}

#[test]
fn classification_is_total() {
    for kind in KINDS {
        for n in 2..=24 {
            for q in 0..n {
                let label = classify(kind, n, q).unwrap();
                if kind == SymmetryKind::NegaCyclic && n.is_power_of_two() {
                    assert_eq!(label.case, Case::NegaI);
                    assert!(constraints_for(kind, n, q).unwrap().is_empty());
                }
            }
        }
    }
}

#[test]
fn reduction_matrix_rejects_bad_input() {
    assert!(reduction_matrix(SymmetryKind::Cyclic, 6, 6).is_err());
    assert!(reduction_matrix(SymmetryKind::NegaCyclic, 1, 0).is_err());
    assert!(kernel_basis(SymmetryKind::Cyclic, 4, 4).is_err());
}

fn kind_strategy() -> impl Strategy<Value = SymmetryKind> {
    prop_oneof![Just(SymmetryKind::Cyclic), Just(SymmetryKind::NegaCyclic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Every integer combination of kernel columns stays in the kernel.
    #[test]
    fn combinations_stay_in_kernel(
        kind in kind_strategy(),
        n in 2usize..=16,
        q_frac in 0.0f64..1.0,
        m in prop::collection::vec(-4i64..=3, 16),
    ) {
        let q = ((q_frac * n as f64) as usize).min(n - 1);
        let a = kernel_basis(kind, n, q).unwrap();
        let u = fourier_basis(kind, n).unwrap();
        let v = a.apply(&m[..a.cols()]).unwrap();
        let scale = v.iter().map(|x| x.abs()).max().unwrap_or(0).max(1) as f64;
        prop_assert!(u.s_value(q, &v).unwrap().norm() <= 1e-9 * n as f64 * scale);
        let lat = kernel_lattice(kind, n, q).unwrap();
        let coords = lat.coordinates(&v);
        prop_assert!(coords.is_some());
        if a.origin == "hnf" {
            prop_assert_eq!(coords, Some(m[..a.cols()].to_vec()));
        }
    }

    /// Reduced energies agree with lattice energies of the lifted vector.
    #[test]
    fn reduced_energy_identity(
        kind in kind_strategy(),
        n in 2usize..=12,
        q_frac in 0.0f64..1.0,
        seed in any::<u64>(),
        m in prop::collection::vec(-6i64..=6, 12),
    ) {
        let q = ((q_frac * n as f64) as usize).min(n - 1);
        let g = sample_basis(kind, seed, n).unwrap().gram();
        for a in constraints_for(kind, n, q).unwrap() {
            let f = svp_core::hamiltonian::reduce_gram(&g, &a).unwrap();
            let m = &m[..a.cols()];
            let lhs = f.form.quadratic_form(m);
            let rhs = g.quadratic_form(&a.apply(m).unwrap());
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1e-12));
        }
    }
}
