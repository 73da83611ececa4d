//! Six-dimensional nega-cyclic examples with two-digit generators. Expected
//! energies were computed independently in floating point from the
//! generators as printed.

use svp_core::analytic::constraints_for;
use svp_core::hamiltonian::{build_hamiltonian, reduce_gram};
use svp_core::lattice::{StructuredBasis, SymmetryKind};
use svp_core::oracle::brute_force_shortest;
use svp_core::spectral::{eigenvalues, fourier_basis};

const B: [f64; 6] = [0.010, -0.45, -0.50, -0.67, -0.36, -0.18];
const C: [f64; 6] = [-0.12, -0.34, 0.087, 0.51, 0.56, 0.53];

fn setup(generator: &[f64]) -> (svp_core::lattice::GramMatrix, usize) {
    let basis = StructuredBasis::new(SymmetryKind::NegaCyclic, generator.to_vec()).unwrap();
    let gram = basis.gram();
    let u = fourier_basis(SymmetryKind::NegaCyclic, 6).unwrap();
    let principal = eigenvalues(&gram, &u).unwrap().principal;
    (gram, principal)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn generator_b_structure() {
    let (gram, principal) = setup(&B);
    assert_eq!(principal, 0);
    let mats = constraints_for(SymmetryKind::NegaCyclic, 6, principal).unwrap();
    assert_eq!(mats.len(), 1);
    assert_eq!(mats[0].prime, Some(3));
    assert_eq!(
        mats[0].to_rows(),
        &[[1, 0], [0, 1], [-1, 0], [0, -1], [1, 0], [0, 1]].map(|r| r.to_vec())
    );
    assert!(close(gram.get(0, 0), 1.0635));
}

#[test]
fn generator_b_energies() {
    let (gram, principal) = setup(&B);
    let a = &constraints_for(SymmetryKind::NegaCyclic, 6, principal).unwrap()[0];
    let f = reduce_gram(&gram, a).unwrap();
    assert!(close(f.form.get(0, 0), 0.0723));
    assert!(close(f.form.get(1, 1), 0.0723));
    assert!(f.form.get(0, 1).abs() < 1e-12);
    assert!(close(gram.vector_length_sq(&[2, -1, -1, 1, 0, 1]).unwrap(), 0.5622));
    assert_eq!(a.apply(&[1, 0]).unwrap(), vec![1, 0, -1, 0, 1, 0]);

    let h = build_hamiltonian(&f.form, 3, gram.get(0, 0)).unwrap();
    let state = h.layout.encode(&[1, 0]).unwrap();
    assert!(close(h.energy(state), 0.0723));
    assert_eq!(h.energy(h.zero_state()), gram.get(0, 0));
    assert_eq!(h.layout.total_qubits(), 6);

    // the kernel vector (1,0,-1,0,1,0) is in the box, so it bounds the oracle
    let oracle = brute_force_shortest(&gram, 3).unwrap();
    assert!(oracle.length_sq <= 0.0723 + 1e-12);
}

#[test]
fn generator_c_energies() {
    let (gram, principal) = setup(&C);
    let a = &constraints_for(SymmetryKind::NegaCyclic, 6, principal).unwrap()[0];
    let f = reduce_gram(&gram, a).unwrap();
    assert_eq!(principal, 0);
    assert!(close(f.form.get(0, 0), 0.681027));
    assert!(close(gram.vector_length_sq(&[1, -1, 1, 0, -1, 1]).unwrap(), 0.878445));
}
