//! Exhaustive shortest-vector search over the coefficient box
//! `[-2^{K-1}, 2^{K-1}-1]^N` and kernel-membership statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{QubitLayout, MAX_QUBITS};
use crate::lattice::GramMatrix;
use crate::spectral::{FourierBasis, SpectralData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub shortest: Vec<i64>,
    pub length_sq: f64,
    pub enumerated: u64,
}

fn box_layout(dim: usize, k: usize) -> Result<QubitLayout> {
    let required = dim.saturating_mul(k);
    if required > MAX_QUBITS {
        return Err(Error::ResourceLimit {
            required,
            limit: MAX_QUBITS,
        });
    }
    QubitLayout::new(dim, k)
}

/// Running minimum with a lexicographic tie-break.
#[derive(Debug)]
struct Best {
    vector: Vec<i64>,
    energy: f64,
}

impl Best {
    fn new(dim: usize) -> Self {
        Best {
            vector: vec![0; dim],
            energy: f64::INFINITY,
        }
    }

    fn offer(&mut self, n: &[i64], e: f64) {
        if e < self.energy || (e == self.energy && n < self.vector.as_slice()) {
            self.energy = e;
            self.vector.copy_from_slice(n);
        }
    }

    fn found(&self) -> bool {
        self.energy.is_finite()
    }
}

/// Visits every nonzero vector of the box in energy-table index order.
fn for_each_nonzero(layout: &QubitLayout, mut f: impl FnMut(&[i64])) -> u64 {
    let mut n = vec![0; layout.registers()];
    let mut count = 0;
    for b in 0..layout.state_count() {
        layout.decode_into(b, &mut n);
        if n.iter().all(|&v| v == 0) {
            continue;
        }
        count += 1;
        f(&n);
    }
    count
}

/// Minimizer of `nᵀGn` over the nonzero vectors of the box; among equal
/// lengths the lexicographically smallest vector wins.
pub fn brute_force_shortest(gram: &GramMatrix, k: usize) -> Result<OracleResult> {
    let layout = box_layout(gram.dim(), k)?;
    let mut best = Best::new(gram.dim());
    let enumerated = for_each_nonzero(&layout, |n| best.offer(n, gram.quadratic_form(n)));
    Ok(OracleResult {
        shortest: best.vector,
        length_sq: best.energy,
        enumerated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelStats {
    pub oracle: OracleResult,
    pub principal: usize,
    /// Whether the oracle's shortest vector lies in the principal kernel.
    pub in_kernel: bool,
    /// Shortest in-kernel vector of the box, if any.
    pub kernel_shortest: Option<Vec<i64>>,
    pub kernel_length_sq: Option<f64>,
    /// `kernel_length_sq / oracle.length_sq`; `None` when no nonzero box
    /// vector lies in the kernel.
    pub gamma: Option<f64>,
}

/// Oracle plus the best box vector in the kernel of the principal operator,
/// in a single pass over the box.
pub fn kernel_stats(
    gram: &GramMatrix,
    fourier: &FourierBasis,
    spectrum: &SpectralData,
    k: usize,
) -> Result<KernelStats> {
    let dim = gram.dim();
    if fourier.dim() != dim || spectrum.eigenvalues.len() != dim {
        return crate::error::invalid("gram, fourier basis and spectrum dimensions differ");
    }
    let layout = box_layout(dim, k)?;
    let q = spectrum.principal;
    let mut best = Best::new(dim);
    let mut best_kernel = Best::new(dim);
    let enumerated = for_each_nonzero(&layout, |n| {
        let e = gram.quadratic_form(n);
        best.offer(n, e);
        if e <= best_kernel.energy && fourier.in_kernel(q, n) {
            best_kernel.offer(n, e);
        }
    });
    let in_kernel = fourier.in_kernel(q, &best.vector);
    let (kernel_shortest, kernel_length_sq, gamma) = if best_kernel.found() {
        let gamma = if in_kernel {
            1.0
        } else {
            best_kernel.energy / best.energy
        };
        (Some(best_kernel.vector), Some(best_kernel.energy), Some(gamma))
    } else {
        (None, None, None)
    };
    Ok(KernelStats {
        oracle: OracleResult {
            shortest: best.vector,
            length_sq: best.energy,
            enumerated,
        },
        principal: q,
        in_kernel,
        kernel_shortest,
        kernel_length_sq,
        gamma,
    })
}
