//! Reduced Gram matrices, the qubit encoding of integer registers, and the
//! diagonal energy table minimized by the variational solver.

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintsMatrix;
use crate::error::{invalid, Error, Result};
use crate::lattice::GramMatrix;

pub const MAX_QUBITS: usize = 24;
pub const MAX_BITS_PER_REGISTER: usize = 8;

/// `F = AᵀGA`, the quadratic form restricted to the span of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedGram {
    pub form: GramMatrix,
    pub constraints: ConstraintsMatrix,
}

impl ReducedGram {
    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// Lattice coefficients `n = A m` of reduced coordinates `m`.
    pub fn lift(&self, m: &[i64]) -> Result<Vec<i64>> {
        self.constraints.apply(m)
    }
}

pub fn reduce_gram(gram: &GramMatrix, a: &ConstraintsMatrix) -> Result<ReducedGram> {
    if a.rows() != gram.dim() {
        return invalid(format!(
            "constraints matrix has {} rows, gram matrix has dimension {}",
            a.rows(),
            gram.dim()
        ));
    }
    if a.cols() == 0 {
        return Err(Error::EmptyKernel);
    }
    let form = GramMatrix::from_rows(&a.congruence(gram))?;
    Ok(ReducedGram {
        form,
        constraints: a.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    registers: usize,
    bits_per_register: usize,
}

impl QubitLayout {
    pub fn new(registers: usize, bits_per_register: usize) -> Result<Self> {
        if registers == 0 {
            return invalid("layout needs at least one register");
        }
        if !(1..=MAX_BITS_PER_REGISTER).contains(&bits_per_register) {
            return invalid(format!(
                "bits per register must be in 1..={MAX_BITS_PER_REGISTER}, got {bits_per_register}"
            ));
        }
        let required = registers.saturating_mul(bits_per_register);
        if required > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                required,
                limit: MAX_QUBITS,
            });
        }
        Ok(QubitLayout {
            registers,
            bits_per_register,
        })
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn bits_per_register(&self) -> usize {
        self.bits_per_register
    }

    pub fn total_qubits(&self) -> usize {
        self.registers * self.bits_per_register
    }

    pub fn state_count(&self) -> usize {
        1 << self.total_qubits()
    }

    fn offset(&self) -> i64 {
        1 << (self.bits_per_register - 1)
    }

    /// Integer vector encoded by basis state `index`; register `i` is read
    /// from qubits `[iK, (i+1)K)`, least significant first.
    #[inline]
    pub fn decode_into(&self, index: usize, out: &mut [i64]) {
        let k = self.bits_per_register;
        let mask = (1usize << k) - 1;
        let offset = self.offset();
        for (i, v) in out.iter_mut().enumerate() {
            *v = ((index >> (i * k)) & mask) as i64 - offset;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<i64> {
        let mut out = vec![0; self.registers];
        self.decode_into(index, &mut out);
        out
    }

    /// Inverse of [`decode`](Self::decode); `None` if a value is out of range.
    pub fn encode(&self, values: &[i64]) -> Option<usize> {
        if values.len() != self.registers {
            return None;
        }
        let k = self.bits_per_register;
        let offset = self.offset();
        let mut index = 0usize;
        for (i, &v) in values.iter().enumerate() {
            let shifted = v + offset;
            if !(0..2 * offset).contains(&shifted) {
                return None;
            }
            index |= (shifted as usize) << (i * k);
        }
        Some(index)
    }

    /// Bit string of a basis state, qubit 0 first.
    pub fn bit_string(&self, index: usize) -> String {
        (0..self.total_qubits())
            .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// `n = -2^{K-1} + Σ_j b_j 2^j`, with `bits[j] = b_j`.
pub fn decode_register(bits: &[bool], k: usize) -> Result<i64> {
    if bits.len() != k || k == 0 || k > 62 {
        return invalid(format!(
            "register needs exactly {k} bits, got {}",
            bits.len()
        ));
    }
    let raw: i64 = bits
        .iter()
        .enumerate()
        .map(|(j, &b)| i64::from(b) << j)
        .sum();
    Ok(raw - (1 << (k - 1)))
}

/// Diagonal Hamiltonian `Σ F_ij N_i N_j` plus a penalty on the zero vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalHamiltonian {
    pub layout: QubitLayout,
    pub form: GramMatrix,
    pub penalty: f64,
}

impl DiagonalHamiltonian {
    pub fn zero_state(&self) -> usize {
        self.layout
            .encode(&vec![0; self.layout.registers()])
            .expect("zero is always representable")
    }

    pub fn energy(&self, index: usize) -> f64 {
        let m = self.layout.decode(index);
        self.energy_of(&m)
    }

    pub fn energy_of(&self, m: &[i64]) -> f64 {
        if m.iter().all(|&v| v == 0) {
            self.penalty
        } else {
            self.form.quadratic_form(m)
        }
    }
}

pub fn build_hamiltonian(form: &GramMatrix, k: usize, penalty: f64) -> Result<DiagonalHamiltonian> {
    if !penalty.is_finite() {
        return invalid("penalty must be finite");
    }
    Ok(DiagonalHamiltonian {
        layout: QubitLayout::new(form.dim(), k)?,
        form: form.clone(),
        penalty,
    })
}

/// Energy of every basis state, indexed by basis state.
pub fn energy_table(h: &DiagonalHamiltonian) -> Result<Vec<f64>> {
    let total = h.layout.total_qubits();
    if total > MAX_QUBITS {
        return Err(Error::ResourceLimit {
            required: total,
            limit: MAX_QUBITS,
        });
    }
    let mut m = vec![0; h.layout.registers()];
    Ok((0..h.layout.state_count())
        .map(|b| {
            h.layout.decode_into(b, &mut m);
            h.energy_of(&m)
        })
        .collect())
}
