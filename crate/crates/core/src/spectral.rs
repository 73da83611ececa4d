//! Fourier eigenbases of the shift operators and the Gram spectrum they
//! induce.
//!
//! Both `Π` and `Γ` are diagonalized by lattice-independent unitaries, so the
//! Gram matrix of any structured basis is diagonal in the same frame. The
//! eigenvalue `g_q` is always paired with the mode operator `S_q` whose
//! coefficients are row `q` of the unitary.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{GramMatrix, SymmetryKind};

/// Relative tolerance on the off-diagonal part of `U G U†`.
pub const STRUCTURE_TOLERANCE: f64 = 1e-8;

/// Eigenvalues within this fraction of the maximum count as tied for the
/// principal index.
pub const PRINCIPAL_TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierBasis {
    kind: SymmetryKind,
    dim: usize,
    entries: Vec<Complex64>,
}

/// `U^(c)_{qp} = e^{-2πi pq/N}/√N`, `U^(n)_{qp} = e^{-2πi p(2q+1)/2N}/√N`.
pub fn fourier_basis(kind: SymmetryKind, n: usize) -> Result<FourierBasis> {
    if n < 2 {
        return invalid(format!("fourier basis needs N >= 2, got {n}"));
    }
    let norm = 1.0 / (n as f64).sqrt();
    let mut entries = Vec::with_capacity(n * n);
    for q in 0..n {
        for p in 0..n {
            // Reduce the exponent before converting to an angle.
            let (num, den) = match kind {
                SymmetryKind::Cyclic => ((p * q) % n, n),
                SymmetryKind::NegaCyclic => ((p * (2 * q + 1)) % (2 * n), 2 * n),
            };
            let angle = -2.0 * PI * num as f64 / den as f64;
            entries.push(Complex64::from_polar(norm, angle));
        }
    }
    Ok(FourierBasis {
        kind,
        dim: n,
        entries,
    })
}

impl FourierBasis {
    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, q: usize, p: usize) -> Complex64 {
        self.entries[q * self.dim + p]
    }

    pub fn row(&self, q: usize) -> &[Complex64] {
        &self.entries[q * self.dim..(q + 1) * self.dim]
    }

    /// `s^q_n = Σ_p U_{qp} n_p`.
    pub fn s_value(&self, q: usize, coeffs: &[i64]) -> Result<Complex64> {
        if q >= self.dim {
            return invalid(format!("mode index {q} out of range for N = {}", self.dim));
        }
        if coeffs.len() != self.dim {
            return invalid(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                self.dim
            ));
        }
        Ok(self.s_value_unchecked(q, coeffs))
    }

    #[inline]
    pub(crate) fn s_value_unchecked(&self, q: usize, coeffs: &[i64]) -> Complex64 {
        self.row(q)
            .iter()
            .zip(coeffs)
            .fold(Complex64::new(0.0, 0.0), |acc, (u, &c)| acc + u * c as f64)
    }

    /// Scale-aware numerical kernel test `|s^q_n| ≤ 1e-9·N·max|n_i|`.
    pub fn in_kernel(&self, q: usize, coeffs: &[i64]) -> bool {
        let scale = coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as f64;
        self.s_value_unchecked(q, coeffs).norm() <= 1e-9 * self.dim as f64 * scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub principal: usize,
}

/// Gram eigenvalues read off the diagonal of `U G U†`.
pub fn eigenvalues(gram: &GramMatrix, fourier: &FourierBasis) -> Result<SpectralData> {
    let n = fourier.dim();
    if gram.dim() != n {
        return invalid(format!(
            "gram matrix dimension {} does not match fourier basis dimension {n}",
            gram.dim()
        ));
    }
    // T = U G, then D = T U†.
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    for q in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..n {
                acc += fourier.get(q, p) * gram.get(p, j);
            }
            t[q * n + j] = acc;
        }
    }
    let mut diag = Vec::with_capacity(n);
    let mut residual = 0.0f64;
    for q in 0..n {
        for r in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += t[q * n + j] * fourier.get(r, j).conj();
            }
            if q == r {
                diag.push(acc.re);
            } else {
                residual = residual.max(acc.norm());
            }
        }
    }
    let max_g = diag.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let tolerance = STRUCTURE_TOLERANCE * max_g.max(f64::MIN_POSITIVE);
    if residual > tolerance {
        return Err(Error::NotStructured {
            residual,
            tolerance,
        });
    }
    let principal = principal_index(&diag);
    Ok(SpectralData {
        eigenvalues: diag,
        principal,
    })
}

/// Smallest index whose eigenvalue is maximal, up to a relative tie tolerance.
pub fn principal_index(eigenvalues: &[f64]) -> usize {
    let max = eigenvalues.iter().fold(f64::NEG_INFINITY, |m, &g| m.max(g));
    let cutoff = max - PRINCIPAL_TIE_TOLERANCE * max.abs();
    eigenvalues
        .iter()
        .position(|&g| g >= cutoff)
        .unwrap_or(0)
}

/// `E_n = Σ_q g_q |s^q_n|²`.
pub fn energy_via_spectrum(
    spectrum: &SpectralData,
    fourier: &FourierBasis,
    coeffs: &[i64],
) -> Result<f64> {
    if spectrum.eigenvalues.len() != fourier.dim() {
        return invalid("spectrum and fourier basis dimensions differ");
    }
    let mut total = 0.0;
    for (q, g) in spectrum.eigenvalues.iter().enumerate() {
        total += g * fourier.s_value(q, coeffs)?.norm_sqr();
    }
    Ok(total)
}
