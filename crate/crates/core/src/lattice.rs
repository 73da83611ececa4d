//! Cyclic and nega-cyclic lattice bases generated from a single vector, and
//! their Gram matrices.
//!
//! A structured basis has rows `b_0 = g`, `b_{i+1} = S b_i` where `S` is either
//! the cyclic rotation `Π` or the sign-flipping rotation `Γ`. Every length in
//! the lattice is a quadratic form in the integer coordinates:
//! `|Σ n_i b_i|² = nᵀ G n` with `G_ij = b_i · b_j`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral;

/// Which rotation generates the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryKind {
    Cyclic,
    NegaCyclic,
}

impl SymmetryKind {
    pub fn shift(self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            SymmetryKind::Cyclic => cyclic_shift(v),
            SymmetryKind::NegaCyclic => nega_shift(v),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SymmetryKind::Cyclic => "cyclic",
            SymmetryKind::NegaCyclic => "nega-cyclic",
        }
    }
}

impl std::fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for SymmetryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cyclic" | "cyc" => Ok(SymmetryKind::Cyclic),
            "nega" | "nega-cyclic" | "negacyclic" => Ok(SymmetryKind::NegaCyclic),
            other => invalid(format!("unknown symmetry kind `{other}`")),
        }
    }
}

/// `Π v = (v_{N-1}, v_0, …, v_{N-2})`.
pub fn cyclic_shift(v: &[f64]) -> Result<Vec<f64>> {
    let (last, head) = v
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("cannot shift an empty vector".into()))?;
    let mut out = Vec::with_capacity(v.len());
    out.push(*last);
    out.extend_from_slice(head);
    Ok(out)
}

/// `Γ v = (-v_{N-1}, v_0, …, v_{N-2})`.
pub fn nega_shift(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = cyclic_shift(v)?;
    out[0] = -out[0];
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredBasis {
    kind: SymmetryKind,
    generator: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl StructuredBasis {
    pub fn new(kind: SymmetryKind, generator: Vec<f64>) -> Result<Self> {
        if generator.len() < 2 {
            return invalid(format!(
                "basis dimension must be at least 2, got {}",
                generator.len()
            ));
        }
        let mut rows = Vec::with_capacity(generator.len());
        rows.push(generator.clone());
        for i in 1..generator.len() {
            let next = kind.shift(&rows[i - 1])?;
            rows.push(next);
        }
        Ok(StructuredBasis { kind, generator, rows })
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn gram(&self) -> GramMatrix {
        let n = self.dim();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let d = dot(&self.rows[i], &self.rows[j]);
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        GramMatrix { dim: n, entries }
    }

    /// The Euclidean vector `Σ n_i b_i`.
    pub fn lattice_vector(&self, coeffs: &[i64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.dim() {
            return invalid(format!(
                "coefficient vector has length {}, basis has dimension {}",
                coeffs.len(),
                self.dim()
            ));
        }
        let mut out = vec![0.0; self.dim()];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += c as f64 * x;
            }
        }
        Ok(out)
    }
}

/// Real symmetric matrix of pairwise inner products, stored row-major.
///
/// The same type holds reduced forms `AᵀGA`, which are themselves Gram
/// matrices of the sublattice spanned by the columns of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return invalid("gram matrix must be non-empty");
        }
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("gram matrix must be square");
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1.0);
        for i in 0..dim {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * scale {
                    return invalid(format!("gram matrix is not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(GramMatrix {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        GramMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `nᵀ G n`, checking dimensions.
    pub fn vector_length_sq(&self, coeffs: &[i64]) -> Result<f64> {
        if coeffs.len() != self.dim {
            return invalid(format!(
                "coefficient vector has length {}, gram matrix has dimension {}",
                coeffs.len(),
                self.dim
            ));
        }
        Ok(self.quadratic_form(coeffs))
    }

    /// `nᵀ G n` without the dimension check.
    ///
    /// Every energy in the crate goes through this function so that the
    /// brute-force oracle and the energy tables agree bit for bit. The result
    /// is exactly invariant under `n -> -n`.
    #[inline]
    pub fn quadratic_form(&self, coeffs: &[i64]) -> f64 {
        let mut total = 0.0;
        for (i, &ni) in coeffs.iter().enumerate() {
            if ni == 0 {
                continue;
            }
            let row = self.row(i);
            let mut acc = 0.0;
            for (g, &nj) in row.iter().zip(coeffs) {
                acc += g * nj as f64;
            }
            total += ni as f64 * acc;
        }
        total
    }
}

pub fn vector_length_sq(gram: &GramMatrix, coeffs: &[i64]) -> Result<f64> {
    gram.vector_length_sq(coeffs)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub const SAMPLER_MAX_ATTEMPTS: usize = 1000;
pub const SAMPLER_MIN_EIGENVALUE: f64 = 1e-6;

/// Deterministic unit-norm generator for a lattice of the given kind.
///
/// Entries are i.i.d. standard normal, then normalized. A draw whose Gram
/// matrix has smallest eigenvalue below [`SAMPLER_MIN_EIGENVALUE`] is
/// discarded and the stream continues.
pub fn sample_generator(kind: SymmetryKind, seed: u64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return invalid(format!("lattice dimension must be at least 2, got {n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fourier = spectral::fourier_basis(kind, n)?;
    for _ in 0..SAMPLER_MAX_ATTEMPTS {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let gram = StructuredBasis::new(kind, v.clone())?.gram();
        let spectrum = spectral::eigenvalues(&gram, &fourier)?;
        let min = spectrum
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &g| m.min(g));
        if min >= SAMPLER_MIN_EIGENVALUE {
            return Ok(v);
        }
    }
    Err(Error::DegenerateSampler {
        attempts: SAMPLER_MAX_ATTEMPTS,
    })
}

/// Sampled generator plus the basis built from it.
pub fn sample_basis(kind: SymmetryKind, seed: u64, n: usize) -> Result<StructuredBasis> {
    StructuredBasis::new(kind, sample_generator(kind, seed, n)?)
}
