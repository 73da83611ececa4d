//! Exact integer kernels of the mode operators via cyclotomic reduction and
//! the Hermite normal form.
//!
//! With `ζ` the primitive root of order `T` attached to `S_q`, the `k`-th
//! exponential of the kernel equation is `ζ^k`, and `x^k mod Φ_T(x)` writes
//! it as an integer combination of the `φ(T)` independent powers
//! `1, ζ, …, ζ^{φ(T)-1}`. Stacking those residues gives an `N × φ(T)`
//! reduction matrix `R`; the integer kernel of `S_q` is the integer kernel
//! of `Rᵀ`, read off from the unimodular transform of its column HNF.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintsMatrix;
use crate::cyclotomic::{cyclotomic, power_residues, totient};
use crate::error::{invalid, Error, Result};
use crate::lattice::SymmetryKind;

pub type IntMatrix = Vec<Vec<BigInt>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionMatrix {
    pub kind: SymmetryKind,
    pub dim: usize,
    pub operator_index: usize,
    /// Order `T` of the primitive root; row width is `φ(T)`.
    pub order: usize,
    /// `rows[k]` is the residue of `x^{e_k}` modulo `Φ_T`.
    #[serde(with = "bigint_rows")]
    pub rows: IntMatrix,
}

/// `(modulus, multiplier)`: the `k`-th exponential is `e^{-2πi·multiplier·k/modulus}`.
fn exponent_data(kind: SymmetryKind, n: usize, q: usize) -> (usize, usize) {
    match kind {
        SymmetryKind::Cyclic => (n, q),
        SymmetryKind::NegaCyclic => (2 * n, 2 * q + 1),
    }
}

fn check_index(n: usize, q: usize) -> Result<()> {
    if n < 2 {
        return invalid(format!("lattice dimension must be at least 2, got {n}"));
    }
    if q >= n {
        return invalid(format!("mode index {q} out of range for N = {n}"));
    }
    Ok(())
}

/// The reduction matrix of `S_q`.
///
/// Row `k` holds the coefficients of `x^{(m/g)·k mod T}` modulo `Φ_T`, where
/// `m/modulus` is the mode's frequency, `g = gcd(modulus, m)` and
/// `T = modulus/g`; evaluated at `x = e^{-2πi/T}` it reproduces the `k`-th
/// exponential exactly. The cyclic `q = 0` operator is handled by the closed
/// form `A¹` and is rejected here.
pub fn reduction_matrix(kind: SymmetryKind, n: usize, q: usize) -> Result<ReductionMatrix> {
    check_index(n, q)?;
    if kind == SymmetryKind::Cyclic && q == 0 {
        return Err(Error::Unsupported(
            "cyclic q = 0 has the closed-form kernel sum(n) = 0".into(),
        ));
    }
    Ok(reduction_matrix_unchecked(kind, n, q))
}

fn reduction_matrix_unchecked(kind: SymmetryKind, n: usize, q: usize) -> ReductionMatrix {
    let (modulus, multiplier) = exponent_data(kind, n, q);
    let g = modulus.gcd(&multiplier);
    let order = modulus / g;
    let step = multiplier / g;
    let phi = cyclotomic(order).expect("order bounded by 2N");
    let width = phi.degree().unwrap_or(0);
    let residues = power_residues(&phi, order);
    let rows = (0..n)
        .map(|k| residues[(step * k) % order].padded(width))
        .collect();
    ReductionMatrix {
        kind,
        dim: n,
        operator_index: q,
        order,
        rows,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HnfResult {
    /// `H = X U`: zero columns first, then an upper-triangular block with
    /// positive pivots and reduced entries to the right of each pivot.
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Exact inverse of `u`.
    pub u_inv: IntMatrix,
    /// Number of leading zero columns of `h`.
    pub kernel_dim: usize,
}

impl HnfResult {
    /// First `kernel_dim` columns of `U`: a basis of the integer kernel of `X`.
    pub fn kernel_columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.kernel_dim)
            .map(|j| self.u.iter().map(|row| row[j].clone()).collect())
            .collect()
    }
}

/// Column-style Hermite normal form of `x` (`rows × cols`) with exact
/// big-integer arithmetic. Rows are processed bottom-up with the pivot
/// column moving leftwards, so the kernel ends up in the leading columns.
pub fn hnf(x: &[Vec<BigInt>]) -> HnfResult {
    let rows = x.len();
    let cols = x.first().map_or(0, Vec::len);
    let mut h: IntMatrix = x.to_vec();
    let mut u = identity(cols);
    let mut u_inv = identity(cols);
    let mut ops = ColumnOps {
        h: &mut h,
        u: &mut u,
        u_inv: &mut u_inv,
    };

    let mut k = cols; // one past the current pivot column
    for i in (0..rows).rev() {
        if k == 0 {
            break;
        }
        let pc = k - 1;
        for j in (0..pc).rev() {
            if ops.h[i][j].is_zero() {
                continue;
            }
            let a = ops.h[i][pc].clone();
            let b = ops.h[i][j].clone();
            if a.is_zero() {
                ops.swap(j, pc);
                continue;
            }
            let eg = a.extended_gcd(&b);
            let (d, s, t) = (eg.gcd, eg.x, eg.y);
            // [col_pc, col_j] <- [col_pc, col_j] · [[s, -b/d], [t, a/d]], det 1
            let bd = &b / &d;
            let ad = &a / &d;
            ops.combine(pc, j, [s, -bd, t, ad]);
        }
        if ops.h[i][pc].is_zero() {
            continue;
        }
        if ops.h[i][pc].is_negative() {
            ops.negate(pc);
        }
        let pivot = ops.h[i][pc].clone();
        for j in k..cols {
            let f = ops.h[i][j].div_floor(&pivot);
            if !f.is_zero() {
                ops.add_multiple(j, pc, &(-f));
            }
        }
        k -= 1;
    }
    HnfResult {
        h,
        u,
        u_inv,
        kernel_dim: k,
    }
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Unimodular column operations applied to `H` and `U`, with the inverse row
/// operation applied to `U⁻¹`.
struct ColumnOps<'a> {
    h: &'a mut IntMatrix,
    u: &'a mut IntMatrix,
    u_inv: &'a mut IntMatrix,
}

impl ColumnOps<'_> {
    fn swap(&mut self, a: usize, b: usize) {
        for row in self.h.iter_mut().chain(self.u.iter_mut()) {
            row.swap(a, b);
        }
        self.u_inv.swap(a, b);
    }

    fn negate(&mut self, c: usize) {
        for row in self.h.iter_mut().chain(self.u.iter_mut()) {
            row[c] = -std::mem::take(&mut row[c]);
        }
        for v in self.u_inv[c].iter_mut() {
            *v = -std::mem::take(v);
        }
    }

    /// `col_dst += f · col_src`.
    fn add_multiple(&mut self, dst: usize, src: usize, f: &BigInt) {
        for row in self.h.iter_mut().chain(self.u.iter_mut()) {
            let add = &row[src] * f;
            row[dst] += add;
        }
        // U⁻¹ <- E⁻¹ U⁻¹ with E⁻¹ subtracting f·row_dst from row_src.
        let dst_row = self.u_inv[dst].clone();
        for (v, d) in self.u_inv[src].iter_mut().zip(dst_row) {
            *v -= f * d;
        }
    }

    /// `[col_a, col_b] <- [col_a, col_b] · [[m0, m1], [m2, m3]]` with
    /// determinant 1.
    fn combine(&mut self, a: usize, b: usize, m: [BigInt; 4]) {
        let [m0, m1, m2, m3] = m;
        for row in self.h.iter_mut().chain(self.u.iter_mut()) {
            let (ca, cb) = (row[a].clone(), row[b].clone());
            row[a] = &ca * &m0 + &cb * &m2;
            row[b] = &ca * &m1 + &cb * &m3;
        }
        // Inverse of [[m0, m1], [m2, m3]] is [[m3, -m1], [-m2, m0]].
        let ra = std::mem::take(&mut self.u_inv[a]);
        let rb = std::mem::take(&mut self.u_inv[b]);
        self.u_inv[a] = ra
            .iter()
            .zip(&rb)
            .map(|(x, y)| &m3 * x - &m1 * y)
            .collect();
        self.u_inv[b] = ra
            .iter()
            .zip(&rb)
            .map(|(x, y)| &m0 * y - &m2 * x)
            .collect();
    }
}

/// Exact integer kernel of `S_q` together with the data needed to test
/// membership and recover coordinates.
#[derive(Debug, Clone)]
pub struct KernelLattice {
    /// Relation matrix `X = Rᵀ`, `φ(T) × N`; `n` is in the kernel iff `X n = 0`.
    relation: Vec<Vec<i64>>,
    /// HNF kernel basis as an `N × M` constraints matrix.
    basis: ConstraintsMatrix,
    /// First `M` rows of `U⁻¹`: kernel coordinates of a member `n`.
    coordinates: Vec<Vec<i64>>,
}

impl KernelLattice {
    pub fn basis(&self) -> &ConstraintsMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Exact membership test `X n = 0`.
    pub fn contains(&self, n: &[i64]) -> bool {
        self.relation
            .iter()
            .all(|row| row.iter().zip(n).map(|(a, b)| a * b).sum::<i64>() == 0)
    }

    /// The unique integer `m` with `A m = n`, if `n` is a kernel member.
    pub fn coordinates(&self, n: &[i64]) -> Option<Vec<i64>> {
        if n.len() != self.basis.rows() || !self.contains(n) {
            return None;
        }
        let m: Vec<i64> = self
            .coordinates
            .iter()
            .map(|row| row.iter().zip(n).map(|(a, b)| a * b).sum())
            .collect();
        (self.basis.apply_unchecked(&m) == n).then_some(m)
    }
}

fn to_i64_matrix(m: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|v| i64::try_from(v).map_err(|_| Error::Overflow))
                .collect()
        })
        .collect()
}

/// HNF-derived kernel of `S_q`, for every `(kind, N, q)` including cyclic
/// `q = 0` (where `Φ_1 = x - 1` makes the relation `Σ n = 0`).
pub fn kernel_lattice(kind: SymmetryKind, n: usize, q: usize) -> Result<KernelLattice> {
    check_index(n, q)?;
    let red = reduction_matrix_unchecked(kind, n, q);
    let width = red.rows.first().map_or(0, Vec::len);
    let x: IntMatrix = (0..width)
        .map(|j| red.rows.iter().map(|r| r[j].clone()).collect())
        .collect();
    let result = hnf(&x);
    let m = result.kernel_dim;
    let columns = to_i64_matrix(&result.kernel_columns())?;
    let basis = ConstraintsMatrix::from_columns(n, &columns, "hnf", q, None)?;
    Ok(KernelLattice {
        relation: to_i64_matrix(&x)?,
        basis,
        coordinates: to_i64_matrix(&result.u_inv[..m])?,
    })
}

/// Integer basis of the full kernel of `S_q` as a constraints matrix; the
/// closed form `A¹` for cyclic `q = 0`.
pub fn kernel_basis(kind: SymmetryKind, n: usize, q: usize) -> Result<ConstraintsMatrix> {
    check_index(n, q)?;
    if kind == SymmetryKind::Cyclic && q == 0 {
        let mut mats = crate::analytic::constraints_for(kind, n, 0)?;
        return Ok(mats.remove(0));
    }
    Ok(kernel_lattice(kind, n, q)?.basis)
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn to_bigint_matrix(m: &[Vec<i64>]) -> IntMatrix {
    m.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

mod bigint_rows {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let text = Vec::<Vec<String>>::deserialize(d)?;
        text.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|s| s.parse().map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// `φ(T)` for the operator, i.e. the rank of the relation matrix.
pub fn relation_rank(kind: SymmetryKind, n: usize, q: usize) -> Result<u64> {
    check_index(n, q)?;
    let (modulus, multiplier) = exponent_data(kind, n, q);
    totient((modulus / modulus.gcd(&multiplier)) as u64)
}
