//! Closed-form constraints matrices for subspaces of the mode-operator
//! kernels.
//!
//! Every case reduces to the same picture. The kernel condition for `S_q` is
//! `Σ_p n_p ζ^p = 0` where `ζ` is a primitive `T`-th root of unity
//! (`T = N / gcd(N, q)` for cyclic lattices, `T = 2N / gcd(2N, 2q+1)` for
//! nega-cyclic ones). Folding the coordinates modulo `T`,
//! `y_l = Σ_{k ≡ l (mod T)} n_k`, turns it into `Σ_{l<T} y_l ζ^l = 0`. Two
//! families of integer solutions in `y` are lifted back to `n`:
//!
//! * periodic, for a prime `p | T`: `y_l = y_{l mod T/p}`;
//! * antiperiodic, for an odd prime `r | T/2`: `z_l = y_l - y_{l+T/2}` takes
//!   the alternating block form `z_l = (-1)^{⌊2lr/T⌋} w_{l mod T/2r}`.
//!
//! Coordinates outside the folded pivot block stay free, which gives the
//! extra identity-like columns of the `K > 1` and `L > 1` cases. With no free
//! coordinates the constructions reduce exactly to `A^{2,p}` and `A^{II,p}`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintsMatrix;
use crate::error::{invalid, Result};
use crate::lattice::SymmetryKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Cyc1,
    Cyc2,
    Cyc3,
    Cyc4,
    Cyc5,
    NegaI,
    NegaII,
    NegaIII,
    NegaIV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: Case,
    /// `gcd(N, q)` for cyclic lattices, `gcd(2N, 2q+1)` for nega-cyclic ones.
    pub gcd: usize,
    /// Multiplicative order of the mode's root of unity.
    pub order: usize,
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return invalid("prime factors of 0 are undefined");
    }
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            out.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        out.push(rest);
    }
    Ok(out)
}

fn is_power_of_two(n: usize) -> bool {
    n.is_power_of_two()
}

pub fn classify(kind: SymmetryKind, n: usize, q: usize) -> Result<CaseLabel> {
    if n < 2 {
        return invalid(format!("lattice dimension must be at least 2, got {n}"));
    }
    if q >= n {
        return invalid(format!("mode index {q} out of range for N = {n}"));
    }
    let label = match kind {
        SymmetryKind::Cyclic => {
            let k = n.gcd(&q);
            let order = n / k;
            let case = if q == 0 {
                Case::Cyc1
            } else if k == 1 {
                if n % 2 == 1 || is_power_of_two(n) {
                    Case::Cyc2
                } else {
                    Case::Cyc3
                }
            } else if order % 2 == 1 || is_power_of_two(order) {
                Case::Cyc4
            } else {
                Case::Cyc5
            };
            CaseLabel {
                case,
                gcd: k,
                order,
            }
        }
        SymmetryKind::NegaCyclic => {
            let l = (2 * n).gcd(&(2 * q + 1));
            let order = 2 * n / l;
            let case = if is_power_of_two(n) {
                Case::NegaI
            } else if l == 1 {
                Case::NegaII
            } else if is_power_of_two(n / l) {
                // N = 2^j L, including j = 0 where the folded order is 2.
                Case::NegaIII
            } else {
                Case::NegaIV
            };
            CaseLabel {
                case,
                gcd: l,
                order,
            }
        }
    };
    Ok(label)
}

/// All closed-form constraints matrices for `S_q`, one per prime factor,
/// never concatenated. An empty list means the kernel is trivial.
pub fn constraints_for(kind: SymmetryKind, n: usize, q: usize) -> Result<Vec<ConstraintsMatrix>> {
    let label = classify(kind, n, q)?;
    let t = label.order;
    let mut out = Vec::new();
    match label.case {
        Case::Cyc1 => out.push(sum_zero(n)?),
        Case::Cyc2 => {
            for p in prime_factors(t)? {
                out.push(periodic(n, t, p, "cyclic-2", q)?);
            }
        }
        Case::Cyc3 => {
            for p in prime_factors(t)? {
                out.push(periodic(n, t, p, "cyclic-2", q)?);
            }
            for r in odd_primes(t / 2)? {
                out.push(antiperiodic(n, t, r, "cyclic-3", q)?);
            }
        }
        Case::Cyc4 => {
            for p in prime_factors(t)? {
                out.push(periodic(n, t, p, "cyclic-4", q)?);
            }
        }
        Case::Cyc5 => {
            for r in odd_primes(t / 2)? {
                out.push(antiperiodic(n, t, r, "cyclic-3", q)?);
            }
            for p in prime_factors(t)? {
                out.push(periodic(n, t, p, "cyclic-4", q)?);
            }
        }
        Case::NegaI => {}
        Case::NegaII => {
            for r in odd_primes(n)? {
                out.push(antiperiodic(n, t, r, "nega-II", q)?);
            }
        }
        Case::NegaIII => out.push(periodic(n, t, 2, "nega-III", q)?),
        Case::NegaIV => {
            for p in prime_factors(t)? {
                out.push(periodic(n, t, p, "nega-IV", q)?);
            }
            for r in odd_primes(t / 2)? {
                out.push(antiperiodic(n, t, r, "nega-V", q)?);
            }
        }
    }
    Ok(out)
}

fn odd_primes(n: usize) -> Result<Vec<usize>> {
    Ok(prime_factors(n)?.into_iter().filter(|&p| p > 2).collect())
}

/// `A¹_{ij} = δ_{ij} - δ_{i,N-1}`: all states with `Σ n = 0`.
fn sum_zero(n: usize) -> Result<ConstraintsMatrix> {
    let columns: Vec<Vec<i64>> = (0..n - 1)
        .map(|j| {
            let mut c = vec![0; n];
            c[j] = 1;
            c[n - 1] = -1;
            c
        })
        .collect();
    ConstraintsMatrix::from_columns(n, &columns, "cyclic-1", 0, None)
}

/// Columns for coordinates `n_f`, `f ≥ free_from`, that are not fixed by the
/// folded constraint. Each one is compensated inside the pivot block so the
/// folded sums `y` are unchanged (or, for the antiperiodic family, so that
/// `z` is unchanged).
fn free_columns(n: usize, t: usize, free_from: usize, antiperiodic: bool) -> Vec<Vec<i64>> {
    (free_from..n)
        .map(|f| {
            let mut c = vec![0; n];
            c[f] = 1;
            let u = f % t;
            if !antiperiodic {
                // f = u + kT with k ≥ 1 adds to y_u.
                c[u] -= 1;
            } else if u < t / 2 {
                // adds to y_u, hence to z_u
                c[u] -= 1;
            } else {
                // adds to y_u, hence subtracts from z_{u - T/2}
                c[u - t / 2] += 1;
            }
            c
        })
        .collect()
}

/// `y` periodic with period `T/p`. Requires `T ≤ N`.
fn periodic(n: usize, t: usize, p: usize, origin: &str, q: usize) -> Result<ConstraintsMatrix> {
    debug_assert!(t <= n && t % p == 0);
    let period = t / p;
    let mut columns: Vec<Vec<i64>> = (0..period)
        .map(|r| (0..n).map(|i| i64::from(i < t && i % period == r)).collect())
        .collect();
    columns.extend(free_columns(n, t, t, false));
    ConstraintsMatrix::from_columns(n, &columns, origin, q, Some(p))
}

/// `z_l = y_l - y_{l+T/2}` in alternating blocks of length `T/2r`. Requires
/// `T ≤ N` or `T = 2N`.
fn antiperiodic(n: usize, t: usize, r: usize, origin: &str, q: usize) -> Result<ConstraintsMatrix> {
    let half = t / 2;
    debug_assert!(t % 2 == 0 && half % r == 0 && (t <= n || t == 2 * n));
    let block = half / r;
    let mut columns: Vec<Vec<i64>> = (0..block)
        .map(|s| {
            (0..n)
                .map(|i| {
                    if i < half && i % block == s {
                        if (i / block) % 2 == 0 {
                            1
                        } else {
                            -1
                        }
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    columns.extend(free_columns(n, t, half.min(n), true));
    ConstraintsMatrix::from_columns(n, &columns, origin, q, Some(r))
}
