//! Integer polynomials, Euler's totient and cyclotomic polynomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

pub const MAX_CYCLOTOMIC_ORDER: usize = 1024;

/// Dense polynomial with big-integer coefficients, ascending degree. The zero
/// polynomial has no coefficients; otherwise the last one is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = BigInt::one();
        IntPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| i64::try_from(c).ok()).collect()
    }

    fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &IntPolynomial) -> (IntPolynomial, IntPolynomial) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let d = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (IntPolynomial::new(Vec::new()), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let lead = std::mem::take(&mut rem[i]);
            if lead.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs[..d].iter().enumerate() {
                rem[i - d + j] -= &lead * c;
            }
            quot[i - d] = lead;
        }
        rem.truncate(d);
        (IntPolynomial::new(quot), IntPolynomial::new(rem))
    }

    /// `x · self mod divisor`, for monic `divisor` and `deg self < deg divisor`.
    fn shift_mod(&self, divisor: &IntPolynomial) -> IntPolynomial {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(BigInt::zero());
        c.extend(self.coeffs.iter().cloned());
        IntPolynomial::new(c).div_rem_monic(divisor).1
    }

    /// Coefficients padded with zeros to `len`.
    pub fn padded(&self, len: usize) -> Vec<BigInt> {
        let mut out = self.coeffs.clone();
        out.resize(len, BigInt::zero());
        out
    }
}

/// `φ(n) = #{1 ≤ k ≤ n : gcd(k, n) = 1}`.
pub fn totient(n: u64) -> Result<u64> {
    if n == 0 {
        return invalid("totient of 0 is undefined");
    }
    let mut result = n;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if rest > 1 {
        result -= result / rest;
    }
    Ok(result)
}

/// `Φ_n`, by dividing `x^n - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic(n: usize) -> Result<IntPolynomial> {
    if n == 0 || n > MAX_CYCLOTOMIC_ORDER {
        return invalid(format!(
            "cyclotomic order must be in 1..={MAX_CYCLOTOMIC_ORDER}, got {n}"
        ));
    }
    let mut cache = BTreeMap::new();
    Ok(cyclotomic_cached(n, &mut cache))
}

fn cyclotomic_cached(n: usize, cache: &mut BTreeMap<usize, IntPolynomial>) -> IntPolynomial {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    let mut poly = IntPolynomial::monomial(n);
    poly.coeffs[0] = BigInt::from(-1);
    for d in (1..n).filter(|&d| n % d == 0) {
        let phi_d = cyclotomic_cached(d, cache);
        let (q, r) = poly.div_rem_monic(&phi_d);
        debug_assert!(r.is_zero());
        poly = q;
    }
    cache.insert(n, poly.clone());
    poly
}

/// `x^e mod Φ` for `e = 0..count`.
pub(crate) fn power_residues(phi: &IntPolynomial, count: usize) -> Vec<IntPolynomial> {
    let mut out = Vec::with_capacity(count);
    let mut cur = IntPolynomial::monomial(0).div_rem_monic(phi).1;
    for _ in 0..count {
        let next = cur.shift_mod(phi);
        out.push(std::mem::replace(&mut cur, next));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn gcd_count(n: u64) -> u64 {
        (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
    }

    #[test]
    fn totient_values() {
        assert_eq!(totient(6).unwrap(), 2);
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(12).unwrap(), gcd_count(12));
        for n in 1..300 {
            assert_eq!(totient(n).unwrap(), gcd_count(n), "n={n}");
        }
        assert!(totient(0).is_err());
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1).unwrap(), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2).unwrap(), IntPolynomial::from_i64(&[1, 1]));
        assert_eq!(cyclotomic(3).unwrap(), IntPolynomial::from_i64(&[1, 1, 1]));
        assert_eq!(cyclotomic(6).unwrap(), IntPolynomial::from_i64(&[1, -1, 1]));
        assert_eq!(
            cyclotomic(16).unwrap(),
            IntPolynomial::from_i64(&[1, 0, 0, 0, 0, 0, 0, 0, 1])
        );
        assert!(cyclotomic(0).is_err());
        assert!(cyclotomic(1025).is_err());
    }

    #[test]
    fn degree_is_totient() {
        for n in 1..=120 {
            let p = cyclotomic(n).unwrap();
            assert_eq!(p.degree().unwrap() as u64, totient(n as u64).unwrap());
        }
    }

    #[test]
    fn product_over_divisors_is_x_n_minus_1() {
        for n in [12usize, 30, 105] {
            let mut prod = IntPolynomial::from_i64(&[1]);
            for d in (1..=n).filter(|d| n % d == 0) {
                let f = cyclotomic(d).unwrap();
                let mut c = vec![BigInt::zero(); prod.coeffs.len() + f.coeffs.len() - 1];
                for (i, a) in prod.coeffs.iter().enumerate() {
                    for (j, b) in f.coeffs.iter().enumerate() {
                        c[i + j] += a * b;
                    }
                }
                prod = IntPolynomial::new(c);
            }
            let mut expect = IntPolynomial::monomial(n);
            expect.coeffs[0] = BigInt::from(-1);
            assert_eq!(prod, expect);
        }
    }

    #[test]
    fn residues_of_phi5() {
        let phi = cyclotomic(5).unwrap();
        let r = power_residues(&phi, 5);
        assert_eq!(r[4].to_i64().unwrap(), vec![-1, -1, -1, -1]);
        assert_eq!(r[2].to_i64().unwrap(), vec![0, 0, 1]);
    }
}
