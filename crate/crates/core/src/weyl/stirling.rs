use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StirlingKind {
    /// Signed numbers of the first kind: `ā^j a^j = Σ_k S₁(j,k) N^k`.
    First,
    /// Numbers of the second kind: `N^k = Σ_j S₂(k,j) ā^j a^j`.
    Second,
}

/// Cached Stirling triangle up to a fixed row.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    kind: StirlingKind,
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn new(kind: StirlingKind, n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for n in 0..n_max {
            let prev = &rows[n];
            let mut next = vec![BigInt::zero(); n + 2];
            for k in 0..=n + 1 {
                let left = if k >= 1 { prev[k - 1].clone() } else { BigInt::zero() };
                let same = prev.get(k).cloned().unwrap_or_default();
                next[k] = match kind {
                    StirlingKind::First => left - BigInt::from(n) * same,
                    StirlingKind::Second => left + BigInt::from(k) * same,
                };
            }
            rows.push(next);
        }
        Self { kind, rows }
    }

    pub fn kind(&self) -> StirlingKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, n: usize, k: usize) -> Result<&BigInt> {
        if k > n || n > self.n_max() {
            return Err(Error::StirlingRange {
                n: n as i64,
                k: k as i64,
            });
        }
        Ok(&self.rows[n][k])
    }

    pub fn row(&self, n: usize) -> Result<&[BigInt]> {
        self.rows.get(n).map(Vec::as_slice).ok_or(Error::StirlingRange {
            n: n as i64,
            k: 0,
        })
    }
}

/// Single Stirling number, `0 ≤ k ≤ n`.
pub fn stirling(kind: StirlingKind, n: i64, k: i64) -> Result<BigInt> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::StirlingRange { n, k });
    }
    StirlingTable::new(kind, n as usize)
        .get(n as usize, k as usize)
        .cloned()
}

/// Coefficients `T(k, j)` with `N^k = Σ_j T(k,j) a^j ā^j`, where
/// `a^j ā^j = (N+1)(N+2)⋯(N+j)`. Solved from the monic rising-factorial
/// basis by back substitution.
pub fn antinormal_power_coefficients(k: usize) -> Vec<BigInt> {
    // rising[j] = coefficients (ascending in N) of (N+1)…(N+j)
    let mut rising: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for j in 1..=k {
        let prev = &rising[j - 1];
        let mut next = vec![BigInt::zero(); j + 1];
        for (i, c) in prev.iter().enumerate() {
            next[i] += c * BigInt::from(j);
            next[i + 1] += c;
        }
        rising.push(next);
    }
    let mut residual = vec![BigInt::zero(); k + 1];
    residual[k] = BigInt::one();
    let mut out = vec![BigInt::zero(); k + 1];
    for j in (0..=k).rev() {
        let c = residual[j].clone();
        if c.is_zero() {
            continue;
        }
        for (i, r) in rising[j].iter().enumerate() {
            residual[i] -= &c * r;
        }
        out[j] = c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(stirling(StirlingKind::Second, 3, 2).unwrap(), BigInt::from(3));
        assert_eq!(stirling(StirlingKind::Second, 5, 3).unwrap(), BigInt::from(25));
        assert_eq!(stirling(StirlingKind::First, 4, 2).unwrap(), BigInt::from(11));
        assert_eq!(stirling(StirlingKind::First, 3, 1).unwrap(), BigInt::from(2));
        assert_eq!(stirling(StirlingKind::First, 3, 2).unwrap(), BigInt::from(-3));
        assert_eq!(stirling(StirlingKind::First, 0, 0).unwrap(), BigInt::one());
        assert!(stirling(StirlingKind::First, 2, 3).is_err());
        assert!(stirling(StirlingKind::Second, -1, 0).is_err());
    }

    #[test]
    fn second_kind_recurrence() {
        let t = StirlingTable::new(StirlingKind::Second, 12);
        for n in 0..11 {
            for k in 1..=n + 1 {
                let lhs = t.get(n + 1, k).unwrap().clone();
                let rhs = BigInt::from(k) * t.get(n, k).cloned().unwrap_or_default()
                    + t.get(n, k - 1).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn kinds_are_mutually_inverse() {
        let s1 = StirlingTable::new(StirlingKind::First, 10);
        let s2 = StirlingTable::new(StirlingKind::Second, 10);
        for n in 0..=10 {
            for m in 0..=n {
                let sum: BigInt = (m..=n)
                    .map(|k| s1.get(n, k).unwrap() * s2.get(k, m).unwrap())
                    .sum();
                assert_eq!(sum, if n == m { BigInt::one() } else { BigInt::zero() });
            }
        }
    }

    #[test]
    fn mixed_sum_identity() {
        // Σ_i S₁(n,i) S₂(i+1,j+1) = (j+1) δ_{n,j+1} + δ_{n,j}
        let s1 = StirlingTable::new(StirlingKind::First, 8);
        let s2 = StirlingTable::new(StirlingKind::Second, 8);
        for n in 0..=6usize {
            for j in 0..=n {
                let sum: BigInt = (j..=n)
                    .map(|i| s1.get(n, i).unwrap() * s2.get(i + 1, j + 1).unwrap())
                    .sum();
                let expected = BigInt::from(if n == j + 1 { j + 1 } else { 0 })
                    + BigInt::from(if n == j { 1 } else { 0 });
                assert_eq!(sum, expected, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn antinormal_coefficients_match_signed_second_kind() {
        // T(k, j) = (-1)^{k-j} S₂(k+1, j+1)
        let s2 = StirlingTable::new(StirlingKind::Second, 10);
        for k in 0..=8 {
            let t = antinormal_power_coefficients(k);
            for (j, c) in t.iter().enumerate() {
                let mut expected = s2.get(k + 1, j + 1).unwrap().clone();
                if (k - j) % 2 == 1 {
                    expected = -expected;
                }
                assert_eq!(c, &expected, "k={k} j={j}");
            }
        }
        assert_eq!(antinormal_power_coefficients(1), vec![BigInt::from(-1), BigInt::one()]);
    }
}
