//! Ordered oscillator expressions over `[a, ā] = 1`, `N = ā a`.
//!
//! Elements are sums of `ā^r N^k a^s` (normal convention) or `a^s N^k ā^r`
//! (anti-normal convention) with polynomial coefficients. Products keep the
//! number-operator powers symbolic; [`WeylElement::finalize`] removes them.

mod stirling;

pub use stirling::{antinormal_power_coefficients, stirling, StirlingKind, StirlingTable};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{ExactPolynomial, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Creation operators to the left: `ā^r N^k a^s`.
    Normal,
    /// Annihilation operators to the left: `a^s N^k ā^r`.
    AntiNormal,
}

/// Exponents of one ordered string. `r` counts creation operators, `s`
/// annihilation operators, `k` the power of `N` between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub r: u32,
    pub k: u32,
    pub s: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { r: 0, k: 0, s: 0 };

    pub fn string(r: u32, s: u32) -> Self {
        Self { r, k: 0, s }
    }

    /// Net change of the Fock level: `r - s`.
    pub fn net(&self) -> i64 {
        self.r as i64 - self.s as i64
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct WeylElement {
    ordering: Ordering,
    terms: BTreeMap<Monomial, ExactPolynomial>,
}

impl WeylElement {
    pub fn zero(ordering: Ordering) -> Self {
        Self {
            ordering,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ordering: Ordering) -> Self {
        Self::scalar(ordering, ExactPolynomial::one())
    }

    pub fn scalar(ordering: Ordering, c: ExactPolynomial) -> Self {
        Self::term(ordering, Monomial::ONE, c)
    }

    pub fn term(ordering: Ordering, m: Monomial, c: ExactPolynomial) -> Self {
        let mut out = Self::zero(ordering);
        out.add_term(m, c);
        out
    }

    /// `ā`.
    pub fn creation(ordering: Ordering) -> Self {
        Self::term(ordering, Monomial::string(1, 0), ExactPolynomial::one())
    }

    /// `a`.
    pub fn annihilation(ordering: Ordering) -> Self {
        Self::term(ordering, Monomial::string(0, 1), ExactPolynomial::one())
    }

    /// `N`, kept symbolic.
    pub fn number(ordering: Ordering) -> Self {
        Self::term(ordering, Monomial { r: 0, k: 1, s: 0 }, ExactPolynomial::one())
    }

    /// `c + N`.
    pub fn shifted_number(ordering: Ordering, c: ExactPolynomial) -> Self {
        let mut out = Self::number(ordering);
        out.add_term(Monomial::ONE, c);
        out
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactPolynomial)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> ExactPolynomial {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_finalized(&self) -> bool {
        self.terms.keys().all(|m| m.k == 0)
    }

    /// Largest number of creation operators in any term; the most a single
    /// application can raise the Fock level.
    pub fn max_raise(&self) -> u32 {
        self.terms.keys().map(|m| m.r).max().unwrap_or(0)
    }

    pub fn max_lower(&self) -> u32 {
        self.terms.keys().map(|m| m.s).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: ExactPolynomial) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ordering != other.ordering {
            Err(Error::MixedOrdering)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, c: &ExactPolynomial) -> Self {
        self.map_coefficients(|x| x * c)
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coefficients(&self, mut f: impl FnMut(&ExactPolynomial) -> ExactPolynomial) -> Self {
        let mut out = Self::zero(self.ordering);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Coefficients at `z -> c1 * z + c0`.
    pub fn substitute(&self, c1: &Rational, c0: &Rational) -> Self {
        self.map_coefficients(|c| c.substitute(c1, c0))
    }

    /// Product reordered into the shared convention using
    /// `a ā = ā a + 1`, `N ā = ā (N + 1)` and `N a = a (N - 1)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.ordering);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let coeff = c1 * c2;
                if coeff.is_zero() {
                    continue;
                }
                match self.ordering {
                    Ordering::Normal => mul_normal(&mut out, m1, m2, &coeff),
                    Ordering::AntiNormal => mul_antinormal(&mut out, m1, m2, &coeff),
                }
            }
        }
        Ok(out)
    }

    /// Eliminates every power of `N`, leaving pure ordered strings.
    pub fn finalize(&self) -> Self {
        if self.is_finalized() {
            return self.clone();
        }
        let max_k = self.terms.keys().map(|m| m.k).max().unwrap_or(0) as usize;
        let s2 = StirlingTable::new(StirlingKind::Second, max_k);
        let mut out = Self::zero(self.ordering);
        for (m, c) in &self.terms {
            let k = m.k as usize;
            let coeffs: Vec<BigInt> = match self.ordering {
                // N^k = Σ_j S₂(k,j) ā^j a^j
                Ordering::Normal => s2.row(k).expect("row in table").to_vec(),
                // N^k = Σ_j T(k,j) a^j ā^j
                Ordering::AntiNormal => antinormal_power_coefficients(k),
            };
            for (j, w) in coeffs.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                let target = Monomial::string(m.r + j as u32, m.s + j as u32);
                out.add_term(target, c.scale(&Rational::from_integer(w.clone())));
            }
        }
        out
    }

    /// Rewrites a finalized copy of `self` in the requested convention.
    pub fn to_ordering(&self, ordering: Ordering) -> Self {
        let fin = self.finalize();
        if ordering == self.ordering {
            return fin;
        }
        let mut out = Self::zero(ordering);
        for (m, c) in &fin.terms {
            let cre = Self::term(ordering, Monomial::string(m.r, 0), c.clone());
            let ann = Self::term(ordering, Monomial::string(0, m.s), ExactPolynomial::one());
            let prod = match self.ordering {
                Ordering::Normal => cre.mul(&ann),
                Ordering::AntiNormal => ann.mul(&cre),
            }
            .expect("same ordering");
            for (m2, c2) in prod.finalize().terms {
                out.add_term(m2, c2);
            }
        }
        out
    }
}

/// Coefficients (ascending in `N`) of `(N + α)^k1 (N + β)^k2`.
fn shifted_power_product(alpha: i64, k1: u32, beta: i64, k2: u32) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    let factors = std::iter::repeat(alpha)
        .take(k1 as usize)
        .chain(std::iter::repeat(beta).take(k2 as usize));
    for shift in factors {
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c * BigInt::from(shift);
            next[i + 1] += c;
        }
        poly = next;
    }
    poly
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

// (ā^r1 N^k1 a^s1)(ā^r2 N^k2 a^s2)
//   = Σ_j C(s1,j) C(r2,j) j! ā^{r1+r2-j} (N+r2-j)^k1 (N+s1-j)^k2 a^{s1+s2-j}
fn mul_normal(out: &mut WeylElement, m1: &Monomial, m2: &Monomial, coeff: &ExactPolynomial) {
    for j in 0..=m1.s.min(m2.r) {
        let w = binomial(m1.s, j) * binomial(m2.r, j) * factorial(j);
        let npoly = shifted_power_product((m2.r - j) as i64, m1.k, (m1.s - j) as i64, m2.k);
        push_terms(out, m1.r + m2.r - j, m1.s + m2.s - j, &w, &npoly, coeff);
    }
}

// (a^s1 N^k1 ā^r1)(a^s2 N^k2 ā^r2)
//   = Σ_j (-1)^j C(r1,j) C(s2,j) j! a^{s1+s2-j} (N-s2+j)^k1 (N-r1+j)^k2 ā^{r1+r2-j}
fn mul_antinormal(out: &mut WeylElement, m1: &Monomial, m2: &Monomial, coeff: &ExactPolynomial) {
    for j in 0..=m1.r.min(m2.s) {
        let mut w = binomial(m1.r, j) * binomial(m2.s, j) * factorial(j);
        if j % 2 == 1 {
            w = -w;
        }
        let npoly = shifted_power_product(
            j as i64 - m2.s as i64,
            m1.k,
            j as i64 - m1.r as i64,
            m2.k,
        );
        push_terms(out, m1.r + m2.r - j, m1.s + m2.s - j, &w, &npoly, coeff);
    }
}

fn push_terms(
    out: &mut WeylElement,
    r: u32,
    s: u32,
    weight: &BigInt,
    npoly: &[BigInt],
    coeff: &ExactPolynomial,
) {
    for (k, e) in npoly.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let scale = Rational::from_integer(weight * e);
        out.add_term(Monomial { r, k: k as u32, s }, coeff.scale(&scale));
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut ops = Vec::new();
                let cre = (m.r > 0).then(|| format!("ā^{}", m.r));
                let num = (m.k > 0).then(|| format!("N^{}", m.k));
                let ann = (m.s > 0).then(|| format!("a^{}", m.s));
                match self.ordering {
                    Ordering::Normal => ops.extend([cre, num, ann].into_iter().flatten()),
                    Ordering::AntiNormal => ops.extend([ann, num, cre].into_iter().flatten()),
                }
                if ops.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})·{}", ops.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
