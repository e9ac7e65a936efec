//! Transfer matrix, Q-operators and Hamiltonian as exact polynomial
//! matrices on the spin chain, plus magnon-block bookkeeping.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use num_bigint::BigInt;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::boundary::TraceKernel;
use crate::bulk::{Direction, LatticeModel, MonodromyProduct};
use crate::error::{Error, Result};
use crate::exact::{int, lcm_of_denominators, ExactPolynomial, Matrix, Rational, Scalar};
use crate::params::{ChainParams, Sign};
use crate::weyl::WeylElement;

/// Computational basis of `(C²)^{⊗L}`. Site 1 is the most significant bit;
/// a set bit is a down spin (index value 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinBasis {
    pub length: usize,
}

impl SpinBasis {
    pub fn new(length: usize) -> Self {
        Self { length }
    }

    pub fn dim(&self) -> usize {
        1 << self.length
    }

    /// Number of down spins.
    pub fn magnon(&self, index: usize) -> usize {
        index.count_ones() as usize
    }

    /// `"0110"`-style label, site 1 first.
    pub fn bitstring(&self, index: usize) -> String {
        (0..self.length)
            .map(|i| if index >> (self.length - 1 - i) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(&self, s: &str) -> Result<usize> {
        if s.len() != self.length || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Format(format!("bad basis label {s:?} for L = {}", self.length)));
        }
        usize::from_str_radix(s, 2).map_err(|e| Error::Format(e.to_string()))
    }

    /// Basis indices with `m` down spins, ascending.
    pub fn block(&self, m: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.magnon(i) == m).collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        (0..=self.length).map(|m| self.block(m).len()).collect()
    }

    /// Index of the globally spin-flipped state.
    pub fn flip(&self, index: usize) -> usize {
        !index & (self.dim() - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    T,
    #[serde(rename = "Q+")]
    QPlus,
    #[serde(rename = "Q-")]
    QMinus,
    H,
}

impl OperatorKind {
    pub fn q(sign: Sign) -> Self {
        match sign {
            Sign::Plus => OperatorKind::QPlus,
            Sign::Minus => OperatorKind::QMinus,
        }
    }

    pub fn sign(self) -> Option<Sign> {
        match self {
            OperatorKind::QPlus => Some(Sign::Plus),
            OperatorKind::QMinus => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::T => "T",
            OperatorKind::QPlus => "Q+",
            OperatorKind::QMinus => "Q-",
            OperatorKind::H => "H",
        })
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(OperatorKind::T),
            "Q+" | "q+" | "Qplus" | "qplus" => Ok(OperatorKind::QPlus),
            "Q-" | "q-" | "Qminus" | "qminus" => Ok(OperatorKind::QMinus),
            "H" | "h" => Ok(OperatorKind::H),
            other => Err(Error::InvalidParameters(format!(
                "unknown operator {other:?} (expected T, Q+, Q- or H)"
            ))),
        }
    }
}

/// A `2^L × 2^L` matrix of polynomials in `z` with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOperator {
    pub length: usize,
    pub p: Rational,
    pub q: Rational,
    pub kind: OperatorKind,
    pub entries: Matrix<ExactPolynomial>,
}

/// Degree data of one magnon block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub m: usize,
    pub size: usize,
    pub max_degree: Option<usize>,
    pub diagonal_degrees: Vec<Option<usize>>,
    /// Coefficient of `z^{max_degree}` on the diagonal, as `"num/den"`.
    pub diagonal_leading: Vec<String>,
    pub offdiagonal_max_degree: Option<usize>,
}

impl QuantumOperator {
    pub fn basis(&self) -> SpinBasis {
        SpinBasis::new(self.length)
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn at(&self, z0: &Rational) -> Matrix<Rational> {
        self.entries.map(|e| e.eval(z0))
    }

    /// Entries `A(c1·z + c0)`.
    pub fn substitute(&self, c1: &Rational, c0: &Rational) -> Matrix<ExactPolynomial> {
        self.entries.map(|e| e.substitute(c1, c0))
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries.entries().iter().filter_map(|e| e.degree()).max()
    }

    /// First nonzero entry connecting different magnon numbers.
    pub fn block_violation(&self) -> Option<Error> {
        block_violation(&self.entries)
    }

    /// Blocks `(m, entries)`; fails on any nonzero inter-block entry.
    pub fn magnon_decompose(&self) -> Result<Vec<(usize, Matrix<ExactPolynomial>)>> {
        if let Some(err) = self.block_violation() {
            return Err(err);
        }
        let basis = self.basis();
        Ok((0..=self.length)
            .map(|m| {
                let idx = basis.block(m);
                (m, self.entries.submatrix(&idx, &idx))
            })
            .collect())
    }

    pub fn leading_profile(&self) -> Result<Vec<BlockProfile>> {
        Ok(self
            .magnon_decompose()?
            .into_iter()
            .map(|(m, block)| profile(m, &block))
            .collect())
    }

    /// `1/(2m - L ∓ p ∓ q)` for the Q-operators.
    pub fn expected_leading(&self, m: usize) -> Option<Rational> {
        let sign = self.kind.sign()?;
        leading_prefactor(sign, self.length, m, &self.p, &self.q)
    }
}

/// `1/(2m - L ∓ p ∓ q)`; `None` at a pole.
pub fn leading_prefactor(sign: Sign, length: usize, m: usize, p: &Rational, q: &Rational) -> Option<Rational> {
    let d = int(2 * m as i64 - length as i64) - sign.as_rational() * (p + q);
    (!d.is_zero()).then(|| d.recip())
}

fn profile(m: usize, block: &Matrix<ExactPolynomial>) -> BlockProfile {
    let n = block.rows();
    let max_degree = block.entries().iter().filter_map(|e| e.degree()).max();
    let diagonal_degrees: Vec<_> = (0..n).map(|i| block.get(i, i).degree()).collect();
    let diagonal_leading = (0..n)
        .map(|i| {
            let c = max_degree.map(|d| block.get(i, i).coeff(d)).unwrap_or_else(|| int(0));
            crate::exact::format_rational(&c)
        })
        .collect();
    let offdiagonal_max_degree = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter_map(|(i, j)| block.get(i, j).degree())
        .max();
    BlockProfile {
        m,
        size: n,
        max_degree,
        diagonal_degrees,
        diagonal_leading,
        offdiagonal_max_degree,
    }
}

pub fn block_violation<S: Scalar>(m: &Matrix<S>) -> Option<Error> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let (mi, mj) = (i.count_ones() as usize, j.count_ones() as usize);
            if mi != mj && !m.get(i, j).is_nil() {
                return Some(Error::BlockViolation {
                    row: i,
                    col: j,
                    row_magnon: mi,
                    col_magnon: mj,
                });
            }
        }
    }
    None
}

/// `S M S` with `S = σ¹ ⊗ ⋯ ⊗ σ¹`.
pub fn spin_flip<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let mask = m.rows() - 1;
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(!i & mask, !j & mask).clone())
}

/// `tr₀ K(u) U(u)` at an arbitrary scalar argument.
pub fn transfer_matrix_at<S: Scalar>(model: &LatticeModel, length: usize, arg: &S) -> Result<Matrix<S>> {
    let u = model.double_row(length, arg);
    let k = model.k_left(arg);
    let dim = 1 << length;
    let mut t = Matrix::zeros(dim, dim);
    for a in 0..2 {
        for b in 0..2 {
            let kab = k.get(a, b);
            if kab.is_nil() {
                continue;
            }
            t = t.add(&u.leading_block(2, b, a)?.scale(kab))?;
        }
    }
    Ok(t)
}

pub fn transfer_matrix(params: &ChainParams) -> Result<QuantumOperator> {
    params.validate()?;
    transfer_matrix_for(&LatticeModel::from_params(params), params.length)
}

pub fn transfer_matrix_for(model: &LatticeModel, length: usize) -> Result<QuantumOperator> {
    let entries = transfer_matrix_at(model, length, &ExactPolynomial::z())?;
    Ok(QuantumOperator {
        length,
        p: model.p.clone(),
        q: model.q.clone(),
        kind: OperatorKind::T,
        entries,
    })
}

/// Which entries of Q to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    /// Every `(a, b)`, so inter-block leakage is visible.
    Full,
    /// Only pairs in the same magnon block; the rest are set to zero.
    BlockDiagonal,
}

/// Finalized strings of one monodromy entry as `((r, s), coefficient)`.
type Strings<S> = Vec<((u32, u32), S)>;

fn strings<S: Scalar>(w: Option<&WeylElement>, coeff: &impl Fn(&ExactPolynomial) -> S) -> Strings<S> {
    w.map(|w| {
        w.terms()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| ((m.r, m.s), coeff(c)))
            .collect()
    })
    .unwrap_or_default()
}

/// Strings of every entry, row-major.
fn all_strings<S: Scalar>(
    prod: &MonodromyProduct,
    dim: usize,
    coeff: &impl Fn(&ExactPolynomial) -> S,
) -> Vec<Strings<S>> {
    (0..dim * dim)
        .map(|i| strings(prod.oscillator_entry(i / dim, i % dim), coeff))
        .collect()
}

/// Core of the Q assembly: `Q_ab = Σ_c Σ x·y·P` with `x` from the
/// normal-ordered forward entry `(a, c)` and `y` from the anti-normal
/// reversed entry `(c, b)`.
fn assemble_q<S: Scalar>(
    dim: usize,
    fwd: &[Strings<S>],
    rev: &[Strings<S>],
    assembly: Assembly,
    mut pair: impl FnMut(u32, u32, u32, u32) -> Result<S>,
) -> Result<Matrix<S>> {
    let mut q = Matrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            if assembly == Assembly::BlockDiagonal && a.count_ones() != b.count_ones() {
                continue;
            }
            let mut acc = S::nil();
            for c in 0..dim {
                let xs = &fwd[a * dim + c];
                let ys = &rev[c * dim + b];
                if xs.is_empty() || ys.is_empty() {
                    continue;
                }
                for ((r1, r2), x) in xs {
                    for ((s1, s2), y) in ys {
                        // y multiplies a^{s2} ā^{s1}; Monomial (r, s) reads a^s ā^r.
                        if r1 + s1 != r2 + s2 {
                            continue;
                        }
                        let pt = pair(*r1, *r2, *s1, *s2)?;
                        if pt.is_nil() {
                            continue;
                        }
                        acc.add_product(&x.times(y), &pt);
                    }
                }
            }
            q.set(a, b, acc);
        }
    }
    Ok(q)
}

/// Exact `Q±(z)` as a polynomial matrix.
pub fn q_operator(params: &ChainParams, sign: Sign) -> Result<QuantumOperator> {
    params.validate()?;
    q_operator_for(&LatticeModel::from_params(params), params.length, sign, Assembly::Full)
}

pub fn q_operator_for(model: &LatticeModel, length: usize, sign: Sign, assembly: Assembly) -> Result<QuantumOperator> {
    let z = ExactPolynomial::z();
    let fwd = model.q_monodromy(sign, length, &z, Direction::Forward, crate::weyl::Ordering::Normal)?;
    let rev = model.q_monodromy(sign, length, &z, Direction::Reversed, crate::weyl::Ordering::AntiNormal)?;
    let kernel = TraceKernel::new(sign, model.p.clone(), model.q.clone());
    let dim = 1usize << length;
    let clone = |c: &ExactPolynomial| c.clone();
    let entries = assemble_q(
        dim,
        &all_strings(&fwd, dim, &clone),
        &all_strings(&rev, dim, &clone),
        assembly,
        |r1, r2, s1, s2| kernel.p_trace(r1, r2, s1, s2),
    )?;
    Ok(QuantumOperator {
        length,
        p: model.p.clone(),
        q: model.q.clone(),
        kind: OperatorKind::q(sign),
        entries,
    })
}

/// `Q±(z0)` built directly at a rational point. Every coefficient family is
/// scaled to integers first, so the inner loop runs without gcds.
pub fn q_operator_at(model: &LatticeModel, length: usize, sign: Sign, z0: &Rational, assembly: Assembly) -> Result<Matrix<Rational>> {
    let arg = ExactPolynomial::constant(z0.clone());
    let fwd = model.q_monodromy(sign, length, &arg, Direction::Forward, crate::weyl::Ordering::Normal)?;
    let rev = model.q_monodromy(sign, length, &arg, Direction::Reversed, crate::weyl::Ordering::AntiNormal)?;
    let kernel = TraceKernel::new(sign, model.p.clone(), model.q.clone());
    let dim = 1usize << length;
    let value = |c: &ExactPolynomial| c.coeff(0);
    let fx = all_strings(&fwd, dim, &value);
    let ry = all_strings(&rev, dim, &value);

    let keys = |v: &[Strings<Rational>]| v.iter().flatten().map(|(k, _)| *k).collect::<BTreeSet<_>>();
    let mut pvals = HashMap::new();
    for &(r1, r2) in &keys(&fx) {
        for &(s1, s2) in &keys(&ry) {
            if r1 + s1 == r2 + s2 {
                pvals.insert((r1, r2, s1, s2), kernel.p_trace(r1, r2, s1, s2)?.eval(z0));
            }
        }
    }
    let dx = lcm_of_denominators(fx.iter().flatten().map(|(_, c)| c));
    let dy = lcm_of_denominators(ry.iter().flatten().map(|(_, c)| c));
    let dp = lcm_of_denominators(pvals.values());
    let scale = |v: &[Strings<Rational>], d: &BigInt| -> Vec<Strings<BigInt>> {
        let d = Rational::from_integer(d.clone());
        v.iter()
            .map(|s| s.iter().map(|(k, c)| (*k, (c * &d).to_integer())).collect())
            .collect()
    };
    let dpr = Rational::from_integer(dp.clone());
    let pint: HashMap<_, BigInt> = pvals.iter().map(|(k, v)| (*k, (v * &dpr).to_integer())).collect();
    let ints = assemble_q(dim, &scale(&fx, &dx), &scale(&ry, &dy), assembly, |r1, r2, s1, s2| {
        Ok(pint.get(&(r1, r2, s1, s2)).cloned().unwrap_or_default())
    })?;
    let den = dx * dy * dp;
    Ok(ints.map(|v| Rational::new(v.clone(), den.clone())))
}

/// `H = Σ σ⃗_i·σ⃗_{i+1} + ξσ³₁ + ξ̂σ³_L`.
pub fn hamiltonian(length: usize, xi: &Rational, xi_hat: &Rational) -> Result<Matrix<Rational>> {
    if length == 0 || length > crate::params::MAX_LENGTH {
        return Err(Error::InvalidParameters(format!("chain length {length} out of range")));
    }
    let dim = 1usize << length;
    let bit = |state: usize, site: usize| state >> (length - 1 - site) & 1;
    let sz = |state: usize, site: usize| if bit(state, site) == 0 { int(1) } else { int(-1) };
    let mut h = Matrix::zeros(dim, dim);
    for s in 0..dim {
        let mut diag = xi * sz(s, 0) + xi_hat * sz(s, length - 1);
        for i in 0..length.saturating_sub(1) {
            // σ⃗·σ⃗ = 2ℙ - 1
            if bit(s, i) == bit(s, i + 1) {
                diag += int(1);
            } else {
                diag -= int(1);
                let swapped = s ^ (1 << (length - 1 - i)) ^ (1 << (length - 2 - i));
                h.set(swapped, s, int(2));
            }
        }
        h.set(s, s, diag);
    }
    Ok(h)
}

pub fn hamiltonian_operator(params: &ChainParams) -> Result<QuantumOperator> {
    let h = hamiltonian(params.length, &params.xi()?, &params.xi_hat()?)?;
    Ok(QuantumOperator {
        length: params.length,
        p: params.p.clone(),
        q: params.q.clone(),
        kind: OperatorKind::H,
        entries: h.map(|v| ExactPolynomial::constant(v.clone())),
    })
}

/// `T'(0)/(2pq) - L`.
pub fn hamiltonian_from_transfer(model: &LatticeModel, length: usize) -> Result<Matrix<Rational>> {
    if model.p.is_zero() || model.q.is_zero() {
        return Err(Error::InvalidParameters("p and q must be non-zero".into()));
    }
    let t = transfer_matrix_for(model, length)?;
    let scale = (int(2) * &model.p * &model.q).recip();
    let l = int(length as i64);
    Ok(Matrix::from_fn(t.dim(), t.dim(), |i, j| {
        let v = t.entries.get(i, j).derivative().eval(&int(0)) * &scale;
        if i == j {
            v - &l
        } else {
            v
        }
    }))
}
