use num_bigint::BigInt;
use std::fmt;

use super::{lcm_of_denominators, Rational, Scalar};
use crate::error::{Error, Result};

/// Dense row-major matrix over a [`Scalar`].
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::nil(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::unit() } else { S::nil() })
    }

    pub fn scalar_identity(n: usize, c: &S) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c.clone() } else { S::nil() })
    }

    pub fn diagonal(entries: Vec<S>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.plus(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.minus(b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.times(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.negated())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_nil() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if !b.is_nil() {
                        out.data[i * other.cols + j].add_product(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Left-to-right product of a non-empty chain.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a Self>) -> Result<Self>
    where
        S: 'a,
    {
        let mut iter = factors.into_iter();
        let first = iter.next().expect("empty matrix product").clone();
        iter.try_fold(first, |acc, m| acc.mul(m))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_nil() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_nil() {
                            out.set(i * other.rows + k, j * other.cols + l, a.times(b));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Result<S> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                op: "trace",
                left: self.shape(),
                right: self.shape(),
            });
        }
        let mut acc = S::nil();
        for i in 0..self.rows {
            acc.add_assign_ref(self.get(i, i));
        }
        Ok(acc)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn split_leading(&self, factor: usize) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                op: "partial trace",
                left: self.shape(),
                right: self.shape(),
            });
        }
        if factor == 0 || self.rows % factor != 0 {
            return Err(Error::NonDivisible {
                dim: self.rows,
                factor,
            });
        }
        Ok(self.rows / factor)
    }

    /// Trace over the leading tensor factor of dimension `aux_dim`
    /// (the space is `aux ⊗ rest`).
    pub fn partial_trace_leading(&self, aux_dim: usize) -> Result<Self> {
        let rest = self.split_leading(aux_dim)?;
        let mut out = Self::zeros(rest, rest);
        for a in 0..aux_dim {
            for i in 0..rest {
                for j in 0..rest {
                    out.get_mut(i, j)
                        .add_assign_ref(self.get(a * rest + i, a * rest + j));
                }
            }
        }
        Ok(out)
    }

    /// Trace over the trailing tensor factor of dimension `dim`.
    pub fn partial_trace_trailing(&self, dim: usize) -> Result<Self> {
        let lead = self.split_leading(dim)?;
        let mut out = Self::zeros(lead, lead);
        for i in 0..lead {
            for j in 0..lead {
                let mut acc = S::nil();
                for b in 0..dim {
                    acc.add_assign_ref(self.get(i * dim + b, j * dim + b));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Transposition in the leading tensor factor only.
    pub fn partial_transpose_leading(&self, aux_dim: usize) -> Result<Self> {
        let rest = self.split_leading(aux_dim)?;
        Ok(Self::from_fn(self.rows, self.cols, |r, c| {
            let (a, i) = (r / rest, r % rest);
            let (b, j) = (c / rest, c % rest);
            self.get(b * rest + i, a * rest + j).clone()
        }))
    }

    /// Block `(a, b)` of the leading factor: the `rest × rest` matrix
    /// `⟨a| M |b⟩`.
    pub fn leading_block(&self, aux_dim: usize, a: usize, b: usize) -> Result<Self> {
        let rest = self.split_leading(aux_dim)?;
        Ok(Self::from_fn(rest, rest, |i, j| {
            self.get(a * rest + i, b * rest + j).clone()
        }))
    }

    /// Assembles `Σ_{a,b} e_ab ⊗ blocks[a][b]`.
    pub fn from_blocks(blocks: &[Vec<Self>]) -> Result<Self> {
        let n = blocks.len();
        let rest = blocks[0][0].rows;
        let mut out = Self::zeros(n * rest, n * rest);
        for (a, row) in blocks.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    op: "from_blocks",
                    left: (n, n),
                    right: (n, row.len()),
                });
            }
            for (b, blk) in row.iter().enumerate() {
                if blk.shape() != (rest, rest) {
                    return Err(Error::DimensionMismatch {
                        op: "from_blocks",
                        left: (rest, rest),
                        right: blk.shape(),
                    });
                }
                for i in 0..rest {
                    for j in 0..rest {
                        out.set(a * rest + i, b * rest + j, blk.get(i, j).clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Principal submatrix on the given index set.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_nil())
    }

    /// First `(row, col)` where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if self.shape() != other.shape() {
            return Some((0, 0));
        }
        self.data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| a != b)
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// Dense embedding of `self`, an operator on the factors `positions`
    /// (listed most significant first), into the tensor space with factor
    /// dimensions `dims`; identity on every other factor.
    pub fn embed(&self, positions: &[usize], dims: &[usize]) -> Result<Self> {
        let sub_dim: usize = positions.iter().map(|&f| dims[f]).product();
        if self.shape() != (sub_dim, sub_dim) {
            return Err(Error::DimensionMismatch {
                op: "embed",
                left: self.shape(),
                right: (sub_dim, sub_dim),
            });
        }
        let total: usize = dims.iter().product();
        let digits = |mut idx: usize| {
            let mut out = vec![0usize; dims.len()];
            for f in (0..dims.len()).rev() {
                out[f] = idx % dims[f];
                idx /= dims[f];
            }
            out
        };
        let rest: Vec<usize> = (0..dims.len()).filter(|f| !positions.contains(f)).collect();
        let sub = |d: &[usize]| positions.iter().fold(0, |acc, &f| acc * dims[f] + d[f]);
        let mut out = Self::zeros(total, total);
        for r in 0..total {
            let dr = digits(r);
            for c in 0..total {
                let dc = digits(c);
                if rest.iter().any(|&f| dr[f] != dc[f]) {
                    continue;
                }
                let v = self.get(sub(&dr), sub(&dc));
                if !v.is_nil() {
                    out.set(r, c, v.clone());
                }
            }
        }
        Ok(out)
    }

    /// Right-multiplies by an operator acting on a subset of qubit factors.
    ///
    /// The row/column space is `(C^2)^{⊗ n_factors}`, factor 0 most
    /// significant. `gate` acts on `positions` (in the order given, first
    /// position most significant in the gate's own index).
    pub fn mul_local_right(&self, gate: &Self, positions: &[usize], n_factors: usize) -> Self {
        let k = positions.len();
        debug_assert_eq!(gate.rows, 1 << k);
        debug_assert_eq!(self.cols, 1 << n_factors);
        let bit = |f: usize| n_factors - 1 - f;
        let sub_index = |idx: usize| {
            positions
                .iter()
                .fold(0usize, |acc, &f| (acc << 1) | ((idx >> bit(f)) & 1))
        };
        let with_sub = |idx: usize, sub: usize| {
            let mut out = idx;
            for (t, &f) in positions.iter().enumerate() {
                let b = (sub >> (k - 1 - t)) & 1;
                out = (out & !(1 << bit(f))) | (b << bit(f));
            }
            out
        };
        let mut out = Self::zeros(self.rows, self.cols);
        for col in 0..self.cols {
            let g_col = sub_index(col);
            for g_row in 0..gate.rows {
                let g = gate.get(g_row, g_col);
                if g.is_nil() {
                    continue;
                }
                let src = with_sub(col, g_row);
                for row in 0..self.rows {
                    let x = &self.data[row * self.cols + src];
                    if !x.is_nil() {
                        out.data[row * self.cols + col].add_product(x, g);
                    }
                }
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:?}", self.get(i, j)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rational matrix product computed over integers after clearing
/// denominators; avoids a gcd per multiply-add.
pub fn mul_via_integers(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Result<Matrix<Rational>> {
    let da = lcm_of_denominators(a.entries());
    let db = lcm_of_denominators(b.entries());
    let ia: Matrix<BigInt> = a.map(|x| (x * Rational::from_integer(da.clone())).to_integer());
    let ib: Matrix<BigInt> = b.map(|x| (x * Rational::from_integer(db.clone())).to_integer());
    let prod = ia.mul(&ib)?;
    let scale = da * db;
    Ok(prod.map(|x| Rational::new(x.clone(), scale.clone())))
}
