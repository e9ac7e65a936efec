//! R-matrix, Lax operators and single-row monodromies.
//!
//! Every building block is produced by a [`LatticeModel`], which optionally
//! carries a single-entry [`Perturbation`]; the verification catalog builds
//! everything from a model so injected faults propagate everywhere.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{int, ExactPolynomial, Matrix, Rational, Scalar};
use crate::params::{ChainParams, Sign};
use crate::weyl::{Monomial, Ordering, WeylElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaxVariant {
    /// `R(z)` itself, acting on auxiliary ⊗ site.
    Fundamental,
    Plus,
    Minus,
    BarPlus,
    BarMinus,
}

impl LaxVariant {
    pub const OSCILLATOR: [LaxVariant; 4] = [
        LaxVariant::Plus,
        LaxVariant::Minus,
        LaxVariant::BarPlus,
        LaxVariant::BarMinus,
    ];

    pub fn for_sign(sign: Sign) -> Self {
        match sign {
            Sign::Plus => LaxVariant::Plus,
            Sign::Minus => LaxVariant::Minus,
        }
    }

    pub fn bar_for_sign(sign: Sign) -> Self {
        match sign {
            Sign::Plus => LaxVariant::BarPlus,
            Sign::Minus => LaxVariant::BarMinus,
        }
    }

    pub fn is_oscillator(self) -> bool {
        self != LaxVariant::Fundamental
    }
}

impl fmt::Display for LaxVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LaxVariant::Fundamental => "R",
            LaxVariant::Plus => "L+",
            LaxVariant::Minus => "L-",
            LaxVariant::BarPlus => "Lbar+",
            LaxVariant::BarMinus => "Lbar-",
        };
        f.write_str(s)
    }
}

/// Which building block a [`Perturbation`] hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbTarget {
    RMatrix,
    Lax(LaxVariant),
    KLeft,
    KRight,
}

/// Adds `+1` to entry `(row, col)` of one building block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perturbation {
    pub target: PerturbTarget,
    pub row: usize,
    pub col: usize,
}

impl Perturbation {
    /// Every single-entry fault: 16 for `R`, 4 for each Lax operator and
    /// each boundary matrix.
    pub fn catalog() -> Vec<Perturbation> {
        let mut out = Vec::new();
        for row in 0..4 {
            for col in 0..4 {
                out.push(Perturbation { target: PerturbTarget::RMatrix, row, col });
            }
        }
        let twos = LaxVariant::OSCILLATOR
            .iter()
            .map(|&v| PerturbTarget::Lax(v))
            .chain([PerturbTarget::KLeft, PerturbTarget::KRight]);
        for target in twos {
            for row in 0..2 {
                for col in 0..2 {
                    out.push(Perturbation { target, row, col });
                }
            }
        }
        out
    }

    fn hits(&self, target: PerturbTarget, row: usize, col: usize) -> bool {
        self.target == target && self.row == row && self.col == col
    }
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.target {
            PerturbTarget::RMatrix => "R".to_string(),
            PerturbTarget::Lax(v) => v.to_string(),
            PerturbTarget::KLeft => "K".to_string(),
            PerturbTarget::KRight => "Khat".to_string(),
        };
        write!(f, "{name}[{},{}] += 1", self.row, self.col)
    }
}

/// Parses `name:row:col` with `name` one of `R`, `L+`, `L-`, `Lbar+`,
/// `Lbar-`, `K`, `Khat`.
impl std::str::FromStr for Perturbation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameters(format!("perturbation {s:?}: expected name:row:col"));
        let mut parts = s.trim().split(':');
        let (name, row, col) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(r), Some(c), None) => (n, r, c),
            _ => return Err(bad()),
        };
        let target = match name {
            "R" => PerturbTarget::RMatrix,
            "K" => PerturbTarget::KLeft,
            "Khat" => PerturbTarget::KRight,
            other => PerturbTarget::Lax(
                LaxVariant::OSCILLATOR
                    .iter()
                    .copied()
                    .find(|v| v.to_string() == other)
                    .ok_or_else(bad)?,
            ),
        };
        let row: usize = row.parse().map_err(|_| bad())?;
        let col: usize = col.parse().map_err(|_| bad())?;
        let size = if target == PerturbTarget::RMatrix { 4 } else { 2 };
        if row >= size || col >= size {
            return Err(bad());
        }
        Ok(Perturbation { target, row, col })
    }
}

/// One Lax entry: `constant + arg·u + number·N + creation·ā + annihilation·a`
/// where `u` is the spectral argument.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OscEntry {
    pub constant: Rational,
    pub arg: Rational,
    pub number: Rational,
    pub creation: Rational,
    pub annihilation: Rational,
}

impl OscEntry {
    fn constant(c: i64) -> Self {
        Self { constant: int(c), ..Default::default() }
    }

    fn creation() -> Self {
        Self { creation: int(1), ..Default::default() }
    }

    fn annihilation() -> Self {
        Self { annihilation: int(1), ..Default::default() }
    }

    /// `c + s·u + n·N`.
    fn shifted(c: i64, s: i64, n: i64) -> Self {
        Self {
            constant: int(c),
            arg: int(s),
            number: int(n),
            ..Default::default()
        }
    }

    pub fn to_weyl(&self, arg: &ExactPolynomial, ordering: Ordering) -> WeylElement {
        let mut out = WeylElement::zero(ordering);
        let scalar = &ExactPolynomial::constant(self.constant.clone()) + &arg.scale(&self.arg);
        out.add_term(Monomial::ONE, scalar);
        let n = WeylElement::number(ordering)
            .finalize()
            .scale(&ExactPolynomial::constant(self.number.clone()));
        out = out.add(&n).expect("same ordering");
        out.add_term(Monomial::string(1, 0), ExactPolynomial::constant(self.creation.clone()));
        out.add_term(Monomial::string(0, 1), ExactPolynomial::constant(self.annihilation.clone()));
        out
    }

    /// Exact matrix on Fock levels `0..=cutoff` in the unnormalised basis
    /// `ā|n⟩ = |n+1⟩`, `a|n⟩ = n|n-1⟩`.
    pub fn to_fock<S: Scalar>(&self, arg: &S, cutoff: usize) -> Matrix<S> {
        let dim = cutoff + 1;
        let base = S::from_rational(&self.constant).plus(&arg.times(&S::from_rational(&self.arg)));
        Matrix::from_fn(dim, dim, |m, n| {
            if m == n {
                base.plus(&S::from_rational(&(&self.number * int(n as i64))))
            } else if m == n + 1 {
                S::from_rational(&self.creation)
            } else if m + 1 == n {
                S::from_rational(&(&self.annihilation * int(n as i64)))
            } else {
                S::nil()
            }
        })
    }

    /// Level shift and weight of this entry on `|n⟩`, when it is a single
    /// string; `None` for sums of different strings.
    pub fn act(&self, arg: &Rational, n: u64) -> Option<(i64, Rational)> {
        let nz = |r: &Rational| !num_traits::Zero::is_zero(r);
        let diag = nz(&self.number) || nz(&self.constant) || nz(&self.arg);
        let up = nz(&self.creation);
        let down = nz(&self.annihilation);
        match (diag, up, down) {
            (_, false, false) => Some((
                0,
                &self.constant + &self.arg * arg + &self.number * int(n as i64),
            )),
            (false, true, false) => Some((1, self.creation.clone())),
            (false, false, true) => Some((-1, &self.annihilation * int(n as i64))),
            _ => None,
        }
    }
}

/// Boundary parameters plus an optional injected fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeModel {
    pub p: Rational,
    pub q: Rational,
    pub perturbation: Option<Perturbation>,
}

impl LatticeModel {
    pub fn new(p: Rational, q: Rational) -> Self {
        Self { p, q, perturbation: None }
    }

    pub fn from_params(params: &ChainParams) -> Self {
        Self::new(params.p.clone(), params.q.clone())
    }

    pub fn with_perturbation(mut self, perturbation: Perturbation) -> Self {
        self.perturbation = Some(perturbation);
        self
    }

    /// `(p, q) -> (-p, -q)`, keeping the fault.
    pub fn negated(&self) -> Self {
        Self {
            p: -self.p.clone(),
            q: -self.q.clone(),
            perturbation: self.perturbation,
        }
    }

    fn bump<S: Scalar>(&self, target: PerturbTarget, m: &mut Matrix<S>) {
        if let Some(pert) = self.perturbation {
            if pert.target == target {
                let v = m.get(pert.row, pert.col).plus(&S::unit());
                m.set(pert.row, pert.col, v);
            }
        }
    }

    /// `R(u) = u + P` on `C² ⊗ C²`.
    pub fn r_matrix<S: Scalar>(&self, arg: &S) -> Matrix<S> {
        let mut m = Matrix::from_fn(4, 4, |r, c| {
            let swapped = (r % 2) * 2 + r / 2;
            let mut v = if r == c { arg.clone() } else { S::nil() };
            if c == swapped {
                v = v.plus(&S::unit());
            }
            v
        });
        self.bump(PerturbTarget::RMatrix, &mut m);
        m
    }

    /// `K(u) = diag(p+u+1, p-u-1)`.
    pub fn k_left<S: Scalar>(&self, arg: &S) -> Matrix<S> {
        let p = S::from_rational(&self.p);
        let one = S::unit();
        let mut m = Matrix::diagonal(vec![p.plus(arg).plus(&one), p.minus(arg).minus(&one)]);
        self.bump(PerturbTarget::KLeft, &mut m);
        m
    }

    /// `K̂(u) = diag(q+u, q-u)`.
    pub fn k_right<S: Scalar>(&self, arg: &S) -> Matrix<S> {
        let q = S::from_rational(&self.q);
        let mut m = Matrix::diagonal(vec![q.plus(arg), q.minus(arg)]);
        self.bump(PerturbTarget::KRight, &mut m);
        m
    }

    /// Entries of an oscillator Lax operator as functions of its argument.
    pub fn lax_entries(&self, variant: LaxVariant) -> Result<[[OscEntry; 2]; 2]> {
        use OscEntry as E;
        let mut m = match variant {
            LaxVariant::Fundamental => {
                return Err(Error::InvalidParameters(
                    "the fundamental Lax operator has no oscillator entries".into(),
                ))
            }
            LaxVariant::Plus => [
                [E::constant(1), E::creation()],
                [E::annihilation(), E::shifted(1, 1, 1)],
            ],
            LaxVariant::Minus => [
                [E::shifted(1, 1, 1), E::annihilation()],
                [E::creation(), E::constant(1)],
            ],
            LaxVariant::BarPlus => [
                [E::shifted(0, 1, -1), E::creation()],
                [E::annihilation(), E::constant(-1)],
            ],
            LaxVariant::BarMinus => [
                [E::constant(-1), E::annihilation()],
                [E::creation(), E::shifted(0, 1, -1)],
            ],
        };
        if let Some(pert) = self.perturbation {
            for (r, row) in m.iter_mut().enumerate() {
                for (c, e) in row.iter_mut().enumerate() {
                    if pert.hits(PerturbTarget::Lax(variant), r, c) {
                        e.constant += int(1);
                    }
                }
            }
        }
        Ok(m)
    }

    /// Oscillator Lax operator with finalized Weyl entries.
    pub fn lax(
        &self,
        variant: LaxVariant,
        arg: &ExactPolynomial,
        ordering: Ordering,
    ) -> Result<[[WeylElement; 2]; 2]> {
        let e = self.lax_entries(variant)?;
        Ok([
            [e[0][0].to_weyl(arg, ordering), e[0][1].to_weyl(arg, ordering)],
            [e[1][0].to_weyl(arg, ordering), e[1][1].to_weyl(arg, ordering)],
        ])
    }

    /// Oscillator Lax operator on `C² ⊗ Fock(cutoff)` (two-dimensional
    /// factor leading).
    pub fn lax_fock<S: Scalar>(&self, variant: LaxVariant, arg: &S, cutoff: usize) -> Result<Matrix<S>> {
        let e = self.lax_entries(variant)?;
        let blocks: Vec<Vec<Matrix<S>>> = e
            .iter()
            .map(|row| row.iter().map(|x| x.to_fock(arg, cutoff)).collect())
            .collect();
        Matrix::from_blocks(&blocks)
    }

    /// Single-row fundamental monodromy on `aux ⊗ site₁ ⊗ … ⊗ site_L`.
    pub fn fundamental_monodromy<S: Scalar>(&self, length: usize, arg: &S, direction: Direction) -> Matrix<S> {
        let r = self.r_matrix(arg);
        let dim = 1 << (length + 1);
        let mut m = Matrix::identity(dim);
        for site in direction.sites(length) {
            m = m.mul_local_right(&r, &[0, site], length + 1);
        }
        m
    }

    /// Double-row monodromy `U(u) = M(u) K̂(u) M̂(u)`.
    pub fn double_row<S: Scalar>(&self, length: usize, arg: &S) -> Matrix<S> {
        let r = self.r_matrix(arg);
        let n = length + 1;
        let mut m = Matrix::identity(1 << n);
        for site in 1..=length {
            m = m.mul_local_right(&r, &[0, site], n);
        }
        m = m.mul_local_right(&self.k_right(arg), &[0], n);
        for site in (1..=length).rev() {
            m = m.mul_local_right(&r, &[0, site], n);
        }
        m
    }

    /// Oscillator monodromy entries `(M)_{a c}` over the quantum space,
    /// finalized in `ordering`. Forward products are `L_{a₁c₁}⋯L_{a_Lc_L}`,
    /// reversed ones `L_{a_Lc_L}⋯L_{a₁c₁}`.
    pub fn q_monodromy(
        &self,
        sign: Sign,
        length: usize,
        arg: &ExactPolynomial,
        direction: Direction,
        ordering: Ordering,
    ) -> Result<MonodromyProduct> {
        let lax = self.lax(LaxVariant::for_sign(sign), arg, ordering)?;
        let mut entries = vec![WeylElement::one(ordering)];
        for l in 0..length {
            let prev = 1usize << l;
            let next = prev << 1;
            let mut grown = vec![WeylElement::zero(ordering); next * next];
            for a in 0..prev {
                for c in 0..prev {
                    let acc = &entries[a * prev + c];
                    for (ai, lax_row) in lax.iter().enumerate() {
                        for (ci, factor) in lax_row.iter().enumerate() {
                            let prod = match direction {
                                Direction::Forward => acc.mul(factor)?,
                                Direction::Reversed => factor.mul(acc)?,
                            };
                            grown[((a << 1) | ai) * next + ((c << 1) | ci)] = prod.finalize();
                        }
                    }
                }
            }
            entries = grown;
        }
        Ok(MonodromyProduct {
            direction,
            carrier: Carrier::Oscillator { dim: 1 << length, ordering, entries },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Sites `1, …, L`.
    Forward,
    /// Sites `L, …, 1`.
    Reversed,
}

impl Direction {
    fn sites(self, length: usize) -> Vec<usize> {
        match self {
            Direction::Forward => (1..=length).collect(),
            Direction::Reversed => (1..=length).rev().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Carrier {
    Fundamental(Matrix<ExactPolynomial>),
    /// Row-major `dim × dim` grid of Weyl entries.
    Oscillator {
        dim: usize,
        ordering: Ordering,
        entries: Vec<WeylElement>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyProduct {
    pub direction: Direction,
    pub carrier: Carrier,
}

impl MonodromyProduct {
    pub fn oscillator_entry(&self, row: usize, col: usize) -> Option<&WeylElement> {
        match &self.carrier {
            Carrier::Oscillator { dim, entries, .. } => entries.get(row * dim + col),
            Carrier::Fundamental(_) => None,
        }
    }

    pub fn fundamental(&self) -> Option<&Matrix<ExactPolynomial>> {
        match &self.carrier {
            Carrier::Fundamental(m) => Some(m),
            Carrier::Oscillator { .. } => None,
        }
    }
}

/// `sign·z + shift` as a polynomial.
fn argument(shift: &Rational, sign: Sign) -> ExactPolynomial {
    ExactPolynomial::linear(sign.as_rational(), shift.clone())
}

/// `R(sign·z + shift)`.
pub fn r_matrix(shift: &Rational, sign: Sign) -> Matrix<ExactPolynomial> {
    LatticeModel::new(int(0), int(0)).r_matrix(&argument(shift, sign))
}

/// Oscillator Lax operator at `sign·z + shift`, normal ordered.
pub fn lax(variant: LaxVariant, shift: &Rational, sign: Sign) -> Result<[[WeylElement; 2]; 2]> {
    LatticeModel::new(int(0), int(0)).lax(variant, &argument(shift, sign), Ordering::Normal)
}

pub fn fundamental_monodromy(length: usize, direction: Direction) -> MonodromyProduct {
    let m = LatticeModel::new(int(0), int(0)).fundamental_monodromy(length, &ExactPolynomial::z(), direction);
    MonodromyProduct { direction, carrier: Carrier::Fundamental(m) }
}

/// Forward entries normal ordered, reversed entries anti-normal ordered.
pub fn q_monodromy(sign: Sign, length: usize, direction: Direction) -> Result<MonodromyProduct> {
    let ordering = match direction {
        Direction::Forward => Ordering::Normal,
        Direction::Reversed => Ordering::AntiNormal,
    };
    LatticeModel::new(int(0), int(0)).q_monodromy(sign, length, &ExactPolynomial::z(), direction, ordering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn z() -> ExactPolynomial {
        ExactPolynomial::z()
    }

    fn model() -> LatticeModel {
        LatticeModel::new(rat(2, 3), rat(3, 5))
    }

    fn poly_const(v: Rational) -> ExactPolynomial {
        ExactPolynomial::constant(v)
    }

    #[test]
    fn r_at_zero_is_permutation() {
        let r0 = r_matrix(&int(0), Sign::Plus).map(|e| e.eval(&int(0)));
        let perm = Matrix::from_fn(4, 4, |r, c| int(((r % 2) * 2 + r / 2 == c) as i64));
        assert_eq!(r0, perm);
    }

    #[test]
    fn r_unitarity() {
        let lhs = r_matrix(&int(0), Sign::Plus)
            .mul(&r_matrix(&int(0), Sign::Minus))
            .unwrap();
        let c = ExactPolynomial::from_ints(&[1, 0, -1]);
        assert_eq!(lhs, Matrix::scalar_identity(4, &c));
    }

    #[test]
    fn yang_baxter_at_a_point() {
        let m = model();
        let (x, y) = (rat(2, 3), rat(1, 5));
        let dims = [2, 2, 2];
        let r12 = m.r_matrix(&(&x - &y)).embed(&[0, 1], &dims).unwrap();
        let r13 = m.r_matrix(&x).embed(&[0, 2], &dims).unwrap();
        let r23 = m.r_matrix(&y).embed(&[1, 2], &dims).unwrap();
        let lhs = Matrix::product([&r12, &r13, &r23]).unwrap();
        let rhs = Matrix::product([&r23, &r13, &r12]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lax_unitarity_in_weyl_algebra() {
        for sign in Sign::both() {
            let m = model();
            let l = m.lax(LaxVariant::for_sign(sign), &z(), Ordering::Normal).unwrap();
            let lb = m.lax(LaxVariant::bar_for_sign(sign), &-z(), Ordering::Normal).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = WeylElement::zero(Ordering::Normal);
                    for k in 0..2 {
                        acc = acc.add(&l[i][k].mul(&lb[k][j]).unwrap()).unwrap();
                    }
                    let expected = if i == j {
                        WeylElement::scalar(Ordering::Normal, -z())
                    } else {
                        WeylElement::zero(Ordering::Normal)
                    };
                    assert_eq!(acc.finalize(), expected, "sign {sign} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn lax_crossing_unitarity_in_weyl_algebra() {
        // L̄ᵗ(-z-2) Lᵗ(z) = -(z+1)
        let m = model();
        let shifted = ExactPolynomial::from_ints(&[-2, -1]);
        for sign in Sign::both() {
            let l = m.lax(LaxVariant::for_sign(sign), &z(), Ordering::Normal).unwrap();
            let lb = m.lax(LaxVariant::bar_for_sign(sign), &shifted, Ordering::Normal).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = WeylElement::zero(Ordering::Normal);
                    for k in 0..2 {
                        acc = acc.add(&lb[k][i].mul(&l[j][k]).unwrap()).unwrap();
                    }
                    let expected = if i == j {
                        WeylElement::scalar(Ordering::Normal, ExactPolynomial::from_ints(&[-1, -1]))
                    } else {
                        WeylElement::zero(Ordering::Normal)
                    };
                    assert_eq!(acc.finalize(), expected, "sign {sign} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn minus_lax_corner_entry() {
        let l = lax(LaxVariant::Minus, &int(0), Sign::Plus).unwrap();
        let mut expected = WeylElement::term(Ordering::Normal, Monomial::string(1, 1), ExactPolynomial::one());
        expected.add_term(Monomial::ONE, ExactPolynomial::from_ints(&[1, 1]));
        assert_eq!(l[0][0], expected);
    }

    #[test]
    fn single_site_monodromies_agree() {
        let f = fundamental_monodromy(1, Direction::Forward);
        let r = fundamental_monodromy(1, Direction::Reversed);
        assert_eq!(f, MonodromyProduct { direction: Direction::Forward, ..r.clone() });
        assert_eq!(f.fundamental().unwrap(), &r_matrix(&int(0), Sign::Plus));
    }

    #[test]
    fn fundamental_monodromy_unitarity() {
        // M̂(z) M(-z) = (1-z²)^L
        let m = model();
        for length in 1..=3 {
            let fwd = m.fundamental_monodromy(length, &-z(), Direction::Forward);
            let rev = m.fundamental_monodromy(length, &z(), Direction::Reversed);
            let c = ExactPolynomial::from_ints(&[1, 0, -1]).pow(length as u32);
            assert_eq!(rev.mul(&fwd).unwrap(), Matrix::scalar_identity(1 << (length + 1), &c));
        }
    }

    #[test]
    fn two_site_monodromy_matches_kronecker_contraction() {
        let m = model();
        let x = rat(3, 7);
        let dims = [2, 2, 2];
        let r01 = m.r_matrix(&x).embed(&[0, 1], &dims).unwrap();
        let r02 = m.r_matrix(&x).embed(&[0, 2], &dims).unwrap();
        let dense = r01.mul(&r02).unwrap();
        assert_eq!(m.fundamental_monodromy(2, &x, Direction::Forward), dense);
    }

    #[test]
    fn q_monodromy_single_site() {
        let fwd = q_monodromy(Sign::Plus, 1, Direction::Forward).unwrap();
        let l = lax(LaxVariant::Plus, &int(0), Sign::Plus).unwrap();
        for a in 0..2 {
            for c in 0..2 {
                assert_eq!(fwd.oscillator_entry(a, c).unwrap(), &l[a][c]);
            }
        }
    }

    #[test]
    fn q_monodromy_two_sites_matches_reordering() {
        let fwd = q_monodromy(Sign::Plus, 2, Direction::Forward).unwrap();
        let l = lax(LaxVariant::Plus, &int(0), Sign::Plus).unwrap();
        // (M)_{00,00} = L₀₀L₀₀ + nothing else: entry a=(1,1), c=(1,1) is 1·1.
        assert_eq!(fwd.oscillator_entry(0, 0).unwrap(), &WeylElement::one(Ordering::Normal));
        // (M)_{a=(1,2), c=(2,1)} = ā · a = N
        let e = fwd.oscillator_entry(0b01, 0b10).unwrap();
        assert_eq!(e, &l[0][1].mul(&l[1][0]).unwrap().finalize());
        assert_eq!(e, &WeylElement::term(Ordering::Normal, Monomial::string(1, 1), ExactPolynomial::one()));

        let rev = q_monodromy(Sign::Plus, 2, Direction::Reversed).unwrap();
        let la = lax(LaxVariant::Plus, &int(0), Sign::Plus).unwrap();
        let la: Vec<Vec<WeylElement>> = la
            .iter()
            .map(|r| r.iter().map(|x| x.to_ordering(Ordering::AntiNormal)).collect())
            .collect();
        for c in 0..4usize {
            for b in 0..4usize {
                let (c1, c2, b1, b2) = (c >> 1, c & 1, b >> 1, b & 1);
                let expected = la[c2][b2].mul(&la[c1][b1]).unwrap().finalize();
                assert_eq!(rev.oscillator_entry(c, b).unwrap(), &expected);
            }
        }
    }

    #[test]
    fn spin_flip_maps_plus_to_minus() {
        let m = model();
        let plus = m.lax_entries(LaxVariant::Plus).unwrap();
        let minus = m.lax_entries(LaxVariant::Minus).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(plus[1 - i][1 - j], minus[i][j]);
            }
        }
    }

    #[test]
    fn perturbation_catalog_size_and_effect() {
        assert_eq!(Perturbation::catalog().len(), 16 + 4 * 4 + 8);
        let pert = Perturbation { target: PerturbTarget::KLeft, row: 0, col: 1 };
        let k = model().with_perturbation(pert).k_left(&int(0));
        assert_eq!(k.get(0, 1), &int(1));
        let weyl = model()
            .with_perturbation(Perturbation { target: PerturbTarget::Lax(LaxVariant::Plus), row: 0, col: 0 })
            .lax(LaxVariant::Plus, &z(), Ordering::Normal)
            .unwrap();
        assert_eq!(weyl[0][0], WeylElement::scalar(Ordering::Normal, poly_const(int(2))));
    }

    #[test]
    fn perturbation_parse() {
        for p in Perturbation::catalog() {
            let name = p.to_string();
            let short = name.split('[').next().unwrap();
            let parsed: Perturbation = format!("{short}:{}:{}", p.row, p.col).parse().unwrap();
            assert_eq!(parsed, p);
        }
        assert!("R:4:0".parse::<Perturbation>().is_err());
        assert!("L+:0".parse::<Perturbation>().is_err());
        assert!("X:0:0".parse::<Perturbation>().is_err());
    }

    #[test]
    fn fock_matrix_of_entries() {
        let m = model();
        let l = m.lax_fock(LaxVariant::Plus, &rat(1, 2), 3).unwrap();
        // lower-right block is diag(u+1+n)
        assert_eq!(l.get(4 + 2, 4 + 2), &rat(7, 2));
        // upper-right block is ā
        assert_eq!(l.get(1, 4), &int(1));
        // lower-left block is a with ⟨1|a|2⟩ = 2
        assert_eq!(l.get(4 + 1, 2), &int(2));
    }
}
