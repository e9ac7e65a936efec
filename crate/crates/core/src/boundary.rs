//! Boundary matrices, Gamma-ratio boundary kernels and the closed-form
//! oscillator trace that pairs a normal-ordered string with an
//! anti-normal-ordered one.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::exact::{int, rat, to_f64, ExactPolynomial, Matrix, Rational, RationalFunction, Scalar};
use crate::params::Sign;
use crate::weyl::{stirling, Monomial, Ordering, StirlingKind, StirlingTable, WeylElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `K`, multiplying the monodromy from the left.
    Left,
    /// `K̂`, sitting between the two single-row monodromies.
    Right,
}

/// `K(z) = diag(p+z+1, p-z-1)`, `K̂(z) = diag(q+z, q-z)`.
pub fn boundary_matrix(side: Side, param: &Rational) -> Matrix<ExactPolynomial> {
    let c = |v: &Rational| ExactPolynomial::constant(v.clone());
    let z = ExactPolynomial::z();
    match side {
        Side::Left => Matrix::diagonal(vec![
            &(&c(param) + &z) + &ExactPolynomial::one(),
            &(&c(param) - &z) - &ExactPolynomial::one(),
        ]),
        Side::Right => Matrix::diagonal(vec![&c(param) + &z, &c(param) - &z]),
    }
}

/// Diagonal Gamma-ratio operator on Fock space, normalised so that its
/// level values are products of linear factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryKernel {
    pub sign: Sign,
    pub side: Side,
    /// `p` for the left kernel, `q` for the right one.
    pub param: Rational,
}

impl BoundaryKernel {
    pub fn left(sign: Sign, p: &Rational) -> Self {
        Self { sign, side: Side::Left, param: p.clone() }
    }

    pub fn right(sign: Sign, q: &Rational) -> Self {
        Self { sign, side: Side::Right, param: q.clone() }
    }

    /// Linear factors `(c_k - u)` whose product (right) or inverse product
    /// (left) gives level `n`.
    fn factor_constants(&self, n: usize) -> Vec<Rational> {
        let s = self.sign.as_rational();
        match self.side {
            // ∏_{k=1}^{n} (±q - u - k)
            Side::Right => (1..=n as i64).map(|k| &s * &self.param - int(k)).collect(),
            // 1 / ∏_{k=1}^{n+1} (∓p - u - k)
            Side::Left => (1..=n as i64 + 1).map(|k| -(&s * &self.param) - int(k)).collect(),
        }
    }

    /// Eigenvalue on Fock level `n` as a function of `z`.
    pub fn level_value(&self, n: usize) -> RationalFunction {
        let prod = self
            .factor_constants(n)
            .iter()
            .fold(ExactPolynomial::one(), |acc, c| &acc * &ExactPolynomial::linear(int(-1), c.clone()));
        match self.side {
            Side::Right => RationalFunction::from_poly(prod),
            Side::Left => RationalFunction::new(ExactPolynomial::one(), prod),
        }
    }

    /// Eigenvalue on level `n` at argument `arg`; `None` at a pole.
    pub fn level_value_at<S: Scalar>(&self, n: usize, arg: &S) -> Option<S> {
        let prod = self
            .factor_constants(n)
            .iter()
            .fold(S::unit(), |acc, c| acc.times(&S::from_rational(c).minus(arg)));
        match self.side {
            Side::Right => Some(prod),
            Side::Left => prod.try_recip(),
        }
    }

    /// The kernel as a diagonal matrix on levels `0..=cutoff`.
    pub fn to_fock<S: Scalar>(&self, arg: &S, cutoff: usize) -> Result<Matrix<S>> {
        let diag = (0..=cutoff)
            .map(|n| {
                self.level_value_at(n, arg)
                    .ok_or_else(|| Error::Pole(format!("boundary kernel level {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::diagonal(diag))
    }
}

/// Key `(r1, r2, s1, s2)` of the pairing
/// `tr[K ā^{r1} a^{r2} K̂ a^{s2} ā^{s1}]`.
pub type PairKey = (u32, u32, u32, u32);

/// Closed-form oscillator traces for one sign and parameter pair, memoised.
#[derive(Debug)]
pub struct TraceKernel {
    sign: Sign,
    p: Rational,
    q: Rational,
    cache: RwLock<HashMap<PairKey, ExactPolynomial>>,
}

impl Clone for TraceKernel {
    fn clone(&self) -> Self {
        Self::new(self.sign, self.p.clone(), self.q.clone())
    }
}

impl TraceKernel {
    pub fn new(sign: Sign, p: Rational, q: Rational) -> Self {
        Self {
            sign,
            p,
            q,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// `P^±_{r1,r2,s1,s2}(z)`: zero unless `r1 + s1 = r2 + s2`, otherwise a
    /// polynomial of degree `s1 + r2`.
    pub fn p_trace(&self, r1: u32, r2: u32, s1: u32, s2: u32) -> Result<ExactPolynomial> {
        let key = (r1, r2, s1, s2);
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = p_trace_closed(self.sign, &self.p, &self.q, r1, r2, s1, s2)?;
        self.cache.write().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }
}

/// `(r2+s2)! / ∏_{j=s1-s2}^{s1+r2}(c+j) · ∏_{k=0}^{s1-1}(∓p-z+k) · ∏_{k=1}^{r2}(±q-z-k)`
/// with `c = ∓(p+q)`.
pub fn p_trace_closed(
    sign: Sign,
    p: &Rational,
    q: &Rational,
    r1: u32,
    r2: u32,
    s1: u32,
    s2: u32,
) -> Result<ExactPolynomial> {
    if r1 + s1 != r2 + s2 {
        return Ok(ExactPolynomial::zero());
    }
    let s = sign.as_rational();
    let c = -(&s * (p + q));
    let mut pref = Rational::from_integer(factorial(r2 + s2));
    for j in (s1 as i64 - s2 as i64)..=(s1 as i64 + r2 as i64) {
        let f = &c + int(j);
        if f.is_zero() {
            return Err(Error::Pole(format!("trace prefactor vanishes at j = {j}")));
        }
        pref /= f;
    }
    let minus_z = |c0: Rational| ExactPolynomial::linear(int(-1), c0);
    let mut poly = ExactPolynomial::constant(pref);
    for k in 0..s1 as i64 {
        poly = &poly * &minus_z(-(&s * p) + int(k));
    }
    for k in 1..=r2 as i64 {
        poly = &poly * &minus_z(&s * q - int(k));
    }
    Ok(poly)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `Γ(base + m) / Γ(base)` for integer `m` as a rational function of `z`.
pub fn gamma_shift_ratio(base: &ExactPolynomial, m: i64) -> RationalFunction {
    if m >= 0 {
        let prod = (0..m).fold(ExactPolynomial::one(), |acc, i| {
            &acc * &(base + &ExactPolynomial::constant(int(i)))
        });
        RationalFunction::from_poly(prod)
    } else {
        let prod = (1..=-m).fold(ExactPolynomial::one(), |acc, i| {
            &acc * &(base - &ExactPolynomial::constant(int(i)))
        });
        RationalFunction::new(ExactPolynomial::one(), prod)
    }
}

/// The same pairing evaluated through the Stirling expansion
/// `ā^j a^j = Σ_k S₁(j,k) N^k` and the closed forms of
/// `tr Γ(x-N)/Γ(y-N) N^k`; every Gamma ratio has an integer offset and is
/// expanded exactly. Independent of [`p_trace_closed`].
pub fn p_trace_via_stirling(
    sign: Sign,
    p: &Rational,
    q: &Rational,
    r1: u32,
    r2: u32,
    s1: u32,
    s2: u32,
) -> Result<RationalFunction> {
    if r1 + s1 != r2 + s2 {
        return Ok(<RationalFunction as Scalar>::nil());
    }
    let s = sign.as_rational();
    // b = ∓p - z, h = ±q - z, x = s1 + b - 1, y = s2 + h, d = y - x.
    let b = ExactPolynomial::linear(int(-1), -(&s * p));
    let h = ExactPolynomial::linear(int(-1), &s * q);
    let d = int(s2 as i64 - s1 as i64 + 1) + &s * (p + q);
    let j_tot = (r1 + s1) as usize;
    let s1_row = StirlingTable::new(StirlingKind::First, j_tot);
    let s2_table = StirlingTable::new(StirlingKind::Second, j_tot + 1);

    let mut total = <RationalFunction as Scalar>::nil();
    for k in 0..=j_tot {
        let w = s1_row.get(j_tot, k)?.clone();
        if w.is_zero() {
            continue;
        }
        let tr = if k == 0 {
            // Γ(b+s1)/Γ(b) · Γ(h)/Γ(h+s2) / (1 - d)
            let one_minus_d = int(1) - &d;
            if one_minus_d.is_zero() {
                return Err(Error::Pole("1 + x - y vanishes".into()));
            }
            gamma_shift_ratio(&b, s1 as i64)
                .times(&gamma_shift_ratio(&h, s2 as i64).recip())
                .scale(&one_minus_d.recip())
        } else {
            // -Γ(x)/Γ(b) Σ_j (-1)^j j! S₂(k+1,j+1) Γ(d-1-j)/Γ(d) · Γ(h)/Γ(y-1-j)
            let mut inner = <RationalFunction as Scalar>::nil();
            for j in 0..=k {
                let mut c = Rational::from_integer(factorial(j as u32) * s2_table.get(k + 1, j + 1)?);
                if j % 2 == 1 {
                    c = -c;
                }
                for i in 1..=(j as i64 + 1) {
                    let f = &d - int(i);
                    if f.is_zero() {
                        return Err(Error::Pole("Gamma(y - x - 1 - j) pole".into()));
                    }
                    c /= f;
                }
                let g = gamma_shift_ratio(&h, s2 as i64 - 1 - j as i64).recip();
                inner = inner.plus(&g.scale(&c));
            }
            gamma_shift_ratio(&b, s1 as i64 - 1).times(&inner).negated()
        };
        total = total.plus(&tr.scale(&Rational::from_integer(w)));
    }
    Ok(total)
}

/// Coefficients of a finalized normal-ordered string `c(r1, r2)` (for
/// `ā^{r1} a^{r2}`) and of a finalized anti-normal one `d(s2, s1)` (for
/// `a^{s2} ā^{s1}`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SandwichTraceInput {
    pub normal: BTreeMap<(u32, u32), ExactPolynomial>,
    pub anti_normal: BTreeMap<(u32, u32), ExactPolynomial>,
}

impl SandwichTraceInput {
    pub fn from_weyl(normal: &WeylElement, anti_normal: &WeylElement) -> Result<Self> {
        if normal.ordering() != Ordering::Normal || anti_normal.ordering() != Ordering::AntiNormal {
            return Err(Error::MixedOrdering);
        }
        let collect = |w: &WeylElement, swap: bool| {
            w.finalize()
                .terms()
                .map(|(m, c): (&Monomial, &ExactPolynomial)| {
                    let key = if swap { (m.s, m.r) } else { (m.r, m.s) };
                    (key, c.clone())
                })
                .collect::<BTreeMap<_, _>>()
        };
        Ok(Self {
            normal: collect(normal, false),
            anti_normal: collect(anti_normal, true),
        })
    }
}

/// `Σ c(r1,r2) d(s2,s1) P(r1,r2,s1,s2)`.
pub fn sandwich_trace(kernel: &TraceKernel, input: &SandwichTraceInput) -> Result<ExactPolynomial> {
    let mut acc = ExactPolynomial::zero();
    for (&(r1, r2), c) in &input.normal {
        for (&(s2, s1), d) in &input.anti_normal {
            if r1 + s1 != r2 + s2 {
                continue;
            }
            let pt = kernel.p_trace(r1, r2, s1, s2)?;
            acc = &acc + &(&(c * d) * &pt);
        }
    }
    Ok(acc)
}

/// Partial sum and closed form of `Σ_n Γ(x-n)/Γ(y-n) n^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTrace {
    pub x: String,
    pub y: String,
    pub k: u32,
    pub cutoff: u32,
    /// Exact partial sum divided by `Γ(x)/Γ(y)`.
    pub partial_normalised: String,
    /// Exact closed form divided by `Γ(x)/Γ(y)`.
    pub closed_normalised: String,
    pub partial: f64,
    pub closed: f64,
    pub relative_error: f64,
}

/// Evaluates both sides of the `tr Γ(x-N)/Γ(y-N) N^k` formula. The common
/// factor `Γ(x)/Γ(y)` is split off, both remaining sums are exact
/// rationals, and only the scale is evaluated in floating point.
pub fn gamma_ratio_trace(x: &Rational, y: &Rational, k: u32, cutoff: u32) -> Result<GammaTrace> {
    if cutoff < 1 {
        return Err(Error::InvalidParameters("cutoff must be at least 1".into()));
    }
    let gap = y - x;
    if gap <= int(k as i64 + 1) {
        return Err(Error::Divergent(format!(
            "y - x = {} must exceed k + 1 = {}",
            crate::exact::format_rational(&gap),
            k + 1
        )));
    }
    let (partial, closed) = gamma_ratio_trace_exact(x, y, k, cutoff)?;
    let scale = gamma_ratio_f64(x, y)?;
    let rel = relative_error(&partial, &closed);
    Ok(GammaTrace {
        x: crate::exact::format_rational(x),
        y: crate::exact::format_rational(y),
        k,
        cutoff,
        partial_normalised: crate::exact::format_rational(&partial),
        closed_normalised: crate::exact::format_rational(&closed),
        partial: scale * to_f64(&partial),
        closed: scale * to_f64(&closed),
        relative_error: rel,
    })
}

/// A gap `y - x` for which the cutoff-200 partial sum of the order-`k`
/// trace is within 1e-6 of its limit: the tail decays like
/// `N^{k + 1 - (y - x)}`.
pub fn convergent_gap(k: u32) -> Rational {
    int(k as i64 + 1) + rat(16, 3)
}

/// `|a/b - 1|` evaluated exactly, then rounded.
pub fn relative_error(a: &Rational, b: &Rational) -> f64 {
    if b.is_zero() {
        return if a.is_zero() { 0.0 } else { f64::INFINITY };
    }
    to_f64(&((a - b) / b)).abs()
}

/// `(Σ_{n≤cutoff} n^k ∏_{j=1}^{n} (y-j)/(x-j),  closed form)`, both
/// normalised by `Γ(x)/Γ(y)`.
pub fn gamma_ratio_trace_exact(x: &Rational, y: &Rational, k: u32, cutoff: u32) -> Result<(Rational, Rational)> {
    let mut ratio = int(1);
    let mut partial = if k == 0 { int(1) } else { int(0) };
    for n in 1..=cutoff as i64 {
        let den = x - int(n);
        if den.is_zero() {
            return Err(Error::Pole(format!("Gamma(x - n) at n = {n}")));
        }
        ratio = ratio * (y - int(n)) / den;
        partial += &ratio * int(n).pow(k as i32);
    }
    let closed = if k == 0 {
        let den = int(1) + x - y;
        x / den
    } else {
        let s2 = StirlingTable::new(StirlingKind::Second, k as usize + 1);
        let mut acc = int(0);
        for j in 0..=k as usize {
            let mut term = Rational::from_integer(factorial(j as u32) * s2.get(k as usize + 1, j + 1)?);
            if j % 2 == 1 {
                term = -term;
            }
            for i in 1..=(j as i64 + 1) {
                term = term * (y - int(i)) / (y - x - int(i));
            }
            acc += term;
        }
        -acc
    };
    Ok((partial, closed))
}

/// `Γ(x)/Γ(y)` in double precision via log-Gamma.
pub fn gamma_ratio_f64(x: &Rational, y: &Rational) -> Result<f64> {
    use statrs::function::gamma::gamma;
    let (xf, yf) = (to_f64(x), to_f64(y));
    let (gx, gy) = (gamma(xf), gamma(yf));
    if !gx.is_finite() || !gy.is_finite() || gy == 0.0 {
        return Err(Error::Numerical(format!("Gamma ratio at x = {xf}, y = {yf} is not finite")));
    }
    Ok(gx / gy)
}

/// Rising factorial `(c)_m`.
pub fn pochhammer(c: &Rational, m: u32) -> Rational {
    (0..m as i64).fold(int(1), |acc, i| acc * (c + int(i)))
}

/// Both sides of `Σ_k (-1)^k C(j,k) Γ(A+k)/Γ(B+k) = Γ(A)Γ(B-A+j)/(Γ(B-A)Γ(B+j))`
/// divided by `Γ(A)/Γ(B)`: `Σ_k (-1)^k C(j,k) (A)_k/(B)_k` and `(B-A)_j/(B)_j`.
pub fn alternating_gamma_sum(a: &Rational, b: &Rational, j: u32) -> Result<(Rational, Rational)> {
    let mut lhs = int(0);
    for k in 0..=j {
        let den = pochhammer(b, k);
        if den.is_zero() {
            return Err(Error::Pole(format!("(B)_{k} vanishes")));
        }
        let binom = Rational::from_integer(stirling_free_binomial(j, k));
        let mut term = binom * pochhammer(a, k) / den;
        if k % 2 == 1 {
            term = -term;
        }
        lhs += term;
    }
    let rhs = pochhammer(&(b - a), j) / pochhammer(b, j);
    Ok((lhs, rhs))
}

/// Both sides of `Σ_{i=0}^{n} Γ(A+i)/Γ(1+i) = Γ(1+n+A)/(A Γ(1+n))` divided
/// by `Γ(A)`: `Σ_i (A)_i / i!` and `(A)_{n+1} / (A n!)`.
pub fn gamma_partial_sum(a: &Rational, n: u32) -> Result<(Rational, Rational)> {
    if a.is_zero() {
        return Err(Error::Pole("A = 0".into()));
    }
    let lhs = (0..=n).fold(int(0), |acc, i| {
        acc + pochhammer(a, i) / Rational::from_integer(factorial(i))
    });
    let rhs = pochhammer(a, n + 1) / (a * Rational::from_integer(factorial(n)));
    Ok((lhs, rhs))
}

fn stirling_free_binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Signed Stirling numbers of the first kind for the sum identity
/// `Σ_i S₁(n,i) S₂(i+1,j+1) = (j+1)δ_{n,j+1} + δ_{n,j}`; returns the
/// left-hand side.
pub fn stirling_mixed_sum(n: usize, j: usize) -> Result<BigInt> {
    let mut acc = BigInt::zero();
    for i in j..=n {
        acc += stirling(StirlingKind::First, n as i64, i as i64)?
            * stirling(StirlingKind::Second, i as i64 + 1, j as i64 + 1)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> (Rational, Rational) {
        (rat(2, 3), rat(3, 5))
    }

    #[test]
    fn right_kernel_levels() {
        let (_, q) = pq();
        let k = BoundaryKernel::right(Sign::Plus, &q);
        assert_eq!(k.level_value(0), <RationalFunction as Scalar>::unit());
        let expected = &ExactPolynomial::linear(int(-1), &q - int(1))
            * &ExactPolynomial::linear(int(-1), &q - int(2));
        assert_eq!(k.level_value(2), RationalFunction::from_poly(expected));
    }

    #[test]
    fn left_kernel_level_zero() {
        let (p, _) = pq();
        let k = BoundaryKernel::left(Sign::Plus, &p);
        let expected = RationalFunction::new(
            ExactPolynomial::one(),
            ExactPolynomial::linear(int(-1), -&p - int(1)),
        );
        assert_eq!(k.level_value(0), expected);
        assert_eq!(k.level_value_at(0, &int(0)), Some(-(p + int(1)).recip()));
    }

    #[test]
    fn kernel_defining_relations_per_level() {
        let (p, q) = pq();
        for sign in Sign::both() {
            let s = sign.as_rational();
            let kr = BoundaryKernel::right(sign, &q);
            let kl = BoundaryKernel::left(sign, &p);
            for n in 1..=10usize {
                // K̂_n = (±q - x - n) K̂_{n-1}
                let f = RationalFunction::from_poly(ExactPolynomial::linear(int(-1), &s * &q - int(n as i64)));
                assert_eq!(kr.level_value(n), f.times(&kr.level_value(n - 1)));
                // K_{n-1} = (∓p - x - 1 - n) K_n
                let g = RationalFunction::from_poly(ExactPolynomial::linear(int(-1), -(&s * &p) - int(n as i64 + 1)));
                assert_eq!(kl.level_value(n - 1), g.times(&kl.level_value(n)));
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let (p, q) = pq();
        let pq_sum = &p + &q;
        let kern = TraceKernel::new(Sign::Plus, p.clone(), q.clone());
        assert_eq!(kern.p_trace(0, 0, 0, 0).unwrap(), ExactPolynomial::constant(-pq_sum.recip()));
        assert_eq!(
            kern.p_trace(1, 0, 0, 1).unwrap(),
            ExactPolynomial::constant((&pq_sum * (&pq_sum + int(1))).recip())
        );
        let expected = ExactPolynomial::linear(int(-1), -p.clone())
            .scale(&(&pq_sum * (&pq_sum - int(1))).recip());
        assert_eq!(kern.p_trace(0, 0, 1, 1).unwrap(), expected);
        assert!(kern.p_trace(1, 0, 0, 0).unwrap().is_zero());
        assert_eq!(kern.cached_len(), 4);
    }

    #[test]
    fn closed_form_matches_stirling_route() {
        let (p, q) = pq();
        for sign in Sign::both() {
            for r1 in 0..4u32 {
                for r2 in 0..4u32 {
                    for s1 in 0..4u32 {
                        if r1 + s1 < r2 {
                            continue;
                        }
                        let s2 = r1 + s1 - r2;
                        let closed = p_trace_closed(sign, &p, &q, r1, r2, s1, s2).unwrap();
                        let dual = p_trace_via_stirling(sign, &p, &q, r1, r2, s1, s2).unwrap();
                        assert_eq!(RationalFunction::from_poly(closed.clone()), dual, "{sign} {r1} {r2} {s1} {s2}");
                        assert_eq!(closed.degree(), Some((s1 + r2) as usize));
                    }
                }
            }
        }
    }

    #[test]
    fn sandwich_trace_examples() {
        let (p, q) = pq();
        let kern = TraceKernel::new(Sign::Plus, p.clone(), q.clone());
        let mut x = SandwichTraceInput::default();
        x.normal.insert((0, 0), ExactPolynomial::one());
        x.anti_normal.insert((0, 0), ExactPolynomial::one());
        assert_eq!(sandwich_trace(&kern, &x).unwrap(), kern.p_trace(0, 0, 0, 0).unwrap());

        let mut unbalanced = SandwichTraceInput::default();
        unbalanced.normal.insert((1, 0), ExactPolynomial::one());
        unbalanced.anti_normal.insert((0, 0), ExactPolynomial::one());
        assert!(sandwich_trace(&kern, &unbalanced).unwrap().is_zero());

        // L = 1 spin-up diagonal entry: P(0,0,0,0) + P(1,0,0,1) = -1/(p+q+1)
        let mut diag = SandwichTraceInput::default();
        diag.normal.insert((0, 0), ExactPolynomial::one());
        diag.normal.insert((1, 0), ExactPolynomial::one());
        diag.anti_normal.insert((0, 0), ExactPolynomial::one());
        diag.anti_normal.insert((1, 0), ExactPolynomial::one());
        let expected = ExactPolynomial::constant(-(&p + &q + int(1)).recip());
        assert_eq!(sandwich_trace(&kern, &diag).unwrap(), expected);
    }

    #[test]
    fn gamma_trace_branches() {
        // k = 0 closed form Γ(1+x)/((1+x-y)Γ(y)) normalises to x/(1+x-y)
        let (x, y) = (rat(1, 3), rat(7, 3));
        let (_, closed) = gamma_ratio_trace_exact(&x, &y, 0, 10).unwrap();
        assert_eq!(closed, &x / (int(1) + &x - &y));

        for k in 0..=3u32 {
            let x = rat(1, 3);
            let y = &x + convergent_gap(k);
            let t = gamma_ratio_trace(&x, &y, k, 200).unwrap();
            assert!(t.relative_error <= 1e-6, "{t:?}");
        }
        assert!(gamma_ratio_trace(&rat(1, 3), &rat(4, 3), 1, 200).is_err());
    }

    #[test]
    fn finite_sum_identities() {
        for (a, b) in [(rat(1, 3), rat(5, 7)), (rat(-2, 5), rat(9, 4))] {
            for j in 0..=6 {
                let (l, r) = alternating_gamma_sum(&a, &b, j).unwrap();
                assert_eq!(l, r);
            }
            for n in 0..=10 {
                let (l, r) = gamma_partial_sum(&a, n).unwrap();
                assert_eq!(l, r);
            }
        }
    }

    #[test]
    fn gamma_shift_ratio_negative() {
        let base = ExactPolynomial::z();
        let r = gamma_shift_ratio(&base, -2);
        let den = &ExactPolynomial::linear(int(1), int(-1)) * &ExactPolynomial::linear(int(1), int(-2));
        assert_eq!(r, RationalFunction::new(ExactPolynomial::one(), den));
    }
}
