//! Numeric spectra: per-block eigenvectors of the transfer matrix,
//! Q-eigenpolynomials, Bethe roots and residuals, energies.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bulk::LatticeModel;
use crate::error::{Error, Result};
use crate::exact::{format_rational, rat, to_f64, ExactPolynomial, Matrix, Rational};
use crate::operators::{
    hamiltonian, hamiltonian_from_transfer, leading_prefactor, q_operator_for, transfer_matrix_at, Assembly,
    SpinBasis,
};
use crate::params::{ChainParams, Sign};

type C64 = Complex<f64>;

/// Longest chain the spectral pipeline accepts.
pub const MAX_SPECTRAL_LENGTH: usize = 6;

/// Relative eigenvalue gap below which a block counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralConfig {
    /// Point at which T is diagonalised.
    pub z0: Rational,
    /// Second point for the fallback `T(z0) + γ Q(z1)`.
    pub z1: Rational,
    pub gamma: f64,
    /// Number of points for the scalar TQ check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            z0: rat(3, 11),
            z1: rat(5, 13),
            gamma: 0.618_033_988_749_895,
            samples: 10,
            seed: crate::verify::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Root {
    fn from(c: C64) -> Self {
        Root { re: c.re, im: c.im }
    }
}

impl Root {
    pub fn complex(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    #[serde(rename = "L")]
    pub length: usize,
    pub p: String,
    pub q: String,
    pub sign: Sign,
    /// Number of down spins of the block.
    pub sector: usize,
    /// Magnon number m± of the state for this sign.
    pub m: usize,
    pub index: usize,
    pub basis: Vec<String>,
    pub eigenvector: Vec<f64>,
    pub fallback: bool,
    /// T eigenvalue polynomial, coefficients ascending.
    pub t_eigen_poly: Vec<f64>,
    /// `(z, T(z))` at the TQ sample points.
    pub t_eigen_samples: Vec<[f64; 2]>,
    /// Q eigenvalue polynomial, coefficients ascending.
    pub q_eigen_poly: Vec<f64>,
    pub leading_expected: f64,
    pub leading_deviation: f64,
    /// All 2m roots.
    pub bethe_roots: Vec<Root>,
    /// One root of each `(z, -z-1)` pair.
    pub independent_roots: Vec<Root>,
    pub residuals: Vec<f64>,
    pub paired: bool,
    pub pairing_deviation: f64,
    pub tq_residual: f64,
    pub crossing_residual: f64,
    /// `T'(0)/(2pq) - L` on this state.
    pub energy: f64,
    /// Rayleigh quotient of H on this state.
    pub energy_direct: f64,
}

impl SpectrumRecord {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Eigenvectors of one magnon block.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub sector: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
    pub fallback: bool,
}

fn to_dmatrix(m: &Matrix<Rational>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| to_f64(m.get(i, j)))
}

fn coefficient_blocks(m: &Matrix<ExactPolynomial>, idx: &[usize]) -> Vec<DMatrix<f64>> {
    let block = m.submatrix(idx, idx);
    let deg = block.entries().iter().filter_map(|e| e.degree()).max().unwrap_or(0);
    (0..=deg)
        .map(|k| DMatrix::from_fn(idx.len(), idx.len(), |i, j| to_f64(&block.get(i, j).coeff(k))))
        .collect()
}

/// Real eigenvalues of `a`, or an error if any is genuinely complex.
fn real_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let scale = a.amax().max(1.0);
    let mut out = Vec::with_capacity(a.nrows());
    for ev in a.complex_eigenvalues().iter() {
        if ev.im.abs() > 1e-7 * scale {
            return Err(Error::Numerical(format!("complex eigenvalue {ev} of a transfer-matrix block")));
        }
        out.push(ev.re);
    }
    out.sort_by(|x, y| x.total_cmp(y));
    Ok(out)
}

fn min_relative_gap(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    values.windows(2).map(|w| (w[1] - w[0]).abs() / scale).fold(f64::INFINITY, f64::min)
}

/// Null vector of `a - λ`, polished by inverse iteration and normalised
/// with its largest component positive.
fn eigenvector(a: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>> {
    let n = a.nrows();
    let shifted = a - DMatrix::identity(n, n) * lambda;
    let svd = shifted.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let k = svd.singular_values.imin();
    let mut v: DVector<f64> = vt.row(k).transpose();
    let eps = 1e-10 * a.amax().max(1.0);
    let lu = (&shifted - DMatrix::identity(n, n) * eps).lu();
    for _ in 0..2 {
        match lu.solve(&v) {
            Some(w) if w.iter().all(|x| x.is_finite()) && w.norm() > 0.0 => v = w.normalize(),
            _ => break,
        }
    }
    let imax = v.iamax();
    if v[imax] < 0.0 {
        v = -v;
    }
    Ok(v.normalize())
}

/// Diagonalises the sector-`sector` block of `T(z0)`; falls back to
/// `T(z0) + γ Q(z1)` when `T(z0)` is degenerate on the block.
pub fn eigensystem(
    t_poly: &Matrix<ExactPolynomial>,
    q_poly: &Matrix<ExactPolynomial>,
    length: usize,
    sector: usize,
    config: &SpectralConfig,
) -> Result<Eigensystem> {
    let idx = SpinBasis::new(length).block(sector);
    let t_block = to_dmatrix(&t_poly.submatrix(&idx, &idx).map(|e| e.eval(&config.z0)));
    let mut a = t_block;
    let mut values = real_eigenvalues(&a)?;
    let mut fallback = false;
    if values.len() > 1 && min_relative_gap(&values) < DEGENERACY_GAP {
        fallback = true;
        let q1 = to_dmatrix(&q_poly.submatrix(&idx, &idx).map(|e| e.eval(&config.z1)));
        a += q1 * config.gamma;
        values = real_eigenvalues(&a)?;
        if values.len() > 1 && min_relative_gap(&values) < DEGENERACY_GAP {
            return Err(Error::Degenerate(format!(
                "sector {sector} of L = {length}: degenerate at z0 = {} and after adding Q(z1 = {})",
                format_rational(&config.z0),
                format_rational(&config.z1)
            )));
        }
    }
    let vectors = values.iter().map(|&l| eigenvector(&a, l)).collect::<Result<Vec<_>>>()?;
    Ok(Eigensystem { sector, indices: idx, values, vectors, fallback })
}

/// `v·(C_k v)/(v·v)` for each coefficient matrix.
pub fn project(coeffs: &[DMatrix<f64>], v: &DVector<f64>) -> Vec<f64> {
    let norm = v.dot(v);
    let mut out: Vec<f64> = coeffs.iter().map(|c| v.dot(&(c * v)) / norm).collect();
    while out.len() > 1 && *out.last().unwrap() == 0.0 {
        out.pop();
    }
    out
}

pub fn eval_poly(coeffs: &[f64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_poly_deriv(coeffs: &[f64], z: C64) -> C64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
}

/// Roots of a polynomial (coefficients ascending) via companion-matrix
/// eigenvalues, each refined by Newton iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<C64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::Numerical("polynomial has zero leading coefficient".into()));
    }
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i] / lead;
    }
    let mut roots: Vec<C64> = comp.complex_eigenvalues().iter().copied().collect();
    for r in roots.iter_mut() {
        for _ in 0..20 {
            let d = eval_poly_deriv(coeffs, *r);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval_poly(coeffs, *r) / d;
            let next = *r - step;
            if !(next.re.is_finite() && next.im.is_finite()) {
                break;
            }
            if eval_poly(coeffs, next).norm() > eval_poly(coeffs, *r).norm() {
                break;
            }
            *r = next;
            if step.norm() <= 1e-16 * r.norm().max(1.0) {
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Matches roots into `(z, -z-1)` pairs. Returns the representative of each
/// pair (the one with larger real part) and the worst mismatch; an
/// unmatched root makes the mismatch infinite.
pub fn pair_roots(roots: &[C64]) -> (Vec<C64>, f64) {
    let mut used = vec![false; roots.len()];
    let mut reps = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = -roots[i] - 1.0;
        let best = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (roots[a] - target).norm().total_cmp(&(roots[b] - target).norm()));
        match best {
            Some(j) => {
                used[j] = true;
                worst = worst.max((roots[j] - target).norm());
                let rep = if roots[i].re > roots[j].re || (roots[i].re == roots[j].re && roots[i].im >= roots[j].im) {
                    roots[i]
                } else {
                    roots[j]
                };
                reps.push(rep);
            }
            None => {
                worst = f64::INFINITY;
                reps.push(roots[i]);
            }
        }
    }
    reps.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    (reps, worst)
}

/// `|LHS/RHS - 1|` of the Bethe equations at each independent root.
pub fn bethe_residuals(roots: &[C64], length: usize, p: f64, q: f64, sign: Sign) -> Vec<f64> {
    let s = sign.value() as f64;
    let two_l = 2 * length as i32;
    roots
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let lhs = (z + s * p) * (z + s * q) * (z + 1.0).powi(two_l)
                / ((z - s * p + 1.0) * (z - s * q + 1.0) * z.powi(two_l));
            let rhs = roots
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .fold(C64::new(1.0, 0.0), |acc, (_, &w)| {
                    acc * (z - w + 1.0) * (z + w + 2.0) / ((z - w - 1.0) * (z + w))
                });
            (lhs / rhs - 1.0).norm()
        })
        .collect()
}

/// Relative residual of the scalar TQ equation (cleared of `2z+1`).
pub fn tq_residual(t: &[f64], qp: &[f64], length: usize, p: f64, q: f64, sign: Sign, z: f64) -> f64 {
    let s = sign.value() as f64;
    let zc = C64::new(z, 0.0);
    let e = 2 * length as i32 + 1;
    let lhs = (2.0 * z + 1.0) * eval_poly(t, zc) * eval_poly(qp, zc);
    let a = 2.0 * (z + s * p) * (z + s * q) * (z + 1.0).powi(e) * eval_poly(qp, zc - 1.0);
    let b = 2.0 * (z - s * p + 1.0) * (z - s * q + 1.0) * z.powi(e) * eval_poly(qp, zc + 1.0);
    let scale = lhs.norm().max(a.norm()).max(b.norm()).max(f64::MIN_POSITIVE);
    (lhs - a - b).norm() / scale
}

fn sample_points(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out: Vec<f64> = Vec::with_capacity(n);
    while out.len() < n {
        let num: i64 = rng.gen_range(-30..=30);
        let den: i64 = rng.gen_range(7..=17);
        let z = num as f64 / den as f64;
        if num % den != 0 && !out.contains(&z) {
            out.push(z);
        }
    }
    out
}

/// Precomputed exact operators shared by all sectors.
pub struct SpectralContext {
    pub params: ChainParams,
    pub transfer: Matrix<ExactPolynomial>,
    pub q_plus: Matrix<ExactPolynomial>,
    pub q_minus: Matrix<ExactPolynomial>,
    pub hamiltonian: Matrix<Rational>,
    pub config: SpectralConfig,
}

impl SpectralContext {
    pub fn new(params: &ChainParams, config: SpectralConfig) -> Result<Self> {
        params.validate()?;
        if params.length > MAX_SPECTRAL_LENGTH {
            return Err(Error::ScaleLimit(format!(
                "spectral pipeline supports L <= {MAX_SPECTRAL_LENGTH}, got L = {}",
                params.length
            )));
        }
        let model = LatticeModel::from_params(params);
        let l = params.length;
        Ok(Self {
            params: params.clone(),
            transfer: transfer_matrix_at(&model, l, &ExactPolynomial::z())?,
            q_plus: q_operator_for(&model, l, Sign::Plus, Assembly::BlockDiagonal)?.entries,
            q_minus: q_operator_for(&model, l, Sign::Minus, Assembly::BlockDiagonal)?.entries,
            hamiltonian: hamiltonian(l, &params.xi()?, &params.xi_hat()?)?,
            config,
        })
    }

    fn q(&self, sign: Sign) -> &Matrix<ExactPolynomial> {
        match sign {
            Sign::Plus => &self.q_plus,
            Sign::Minus => &self.q_minus,
        }
    }

    /// One record per eigenstate of the block with `sector` down spins.
    pub fn sector(&self, sign: Sign, sector: usize) -> Result<Vec<SpectrumRecord>> {
        let l = self.params.length;
        if sector > l {
            return Err(Error::InvalidParameters(format!("sector {sector} exceeds L = {l}")));
        }
        let (p, q) = (to_f64(&self.params.p), to_f64(&self.params.q));
        let sys = eigensystem(&self.transfer, self.q(sign), l, sector, &self.config)?;
        let idx = &sys.indices;
        let t_coeffs = coefficient_blocks(&self.transfer, idx);
        let q_coeffs = coefficient_blocks(self.q(sign), idx);
        let h_block = to_dmatrix(&self.hamiltonian.submatrix(idx, idx));
        let m = match sign {
            Sign::Plus => sector,
            Sign::Minus => l - sector,
        };
        let expected = leading_prefactor(sign, l, m, &self.params.p, &self.params.q)
            .ok_or_else(|| Error::Pole(format!("Q{sign} prefactor at m = {m}")))?;
        let expected = to_f64(&expected);
        let points = sample_points(self.config.seed, self.config.samples);
        let basis = SpinBasis::new(l);

        let mut out = Vec::with_capacity(sys.vectors.len());
        for (k, v) in sys.vectors.iter().enumerate() {
            let t = project(&t_coeffs, v);
            let mut qp = project(&q_coeffs, v);
            qp.resize(qp.len().max(2 * m + 1), 0.0);
            // Drop numerically-zero coefficients above degree 2m.
            let lead_scale = qp.iter().fold(0.0f64, |a, c| a.max(c.abs()));
            while qp.len() > 2 * m + 1 && qp.last().unwrap().abs() <= 1e-12 * lead_scale {
                qp.pop();
            }
            let leading = qp[qp.len() - 1];
            let leading_deviation = if qp.len() == 2 * m + 1 {
                ((leading - expected) / expected).abs()
            } else {
                f64::INFINITY
            };
            let roots = polynomial_roots(&qp)?;
            let (reps, pairing) = pair_roots(&roots);
            let residuals = bethe_residuals(&reps, l, p, q, sign);
            let tq = points
                .iter()
                .map(|&z| tq_residual(&t, &qp, l, p, q, sign, z))
                .fold(0.0f64, f64::max);
            let crossing = points
                .iter()
                .map(|&z| {
                    let zc = C64::new(z, 0.0);
                    let lhs = eval_poly(&qp, zc) * eval_poly(&qp, -zc);
                    let rhs = eval_poly(&qp, zc - 1.0) * eval_poly(&qp, -zc - 1.0);
                    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE)
                })
                .fold(0.0f64, f64::max);
            let energy = t.get(1).copied().unwrap_or(0.0) / (2.0 * p * q) - l as f64;
            let energy_direct = v.dot(&(&h_block * v)) / v.dot(v);
            let samples = points
                .iter()
                .map(|&z| [z, eval_poly(&t, C64::new(z, 0.0)).re])
                .collect();
            out.push(SpectrumRecord {
                length: l,
                p: format_rational(&self.params.p),
                q: format_rational(&self.params.q),
                sign,
                sector,
                m,
                index: k,
                basis: idx.iter().map(|&i| basis.bitstring(i)).collect(),
                eigenvector: v.iter().copied().collect(),
                fallback: sys.fallback,
                t_eigen_poly: t,
                t_eigen_samples: samples,
                q_eigen_poly: qp,
                leading_expected: expected,
                leading_deviation,
                bethe_roots: roots.into_iter().map(Root::from).collect(),
                independent_roots: reps.into_iter().map(Root::from).collect(),
                residuals,
                paired: pairing <= 1e-9,
                pairing_deviation: pairing,
                tq_residual: tq,
                crossing_residual: crossing,
                energy,
                energy_direct,
            });
        }
        Ok(out)
    }

    /// Records for every sector.
    pub fn all(&self, sign: Sign) -> Result<Vec<SpectrumRecord>> {
        let mut out = Vec::new();
        for sector in 0..=self.params.length {
            out.extend(self.sector(sign, sector)?);
        }
        Ok(out)
    }
}

/// Records for every eigenstate of the chain.
pub fn spectrum(params: &ChainParams, sign: Sign, config: SpectralConfig) -> Result<Vec<SpectrumRecord>> {
    SpectralContext::new(params, config)?.all(sign)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    #[serde(rename = "L")]
    pub length: usize,
    pub p: String,
    pub q: String,
    /// `T'(0)/(2pq) - L` equals the directly built H in exact arithmetic.
    pub transfer_matches_exact: bool,
    /// Eigenvalues of H, ascending.
    pub hamiltonian_spectrum: Vec<f64>,
    /// Per-state energies from the T-eigenvalue polynomials, ascending.
    pub state_energies: Vec<f64>,
    pub max_deviation: f64,
}

/// Spectrum of H compared exactly with `T'(0)/(2pq) - L` and numerically
/// with the per-state energies of the records.
pub fn energies(params: &ChainParams, records: &[SpectrumRecord]) -> Result<EnergyCheck> {
    let l = params.length;
    let model = LatticeModel::from_params(params);
    let h = hamiltonian(l, &params.xi()?, &params.xi_hat()?)?;
    let from_t = hamiltonian_from_transfer(&model, l)?;
    let hd = to_dmatrix(&h);
    let mut spec: Vec<f64> = hd.symmetric_eigen().eigenvalues.iter().copied().collect();
    spec.sort_by(|a, b| a.total_cmp(b));
    let mut states: Vec<f64> = records.iter().map(|r| r.energy).collect();
    states.sort_by(|a, b| a.total_cmp(b));
    let max_deviation = if states.len() == spec.len() {
        spec.iter().zip(&states).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(EnergyCheck {
        length: l,
        p: format_rational(&params.p),
        q: format_rational(&params.q),
        transfer_matches_exact: from_t == h,
        hamiltonian_spectrum: spec,
        state_energies: states,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(l: usize) -> SpectralContext {
        SpectralContext::new(&ChainParams::default_for(l), SpectralConfig::default()).unwrap()
    }

    #[test]
    fn two_site_sector_one() {
        let c = ctx(2);
        let recs = c.sector(Sign::Plus, 1).unwrap();
        assert_eq!(recs.len(), 2);
        assert!((recs[0].t_eigen_poly[0] - recs[1].t_eigen_poly[0]).abs() > 0.0);
        let (p, q) = (2.0 / 3.0, 3.0 / 5.0);
        for r in &recs {
            assert_eq!(r.q_eigen_poly.len(), 3);
            assert!((r.q_eigen_poly[2] + 1.0 / (p + q)).abs() < 1e-9);
            assert_eq!(r.independent_roots.len(), 1);
            assert!(r.max_residual() < 1e-8, "{r:?}");
            assert!(r.paired);
        }
    }

    #[test]
    fn empty_sector_is_constant() {
        for l in 1..=3 {
            let c = ctx(l);
            let r = &c.sector(Sign::Plus, 0).unwrap()[0];
            assert_eq!(r.q_eigen_poly.len(), 1);
            assert!(r.leading_deviation < 1e-12);
            assert!(r.bethe_roots.is_empty() && r.residuals.is_empty() && r.paired);
        }
    }

    #[test]
    fn pipeline_invariants() {
        for l in 2..=3 {
            let c = ctx(l);
            for sign in Sign::both() {
                for r in c.all(sign).unwrap() {
                    assert!(r.tq_residual < 1e-8, "{r:?}");
                    assert!(r.max_residual() < 1e-8, "{r:?}");
                    assert!(r.pairing_deviation < 1e-9, "{r:?}");
                    assert!(r.leading_deviation < 1e-9, "{r:?}");
                    assert!(r.crossing_residual < 1e-8, "{r:?}");
                    assert!((r.energy - r.energy_direct).abs() < 1e-9, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn fallback_at_degenerate_point() {
        // T(0) is proportional to the identity.
        let mut c = ctx(2);
        c.config.z0 = Rational::from_integer(0.into());
        let recs = c.sector(Sign::Plus, 1).unwrap();
        assert!(recs.iter().all(|r| r.fallback));
        assert!(recs.iter().all(|r| r.max_residual() < 1e-8));
    }

    #[test]
    fn energies_match_hamiltonian() {
        let params = ChainParams::default_for(2);
        let recs = spectrum(&params, Sign::Plus, SpectralConfig::default()).unwrap();
        let e = energies(&params, &recs).unwrap();
        assert!(e.transfer_matches_exact);
        assert!(e.max_deviation < 1e-9);
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (z - 1/3)(z + 4/3) = z^2 + z - 4/9
        let r = polynomial_roots(&[-4.0 / 9.0, 1.0, 1.0]).unwrap();
        let (reps, dev) = pair_roots(&r);
        assert!(dev < 1e-14);
        assert!((reps[0].re - 1.0 / 3.0).abs() < 1e-14);
    }
}
