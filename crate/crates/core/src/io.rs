//! Versioned JSON documents and CSV tables.
//!
//! Exact outputs carry rationals as `"num/den"` strings; numeric outputs
//! carry a `precision_digits` field and every float is rounded to that many
//! significant digits, so reruns are byte-identical.

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, ExactPolynomial, Matrix};
use crate::fock::ConvergenceScan;
use crate::operators::{OperatorKind, QuantumOperator, SpinBasis};
use crate::params::{ChainParams, Sign};
use crate::spectral::{EnergyCheck, SpectrumRecord};
use crate::verify::{Report, Verdict};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_PRECISION_DIGITS: usize = 15;
pub const PRECISION_ENV: &str = "BAXTERQ_PRECISION_DIGITS";

/// Significant digits for numeric output: `BAXTERQ_PRECISION_DIGITS` if set,
/// otherwise the default.
pub fn precision_digits() -> Result<usize> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => parse_precision(&v),
        Err(_) => Ok(DEFAULT_PRECISION_DIGITS),
    }
}

pub fn parse_precision(v: &str) -> Result<usize> {
    match v.trim().parse::<usize>() {
        Ok(d) if (1..=17).contains(&d) => Ok(d),
        _ => Err(Error::Format(format!("{PRECISION_ENV} must be an integer in 1..=17, got {v:?}"))),
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Scientific notation with `digits` significant digits.
pub fn format_float(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.*e}", digits.saturating_sub(1), x)
    }
}

fn round_value(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| Number::from_f64(round_sig(x, digits))) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_value(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_value(x, digits)),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to `digits` significant digits.
pub fn numeric_json<T: Serialize>(value: &T, digits: usize) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Format(e.to_string()))?;
    round_value(&mut v, digits);
    serde_json::to_string_pretty(&v).map_err(|e| Error::Format(e.to_string()))
}

pub fn exact_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))
}

// ---------------------------------------------------------------------------
// operators

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDocument {
    /// Number of down spins.
    pub m: usize,
    pub basis: Vec<String>,
    /// `entries[i][j]` lists coefficients in ascending powers of z.
    pub entries: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDocument {
    pub schema_version: u32,
    #[serde(rename = "L")]
    pub length: usize,
    pub p: String,
    pub q: String,
    pub operator: String,
    pub blocks: Vec<BlockDocument>,
}

impl OperatorDocument {
    /// Fails if the operator has entries between different magnon blocks.
    pub fn from_operator(op: &QuantumOperator) -> Result<Self> {
        if let Some(err) = op.block_violation() {
            return Err(err);
        }
        let basis = op.basis();
        let blocks = (0..=op.length)
            .map(|m| {
                let idx = basis.block(m);
                let entries = idx
                    .iter()
                    .map(|&i| {
                        idx.iter()
                            .map(|&j| op.entries.get(i, j).coeffs().iter().map(format_rational).collect())
                            .collect()
                    })
                    .collect();
                BlockDocument { m, basis: idx.iter().map(|&i| basis.bitstring(i)).collect(), entries }
            })
            .collect();
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            length: op.length,
            p: format_rational(&op.p),
            q: format_rational(&op.q),
            operator: op.kind.to_string(),
            blocks,
        })
    }

    pub fn to_operator(&self) -> Result<QuantumOperator> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema_version {}", self.schema_version)));
        }
        let params = ChainParams::new(self.length, parse_rational(&self.p)?, parse_rational(&self.q)?)?;
        let kind: OperatorKind = self.operator.parse()?;
        let basis = SpinBasis::new(self.length);
        let dim = basis.dim();
        let mut entries = Matrix::<ExactPolynomial>::zeros(dim, dim);
        let mut seen = vec![false; dim];
        for block in &self.blocks {
            let idx = block
                .basis
                .iter()
                .map(|s| basis.parse_bitstring(s))
                .collect::<Result<Vec<_>>>()?;
            if block.entries.len() != idx.len() {
                return Err(Error::Format(format!("block m = {}: row count mismatch", block.m)));
            }
            for (&i, row) in idx.iter().zip(&block.entries) {
                if basis.magnon(i) != block.m || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Format(format!("basis state {} misplaced", basis.bitstring(i))));
                }
                if row.len() != idx.len() {
                    return Err(Error::Format(format!("block m = {}: column count mismatch", block.m)));
                }
                for (&j, coeffs) in idx.iter().zip(row) {
                    let c = coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                    entries.set(i, j, ExactPolynomial::from_coeffs(c));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Format(format!("basis state {} missing", basis.bitstring(i))));
        }
        Ok(QuantumOperator { length: params.length, p: params.p, q: params.q, kind, entries })
    }

    pub fn to_json(&self) -> Result<String> {
        exact_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// reports, spectra, oracle tables

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub precision_digits: usize,
    #[serde(rename = "L")]
    pub length: usize,
    pub p: String,
    pub q: String,
    pub cutoff: usize,
    pub seed: u64,
    /// No check failed; refused checks do not count as failures.
    pub all_passed: bool,
    pub reports: Vec<Report>,
}

impl ReportDocument {
    pub fn new(params: &ChainParams, cutoff: usize, seed: u64, reports: Vec<Report>, digits: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            precision_digits: digits,
            length: params.length,
            p: format_rational(&params.p),
            q: format_rational(&params.q),
            cutoff,
            seed,
            all_passed: reports.iter().all(|r| r.verdict != Verdict::Fail),
            reports,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub schema_version: u32,
    pub precision_digits: usize,
    #[serde(rename = "L")]
    pub length: usize,
    pub p: String,
    pub q: String,
    pub sign: Sign,
    pub z0: String,
    pub records: Vec<SpectrumRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub energies: Option<EnergyCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleDocument {
    pub schema_version: u32,
    pub precision_digits: usize,
    pub scans: Vec<ConvergenceScan>,
}

/// A CSV table with a header row.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

pub fn reports_csv(reports: &[Report]) -> Result<String> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.mode.to_string(),
                format!("{:?}", r.verdict).to_lowercase(),
                r.length.to_string(),
                r.max_deviation.clone(),
                r.comparisons.to_string(),
                r.detail.clone(),
            ]
        })
        .collect();
    csv_string(&["name", "mode", "verdict", "L", "max_deviation", "comparisons", "detail"], &rows)
}

pub fn spectrum_csv(records: &[SpectrumRecord], digits: usize) -> Result<String> {
    let f = |x: f64| format_float(x, digits);
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.length.to_string(),
                r.p.clone(),
                r.q.clone(),
                r.sign.to_string(),
                r.sector.to_string(),
                r.m.to_string(),
                r.index.to_string(),
                f(r.energy),
                f(r.energy_direct),
                f(r.leading_deviation),
                f(r.tq_residual),
                f(r.max_residual()),
                f(r.pairing_deviation),
                r.fallback.to_string(),
            ]
        })
        .collect();
    csv_string(
        &[
            "L", "p", "q", "sign", "sector", "m", "index", "energy", "energy_direct", "leading_deviation",
            "tq_residual", "max_bethe_residual", "pairing_deviation", "fallback",
        ],
        &rows,
    )
}

/// One row per independent Bethe root; states without roots get one row
/// with empty root columns.
pub fn bethe_csv(records: &[SpectrumRecord], digits: usize) -> Result<String> {
    let f = |x: f64| format_float(x, digits);
    let mut rows = Vec::new();
    for r in records {
        let base = vec![
            r.length.to_string(),
            r.sign.to_string(),
            r.sector.to_string(),
            r.m.to_string(),
            r.index.to_string(),
        ];
        if r.independent_roots.is_empty() {
            let mut row = base.clone();
            row.extend([String::new(), String::new(), String::new(), String::new(), f(r.energy)]);
            rows.push(row);
        }
        for (k, (root, res)) in r.independent_roots.iter().zip(&r.residuals).enumerate() {
            let mut row = base.clone();
            row.extend([k.to_string(), f(root.re), f(root.im), f(*res), f(r.energy)]);
            rows.push(row);
        }
    }
    csv_string(&["L", "sign", "sector", "m", "index", "root", "re", "im", "residual", "energy"], &rows)
}

pub fn oracle_csv(scans: &[ConvergenceScan], digits: usize) -> Result<String> {
    let f = |x: f64| format_float(x, digits);
    let mut rows = Vec::new();
    for s in scans {
        for r in &s.rows {
            rows.push(vec![
                s.sign.to_string(),
                s.length.to_string(),
                s.row.clone(),
                s.col.clone(),
                r.cutoff.to_string(),
                f(r.partial),
                s.exact.clone(),
                f(r.abs_error),
            ]);
        }
    }
    csv_string(&["sign", "L", "row", "col", "cutoff", "partial", "exact", "abs_error"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{hamiltonian_operator, q_operator, transfer_matrix};

    #[test]
    fn operator_round_trip() {
        for l in 1..=3 {
            let params = ChainParams::default_for(l);
            for op in [
                transfer_matrix(&params).unwrap(),
                q_operator(&params, Sign::Plus).unwrap(),
                q_operator(&params, Sign::Minus).unwrap(),
                hamiltonian_operator(&params).unwrap(),
            ] {
                let doc = OperatorDocument::from_operator(&op).unwrap();
                let back = OperatorDocument::from_json(&doc.to_json().unwrap()).unwrap().to_operator().unwrap();
                assert_eq!(back, op);
            }
        }
    }

    #[test]
    fn single_site_q_plus_document() {
        let op = q_operator(&ChainParams::default_for(1), Sign::Plus).unwrap();
        let doc = OperatorDocument::from_operator(&op).unwrap();
        // -1/(p + q + 1) with p = 2/3, q = 3/5
        assert_eq!(doc.blocks[0].entries, vec![vec![vec!["-15/34".to_string()]]]);
        assert_eq!(doc.operator, "Q+");
    }

    #[test]
    fn malformed_documents_rejected() {
        let op = q_operator(&ChainParams::default_for(2), Sign::Plus).unwrap();
        let mut doc = OperatorDocument::from_operator(&op).unwrap();
        doc.blocks[1].basis.swap(0, 1);
        doc.blocks[1].basis[0] = "00".into();
        assert!(doc.to_operator().is_err());
        let mut doc = OperatorDocument::from_operator(&op).unwrap();
        doc.blocks[0].entries[0][0] = vec!["1/x".into()];
        assert!(doc.to_operator().is_err());
    }

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round_sig(1.0 / 3.0, 3), 0.333);
        assert_eq!(numeric_json(&vec![1.0 / 3.0, 2.0], 4).unwrap(), "[\n  0.3333,\n  2.0\n]");
        assert_eq!(format_float(-0.000123456, 3), "-1.23e-4");
    }

    #[test]
    fn precision_parsing() {
        assert_eq!(parse_precision("12").unwrap(), 12);
        assert!(parse_precision("0").is_err());
        assert!(parse_precision("x").is_err());
    }

    #[test]
    fn csv_has_header() {
        let s = csv_string(&["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(s, "a,b\n1,\"x,y\"\n");
    }
}
