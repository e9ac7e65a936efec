use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{format_rational, int, is_integer, Rational};

/// Longest chain any operator builder accepts.
pub const MAX_LENGTH: usize = 10;

/// Which of the two Q-operators (reference state all up for `Plus`, all
/// down for `Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_rational(self) -> Rational {
        int(self.value())
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "−" | "minus" => Ok(Sign::Minus),
            other => Err(Error::InvalidParameters(format!("sign {other:?}: expected + or -"))),
        }
    }
}

/// Chain length and the two boundary parameters; `ξ = 1/p`, `ξ̂ = 1/q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainParams {
    pub length: usize,
    pub p: Rational,
    pub q: Rational,
}

impl ChainParams {
    pub fn new(length: usize, p: Rational, q: Rational) -> Result<Self> {
        let params = Self { length, p, q };
        params.validate()?;
        Ok(params)
    }

    /// The demo point used throughout: `p = 2/3`, `q = 3/5`.
    pub fn default_for(length: usize) -> Self {
        Self {
            length,
            p: crate::exact::rat(2, 3),
            q: crate::exact::rat(3, 5),
        }
    }

    /// Rejects parameters that hit a pole of the trace prefactors:
    /// `p + q` must not be an integer, and neither `p` nor `q` may be an
    /// integer in `[-2L-2, 2L+2]`.
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidParameters("chain length must be at least 1".into()));
        }
        if self.length > MAX_LENGTH {
            return Err(Error::ScaleLimit(format!(
                "chain length {} exceeds {MAX_LENGTH}",
                self.length
            )));
        }
        let sum = &self.p + &self.q;
        if is_integer(&sum) {
            return Err(Error::InvalidParameters(format!(
                "p + q = {} is an integer (pole of the trace prefactor)",
                format_rational(&sum)
            )));
        }
        let bound = int(2 * self.length as i64 + 2);
        for (name, v) in [("p", &self.p), ("q", &self.q)] {
            if is_integer(v) && v.abs() <= bound {
                return Err(Error::InvalidParameters(format!(
                    "{name} = {} is an integer in [-{bound}, {bound}]",
                    format_rational(v)
                )));
            }
        }
        Ok(())
    }

    pub fn with_length(&self, length: usize) -> Self {
        Self { length, ..self.clone() }
    }

    /// `(p, q) -> (-p, -q)`, the parameter map accompanying the spin flip.
    pub fn negated(&self) -> Self {
        Self {
            length: self.length,
            p: -self.p.clone(),
            q: -self.q.clone(),
        }
    }

    pub fn xi(&self) -> Result<Rational> {
        recip(&self.p, "p")
    }

    pub fn xi_hat(&self) -> Result<Rational> {
        recip(&self.q, "q")
    }
}

fn recip(v: &Rational, name: &str) -> Result<Rational> {
    if v.is_zero() {
        Err(Error::InvalidParameters(format!("{name} must be non-zero")))
    } else {
        Ok(v.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn default_parameters_are_valid_up_to_max_length() {
        for l in 1..=MAX_LENGTH {
            ChainParams::default_for(l).validate().unwrap();
        }
    }

    #[test]
    fn rejects_integer_sum() {
        let err = ChainParams::new(2, int(1), int(1)).unwrap_err();
        assert!(err.to_string().contains("p + q"));
        assert!(ChainParams::new(2, rat(1, 2), rat(3, 2)).is_err());
    }

    #[test]
    fn rejects_small_integer_parameters() {
        assert!(ChainParams::new(2, int(6), rat(1, 3)).is_err());
        assert!(ChainParams::new(2, int(7), rat(1, 3)).is_ok());
        assert!(ChainParams::new(2, rat(1, 3), int(-3)).is_err());
        assert!(ChainParams::new(0, rat(1, 3), rat(1, 5)).is_err());
        assert!(matches!(
            ChainParams::new(11, rat(1, 3), rat(1, 5)),
            Err(Error::ScaleLimit(_))
        ));
    }
}
