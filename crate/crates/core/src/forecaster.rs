//! Variance sequences and the Kolmogorov sum `sum v_n / n^2`.

use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed, Zero};

use crate::error::Error;
use crate::protocol::VarianceSource;
use crate::scalar::{parse_rational, NumericMode, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForecasterSpec {
    /// `v_n = c * n^p`, `c >= 0`.
    PowerLaw { c: BigRational, p: i32 },
    /// One variance per line.
    FromFile(PathBuf),
}

impl ForecasterSpec {
    pub fn power_law(c: BigRational, p: i32) -> Result<Self, Error> {
        if c.is_negative() {
            return Err(Error::NegativeVariance {
                round: 1,
                value: c.to_string(),
            });
        }
        Ok(ForecasterSpec::PowerLaw { c, p })
    }

    pub fn constant(c: BigRational) -> Result<Self, Error> {
        Self::power_law(c, 0)
    }
}

impl fmt::Display for ForecasterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForecasterSpec::PowerLaw { c, p } => write!(f, "powerlaw:c={c},p={p}"),
            ForecasterSpec::FromFile(path) => write!(f, "file:{}", path.display()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divergence {
    Divergent,
    Convergent,
    Unknown,
}

/// p-series test on `c n^(p-2)`; finite data cannot decide.
pub fn classify_divergence(spec: &ForecasterSpec) -> Divergence {
    match spec {
        ForecasterSpec::PowerLaw { c, .. } if c.is_zero() => Divergence::Convergent,
        ForecasterSpec::PowerLaw { p, .. } if *p >= 1 => Divergence::Divergent,
        ForecasterSpec::PowerLaw { .. } => Divergence::Convergent,
        ForecasterSpec::FromFile(_) => Divergence::Unknown,
    }
}

/// A variance sequence with any file contents already loaded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Forecaster {
    PowerLaw { c: BigRational, p: i32 },
    Sequence(Vec<BigRational>),
}

impl Forecaster {
    pub fn from_spec(spec: &ForecasterSpec) -> Result<Self, Error> {
        match spec {
            ForecasterSpec::PowerLaw { c, p } => Ok(Forecaster::PowerLaw { c: c.clone(), p: *p }),
            ForecasterSpec::FromFile(path) => load_variance_file(path).map(Forecaster::Sequence),
        }
    }

    pub fn from_values(values: Vec<BigRational>) -> Result<Self, Error> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::NegativeVariance {
                round: i as u64 + 1,
                value: v.to_string(),
            });
        }
        Ok(Forecaster::Sequence(values))
    }

    /// Exact `v_n`.
    pub fn exact_variance(&self, n: u64) -> Result<BigRational, Error> {
        match self {
            Forecaster::PowerLaw { c, p } => {
                let base = BigRational::from_integer(BigInt::from(n));
                let power: BigRational = if *p >= 0 {
                    Pow::pow(&base, p.unsigned_abs())
                } else {
                    Pow::pow(&base.recip(), p.unsigned_abs())
                };
                Ok(c * power)
            }
            Forecaster::Sequence(values) => {
                let index = usize::try_from(n).ok().and_then(|n| n.checked_sub(1));
                index
                    .and_then(|i| values.get(i))
                    .cloned()
                    .ok_or(Error::SequenceExhausted {
                        round: n,
                        len: values.len(),
                    })
            }
        }
    }
}

impl VarianceSource for Forecaster {
    fn variance(&self, n: u64, mode: NumericMode) -> Result<Scalar, Error> {
        variance_at(self, n, mode)
    }
}

pub fn variance_at(forecaster: &Forecaster, n: u64, mode: NumericMode) -> Result<Scalar, Error> {
    forecaster.exact_variance(n).map(|v| mode.from_rational(&v))
}

pub fn kolmogorov_partial_sum(forecaster: &Forecaster, horizon: u64, mode: NumericMode) -> Result<Scalar, Error> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon);
    }
    let mut ledger = KolmogorovLedger::new(mode);
    for n in 1..=horizon {
        ledger.push(&variance_at(forecaster, n, mode)?);
    }
    Ok(ledger.partial_sum)
}

/// Running `sum_{k<=n} v_k / k^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct KolmogorovLedger {
    pub partial_sum: Scalar,
    pub n: u64,
}

impl KolmogorovLedger {
    pub fn new(mode: NumericMode) -> Self {
        Self {
            partial_sum: mode.zero(),
            n: 0,
        }
    }

    /// Adds the term for the next round.
    pub fn push(&mut self, variance: &Scalar) {
        self.n += 1;
        let mode = self.partial_sum.mode();
        let n_squared = mode.from_u64(self.n).pow(2);
        self.partial_sum = &self.partial_sum + &(variance / &n_squared);
    }
}

/// Parses one variance per line: `p/q` or an exact decimal. Blank lines and
/// `#` comments are skipped.
pub fn parse_variance_file(path: &Path, text: &str) -> Result<Vec<BigRational>, Error> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let value = parse_rational(line).map_err(|source| Error::Literal {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        if value.is_negative() {
            return Err(Error::NegativeVariance {
                round: values.len() as u64 + 1,
                value: value.to_string(),
            });
        }
        values.push(value);
    }
    Ok(values)
}

pub fn load_variance_file(path: &Path) -> Result<Vec<BigRational>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_variance_file(path, &text)
}
