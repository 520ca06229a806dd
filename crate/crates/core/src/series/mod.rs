//! Exact coefficient sequences with an optional predicted tail, the embedded
//! Wilf-class dataset, and text formats.

mod dataset;
mod format;
mod tables;

use rug::{Float, Integer, Rational};

pub use dataset::Dataset;
pub use format::{export, import, ingest_bfile, Format};

use crate::error::{Error, Result};
use crate::ratio::EstimatorSeq;

/// A predicted value and its (non-negative) uncertainty.
#[derive(Clone, Debug, PartialEq)]
pub struct Predicted {
    pub value: Float,
    pub uncertainty: Float,
}

/// Named coefficient sequence. Exact coefficients are rationals so weighted
/// path counts fit alongside integer data; predictions live only in the tail.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSeries {
    pub name: String,
    pub offset: u64,
    coeffs: Vec<Rational>,
    tail: Option<Vec<Predicted>>,
    tail_ratios: Option<Vec<Predicted>>,
}

impl ExactSeries {
    pub fn new(name: impl Into<String>, offset: u64, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("a series needs at least one coefficient".into()));
        }
        Ok(ExactSeries { name: name.into(), offset, coeffs, tail: None, tail_ratios: None })
    }

    pub fn from_integers(name: impl Into<String>, offset: u64, coeffs: Vec<Integer>) -> Result<Self> {
        Self::new(name, offset, coeffs.into_iter().map(Rational::from).collect())
    }

    pub fn from_u64(name: impl Into<String>, coeffs: &[u64]) -> Result<Self> {
        Self::new(name, 0, coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// Attach predictions; either list may be empty or absent.
    pub fn with_tail(mut self, tail: Option<Vec<Predicted>>, tail_ratios: Option<Vec<Predicted>>) -> Result<Self> {
        for p in tail.iter().flatten().chain(tail_ratios.iter().flatten()) {
            if p.uncertainty.is_nan() || p.uncertainty < 0 {
                return Err(Error::Invalid("uncertainties must be non-negative".into()));
            }
        }
        self.tail = tail.filter(|t| !t.is_empty());
        self.tail_ratios = tail_ratios.filter(|t| !t.is_empty());
        Ok(self)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last exact coefficient.
    pub fn last_index(&self) -> u64 {
        self.offset + self.coeffs.len() as u64 - 1
    }

    pub fn coeff(&self, n: u64) -> Option<&Rational> {
        n.checked_sub(self.offset).and_then(|i| self.coeffs.get(i as usize))
    }

    pub fn tail(&self) -> Option<&[Predicted]> {
        self.tail.as_deref()
    }

    pub fn tail_ratios(&self) -> Option<&[Predicted]> {
        self.tail_ratios.as_deref()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| *c.denom() == 1)
    }

    pub fn integer_coeffs(&self) -> Option<Vec<Integer>> {
        self.is_integral().then(|| self.coeffs.iter().map(|c| c.numer().clone()).collect())
    }

    /// The first `len` exact coefficients, without predictions.
    pub fn prefix(&self, len: usize) -> Result<ExactSeries> {
        if len == 0 || len > self.coeffs.len() {
            return Err(Error::Invalid(format!("prefix length {len} outside 1..={}", self.coeffs.len())));
        }
        ExactSeries::new(self.name.clone(), self.offset, self.coeffs[..len].to_vec())
    }

    /// Drop predictions.
    pub fn exact_only(&self) -> ExactSeries {
        ExactSeries { tail: None, tail_ratios: None, ..self.clone() }
    }

    /// Coefficients as floats, exact part followed by predicted values. When
    /// only predicted ratios exist, coefficients are chained from them.
    pub fn values(&self, bits: u32) -> EstimatorSeq {
        let mut values: Vec<(u64, Float)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (self.offset + i as u64, Float::with_val(bits, c)))
            .collect();
        let first = self.last_index() + 1;
        let mut predicted = false;
        if let Some(t) = &self.tail {
            predicted = true;
            for (i, p) in t.iter().enumerate() {
                values.push((first + i as u64, Float::with_val(bits, &p.value)));
            }
        } else if let Some(tr) = &self.tail_ratios {
            predicted = true;
            let mut prev = values.last().unwrap().1.clone();
            for (i, p) in tr.iter().enumerate() {
                prev *= &p.value;
                values.push((first + i as u64, prev.clone()));
            }
        }
        let mut s = EstimatorSeq::new("coefficients", values, Rational::from(0));
        if predicted {
            s.first_predicted = Some(first);
        }
        s
    }
}

/// rₙ = cₙ/cₙ₋₁ at `bits` of precision, extended by predicted ratios when present.
pub fn ratios(s: &ExactSeries, bits: u32) -> Result<EstimatorSeq> {
    if s.coeffs.len() < 2 {
        return Err(Error::Invalid("ratios need at least two coefficients".into()));
    }
    let mut values = Vec::with_capacity(s.coeffs.len());
    for i in 1..s.coeffs.len() {
        let prev = &s.coeffs[i - 1];
        if prev.cmp0() == std::cmp::Ordering::Equal {
            return Err(Error::ZeroCoefficient(s.offset + i as u64 - 1));
        }
        let q = Rational::from(&s.coeffs[i] / prev);
        values.push((s.offset + i as u64, Float::with_val(bits, &q)));
    }
    let first = s.last_index() + 1;
    let mut predicted = false;
    if let Some(tr) = &s.tail_ratios {
        predicted = true;
        for (i, p) in tr.iter().enumerate() {
            values.push((first + i as u64, Float::with_val(bits, &p.value)));
        }
    } else if let Some(t) = &s.tail {
        predicted = true;
        let mut prev = Float::with_val(bits, s.coeffs.last().unwrap());
        for (i, p) in t.iter().enumerate() {
            let v = Float::with_val(bits, &p.value);
            if prev.is_zero() {
                return Err(Error::ZeroCoefficient(first + i as u64 - 1));
            }
            values.push((first + i as u64, Float::with_val(bits, &v / &prev)));
            prev = v;
        }
    }
    let mut seq = EstimatorSeq::new("ratio", values, Rational::from(1));
    if predicted {
        seq.first_predicted = Some(first);
    }
    Ok(seq)
}
