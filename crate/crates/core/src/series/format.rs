//! b-file, CSV and JSON encodings of [`ExactSeries`].

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::{ExactSeries, Predicted};
use crate::error::{Error, Result};
use crate::numeric::fmt_float;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Bfile,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "bfile" | "b-file" => Ok(Format::Bfile),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Invalid(format!("unknown series format '{s}'"))),
        }
    }
}

fn parse_value(tok: &str) -> Option<Rational> {
    tok.parse::<Rational>().ok()
}

/// Parse `index value` lines. Blank lines and `#` comments are skipped;
/// indices must be consecutive.
pub fn ingest_bfile(text: &str, name: &str) -> Result<ExactSeries> {
    let mut offset = None;
    let mut prev: Option<u64> = None;
    let mut coeffs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(parse_err(format!("expected 'index value', got '{line}'")));
        };
        let idx: u64 = a.parse().map_err(|_| parse_err(format!("bad index '{a}'")))?;
        let val = parse_value(b).ok_or_else(|| parse_err(format!("bad value '{b}'")))?;
        match prev {
            None => offset = Some(idx),
            Some(p) if idx <= p => return Err(parse_err(format!("index {idx} does not increase after {p}"))),
            Some(p) if idx > p + 1 => return Err(parse_err(format!("gap: index {idx} follows {p}"))),
            _ => {}
        }
        prev = Some(idx);
        coeffs.push(val);
    }
    let offset = offset.ok_or(Error::Parse { line: 0, msg: "no data lines".into() })?;
    ExactSeries::new(name, offset, coeffs)
}

#[derive(Serialize, Deserialize)]
struct PredictedJson {
    n: u64,
    value: String,
    uncertainty: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    name: String,
    offset: u64,
    coefficients: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    predicted: Vec<PredictedJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    predicted_ratios: Vec<PredictedJson>,
}

fn digits_of(f: &Float) -> usize {
    ((f.prec() as f64) / std::f64::consts::LOG2_10).floor().max(1.0) as usize
}

fn float_str(f: &Float) -> String {
    fmt_float(f, digits_of(f))
}

fn predicted_json(first: u64, v: &[Predicted]) -> Vec<PredictedJson> {
    v.iter()
        .enumerate()
        .map(|(i, p)| PredictedJson { n: first + i as u64, value: float_str(&p.value), uncertainty: fmt_float(&p.uncertainty, 6) })
        .collect()
}

pub fn export(s: &ExactSeries, format: Format) -> String {
    let first = s.last_index() + 1;
    match format {
        Format::Bfile => {
            let lines: Vec<String> = s
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{} {}", s.offset + i as u64, c))
                .collect();
            lines.join("\n")
        }
        Format::Csv => {
            let mut out = String::from("n,coefficient,is_predicted,uncertainty\n");
            for (i, c) in s.coeffs().iter().enumerate() {
                out.push_str(&format!("{},{},false,0\n", s.offset + i as u64, c));
            }
            let values = s.values(s.tail().or(s.tail_ratios()).map_or(64, |t| t[0].value.prec()));
            let predicted = &values.values[s.len()..];
            let unc: Vec<Float> = match (s.tail(), s.tail_ratios()) {
                (Some(t), _) => t.iter().map(|p| p.uncertainty.clone()).collect(),
                // Chained from ratios: relative ratio errors accumulate.
                (None, Some(tr)) => {
                    let mut rel = Float::new(tr[0].value.prec());
                    tr.iter()
                        .zip(predicted)
                        .map(|(p, (_, v))| {
                            rel += Float::with_val(rel.prec(), &p.uncertainty / &p.value);
                            Float::with_val(rel.prec(), &rel * v).abs()
                        })
                        .collect()
                }
                _ => Vec::new(),
            };
            for ((n, v), u) in predicted.iter().zip(&unc) {
                out.push_str(&format!("{n},{},true,{}\n", float_str(v), fmt_float(u, 6)));
            }
            out
        }
        Format::Json => {
            let j = SeriesJson {
                name: s.name.clone(),
                offset: s.offset,
                coefficients: s.coeffs().iter().map(|c| c.to_string()).collect(),
                predicted: s.tail().map(|t| predicted_json(first, t)).unwrap_or_default(),
                predicted_ratios: s.tail_ratios().map(|t| predicted_json(first, t)).unwrap_or_default(),
            };
            serde_json::to_string_pretty(&j).expect("serializable")
        }
    }
}

fn parse_float(s: &str, bits: u32, line: usize) -> Result<Float> {
    Float::parse(s)
        .map(|v| Float::with_val(bits, v))
        .map_err(|_| Error::Parse { line, msg: format!("bad number '{s}'") })
}

fn predicted_from_json(v: &[PredictedJson], first: u64, bits: u32) -> Result<Vec<Predicted>> {
    v.iter()
        .enumerate()
        .map(|(i, p)| {
            if p.n != first + i as u64 {
                return Err(Error::Parse { line: 0, msg: format!("predicted index {} out of sequence", p.n) });
            }
            Ok(Predicted { value: parse_float(&p.value, bits, 0)?, uncertainty: parse_float(&p.uncertainty, bits, 0)? })
        })
        .collect()
}

/// Inverse of [`export`]; floats are read at `bits` of precision.
pub fn import(text: &str, format: Format, name: &str, bits: u32) -> Result<ExactSeries> {
    match format {
        Format::Bfile => ingest_bfile(text, name),
        Format::Json => {
            let j: SeriesJson =
                serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
            let coeffs = j
                .coefficients
                .iter()
                .map(|c| parse_value(c).ok_or_else(|| Error::Parse { line: 0, msg: format!("bad coefficient '{c}'") }))
                .collect::<Result<Vec<_>>>()?;
            let s = ExactSeries::new(j.name, j.offset, coeffs)?;
            let first = s.last_index() + 1;
            let tail = predicted_from_json(&j.predicted, first, bits)?;
            let tr = predicted_from_json(&j.predicted_ratios, first, bits)?;
            s.with_tail(Some(tail), Some(tr))
        }
        Format::Csv => {
            let mut lines = text.lines().enumerate();
            match lines.next() {
                Some((_, h)) if h.trim() == "n,coefficient,is_predicted,uncertainty" => {}
                _ => return Err(Error::Parse { line: 1, msg: "missing csv header".into() }),
            }
            let mut exact = String::new();
            let mut tail = Vec::new();
            for (i, line) in lines {
                let line_no = i + 1;
                if line.trim().is_empty() {
                    continue;
                }
                let f: Vec<&str> = line.split(',').map(str::trim).collect();
                if f.len() != 4 {
                    return Err(Error::Parse { line: line_no, msg: "expected 4 fields".into() });
                }
                match f[2] {
                    "false" => {
                        if !tail.is_empty() {
                            return Err(Error::Parse { line: line_no, msg: "exact row after predicted rows".into() });
                        }
                        exact.push_str(&format!("{} {}\n", f[0], f[1]));
                    }
                    "true" => tail.push(Predicted {
                        value: parse_float(f[1], bits, line_no)?,
                        uncertainty: parse_float(f[3], bits, line_no)?,
                    }),
                    other => return Err(Error::Parse { line: line_no, msg: format!("bad is_predicted '{other}'") }),
                }
            }
            ingest_bfile(&exact, name)?.with_tail(Some(tail), None)
        }
    }
}
