//! File formats: JSON linear systems and congruence pairs, the text QUBO
//! interchange format, and the JSON sidecar written next to it.
//!
//! QUBO files look like
//!
//! ```text
//! c formulation sylvester
//! c encoding signed-pair lo 0 hi 2 vars 2
//! c offset 2.6000000000000000e1
//! p qubo 0 12 11 12
//! 0 0 8.0000000000000000e0
//! 0 1 6.4000000000000004e0
//! ```
//!
//! Indices are zero-based with `i ≤ j`; diagonal lines come first, then
//! couplers, each group sorted. Values carry 17 significant digits so every
//! `f64` survives a round trip.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::encoding::{EncodingKind, EncodingSpec};
use crate::error::{Error, Result};
use crate::qubo::{Formulation, LinearSystem, QuboModel};

/// Parses an exact rational from `"3"`, `"-0.125"`, `"1.5e-3"` or `"98/125"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let den = parse_decimal(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(parse_decimal(num)? / den);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int}{frac}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().unwrap_or_else(|_| BigInt::zero()));
    let scale = exp.checked_sub(i32::try_from(frac.len()).ok()?)?;
    if scale.unsigned_abs() > 4096 {
        return None;
    }
    let ten = BigRational::from_integer(10.into());
    let mut p = BigRational::one();
    for _ in 0..scale.unsigned_abs() {
        p *= &ten;
    }
    value = if scale >= 0 { value * p } else { value / p };
    Some(if neg { -value } else { value })
}

fn value_to_rational(v: &Value, what: &str) -> Result<BigRational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::parse(0, format!("{what}: expected a number or string, got {v}"))),
    };
    parse_rational(&text).ok_or_else(|| Error::parse(0, format!("{what}: cannot parse {text:?}")))
}

fn vector(v: &Value, what: &str) -> Result<Vec<BigRational>> {
    v.as_array()
        .ok_or_else(|| Error::parse(0, format!("{what} must be an array")))?
        .iter()
        .enumerate()
        .map(|(i, x)| value_to_rational(x, &format!("{what}[{i}]")))
        .collect()
}

fn matrix(v: &Value, what: &str) -> Result<Vec<Vec<BigRational>>> {
    v.as_array()
        .ok_or_else(|| Error::parse(0, format!("{what} must be an array of rows")))?
        .iter()
        .enumerate()
        .map(|(i, row)| vector(row, &format!("{what}[{i}]")))
        .collect()
}

fn field<'a>(doc: &'a Value, key: &str) -> Result<&'a Value> {
    doc.get(key)
        .ok_or_else(|| Error::parse(0, format!("missing field {key:?}")))
}

/// Parses `{"A": [[...]], "b": [...]}`. Entries may be JSON numbers (taken
/// at their decimal text) or strings in decimal or `p/q` form.
pub fn parse_system(text: &str) -> Result<LinearSystem> {
    let doc: Value = serde_json::from_str(text)?;
    let a = matrix(field(&doc, "A")?, "A")?;
    let b = vector(field(&doc, "b")?, "b")?;
    LinearSystem::from_rationals(a, b).map_err(|e| Error::parse(0, e.to_string()))
}

pub fn read_system(path: &Path) -> Result<LinearSystem> {
    parse_system(&std::fs::read_to_string(path)?)
}

/// Parses `{"D": [...], "R": [[...]]}` with the same entry rules as systems.
pub fn parse_pair(text: &str) -> Result<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let doc: Value = serde_json::from_str(text)?;
    Ok((vector(field(&doc, "D")?, "D")?, matrix(field(&doc, "R")?, "R")?))
}

/// `{"A": [...], "b": [...]}` with exact rational strings.
pub fn system_json(sys: &LinearSystem) -> Value {
    let a: Vec<Vec<String>> = sys
        .a_exact()
        .iter()
        .map(|row| row.iter().map(ToString::to_string).collect())
        .collect();
    let b: Vec<String> = sys.b_exact().iter().map(ToString::to_string).collect();
    json!({ "A": a, "b": b })
}

/// A QUBO file: the model plus the metadata carried in its comments.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboDocument {
    pub model: QuboModel,
    pub formulation: Option<String>,
    pub encoding: Option<EncodingSpec>,
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

impl QuboDocument {
    pub fn from_model(model: &QuboModel) -> Self {
        let p = model.provenance();
        QuboDocument {
            model: model.clone(),
            formulation: p.map(|p| p.formulation.name().to_string()),
            encoding: p.map(|p| p.encoding),
        }
    }

    pub fn render(&self) -> String {
        let m = &self.model;
        let (diag, off): (Vec<_>, Vec<_>) = m.coeffs().iter().partition(|(&(i, j), _)| i == j);
        let mut s = String::new();
        if let Some(f) = &self.formulation {
            let _ = writeln!(s, "c formulation {f}");
        }
        if let Some(e) = &self.encoding {
            let _ = writeln!(s, "c encoding {} lo {} hi {} vars {}", e.kind, e.lo, e.hi, e.n_vars);
        }
        let _ = writeln!(s, "c offset {}", fmt_value(m.offset()));
        let _ = writeln!(s, "p qubo 0 {} {} {}", m.n_qubits(), diag.len(), off.len());
        for (&(i, j), &v) in diag.into_iter().chain(off) {
            let _ = writeln!(s, "{i} {j} {}", fmt_value(v));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut formulation = None;
        let mut encoding = None;
        let mut offset = 0.0;
        let mut header: Option<(usize, usize, usize)> = None;
        let mut coeffs = BTreeMap::new();
        let (mut n_diag, mut n_off) = (0, 0);
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "c" => match words.get(1).copied() {
                    Some("offset") => {
                        offset = words
                            .get(2)
                            .and_then(|w| w.parse::<f64>().ok())
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| Error::parse(line_no, "bad offset"))?;
                    }
                    Some("formulation") => {
                        let f = words.get(2).ok_or_else(|| Error::parse(line_no, "missing formulation"))?;
                        formulation = Some((*f).to_string());
                    }
                    Some("encoding") => encoding = Some(parse_encoding(&words[2..], line_no)?),
                    _ => {}
                },
                "p" => {
                    if header.is_some() {
                        return Err(Error::parse(line_no, "duplicate header"));
                    }
                    if words.len() != 6 || words[1] != "qubo" {
                        return Err(Error::parse(line_no, "expected 'p qubo 0 <nodes> <diag> <couplers>'"));
                    }
                    let num = |w: &str| w.parse::<usize>().map_err(|_| Error::parse(line_no, format!("bad count {w:?}")));
                    header = Some((num(words[3])?, num(words[4])?, num(words[5])?));
                }
                _ => {
                    let (n, _, _) = header.ok_or_else(|| Error::parse(line_no, "entry before header"))?;
                    if words.len() != 3 {
                        return Err(Error::parse(line_no, "expected 'i j value'"));
                    }
                    let i: usize = words[0].parse().map_err(|_| Error::parse(line_no, "bad index"))?;
                    let j: usize = words[1].parse().map_err(|_| Error::parse(line_no, "bad index"))?;
                    let v: f64 = words[2]
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| Error::parse(line_no, "bad value"))?;
                    if i > j {
                        return Err(Error::parse(line_no, "entry below the diagonal"));
                    }
                    if j >= n {
                        return Err(Error::parse(line_no, format!("index {j} out of range for {n} nodes")));
                    }
                    if coeffs.insert((i, j), v).is_some() {
                        return Err(Error::parse(line_no, format!("duplicate entry ({i}, {j})")));
                    }
                    if i == j {
                        n_diag += 1;
                    } else {
                        n_off += 1;
                    }
                }
            }
        }
        let (n, want_diag, want_off) = header.ok_or_else(|| Error::parse(0, "missing 'p qubo' header"))?;
        if (n_diag, n_off) != (want_diag, want_off) {
            return Err(Error::parse(
                0,
                format!("header promises {want_diag}+{want_off} entries, found {n_diag}+{n_off}"),
            ));
        }
        if let Some(e) = &encoding {
            if e.total_qubits() != n {
                return Err(Error::parse(0, "encoding does not match the node count"));
            }
        }
        Ok(QuboDocument {
            model: QuboModel::from_coeffs(n, coeffs, offset)?,
            formulation,
            encoding,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        QuboDocument::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.render())?)
    }
}

fn parse_encoding(words: &[&str], line: usize) -> Result<EncodingSpec> {
    let bad = || Error::parse(line, "expected 'c encoding <kind> lo <int> hi <int> vars <int>'");
    if words.len() != 7 || words[1] != "lo" || words[3] != "hi" || words[5] != "vars" {
        return Err(bad());
    }
    let kind = match words[0] {
        "signed-pair" => EncodingKind::SignedPair,
        "offset-binary" => EncodingKind::OffsetBinary,
        _ => return Err(bad()),
    };
    let lo = words[2].parse().map_err(|_| bad())?;
    let hi = words[4].parse().map_err(|_| bad())?;
    let vars = words[6].parse().map_err(|_| bad())?;
    EncodingSpec::new(kind, lo, hi, vars).map_err(|e| Error::parse(line, e.to_string()))
}

/// The JSON written next to a QUBO file: formulation, encoding, offset,
/// the congruence pair (Sylvester only), qubit labels and the source system.
pub fn sidecar(model: &QuboModel, sys: &LinearSystem) -> Value {
    let p = model.provenance();
    let (d, r) = match p.map(|p| &p.formulation) {
        Some(Formulation::Sylvester(pair)) => (json!(pair.d), json!(pair.r.to_rows())),
        _ => (Value::Null, Value::Null),
    };
    let labels: Vec<String> = model
        .labels()
        .unwrap_or_default()
        .iter()
        .map(ToString::to_string)
        .collect();
    json!({
        "formulation": p.map(|p| p.formulation.name()),
        "encoding": p.map(|p| p.encoding),
        "n_qubits": model.n_qubits(),
        "offset": model.offset(),
        "D": d,
        "R": r,
        "labels": labels,
        "system": system_json(sys),
    })
}
