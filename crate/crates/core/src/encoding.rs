//! Fixed-point binary encodings of real unknowns.
//!
//! Two encodings over the exponent range `lo..=hi`:
//!
//! - signed pair: `y = Σ 2^l q⁺_l − Σ 2^l q⁻_l`, `2·(hi−lo+1)` qubits;
//! - offset binary: `y = Σ 2^l q⁺_l − 2^(hi+1) s`, `(hi−lo+1)+1` qubits.
//!
//! Qubits are laid out variable by variable. Within a variable the positive
//! digits come first in ascending exponent order, followed by the negative
//! digits (signed pair) or the single sign bit (offset binary).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents are restricted so every digit weight is an exact `f64`.
pub const EXPONENT_LIMIT: i32 = 500;
/// `representations_of` enumerates at most `2^24` patterns per variable.
pub const ENUMERATION_BITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingKind {
    SignedPair,
    OffsetBinary,
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::SignedPair => "signed-pair",
            EncodingKind::OffsetBinary => "offset-binary",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub kind: EncodingKind,
    pub lo: i32,
    pub hi: i32,
    pub n_vars: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", content = "exponent", rename_all = "kebab-case")]
pub enum QubitRole {
    PosDigit(i32),
    NegDigit(i32),
    SignBit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitLabel {
    /// Zero-based variable index.
    pub var: usize,
    pub role: QubitRole,
    /// Position in the canonical flat ordering.
    pub flat: usize,
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            QubitRole::PosDigit(l) => write!(f, "y{}+2^{}", self.var + 1, l),
            QubitRole::NegDigit(l) => write!(f, "y{}-2^{}", self.var + 1, l),
            QubitRole::SignBit => write!(f, "y{}-sign", self.var + 1),
        }
    }
}

impl EncodingSpec {
    pub fn new(kind: EncodingKind, lo: i32, hi: i32, n_vars: usize) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidEncoding(format!("hi ({hi}) below lo ({lo})")));
        }
        if lo < -EXPONENT_LIMIT || hi >= EXPONENT_LIMIT {
            return Err(Error::InvalidEncoding(format!(
                "exponents must lie in [-{EXPONENT_LIMIT}, {EXPONENT_LIMIT})"
            )));
        }
        if n_vars == 0 {
            return Err(Error::InvalidEncoding("at least one variable is required".into()));
        }
        Ok(EncodingSpec {
            kind,
            lo,
            hi,
            n_vars,
        })
    }

    pub fn signed_pair(lo: i32, hi: i32, n_vars: usize) -> Result<Self> {
        EncodingSpec::new(EncodingKind::SignedPair, lo, hi, n_vars)
    }

    pub fn offset_binary(lo: i32, hi: i32, n_vars: usize) -> Result<Self> {
        EncodingSpec::new(EncodingKind::OffsetBinary, lo, hi, n_vars)
    }

    /// Number of distinct exponents, i.e. digits on each sign side.
    pub fn digits(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn qubits_per_var(&self) -> usize {
        match self.kind {
            EncodingKind::SignedPair => 2 * self.digits(),
            EncodingKind::OffsetBinary => self.digits() + 1,
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.n_vars * self.qubits_per_var()
    }

    /// Weight of the sign bit in the offset-binary encoding: `−2^(hi+1)`.
    pub fn sign_weight(&self) -> f64 {
        -pow2(self.hi + 1)
    }

    /// Roles of one variable's qubits in canonical order.
    pub fn roles(&self) -> Vec<QubitRole> {
        let pos = (self.lo..=self.hi).map(QubitRole::PosDigit);
        match self.kind {
            EncodingKind::SignedPair => pos.chain((self.lo..=self.hi).map(QubitRole::NegDigit)).collect(),
            EncodingKind::OffsetBinary => pos.chain(std::iter::once(QubitRole::SignBit)).collect(),
        }
    }

    /// Signed weight of a role: `+2^l`, `−2^l` or `−2^(hi+1)`.
    pub fn role_weight(&self, role: QubitRole) -> f64 {
        match role {
            QubitRole::PosDigit(l) => pow2(l),
            QubitRole::NegDigit(l) => -pow2(l),
            QubitRole::SignBit => self.sign_weight(),
        }
    }

    /// Signed weights of one variable's qubits in canonical order.
    pub fn weights(&self) -> Vec<f64> {
        self.roles().into_iter().map(|r| self.role_weight(r)).collect()
    }

    pub fn labels(&self) -> Vec<QubitLabel> {
        let roles = self.roles();
        let per = roles.len();
        (0..self.n_vars)
            .flat_map(|var| {
                roles.iter().enumerate().map(move |(k, &role)| QubitLabel {
                    var,
                    role,
                    flat: var * per + k,
                })
            })
            .collect()
    }

    /// Flat index range of one variable's qubits.
    pub fn var_range(&self, var: usize) -> std::ops::Range<usize> {
        let per = self.qubits_per_var();
        var * per..(var + 1) * per
    }

    /// Smallest and largest decodable value of one variable.
    pub fn value_range(&self) -> (f64, f64) {
        let top = pow2(self.hi + 1) - pow2(self.lo);
        match self.kind {
            EncodingKind::SignedPair => (-top, top),
            EncodingKind::OffsetBinary => (self.sign_weight(), top),
        }
    }
}

/// `2^l` computed exactly.
pub fn pow2(l: i32) -> f64 {
    2f64.powi(l)
}

/// Qubit values, one `0`/`1` byte per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidParams(format!("bit {pos} is not 0 or 1")));
        }
        Ok(Assignment(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![0; n])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Assignment(bits.iter().map(|&b| u8::from(b)).collect())
    }

    /// The assignment whose bit `i` is bit `i` of `index` (bit 0 = qubit 0).
    pub fn from_index(index: u64, n: usize) -> Self {
        Assignment((0..n).map(|i| ((index >> i) & 1) as u8).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}

impl From<Vec<u8>> for Assignment {
    fn from(bits: Vec<u8>) -> Self {
        Assignment::new(bits).expect("assignment bits must be 0 or 1")
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

fn check_len(spec: &EncodingSpec, a: &Assignment) -> Result<()> {
    if a.len() != spec.total_qubits() {
        return Err(Error::LengthMismatch {
            expected: spec.total_qubits(),
            found: a.len(),
        });
    }
    Ok(())
}

fn decode_pattern(weights: &[f64], bits: &[u8]) -> f64 {
    weights
        .iter()
        .zip(bits)
        .filter(|(_, &b)| b == 1)
        .map(|(w, _)| w)
        .sum()
}

/// Decodes every variable. Signed-pair assignments with both a positive and
/// a negative digit set are decoded arithmetically, not rejected.
pub fn decode(spec: &EncodingSpec, a: &Assignment) -> Result<Vec<f64>> {
    check_len(spec, a)?;
    let weights = spec.weights();
    let per = weights.len();
    Ok(a.bits()
        .chunks(per)
        .map(|chunk| decode_pattern(&weights, chunk))
        .collect())
}

/// True iff some variable has a positive digit and a negative digit set at
/// the same time.
pub fn violates_pair_constraint(spec: &EncodingSpec, a: &Assignment) -> Result<bool> {
    if spec.kind != EncodingKind::SignedPair {
        return Err(Error::WrongEncoding {
            expected: "signed-pair",
        });
    }
    check_len(spec, a)?;
    let d = spec.digits();
    Ok(a.bits().chunks(2 * d).any(|chunk| {
        let (pos, neg) = chunk.split_at(d);
        pos.contains(&1) && neg.contains(&1)
    }))
}

/// All per-variable bit patterns that decode exactly to `value`, in
/// lexicographic order (first qubit most significant).
///
/// Signed-pair patterns with cancelling digits are included when they decode
/// to `value`.
pub fn representations_of(spec: &EncodingSpec, value: f64, var: usize) -> Result<Vec<Vec<u8>>> {
    if var >= spec.n_vars {
        return Err(Error::InvalidParams(format!(
            "variable {var} out of range for {} variables",
            spec.n_vars
        )));
    }
    let weights = spec.weights();
    let k = weights.len();
    if k > ENUMERATION_BITS {
        return Err(Error::InvalidParams(format!(
            "{k} qubits per variable exceeds the enumeration limit of {ENUMERATION_BITS}"
        )));
    }
    let (min, max) = spec.value_range();
    if !(min..=max).contains(&value) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    // Qubit 0 is the most significant bit of `code`, so counting up yields
    // patterns in lexicographic order.
    for code in 0..(1u64 << k) {
        let bits: Vec<u8> = (0..k).map(|i| ((code >> (k - 1 - i)) & 1) as u8).collect();
        if decode_pattern(&weights, &bits) == value {
            out.push(bits);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_counts() {
        let sp = EncodingSpec::signed_pair(0, 2, 2).unwrap();
        assert_eq!(sp.qubits_per_var(), 6);
        assert_eq!(sp.total_qubits(), 12);
        let ob = EncodingSpec::offset_binary(0, 2, 2).unwrap();
        assert_eq!(ob.qubits_per_var(), 4);
        assert_eq!(ob.total_qubits(), 8);
        assert!(EncodingSpec::signed_pair(3, 2, 1).is_err());
        assert!(EncodingSpec::signed_pair(0, 2, 0).is_err());
    }

    #[test]
    fn worked_example_decoding() {
        let spec = EncodingSpec::signed_pair(0, 2, 2).unwrap();
        let a = Assignment::from(vec![0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0, 0]);
        assert_eq!(decode(&spec, &a).unwrap(), vec![-2.0, 5.0]);
        assert_eq!(decode(&spec, &Assignment::zeros(12)).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn offset_binary_sign_bit() {
        let spec = EncodingSpec::offset_binary(0, 1, 1).unwrap();
        assert_eq!(spec.sign_weight(), -4.0);
        let a = Assignment::from(vec![1, 1, 1]);
        assert_eq!(decode(&spec, &a).unwrap(), vec![-1.0]);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let spec = EncodingSpec::signed_pair(0, 2, 2).unwrap();
        let err = decode(&spec, &Assignment::zeros(11)).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 12, found: 11 }));
    }

    #[test]
    fn pair_constraint() {
        let spec = EncodingSpec::signed_pair(0, 2, 1).unwrap();
        let check = |bits: Vec<u8>| violates_pair_constraint(&spec, &Assignment::from(bits)).unwrap();
        assert!(check(vec![1, 0, 0, 0, 0, 1]));
        assert!(!check(vec![0, 0, 0, 0, 0, 0]));
        assert!(!check(vec![1, 1, 1, 0, 0, 0]));
        let ob = EncodingSpec::offset_binary(0, 2, 1).unwrap();
        assert!(matches!(
            violates_pair_constraint(&ob, &Assignment::zeros(4)),
            Err(Error::WrongEncoding { .. })
        ));
    }

    #[test]
    fn representation_sets_of_the_worked_solution() {
        let spec = EncodingSpec::signed_pair(0, 2, 2).unwrap();
        let minus_one = representations_of(&spec, -1.0, 0).unwrap();
        let mut expected: Vec<Vec<u8>> = vec![
            vec![0, 0, 0, 1, 0, 0],
            vec![0, 1, 0, 1, 1, 0],
            vec![0, 0, 1, 1, 0, 1],
            vec![0, 1, 1, 1, 1, 1],
            vec![1, 0, 0, 0, 1, 0],
            vec![1, 0, 1, 0, 1, 1],
            vec![1, 1, 0, 0, 0, 1],
        ];
        expected.sort();
        assert_eq!(minus_one, expected);

        let two = representations_of(&spec, 2.0, 1).unwrap();
        let mut expected: Vec<Vec<u8>> = vec![
            vec![0, 0, 1, 0, 1, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 1, 1, 0, 0, 1],
            vec![1, 0, 1, 1, 1, 0],
            vec![1, 1, 0, 1, 0, 0],
            vec![1, 1, 1, 1, 0, 1],
        ];
        expected.sort();
        assert_eq!(two, expected);

        assert!(representations_of(&spec, 100.0, 0).unwrap().is_empty());
    }

    #[test]
    fn labels_follow_canonical_order() {
        let spec = EncodingSpec::signed_pair(0, 2, 2).unwrap();
        let labels = spec.labels();
        assert_eq!(labels.len(), 12);
        assert_eq!(labels[0].role, QubitRole::PosDigit(0));
        assert_eq!(labels[3].role, QubitRole::NegDigit(0));
        assert_eq!(labels[6].var, 1);
        assert_eq!(labels[11].to_string(), "y2-2^2");
        let ob = EncodingSpec::offset_binary(-1, 0, 1).unwrap();
        assert_eq!(
            ob.roles(),
            vec![QubitRole::PosDigit(-1), QubitRole::PosDigit(0), QubitRole::SignBit]
        );
    }
}
