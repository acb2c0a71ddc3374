//! Signed Pauli words and their multiplication.
//!
//! A word with bit vectors `x`, `z` and sign `s` denotes the Hermitian
//! operator `s * i^|x & z| * X^x Z^z`, so a qubit with both bits set
//! carries `Y = iXZ`. Multiplication uses the exponent rule
//!
//! ```text
//! k = 2[s1 = -1] + |x1 & z1| + 2[s2 = -1] + |x2 & z2| + 2|z1 & x2|   (mod 4)
//! ```
//!
//! and the product's sign is `i^(k - |x & z|)`. An odd exponent means the
//! product is not Hermitian and is rejected.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("product has imaginary phase (operands anticommute)")]
    ImaginaryPhase,
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("cannot parse Pauli string {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    x: BitVec,
    z: BitVec,
    negative: bool,
}

impl PauliWord {
    pub fn new(x: BitVec, z: BitVec, negative: bool) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::LengthMismatch { left: x.len(), right: z.len() });
        }
        Ok(PauliWord { x, z, negative })
    }

    pub fn identity(n: usize) -> Self {
        PauliWord { x: BitVec::zeros(n), z: BitVec::zeros(n), negative: false }
    }

    pub fn x_string<I: IntoIterator<Item = usize>>(n: usize, qubits: I) -> Self {
        PauliWord { x: BitVec::from_indices(n, qubits), z: BitVec::zeros(n), negative: false }
    }

    pub fn z_string<I: IntoIterator<Item = usize>>(n: usize, qubits: I) -> Self {
        PauliWord { x: BitVec::zeros(n), z: BitVec::from_indices(n, qubits), negative: false }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut w = Self::identity(n);
        w.set(qubit, p);
        w
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// +1 or -1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(&self) -> Self {
        let mut w = self.clone();
        w.negative = !w.negative;
        w
    }

    pub fn get(&self, q: usize) -> Pauli {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Overwrites the factor on qubit `q`; the sign is left as is.
    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = match p {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        };
        self.x.set(q, x);
        self.z.set(q, z);
    }

    /// True when all bits are zero (either sign).
    pub fn is_identity_up_to_sign(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn support(&self) -> BitVec {
        self.x.or(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    /// Bits `(x | z)` as one row of length `2n`, x half first.
    pub fn symplectic_row(&self) -> BitVec {
        let n = self.n();
        let mut row = self.x.extended(2 * n);
        for q in self.z.iter_ones() {
            row.set(n + q, true);
        }
        row
    }

    pub fn from_symplectic_row(row: &BitVec, negative: bool) -> Self {
        let n = row.len() / 2;
        let idx: Vec<usize> = (0..n).collect();
        let zidx: Vec<usize> = (n..2 * n).collect();
        PauliWord { x: row.gather(&idx), z: row.gather(&zidx), negative }
    }

    /// True iff the two words anticommute.
    pub fn anticommutes(&self, other: &PauliWord) -> bool {
        debug_assert_eq!(self.n(), other.n());
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)) % 2 == 1
    }

    /// Same word on `new_n >= n` qubits, identity on the added ones.
    pub fn extended(&self, new_n: usize) -> Self {
        PauliWord { x: self.x.extended(new_n), z: self.z.extended(new_n), negative: self.negative }
    }

    /// Word on `qubits.len()` qubits: new qubit `i` carries old qubit `qubits[i]`.
    pub fn restricted(&self, qubits: &[usize]) -> Self {
        PauliWord { x: self.x.gather(qubits), z: self.z.gather(qubits), negative: self.negative }
    }

    /// Moves old qubit `q` to `map[q]` on `new_n` qubits.
    pub fn relabeled(&self, map: &[usize], new_n: usize) -> Self {
        assert_eq!(map.len(), self.n());
        let mut w = PauliWord::identity(new_n).with_sign(self.negative);
        for q in self.support().iter_ones() {
            w.set(map[q], self.get(q));
        }
        w
    }

    pub fn parse(text: &str, n: usize) -> Result<Self, PauliError> {
        let err = |reason: &str| PauliError::Parse { text: text.to_string(), reason: reason.to_string() };
        let t = text.trim();
        let (negative, body) = if let Some(rest) = t.strip_prefix('+') {
            (false, rest)
        } else if let Some(rest) = t.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = t.strip_prefix('\u{2212}') {
            (true, rest)
        } else {
            return Err(err("missing sign prefix"));
        };
        let mut w = PauliWord::identity(n).with_sign(negative);
        if body == "I" {
            return Ok(w);
        }
        if body.is_empty() {
            return Err(err("empty body"));
        }
        let bytes = body.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let p = match bytes[i] {
                b'X' => Pauli::X,
                b'Y' => Pauli::Y,
                b'Z' => Pauli::Z,
                _ => return Err(err("expected X, Y or Z")),
            };
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let k: usize = body[start..i].parse().map_err(|_| err("missing qubit index"))?;
            if k == 0 {
                return Err(err("qubit indices are 1-based"));
            }
            if k > n {
                return Err(PauliError::QubitOutOfRange { qubit: k, n });
            }
            if w.get(k - 1) != Pauli::I {
                return Err(err("repeated qubit"));
            }
            w.set(k - 1, p);
        }
        Ok(w)
    }
}

/// Returns 0 when `p` and `q` commute and 1 when they anticommute.
pub fn symplectic_product(p: &PauliWord, q: &PauliWord) -> Result<u8, PauliError> {
    if p.n() != q.n() {
        return Err(PauliError::LengthMismatch { left: p.n(), right: q.n() });
    }
    Ok(p.anticommutes(q) as u8)
}

/// Product `p * q` with exact sign.
pub fn pauli_multiply(p: &PauliWord, q: &PauliWord) -> Result<PauliWord, PauliError> {
    if p.n() != q.n() {
        return Err(PauliError::LengthMismatch { left: p.n(), right: q.n() });
    }
    PhasedPauli::from_word(p).mul(&PhasedPauli::from_word(q)).to_word()
}

/// `i^k X^x Z^z` with an unrestricted phase; used for intermediate products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PhasedPauli {
    pub x: BitVec,
    pub z: BitVec,
    pub k: u8,
}

impl PhasedPauli {
    pub fn identity(n: usize) -> Self {
        PhasedPauli { x: BitVec::zeros(n), z: BitVec::zeros(n), k: 0 }
    }

    pub fn from_word(w: &PauliWord) -> Self {
        let k = (2 * w.negative as usize + w.x.and_count(&w.z)) % 4;
        PhasedPauli { x: w.x.clone(), z: w.z.clone(), k: k as u8 }
    }

    pub fn mul(&self, other: &PhasedPauli) -> PhasedPauli {
        let k = self.k as usize + other.k as usize + 2 * self.z.and_count(&other.x);
        PhasedPauli { x: self.x.xor(&other.x), z: self.z.xor(&other.z), k: (k % 4) as u8 }
    }

    pub fn mul_assign(&mut self, other: &PhasedPauli) {
        let k = self.k as usize + other.k as usize + 2 * self.z.and_count(&other.x);
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        self.k = (k % 4) as u8;
    }

    pub fn to_word(&self) -> Result<PauliWord, PauliError> {
        let y = self.x.and_count(&self.z);
        match (self.k as usize + 4 - y % 4) % 4 {
            0 => Ok(PauliWord { x: self.x.clone(), z: self.z.clone(), negative: false }),
            2 => Ok(PauliWord { x: self.x.clone(), z: self.z.clone(), negative: true }),
            _ => Err(PauliError::ImaginaryPhase),
        }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        let support = self.support();
        if support.is_zero() {
            return f.write_str("I");
        }
        for q in support.iter_ones() {
            let c = match self.get(q) {
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
                Pauli::I => unreachable!(),
            };
            write!(f, "{c}{}", q + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.n())
    }
}

/// Parses a word whose length is the largest index mentioned.
///
/// Prefer [`PauliWord::parse`] when the qubit count is known.
impl FromStr for PauliWord {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.split(|c: char| !c.is_ascii_digit()).filter_map(|t| t.parse::<usize>().ok()).max().unwrap_or(0);
        PauliWord::parse(s, n)
    }
}
