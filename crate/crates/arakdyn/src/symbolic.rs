//! Alphabets, admissible words and subshifts of finite type.
//!
//! A subshift is specified by an alphabet with a fixed-point-free pairing
//! involution (letter ↦ inverse letter) together with a 0/1 transition
//! matrix on letters. The free-group shift on 2g letters and the oriented
//! edge shifts of finite graphs are both produced in this form.

use crate::exact::{divisors, moebius, Int};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("free-group rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("alphabet pairing must be a fixed-point-free involution")]
    BadPairing,
    #[error("letter identifiers must be unique")]
    DuplicateLetter,
    #[error("transition matrix must be square of the alphabet size with 0/1 entries")]
    BadMatrix,
    #[error("word enumeration would produce {needed} words, over the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("word contains inadmissible pair at position {0}")]
    Inadmissible(usize),
    #[error("operation requires a cyclic word")]
    NotCyclic,
    #[error("letter index {0} out of range")]
    LetterRange(usize),
    #[error("orbit count must be integral; non-integral value signals a bug")]
    IntegralityViolation,
}

/// Default cap on explicit word enumeration, overridable through the
/// `ARAKDYN_BUDGET` environment variable.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

pub fn enumeration_budget() -> u64 {
    std::env::var("ARAKDYN_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

/// An ordered alphabet with an involutive pairing `i ↦ ī`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    letters: Vec<String>,
    pairing: Vec<usize>,
}

impl Alphabet {
    pub fn new(letters: Vec<String>, pairing: Vec<usize>) -> Result<Self, SymbolicError> {
        let n = letters.len();
        if pairing.len() != n {
            return Err(SymbolicError::BadPairing);
        }
        for (i, &j) in pairing.iter().enumerate() {
            if j >= n || j == i || pairing[j] != i {
                return Err(SymbolicError::BadPairing);
            }
        }
        let mut sorted = letters.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(SymbolicError::DuplicateLetter);
        }
        Ok(Self { letters, pairing })
    }

    /// Generators `g1..gg` followed by their inverses `G1..Gg`
    /// (capital letter = inverse), paired by `i ↦ i+g mod 2g`.
    pub fn free_group(g: usize) -> Self {
        let mut letters = Vec::with_capacity(2 * g);
        for i in 1..=g {
            letters.push(format!("g{i}"));
        }
        for i in 1..=g {
            letters.push(format!("G{i}"));
        }
        let pairing = (0..2 * g).map(|i| (i + g) % (2 * g)).collect();
        Self { letters, pairing }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.letters[i]
    }

    pub fn names(&self) -> &[String] {
        &self.letters
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.pairing[i]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == name)
    }
}

/// How a spec was produced; used to select the applicable rank formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecKind {
    /// Reduced-word shift of a rank-g free group.
    FreeGroup { g: usize },
    /// Oriented-edge walk shift of a finite graph, or hand-built.
    General,
}

/// A subshift of finite type: alphabet plus 0/1 transition matrix.
///
/// Serializes flat as `{ "letters": [...], "pairing": [...], "A": [[...]] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecWire", into = "SpecWire")]
pub struct SubshiftSpec {
    alphabet: Alphabet,
    matrix: Vec<Vec<u8>>,
    kind: SpecKind,
}

#[derive(Serialize, Deserialize)]
struct SpecWire {
    letters: Vec<String>,
    pairing: Vec<usize>,
    #[serde(rename = "A")]
    matrix: Vec<Vec<u8>>,
}

impl From<SubshiftSpec> for SpecWire {
    fn from(s: SubshiftSpec) -> Self {
        SpecWire {
            letters: s.alphabet.letters,
            pairing: s.alphabet.pairing,
            matrix: s.matrix,
        }
    }
}

impl TryFrom<SpecWire> for SubshiftSpec {
    type Error = SymbolicError;
    fn try_from(w: SpecWire) -> Result<Self, SymbolicError> {
        let alphabet = Alphabet::new(w.letters, w.pairing)?;
        SubshiftSpec::new(alphabet, w.matrix)
    }
}

impl SubshiftSpec {
    pub fn new(alphabet: Alphabet, matrix: Vec<Vec<u8>>) -> Result<Self, SymbolicError> {
        Self::with_kind(alphabet, matrix, SpecKind::General)
    }

    pub fn with_kind(
        alphabet: Alphabet,
        matrix: Vec<Vec<u8>>,
        kind: SpecKind,
    ) -> Result<Self, SymbolicError> {
        let n = alphabet.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(SymbolicError::BadMatrix);
        }
        if matrix.iter().flatten().any(|&e| e > 1) {
            return Err(SymbolicError::BadMatrix);
        }
        Ok(Self {
            alphabet,
            matrix,
            kind,
        })
    }

    /// The reduced-word shift on 2g letters: `A_ij = 1` iff `|i-j| ≠ g`
    /// in 1-based indexing, equivalently `j ≠ ī`.
    pub fn free_group(g: usize) -> Result<Self, SymbolicError> {
        if g < 2 {
            return Err(SymbolicError::RankTooSmall(g));
        }
        let alphabet = Alphabet::free_group(g);
        let n = 2 * g;
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (a, b) = ((i + 1) as i64, (j + 1) as i64);
                        u8::from((a - b).abs() != g as i64)
                    })
                    .collect()
            })
            .collect();
        Self::with_kind(alphabet, matrix, SpecKind::FreeGroup { g })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> SpecKind {
        self.kind
    }

    pub fn free_group_rank(&self) -> Option<usize> {
        match self.kind {
            SpecKind::FreeGroup { g } => Some(g),
            SpecKind::General => None,
        }
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn matrix(&self) -> &Vec<Vec<u8>> {
        &self.matrix
    }

    pub fn admissible(&self, i: usize, j: usize) -> bool {
        self.matrix[i][j] == 1
    }

    /// Matrix entry in the 1-based indexing used for human-facing tables.
    pub fn entry_one_based(&self, i: usize, j: usize) -> u8 {
        self.matrix[i - 1][j - 1]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.matrix[i].iter().map(|&e| e as usize).sum()
    }

    /// Common out-degree of all letters, if there is one.
    pub fn constant_out_degree(&self) -> Option<usize> {
        let d = self.out_degree(0);
        (0..self.size())
            .all(|i| self.out_degree(i) == d)
            .then_some(d)
    }

    fn matrix_big(&self) -> Vec<Vec<Int>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|&e| Int::from(e)).collect())
            .collect()
    }

    /// A^power with exact integer entries.
    pub fn matrix_power(&self, power: usize) -> Vec<Vec<Int>> {
        let n = self.size();
        let mut acc: Vec<Vec<Int>> = (0..n)
            .map(|i| (0..n).map(|j| Int::from(u8::from(i == j))).collect())
            .collect();
        let base = self.matrix_big();
        for _ in 0..power {
            acc = mat_mul(&acc, &base);
        }
        acc
    }

    pub fn trace_power(&self, power: usize) -> Int {
        let m = self.matrix_power(power);
        (0..self.size()).map(|i| m[i][i].clone()).sum()
    }

    /// Number of admissible words: `Σ_ij (A^{len-1})_ij` for linear words,
    /// `tr A^len` for cyclic ones. `len = 0` counts the empty word once.
    pub fn count_words(&self, len: usize, cyclic: bool) -> Int {
        if len == 0 {
            return Int::one();
        }
        if cyclic {
            self.trace_power(len)
        } else {
            let m = self.matrix_power(len - 1);
            m.iter().flatten().sum()
        }
    }

    /// All admissible words of the given length in lexicographic order.
    pub fn enumerate_words(
        &self,
        len: usize,
        cyclic: bool,
        budget: u64,
    ) -> Result<Vec<Word>, SymbolicError> {
        assert!(len >= 1, "word length must be positive");
        let predicted = self.count_words(len, false);
        if predicted > Int::from(budget) {
            let needed: u128 = predicted.to_string().parse().unwrap_or(u128::MAX);
            return Err(SymbolicError::BudgetExceeded { needed, budget });
        }
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::with_capacity(len);
        self.enumerate_rec(len, cyclic, &mut stack, &mut out);
        Ok(out)
    }

    fn enumerate_rec(&self, len: usize, cyclic: bool, stack: &mut Vec<usize>, out: &mut Vec<Word>) {
        if stack.len() == len {
            if !cyclic || self.admissible(stack[len - 1], stack[0]) {
                out.push(Word {
                    letters: stack.clone(),
                    cyclic,
                });
            }
            return;
        }
        for a in 0..self.size() {
            if let Some(&last) = stack.last() {
                if !self.admissible(last, a) {
                    continue;
                }
            }
            stack.push(a);
            self.enumerate_rec(len, cyclic, stack, out);
            stack.pop();
        }
    }

    /// Number of aperiodic periodic orbits of period exactly N:
    /// `(1/N) Σ_{d|N} μ(d) tr A^{N/d}`. Exactness of the division is asserted.
    pub fn periodic_orbit_count(&self, n: u64) -> Result<Int, SymbolicError> {
        assert!(n >= 1);
        let mut total = Int::zero();
        for d in divisors(n) {
            let mu = moebius(d);
            if mu == 0 {
                continue;
            }
            total += Int::from(mu) * self.trace_power((n / d) as usize);
        }
        let nn = Int::from(n);
        if (&total % &nn) != Int::zero() {
            return Err(SymbolicError::IntegralityViolation);
        }
        Ok(total / nn)
    }

    pub fn validate_word(&self, letters: &[usize], cyclic: bool) -> Result<(), SymbolicError> {
        if letters.is_empty() {
            return Err(SymbolicError::Inadmissible(0));
        }
        for (pos, &a) in letters.iter().enumerate() {
            if a >= self.size() {
                return Err(SymbolicError::LetterRange(a));
            }
            if pos + 1 < letters.len() && !self.admissible(a, letters[pos + 1]) {
                return Err(SymbolicError::Inadmissible(pos));
            }
        }
        if cyclic && !letters.is_empty() {
            let last = letters[letters.len() - 1];
            if !self.admissible(last, letters[0]) {
                return Err(SymbolicError::Inadmissible(letters.len() - 1));
            }
        }
        Ok(())
    }

    pub fn word(&self, letters: Vec<usize>, cyclic: bool) -> Result<Word, SymbolicError> {
        self.validate_word(&letters, cyclic)?;
        Ok(Word { letters, cyclic })
    }

    pub fn word_from_names(&self, names: &[&str], cyclic: bool) -> Result<Word, SymbolicError> {
        let letters = names
            .iter()
            .map(|n| {
                self.alphabet
                    .index_of(n)
                    .ok_or(SymbolicError::LetterRange(usize::MAX))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.word(letters, cyclic)
    }
}

fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = a.len();
    let mut out = vec![vec![Int::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    let add = &a[i][k] * &b[k][j];
                    out[i][j] += add;
                }
            }
        }
    }
    out
}

/// A finite admissible word; cyclic words additionally satisfy the
/// wrap-around admissibility condition and stand for one period of a
/// two-sided periodic sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<usize>,
    cyclic: bool,
}

impl Word {
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letter of the periodic extension at an arbitrary integer index.
    pub fn letter_mod(&self, idx: i64) -> usize {
        let n = self.letters.len() as i64;
        self.letters[(((idx % n) + n) % n) as usize]
    }

    /// Apply the shift `(Tw)_k = w_{k+1}` k times (negative k shifts back).
    /// Only defined for cyclic words, where one period determines the orbit.
    pub fn shifted(&self, k: i64) -> Result<Word, SymbolicError> {
        if !self.cyclic {
            return Err(SymbolicError::NotCyclic);
        }
        let n = self.letters.len();
        let letters = (0..n).map(|i| self.letter_mod(i as i64 + k)).collect();
        Ok(Word {
            letters,
            cyclic: true,
        })
    }

    /// Lexicographically minimal rotation; canonical label of the shift
    /// orbit (equivalently, of the closed geodesic the orbit traces out).
    pub fn minimal_rotation(&self) -> Word {
        let n = self.letters.len();
        let mut best = self.letters.clone();
        for k in 1..n {
            let cand: Vec<usize> = (0..n).map(|i| self.letters[(i + k) % n]).collect();
            if cand < best {
                best = cand;
            }
        }
        Word {
            letters: best,
            cyclic: self.cyclic,
        }
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        self.letters
            .iter()
            .map(|&i| alphabet.name(i).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
