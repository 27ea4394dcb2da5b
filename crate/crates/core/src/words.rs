// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reduced words in the free group on `x0, x1, ...`.
//!
//! A [`Word`] is a sequence of syllables `x_i^k` with nonzero exponents and
//! no two adjacent syllables on the same generator. The empty word is the
//! identity and prints as `e`.
//!
//! The module also fixes an enumeration `w0, w1, ...` of all reduced words.
//! Words are graded by `weight = letter length + max index` (the identity has
//! weight 0). Every weight class is finite. Within a class, words are ordered
//! by letter length and then lexicographically on the letter codes
//! `x_i ↦ 2i`, `x_i^-1 ↦ 2i + 1`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::oracles::{GroupOracle, OracleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syllable {
    pub index: u64,
    pub exp: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    /// The generator `x_i`.
    pub fn generator(index: u64) -> Word {
        Word::power(index, 1)
    }

    pub fn power(index: u64, exp: i64) -> Word {
        Word::reduce([(index, exp)])
    }

    /// Free reduction of an arbitrary syllable sequence.
    pub fn reduce<I>(raw: I) -> Word
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        let mut stack: Vec<Syllable> = Vec::new();
        for (index, exp) in raw {
            push_syllable(&mut stack, index, exp);
        }
        Word { syllables: stack }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut stack = self.syllables.clone();
        for s in &other.syllables {
            push_syllable(&mut stack, s.index, s.exp);
        }
        Word { syllables: stack }
    }

    pub fn inv(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable {
                    index: s.index,
                    exp: s.exp.checked_neg().expect("exponent overflow"),
                })
                .collect(),
        }
    }

    /// `u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.mul(v).mul(&u.inv()).mul(&v.inv())
    }

    /// Number of letters, i.e. the sum of absolute exponents.
    pub fn letter_len(&self) -> u64 {
        self.syllables.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.syllables.iter().map(|s| s.index).max()
    }

    pub fn weight(&self) -> u64 {
        self.letter_len() + self.max_index().unwrap_or(0)
    }

    /// The word as a sequence of letter codes (`x_i ↦ 2i`, `x_i^-1 ↦ 2i+1`).
    pub fn letter_codes(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.letter_len() as usize);
        for s in &self.syllables {
            let code = 2 * s.index + u64::from(s.exp < 0);
            for _ in 0..s.exp.unsigned_abs() {
                out.push(code);
            }
        }
        out
    }

    pub fn from_letter_codes(codes: &[u64]) -> Word {
        Word::reduce(codes.iter().map(|&c| (c / 2, if c % 2 == 0 { 1 } else { -1 })))
    }

    /// Replace every letter `x_i` by `x_{f(i)}`.
    pub fn relabel(&self, f: impl Fn(u64) -> u64) -> Word {
        Word::reduce(self.syllables.iter().map(|s| (f(s.index), s.exp)))
    }

    /// Whether every letter has index `< n`.
    pub fn is_over(&self, n: u64) -> bool {
        self.max_index().is_none_or(|m| m < n)
    }
}

fn push_syllable(stack: &mut Vec<Syllable>, index: u64, exp: i64) {
    if exp == 0 {
        return;
    }
    match stack.last_mut() {
        Some(top) if top.index == index => {
            let merged = top.exp.checked_add(exp).expect("exponent overflow");
            if merged == 0 {
                stack.pop();
            } else {
                top.exp = merged;
            }
        }
        _ => stack.push(Syllable { index, exp }),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("e");
        }
        for (k, s) in self.syllables.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if s.exp == 1 {
                write!(f, "x{}", s.index)?;
            } else {
                write!(f, "x{}^{}", s.index, s.exp)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseWordError {
    #[error("empty word text (use `e` for the identity)")]
    Empty,
    #[error("malformed term `{0}`")]
    BadTerm(String),
}

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Word, ParseWordError> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(ParseWordError::Empty);
        }
        if text == "e" {
            return Ok(Word::identity());
        }
        let mut raw = Vec::new();
        for term in text.split('*') {
            raw.push(parse_term(term).ok_or_else(|| ParseWordError::BadTerm(term.to_string()))?);
        }
        Ok(Word::reduce(raw))
    }
}

fn parse_term(term: &str) -> Option<(u64, i64)> {
    let body = term.strip_prefix('x')?;
    let (idx, exp) = match body.split_once('^') {
        Some((i, e)) => (i, e),
        None => (body, "1"),
    };
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let exp_digits = exp.strip_prefix(['+', '-']).unwrap_or(exp);
    if exp_digits.is_empty() || !exp_digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((idx.parse().ok()?, exp.parse().ok()?))
}

// ---------------------------------------------------------------------------
// Enumeration

/// The canonical enumeration of reduced words, optionally restricted to words
/// over `x0 .. x_{n-1}` (used to code the free group `F_n` by naturals).
///
/// The restricted enumeration lists the same words in the same relative order
/// as the full one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enumeration {
    /// `Some(n)`: only indices `< n` occur.
    rank: Option<u64>,
}

impl Enumeration {
    pub const FULL: Enumeration = Enumeration { rank: None };

    pub fn restricted(n: u64) -> Enumeration {
        assert!(n >= 1, "restricted enumeration needs at least one generator");
        Enumeration { rank: Some(n) }
    }

    /// Letter lengths occurring in weight class `w >= 1`, ascending.
    fn lengths(&self, weight: u64) -> std::ops::RangeInclusive<u64> {
        let lo = match self.rank {
            Some(n) => weight.saturating_sub(n - 1).max(1),
            None => 1,
        };
        lo..=weight
    }

    /// Number of words of weight `w`.
    fn weight_count(&self, weight: u64) -> Option<u128> {
        if weight == 0 {
            return Some(1);
        }
        self.lengths(weight)
            .try_fold(0u128, |acc, len| acc.checked_add(class_count(len, weight - len)?))
    }

    /// The `k`-th word.
    pub fn word(&self, k: u64) -> Word {
        if k == 0 {
            return Word::identity();
        }
        let mut rest = u128::from(k) - 1;
        let mut weight = 1;
        loop {
            let size = self.weight_count(weight).expect("weight class count overflow");
            if rest < size {
                break;
            }
            rest -= size;
            weight += 1;
        }
        for len in self.lengths(weight) {
            let max = weight - len;
            let size = class_count(len, max).expect("class count overflow");
            if rest < size {
                return unrank(len, max, rest);
            }
            rest -= size;
        }
        unreachable!("rank fell outside its weight class")
    }

    /// Position of `w`, or `None` if it does not fit in `u64` (or `w` uses an
    /// index outside a restricted enumeration).
    pub fn try_index(&self, w: &Word) -> Option<u64> {
        if w.is_identity() {
            return Some(0);
        }
        let max = w.max_index().unwrap_or(0);
        if let Some(n) = self.rank {
            if max >= n {
                return None;
            }
        }
        let len = w.letter_len();
        let weight = len.checked_add(max)?;
        let mut idx: u128 = 1;
        for v in 1..weight {
            idx = idx.checked_add(self.weight_count(v)?)?;
        }
        for l in self.lengths(weight) {
            if l == len {
                break;
            }
            idx = idx.checked_add(class_count(l, weight - l)?)?;
        }
        idx = idx.checked_add(lex_rank(&w.letter_codes(), max)?)?;
        u64::try_from(idx).ok()
    }

    /// Position of `w`. Panics if the index exceeds `u64`.
    pub fn index(&self, w: &Word) -> u64 {
        self.try_index(w)
            .unwrap_or_else(|| panic!("word {w} has no u64 index in this enumeration"))
    }
}

/// `enumerate(k)`: the `k`-th reduced word.
pub fn enumerate(k: u64) -> Word {
    Enumeration::FULL.word(k)
}

/// `index_of(w)`: the inverse of [`enumerate`]. Panics beyond `u64`.
pub fn index_of(w: &Word) -> u64 {
    Enumeration::FULL.index(w)
}

/// Reduced continuations of length `r` over letter codes `[0, alphabet)`
/// following `last`.
fn free_count(r: u64, alphabet: u64, last: Option<u64>) -> Option<u128> {
    if r == 0 {
        return Some(1);
    }
    let a = u128::from(alphabet);
    if a == 0 {
        return Some(0);
    }
    let blocked_first = matches!(last, Some(l) if (l ^ 1) < alphabet);
    let rest = (a - 1).checked_pow(u32::try_from(r - 1).ok()?)?;
    if blocked_first {
        (a - 1).checked_mul(rest)
    } else {
        a.checked_mul(rest)
    }
}

/// Continuations of length `r` in class "max index exactly `max`", given the
/// prefix already uses index `max` or not.
fn completions(r: u64, max: u64, last: Option<u64>, has_max: bool) -> Option<u128> {
    let all = free_count(r, 2 * max + 2, last)?;
    if has_max {
        Some(all)
    } else {
        Some(all - free_count(r, 2 * max, last)?)
    }
}

fn class_count(len: u64, max: u64) -> Option<u128> {
    completions(len, max, None, false)
}

fn unrank(len: u64, max: u64, mut rank: u128) -> Word {
    let mut codes = Vec::with_capacity(len as usize);
    let mut has_max = false;
    for pos in 0..len {
        let last = codes.last().copied();
        let mut chosen = None;
        for c in 0..2 * max + 2 {
            if matches!(last, Some(l) if c == l ^ 1) {
                continue;
            }
            let hm = has_max || c >= 2 * max;
            let cnt = completions(len - pos - 1, max, Some(c), hm).expect("count overflow");
            if rank < cnt {
                chosen = Some((c, hm));
                break;
            }
            rank -= cnt;
        }
        let (c, hm) = chosen.expect("rank out of class");
        codes.push(c);
        has_max = hm;
    }
    Word::from_letter_codes(&codes)
}

fn lex_rank(codes: &[u64], max: u64) -> Option<u128> {
    let len = codes.len() as u64;
    let mut rank: u128 = 0;
    let mut has_max = false;
    for (pos, &actual) in codes.iter().enumerate() {
        let last = if pos == 0 { None } else { Some(codes[pos - 1]) };
        for c in 0..actual {
            if matches!(last, Some(l) if c == l ^ 1) {
                continue;
            }
            let hm = has_max || c >= 2 * max;
            rank = rank.checked_add(completions(len - pos as u64 - 1, max, Some(c), hm)?)?;
        }
        has_max = has_max || actual >= 2 * max;
    }
    Some(rank)
}

// ---------------------------------------------------------------------------
// Evaluation

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("no value assigned to generator x{0}")]
    MissingAssignment(u64),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Image of `w` under the homomorphism extending `x_i ↦ assignment(i)`.
pub fn evaluate<F>(w: &Word, assignment: F, group: &GroupOracle) -> Result<u64, EvalError>
where
    F: Fn(u64) -> Option<u64>,
{
    let mut acc = group.identity()?;
    for s in w.syllables() {
        let a = assignment(s.index).ok_or(EvalError::MissingAssignment(s.index))?;
        let p = group.pow(a, s.exp)?;
        acc = group.mul(acc, p);
    }
    Ok(acc)
}

/// [`evaluate`] with a finite table.
pub fn evaluate_map(w: &Word, assignment: &HashMap<u64, u64>, group: &GroupOracle) -> Result<u64, EvalError> {
    evaluate(w, |i| assignment.get(&i).copied(), group)
}
