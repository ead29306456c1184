//! Alphabets, words and the combinatorial statistics computed on them.
//!
//! A state of either process is a [`Word`]: a finite sequence of life counts
//! `0..=k`, optionally interleaved with diamonds marking sampled positions that
//! did not receive a particle. In text form digits are written as `0`-`9` and
//! the diamond as `*` (`◇` is accepted when parsing).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of lives `k` given to every arriving particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Alphabet(u8);

impl Alphabet {
    pub fn new(k: u8) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self(k))
    }

    pub fn k(self) -> u8 {
        self.0
    }

    /// The letter carried by a freshly inserted particle.
    pub fn top(self) -> Letter {
        Letter::Digit(self.0)
    }

    /// Digits `0..=k`, in increasing order.
    pub fn digits(self) -> impl Iterator<Item = Letter> {
        (0..=self.0).map(Letter::Digit)
    }

    /// Rejects digits above `k`.
    pub fn validate(self, w: &Word) -> Result<()> {
        for (position, letter) in w.iter().enumerate() {
            if let Letter::Digit(d) = letter {
                if d > self.0 {
                    return Err(Error::DigitOutOfRange {
                        digit: d,
                        position,
                        k: self.0,
                    });
                }
            }
        }
        Ok(())
    }

    /// Rejects digits above `k` and any diamond.
    pub fn validate_plain(self, w: &Word) -> Result<()> {
        if let Some(position) = w.iter().position(|l| l.is_diamond()) {
            return Err(Error::UnexpectedDiamond { position });
        }
        self.validate(w)
    }
}

impl TryFrom<u8> for Alphabet {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        Self::new(k)
    }
}

impl From<Alphabet> for u8 {
    fn from(a: Alphabet) -> u8 {
        a.0
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Digit(u8),
    Diamond,
}

impl Letter {
    pub fn digit(self) -> Option<u8> {
        match self {
            Letter::Digit(d) => Some(d),
            Letter::Diamond => None,
        }
    }

    pub fn is_diamond(self) -> bool {
        self == Letter::Diamond
    }

    /// Digit value, with diamonds counting as zero.
    pub fn value(self) -> u64 {
        self.digit().map_or(0, u64::from)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::Digit(d) if d < 10 => write!(f, "{d}"),
            Letter::Digit(d) => write!(f, "({d})"),
            Letter::Diamond => f.write_str("*"),
        }
    }
}

/// A finite sequence of letters. The empty word is representable but never a
/// process state.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn from_digits(digits: &[u8]) -> Self {
        Self(digits.iter().copied().map(Letter::Digit).collect())
    }

    /// Parses the text form: `0`-`9` are digits, `*` and `◇` are diamonds.
    pub fn parse(text: &str) -> Result<Self> {
        text.chars()
            .enumerate()
            .map(|(position, ch)| match ch {
                '0'..='9' => Ok(Letter::Digit(ch as u8 - b'0')),
                '*' | '◇' => Ok(Letter::Diamond),
                _ => Err(Error::InvalidCharacter { ch, position }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Parses and checks the word against the alphabet.
    pub fn parse_in(text: &str, k: Alphabet) -> Result<Self> {
        let w = Self::parse(text)?;
        k.validate(&w)?;
        Ok(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_plain(&self) -> bool {
        self.0.iter().all(|l| !l.is_diamond())
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    /// Digit values of a plain word; `None` if a diamond is present.
    pub fn digits(&self) -> Option<Vec<u8>> {
        self.0.iter().map(|l| l.digit()).collect()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Self(letters)
    }
}

/// `|w|_a`: the number of occurrences of `a` in `w`.
pub fn letter_count(w: &Word, a: Letter) -> usize {
    w.iter().filter(|&l| l == a).count()
}

/// Contribution of a single digit to the structural difference: `+1` for `k`,
/// `-(k - i - 1)` for `i <= k - 2` and `0` for `k - 1`.
#[inline]
pub(crate) fn dominance_weight(digit: u8, k: u8) -> i64 {
    if digit == k {
        1
    } else {
        -(i64::from(k) - i64::from(digit) - 1)
    }
}

/// `|z|_k - sum_{i=0}^{k-2} (k-i-1) |z|_i`. For `k = 1` the sum is empty and
/// the result is `|z|_1`.
pub fn structural_difference(z: &Word, k: Alphabet) -> Result<i64> {
    k.validate_plain(z)?;
    Ok(z.iter()
        .filter_map(Letter::digit)
        .map(|d| dominance_weight(d, k.k()))
        .sum())
}

/// First non-empty prefix whose structural difference is not strictly
/// positive, as `(prefix length, difference)`.
pub fn failing_prefix(w: &Word, k: Alphabet) -> Result<Option<(usize, i64)>> {
    k.validate_plain(w)?;
    let mut diff = 0i64;
    for (i, l) in w.iter().enumerate() {
        diff += dominance_weight(l.digit().unwrap_or(0), k.k());
        if diff <= 0 {
            return Ok(Some((i + 1, diff)));
        }
    }
    Ok(None)
}

/// True iff every non-empty prefix has strictly positive structural
/// difference. The empty word is not dominant.
pub fn is_k_dominant(w: &Word, k: Alphabet) -> Result<bool> {
    if w.is_empty() {
        k.validate_plain(w)?;
        return Ok(false);
    }
    Ok(failing_prefix(w, k)?.is_none())
}

/// Unchecked dominance test on raw letters; the caller guarantees a plain
/// word with digits `<= k`.
pub(crate) fn dominant_letters(letters: &[Letter], k: u8) -> bool {
    if letters.is_empty() {
        return false;
    }
    let mut diff = 0i64;
    for l in letters {
        diff += dominance_weight(l.digit().unwrap_or(0), k);
        if diff <= 0 {
            return false;
        }
    }
    true
}

/// `s(w)`, the sum of the digits of `w`; diamonds contribute nothing.
pub fn digit_sum(w: &Word) -> u64 {
    w.iter().map(Letter::value).sum()
}

/// `1 +` the number of trailing zeros of a non-empty plain word.
pub fn increment_count(w: &Word) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if let Some(position) = w.iter().position(|l| l.is_diamond()) {
        return Err(Error::UnexpectedDiamond { position });
    }
    Ok(1 + trailing_zeros(w.letters()))
}

pub(crate) fn trailing_zeros(letters: &[Letter]) -> usize {
    letters
        .iter()
        .rev()
        .take_while(|&&l| l == Letter::Digit(0))
        .count()
}

pub fn delete_diamonds(w: &Word) -> Word {
    Word(w.iter().filter(|l| !l.is_diamond()).collect())
}

/// A dominant word whose full structural difference is exactly 1.
pub fn is_critical(w: &Word, k: Alphabet) -> Result<bool> {
    Ok(is_k_dominant(w, k)? && structural_difference(w, k)? == 1)
}

/// All k-dominant words of length `n`, in lexicographic order.
///
/// Dominance is prefix-closed, so the search prunes at the first failing
/// prefix.
pub fn dominant_words(n: usize, k: Alphabet) -> Vec<Word> {
    fn extend(prefix: &mut Vec<Letter>, diff: i64, n: usize, k: u8, out: &mut Vec<Word>) {
        if prefix.len() == n {
            out.push(Word(prefix.clone()));
            return;
        }
        for d in 0..=k {
            let next = diff + dominance_weight(d, k);
            if next > 0 {
                prefix.push(Letter::Digit(d));
                extend(prefix, next, n, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        extend(&mut Vec::with_capacity(n), 0, n, k.k(), &mut out);
    }
    out
}

/// Every word of length `n` over the given letters, in lexicographic order of
/// the letter slice.
pub fn all_words(n: usize, letters: &[Letter]) -> Vec<Word> {
    let mut out = vec![Word::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |&l| {
                    let mut next = w.clone();
                    next.push(l);
                    next
                })
            })
            .collect();
    }
    out
}

/// A word `1^{a_1} 0^{b_1} ... 1^{a_s} 0^{b_s}` over `{0, 1}` stored as its
/// run lengths, 1-based: `a_i >= 1`, `b_i >= 1` for `i < s`, `b_s >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RunLengthWord(Vec<(usize, usize)>);

impl RunLengthWord {
    pub fn new(runs: Vec<(usize, usize)>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::InvalidRunLength("no runs".into()));
        }
        let last = runs.len() - 1;
        for (i, &(a, b)) in runs.iter().enumerate() {
            if a == 0 {
                return Err(Error::InvalidRunLength(format!("a_{} = 0", i + 1)));
            }
            if b == 0 && i < last {
                return Err(Error::InvalidRunLength(format!(
                    "b_{} = 0 before the final run",
                    i + 1
                )));
            }
        }
        Ok(Self(runs))
    }

    pub fn runs(&self) -> &[(usize, usize)] {
        &self.0
    }

    /// Encodes a non-empty word over `{0, 1}` that starts with `1`.
    pub fn encode(w: &Word) -> Result<Self> {
        let digits = w.digits().ok_or_else(|| {
            Error::InvalidRunLength("diamonds cannot be run-length encoded".into())
        })?;
        if digits.first() != Some(&1) {
            return Err(Error::InvalidRunLength(
                "the word must be non-empty and start with 1".into(),
            ));
        }
        if let Some(position) = digits.iter().position(|&d| d > 1) {
            return Err(Error::InvalidRunLength(format!(
                "digit {} at position {position} is not binary",
                digits[position]
            )));
        }
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for d in digits {
            match (d, runs.last_mut()) {
                (1, Some(run)) if run.1 == 0 => run.0 += 1,
                (1, _) => runs.push((1, 0)),
                (_, Some(run)) => run.1 += 1,
                (_, None) => unreachable!("first digit is 1"),
            }
        }
        Ok(Self(runs))
    }

    pub fn decode(&self) -> Word {
        let mut letters = Vec::with_capacity(self.len());
        for &(a, b) in &self.0 {
            letters.extend(std::iter::repeat_n(Letter::Digit(1), a));
            letters.extend(std::iter::repeat_n(Letter::Digit(0), b));
        }
        Word(letters)
    }

    /// Length of the decoded word.
    pub fn len(&self) -> usize {
        self.0.iter().map(|(a, b)| a + b).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
