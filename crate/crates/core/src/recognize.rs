//! Membership deciders for the Hammersley languages.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::process::Trajectory;
use crate::series::had_predecessors;
use crate::words::{dominant_letters, is_k_dominant, Alphabet, Letter, Word};

/// Membership in `L_H^k`, the set of words some HAD_k trajectory produces.
pub fn accept_dominant(w: &Word, k: Alphabet) -> Result<bool> {
    is_k_dominant(w, k)
}

/// Membership in the effective interval language: diamond-free words
/// obtained by erasing the diamonds of a reachable interval word.
pub fn accept_effective(w: &Word, k: Alphabet) -> Result<bool> {
    accept_dominant(w, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PdaStatus {
    Running,
    Rejected,
}

/// Stack height of the one-counter automaton above its bottom marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CounterConfig {
    pub counter: u64,
    pub status: PdaStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaRun {
    pub accepted: bool,
    /// Configuration after each consumed letter; stops at the rejecting letter.
    pub trace: Vec<CounterConfig>,
}

impl PdaRun {
    /// 1-based position of the letter that caused rejection.
    pub fn rejected_at(&self) -> Option<usize> {
        self.trace
            .iter()
            .position(|c| c.status == PdaStatus::Rejected)
            .map(|i| i + 1)
    }

    pub fn counters(&self) -> Vec<u64> {
        self.trace.iter().map(|c| c.counter).collect()
    }
}

/// The trace serializes as a plain array of counters.
impl Serialize for PdaRun {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.counters().serialize(serializer)
    }
}

/// Runs the deterministic one-counter automaton for `L_H^k`.
///
/// The first letter must be `k`. Every `k` pushes one star, every digit
/// `i <= k - 2` pops `k - i - 1` stars and `k - 1` leaves the stack alone.
/// The run rejects as soon as the counter reaches zero, so the stack keeps
/// at least one star after every prefix of an accepted word.
pub fn pda_run(w: &Word, k: Alphabet) -> Result<PdaRun> {
    k.validate_plain(w)?;
    let top = k.k();
    let mut counter = 0u64;
    let mut trace = Vec::with_capacity(w.len());
    for (i, letter) in w.iter().enumerate() {
        let d = letter.digit().unwrap_or(0);
        let ok = if i == 0 && d != top {
            false
        } else if d == top {
            counter += 1;
            true
        } else {
            let pop = u64::from(top - d - 1);
            counter = counter.saturating_sub(pop);
            counter > 0
        };
        if !ok {
            trace.push(CounterConfig {
                counter: if i == 0 { 0 } else { counter },
                status: PdaStatus::Rejected,
            });
            return Ok(PdaRun {
                accepted: false,
                trace,
            });
        }
        trace.push(CounterConfig {
            counter,
            status: PdaStatus::Running,
        });
    }
    Ok(PdaRun {
        accepted: counter >= 1,
        trace,
    })
}

/// Which condition of the interval-language characterization fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum IntervalViolation {
    /// The empty word is not a process state.
    Empty,
    /// Condition 1: diamonds must make up exactly half of the word.
    DiamondBalance { diamonds: usize, len: usize },
    /// Condition 2a: a prefix holds more diamonds than half its length.
    PrefixDiamonds { prefix_len: usize },
    /// Condition 2b: a prefix has `s(p) + (k+1)|p|_◇ < k|p|`.
    PrefixLives { prefix_len: usize },
}

impl IntervalViolation {
    pub fn label(&self) -> &'static str {
        match self {
            IntervalViolation::Empty => "empty",
            IntervalViolation::DiamondBalance { .. } => "1",
            IntervalViolation::PrefixDiamonds { .. } => "2a",
            IntervalViolation::PrefixLives { .. } => "2b",
        }
    }
}

/// First violated condition of the interval-language characterization, or
/// `None` for members.
pub fn interval_violation(w: &Word, k: Alphabet) -> Result<Option<IntervalViolation>> {
    k.validate(w)?;
    if w.is_empty() {
        return Ok(Some(IntervalViolation::Empty));
    }
    let diamonds = w.iter().filter(|l| l.is_diamond()).count();
    if 2 * diamonds != w.len() {
        return Ok(Some(IntervalViolation::DiamondBalance {
            diamonds,
            len: w.len(),
        }));
    }
    let kk = u64::from(k.k());
    let (mut sum, mut dia) = (0u64, 0u64);
    for (i, l) in w.iter().enumerate() {
        let len = i as u64 + 1;
        match l {
            Letter::Diamond => dia += 1,
            Letter::Digit(d) => sum += u64::from(d),
        }
        if 2 * dia > len {
            return Ok(Some(IntervalViolation::PrefixDiamonds {
                prefix_len: i + 1,
            }));
        }
        if sum + (kk + 1) * dia < kk * len {
            return Ok(Some(IntervalViolation::PrefixLives { prefix_len: i + 1 }));
        }
    }
    Ok(None)
}

/// Membership in `L_{H,INT}^k`, the words the interval process produces.
pub fn accept_interval(w: &Word, k: Alphabet) -> Result<bool> {
    Ok(interval_violation(w, k)?.is_none())
}

/// Parameters of a word `k^{c+d+e} ◇^{c+e} (k-1)^c ◇^{c+d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SkDecomposition {
    pub c: usize,
    pub d: usize,
    pub e: usize,
}

impl SkDecomposition {
    pub fn word(&self, k: Alphabet) -> Word {
        let SkDecomposition { c, d, e } = *self;
        let mut letters = Vec::with_capacity(4 * c + 2 * d + 2 * e);
        letters.extend(std::iter::repeat_n(k.top(), c + d + e));
        letters.extend(std::iter::repeat_n(Letter::Diamond, c + e));
        letters.extend(std::iter::repeat_n(Letter::Digit(k.k() - 1), c));
        letters.extend(std::iter::repeat_n(Letter::Diamond, c + d));
        Word::from_letters(letters)
    }
}

/// Block lengths `(α, β, γ, δ)` if `w` has the shape `k^α ◇^β (k-1)^γ ◇^δ`.
/// When `γ = 0` all diamonds are assigned to `β`.
pub fn sk_shape(w: &Word, k: Alphabet) -> Option<(usize, usize, usize, usize)> {
    let letters = w.letters();
    let blocks = [
        k.top(),
        Letter::Diamond,
        Letter::Digit(k.k() - 1),
        Letter::Diamond,
    ];
    let mut lens = [0usize; 4];
    let mut pos = 0;
    for (len, block) in lens.iter_mut().zip(blocks) {
        while pos < letters.len() && letters[pos] == block {
            *len += 1;
            pos += 1;
        }
    }
    (pos == letters.len()).then_some((lens[0], lens[1], lens[2], lens[3]))
}

/// Solves `α = c+d+e, β = c+e, γ = c, δ = c+d` over the naturals. The empty
/// word (`c = d = e = 0`) is excluded since it is not a process state.
pub fn sk_decompose(w: &Word, k: Alphabet) -> Option<SkDecomposition> {
    if w.is_empty() {
        return None;
    }
    let (alpha, beta, gamma, delta) = sk_shape(w, k)?;
    let c = gamma;
    let e = beta.checked_sub(gamma)?;
    let d = delta.checked_sub(gamma)?;
    (alpha == c + d + e).then_some(SkDecomposition { c, d, e })
}

/// A trajectory producing `w`, found by undoing one step at a time while
/// staying inside the dominant words.
pub fn witness_trajectory(w: &Word, k: Alphabet) -> Result<Trajectory> {
    if !accept_dominant(w, k)? {
        return Err(Error::NotDominant(w.to_string()));
    }
    let top = k.k();
    let mut gaps = Vec::with_capacity(w.len());
    let mut current = w.letters().to_vec();
    while current.len() > 1 {
        let (pred, gap) = had_predecessors(&current, top)
            .into_iter()
            .find(|(p, _)| dominant_letters(p, top))
            .expect("every dominant word longer than one letter has a dominant predecessor");
        gaps.push(gap);
        current = pred;
    }
    gaps.push(0);
    gaps.reverse();
    Trajectory::new(gaps)
}
