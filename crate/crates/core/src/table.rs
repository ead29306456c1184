//! Tables of exact per-word counts for a fixed `(k, n)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{decimal_string, factorial, interval_mass, ExactProbability};
use crate::words::{Alphabet, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Had,
    Interval,
}

impl ProcessKind {
    /// Total number of trajectories (ordered pick sequences for the interval
    /// process) after `n` steps.
    pub fn mass(self, n: usize) -> BigUint {
        match self {
            ProcessKind::Had => factorial(n),
            ProcessKind::Interval => interval_mass(n),
        }
    }
}

/// Exact multiplicities of every reachable word of length `n` (or `2n` for the
/// interval process).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTable {
    k: Alphabet,
    n: usize,
    process: ProcessKind,
    counts: BTreeMap<Word, BigUint>,
}

/// The brute-force enumeration produces the same shape of table.
pub type EnumerationTable = SeriesTable;

impl SeriesTable {
    pub(crate) fn new(
        k: Alphabet,
        n: usize,
        process: ProcessKind,
        counts: impl IntoIterator<Item = (Word, BigUint)>,
    ) -> Self {
        let counts = counts.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self {
            k,
            n,
            process,
            counts,
        }
    }

    pub fn k(&self) -> Alphabet {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn process(&self) -> ProcessKind {
        self.process
    }

    pub fn counts(&self) -> &BTreeMap<Word, BigUint> {
        &self.counts
    }

    pub fn get(&self, w: &Word) -> BigUint {
        self.counts.get(w).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Word> {
        self.counts.keys()
    }

    pub fn mass(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn expected_mass(&self) -> BigUint {
        self.process.mass(self.n)
    }

    pub fn probability(&self, w: &Word) -> ExactProbability {
        ExactProbability::from_counts(&self.get(w), &self.expected_mass())
    }

    /// Words present in exactly one of the two tables, or with different
    /// counts, as `(word, self count, other count)`.
    pub fn diff(&self, other: &SeriesTable) -> Vec<(Word, BigUint, BigUint)> {
        let mut words: Vec<&Word> = self.counts.keys().chain(other.counts.keys()).collect();
        words.sort();
        words.dedup();
        words
            .into_iter()
            .filter_map(|w| {
                let (a, b) = (self.get(w), other.get(w));
                (a != b).then(|| (w.clone(), a, b))
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TableJson::from(self)).expect("table serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: TableJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Memo(e.to_string()))?;
        let k = Alphabet::new(raw.k)?;
        let counts = raw
            .counts
            .into_iter()
            .map(|(w, c)| {
                let word = Word::parse_in(&w, k)?;
                let count = c
                    .parse::<BigUint>()
                    .map_err(|e| Error::Memo(format!("count for {w}: {e}")))?;
                Ok((word, count))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(k, raw.n, raw.process, counts))
    }

    /// `word,multiplicity,probability` rows; probabilities are decimals with
    /// six places.
    pub fn to_csv(&self) -> String {
        let mass = self.expected_mass();
        let mut out = String::from("word,multiplicity,probability\n");
        for (w, c) in &self.counts {
            let p = ExactProbability::from_counts(c, &mass);
            let _ = writeln!(out, "{w},{c},{}", decimal_string(p.as_ratio(), 6));
        }
        out
    }

    /// Exact probability mass function over words.
    pub fn probabilities(&self) -> impl Iterator<Item = (&Word, BigRational)> + '_ {
        let mass = self.expected_mass();
        self.counts
            .iter()
            .map(move |(w, c)| (w, ExactProbability::from_counts(c, &mass).into_ratio()))
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    k: u8,
    n: usize,
    process: ProcessKind,
    counts: BTreeMap<String, String>,
}

impl From<&SeriesTable> for TableJson {
    fn from(t: &SeriesTable) -> Self {
        Self {
            k: t.k.k(),
            n: t.n,
            process: t.process,
            counts: t
                .counts
                .iter()
                .map(|(w, c)| (w.to_string(), c.to_string()))
                .collect(),
        }
    }
}
