//! Exact multiplicities: the number of trajectories that produce a word.
//!
//! [`multiplicity`] undoes one HAD_k step at a time. The `k` inserted last is
//! always the rightmost letter of a maximal block of `k`s, and the letter it
//! took a life from is reached from it through zeros only. Reversing a step
//! therefore removes such a `k` and then either
//!
//! 1. turns one zero of the following zero block back into a `1`,
//! 2. increments the first non-zero letter after that block, if it is not `k`,
//! 3. changes nothing, when only zeros follow the removed `k`.
//!
//! The third case covers any block-final `k` followed by zeros up to the end
//! of the word, not only a `k` in last position (`222200` has the predecessor
//! `22200`).

use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::prob::{factorial, interval_mass, ExactProbability};
use crate::process::{had_enumerate_with, interval_enumerate_with, Enumeration, HAD_DP_LIMIT};
use crate::table::{ProcessKind, SeriesTable};
use crate::words::{dominant_letters, dominant_words, Alphabet, Letter, RunLengthWord, Word};

/// Arbitrary-precision trajectory count.
pub type Multiplicity = BigUint;

type Bucket = HashMap<Vec<Letter>, BigUint>;

/// Shared cache of computed multiplicities keyed by process, `k` and word.
///
/// Values are deterministic, so racing writers store identical entries and
/// readers only ever observe absence or the final value.
#[derive(Debug, Default)]
pub struct MemoStore {
    buckets: RwLock<HashMap<(ProcessKind, u8), Bucket>>,
}

impl MemoStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, process: ProcessKind, k: u8, w: &[Letter]) -> Option<BigUint> {
        let buckets = self.buckets.read().expect("memo lock poisoned");
        buckets.get(&(process, k))?.get(w).cloned()
    }

    pub fn insert(&self, process: ProcessKind, k: u8, w: &[Letter], value: BigUint) {
        let mut buckets = self.buckets.write().expect("memo lock poisoned");
        buckets
            .entry((process, k))
            .or_default()
            .entry(w.to_vec())
            .or_insert(value);
    }

    pub fn len(&self) -> usize {
        let buckets = self.buckets.read().expect("memo lock poisoned");
        buckets.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn file_name(process: ProcessKind, k: u8) -> String {
        match process {
            ProcessKind::Had => format!("had-k{k}.memo"),
            ProcessKind::Interval => format!("interval-k{k}.memo"),
        }
    }

    /// Loads the `word value` lines for `(process, k)` from `dir`, if the
    /// file exists.
    pub fn load_dir(&self, dir: &Path, process: ProcessKind, k: Alphabet) -> Result<usize> {
        let path = dir.join(Self::file_name(process, k.k()));
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(Error::Memo(format!("{}: {e}", path.display()))),
        };
        let mut loaded = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || {
                Error::Memo(format!(
                    "{}:{}: malformed entry",
                    path.display(),
                    lineno + 1
                ))
            };
            let (word, value) = line.split_once(' ').ok_or_else(bad)?;
            let word = Word::parse_in(word, k).map_err(|_| bad())?;
            let value: BigUint = value.trim().parse().map_err(|_| bad())?;
            self.insert(process, k.k(), word.letters(), value);
            loaded += 1;
        }
        Ok(loaded)
    }

    /// Writes every cached entry for `(process, k)` to `dir`, sorted by word.
    pub fn save_dir(&self, dir: &Path, process: ProcessKind, k: Alphabet) -> Result<usize> {
        let io = |e: std::io::Error| Error::Memo(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let mut lines: Vec<String> = {
            let buckets = self.buckets.read().expect("memo lock poisoned");
            buckets
                .get(&(process, k.k()))
                .map(|bucket| {
                    bucket
                        .iter()
                        .map(|(w, v)| format!("{} {v}", Word::from_letters(w.clone())))
                        .collect()
                })
                .unwrap_or_default()
        };
        lines.sort();
        let path = dir.join(Self::file_name(process, k.k()));
        let tmp = path.with_extension("memo.tmp");
        let mut file = fs::File::create(&tmp).map_err(io)?;
        for line in &lines {
            writeln!(file, "{line}").map_err(io)?;
        }
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(lines.len())
    }
}

/// Every `(predecessor, gap)` such that one HAD_k step at `gap` turns the
/// predecessor into `w`. Predecessors need not be dominant.
pub(crate) fn had_predecessors(w: &[Letter], k: u8) -> Vec<(Vec<Letter>, usize)> {
    let n = w.len();
    let top = Letter::Digit(k);
    let mut out = Vec::new();
    for i in 0..n {
        if w[i] != top || (i + 1 < n && w[i + 1] == top) {
            continue;
        }
        let mut base = w.to_vec();
        base.remove(i);
        // w[i+1..i+r] are zeros; i + r is the first non-zero letter or n
        let r = 1 + w[i + 1..]
            .iter()
            .take_while(|&&l| l == Letter::Digit(0))
            .count();
        for j in 1..r {
            let mut z = base.clone();
            z[i + j - 1] = Letter::Digit(1);
            out.push((z, i));
        }
        if i + r < n {
            if let Letter::Digit(d) = w[i + r] {
                if d != k {
                    let mut z = base;
                    z[i + r - 1] = Letter::Digit(d + 1);
                    out.push((z, i));
                }
            }
        } else {
            out.push((base, i));
        }
    }
    out
}

fn had_multiplicity_rec(w: &[Letter], k: u8, memo: Option<&MemoStore>) -> BigUint {
    if !dominant_letters(w, k) {
        return BigUint::zero();
    }
    if w.len() == 1 {
        return BigUint::one();
    }
    if let Some(v) = memo.and_then(|m| m.get(ProcessKind::Had, k, w)) {
        return v;
    }
    let total: BigUint = had_predecessors(w, k)
        .iter()
        .map(|(z, _)| had_multiplicity_rec(z, k, memo))
        .sum();
    if let Some(m) = memo {
        m.insert(ProcessKind::Had, k, w, total.clone());
    }
    total
}

/// `F_k(w)`, the number of HAD_k trajectories producing `w`.
pub fn multiplicity(w: &Word, k: Alphabet) -> Result<Multiplicity> {
    multiplicity_with(w, k, &MemoStore::new())
}

/// [`multiplicity`] with a caller-owned cache, shareable across calls and
/// threads.
pub fn multiplicity_with(w: &Word, k: Alphabet, memo: &MemoStore) -> Result<Multiplicity> {
    k.validate_plain(w)?;
    Ok(had_multiplicity_rec(w.letters(), k.k(), Some(memo)))
}

/// [`multiplicity`] without any caching. Exponential; for cross-checks.
pub fn multiplicity_unmemoized(w: &Word, k: Alphabet) -> Result<Multiplicity> {
    k.validate_plain(w)?;
    Ok(had_multiplicity_rec(w.letters(), k.k(), None))
}

/// `F_k(w) / |w|!` in lowest terms.
pub fn probability(w: &Word, k: Alphabet) -> Result<ExactProbability> {
    let f = multiplicity(w, k)?;
    Ok(ExactProbability::from_counts(&f, &factorial(w.len())))
}

/// `F_k` for every word of length `n`, by forward level dynamic programming.
pub fn series_table(n: usize, k: Alphabet) -> Result<SeriesTable> {
    series_table_with(n, k, Execution::default())
}

pub fn series_table_with(n: usize, k: Alphabet, exec: Execution) -> Result<SeriesTable> {
    had_enumerate_with(n, k, Enumeration::LevelDp, exec)
}

/// `F_k` for every dominant word of length `n`, computed word by word with
/// the reverse moves. Independent of the forward tables; used as an oracle.
pub fn series_table_reverse(n: usize, k: Alphabet, memo: &MemoStore) -> Result<SeriesTable> {
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    if n > HAD_DP_LIMIT {
        return Err(Error::TooLarge {
            what: "reverse multiplicity table",
            n,
            limit: HAD_DP_LIMIT,
        });
    }
    let counts = dominant_words(n, k)
        .into_iter()
        .map(|w| {
            let f = had_multiplicity_rec(w.letters(), k.k(), Some(memo));
            (w, f)
        })
        .collect::<Vec<_>>();
    Ok(SeriesTable::new(k, n, ProcessKind::Had, counts))
}

/// Rebuilds a canonical run list from runs that may contain empty blocks.
/// Returns `None` when the word would start with a zero (multiplicity 0).
fn normalize_runs(raw: impl IntoIterator<Item = (usize, usize)>) -> Option<Vec<(usize, usize)>> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (a, b) in raw {
        if a > 0 {
            match out.last_mut() {
                Some(last) if last.1 == 0 => {
                    last.0 += a;
                    last.1 = b;
                }
                _ => out.push((a, b)),
            }
        } else if b > 0 {
            out.last_mut()?.1 += b;
        }
    }
    (!out.is_empty()).then_some(out)
}

fn f1_rec(runs: &[(usize, usize)], memo: &mut HashMap<Vec<(usize, usize)>, BigUint>) -> BigUint {
    if runs == [(1, 0)] {
        return BigUint::one();
    }
    if let Some(v) = memo.get(runs) {
        return v.clone();
    }
    let s = runs.len();
    let mut total = BigUint::zero();
    let splice = |i: usize, replacement: &[(usize, usize)]| {
        normalize_runs(
            runs[..i]
                .iter()
                .copied()
                .chain(replacement.iter().copied())
                .chain(runs[i + 1..].iter().copied()),
        )
    };
    for (i, &(a, b)) in runs.iter().enumerate() {
        // the last 1 of run i moves into its zero block: [.., a-1, j, 1, l, ..]
        for j in 0..b {
            let l = b - 1 - j;
            if let Some(z) = splice(i, &[(a - 1, j), (1, l)]) {
                total += f1_rec(&z, memo);
            }
        }
        // the last 1 of the final run is followed by zeros only: [.., a_s - 1, b_s]
        if i + 1 == s {
            if let Some(z) = splice(i, &[(a - 1, b)]) {
                total += f1_rec(&z, memo);
            }
        }
    }
    memo.insert(runs.to_vec(), total.clone());
    total
}

/// `F_1` evaluated directly on run lengths.
pub fn f1_runlength(rl: &RunLengthWord) -> Multiplicity {
    f1_rec(rl.runs(), &mut HashMap::new())
}

/// Membership test for the interval language on raw letters.
pub(crate) fn interval_letters_ok(w: &[Letter], k: u8) -> bool {
    if w.is_empty() {
        return false;
    }
    let kk = u64::from(k);
    let (mut sum, mut dia) = (0u64, 0u64);
    for (i, &l) in w.iter().enumerate() {
        let len = i as u64 + 1;
        match l {
            Letter::Diamond => dia += 1,
            Letter::Digit(d) => sum += u64::from(d),
        }
        if 2 * dia > len || sum + (kk + 1) * dia < kk * len {
            return false;
        }
    }
    2 * dia == w.len() as u64
}

/// Every `(predecessor, weight)` of an interval word; `weight` counts the
/// ordered pick pairs realizing the move (1 when both picks coincide, else 2).
pub(crate) fn interval_predecessors(w: &[Letter], k: u8) -> Vec<(Vec<Letter>, u32)> {
    let n = w.len();
    let top = Letter::Digit(k);
    let mut out = Vec::new();
    for i in 0..n {
        if w[i] != top {
            continue;
        }
        for j in i + 1..n {
            if w[j] != Letter::Diamond {
                continue;
            }
            let weight = if j == i + 1 { 1 } else { 2 };
            let base: Vec<Letter> = w
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != i && p != j)
                .map(|(_, &l)| l)
                .collect();
            // letters after j shift left by two in the predecessor
            let mut t = j + 1;
            while t < n && matches!(w[t], Letter::Diamond | Letter::Digit(0)) {
                if w[t] == Letter::Digit(0) {
                    let mut z = base.clone();
                    z[t - 2] = Letter::Digit(1);
                    out.push((z, weight));
                }
                t += 1;
            }
            if t < n {
                if let Letter::Digit(d) = w[t] {
                    if d < k {
                        let mut z = base;
                        z[t - 2] = Letter::Digit(d + 1);
                        out.push((z, weight));
                    }
                }
            } else {
                out.push((base, weight));
            }
        }
    }
    out
}

fn interval_multiplicity_rec(w: &[Letter], k: u8, memo: Option<&MemoStore>) -> BigUint {
    if !interval_letters_ok(w, k) {
        return BigUint::zero();
    }
    if w.len() == 2 {
        return BigUint::one();
    }
    if let Some(v) = memo.and_then(|m| m.get(ProcessKind::Interval, k, w)) {
        return v;
    }
    let total: BigUint = interval_predecessors(w, k)
        .iter()
        .map(|(z, weight)| interval_multiplicity_rec(z, k, memo) * *weight)
        .sum();
    if let Some(m) = memo {
        m.insert(ProcessKind::Interval, k, w, total.clone());
    }
    total
}

/// `F_{k,INT}(w)`: the number of ordered pick sequences of the interval
/// process producing `w`.
pub fn interval_multiplicity(w: &Word, k: Alphabet) -> Result<Multiplicity> {
    interval_multiplicity_with(w, k, &MemoStore::new())
}

pub fn interval_multiplicity_with(w: &Word, k: Alphabet, memo: &MemoStore) -> Result<Multiplicity> {
    k.validate(w)?;
    Ok(interval_multiplicity_rec(w.letters(), k.k(), Some(memo)))
}

pub fn interval_multiplicity_unmemoized(w: &Word, k: Alphabet) -> Result<Multiplicity> {
    k.validate(w)?;
    Ok(interval_multiplicity_rec(w.letters(), k.k(), None))
}

/// `F_{k,INT}(w)` over the number of ordered pick sequences of the same
/// length. Words of odd length have probability zero.
pub fn interval_probability(w: &Word, k: Alphabet) -> Result<ExactProbability> {
    let f = interval_multiplicity(w, k)?;
    if w.len() % 2 == 1 {
        return Ok(ExactProbability::zero());
    }
    Ok(ExactProbability::from_counts(
        &f,
        &interval_mass(w.len() / 2),
    ))
}

/// Interval multiplicities of every word after `n` steps, by forward level
/// dynamic programming.
pub fn interval_table(n: usize, k: Alphabet) -> Result<SeriesTable> {
    interval_table_with(n, k, Execution::default())
}

pub fn interval_table_with(n: usize, k: Alphabet, exec: Execution) -> Result<SeriesTable> {
    interval_enumerate_with(n, k, Enumeration::LevelDp, exec)
}
