//! Forward dynamics of HAD_k and of the interval process HAD_{k,INT}.
//!
//! Gaps are 0-based: a word of length `L` has gaps `0..=L`, gap `g` sitting
//! just before letter `g`. At step `m` the HAD_k word has length `m - 1` (so
//! `m` gaps) and the interval word has length `2(m - 1)` (so `2m - 1` gaps).

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fold_slice, substream, Execution};
use crate::sampler::{gaps_from_ranks, HadSampler};
use crate::table::{EnumerationTable, ProcessKind};
use crate::words::{Alphabet, Letter, Word};

/// Largest `n` accepted by the level dynamic programs for HAD_k.
pub const HAD_DP_LIMIT: usize = 14;
/// Largest `n` accepted by literal trajectory enumeration for HAD_k.
pub const HAD_TRAJECTORY_LIMIT: usize = 9;
/// Largest `n` accepted by the interval level dynamic program.
pub const INTERVAL_DP_LIMIT: usize = 6;
/// Largest `n` accepted by literal interval pick-sequence enumeration.
pub const INTERVAL_TRAJECTORY_LIMIT: usize = 5;

/// Gap chosen at every step of a HAD_k run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Trajectory(Vec<usize>);

impl Trajectory {
    /// Checks `0 <= g_m <= m - 1` at every (1-based) step `m`.
    pub fn new(gaps: Vec<usize>) -> Result<Self> {
        for (i, &gap) in gaps.iter().enumerate() {
            if gap > i {
                return Err(Error::MalformedTrajectory {
                    step: i + 1,
                    gap,
                    available: i + 1,
                });
            }
        }
        Ok(Self(gaps))
    }

    pub fn gaps(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<usize>> for Trajectory {
    type Error = Error;

    fn try_from(gaps: Vec<usize>) -> Result<Self> {
        Self::new(gaps)
    }
}

impl From<Trajectory> for Vec<usize> {
    fn from(t: Trajectory) -> Self {
        t.0
    }
}

/// Ordered pair of gaps `(x_m, y_m)` picked at every step of an interval run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct IntervalTrajectory(Vec<(usize, usize)>);

impl IntervalTrajectory {
    /// Checks `0 <= x_m, y_m <= 2(m - 1)` at every (1-based) step `m`.
    pub fn new(picks: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(x, y)) in picks.iter().enumerate() {
            let available = 2 * i + 1;
            if let Some(gap) = [x, y].into_iter().find(|&g| g >= available) {
                return Err(Error::MalformedTrajectory {
                    step: i + 1,
                    gap,
                    available,
                });
            }
        }
        Ok(Self(picks))
    }

    pub fn picks(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<(usize, usize)>> for IntervalTrajectory {
    type Error = Error;

    fn try_from(picks: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(picks)
    }
}

impl From<IntervalTrajectory> for Vec<(usize, usize)> {
    fn from(t: IntervalTrajectory) -> Self {
        t.0
    }
}

/// Which enumeration route to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Enumeration {
    /// Word-collapsed forward dynamic programming, one length at a time.
    #[default]
    LevelDp,
    /// Walk every trajectory literally. Only for small `n`.
    Trajectories,
}

/// Decrements the first strictly positive digit of `tail`, skipping zeros and
/// diamonds.
#[inline]
fn push_decremented(out: &mut Vec<Letter>, tail: &[Letter]) {
    let mut done = false;
    for &l in tail {
        match l {
            Letter::Digit(d) if d > 0 && !done => {
                out.push(Letter::Digit(d - 1));
                done = true;
            }
            _ => out.push(l),
        }
    }
}

pub(crate) fn had_step_letters(w: &[Letter], k: u8, gap: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(w.len() + 1);
    out.extend_from_slice(&w[..gap]);
    out.push(Letter::Digit(k));
    push_decremented(&mut out, &w[gap..]);
    out
}

pub(crate) fn interval_step_letters(w: &[Letter], k: u8, x: usize, y: usize) -> Vec<Letter> {
    let (a, b) = (x.min(y), x.max(y));
    let mut out = Vec::with_capacity(w.len() + 2);
    out.extend_from_slice(&w[..a]);
    out.push(Letter::Digit(k));
    out.extend_from_slice(&w[a..b]);
    out.push(Letter::Diamond);
    push_decremented(&mut out, &w[b..]);
    out
}

/// One HAD_k step: insert `k` at `gap` and take a life from the first
/// non-zero digit to its right, if any.
pub fn had_step(w: &Word, k: Alphabet, gap: usize) -> Result<Word> {
    k.validate_plain(w)?;
    if gap > w.len() {
        return Err(Error::GapOutOfRange { gap, len: w.len() });
    }
    Ok(Word::from_letters(had_step_letters(
        w.letters(),
        k.k(),
        gap,
    )))
}

/// The word produced by a trajectory started from the empty word.
pub fn had_replay(t: &Trajectory, k: Alphabet) -> Result<Word> {
    let mut w = Vec::with_capacity(t.len());
    for (i, &gap) in t.gaps().iter().enumerate() {
        if gap > w.len() {
            return Err(Error::MalformedTrajectory {
                step: i + 1,
                gap,
                available: w.len() + 1,
            });
        }
        w = had_step_letters(&w, k.k(), gap);
    }
    Ok(Word::from_letters(w))
}

/// A uniformly random word of length `n`, deterministic in `seed`.
pub fn had_sample(n: usize, k: Alphabet, seed: u64) -> Result<Word> {
    Ok(had_sample_with_trajectory(n, k, seed)?.1)
}

/// Like [`had_sample`], also returning the gaps of the sampled run.
pub fn had_sample_with_trajectory(n: usize, k: Alphabet, seed: u64) -> Result<(Trajectory, Word)> {
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let mut sampler = HadSampler::new(n, k.k());
    let word = Word::from_digits(sampler.sample(&mut substream(seed, 0)));
    let trajectory = Trajectory(gaps_from_ranks(sampler.arrival_ranks()));
    Ok((trajectory, word))
}

/// Runs the particle system on explicit values: each arrival takes a life
/// from the smallest larger particle still alive. Lives are reported in
/// increasing order of value.
pub fn encode_values(values: &[f64], k: Alphabet) -> Result<Word> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::DuplicateValue { index });
    }
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    if let Some(pair) = order.windows(2).find(|p| values[p[0]] == values[p[1]]) {
        return Err(Error::DuplicateValue {
            index: pair[0].max(pair[1]),
        });
    }
    let mut lives: Vec<Option<u8>> = vec![None; values.len()];
    for (i, &v) in values.iter().enumerate() {
        let target = (0..i)
            .filter(|&j| values[j] > v && lives[j].is_some_and(|l| l > 0))
            .min_by(|&a, &b| values[a].total_cmp(&values[b]));
        if let Some(j) = target {
            lives[j] = lives[j].map(|l| l - 1);
        }
        lives[i] = Some(k.k());
    }
    Ok(Word::from_digits(
        &order
            .iter()
            .map(|&i| lives[i].unwrap_or(0))
            .collect::<Vec<_>>(),
    ))
}

/// One interval step with picks `x`, `y`: insert `k` at gap `min(x, y)`, a
/// diamond at gap `max(x, y)` (right after the new `k` when `x == y`), then
/// take a life from the first non-zero digit after the new diamond.
pub fn interval_step(w: &Word, k: Alphabet, x: usize, y: usize) -> Result<Word> {
    k.validate(w)?;
    if let Some(gap) = [x, y].into_iter().find(|&g| g > w.len()) {
        return Err(Error::GapOutOfRange { gap, len: w.len() });
    }
    Ok(Word::from_letters(interval_step_letters(
        w.letters(),
        k.k(),
        x,
        y,
    )))
}

pub fn interval_replay(t: &IntervalTrajectory, k: Alphabet) -> Result<Word> {
    let mut w = Vec::with_capacity(2 * t.len());
    for (i, &(x, y)) in t.picks().iter().enumerate() {
        if let Some(gap) = [x, y].into_iter().find(|&g| g > w.len()) {
            return Err(Error::MalformedTrajectory {
                step: i + 1,
                gap,
                available: w.len() + 1,
            });
        }
        w = interval_step_letters(&w, k.k(), x, y);
    }
    Ok(Word::from_letters(w))
}

/// Samples `n` steps of the interval process: both picks are independent and
/// uniform over the current gaps.
pub fn interval_sample(n: usize, k: Alphabet, seed: u64) -> Result<(IntervalTrajectory, Word)> {
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let mut rng = substream(seed, 0);
    let picks: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let gaps = 2 * i + 1;
            (rng.random_range(0..gaps), rng.random_range(0..gaps))
        })
        .collect();
    let t = IntervalTrajectory(picks);
    let w = interval_replay(&t, k)?;
    Ok((t, w))
}

type Level = Vec<(Vec<Letter>, BigUint)>;

fn merge_counts(
    mut a: HashMap<Vec<Letter>, BigUint>,
    b: HashMap<Vec<Letter>, BigUint>,
) -> HashMap<Vec<Letter>, BigUint> {
    if a.len() < b.len() {
        return merge_counts(b, a);
    }
    for (w, c) in b {
        *a.entry(w).or_default() += c;
    }
    a
}

/// Pushes every level through `successors` `steps` times, summing counts of
/// identical words.
fn level_dp<F>(exec: Execution, start: Level, steps: usize, successors: F) -> Level
where
    F: Fn(&[Letter], &mut dyn FnMut(Vec<Letter>, u32)) + Sync + Send,
{
    let mut level = start;
    for _ in 0..steps {
        let next = fold_slice(
            exec,
            &level,
            HashMap::new,
            |acc: &mut HashMap<Vec<Letter>, BigUint>, (w, c)| {
                successors(w, &mut |next, weight| {
                    let add = if weight == 1 { c.clone() } else { c * weight };
                    *acc.entry(next).or_default() += add;
                });
            },
            merge_counts,
        );
        level = next.into_iter().collect();
    }
    level
}

fn table_from_level(k: Alphabet, n: usize, process: ProcessKind, level: Level) -> EnumerationTable {
    EnumerationTable::new(
        k,
        n,
        process,
        level.into_iter().map(|(w, c)| (Word::from_letters(w), c)),
    )
}

fn check_limit(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { what, n, limit });
    }
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    Ok(())
}

/// Exact number of HAD_k trajectories ending in each word of length `n`.
pub fn had_enumerate(n: usize, k: Alphabet, method: Enumeration) -> Result<EnumerationTable> {
    had_enumerate_with(n, k, method, Execution::default())
}

pub fn had_enumerate_with(
    n: usize,
    k: Alphabet,
    method: Enumeration,
    exec: Execution,
) -> Result<EnumerationTable> {
    let top = k.k();
    let level = match method {
        Enumeration::LevelDp => {
            check_limit("HAD_k level enumeration", n, HAD_DP_LIMIT)?;
            level_dp(exec, vec![(Vec::new(), BigUint::one())], n, |w, emit| {
                for gap in 0..=w.len() {
                    emit(had_step_letters(w, top, gap), 1);
                }
            })
        }
        Enumeration::Trajectories => {
            check_limit("HAD_k trajectory enumeration", n, HAD_TRAJECTORY_LIMIT)?;
            fn walk(w: &[Letter], k: u8, left: usize, out: &mut HashMap<Vec<Letter>, BigUint>) {
                if left == 0 {
                    *out.entry(w.to_vec()).or_default() += 1u32;
                    return;
                }
                for gap in 0..=w.len() {
                    walk(&had_step_letters(w, k, gap), k, left - 1, out);
                }
            }
            let mut out = HashMap::new();
            walk(&[], top, n, &mut out);
            out.into_iter().collect()
        }
    };
    Ok(table_from_level(k, n, ProcessKind::Had, level))
}

/// Exact number of ordered pick sequences of the interval process ending in
/// each word of length `2n`.
pub fn interval_enumerate(n: usize, k: Alphabet, method: Enumeration) -> Result<EnumerationTable> {
    interval_enumerate_with(n, k, method, Execution::default())
}

pub fn interval_enumerate_with(
    n: usize,
    k: Alphabet,
    method: Enumeration,
    exec: Execution,
) -> Result<EnumerationTable> {
    let top = k.k();
    let level = match method {
        Enumeration::LevelDp => {
            check_limit("interval level enumeration", n, INTERVAL_DP_LIMIT)?;
            level_dp(exec, vec![(Vec::new(), BigUint::one())], n, |w, emit| {
                for x in 0..=w.len() {
                    for y in 0..=w.len() {
                        emit(interval_step_letters(w, top, x, y), 1);
                    }
                }
            })
        }
        Enumeration::Trajectories => {
            check_limit(
                "interval trajectory enumeration",
                n,
                INTERVAL_TRAJECTORY_LIMIT,
            )?;
            fn walk(w: &[Letter], k: u8, left: usize, out: &mut HashMap<Vec<Letter>, BigUint>) {
                if left == 0 {
                    *out.entry(w.to_vec()).or_default() += 1u32;
                    return;
                }
                for x in 0..=w.len() {
                    for y in 0..=w.len() {
                        walk(&interval_step_letters(w, k, x, y), k, left - 1, out);
                    }
                }
            }
            let mut out = HashMap::new();
            walk(&[], top, n, &mut out);
            out.into_iter().collect()
        }
    };
    Ok(table_from_level(k, n, ProcessKind::Interval, level))
}
