//! Fast sampling of long HAD_k words.
//!
//! Choosing a uniform gap at every step is the same as drawing a uniform
//! random permutation of final ranks: the particle arriving at step `m` ends
//! up at rank `ranks[m]` of the final word. With the ranks known up front,
//! each step only needs the first live particle to the right of a rank, which
//! a two-level bitset answers with a couple of word scans.

use rand::seq::SliceRandom;
use rand::Rng;

/// Ordered set of ranks in `0..capacity` with constant-time insert/remove and
/// fast successor queries.
#[derive(Debug, Clone)]
pub(crate) struct SuccessorSet {
    words: Vec<u64>,
    summary: Vec<u64>,
}

impl SuccessorSet {
    pub(crate) fn new(capacity: usize) -> Self {
        let words = capacity.div_ceil(64).max(1);
        Self {
            words: vec![0; words],
            summary: vec![0; words.div_ceil(64)],
        }
    }

    pub(crate) fn clear(&mut self) {
        self.words.fill(0);
        self.summary.fill(0);
    }

    #[inline]
    pub(crate) fn insert(&mut self, i: usize) {
        let w = i >> 6;
        self.words[w] |= 1 << (i & 63);
        self.summary[w >> 6] |= 1 << (w & 63);
    }

    #[inline]
    pub(crate) fn remove(&mut self, i: usize) {
        let w = i >> 6;
        self.words[w] &= !(1 << (i & 63));
        if self.words[w] == 0 {
            self.summary[w >> 6] &= !(1 << (w & 63));
        }
    }

    /// Smallest member strictly greater than `i`.
    #[inline]
    pub(crate) fn successor(&self, i: usize) -> Option<usize> {
        let j = i + 1;
        let w = j >> 6;
        if w >= self.words.len() {
            return None;
        }
        let bits = self.words[w] & (!0u64 << (j & 63));
        if bits != 0 {
            return Some((w << 6) | bits.trailing_zeros() as usize);
        }
        let next = w + 1;
        let mut s = next >> 6;
        if s >= self.summary.len() {
            return None;
        }
        let mut sbits = if next & 63 == 0 {
            self.summary[s]
        } else {
            self.summary[s] & (!0u64 << (next & 63))
        };
        loop {
            if sbits != 0 {
                let wi = (s << 6) | sbits.trailing_zeros() as usize;
                return Some((wi << 6) | self.words[wi].trailing_zeros() as usize);
            }
            s += 1;
            if s >= self.summary.len() {
                return None;
            }
            sbits = self.summary[s];
        }
    }
}

/// Reusable scratch space for sampling words of a fixed length.
#[derive(Debug, Clone)]
pub struct HadSampler {
    k: u8,
    ranks: Vec<u32>,
    lives: Vec<u8>,
    live: SuccessorSet,
}

impl HadSampler {
    pub fn new(n: usize, k: u8) -> Self {
        assert!(n <= u32::MAX as usize, "word too long to sample");
        Self {
            k,
            ranks: Vec::with_capacity(n),
            lives: vec![0; n],
            live: SuccessorSet::new(n),
        }
    }

    pub fn len(&self) -> usize {
        self.lives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lives.is_empty()
    }

    /// Runs one trajectory and returns the life count at each rank.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[u8] {
        let n = self.lives.len();
        self.ranks.clear();
        self.ranks.extend(0..n as u32);
        self.ranks.shuffle(rng);
        self.live.clear();
        for &rank in &self.ranks {
            let p = rank as usize;
            if let Some(q) = self.live.successor(p) {
                self.lives[q] -= 1;
                if self.lives[q] == 0 {
                    self.live.remove(q);
                }
            }
            self.lives[p] = self.k;
            self.live.insert(p);
        }
        &self.lives
    }

    /// Final rank of the particle arriving at each step, for the most recent
    /// sample.
    pub fn arrival_ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn lives(&self) -> &[u8] {
        &self.lives
    }
}

/// Gap chosen at each step, recovered from the final arrival ranks: the
/// particle arriving at step `m` lands after every earlier particle of smaller
/// rank.
pub(crate) fn gaps_from_ranks(ranks: &[u32]) -> Vec<usize> {
    // Fenwick tree over ranks counting earlier arrivals.
    let n = ranks.len();
    let mut tree = vec![0u32; n + 1];
    ranks
        .iter()
        .map(|&r| {
            let mut below = 0usize;
            let mut i = r as usize;
            while i > 0 {
                below += tree[i] as usize;
                i &= i - 1;
            }
            let mut i = r as usize + 1;
            while i <= n {
                tree[i] += 1;
                i += i & i.wrapping_neg();
            }
            below
        })
        .collect()
}
