//! Multisets, words over them, the letter-permuting group action and
//! exhaustive lexicographic enumeration of `M*`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Count;

/// The multiset `M(k_1, ..., k_n)` holding `k_i` copies of letter `i`.
///
/// Stored in canonical form: every multiplicity is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", from = "Vec<usize>")]
pub struct Multiset {
    multiplicities: Vec<usize>,
}

impl Multiset {
    /// Builds a multiset from a raw multiplicity vector, dropping zero entries
    /// and compacting the remaining letters in order.
    pub fn new(raw: &[usize]) -> Self {
        Multiset {
            multiplicities: raw.iter().copied().filter(|&k| k > 0).collect(),
        }
    }

    pub fn empty() -> Self {
        Multiset {
            multiplicities: Vec::new(),
        }
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of distinct letters `n`.
    pub fn letters(&self) -> usize {
        self.multiplicities.len()
    }

    /// `|M| = k_1 + ... + k_n`.
    pub fn size(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicities.is_empty()
    }

    /// `M_i`: multiplicities of letters `i` and `i+1` exchanged (1-based `i`).
    pub fn transpose(&self, i: usize) -> Result<Multiset> {
        let t = Transposition::new(i, self.letters())?;
        let mut m = self.multiplicities.clone();
        m.swap(t.index() - 1, t.index());
        Ok(Multiset { multiplicities: m })
    }

    /// `sigma . M`, where `sigma` is a permutation of `1..=n` in one-line notation.
    /// Letter `sigma(j)` of the result carries multiplicity `k_j`.
    pub fn act(&self, sigma: &[usize]) -> Result<Multiset> {
        check_permutation(sigma, self.letters())?;
        let mut m = vec![0; self.letters()];
        for (j, &s) in sigma.iter().enumerate() {
            m[s - 1] = self.multiplicities[j];
        }
        Ok(Multiset { multiplicities: m })
    }

    /// Multiplicities sorted in descending order: the key of the orbit.
    pub fn canonical(&self) -> Multiset {
        let mut m = self.multiplicities.clone();
        m.sort_unstable_by(|a, b| b.cmp(a));
        Multiset { multiplicities: m }
    }

    /// `|M*| = m! / (k_1! ... k_n!)`.
    pub fn count_words(&self) -> Count {
        // product of binomials C(k_1 + ... + k_j, k_j) keeps intermediates small
        let mut total = 0usize;
        let mut acc = BigUint::one();
        for &k in &self.multiplicities {
            total += k;
            acc *= binomial(total, k);
        }
        acc
    }

    /// The letters of `M` in weakly increasing order (the first word of `M*`).
    pub fn sorted_letters(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.size());
        for (idx, &k) in self.multiplicities.iter().enumerate() {
            out.extend(std::iter::repeat_n((idx + 1) as u64, k));
        }
        out
    }

    /// All of `M*` in lexicographic order.
    pub fn words(&self) -> WordIter {
        WordIter::new(self.sorted_letters(), 0)
    }

    /// Every distinct multiset obtained by permuting the multiplicity vector,
    /// in lexicographic order of the vectors.
    pub fn rearrangements(&self) -> Vec<Multiset> {
        let mut v = self.multiplicities.clone();
        v.sort_unstable();
        let mut out = vec![Multiset {
            multiplicities: v.clone(),
        }];
        while next_permutation(&mut v) {
            out.push(Multiset {
                multiplicities: v.clone(),
            });
        }
        out
    }

    /// Distinct prefixes of length `depth` (clamped to `|M|`) of the words of
    /// `M*`, in lexicographic order. Each prefix names an independent shard.
    pub fn shard_prefixes(&self, depth: usize) -> Vec<Vec<u64>> {
        let depth = depth.min(self.size());
        let mut out = Vec::new();
        let mut remaining = self.multiplicities.clone();
        let mut prefix = Vec::with_capacity(depth);
        collect_prefixes(&mut remaining, depth, &mut prefix, &mut out);
        out
    }

    /// Words of `M*` beginning with `prefix`, in lexicographic order.
    /// An infeasible prefix yields nothing.
    pub fn words_with_prefix(&self, prefix: &[u64]) -> WordIter {
        let mut remaining = self.multiplicities.clone();
        for &l in prefix {
            let idx = l as usize;
            if idx == 0 || idx > remaining.len() || remaining[idx - 1] == 0 {
                return WordIter::exhausted();
            }
            remaining[idx - 1] -= 1;
        }
        let mut letters = prefix.to_vec();
        for (idx, &k) in remaining.iter().enumerate() {
            letters.extend(std::iter::repeat_n((idx + 1) as u64, k));
        }
        WordIter::new(letters, prefix.len())
    }

    /// Folds over every word of `M*` in parallel shards.
    ///
    /// `fold` is applied per word inside a shard starting from `init()`;
    /// shard results are combined with `merge`, which must be associative
    /// and commutative for the result to be independent of scheduling.
    pub fn par_fold_words<R, I, F, G>(&self, init: I, fold: F, merge: G) -> R
    where
        R: Send,
        I: Fn() -> R + Sync + Send,
        F: Fn(&mut R, &[u64]) + Sync + Send,
        G: Fn(R, R) -> R + Sync + Send,
    {
        let prefixes = self.shard_prefixes(shard_depth(self));
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut acc = init();
                let mut it = self.words_with_prefix(prefix);
                while let Some(w) = it.next_slice() {
                    fold(&mut acc, w);
                }
                acc
            })
            .reduce(&init, &merge)
    }
}

impl From<Vec<usize>> for Multiset {
    fn from(raw: Vec<usize>) -> Self {
        Multiset::new(&raw)
    }
}

impl From<Multiset> for Vec<usize> {
    fn from(m: Multiset) -> Self {
        m.multiplicities
    }
}

fn shard_depth(m: &Multiset) -> usize {
    if m.size() >= 8 {
        2
    } else {
        1
    }
}

fn collect_prefixes(
    remaining: &mut [usize],
    depth: usize,
    prefix: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if prefix.len() == depth {
        out.push(prefix.clone());
        return;
    }
    for idx in 0..remaining.len() {
        if remaining[idx] > 0 {
            remaining[idx] -= 1;
            prefix.push((idx + 1) as u64);
            collect_prefixes(remaining, depth, prefix, out);
            prefix.pop();
            remaining[idx] += 1;
        }
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.multiplicities.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Multiset {
    type Err = Error;

    /// Accepts `(2,4,2,1)`, `2,4,2,1` or `()`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(t)
            .trim();
        if inner.is_empty() {
            return Ok(Multiset::empty());
        }
        let raw = inner
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Syntax(format!("bad multiplicity {tok:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Multiset::new(&raw))
    }
}

/// A word over the positive integers, e.g. a permutation of some multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u64>);

impl Word {
    /// Fails on a zero letter.
    pub fn new(letters: Vec<u64>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::LetterOutOfRange {
                letter: 0,
                max: u64::MAX,
            });
        }
        Ok(Word(letters))
    }

    pub(crate) fn from_vec_unchecked(letters: Vec<u64>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u64] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Raw content vector: entry `i-1` is the number of occurrences of `i`,
    /// up to the largest letter (zeros kept).
    pub fn content(&self) -> Vec<usize> {
        let max = self.0.iter().copied().max().unwrap_or(0) as usize;
        let mut c = vec![0; max];
        for &l in &self.0 {
            c[l as usize - 1] += 1;
        }
        c
    }

    /// True if this word is a permutation of `m`.
    pub fn is_permutation_of(&self, m: &Multiset) -> bool {
        self.content() == m.multiplicities()
    }
}

impl From<Word> for Vec<u64> {
    fn from(w: Word) -> Self {
        w.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.0.iter().all(|&l| l <= 9);
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 && !compact {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// `321432212` (one digit per letter) or `3,2,1,10`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let letters = if t.contains(',') {
            t.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Syntax(format!("bad letter {tok:?} in word {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            t.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(u64::from)
                        .ok_or_else(|| Error::Syntax(format!("bad letter {c:?} in word {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Word::new(letters)
    }
}

/// The adjacent transposition `(i, i+1)`, with `1 <= i <= n-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transposition(usize);

impl Transposition {
    pub fn new(i: usize, letters: usize) -> Result<Self> {
        if i == 0 || i + 1 > letters {
            return Err(Error::IndexOutOfRange { index: i, letters });
        }
        Ok(Transposition(i))
    }

    pub fn index(self) -> usize {
        self.0
    }
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::InvalidPermutation(n));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s == 0 || s > n || seen[s - 1] {
            return Err(Error::InvalidPermutation(n));
        }
        seen[s - 1] = true;
    }
    Ok(())
}

/// `sigma . w`: replaces every letter `a` by `sigma(a)`.
/// `sigma` is a permutation of `1..=n` in one-line notation.
pub fn apply_sigma(sigma: &[usize], w: &Word) -> Result<Word> {
    check_permutation(sigma, sigma.len())?;
    let n = sigma.len() as u64;
    let letters = w
        .letters()
        .iter()
        .map(|&a| {
            if a == 0 || a > n {
                Err(Error::LetterOutOfRange { letter: a, max: n })
            } else {
                Ok(sigma[a as usize - 1] as u64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word(letters))
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= BigUint::from(n - j);
        acc /= BigUint::from(j + 1);
    }
    acc
}

/// Exact factorial.
pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * BigUint::from(j))
}

/// Advances `v` to its lexicographic successor among the distinct
/// rearrangements of its entries. Returns `false` (leaving `v` unchanged) at
/// the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Lexicographic stream of words, optionally with a frozen prefix.
#[derive(Clone, Debug)]
pub struct WordIter {
    current: Vec<u64>,
    fixed: usize,
    started: bool,
    done: bool,
}

impl WordIter {
    fn new(letters: Vec<u64>, fixed: usize) -> Self {
        WordIter {
            current: letters,
            fixed,
            started: false,
            done: false,
        }
    }

    fn exhausted() -> Self {
        WordIter {
            current: Vec::new(),
            fixed: 0,
            started: true,
            done: true,
        }
    }

    /// Non-allocating variant of `next`.
    pub fn next_slice(&mut self) -> Option<&[u64]> {
        if self.done {
            return None;
        }
        if self.started {
            if !next_permutation(&mut self.current[self.fixed..]) {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(&self.current)
    }
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        self.next_slice().map(|s| Word(s.to_vec()))
    }
}
