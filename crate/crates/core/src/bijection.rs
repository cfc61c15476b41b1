//! Maps from `M*` to `M_i*` built on the decomposition of a word into maximal
//! runs over the two letters `{i, i+1}`.
//!
//! * `psi` reverses the concatenation of all runs, re-cuts it into the
//!   original run lengths and then swaps `i <-> i+1`; it preserves the
//!   classical `12` count.
//! * `phi` reverses every run in place and swaps; it preserves ascents and
//!   descents.
//! * `theta` swaps `i <-> i+1` inside every run except at a few fixed
//!   positions near the run ends; it preserves every monotone consecutive
//!   pattern of length at least three.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::multiset::Word;

/// `w = x_1 X_1 x_2 X_2 ... X_{rho-1} x_rho`, where each `X_j` is a maximal
/// factor over `{i, i+1}` and the `x_j` hold everything else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunDecomposition {
    index: u64,
    word: Vec<u64>,
    gaps: Vec<Range<usize>>,
    runs: Vec<Range<usize>>,
}

impl RunDecomposition {
    pub fn index(&self) -> u64 {
        self.index
    }

    /// `rho`, the number of `x` blocks.
    pub fn rho(&self) -> usize {
        self.gaps.len()
    }

    /// The `x_j` blocks (first and last may be empty).
    pub fn gaps(&self) -> Vec<&[u64]> {
        self.gaps.iter().map(|r| &self.word[r.clone()]).collect()
    }

    /// The `X_j` blocks (never empty).
    pub fn runs(&self) -> Vec<&[u64]> {
        self.runs.iter().map(|r| &self.word[r.clone()]).collect()
    }

    /// Blocks in order `x_1, X_1, x_2, ..., x_rho`.
    pub fn blocks(&self) -> Vec<&[u64]> {
        let mut out = Vec::with_capacity(self.gaps.len() + self.runs.len());
        for (j, g) in self.gaps.iter().enumerate() {
            out.push(&self.word[g.clone()]);
            if let Some(r) = self.runs.get(j) {
                out.push(&self.word[r.clone()]);
            }
        }
        out
    }

    pub fn concat(&self) -> Vec<u64> {
        self.blocks().concat()
    }
}

fn in_pair(l: u64, i: u64) -> bool {
    l == i || l == i + 1
}

fn check_index(w: &[u64], i: usize) -> Result<u64> {
    let n = w.iter().copied().max().unwrap_or(0) as usize;
    if i == 0 || i + 1 > n {
        return Err(Error::IndexOutOfRange {
            index: i,
            letters: n,
        });
    }
    Ok(i as u64)
}

fn run_ranges(w: &[u64], i: u64) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut j = 0;
    while j < w.len() {
        if in_pair(w[j], i) {
            let start = j;
            while j < w.len() && in_pair(w[j], i) {
                j += 1;
            }
            runs.push(start..j);
        } else {
            j += 1;
        }
    }
    runs
}

fn swap_letter(l: u64, i: u64) -> u64 {
    if l == i {
        i + 1
    } else if l == i + 1 {
        i
    } else {
        l
    }
}

/// `r`: the reversed word.
pub fn reverse(w: &Word) -> Word {
    let mut v = w.letters().to_vec();
    v.reverse();
    Word::from_vec_unchecked(v)
}

/// `tau_i`: swaps letters `i` and `i+1` everywhere.
pub fn tau(w: &Word, i: usize) -> Result<Word> {
    let i = check_index(w.letters(), i)?;
    Ok(Word::from_vec_unchecked(
        w.letters().iter().map(|&l| swap_letter(l, i)).collect(),
    ))
}

/// Maximal-run decomposition of `w` with respect to `{i, i+1}`.
pub fn decompose(w: &Word, i: usize) -> Result<RunDecomposition> {
    let i = check_index(w.letters(), i)?;
    let word = w.letters().to_vec();
    let runs = run_ranges(&word, i);
    let mut gaps = Vec::with_capacity(runs.len() + 1);
    let mut prev = 0;
    for r in &runs {
        gaps.push(prev..r.start);
        prev = r.end;
    }
    gaps.push(prev..word.len());
    Ok(RunDecomposition {
        index: i,
        word,
        gaps,
        runs,
    })
}

/// `Psi_i`, in place on a raw word.
pub fn psi_in_place(w: &mut [u64], i: u64) {
    let runs = run_ranges(w, i);
    let mut pooled: Vec<u64> = runs.iter().flat_map(|r| w[r.clone()].to_vec()).collect();
    pooled.reverse();
    let mut src = pooled.into_iter();
    for r in runs {
        for slot in &mut w[r] {
            *slot = src.next().expect("run lengths add up");
        }
    }
    for l in w.iter_mut() {
        *l = swap_letter(*l, i);
    }
}

/// `Phi_i`, in place on a raw word.
pub fn phi_in_place(w: &mut [u64], i: u64) {
    for r in run_ranges(w, i) {
        w[r].reverse();
    }
    for l in w.iter_mut() {
        *l = swap_letter(*l, i);
    }
}

/// `Theta_i`, in place on a raw word.
pub fn theta_in_place(w: &mut [u64], i: u64) {
    for r in run_ranges(w, i) {
        theta_run(&mut w[r], i);
    }
}

/// Image of one run under `Theta_i`.
///
/// Length-3 runs follow a fixed table. Other runs swap every letter except
/// the first two when they differ and the last two when they differ; those
/// exempt pairs hold one `i` and one `i+1` each, so letter counts still swap.
fn theta_run(run: &mut [u64], i: u64) {
    let (a, b) = (i, i + 1);
    if run.len() == 3 {
        let image: [u64; 3] = match (run[0] == a, run[1] == a, run[2] == a) {
            (true, true, true) => [b, b, b],
            (false, false, false) => [a, a, a],
            (true, false, true) => [a, b, b],
            (false, true, false) => [a, a, b],
            (false, false, true) => [b, a, a],
            (true, true, false) => [b, a, b],
            (true, false, false) => [a, b, a],
            (false, true, true) => [b, b, a],
        };
        run.copy_from_slice(&image);
        return;
    }
    let len = run.len();
    let mut exempt = vec![false; len];
    if len >= 2 {
        if run[0] != run[1] {
            exempt[0] = true;
            exempt[1] = true;
        }
        if run[len - 2] != run[len - 1] {
            exempt[len - 2] = true;
            exempt[len - 1] = true;
        }
    }
    for (l, fixed) in run.iter_mut().zip(exempt) {
        if !fixed {
            *l = swap_letter(*l, i);
        }
    }
}

fn apply_with(w: &Word, i: usize, f: fn(&mut [u64], u64)) -> Result<Word> {
    let i = check_index(w.letters(), i)?;
    let mut v = w.letters().to_vec();
    f(&mut v, i);
    Ok(Word::from_vec_unchecked(v))
}

/// `Psi_i(w) = tau_i(x_1 Y_1 x_2 Y_2 ... x_rho)` with the `Y_j` cut from the
/// reversed concatenation of all runs.
pub fn psi(w: &Word, i: usize) -> Result<Word> {
    apply_with(w, i, psi_in_place)
}

/// `Phi_i(w) = tau_i(x_1 r(X_1) x_2 r(X_2) ... x_rho)`.
pub fn phi(w: &Word, i: usize) -> Result<Word> {
    apply_with(w, i, phi_in_place)
}

/// `Theta_i(w) = x_1 Y_1 x_2 Y_2 ... x_rho` with the run-wise rule of [`theta_run`].
pub fn theta(w: &Word, i: usize) -> Result<Word> {
    apply_with(w, i, theta_in_place)
}

/// 1-based position pairs.
pub type IndexPairs = Vec<(usize, usize)>;

/// Classical `12` occurrences `(j, j')` of `w` (1-based), split into those
/// formed by the letter pair `i < i+1` and all the others.
pub fn split_12_occurrences(w: &Word, i: u64) -> (IndexPairs, IndexPairs) {
    let l = w.letters();
    let mut pair = Vec::new();
    let mut other = Vec::new();
    for a in 0..l.len() {
        for b in a + 1..l.len() {
            if l[a] < l[b] {
                if l[a] == i && l[b] == i + 1 {
                    pair.push((a + 1, b + 1));
                } else {
                    other.push((a + 1, b + 1));
                }
            }
        }
    }
    (pair, other)
}

/// The four maps selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bijection {
    Psi,
    Phi,
    Theta,
    Tau,
}

impl Bijection {
    pub const ALL: [Bijection; 4] = [
        Bijection::Psi,
        Bijection::Phi,
        Bijection::Theta,
        Bijection::Tau,
    ];

    pub fn apply(self, w: &Word, i: usize) -> Result<Word> {
        match self {
            Bijection::Psi => psi(w, i),
            Bijection::Phi => phi(w, i),
            Bijection::Theta => theta(w, i),
            Bijection::Tau => tau(w, i),
        }
    }

    /// Unchecked in-place form for enumeration loops.
    pub fn apply_in_place(self, w: &mut [u64], i: u64) {
        match self {
            Bijection::Psi => psi_in_place(w, i),
            Bijection::Phi => phi_in_place(w, i),
            Bijection::Theta => theta_in_place(w, i),
            Bijection::Tau => {
                for l in w.iter_mut() {
                    *l = swap_letter(*l, i);
                }
            }
        }
    }
}

impl fmt::Display for Bijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bijection::Psi => "psi",
            Bijection::Phi => "phi",
            Bijection::Theta => "theta",
            Bijection::Tau => "tau",
        })
    }
}

impl FromStr for Bijection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi" => Ok(Bijection::Psi),
            "phi" => Ok(Bijection::Phi),
            "theta" => Ok(Bijection::Theta),
            "tau" => Ok(Bijection::Tau),
            other => Err(Error::Syntax(format!("unknown bijection {other:?}"))),
        }
    }
}
