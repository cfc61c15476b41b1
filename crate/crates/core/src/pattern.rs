//! Patterns with per-gap adjacency flags (classical, consecutive and vincular
//! in one type), their text notation and occurrence counting.
//!
//! Text notation: letters are written one digit each, and a `-` between two
//! letters lifts the adjacency requirement. `1-2-3` is classical 123, `123` is
//! consecutive, `1-23` requires only the last two letters to be adjacent.
//! When a letter exceeds 9 the integer form is used instead: letters are
//! decimal integers separated by `,` (adjacent) or `-` (not adjacent). The
//! integer form is selected whenever the text contains a `,` or a `0`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::multiset::Word;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    letters: Vec<u64>,
    /// `adjacent[j]` ties pattern positions `j` and `j+1` together.
    adjacent: Vec<bool>,
}

/// Per-position lookback used by the matcher: the earlier pattern position
/// holding an equal letter, or else the nearest smaller and larger ones.
#[derive(Clone, Copy, Debug)]
struct Constraint {
    equal: Option<usize>,
    below: Option<usize>,
    above: Option<usize>,
}

impl Pattern {
    pub fn new(letters: Vec<u64>, adjacent: Vec<bool>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::PatternSyntax("empty pattern".into()));
        }
        if adjacent.len() + 1 != letters.len() {
            return Err(Error::PatternSyntax(format!(
                "{} letters need {} adjacency flags, got {}",
                letters.len(),
                letters.len() - 1,
                adjacent.len()
            )));
        }
        if letters.contains(&0) {
            return Err(Error::PatternSyntax("letter 0 is not allowed".into()));
        }
        let v = *letters.iter().max().unwrap();
        if v > letters.len() as u64 {
            return Err(Error::PatternSyntax(format!(
                "alphabet gap: largest letter {v} exceeds pattern length {}",
                letters.len()
            )));
        }
        let mut seen = vec![false; v as usize];
        for &l in &letters {
            seen[l as usize - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::PatternSyntax(format!(
                "alphabet gap: letter {} missing",
                missing + 1
            )));
        }
        Ok(Pattern { letters, adjacent })
    }

    /// Classical pattern (no adjacency requirements).
    pub fn classical(letters: Vec<u64>) -> Result<Self> {
        let gaps = letters.len().saturating_sub(1);
        Pattern::new(letters, vec![false; gaps])
    }

    /// Consecutive pattern (every pair adjacent).
    pub fn consecutive(letters: Vec<u64>) -> Result<Self> {
        let gaps = letters.len().saturating_sub(1);
        Pattern::new(letters, vec![true; gaps])
    }

    pub fn letters(&self) -> &[u64] {
        &self.letters
    }

    pub fn adjacency(&self) -> &[bool] {
        &self.adjacent
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_classical(&self) -> bool {
        self.adjacent.iter().all(|a| !a)
    }

    pub fn is_consecutive(&self) -> bool {
        self.adjacent.iter().all(|&a| a)
    }

    pub fn has_distinct_letters(&self) -> bool {
        let v = *self.letters.iter().max().unwrap();
        v as usize == self.letters.len()
    }

    /// `12...l` or `l...21` with distinct letters.
    pub fn is_monotone(&self) -> bool {
        self.has_distinct_letters()
            && (self.letters.windows(2).all(|w| w[0] < w[1])
                || self.letters.windows(2).all(|w| w[0] > w[1]))
    }

    /// Same letters with the adjacency flag at `gap` replaced.
    pub fn with_adjacency(&self, gap: usize, value: bool) -> Pattern {
        let mut p = self.clone();
        p.adjacent[gap] = value;
        p
    }

    fn constraints(&self) -> Vec<Constraint> {
        (0..self.letters.len())
            .map(|k| {
                let pk = self.letters[k];
                let mut c = Constraint {
                    equal: None,
                    below: None,
                    above: None,
                };
                for j in 0..k {
                    let pj = self.letters[j];
                    match pj.cmp(&pk) {
                        Ordering::Equal => c.equal = Some(j),
                        Ordering::Less => {
                            if c.below.is_none_or(|b| self.letters[b] < pj) {
                                c.below = Some(j);
                            }
                        }
                        Ordering::Greater => {
                            if c.above.is_none_or(|a| self.letters[a] > pj) {
                                c.above = Some(j);
                            }
                        }
                    }
                }
                c
            })
            .collect()
    }

    /// A reusable matcher; build once when scanning many words.
    pub fn matcher(&self) -> Matcher {
        let mut block_start = vec![true; self.letters.len()];
        for (j, &adj) in self.adjacent.iter().enumerate() {
            block_start[j + 1] = !adj;
        }
        Matcher {
            constraints: self.constraints(),
            block_start,
        }
    }

    /// Number of occurrences of this pattern in `w`.
    pub fn count_occurrences(&self, w: &Word) -> BigUint {
        BigUint::from(self.matcher().count(w.letters()))
    }

    /// True iff `w` has no occurrence.
    pub fn avoided_by(&self, w: &Word) -> bool {
        self.matcher().count_capped(w.letters(), 1) == 0
    }
}

/// Occurrence counter for one pattern.
///
/// Matching assigns pattern positions left to right. A position that starts
/// an adjacency block ranges over the word; the others are pinned to the
/// index right after their predecessor. Each new letter is checked only
/// against its equal, nearest-below and nearest-above predecessors in the
/// pattern, which is enough because the letters already placed are
/// order-isomorphic to their pattern prefix.
#[derive(Clone, Debug)]
pub struct Matcher {
    constraints: Vec<Constraint>,
    block_start: Vec<bool>,
}

impl Matcher {
    pub fn count(&self, w: &[u64]) -> u64 {
        self.count_capped(w, u64::MAX)
    }

    /// Counts occurrences, stopping early once `cap` is reached.
    pub fn count_capped(&self, w: &[u64], cap: u64) -> u64 {
        let l = self.constraints.len();
        if w.len() < l {
            return 0;
        }
        let mut chosen = vec![0u64; l];
        let mut count = 0u64;
        self.extend(w, 0, 0, &mut chosen, &mut count, cap);
        count
    }

    #[inline]
    fn fits(&self, k: usize, letter: u64, chosen: &[u64]) -> bool {
        let c = &self.constraints[k];
        if let Some(e) = c.equal {
            return chosen[e] == letter;
        }
        if let Some(b) = c.below {
            if chosen[b] >= letter {
                return false;
            }
        }
        if let Some(a) = c.above {
            if chosen[a] <= letter {
                return false;
            }
        }
        true
    }

    fn extend(
        &self,
        w: &[u64],
        k: usize,
        from: usize,
        chosen: &mut [u64],
        count: &mut u64,
        cap: u64,
    ) {
        let l = self.constraints.len();
        if k == l {
            *count += 1;
            return;
        }
        let last = w.len() - (l - k);
        if self.block_start[k] {
            for idx in from..=last {
                if *count >= cap {
                    return;
                }
                let letter = w[idx];
                if self.fits(k, letter, chosen) {
                    chosen[k] = letter;
                    self.extend(w, k + 1, idx + 1, chosen, count, cap);
                }
            }
        } else if from <= last {
            let letter = w[from];
            if self.fits(k, letter, chosen) {
                chosen[k] = letter;
                self.extend(w, k + 1, from + 1, chosen, count, cap);
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let integer_form = self.letters.iter().any(|&l| l > 9);
        for (j, l) in self.letters.iter().enumerate() {
            if j > 0 {
                if !self.adjacent[j - 1] {
                    write!(f, "-")?;
                } else if integer_form {
                    write!(f, ",")?;
                }
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pattern(s)
    }
}

/// Parses the dash notation described in the module docs.
pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::PatternSyntax("empty pattern".into()));
    }
    let integer_form = t.contains(',') || t.contains('0');
    let mut letters = Vec::new();
    let mut adjacent = Vec::new();
    for (ci, chunk) in t.split('-').enumerate() {
        if chunk.is_empty() {
            return Err(Error::PatternSyntax(format!(
                "malformed separators in {t:?}"
            )));
        }
        if ci > 0 {
            adjacent.push(false);
        }
        if integer_form {
            for (ti, tok) in chunk.split(',').enumerate() {
                if ti > 0 {
                    adjacent.push(true);
                }
                if tok.is_empty() {
                    return Err(Error::PatternSyntax(format!(
                        "malformed separators in {t:?}"
                    )));
                }
                let l = tok
                    .parse::<u64>()
                    .map_err(|_| Error::PatternSyntax(format!("bad letter {tok:?} in {t:?}")))?;
                letters.push(l);
            }
        } else {
            for (ti, c) in chunk.chars().enumerate() {
                if ti > 0 {
                    adjacent.push(true);
                }
                let d = c
                    .to_digit(10)
                    .ok_or_else(|| Error::PatternSyntax(format!("bad character {c:?} in {t:?}")))?;
                letters.push(u64::from(d));
            }
        }
    }
    Pattern::new(letters, adjacent)
}

/// Renders `p` in the notation accepted by [`parse_pattern`].
pub fn format_pattern(p: &Pattern) -> String {
    p.to_string()
}

/// Number of occurrences of `p` in `w`.
pub fn count_occurrences(p: &Pattern, w: &Word) -> BigUint {
    p.count_occurrences(w)
}

/// True iff `w` avoids `p`.
pub fn avoids(p: &Pattern, w: &Word) -> bool {
    p.avoided_by(w)
}
