//! Stability and `s`-stability over multiplicity orbits, and a scanner that
//! looks for instability witnesses across whole pattern families.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{count_with, distribution, Distribution};
use crate::error::{Error, Result};
use crate::multiset::{next_permutation, Multiset};
use crate::pattern::Pattern;
use crate::{Budget, Count};

fn ser_count<S: serde::Serializer>(v: &Count, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Two multisets of one orbit whose counts at `s` differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitWitness {
    pub reference: Multiset,
    pub rearranged: Multiset,
    pub s: u64,
    #[serde(serialize_with = "ser_count")]
    pub count_reference: Count,
    #[serde(serialize_with = "ser_count")]
    pub count_rearranged: Count,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    StableOnOrbit,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub pattern: String,
    /// Orbit key: multiplicities sorted in descending order.
    pub multiset: Multiset,
    /// `None` for the full distribution, `Some(s)` for one entry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only_s: Option<u64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<OrbitWitness>,
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        self.verdict == Verdict::StableOnOrbit
    }
}

/// Total number of words over the whole orbit of `m`.
pub fn orbit_words(m: &Multiset) -> Count {
    m.rearrangements().iter().map(Multiset::count_words).sum()
}

fn first_difference(a: &Distribution, b: &Distribution) -> Option<u64> {
    a.counts
        .keys()
        .chain(b.counts.keys())
        .copied()
        .filter(|&s| a.get(s) != b.get(s))
        .min()
}

/// Compares the distribution of `p` on the canonical form of `m` against
/// every rearrangement. `budget` bounds the words of the whole orbit.
pub fn is_stable_on(m: &Multiset, p: &Pattern, budget: Budget) -> Result<StabilityVerdict> {
    budget.check(&orbit_words(m))?;
    let reference = m.canonical();
    let base = distribution(&reference, p, Budget::unlimited())?;
    let mut witness = None;
    for other in m.rearrangements() {
        if other == reference {
            continue;
        }
        let d = distribution(&other, p, Budget::unlimited())?;
        if let Some(s) = first_difference(&base, &d) {
            witness = Some(OrbitWitness {
                reference: reference.clone(),
                rearranged: other,
                s,
                count_reference: base.get(s),
                count_rearranged: d.get(s),
            });
            break;
        }
    }
    Ok(verdict(p, reference, None, witness))
}

/// Like [`is_stable_on`] but compares only `|M*(p;s)|`.
pub fn is_i_stable_on(
    m: &Multiset,
    p: &Pattern,
    s: u64,
    budget: Budget,
) -> Result<StabilityVerdict> {
    budget.check(&orbit_words(m))?;
    let reference = m.canonical();
    let base = count_with(&reference, p, s, Budget::unlimited())?;
    let mut witness = None;
    for other in m.rearrangements() {
        if other == reference {
            continue;
        }
        let c = count_with(&other, p, s, Budget::unlimited())?;
        if c != base {
            witness = Some(OrbitWitness {
                reference: reference.clone(),
                rearranged: other,
                s,
                count_reference: base,
                count_rearranged: c,
            });
            break;
        }
    }
    Ok(verdict(p, reference, Some(s), witness))
}

fn verdict(
    p: &Pattern,
    reference: Multiset,
    only_s: Option<u64>,
    witness: Option<OrbitWitness>,
) -> StabilityVerdict {
    StabilityVerdict {
        pattern: p.to_string(),
        multiset: reference,
        only_s,
        verdict: if witness.is_some() {
            Verdict::Unstable
        } else {
            Verdict::StableOnOrbit
        },
        witness,
    }
}

/// Orbit stability decided through adjacent transpositions only: every
/// multiset of the orbit is compared with each of its `M_i` neighbours.
/// The orbit is connected under these moves, so this agrees with
/// [`is_stable_on`].
pub fn stable_by_transpositions(m: &Multiset, p: &Pattern, budget: Budget) -> Result<bool> {
    budget.check(&orbit_words(m))?;
    let mut memo: HashMap<Multiset, Distribution> = HashMap::new();
    for member in m.rearrangements() {
        for i in 1..member.letters() {
            let neighbour = member.transpose(i)?;
            for key in [&member, &neighbour] {
                if !memo.contains_key(key) {
                    let d = distribution(key, p, Budget::unlimited())?;
                    memo.insert(key.clone(), d);
                }
            }
            if memo[&member].counts != memo[&neighbour].counts {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Canonical multisets (multiplicities sorted descending) with size in
/// `1..=max_size` and at most `max_letters` letters, by size and then in
/// reverse lexicographic order.
pub fn canonical_multisets(max_size: usize, max_letters: usize) -> Vec<Multiset> {
    fn parts(rest: usize, cap: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Multiset>) {
        if rest == 0 {
            out.push(Multiset::new(cur));
            return;
        }
        if slots == 0 {
            return;
        }
        for k in (1..=cap.min(rest)).rev() {
            cur.push(k);
            parts(rest - k, k, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 1..=max_size {
        parts(size, size, max_letters, &mut Vec::new(), &mut out);
    }
    out
}

/// A family of patterns to scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Consecutive patterns with distinct letters and length in the range.
    Consecutive { min_len: usize, max_len: usize },
    /// Classical patterns with distinct letters and length in the range.
    Classical { min_len: usize, max_len: usize },
    /// An explicit list.
    List(Vec<Pattern>),
}

impl Family {
    /// Members in a fixed order: by length, then lexicographically.
    pub fn patterns(&self) -> Vec<Pattern> {
        let permutations = |min_len: usize, max_len: usize, consecutive: bool| {
            let mut out = Vec::new();
            for l in min_len.max(1)..=max_len {
                let mut letters: Vec<u64> = (1..=l as u64).collect();
                loop {
                    let p = if consecutive {
                        Pattern::consecutive(letters.clone())
                    } else {
                        Pattern::classical(letters.clone())
                    };
                    out.push(p.expect("permutations are valid patterns"));
                    if !next_permutation(&mut letters) {
                        break;
                    }
                }
            }
            out
        };
        match self {
            Family::Consecutive { min_len, max_len } => permutations(*min_len, *max_len, true),
            Family::Classical { min_len, max_len } => permutations(*min_len, *max_len, false),
            Family::List(v) => v.clone(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Consecutive { min_len, max_len } => {
                write!(f, "consecutive:{min_len}-{max_len}")
            }
            Family::Classical { min_len, max_len } => write!(f, "classical:{min_len}-{max_len}"),
            Family::List(v) => {
                write!(f, "list:")?;
                for (j, p) in v.iter().enumerate() {
                    if j > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `consecutive:3-4`, `classical:3`, or `list:1-23;1-32;112`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Syntax(format!("family {s:?} needs a kind prefix")))?;
        let range = |r: &str| -> Result<(usize, usize)> {
            let bad = || Error::Syntax(format!("bad length range {r:?}"));
            match r.split_once('-') {
                Some((a, b)) => Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
                None => {
                    let l = r.parse().map_err(|_| bad())?;
                    Ok((l, l))
                }
            }
        };
        match kind {
            "consecutive" => {
                let (min_len, max_len) = range(rest)?;
                Ok(Family::Consecutive { min_len, max_len })
            }
            "classical" => {
                let (min_len, max_len) = range(rest)?;
                Ok(Family::Classical { min_len, max_len })
            }
            "list" => Ok(Family::List(
                rest.split(';')
                    .map(|t| t.trim().parse())
                    .collect::<Result<Vec<_>>>()?,
            )),
            other => Err(Error::Syntax(format!("unknown family kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub max_size: usize,
    pub max_letters: usize,
    /// Restrict to one entry of the distribution.
    pub only_s: Option<u64>,
    /// Per-cell ceiling on orbit words; larger cells are skipped.
    pub budget: Budget,
    /// Keep checking after the first witness of a pattern.
    pub exhaustive: bool,
}

impl ScanOptions {
    pub fn new(max_size: usize, max_letters: usize) -> Self {
        ScanOptions {
            max_size,
            max_letters,
            only_s: None,
            budget: Budget::default(),
            exhaustive: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanVerdict {
    Unstable,
    NoCounterexample,
}

impl fmt::Display for ScanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanVerdict::Unstable => "unstable",
            ScanVerdict::NoCounterexample => "no-counterexample",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanEntry {
    pub pattern: String,
    pub verdict: ScanVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<OrbitWitness>,
    pub cells_checked: u64,
    pub cells_skipped: u64,
    pub words_enumerated: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub family: String,
    pub max_size: usize,
    pub max_letters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only_s: Option<u64>,
    pub entries: Vec<ScanEntry>,
}

impl ScanReport {
    pub fn entry(&self, pattern: &str) -> Option<&ScanEntry> {
        self.entries.iter().find(|e| e.pattern == pattern)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scan report serializes")
    }

    /// `pattern,verdict,witness_multiset,s,count_a,count_b`; the witness
    /// column reads `reference->rearranged`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,verdict,witness_multiset,s,count_a,count_b\n");
        for e in &self.entries {
            let (wm, s, a, b) = match &e.witness {
                Some(w) => (
                    format!("{}->{}", w.reference, w.rearranged),
                    w.s.to_string(),
                    w.count_reference.to_string(),
                    w.count_rearranged.to_string(),
                ),
                None => Default::default(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_field(&e.pattern),
                e.verdict,
                csv_field(&wm),
                s,
                a,
                b
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn scan_pattern(p: &Pattern, cells: &[Multiset], opts: &ScanOptions) -> Result<ScanEntry> {
    let mut entry = ScanEntry {
        pattern: p.to_string(),
        verdict: ScanVerdict::NoCounterexample,
        witness: None,
        cells_checked: 0,
        cells_skipped: 0,
        words_enumerated: 0,
    };
    for m in cells {
        let words = orbit_words(m);
        if opts.budget.check(&words).is_err() {
            entry.cells_skipped += 1;
            continue;
        }
        entry.cells_checked += 1;
        if m.rearrangements().len() == 1 {
            continue;
        }
        entry.words_enumerated += words.to_u64().unwrap_or(u64::MAX);
        let v = match opts.only_s {
            Some(s) => is_i_stable_on(m, p, s, opts.budget)?,
            None => is_stable_on(m, p, opts.budget)?,
        };
        if let Some(w) = v.witness {
            verify_witness(p, &w, opts.budget)?;
            if entry.witness.is_none() {
                entry.witness = Some(w);
                entry.verdict = ScanVerdict::Unstable;
            }
            if !opts.exhaustive {
                break;
            }
        }
    }
    Ok(entry)
}

/// Recounts both sides of a witness on the single-entry code path.
pub fn verify_witness(p: &Pattern, w: &OrbitWitness, budget: Budget) -> Result<()> {
    let a = count_with(&w.reference, p, w.s, budget)?;
    let b = count_with(&w.rearranged, p, w.s, budget)?;
    if a != w.count_reference || b != w.count_rearranged || a == b {
        return Err(Error::Integrity(format!(
            "witness for {p} does not recount: {} vs {} at s = {}",
            a, b, w.s
        )));
    }
    Ok(())
}

/// Runs the orbit check for every pattern of `family` on every canonical
/// multiset within the bounds. Patterns are processed in parallel; each
/// pattern visits its cells in a fixed order, so the report does not depend
/// on the thread count.
pub fn scan(family: &Family, opts: &ScanOptions) -> Result<ScanReport> {
    let cells = canonical_multisets(opts.max_size, opts.max_letters);
    let patterns = family.patterns();
    let results: BTreeMap<usize, ScanEntry> = patterns
        .par_iter()
        .enumerate()
        .map(|(j, p)| scan_pattern(p, &cells, opts).map(|e| (j, e)))
        .collect::<Result<_>>()?;
    Ok(ScanReport {
        family: family.to_string(),
        max_size: opts.max_size,
        max_letters: opts.max_letters,
        only_s: opts.only_s,
        entries: results.into_values().collect(),
    })
}

/// Convenience: does `p` have identical distributions on the whole orbit of
/// every canonical multiset within the bounds?
pub fn stable_within(
    p: &Pattern,
    max_size: usize,
    max_letters: usize,
    budget: Budget,
) -> Result<bool> {
    for m in canonical_multisets(max_size, max_letters) {
        if !is_stable_on(&m, p, budget)?.is_stable() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn stable_and_unstable_examples() {
        let b = Budget::default();
        assert!(is_stable_on(&Multiset::new(&[2, 1]), &p("12"), b)
            .unwrap()
            .is_stable());
        assert!(is_stable_on(&Multiset::new(&[2, 1]), &p("11"), b)
            .unwrap()
            .is_stable());

        let v = is_stable_on(&Multiset::new(&[2, 1, 3]), &p("1-2-3"), b).unwrap();
        assert_eq!(v.verdict, Verdict::Unstable);
        assert_eq!(v.multiset, Multiset::new(&[3, 2, 1]));
        let w = v.witness.unwrap();
        verify_witness(&p("1-2-3"), &w, b).unwrap();
    }

    #[test]
    fn single_entry_examples() {
        let b = Budget::default();
        let m = Multiset::new(&[2, 1, 3]);
        assert!(is_i_stable_on(&m, &p("1-2-3"), 0, b).unwrap().is_stable());
        let v = is_i_stable_on(&m, &p("1-2-3"), 1, b).unwrap();
        assert!(!v.is_stable());
        // (2,1,3) and (2,3,1) lie in the orbit with counts 6 and 9
        let six = count_with(&Multiset::new(&[2, 1, 3]), &p("1-2-3"), 1, b).unwrap();
        let nine = count_with(&Multiset::new(&[2, 3, 1]), &p("1-2-3"), 1, b).unwrap();
        assert_eq!((six, nine), (6u32.into(), 9u32.into()));
        for s in 0..4 {
            assert!(is_i_stable_on(&m, &p("1"), s, b).unwrap().is_stable());
        }
    }

    #[test]
    fn transposition_route_agrees() {
        let b = Budget::default();
        for m in canonical_multisets(5, 3) {
            for pat in ["1-2", "12", "1-2-3", "132", "1-23"] {
                let direct = is_stable_on(&m, &p(pat), b).unwrap().is_stable();
                assert_eq!(
                    stable_by_transpositions(&m, &p(pat), b).unwrap(),
                    direct,
                    "{pat} on {m}"
                );
            }
        }
    }

    #[test]
    fn canonical_multiset_listing() {
        let v = canonical_multisets(4, 2);
        let s: Vec<String> = v.iter().map(|m| m.to_string()).collect();
        assert_eq!(
            s,
            ["(1)", "(2)", "(1,1)", "(3)", "(2,1)", "(4)", "(3,1)", "(2,2)"]
        );
    }

    #[test]
    fn family_text() {
        for f in ["consecutive:3-4", "classical:3-3", "list:1-23;112"] {
            assert_eq!(f.parse::<Family>().unwrap().to_string(), f);
        }
        assert_eq!(
            "consecutive:3".parse::<Family>().unwrap().patterns().len(),
            6
        );
        assert!("triangles:3".parse::<Family>().is_err());
    }

    #[test]
    fn small_scan() {
        let report = scan(&"consecutive:3".parse().unwrap(), &ScanOptions::new(6, 4)).unwrap();
        for e in &report.entries {
            let monotone = e.pattern == "123" || e.pattern == "321";
            assert_eq!(
                e.verdict == ScanVerdict::NoCounterexample,
                monotone,
                "{}",
                e.pattern
            );
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("pattern,verdict,witness_multiset,s,count_a,count_b\n"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn skipped_cells_are_counted() {
        let mut opts = ScanOptions::new(4, 4);
        opts.budget = Budget::new(5);
        let r = scan(&Family::List(vec![p("12")]), &opts).unwrap();
        assert!(r.entries[0].cells_skipped > 0);
    }
}
