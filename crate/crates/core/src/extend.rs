//! Extendable indices of consecutive patterns, extended permutations and
//! multisets, and construction of instability witnesses.
//!
//! An index `i` (`2 <= i <= l`) of a consecutive pattern `p` of length `l` is
//! extendable when some word of length `l + i - 1` has an occurrence of `p`
//! both in its first and in its last `l` letters. The two occurrences share
//! positions `i..=l`, so `i` is extendable exactly when `p_i..p_l` and
//! `p_1..p_{l-i+1}` are order-isomorphic.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::distribution::count_with;
use crate::error::{Error, Result};
use crate::multiset::{Multiset, Word};
use crate::pattern::Pattern;
use crate::{Budget, Count};

/// Everything computed for a consecutive pattern at one extendable index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendabilityReport {
    pub pattern: String,
    pub index: usize,
    /// Sorts the overlap: `p_{sigma(1)} < ... < p_{sigma(l-i+1)}` (1-based).
    pub sigma: Vec<usize>,
    /// Suffix-only letters per value band.
    pub delta1: Vec<usize>,
    /// Prefix-only letters per value band.
    pub delta2: Vec<usize>,
    /// `min(delta1, delta2)`: values shared by both sides.
    pub shared: Vec<usize>,
    /// `|delta1 - delta2|`: values used by one side only.
    pub unshared: Vec<usize>,
    #[serde(serialize_with = "ser_display")]
    pub extended_permutation: Word,
    pub extended_multiset: Multiset,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_count<S: serde::Serializer>(v: &Count, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Auxiliary offsets used when building a consecutive-pattern witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessOffsets {
    /// Number of distinct letters of the extended multiset.
    pub ell_prime: usize,
    pub ell1: usize,
    pub ell2: Option<usize>,
    pub ell3: Option<usize>,
    /// 1-based bands whose shared count is positive.
    pub positive_bands: Vec<usize>,
}

/// Two multisets in one orbit on which `|M*(p;s)|` differs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    pub pattern: String,
    pub s: u64,
    pub multiset: Multiset,
    pub rearranged: Multiset,
    #[serde(serialize_with = "ser_count")]
    pub count: Count,
    #[serde(serialize_with = "ser_count")]
    pub rearranged_count: Count,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offsets: Option<WitnessOffsets>,
}

fn order_isomorphic(a: &[u64], b: &[u64]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|x| (0..a.len()).all(|y| a[x].cmp(&a[y]) == b[x].cmp(&b[y])))
}

fn require_consecutive_distinct(p: &Pattern) -> Result<()> {
    if !p.is_consecutive() || !p.has_distinct_letters() {
        return Err(Error::Precondition(format!(
            "{p} must be a consecutive pattern with distinct letters"
        )));
    }
    Ok(())
}

/// All extendable indices of `p`, ascending.
pub fn extendable_indices(p: &Pattern) -> Result<Vec<usize>> {
    require_consecutive_distinct(p)?;
    let l = p.len();
    let q = p.letters();
    Ok((2..=l)
        .filter(|&i| order_isomorphic(&q[i - 1..], &q[..l - i + 1]))
        .collect())
}

/// Smallest extendable index (always exists for `l >= 2`).
pub fn minimal_extendable_index(p: &Pattern) -> Result<usize> {
    extendable_indices(p)?
        .first()
        .copied()
        .ok_or_else(|| Error::Precondition(format!("{p} has no extendable index")))
}

fn require_extendable(p: &Pattern, i: usize) -> Result<()> {
    if !extendable_indices(p)?.contains(&i) {
        return Err(Error::Precondition(format!(
            "index {i} is not extendable for {p}"
        )));
    }
    Ok(())
}

/// `(sigma, delta1, delta2, shared, unshared)` for `p` at extendable index `i`.
#[allow(clippy::type_complexity)]
pub fn gap_vectors(
    p: &Pattern,
    i: usize,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>)> {
    require_extendable(p, i)?;
    let l = p.len();
    let overlap = l - i + 1;
    // 1-based view of the pattern
    let pv = |j: usize| p.letters()[j - 1] as i64;
    let mut sigma: Vec<usize> = (1..=overlap).collect();
    sigma.sort_by_key(|&j| pv(j));
    let mut d1 = Vec::with_capacity(overlap + 1);
    let mut d2 = Vec::with_capacity(overlap + 1);
    for j in 1..=overlap + 1 {
        let (lo1, lo2) = if j == 1 {
            (0, 0)
        } else {
            (pv(sigma[j - 2]), pv(sigma[j - 2] + i - 1))
        };
        let (hi1, hi2) = if j == overlap + 1 {
            (l as i64 + 1, l as i64 + 1)
        } else {
            (pv(sigma[j - 1]), pv(sigma[j - 1] + i - 1))
        };
        d1.push(hi1 - lo1 - 1);
        d2.push(hi2 - lo2 - 1);
    }
    if d1.iter().chain(&d2).any(|&d| d < 0) {
        return Err(Error::Integrity(format!(
            "negative gap at extendable index {i} of {p}"
        )));
    }
    let d1: Vec<usize> = d1.into_iter().map(|d| d as usize).collect();
    let d2: Vec<usize> = d2.into_iter().map(|d| d as usize).collect();
    let shared = d1.iter().zip(&d2).map(|(a, b)| *a.min(b)).collect();
    let unshared = d1.iter().zip(&d2).map(|(a, b)| a.abs_diff(*b)).collect();
    Ok((sigma, d1, d2, shared, unshared))
}

fn multiset_from_bands(shared: &[usize], unshared: &[usize]) -> Multiset {
    let bands = shared.len();
    let mut raw = Vec::new();
    for j in 0..bands {
        raw.extend(std::iter::repeat_n(2, shared[j]));
        let ones = if j + 1 < bands {
            unshared[j] + 1
        } else {
            unshared[j]
        };
        raw.extend(std::iter::repeat_n(1, ones));
    }
    Multiset::new(&raw)
}

/// The extended multiset of `p` at extendable index `i`, read off the gap
/// vectors band by band.
pub fn extended_multiset(p: &Pattern, i: usize) -> Result<Multiset> {
    let (_, _, _, shared, unshared) = gap_vectors(p, i)?;
    Ok(multiset_from_bands(&shared, &unshared))
}

/// The extended permutation of `p` at extendable index `i`.
///
/// Values are handed out band by band from the bottom. Inside a band the
/// `t`-th smallest prefix-only letter and the `t`-th smallest suffix-only
/// letter share a value while both exist; the leftover letters of the larger
/// side follow, then the overlap letter closing the band.
pub fn extended_permutation(p: &Pattern, i: usize) -> Result<Word> {
    Ok(extend(p, i)?.extended_permutation)
}

/// Full report at one extendable index, with postconditions verified.
pub fn extend(p: &Pattern, i: usize) -> Result<ExtendabilityReport> {
    let (sigma, delta1, delta2, shared, unshared) = gap_vectors(p, i)?;
    let l = p.len();
    let overlap = l - i + 1;
    let total = l + i - 1;
    let pv = |j: usize| p.letters()[j - 1];

    // first occurrence: position q in 1..=l has rank pv(q);
    // second occurrence: position q in i..=total has rank pv(q - i + 1).
    let mut word = vec![0u64; total];
    let mut next = 0u64;
    for j in 1..=overlap + 1 {
        let band = |rank: u64, lo: Option<u64>, hi: Option<u64>| {
            lo.is_none_or(|lo| rank > lo) && hi.is_none_or(|hi| rank < hi)
        };
        let (lo1, lo2) = if j == 1 {
            (None, None)
        } else {
            (Some(pv(sigma[j - 2])), Some(pv(sigma[j - 2] + i - 1)))
        };
        let (hi1, hi2) = if j == overlap + 1 {
            (None, None)
        } else {
            (Some(pv(sigma[j - 1])), Some(pv(sigma[j - 1] + i - 1)))
        };
        let mut prefix: Vec<usize> = (1..i).filter(|&q| band(pv(q), lo2, hi2)).collect();
        prefix.sort_by_key(|&q| pv(q));
        let mut suffix: Vec<usize> = (l + 1..=total)
            .filter(|&q| band(pv(q - i + 1), lo1, hi1))
            .collect();
        suffix.sort_by_key(|&q| pv(q - i + 1));
        debug_assert_eq!(prefix.len(), delta2[j - 1]);
        debug_assert_eq!(suffix.len(), delta1[j - 1]);

        let common = prefix.len().min(suffix.len());
        for t in 0..common {
            next += 1;
            word[prefix[t] - 1] = next;
            word[suffix[t] - 1] = next;
        }
        for &q in prefix[common..].iter().chain(&suffix[common..]) {
            next += 1;
            word[q - 1] = next;
        }
        if j <= overlap {
            next += 1;
            word[i - 1 + sigma[j - 1] - 1] = next;
        }
    }

    let extended_multiset = multiset_from_bands(&shared, &unshared);
    let q = p.letters();
    if !order_isomorphic(&word[..l], q) || !order_isomorphic(&word[total - l..], q) {
        return Err(Error::Integrity(format!(
            "extended word {word:?} of {p} at {i} does not hold two occurrences"
        )));
    }
    let extended_permutation = Word::new(word)?;
    if !extended_permutation.is_permutation_of(&extended_multiset) {
        return Err(Error::Integrity(format!(
            "extended word {extended_permutation} of {p} at {i} is not a permutation of {extended_multiset}"
        )));
    }
    Ok(ExtendabilityReport {
        pattern: p.to_string(),
        index: i,
        sigma,
        delta1,
        delta2,
        shared,
        unshared,
        extended_permutation,
        extended_multiset,
    })
}

/// Witness that "to have exactly one occurrence" of a classical pattern of
/// length `l >= 3` is unstable.
///
/// `M` has two copies of `p_1`, three of `p_l` and one of every other letter;
/// the rearrangement swaps the multiplicities of `p_2` and `p_l`. The counts
/// are `l(l^2-5)/2` and `l(l^2-3)/2`, which is checked against enumeration.
pub fn classical_instability_witness(p: &Pattern, budget: Budget) -> Result<WitnessPair> {
    if !p.is_classical() || !p.has_distinct_letters() {
        return Err(Error::Precondition(format!(
            "{p} must be a classical pattern with distinct letters"
        )));
    }
    let l = p.len();
    if l < 3 {
        return Err(Error::Precondition(format!(
            "classical patterns of length {l} are stable; no witness exists"
        )));
    }
    let q = p.letters();
    let letter = |pos: usize| q[pos] as usize - 1;
    let mut k = vec![1usize; l];
    k[letter(0)] = 2;
    k[letter(l - 1)] = 3;
    let m = Multiset::new(&k);
    k.swap(letter(1), letter(l - 1));
    let bar = Multiset::new(&k);

    let count = count_with(&m, p, 1, budget)?;
    let rearranged_count = count_with(&bar, p, 1, budget)?;
    let l = l as u64;
    let expect = BigUint::from(l * (l * l - 5) / 2);
    let expect_bar = BigUint::from(l * (l * l - 3) / 2);
    if count != expect || rearranged_count != expect_bar {
        return Err(Error::Integrity(format!(
            "witness counts for {p}: {count} vs {rearranged_count}, expected {expect} vs {expect_bar}"
        )));
    }
    Ok(WitnessPair {
        pattern: p.to_string(),
        s: 1,
        multiset: m,
        rearranged: bar,
        count,
        rearranged_count,
        offsets: None,
    })
}

/// Witness that "to have exactly two occurrences" of a consecutive pattern is
/// unstable, built from the extended multiset at the minimal extendable index.
///
/// Returns `Ok(None)` when the extended permutation has distinct letters (no
/// construction applies). The pair is always recounted; a failed recount is
/// an integrity error.
pub fn consecutive_instability_witness(p: &Pattern, budget: Budget) -> Result<Option<WitnessPair>> {
    require_consecutive_distinct(p)?;
    let i = minimal_extendable_index(p)?;
    let report = extend(p, i)?;
    let shared = &report.shared;
    let unshared = &report.unshared;
    let bands = shared.len();
    let positive: Vec<usize> = (1..=bands).filter(|&j| shared[j - 1] > 0).collect();
    if positive.is_empty() {
        return Ok(None);
    }
    let unshared_before = |j: usize| -> usize { unshared[..j - 1].iter().sum() };

    let m = report.extended_multiset.clone();
    let mut k = m.multiplicities().to_vec();
    let offsets = if positive.len() == 1 {
        let j0 = positive[0];
        let ell_prime = (bands - 1) + shared[j0 - 1] + unshared.iter().sum::<usize>();
        let ell1 = j0 - 1 + unshared_before(j0);
        if j0 < bands {
            k.swap(ell1, ell_prime - 1);
        } else {
            k.swap(0, ell1);
        }
        WitnessOffsets {
            ell_prime,
            ell1,
            ell2: None,
            ell3: None,
            positive_bands: positive.clone(),
        }
    } else {
        let (j1, j2) = (positive[0], positive[1]);
        let ell_prime = (bands - 1) + shared.iter().sum::<usize>() + unshared.iter().sum::<usize>();
        let ell1 = j1 - 1 + unshared_before(j1);
        let ell2 = j2 - 1 + shared[j1 - 1] + unshared_before(j2);
        let ell3 = j2 - 2 + 2 * shared[j1 - 1] + unshared_before(j2);
        k.swap(ell1, ell_prime - 1);
        WitnessOffsets {
            ell_prime,
            ell1,
            ell2: Some(ell2),
            ell3: Some(ell3),
            positive_bands: positive.clone(),
        }
    };
    if offsets.ell_prime != m.letters() {
        return Err(Error::Integrity(format!(
            "offset l' = {} but the extended multiset of {p} has {} letters",
            offsets.ell_prime,
            m.letters()
        )));
    }
    let bar = Multiset::new(&k);
    let count = count_with(&m, p, 2, budget)?;
    let rearranged_count = count_with(&bar, p, 2, budget)?;
    if count.is_zero() || !rearranged_count.is_zero() {
        return Err(Error::Integrity(format!(
            "witness for {p} failed to verify: |M*(p;2)| = {count} on {m}, {rearranged_count} on {bar}"
        )));
    }
    Ok(Some(WitnessPair {
        pattern: p.to_string(),
        s: 2,
        multiset: m,
        rearranged: bar,
        count,
        rearranged_count,
        offsets: Some(offsets),
    }))
}
