//! Occurrence distributions `s -> |M*(p;s)|` by exhaustive enumeration.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::multiset::Multiset;
use crate::pattern::Pattern;
use crate::{Budget, Count};

/// Exact distribution of the occurrence count of a pattern over `M*`.
/// Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    pub multiset: Multiset,
    pub pattern: String,
    #[serde(with = "decimal_counts")]
    pub counts: BTreeMap<u64, Count>,
}

impl Distribution {
    /// `|M*(p;s)|`, zero when absent.
    pub fn get(&self, s: u64) -> Count {
        self.counts.get(&s).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn total(&self) -> Count {
        self.counts.values().sum()
    }

    /// `sum_s s * |M*(p;s)|`: the number of occurrences over all of `M*`.
    pub fn total_occurrences(&self) -> Count {
        self.counts.iter().map(|(&s, c)| c * BigUint::from(s)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serializes")
    }
}

/// Computes the distribution of `p` over `M*`, sharded across the current
/// rayon pool. Fails without partial output when `|M*|` exceeds `budget`.
pub fn distribution(m: &Multiset, p: &Pattern, budget: Budget) -> Result<Distribution> {
    budget.check(&m.count_words())?;
    let matcher = p.matcher();
    let raw = m.par_fold_words(
        BTreeMap::<u64, u64>::new,
        |acc, w| *acc.entry(matcher.count(w)).or_insert(0) += 1,
        merge_counts,
    );
    Ok(Distribution {
        multiset: m.clone(),
        pattern: p.to_string(),
        counts: raw
            .into_iter()
            .map(|(s, c)| (s, BigUint::from(c)))
            .collect(),
    })
}

/// `|M*(p;s)|` for a single `s`.
pub fn count_with(m: &Multiset, p: &Pattern, s: u64, budget: Budget) -> Result<Count> {
    budget.check(&m.count_words())?;
    let matcher = p.matcher();
    let cap = s.saturating_add(1);
    let n = m.par_fold_words(
        || 0u64,
        |acc, w| {
            if matcher.count_capped(w, cap) == s {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    Ok(BigUint::from(n))
}

pub(crate) fn merge_counts(mut a: BTreeMap<u64, u64>, b: BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    for (s, c) in b {
        *a.entry(s).or_insert(0) += c;
    }
    a
}

/// Serializes counts as `{"s": "decimal"}`.
pub(crate) mod decimal_counts {
    use std::collections::BTreeMap;

    use num_bigint::BigUint;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<u64, BigUint>, ser: S) -> Result<S::Ok, S::Error> {
        let as_str: BTreeMap<u64, String> = m.iter().map(|(k, v)| (*k, v.to_string())).collect();
        as_str.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<u64, BigUint>, D::Error> {
        let raw = BTreeMap::<u64, String>::deserialize(de)?;
        raw.into_iter()
            .map(|(k, v)| {
                v.parse::<BigUint>()
                    .map(|c| (k, c))
                    .map_err(|_| D::Error::custom(format!("bad count {v:?}")))
            })
            .collect()
    }
}
