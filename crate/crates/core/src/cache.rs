//! Append-only result cache: one JSON object per line.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::pattern::Pattern;
use crate::Count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Bruteforce,
    Recurrence,
    Macmahon,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Bruteforce => "bruteforce",
            Provenance::Recurrence => "recurrence",
            Provenance::Macmahon => "macmahon",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub multiset: Vec<usize>,
    pub pattern: String,
    pub s: u64,
}

/// Patterns whose distribution is known not to depend on the order of the
/// multiplicities, so their counts can be keyed by the sorted vector.
pub fn order_insensitive(p: &Pattern) -> bool {
    let letters = p.letters();
    match letters.len() {
        1 => true,
        2 if letters[0] == letters[1] => p.is_consecutive(),
        2 => p.is_classical() || p.is_consecutive(),
        _ => p.is_consecutive() && p.is_monotone(),
    }
}

impl CacheKey {
    pub fn new(m: &Multiset, p: &Pattern, s: u64) -> Self {
        let multiset = if order_insensitive(p) {
            m.canonical().multiplicities().to_vec()
        } else {
            m.multiplicities().to_vec()
        };
        CacheKey {
            multiset,
            pattern: p.to_string(),
            s,
        }
    }
}

/// One line of the cache file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    #[serde(flatten)]
    pub key: CacheKey,
    pub value: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub path: String,
    pub entries: usize,
    pub by_pattern: BTreeMap<String, usize>,
    pub by_provenance: BTreeMap<String, usize>,
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<CacheKey, (Count, Provenance)>,
}

impl Cache {
    /// Loads the cache at `path`; a missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = Cache {
            path,
            entries: BTreeMap::new(),
        };
        if !cache.path.exists() {
            return Ok(cache);
        }
        let reader = BufReader::new(File::open(&cache.path)?);
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CacheEntry = serde_json::from_str(&line)
                .map_err(|e| Error::Integrity(format!("corrupt cache line {}: {e}", n + 1)))?;
            let value: BigUint = entry.value.parse().map_err(|_| {
                Error::Integrity(format!(
                    "corrupt cache line {}: value {:?} is not a decimal count",
                    n + 1,
                    entry.value
                ))
            })?;
            cache.insert(entry.key, value, entry.provenance)?;
        }
        Ok(cache)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns whether the key was new.
    fn insert(&mut self, key: CacheKey, value: Count, provenance: Provenance) -> Result<bool> {
        match self.entries.get(&key) {
            Some((old, _)) if *old == value => Ok(false),
            Some((old, old_prov)) => Err(Error::Integrity(format!(
                "cache conflict for {} on {:?} at s={}: {old} ({old_prov}) vs {value} ({provenance})",
                key.pattern, key.multiset, key.s
            ))),
            None => {
                self.entries.insert(key, (value, provenance));
                Ok(true)
            }
        }
    }

    pub fn lookup(&self, m: &Multiset, p: &Pattern, s: u64) -> Option<Count> {
        self.entries
            .get(&CacheKey::new(m, p, s))
            .map(|(v, _)| v.clone())
    }

    pub fn store(
        &mut self,
        m: &Multiset,
        p: &Pattern,
        s: u64,
        value: Count,
        provenance: Provenance,
    ) -> Result<()> {
        self.store_many(&[(CacheKey::new(m, p, s), value)], provenance)
    }

    /// Appends the new keys in one write; conflicts abort before writing.
    pub fn store_many(
        &mut self,
        items: &[(CacheKey, Count)],
        provenance: Provenance,
    ) -> Result<()> {
        for (key, value) in items {
            if let Some((old, _)) = self.entries.get(key) {
                if old != value {
                    return Err(Error::Integrity(format!(
                        "cache conflict for {} on {:?} at s={}: {old} vs {value}",
                        key.pattern, key.multiset, key.s
                    )));
                }
            }
        }
        let mut lines = String::new();
        for (key, value) in items {
            if self.insert(key.clone(), value.clone(), provenance)? {
                let entry = CacheEntry {
                    key: key.clone(),
                    value: value.to_string(),
                    provenance,
                };
                lines.push_str(&serde_json::to_string(&entry).expect("entry serializes"));
                lines.push('\n');
            }
        }
        if !lines.is_empty() {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&self.path)?;
            f.write_all(lines.as_bytes())?;
        }
        Ok(())
    }

    /// The cached distribution, if every word of `m` is accounted for.
    pub fn lookup_distribution(&self, m: &Multiset, p: &Pattern) -> Option<Distribution> {
        let probe = CacheKey::new(m, p, 0);
        let lo = probe.clone();
        let hi = CacheKey {
            s: u64::MAX,
            ..probe
        };
        let counts: BTreeMap<u64, Count> = self
            .entries
            .range(lo..=hi)
            .map(|(k, (v, _))| (k.s, v.clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let total: Count = counts.values().sum();
        if total != m.count_words() {
            return None;
        }
        Some(Distribution {
            multiset: m.clone(),
            pattern: p.to_string(),
            counts,
        })
    }

    pub fn store_distribution(
        &mut self,
        d: &Distribution,
        p: &Pattern,
        provenance: Provenance,
    ) -> Result<()> {
        let items: Vec<(CacheKey, Count)> = d
            .counts
            .iter()
            .map(|(&s, v)| (CacheKey::new(&d.multiset, p, s), v.clone()))
            .collect();
        self.store_many(&items, provenance)
    }

    pub fn stats(&self) -> CacheStats {
        let mut stats = CacheStats {
            path: self.path.display().to_string(),
            entries: self.entries.len(),
            ..Default::default()
        };
        for (k, (_, prov)) in &self.entries {
            *stats.by_pattern.entry(k.pattern.clone()).or_insert(0) += 1;
            *stats.by_provenance.entry(prov.to_string()).or_insert(0) += 1;
        }
        stats
    }

    pub fn clear(&mut self) -> Result<()> {
        self.entries.clear();
        if self.path.exists() {
            File::create(&self.path)?;
        }
        Ok(())
    }
}
