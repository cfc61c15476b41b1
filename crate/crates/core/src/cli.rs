//! Command-line front end. [`run`] never touches the process streams, so the
//! binary and the tests share it.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::bijection::Bijection;
use crate::cache::{Cache, CacheKey, Provenance};
use crate::distribution::distribution;
use crate::error::{Error, Result};
use crate::eulerian::{self, GfKind};
use crate::extend;
use crate::multiset::{Multiset, Word};
use crate::pattern::Pattern;
use crate::stability::{self, Family, ScanOptions};
use crate::Budget;

#[derive(Parser, Debug)]
#[command(
    name = "multistab",
    version,
    about = "Pattern statistics over multiset permutations"
)]
struct Cli {
    /// Emit a single JSON document instead of plain lines.
    #[arg(long, global = true)]
    json: bool,
    /// Result cache file (one JSON object per line).
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    /// Maximum number of words a single enumeration may visit.
    #[arg(long, global = true, value_name = "WORDS")]
    budget: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Occurrences of a pattern in a word.
    Count { pattern: String, word: String },
    /// Distribution of the occurrence count over all permutations of a multiset.
    Dist { pattern: String, multiset: String },
    /// Compare distributions across all rearrangements of the multiplicities.
    Stability {
        pattern: String,
        multiset: String,
        /// Compare a single entry of the distribution.
        #[arg(long)]
        s: Option<u64>,
    },
    /// Search a pattern family for instability witnesses (CSV in plain mode).
    Scan {
        /// consecutive:MIN-MAX, classical:MIN-MAX or list:P1;P2;...
        #[arg(long)]
        family: String,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        max_letters: usize,
        #[arg(long)]
        s: Option<u64>,
        /// Check every cell instead of stopping at the first witness.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Apply psi, phi, theta or tau at index i.
    Bijection {
        name: String,
        index: usize,
        word: String,
        /// Report the pattern count before and after.
        #[arg(long)]
        check: Option<String>,
    },
    /// Extended permutation of a consecutive pattern.
    Extend {
        pattern: String,
        /// Defaults to the minimal extendable index.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Pair of multisets showing that a pattern is not stable (JSON).
    Witness { pattern: String },
    /// Table of A(m,k,s) as CSV m,k,s,value.
    Eulerian {
        #[arg(long)]
        max_m: usize,
    },
    /// Compare a generating-function coefficient with enumeration.
    VerifyGf {
        #[arg(value_parser = ["12", "21"])]
        kind: String,
        multiset: String,
        s: u64,
    },
    /// Check the differential equation for the A(m,k,s) series.
    VerifyPde {
        #[arg(long)]
        xdeg: usize,
        #[arg(long)]
        ydeg: usize,
        #[arg(long)]
        zdeg: usize,
    },
    /// Inspect or reset the cache.
    Cache { action: CacheAction },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CacheAction {
    Stats,
    Clear,
}

/// Exit status and captured streams of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INTEGRITY: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Integrity(_) => EXIT_INTEGRITY,
        Error::Io(_) => 1,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stderr: text,
                    ..Default::default()
                }
            } else {
                Output {
                    code: 0,
                    stdout: text,
                    ..Default::default()
                }
            };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::Precondition(format!(
                "cannot start {n} threads: {e}"
            ))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(out) => out,
        Err(e) => Output {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn ok(stdout: String) -> Result<Output> {
    Ok(Output {
        code: 0,
        stdout,
        stderr: String::new(),
    })
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("output serializes");
    s.push('\n');
    s
}

fn open_cache(cli: &Cli) -> Result<Option<Cache>> {
    cli.cache.as_ref().map(Cache::open).transpose()
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let budget = cli.budget.map(Budget::new).unwrap_or_default();
    match &cli.command {
        Command::Count { pattern, word } => {
            let p: Pattern = pattern.parse()?;
            let w: Word = word.parse()?;
            let n = p.count_occurrences(&w);
            if cli.json {
                ok(json_line(&json!({
                    "pattern": p.to_string(),
                    "word": w.to_string(),
                    "count": n.to_string(),
                })))
            } else {
                ok(format!("{n}\n"))
            }
        }
        Command::Dist { pattern, multiset } => {
            let p: Pattern = pattern.parse()?;
            let m: Multiset = multiset.parse()?;
            let mut cache = open_cache(cli)?;
            let cached = cache.as_ref().and_then(|c| c.lookup_distribution(&m, &p));
            let d = match cached {
                Some(d) => d,
                None => {
                    let d = distribution(&m, &p, budget)?;
                    if let Some(c) = cache.as_mut() {
                        c.store_distribution(&d, &p, Provenance::Bruteforce)?;
                    }
                    d
                }
            };
            if cli.json {
                ok(format!("{}\n", d.to_json()))
            } else {
                ok(d.counts.iter().map(|(s, c)| format!("{s} {c}\n")).collect())
            }
        }
        Command::Stability {
            pattern,
            multiset,
            s,
        } => {
            let p: Pattern = pattern.parse()?;
            let m: Multiset = multiset.parse()?;
            let v = match s {
                Some(s) => stability::is_i_stable_on(&m, &p, *s, budget)?,
                None => stability::is_stable_on(&m, &p, budget)?,
            };
            if cli.json {
                return ok(json_line(&v));
            }
            match &v.witness {
                None => ok(format!("stable-on-orbit {}\n", v.multiset)),
                Some(w) => ok(format!(
                    "unstable {} {} s={} {} {}\n",
                    w.reference, w.rearranged, w.s, w.count_reference, w.count_rearranged
                )),
            }
        }
        Command::Scan {
            family,
            max_size,
            max_letters,
            s,
            exhaustive,
        } => {
            let family: Family = family.parse()?;
            let mut opts = ScanOptions::new(*max_size, *max_letters);
            opts.only_s = *s;
            opts.budget = budget;
            opts.exhaustive = *exhaustive;
            let report = stability::scan(&family, &opts)?;
            if cli.json {
                ok(format!("{}\n", report.to_json()))
            } else {
                ok(report.to_csv())
            }
        }
        Command::Bijection {
            name,
            index,
            word,
            check,
        } => {
            let b: Bijection = name.parse()?;
            let w: Word = word.parse()?;
            let image = b.apply(&w, *index)?;
            let check = match check {
                Some(text) => {
                    let p: Pattern = text.parse()?;
                    let before = p.count_occurrences(&w);
                    let after = p.count_occurrences(&image);
                    Some((p, before, after))
                }
                None => None,
            };
            if cli.json {
                let check = check.map(|(p, before, after)| {
                    json!({
                        "pattern": p.to_string(),
                        "before": before.to_string(),
                        "after": after.to_string(),
                        "preserved": before == after,
                    })
                });
                return ok(json_line(&json!({
                    "bijection": b.to_string(),
                    "index": index,
                    "input": w.to_string(),
                    "output": image.to_string(),
                    "check": check,
                })));
            }
            let mut out = format!("{image}\n");
            if let Some((p, before, after)) = check {
                out.push_str(&format!("{p} {before} {after}\n"));
            }
            ok(out)
        }
        Command::Extend { pattern, index } => {
            let p: Pattern = pattern.parse()?;
            let i = match index {
                Some(i) => *i,
                None => extend::minimal_extendable_index(&p)?,
            };
            let r = extend::extend(&p, i)?;
            if cli.json {
                return ok(json_line(&r));
            }
            let list = |v: &[usize]| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            ok(format!(
                "index {}\nsigma {}\ndelta1 {}\ndelta2 {}\nshared {}\nunshared {}\nextended-permutation {}\nextended-multiset {}\n",
                r.index,
                list(&r.sigma),
                list(&r.delta1),
                list(&r.delta2),
                list(&r.shared),
                list(&r.unshared),
                r.extended_permutation,
                r.extended_multiset
            ))
        }
        Command::Witness { pattern } => {
            let p: Pattern = pattern.parse()?;
            let w = if p.is_classical() && p.len() > 1 {
                Some(extend::classical_instability_witness(&p, budget)?)
            } else {
                extend::consecutive_instability_witness(&p, budget)?
            };
            match w {
                Some(w) => ok(json_line(&w)),
                None => Ok(Output {
                    code: 0,
                    stdout: "null\n".into(),
                    stderr: format!("no witness construction applies to {p}\n"),
                }),
            }
        }
        Command::Eulerian { max_m } => {
            let table = eulerian::a_table::<BigInt>(*max_m)?;
            let mut rows = Vec::new();
            for m in 0..=*max_m {
                for k in 0..=m / 2 {
                    for s in 0..m.max(1) {
                        rows.push((m, k, s, table.get(m, k, s)));
                    }
                }
            }
            if let Some(mut c) = open_cache(cli)? {
                let ascent: Pattern = "12".parse()?;
                let items: Vec<(CacheKey, crate::Count)> = rows
                    .iter()
                    .filter(|r| r.3 > BigInt::from(0))
                    .map(|(m, k, s, v)| {
                        let ms = Multiset::new(&eulerian::witness_multiplicities(*m, *k));
                        let v = v.to_biguint().expect("table entries are non-negative");
                        (CacheKey::new(&ms, &ascent, *s as u64), v)
                    })
                    .collect();
                c.store_many(&items, Provenance::Recurrence)?;
            }
            if cli.json {
                let entries: Vec<_> = rows
                    .iter()
                    .map(|(m, k, s, v)| json!({"m": m, "k": k, "s": s, "value": v.to_string()}))
                    .collect();
                return ok(json_line(&json!({"m_max": max_m, "entries": entries})));
            }
            let mut out = String::from("m,k,s,value\n");
            for (m, k, s, v) in rows {
                out.push_str(&format!("{m},{k},{s},{v}\n"));
            }
            ok(out)
        }
        Command::VerifyGf { kind, multiset, s } => {
            let m: Multiset = multiset.parse()?;
            let kind = if kind == "12" {
                GfKind::Ascents
            } else {
                GfKind::Descents
            };
            let mut cache = open_cache(cli)?;
            let check = match cache.as_mut() {
                None => eulerian::verify_gf(kind, &m, *s, budget)?,
                Some(c) => verify_gf_cached(c, kind, &m, *s, budget)?,
            };
            let line = if cli.json {
                json_line(&check)
            } else {
                format!(
                    "{} {} {} s={} coefficient={} bruteforce={}\n",
                    if check.holds { "pass" } else { "fail" },
                    check.pattern,
                    check.multiset,
                    check.s,
                    check.coefficient,
                    check.bruteforce
                )
            };
            Ok(Output {
                code: if check.holds { 0 } else { EXIT_INTEGRITY },
                stdout: line,
                stderr: String::new(),
            })
        }
        Command::VerifyPde { xdeg, ydeg, zdeg } => {
            let check = eulerian::verify_pde(*xdeg, *ydeg, *zdeg)?;
            let line = if cli.json {
                json_line(&check)
            } else if let Some(bad) = &check.mismatch {
                format!(
                    "fail at exponent ({}) lhs={} rhs={}\n",
                    bad.exponent
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                    bad.lhs,
                    bad.rhs
                )
            } else {
                format!(
                    "pass ({},{},{}) {} coefficients\n",
                    xdeg, ydeg, zdeg, check.coefficients_checked
                )
            };
            Ok(Output {
                code: if check.holds { 0 } else { EXIT_INTEGRITY },
                stdout: line,
                stderr: String::new(),
            })
        }
        Command::Cache { action } => {
            let mut cache = open_cache(cli)?
                .ok_or_else(|| Error::Syntax("the cache subcommand needs --cache <path>".into()))?;
            match action {
                CacheAction::Stats => {
                    let stats = cache.stats();
                    if cli.json {
                        return ok(json_line(&stats));
                    }
                    let mut out = format!("entries {}\n", stats.entries);
                    for (p, n) in &stats.by_pattern {
                        out.push_str(&format!("pattern {p} {n}\n"));
                    }
                    for (p, n) in &stats.by_provenance {
                        out.push_str(&format!("provenance {p} {n}\n"));
                    }
                    ok(out)
                }
                CacheAction::Clear => {
                    let n = cache.len();
                    cache.clear()?;
                    if cli.json {
                        ok(json_line(&json!({"cleared": n})))
                    } else {
                        ok(format!("cleared {n}\n"))
                    }
                }
            }
        }
    }
}

fn verify_gf_cached(
    cache: &mut Cache,
    kind: GfKind,
    m: &Multiset,
    s: u64,
    budget: Budget,
) -> Result<eulerian::GfCheck> {
    let check = eulerian::verify_gf(kind, m, s, budget)?;
    if check.holds {
        let pattern: Pattern = check.pattern.parse()?;
        let provenance = match kind {
            GfKind::Ascents => Provenance::Macmahon,
            GfKind::Descents => Provenance::Bruteforce,
        };
        cache.store(m, &pattern, s, check.coefficient.clone(), provenance)?;
    }
    Ok(check)
}
