//! Acceptance suite: one pass/fail line per criterion. Runs as a plain
//! binary so the lines show up in `cargo test` output.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use common::{compositions, naive_count, naive_words, permutations};
use multistab::bijection::Bijection;
use multistab::eulerian::{
    a_recurrence_check, a_table, eulerian_table, gf21_coefficient, is_log_concave,
    macmahon_coefficient, verify_pde, witness_multiplicities, EulerTriangle,
};
use multistab::extend::{
    classical_instability_witness, consecutive_instability_witness, extend, extendable_indices,
    minimal_extendable_index,
};
use multistab::stability::{
    canonical_multisets, is_stable_on, scan, Family, ScanOptions, ScanVerdict,
};
use multistab::{avoids, count_occurrences, distribution, Budget, Multiset, Pattern, Word};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

type Check = Result<Value, String>;

fn p(s: &str) -> Pattern {
    s.parse().unwrap()
}

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn count(pattern: &str, word: &str) -> BigUint {
    count_occurrences(&p(pattern), &w(word))
}

/// Recount with the subset-enumeration oracle.
fn naive_total(pattern: &Pattern, m: &Multiset, s: u64) -> u64 {
    naive_words(m.multiplicities())
        .iter()
        .filter(|word| naive_count(pattern.letters(), pattern.adjacency(), word) == s)
        .count() as u64
}

fn criterion_1() -> Check {
    let map = |b: Bijection, i: usize, word: &str| b.apply(&w(word), i).unwrap().to_string();
    let cases: Vec<(&str, String, &str)> = vec![
        (
            "tau_1(321432212)",
            map(Bijection::Tau, 1, "321432212"),
            "312431121",
        ),
        (
            "psi_1(321432212)",
            map(Bijection::Psi, 1, "321432212"),
            "312431121",
        ),
        (
            "theta_1(321432212)",
            map(Bijection::Theta, 1, "321432212"),
            "321431112",
        ),
        ("psi_1(1132)", map(Bijection::Psi, 1, "1132"), "1232"),
        ("phi_1(1132)", map(Bijection::Phi, 1, "1132"), "2231"),
        ("theta_1(11213)", map(Bijection::Theta, 1, "11213"), "22213"),
        ("phi_1(12113)", map(Bijection::Phi, 1, "12113"), "22123"),
    ];
    for (name, got, want) in &cases {
        ensure(got == want, || format!("{name} = {got}, expected {want}"))?;
    }
    let counts: Vec<(&str, &str, &str, u32, u32)> = vec![
        ("1-2", "321432212", "312431121", 9, 9),
        ("12", "1132", "1232", 1, 2),
        ("1-2", "1132", "2231", 4, 2),
        ("12", "11213", "22213", 2, 1),
        ("123", "12113", "22123", 0, 1),
    ];
    for (pat, a, b, ca, cb) in counts {
        ensure(
            count(pat, a) == BigUint::from(ca) && count(pat, b) == BigUint::from(cb),
            || {
                format!(
                    "{pat}: {a} -> {b} counts {} -> {}",
                    count(pat, a),
                    count(pat, b)
                )
            },
        )?;
    }
    ensure(count("1-2-3", "211342") == BigUint::from(3u32), || {
        "count(1-2-3, 211342)".into()
    })?;
    ensure(avoids(&p("132"), &w("211342")), || {
        "211342 should avoid 132".into()
    })?;
    Ok(Value::Null)
}

fn criterion_2() -> Check {
    let q = p("24135");
    let idx = extendable_indices(&q).map_err(|e| e.to_string())?;
    ensure(idx.contains(&4) && idx.contains(&5), || {
        format!("indices {idx:?}")
    })?;
    let r4 = extend(&q, 4).map_err(|e| e.to_string())?;
    let r5 = extend(&q, 5).map_err(|e| e.to_string())?;
    ensure(r4.extended_permutation == w("24135146"), || {
        format!("{}", r4.extended_permutation)
    })?;
    ensure(r5.extended_permutation == w("241357168"), || {
        format!("{}", r5.extended_permutation)
    })?;
    ensure(
        r4.extended_multiset == Multiset::new(&[2, 1, 1, 2, 1, 1]),
        || format!("{}", r4.extended_multiset),
    )?;
    ensure(
        r5.extended_multiset == Multiset::new(&[2, 1, 1, 1, 1, 1, 1, 1]),
        || format!("{}", r5.extended_multiset),
    )?;
    ensure(r4.shared == [1, 1, 0] && r4.unshared == [1, 0, 1], || {
        format!("Delta = {:?} / {:?}", r4.shared, r4.unshared)
    })?;
    let r = p("21435");
    let i = minimal_extendable_index(&r).map_err(|e| e.to_string())?;
    ensure(i == 3, || format!("minimal index of 21435 is {i}"))?;
    let e = extend(&r, 3).map_err(|e| e.to_string())?;
    ensure(e.extended_permutation == w("2143657"), || {
        format!("{}", e.extended_permutation)
    })?;
    for (pat, bar) in [
        ("3142", vec![1, 1, 1, 1, 2]),
        ("24135", vec![1, 1, 1, 2, 1, 2]),
    ] {
        let q = p(pat);
        let pair = consecutive_instability_witness(&q, Budget::default())
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("no witness for {pat}"))?;
        ensure(pair.rearranged == Multiset::new(&bar), || {
            format!("{pat}: {}", pair.rearranged)
        })?;
        let a = naive_total(&q, &pair.multiset, 2);
        let b = naive_total(&q, &pair.rearranged, 2);
        ensure(b == 0 && a > 0, || format!("{pat}: recount {a} vs {b}"))?;
    }
    Ok(Value::Null)
}

fn criterion_3() -> Check {
    let mut rows = Vec::new();
    for l in [3usize, 4] {
        let l3 = l as u64;
        let (want_a, want_b) = (l3 * (l3 * l3 - 5) / 2, l3 * (l3 * l3 - 3) / 2);
        for perm in permutations(l) {
            let q = Pattern::classical(perm).unwrap();
            let pair =
                classical_instability_witness(&q, Budget::default()).map_err(|e| e.to_string())?;
            let a = naive_total(&q, &pair.multiset, 1);
            let b = naive_total(&q, &pair.rearranged, 1);
            ensure(a == want_a && b == want_b, || {
                format!("{q}: {a} and {b}, expected {want_a} and {want_b}")
            })?;
            rows.push(json!([q.to_string(), a, b]));
        }
    }
    Ok(json!({ "patterns": rows.len() }))
}

fn criterion_4() -> Check {
    let patterns = ["1-2", "2-1", "11", "12", "21", "123", "321", "1234", "4321"];
    let mut verdicts = Vec::new();
    for text in patterns {
        let q = p(text);
        for m in canonical_multisets(8, 4) {
            let v = is_stable_on(&m, &q, Budget::default()).map_err(|e| e.to_string())?;
            ensure(v.is_stable(), || {
                format!("{text} unstable on {m}: {:?}", v.witness)
            })?;
            verdicts.push(serde_json::to_value(&v).unwrap());
        }
    }
    let preserved: [(Bijection, &[&str]); 3] = [
        (Bijection::Psi, &["1-2"]),
        (Bijection::Phi, &["12", "21"]),
        (Bijection::Theta, &["123", "1234"]),
    ];
    let mut bijection_rows = Vec::new();
    for k in compositions(8, 4) {
        let m = Multiset::new(&k);
        for i in 1..m.letters() {
            let target = m.transpose(i).unwrap();
            for (name, stats) in &preserved {
                let stats: Vec<Pattern> = stats.iter().map(|s| p(s)).collect();
                let mut seen = HashSet::new();
                for word in m.words() {
                    let image = name.apply(&word, i).map_err(|e| e.to_string())?;
                    ensure(Multiset::new(&image.content()) == target, || {
                        format!("{name}_{i}({word}) = {image} leaves {target}")
                    })?;
                    for q in &stats {
                        ensure(
                            q.count_occurrences(&word) == q.count_occurrences(&image),
                            || format!("{name}_{i} changes {q} on {word}"),
                        )?;
                    }
                    seen.insert(image);
                }
                ensure(BigUint::from(seen.len()) == target.count_words(), || {
                    format!("{name}_{i} is not onto {target}")
                })?;
                bijection_rows.push(json!([name.to_string(), m.to_string(), i, seen.len()]));
            }
        }
    }
    Ok(json!({ "verdicts": verdicts, "bijections": bijection_rows }))
}

fn criterion_5() -> Check {
    let mut opts = ScanOptions::new(8, 8);
    opts.budget = Budget::new(100_000_000);
    let report = scan(
        &Family::Consecutive {
            min_len: 3,
            max_len: 4,
        },
        &opts,
    )
    .map_err(|e| e.to_string())?;
    for e in &report.entries {
        let q = p(&e.pattern);
        if q.is_monotone() {
            ensure(
                e.verdict == ScanVerdict::NoCounterexample && e.cells_skipped == 0,
                || format!("monotone {} flagged or skipped", e.pattern),
            )?;
        } else {
            let wit = e
                .witness
                .as_ref()
                .ok_or_else(|| format!("{} not reported unstable", e.pattern))?;
            let a = naive_total(&q, &wit.reference, wit.s);
            let b = naive_total(&q, &wit.rearranged, wit.s);
            ensure(a != b && BigUint::from(a) == wit.count_reference, || {
                format!("{} witness does not recount", e.pattern)
            })?;
        }
    }
    let list: Vec<Pattern> = ["1-23", "1-32", "2-13", "1-1-2", "112", "1-12", "11-2"]
        .iter()
        .map(|s| p(s))
        .collect();
    let mut opts = ScanOptions::new(6, 6);
    opts.only_s = Some(1);
    let six = scan(&Family::List(list), &opts).map_err(|e| e.to_string())?;
    for e in &six.entries {
        let wit = e
            .witness
            .as_ref()
            .ok_or_else(|| format!("{} not 1-unstable at size 6", e.pattern))?;
        let q = p(&e.pattern);
        let a = naive_total(&q, &wit.reference, 1);
        let b = naive_total(&q, &wit.rearranged, 1);
        ensure(a != b, || format!("{} witness does not recount", e.pattern))?;
    }
    Ok(
        json!({ "consecutive": serde_json::to_value(&report).unwrap(), "list": serde_json::to_value(&six).unwrap() }),
    )
}

fn criterion_6() -> Check {
    let e: EulerTriangle<BigInt> = eulerian_table(6);
    for m in 1..=6 {
        let d = distribution(&Multiset::new(&vec![1; m]), &p("12"), Budget::default())
            .map_err(|e| e.to_string())?;
        for s in 0..m {
            ensure(BigInt::from(d.get(s as u64)) == e.get(m, s), || {
                format!("E({m},{s})")
            })?;
        }
    }
    ensure(
        e.row(3) == [1, 4, 1].map(BigInt::from) && e.row(4) == [1, 11, 11, 1].map(BigInt::from),
        || "E rows 3 and 4".into(),
    )?;
    let table = a_table::<BigInt>(9).map_err(|e| e.to_string())?;
    let mut entries = Vec::new();
    for m in 0..=9 {
        for k in 0..=m / 2 {
            let ms = Multiset::new(&witness_multiplicities(m, k));
            let d = distribution(&ms, &p("12"), Budget::default()).map_err(|e| e.to_string())?;
            for s in 0..=m {
                let v = table.get(m, k, s);
                ensure(BigInt::from(d.get(s as u64)) == v, || {
                    format!("A({m},{k},{s}) = {v}")
                })?;
                entries.push(v.to_string());
            }
            ensure(is_log_concave(&table.row(m, k)), || {
                format!("row ({m},{k}) not log-concave")
            })?;
        }
    }
    let mut recurrences = 0;
    for k in compositions(9, 9) {
        if !k.contains(&1) || k.windows(2).any(|x| x[0] < x[1]) {
            continue;
        }
        let total: usize = k.iter().sum();
        let d = distribution(&Multiset::new(&k), &p("12"), Budget::default())
            .map_err(|e| e.to_string())?;
        for s in 1..total as u64 {
            let r = a_recurrence_check(&k, s, Budget::default()).map_err(|e| e.to_string())?;
            ensure(r == d.get(s), || format!("recurrence at {k:?}, s={s}"))?;
            recurrences += 1;
        }
    }
    Ok(json!({ "a_entries": entries, "recurrences": recurrences }))
}

fn criterion_7() -> Check {
    let mut rows = Vec::new();
    for k in compositions(7, 4) {
        let m = Multiset::new(&k);
        let up = distribution(&m, &p("12"), Budget::default()).map_err(|e| e.to_string())?;
        let down = distribution(&m, &p("21"), Budget::default()).map_err(|e| e.to_string())?;
        for s in 0..m.size() as u64 {
            let a = macmahon_coefficient(&m, s, Budget::default()).map_err(|e| e.to_string())?;
            let b = gf21_coefficient(&m, s, Budget::default()).map_err(|e| e.to_string())?;
            ensure(a == up.get(s), || {
                format!("MacMahon coefficient for {m}, s={s}: {a} vs {}", up.get(s))
            })?;
            ensure(b == down.get(s), || {
                format!("descent coefficient for {m}, s={s}: {b} vs {}", down.get(s))
            })?;
            rows.push(json!([m.to_string(), s, a.to_string(), b.to_string()]));
        }
    }
    let pde = verify_pde(8, 4, 8).map_err(|e| e.to_string())?;
    ensure(pde.holds, || format!("PDE mismatch {:?}", pde.mismatch))?;
    Ok(json!({ "coefficients": rows, "pde": serde_json::to_value(&pde).unwrap() }))
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

struct Line {
    id: usize,
    title: &'static str,
    limit: Option<Duration>,
}

fn report(line: &Line, result: &Check, elapsed: Duration) -> bool {
    let within = line.limit.is_none_or(|l| elapsed <= l);
    let ok = result.is_ok() && within;
    let mut detail = match result {
        Ok(_) => String::new(),
        Err(e) => format!(" :: {e}"),
    };
    if !within {
        detail.push_str(&format!(" :: exceeded {:?}", line.limit.unwrap()));
    }
    println!(
        "criterion {} [{}] {} ({:.2?}){}",
        line.id,
        if ok { "PASS" } else { "FAIL" },
        line.title,
        elapsed,
        detail
    );
    ok
}

fn main() {
    let criteria: Vec<(Line, fn() -> Check)> = vec![
        (
            Line {
                id: 1,
                title: "worked examples for the bijections and counts",
                limit: Some(Duration::from_secs(1)),
            },
            criterion_1,
        ),
        (
            Line {
                id: 2,
                title: "extendability examples and witnesses",
                limit: Some(Duration::from_secs(1)),
            },
            criterion_2,
        ),
        (
            Line {
                id: 3,
                title: "classical witness closed forms",
                limit: Some(Duration::from_secs(10)),
            },
            criterion_3,
        ),
        (
            Line {
                id: 4,
                title: "stability and bijection suite (size <= 8, <= 4 letters)",
                limit: None,
            },
            criterion_4,
        ),
        (
            Line {
                id: 5,
                title: "instability scan of consecutive and listed patterns",
                limit: None,
            },
            criterion_5,
        ),
        (
            Line {
                id: 6,
                title: "Eulerian tables, recurrences and log-concavity",
                limit: Some(Duration::from_secs(60)),
            },
            criterion_6,
        ),
        (
            Line {
                id: 7,
                title: "generating-function coefficients and PDE",
                limit: Some(Duration::from_secs(60)),
            },
            criterion_7,
        ),
    ];
    let mut all_ok = true;
    let mut documents = Vec::new();
    for (line, f) in &criteria {
        let start = Instant::now();
        let result = in_pool(8, f);
        all_ok &= report(line, &result, start.elapsed());
        documents.push(result.ok().map(|v| v.to_string()));
    }

    let start = Instant::now();
    let mut mismatches = Vec::new();
    for (j, (line, f)) in criteria.iter().enumerate().skip(3) {
        let single = in_pool(1, f).ok().map(|v| v.to_string());
        if single.is_none() || single != documents[j] {
            mismatches.push(line.id);
        }
    }
    let result = if mismatches.is_empty() {
        Ok(Value::Null)
    } else {
        Err(format!(
            "outputs differ between 1 and 8 threads for criteria {mismatches:?}"
        ))
    };
    all_ok &= report(
        &Line {
            id: 8,
            title: "identical JSON for 1 and 8 threads (criteria 4-7)",
            limit: None,
        },
        &result,
        start.elapsed(),
    );
    if !all_ok {
        std::process::exit(1);
    }
}
