//! Slow, obviously-correct reference implementations used as test oracles.
#![allow(dead_code)]

/// Occurrences of `(letters, adjacent)` in `w` by trying every index subset.
pub fn naive_count(letters: &[u64], adjacent: &[bool], w: &[u64]) -> u64 {
    fn go(
        letters: &[u64],
        adjacent: &[bool],
        w: &[u64],
        chosen: &mut Vec<usize>,
        start: usize,
    ) -> u64 {
        if chosen.len() == letters.len() {
            let ok_adj =
                (0..adjacent.len()).all(|g| !adjacent[g] || chosen[g + 1] == chosen[g] + 1);
            let ok_order = (0..letters.len()).all(|a| {
                (0..letters.len())
                    .all(|b| letters[a].cmp(&letters[b]) == w[chosen[a]].cmp(&w[chosen[b]]))
            });
            return (ok_adj && ok_order) as u64;
        }
        let mut total = 0;
        for j in start..w.len() {
            chosen.push(j);
            total += go(letters, adjacent, w, chosen, j + 1);
            chosen.pop();
        }
        total
    }
    go(letters, adjacent, w, &mut Vec::new(), 0)
}

/// All words with the given letter multiplicities, via every tuple over the
/// alphabet, sorted.
pub fn naive_words(k: &[usize]) -> Vec<Vec<u64>> {
    let n = k.len() as u64;
    let size: usize = k.iter().sum();
    let mut out = Vec::new();
    let mut cur = vec![1u64; size];
    if size == 0 {
        return vec![vec![]];
    }
    loop {
        let mut content = vec![0usize; k.len()];
        for &a in &cur {
            content[a as usize - 1] += 1;
        }
        if content == k {
            out.push(cur.clone());
        }
        let mut pos = size;
        loop {
            if pos == 0 {
                out.sort();
                return out;
            }
            pos -= 1;
            if cur[pos] < n {
                cur[pos] += 1;
                for c in cur.iter_mut().skip(pos + 1) {
                    *c = 1;
                }
                break;
            }
        }
    }
}

pub fn ascents(w: &[u64]) -> u64 {
    w.windows(2).filter(|p| p[0] < p[1]).count() as u64
}

/// Does some word of length `l + i - 1` over `1..=alphabet` start with an
/// occurrence of the consecutive pattern `p` and have another one at `i`?
pub fn overlapping_word_exists(p: &[u64], i: usize, alphabet: u64) -> bool {
    let l = p.len();
    let total = l + i - 1;
    fn consistent(p: &[u64], w: &[u64], start: usize) -> bool {
        let j = w.len() - 1;
        if j < start || j - start >= p.len() {
            return true;
        }
        let pj = p[j - start];
        (start..j).all(|k| p[k - start].cmp(&pj) == w[k].cmp(&w[j]))
    }
    fn go(p: &[u64], i: usize, total: usize, alphabet: u64, w: &mut Vec<u64>) -> bool {
        if w.len() == total {
            return true;
        }
        for a in 1..=alphabet {
            w.push(a);
            if consistent(p, w, 0) && consistent(p, w, i - 1) && go(p, i, total, alphabet, w) {
                return true;
            }
            w.pop();
        }
        false
    }
    go(p, i, total, alphabet, &mut Vec::with_capacity(total))
}

/// Fewest distinct values in a word realizing both overlapping occurrences.
pub fn min_distinct_values(p: &[u64], i: usize) -> u64 {
    (1..=2 * p.len() as u64)
        .find(|&d| overlapping_word_exists(p, i, d))
        .expect("some alphabet suffices")
}

/// All permutations of `1..=l` in lexicographic order.
pub fn permutations(l: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur: Vec<u64> = (1..=l as u64).collect();
    loop {
        out.push(cur.clone());
        let Some(a) = (0..l.saturating_sub(1))
            .rev()
            .find(|&a| cur[a] < cur[a + 1])
        else {
            return out;
        };
        let b = (a + 1..l).rev().find(|&b| cur[b] > cur[a]).unwrap();
        cur.swap(a, b);
        cur[a + 1..].reverse();
    }
}

/// All multiplicity vectors with entries ≥ 1, at most `max_letters`
/// entries and total at most `max_size`.
pub fn compositions(max_size: usize, max_letters: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(left: usize, max_letters: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_letters {
            return;
        }
        for k in 1..=left {
            cur.push(k);
            go(left - k, max_letters, cur, out);
            cur.pop();
        }
    }
    go(max_size, max_letters, &mut Vec::new(), &mut out);
    out
}
