//! Depth-first generation of avoiders by inserting the next largest value.

use rayon::prelude::*;
use rug::Integer;

use super::{contains, occurs_through_max, PatternSet, Permutation};

/// Avoider counts s_0..s_max_n for one pattern set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountVector {
    pub id: String,
    pub counts: Vec<Integer>,
    /// Largest n whose count is final; below `counts.len() - 1` only when a
    /// node cap stopped the search.
    pub complete_through: usize,
}

impl CountVector {
    pub fn is_complete(&self, max_n: usize) -> bool {
        self.complete_through >= max_n
    }

    /// OEIS-style `n value` lines joined by `\n`.
    pub fn to_bfile(&self) -> String {
        let lines: Vec<String> = self
            .counts
            .iter()
            .take(self.complete_through + 1)
            .enumerate()
            .map(|(n, c)| format!("{n} {c}"))
            .collect();
        lines.join("\n")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "patterns": self.id,
            "complete_through": self.complete_through,
            "counts": self.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

struct Compiled {
    pats: Vec<(Vec<u8>, usize)>,
}

impl Compiled {
    fn new(set: &PatternSet) -> Self {
        let pats = set
            .patterns()
            .iter()
            .map(|p| {
                let k = p.len() as u8;
                let m = p.word().iter().position(|&v| v == k).unwrap();
                (p.word().to_vec(), m)
            })
            .collect();
        Compiled { pats }
    }

    fn avoids_after_insert(&self, word: &[u8], pos: usize) -> bool {
        self.pats.iter().all(|(t, m)| !occurs_through_max(word, pos, t, *m))
    }
}

fn dfs(word: &mut Vec<u8>, max_n: usize, c: &Compiled, counts: &mut [u64]) {
    let n = word.len();
    let v = n as u8 + 1;
    for pos in 0..=n {
        word.insert(pos, v);
        if c.avoids_after_insert(word, pos) {
            counts[n + 1] += 1;
            if n + 1 < max_n {
                dfs(word, max_n, c, counts);
            }
        }
        word.remove(pos);
    }
}

fn children(word: &[u8], c: &Compiled) -> Vec<Vec<u8>> {
    let n = word.len();
    let mut out = Vec::new();
    for pos in 0..=n {
        let mut w = word.to_vec();
        w.insert(pos, n as u8 + 1);
        if c.avoids_after_insert(&w, pos) {
            out.push(w);
        }
    }
    out
}

/// s_n for n = 0..=max_n. The frontier below depth 6 is split across the
/// current rayon pool.
pub fn count_avoiders(set: &PatternSet, max_n: usize) -> CountVector {
    let c = Compiled::new(set);
    let mut counts = vec![0u64; max_n + 1];
    counts[0] = 1;
    let split = max_n.min(6);
    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for depth in 1..=split {
        frontier = frontier.iter().flat_map(|w| children(w, &c)).collect();
        counts[depth] = frontier.len() as u64;
    }
    if max_n > split {
        let deep = frontier
            .par_iter()
            .map(|w| {
                let mut local = vec![0u64; max_n + 1];
                let mut word = w.clone();
                dfs(&mut word, max_n, &c, &mut local);
                local
            })
            .reduce(
                || vec![0u64; max_n + 1],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        counts[split + 1..=max_n].copy_from_slice(&deep[split + 1..=max_n]);
    }
    CountVector {
        id: set.id(),
        counts: counts.into_iter().map(Integer::from).collect(),
        complete_through: max_n,
    }
}

fn dfs_budget(word: &mut Vec<u8>, max_n: usize, c: &Compiled, counts: &mut [u64], budget: &mut u64) -> bool {
    let n = word.len();
    let v = n as u8 + 1;
    for pos in 0..=n {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        word.insert(pos, v);
        let mut ok = true;
        if c.avoids_after_insert(word, pos) {
            counts[n + 1] += 1;
            if n + 1 < max_n {
                ok = dfs_budget(word, max_n, c, counts, budget);
            }
        }
        word.remove(pos);
        if !ok {
            return false;
        }
    }
    true
}

/// Like [`count_avoiders`] but single-threaded and limited to `node_cap`
/// insertion tests in total; deepens one level at a time so a partial result
/// always ends at the last fully counted n.
pub fn count_avoiders_capped(set: &PatternSet, max_n: usize, node_cap: u64) -> CountVector {
    let c = Compiled::new(set);
    let mut budget = node_cap;
    let mut done = vec![Integer::from(1)];
    for depth in 1..=max_n {
        let mut counts = vec![0u64; depth + 1];
        if !dfs_budget(&mut Vec::new(), depth, &c, &mut counts, &mut budget) {
            break;
        }
        done.push(Integer::from(counts[depth]));
    }
    let complete_through = done.len() - 1;
    CountVector { id: set.id(), counts: done, complete_through }
}

/// Reference counter: test every permutation of each length.
pub fn count_avoiders_naive(set: &PatternSet, max_n: usize) -> CountVector {
    let counts = (0..=max_n)
        .map(|n| {
            let k = Permutation::all(n)
                .iter()
                .filter(|pi| set.patterns().iter().all(|t| !contains(pi, t)))
                .count();
            Integer::from(k)
        })
        .collect();
    CountVector { id: set.id(), counts, complete_through: max_n }
}
