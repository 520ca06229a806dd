//! Permutations in one-line notation, pattern containment and the
//! reverse/complement/inverse symmetries.

mod classify;
mod enumerate;

use std::fmt;
use std::str::FromStr;

pub use classify::{classify_wilf, WilfClass};
pub use enumerate::{count_avoiders, count_avoiders_capped, count_avoiders_naive, CountVector};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<u8>,
}

impl Permutation {
    /// Build from a word over 1..=n; rejects anything that is not a bijection.
    pub fn new(word: Vec<u8>) -> Result<Self, Error> {
        let n = word.len();
        if n > 250 {
            return Err(Error::Invalid("permutations are limited to length 250".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &word {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(Error::Invalid(format!("{word:?} is not a permutation of 1..{n}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { word })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { word: (1..=n as u8).collect() }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// All permutations of length `n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut w: Vec<u8> = (1..=n as u8).collect();
        loop {
            out.push(Permutation { word: w.clone() });
            // next lexicographic permutation
            let Some(i) = (1..w.len()).rev().find(|&i| w[i - 1] < w[i]) else {
                break;
            };
            let j = (i..w.len()).rev().find(|&j| w[j] > w[i - 1]).unwrap();
            w.swap(i - 1, j);
            w[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.len() < 10 {
            for v in &self.word {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word.iter().map(|v| v.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// `25314`, or comma separated when entries exceed 9.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let word: Option<Vec<u8>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<u8>().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        let word = word.ok_or_else(|| Error::Invalid(format!("invalid pattern word '{s}'")))?;
        Permutation::new(word)
    }
}

/// A non-empty set of distinct forbidden patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<Permutation>,
}

impl PatternSet {
    pub fn new(patterns: Vec<Permutation>) -> Result<Self, Error> {
        if patterns.is_empty() {
            return Err(Error::Invalid("pattern set is empty".into()));
        }
        for (i, p) in patterns.iter().enumerate() {
            if p.is_empty() || p.len() > 32 {
                return Err(Error::Invalid(format!("pattern lengths must lie in 1..=32, got {}", p.len())));
            }
            if patterns[..i].contains(p) {
                return Err(Error::Invalid(format!("duplicate pattern {p}")));
            }
        }
        Ok(PatternSet { patterns })
    }

    pub fn single(p: Permutation) -> Self {
        PatternSet::new(vec![p]).expect("pattern length within 1..=32")
    }

    pub fn patterns(&self) -> &[Permutation] {
        &self.patterns
    }

    pub fn id(&self) -> String {
        let names: Vec<String> = self.patterns.iter().map(|p| p.to_string()).collect();
        names.join("+")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryOp {
    Reverse,
    Complement,
    Inverse,
}

pub fn symmetry(p: &Permutation, op: SymmetryOp) -> Permutation {
    let n = p.len() as u8;
    let word = match op {
        SymmetryOp::Reverse => p.word.iter().rev().copied().collect(),
        SymmetryOp::Complement => p.word.iter().map(|&d| n + 1 - d).collect(),
        SymmetryOp::Inverse => {
            let mut inv = vec![0u8; p.len()];
            for (i, &v) in p.word.iter().enumerate() {
                inv[v as usize - 1] = i as u8 + 1;
            }
            inv
        }
    };
    Permutation { word }
}

/// True iff some subsequence of `pi` is order-isomorphic to `tau`.
pub fn contains(pi: &Permutation, tau: &Permutation) -> bool {
    let k = tau.len();
    if k == 0 {
        return true;
    }
    if k > pi.len() {
        return false;
    }
    let mut chosen = Vec::with_capacity(k);
    extend_match(&pi.word, &tau.word, 0, &mut chosen)
}

fn consistent(tau: &[u8], chosen: &[u8], t: usize, v: u8) -> bool {
    chosen.iter().enumerate().all(|(s, &w)| (tau[s] < tau[t]) == (w < v))
}

fn extend_match(pi: &[u8], tau: &[u8], start: usize, chosen: &mut Vec<u8>) -> bool {
    let t = chosen.len();
    if t == tau.len() {
        return true;
    }
    let remaining = tau.len() - t;
    for i in start..=(pi.len() - remaining) {
        let v = pi[i];
        if consistent(tau, chosen, t, v) {
            chosen.push(v);
            if extend_match(pi, tau, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Occurrence test restricted to subsequences that use `word[pos]`, which
/// must hold the maximum value of `word`.
pub(crate) fn occurs_through_max(word: &[u8], pos: usize, tau: &[u8], tau_max_at: usize) -> bool {
    let k = tau.len();
    let left = tau_max_at;
    let right = k - 1 - tau_max_at;
    if left > pos || right > word.len() - 1 - pos {
        return false;
    }
    let mut chosen = [0u8; 32];
    through_rec(word, pos, tau, tau_max_at, 0, 0, &mut chosen)
}

// Assign tau indices in order; index `tau_max_at` is pinned to `pos`.
fn through_rec(word: &[u8], pos: usize, tau: &[u8], m: usize, t: usize, start: usize, chosen: &mut [u8; 32]) -> bool {
    let k = tau.len();
    if t == k {
        return true;
    }
    if t == m {
        chosen[t] = word[pos];
        return through_rec(word, pos, tau, m, t + 1, pos + 1, chosen);
    }
    // Later tau indices on the same side of the pinned slot still need room.
    let (lo, hi) = if t < m {
        (start, pos - (m - t))
    } else {
        (start, word.len() - (k - t))
    };
    let mut i = lo;
    while i <= hi {
        let v = word[i];
        let ok = (0..t).all(|s| (tau[s] < tau[t]) == (chosen[s] < v));
        if ok {
            chosen[t] = v;
            if through_rec(word, pos, tau, m, t + 1, i + 1, chosen) {
                return true;
            }
        }
        i += 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn containment_examples() {
        assert!(contains(&p("123"), &p("123")));
        assert!(!contains(&p("21"), &p("12")));
        assert!(contains(&p("25314"), &p("132")));
        assert!(!contains(&p("54321"), &p("12")));
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(symmetry(&p("25314"), SymmetryOp::Reverse), p("41352"));
        assert_eq!(symmetry(&p("12345"), SymmetryOp::Complement), p("54321"));
        assert_eq!(symmetry(&p("25314"), SymmetryOp::Inverse), p("41352"));
    }

    #[test]
    fn parsing() {
        assert!("1224".parse::<Permutation>().is_err());
        assert!("12a".parse::<Permutation>().is_err());
        assert_eq!(p("1,3,2").word(), &[1, 3, 2]);
        assert_eq!(Permutation::all(3).len(), 6);
        assert_eq!(Permutation::all(0).len(), 1);
        assert!(PatternSet::new(vec![p("12"), p("12")]).is_err());
    }

    #[test]
    fn through_matches_full_search() {
        // Every insertion of the max into every S_5 word, against all of S_3.
        for base in Permutation::all(5) {
            for pos in 0..=5 {
                let mut w: Vec<u8> = base.word().to_vec();
                w.insert(pos, 6);
                let without: Vec<u8> = base.word().to_vec();
                for tau in Permutation::all(3) {
                    let m = tau.word().iter().position(|&v| v == 3).unwrap();
                    let whole = contains(&Permutation { word: w.clone() }, &tau);
                    let before = contains(&Permutation { word: without.clone() }, &tau);
                    let through = occurs_through_max(&w, pos, tau.word(), m);
                    assert_eq!(whole, before || through);
                }
            }
        }
    }
}
