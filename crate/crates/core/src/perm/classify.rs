//! Empirical Wilf classification by equality of count vectors.

use std::collections::BTreeSet;

use rayon::prelude::*;
use rug::Integer;

use super::{count_avoiders, symmetry, PatternSet, Permutation, SymmetryOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WilfClass {
    /// Lexicographically smallest member.
    pub representative: Permutation,
    pub patterns: Vec<Permutation>,
    pub counts: Vec<Integer>,
}

fn orbit(p: &Permutation) -> BTreeSet<Permutation> {
    let ops = [SymmetryOp::Reverse, SymmetryOp::Complement, SymmetryOp::Inverse];
    let mut seen = BTreeSet::new();
    let mut stack = vec![p.clone()];
    while let Some(q) = stack.pop() {
        if seen.insert(q.clone()) {
            for op in ops {
                stack.push(symmetry(&q, op));
            }
        }
    }
    seen
}

/// Partition all patterns of `length` into classes sharing s_0..s_max_n.
pub fn classify_wilf(length: usize, max_n: usize) -> Vec<WilfClass> {
    let mut remaining: BTreeSet<Permutation> = Permutation::all(length).into_iter().collect();
    let mut orbits: Vec<Vec<Permutation>> = Vec::new();
    while let Some(p) = remaining.iter().next().cloned() {
        let o = orbit(&p);
        for q in &o {
            remaining.remove(q);
        }
        orbits.push(o.into_iter().collect());
    }

    let counted: Vec<(Vec<Integer>, Vec<Permutation>)> = orbits
        .into_par_iter()
        .map(|o| (count_avoiders(&PatternSet::single(o[0].clone()), max_n).counts, o))
        .collect();

    let mut classes: Vec<WilfClass> = Vec::new();
    for (counts, members) in counted {
        match classes.iter_mut().find(|c| c.counts == counts) {
            Some(c) => c.patterns.extend(members),
            None => classes.push(WilfClass { representative: members[0].clone(), patterns: members, counts }),
        }
    }
    for c in classes.iter_mut() {
        c.patterns.sort();
        c.representative = c.patterns[0].clone();
    }
    classes.sort_by(|a, b| a.counts.cmp(&b.counts).then_with(|| a.representative.cmp(&b.representative)));
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_three_is_one_class() {
        let c = classify_wilf(3, 8);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].patterns.len(), 6);
        assert_eq!(c[0].counts[8], 1430);
    }

    #[test]
    fn length_one() {
        let c = classify_wilf(1, 4);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].patterns.len(), 1);
    }

    #[test]
    fn length_four_three_classes() {
        let c = classify_wilf(4, 10);
        let reps: Vec<String> = c.iter().map(|k| k.representative.to_string()).collect();
        assert_eq!(reps, ["1342", "1234", "1324"]);
        let sizes: usize = c.iter().map(|k| k.patterns.len()).sum();
        assert_eq!(sizes, 24);
    }
}
