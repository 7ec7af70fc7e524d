//! Slow reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use gaussmoves::invariants::ArrowPattern;
use gaussmoves::{restrict_to_subset, ArrowId, Endpoint, GaussDiagram};

/// True if some rotation of `word` and some bijection of arrow ids turns it
/// into the pattern word. A rotation forces the bijection, so each rotation
/// is checked by building it position by position.
pub fn same_unsigned_diagram(word: &[Endpoint], pattern: &[Endpoint]) -> bool {
    let len = word.len();
    if len != pattern.len() {
        return false;
    }
    (0..len.max(1)).any(|r| {
        let mut fwd: HashMap<ArrowId, ArrowId> = HashMap::new();
        let mut back: HashMap<ArrowId, ArrowId> = HashMap::new();
        (0..len).all(|k| {
            let e = word[(r + k) % len];
            let p = pattern[k];
            e.role == p.role
                && *fwd.entry(e.arrow).or_insert(p.arrow) == p.arrow
                && *back.entry(p.arrow).or_insert(e.arrow) == e.arrow
        })
    })
}

/// Sum over all arrow subsets matching `p` of the product of their signs.
pub fn naive_count(d: &GaussDiagram, p: &ArrowPattern) -> i64 {
    let ids: Vec<ArrowId> = d.arrows().collect();
    let m = p.arrows();
    let mut total = 0;
    for mask in 0u32..(1 << ids.len()) {
        if mask.count_ones() as usize != m || m == 0 {
            continue;
        }
        let keep: BTreeSet<ArrowId> = (0..ids.len()).filter(|k| mask >> k & 1 == 1).map(|k| ids[k]).collect();
        let sub = restrict_to_subset(d, &keep).unwrap();
        if same_unsigned_diagram(sub.word(), p.word()) {
            total += keep.iter().map(|a| d.sign(*a).unwrap().to_i32() as i64).product::<i64>();
        }
    }
    total
}

/// `w_3`: three arrows, pairwise crossing, tails and heads alternating.
pub fn w3_pattern() -> ArrowPattern {
    ArrowPattern::parse("t1 h3 t2 h1 t3 h2").unwrap()
}
