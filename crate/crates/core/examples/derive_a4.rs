//! Scores every 4-arrow pattern without isolated arrows against Ω1/Ω2 and
//! one-sided Ω3 invariance on a fuzz corpus, and prints the survivors with
//! their values on the figure-eight knot and its inverse.
//!
//!     cargo run --release --example derive_a4

use gaussmoves::corpus::{corpus, rng};
use gaussmoves::demo::FIGURE_EIGHT;
use gaussmoves::invariants::{all_patterns, builtin_pattern, count_pattern};
use gaussmoves::verify::fuzz_moves;
use gaussmoves::{apply_move, classify, parse_gauss_code, reverse_orientation, MoveClass, Sign};

fn main() {
    let patterns: Vec<_> = all_patterns(4).into_iter().filter(|p| !p.has_isolated_arrow()).collect();
    let f = parse_gauss_code(FIGURE_EIGHT).unwrap();
    let fr = reverse_orientation(&f);
    let states = corpus(1, 150, 8, false);
    let mut r = rng(9);
    // Violations under Ω1/Ω2, descending Ω3, ascending Ω3.
    let mut bad = vec![[0usize; 3]; patterns.len()];
    for s in &states {
        for site in fuzz_moves(&mut r, s, Some(4)) {
            let slot = match classify(&site, s.diagram()).unwrap().class {
                MoveClass::R3 { m: Sign::Plus, .. } => 1,
                MoveClass::R3 { .. } => 2,
                _ => 0,
            };
            let t = apply_move(s, &site).unwrap();
            for (k, p) in patterns.iter().enumerate() {
                if count_pattern(s.diagram(), p) != count_pattern(t.diagram(), p) {
                    bad[k][slot] += 1;
                }
            }
        }
    }
    println!("{} patterns, {} diagrams", patterns.len(), states.len());
    println!("built-in a_4: {}", builtin_pattern('a', 4).unwrap());
    for (k, p) in patterns.iter().enumerate() {
        if bad[k][0] == 0 && (bad[k][1] == 0 || bad[k][2] == 0) {
            let kind = if bad[k][1] == 0 { "descending" } else { "ascending" };
            println!("{p}: invariant under Ω1, Ω2, {kind} Ω3; F = {}, reverse F = {}", count_pattern(&f, p), count_pattern(&fr, p));
        }
    }
}
